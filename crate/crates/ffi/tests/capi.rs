use std::ffi::{CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use rpsynth_ffi::*;

const COPY_SPEC: &str = "inputs: in; outputs: out; spec: G(in <-> out);";

fn spec(text: &str) -> *mut RpSpec {
    let text = CString::new(text).unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { rp_spec_parse(text.as_ptr(), &mut out) }, RpStatus::Ok);
    assert!(!out.is_null());
    out
}

fn last_error() -> String {
    let p = rp_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn synthesize_copy_program() {
    let s = spec(COPY_SPEC);
    let mut prog = ptr::null_mut();
    let status = unsafe { rp_synthesize(s, RpEncoding::Direct, RpDialect::Default, 2, 8, 0.0, &mut prog) };
    assert_eq!(status, RpStatus::Ok);
    assert_eq!(unsafe { rp_program_nodes(prog) }, 6);

    let mut text = ptr::null_mut();
    assert_eq!(unsafe { rp_program_text(prog, &mut text) }, RpStatus::Ok);
    let printed = unsafe { CStr::from_ptr(text) }.to_str().unwrap().to_owned();
    assert!(printed.contains("InOut"), "{printed}");

    let mut passed = false;
    assert_eq!(unsafe { rp_verify(s, prog, &mut passed) }, RpStatus::Ok);
    assert!(passed);
    unsafe {
        rp_string_free(text);
        rp_program_free(prog);
        rp_spec_free(s);
    }
}

#[test]
fn verify_rejects_wrong_program() {
    let s = spec(COPY_SPEC);
    let src = CString::new("while (tt) { out = !in; InOut }").unwrap();
    let mut prog = ptr::null_mut();
    assert_eq!(
        unsafe { rp_program_parse(s, src.as_ptr(), RpDialect::InOut, &mut prog) },
        RpStatus::Ok
    );
    let mut passed = true;
    assert_eq!(unsafe { rp_verify(s, prog, &mut passed) }, RpStatus::Ok);
    assert!(!passed);
    unsafe {
        rp_program_free(prog);
        rp_spec_free(s);
    }
}

#[test]
fn unrealizable_within_budget() {
    let s = spec("inputs: in; outputs: out; spec: G(out <-> X in);");
    let mut prog = ptr::null_mut();
    let status = unsafe { rp_synthesize(s, RpEncoding::Direct, RpDialect::Default, 2, 4, 0.0, &mut prog) };
    assert_eq!(status, RpStatus::Unrealizable);
    assert!(prog.is_null());
    assert!(last_error().contains("4 nodes"));
    unsafe { rp_spec_free(s) };
}

#[test]
fn errors_are_reported() {
    let bad = CString::new("inputs: in; spec: G(").unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { rp_spec_parse(bad.as_ptr(), &mut out) }, RpStatus::ParseError);
    assert!(!last_error().is_empty());

    assert_eq!(unsafe { rp_spec_parse(ptr::null(), &mut out) }, RpStatus::NullPointer);
    let invalid = [0xffu8, 0];
    assert_eq!(
        unsafe { rp_spec_parse(invalid.as_ptr().cast(), &mut out) },
        RpStatus::InvalidUtf8
    );

    let s = spec(COPY_SPEC);
    let mut prog = ptr::null_mut();
    let status = unsafe { rp_synthesize(s, RpEncoding::Direct, RpDialect::Separate, 2, 4, 0.0, &mut prog) };
    assert_eq!(status, RpStatus::ConfigError);
    let status = unsafe { rp_synthesize(s, RpEncoding::Direct, RpDialect::Default, 1, 4, 0.0, &mut prog) };
    assert_eq!(status, RpStatus::ConfigError);
    unsafe { rp_spec_free(s) };

    // A successful call clears the message.
    let s = spec(COPY_SPEC);
    assert!(rp_last_error().is_null());
    unsafe { rp_spec_free(s) };
}

#[test]
fn free_functions_accept_null() {
    unsafe {
        rp_spec_free(ptr::null_mut());
        rp_program_free(ptr::null_mut());
        rp_string_free(ptr::null_mut());
        assert_eq!(rp_program_nodes(ptr::null()), 0);
    }
}

#[test]
fn version_matches_package() {
    let v = unsafe { CStr::from_ptr(rp_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_declares_api_and_compiles() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/rpsynth.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for name in [
        "rp_spec_parse",
        "rp_spec_free",
        "rp_synthesize",
        "rp_program_parse",
        "rp_program_text",
        "rp_program_free",
        "rp_string_free",
        "rp_verify",
        "rp_last_error",
        "typedef struct RpSpec RpSpec",
        "RP_STATUS_OK = 0",
    ] {
        assert!(text.contains(name), "header lacks {name}");
    }
    // Only checked where a C compiler is installed.
    let Ok(status) = Command::new("cc")
        .args(["-fsyntax-only", "-Wall", "-Werror", "-x", "c"])
        .arg(&header)
        .status()
    else {
        return;
    };
    assert!(status.success(), "header does not compile as C");
}
