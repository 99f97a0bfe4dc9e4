//! C interface to rpsynth.
//!
//! Every fallible function returns an [`RpStatus`]; on failure a message is
//! available from [`rp_last_error`] on the same thread until the next call.
//! Handles are opaque and must be released with their `_free` function.
//! Strings returned to the caller are released with [`rp_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::time::Duration;

use rpsynth::ltl::{parse_spec, SpecFile};
use rpsynth::program::{parse_program, print_program, Dialect, ProgramTree, VarSet};
use rpsynth::synth::{make_vars, synthesize, Encoding, SynthConfig, SynthError, SynthOutcome};
use rpsynth::verify::verify_program;

/// Result codes of the C interface.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RpStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    ConfigError = 4,
    Unrealizable = 5,
    Timeout = 6,
    SolverError = 7,
    VerificationFailed = 8,
    Panic = 9,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RpEncoding {
    Direct = 0,
    TwoWay = 1,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RpDialect {
    /// The default dialect of the chosen encoding.
    Default = 0,
    InOut = 1,
    Separate = 2,
}

/// A parsed specification.
pub struct RpSpec {
    spec: SpecFile,
}

/// A program together with its variables.
pub struct RpProgram {
    tree: ProgramTree,
    vars: VarSet,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl ToString) {
    let msg = CString::new(msg.to_string().replace('\0', " ")).expect("NUL bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

struct Error(RpStatus, String);

fn guard(f: impl FnOnce() -> Result<(), Error>) -> RpStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => RpStatus::Ok,
        Ok(Err(Error(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            RpStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char) -> Result<&'a str, Error> {
    if p.is_null() {
        return Err(Error(RpStatus::NullPointer, "null string argument".into()));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| Error(RpStatus::InvalidUtf8, e.to_string()))
}

unsafe fn ref_arg<'a, T>(p: *const T) -> Result<&'a T, Error> {
    p.as_ref()
        .ok_or_else(|| Error(RpStatus::NullPointer, "null handle".into()))
}

fn out_arg<T>(p: *mut T) -> Result<(), Error> {
    if p.is_null() {
        Err(Error(RpStatus::NullPointer, "null output pointer".into()))
    } else {
        Ok(())
    }
}

/// Message describing the last failure on this thread, or NULL. Owned by the
/// library and valid until the next call on this thread.
#[no_mangle]
pub extern "C" fn rp_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn rp_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parses a specification (`inputs: ..; outputs: ..; spec: ..;`).
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rp_spec_parse(text: *const c_char, out: *mut *mut RpSpec) -> RpStatus {
    guard(|| {
        out_arg(out)?;
        let spec = parse_spec(str_arg(text)?).map_err(|e| Error(RpStatus::ParseError, e.to_string()))?;
        *out = Box::into_raw(Box::new(RpSpec { spec }));
        Ok(())
    })
}

/// # Safety
/// `spec` must come from [`rp_spec_parse`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn rp_spec_free(spec: *mut RpSpec) {
    if !spec.is_null() {
        drop(Box::from_raw(spec));
    }
}

/// Synthesizes the smallest program with at most `max_nodes` nodes over
/// `num_vars` variables. `timeout_secs <= 0` means no per-step limit.
/// Returns `Unrealizable` or `Timeout` when no program is produced.
///
/// # Safety
/// `spec` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rp_synthesize(
    spec: *const RpSpec,
    encoding: RpEncoding,
    dialect: RpDialect,
    num_vars: usize,
    max_nodes: usize,
    timeout_secs: f64,
    out: *mut *mut RpProgram,
) -> RpStatus {
    guard(|| {
        out_arg(out)?;
        let spec = &ref_arg(spec)?.spec;
        let encoding = match encoding {
            RpEncoding::Direct => Encoding::Direct,
            RpEncoding::TwoWay => Encoding::TwoWay,
        };
        let dialect = match dialect {
            RpDialect::Default => encoding.default_dialect(),
            RpDialect::InOut => Dialect::InOut,
            RpDialect::Separate => Dialect::Separate,
        };
        let config = |e: SynthError| Error(RpStatus::ConfigError, e.to_string());
        let vars = make_vars(&spec.alphabet, num_vars, dialect).map_err(config)?;
        let mut cfg = SynthConfig::new(encoding, vars, max_nodes);
        if timeout_secs > 0.0 {
            cfg.timeout = Some(Duration::from_secs_f64(timeout_secs));
        }
        let result = synthesize(&spec.formula, &cfg).map_err(|e| match e {
            SynthError::Config(_) | SynthError::Encode(_) => config(e),
            SynthError::Verification(_) | SynthError::Unsound(_) => Error(RpStatus::VerificationFailed, e.to_string()),
            _ => Error(RpStatus::SolverError, e.to_string()),
        })?;
        match result.outcome {
            SynthOutcome::Realized(r) => {
                *out = Box::into_raw(Box::new(RpProgram {
                    tree: r.program,
                    vars: r.vars,
                }));
                Ok(())
            }
            SynthOutcome::Unrealizable => Err(Error(
                RpStatus::Unrealizable,
                format!("no program with at most {max_nodes} nodes"),
            )),
            SynthOutcome::TimedOut { nodes } => Err(Error(RpStatus::Timeout, format!("timed out at {nodes} nodes"))),
        }
    })
}

/// Parses a program over the signals of `spec`. Identifiers other than the
/// signal names become additional variables.
///
/// # Safety
/// `spec` must be a live handle, `text` NUL-terminated and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn rp_program_parse(
    spec: *const RpSpec,
    text: *const c_char,
    dialect: RpDialect,
    out: *mut *mut RpProgram,
) -> RpStatus {
    guard(|| {
        out_arg(out)?;
        let a = &ref_arg(spec)?.spec.alphabet;
        let text = str_arg(text)?;
        let base = match dialect {
            RpDialect::Separate => VarSet::separate(a.num_inputs(), a.num_outputs(), 0),
            RpDialect::InOut | RpDialect::Default => VarSet::inout(&a.inputs, &a.outputs, 0),
        };
        let (tree, vars) = parse_program(text, &base).map_err(|e| Error(RpStatus::ParseError, e.to_string()))?;
        *out = Box::into_raw(Box::new(RpProgram { tree, vars }));
        Ok(())
    })
}

/// Number of nodes of the program tree.
///
/// # Safety
/// `program` must be a live handle or NULL (which yields 0).
#[no_mangle]
pub unsafe extern "C" fn rp_program_nodes(program: *const RpProgram) -> usize {
    program.as_ref().map_or(0, |p| p.tree.len())
}

/// The program in concrete syntax; release with [`rp_string_free`].
///
/// # Safety
/// `program` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rp_program_text(program: *const RpProgram, out: *mut *mut c_char) -> RpStatus {
    guard(|| {
        out_arg(out)?;
        let p = ref_arg(program)?;
        let text = CString::new(print_program(&p.tree, &p.vars)).expect("printed programs contain no NUL");
        *out = text.into_raw();
        Ok(())
    })
}

/// # Safety
/// `program` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn rp_program_free(program: *mut RpProgram) {
    if !program.is_null() {
        drop(Box::from_raw(program));
    }
}

/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn rp_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Checks `program` against `spec`. `*passed` is set to whether every
/// execution satisfies the specification.
///
/// # Safety
/// Both handles must be live and `passed` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rp_verify(spec: *const RpSpec, program: *const RpProgram, passed: *mut bool) -> RpStatus {
    guard(|| {
        out_arg(passed)?;
        let spec = &ref_arg(spec)?.spec;
        let p = ref_arg(program)?;
        let report = verify_program(&p.tree, &p.vars, &spec.formula)
            .map_err(|e| Error(RpStatus::VerificationFailed, e.to_string()))?;
        *passed = report.passed();
        Ok(())
    })
}
