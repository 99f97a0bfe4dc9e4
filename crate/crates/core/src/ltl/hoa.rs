//! Plain-text automaton exchange format.
//!
//! ```text
//! aps: in out
//! states: 2
//! initial: 0
//! acceptance: cobuchi
//! accepting: 1
//! 0 1- 0
//! 0 0- 1
//! 1 -- 1
//! ```
//!
//! After the header, every line `src letter dst` adds one transition. The
//! letter lists one character per atom in declaration order: `1`, `0`, or `-`
//! for either value. `#` starts a comment.

use std::fmt::Write as _;

use super::{AcceptanceKind, LtlError, WordAutomaton};

fn err(line: usize, msg: impl Into<String>) -> LtlError {
    LtlError::Automaton(format!("line {line}: {}", msg.into()))
}

/// Parses an automaton and returns it together with its atom names.
pub fn read_automaton(text: &str) -> Result<(Vec<String>, WordAutomaton), LtlError> {
    let mut aps: Option<Vec<String>> = None;
    let mut states: Option<usize> = None;
    let mut initial: Option<usize> = None;
    let mut kind: Option<AcceptanceKind> = None;
    let mut accepting_list: Vec<usize> = Vec::new();
    let mut delta: Vec<Vec<Vec<usize>>> = Vec::new();

    let parse_num = |line: usize, s: &str| -> Result<usize, LtlError> {
        s.parse::<usize>()
            .map_err(|_| err(line, format!("expected a number, found `{s}`")))
    };

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some((key, value)) = line.split_once(':') {
            let value = value.trim();
            match key.trim() {
                "aps" => aps = Some(value.split_whitespace().map(String::from).collect()),
                "states" => states = Some(parse_num(line_no, value)?),
                "initial" => initial = Some(parse_num(line_no, value)?),
                "acceptance" => {
                    kind = Some(match value {
                        "buchi" => AcceptanceKind::Buchi,
                        "cobuchi" => AcceptanceKind::CoBuchi,
                        other => return Err(err(line_no, format!("unknown acceptance `{other}`"))),
                    })
                }
                "accepting" => {
                    for tok in value.split_whitespace() {
                        accepting_list.push(parse_num(line_no, tok)?);
                    }
                }
                other => return Err(err(line_no, format!("unknown header `{other}`"))),
            }
            continue;
        }
        let (Some(aps), Some(n)) = (&aps, states) else {
            return Err(err(line_no, "transition before `aps:` and `states:`"));
        };
        if delta.is_empty() {
            delta = vec![vec![Vec::new(); 1 << aps.len()]; n];
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        if parts.len() != 3 {
            return Err(err(line_no, "expected `src letter dst`"));
        }
        let src = parse_num(line_no, parts[0])?;
        let dst = parse_num(line_no, parts[2])?;
        if src >= n || dst >= n {
            return Err(err(line_no, "state index out of range"));
        }
        let pattern = parts[1].as_bytes();
        if pattern.len() != aps.len() {
            return Err(err(line_no, "letter length differs from number of atoms"));
        }
        for letter in 0..(1u32 << aps.len()) {
            let matches = pattern.iter().enumerate().all(|(k, c)| match c {
                b'1' => letter >> k & 1 == 1,
                b'0' => letter >> k & 1 == 0,
                _ => true,
            });
            if !pattern.iter().all(|c| matches!(c, b'0' | b'1' | b'-')) {
                return Err(err(line_no, "letters use only `0`, `1` and `-`"));
            }
            if matches {
                let succ = &mut delta[src][letter as usize];
                if !succ.contains(&dst) {
                    succ.push(dst);
                    succ.sort_unstable();
                }
            }
        }
    }

    let aps = aps.ok_or_else(|| LtlError::Automaton("missing `aps:`".into()))?;
    let n = states.ok_or_else(|| LtlError::Automaton("missing `states:`".into()))?;
    let initial = initial.ok_or_else(|| LtlError::Automaton("missing `initial:`".into()))?;
    let kind = kind.ok_or_else(|| LtlError::Automaton("missing `acceptance:`".into()))?;
    if n == 0 || initial >= n {
        return Err(LtlError::Automaton("initial state out of range".into()));
    }
    if delta.is_empty() {
        delta = vec![vec![Vec::new(); 1 << aps.len()]; n];
    }
    let mut accepting = vec![false; n];
    for q in accepting_list {
        if q >= n {
            return Err(LtlError::Automaton(format!("accepting state {q} out of range")));
        }
        accepting[q] = true;
    }
    Ok((
        aps.clone(),
        WordAutomaton {
            num_atoms: aps.len(),
            initial,
            delta,
            accepting,
            kind,
        },
    ))
}

/// Prints an automaton with one line per explicit transition.
pub fn write_automaton(aut: &WordAutomaton, aps: &[String]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "aps: {}", aps.join(" "));
    let _ = writeln!(out, "states: {}", aut.num_states());
    let _ = writeln!(out, "initial: {}", aut.initial);
    let kind = match aut.kind {
        AcceptanceKind::Buchi => "buchi",
        AcceptanceKind::CoBuchi => "cobuchi",
    };
    let _ = writeln!(out, "acceptance: {kind}");
    let acc: Vec<String> = (0..aut.num_states())
        .filter(|&q| aut.accepting[q])
        .map(|q| q.to_string())
        .collect();
    let _ = writeln!(out, "accepting: {}", acc.join(" "));
    for (q, row) in aut.delta.iter().enumerate() {
        for (letter, succ) in row.iter().enumerate() {
            let bits: String = (0..aut.num_atoms)
                .map(|k| if letter >> k & 1 == 1 { '1' } else { '0' })
                .collect();
            for d in succ {
                let _ = writeln!(out, "{q} {bits} {d}");
            }
        }
    }
    out
}
