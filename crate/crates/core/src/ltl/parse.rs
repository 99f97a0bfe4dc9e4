use super::{AlphabetSpec, LtlError, LtlFormula};

/// A parsed specification file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpecFile {
    pub alphabet: AlphabetSpec,
    pub formula: LtlFormula,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Not,
    And,
    Or,
    Implies,
    Iff,
    LParen,
    RParen,
    Colon,
    Semi,
    Comma,
    Eof,
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>, LtlError> {
    let mut out = Vec::new();
    let mut line = 1;
    let mut column = 1;
    let mut chars = text.chars().peekable();
    let err = |line, column, message: String| LtlError::Syntax { line, column, message };
    while let Some(&c) = chars.peek() {
        let (l, col) = (line, column);
        let mut bump = |chars: &mut std::iter::Peekable<std::str::Chars<'_>>| {
            let c = chars.next().unwrap();
            if c == '\n' {
                line += 1;
                column = 1;
            } else {
                column += 1;
            }
            c
        };
        if c.is_whitespace() {
            bump(&mut chars);
            continue;
        }
        if c == '#' {
            while let Some(&c) = chars.peek() {
                if c == '\n' {
                    break;
                }
                bump(&mut chars);
            }
            continue;
        }
        let tok = if c.is_ascii_alphabetic() || c == '_' {
            let mut s = String::new();
            while let Some(&c) = chars.peek() {
                if c.is_ascii_alphanumeric() || c == '_' {
                    s.push(bump(&mut chars));
                } else {
                    break;
                }
            }
            Tok::Ident(s)
        } else {
            bump(&mut chars);
            match c {
                '!' | '¬' => Tok::Not,
                '&' | '∧' => Tok::And,
                '|' | '∨' => Tok::Or,
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                ':' => Tok::Colon,
                ';' => Tok::Semi,
                ',' => Tok::Comma,
                '→' => Tok::Implies,
                '↔' => Tok::Iff,
                '-' => {
                    if chars.peek() == Some(&'>') {
                        bump(&mut chars);
                        Tok::Implies
                    } else {
                        return Err(err(l, col, "expected `->`".into()));
                    }
                }
                '<' => {
                    let a = chars.peek().copied();
                    if a == Some('-') {
                        bump(&mut chars);
                        if chars.peek() == Some(&'>') {
                            bump(&mut chars);
                            Tok::Iff
                        } else {
                            return Err(err(l, col, "expected `<->`".into()));
                        }
                    } else {
                        return Err(err(l, col, "expected `<->`".into()));
                    }
                }
                other => return Err(err(l, col, format!("unexpected character `{other}`"))),
            }
        };
        out.push(Spanned {
            tok,
            line: l,
            column: col,
        });
    }
    out.push(Spanned {
        tok: Tok::Eof,
        line,
        column,
    });
    Ok(out)
}

const KEYWORDS: &[&str] = &["X", "U", "F", "G", "tt", "ff", "true", "false"];

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    alphabet: Option<AlphabetSpec>,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn next(&mut self) -> Spanned {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, message: impl Into<String>) -> LtlError {
        let t = &self.toks[self.pos];
        LtlError::Syntax {
            line: t.line,
            column: t.column,
            message: message.into(),
        }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), LtlError> {
        if *self.peek() == tok {
            self.next();
            Ok(())
        } else {
            Err(self.error(format!("expected {what}")))
        }
    }

    fn is_ident(&self, name: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == name)
    }

    // implication level: `a -> b`, `a <-> b`, right associative
    fn formula(&mut self) -> Result<LtlFormula, LtlError> {
        let lhs = self.disjunction()?;
        match self.peek() {
            Tok::Implies => {
                self.next();
                Ok(LtlFormula::implies(lhs, self.formula()?))
            }
            Tok::Iff => {
                self.next();
                Ok(LtlFormula::iff(lhs, self.formula()?))
            }
            _ => Ok(lhs),
        }
    }

    fn disjunction(&mut self) -> Result<LtlFormula, LtlError> {
        let mut lhs = self.conjunction()?;
        while *self.peek() == Tok::Or {
            self.next();
            lhs = LtlFormula::or(lhs, self.conjunction()?);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<LtlFormula, LtlError> {
        let mut lhs = self.until()?;
        while *self.peek() == Tok::And {
            self.next();
            lhs = LtlFormula::and(lhs, self.until()?);
        }
        Ok(lhs)
    }

    fn until(&mut self) -> Result<LtlFormula, LtlError> {
        let lhs = self.unary()?;
        if self.is_ident("U") {
            self.next();
            return Ok(LtlFormula::until(lhs, self.until()?));
        }
        if self.is_ident("R") || self.is_ident("W") {
            return Err(self.error("release and weak-until are not supported"));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<LtlFormula, LtlError> {
        let start = self.pos;
        let t = self.next();
        match t.tok {
            Tok::Not => Ok(LtlFormula::not(self.unary()?)),
            Tok::LParen => {
                let f = self.formula()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            Tok::Ident(name) => match name.as_str() {
                "X" => Ok(LtlFormula::next(self.unary()?)),
                "F" => Ok(LtlFormula::finally(self.unary()?)),
                "G" => Ok(LtlFormula::globally(self.unary()?)),
                "tt" | "true" => Ok(LtlFormula::True),
                "ff" | "false" => Ok(LtlFormula::False),
                "U" => Err(LtlError::Syntax {
                    line: t.line,
                    column: t.column,
                    message: "`U` needs a left operand".into(),
                }),
                _ => {
                    let alphabet = self.alphabet.as_ref().expect("alphabet set before formulas");
                    alphabet
                        .atom(&name)
                        .map(LtlFormula::Atom)
                        .ok_or(LtlError::UndeclaredAtom(name))
                }
            },
            _ => {
                self.pos = start;
                Err(self.error("expected a formula"))
            }
        }
    }

    fn name_list(&mut self) -> Result<Vec<String>, LtlError> {
        let mut names = Vec::new();
        loop {
            let start = self.pos;
            match self.next().tok {
                Tok::Ident(n) if !KEYWORDS.contains(&n.as_str()) => names.push(n),
                _ => {
                    self.pos = start;
                    return Err(self.error("expected a bit name"));
                }
            }
            match self.peek() {
                Tok::Comma => {
                    self.next();
                }
                Tok::Semi => {
                    self.next();
                    return Ok(names);
                }
                _ => return Err(self.error("expected `,` or `;`")),
            }
        }
    }
}

/// Parses a spec file of the form
///
/// ```text
/// inputs: a, b;
/// outputs: g0, g1;
/// spec: G (a -> F g0);
/// ```
///
/// Several `spec:` sections are conjoined.
pub fn parse_spec(text: &str) -> Result<SpecFile, LtlError> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        alphabet: None,
    };
    let mut inputs: Option<Vec<String>> = None;
    let mut outputs: Option<Vec<String>> = None;
    let mut formula: Option<LtlFormula> = None;
    while *p.peek() != Tok::Eof {
        let start = p.pos;
        let section = match p.next().tok {
            Tok::Ident(s) => s,
            _ => {
                p.pos = start;
                return Err(p.error("expected `inputs:`, `outputs:` or `spec:`"));
            }
        };
        p.expect(Tok::Colon, "`:`")?;
        match section.as_str() {
            "inputs" | "outputs" => {
                let slot = if section == "inputs" { &mut inputs } else { &mut outputs };
                if slot.is_some() || p.alphabet.is_some() {
                    p.pos = start;
                    return Err(p.error(format!("unexpected `{section}` section")));
                }
                *slot = Some(p.name_list()?);
            }
            "spec" => {
                if p.alphabet.is_none() {
                    let i = inputs.clone().ok_or(LtlError::MissingSection("inputs"))?;
                    let o = outputs.clone().ok_or(LtlError::MissingSection("outputs"))?;
                    p.alphabet = Some(AlphabetSpec::new(i, o)?);
                }
                let f = p.formula()?;
                p.expect(Tok::Semi, "`;`")?;
                formula = Some(match formula {
                    None => f,
                    Some(g) => LtlFormula::and(g, f),
                });
            }
            other => {
                p.pos = start;
                return Err(p.error(format!("unknown section `{other}`")));
            }
        }
    }
    let alphabet = match p.alphabet {
        Some(a) => a,
        None => AlphabetSpec::new(
            inputs.ok_or(LtlError::MissingSection("inputs"))?,
            outputs.ok_or(LtlError::MissingSection("outputs"))?,
        )?,
    };
    let formula = formula.ok_or(LtlError::MissingSection("spec"))?;
    Ok(SpecFile { alphabet, formula })
}

/// Parses a bare formula against an existing alphabet.
pub fn parse_formula(text: &str, alphabet: &AlphabetSpec) -> Result<LtlFormula, LtlError> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        alphabet: Some(alphabet.clone()),
    };
    let f = p.formula()?;
    if *p.peek() != Tok::Eof {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn io() -> AlphabetSpec {
        AlphabetSpec::new(vec!["in".into()], vec!["out".into()]).unwrap()
    }

    #[test]
    fn biconditional() {
        let s = parse_spec("inputs: in;\noutputs: out;\nspec: in <-> out;").unwrap();
        assert_eq!(s.formula, LtlFormula::iff(LtlFormula::Atom(0), LtlFormula::Atom(1)));
    }

    #[test]
    fn constant_true() {
        let s = parse_spec("inputs: in; outputs: out; spec: tt;").unwrap();
        assert_eq!(s.formula, LtlFormula::True);
    }

    #[test]
    fn next_binds_tighter_than_iff() {
        let f = parse_formula("in <-> X out", &io()).unwrap();
        assert_eq!(
            f,
            LtlFormula::iff(LtlFormula::Atom(0), LtlFormula::next(LtlFormula::Atom(1)))
        );
    }

    #[test]
    fn precedence_chain() {
        // unary > U > & > | > ->
        let f = parse_formula("!in U out & in | out -> in", &io()).unwrap();
        let a = LtlFormula::Atom(0);
        let b = LtlFormula::Atom(1);
        let until = LtlFormula::until(LtlFormula::not(a.clone()), b.clone());
        let expected = LtlFormula::implies(LtlFormula::or(LtlFormula::and(until, a.clone()), b), a);
        assert_eq!(f, expected);
    }

    #[test]
    fn undeclared_atom() {
        let e = parse_spec("inputs: in; outputs: out; spec: G x;").unwrap_err();
        assert_eq!(e, LtlError::UndeclaredAtom("x".into()));
    }

    #[test]
    fn duplicate_declaration() {
        let e = parse_spec("inputs: a, a; outputs: b; spec: tt;").unwrap_err();
        assert_eq!(e, LtlError::DuplicateDeclaration("a".into()));
    }

    #[test]
    fn syntax_error_position() {
        let e = parse_spec("inputs: in;\noutputs: out;\nspec: (in & ;").unwrap_err();
        match e {
            LtlError::Syntax { line, column, .. } => {
                assert_eq!(line, 3);
                assert_eq!(column, 13);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn multiple_specs_conjoined() {
        let s = parse_spec("inputs: in; outputs: out; spec: in; spec: out;").unwrap();
        assert_eq!(s.formula, LtlFormula::and(LtlFormula::Atom(0), LtlFormula::Atom(1)));
    }

    #[test]
    fn release_rejected() {
        assert!(matches!(parse_formula("in R out", &io()), Err(LtlError::Syntax { .. })));
    }

    #[test]
    fn display_reparses() {
        let a = io();
        let f = parse_formula("G (in -> X (out U !in)) & F out", &a).unwrap();
        let text = f.display(&a).to_string();
        assert_eq!(parse_formula(&text, &a).unwrap(), f);
    }
}
