//! Concrete program syntax.
//!
//! ```text
//! while(tt) {
//!   input (r1, r2);
//!   if(r1) then {
//!     r2 = ff
//!   } else {
//!     skip
//!   };
//!   output (r1, r2)
//! }
//! ```
//!
//! Sequences nest to the right; a left-nested sequence is printed inside
//! `{ .. }` so that printing and parsing are inverse. Expressions use `tt`,
//! `ff`, variable names, `not e` and `(e or e)`.

use thiserror::Error;

use super::{Label, ProgramTree, TreeNode, VarSet};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("program syntax error at line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Sym(char),
    Eof,
}

struct Lexed {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(text: &str) -> Result<Vec<Lexed>, ParseError> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let (mut i, mut line, mut column) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            line += 1;
            column = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            column += 1;
            i += 1;
            continue;
        }
        if c == '#' || (c == '/' && chars.get(i + 1) == Some(&'/')) {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let (l, col) = (line, column);
        if c.is_alphanumeric() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            column += i - start;
            out.push(Lexed {
                tok: Tok::Ident(chars[start..i].iter().collect()),
                line: l,
                column: col,
            });
            continue;
        }
        let sym = match c {
            '¬' | '!' => '!',
            '∨' | '|' => '|',
            ':' if chars.get(i + 1) == Some(&'=') => {
                i += 1;
                column += 1;
                '='
            }
            '(' | ')' | '{' | '}' | ';' | ',' | '=' => c,
            other => {
                return Err(ParseError {
                    line,
                    column,
                    message: format!("unexpected character `{other}`"),
                })
            }
        };
        i += 1;
        column += 1;
        out.push(Lexed {
            tok: Tok::Sym(sym),
            line: l,
            column: col,
        });
    }
    out.push(Lexed {
        tok: Tok::Eof,
        line,
        column,
    });
    Ok(out)
}

const KEYWORDS: &[&str] = &[
    "while", "if", "then", "else", "skip", "input", "output", "InOut", "tt", "ff", "not", "or",
];

struct Parser {
    toks: Vec<Lexed>,
    pos: usize,
    vars: VarSet,
    nodes: Vec<TreeNode>,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        let t = &self.toks[self.pos];
        ParseError {
            line: t.line,
            column: t.column,
            message: message.into(),
        }
    }

    fn bump(&mut self) {
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
    }

    fn eat_sym(&mut self, c: char) -> bool {
        if *self.peek() == Tok::Sym(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, c: char) -> Result<(), ParseError> {
        if self.eat_sym(c) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{c}`")))
        }
    }

    fn eat_kw(&mut self, kw: &str) -> bool {
        if matches!(self.peek(), Tok::Ident(s) if s == kw) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_kw(&mut self, kw: &str) -> Result<(), ParseError> {
        if self.eat_kw(kw) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{kw}`")))
        }
    }

    fn var(&mut self) -> Result<usize, ParseError> {
        match self.peek().clone() {
            Tok::Ident(name) if !KEYWORDS.contains(&name.as_str()) => {
                self.bump();
                Ok(match self.vars.index(&name) {
                    Some(i) => i,
                    None => {
                        self.vars.names.push(name);
                        self.vars.names.len() - 1
                    }
                })
            }
            _ => Err(self.error("expected a variable")),
        }
    }

    /// Reserves a node whose children are filled in later, keeping preorder.
    fn reserve(&mut self, label: Label) -> usize {
        self.nodes.push(TreeNode {
            label,
            left: None,
            right: None,
        });
        self.nodes.len() - 1
    }

    fn seq(&mut self) -> Result<usize, ParseError> {
        let start = self.nodes.len();
        let first = self.stmt()?;
        if *self.peek() != Tok::Sym(';') {
            return Ok(first);
        }
        // Insert the `;` node in front of the already parsed left part.
        self.nodes.insert(
            start,
            TreeNode {
                label: Label::Seq,
                left: None,
                right: None,
            },
        );
        for node in &mut self.nodes[start + 1..] {
            for c in [&mut node.left, &mut node.right].into_iter().flatten() {
                *c += 1;
            }
        }
        self.bump();
        let right = self.seq()?;
        self.nodes[start].left = Some(start + 1);
        self.nodes[start].right = Some(right);
        Ok(start)
    }

    fn block(&mut self) -> Result<usize, ParseError> {
        self.expect_sym('{')?;
        let s = self.seq()?;
        self.expect_sym('}')?;
        Ok(s)
    }

    fn vector(&mut self) -> Result<Vec<usize>, ParseError> {
        self.expect_sym('(')?;
        let mut v = vec![self.var()?];
        while self.eat_sym(',') {
            v.push(self.var()?);
        }
        self.expect_sym(')')?;
        Ok(v)
    }

    fn stmt(&mut self) -> Result<usize, ParseError> {
        if *self.peek() == Tok::Sym('{') {
            return self.block();
        }
        if self.eat_kw("skip") {
            return Ok(self.reserve(Label::Skip));
        }
        if self.eat_kw("InOut") {
            return Ok(self.reserve(Label::InOut));
        }
        if self.eat_kw("input") {
            let v = self.vector()?;
            return Ok(self.reserve(Label::Input(v)));
        }
        if self.eat_kw("output") {
            let v = self.vector()?;
            return Ok(self.reserve(Label::Output(v)));
        }
        if self.eat_kw("while") {
            let n = self.reserve(Label::While);
            self.expect_sym('(')?;
            let c = self.expr()?;
            self.expect_sym(')')?;
            let body = self.block()?;
            self.nodes[n].left = Some(c);
            self.nodes[n].right = Some(body);
            return Ok(n);
        }
        if self.eat_kw("if") {
            let n = self.reserve(Label::If);
            self.expect_sym('(')?;
            let c = self.expr()?;
            self.expect_sym(')')?;
            // `then` is optional: `if (e) { .. } else { .. }` is accepted too.
            self.eat_kw("then");
            let t = self.reserve(Label::Then);
            let yes = self.block()?;
            self.expect_kw("else")?;
            let no = self.block()?;
            self.nodes[t].left = Some(yes);
            self.nodes[t].right = Some(no);
            self.nodes[n].left = Some(c);
            self.nodes[n].right = Some(t);
            return Ok(n);
        }
        if matches!(self.peek(), Tok::Ident(s) if !KEYWORDS.contains(&s.as_str())) {
            let save = self.pos;
            let b = self.var()?;
            if !self.eat_sym('=') {
                self.pos = save;
                return Err(self.error("expected `=` after variable"));
            }
            let n = self.reserve(Label::Assign(b));
            let e = self.expr()?;
            self.nodes[n].left = Some(e);
            return Ok(n);
        }
        Err(self.error("expected a statement"))
    }

    fn expr(&mut self) -> Result<usize, ParseError> {
        let start = self.nodes.len();
        let first = self.unary()?;
        if !(self.eat_kw("or") || self.eat_sym('|')) {
            return Ok(first);
        }
        self.nodes.insert(
            start,
            TreeNode {
                label: Label::Or,
                left: None,
                right: None,
            },
        );
        for node in &mut self.nodes[start + 1..] {
            for c in [&mut node.left, &mut node.right].into_iter().flatten() {
                *c += 1;
            }
        }
        let right = self.expr()?;
        self.nodes[start].left = Some(start + 1);
        self.nodes[start].right = Some(right);
        Ok(start)
    }

    fn unary(&mut self) -> Result<usize, ParseError> {
        if self.eat_kw("not") || self.eat_sym('!') {
            let n = self.reserve(Label::Not);
            let e = self.unary()?;
            self.nodes[n].left = Some(e);
            return Ok(n);
        }
        if self.eat_sym('(') {
            let e = self.expr()?;
            self.expect_sym(')')?;
            return Ok(e);
        }
        if self.eat_kw("tt") {
            return Ok(self.reserve(Label::True));
        }
        if self.eat_kw("ff") {
            return Ok(self.reserve(Label::False));
        }
        let b = self.var()?;
        Ok(self.reserve(Label::Var(b)))
    }
}

/// Parses a program. Variables of `base` keep their indices; any other
/// identifier becomes a new variable appended to the returned set.
pub fn parse_program(text: &str, base: &VarSet) -> Result<(ProgramTree, VarSet), ParseError> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
        vars: base.clone(),
        nodes: Vec::new(),
    };
    let root = p.seq()?;
    debug_assert_eq!(root, 0);
    if *p.peek() != Tok::Eof {
        return Err(p.error("unexpected trailing input"));
    }
    Ok((ProgramTree { nodes: p.nodes }, p.vars))
}

/// Prints a valid program tree in the concrete syntax.
pub fn print_program(tree: &ProgramTree, vars: &VarSet) -> String {
    let mut out = String::new();
    if !tree.nodes.is_empty() {
        stmt(tree, vars, 0, 0, &mut out);
    }
    out
}

fn indent(level: usize, out: &mut String) {
    for _ in 0..level {
        out.push_str("  ");
    }
}

fn name(vars: &VarSet, b: usize) -> &str {
    vars.names.get(b).map_or("?", String::as_str)
}

fn stmt(tree: &ProgramTree, vars: &VarSet, n: usize, level: usize, out: &mut String) {
    let node = &tree.nodes[n];
    let list = |v: &[usize]| v.iter().map(|&b| name(vars, b)).collect::<Vec<_>>().join(", ");
    match &node.label {
        Label::Seq => {
            let l = node.left.unwrap();
            if tree.nodes[l].label == Label::Seq {
                indent(level, out);
                out.push_str("{\n");
                stmt(tree, vars, l, level + 1, out);
                out.push('\n');
                indent(level, out);
                out.push('}');
            } else {
                stmt(tree, vars, l, level, out);
            }
            out.push_str(";\n");
            stmt(tree, vars, node.right.unwrap(), level, out);
        }
        Label::While => {
            indent(level, out);
            out.push_str("while(");
            expr(tree, vars, node.left.unwrap(), out);
            out.push_str(") {\n");
            stmt(tree, vars, node.right.unwrap(), level + 1, out);
            out.push('\n');
            indent(level, out);
            out.push('}');
        }
        Label::If => {
            let then = &tree.nodes[node.right.unwrap()];
            indent(level, out);
            out.push_str("if(");
            expr(tree, vars, node.left.unwrap(), out);
            out.push_str(") then {\n");
            stmt(tree, vars, then.left.unwrap(), level + 1, out);
            out.push('\n');
            indent(level, out);
            out.push_str("} else {\n");
            stmt(tree, vars, then.right.unwrap(), level + 1, out);
            out.push('\n');
            indent(level, out);
            out.push('}');
        }
        Label::Assign(b) => {
            indent(level, out);
            out.push_str(name(vars, *b));
            out.push_str(" = ");
            expr(tree, vars, node.left.unwrap(), out);
        }
        Label::Skip => {
            indent(level, out);
            out.push_str("skip");
        }
        Label::Input(v) => {
            indent(level, out);
            out.push_str(&format!("input ({})", list(v)));
        }
        Label::Output(v) => {
            indent(level, out);
            out.push_str(&format!("output ({})", list(v)));
        }
        Label::InOut => {
            indent(level, out);
            out.push_str("InOut");
        }
        other => {
            indent(level, out);
            out.push_str(&format!("<{}>", other.display(vars)));
        }
    }
}

fn expr(tree: &ProgramTree, vars: &VarSet, n: usize, out: &mut String) {
    let node = &tree.nodes[n];
    match &node.label {
        Label::True => out.push_str("tt"),
        Label::False => out.push_str("ff"),
        Label::Var(b) => out.push_str(name(vars, *b)),
        Label::Not => {
            out.push_str("not ");
            expr(tree, vars, node.left.unwrap(), out);
        }
        Label::Or => {
            out.push('(');
            expr(tree, vars, node.left.unwrap(), out);
            out.push_str(" or ");
            expr(tree, vars, node.right.unwrap(), out);
            out.push(')');
        }
        other => out.push_str(&format!("<{}>", other.display(vars))),
    }
}
