//! Program text format.
//!
//! ```text
//! % comment
//! a :- not b.
//! b :- not a.
//! p :- not p, not b.
//! color(0,red) :- not color(0,blue), not color(0,green).
//! :- edge_ko(0,1).          % constraint sugar
//! ```
//!
//! A headless rule `:- BODY.` expands to `__c_k :- not __c_k, BODY.` with a
//! fresh `__c_k`.

use std::collections::BTreeSet;
use std::fmt::{self, Write as _};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::program::{scan_atom, Atom, Literal, Polarity, Program, Rule};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SourceSpan {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}", self.line, self.column)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ParseOptions {
    /// Accept `__`-prefixed atoms, e.g. when reading back a transformed program.
    pub allow_reserved: bool,
}

pub fn parse_program(text: &str) -> Result<Program> {
    parse_program_with(text, ParseOptions::default())
}

pub fn parse_program_with(text: &str, options: ParseOptions) -> Result<Program> {
    let mut parser = Parser { src: text.as_bytes(), pos: 0, line: 1, column: 1, options };
    let mut rules = Vec::new();
    let mut constraints = Vec::new();
    loop {
        parser.skip_trivia();
        if parser.at_end() {
            break;
        }
        if parser.eat(b":-") {
            constraints.push(parser.body()?);
        } else {
            let head = parser.atom()?;
            parser.skip_trivia();
            let body = if parser.eat(b":-") { parser.body()? } else { Vec::new() };
            rules.push(Rule::new(head, body));
        }
        parser.skip_trivia();
        if !parser.eat(b".") {
            return Err(parser.error("expected `.` at end of rule"));
        }
    }

    if constraints.is_empty() {
        return if options.allow_reserved {
            Ok(Program::from_generated(rules))
        } else {
            Program::new(rules)
        };
    }
    let used: BTreeSet<Atom> = rules
        .iter()
        .flat_map(|r| r.atoms().cloned())
        .chain(constraints.iter().flatten().map(|l| l.atom.clone()))
        .collect();
    let mut next = 1;
    for body in constraints {
        let guard = loop {
            let candidate = Atom::new(&format!("__c_{next}")).expect("valid reserved name");
            next += 1;
            if !used.contains(&candidate) {
                break candidate;
            }
        };
        let lits = std::iter::once(Literal::neg(guard.clone())).chain(body);
        rules.push(Rule::new(guard, lits));
    }
    Ok(Program::from_generated(rules))
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    line: usize,
    column: usize,
    options: ParseOptions,
}

impl Parser<'_> {
    fn at_end(&self) -> bool {
        self.pos >= self.src.len()
    }

    fn rest(&self) -> &[u8] {
        &self.src[self.pos..]
    }

    fn span(&self) -> SourceSpan {
        SourceSpan { line: self.line, column: self.column }
    }

    fn error(&self, message: &str) -> Error {
        let found = match self.rest().first() {
            None => "end of input".to_string(),
            Some(_) => {
                let s = String::from_utf8_lossy(&self.rest()[..self.rest().len().min(12)]);
                format!("`{}`", s.split_whitespace().next().unwrap_or(""))
            }
        };
        Error::Syntax { span: self.span(), message: format!("{message}, found {found}") }
    }

    fn advance(&mut self, n: usize) {
        for &b in &self.src[self.pos..self.pos + n] {
            if b == b'\n' {
                self.line += 1;
                self.column = 1;
            } else if b & 0xC0 != 0x80 {
                self.column += 1;
            }
        }
        self.pos += n;
    }

    fn eat(&mut self, token: &[u8]) -> bool {
        if self.rest().starts_with(token) {
            self.advance(token.len());
            true
        } else {
            false
        }
    }

    fn skip_trivia(&mut self) {
        loop {
            match self.rest().first() {
                Some(b) if b.is_ascii_whitespace() => self.advance(1),
                Some(b'%') => {
                    let n = self.rest().iter().take_while(|b| **b != b'\n').count();
                    self.advance(n);
                }
                _ => return,
            }
        }
    }

    fn atom(&mut self) -> Result<Atom> {
        let rest = self.rest();
        if rest.starts_with(b"__") && !self.options.allow_reserved {
            let len = scan_atom(rest, true).unwrap_or(2);
            return Err(Error::ReservedAtom(String::from_utf8_lossy(&rest[..len]).into()));
        }
        let Some(len) = scan_atom(rest, self.options.allow_reserved) else {
            return Err(self.error("expected atom"));
        };
        let name = std::str::from_utf8(&rest[..len]).expect("atom names are ASCII");
        if name == "not" {
            return Err(self.error("`not` must be followed by whitespace and an atom"));
        }
        let atom = Atom::new(name).map_err(|_| self.error("malformed atom"))?;
        self.advance(len);
        Ok(atom)
    }

    fn literal(&mut self) -> Result<Literal> {
        let rest = self.rest();
        let polarity = if rest.starts_with(b"not") && rest.get(3).is_some_and(u8::is_ascii_whitespace)
        {
            self.advance(3);
            self.skip_trivia();
            Polarity::Negative
        } else {
            Polarity::Positive
        };
        Ok(Literal { atom: self.atom()?, polarity })
    }

    fn body(&mut self) -> Result<Vec<Literal>> {
        let mut body = Vec::new();
        loop {
            self.skip_trivia();
            body.push(self.literal()?);
            self.skip_trivia();
            if !self.eat(b",") {
                return Ok(body);
            }
        }
    }
}

/// Prints one rule per line; `parse_program(&render_program(p))` gives back `p`.
pub fn render_program(program: &Program) -> String {
    program.to_string()
}

/// DOT digraph of the dependency graph; negative edges are dashed.
pub fn export_dot(program: &Program) -> String {
    let graph = program.dependency_graph();
    let mut out = String::from("digraph G {\n");
    for v in &graph.vertices {
        let _ = writeln!(out, "  \"{v}\";");
    }
    for (from, to, polarity) in &graph.edges {
        let style = match polarity {
            Polarity::Negative => " [style=dashed]",
            Polarity::Positive => "",
        };
        let _ = writeln!(out, "  \"{from}\" -> \"{to}\"{style};");
    }
    out.push_str("}\n");
    out
}

/// Splits `a, color(0,red), b` at top-level commas.
pub(crate) fn split_atom_list(text: &str) -> Vec<&str> {
    let mut parts = Vec::new();
    let (mut depth, mut start) = (0usize, 0);
    for (i, c) in text.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            ',' if depth == 0 => {
                parts.push(text[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(text[start..].trim());
    parts.retain(|p| !p.is_empty());
    parts
}

/// Parses a comma-separated atom list, optionally wrapped in braces.
pub fn parse_atom_set(text: &str) -> Result<BTreeSet<Atom>> {
    let text = text.trim();
    let inner = text.strip_prefix('{').and_then(|t| t.strip_suffix('}')).unwrap_or(text);
    split_atom_list(inner).into_iter().map(Atom::new).collect()
}

/// `{a, b, color(0,red)}` with atoms in sorted order.
pub fn render_atom_set<'a>(atoms: impl IntoIterator<Item = &'a Atom>) -> String {
    let names: Vec<&str> = atoms.into_iter().map(Atom::name).collect();
    format!("{{{}}}", names.join(", "))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::program::tests::{atom, pi6, rule};

    #[test]
    fn self_loop() {
        let p = parse_program("p :- not p.").unwrap();
        assert_eq!(p.rules(), &[rule("p", &["not p"])]);
    }

    #[test]
    fn empty_text() {
        assert!(parse_program("").unwrap().is_empty());
        assert!(parse_program("  % only a comment\n\n").unwrap().is_empty());
    }

    #[test]
    fn missing_dot() {
        match parse_program("p :- q") {
            Err(Error::Syntax { span, .. }) => assert_eq!(span, SourceSpan { line: 1, column: 7 }),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn error_positions() {
        let cases = [
            ("a.\nb :- not .", 2, 10),
            ("a.\n\n  B.", 3, 3),
            ("p :- nota, not\tq.\nq :- not not.", 2, 10),
            ("color(0, red).", 1, 6),
        ];
        for (text, line, column) in cases {
            match parse_program(text) {
                Err(Error::Syntax { span, .. }) => {
                    assert_eq!(span, SourceSpan { line, column }, "{text:?}")
                }
                other => panic!("{text:?}: {other:?}"),
            }
        }
    }

    #[test]
    fn not_needs_whitespace() {
        let p = parse_program("p :- nota, not\tq, not\n% c\n r.").unwrap();
        assert_eq!(p.rules(), &[rule("p", &["nota", "not q", "not r"])]);
    }

    #[test]
    fn predicate_atoms() {
        let p = parse_program("color(0,red) :- not color(0,blue), edge_ok(0,1).").unwrap();
        assert_eq!(p.rules(), &[rule("color(0,red)", &["not color(0,blue)", "edge_ok(0,1)"])]);
    }

    #[test]
    fn reserved_prefix() {
        assert_eq!(parse_program("__m :- not a."), Err(Error::ReservedAtom("__m".into())));
        let opts = ParseOptions { allow_reserved: true };
        let p = parse_program_with("__m :- not __bar_a.", opts).unwrap();
        assert_eq!(p.len(), 1);
    }

    #[test]
    fn constraint_sugar() {
        let p = parse_program(":- edge_ko(0,1).\n:- a, not b.").unwrap();
        assert_eq!(
            p.rules(),
            &[
                Rule::new(
                    atom("__c_1"),
                    [Literal::neg(atom("__c_1")), Literal::pos(atom("edge_ko(0,1)"))]
                ),
                Rule::new(
                    atom("__c_2"),
                    [
                        Literal::neg(atom("__c_2")),
                        Literal::pos(atom("a")),
                        Literal::neg(atom("b"))
                    ]
                ),
            ]
        );
    }

    #[test]
    fn render_simple() {
        assert_eq!(render_program(&Program::default()), "");
        let p = Program::new([rule("p", &["not p"])]).unwrap();
        assert_eq!(render_program(&p), "p :- not p.\n");
        let p = Program::new([rule("a", &[]), rule("b", &["a", "not c"])]).unwrap();
        assert_eq!(render_program(&p), "a.\nb :- a, not c.\n");
    }

    #[test]
    fn pi5_round_trip() {
        let text = "p :- not p.\np :- not a, not c.\na :- not b.\nb :- not a.\nc :- not d.\nd :- not c.\n";
        let p = parse_program(text).unwrap();
        assert_eq!(p.len(), 6);
        assert_eq!(render_program(&p), text);
        assert_eq!(parse_program(&render_program(&p)).unwrap(), p);
    }

    #[test]
    fn dot_output() {
        assert_eq!(export_dot(&Program::default()), "digraph G {\n}\n");
        let p = Program::new([rule("a", &["not b"])]).unwrap();
        assert_eq!(
            export_dot(&p),
            "digraph G {\n  \"a\";\n  \"b\";\n  \"a\" -> \"b\" [style=dashed];\n}\n"
        );
        let dot = export_dot(&pi6());
        assert_eq!(dot.matches("[style=dashed]").count(), 6);
        assert_eq!(dot.lines().filter(|l| l.trim_end().ends_with("\";")).count(), 4);
    }

    #[test]
    fn atom_sets() {
        let set = parse_atom_set("{color(0,red), a,b}").unwrap();
        assert_eq!(set.len(), 3);
        assert_eq!(render_atom_set(&set), "{a, b, color(0,red)}");
        assert!(parse_atom_set("{}").unwrap().is_empty());
        assert!(parse_atom_set("").unwrap().is_empty());
    }
}
