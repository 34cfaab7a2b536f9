//! Ground normal logic programs: atoms, literals, rules and the dependency
//! graph between atoms.
//!
//! Everything here is an immutable value once built. A [`Program`] keeps its
//! rules in insertion order for printing, but every semantic and structural
//! operation in this crate treats it as a set of rules.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::sync::Arc;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Prefix reserved for atoms introduced by transformations.
pub const RESERVED_PREFIX: &str = "__";

/// A propositional atom, identified by its exact name.
///
/// Names follow the text format: a lowercase identifier optionally followed
/// by a parenthesized argument list of identifiers or integers, e.g.
/// `color(0,red)`. Transformation-generated atoms start with `__` instead.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom(Arc<str>);

impl Atom {
    pub fn new(name: &str) -> Result<Self> {
        match scan_atom(name.as_bytes(), true) {
            Some(len) if len == name.len() && name != "not" => Ok(Atom(Arc::from(name))),
            _ => Err(Error::InvalidAtom(name.to_string())),
        }
    }

    pub fn name(&self) -> &str {
        &self.0
    }

    pub fn is_reserved(&self) -> bool {
        self.0.starts_with(RESERVED_PREFIX)
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &*self.0)
    }
}

impl Serialize for Atom {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.0)
    }
}

/// Length of the longest atom name at the start of `bytes`, if any.
///
/// With `reserved` set, names starting with `__` are accepted as well.
pub(crate) fn scan_atom(bytes: &[u8], reserved: bool) -> Option<usize> {
    let ident_tail = |from: usize| {
        from + bytes[from..]
            .iter()
            .take_while(|b| b.is_ascii_alphanumeric() || **b == b'_')
            .count()
    };
    let mut end = match bytes {
        [b'a'..=b'z', ..] => ident_tail(1),
        [b'_', b'_', c, ..] if reserved && (c.is_ascii_alphanumeric() || *c == b'_') => {
            ident_tail(2)
        }
        _ => return None,
    };
    if bytes.get(end) != Some(&b'(') {
        return Some(end);
    }
    // Argument list: lowercase identifiers or integers, comma separated.
    let mut pos = end + 1;
    loop {
        let arg_end = match bytes.get(pos) {
            Some(b'a'..=b'z') => ident_tail(pos + 1),
            Some(b'0'..=b'9') => {
                pos + bytes[pos..].iter().take_while(|b| b.is_ascii_digit()).count()
            }
            _ => return Some(end),
        };
        match bytes.get(arg_end) {
            Some(b',') => pos = arg_end + 1,
            Some(b')') => {
                end = arg_end + 1;
                return Some(end);
            }
            _ => return Some(end),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarity {
    Positive,
    Negative,
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    pub atom: Atom,
    pub polarity: Polarity,
}

impl Literal {
    pub fn pos(atom: Atom) -> Self {
        Literal { atom, polarity: Polarity::Positive }
    }

    pub fn neg(atom: Atom) -> Self {
        Literal { atom, polarity: Polarity::Negative }
    }

    pub fn is_negative(&self) -> bool {
        self.polarity == Polarity::Negative
    }

    pub fn is_positive(&self) -> bool {
        self.polarity == Polarity::Positive
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.polarity {
            Polarity::Positive => write!(f, "{}", self.atom),
            Polarity::Negative => write!(f, "not {}", self.atom),
        }
    }
}

impl fmt::Debug for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Serialize for Literal {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// `head :- body.` with an ordered, duplicate-free body.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rule {
    head: Atom,
    body: Vec<Literal>,
}

impl Rule {
    /// Builds a rule, dropping repeated body literals (first occurrence wins).
    pub fn new(head: Atom, body: impl IntoIterator<Item = Literal>) -> Self {
        let mut seen = HashSet::new();
        let body = body.into_iter().filter(|l| seen.insert(l.clone())).collect();
        Rule { head, body }
    }

    pub fn fact(head: Atom) -> Self {
        Rule { head, body: Vec::new() }
    }

    pub fn head(&self) -> &Atom {
        &self.head
    }

    pub fn body(&self) -> &[Literal] {
        &self.body
    }

    pub fn is_fact(&self) -> bool {
        self.body.is_empty()
    }

    pub fn positive_body(&self) -> impl Iterator<Item = &Atom> {
        self.body.iter().filter(|l| l.is_positive()).map(|l| &l.atom)
    }

    pub fn negative_body(&self) -> impl Iterator<Item = &Atom> {
        self.body.iter().filter(|l| l.is_negative()).map(|l| &l.atom)
    }

    pub fn atoms(&self) -> impl Iterator<Item = &Atom> {
        std::iter::once(&self.head).chain(self.body.iter().map(|l| &l.atom))
    }

    /// Order-insensitive identity used for duplicate detection.
    fn key(&self) -> (Atom, BTreeSet<Literal>) {
        (self.head.clone(), self.body.iter().cloned().collect())
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.head)?;
        for (i, lit) in self.body.iter().enumerate() {
            f.write_str(if i == 0 { " :- " } else { ", " })?;
            write!(f, "{lit}")?;
        }
        f.write_str(".")
    }
}

impl fmt::Debug for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Serialize for Rule {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// A finite, duplicate-free list of ground rules.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct Program {
    rules: Vec<Rule>,
    atoms: BTreeSet<Atom>,
}

impl Program {
    /// Builds a program from user-supplied rules; reserved atoms are rejected.
    pub fn new(rules: impl IntoIterator<Item = Rule>) -> Result<Self> {
        let program = Self::from_generated(rules);
        match program.atoms.iter().find(|a| a.is_reserved()) {
            Some(atom) => Err(Error::ReservedAtom(atom.to_string())),
            None => Ok(program),
        }
    }

    /// Builds a program that may contain transformation-generated atoms.
    pub fn from_generated(rules: impl IntoIterator<Item = Rule>) -> Self {
        let mut seen = HashSet::new();
        let rules: Vec<Rule> = rules.into_iter().filter(|r| seen.insert(r.key())).collect();
        let atoms = rules.iter().flat_map(|r| r.atoms().cloned()).collect();
        Program { rules, atoms }
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn atoms(&self) -> &BTreeSet<Atom> {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Rule> {
        self.rules.iter()
    }

    /// Does the program contain this rule, up to body order?
    pub fn contains(&self, rule: &Rule) -> bool {
        let key = rule.key();
        self.rules.iter().any(|r| r.key() == key)
    }

    /// True iff every body is non-empty and made of negative literals only.
    pub fn is_purely_negative(&self) -> bool {
        self.rules.iter().all(|r| !r.is_fact() && r.body.iter().all(Literal::is_negative))
    }

    pub fn is_negation_free(&self) -> bool {
        self.rules.iter().all(|r| r.body.iter().all(Literal::is_positive))
    }

    pub fn dependency_graph(&self) -> DependencyGraph {
        DependencyGraph::new(self)
    }

    /// Rules whose body mentions `atom`, in program order.
    pub fn rules_with_body_atom<'a>(&'a self, atom: &'a Atom) -> impl Iterator<Item = &'a Rule> {
        self.rules.iter().filter(move |r| r.body.iter().any(|l| &l.atom == atom))
    }

    pub fn rules_for<'a>(&'a self, head: &'a Atom) -> impl Iterator<Item = &'a Rule> {
        self.rules.iter().filter(move |r| &r.head == head)
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for rule in &self.rules {
            writeln!(f, "{rule}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.rules).finish()
    }
}

impl<'a> IntoIterator for &'a Program {
    type Item = &'a Rule;
    type IntoIter = std::slice::Iter<'a, Rule>;

    fn into_iter(self) -> Self::IntoIter {
        self.rules.iter()
    }
}

/// `from -> to` exists with polarity `p` iff some rule with head `from` has
/// `to` in its body with polarity `p`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DependencyGraph {
    pub vertices: BTreeSet<Atom>,
    pub edges: BTreeSet<(Atom, Atom, Polarity)>,
}

impl DependencyGraph {
    pub fn new(program: &Program) -> Self {
        let edges = program
            .rules
            .iter()
            .flat_map(|r| r.body.iter().map(move |l| (r.head.clone(), l.atom.clone(), l.polarity)))
            .collect();
        DependencyGraph { vertices: program.atoms.clone(), edges }
    }

    pub fn negative_edges(&self) -> impl Iterator<Item = (&Atom, &Atom)> {
        self.edges
            .iter()
            .filter(|(_, _, p)| *p == Polarity::Negative)
            .map(|(a, b, _)| (a, b))
    }

    /// Atoms reachable from `start` (including itself) over positive edges.
    pub fn positive_reach(&self, start: &Atom) -> BTreeSet<Atom> {
        let mut seen = BTreeSet::from([start.clone()]);
        let mut stack = vec![start.clone()];
        while let Some(a) = stack.pop() {
            for (_, to, _) in self
                .edges
                .iter()
                .filter(|(from, _, p)| *from == a && *p == Polarity::Positive)
            {
                if seen.insert(to.clone()) {
                    stack.push(to.clone());
                }
            }
        }
        seen
    }
}
