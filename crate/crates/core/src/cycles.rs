//! Cycles of negative dependencies, their handles, and bridges between them.
//!
//! A cycle is a set of rules
//!
//! ```text
//! l1 :- not l2, D1.
//! l2 :- not l3, D2.
//! ...
//! ln :- not l1, Dn.
//! ```
//!
//! over distinct atoms, where no literal of `Di` mentions `li`. The `Di` are
//! AND handles. A rule `li :- D` with non-empty `D` that belongs to no cycle
//! is auxiliary to the cycle and `D` is an OR handle.
//!
//! A bridge is a chain `l1 :- not l2. ... ln :- not a.` of single-literal
//! rules that hangs off a cycle rule (AND bridge) or an auxiliary rule
//! `p :- not l1.` (OR bridge) and ends at an atom `a` involved in a cycle.
//! Each chain atom must have exactly one defining rule and occur in exactly
//! one rule body, so the value of `a` fixes the value of every chain atom.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::{self, Write as _};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::program::{Atom, Literal, Program, Rule};

pub const DEFAULT_CYCLE_CAP: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of(n: usize) -> Self {
        if n % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct AndHandle {
    /// Index into [`Cycle::atoms`] of the atom the handle refers to.
    pub position: usize,
    pub handle: Vec<Literal>,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Cycle {
    /// `atoms[i] :- not atoms[i + 1]` is witnessed by `rules[i]`; starts at
    /// the least atom.
    pub atoms: Vec<Atom>,
    pub rules: Vec<Rule>,
    pub and_handles: Vec<AndHandle>,
    rule_ids: Vec<usize>,
}

impl Cycle {
    pub fn size(&self) -> usize {
        self.atoms.len()
    }

    pub fn parity(&self) -> Parity {
        Parity::of(self.size())
    }

    pub fn contains_atom(&self, atom: &Atom) -> bool {
        self.atoms.contains(atom)
    }

    pub fn contains_rule(&self, rule: &Rule) -> bool {
        self.rules.contains(rule)
    }

    /// Positions in the analysed program of the rules forming the cycle.
    pub fn rule_ids(&self) -> &[usize] {
        &self.rule_ids
    }
}

impl fmt::Display for Cycle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rules: Vec<String> = self.rules.iter().map(Rule::to_string).collect();
        write!(f, "{{{}}}", rules.join(" "))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrHandle {
    pub cycle: Cycle,
    pub target: Atom,
    pub rule: Rule,
    pub handle: Vec<Literal>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum BridgeKind {
    #[serde(rename = "or-bridge")]
    Or,
    #[serde(rename = "and-bridge")]
    And,
}

impl fmt::Display for BridgeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BridgeKind::Or => "OR",
            BridgeKind::And => "AND",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bridge {
    pub kind: BridgeKind,
    pub anchor_cycle: Cycle,
    pub anchor_atom: Atom,
    /// `p :- not l1.` for OR bridges, the cycle rule containing `not l1` for AND bridges.
    pub anchor_rule: Rule,
    /// `l1 :- not l2.`, ..., `ln :- not a.`
    pub chain: Vec<Rule>,
    pub target_atom: Atom,
}

impl Bridge {
    /// Number of intermediate atoms.
    pub fn length(&self) -> usize {
        self.chain.len()
    }

    pub fn parity(&self) -> Parity {
        Parity::of(self.length())
    }

    pub fn chain_atoms(&self) -> impl Iterator<Item = &Atom> {
        self.chain.iter().map(Rule::head)
    }

    /// Ordering used when several bridges are simplified in turn.
    fn sort_key(&self) -> (&Atom, &Atom, BridgeKind, &[Rule]) {
        (&self.anchor_atom, &self.target_atom, self.kind, &self.chain)
    }
}

impl fmt::Display for Bridge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let chain: Vec<&str> = self.chain_atoms().map(Atom::name).collect();
        write!(
            f,
            "{} {} bridge {} -> [{}] -> {}",
            self.parity(),
            self.kind,
            self.anchor_atom,
            chain.join(", "),
            self.target_atom
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RuleTag {
    InCycle,
    Auxiliary,
    BridgeStep,
    Unclassified,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuleClassification {
    /// One entry per program rule, in program order.
    pub entries: Vec<(Rule, BTreeSet<RuleTag>)>,
}

impl RuleClassification {
    pub fn tags(&self, rule: &Rule) -> Option<&BTreeSet<RuleTag>> {
        self.entries.iter().find(|(r, _)| r == rule).map(|(_, t)| t)
    }

    pub fn with_tag(&self, tag: RuleTag) -> impl Iterator<Item = &Rule> {
        self.entries.iter().filter(move |(_, t)| t.contains(&tag)).map(|(r, _)| r)
    }
}

/// Cycle structure of one program, computed once and queried many times.
#[derive(Clone, Debug)]
pub struct CycleAnalysis {
    program: Program,
    cycles: Vec<Cycle>,
    in_cycle: BTreeSet<usize>,
    cycle_atoms: BTreeSet<Atom>,
}

impl CycleAnalysis {
    pub fn new(program: &Program) -> Result<Self> {
        Self::with_cap(program, DEFAULT_CYCLE_CAP)
    }

    pub fn with_cap(program: &Program, cap: usize) -> Result<Self> {
        let cycles = enumerate_cycles(program, cap)?;
        let in_cycle = cycles.iter().flat_map(|c| c.rule_ids.iter().copied()).collect();
        let cycle_atoms = cycles.iter().flat_map(|c| c.atoms.iter().cloned()).collect();
        Ok(CycleAnalysis { program: program.clone(), cycles, in_cycle, cycle_atoms })
    }

    pub fn program(&self) -> &Program {
        &self.program
    }

    pub fn cycles(&self) -> &[Cycle] {
        &self.cycles
    }

    pub fn cycle_atoms(&self) -> &BTreeSet<Atom> {
        &self.cycle_atoms
    }

    pub fn is_cycle_atom(&self, atom: &Atom) -> bool {
        self.cycle_atoms.contains(atom)
    }

    pub fn is_in_cycle(&self, rule_id: usize) -> bool {
        self.in_cycle.contains(&rule_id)
    }

    /// Head in some cycle, not itself in any cycle, non-empty body that avoids the head.
    pub fn is_auxiliary(&self, rule_id: usize) -> bool {
        let rule = &self.program.rules()[rule_id];
        !self.in_cycle.contains(&rule_id)
            && self.cycle_atoms.contains(rule.head())
            && !rule.is_fact()
            && rule.body().iter().all(|l| &l.atom != rule.head())
    }

    pub fn cycles_with_rule(&self, rule_id: usize) -> impl Iterator<Item = &Cycle> {
        self.cycles.iter().filter(move |c| c.rule_ids.contains(&rule_id))
    }

    pub fn or_handles(&self, cycle: &Cycle) -> Vec<OrHandle> {
        self.program
            .iter()
            .enumerate()
            .filter(|(id, r)| cycle.contains_atom(r.head()) && self.is_auxiliary(*id))
            .map(|(_, r)| OrHandle {
                cycle: cycle.clone(),
                target: r.head().clone(),
                rule: r.clone(),
                handle: r.body().to_vec(),
            })
            .collect()
    }

    pub fn bridges(&self) -> Vec<Bridge> {
        let rules = self.program.rules();
        let mut defining: HashMap<&Atom, Vec<usize>> = HashMap::new();
        let mut occurrences: HashMap<&Atom, usize> = HashMap::new();
        for (id, r) in rules.iter().enumerate() {
            defining.entry(r.head()).or_default().push(id);
            for l in r.body() {
                *occurrences.entry(&l.atom).or_default() += 1;
            }
        }
        let is_chain_atom = |a: &Atom| {
            !self.is_cycle_atom(a)
                && defining.get(a).is_some_and(|d| d.len() == 1)
                && occurrences.get(a) == Some(&1)
        };
        // Follows l1 :- not l2. ... ln :- not a. down to a cycle atom.
        let follow = |first: &Atom, anchor: &Atom| -> Option<(Vec<Rule>, Atom)> {
            let mut chain = Vec::new();
            let mut seen = BTreeSet::new();
            let mut current = first.clone();
            loop {
                if !is_chain_atom(&current) || !seen.insert(current.clone()) {
                    return None;
                }
                let rule = &rules[defining[&current][0]];
                let [lit] = rule.body() else { return None };
                if !lit.is_negative() || &lit.atom == anchor {
                    return None;
                }
                chain.push(rule.clone());
                if self.is_cycle_atom(&lit.atom) {
                    return Some((chain, lit.atom.clone()));
                }
                current = lit.atom.clone();
            }
        };

        let mut bridges = Vec::new();
        for (id, rule) in rules.iter().enumerate() {
            let anchor = rule.head();
            if !self.is_cycle_atom(anchor) {
                continue;
            }
            let (kind, anchor_cycle) = if self.is_in_cycle(id) {
                (BridgeKind::And, self.cycles_with_rule(id).next())
            } else if self.is_auxiliary(id) && rule.body().len() == 1 {
                (BridgeKind::Or, self.cycles.iter().find(|c| c.contains_atom(anchor)))
            } else {
                continue;
            };
            let Some(anchor_cycle) = anchor_cycle else { continue };
            for first in rule.negative_body().filter(|a| is_chain_atom(a)) {
                if let Some((chain, target)) = follow(first, anchor) {
                    bridges.push(Bridge {
                        kind,
                        anchor_cycle: anchor_cycle.clone(),
                        anchor_atom: anchor.clone(),
                        anchor_rule: rule.clone(),
                        chain,
                        target_atom: target,
                    });
                }
            }
        }
        bridges.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
        bridges
    }

    pub fn classify(&self) -> RuleClassification {
        let bridge_rules: BTreeSet<Rule> =
            self.bridges().into_iter().flat_map(|b| b.chain).collect();
        let entries = self
            .program
            .iter()
            .enumerate()
            .map(|(id, rule)| {
                let mut tags = BTreeSet::new();
                if self.is_in_cycle(id) {
                    tags.insert(RuleTag::InCycle);
                }
                if self.is_auxiliary(id) {
                    tags.insert(RuleTag::Auxiliary);
                }
                if bridge_rules.contains(rule) {
                    tags.insert(RuleTag::BridgeStep);
                }
                if tags.is_empty() {
                    tags.insert(RuleTag::Unclassified);
                }
                (rule.clone(), tags)
            })
            .collect();
        RuleClassification { entries }
    }

    pub fn report(&self) -> CycleReport {
        let cycles = self
            .cycles
            .iter()
            .map(|c| ReportEntry {
                kind: "cycle",
                atoms: c.atoms.clone(),
                rules: c.rules.clone(),
                handles: c
                    .and_handles
                    .iter()
                    .map(|h| ReportHandle { atom: c.atoms[h.position].clone(), literals: h.handle.clone() })
                    .collect(),
                parity: c.parity(),
                length: c.size(),
            })
            .collect();
        let or_handles = self
            .cycles
            .iter()
            .flat_map(|c| self.or_handles(c))
            .map(|h| ReportEntry {
                kind: "or-handle",
                atoms: h.cycle.atoms.clone(),
                rules: vec![h.rule.clone()],
                handles: vec![ReportHandle { atom: h.target.clone(), literals: h.handle.clone() }],
                parity: h.cycle.parity(),
                length: h.handle.len(),
            })
            .collect();
        let bridges = self
            .bridges()
            .into_iter()
            .map(|b| ReportEntry {
                kind: match b.kind {
                    BridgeKind::Or => "or-bridge",
                    BridgeKind::And => "and-bridge",
                },
                atoms: std::iter::once(b.anchor_atom.clone())
                    .chain(b.chain_atoms().cloned())
                    .chain(std::iter::once(b.target_atom.clone()))
                    .collect(),
                rules: std::iter::once(b.anchor_rule.clone()).chain(b.chain.iter().cloned()).collect(),
                handles: Vec::new(),
                parity: b.parity(),
                length: b.length(),
            })
            .collect();
        CycleReport { cycles, or_handles, bridges }
    }
}

pub fn find_cycles(program: &Program) -> Result<Vec<Cycle>> {
    Ok(CycleAnalysis::new(program)?.cycles)
}

pub fn find_or_handles(program: &Program, cycle: &Cycle) -> Result<Vec<OrHandle>> {
    Ok(CycleAnalysis::new(program)?.or_handles(cycle))
}

pub fn classify_rules(program: &Program) -> Result<RuleClassification> {
    Ok(CycleAnalysis::new(program)?.classify())
}

pub fn find_bridges(program: &Program) -> Result<Vec<Bridge>> {
    Ok(CycleAnalysis::new(program)?.bridges())
}

#[derive(Clone, Debug, Serialize)]
pub struct ReportHandle {
    pub atom: Atom,
    pub literals: Vec<Literal>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ReportEntry {
    pub kind: &'static str,
    pub atoms: Vec<Atom>,
    pub rules: Vec<Rule>,
    pub handles: Vec<ReportHandle>,
    pub parity: Parity,
    pub length: usize,
}

/// Serializable summary of cycles, OR handles and bridges.
#[derive(Clone, Debug, Serialize)]
pub struct CycleReport {
    pub cycles: Vec<ReportEntry>,
    pub or_handles: Vec<ReportEntry>,
    pub bridges: Vec<ReportEntry>,
}

impl CycleReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// One cluster per cycle; handles and bridges are drawn between clusters.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph cycles {\n  compound=true;\n");
        for (i, c) in self.cycles.iter().enumerate() {
            let _ = writeln!(out, "  subgraph cluster_{i} {{");
            let _ = writeln!(out, "    label=\"{} cycle, size {}\";", c.parity, c.length);
            for a in &c.atoms {
                let _ = writeln!(out, "    \"c{i}:{a}\" [label=\"{a}\"];");
            }
            for (k, a) in c.atoms.iter().enumerate() {
                let next = &c.atoms[(k + 1) % c.atoms.len()];
                let _ = writeln!(out, "    \"c{i}:{a}\" -> \"c{i}:{next}\" [style=dashed];");
            }
            out.push_str("  }\n");
            for h in &c.handles {
                for l in &h.literals {
                    let style = if l.is_negative() { "dashed" } else { "solid" };
                    let _ = writeln!(
                        out,
                        "  \"c{i}:{}\" -> \"{}\" [style={style}, label=\"AND\"];",
                        h.atom, l.atom
                    );
                }
            }
        }
        for h in &self.or_handles {
            for handle in &h.handles {
                for l in &handle.literals {
                    let style = if l.is_negative() { "dashed" } else { "solid" };
                    let _ = writeln!(
                        out,
                        "  \"{}\" -> \"{}\" [style={style}, label=\"OR\"];",
                        handle.atom, l.atom
                    );
                }
            }
        }
        for b in &self.bridges {
            for pair in b.atoms.windows(2) {
                let _ = writeln!(
                    out,
                    "  \"{}\" -> \"{}\" [style=dashed, color=red, label=\"{}\"];",
                    pair[0], pair[1], b.kind
                );
            }
        }
        out.push_str("}\n");
        out
    }
}

/// Valid cycle steps: `from -> to` with the rules that witness it.
type Steps = BTreeMap<(usize, usize), Vec<usize>>;

fn cycle_steps(program: &Program, index: &HashMap<&Atom, usize>) -> Steps {
    let mut steps: Steps = BTreeMap::new();
    for (id, rule) in program.iter().enumerate() {
        let head = rule.head();
        for (k, lit) in rule.body().iter().enumerate() {
            if !lit.is_negative() {
                continue;
            }
            let handle_ok =
                rule.body().iter().enumerate().all(|(j, other)| j == k || &other.atom != head);
            if handle_ok {
                steps.entry((index[head], index[&lit.atom])).or_default().push(id);
            }
        }
    }
    steps
}

fn enumerate_cycles(program: &Program, cap: usize) -> Result<Vec<Cycle>> {
    let atoms: Vec<&Atom> = program.atoms().iter().collect();
    let index: HashMap<&Atom, usize> = atoms.iter().enumerate().map(|(i, a)| (*a, i)).collect();
    let steps = cycle_steps(program, &index);
    let mut succ = vec![Vec::new(); atoms.len()];
    for &(from, to) in steps.keys() {
        succ[from].push(to);
    }

    let mut cycles = Vec::new();
    for path in elementary_circuits(&succ, cap)? {
        // Expand each atom circuit into every choice of witnessing rules.
        let witnesses: Vec<&Vec<usize>> = (0..path.len())
            .map(|i| &steps[&(path[i], path[(i + 1) % path.len()])])
            .collect();
        let mut choice = vec![0usize; path.len()];
        loop {
            if cycles.len() >= cap {
                return Err(Error::CycleCapExceeded { cap });
            }
            let rule_ids: Vec<usize> = choice.iter().zip(&witnesses).map(|(&c, w)| w[c]).collect();
            cycles.push(build_cycle(program, &atoms, &path, rule_ids));
            // Odometer increment over the witness choices.
            let mut k = 0;
            while k < choice.len() {
                choice[k] += 1;
                if choice[k] < witnesses[k].len() {
                    break;
                }
                choice[k] = 0;
                k += 1;
            }
            if k == choice.len() {
                break;
            }
        }
    }
    cycles.sort();
    Ok(cycles)
}

fn build_cycle(program: &Program, atoms: &[&Atom], path: &[usize], rule_ids: Vec<usize>) -> Cycle {
    let rules: Vec<Rule> = rule_ids.iter().map(|&id| program.rules()[id].clone()).collect();
    let and_handles = rules
        .iter()
        .enumerate()
        .filter_map(|(i, r)| {
            let next = atoms[path[(i + 1) % path.len()]];
            let step = Literal::neg(next.clone());
            let handle: Vec<Literal> = r.body().iter().filter(|l| **l != step).cloned().collect();
            (!handle.is_empty()).then_some(AndHandle { position: i, handle })
        })
        .collect();
    Cycle {
        atoms: path.iter().map(|&i| atoms[i].clone()).collect(),
        rules,
        and_handles,
        rule_ids,
    }
}

/// Johnson's algorithm: every elementary circuit, each starting at its least vertex.
fn elementary_circuits(succ: &[Vec<usize>], cap: usize) -> Result<Vec<Vec<usize>>> {
    struct State<'a> {
        succ: &'a [Vec<usize>],
        allowed: Vec<bool>,
        blocked: Vec<bool>,
        blocked_by: Vec<BTreeSet<usize>>,
        stack: Vec<usize>,
        out: Vec<Vec<usize>>,
        cap: usize,
    }

    impl State<'_> {
        fn unblock(&mut self, v: usize) {
            self.blocked[v] = false;
            for w in std::mem::take(&mut self.blocked_by[v]) {
                if self.blocked[w] {
                    self.unblock(w);
                }
            }
        }

        fn circuit(&mut self, v: usize, start: usize) -> Result<bool> {
            let mut found = false;
            self.stack.push(v);
            self.blocked[v] = true;
            for i in 0..self.succ[v].len() {
                let w = self.succ[v][i];
                if !self.allowed[w] {
                    continue;
                }
                if w == start {
                    if self.out.len() >= self.cap {
                        return Err(Error::CycleCapExceeded { cap: self.cap });
                    }
                    self.out.push(self.stack.clone());
                    found = true;
                } else if !self.blocked[w] && self.circuit(w, start)? {
                    found = true;
                }
            }
            if found {
                self.unblock(v);
            } else {
                for i in 0..self.succ[v].len() {
                    let w = self.succ[v][i];
                    if self.allowed[w] {
                        self.blocked_by[w].insert(v);
                    }
                }
            }
            self.stack.pop();
            Ok(found)
        }
    }

    let n = succ.len();
    let mut state = State {
        succ,
        allowed: vec![false; n],
        blocked: vec![false; n],
        blocked_by: vec![BTreeSet::new(); n],
        stack: Vec::new(),
        out: Vec::new(),
        cap,
    };
    for start in 0..n {
        let component = scc_containing(succ, start);
        if component.is_empty() {
            continue;
        }
        for v in 0..n {
            state.allowed[v] = component.contains(&v);
            state.blocked[v] = false;
            state.blocked_by[v].clear();
        }
        state.circuit(start, start)?;
    }
    Ok(state.out)
}

/// Strongly connected component of `start` in the subgraph induced by the
/// vertices `>= start`; empty when `start` lies on no circuit there.
fn scc_containing(succ: &[Vec<usize>], start: usize) -> BTreeSet<usize> {
    let n = succ.len();
    let reach = |forward: bool| {
        let mut seen = vec![false; n];
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(v) = stack.pop() {
            let next: Box<dyn Iterator<Item = usize>> = if forward {
                Box::new(succ[v].iter().copied())
            } else {
                Box::new((start..n).filter(move |&u| succ[u].contains(&v)))
            };
            for w in next {
                if w >= start && !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen
    };
    let (fwd, bwd) = (reach(true), reach(false));
    let component: BTreeSet<usize> = (start..n).filter(|&v| fwd[v] && bwd[v]).collect();
    let on_circuit = component.len() > 1 || succ[start].contains(&start);
    if on_circuit {
        component
    } else {
        BTreeSet::new()
    }
}
