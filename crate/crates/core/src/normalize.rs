//! Rewriting kernel programs into 3-kernel form.
//!
//! A 3-kernel program is WFS-irreducible, every atom lies on a cycle, every
//! rule is a cycle rule or an auxiliary rule, cycle rules have at most one
//! AND-handle literal, handle atoms avoid their own cycle, and auxiliary
//! rules have a single body literal.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Serialize, Serializer};

use crate::cycles::{Bridge, BridgeKind, CycleAnalysis, Parity};
use crate::error::{Error, Result};
use crate::kernel::{check_kernel, Witness};
use crate::program::{Atom, Literal, Program, Rule};
use crate::semantics::{well_founded, Interpretation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ThreeKernelCondition {
    WfsIrreducible,
    EveryAtomInCycle,
    EveryRuleClassified,
    CycleBodyLength,
    HandleOutsideCycle,
    AuxiliaryBodyLength,
}

impl ThreeKernelCondition {
    pub const ALL: [ThreeKernelCondition; 6] = [
        Self::WfsIrreducible,
        Self::EveryAtomInCycle,
        Self::EveryRuleClassified,
        Self::CycleBodyLength,
        Self::HandleOutsideCycle,
        Self::AuxiliaryBodyLength,
    ];

    /// 1-based position in the definition.
    pub fn number(self) -> usize {
        Self::ALL.iter().position(|c| *c == self).unwrap() + 1
    }

    fn name(self) -> &'static str {
        match self {
            Self::WfsIrreducible => "wfs-irreducible",
            Self::EveryAtomInCycle => "every-atom-in-cycle",
            Self::EveryRuleClassified => "every-rule-classified",
            Self::CycleBodyLength => "cycle-body-length",
            Self::HandleOutsideCycle => "handle-outside-cycle",
            Self::AuxiliaryBodyLength => "auxiliary-body-length",
        }
    }
}

impl fmt::Display for ThreeKernelCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({})", self.number(), self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ThreeKernelViolation {
    pub condition: ThreeKernelCondition,
    pub witness: Witness,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ThreeKernelReport {
    pub is_3kernel: bool,
    pub violations: Vec<ThreeKernelViolation>,
}

impl ThreeKernelReport {
    pub fn violates(&self, condition: ThreeKernelCondition) -> bool {
        self.violations.iter().any(|v| v.condition == condition)
    }
}

impl fmt::Display for ThreeKernelReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_3kernel {
            return writeln!(f, "3-kernel: yes");
        }
        writeln!(f, "3-kernel: no")?;
        for v in &self.violations {
            writeln!(f, "  condition {}: {}", v.condition, v.witness)?;
        }
        Ok(())
    }
}

pub fn check_3kernel(program: &Program) -> Result<ThreeKernelReport> {
    use ThreeKernelCondition::*;
    let analysis = CycleAnalysis::new(program)?;
    let mut violations = Vec::new();
    let mut flag = |condition, witness| violations.push(ThreeKernelViolation { condition, witness });

    let wfs = well_founded(program);
    for a in wfs.true_atoms.iter().chain(&wfs.false_atoms) {
        flag(WfsIrreducible, Witness::Atom(a.clone()));
    }
    for a in program.atoms() {
        if !analysis.is_cycle_atom(a) {
            flag(EveryAtomInCycle, Witness::Atom(a.clone()));
        }
    }
    for (id, rule) in program.iter().enumerate() {
        let in_cycle = analysis.is_in_cycle(id);
        let auxiliary = analysis.is_auxiliary(id);
        if !in_cycle && !auxiliary {
            flag(EveryRuleClassified, Witness::Rule(rule.clone()));
        }
        if in_cycle && rule.body().len() > 2 {
            flag(CycleBodyLength, Witness::Rule(rule.clone()));
        }
        if auxiliary && rule.body().len() != 1 {
            flag(AuxiliaryBodyLength, Witness::Rule(rule.clone()));
        }
    }
    let mut seen = BTreeSet::new();
    for cycle in analysis.cycles() {
        for h in &cycle.and_handles {
            if h.handle.iter().any(|l| cycle.contains_atom(&l.atom)) {
                let rule = &cycle.rules[h.position];
                if seen.insert(rule.clone()) {
                    flag(HandleOutsideCycle, Witness::Rule(rule.clone()));
                }
            }
        }
    }
    Ok(ThreeKernelReport { is_3kernel: violations.is_empty(), violations })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StepKind {
    LongRule,
    OrBridgeEven,
    OrBridgeOdd,
    AndBridgeEven,
    AndBridgeOdd,
}

impl StepKind {
    fn for_bridge(kind: BridgeKind, parity: Parity) -> Self {
        match (kind, parity) {
            (BridgeKind::Or, Parity::Even) => Self::OrBridgeEven,
            (BridgeKind::Or, Parity::Odd) => Self::OrBridgeOdd,
            (BridgeKind::And, Parity::Even) => Self::AndBridgeEven,
            (BridgeKind::And, Parity::Odd) => Self::AndBridgeOdd,
        }
    }
}

/// How a long rule is replaced.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Gadget {
    /// The even ring `h :- not h1. h1 :- not h2. h2 :- not h3, not b1. ... h2j+1 :- not h.`
    #[default]
    Ring,
    /// `h :- not g.` (or `h :- not s, not g.`), `g :- not g, not h.` and `g :- b` per body atom.
    Guard,
}

/// Which gadget [`long_rule_simplify_with`] uses.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum LongRuleMode {
    /// The ring when the program has `h :- not h.`, otherwise the guard.
    #[default]
    Safe,
    /// The ring everywhere. Not equivalence preserving in general: without
    /// `h :- not h.` the ring lets `h` be false while every `b` is false.
    RingOnly,
}

/// `atom := not source`
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Formula {
    pub atom: Atom,
    pub source: Atom,
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} := not {}", self.atom, self.source)
    }
}

impl Serialize for Formula {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TransformStep {
    pub kind: StepKind,
    pub removed: Vec<Rule>,
    pub added: Vec<Rule>,
    pub fresh_atoms: Vec<Atom>,
    /// Ordered from the target side, so each formula only needs earlier ones.
    pub dropped: Vec<Formula>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gadget: Option<Gadget>,
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub reroutes_cycle: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct TransformTrace {
    pub steps: Vec<TransformStep>,
    /// Atoms of the transformed program.
    pub universe: BTreeSet<Atom>,
}

impl TransformTrace {
    fn identity(program: &Program) -> Self {
        TransformTrace { steps: Vec::new(), universe: program.atoms().clone() }
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn fresh_atoms(&self) -> impl Iterator<Item = &Atom> {
        self.steps.iter().flat_map(|s| &s.fresh_atoms)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("trace serializes")
    }

    fn then(mut self, next: TransformTrace) -> Self {
        self.steps.extend(next.steps);
        self.universe = next.universe;
        self
    }
}

fn require_kernel(program: &Program) -> Result<()> {
    let report = check_kernel(program);
    if report.is_kernel {
        Ok(())
    } else {
        Err(Error::Precondition(format!("input is not a kernel program:\n{report}")))
    }
}

pub fn long_rule_simplify(program: &Program) -> Result<(Program, TransformTrace)> {
    long_rule_simplify_with(program, LongRuleMode::Safe)
}

/// Replaces auxiliary rules with more than one body literal and cycle rules
/// with more than two.
pub fn long_rule_simplify_with(
    program: &Program,
    mode: LongRuleMode,
) -> Result<(Program, TransformTrace)> {
    require_kernel(program)?;
    let analysis = CycleAnalysis::new(program)?;
    let mut used: BTreeSet<String> = program.atoms().iter().map(|a| a.name().to_owned()).collect();
    let mut next_block = 1usize;
    let mut rules = Vec::with_capacity(program.len());
    let mut steps = Vec::new();

    for (id, rule) in program.iter().enumerate() {
        let j = rule.body().len();
        let in_cycle = analysis.is_in_cycle(id);
        let long = (analysis.is_auxiliary(id) && j > 1) || (in_cycle && j > 2);
        if !long {
            rules.push(rule.clone());
            continue;
        }
        let prefix = loop {
            let prefix = format!("__lr{next_block}_");
            next_block += 1;
            if !used.iter().any(|n| n.starts_with(&prefix)) {
                break prefix;
            }
        };
        let fresh = |suffix: &str| Atom::new(&format!("{prefix}{suffix}")).expect("fresh atom name is valid");
        let h = rule.head().clone();
        let self_loop = Rule::new(h.clone(), [Literal::neg(h.clone())]);
        let gadget = match mode {
            LongRuleMode::RingOnly => Gadget::Ring,
            LongRuleMode::Safe if program.contains(&self_loop) => Gadget::Ring,
            LongRuleMode::Safe => Gadget::Guard,
        };

        let (added, fresh_atoms) = match gadget {
            Gadget::Ring => {
                let hs: Vec<Atom> = (1..=2 * j + 1).map(|i| fresh(&i.to_string())).collect();
                let mut added = vec![Rule::new(h.clone(), [Literal::neg(hs[0].clone())])];
                for (i, b) in rule.body().iter().enumerate() {
                    let (odd, even, next) = (&hs[2 * i], &hs[2 * i + 1], &hs[2 * i + 2]);
                    added.push(Rule::new(odd.clone(), [Literal::neg(even.clone())]));
                    added.push(Rule::new(even.clone(), [Literal::neg(next.clone()), b.clone()]));
                }
                added.push(Rule::new(hs[2 * j].clone(), [Literal::neg(h.clone())]));
                (added, hs)
            }
            Gadget::Guard => {
                let g = fresh("g");
                let step = in_cycle.then(|| first_step_literal(&analysis, id)).flatten();
                let head_body: Vec<Literal> =
                    step.iter().cloned().chain([Literal::neg(g.clone())]).collect();
                let mut added = vec![Rule::new(h.clone(), head_body)];
                added.push(Rule::new(g.clone(), [Literal::neg(g.clone()), Literal::neg(h.clone())]));
                for b in rule.negative_body() {
                    added.push(Rule::new(g.clone(), [Literal::pos(b.clone())]));
                }
                (added, vec![g])
            }
        };
        used.extend(fresh_atoms.iter().map(|a| a.name().to_owned()));
        rules.extend(added.iter().cloned());
        steps.push(TransformStep {
            kind: StepKind::LongRule,
            removed: vec![rule.clone()],
            added,
            fresh_atoms,
            dropped: Vec::new(),
            gadget: Some(gadget),
            reroutes_cycle: in_cycle && gadget == Gadget::Ring,
        });
    }

    let out = Program::from_generated(rules);
    let universe = out.atoms().clone();
    Ok((out, TransformTrace { steps, universe }))
}

/// First body literal (in body order) through which the rule steps along one of its cycles.
fn first_step_literal(analysis: &CycleAnalysis, rule_id: usize) -> Option<Literal> {
    let steps: BTreeSet<&Atom> = analysis
        .cycles_with_rule(rule_id)
        .map(|c| {
            let i = c.rule_ids().iter().position(|&r| r == rule_id).unwrap();
            &c.atoms[(i + 1) % c.size()]
        })
        .collect();
    let rule = &analysis.program().rules()[rule_id];
    rule.body().iter().find(|l| l.is_negative() && steps.contains(&l.atom)).cloned()
}

fn same_bridge(a: &Bridge, b: &Bridge) -> bool {
    a.kind == b.kind && a.anchor_rule == b.anchor_rule && a.chain == b.chain && a.target_atom == b.target_atom
}

fn locate(program: &Program, bridge: &Bridge, kind: BridgeKind) -> Result<()> {
    if bridge.kind != kind {
        return Err(Error::Precondition(format!("expected an {kind} bridge, got {bridge}")));
    }
    let found = CycleAnalysis::new(program)?.bridges();
    if found.iter().any(|b| same_bridge(b, bridge)) {
        Ok(())
    } else {
        Err(Error::BridgeNotFound(bridge.to_string()))
    }
}

/// `l_n := not a`, then back up the chain to `l_1`.
fn formulas(bridge: &Bridge) -> Vec<Formula> {
    bridge
        .chain
        .iter()
        .rev()
        .map(|r| Formula { atom: r.head().clone(), source: r.body()[0].atom.clone() })
        .collect()
}

/// Literal standing in for `not l1` once the chain is gone.
fn replacement(bridge: &Bridge) -> Literal {
    match bridge.parity() {
        Parity::Even => Literal::neg(bridge.target_atom.clone()),
        Parity::Odd => Literal::pos(bridge.target_atom.clone()),
    }
}

fn finish(
    program: &Program,
    bridge: &Bridge,
    removed: Vec<Rule>,
    added: Vec<Rule>,
) -> Result<(Program, TransformTrace)> {
    let out = Program::from_generated(
        program
            .iter()
            .filter(|r| !removed.contains(r))
            .cloned()
            .chain(added.iter().cloned()),
    );
    let step = TransformStep {
        kind: StepKind::for_bridge(bridge.kind, bridge.parity()),
        removed,
        added,
        fresh_atoms: Vec::new(),
        dropped: formulas(bridge),
        gadget: None,
        reroutes_cycle: false,
    };
    let universe = out.atoms().clone();
    Ok((out, TransformTrace { steps: vec![step], universe }))
}

/// `p :- not l1.` plus the chain becomes `p :- not a.` (even) or `p :- a.` (odd).
pub fn simplify_or_bridge(program: &Program, bridge: &Bridge) -> Result<(Program, TransformTrace)> {
    locate(program, bridge, BridgeKind::Or)?;
    let removed: Vec<Rule> =
        std::iter::once(bridge.anchor_rule.clone()).chain(bridge.chain.iter().cloned()).collect();
    let added = vec![Rule::new(bridge.anchor_atom.clone(), [replacement(bridge)])];
    finish(program, bridge, removed, added)
}

/// `not l1` inside the cycle rule becomes `not a` (even) or `a` (odd); the chain goes.
pub fn simplify_and_bridge(program: &Program, bridge: &Bridge) -> Result<(Program, TransformTrace)> {
    locate(program, bridge, BridgeKind::And)?;
    let first = Literal::neg(bridge.chain[0].head().clone());
    let body = bridge
        .anchor_rule
        .body()
        .iter()
        .map(|l| if *l == first { replacement(bridge) } else { l.clone() });
    let rewritten = Rule::new(bridge.anchor_atom.clone(), body);
    let removed: Vec<Rule> =
        std::iter::once(bridge.anchor_rule.clone()).chain(bridge.chain.iter().cloned()).collect();
    finish(program, bridge, removed, vec![rewritten])
}

pub fn simplify_bridge(program: &Program, bridge: &Bridge) -> Result<(Program, TransformTrace)> {
    match bridge.kind {
        BridgeKind::Or => simplify_or_bridge(program, bridge),
        BridgeKind::And => simplify_and_bridge(program, bridge),
    }
}

/// Long-rule simplification once, then bridge simplification until no
/// bridge is left. Residual violations, if any, show up in [`check_3kernel`]
/// on the result.
pub fn three_kernelize(program: &Program) -> Result<(Program, TransformTrace)> {
    let (mut current, mut trace) = long_rule_simplify(program)?;
    while let Some(bridge) = CycleAnalysis::new(&current)?.bridges().into_iter().next() {
        let (next, step) = simplify_bridge(&current, &bridge)?;
        current = next;
        trace = trace.then(step);
    }
    if trace.is_empty() {
        trace = TransformTrace::identity(&current);
    }
    Ok((current, trace))
}

/// Maps an answer set of the transformed program back to the original
/// language: bridge atoms are recomputed from their formulas and fresh atoms
/// are dropped.
pub fn reconstruct(s: &Interpretation, trace: &TransformTrace) -> Result<Interpretation> {
    let mut out = s.clone();
    let mut known = trace.universe.clone();
    for step in trace.steps.iter().rev() {
        for f in &step.dropped {
            if !known.contains(&f.source) {
                return Err(Error::Reconstruction { atom: f.atom.clone(), missing: f.source.clone() });
            }
            if !out.contains(&f.source) {
                out.insert(f.atom.clone());
            }
            known.insert(f.atom.clone());
        }
    }
    for a in trace.fresh_atoms() {
        out.remove(a);
    }
    Ok(out)
}
