//! Kernel normal form: checking it, and building kernel programs with a
//! prescribed collection of answer sets.
//!
//! A program is a kernel program when it is WFS-irreducible, every body is a
//! non-empty conjunction of negative literals, and every atom occurs in some
//! body. Any anti-chain of atom sets over a universe H is the projection on H
//! of the answer sets of the program built by [`antichain_to_kernel`]:
//!
//! ```text
//! h :- not __bar_h.      __bar_h :- not h.     (every h in H)
//! __m :- not __bar_a1, ..., not __bar_ar, not n1, ..., not ns.
//!                                          (every component {a1..ar})
//! __bot :- not __bot, not __m.
//! ```

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::program::{Atom, Literal, Program, Rule};
use crate::semantics::{
    enumerate_answer_sets_with, is_antichain, well_founded, EnumOptions,
    Interpretation,
};
use crate::text::{parse_atom_set, render_atom_set};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum KernelCondition {
    WfsIrreducible,
    NegativeBodiesOnly,
    EveryAtomInSomeBody,
}

impl fmt::Display for KernelCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            KernelCondition::WfsIrreducible => "wfs-irreducible",
            KernelCondition::NegativeBodiesOnly => "negative-bodies-only",
            KernelCondition::EveryAtomInSomeBody => "every-atom-in-some-body",
        })
    }
}

/// What a violation points at.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Witness {
    Rule(Rule),
    Atom(Atom),
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::Rule(r) => write!(f, "rule `{r}`"),
            Witness::Atom(a) => write!(f, "atom `{a}`"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KernelViolation {
    pub condition: KernelCondition,
    pub witness: Witness,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KernelReport {
    pub is_kernel: bool,
    pub violations: Vec<KernelViolation>,
}

impl KernelReport {
    pub fn violates(&self, condition: KernelCondition) -> bool {
        self.violations.iter().any(|v| v.condition == condition)
    }
}

impl fmt::Display for KernelReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_kernel {
            return writeln!(f, "kernel: yes");
        }
        writeln!(f, "kernel: no")?;
        for v in &self.violations {
            writeln!(f, "  {}: {}", v.condition, v.witness)?;
        }
        Ok(())
    }
}

/// Reports every violated kernel condition, with one witness per offender.
pub fn check_kernel(program: &Program) -> KernelReport {
    let mut violations = Vec::new();

    let wfs = well_founded(program);
    for atom in wfs.true_atoms.iter().chain(&wfs.false_atoms) {
        violations.push(KernelViolation {
            condition: KernelCondition::WfsIrreducible,
            witness: Witness::Atom(atom.clone()),
        });
    }

    for rule in program {
        if rule.is_fact() || rule.positive_body().next().is_some() {
            violations.push(KernelViolation {
                condition: KernelCondition::NegativeBodiesOnly,
                witness: Witness::Rule(rule.clone()),
            });
        }
    }

    let in_bodies: BTreeSet<&Atom> =
        program.iter().flat_map(|r| r.body().iter().map(|l| &l.atom)).collect();
    for atom in program.atoms().iter().filter(|a| !in_bodies.contains(a)) {
        violations.push(KernelViolation {
            condition: KernelCondition::EveryAtomInSomeBody,
            witness: Witness::Atom(atom.clone()),
        });
    }

    KernelReport { is_kernel: violations.is_empty(), violations }
}

/// A collection of pairwise incomparable subsets of `universe`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AntiChain {
    universe: BTreeSet<Atom>,
    components: BTreeSet<BTreeSet<Atom>>,
}

impl AntiChain {
    pub fn new(
        universe: BTreeSet<Atom>,
        components: impl IntoIterator<Item = BTreeSet<Atom>>,
    ) -> Result<Self> {
        let components: BTreeSet<_> = components.into_iter().collect();
        if let Some(a) = universe.iter().find(|a| a.is_reserved()) {
            return Err(Error::ReservedAtom(a.to_string()));
        }
        if let Some(c) = components.iter().find(|c| !c.is_subset(&universe)) {
            return Err(Error::AntiChain(format!(
                "component {} is not a subset of the universe",
                render_atom_set(c)
            )));
        }
        if !is_antichain(&components) {
            return Err(Error::AntiChain("a component is a subset of another".into()));
        }
        Ok(AntiChain { universe, components })
    }

    pub fn universe(&self) -> &BTreeSet<Atom> {
        &self.universe
    }

    pub fn components(&self) -> &BTreeSet<BTreeSet<Atom>> {
        &self.components
    }

    /// Reads the text format: a `#universe a1, a2.` header followed by one
    /// component per line (`a1, a2`, optionally braced; `{}` is the empty set).
    pub fn parse(text: &str) -> Result<Self> {
        let mut universe = None;
        let mut components = Vec::new();
        for line in text.lines() {
            let line = line.split('%').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let line = line.strip_suffix('.').unwrap_or(line);
            if let Some(rest) = line.strip_prefix("#universe") {
                if universe.is_some() {
                    return Err(Error::AntiChain("duplicate #universe header".into()));
                }
                universe = Some(parse_atom_set(rest)?);
            } else if universe.is_none() {
                return Err(Error::AntiChain("missing #universe header".into()));
            } else {
                components.push(parse_atom_set(line)?);
            }
        }
        let universe = universe.ok_or_else(|| Error::AntiChain("missing #universe header".into()))?;
        AntiChain::new(universe, components)
    }
}

impl fmt::Display for AntiChain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.universe.iter().map(Atom::name).collect();
        writeln!(f, "#universe {}.", names.join(", "))?;
        for c in &self.components {
            writeln!(f, "{}", render_atom_set(c))?;
        }
        Ok(())
    }
}

pub fn bar_atom(atom: &Atom) -> Atom {
    Atom::new(&format!("__bar_{atom}")).expect("valid reserved name")
}

pub fn m_atom() -> Atom {
    Atom::new("__m").expect("valid reserved name")
}

pub fn bot_atom() -> Atom {
    Atom::new("__bot").expect("valid reserved name")
}

/// Kernel program whose answer sets project on the universe to exactly the
/// components, one answer set per component.
///
/// The anti-chain `{{}}` over an empty universe yields the fact `__m.`, which
/// [`check_kernel`] flags; every other non-empty anti-chain gives a kernel.
pub fn antichain_to_kernel(antichain: &AntiChain) -> Program {
    let (m, bot) = (m_atom(), bot_atom());
    let mut rules = Vec::new();
    for h in &antichain.universe {
        rules.push(Rule::new(h.clone(), [Literal::neg(bar_atom(h))]));
        rules.push(Rule::new(bar_atom(h), [Literal::neg(h.clone())]));
    }
    for component in &antichain.components {
        let chosen = component.iter().map(|a| Literal::neg(bar_atom(a)));
        let rest = antichain.universe.difference(component).map(|n| Literal::neg(n.clone()));
        rules.push(Rule::new(m.clone(), chosen.chain(rest)));
    }
    rules.push(Rule::new(bot.clone(), [Literal::neg(bot), Literal::neg(m)]));
    Program::from_generated(rules)
}

/// Intersects every set with `over`, collapsing duplicates.
pub fn project<'a>(
    sets: impl IntoIterator<Item = &'a Interpretation>,
    over: &BTreeSet<Atom>,
) -> BTreeSet<BTreeSet<Atom>> {
    sets.into_iter().map(|s| s.intersection(over).cloned().collect()).collect()
}

pub fn equivalent_mod_projection(
    left: &Program,
    right: &Program,
    over: &BTreeSet<Atom>,
    options: &EnumOptions,
) -> Result<bool> {
    let l = enumerate_answer_sets_with(left, options)?;
    let r = enumerate_answer_sets_with(right, options)?;
    Ok(project(&l, over) == project(&r, over))
}

/// Kernel program equivalent to `program` modulo projection on its atoms.
///
/// Exponential: it enumerates the answer sets and feeds them to
/// [`antichain_to_kernel`].
pub fn kernelize(program: &Program, options: &EnumOptions) -> Result<(Program, BTreeSet<Atom>)> {
    let universe = program.atoms().clone();
    let answer_sets = enumerate_answer_sets_with(program, options)?;
    let antichain = AntiChain::new(universe.clone(), answer_sets.into_sets())?;
    Ok((antichain_to_kernel(&antichain), universe))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::program::tests::{atom, pi6, rule};
    use crate::semantics::enumerate_answer_sets;
    use crate::text::parse_program;

    fn set(atoms: &[&str]) -> BTreeSet<Atom> {
        atoms.iter().map(|a| atom(a)).collect()
    }

    fn opts() -> EnumOptions {
        EnumOptions::default()
    }

    #[test]
    fn single_edge_colouring_is_kernel() {
        let text = "
            color(0,red) :- not color(0,blue), not color(0,green).
            color(0,blue) :- not color(0,red), not color(0,green).
            color(0,green) :- not color(0,blue), not color(0,red).
            n_color(0,red) :- not color(0,red).
            n_color(0,green) :- not color(0,green).
            n_color(0,blue) :- not color(0,blue).
            color(1,red) :- not color(1,blue), not color(1,green).
            color(1,blue) :- not color(1,red), not color(1,green).
            color(1,green) :- not color(1,blue), not color(1,red).
            n_color(1,red) :- not color(1,red).
            n_color(1,green) :- not color(1,green).
            n_color(1,blue) :- not color(1,blue).
            edge_ok(0,1) :- not edge_ok(0,1).
            edge_ok(0,1) :- not edge_ko(0,1).
            edge_ko(0,1) :- not n_color(0,red), not n_color(1,red).
            edge_ko(0,1) :- not n_color(0,green), not n_color(1,green).
            edge_ko(0,1) :- not n_color(0,blue), not n_color(1,blue).";
        let report = check_kernel(&parse_program(text).unwrap());
        assert!(report.is_kernel, "{report}");
    }

    #[test]
    fn fact_violates_everything() {
        let report = check_kernel(&Program::new([rule("a", &[])]).unwrap());
        assert!(!report.is_kernel);
        let conditions: BTreeSet<_> = report.violations.iter().map(|v| v.condition).collect();
        assert_eq!(
            conditions,
            BTreeSet::from([
                KernelCondition::WfsIrreducible,
                KernelCondition::NegativeBodiesOnly,
                KernelCondition::EveryAtomInSomeBody
            ])
        );
        assert!(report
            .violations
            .iter()
            .any(|v| v.condition == KernelCondition::WfsIrreducible
                && v.witness == Witness::Atom(atom("a"))));
    }

    #[test]
    fn positive_literal_violation() {
        let report = check_kernel(&Program::new([rule("p", &["not p", "q"])]).unwrap());
        assert!(report.violates(KernelCondition::NegativeBodiesOnly));
        assert!(report.violations.iter().any(|v| v.witness == Witness::Rule(rule("p", &["not p", "q"]))));
    }

    #[test]
    fn pi6_is_kernel() {
        assert!(check_kernel(&pi6()).is_kernel);
    }

    #[test]
    fn two_singletons() {
        let ac = AntiChain::new(set(&["a1", "a2"]), [set(&["a1"]), set(&["a2"])]).unwrap();
        let k = antichain_to_kernel(&ac);
        assert_eq!(k.len(), 4 + 2 + 1);
        // a1, a2, their bars, __m and __bot.
        assert_eq!(k.atoms().len(), 6);
        assert!(check_kernel(&k).is_kernel);
        let sets = enumerate_answer_sets(&k).unwrap();
        assert_eq!(sets.len(), 2);
        assert_eq!(project(&sets, ac.universe()), BTreeSet::from([set(&["a1"]), set(&["a2"])]));
    }

    #[test]
    fn empty_component() {
        let ac = AntiChain::new(set(&["a"]), [set(&[])]).unwrap();
        let k = antichain_to_kernel(&ac);
        assert!(k.contains(&Rule::new(m_atom(), [Literal::neg(atom("a"))])));
        let sets = enumerate_answer_sets(&k).unwrap();
        assert_eq!(sets.len(), 1);
        assert_eq!(project(&sets, ac.universe()), BTreeSet::from([set(&[])]));
    }

    #[test]
    fn no_components() {
        let ac = AntiChain::new(set(&["a"]), []).unwrap();
        let k = antichain_to_kernel(&ac);
        assert!(k.rules_for(&m_atom()).next().is_none());
        assert!(enumerate_answer_sets(&k).unwrap().is_empty());
    }

    #[test]
    fn degenerate_empty_universe() {
        let ac = AntiChain::new(set(&[]), [set(&[])]).unwrap();
        let k = antichain_to_kernel(&ac);
        assert!(k.contains(&Rule::fact(m_atom())));
        let report = check_kernel(&k);
        assert!(report.violates(KernelCondition::NegativeBodiesOnly));
    }

    #[test]
    fn antichain_validation() {
        assert!(matches!(
            AntiChain::new(set(&["a", "b"]), [set(&["a"]), set(&["a", "b"])]),
            Err(Error::AntiChain(_))
        ));
        assert!(matches!(AntiChain::new(set(&["a"]), [set(&["b"])]), Err(Error::AntiChain(_))));
        let reserved = BTreeSet::from([Atom::new("__x").unwrap()]);
        assert!(matches!(AntiChain::new(reserved, []), Err(Error::ReservedAtom(_))));
    }

    #[test]
    fn antichain_text() {
        let ac = AntiChain::parse("% two singletons\n#universe a1, a2.\na1\n{a2}\n").unwrap();
        assert_eq!(ac.components(), &BTreeSet::from([set(&["a1"]), set(&["a2"])]));
        assert_eq!(AntiChain::parse(&ac.to_string()).unwrap(), ac);
        let empty = AntiChain::parse("#universe a.\n{}\n").unwrap();
        assert_eq!(empty.components(), &BTreeSet::from([set(&[])]));
        assert!(AntiChain::parse("a1\n").is_err());
        assert!(AntiChain::parse("").is_err());
    }

    #[test]
    fn projections() {
        let sets = vec![BTreeSet::from([atom("a1"), bar_atom(&atom("a2")), m_atom()])];
        assert_eq!(project(&sets, &set(&["a1", "a2"])), BTreeSet::from([set(&["a1"])]));
        assert_eq!(project(&sets, &set(&[])), BTreeSet::from([set(&[])]));
        assert!(project(&Vec::<Interpretation>::new(), &set(&["a"])).is_empty());
    }

    #[test]
    fn equivalence() {
        let p = pi6();
        assert!(equivalent_mod_projection(&p, &p, p.atoms(), &opts()).unwrap());
        let even = Program::new([rule("a", &["not b"]), rule("b", &["not a"])]).unwrap();
        let odd = Program::new([rule("p", &["not p"])]).unwrap();
        assert!(!equivalent_mod_projection(&even, &odd, &set(&[]), &opts()).unwrap());
    }

    #[test]
    fn kernelize_examples() {
        let (k, universe) = kernelize(&pi6(), &opts()).unwrap();
        assert_eq!(&universe, pi6().atoms());
        let sets = enumerate_answer_sets(&k).unwrap();
        assert_eq!(project(&sets, &universe), BTreeSet::from([set(&["b", "q"])]));
        assert!(check_kernel(&k).is_kernel);

        let (k, universe) = kernelize(&Program::default(), &opts()).unwrap();
        assert!(universe.is_empty());
        assert!(k.contains(&Rule::fact(m_atom())));

        let odd = Program::new([rule("p", &["not p"])]).unwrap();
        let (k, _) = kernelize(&odd, &opts()).unwrap();
        assert!(k.rules_for(&m_atom()).next().is_none());
        assert!(enumerate_answer_sets(&k).unwrap().is_empty());
    }
}
