mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;

use aspnf::cycles::find_cycles;
use aspnf::generators::random_kernel_program;
use aspnf::kernel::{antichain_to_kernel, check_kernel, project, AntiChain};
use aspnf::normalize::{long_rule_simplify, Gadget};
use aspnf::semantics::{
    enumerate_answer_sets_with, gamma, is_answer_set, well_founded, EnumOptions, Interpretation, Strategy as SolveStrategy,
};
use aspnf::text::parse_program;
use aspnf::{Atom, Literal, Program, Rule};

use common::{answer_sets, names};

fn atom(i: usize) -> Atom {
    Atom::new(&format!("x{i}")).unwrap()
}

/// Rules over `x0..x{n-1}` with mixed literals; facts allowed.
fn program(max_atoms: usize, max_rules: usize) -> impl Strategy<Value = Program> {
    (1..=max_atoms).prop_flat_map(move |n| {
        let literal = (0..n, any::<bool>()).prop_map(|(a, neg)| if neg { Literal::neg(atom(a)) } else { Literal::pos(atom(a)) });
        let rule = (0..n, prop::collection::vec(literal, 0..=3)).prop_map(|(h, body)| Rule::new(atom(h), body));
        prop::collection::vec(rule, 0..=max_rules).prop_map(|rules| Program::new(rules).unwrap())
    })
}

fn negative_program(max_atoms: usize, max_rules: usize) -> impl Strategy<Value = Program> {
    (1..=max_atoms).prop_flat_map(move |n| {
        let rule = (0..n, prop::collection::btree_set(0..n, 1..=3))
            .prop_map(|(h, body)| Rule::new(atom(h), body.into_iter().map(|b| Literal::neg(atom(b)))));
        prop::collection::vec(rule, 1..=max_rules).prop_map(|rules| Program::new(rules).unwrap())
    })
}

fn subset_of(p: &Program, mask: u64) -> Interpretation {
    p.atoms().iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, a)| a.clone()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 256, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn render_then_parse_is_identity(p in program(6, 8)) {
        let again = parse_program(&p.to_string()).unwrap();
        prop_assert_eq!(&again, &p);
    }

    #[test]
    fn both_strategies_match_the_oracle(p in program(10, 12)) {
        let oracle = answer_sets(&p);
        for strategy in [SolveStrategy::Search, SolveStrategy::Exhaustive] {
            let sets = enumerate_answer_sets_with(&p, &EnumOptions::default().with_strategy(strategy)).unwrap();
            let found: BTreeSet<_> = sets.iter().map(|s| names(s)).collect();
            prop_assert_eq!(&found, &oracle);
            prop_assert_eq!(sets.len(), oracle.len());
            prop_assert!(sets.is_antichain());
        }
    }

    #[test]
    fn answer_set_check_agrees_on_every_subset(p in program(8, 10)) {
        let oracle = answer_sets(&p);
        for mask in 0..1u64 << p.atoms().len() {
            let s = subset_of(&p, mask);
            prop_assert_eq!(is_answer_set(&p, &s), oracle.contains(&names(&s)));
        }
    }

    #[test]
    fn gamma_is_antimonotone(p in program(8, 10), a in any::<u64>(), b in any::<u64>()) {
        let big = subset_of(&p, a | b);
        let small = subset_of(&p, a & b);
        let small: Interpretation = small.intersection(&big).cloned().collect();
        prop_assert!(gamma(&p, &big).is_subset(&gamma(&p, &small)));
    }

    #[test]
    fn answer_sets_respect_the_well_founded_model(p in program(10, 12)) {
        let wfs = well_founded(&p);
        prop_assert!(wfs.true_atoms.is_disjoint(&wfs.false_atoms));
        for s in enumerate_answer_sets_with(&p, &EnumOptions::default()).unwrap().iter() {
            prop_assert!(wfs.true_atoms.is_subset(s));
            prop_assert!(wfs.false_atoms.is_disjoint(s));
        }
    }

    #[test]
    fn antichain_kernels_round_trip(n in 1usize..=5, picks in prop::collection::vec(any::<u32>(), 1..6)) {
        let universe: BTreeSet<Atom> = (0..n).map(atom).collect();
        let mut components: Vec<BTreeSet<Atom>> = Vec::new();
        for m in picks {
            let c: BTreeSet<Atom> = (0..n).filter(|i| m >> i & 1 == 1).map(atom).collect();
            if components.iter().all(|d| !c.is_subset(d) && !d.is_subset(&c)) {
                components.push(c);
            }
        }
        let ac = AntiChain::new(universe.clone(), components.clone()).unwrap();
        let kernel = antichain_to_kernel(&ac);
        prop_assert!(check_kernel(&kernel).is_kernel);
        let sets = enumerate_answer_sets_with(&kernel, &EnumOptions::default()).unwrap();
        prop_assert_eq!(sets.len(), components.len());
        prop_assert_eq!(project(&sets, &universe), components.into_iter().collect::<BTreeSet<_>>());
    }

    #[test]
    fn cycles_ignore_rule_order(p in negative_program(6, 8), seed in any::<u64>()) {
        let mut rules = p.rules().to_vec();
        let len = rules.len();
        for i in 0..len {
            rules.swap(i, (seed as usize).wrapping_mul(i + 7) % len);
        }
        let shuffled = Program::new(rules).unwrap();
        let shape = |q: &Program| -> BTreeSet<(Vec<Atom>, BTreeSet<Rule>)> {
            find_cycles(q).unwrap().into_iter().map(|c| (c.atoms, c.rules.into_iter().collect())).collect()
        };
        prop_assert_eq!(shape(&p), shape(&shuffled));
    }

    #[test]
    fn long_rule_counts(seed in 0u64..5000) {
        let Ok(p) = random_kernel_program(6, 8, 4, seed) else { return Ok(()) };
        let (out, trace) = long_rule_simplify(&p).unwrap();
        let mut net = 0i64;
        for step in &trace.steps {
            let j = step.removed[0].body().len();
            match step.gadget.unwrap() {
                Gadget::Ring => {
                    prop_assert_eq!(step.fresh_atoms.len(), 2 * j + 1);
                    prop_assert_eq!(step.added.len(), 2 * j + 2);
                }
                Gadget::Guard => {
                    prop_assert_eq!(step.fresh_atoms.len(), 1);
                    prop_assert_eq!(step.added.len(), j + 2);
                }
            }
            prop_assert!(step.fresh_atoms.iter().all(Atom::is_reserved));
            net += step.added.len() as i64 - 1;
        }
        prop_assert_eq!(out.len() as i64, p.len() as i64 + net);
        let over = names(p.atoms());
        // The ring can push the output past the oracle's reach; the solver is checked against it above.
        let options = EnumOptions::default().with_max_atoms(out.atoms().len());
        let transformed: BTreeSet<_> = enumerate_answer_sets_with(&out, &options).unwrap().iter().map(|s| names(s)).collect();
        prop_assert_eq!(common::project(&answer_sets(&p), &over), common::project(&transformed, &over));
    }

    #[test]
    fn generated_programs_are_kernels(n in 1usize..7, extra in 0usize..4, seed in any::<u64>()) {
        if let Ok(p) = random_kernel_program(n, n + extra, 3, seed) {
            prop_assert!(check_kernel(&p).is_kernel);
            prop_assert!(p.is_purely_negative());
            prop_assert_eq!(p.atoms().len(), n);
        }
    }
}

#[test]
fn workers_do_not_change_the_result() {
    let p = parse_program("a :- not b. b :- not a. c :- not d. d :- not c. e :- not f. f :- not e. g :- a, c.").unwrap();
    let serial = EnumOptions::default().with_strategy(SolveStrategy::Exhaustive);
    let parallel = EnumOptions { workers: 4, ..serial.clone() };
    let one = enumerate_answer_sets_with(&p, &serial).unwrap();
    assert_eq!(one, enumerate_answer_sets_with(&p, &parallel).unwrap());
    assert_eq!(one.len(), 8);
}
