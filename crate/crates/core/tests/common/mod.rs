//! Brute-force reference implementations shared by the integration tests.
//! They work on plain strings and share no code with the library's solver.
#![allow(dead_code)]

use std::collections::BTreeSet;

use aspnf::Program;

pub type Set = BTreeSet<String>;

/// Rules as (head, positive body, negative body) over atom names.
pub fn lower(program: &Program) -> Vec<(String, Vec<String>, Vec<String>)> {
    program
        .iter()
        .map(|r| {
            let pos = r.positive_body().map(|a| a.name().to_owned()).collect();
            let neg = r.negative_body().map(|a| a.name().to_owned()).collect();
            (r.head().name().to_owned(), pos, neg)
        })
        .collect()
}

pub fn reduct_least_model(rules: &[(String, Vec<String>, Vec<String>)], s: &Set) -> Set {
    let kept: Vec<_> = rules.iter().filter(|(_, _, neg)| neg.iter().all(|a| !s.contains(a))).collect();
    let mut model = Set::new();
    loop {
        let before = model.len();
        for (h, pos, _) in &kept {
            if pos.iter().all(|a| model.contains(a)) {
                model.insert(h.clone());
            }
        }
        if model.len() == before {
            return model;
        }
    }
}

/// Every subset S of the atoms with least_model(reduct(S)) = S.
pub fn answer_sets(program: &Program) -> BTreeSet<Set> {
    let atoms: Vec<String> = program.atoms().iter().map(|a| a.name().to_owned()).collect();
    assert!(atoms.len() <= 22, "oracle universe too large: {}", atoms.len());
    let rules = lower(program);
    let mut out = BTreeSet::new();
    for mask in 0u64..(1 << atoms.len()) {
        let s: Set = atoms.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, a)| a.clone()).collect();
        if reduct_least_model(&rules, &s) == s {
            out.insert(s);
        }
    }
    out
}

pub fn project(sets: &BTreeSet<Set>, over: &Set) -> BTreeSet<Set> {
    sets.iter().map(|s| s.intersection(over).cloned().collect()).collect()
}

pub fn names<'a>(atoms: impl IntoIterator<Item = &'a aspnf::Atom>) -> Set {
    atoms.into_iter().map(|a| a.name().to_owned()).collect()
}

pub fn set(atoms: &[&str]) -> Set {
    atoms.iter().map(|a| a.to_string()).collect()
}

/// Random normal program over `x1..xn`: facts, positive and negative literals.
pub fn random_normal_program(rng: &mut impl rand::Rng, n_atoms: usize, n_rules: usize) -> Program {
    let mut text = String::new();
    for _ in 0..n_rules {
        let head = rng.gen_range(1..=n_atoms);
        let len = rng.gen_range(0..=3);
        let body: Vec<String> = (0..len)
            .map(|_| {
                let a = rng.gen_range(1..=n_atoms);
                if rng.gen_bool(0.6) { format!("not x{a}") } else { format!("x{a}") }
            })
            .collect();
        if body.is_empty() {
            text.push_str(&format!("x{head}.\n"));
        } else {
            text.push_str(&format!("x{head} :- {}.\n", body.join(", ")));
        }
    }
    aspnf::text::parse_program(&text).unwrap()
}

/// Every anti-chain of subsets of `universe`, including the empty family.
pub fn all_antichains(universe: &[&str]) -> Vec<Vec<Set>> {
    let subsets: Vec<Set> = (0u32..1 << universe.len())
        .map(|m| universe.iter().enumerate().filter(|(i, _)| m >> i & 1 == 1).map(|(_, a)| a.to_string()).collect())
        .collect();
    let mut out = Vec::new();
    for family in 0u64..1 << subsets.len() {
        let members: Vec<&Set> = (0..subsets.len()).filter(|i| family >> i & 1 == 1).map(|i| &subsets[i]).collect();
        let antichain = members.iter().all(|a| members.iter().all(|b| a == b || !a.is_subset(b)));
        if antichain {
            out.push(members.into_iter().cloned().collect());
        }
    }
    out
}

/// Proper 3-colorings by brute force over every assignment.
pub fn proper_colorings(nodes: &[u32], edges: &[(u32, u32)]) -> BTreeSet<Vec<(u32, &'static str)>> {
    const COLORS: [&str; 3] = ["red", "green", "blue"];
    let mut out = BTreeSet::new();
    for code in 0..3usize.pow(nodes.len() as u32) {
        let assign: Vec<(u32, &'static str)> =
            nodes.iter().enumerate().map(|(i, &n)| (n, COLORS[code / 3usize.pow(i as u32) % 3])).collect();
        let color = |n: u32| assign.iter().find(|(m, _)| *m == n).unwrap().1;
        if edges.iter().all(|&(u, v)| color(u) != color(v)) {
            out.insert(assign);
        }
    }
    out
}
