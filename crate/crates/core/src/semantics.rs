//! Reference semantics: Gelfond-Lifschitz reduct, answer sets and the
//! well-founded model.
//!
//! The operator `gamma(p, s)` is the least model of the reduct of `p` with
//! respect to `s`. Answer sets are its fixpoints; the well-founded model is
//! the limit of the alternating fixpoint of `gamma` started from the whole
//! universe.
//!
//! Two enumeration strategies are provided. Both visit the subsets that lie
//! between the well-founded lower and upper bounds:
//!
//! * [`Strategy::Exhaustive`] tests every such subset with one GL check.
//! * [`Strategy::Search`] splits on one atom at a time and re-tightens the
//!   bounds with the same alternating-fixpoint step after every split, so it
//!   skips subtrees that cannot contain a fixpoint.

use std::collections::{BTreeSet, HashMap};

use fixedbitset::FixedBitSet;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::program::{Atom, Literal, Program, Rule};

pub type Interpretation = BTreeSet<Atom>;

pub const DEFAULT_MAX_ATOMS: usize = 24;

/// Environment variable that overrides [`DEFAULT_MAX_ATOMS`].
pub const MAX_ATOMS_ENV: &str = "ASPNF_MAX_ATOMS";

/// Negation-free program obtained by dropping every rule blocked by `s` and
/// deleting the remaining negative literals.
pub fn gl_reduct(program: &Program, s: &Interpretation) -> Program {
    Program::from_generated(program.iter().filter_map(|r| {
        if r.negative_body().any(|a| s.contains(a)) {
            None
        } else {
            Some(Rule::new(r.head().clone(), r.positive_body().cloned().map(Literal::pos)))
        }
    }))
}

pub fn least_model(program: &Program) -> Result<Interpretation> {
    if let Some(r) = program.iter().find(|r| r.negative_body().next().is_some()) {
        return Err(Error::NotNegationFree(r.to_string()));
    }
    Ok(gamma(program, &Interpretation::new()))
}

pub fn gamma(program: &Program, s: &Interpretation) -> Interpretation {
    let idx = Indexed::new(program);
    idx.to_atoms(&idx.gamma(&idx.to_bits(s)))
}

pub fn is_answer_set(program: &Program, s: &Interpretation) -> bool {
    gamma(program, s) == *s
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Strategy {
    #[default]
    Search,
    Exhaustive,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnumOptions {
    pub max_atoms: usize,
    pub strategy: Strategy,
    /// Worker threads for the exhaustive strategy; output order never depends on it.
    pub workers: usize,
}

impl Default for EnumOptions {
    fn default() -> Self {
        EnumOptions { max_atoms: DEFAULT_MAX_ATOMS, strategy: Strategy::Search, workers: 1 }
    }
}

impl EnumOptions {
    /// Defaults, with the cap taken from `ASPNF_MAX_ATOMS` when set.
    pub fn from_env() -> Self {
        let max_atoms = std::env::var(MAX_ATOMS_ENV)
            .ok()
            .and_then(|v| v.trim().parse().ok())
            .unwrap_or(DEFAULT_MAX_ATOMS);
        EnumOptions { max_atoms, ..Default::default() }
    }

    pub fn with_max_atoms(mut self, max_atoms: usize) -> Self {
        self.max_atoms = max_atoms;
        self
    }

    pub fn with_strategy(mut self, strategy: Strategy) -> Self {
        self.strategy = strategy;
        self
    }
}

/// Answer sets ordered by cardinality, then lexicographically.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct AnswerSetCollection {
    sets: Vec<Interpretation>,
}

impl AnswerSetCollection {
    pub fn new(sets: impl IntoIterator<Item = Interpretation>) -> Self {
        let mut sets: Vec<_> = sets.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
        sets.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        AnswerSetCollection { sets }
    }

    pub fn sets(&self) -> &[Interpretation] {
        &self.sets
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Interpretation> {
        self.sets.iter()
    }

    pub fn contains(&self, s: &Interpretation) -> bool {
        self.sets.contains(s)
    }

    pub fn is_antichain(&self) -> bool {
        is_antichain(&self.sets)
    }

    pub fn into_sets(self) -> Vec<Interpretation> {
        self.sets
    }
}

impl<'a> IntoIterator for &'a AnswerSetCollection {
    type Item = &'a Interpretation;
    type IntoIter = std::slice::Iter<'a, Interpretation>;

    fn into_iter(self) -> Self::IntoIter {
        self.sets.iter()
    }
}

pub fn is_antichain<'a>(sets: impl IntoIterator<Item = &'a Interpretation> + Copy) -> bool {
    sets.into_iter().all(|a| sets.into_iter().all(|b| a == b || !a.is_subset(b)))
}

pub fn enumerate_answer_sets(program: &Program) -> Result<AnswerSetCollection> {
    enumerate_answer_sets_with(program, &EnumOptions::default())
}

pub fn enumerate_answer_sets_with(
    program: &Program,
    options: &EnumOptions,
) -> Result<AnswerSetCollection> {
    let atoms = program.atoms().len();
    if atoms > options.max_atoms {
        return Err(Error::UniverseTooLarge { atoms, cap: options.max_atoms });
    }
    let idx = Indexed::new(program);
    let found = match options.strategy {
        Strategy::Search => {
            let mut found = Vec::new();
            let (lower, upper) = idx.wfs_bounds();
            idx.search(lower, upper, &mut found);
            found
        }
        Strategy::Exhaustive => idx.exhaustive(options.workers)?,
    };
    Ok(AnswerSetCollection::new(found.iter().map(|bits| idx.to_atoms(bits))))
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct WfsResult {
    pub true_atoms: BTreeSet<Atom>,
    pub false_atoms: BTreeSet<Atom>,
    pub undefined_atoms: BTreeSet<Atom>,
}

pub fn well_founded(program: &Program) -> WfsResult {
    let idx = Indexed::new(program);
    let (lower, upper) = idx.wfs_bounds();
    let mut undefined = upper.clone();
    undefined.difference_with(&lower);
    let mut falsified = FixedBitSet::with_capacity(idx.atoms.len());
    falsified.insert_range(..);
    falsified.difference_with(&upper);
    WfsResult {
        true_atoms: idx.to_atoms(&lower),
        false_atoms: idx.to_atoms(&falsified),
        undefined_atoms: idx.to_atoms(&undefined),
    }
}

pub fn is_wfs_irreducible(program: &Program) -> bool {
    let wfs = well_founded(program);
    wfs.true_atoms.is_empty() && wfs.false_atoms.is_empty()
}

/// A program over atom indices `0..n`, in the sorted order of its atoms.
pub(crate) struct Indexed {
    atoms: Vec<Atom>,
    index: HashMap<Atom, usize>,
    rules: Vec<IndexedRule>,
    /// For each atom, the rules in which it occurs positively.
    pos_occurrences: Vec<Vec<usize>>,
}

struct IndexedRule {
    head: usize,
    pos: Vec<usize>,
    neg: Vec<usize>,
}

impl Indexed {
    pub(crate) fn new(program: &Program) -> Self {
        let atoms: Vec<Atom> = program.atoms().iter().cloned().collect();
        let index: HashMap<Atom, usize> =
            atoms.iter().enumerate().map(|(i, a)| (a.clone(), i)).collect();
        let mut pos_occurrences = vec![Vec::new(); atoms.len()];
        let rules = program
            .iter()
            .enumerate()
            .map(|(ri, r)| {
                let pos: Vec<usize> = r.positive_body().map(|a| index[a]).collect();
                for &a in &pos {
                    pos_occurrences[a].push(ri);
                }
                IndexedRule {
                    head: index[r.head()],
                    pos,
                    neg: r.negative_body().map(|a| index[a]).collect(),
                }
            })
            .collect();
        Indexed { atoms, index, rules, pos_occurrences }
    }

    fn to_bits(&self, s: &Interpretation) -> FixedBitSet {
        let mut bits = FixedBitSet::with_capacity(self.atoms.len());
        for a in s {
            if let Some(&i) = self.index.get(a) {
                bits.insert(i);
            }
        }
        bits
    }

    fn to_atoms(&self, bits: &FixedBitSet) -> Interpretation {
        bits.ones().map(|i| self.atoms[i].clone()).collect()
    }

    /// Least model of the reduct with respect to `s`, by unit propagation.
    fn gamma(&self, s: &FixedBitSet) -> FixedBitSet {
        const BLOCKED: usize = usize::MAX;
        let mut model = FixedBitSet::with_capacity(self.atoms.len());
        let mut queue = Vec::new();
        let mut missing: Vec<usize> = self
            .rules
            .iter()
            .map(|r| {
                if r.neg.iter().any(|&a| s.contains(a)) {
                    BLOCKED
                } else {
                    if r.pos.is_empty() && !model.put(r.head) {
                        queue.push(r.head);
                    }
                    r.pos.len()
                }
            })
            .collect();
        while let Some(a) = queue.pop() {
            for &ri in &self.pos_occurrences[a] {
                if missing[ri] == BLOCKED {
                    continue;
                }
                missing[ri] -= 1;
                let head = self.rules[ri].head;
                if missing[ri] == 0 && !model.put(head) {
                    queue.push(head);
                }
            }
        }
        model
    }

    /// Tightens `lower ⊆ S ⊆ upper` for every fixpoint S of gamma; false if empty.
    fn tighten(&self, lower: &mut FixedBitSet, upper: &mut FixedBitSet) -> bool {
        loop {
            let mut new_lower = self.gamma(upper);
            new_lower.union_with(lower);
            let mut new_upper = self.gamma(&new_lower);
            new_upper.intersect_with(upper);
            if !new_lower.is_subset(&new_upper) {
                return false;
            }
            if new_lower == *lower && new_upper == *upper {
                return true;
            }
            *lower = new_lower;
            *upper = new_upper;
        }
    }

    /// Alternating fixpoint from the full universe: (true atoms, non-false atoms).
    fn wfs_bounds(&self) -> (FixedBitSet, FixedBitSet) {
        let n = self.atoms.len();
        let mut upper = FixedBitSet::with_capacity(n);
        upper.insert_range(..);
        let mut lower = FixedBitSet::with_capacity(n);
        loop {
            let next_lower = self.gamma(&upper);
            let next_upper = self.gamma(&next_lower);
            if next_lower == lower && next_upper == upper {
                return (lower, upper);
            }
            lower = next_lower;
            upper = next_upper;
        }
    }

    fn search(&self, mut lower: FixedBitSet, mut upper: FixedBitSet, found: &mut Vec<FixedBitSet>) {
        if !self.tighten(&mut lower, &mut upper) {
            return;
        }
        let mut open = upper.clone();
        open.difference_with(&lower);
        match open.ones().next() {
            None => {
                if self.gamma(&lower) == lower {
                    found.push(lower);
                }
            }
            Some(split) => {
                let mut with = lower.clone();
                with.insert(split);
                self.search(with, upper.clone(), found);
                let mut without = upper;
                without.set(split, false);
                self.search(lower, without, found);
            }
        }
    }

    /// One GL check per subset between the well-founded bounds.
    fn exhaustive(&self, workers: usize) -> Result<Vec<FixedBitSet>> {
        let (lower, upper) = self.wfs_bounds();
        if !lower.is_subset(&upper) {
            return Ok(Vec::new());
        }
        let free: Vec<usize> = upper.difference(&lower).collect();
        if free.len() >= 63 {
            return Err(Error::UniverseTooLarge { atoms: self.atoms.len(), cap: 62 });
        }
        let check = |mask: u64| {
            let mut s = lower.clone();
            for (bit, &atom) in free.iter().enumerate() {
                if mask >> bit & 1 == 1 {
                    s.insert(atom);
                }
            }
            (self.gamma(&s) == s).then_some(s)
        };
        let total = 1u64 << free.len();
        if workers <= 1 {
            return Ok((0..total).filter_map(check).collect());
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .expect("thread pool");
        Ok(pool.install(|| (0..total).into_par_iter().filter_map(check).collect()))
    }
}
