//! Problem encoders and random program generation.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernel::check_kernel;
use crate::program::{Atom, Literal, Program, Rule};
use crate::semantics::Interpretation;

pub const GENERATION_ATTEMPTS: usize = 1000;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct UndirectedGraph {
    nodes: BTreeSet<u32>,
    edges: BTreeSet<(u32, u32)>,
}

impl UndirectedGraph {
    /// Edges are stored as `(u, v)` with `u < v`.
    pub fn new(
        nodes: impl IntoIterator<Item = u32>,
        edges: impl IntoIterator<Item = (u32, u32)>,
    ) -> Result<Self> {
        let nodes: BTreeSet<u32> = nodes.into_iter().collect();
        let mut normalized = BTreeSet::new();
        for (u, v) in edges {
            if u == v {
                return Err(Error::Graph(format!("self edge on node {u}")));
            }
            for n in [u, v] {
                if !nodes.contains(&n) {
                    return Err(Error::Graph(format!("edge endpoint {n} is not a node")));
                }
            }
            normalized.insert((u.min(v), u.max(v)));
        }
        Ok(UndirectedGraph { nodes, edges: normalized })
    }

    pub fn complete(n: u32) -> Self {
        let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
        Self::new(0..n, edges).expect("complete graph is valid")
    }

    pub fn nodes(&self) -> &BTreeSet<u32> {
        &self.nodes
    }

    pub fn edges(&self) -> &BTreeSet<(u32, u32)> {
        &self.edges
    }
}

/// `nodes: 0 1 2` on the first line, then one `edge: u v` per line.
impl FromStr for UndirectedGraph {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .map(|l| l.split('%').next().unwrap_or("").trim())
            .filter(|l| !l.is_empty());
        let parse_ids = |rest: &str| -> Result<Vec<u32>> {
            rest.split_whitespace()
                .map(|t| t.parse().map_err(|_| Error::Graph(format!("bad node id `{t}`"))))
                .collect()
        };
        let header = lines.next().ok_or_else(|| Error::Graph("missing `nodes:` line".into()))?;
        let nodes = parse_ids(
            header.strip_prefix("nodes:").ok_or_else(|| Error::Graph("first line must start with `nodes:`".into()))?,
        )?;
        let mut edges = Vec::new();
        for line in lines {
            let rest = line
                .strip_prefix("edge:")
                .ok_or_else(|| Error::Graph(format!("expected `edge: u v`, got `{line}`")))?;
            match parse_ids(rest)?[..] {
                [u, v] => edges.push((u, v)),
                _ => return Err(Error::Graph(format!("edge needs two endpoints: `{line}`"))),
            }
        }
        Self::new(nodes, edges)
    }
}

impl fmt::Display for UndirectedGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let nodes: Vec<String> = self.nodes.iter().map(u32::to_string).collect();
        writeln!(f, "nodes: {}", nodes.join(" "))?;
        for (u, v) in &self.edges {
            writeln!(f, "edge: {u} {v}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Color {
    Red,
    Green,
    Blue,
}

impl Color {
    pub const ALL: [Color; 3] = [Color::Red, Color::Green, Color::Blue];

    pub fn name(self) -> &'static str {
        match self {
            Color::Red => "red",
            Color::Green => "green",
            Color::Blue => "blue",
        }
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct Coloring(pub BTreeMap<u32, Color>);

impl Coloring {
    pub fn get(&self, node: u32) -> Option<Color> {
        self.0.get(&node).copied()
    }

    pub fn is_proper(&self, graph: &UndirectedGraph) -> bool {
        graph.nodes().iter().all(|n| self.0.contains_key(n))
            && graph.edges().iter().all(|(u, v)| self.0[u] != self.0[v])
    }
}

impl fmt::Display for Coloring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|(n, c)| format!("{n}={c}")).collect();
        f.write_str(&parts.join(" "))
    }
}

fn atom(text: String) -> Atom {
    Atom::new(&text).expect("generated atom name is valid")
}

fn color(v: u32, c: Color) -> Atom {
    atom(format!("color({v},{c})"))
}

fn n_color(v: u32, c: Color) -> Atom {
    atom(format!("n_color({v},{c})"))
}

/// The kernel encoding of 3-colorability: 6 rules per node and 5 per edge.
///
/// A node without edges leaves its `n_color` atoms out of every body, so the
/// result is a kernel program only when every node has an edge.
pub fn encode_3col(graph: &UndirectedGraph) -> Program {
    use Color::*;
    let mut rules = Vec::with_capacity(6 * graph.nodes().len() + 5 * graph.edges().len());
    for &v in graph.nodes() {
        for (c, others) in [(Red, [Blue, Green]), (Blue, [Red, Green]), (Green, [Blue, Red])] {
            rules.push(Rule::new(color(v, c), others.map(|o| Literal::neg(color(v, o)))));
        }
        for c in [Red, Green, Blue] {
            rules.push(Rule::new(n_color(v, c), [Literal::neg(color(v, c))]));
        }
    }
    for &(u, v) in graph.edges() {
        let ok = atom(format!("edge_ok({u},{v})"));
        let ko = atom(format!("edge_ko({u},{v})"));
        rules.push(Rule::new(ok.clone(), [Literal::neg(ok.clone())]));
        rules.push(Rule::new(ok, [Literal::neg(ko.clone())]));
        for c in [Red, Green, Blue] {
            rules.push(Rule::new(ko.clone(), [Literal::neg(n_color(u, c)), Literal::neg(n_color(v, c))]));
        }
    }
    Program::new(rules).expect("encoding uses no reserved atoms")
}

/// Reads the `color(v,c)` atoms of an answer set.
pub fn decode_3col(s: &Interpretation, graph: &UndirectedGraph) -> Result<Coloring> {
    let mut coloring = BTreeMap::new();
    for &v in graph.nodes() {
        let colors: Vec<Color> = Color::ALL.into_iter().filter(|&c| s.contains(&color(v, c))).collect();
        match colors[..] {
            [c] => {
                coloring.insert(v, c);
            }
            [] => return Err(Error::Decode(format!("node {v} has no color"))),
            _ => return Err(Error::Decode(format!("node {v} has {} colors", colors.len()))),
        }
    }
    let coloring = Coloring(coloring);
    if let Some((u, v)) = graph.edges().iter().find(|(u, v)| coloring.0[u] == coloring.0[v]) {
        return Err(Error::Decode(format!("edge {u}-{v} is monochromatic")));
    }
    Ok(coloring)
}

/// Random kernel program over `a1..an`, deterministic in `seed`.
///
/// Rules have negative bodies of 1 to `max_body` distinct atoms. Candidates
/// are drawn until one passes [`check_kernel`] and uses every atom as a head.
pub fn random_kernel_program(n_atoms: usize, n_rules: usize, max_body: usize, seed: u64) -> Result<Program> {
    if n_atoms == 0 || max_body == 0 {
        return Err(Error::Precondition("need at least one atom and a body size of at least one".into()));
    }
    let atoms: Vec<Atom> = (1..=n_atoms).map(|i| atom(format!("a{i}"))).collect();
    let max_body = max_body.min(n_atoms);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..GENERATION_ATTEMPTS {
        let rules = (0..n_rules).map(|_| {
            let head = atoms[rng.gen_range(0..n_atoms)].clone();
            let len = rng.gen_range(1..=max_body);
            let body = atoms.choose_multiple(&mut rng, len).cloned().map(Literal::neg);
            Rule::new(head, body.collect::<Vec<_>>())
        });
        let program = Program::new(rules.collect::<Vec<_>>())?;
        let heads: BTreeSet<&Atom> = program.iter().map(Rule::head).collect();
        if program.atoms().len() == n_atoms && heads.len() == n_atoms && check_kernel(&program).is_kernel {
            return Ok(program);
        }
    }
    Err(Error::GenerationFailed { attempts: GENERATION_ATTEMPTS })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semantics::enumerate_answer_sets;

    #[test]
    fn graph_text_format() {
        let g: UndirectedGraph = "nodes: 0 1 2\nedge: 1 0\n% comment\nedge: 1 2\n".parse().unwrap();
        assert_eq!(g.edges(), &BTreeSet::from([(0, 1), (1, 2)]));
        assert_eq!(g.to_string(), "nodes: 0 1 2\nedge: 0 1\nedge: 1 2\n");
        assert!("nodes: 0\nedge: 0 0".parse::<UndirectedGraph>().is_err());
        assert!("nodes: 0\nedge: 0 1".parse::<UndirectedGraph>().is_err());
        assert!("edge: 0 1".parse::<UndirectedGraph>().is_err());
        assert!("nodes: x".parse::<UndirectedGraph>().is_err());
    }

    #[test]
    fn single_node() {
        let g = UndirectedGraph::new([0], []).unwrap();
        let p = encode_3col(&g);
        assert_eq!(p.len(), 6);
        assert_eq!(p.rules()[0].to_string(), "color(0,red) :- not color(0,blue), not color(0,green).");
        let sets = enumerate_answer_sets(&p).unwrap();
        let colors: BTreeSet<Color> = sets.iter().map(|s| decode_3col(s, &g).unwrap().get(0).unwrap()).collect();
        assert_eq!(colors.len(), 3);
    }

    #[test]
    fn single_edge() {
        let g = UndirectedGraph::new([0, 1], [(0, 1)]).unwrap();
        let p = encode_3col(&g);
        assert_eq!(p.len(), 17);
        assert!(check_kernel(&p).is_kernel);
        let sets = enumerate_answer_sets(&p).unwrap();
        assert_eq!(sets.len(), 6);
        for s in &sets {
            assert!(decode_3col(s, &g).unwrap().is_proper(&g));
        }
    }

    #[test]
    fn decode_errors() {
        let g = UndirectedGraph::new([0, 1], [(0, 1)]).unwrap();
        let s: Interpretation = [color(0, Color::Red)].into();
        assert!(matches!(decode_3col(&s, &g), Err(Error::Decode(_))));
        let s: Interpretation = [color(0, Color::Red), color(1, Color::Red)].into();
        assert!(matches!(decode_3col(&s, &g), Err(Error::Decode(_))));
        let s: Interpretation = [color(0, Color::Red), color(0, Color::Blue), color(1, Color::Green)].into();
        assert!(matches!(decode_3col(&s, &g), Err(Error::Decode(_))));
        let s: Interpretation = [color(0, Color::Red), color(1, Color::Blue)].into();
        assert_eq!(decode_3col(&s, &g).unwrap().to_string(), "0=red 1=blue");
    }

    #[test]
    fn random_programs() {
        let a = random_kernel_program(6, 8, 3, 7).unwrap();
        assert_eq!(a, random_kernel_program(6, 8, 3, 7).unwrap());
        assert!(check_kernel(&a).is_kernel);
        assert!(a.is_purely_negative());
        let small = random_kernel_program(2, 2, 1, 0).unwrap();
        let even = crate::text::parse_program("a1 :- not a2. a2 :- not a1.").unwrap();
        assert!(small.len() == 2 && even.iter().all(|r| small.contains(r)));
        assert_eq!(
            random_kernel_program(3, 1, 1, 0).unwrap_err(),
            Error::GenerationFailed { attempts: GENERATION_ATTEMPTS }
        );
        assert!(matches!(random_kernel_program(0, 1, 1, 0), Err(Error::Precondition(_))));
    }
}
