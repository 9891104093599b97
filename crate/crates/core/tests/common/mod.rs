#![allow(dead_code)]

use std::collections::BTreeSet;

use lpa_grade::graph::Graph;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const SEED: u64 = 0x5eed_1a9a;

/// A graph as a vertex count and a sorted list of `(source, target)` pairs.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Shape {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
}

impl Shape {
    pub fn graph(&self) -> Graph {
        let vertices: Vec<String> = (0..self.n).map(|i| format!("v{i}")).collect();
        let edges: Vec<(String, String, String)> = self
            .edges
            .iter()
            .enumerate()
            .map(|(k, &(s, t))| (format!("e{k}"), format!("v{s}"), format!("v{t}")))
            .collect();
        Graph::from_parts(vertices, edges).expect("shape is a valid graph")
    }

    fn relabel(&self, perm: &[usize]) -> Vec<(usize, usize)> {
        let mut e: Vec<(usize, usize)> = self.edges.iter().map(|&(s, t)| (perm[s], perm[t])).collect();
        e.sort_unstable();
        e
    }

    /// Least relabelled edge list over all vertex permutations.
    pub fn canonical(&self) -> Shape {
        let mut best: Option<Vec<(usize, usize)>> = None;
        for perm in permutations(self.n) {
            let e = self.relabel(&perm);
            if best.as_ref().is_none_or(|b| e < *b) {
                best = Some(e);
            }
        }
        Shape { n: self.n, edges: best.unwrap_or_default() }
    }
}

pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                go(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// All graphs with `1..=max_vertices` vertices and at most `max_edges` edges
/// (loops and parallel edges allowed), one per isomorphism class.
pub fn exhaustive_shapes(max_vertices: usize, max_edges: usize) -> Vec<Shape> {
    let mut seen = BTreeSet::new();
    for n in 1..=max_vertices {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|s| (0..n).map(move |t| (s, t))).collect();
        let mut current = Vec::new();
        multisets(&pairs, 0, max_edges, &mut current, &mut |edges| {
            seen.insert(Shape { n, edges: edges.to_vec() }.canonical());
        });
    }
    seen.into_iter().collect()
}

type Visit<'a> = dyn FnMut(&[(usize, usize)]) + 'a;

fn multisets(
    pairs: &[(usize, usize)],
    from: usize,
    remaining: usize,
    current: &mut Vec<(usize, usize)>,
    visit: &mut Visit<'_>,
) {
    visit(current);
    if remaining == 0 {
        return;
    }
    for i in from..pairs.len() {
        current.push(pairs[i]);
        multisets(pairs, i, remaining - 1, current, visit);
        current.pop();
    }
}

pub fn rng(stream: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(SEED ^ stream.wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

pub fn random_shape(rng: &mut impl Rng, max_vertices: usize, max_edges: usize) -> Shape {
    let n = rng.gen_range(1..=max_vertices);
    let e = rng.gen_range(0..=max_edges);
    let mut edges: Vec<(usize, usize)> = (0..e).map(|_| (rng.gen_range(0..n), rng.gen_range(0..n))).collect();
    edges.sort_unstable();
    Shape { n, edges }
}

/// Random sink-free graph: every vertex gets at least one outgoing edge.
pub fn random_sink_free_shape(rng: &mut impl Rng, max_vertices: usize, max_edges: usize) -> Shape {
    let n = rng.gen_range(1..=max_vertices);
    let mut edges: Vec<(usize, usize)> = (0..n).map(|s| (s, rng.gen_range(0..n))).collect();
    let extra = rng.gen_range(0..=max_edges.saturating_sub(n));
    edges.extend((0..extra).map(|_| (rng.gen_range(0..n), rng.gen_range(0..n))));
    edges.sort_unstable();
    Shape { n, edges }
}

/// Random finite no-exit graph without sinks: disjoint cycles fed by
/// acyclic feeder vertices.
pub fn random_no_exit_shape(rng: &mut impl Rng) -> Shape {
    let cycles = rng.gen_range(1..=2);
    let mut edges = Vec::new();
    let mut n = 0;
    for _ in 0..cycles {
        let m = rng.gen_range(1..=3);
        for i in 0..m {
            edges.push((n + i, n + (i + 1) % m));
        }
        n += m;
    }
    // Feeders point at earlier vertices only, so they create no new cycles.
    let feeders = rng.gen_range(0..=4);
    for _ in 0..feeders {
        let v = n;
        n += 1;
        for _ in 0..rng.gen_range(1..=2) {
            edges.push((v, rng.gen_range(0..v)));
        }
    }
    edges.sort_unstable();
    Shape { n, edges }
}

pub fn lcm(a: u64, b: u64) -> u64 {
    fn gcd(a: u64, b: u64) -> u64 {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    a / gcd(a, b) * b
}

/// Lengths of all paths ending at `base` that do not pass through `base`
/// before their end, enumerated one by one. In a no-exit graph these are
/// exactly the paths into `base` that avoid its cycle.
pub fn brute_force_cycle_avoiding_lengths(g: &Graph, base: usize, limit: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut stack = vec![(base, 0usize)];
    while let Some((v, len)) = stack.pop() {
        out.push(len);
        assert!(out.len() <= limit, "path enumeration exceeded {limit}");
        for e in g.edges() {
            if e.target.0 == v && e.source.0 != base {
                stack.push((e.source.0, len + 1));
            }
        }
    }
    out
}
