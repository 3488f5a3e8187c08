//! Helpers shared by the integration tests.
#![allow(dead_code)]

use dynsub::graph::{Color, ColoredDigraph, ColoredGraph};
use dynsub::oracle::forks_bf;
use dynsub::Pattern;
use rand::Rng;

type Named = (&'static str, usize, &'static [(usize, usize, Color)]);

pub fn pattern(n: usize, edges: &[(usize, usize, Color)]) -> Pattern {
    Pattern::from_edges(n, edges).expect("valid pattern")
}

/// The connected patterns of the end-to-end runs, all in color 1.
pub fn zoo() -> Vec<(String, Pattern)> {
    let list: [Named; 7] = [
        ("k2", 2, &[(0, 1, 1)]),
        ("p3", 3, &[(0, 1, 1), (1, 2, 1)]),
        ("k3", 3, &[(0, 1, 1), (1, 2, 1), (0, 2, 1)]),
        ("p4", 4, &[(0, 1, 1), (1, 2, 1), (2, 3, 1)]),
        ("paw", 4, &[(0, 1, 1), (1, 2, 1), (0, 2, 1), (2, 3, 1)]),
        ("c4", 4, &[(0, 1, 1), (1, 2, 1), (2, 3, 1), (0, 3, 1)]),
        ("diamond", 4, &[(0, 1, 1), (1, 2, 1), (2, 3, 1), (0, 3, 1), (0, 2, 1)]),
    ];
    list.iter()
        .map(|&(name, n, e)| (name.to_string(), pattern(n, e)))
        .collect()
}

/// Every registered name together with its derived sub and hom names.
pub fn query_names(patterns: &[(String, Pattern)]) -> Vec<String> {
    patterns
        .iter()
        .flat_map(|(n, _)| [n.clone(), format!("{n}.sub"), format!("{n}.hom")])
        .collect()
}

/// A random graph on `n` vertices with up to `m` edges in colors `1..=k`.
pub fn random_graph(rng: &mut impl Rng, n: usize, m: usize, k: Color) -> ColoredGraph {
    let mut g = ColoredGraph::with_vertices(k, n);
    for _ in 0..4 * m {
        if g.edge_count() >= m {
            break;
        }
        let u = rng.gen_range(0..n as u32);
        let v = rng.gen_range(0..n as u32);
        if u != v && g.color(u, v).is_none() {
            g.add_edge(u, v, rng.gen_range(1..=k)).expect("fresh edge");
        }
    }
    g
}

/// A random pattern on `n` vertices; each pair is an edge with probability
/// `p`, in a random color `1..=k`.
pub fn random_pattern(rng: &mut impl Rng, n: usize, p: f64, k: Color) -> Pattern {
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if rng.gen_bool(p) {
                edges.push((a, b, rng.gen_range(1..=k)));
            }
        }
    }
    pattern(n, &edges)
}

/// The `h`-th fraternal augmentation computed from scratch: a random
/// orientation of `g`, then `h` rounds that join every fork by a color-0 arc
/// in a random direction.
pub fn augmentation_bf(rng: &mut impl Rng, g: &ColoredGraph, h: usize) -> ColoredDigraph {
    let mut d = ColoredDigraph::new();
    for (u, v, c) in g.edges() {
        let (t, hd) = if rng.gen() { (u, v) } else { (v, u) };
        d.insert_arc(t, hd, c).expect("fresh arc");
    }
    for _ in 0..h {
        for (u, v) in forks_bf(&d) {
            let (t, hd) = if rng.gen() { (u, v) } else { (v, u) };
            d.insert_arc(t, hd, 0).expect("forks are non-adjacent");
        }
    }
    d
}
