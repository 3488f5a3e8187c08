//! Seeded random workloads: sparse edge streams and mixed update scripts.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{pair, Color, ColoredGraph, VertexId};
use crate::text::Op;

/// Edges of a random graph of degeneracy at most `d` on `n` vertices, in
/// random order. Every vertex links to up to `d` distinct earlier vertices,
/// each picked with probability proportional to its degree plus one, so the
/// stream grows hubs that the orientation has to work around.
pub fn degenerate_edges(n: usize, d: usize, k: Color, seed: u64) -> Vec<(VertexId, VertexId, Color)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::with_capacity(n * d);
    // Every vertex once, plus both endpoints of every edge.
    let mut weighted: Vec<VertexId> = Vec::with_capacity(n + 2 * n * d);
    for v in 0..n as VertexId {
        let want = d.min(v as usize);
        let mut picked: Vec<VertexId> = Vec::with_capacity(want);
        while picked.len() < want {
            let u = weighted[rng.gen_range(0..weighted.len())];
            if !picked.contains(&u) {
                picked.push(u);
            }
        }
        for u in picked {
            edges.push((u, v, rng.gen_range(1..=k)));
            weighted.extend([u, v]);
        }
        weighted.push(v);
    }
    edges.shuffle(&mut rng);
    edges
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScriptParams {
    pub n: usize,
    /// Vertex additions stop once the graph has this many vertices.
    pub max_vertices: usize,
    pub max_edges: usize,
    pub mutations: usize,
    pub k: Color,
    pub seed: u64,
}

/// A mixed script of edge insertions, deletions, recolorings and isolated
/// vertex additions and removals on an initially edgeless graph with `n`
/// vertices. After each mutation every name in `queries` is queried.
pub fn random_script(p: ScriptParams, queries: &[String]) -> (ColoredGraph, Vec<Op>) {
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let host = ColoredGraph::with_vertices(p.k, p.n);
    let mut g = host.clone();
    let mut ops = Vec::new();
    let mut extra: Vec<VertexId> = Vec::new();
    let mut next_id = p.n as VertexId;
    let mut done = 0;
    while done < p.mutations {
        let roll: f64 = rng.gen();
        let edges = g.edges();
        let op = if roll < 0.5 && edges.len() < p.max_edges {
            let u = rng.gen_range(0..p.n as VertexId);
            let v = rng.gen_range(0..p.n as VertexId);
            if u == v || g.color(u, v).is_some() {
                continue;
            }
            Op::AddEdge(u, v, rng.gen_range(1..=p.k))
        } else if roll < 0.8 && !edges.is_empty() {
            let (u, v, _) = edges[rng.gen_range(0..edges.len())];
            let (u, v) = if rng.gen() { (u, v) } else { (v, u) };
            Op::RemoveEdge(u, v)
        } else if roll < 0.93 && !edges.is_empty() && p.k > 1 {
            let (u, v, c) = edges[rng.gen_range(0..edges.len())];
            let mut nc = rng.gen_range(1..=p.k);
            if nc == c {
                nc = nc % p.k + 1;
            }
            Op::Recolor(u, v, nc)
        } else if !extra.is_empty() && rng.gen_bool(0.5) {
            Op::RemoveVertex(extra.swap_remove(rng.gen_range(0..extra.len())))
        } else if roll >= 0.93 && g.vertex_count() < p.max_vertices {
            extra.push(next_id);
            next_id += 1;
            Op::AddVertex(next_id - 1)
        } else {
            continue;
        };
        apply_to_graph(&mut g, &op).expect("generated op is valid");
        ops.push(op);
        ops.extend(queries.iter().map(|q| Op::Query(q.clone())));
        done += 1;
    }
    (host, ops)
}

/// Applies a mutation to a plain graph; queries are ignored.
pub fn apply_to_graph(g: &mut ColoredGraph, op: &Op) -> crate::Result<()> {
    match *op {
        Op::AddEdge(u, v, c) => g.add_edge(u, v, c),
        Op::RemoveEdge(u, v) => g.remove_edge(u, v).map(drop),
        Op::Recolor(u, v, c) => g.recolor_edge(u, v, c).map(drop),
        Op::AddVertex(v) => g.insert_vertex(v),
        Op::RemoveVertex(v) => g.remove_vertex(v),
        Op::Query(_) => Ok(()),
    }
}

/// Undirected pairs of a stream, for duplicate checks in tests.
pub fn pairs(edges: &[(VertexId, VertexId, Color)]) -> Vec<(VertexId, VertexId)> {
    let mut v: Vec<_> = edges.iter().map(|&(u, w, _)| pair(u, w)).collect();
    v.sort_unstable();
    v
}
