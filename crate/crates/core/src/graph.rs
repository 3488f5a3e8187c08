//! Host graph types: the mutable undirected edge-colored graph and the
//! colored digraph used as the view of the augmentation.

use std::collections::BTreeSet;

use rustc_hash::FxHashMap;

use crate::{Error, Result};

pub type VertexId = u32;

/// Edge color. Host edges use `1..=k`; `0` marks augmentation edges.
pub type Color = u8;

#[inline]
pub(crate) fn pair(u: VertexId, v: VertexId) -> (VertexId, VertexId) {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

/// Undirected simple graph with edge colors in `1..=k`.
///
/// Vertex ids are dense; removed ids go to a free list and are handed out
/// again (smallest first) by [`ColoredGraph::add_vertex`].
#[derive(Debug, Clone)]
pub struct ColoredGraph {
    k: Color,
    alive: Vec<bool>,
    free: BTreeSet<VertexId>,
    adj: Vec<Vec<(VertexId, Color)>>,
    edges: FxHashMap<(VertexId, VertexId), Color>,
    vertex_count: usize,
}

impl ColoredGraph {
    pub fn new(k: Color) -> Self {
        Self {
            k,
            alive: Vec::new(),
            free: BTreeSet::new(),
            adj: Vec::new(),
            edges: FxHashMap::default(),
            vertex_count: 0,
        }
    }

    /// Graph on vertices `0..n` without edges.
    pub fn with_vertices(k: Color, n: usize) -> Self {
        let mut g = Self::new(k);
        for _ in 0..n {
            g.add_vertex();
        }
        g
    }

    pub fn k(&self) -> Color {
        self.k
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// One past the largest id ever allocated.
    pub fn id_bound(&self) -> usize {
        self.alive.len()
    }

    pub fn contains_vertex(&self, v: VertexId) -> bool {
        self.alive.get(v as usize).copied().unwrap_or(false)
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.alive
            .iter()
            .enumerate()
            .filter(|(_, &a)| a)
            .map(|(v, _)| v as VertexId)
    }

    /// Allocates a fresh vertex, reusing the smallest freed id if any.
    pub fn add_vertex(&mut self) -> VertexId {
        let id = match self.free.pop_first() {
            Some(id) => id,
            None => self.alive.len() as VertexId,
        };
        self.insert_vertex(id).expect("fresh id");
        id
    }

    /// Adds the vertex with the given id.
    pub fn insert_vertex(&mut self, id: VertexId) -> Result<()> {
        if self.contains_vertex(id) {
            return Err(Error::DuplicateVertex(id));
        }
        let idx = id as usize;
        if idx >= self.alive.len() {
            for fresh in self.alive.len()..idx {
                self.free.insert(fresh as VertexId);
            }
            self.alive.resize(idx + 1, false);
            self.adj.resize_with(idx + 1, Vec::new);
        }
        self.free.remove(&id);
        self.alive[idx] = true;
        self.vertex_count += 1;
        Ok(())
    }

    /// Removes a vertex without incident edges.
    pub fn remove_vertex(&mut self, id: VertexId) -> Result<()> {
        if !self.contains_vertex(id) {
            return Err(Error::UnknownVertex(id));
        }
        if !self.adj[id as usize].is_empty() {
            return Err(Error::NotIsolated(id));
        }
        self.alive[id as usize] = false;
        self.free.insert(id);
        self.vertex_count -= 1;
        Ok(())
    }

    /// Checks that `add_edge(u, v, c)` would succeed.
    pub fn check_insert(&self, u: VertexId, v: VertexId, c: Color) -> Result<()> {
        for w in [u, v] {
            if !self.contains_vertex(w) {
                return Err(Error::UnknownVertex(w));
            }
        }
        if u == v {
            return Err(Error::Loop(u));
        }
        self.check_color(c)?;
        if self.edges.contains_key(&pair(u, v)) {
            return Err(Error::DuplicateEdge(u, v));
        }
        Ok(())
    }

    pub fn check_color(&self, c: Color) -> Result<()> {
        if c == 0 || c > self.k {
            return Err(Error::InvalidColor { color: c, k: self.k });
        }
        Ok(())
    }

    pub fn add_edge(&mut self, u: VertexId, v: VertexId, c: Color) -> Result<()> {
        self.check_insert(u, v, c)?;
        self.edges.insert(pair(u, v), c);
        self.adj[u as usize].push((v, c));
        self.adj[v as usize].push((u, c));
        Ok(())
    }

    /// Removes the edge and returns its former color.
    pub fn remove_edge(&mut self, u: VertexId, v: VertexId) -> Result<Color> {
        let c = self
            .edges
            .remove(&pair(u, v))
            .ok_or(Error::MissingEdge(u, v))?;
        detach(&mut self.adj[u as usize], v);
        detach(&mut self.adj[v as usize], u);
        Ok(c)
    }

    /// Changes the color of an existing edge, returning the old one.
    pub fn recolor_edge(&mut self, u: VertexId, v: VertexId, c: Color) -> Result<Color> {
        self.check_color(c)?;
        let slot = self
            .edges
            .get_mut(&pair(u, v))
            .ok_or(Error::MissingEdge(u, v))?;
        let old = std::mem::replace(slot, c);
        for (a, b) in [(u, v), (v, u)] {
            if let Some(e) = self.adj[a as usize].iter_mut().find(|(w, _)| *w == b) {
                e.1 = c;
            }
        }
        Ok(old)
    }

    pub fn color(&self, u: VertexId, v: VertexId) -> Option<Color> {
        self.edges.get(&pair(u, v)).copied()
    }

    pub fn neighbors(&self, v: VertexId) -> &[(VertexId, Color)] {
        self.adj.get(v as usize).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.neighbors(v).len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Edges as `(u, v, color)` with `u < v`, sorted.
    pub fn edges(&self) -> Vec<(VertexId, VertexId, Color)> {
        let mut out: Vec<_> = self.edges.iter().map(|(&(u, v), &c)| (u, v, c)).collect();
        out.sort_unstable();
        out
    }

    /// Largest minimum degree over all subgraphs.
    pub fn degeneracy(&self) -> usize {
        let lists: Vec<Vec<VertexId>> = self
            .adj
            .iter()
            .map(|l| l.iter().map(|&(w, _)| w).collect())
            .collect();
        peel(&lists).0
    }
}

impl PartialEq for ColoredGraph {
    fn eq(&self, other: &Self) -> bool {
        self.k == other.k
            && self.vertices().eq(other.vertices())
            && self.edges == other.edges
    }
}

impl Eq for ColoredGraph {}

fn detach(list: &mut Vec<(VertexId, Color)>, w: VertexId) {
    if let Some(i) = list.iter().position(|&(x, _)| x == w) {
        list.swap_remove(i);
    }
}

/// Bucket-queue min-degree peeling. Returns the degeneracy and the removal
/// order.
pub(crate) fn peel(adj: &[Vec<VertexId>]) -> (usize, Vec<VertexId>) {
    let n = adj.len();
    let mut degree: Vec<usize> = adj.iter().map(Vec::len).collect();
    let max_deg = degree.iter().copied().max().unwrap_or(0);
    let mut buckets: Vec<Vec<VertexId>> = vec![Vec::new(); max_deg + 1];
    for (v, &d) in degree.iter().enumerate() {
        buckets[d].push(v as VertexId);
    }
    let mut removed = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut best = 0;
    let mut cursor = 0;
    while order.len() < n {
        // Buckets hold stale entries; the live one is the one whose degree matches.
        let v = loop {
            while buckets[cursor].is_empty() {
                cursor += 1;
            }
            let v = buckets[cursor].pop().unwrap();
            if !removed[v as usize] && degree[v as usize] == cursor {
                break v;
            }
        };
        removed[v as usize] = true;
        best = best.max(cursor);
        order.push(v);
        for &w in &adj[v as usize] {
            let w = w as usize;
            if !removed[w] {
                degree[w] -= 1;
                buckets[degree[w]].push(w as VertexId);
                if degree[w] < cursor {
                    cursor = degree[w];
                }
            }
        }
    }
    (best, order)
}

/// Directed simple graph with colors `0..=k` on arcs and no anti-parallel
/// pairs. In-lists stay short on the graphs this crate builds, so arc lookup
/// scans the in-list of the head.
#[derive(Debug, Clone, Default)]
pub struct ColoredDigraph {
    out: Vec<Vec<(VertexId, Color)>>,
    inn: Vec<Vec<(VertexId, Color)>>,
    arcs: usize,
}

impl ColoredDigraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_arcs(arcs: impl IntoIterator<Item = (VertexId, VertexId, Color)>) -> Result<Self> {
        let mut d = Self::new();
        for (x, y, c) in arcs {
            d.insert_arc(x, y, c)?;
        }
        Ok(d)
    }

    fn grow(&mut self, v: VertexId) {
        let need = v as usize + 1;
        if self.out.len() < need {
            self.out.resize_with(need, Vec::new);
            self.inn.resize_with(need, Vec::new);
        }
    }

    /// One past the largest vertex id with a list slot.
    pub fn id_bound(&self) -> usize {
        self.out.len()
    }

    pub fn arc_count(&self) -> usize {
        self.arcs
    }

    pub fn insert_arc(&mut self, x: VertexId, y: VertexId, c: Color) -> Result<()> {
        if x == y {
            return Err(Error::Loop(x));
        }
        if self.adjacent(x, y) {
            return Err(Error::DuplicateEdge(x, y));
        }
        self.grow(x.max(y));
        self.out[x as usize].push((y, c));
        self.inn[y as usize].push((x, c));
        self.arcs += 1;
        Ok(())
    }

    /// Removes the arc `x -> y`, which must carry color `c`.
    pub fn remove_arc(&mut self, x: VertexId, y: VertexId, c: Color) -> Result<()> {
        match self.arc_color(x, y) {
            Some(have) if have == c => {}
            _ => return Err(Error::MissingEdge(x, y)),
        }
        let o = &mut self.out[x as usize];
        let i = o.iter().position(|&(w, _)| w == y).unwrap();
        o.swap_remove(i);
        let n = &mut self.inn[y as usize];
        let i = n.iter().position(|&(w, _)| w == x).unwrap();
        n.swap_remove(i);
        self.arcs -= 1;
        Ok(())
    }

    #[inline]
    pub fn arc_color(&self, x: VertexId, y: VertexId) -> Option<Color> {
        self.inn
            .get(y as usize)?
            .iter()
            .find(|&&(w, _)| w == x)
            .map(|&(_, c)| c)
    }

    #[inline]
    pub fn has_arc(&self, x: VertexId, y: VertexId, c: Color) -> bool {
        match self.inn.get(y as usize) {
            Some(l) => l.iter().any(|&(w, cc)| w == x && cc == c),
            None => false,
        }
    }

    pub fn adjacent(&self, x: VertexId, y: VertexId) -> bool {
        self.arc_color(x, y).is_some() || self.arc_color(y, x).is_some()
    }

    #[inline]
    pub fn in_arcs(&self, v: VertexId) -> &[(VertexId, Color)] {
        self.inn.get(v as usize).map(Vec::as_slice).unwrap_or(&[])
    }

    #[inline]
    pub fn out_arcs(&self, v: VertexId) -> &[(VertexId, Color)] {
        self.out.get(v as usize).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn max_in_degree(&self) -> usize {
        self.inn.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// All arcs `(tail, head, color)`, sorted.
    pub fn arcs(&self) -> Vec<(VertexId, VertexId, Color)> {
        let mut out: Vec<_> = self
            .out
            .iter()
            .enumerate()
            .flat_map(|(x, l)| l.iter().map(move |&(y, c)| (x as VertexId, y, c)))
            .collect();
        out.sort_unstable();
        out
    }
}

impl PartialEq for ColoredDigraph {
    fn eq(&self, other: &Self) -> bool {
        self.arcs() == other.arcs()
    }
}

impl Eq for ColoredDigraph {}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> ColoredGraph {
        let mut g = ColoredGraph::with_vertices(2, 4);
        g.add_edge(1, 2, 1).unwrap();
        g.add_edge(2, 3, 1).unwrap();
        g.add_edge(1, 3, 1).unwrap();
        g
    }

    fn consistent(g: &ColoredGraph) -> bool {
        g.vertices().all(|v| {
            let mut from_adj: Vec<_> = g.neighbors(v).to_vec();
            from_adj.sort_unstable();
            let mut from_map: Vec<_> = g
                .edges()
                .into_iter()
                .filter_map(|(a, b, c)| match (a == v, b == v) {
                    (true, _) => Some((b, c)),
                    (_, true) => Some((a, c)),
                    _ => None,
                })
                .collect();
            from_map.sort_unstable();
            from_adj == from_map
        })
    }

    #[test]
    fn add_edge_basics() {
        let mut g = ColoredGraph::with_vertices(1, 3);
        g.add_edge(1, 2, 1).unwrap();
        assert_eq!(g.color(1, 2), Some(1));
        assert_eq!(g.color(2, 1), Some(1));
        assert_eq!(g.add_edge(1, 2, 1), Err(Error::DuplicateEdge(1, 2)));
        assert_eq!(g.add_edge(2, 1, 1), Err(Error::DuplicateEdge(2, 1)));
        assert_eq!(g.add_edge(1, 1, 1), Err(Error::Loop(1)));
        assert_eq!(g.add_edge(1, 7, 1), Err(Error::UnknownVertex(7)));
        assert_eq!(g.add_edge(0, 1, 0), Err(Error::InvalidColor { color: 0, k: 1 }));
        assert_eq!(g.add_edge(0, 1, 2), Err(Error::InvalidColor { color: 2, k: 1 }));
        assert!(consistent(&g));
    }

    #[test]
    fn triangle_and_removal() {
        let mut g = triangle();
        assert_eq!(g.edge_count(), 3);
        assert_eq!(g.remove_edge(1, 2), Ok(1));
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.remove_edge(1, 2), Err(Error::MissingEdge(1, 2)));
        g.add_edge(2, 1, 2).unwrap();
        let mut expect = triangle();
        expect.recolor_edge(1, 2, 2).unwrap();
        assert_eq!(g, expect);
        assert!(consistent(&g));
    }

    #[test]
    fn add_then_remove_restores() {
        let before = triangle();
        let mut g = before.clone();
        g.add_edge(0, 1, 2).unwrap();
        g.remove_edge(0, 1).unwrap();
        assert_eq!(g, before);
    }

    #[test]
    fn degeneracy_examples() {
        assert_eq!(ColoredGraph::new(1).degeneracy(), 0);
        assert_eq!(triangle().degeneracy(), 2);
        let mut star = ColoredGraph::with_vertices(1, 6);
        for leaf in 1..6 {
            star.add_edge(0, leaf, 1).unwrap();
        }
        assert_eq!(star.degeneracy(), 1);
        let mut k4 = ColoredGraph::with_vertices(1, 4);
        for a in 0..4 {
            for b in a + 1..4 {
                k4.add_edge(a, b, 1).unwrap();
            }
        }
        assert_eq!(k4.degeneracy(), 3);
    }

    #[test]
    fn vertex_ids_recycle() {
        let mut g = ColoredGraph::with_vertices(1, 3);
        g.remove_vertex(1).unwrap();
        assert!(!g.contains_vertex(1));
        assert_eq!(g.add_vertex(), 1);
        assert_eq!(g.add_vertex(), 3);
        g.insert_vertex(6).unwrap();
        assert_eq!(g.add_vertex(), 4);
        assert_eq!(g.insert_vertex(6), Err(Error::DuplicateVertex(6)));
        g.add_edge(0, 6, 1).unwrap();
        assert_eq!(g.remove_vertex(6), Err(Error::NotIsolated(6)));
    }

    #[test]
    fn digraph_rejects_antiparallel() {
        let mut d = ColoredDigraph::new();
        d.insert_arc(0, 1, 0).unwrap();
        assert!(d.insert_arc(1, 0, 1).is_err());
        assert!(d.remove_arc(0, 1, 1).is_err());
        d.remove_arc(0, 1, 0).unwrap();
        assert_eq!(d.arc_count(), 0);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn arb_graph() -> impl Strategy<Value = ColoredGraph> {
            (1usize..14).prop_flat_map(|n| {
                proptest::collection::vec((0..n as u32, 0..n as u32, 1u8..3), 0..40).prop_map(
                    move |es| {
                        let mut g = ColoredGraph::with_vertices(2, n);
                        for (u, v, c) in es {
                            let _ = g.add_edge(u, v, c);
                        }
                        g
                    },
                )
            })
        }

        proptest! {
            #[test]
            fn degeneracy_bounds(g in arb_graph()) {
                let d = g.degeneracy();
                let lower = g.edge_count().div_ceil(g.vertex_count());
                prop_assert!(d >= lower);
                prop_assert!(d <= g.max_degree());
                prop_assert!(consistent(&g));
            }
        }
    }
}
