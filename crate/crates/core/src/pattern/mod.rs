//! Small patterns and their compilation into homomorphism-counting plans.
//!
//! [`Pattern`] is an undirected edge-colored graph on at most [`MAX_VERTICES`]
//! vertices; [`SmallDigraph`] is its directed counterpart with colors
//! `{0..k}`. Both are plain adjacency matrices so that equality, hashing and
//! canonical forms are cheap.

mod augment;
mod expand;
mod plan;
mod vineyard;

use std::sync::OnceLock;

use crate::graph::{Color, ColoredGraph};
use crate::{Error, Result};

pub use augment::{
    augmentations, augmented_members, augmented_members_naive, enumerate_augmented_set, rounds_for, AugmentedSet, Member,
};
pub use expand::{enumerate_projections_with_alpha, enumerate_supergraphs, mobius_closed_form, valid_partitions};
pub use plan::{
    CompileOptions, Compiler, ComponentKind, ComponentPlan, EngineId, PlanKind, QueryPlan, Term,
};
pub use vineyard::{build_vineyard, enumerate_clans, Clan, EnginePlan, Skeleton, Step, Vineyard};

/// Hard upper bound on pattern size imposed by the fixed-size matrices.
pub const MAX_VERTICES: usize = 8;

/// Vertex subset of a small pattern.
pub type Mask = u8;

pub(crate) fn bits(m: Mask) -> impl DoubleEndedIterator<Item = usize> {
    (0..MAX_VERTICES).filter(move |&i| m >> i & 1 == 1)
}

pub(crate) fn full_mask(n: usize) -> Mask {
    ((1u16 << n) - 1) as Mask
}

/// All permutations of `0..n`, computed once per `n`.
pub(crate) fn permutations(n: usize) -> &'static [[u8; MAX_VERTICES]] {
    static CACHE: [OnceLock<Vec<[u8; MAX_VERTICES]>>; MAX_VERTICES + 1] =
        [const { OnceLock::new() }; MAX_VERTICES + 1];
    CACHE[n].get_or_init(|| {
        let mut out = Vec::new();
        let mut cur = [0u8; MAX_VERTICES];
        let mut used = [false; MAX_VERTICES];
        fn rec(i: usize, n: usize, cur: &mut [u8; MAX_VERTICES], used: &mut [bool; MAX_VERTICES], out: &mut Vec<[u8; MAX_VERTICES]>) {
            if i == n {
                out.push(*cur);
                return;
            }
            for v in 0..n {
                if !used[v] {
                    used[v] = true;
                    cur[i] = v as u8;
                    rec(i + 1, n, cur, used, out);
                    used[v] = false;
                }
            }
        }
        rec(0, n, &mut cur, &mut used, &mut out);
        out
    })
}

/// All set partitions of `0..n` as lists of block masks, each block list
/// ordered by smallest element.
pub(crate) fn set_partitions(n: usize) -> &'static [Vec<Mask>] {
    static CACHE: [OnceLock<Vec<Vec<Mask>>>; MAX_VERTICES + 1] =
        [const { OnceLock::new() }; MAX_VERTICES + 1];
    CACHE[n].get_or_init(|| {
        let mut out = Vec::new();
        let mut blocks: Vec<Mask> = Vec::new();
        fn rec(i: usize, n: usize, blocks: &mut Vec<Mask>, out: &mut Vec<Vec<Mask>>) {
            if i == n {
                out.push(blocks.clone());
                return;
            }
            for b in 0..blocks.len() {
                blocks[b] |= 1 << i;
                rec(i + 1, n, blocks, out);
                blocks[b] &= !(1 << i);
            }
            blocks.push(1 << i);
            rec(i + 1, n, blocks, out);
            blocks.pop();
        }
        rec(0, n, &mut blocks, &mut out);
        out
    })
}

/// Undirected simple pattern with edge colors `1..=255`; color 0 marks a
/// non-edge.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pattern {
    n: u8,
    adj: [[Color; MAX_VERTICES]; MAX_VERTICES],
}

impl std::fmt::Debug for Pattern {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Pattern({}; {:?})", self.n, self.edges())
    }
}

impl Pattern {
    pub fn empty(n: usize) -> Result<Self> {
        if n > MAX_VERTICES {
            return Err(Error::PatternTooLarge {
                size: n,
                limit: MAX_VERTICES,
            });
        }
        Ok(Self {
            n: n as u8,
            adj: [[0; MAX_VERTICES]; MAX_VERTICES],
        })
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize, Color)]) -> Result<Self> {
        let mut p = Self::empty(n)?;
        for &(u, v, c) in edges {
            if u >= n {
                return Err(Error::UnknownVertex(u as u32));
            }
            if v >= n {
                return Err(Error::UnknownVertex(v as u32));
            }
            if u == v {
                return Err(Error::Loop(u as u32));
            }
            if c == 0 {
                return Err(Error::InvalidColor { color: 0, k: Color::MAX });
            }
            if p.adj[u][v] != 0 {
                return Err(Error::DuplicateEdge(u as u32, v as u32));
            }
            p.adj[u][v] = c;
            p.adj[v][u] = c;
        }
        Ok(p)
    }

    /// Relabels the live vertices of `g` to `0..n` in increasing id order.
    pub fn from_graph(g: &ColoredGraph) -> Result<Self> {
        let ids: Vec<_> = g.vertices().collect();
        let index = |v| ids.binary_search(&v).expect("live vertex");
        let edges: Vec<_> = g
            .edges()
            .into_iter()
            .map(|(u, v, c)| (index(u), index(v), c))
            .collect();
        Self::from_edges(ids.len(), &edges)
    }

    pub fn to_graph(&self, k: Color) -> Result<ColoredGraph> {
        let mut g = ColoredGraph::with_vertices(k, self.n());
        for (u, v, c) in self.edges() {
            g.add_edge(u as u32, v as u32, c)?;
        }
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.n as usize
    }

    pub fn color(&self, u: usize, v: usize) -> Option<Color> {
        match self.adj[u][v] {
            0 => None,
            c => Some(c),
        }
    }

    pub fn max_color(&self) -> Color {
        self.adj.iter().flatten().copied().max().unwrap_or(0)
    }

    /// Edges `(u, v, color)` with `u < v`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize, Color)> {
        let n = self.n();
        (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .filter_map(|(u, v)| self.color(u, v).map(|c| (u, v, c)))
            .collect()
    }

    pub fn non_edges(&self) -> Vec<(usize, usize)> {
        let n = self.n();
        (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .filter(|&(u, v)| self.adj[u][v] == 0)
            .collect()
    }

    pub fn edge_count(&self) -> usize {
        self.edges().len()
    }

    pub(crate) fn with_edge(mut self, u: usize, v: usize, c: Color) -> Self {
        self.adj[u][v] = c;
        self.adj[v][u] = c;
        self
    }

    fn neighbor_mask(&self, v: usize) -> Mask {
        (0..self.n()).filter(|&u| self.adj[v][u] != 0).fold(0, |m, u| m | 1 << u)
    }

    /// Vertex sets of the connected components, ordered by smallest vertex.
    pub fn components(&self) -> Vec<Mask> {
        let mut seen: Mask = 0;
        let mut out = Vec::new();
        for s in 0..self.n() {
            if seen >> s & 1 == 1 {
                continue;
            }
            let mut comp: Mask = 1 << s;
            let mut frontier = comp;
            while frontier != 0 {
                let v = frontier.trailing_zeros() as usize;
                frontier &= frontier - 1;
                let new = self.neighbor_mask(v) & !comp;
                comp |= new;
                frontier |= new;
            }
            seen |= comp;
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    /// The subgraph induced by `mask`, relabeled in increasing order.
    pub fn induced(&self, mask: Mask) -> Self {
        let vs: Vec<usize> = bits(mask).filter(|&v| v < self.n()).collect();
        let mut p = Self::empty(vs.len()).expect("subpattern fits");
        for (i, &a) in vs.iter().enumerate() {
            for (j, &b) in vs.iter().enumerate() {
                p.adj[i][j] = self.adj[a][b];
            }
        }
        p
    }

    /// Identifies the vertices of each block. Callers guarantee that blocks
    /// are independent and that merged edges agree on color.
    pub fn quotient(&self, blocks: &[Mask]) -> Self {
        let mut p = Self::empty(blocks.len()).expect("quotient fits");
        let mut block_of = [0usize; MAX_VERTICES];
        for (i, &b) in blocks.iter().enumerate() {
            for v in bits(b) {
                block_of[v] = i;
            }
        }
        for (u, v, c) in self.edges() {
            let (a, b) = (block_of[u], block_of[v]);
            debug_assert!(a != b && (p.adj[a][b] == 0 || p.adj[a][b] == c));
            p.adj[a][b] = c;
            p.adj[b][a] = c;
        }
        p
    }

    /// Relabels vertex `v` as `perm[v]`.
    pub fn permuted(&self, perm: &[u8]) -> Self {
        let mut p = Self::empty(self.n()).expect("same size");
        for u in 0..self.n() {
            for v in 0..self.n() {
                p.adj[perm[u] as usize][perm[v] as usize] = self.adj[u][v];
            }
        }
        p
    }

    /// Minimum relabeling over all permutations; equal for isomorphic patterns.
    pub fn canonical(&self) -> Self {
        permutations(self.n())
            .iter()
            .map(|perm| self.permuted(perm))
            .min()
            .expect("at least one permutation")
    }

    /// Number of automorphisms (color-preserving).
    pub fn automorphisms(&self) -> usize {
        permutations(self.n())
            .iter()
            .filter(|perm| self.permuted(&perm[..]) == *self)
            .count()
    }

    /// Disjoint union, with `other` relabeled after `self`.
    pub fn disjoint_union(&self, other: &Self) -> Result<Self> {
        let mut p = Self::empty(self.n() + other.n())?;
        let off = self.n();
        for (u, v, c) in self.edges() {
            p = p.with_edge(u, v, c);
        }
        for (u, v, c) in other.edges() {
            p = p.with_edge(u + off, v + off, c);
        }
        Ok(p)
    }
}

/// Small directed pattern with colors `{0..k}`, no loops and no
/// anti-parallel pairs.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SmallDigraph {
    n: u8,
    /// `color + 1`, or 0 for no arc.
    arc: [[u8; MAX_VERTICES]; MAX_VERTICES],
}

impl std::fmt::Debug for SmallDigraph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "SmallDigraph({}; {:?})", self.n, self.arcs())
    }
}

impl SmallDigraph {
    pub fn empty(n: usize) -> Result<Self> {
        if n > MAX_VERTICES {
            return Err(Error::PatternTooLarge {
                size: n,
                limit: MAX_VERTICES,
            });
        }
        Ok(Self {
            n: n as u8,
            arc: [[0; MAX_VERTICES]; MAX_VERTICES],
        })
    }

    pub fn from_arcs(n: usize, arcs: &[(usize, usize, Color)]) -> Result<Self> {
        let mut d = Self::empty(n)?;
        for &(a, b, c) in arcs {
            if a >= n {
                return Err(Error::UnknownVertex(a as u32));
            }
            if b >= n {
                return Err(Error::UnknownVertex(b as u32));
            }
            if a == b {
                return Err(Error::Loop(a as u32));
            }
            if d.adjacent(a, b) {
                return Err(Error::DuplicateEdge(a as u32, b as u32));
            }
            d.set_arc(a, b, c);
        }
        Ok(d)
    }

    pub fn n(&self) -> usize {
        self.n as usize
    }

    pub fn arc(&self, a: usize, b: usize) -> Option<Color> {
        self.arc[a][b].checked_sub(1)
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.arc[a][b] != 0 || self.arc[b][a] != 0
    }

    pub(crate) fn set_arc(&mut self, a: usize, b: usize, c: Color) {
        debug_assert!(self.arc[b][a] == 0);
        self.arc[a][b] = c + 1;
    }

    pub(crate) fn clear_arc(&mut self, a: usize, b: usize) {
        self.arc[a][b] = 0;
    }

    /// Arcs `(tail, head, color)`, sorted.
    pub fn arcs(&self) -> Vec<(usize, usize, Color)> {
        let n = self.n();
        (0..n)
            .flat_map(|a| (0..n).map(move |b| (a, b)))
            .filter_map(|(a, b)| self.arc(a, b).map(|c| (a, b, c)))
            .collect()
    }

    pub fn arc_count(&self) -> usize {
        self.arc.iter().flatten().filter(|&&x| x != 0).count()
    }

    pub fn colors(&self) -> Vec<Color> {
        let mut cs: Vec<Color> = self.arcs().into_iter().map(|(_, _, c)| c).collect();
        cs.sort_unstable();
        cs.dedup();
        cs
    }

    pub fn out_mask(&self, a: usize) -> Mask {
        (0..self.n()).filter(|&b| self.arc[a][b] != 0).fold(0, |m, b| m | 1 << b)
    }

    pub fn in_mask(&self, b: usize) -> Mask {
        (0..self.n()).filter(|&a| self.arc[a][b] != 0).fold(0, |m, a| m | 1 << a)
    }

    /// Unordered pairs `(a, b)`, `a < b`, that are non-adjacent and share an
    /// out-neighbor.
    pub fn forks(&self) -> Vec<(usize, usize)> {
        let n = self.n();
        let mut out = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                if !self.adjacent(a, b) && self.out_mask(a) & self.out_mask(b) != 0 {
                    out.push((a, b));
                }
            }
        }
        out
    }

    pub fn is_elder(&self) -> bool {
        self.forks().is_empty()
    }

    /// Underlying undirected connectivity of the subgraph induced by `mask`.
    pub fn is_connected_on(&self, mask: Mask) -> bool {
        if mask == 0 {
            return true;
        }
        let mut comp: Mask = 1 << mask.trailing_zeros();
        let mut frontier = comp;
        while frontier != 0 {
            let v = frontier.trailing_zeros() as usize;
            frontier &= frontier - 1;
            let new = (self.out_mask(v) | self.in_mask(v)) & mask & !comp;
            comp |= new;
            frontier |= new;
        }
        comp == mask
    }

    pub fn is_connected(&self) -> bool {
        self.is_connected_on(full_mask(self.n()))
    }

    pub fn permuted(&self, perm: &[u8]) -> Self {
        let mut d = *self;
        for a in 0..self.n() {
            for b in 0..self.n() {
                d.arc[perm[a] as usize][perm[b] as usize] = self.arc[a][b];
            }
        }
        d
    }

    /// Minimum relabeling over all permutations.
    pub fn canonical(&self) -> Self {
        permutations(self.n())
            .iter()
            .map(|perm| self.permuted(perm))
            .min()
            .expect("at least one permutation")
    }
}
