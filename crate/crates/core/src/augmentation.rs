//! The h-th augmentation of the host graph, kept as a cascade of bounded
//! in-degree orientations.
//!
//! Level 0 orients the host edges. Level `i >= 1` holds exactly the fork
//! pairs of the union of levels `0..i`: distinct, non-adjacent vertices with a
//! common out-neighbor. For every level the number of such common
//! out-neighbors is kept per pair, so a change of one arc only touches pairs
//! formed with the other in-neighbors of its head.
//!
//! An update is processed level by level; once the cascade is consistent
//! again the net difference of the union digraph is returned as a batch of
//! [`DirectedChange`]s, deletions first.

use rustc_hash::{FxHashMap, FxHashSet};

use crate::graph::{pair, Color, ColoredDigraph, ColoredGraph, VertexId};
use crate::orientation::{BoundedOrientation, OrientationEvent};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ChangeKind {
    Delete,
    Insert,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DirectedChange {
    pub kind: ChangeKind,
    pub tail: VertexId,
    pub head: VertexId,
    pub color: Color,
}

impl DirectedChange {
    pub fn insert(tail: VertexId, head: VertexId, color: Color) -> Self {
        Self {
            kind: ChangeKind::Insert,
            tail,
            head,
            color,
        }
    }

    pub fn delete(tail: VertexId, head: VertexId, color: Color) -> Self {
        Self {
            kind: ChangeKind::Delete,
            tail,
            head,
            color,
        }
    }

    /// Applies the change to a digraph.
    pub fn apply_to(&self, d: &mut ColoredDigraph) -> Result<()> {
        match self.kind {
            ChangeKind::Insert => d.insert_arc(self.tail, self.head, self.color),
            ChangeKind::Delete => d.remove_arc(self.tail, self.head, self.color),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HostOp {
    Insert { u: VertexId, v: VertexId, color: Color },
    Delete { u: VertexId, v: VertexId },
    Recolor { u: VertexId, v: VertexId, color: Color },
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct AugmentationStats {
    /// Witness counter increments and decrements.
    pub fork_deltas: u64,
    /// Directed changes emitted to consumers.
    pub changes: u64,
}

type Arc = (VertexId, VertexId, Color);

#[derive(Debug, Clone)]
pub struct AugmentedState {
    levels: Vec<BoundedOrientation>,
    /// Host colors of level-0 edges, by unordered pair.
    colors: FxHashMap<(VertexId, VertexId), Color>,
    /// `witnesses[i - 1][{u, v}]`: common out-neighbors of `u`, `v` in the
    /// union of levels `0..i`. Only non-zero entries are stored.
    witnesses: Vec<FxHashMap<(VertexId, VertexId), u32>>,
    stats: AugmentationStats,
}

/// Per-update scratch: first-seen union state of every touched pair and the
/// arc changes of each level in order.
struct Journal {
    before: FxHashMap<(VertexId, VertexId), Option<Arc>>,
    log: Vec<Vec<(ChangeKind, VertexId, VertexId)>>,
}

impl AugmentedState {
    /// An empty cascade with `h + 1` levels. Level 0 is strict if asked;
    /// higher levels always grow their cap on demand.
    pub fn new(h: usize, cap: usize, strict: bool, seed: u64) -> Self {
        let levels = (0..=h)
            .map(|i| {
                let s = seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(i as u64);
                if i == 0 && strict {
                    BoundedOrientation::strict(cap, s)
                } else {
                    BoundedOrientation::new(cap, s)
                }
            })
            .collect();
        Self {
            levels,
            colors: FxHashMap::default(),
            witnesses: vec![FxHashMap::default(); h],
            stats: AugmentationStats::default(),
        }
    }

    /// Builds the cascade for `g` by inserting its edges one at a time.
    /// The initial cap is four times the degeneracy of `g`, at least 4.
    pub fn init(g: &ColoredGraph, h: usize, strict: bool, seed: u64) -> Result<(Self, Vec<DirectedChange>)> {
        let cap = (4 * g.degeneracy()).max(4);
        let mut state = Self::new(h, cap, strict, seed);
        let mut batch = Vec::new();
        for (u, v, c) in g.edges() {
            batch.extend(state.apply(HostOp::Insert { u, v, color: c })?);
        }
        Ok((state, batch))
    }

    pub fn h(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn level(&self, i: usize) -> Result<&BoundedOrientation> {
        self.levels.get(i).ok_or(Error::LevelOutOfRange(i))
    }

    pub fn caps(&self) -> Vec<usize> {
        self.levels.iter().map(BoundedOrientation::cap).collect()
    }

    pub fn stats(&self) -> AugmentationStats {
        self.stats
    }

    /// Total flips over all levels.
    pub fn flips(&self) -> u64 {
        self.levels.iter().map(|l| l.stats().flips).sum()
    }

    /// Number of common out-neighbors of `u` and `v` in the union of levels
    /// below `level`.
    pub fn fork_witness_count(&self, level: usize, u: VertexId, v: VertexId) -> Result<u32> {
        if level == 0 || level > self.h() {
            return Err(Error::LevelOutOfRange(level));
        }
        Ok(self.witnesses[level - 1].get(&pair(u, v)).copied().unwrap_or(0))
    }

    /// Undirected pairs of level `i`, sorted.
    pub fn level_pairs(&self, i: usize) -> Result<Vec<(VertexId, VertexId)>> {
        let mut v: Vec<_> = self
            .level(i)?
            .arcs()
            .into_iter()
            .map(|(a, b)| pair(a, b))
            .collect();
        v.sort_unstable();
        Ok(v)
    }

    fn arc_color(&self, level: usize, t: VertexId, h: VertexId) -> Color {
        if level == 0 {
            self.colors[&pair(t, h)]
        } else {
            0
        }
    }

    /// Union of levels `0..=upto` as a colored digraph.
    pub fn prefix_digraph(&self, upto: usize) -> ColoredDigraph {
        let mut d = ColoredDigraph::new();
        for (i, level) in self.levels.iter().enumerate().take(upto + 1) {
            for (t, h) in level.arcs() {
                d.insert_arc(t, h, self.arc_color(i, t, h))
                    .expect("levels are disjoint");
            }
        }
        d
    }

    /// The full augmentation.
    pub fn digraph(&self) -> ColoredDigraph {
        self.prefix_digraph(self.h())
    }

    pub fn max_in_degree(&self) -> usize {
        self.digraph().max_in_degree()
    }

    fn union_state(&self, p: (VertexId, VertexId), skip: Option<usize>) -> Option<Arc> {
        self.levels
            .iter()
            .enumerate()
            .filter(|&(i, _)| Some(i) != skip)
            .find_map(|(i, l)| l.arc(p.0, p.1).map(|(t, h)| (t, h, self.arc_color(i, t, h))))
    }

    fn adjacent_below(&self, level: usize, p: (VertexId, VertexId)) -> bool {
        self.levels[..level].iter().any(|l| l.contains(p.0, p.1))
    }

    /// Records the orientation events of `level` in the journal, snapshotting
    /// the union state of each pair the first time it is touched.
    fn record(&self, level: usize, events: &[OrientationEvent], j: &mut Journal) {
        for &e in events {
            let (t, h) = match e {
                OrientationEvent::Added { tail, head }
                | OrientationEvent::Removed { tail, head }
                | OrientationEvent::Flipped { tail, head } => (tail, head),
            };
            let p = pair(t, h);
            // Other levels are untouched for `p` at this point.
            j.before.entry(p).or_insert_with(|| match e {
                OrientationEvent::Added { .. } => self.union_state(p, Some(level)),
                // Colors of level-0 pairs are still in place when recorded.
                _ => Some((t, h, self.arc_color_lenient(level, t, h))),
            });
            let log = &mut j.log[level];
            match e {
                OrientationEvent::Added { .. } => log.push((ChangeKind::Insert, t, h)),
                OrientationEvent::Removed { .. } => log.push((ChangeKind::Delete, t, h)),
                OrientationEvent::Flipped { .. } => {
                    log.push((ChangeKind::Delete, t, h));
                    log.push((ChangeKind::Insert, h, t));
                }
            }
        }
    }

    fn arc_color_lenient(&self, level: usize, t: VertexId, h: VertexId) -> Color {
        if level == 0 {
            self.colors.get(&pair(t, h)).copied().unwrap_or(0)
        } else {
            0
        }
    }

    /// Applies a host-edge update and returns the resulting changes of the
    /// augmentation. Validity against the host graph is the caller's job;
    /// the orientation layer still rejects duplicates and missing edges.
    pub fn apply(&mut self, op: HostOp) -> Result<Vec<DirectedChange>> {
        let h = self.h();
        let mut j = Journal {
            before: FxHashMap::default(),
            log: vec![Vec::new(); h + 1],
        };
        match op {
            HostOp::Insert { u, v, color } => {
                let events = self.levels[0].insert(u, v).map_err(|e| match e {
                    Error::CapInfeasible { cap, .. } => Error::CapInfeasible { level: 0, cap },
                    other => other,
                })?;
                self.colors.insert(pair(u, v), color);
                self.record(0, &events, &mut j);
            }
            HostOp::Delete { u, v } => {
                if !self.levels[0].contains(u, v) {
                    return Err(Error::MissingEdge(u, v));
                }
                let e = self.levels[0].delete(u, v)?;
                self.record(0, &[e], &mut j);
                self.colors.remove(&pair(u, v));
            }
            HostOp::Recolor { u, v, color } => {
                let (t, hd) = self.levels[0].arc(u, v).ok_or(Error::MissingEdge(u, v))?;
                let p = pair(u, v);
                let old = self.colors.insert(p, color).expect("level-0 color");
                j.before.insert(p, Some((t, hd, old)));
            }
        }
        for level in 1..=h {
            self.propagate(level, &mut j)?;
        }
        let batch = self.diff(&j);
        self.stats.changes += batch.len() as u64;
        Ok(batch)
    }

    /// Brings level `level` in line with the forks of the (already updated)
    /// levels below it.
    fn propagate(&mut self, level: usize, j: &mut Journal) -> Result<()> {
        // Net arc changes of the union below `level`.
        let mut net: FxHashMap<(VertexId, VertexId), i32> = FxHashMap::default();
        let mut candidates: FxHashSet<(VertexId, VertexId)> = FxHashSet::default();
        for log in &j.log[..level] {
            for &(kind, t, hd) in log {
                *net.entry((t, hd)).or_default() += match kind {
                    ChangeKind::Insert => 1,
                    ChangeKind::Delete => -1,
                };
                candidates.insert(pair(t, hd));
            }
        }
        let mut by_head: FxHashMap<VertexId, (Vec<VertexId>, Vec<VertexId>)> = FxHashMap::default();
        for (&(t, hd), &d) in &net {
            debug_assert!((-1..=1).contains(&d));
            match d {
                1 => by_head.entry(hd).or_default().1.push(t),
                -1 => by_head.entry(hd).or_default().0.push(t),
                _ => {}
            }
        }
        let mut heads: Vec<_> = by_head.into_iter().collect();
        heads.sort_unstable_by_key(|&(hd, _)| hd);
        let counters = &mut self.witnesses[level - 1];
        let mut deltas = 0u64;
        for (hd, (removed, added)) in heads {
            let new_in: Vec<VertexId> = self.levels[..level]
                .iter()
                .flat_map(|l| l.in_neighbors(hd).iter().copied())
                .collect();
            let mut old_in: Vec<VertexId> = new_in
                .iter()
                .copied()
                .filter(|t| !added.contains(t))
                .collect();
            old_in.extend_from_slice(&removed);
            for &r in &removed {
                for &t in &old_in {
                    if t == r || (removed.contains(&t) && t < r) {
                        continue;
                    }
                    let p = pair(r, t);
                    let slot = counters.get_mut(&p).expect("witness counted");
                    *slot -= 1;
                    if *slot == 0 {
                        counters.remove(&p);
                    }
                    candidates.insert(p);
                    deltas += 1;
                }
            }
            for &a in &added {
                for &t in &new_in {
                    if t == a || (added.contains(&t) && t < a) {
                        continue;
                    }
                    let p = pair(a, t);
                    *counters.entry(p).or_default() += 1;
                    candidates.insert(p);
                    deltas += 1;
                }
            }
        }
        self.stats.fork_deltas += deltas;

        let mut candidates: Vec<_> = candidates.into_iter().collect();
        candidates.sort_unstable();
        let mut to_delete = Vec::new();
        let mut to_insert = Vec::new();
        for p in candidates {
            let forked = self.witnesses[level - 1].contains_key(&p) && !self.adjacent_below(level, p);
            let present = self.levels[level].contains(p.0, p.1);
            if present && !forked {
                to_delete.push(p);
            } else if forked && !present {
                to_insert.push(p);
            }
        }
        for (u, v) in to_delete {
            let e = self.levels[level].delete(u, v)?;
            self.record(level, &[e], j);
        }
        for (u, v) in to_insert {
            let events = self.levels[level].insert(u, v)?;
            self.record(level, &events, j);
        }
        Ok(())
    }

    fn diff(&self, j: &Journal) -> Vec<DirectedChange> {
        let mut touched: Vec<_> = j.before.iter().collect();
        touched.sort_unstable_by_key(|(p, _)| **p);
        let mut deletes = Vec::new();
        let mut inserts = Vec::new();
        for (&p, &old) in touched {
            let new = self.union_state(p, None);
            debug_assert!(
                self.levels.iter().filter(|l| l.contains(p.0, p.1)).count() <= 1,
                "levels overlap on {p:?}"
            );
            if old == new {
                continue;
            }
            if let Some((t, h, c)) = old {
                deletes.push(DirectedChange::delete(t, h, c));
            }
            if let Some((t, h, c)) = new {
                inserts.push(DirectedChange::insert(t, h, c));
            }
        }
        deletes.extend(inserts);
        deletes
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::forks_bf;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Checks every structural invariant against from-scratch recomputation.
    fn validate(s: &AugmentedState) {
        for (i, l) in s.levels.iter().enumerate() {
            assert!(l.max_in_degree() <= l.cap(), "level {i} over cap");
        }
        let d = s.digraph();
        for (t, h, c) in d.arcs() {
            if s.levels[0].contains(t, h) {
                assert!(c >= 1);
            } else {
                assert_eq!(c, 0);
            }
        }
        for i in 1..=s.h() {
            let below = s.prefix_digraph(i - 1);
            let forks: Vec<_> = forks_bf(&below).into_iter().collect();
            assert_eq!(s.level_pairs(i).unwrap(), forks, "level {i} differs from forks");
            for (&(u, v), &c) in &s.witnesses[i - 1] {
                let common = below
                    .out_arcs(u)
                    .iter()
                    .filter(|&&(w, _)| below.arc_color(v, w).is_some())
                    .count() as u32;
                assert_eq!(c, common);
            }
        }
        let caps: usize = s.caps().iter().sum();
        assert!(d.max_in_degree() <= caps);
    }

    #[test]
    fn empty_init() {
        let g = ColoredGraph::with_vertices(1, 5);
        let (s, batch) = AugmentedState::init(&g, 1, false, 0).unwrap();
        assert!(batch.is_empty());
        assert_eq!(s.digraph().arc_count(), 0);
    }

    #[test]
    fn fork_of_a_path() {
        let mut hits = 0;
        for seed in 0..64 {
            let mut g = ColoredGraph::with_vertices(1, 4);
            g.add_edge(0, 2, 1).unwrap();
            g.add_edge(1, 3, 1).unwrap();
            g.add_edge(2, 3, 1).unwrap();
            let (s, batch) = AugmentedState::init(&g, 1, false, seed).unwrap();
            validate(&s);
            let mut replay = ColoredDigraph::new();
            for c in &batch {
                c.apply_to(&mut replay).unwrap();
            }
            assert_eq!(replay, s.digraph());
            let oriented_into_3 = s.levels[0].arc(1, 3) == Some((1, 3)) && s.levels[0].arc(2, 3) == Some((2, 3));
            if oriented_into_3 {
                hits += 1;
                assert!(s.level_pairs(1).unwrap().contains(&(1, 2)));
                assert_eq!(s.fork_witness_count(1, 1, 2), Ok(1));
                assert_eq!(s.digraph().arc_color(1, 2).or(s.digraph().arc_color(2, 1)), Some(0));
            }
        }
        assert!(hits > 0);
    }

    #[test]
    fn triangle_has_no_forks() {
        for seed in 0..16 {
            let mut g = ColoredGraph::with_vertices(1, 3);
            g.add_edge(0, 1, 1).unwrap();
            g.add_edge(1, 2, 1).unwrap();
            g.add_edge(0, 2, 1).unwrap();
            let (s, _) = AugmentedState::init(&g, 1, false, seed).unwrap();
            assert!(s.level_pairs(1).unwrap().is_empty());
        }
    }

    /// A state whose level 0 is exactly 1 -> 3, 0 -> 2 and 2 -> 3, so the
    /// only fork is {1, 2}. The arc into 2 makes the last insertion a tie.
    fn forked_state() -> AugmentedState {
        for seed in 0..256 {
            let mut s = AugmentedState::new(1, 4, false, seed);
            s.apply(HostOp::Insert { u: 1, v: 3, color: 1 }).unwrap();
            s.apply(HostOp::Insert { u: 0, v: 2, color: 1 }).unwrap();
            s.apply(HostOp::Insert { u: 2, v: 3, color: 1 }).unwrap();
            let l0 = &s.levels[0];
            if l0.arc(1, 3) == Some((1, 3)) && l0.arc(0, 2) == Some((0, 2)) && l0.arc(2, 3) == Some((2, 3)) {
                return s;
            }
        }
        panic!("no seed gives the forked orientation")
    }

    #[test]
    fn witness_counts_follow_deletions() {
        let mut s = forked_state();
        assert_eq!(s.fork_witness_count(1, 1, 2), Ok(1));
        assert_eq!(s.fork_witness_count(1, 1, 3), Ok(0));
        assert_eq!(s.fork_witness_count(0, 1, 2), Err(Error::LevelOutOfRange(0)));
        assert_eq!(s.fork_witness_count(2, 1, 2), Err(Error::LevelOutOfRange(2)));
        let batch = s.apply(HostOp::Delete { u: 2, v: 3 }).unwrap();
        assert_eq!(s.fork_witness_count(1, 1, 2), Ok(0));
        assert!(s.level_pairs(1).unwrap().is_empty());
        assert_eq!(batch.len(), 2);
        assert!(batch.iter().all(|c| c.kind == ChangeKind::Delete));
        validate(&s);
    }

    #[test]
    fn inserting_second_in_edge_creates_fork() {
        for seed in 0..32 {
            let mut s = AugmentedState::new(1, 4, false, seed);
            s.apply(HostOp::Insert { u: 1, v: 3, color: 1 }).unwrap();
            if s.levels[0].arc(1, 3) != Some((1, 3)) {
                continue;
            }
            let batch = s.apply(HostOp::Insert { u: 2, v: 3, color: 1 }).unwrap();
            if s.levels[0].arc(2, 3) == Some((2, 3)) {
                let zero: Vec<_> = batch.iter().filter(|c| c.color == 0).collect();
                assert_eq!(zero.len(), 1);
                assert_eq!(zero[0].kind, ChangeKind::Insert);
                assert_eq!(pair(zero[0].tail, zero[0].head), (1, 2));
            }
            validate(&s);
        }
    }

    #[test]
    fn host_edge_on_fork_pair_migrates() {
        let mut s = forked_state();
        let (t, h) = s.levels[1].arc(1, 2).unwrap();
        let batch = s.apply(HostOp::Insert { u: 1, v: 2, color: 1 }).unwrap();
        assert!(batch.contains(&DirectedChange::delete(t, h, 0)));
        let new = s.levels[0].arc(1, 2).unwrap();
        assert!(batch.contains(&DirectedChange::insert(new.0, new.1, 1)));
        assert!(s.level_pairs(1).unwrap().is_empty());
        validate(&s);
    }

    #[test]
    fn recolor_touches_only_that_edge() {
        let mut s = forked_state();
        let fork_before = s.level_pairs(1).unwrap();
        let (t, h) = s.levels[0].arc(1, 3).unwrap();
        let batch = s.apply(HostOp::Recolor { u: 1, v: 3, color: 2 }).unwrap();
        assert_eq!(batch, vec![DirectedChange::delete(t, h, 1), DirectedChange::insert(t, h, 2)]);
        assert_eq!(s.level_pairs(1).unwrap(), fork_before);
    }

    #[test]
    fn random_updates_match_recomputation() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for round in 0..12u64 {
            let n = rng.gen_range(6..24u32);
            let h = rng.gen_range(1..4usize);
            let mut s = AugmentedState::new(h, 4, false, round);
            let mut replay = ColoredDigraph::new();
            let mut present: Vec<(u32, u32)> = Vec::new();
            for _ in 0..120 {
                let op = if !present.is_empty() && rng.gen_bool(0.3) {
                    let i = rng.gen_range(0..present.len());
                    let (u, v) = present.swap_remove(i);
                    HostOp::Delete { u, v }
                } else if !present.is_empty() && rng.gen_bool(0.15) {
                    let (u, v) = present[rng.gen_range(0..present.len())];
                    HostOp::Recolor { u, v, color: rng.gen_range(1..3) }
                } else {
                    let u = rng.gen_range(0..n);
                    let v = rng.gen_range(0..n);
                    if u == v || present.contains(&pair(u, v)) || present.len() >= 2 * n as usize {
                        continue;
                    }
                    present.push(pair(u, v));
                    HostOp::Insert { u, v, color: rng.gen_range(1..3) }
                };
                for c in s.apply(op).unwrap() {
                    c.apply_to(&mut replay).unwrap();
                }
                validate(&s);
                assert_eq!(replay, s.digraph());
            }
        }
    }
}
