//! Orientation of a dynamic undirected graph with bounded in-degree.
//!
//! New edges point at the endpoint with the smaller in-degree. When a vertex
//! exceeds the cap, all of its in-edges are flipped and any tail pushed over
//! the cap is repaired the same way. Deletions never touch other edges.
//! Every change is reported as an [`OrientationEvent`] so that consumers can
//! replay the orientation exactly.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustc_hash::FxHashMap;

use crate::graph::{pair, peel, VertexId};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OrientationEvent {
    Added { tail: VertexId, head: VertexId },
    Removed { tail: VertexId, head: VertexId },
    /// The arc `tail -> head` became `head -> tail`.
    Flipped { tail: VertexId, head: VertexId },
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OrientationStats {
    pub flips: u64,
    pub rebuilds: u64,
}

#[derive(Debug, Clone)]
pub struct BoundedOrientation {
    cap: usize,
    strict: bool,
    out: Vec<Vec<VertexId>>,
    inn: Vec<Vec<VertexId>>,
    /// Unordered pair -> head.
    head: FxHashMap<(VertexId, VertexId), VertexId>,
    rng: ChaCha8Rng,
    stats: OrientationStats,
}

impl BoundedOrientation {
    /// Adaptive structure: a failed repair doubles the cap and rebuilds.
    pub fn new(cap: usize, seed: u64) -> Self {
        Self {
            cap: cap.max(1),
            strict: false,
            out: Vec::new(),
            inn: Vec::new(),
            head: FxHashMap::default(),
            rng: ChaCha8Rng::seed_from_u64(seed),
            stats: OrientationStats::default(),
        }
    }

    /// Strict structure: a failed repair is rolled back and reported.
    pub fn strict(cap: usize, seed: u64) -> Self {
        Self {
            strict: true,
            ..Self::new(cap, seed)
        }
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn stats(&self) -> OrientationStats {
        self.stats
    }

    pub fn edge_count(&self) -> usize {
        self.head.len()
    }

    pub fn contains(&self, u: VertexId, v: VertexId) -> bool {
        self.head.contains_key(&pair(u, v))
    }

    /// The orientation of `{u, v}` as `(tail, head)`.
    pub fn arc(&self, u: VertexId, v: VertexId) -> Option<(VertexId, VertexId)> {
        self.head
            .get(&pair(u, v))
            .map(|&h| if h == v { (u, v) } else { (v, u) })
    }

    pub fn in_neighbors(&self, v: VertexId) -> &[VertexId] {
        self.inn.get(v as usize).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn out_neighbors(&self, v: VertexId) -> &[VertexId] {
        self.out.get(v as usize).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn in_degree(&self, v: VertexId) -> usize {
        self.in_neighbors(v).len()
    }

    pub fn max_in_degree(&self) -> usize {
        self.inn.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// All arcs `(tail, head)`, sorted.
    pub fn arcs(&self) -> Vec<(VertexId, VertexId)> {
        let mut v: Vec<_> = self
            .head
            .iter()
            .map(|(&(a, b), &h)| if h == b { (a, b) } else { (b, a) })
            .collect();
        v.sort_unstable();
        v
    }

    fn grow(&mut self, v: VertexId) {
        let need = v as usize + 1;
        if self.out.len() < need {
            self.out.resize_with(need, Vec::new);
            self.inn.resize_with(need, Vec::new);
        }
    }

    fn link(&mut self, t: VertexId, h: VertexId) {
        self.out[t as usize].push(h);
        self.inn[h as usize].push(t);
        self.head.insert(pair(t, h), h);
    }

    fn unlink(&mut self, t: VertexId, h: VertexId) {
        let o = &mut self.out[t as usize];
        let i = o.iter().position(|&w| w == h).expect("arc in out-list");
        o.swap_remove(i);
        let n = &mut self.inn[h as usize];
        let i = n.iter().position(|&w| w == t).expect("arc in in-list");
        n.swap_remove(i);
        self.head.remove(&pair(t, h));
    }

    fn flip(&mut self, t: VertexId, h: VertexId) {
        self.unlink(t, h);
        self.link(h, t);
        self.stats.flips += 1;
    }

    pub fn insert(&mut self, u: VertexId, v: VertexId) -> Result<Vec<OrientationEvent>> {
        if u == v {
            return Err(Error::Loop(u));
        }
        if self.contains(u, v) {
            return Err(Error::DuplicateEdge(u, v));
        }
        self.grow(u.max(v));
        let (du, dv) = (self.in_degree(u), self.in_degree(v));
        let (t, h) = if du < dv || (du == dv && self.rng.gen::<bool>()) {
            (v, u)
        } else {
            (u, v)
        };
        self.link(t, h);
        let mut events = vec![OrientationEvent::Added { tail: t, head: h }];
        if self.in_degree(h) <= self.cap {
            return Ok(events);
        }
        let budget = self.edge_count();
        let mut flipped: Vec<(VertexId, VertexId)> = Vec::new();
        let mut queue = vec![h];
        let mut ok = true;
        while let Some(w) = queue.pop() {
            if self.in_degree(w) <= self.cap {
                continue;
            }
            if flipped.len() + self.in_degree(w) > budget {
                ok = false;
                break;
            }
            let tails = std::mem::take(&mut self.inn[w as usize]);
            for &x in &tails {
                let o = &mut self.out[x as usize];
                let i = o.iter().position(|&y| y == w).unwrap();
                o.swap_remove(i);
                self.out[w as usize].push(x);
                self.inn[x as usize].push(w);
                self.head.insert(pair(x, w), x);
                self.stats.flips += 1;
                flipped.push((x, w));
                events.push(OrientationEvent::Flipped { tail: x, head: w });
                if self.in_degree(x) > self.cap {
                    queue.push(x);
                }
            }
        }
        if ok {
            return Ok(events);
        }
        if self.strict {
            for &(x, w) in flipped.iter().rev() {
                self.unlink(w, x);
                self.link(x, w);
            }
            self.unlink(t, h);
            return Err(Error::CapInfeasible {
                level: 0,
                cap: self.cap,
            });
        }
        let doubled = self.cap * 2;
        events.extend(self.rebuild(doubled));
        Ok(events)
    }

    pub fn delete(&mut self, u: VertexId, v: VertexId) -> Result<OrientationEvent> {
        let (t, h) = self.arc(u, v).ok_or(Error::MissingEdge(u, v))?;
        self.unlink(t, h);
        Ok(OrientationEvent::Removed { tail: t, head: h })
    }

    /// Raises the cap and re-orients every edge along a min-degree peeling
    /// order, which bounds every in-degree by the degeneracy. The cap becomes
    /// `max(new_cap, degeneracy)`.
    pub fn rebuild(&mut self, new_cap: usize) -> Vec<OrientationEvent> {
        self.stats.rebuilds += 1;
        let adj: Vec<Vec<VertexId>> = (0..self.out.len())
            .map(|v| {
                let mut l = self.out[v].clone();
                l.extend_from_slice(&self.inn[v]);
                l
            })
            .collect();
        let (degeneracy, order) = peel(&adj);
        self.cap = new_cap.max(degeneracy).max(self.cap);
        let mut rank = vec![0usize; adj.len()];
        for (i, &v) in order.iter().enumerate() {
            rank[v as usize] = i;
        }
        // Each edge points at the endpoint peeled first.
        let mut events = Vec::new();
        for (t, h) in self.arcs() {
            if rank[t as usize] < rank[h as usize] {
                self.flip(t, h);
                events.push(OrientationEvent::Flipped { tail: t, head: h });
            }
        }
        events
    }
}
