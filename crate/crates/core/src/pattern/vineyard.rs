//! Vineyards, clans and the per-color update skeletons of the counting
//! engine.
//!
//! A vineyard pairs a connected elder digraph with an outbranching `T` inside
//! it such that the endpoints of every arc lie on a common directed `T`-path.
//! Clans are out-closed vertex sets spanned by a subtree of `T`; the engine
//! keeps one count table per clan.

use super::{bits, full_mask, Mask, SmallDigraph, MAX_VERTICES};
use crate::graph::Color;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vineyard {
    pub graph: SmallDigraph,
    pub root: usize,
    /// `T`-parent of every vertex; `None` only for the root.
    pub parent: [Option<u8>; MAX_VERTICES],
}

impl Vineyard {
    /// Number of `T`-arcs above `v`; stops at `n` if the parents cycle.
    pub fn depth(&self, mut v: usize) -> usize {
        let mut d = 0;
        while let Some(p) = self.parent[v] {
            if d == self.graph.n() {
                break;
            }
            v = p as usize;
            d += 1;
        }
        d
    }

    /// Whether `a` lies on the `T`-path from the root to `b` (inclusive).
    pub fn is_ancestor(&self, a: usize, mut b: usize) -> bool {
        for _ in 0..=self.graph.n() {
            if a == b {
                return true;
            }
            match self.parent[b] {
                Some(p) => b = p as usize,
                None => return false,
            }
        }
        false
    }

    /// The `T`-arcs `(parent, child)`.
    pub fn tree_arcs(&self) -> Vec<(usize, usize)> {
        (0..self.graph.n())
            .filter_map(|v| self.parent[v].map(|p| (p as usize, v)))
            .collect()
    }

    /// `T` is an outbranching inside the graph, and every arc joins a vertex
    /// to one of its `T`-ancestors or descendants.
    pub fn validate(&self) -> Result<()> {
        let n = self.graph.n();
        let fail = |what: &str| Err(Error::CompileInvariant(format!("{what} in {:?}", self.graph)));
        if self.parent[self.root].is_some() {
            return fail("root has a parent");
        }
        for v in 0..n {
            if v != self.root && self.parent[v].is_none() {
                return fail("second root");
            }
            if self.depth(v) >= n {
                return fail("cycle in tree");
            }
        }
        for (p, c) in self.tree_arcs() {
            if self.graph.arc(p, c).is_none() {
                return fail("tree arc missing from graph");
            }
        }
        for (a, b, _) in self.graph.arcs() {
            if !self.is_ancestor(a, b) && !self.is_ancestor(b, a) {
                return fail("arc off every tree path");
            }
        }
        Ok(())
    }
}

/// Builds an outbranching by the non-cutvertex recursion: split off a
/// vertex `v` whose removal keeps the graph connected, solve the rest, then
/// hang `v` either above the old root or below its deepest in-neighbor,
/// moving the subtrees off that root path that touch `v` underneath it.
pub fn build_vineyard(g: &SmallDigraph) -> Result<Vineyard> {
    if !g.is_elder() {
        return Err(Error::NotElder);
    }
    if g.n() == 0 || !g.is_connected() {
        return Err(Error::NotConnected);
    }
    let mut parent = [None; MAX_VERTICES];
    let root = build_on(g, full_mask(g.n()), &mut parent)?;
    let vy = Vineyard {
        graph: *g,
        root,
        parent,
    };
    vy.validate()?;
    Ok(vy)
}

fn build_on(g: &SmallDigraph, mask: Mask, parent: &mut [Option<u8>; MAX_VERTICES]) -> Result<usize> {
    if mask.count_ones() == 1 {
        let v = mask.trailing_zeros() as usize;
        parent[v] = None;
        return Ok(v);
    }
    let v = bits(mask)
        .rev()
        .find(|&v| g.is_connected_on(mask & !(1 << v)))
        .expect("a connected graph has a non-cutvertex");
    let rest = mask & !(1 << v);
    let r = build_on(g, rest, parent)?;
    if g.arc(v, r).is_some() {
        parent[r] = Some(v as u8);
        parent[v] = None;
        return Ok(v);
    }
    let depth = |mut u: usize, parent: &[Option<u8>; MAX_VERTICES]| {
        let mut d = 0;
        while let Some(p) = parent[u] {
            u = p as usize;
            d += 1;
        }
        d
    };
    let ins = g.in_mask(v) & rest;
    let z = bits(ins)
        .max_by_key(|&u| depth(u, parent))
        .ok_or_else(|| Error::CompileInvariant("vertex without in-neighbor below the root".into()))?;
    let mut q: Mask = 0;
    let mut u = z;
    loop {
        q |= 1 << u;
        match parent[u] {
            Some(p) => u = p as usize,
            None => break,
        }
    }
    if ins & !q != 0 {
        return Err(Error::CompileInvariant("in-neighbors off the root path".into()));
    }
    let nbrs = (g.in_mask(v) | g.out_mask(v)) & rest;
    // Roots of the components of T' - Q are the vertices whose parent is on Q.
    let subtree_roots: Vec<usize> = bits(rest & !q)
        .filter(|&s| parent[s].is_some_and(|p| q >> p & 1 == 1))
        .collect();
    for s in subtree_roots {
        let sub: Mask = bits(rest).filter(|&w| is_below(parent, s, w)).fold(0, |m, w| m | 1 << w);
        if sub & nbrs != 0 {
            parent[s] = Some(v as u8);
        }
    }
    parent[v] = Some(z as u8);
    Ok(r)
}

fn is_below(parent: &[Option<u8>; MAX_VERTICES], a: usize, mut b: usize) -> bool {
    loop {
        if a == b {
            return true;
        }
        match parent[b] {
            Some(p) => b = p as usize,
            None => return false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Clan {
    pub mask: Mask,
    pub root: usize,
    /// In-neighbors outside the clan, by increasing `T`-distance from the root.
    pub ghosts: Vec<usize>,
    /// Arcs of the extended clan: every arc with its head in the clan.
    pub star_arcs: Vec<(usize, usize, Color)>,
}

impl Clan {
    pub fn size(&self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn star_mask(&self) -> Mask {
        self.ghosts.iter().fold(self.mask, |m, &g| m | 1 << g)
    }
}

/// All clans of a vineyard, ordered by size and then mask; the full vertex
/// set comes last. The ghost structure is checked for each clan.
pub fn enumerate_clans(vy: &Vineyard) -> Result<Vec<Clan>> {
    let g = &vy.graph;
    let n = g.n();
    let mut out = Vec::new();
    for mask in 1..=full_mask(n) {
        let out_closed = bits(mask).all(|v| g.out_mask(v) & !mask == 0);
        if !out_closed {
            continue;
        }
        let tops: Vec<usize> = bits(mask)
            .filter(|&v| vy.parent[v].is_none_or(|p| mask >> p & 1 == 0))
            .collect();
        if tops.len() != 1 {
            continue;
        }
        let root = tops[0];
        let ghost_mask = bits(mask).fold(0, |m, v| m | g.in_mask(v)) & !mask;
        let check = |ok: bool, what: &str| {
            if ok {
                Ok(())
            } else {
                Err(Error::CompileInvariant(format!("clan {mask:#b}: {what}")))
            }
        };
        check(ghost_mask == g.in_mask(root) & !mask, "ghost not adjacent to the clan root")?;
        check(
            bits(ghost_mask).all(|w| vy.is_ancestor(w, root)),
            "ghost off the root path",
        )?;
        let mut ghosts: Vec<usize> = bits(ghost_mask).collect();
        ghosts.sort_by_key(|&w| std::cmp::Reverse(vy.depth(w)));
        if mask != full_mask(n) {
            check(
                ghosts.first().map(|&w| w as u8) == vy.parent[root],
                "first ghost is not the tree parent of the root",
            )?;
        }
        let star_arcs = g.arcs().into_iter().filter(|&(_, b, _)| mask >> b & 1 == 1).collect();
        out.push(Clan {
            mask,
            root,
            ghosts,
            star_arcs,
        });
    }
    out.sort_by_key(|c| (c.size(), c.mask));
    Ok(out)
}

/// One backtracking step: bind `vertex` to a tail of an arc of color
/// `anchor_color` entering the image of `anchor`, then verify `checks`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Step {
    pub vertex: u8,
    pub anchor: u8,
    pub anchor_color: Color,
    pub anchor_in_x: bool,
    /// Arcs `(tail, head, color, in_x)` between `vertex` and earlier
    /// vertices, other than the anchor arc.
    pub checks: Vec<(u8, u8, Color, bool)>,
}

/// Partial homomorphisms of the extended clan restricted to `M` that send
/// exactly the arcs of `X` onto the changed arc.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Skeleton {
    pub clan: usize,
    pub tails: Mask,
    pub heads: Mask,
    pub m: Mask,
    pub steps: Vec<Step>,
    /// `(clan index, ghost vertices in order)` for the components of the
    /// extended clan outside `M`.
    pub children: Vec<(usize, Vec<u8>)>,
}

/// Everything an engine needs for one pattern class.
#[derive(Debug, Clone)]
pub struct EnginePlan {
    pub vineyard: Vineyard,
    /// Clans the engine maintains, by increasing size; the full clan is last.
    pub clans: Vec<Clan>,
    /// `skeletons[clan][color]`.
    pub skeletons: Vec<Vec<Vec<Skeleton>>>,
    /// Colors that occur on at least one arc.
    pub colors: Vec<Color>,
}

impl EnginePlan {
    pub fn new(graph: &SmallDigraph) -> Result<Self> {
        let vineyard = build_vineyard(graph)?;
        let all = enumerate_clans(&vineyard)?;
        let ncolors = graph.colors().last().map_or(0, |&c| c as usize + 1);
        let full = all.len() - 1;
        // Needed clans: the full clan and, transitively, skeleton children.
        let mut needed = vec![false; all.len()];
        let mut per_clan: Vec<Option<Vec<Vec<Skeleton>>>> = vec![None; all.len()];
        let mut stack = vec![full];
        needed[full] = true;
        while let Some(ci) = stack.pop() {
            let mut by_color = Vec::with_capacity(ncolors);
            for c in 0..ncolors {
                let sk = skeletons_for(&vineyard, &all, ci, c as Color)?;
                for s in &sk {
                    for &(child, _) in &s.children {
                        if !needed[child] {
                            needed[child] = true;
                            stack.push(child);
                        }
                    }
                }
                by_color.push(sk);
            }
            per_clan[ci] = Some(by_color);
        }
        let keep: Vec<usize> = (0..all.len()).filter(|&i| needed[i]).collect();
        let mut remap = vec![usize::MAX; all.len()];
        for (new, &old) in keep.iter().enumerate() {
            remap[old] = new;
        }
        let clans: Vec<Clan> = keep.iter().map(|&i| all[i].clone()).collect();
        let skeletons = keep
            .iter()
            .map(|&i| {
                let mut by_color = per_clan[i].take().expect("computed");
                for list in &mut by_color {
                    for s in list {
                        s.clan = remap[s.clan];
                        for child in &mut s.children {
                            child.0 = remap[child.0];
                        }
                    }
                }
                by_color
            })
            .collect();
        Ok(Self {
            vineyard,
            clans,
            skeletons,
            colors: graph.colors(),
        })
    }

    pub fn graph(&self) -> &SmallDigraph {
        &self.vineyard.graph
    }

    pub fn full_clan(&self) -> usize {
        self.clans.len() - 1
    }

    pub fn skeleton_count(&self) -> usize {
        self.skeletons.iter().flatten().map(Vec::len).sum()
    }
}

fn skeletons_for(vy: &Vineyard, clans: &[Clan], ci: usize, color: Color) -> Result<Vec<Skeleton>> {
    let clan = &clans[ci];
    let arcs = &clan.star_arcs;
    let star = clan.star_mask();
    let of_color: Vec<usize> = (0..arcs.len()).filter(|&i| arcs[i].2 == color).collect();
    let mut out = Vec::new();
    for sel in 1u32..1 << of_color.len() {
        let x: Vec<usize> = (0..of_color.len())
            .filter(|&i| sel >> i & 1 == 1)
            .map(|i| of_color[i])
            .collect();
        let in_x = |i: usize| x.contains(&i);
        let tails: Mask = x.iter().fold(0, |m, &i| m | 1 << arcs[i].0);
        let heads: Mask = x.iter().fold(0, |m, &i| m | 1 << arcs[i].1);
        if tails & heads != 0 {
            continue;
        }
        // Arcs among the fixed endpoints must be exactly X.
        let clash = arcs.iter().enumerate().any(|(i, &(a, b, _))| {
            let fixed = (tails | heads) >> a & 1 == 1 && (tails | heads) >> b & 1 == 1;
            fixed && !in_x(i)
        });
        if clash {
            continue;
        }
        // M: vertices with a directed path to an X head.
        let mut m = heads;
        loop {
            let grow = arcs
                .iter()
                .filter(|&&(_, b, _)| m >> b & 1 == 1)
                .fold(m, |acc, &(a, _, _)| acc | 1 << a);
            if grow == m {
                break;
            }
            m = grow;
        }
        let fail = |what: &str| Error::CompileInvariant(format!("clan {:#b}, X {x:?}: {what}", clan.mask));
        if m >> clan.root & 1 == 0 || clan.ghosts.iter().any(|&g| m >> g & 1 == 0) {
            return Err(fail("root or ghost outside M"));
        }
        // Backtracking order: reverse breadth-first from the fixed endpoints.
        let mut placed = tails | heads;
        let mut steps = Vec::new();
        while placed != m {
            let (v, ai) = arcs
                .iter()
                .enumerate()
                .filter(|&(_, &(a, b, _))| m >> a & 1 == 1 && placed >> a & 1 == 0 && placed >> b & 1 == 1)
                .map(|(i, &(a, _, _))| (a, i))
                .min()
                .ok_or_else(|| fail("M not reachable backwards"))?;
            let checks = arcs
                .iter()
                .enumerate()
                .filter(|&(i, &(a, b, _))| {
                    i != ai && ((a == v && placed >> b & 1 == 1) || (b == v && placed >> a & 1 == 1))
                })
                .map(|(i, &(a, b, c))| (a as u8, b as u8, c, in_x(i)))
                .collect();
            steps.push(Step {
                vertex: v as u8,
                anchor: arcs[ai].1 as u8,
                anchor_color: arcs[ai].2,
                anchor_in_x: in_x(ai),
                checks,
            });
            placed |= 1 << v;
        }
        // Components of the extended clan outside M.
        let mut rest = star & !m;
        let mut children = Vec::new();
        while rest != 0 {
            let mut comp: Mask = 1 << rest.trailing_zeros();
            loop {
                let grow = arcs.iter().fold(comp, |acc, &(a, b, _)| {
                    let (ia, ib) = (comp >> a & 1 == 1, comp >> b & 1 == 1);
                    let (ra, rb) = (rest >> a & 1 == 1, rest >> b & 1 == 1);
                    if ia && rb {
                        acc | 1 << b
                    } else if ib && ra {
                        acc | 1 << a
                    } else {
                        acc
                    }
                });
                if grow == comp {
                    break;
                }
                comp = grow;
            }
            rest &= !comp;
            let child = clans
                .iter()
                .position(|c| c.mask == comp)
                .ok_or_else(|| fail("component outside M is not a clan"))?;
            let ghosts = &clans[child].ghosts;
            if ghosts.iter().any(|&g| m >> g & 1 == 0) {
                return Err(fail("child ghost outside M"));
            }
            children.push((child, ghosts.iter().map(|&g| g as u8).collect()));
        }
        debug_assert!(vy.graph.n() <= MAX_VERTICES);
        out.push(Skeleton {
            clan: ci,
            tails,
            heads,
            m,
            steps,
            children,
        });
    }
    Ok(out)
}
