//! Brute-force reference counts.
//!
//! Nothing here depends on the compiler or the engines: every count is an
//! exhaustive backtracking search straight from the definitions. The
//! guarded entry points refuse inputs beyond test scale.

use std::collections::BTreeSet;

use crate::graph::{pair, ColoredDigraph, ColoredGraph, VertexId};
use crate::pattern::{Pattern, PlanKind, SmallDigraph};
use crate::text::derived_name;
use crate::{Error, Result};

pub const PATTERN_LIMIT: usize = 6;
pub const HOST_LIMIT: usize = 40;

fn guard(pattern: usize, host: usize) -> Result<()> {
    if pattern > PATTERN_LIMIT {
        return Err(Error::PatternTooLarge {
            size: pattern,
            limit: PATTERN_LIMIT,
        });
    }
    if host > HOST_LIMIT {
        return Err(Error::OracleLimit {
            size: host,
            limit: HOST_LIMIT,
        });
    }
    Ok(())
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Mode {
    Hom,
    Sub,
    Induced,
}

/// Visit order in which every vertex after the first of its component has
/// an earlier neighbor.
fn order(n: usize, adjacent: impl Fn(usize, usize) -> bool) -> Vec<usize> {
    let mut seen = vec![false; n];
    let mut out = Vec::with_capacity(n);
    for s in 0..n {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut i = out.len();
        out.push(s);
        while i < out.len() {
            let v = out[i];
            for (u, su) in seen.iter_mut().enumerate() {
                if !*su && adjacent(u, v) {
                    *su = true;
                    out.push(u);
                }
            }
            i += 1;
        }
    }
    out
}

fn count_undirected(h: &Pattern, g: &ColoredGraph, mode: Mode) -> u128 {
    let n = h.n();
    let ord = order(n, |a, b| h.color(a, b).is_some());
    let hosts: Vec<VertexId> = g.vertices().collect();
    let mut img = vec![0 as VertexId; n];
    fn rec(
        i: usize,
        ord: &[usize],
        h: &Pattern,
        g: &ColoredGraph,
        hosts: &[VertexId],
        mode: Mode,
        img: &mut [VertexId],
    ) -> u128 {
        if i == ord.len() {
            return 1;
        }
        let v = ord[i];
        let anchor = ord[..i].iter().copied().find(|&u| h.color(u, v).is_some());
        let candidates: Vec<VertexId> = match anchor {
            Some(u) => g.neighbors(img[u]).iter().map(|&(w, _)| w).collect(),
            None => hosts.to_vec(),
        };
        let mut total = 0;
        'cand: for w in candidates {
            for &u in &ord[..i] {
                if mode != Mode::Hom && img[u] == w {
                    continue 'cand;
                }
                let want = h.color(u, v);
                let have = g.color(img[u], w);
                let ok = match mode {
                    Mode::Induced => want == have,
                    _ => want.is_none() || want == have,
                };
                if !ok {
                    continue 'cand;
                }
            }
            img[v] = w;
            total += rec(i + 1, ord, h, g, hosts, mode, img);
        }
        total
    }
    rec(0, &ord, h, g, &hosts, mode, &mut img)
}

/// Homomorphisms `h -> g` preserving edges and colors.
pub fn hom_bf(h: &Pattern, g: &ColoredGraph) -> Result<u128> {
    guard(h.n(), g.vertex_count())?;
    Ok(count_undirected(h, g, Mode::Hom))
}

/// Injective homomorphisms.
pub fn sub_bf(h: &Pattern, g: &ColoredGraph) -> Result<u128> {
    guard(h.n(), g.vertex_count())?;
    Ok(count_undirected(h, g, Mode::Sub))
}

/// Injective maps under which pairs are edges of the same color exactly
/// when their images are.
pub fn isub_bf(h: &Pattern, g: &ColoredGraph) -> Result<u128> {
    guard(h.n(), g.vertex_count())?;
    Ok(count_undirected(h, g, Mode::Induced))
}

pub fn isub_bf_unbounded(h: &Pattern, g: &ColoredGraph) -> u128 {
    count_undirected(h, g, Mode::Induced)
}

pub fn hom_bf_unbounded(h: &Pattern, g: &ColoredGraph) -> u128 {
    count_undirected(h, g, Mode::Hom)
}

/// Brute-force answer to a query name over named patterns, resolved the
/// same way the index resolves it.
pub fn query_bf(patterns: &[(String, Pattern)], name: &str, g: &ColoredGraph) -> Result<u128> {
    let find = |n: &str| patterns.iter().find(|(m, _)| m == n).map(|(_, p)| p);
    if let Some(p) = find(name) {
        return isub_bf(p, g);
    }
    match derived_name(name).and_then(|(base, kind)| find(base).map(|p| (p, kind))) {
        Some((p, PlanKind::Sub)) => sub_bf(p, g),
        Some((p, PlanKind::Hom)) => hom_bf(p, g),
        _ => Err(Error::UnknownPattern(name.to_string())),
    }
}

/// Maps of `domain` into `0..d.id_bound()` that send every listed arc to an
/// arc of the same color, with some vertices pinned in advance.
pub fn dihom_arcs(
    domain: &[usize],
    arcs: &[(usize, usize, u8)],
    d: &ColoredDigraph,
    pinned: &[(usize, VertexId)],
) -> u128 {
    let adjacent = |a: usize, b: usize| arcs.iter().any(|&(x, y, _)| (x, y) == (a, b) || (x, y) == (b, a));
    let free: Vec<usize> = domain
        .iter()
        .copied()
        .filter(|v| !pinned.iter().any(|&(p, _)| p == *v))
        .collect();
    let mut ord: Vec<usize> = pinned.iter().map(|&(p, _)| p).collect();
    // Greedy order: prefer vertices adjacent to something already placed.
    let mut rest = free;
    while !rest.is_empty() {
        let i = rest
            .iter()
            .position(|&v| ord.iter().any(|&u| adjacent(u, v)))
            .unwrap_or(0);
        ord.push(rest.remove(i));
    }
    let max = ord.iter().copied().max().map_or(0, |m| m + 1);
    let mut img = vec![VertexId::MAX; max];
    for &(p, w) in pinned {
        img[p] = w;
    }
    let universe = d.id_bound() as VertexId;
    let npinned = pinned.len();
    fn rec(
        i: usize,
        ord: &[usize],
        arcs: &[(usize, usize, u8)],
        d: &ColoredDigraph,
        universe: VertexId,
        img: &mut [VertexId],
    ) -> u128 {
        if i == ord.len() {
            return 1;
        }
        let v = ord[i];
        let placed = &ord[..i];
        let anchor = arcs
            .iter()
            .find(|&&(a, b, _)| (a == v && placed.contains(&b)) || (b == v && placed.contains(&a)));
        let candidates: Vec<VertexId> = match anchor {
            Some(&(a, b, _)) if a == v => d.in_arcs(img[b]).iter().map(|&(t, _)| t).collect(),
            Some(&(a, _, _)) => d.out_arcs(img[a]).iter().map(|&(t, _)| t).collect(),
            None => (0..universe).collect(),
        };
        let mut total = 0;
        'cand: for w in candidates {
            img[v] = w;
            for &(a, b, c) in arcs {
                let relevant = (a == v || placed.contains(&a)) && (b == v || placed.contains(&b));
                if relevant && (a == v || b == v) && d.arc_color(img[a], img[b]) != Some(c) {
                    continue 'cand;
                }
            }
            total += rec(i + 1, ord, arcs, d, universe, img);
        }
        img[v] = VertexId::MAX;
        total
    }
    // Pinned vertices must already agree on arcs among themselves.
    for &(a, b, c) in arcs {
        let pa = pinned.iter().any(|&(p, _)| p == a);
        let pb = pinned.iter().any(|&(p, _)| p == b);
        if pa && pb && d.arc_color(img[a], img[b]) != Some(c) {
            return 0;
        }
    }
    rec(npinned, &ord, arcs, d, universe, &mut img)
}

/// Homomorphisms of a colored digraph pattern into `d`, with vertices of `d`
/// taken to be `0..d.id_bound()`.
pub fn dihom_bf(h: &SmallDigraph, d: &ColoredDigraph) -> Result<u128> {
    guard(h.n(), d.id_bound())?;
    let domain: Vec<usize> = (0..h.n()).collect();
    Ok(dihom_arcs(&domain, &h.arcs(), d, &[]))
}

pub fn dihom_bf_unbounded(h: &SmallDigraph, d: &ColoredDigraph) -> u128 {
    let domain: Vec<usize> = (0..h.n()).collect();
    dihom_arcs(&domain, &h.arcs(), d, &[])
}

/// Pairs `{u, v}`, `u < v`, of distinct non-adjacent vertices with a common
/// out-neighbor.
pub fn forks_bf(d: &ColoredDigraph) -> BTreeSet<(VertexId, VertexId)> {
    let mut out = BTreeSet::new();
    for w in 0..d.id_bound() as VertexId {
        let ins = d.in_arcs(w);
        for (i, &(u, _)) in ins.iter().enumerate() {
            for &(v, _) in &ins[i + 1..] {
                if u != v && !d.adjacent(u, v) {
                    out.insert(pair(u, v));
                }
            }
        }
    }
    out
}
