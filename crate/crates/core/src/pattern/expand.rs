//! Induced-to-subgraph and subgraph-to-homomorphism expansions.

use rustc_hash::FxHashMap;

use super::{bits, set_partitions, Mask, Pattern};
use crate::graph::Color;
use crate::{Error, Result};

fn guard(h: &Pattern, limit: usize) -> Result<()> {
    if h.n() > limit {
        return Err(Error::PatternTooLarge { size: h.n(), limit });
    }
    Ok(())
}

/// Every supergraph of `h` on the same vertices, obtained by adding a set of
/// non-edges with any colors from `1..=k`, signed by `(-1)^added`.
pub fn enumerate_supergraphs(h: &Pattern, k: Color, limit: usize) -> Result<Vec<(i32, Pattern)>> {
    guard(h, limit)?;
    let non_edges = h.non_edges();
    let mut out = vec![(1, *h)];
    for &(u, v) in &non_edges {
        let mut next = Vec::with_capacity(out.len() * (k as usize + 1));
        for (sign, p) in out {
            next.push((sign, p));
            for c in 1..=k {
                next.push((-sign, p.with_edge(u, v, c)));
            }
        }
        out = next;
    }
    Ok(out)
}

/// Whether `blocks` gives a projection: every block independent and every
/// pair of blocks joined by edges of a single color.
fn is_projection(h: &Pattern, blocks: &[Mask]) -> bool {
    let mut block_of = [0usize; super::MAX_VERTICES];
    for (i, &b) in blocks.iter().enumerate() {
        for v in bits(b) {
            block_of[v] = i;
        }
    }
    let mut seen: FxHashMap<(usize, usize), Color> = FxHashMap::default();
    for (u, v, c) in h.edges() {
        let (a, b) = (block_of[u], block_of[v]);
        if a == b {
            return false;
        }
        if *seen.entry((a.min(b), a.max(b))).or_insert(c) != c {
            return false;
        }
    }
    true
}

/// Partitions of `V(h)` that define projections, in a fixed order with the
/// all-singletons partition first.
pub fn valid_partitions(h: &Pattern) -> Vec<Vec<Mask>> {
    let mut out: Vec<Vec<Mask>> = set_partitions(h.n())
        .iter()
        .filter(|p| is_projection(h, p))
        .cloned()
        .collect();
    out.sort_by_key(|p| std::cmp::Reverse(p.len()));
    out
}

fn refines(fine: &[Mask], coarse: &[Mask]) -> bool {
    fine.iter().all(|&f| coarse.iter().any(|&c| f & c == f))
}

/// Projections of `h` with integer coefficients such that
/// `sub(h, G) = sum alpha * hom(projection, G)` for every `G`.
///
/// The coefficients follow the recursive definition: `alpha(h) = 1`, and the
/// coefficient of a coarser projection is minus the sum, over strictly finer
/// non-trivial projections, of their own coefficients for it.
pub fn enumerate_projections_with_alpha(h: &Pattern) -> Vec<(Pattern, i64, Vec<Mask>)> {
    let parts = valid_partitions(h);
    let m = parts.len();
    // below[j]: indices i with parts[i] a refinement of parts[j].
    let below: Vec<Vec<usize>> = (0..m)
        .map(|j| (0..m).filter(|&i| refines(&parts[i], &parts[j])).collect())
        .collect();
    // rel[i][j]: coefficient of parts[j] in the expansion of the projection
    // parts[i], defined for i refining j. Finer partitions have more blocks,
    // so processing by decreasing block count gives a valid order per j.
    let mut rel: FxHashMap<(usize, usize), i64> = FxHashMap::default();
    for j in 0..m {
        let mut lower: Vec<usize> = below[j].clone();
        lower.sort_by_key(|&i| parts[i].len());
        for &i in &lower {
            let v = if i == j {
                1
            } else {
                -below[j]
                    .iter()
                    .filter(|&&l| l != i && refines(&parts[i], &parts[l]))
                    .map(|&l| rel[&(l, j)])
                    .sum::<i64>()
            };
            rel.insert((i, j), v);
        }
    }
    (0..m)
        .map(|j| (h.quotient(&parts[j]), rel[&(0, j)], parts[j].clone()))
        .collect()
}

/// `prod over blocks of (-1)^(|b|-1) (|b|-1)!`, the closed form the recursive
/// coefficients must agree with.
pub fn mobius_closed_form(blocks: &[Mask]) -> i64 {
    blocks
        .iter()
        .map(|b| {
            let s = b.count_ones() as i64;
            let f: i64 = (1..s).product();
            if s % 2 == 1 {
                f
            } else {
                -f
            }
        })
        .product()
}
