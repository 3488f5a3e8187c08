//! The augmented pattern set of a connected pattern: 0-contractions of the
//! zero-recolorings of all its h-th fraternal augmentations.
//!
//! For a connected host pattern `F` and any h-th augmentation `G'` of a
//! host graph `G`, the homomorphism counts of the labeled members into `G'`
//! sum to `hom(F, G)`.

use rustc_hash::{FxHashMap, FxHashSet};

use super::{bits, set_partitions, Mask, Pattern, SmallDigraph};
use crate::graph::Color;
use crate::{Error, Result};

/// Number of augmentation rounds after which every orientation of an
/// `n`-vertex pattern is elder.
pub fn rounds_for(n: usize) -> usize {
    (n * n.saturating_sub(1) / 2).saturating_sub(2)
}

/// A labeled member: vertex `i` of `graph` is the part `parts[i]` of `V(F)`.
/// Parts are ordered by smallest element.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Member {
    pub parts: Vec<Mask>,
    pub graph: SmallDigraph,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AugmentedSet {
    /// Number of labeled members.
    pub labeled: usize,
    /// Isomorphism classes as (canonical representative, multiplicity),
    /// sorted by representative.
    pub classes: Vec<(SmallDigraph, u64)>,
}

/// All orientations of `f` with its own colors.
fn orientations(f: &Pattern) -> Vec<SmallDigraph> {
    let edges = f.edges();
    let mut out = Vec::with_capacity(1 << edges.len());
    for bitsel in 0u32..1 << edges.len() {
        let mut d = SmallDigraph::empty(f.n()).expect("same size");
        for (i, &(u, v, c)) in edges.iter().enumerate() {
            if bitsel >> i & 1 == 1 {
                d.set_arc(v, u, c);
            } else {
                d.set_arc(u, v, c);
            }
        }
        out.push(d);
    }
    out
}

/// Every h-th fraternal augmentation of every orientation of `f`, with
/// added arcs colored 0. Each round branches over all orientations of the
/// current fork set; states are deduplicated by labeled equality.
pub fn augmentations(f: &Pattern, h: usize) -> Vec<SmallDigraph> {
    let mut states: FxHashSet<SmallDigraph> = orientations(f).into_iter().collect();
    for _ in 0..h {
        if states.iter().all(SmallDigraph::is_elder) {
            break;
        }
        let mut next = FxHashSet::default();
        for s in &states {
            let forks = s.forks();
            for sel in 0u32..1 << forks.len() {
                let mut d = *s;
                for (i, &(a, b)) in forks.iter().enumerate() {
                    if sel >> i & 1 == 1 {
                        d.set_arc(b, a, 0);
                    } else {
                        d.set_arc(a, b, 0);
                    }
                }
                next.insert(d);
            }
        }
        states = next;
    }
    let mut v: Vec<_> = states.into_iter().collect();
    v.sort_unstable();
    v
}

fn block_index(blocks: &[Mask]) -> [usize; super::MAX_VERTICES] {
    let mut of = [0usize; super::MAX_VERTICES];
    for (i, &b) in blocks.iter().enumerate() {
        for v in bits(b) {
            of[v] = i;
        }
    }
    of
}

/// Zero-arcs induce a connected subgraph on every block, and no arc inside a
/// block has a non-zero color.
fn blocks_are_zero_connected(d: &SmallDigraph, blocks: &[Mask]) -> bool {
    blocks.iter().all(|&b| {
        for a in bits(b) {
            for c in bits(b) {
                if d.arc(a, c).is_some_and(|col| col != 0) {
                    return false;
                }
            }
        }
        d.is_connected_on(b)
    })
}

/// Members contributed by one augmented state: every valid partition with
/// every consistent choice of colors for block pairs joined only by
/// zero-arcs.
fn contractions_of(d: &SmallDigraph, k: Color, out: &mut FxHashSet<Member>) {
    for blocks in set_partitions(d.n()) {
        if !blocks_are_zero_connected(d, blocks) {
            continue;
        }
        let of = block_index(blocks);
        let nb = blocks.len();
        // For each ordered block pair: Some(fixed color), or None if all of
        // its arcs are zero-arcs whose color is free.
        let mut pair: FxHashMap<(usize, usize), Option<Color>> = FxHashMap::default();
        let mut ok = true;
        for (a, b, c) in d.arcs() {
            let (x, y) = (of[a], of[b]);
            if x == y {
                continue;
            }
            if pair.contains_key(&(y, x)) {
                ok = false;
                break;
            }
            let slot = pair.entry((x, y)).or_insert(None);
            if c != 0 {
                match *slot {
                    Some(prev) if prev != c => {
                        ok = false;
                        break;
                    }
                    _ => *slot = Some(c),
                }
            }
        }
        if !ok {
            continue;
        }
        let mut fixed = SmallDigraph::empty(nb).expect("fits");
        let mut free = Vec::new();
        for (&(x, y), &c) in &pair {
            match c {
                Some(c) => fixed.set_arc(x, y, c),
                None => free.push((x, y)),
            }
        }
        free.sort_unstable();
        let choices = (k as usize + 1).pow(free.len() as u32);
        for mut code in 0..choices {
            let mut g = fixed;
            for &(x, y) in &free {
                g.set_arc(x, y, (code % (k as usize + 1)) as Color);
                code /= k as usize + 1;
            }
            out.insert(Member {
                parts: blocks.clone(),
                graph: g,
            });
        }
    }
}

fn check_limit(count: usize, limit: usize) -> Result<()> {
    if count > limit {
        return Err(Error::TooManyMembers { limit });
    }
    Ok(())
}

/// Labeled members of the augmented set of a connected pattern `f`, sorted.
pub fn augmented_members(f: &Pattern, k: Color, size_limit: usize, member_limit: usize) -> Result<Vec<Member>> {
    if f.n() > size_limit {
        return Err(Error::PatternTooLarge {
            size: f.n(),
            limit: size_limit,
        });
    }
    if !f.is_connected() {
        return Err(Error::NotConnected);
    }
    let h = rounds_for(f.n());
    let states = augmentations(f, h);
    if let Some(s) = states.iter().find(|s| !s.is_elder()) {
        return Err(Error::CompileInvariant(format!("augmentation {s:?} still has forks after {h} rounds")));
    }
    let mut members = FxHashSet::default();
    for s in &states {
        contractions_of(s, k, &mut members);
        check_limit(members.len(), member_limit)?;
    }
    let mut v: Vec<_> = members.into_iter().collect();
    v.sort_unstable();
    for m in &v {
        if !m.graph.is_elder() {
            return Err(Error::CompileInvariant(format!("member {m:?} is not elder")));
        }
        if !m.graph.is_connected() {
            return Err(Error::CompileInvariant(format!("member {m:?} is not connected")));
        }
    }
    Ok(v)
}

/// Reference construction following the definitions literally: recolor the
/// zero-arcs of every augmentation in every way, then take every partition
/// that satisfies the contraction conditions. Exponentially slower; used to
/// cross-check [`augmented_members`].
pub fn augmented_members_naive(f: &Pattern, k: Color) -> Vec<Member> {
    let h = rounds_for(f.n());
    let mut out = FxHashSet::default();
    for s in augmentations(f, h) {
        let zeros: Vec<(usize, usize)> = s
            .arcs()
            .into_iter()
            .filter(|&(_, _, c)| c == 0)
            .map(|(a, b, _)| (a, b))
            .collect();
        for mut code in 0..(k as usize + 1).pow(zeros.len() as u32) {
            let mut r = s;
            for &(a, b) in &zeros {
                r.clear_arc(a, b);
                r.set_arc(a, b, (code % (k as usize + 1)) as Color);
                code /= k as usize + 1;
            }
            for blocks in set_partitions(r.n()) {
                let of = block_index(blocks);
                let inside_ok = blocks.iter().all(|&b| {
                    bits(b).all(|a| bits(b).all(|c| r.arc(a, c).is_none_or(|col| col == 0))) && r.is_connected_on(b)
                });
                if !inside_ok {
                    continue;
                }
                let arcs = r.arcs();
                let cross_ok = arcs.iter().all(|&(u, v, c)| {
                    of[u] == of[v]
                        || arcs.iter().all(|&(u2, v2, c2)| {
                            let reversed = of[u2] == of[v] && of[v2] == of[u];
                            let same = of[u2] == of[u] && of[v2] == of[v];
                            !reversed && (!same || c2 == c)
                        })
                });
                if !cross_ok {
                    continue;
                }
                let mut g = SmallDigraph::empty(blocks.len()).expect("fits");
                for &(u, v, c) in &arcs {
                    if of[u] != of[v] {
                        g.clear_arc(of[u], of[v]);
                        g.set_arc(of[u], of[v], c);
                    }
                }
                out.insert(Member {
                    parts: blocks.clone(),
                    graph: g,
                });
            }
        }
    }
    let mut v: Vec<_> = out.into_iter().collect();
    v.sort_unstable();
    v
}

/// Labeled members grouped into isomorphism classes with multiplicities.
pub fn enumerate_augmented_set(f: &Pattern, k: Color, size_limit: usize, member_limit: usize) -> Result<AugmentedSet> {
    let members = augmented_members(f, k, size_limit, member_limit)?;
    let mut classes: FxHashMap<SmallDigraph, u64> = FxHashMap::default();
    for m in &members {
        *classes.entry(m.graph.canonical()).or_default() += 1;
    }
    let mut classes: Vec<_> = classes.into_iter().collect();
    classes.sort_unstable();
    Ok(AugmentedSet {
        labeled: members.len(),
        classes,
    })
}
