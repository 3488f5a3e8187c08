//! Dynamic homomorphism counts of one elder vineyard pattern into a digraph
//! of bounded in-degree.
//!
//! For every maintained clan `C` with ghosts `g1..gm` the table
//! `S(C, w1..wm)` holds the number of homomorphisms of the extended clan
//! that send the ghosts to `w1..wm`. The full clan has no ghosts; its
//! homomorphisms are kept per image of the root, and summed in `total`.
//!
//! An arc change `(x, y)` is handled per clan and per set `X` of same-colored
//! arcs sent onto it: the part of the clan that reaches a head of `X` is
//! matched by backtracking along in-lists from `y`, and the rest factors
//! into already-stored child clan values.

use std::sync::Arc;

use rustc_hash::FxHashMap;

use crate::graph::{Color, ColoredDigraph, VertexId};
use crate::pattern::{bits, EnginePlan, Skeleton, MAX_VERTICES};
use crate::{Error, Result};

/// Ghost images, padded with `VertexId::MAX`.
pub type GhostKey = [VertexId; MAX_VERTICES];

const NONE: VertexId = VertexId::MAX;

pub fn ghost_key(images: &[VertexId]) -> GhostKey {
    let mut k = [NONE; MAX_VERTICES];
    k[..images.len()].copy_from_slice(images);
    k
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EngineWork {
    /// Backtracking nodes visited while enumerating partial homomorphisms.
    pub nodes: u64,
    /// Completed partial homomorphisms.
    pub leaves: u64,
}

#[derive(Debug, Clone)]
pub struct AHomState {
    plan: Arc<EnginePlan>,
    /// `tables[clan]`, non-zero entries only. The full clan's table is unused.
    tables: Vec<FxHashMap<GhostKey, i128>>,
    root_counts: FxHashMap<VertexId, i128>,
    total: i128,
    work: EngineWork,
}

impl PartialEq for AHomState {
    fn eq(&self, other: &Self) -> bool {
        self.plan.graph() == other.plan.graph()
            && self.tables == other.tables
            && self.root_counts == other.root_counts
            && self.total == other.total
    }
}

fn add(slot: i128, delta: i128) -> i128 {
    slot.checked_add(delta).expect("homomorphism count overflows i128")
}

impl AHomState {
    pub fn new(plan: Arc<EnginePlan>) -> Self {
        let tables = vec![FxHashMap::default(); plan.clans.len()];
        Self {
            plan,
            tables,
            root_counts: FxHashMap::default(),
            total: 0,
            work: EngineWork::default(),
        }
    }

    pub fn plan(&self) -> &EnginePlan {
        &self.plan
    }

    pub fn total(&self) -> i128 {
        self.total
    }

    pub fn root_count(&self, v: VertexId) -> i128 {
        self.root_counts.get(&v).copied().unwrap_or(0)
    }

    pub fn root_counts(&self) -> &FxHashMap<VertexId, i128> {
        &self.root_counts
    }

    /// `S(clan, ghosts)`; zero when absent.
    pub fn s_value(&self, clan: usize, ghosts: &[VertexId]) -> i128 {
        self.tables[clan].get(&ghost_key(ghosts)).copied().unwrap_or(0)
    }

    pub fn table(&self, clan: usize) -> &FxHashMap<GhostKey, i128> {
        &self.tables[clan]
    }

    /// Number of stored table entries over all clans.
    pub fn entries(&self) -> usize {
        self.tables.iter().map(FxHashMap::len).sum()
    }

    pub fn work(&self) -> EngineWork {
        self.work
    }

    /// Accounts for the new arc `(x, y)` of color `c`, which `view` must
    /// already contain.
    pub fn on_insert(&mut self, view: &ColoredDigraph, x: VertexId, y: VertexId, c: Color) {
        let plan = Arc::clone(&self.plan);
        for clan in (0..plan.clans.len()).rev() {
            self.process(&plan, clan, view, x, y, c, 1);
        }
    }

    /// Accounts for the removal of `(x, y)` of color `c`, which `view` must
    /// still contain.
    pub fn on_delete(&mut self, view: &ColoredDigraph, x: VertexId, y: VertexId, c: Color) {
        let plan = Arc::clone(&self.plan);
        for clan in 0..plan.clans.len() {
            self.process(&plan, clan, view, x, y, c, -1);
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn process(&mut self, plan: &EnginePlan, clan: usize, view: &ColoredDigraph, x: VertexId, y: VertexId, c: Color, sign: i128) {
        let Some(list) = plan.skeletons[clan].get(c as usize) else {
            return;
        };
        if list.is_empty() {
            return;
        }
        let full = clan == plan.full_clan();
        let mut found: Vec<(GhostKey, i128)> = Vec::new();
        for sk in list {
            let mut phi = [NONE; MAX_VERTICES];
            for t in bits(sk.tails) {
                phi[t] = x;
            }
            for h in bits(sk.heads) {
                phi[h] = y;
            }
            let mut walk = Walk {
                view,
                x,
                y,
                sk,
                tables: &self.tables,
                work: &mut self.work,
                out: &mut found,
                key_of: if full {
                    KeyOf::Root(plan.vineyard.root)
                } else {
                    KeyOf::Ghosts(&plan.clans[clan].ghosts)
                },
            };
            walk.run(0, &mut phi);
        }
        for (key, count) in found {
            let delta = sign * count;
            if full {
                let v = key[0];
                let slot = self.root_counts.entry(v).or_insert(0);
                *slot = add(*slot, delta);
                if *slot == 0 {
                    self.root_counts.remove(&v);
                }
                self.total = add(self.total, delta);
            } else {
                let table = &mut self.tables[clan];
                let slot = table.entry(key).or_insert(0);
                *slot = add(*slot, delta);
                if *slot == 0 {
                    table.remove(&key);
                }
            }
        }
    }
}

enum KeyOf<'a> {
    Root(usize),
    Ghosts(&'a [usize]),
}

struct Walk<'a> {
    view: &'a ColoredDigraph,
    x: VertexId,
    y: VertexId,
    sk: &'a Skeleton,
    tables: &'a [FxHashMap<GhostKey, i128>],
    work: &'a mut EngineWork,
    out: &'a mut Vec<(GhostKey, i128)>,
    key_of: KeyOf<'a>,
}

impl Walk<'_> {
    fn run(&mut self, i: usize, phi: &mut [VertexId; MAX_VERTICES]) {
        self.work.nodes += 1;
        let Some(step) = self.sk.steps.get(i) else {
            self.leaf(phi);
            return;
        };
        let v = step.vertex as usize;
        let target = phi[step.anchor as usize];
        for &(t, col) in self.view.in_arcs(target) {
            if col != step.anchor_color {
                continue;
            }
            if !step.anchor_in_x && t == self.x && target == self.y {
                continue;
            }
            let ok = step.checks.iter().all(|&(a, b, c, in_x)| {
                let pa = if a as usize == v { t } else { phi[a as usize] };
                let pb = if b as usize == v { t } else { phi[b as usize] };
                (in_x || pa != self.x || pb != self.y) && self.view.arc_color(pa, pb) == Some(c)
            });
            if ok {
                phi[v] = t;
                self.run(i + 1, phi);
            }
        }
        phi[v] = NONE;
    }

    fn leaf(&mut self, phi: &[VertexId; MAX_VERTICES]) {
        self.work.leaves += 1;
        let mut prod: i128 = 1;
        for (child, ghosts) in &self.sk.children {
            let mut key = [NONE; MAX_VERTICES];
            for (i, &g) in ghosts.iter().enumerate() {
                key[i] = phi[g as usize];
            }
            match self.tables[*child].get(&key) {
                Some(&s) => prod = prod.checked_mul(s).expect("homomorphism count overflows i128"),
                None => return,
            }
        }
        let key = match self.key_of {
            KeyOf::Root(r) => ghost_key(&[phi[r]]),
            KeyOf::Ghosts(gs) => {
                let mut key = [NONE; MAX_VERTICES];
                for (i, &g) in gs.iter().enumerate() {
                    key[i] = phi[g];
                }
                key
            }
        };
        self.out.push((key, prod));
    }
}

/// An engine together with its own copy of the digraph.
#[derive(Debug, Clone)]
pub struct AHom {
    view: ColoredDigraph,
    state: AHomState,
}

impl AHom {
    pub fn new(plan: Arc<EnginePlan>) -> Self {
        Self {
            view: ColoredDigraph::new(),
            state: AHomState::new(plan),
        }
    }

    pub fn view(&self) -> &ColoredDigraph {
        &self.view
    }

    pub fn state(&self) -> &AHomState {
        &self.state
    }

    pub fn total(&self) -> i128 {
        self.state.total()
    }

    pub fn root_count(&self, v: VertexId) -> i128 {
        self.state.root_count(v)
    }

    pub fn apply_insert(&mut self, x: VertexId, y: VertexId, c: Color) -> Result<()> {
        self.view.insert_arc(x, y, c)?;
        self.state.on_insert(&self.view, x, y, c);
        Ok(())
    }

    pub fn apply_delete(&mut self, x: VertexId, y: VertexId, c: Color) -> Result<()> {
        if !self.view.has_arc(x, y, c) {
            return Err(Error::MissingEdge(x, y));
        }
        self.state.on_delete(&self.view, x, y, c);
        self.view.remove_arc(x, y, c)
    }
}
