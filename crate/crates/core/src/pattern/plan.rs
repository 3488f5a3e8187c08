//! Query plans: each count is a signed sum of products of per-component
//! homomorphism counts, and each component count is a weighted sum of
//! engine totals (or the vertex count for a lone vertex).

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rustc_hash::FxHashMap;

use super::augment::{enumerate_augmented_set, rounds_for};
use super::expand::{enumerate_projections_with_alpha, enumerate_supergraphs};
use super::vineyard::EnginePlan;
use super::{Pattern, SmallDigraph};
use crate::graph::Color;
use crate::{Error, Result};

pub type EngineId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CompileOptions {
    pub k: Color,
    pub max_pattern_size: usize,
    pub member_limit: usize,
}

impl CompileOptions {
    pub fn new(k: Color) -> Self {
        Self {
            k,
            max_pattern_size: 5,
            member_limit: 1_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PlanKind {
    Induced,
    Sub,
    Hom,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ComponentKind {
    /// A single vertex: the count is `|V(G)|`.
    Vertex,
    /// `sum of multiplicity * total` over engines.
    Sum(Vec<(EngineId, u64)>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentPlan {
    /// Canonical connected pattern.
    pub pattern: Pattern,
    pub kind: ComponentKind,
    /// Labeled members of its augmented set (0 for a lone vertex).
    pub labeled_members: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Term {
    pub coeff: BigInt,
    /// Component ids, sorted, with repetition.
    pub components: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct QueryPlan {
    pub terms: Vec<Term>,
}

impl QueryPlan {
    fn from_map(map: FxHashMap<Vec<usize>, BigInt>) -> Self {
        let mut terms: Vec<Term> = map
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(components, coeff)| Term { coeff, components })
            .collect();
        terms.sort_by(|a, b| a.components.cmp(&b.components));
        Self { terms }
    }

    /// Evaluates the plan given the count of every component.
    pub fn evaluate(&self, component_values: &[BigInt]) -> BigInt {
        self.terms
            .iter()
            .map(|t| {
                t.components
                    .iter()
                    .fold(t.coeff.clone(), |acc, &c| acc * &component_values[c])
            })
            .sum()
    }

    pub fn components(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.terms.iter().flat_map(|t| t.components.iter().copied()).collect();
        v.sort_unstable();
        v.dedup();
        v
    }
}

/// Compiles patterns, sharing components and engines across everything it
/// has compiled so far. Cloning is cheap; engine plans are shared.
#[derive(Debug, Clone)]
pub struct Compiler {
    opts: CompileOptions,
    components: Vec<ComponentPlan>,
    component_ids: FxHashMap<Pattern, usize>,
    engines: Vec<Arc<EnginePlan>>,
    engine_ids: FxHashMap<SmallDigraph, EngineId>,
}

impl Compiler {
    pub fn new(opts: CompileOptions) -> Self {
        Self {
            opts,
            components: Vec::new(),
            component_ids: FxHashMap::default(),
            engines: Vec::new(),
            engine_ids: FxHashMap::default(),
        }
    }

    pub fn options(&self) -> CompileOptions {
        self.opts
    }

    pub fn components(&self) -> &[ComponentPlan] {
        &self.components
    }

    pub fn engines(&self) -> &[Arc<EnginePlan>] {
        &self.engines
    }

    /// Augmentation depth needed by every component compiled so far.
    pub fn rounds(&self) -> usize {
        self.components
            .iter()
            .map(|c| rounds_for(c.pattern.n()))
            .max()
            .unwrap_or(0)
    }

    fn check(&self, h: &Pattern) -> Result<()> {
        if h.n() > self.opts.max_pattern_size {
            return Err(Error::PatternTooLarge {
                size: h.n(),
                limit: self.opts.max_pattern_size,
            });
        }
        let c = h.max_color();
        if c > self.opts.k {
            return Err(Error::InvalidColor { color: c, k: self.opts.k });
        }
        Ok(())
    }

    fn engine(&mut self, g: &SmallDigraph) -> Result<EngineId> {
        if let Some(&id) = self.engine_ids.get(g) {
            return Ok(id);
        }
        let plan = EnginePlan::new(g)?;
        let id = self.engines.len();
        self.engines.push(Arc::new(plan));
        self.engine_ids.insert(*g, id);
        Ok(id)
    }

    /// Component id of a connected pattern.
    pub fn component(&mut self, f: &Pattern) -> Result<usize> {
        let canon = f.canonical();
        if let Some(&id) = self.component_ids.get(&canon) {
            return Ok(id);
        }
        let (kind, labeled_members) = if canon.n() == 1 {
            (ComponentKind::Vertex, 0)
        } else {
            let set = enumerate_augmented_set(&canon, self.opts.k, self.opts.max_pattern_size, self.opts.member_limit)?;
            let mut engines = Vec::with_capacity(set.classes.len());
            for (g, mult) in &set.classes {
                engines.push((self.engine(g)?, *mult));
            }
            (ComponentKind::Sum(engines), set.labeled)
        };
        let id = self.components.len();
        self.components.push(ComponentPlan {
            pattern: canon,
            kind,
            labeled_members,
        });
        self.component_ids.insert(canon, id);
        Ok(id)
    }

    fn add_hom(&mut self, h: &Pattern, coeff: BigInt, map: &mut FxHashMap<Vec<usize>, BigInt>) -> Result<()> {
        let mut comps = Vec::new();
        for mask in h.components() {
            comps.push(self.component(&h.induced(mask))?);
        }
        comps.sort_unstable();
        *map.entry(comps).or_insert_with(BigInt::zero) += coeff;
        Ok(())
    }

    fn add_sub(&mut self, h: &Pattern, coeff: BigInt, map: &mut FxHashMap<Vec<usize>, BigInt>) -> Result<()> {
        for (q, alpha, _) in enumerate_projections_with_alpha(h) {
            self.add_hom(&q, &coeff * alpha, map)?;
        }
        Ok(())
    }

    pub fn compile(&mut self, h: &Pattern, kind: PlanKind) -> Result<QueryPlan> {
        self.check(h)?;
        let mut map = FxHashMap::default();
        match kind {
            PlanKind::Hom => self.add_hom(h, BigInt::one(), &mut map)?,
            PlanKind::Sub => self.add_sub(h, BigInt::one(), &mut map)?,
            PlanKind::Induced => {
                for (sign, s) in enumerate_supergraphs(h, self.opts.k, self.opts.max_pattern_size)? {
                    self.add_sub(&s, BigInt::from(sign), &mut map)?;
                }
            }
        }
        Ok(QueryPlan::from_map(map))
    }
}
