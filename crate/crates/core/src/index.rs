//! The user-facing index: host graph, augmentation cascade, counting engines
//! and compiled plans.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rustc_hash::FxHashMap;

use crate::ahom::AHomState;
use crate::augmentation::{AugmentedState, ChangeKind, DirectedChange, HostOp};
use crate::graph::{Color, ColoredDigraph, ColoredGraph, VertexId};
use crate::pattern::{rounds_for, CompileOptions, Compiler, ComponentKind, EngineId, Pattern, PlanKind, QueryPlan};
use crate::text::{derived_name, Op};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IndexConfig {
    pub k: Color,
    pub max_pattern_size: usize,
    pub member_limit: usize,
    /// Report in-degree cap violations at the host level instead of
    /// rebuilding with a larger cap.
    pub strict_class: bool,
    /// Seed for orientation tie-breaking.
    pub seed: u64,
}

impl IndexConfig {
    pub fn new(k: Color) -> Self {
        Self {
            k,
            max_pattern_size: 5,
            member_limit: 1_000_000,
            strict_class: false,
            seed: 0,
        }
    }

    pub fn compile_options(&self) -> CompileOptions {
        CompileOptions {
            k: self.k,
            max_pattern_size: self.max_pattern_size,
            member_limit: self.member_limit,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IndexStats {
    pub vertices: usize,
    pub edges: usize,
    pub levels: usize,
    pub caps: Vec<usize>,
    pub level_edges: Vec<usize>,
    pub level_max_in_degree: Vec<usize>,
    pub engines: usize,
    pub components: usize,
    pub table_entries: usize,
    pub flips: u64,
    pub rebuilds: u64,
    pub fork_deltas: u64,
    pub changes: u64,
    pub engine_nodes: u64,
    pub engine_leaves: u64,
}

impl IndexStats {
    /// Instrumented work: flips, witness counter updates and backtracking
    /// nodes of the engines.
    pub fn work(&self) -> u64 {
        self.flips + self.fork_deltas + self.engine_nodes
    }
}

#[derive(Debug, Clone)]
struct Registered {
    plans: [QueryPlan; 3],
}

#[derive(Debug, Clone)]
pub struct ISubIndex {
    config: IndexConfig,
    host: ColoredGraph,
    aug: AugmentedState,
    view: ColoredDigraph,
    compiler: Compiler,
    /// Engine states for the engines the registered plans use.
    engines: Vec<AHomState>,
    slot: FxHashMap<EngineId, usize>,
    /// Engine slots with at least one arc of the given color.
    by_color: Vec<Vec<usize>>,
    names: Vec<String>,
    plans: FxHashMap<String, Registered>,
}

impl ISubIndex {
    pub fn build(host: ColoredGraph, patterns: Vec<(String, Pattern)>, config: IndexConfig) -> Result<Self> {
        Self::build_with(host, patterns, config, Compiler::new(config.compile_options()))
    }

    /// Builds with a compiler that may already hold compiled components, so
    /// repeated builds over the same patterns skip compilation.
    pub fn build_with(
        host: ColoredGraph,
        patterns: Vec<(String, Pattern)>,
        config: IndexConfig,
        mut compiler: Compiler,
    ) -> Result<Self> {
        if compiler.options() != config.compile_options() {
            return Err(Error::CompileInvariant("compiler options differ from index options".into()));
        }
        if host.k() > config.k {
            return Err(Error::InvalidColor {
                color: host.k(),
                k: config.k,
            });
        }
        let mut names = Vec::new();
        let mut plans = FxHashMap::default();
        for (name, p) in patterns {
            let reg = Registered {
                plans: [
                    compiler.compile(&p, PlanKind::Induced)?,
                    compiler.compile(&p, PlanKind::Sub)?,
                    compiler.compile(&p, PlanKind::Hom)?,
                ],
            };
            if plans.insert(name.clone(), reg).is_none() {
                names.push(name);
            }
        }
        let mut used: Vec<usize> = plans
            .values()
            .flat_map(|r: &Registered| r.plans.iter().flat_map(QueryPlan::components))
            .collect();
        used.sort_unstable();
        used.dedup();
        let h = used
            .iter()
            .map(|&c| rounds_for(compiler.components()[c].pattern.n()))
            .max()
            .unwrap_or(0);
        let mut engine_ids: Vec<EngineId> = used
            .iter()
            .flat_map(|&c| match &compiler.components()[c].kind {
                ComponentKind::Vertex => Vec::new(),
                ComponentKind::Sum(v) => v.iter().map(|&(e, _)| e).collect(),
            })
            .collect();
        engine_ids.sort_unstable();
        engine_ids.dedup();
        let mut engines = Vec::with_capacity(engine_ids.len());
        let mut slot = FxHashMap::default();
        let mut by_color: Vec<Vec<usize>> = vec![Vec::new(); config.k as usize + 1];
        for (i, &e) in engine_ids.iter().enumerate() {
            let plan = Arc::clone(&compiler.engines()[e]);
            for &c in &plan.colors {
                by_color[c as usize].push(i);
            }
            engines.push(AHomState::new(plan));
            slot.insert(e, i);
        }
        let (aug, batch) = AugmentedState::init(&host, h, config.strict_class, config.seed)?;
        let mut index = Self {
            config,
            host,
            aug,
            view: ColoredDigraph::new(),
            compiler,
            engines,
            slot,
            by_color,
            names,
            plans,
        };
        index.feed(&batch)?;
        Ok(index)
    }

    fn feed(&mut self, batch: &[DirectedChange]) -> Result<()> {
        for ch in batch {
            let (x, y, c) = (ch.tail, ch.head, ch.color);
            match ch.kind {
                ChangeKind::Insert => {
                    self.view.insert_arc(x, y, c)?;
                    for &i in &self.by_color[c as usize] {
                        self.engines[i].on_insert(&self.view, x, y, c);
                    }
                }
                ChangeKind::Delete => {
                    if !self.view.has_arc(x, y, c) {
                        return Err(Error::MissingEdge(x, y));
                    }
                    for &i in &self.by_color[c as usize] {
                        self.engines[i].on_delete(&self.view, x, y, c);
                    }
                    self.view.remove_arc(x, y, c)?;
                }
            }
        }
        Ok(())
    }

    pub fn add_edge(&mut self, u: VertexId, v: VertexId, c: Color) -> Result<()> {
        self.host.check_insert(u, v, c)?;
        let batch = self.aug.apply(HostOp::Insert { u, v, color: c })?;
        self.host.add_edge(u, v, c)?;
        self.feed(&batch)
    }

    pub fn remove_edge(&mut self, u: VertexId, v: VertexId) -> Result<Color> {
        let old = self.host.color(u, v).ok_or(Error::MissingEdge(u, v))?;
        let batch = self.aug.apply(HostOp::Delete { u, v })?;
        self.host.remove_edge(u, v)?;
        self.feed(&batch)?;
        Ok(old)
    }

    pub fn recolor_edge(&mut self, u: VertexId, v: VertexId, c: Color) -> Result<Color> {
        self.host.check_color(c)?;
        self.host.color(u, v).ok_or(Error::MissingEdge(u, v))?;
        let batch = self.aug.apply(HostOp::Recolor { u, v, color: c })?;
        let old = self.host.recolor_edge(u, v, c)?;
        self.feed(&batch)?;
        Ok(old)
    }

    pub fn add_vertex(&mut self, id: VertexId) -> Result<()> {
        self.host.insert_vertex(id)
    }

    pub fn remove_isolated_vertex(&mut self, id: VertexId) -> Result<()> {
        self.host.remove_vertex(id)
    }

    fn count(&self, name: &str, kind: PlanKind) -> Result<BigInt> {
        let reg = self
            .plans
            .get(name)
            .ok_or_else(|| Error::UnknownPattern(name.to_string()))?;
        let plan = &reg.plans[kind as usize];
        Ok(match self.evaluate_small(plan) {
            Some(v) => BigInt::from(v),
            None => self.evaluate_big(plan),
        })
    }

    fn evaluate_big(&self, plan: &QueryPlan) -> BigInt {
        let comps = self.compiler.components();
        let mut values = vec![BigInt::default(); comps.len()];
        for c in plan.components() {
            values[c] = match &comps[c].kind {
                ComponentKind::Vertex => BigInt::from(self.host.vertex_count()),
                ComponentKind::Sum(v) => v
                    .iter()
                    .map(|&(e, mult)| BigInt::from(self.engines[self.slot[&e]].total()) * mult)
                    .sum(),
            };
        }
        plan.evaluate(&values)
    }

    /// The plan in checked `i128` arithmetic; `None` on overflow.
    fn evaluate_small(&self, plan: &QueryPlan) -> Option<i128> {
        let comps = self.compiler.components();
        let value = |c: usize| -> Option<i128> {
            match &comps[c].kind {
                ComponentKind::Vertex => i128::try_from(self.host.vertex_count()).ok(),
                ComponentKind::Sum(v) => v.iter().try_fold(0i128, |acc, &(e, mult)| {
                    acc.checked_add(self.engines[self.slot[&e]].total().checked_mul(i128::from(mult))?)
                }),
            }
        };
        plan.terms.iter().try_fold(0i128, |acc, t| {
            let mut prod = t.coeff.to_i128()?;
            for &c in &t.components {
                prod = prod.checked_mul(value(c)?)?;
            }
            acc.checked_add(prod)
        })
    }

    /// Injective maps of the pattern's vertices that preserve edges, colors
    /// and non-edges.
    pub fn count_induced(&self, name: &str) -> Result<BigInt> {
        self.count(name, PlanKind::Induced)
    }

    /// Injective homomorphisms.
    pub fn count_sub(&self, name: &str) -> Result<BigInt> {
        self.count(name, PlanKind::Sub)
    }

    pub fn count_hom(&self, name: &str) -> Result<BigInt> {
        self.count(name, PlanKind::Hom)
    }

    /// Resolves a query name: `name` is the induced count, `name.sub` and
    /// `name.hom` the derived sub and hom counts. A registered name always
    /// wins over a derived one.
    pub fn query(&self, name: &str) -> Result<BigInt> {
        if self.plans.contains_key(name) {
            return self.count(name, PlanKind::Induced);
        }
        match derived_name(name) {
            Some((base, kind)) if self.plans.contains_key(base) => self.count(base, kind),
            _ => Err(Error::UnknownPattern(name.to_string())),
        }
    }

    /// Runs one script operation; queries return their count.
    pub fn apply(&mut self, op: &Op) -> Result<Option<BigInt>> {
        match *op {
            Op::AddEdge(u, v, c) => self.add_edge(u, v, c)?,
            Op::RemoveEdge(u, v) => {
                self.remove_edge(u, v)?;
            }
            Op::Recolor(u, v, c) => {
                self.recolor_edge(u, v, c)?;
            }
            Op::AddVertex(v) => self.add_vertex(v)?,
            Op::RemoveVertex(v) => self.remove_isolated_vertex(v)?,
            Op::Query(ref name) => return self.query(name).map(Some),
        }
        Ok(None)
    }

    pub fn config(&self) -> &IndexConfig {
        &self.config
    }

    pub fn host(&self) -> &ColoredGraph {
        &self.host
    }

    pub fn augmentation(&self) -> &AugmentedState {
        &self.aug
    }

    /// The digraph every engine currently sees.
    pub fn view(&self) -> &ColoredDigraph {
        &self.view
    }

    pub fn compiler(&self) -> &Compiler {
        &self.compiler
    }

    pub fn pattern_names(&self) -> &[String] {
        &self.names
    }

    pub fn plan(&self, name: &str, kind: PlanKind) -> Result<&QueryPlan> {
        self.plans
            .get(name)
            .map(|r| &r.plans[kind as usize])
            .ok_or_else(|| Error::UnknownPattern(name.to_string()))
    }

    pub fn engines(&self) -> &[AHomState] {
        &self.engines
    }

    pub fn stats(&self) -> IndexStats {
        let h = self.aug.h();
        let levels: Vec<_> = (0..=h).map(|i| self.aug.level(i).expect("in range")).collect();
        let aug_stats = self.aug.stats();
        IndexStats {
            vertices: self.host.vertex_count(),
            edges: self.host.edge_count(),
            levels: h + 1,
            caps: levels.iter().map(|l| l.cap()).collect(),
            level_edges: levels.iter().map(|l| l.edge_count()).collect(),
            level_max_in_degree: levels.iter().map(|l| l.max_in_degree()).collect(),
            engines: self.engines.len(),
            components: self.compiler.components().len(),
            table_entries: self.engines.iter().map(AHomState::entries).sum(),
            flips: levels.iter().map(|l| l.stats().flips).sum(),
            rebuilds: levels.iter().map(|l| l.stats().rebuilds).sum(),
            fork_deltas: aug_stats.fork_deltas,
            changes: aug_stats.changes,
            engine_nodes: self.engines.iter().map(|e| e.work().nodes).sum(),
            engine_leaves: self.engines.iter().map(|e| e.work().leaves).sum(),
        }
    }
}
