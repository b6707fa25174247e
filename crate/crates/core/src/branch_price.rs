//! Branch-and-price: a search tree over original-variable bounds with
//! column generation at every node.
//!
//! Branching never touches the master weights of convexity blocks (a cut
//! column would just be regenerated by the pricer); it restricts original
//! variables, and the pricers regenerate whatever columns the child still
//! needs under those bounds. Aggregated blocks branch on their pattern
//! counts instead, which the pool's fingerprint deduplication and the
//! pricers' exclusion set make loop-free.
//!
//! Node rules: a node whose LRMP value cannot beat the incumbent is pruned;
//! an integral LRMP below the incumbent updates it and fathoms the node; a
//! fractional one records its value as the node lower bound and branches.
//! With exact pricing and an unlimited beam the search returns the integer
//! optimum; a finite beam keeps only the best nodes per depth and flags the
//! result as non-exact.

use crate::colgen::{
    round_to_integer, run_cg_bounded, CgConfig, CgError, IntegerSolution, VarBounds,
};
use crate::master::{
    init_rmp, recover_original_solution, select_fractional, Column, FractionalTarget, RmpState,
};
use crate::model::{validate, CompactModel, StructureViolation};
use crate::pricing::Pricer;
use crate::util::{self, TOL_INT};
use std::collections::BTreeMap;
use std::fmt;
use std::time::{Duration, Instant};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NodeStatus {
    Open,
    Pruned,
    Fathomed,
    Branched,
    InfeasibleNode,
    BeamPruned,
}

/// Accumulated restrictions along a tree path.
#[derive(Clone, Debug, Default)]
pub struct BranchingBounds {
    /// Original-variable bounds, keyed by global variable index; an entry
    /// replaces the model bounds for that variable.
    pub vars: VarBounds,
    /// Pattern-count bounds for aggregated blocks, keyed by column
    /// fingerprint.
    pub weights: BTreeMap<u64, (f64, f64)>,
}

#[derive(Clone, Debug)]
pub struct BpNode {
    pub id: usize,
    pub parent: Option<usize>,
    pub bounds: BranchingBounds,
    /// Valid lower bound for this subtree: inherited from the parent at
    /// creation, replaced by the node's own LRMP value after its CG run.
    pub node_lb: f64,
    pub status: NodeStatus,
    pub depth: usize,
    /// Column pool inherited from the parent (filtered); consumed when the
    /// node is processed.
    rmp: Option<RmpState>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NodeStrategy {
    BestFirst,
    Dfs,
}

#[derive(Clone, Debug)]
pub struct BpConfig {
    pub cg: CgConfig,
    /// `None` = unlimited (exact search).
    pub beam_width: Option<usize>,
    pub strategy: NodeStrategy,
    pub node_limit: Option<usize>,
    pub time_limit: Option<Duration>,
}

impl Default for BpConfig {
    fn default() -> Self {
        BpConfig {
            cg: CgConfig::default(),
            beam_width: None,
            strategy: NodeStrategy::BestFirst,
            node_limit: None,
            time_limit: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BpTermination {
    /// Tree exhausted under exact search with an incumbent.
    Optimal,
    /// Tree exhausted under exact search without any feasible solution.
    Infeasible,
    /// Tree exhausted but beam pruning may have cut the optimum.
    BeamExhausted,
    NodeLimit,
    TimeLimit,
}

#[derive(Clone, Debug)]
pub struct BpHistory {
    pub node_index: usize,
    pub upper_bound: f64,
    pub lower_bound: f64,
    pub wall_ms: u128,
}

#[derive(Clone, Debug)]
pub struct BpResult {
    pub objective: Option<f64>,
    pub solution: Option<IntegerSolution>,
    /// Proven optimal: exact search, tree exhausted, incumbent in hand.
    pub optimal: bool,
    /// Any node was dropped by the beam.
    pub beam_pruned: bool,
    pub nodes_explored: usize,
    /// Column-generation iterations summed over all processed nodes.
    pub cg_iterations: usize,
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub history: Vec<BpHistory>,
    pub termination: BpTermination,
}

#[derive(Debug)]
pub enum BpError {
    InvalidModel(Vec<StructureViolation>),
    Cg(CgError),
    /// branch() was asked to split on an integral value.
    IntegralBranchValue(f64),
    /// branch() was asked to split a convexity-block master weight.
    MasterWeightBranch,
    Internal(String),
}

impl fmt::Display for BpError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BpError::InvalidModel(v) => write!(f, "invalid model: {} violations", v.len()),
            BpError::Cg(e) => write!(f, "node column generation failed: {}", e),
            BpError::IntegralBranchValue(v) => {
                write!(f, "refusing to branch on integral value {}", v)
            }
            BpError::MasterWeightBranch => write!(
                f,
                "refusing to branch on a convexity-block master weight; branch on original variables"
            ),
            BpError::Internal(m) => write!(f, "internal error: {}", m),
        }
    }
}

impl std::error::Error for BpError {}

impl From<CgError> for BpError {
    fn from(e: CgError) -> Self {
        BpError::Cg(e)
    }
}

/// Keep exactly the columns whose original values satisfy the variable
/// bounds; artificials always stay. The pricers regenerate anything a child
/// still needs under the same bounds.
pub fn filter_columns(model: &CompactModel, pool: &RmpState, vars: &VarBounds) -> RmpState {
    pool.retain_columns(|col| {
        if col.is_artificial {
            return true;
        }
        let block_id = match col.block_id {
            Some(b) => b,
            None => return true,
        };
        let block = match model.blocks.iter().find(|b| b.id == block_id) {
            Some(b) => b,
            None => return false,
        };
        for (local, v) in col.original_values.iter().enumerate() {
            let g = block.var_start + local;
            if let Some(&(lo, hi)) = vars.get(&g) {
                if *v < lo - 1e-9 || *v > hi + 1e-9 {
                    return false;
                }
            }
        }
        true
    })
}

/// Split a node on a fractional quantity into floor/ceil children.
pub fn branch(
    model: &CompactModel,
    parent: &BpNode,
    parent_pool: &RmpState,
    target: &FractionalTarget,
    next_id: &mut usize,
) -> Result<(BpNode, BpNode), BpError> {
    let value = target.value();
    if util::frac_distance(value) <= TOL_INT {
        return Err(BpError::IntegralBranchValue(value));
    }
    let mut down = parent.bounds.clone();
    let mut up = parent.bounds.clone();
    match *target {
        FractionalTarget::OriginalVar { global_var, .. } => {
            let (lo, hi) = parent
                .bounds
                .vars
                .get(&global_var)
                .copied()
                .unwrap_or_else(|| {
                    let v = &model.variables[global_var];
                    (v.lower, v.upper)
                });
            down.vars.insert(global_var, (lo, value.floor().min(hi)));
            up.vars.insert(global_var, (value.ceil().max(lo), hi));
        }
        FractionalTarget::PatternCount {
            column,
            fingerprint,
            ..
        } => {
            let col = parent_pool
                .columns
                .get(column)
                .ok_or_else(|| BpError::Internal("pattern column out of range".into()))?;
            let aggregated = col.block_id.is_some_and(|b| {
                model
                    .blocks
                    .iter()
                    .any(|blk| blk.id == b && blk.is_aggregated())
            });
            if !aggregated {
                return Err(BpError::MasterWeightBranch);
            }
            let (lo, hi) = parent
                .bounds
                .weights
                .get(&fingerprint)
                .copied()
                .unwrap_or((0.0, f64::INFINITY));
            down.weights
                .insert(fingerprint, (lo, value.floor().min(hi)));
            up.weights.insert(fingerprint, (value.ceil().max(lo), hi));
        }
    }

    let make_child = |bounds: BranchingBounds, id: usize| -> BpNode {
        let mut rmp = filter_columns(model, parent_pool, &bounds.vars);
        rmp.weight_bounds = bounds.weights.clone();
        BpNode {
            id,
            parent: Some(parent.id),
            bounds,
            node_lb: parent.node_lb,
            status: NodeStatus::Open,
            depth: parent.depth + 1,
            rmp: Some(rmp),
        }
    };
    // the ceil child first: rounding a fractional quantity up tends to
    // reach integrality sooner, so ties in bound-based selection dive there
    let a = make_child(up, *next_id);
    let b = make_child(down, *next_id + 1);
    *next_id += 2;
    Ok((a, b))
}

/// Pick the next node to process.
pub fn select_next(nodes: &[BpNode], open: &[usize], strategy: NodeStrategy) -> Option<usize> {
    open.iter().copied().min_by(|&a, &b| {
        let na = &nodes[a];
        let nb = &nodes[b];
        match strategy {
            NodeStrategy::BestFirst => na
                .node_lb
                .partial_cmp(&nb.node_lb)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(na.id.cmp(&nb.id)),
            NodeStrategy::Dfs => nb.depth.cmp(&na.depth).then(na.id.cmp(&nb.id)),
        }
    })
}

/// Retain the `width` best-bound node ids (ties by id); the rest are
/// beam-pruned.
pub fn beam_select(
    nodes: &[BpNode],
    candidates: &[usize],
    width: usize,
) -> (Vec<usize>, Vec<usize>) {
    let mut sorted: Vec<usize> = candidates.to_vec();
    sorted.sort_by(|&a, &b| {
        nodes[a]
            .node_lb
            .partial_cmp(&nodes[b].node_lb)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(nodes[a].id.cmp(&nodes[b].id))
    });
    let kept: Vec<usize> = sorted.iter().copied().take(width).collect();
    let dropped: Vec<usize> = sorted.iter().copied().skip(width).collect();
    (kept, dropped)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NodeOutcome {
    Pruned,
    Fathomed,
    Branched,
    Infeasible,
}

// The pure node rule: prune on bound dominance, fathom on an improving
// integral value, branch otherwise.
fn node_rule(value: f64, integral: bool, upper_bound: f64) -> NodeOutcome {
    if value >= upper_bound - 1e-6 {
        NodeOutcome::Pruned
    } else if integral {
        NodeOutcome::Fathomed
    } else {
        NodeOutcome::Branched
    }
}

struct Search<'a> {
    model: &'a CompactModel,
    pricer: &'a dyn Pricer,
    config: &'a BpConfig,
    nodes: Vec<BpNode>,
    open: Vec<usize>,
    incumbent: Option<IntegerSolution>,
    upper_bound: f64,
    reported_lb: f64,
    nodes_explored: usize,
    cg_iterations: usize,
    history: Vec<BpHistory>,
    beam_pruned: bool,
    next_id: usize,
    integral_objective: bool,
    started: Instant,
}

impl Search<'_> {
    fn effective_bound(&self, value: f64) -> f64 {
        if self.integral_objective {
            (value - 1e-6).ceil()
        } else {
            value
        }
    }

    fn open_lb(&self) -> f64 {
        self.open
            .iter()
            .map(|&i| self.nodes[i].node_lb)
            .fold(f64::INFINITY, f64::min)
    }

    fn record(&mut self) {
        let open_lb = self.open_lb();
        let lb = if self.open.is_empty() {
            if self.incumbent.is_some() && !self.beam_pruned {
                self.upper_bound
            } else {
                self.reported_lb
            }
        } else {
            open_lb.min(self.upper_bound)
        };
        self.reported_lb = self.reported_lb.max(lb);
        self.history.push(BpHistory {
            node_index: self.nodes_explored,
            upper_bound: self.upper_bound,
            lower_bound: self.reported_lb,
            wall_ms: self.started.elapsed().as_millis(),
        });
    }

    fn try_update_incumbent(&mut self, candidate: IntegerSolution) {
        if candidate.objective < self.upper_bound - 1e-9 {
            self.upper_bound = candidate.objective;
            self.incumbent = Some(candidate);
        }
    }

    // Run CG on one node and apply the node rule. The node's pool is
    // consumed; children receive filtered copies.
    fn process(&mut self, id: usize) -> Result<NodeOutcome, BpError> {
        let mut node = self.nodes[id].clone();
        let mut rmp = node
            .rmp
            .take()
            .ok_or_else(|| BpError::Internal("node pool missing".into()))?;
        self.nodes[id].rmp = None;
        self.nodes_explored += 1;

        // bound dominance may have arrived since the node was created
        if node.node_lb >= self.upper_bound - 1e-6 {
            self.nodes[id].status = NodeStatus::Pruned;
            self.record();
            return Ok(NodeOutcome::Pruned);
        }

        let cg = run_cg_bounded(
            self.model,
            &mut rmp,
            self.pricer,
            &self.config.cg,
            &node.bounds.vars,
        )?;
        self.cg_iterations += cg.iterations;
        if cg.artificials_active {
            self.nodes[id].status = NodeStatus::InfeasibleNode;
            self.record();
            return Ok(NodeOutcome::Infeasible);
        }

        let value = self.effective_bound(cg.objective);
        // the bound can only tighten along the path
        node.node_lb = value.max(node.node_lb);
        self.nodes[id].node_lb = node.node_lb;

        let target = select_fractional(self.model, &rmp, &cg.weights);
        let outcome = node_rule(node.node_lb, target.is_none(), self.upper_bound);
        match outcome {
            NodeOutcome::Pruned => {
                self.nodes[id].status = NodeStatus::Pruned;
            }
            NodeOutcome::Fathomed => {
                let recovered = recover_original_solution(self.model, &rmp, &cg.weights);
                let solution = integral_solution_from(self.model, &rmp, &recovered, cg.objective)?;
                self.try_update_incumbent(solution);
                self.nodes[id].status = NodeStatus::Fathomed;
            }
            NodeOutcome::Branched => {
                let target = target.expect("fractional target exists when branching");
                let (a, b) = branch(self.model, &node, &rmp, &target, &mut self.next_id)?;
                self.nodes[id].status = NodeStatus::Branched;
                self.open.push(a.id);
                self.open.push(b.id);
                self.nodes.push(a);
                self.nodes.push(b);
            }
            NodeOutcome::Infeasible => unreachable!("handled above"),
        }
        self.record();
        Ok(outcome)
    }

    fn out_of_budget(&self) -> Option<BpTermination> {
        if let Some(limit) = self.config.node_limit {
            if self.nodes_explored >= limit {
                return Some(BpTermination::NodeLimit);
            }
        }
        if let Some(limit) = self.config.time_limit {
            if self.started.elapsed() > limit {
                return Some(BpTermination::TimeLimit);
            }
        }
        None
    }
}

// Convert an integral recovered solution into a verified IntegerSolution.
// The objective is recomputed from the assembled parts so integral data
// yields an exact value instead of the LP's float residue.
fn integral_solution_from(
    model: &CompactModel,
    rmp: &RmpState,
    recovered: &crate::master::RecoveredSolution,
    lp_objective: f64,
) -> Result<IntegerSolution, BpError> {
    let mut block_points = Vec::with_capacity(model.blocks.len());
    for (pos, block) in model.blocks.iter().enumerate() {
        if block.is_aggregated() {
            block_points.push(Vec::new());
        } else {
            block_points.push(
                recovered.block_values[pos]
                    .iter()
                    .map(|v| v.round())
                    .collect(),
            );
        }
    }
    let patterns: Vec<(Vec<f64>, u32)> = recovered
        .patterns
        .iter()
        .map(|&(ci, w)| (rmp.columns[ci].original_values.clone(), w.round() as u32))
        .collect();

    let mut objective = 0.0;
    for (pos, block) in model.blocks.iter().enumerate() {
        if !block.is_aggregated() {
            let costs = &model.costs[block.var_range()];
            objective += costs
                .iter()
                .zip(&block_points[pos])
                .map(|(c, v)| c * v)
                .sum::<f64>();
        }
    }
    if let Some(block) = model.blocks.iter().find(|b| b.is_aggregated()) {
        let costs = &model.costs[block.var_range()];
        for (values, n) in &patterns {
            objective += *n as f64 * costs.iter().zip(values).map(|(c, v)| c * v).sum::<f64>();
        }
    }
    debug_assert!((objective - lp_objective).abs() <= 1e-6 * (1.0 + objective.abs()));

    let solution = IntegerSolution {
        objective,
        block_points,
        patterns,
    };
    crate::colgen::verify_solution(model, &solution).map_err(|why| {
        BpError::Internal(format!("fathomed solution failed verification: {}", why))
    })?;
    Ok(solution)
}

/// Branch-and-price from a warm start. With exact pricing and no beam the
/// returned objective is the integer optimum.
pub fn run_bp(
    model: &CompactModel,
    pricer: &dyn Pricer,
    initial_columns: Vec<Column>,
    config: &BpConfig,
) -> Result<BpResult, BpError> {
    let violations = validate(model);
    if !violations.is_empty() {
        return Err(BpError::InvalidModel(violations));
    }

    let nonnegative =
        model.costs.iter().all(|c| *c >= 0.0) && model.variables.iter().all(|v| v.lower >= 0.0);
    let mut search = Search {
        model,
        pricer,
        config,
        nodes: Vec::new(),
        open: Vec::new(),
        incumbent: None,
        upper_bound: f64::INFINITY,
        reported_lb: if nonnegative { 0.0 } else { f64::NEG_INFINITY },
        nodes_explored: 0,
        cg_iterations: 0,
        history: Vec::new(),
        beam_pruned: false,
        next_id: 1,
        integral_objective: model.integral_objective(),
        started: Instant::now(),
    };

    // root node with the warm-started master
    let root_rmp = init_rmp(model, initial_columns);
    search.nodes.push(BpNode {
        id: 0,
        parent: None,
        bounds: BranchingBounds::default(),
        node_lb: search.reported_lb.max(f64::NEG_INFINITY),
        status: NodeStatus::Open,
        depth: 0,
        rmp: Some(root_rmp),
    });
    search.open.push(0);

    // root: run CG once to seed the incumbent with the rounding heuristic
    {
        let id = 0usize;
        search.open.retain(|&x| x != id);
        let mut node = search.nodes[id].clone();
        let mut rmp = node.rmp.take().expect("root pool");
        search.nodes[id].rmp = None;
        search.nodes_explored += 1;
        let cg = run_cg_bounded(model, &mut rmp, pricer, &config.cg, &node.bounds.vars)?;
        search.cg_iterations += cg.iterations;
        if cg.artificials_active {
            search.nodes[id].status = NodeStatus::InfeasibleNode;
            search.record();
            return Ok(finish(search, BpTermination::Infeasible));
        }
        if search.reported_lb == f64::NEG_INFINITY && cg.lagrangian_lb > f64::NEG_INFINITY {
            search.reported_lb = cg.lagrangian_lb.min(cg.objective);
        }
        let value = search.effective_bound(cg.objective);
        search.nodes[id].node_lb = value;
        node.node_lb = value;

        if let Ok(rounded) = round_to_integer(model, &rmp, &cg, pricer) {
            search.try_update_incumbent(rounded);
        }

        let target = select_fractional(model, &rmp, &cg.weights);
        match node_rule(value, target.is_none(), search.upper_bound) {
            NodeOutcome::Pruned => search.nodes[id].status = NodeStatus::Pruned,
            NodeOutcome::Fathomed => {
                let recovered = recover_original_solution(model, &rmp, &cg.weights);
                let solution = integral_solution_from(model, &rmp, &recovered, cg.objective)?;
                search.try_update_incumbent(solution);
                search.nodes[id].status = NodeStatus::Fathomed;
            }
            NodeOutcome::Branched => {
                let target = target.expect("fractional");
                let (a, b) = branch(model, &node, &rmp, &target, &mut search.next_id)?;
                search.nodes[id].status = NodeStatus::Branched;
                search.open.push(a.id);
                search.open.push(b.id);
                search.nodes.push(a);
                search.nodes.push(b);
            }
            NodeOutcome::Infeasible => unreachable!(),
        }
        search.record();
    }

    let termination = match config.beam_width {
        None => run_exact_loop(&mut search)?,
        Some(width) => run_beam_loop(&mut search, width.max(1))?,
    };
    Ok(finish(search, termination))
}

fn run_exact_loop(search: &mut Search) -> Result<BpTermination, BpError> {
    loop {
        if search.open.is_empty() {
            return Ok(if search.incumbent.is_some() {
                BpTermination::Optimal
            } else {
                BpTermination::Infeasible
            });
        }
        if let Some(term) = search.out_of_budget() {
            return Ok(term);
        }
        let id = select_next(&search.nodes, &search.open, search.config.strategy)
            .expect("open set nonempty");
        search.open.retain(|&x| x != id);
        search.process(id)?;
    }
}

// Depth-synchronized beam: process every open node of the current depth,
// then keep only the best `width` of the next depth's children.
fn run_beam_loop(search: &mut Search, width: usize) -> Result<BpTermination, BpError> {
    let mut depth = 1usize; // root already processed
    loop {
        if search.open.is_empty() {
            return Ok(if search.beam_pruned {
                BpTermination::BeamExhausted
            } else if search.incumbent.is_some() {
                BpTermination::Optimal
            } else {
                BpTermination::Infeasible
            });
        }
        if let Some(term) = search.out_of_budget() {
            return Ok(term);
        }
        let level: Vec<usize> = search
            .open
            .iter()
            .copied()
            .filter(|&i| search.nodes[i].depth == depth)
            .collect();
        if level.is_empty() {
            depth += 1;
            continue;
        }
        let (kept, dropped) = beam_select(&search.nodes, &level, width);
        if !dropped.is_empty() {
            search.beam_pruned = true;
        }
        for id in dropped {
            search.nodes[id].status = NodeStatus::BeamPruned;
            search.open.retain(|&x| x != id);
        }
        for id in kept {
            if search.out_of_budget().is_some() {
                break;
            }
            search.open.retain(|&x| x != id);
            search.process(id)?;
        }
        depth += 1;
    }
}

fn finish(search: Search, termination: BpTermination) -> BpResult {
    let optimal = termination == BpTermination::Optimal;
    let mut lower_bound = search.reported_lb;
    if optimal {
        lower_bound = search.upper_bound;
    }
    BpResult {
        objective: search.incumbent.as_ref().map(|s| s.objective),
        solution: search.incumbent,
        optimal,
        beam_pruned: search.beam_pruned,
        nodes_explored: search.nodes_explored,
        cg_iterations: search.cg_iterations,
        lower_bound,
        upper_bound: search.upper_bound,
        history: search.history,
        termination,
    }
}

/// Render the UB/LB history as the CSV the CLI emits.
pub fn history_to_csv(history: &[BpHistory]) -> String {
    let mut out = String::from("node_index,upper_bound,lower_bound,wall_ms\n");
    for h in history {
        out.push_str(&format!(
            "{},{},{},{}\n",
            h.node_index, h.upper_bound, h.lower_bound, h.wall_ms
        ));
    }
    out
}
