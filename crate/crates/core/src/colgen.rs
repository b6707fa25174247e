//! The column-generation driver.
//!
//! One iteration: solve the LRMP, hand its duals to the pricers, add every
//! improving column, repeat. The loop stops when an *exact* pricing round
//! certifies that no block has a column below `-rc_tolerance` (heuristic
//! silence is not a certificate), or when the iteration or time cap fires.
//! A per-iteration trace is part of the public result.

use crate::master::{
    add_columns, recover_original_solution, solve_lrmp, Column, DualPrices, MasterError, RmpState,
};
use crate::model::{block_submodel, BlockSubmodel, CompactModel};
use crate::pricing::{Pricer, PricerRequest, PricerResult, PricingError, PricingMode};
use crate::util::{self, TOL_INT};
use std::collections::BTreeMap;
use std::fmt;
use std::time::{Duration, Instant};

#[derive(Clone, Debug)]
pub struct CgConfig {
    /// Reduced-cost convergence tolerance (epsilon in the stopping rule).
    pub rc_tolerance: f64,
    /// Long-tail cap on LRMP solves.
    pub max_iterations: usize,
    pub columns_per_round: usize,
    /// Try a cheap pricer first and fall back to the exact one only when it
    /// comes up empty; termination always requires the exact round.
    pub heuristic_then_exact: bool,
    pub time_limit: Option<Duration>,
}

impl Default for CgConfig {
    fn default() -> Self {
        CgConfig {
            rc_tolerance: 1e-6,
            max_iterations: 500,
            columns_per_round: 5,
            heuristic_then_exact: true,
            time_limit: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CgTermination {
    Converged,
    IterationCap,
    TimeLimit,
}

#[derive(Clone, Debug)]
pub struct CgIteration {
    pub iteration: usize,
    pub lrmp_objective: f64,
    /// Minimum reduced cost seen in this round's pricing (NaN when no
    /// pricing ran, e.g. the final solve of a capped run).
    pub best_reduced_cost: f64,
    /// Valid Lagrangian lower bound, when this round priced exactly.
    pub lagrangian_lb: Option<f64>,
    pub columns_added: usize,
    pub wall_ms: u128,
}

#[derive(Clone, Debug)]
pub struct CgResult {
    pub objective: f64,
    pub duals: DualPrices,
    pub weights: Vec<f64>,
    pub iterations: usize,
    pub columns_generated: usize,
    /// Best valid Lagrangian lower bound on the original optimum observed
    /// during the run; `-inf` if no exact round completed.
    pub lagrangian_lb: f64,
    pub termination: CgTermination,
    pub trace: Vec<CgIteration>,
    /// An artificial column is still active: the original problem is
    /// infeasible (or the master was under-initialized).
    pub artificials_active: bool,
}

#[derive(Debug)]
pub enum CgError {
    Master(MasterError),
    Pricing(PricingError),
    /// Exact pricing reported improving columns but none could be added;
    /// indicates a pricer that ignores the exclusion set.
    Stalled,
}

impl fmt::Display for CgError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CgError::Master(e) => write!(f, "{}", e),
            CgError::Pricing(e) => write!(f, "{}", e),
            CgError::Stalled => write!(f, "pricing stalled: improving columns were all duplicates"),
        }
    }
}

impl std::error::Error for CgError {}

impl From<MasterError> for CgError {
    fn from(e: MasterError) -> Self {
        CgError::Master(e)
    }
}

impl From<PricingError> for CgError {
    fn from(e: PricingError) -> Self {
        CgError::Pricing(e)
    }
}

/// Variable-bound tightenings imposed by the tree search, keyed by global
/// variable index; entries replace the model bounds for those variables.
pub type VarBounds = BTreeMap<usize, (f64, f64)>;

fn effective_bounds(
    model: &CompactModel,
    sub: &BlockSubmodel,
    var_bounds: &VarBounds,
) -> Vec<(f64, f64)> {
    (0..sub.num_vars())
        .map(|j| {
            let g = sub.var_offset + j;
            var_bounds
                .get(&g)
                .copied()
                .unwrap_or((model.variables[g].lower, model.variables[g].upper))
        })
        .collect()
}

struct PricingRound {
    columns: Vec<Column>,
    /// (block position, best reduced cost, exact) per block.
    per_block: Vec<(usize, f64, bool)>,
}

#[allow(clippy::too_many_arguments)]
fn price_all(
    model: &CompactModel,
    rmp: &RmpState,
    subs: &[BlockSubmodel],
    duals: &DualPrices,
    var_bounds: &VarBounds,
    pricer: &dyn Pricer,
    config: &CgConfig,
    mode: PricingMode,
) -> Result<PricingRound, CgError> {
    let mut columns = Vec::new();
    let mut per_block = Vec::new();
    for (pos, sub) in subs.iter().enumerate() {
        let bounds = effective_bounds(model, sub, var_bounds);
        let req = PricerRequest {
            submodel: sub,
            linking_duals: &duals.linking,
            convexity_dual: duals.convexity[pos],
            bounds: &bounds,
            mode,
            max_columns: config.columns_per_round,
            rc_tolerance: config.rc_tolerance,
            excluded: rmp.fingerprints(),
        };
        let result: PricerResult = pricer.price_block(&req)?;
        per_block.push((pos, result.best_reduced_cost, result.exact));
        for pc in result.columns {
            columns.push(pc.column);
        }
    }
    Ok(PricingRound { columns, per_block })
}

/// Valid lower bound on the original optimum from one exact pricing round:
/// convexity blocks shift their convexity dual by the block's minimum
/// reduced cost, aggregated blocks contribute `multiplicity * min(rc, 0)`.
/// Refuses (None) when any block was priced inexactly or when active weight
/// bounds break the pool strong-duality identity the formula rests on.
pub fn lagrangian_bound(
    model: &CompactModel,
    rmp: &RmpState,
    lrmp_objective: f64,
    per_block: &[(usize, f64, bool)],
) -> Option<f64> {
    if per_block.iter().any(|(_, _, exact)| !exact) {
        return None;
    }
    let bounds_active = rmp
        .weight_bounds
        .values()
        .any(|(lo, hi)| *lo > 0.0 || hi.is_finite());
    if bounds_active {
        return None;
    }
    let mut lb = lrmp_objective;
    for &(pos, rc, _) in per_block {
        let block = &model.blocks[pos];
        match block.multiplicity {
            Some(m) => {
                if rc < 0.0 {
                    lb += m as f64 * rc;
                }
            }
            None => {
                if rc.is_infinite() {
                    return Some(f64::INFINITY);
                }
                lb += rc;
            }
        }
    }
    Some(lb)
}

pub fn run_cg(
    model: &CompactModel,
    rmp: &mut RmpState,
    pricer: &dyn Pricer,
    config: &CgConfig,
) -> Result<CgResult, CgError> {
    run_cg_bounded(model, rmp, pricer, config, &VarBounds::new())
}

/// Column generation under tree-node variable bounds; the bounds are also
/// honored by every pricer call.
pub fn run_cg_bounded(
    model: &CompactModel,
    rmp: &mut RmpState,
    pricer: &dyn Pricer,
    config: &CgConfig,
    var_bounds: &VarBounds,
) -> Result<CgResult, CgError> {
    let started = Instant::now();
    let subs: Vec<BlockSubmodel> = model
        .blocks
        .iter()
        .map(|b| block_submodel(model, b.id).expect("validated model"))
        .collect();

    let mut trace: Vec<CgIteration> = Vec::new();
    let mut columns_generated = 0usize;
    let mut best_lagrangian = f64::NEG_INFINITY;
    let mut termination = CgTermination::IterationCap;
    let mut last: Option<crate::master::LrmpSolution> = None;

    let mut iteration = 0usize;
    while iteration < config.max_iterations {
        iteration += 1;
        let lrmp = solve_lrmp(model, rmp)?;
        last = Some(lrmp.clone());

        if let Some(limit) = config.time_limit {
            if started.elapsed() > limit {
                termination = CgTermination::TimeLimit;
                trace.push(CgIteration {
                    iteration,
                    lrmp_objective: lrmp.objective,
                    best_reduced_cost: f64::NAN,
                    lagrangian_lb: None,
                    columns_added: 0,
                    wall_ms: started.elapsed().as_millis(),
                });
                break;
            }
        }

        // heuristic phase: keep iterating as long as it lands new columns
        if config.heuristic_then_exact {
            let h = price_all(
                model,
                rmp,
                &subs,
                &lrmp.duals,
                var_bounds,
                pricer,
                config,
                PricingMode::Heuristic,
            )?;
            if !h.columns.is_empty() {
                let best_rc = h
                    .per_block
                    .iter()
                    .map(|(_, rc, _)| *rc)
                    .fold(f64::INFINITY, f64::min);
                let added = add_columns(model, rmp, h.columns);
                if added > 0 {
                    columns_generated += added;
                    trace.push(CgIteration {
                        iteration,
                        lrmp_objective: lrmp.objective,
                        best_reduced_cost: best_rc,
                        lagrangian_lb: None,
                        columns_added: added,
                        wall_ms: started.elapsed().as_millis(),
                    });
                    continue;
                }
                // all heuristic finds were duplicates: escalate to exact
            }
        }

        let round = price_all(
            model,
            rmp,
            &subs,
            &lrmp.duals,
            var_bounds,
            pricer,
            config,
            PricingMode::Exact,
        )?;
        let best_rc = round
            .per_block
            .iter()
            .map(|(_, rc, _)| *rc)
            .fold(f64::INFINITY, f64::min);
        let lagrangian = lagrangian_bound(model, rmp, lrmp.objective, &round.per_block);
        if let Some(lb) = lagrangian {
            best_lagrangian = best_lagrangian.max(lb);
        }

        if best_rc >= -config.rc_tolerance {
            termination = CgTermination::Converged;
            trace.push(CgIteration {
                iteration,
                lrmp_objective: lrmp.objective,
                best_reduced_cost: best_rc,
                lagrangian_lb: lagrangian,
                columns_added: 0,
                wall_ms: started.elapsed().as_millis(),
            });
            break;
        }

        let added = add_columns(model, rmp, round.columns);
        columns_generated += added;
        trace.push(CgIteration {
            iteration,
            lrmp_objective: lrmp.objective,
            best_reduced_cost: best_rc,
            lagrangian_lb: lagrangian,
            columns_added: added,
            wall_ms: started.elapsed().as_millis(),
        });
        if added == 0 {
            // the exact round claimed improvement yet produced nothing new
            return Err(CgError::Stalled);
        }

        util::log_debug(|| {
            format!(
                "cg iter {}: obj {:.6}, best rc {:.6}, +{} columns",
                iteration, lrmp.objective, best_rc, added
            )
        });
    }

    let last = match last {
        Some(l) => l,
        None => solve_lrmp(model, rmp)?,
    };
    let recovered = recover_original_solution(model, rmp, &last.weights);

    Ok(CgResult {
        objective: last.objective,
        duals: last.duals,
        weights: last.weights,
        iterations: iteration,
        columns_generated,
        lagrangian_lb: best_lagrangian,
        termination,
        trace,
        artificials_active: recovered.artificial_active,
    })
}

/// Render trace rows as the CSV the CLI emits.
pub fn trace_to_csv(trace: &[CgIteration]) -> String {
    let mut out = String::from("iteration,lrmp_obj,best_rc,lagrangian_lb,columns_added,wall_ms\n");
    for t in trace {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            t.iteration,
            t.lrmp_objective,
            if t.best_reduced_cost.is_nan() {
                String::new()
            } else {
                format!("{}", t.best_reduced_cost)
            },
            t.lagrangian_lb.map_or(String::new(), |v| format!("{}", v)),
            t.columns_added,
            t.wall_ms
        ));
    }
    out
}

// ---------------------------------------------------------------------------
// rounding
// ---------------------------------------------------------------------------

/// A feasible integer solution assembled from master weights.
#[derive(Clone, Debug)]
pub struct IntegerSolution {
    pub objective: f64,
    /// Chosen point per convexity block, by block position (empty vectors
    /// for aggregated blocks).
    pub block_points: Vec<Vec<f64>>,
    /// Pattern multiset per aggregated block: (original values, count).
    pub patterns: Vec<(Vec<f64>, u32)>,
}

#[derive(Debug)]
pub enum RoundingError {
    /// No feasible completion found; the caller falls back to the tree
    /// search.
    RepairFailed(String),
    Pricing(PricingError),
}

impl fmt::Display for RoundingError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RoundingError::RepairFailed(m) => write!(f, "rounding repair failed: {}", m),
            RoundingError::Pricing(e) => write!(f, "rounding repair pricing failed: {}", e),
        }
    }
}

impl std::error::Error for RoundingError {}

fn linking_activity(model: &CompactModel, solution: &IntegerSolution) -> Vec<f64> {
    let mut activity = vec![0.0; model.linking_rows.len()];
    for (pos, block) in model.blocks.iter().enumerate() {
        if block.is_aggregated() {
            continue;
        }
        let point = &solution.block_points[pos];
        for (i, row) in model.linking_rows.iter().enumerate() {
            let coeffs = &row.coeffs[block.var_range()];
            activity[i] += coeffs.iter().zip(point).map(|(a, v)| a * v).sum::<f64>();
        }
    }
    // patterns belong to the (single) aggregated block
    if let Some(block) = model.blocks.iter().find(|b| b.is_aggregated()) {
        for (values, count) in &solution.patterns {
            for (i, row) in model.linking_rows.iter().enumerate() {
                let coeffs = &row.coeffs[block.var_range()];
                activity[i] +=
                    *count as f64 * coeffs.iter().zip(values).map(|(a, v)| a * v).sum::<f64>();
            }
        }
    }
    activity
}

/// Check an assembled integer solution against the compact model: linking
/// rows, per-block feasibility of every chosen point, multiplicity caps.
pub fn verify_solution(model: &CompactModel, solution: &IntegerSolution) -> Result<(), String> {
    let activity = linking_activity(model, solution);
    for (i, row) in model.linking_rows.iter().enumerate() {
        let ok = match row.relation {
            crate::lp::Relation::Le => activity[i] <= row.rhs + 1e-6,
            crate::lp::Relation::Ge => activity[i] >= row.rhs - 1e-6,
            crate::lp::Relation::Eq => (activity[i] - row.rhs).abs() <= 1e-6,
        };
        if !ok {
            return Err(format!(
                "linking row {} violated: activity {} vs rhs {}",
                i, activity[i], row.rhs
            ));
        }
    }
    for (pos, block) in model.blocks.iter().enumerate() {
        let sub = block_submodel(model, block.id).expect("validated model");
        if block.is_aggregated() {
            let total: u32 = solution.patterns.iter().map(|(_, n)| *n).sum();
            if let Some(m) = block.multiplicity {
                if total > m {
                    return Err(format!("{} patterns exceed multiplicity {}", total, m));
                }
            }
            for (values, _) in &solution.patterns {
                sub.check_point(values, 1e-6)?;
            }
        } else {
            sub.check_point(&solution.block_points[pos], 1e-6)?;
        }
    }
    Ok(())
}

/// Greedy rounding of a CG result into a verified integer solution.
///
/// Fixes near-integral weights, rounds the rest up in decreasing-weight
/// order, then runs one repair pass: covering rows re-price the aggregated
/// block against the unmet residual; overloaded capacity rows re-route one
/// convexity block at a time on the residual. Returns `RepairFailed` rather
/// than an infeasible answer.
pub fn round_to_integer(
    model: &CompactModel,
    rmp: &RmpState,
    cg: &CgResult,
    pricer: &dyn Pricer,
) -> Result<IntegerSolution, RoundingError> {
    if cg.artificials_active {
        return Err(RoundingError::RepairFailed(
            "artificial columns are still active".into(),
        ));
    }
    let weights = &cg.weights;
    let block_points: Vec<Vec<f64>> = vec![Vec::new(); model.blocks.len()];
    let mut patterns: Vec<(Vec<f64>, u32)> = Vec::new();

    // aggregated blocks: floor the counts, then round remainders up in
    // decreasing order while coverage is still missing
    for block in model.blocks.iter().filter(|b| b.is_aggregated()) {
        let cols = rmp.block_columns(block.id);
        let mut counts: Vec<(usize, u32, f64)> = cols
            .iter()
            .map(|&ci| {
                // columns appended after the last solve carry weight zero
                let w = weights.get(ci).copied().unwrap_or(0.0);
                let fl = (w + TOL_INT).floor().max(0.0) as u32;
                (ci, fl, w - fl as f64)
            })
            .collect();
        counts.sort_by(|a, b| {
            b.2.partial_cmp(&a.2)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(a.0.cmp(&b.0))
        });

        let residual = |counts: &[(usize, u32, f64)], extra: &IntegerSolution| -> Vec<f64> {
            let mut sol = extra.clone();
            sol.patterns = counts
                .iter()
                .filter(|(_, n, _)| *n > 0)
                .map(|(ci, n, _)| (rmp.columns[*ci].original_values.clone(), *n))
                .collect();
            let activity = linking_activity(model, &sol);
            model
                .linking_rows
                .iter()
                .zip(&activity)
                .map(|(row, act)| match row.relation {
                    crate::lp::Relation::Ge => (row.rhs - act).max(0.0),
                    _ => 0.0,
                })
                .collect()
        };

        let base = IntegerSolution {
            objective: 0.0,
            block_points: block_points.clone(),
            patterns: Vec::new(),
        };
        for k in 0..counts.len() {
            let resid = residual(&counts, &base);
            if resid.iter().all(|r| *r <= 1e-9) {
                break;
            }
            if counts[k].2 > TOL_INT {
                counts[k].1 += 1;
            }
        }
        for (ci, n, _) in counts {
            if n > 0 {
                patterns.push((rmp.columns[ci].original_values.clone(), n));
            }
        }
    }

    let mut solution = IntegerSolution {
        objective: 0.0,
        block_points,
        patterns,
    };

    // repair pass 1: unmet covering rows are filled by re-pricing the
    // aggregated block with unit duals on the residual
    for block in model.blocks.iter() {
        if !block.is_aggregated() {
            continue;
        }
        let sub = block_submodel(model, block.id).expect("validated model");
        let cap = block.multiplicity.unwrap_or(u32::MAX);
        let mut guard = 0u32;
        loop {
            let activity = linking_activity(model, &solution);
            let resid: Vec<f64> = model
                .linking_rows
                .iter()
                .zip(&activity)
                .map(|(row, act)| match row.relation {
                    crate::lp::Relation::Ge => (row.rhs - act).max(0.0),
                    _ => 0.0,
                })
                .collect();
            if resid.iter().all(|r| *r <= 1e-9) {
                break;
            }
            let total: u32 = solution.patterns.iter().map(|(_, n)| *n).sum();
            guard += 1;
            if total >= cap || guard > cap {
                return Err(RoundingError::RepairFailed(
                    "covering repair ran out of pattern copies".into(),
                ));
            }
            // price against the unmet rows only
            let duals: Vec<f64> = resid
                .iter()
                .map(|r| if *r > 1e-9 { 1.0 } else { 0.0 })
                .collect();
            let bounds = sub.bounds.clone();
            let req = PricerRequest {
                submodel: &sub,
                linking_duals: &duals,
                convexity_dual: None,
                bounds: &bounds,
                mode: PricingMode::Exact,
                max_columns: 1,
                rc_tolerance: 1e-9,
                excluded: &Default::default(),
            };
            let res = pricer.price_block(&req).map_err(RoundingError::Pricing)?;
            let covering = res
                .columns
                .into_iter()
                .next()
                .map(|pc| pc.column.original_values);
            let values = match covering {
                Some(v) => v,
                None => {
                    return Err(RoundingError::RepairFailed(
                        "no pattern covers the residual demand".into(),
                    ))
                }
            };
            let mut merged = false;
            for (p, n) in solution.patterns.iter_mut() {
                if *p == values {
                    *n += 1;
                    merged = true;
                    break;
                }
            }
            if !merged {
                solution.patterns.push((values, 1));
            }
        }
    }

    // convexity blocks: sequential fit against the residual capacity, the
    // blocks with the largest linking footprint first. A block keeps its
    // heaviest-weight pool column that still fits every <= row; when none
    // fits, one re-pricing against the residual finds the cheapest feasible
    // replacement point.
    {
        let mut order: Vec<usize> = (0..model.blocks.len())
            .filter(|&p| !model.blocks[p].is_aggregated())
            .collect();
        let footprint = |pos: usize| -> f64 {
            let block = &model.blocks[pos];
            rmp.block_columns(block.id)
                .iter()
                .flat_map(|&ci| rmp.columns[ci].linking_coeffs.iter())
                .fold(0.0f64, |a, c| a.max(c.abs()))
        };
        order.sort_by(|&a, &b| {
            footprint(b)
                .partial_cmp(&footprint(a))
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(a.cmp(&b))
        });

        for &pos in &order {
            let block = &model.blocks[pos];
            let activity = linking_activity(model, &solution);
            let resid: Vec<f64> = model
                .linking_rows
                .iter()
                .zip(&activity)
                .map(|(row, act)| row.rhs - act)
                .collect();
            let fits = |col: &crate::master::Column| -> bool {
                model.linking_rows.iter().enumerate().all(|(i, row)| {
                    row.relation != crate::lp::Relation::Le
                        || col.linking_coeffs[i] <= resid[i] + 1e-9
                })
            };
            // heaviest master weight first, ties by pool index
            let mut candidates: Vec<usize> = rmp.block_columns(block.id);
            candidates.sort_by(|&a, &b| {
                let wa = weights.get(a).copied().unwrap_or(0.0);
                let wb = weights.get(b).copied().unwrap_or(0.0);
                wb.partial_cmp(&wa)
                    .unwrap_or(std::cmp::Ordering::Equal)
                    .then(a.cmp(&b))
            });
            let chosen = candidates
                .into_iter()
                .find(|&ci| fits(&rmp.columns[ci]))
                .map(|ci| rmp.columns[ci].original_values.clone());
            let point = match chosen {
                Some(p) => p,
                None => {
                    // re-price on the residual: forbid variables whose own
                    // coefficient cannot fit
                    let sub = block_submodel(model, block.id).expect("validated model");
                    let mut bounds: Vec<(f64, f64)> = (0..sub.num_vars())
                        .map(|j| {
                            let g = sub.var_offset + j;
                            (model.variables[g].lower, model.variables[g].upper)
                        })
                        .collect();
                    for j in 0..sub.num_vars() {
                        for (i, row) in model.linking_rows.iter().enumerate() {
                            if row.relation != crate::lp::Relation::Le {
                                continue;
                            }
                            let a = row.coeffs[sub.var_offset + j];
                            if a > resid[i] + 1e-9 {
                                bounds[j] = (0.0, 0.0);
                            }
                        }
                    }
                    let req = PricerRequest {
                        submodel: &sub,
                        linking_duals: &vec![0.0; model.linking_rows.len()],
                        convexity_dual: Some(1e15), // any feasible point improves
                        bounds: &bounds,
                        mode: PricingMode::Exact,
                        max_columns: 1,
                        rc_tolerance: 1e-9,
                        excluded: &Default::default(),
                    };
                    let res = pricer.price_block(&req).map_err(RoundingError::Pricing)?;
                    match res.columns.into_iter().next() {
                        Some(pc) => pc.column.original_values,
                        None => {
                            return Err(RoundingError::RepairFailed(format!(
                                "no feasible point for block {} under the residual",
                                block.id
                            )))
                        }
                    }
                }
            };
            solution.block_points[pos] = point;
        }
    }

    if let Err(why) = verify_solution(model, &solution) {
        return Err(RoundingError::RepairFailed(why));
    }

    // objective from the assembled solution
    let mut objective = 0.0;
    for (pos, block) in model.blocks.iter().enumerate() {
        if block.is_aggregated() {
            continue;
        }
        let costs = &model.costs[block.var_range()];
        objective += costs
            .iter()
            .zip(&solution.block_points[pos])
            .map(|(c, v)| c * v)
            .sum::<f64>();
    }
    for block in model.blocks.iter().filter(|b| b.is_aggregated()) {
        let costs = &model.costs[block.var_range()];
        for (values, n) in &solution.patterns {
            objective += *n as f64 * costs.iter().zip(values).map(|(c, v)| c * v).sum::<f64>();
        }
    }
    solution.objective = objective;
    Ok(solution)
}
