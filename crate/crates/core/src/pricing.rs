//! Pricing oracles: given dual prices, produce columns with negative reduced
//! cost or certify that none exists.
//!
//! The reduced cost of a block point `x` is
//!
//! ```text
//! rc(x) = cost(x) - pi . linking_coeffs(x) - sigma_block
//!       = sum_j (c_j - pi . L_:j) x_j - sigma_block
//! ```
//!
//! so every pricer works with one effective weight `w_j = c_j - pi . L_:j`
//! per block variable. Dispatch is by the block's structure tag: knapsack
//! blocks run a bounded dynamic program, path blocks run label-setting (or
//! k-shortest-paths as a heuristic), generic blocks are enumerated when
//! integral and bounded, or solved as an LP whose vertex is the extreme
//! point. The [`Pricer`] trait is the extension point for new structures.

use crate::lp::{self, LpConfig, LpProblem, LpStatus, Relation};
use crate::master::Column;
use crate::model::{BlockStructure, BlockSubmodel};
use crate::path::{self, PathError, PathGraph, RcspQuery};
use crate::util;
use std::collections::HashSet;
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PricingMode {
    Exact,
    Heuristic,
}

pub struct PricerRequest<'a> {
    pub submodel: &'a BlockSubmodel,
    /// One dual per linking row.
    pub linking_duals: &'a [f64],
    /// Convexity dual; `None` for aggregated blocks.
    pub convexity_dual: Option<f64>,
    /// Effective variable bounds (model bounds tightened by the current
    /// tree node). Length equals the submodel's variable count.
    pub bounds: &'a [(f64, f64)],
    pub mode: PricingMode,
    /// Cap on the number of improving columns to return.
    pub max_columns: usize,
    pub rc_tolerance: f64,
    /// Fingerprints already in the pool. Exact pricers must certify the
    /// minimum over columns *not* in this set, since pooled columns can
    /// legitimately sit at negative reduced cost when weight-bounded.
    pub excluded: &'a HashSet<u64>,
}

impl<'a> PricerRequest<'a> {
    /// Effective weight of one block variable under the current duals.
    fn var_weight(&self, j: usize) -> f64 {
        let sub = self.submodel;
        let mut w = sub.costs[j];
        for (pi, lc) in self.linking_duals.iter().zip(&sub.linking_coeffs) {
            w -= pi * lc[j];
        }
        w
    }

    fn weights(&self) -> Vec<f64> {
        (0..self.submodel.num_vars())
            .map(|j| self.var_weight(j))
            .collect()
    }

    fn sigma(&self) -> f64 {
        self.convexity_dual.unwrap_or(0.0)
    }
}

#[derive(Clone, Debug)]
pub struct PricedColumn {
    pub column: Column,
    pub reduced_cost: f64,
}

#[derive(Clone, Debug)]
pub struct PricerResult {
    /// Improving columns (reduced cost below `-rc_tolerance`), best first.
    pub columns: Vec<PricedColumn>,
    /// Minimum reduced cost over the block's extreme points outside the
    /// excluded set; `+inf` when the block is infeasible under the bounds.
    /// Only a certificate when `exact` is true.
    pub best_reduced_cost: f64,
    pub exact: bool,
}

impl PricerResult {
    fn infeasible() -> Self {
        PricerResult {
            columns: Vec::new(),
            best_reduced_cost: f64::INFINITY,
            exact: true,
        }
    }
}

#[derive(Debug)]
pub enum PricingError {
    MalformedBlock(String),
    /// Bounded enumeration blew through its point budget.
    EnumerationLimit,
    Unsupported(String),
    Lp(lp::LpError),
}

impl fmt::Display for PricingError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PricingError::MalformedBlock(m) => write!(f, "malformed block: {}", m),
            PricingError::EnumerationLimit => write!(f, "enumeration limit exceeded"),
            PricingError::Unsupported(m) => write!(f, "unsupported block: {}", m),
            PricingError::Lp(e) => write!(f, "pricing LP failed: {}", e),
        }
    }
}

impl std::error::Error for PricingError {}

/// Pricing-problem implementations plug in through this trait.
pub trait Pricer {
    fn price_block(&self, req: &PricerRequest) -> Result<PricerResult, PricingError>;
}

/// Default pricer: dispatches on the block's structure tag.
#[derive(Clone, Copy, Debug, Default)]
pub struct StructurePricer;

impl Pricer for StructurePricer {
    fn price_block(&self, req: &PricerRequest) -> Result<PricerResult, PricingError> {
        price_block(req)
    }
}

pub fn price_block(req: &PricerRequest) -> Result<PricerResult, PricingError> {
    let sub = req.submodel;
    if req.bounds.len() != sub.num_vars() {
        return Err(PricingError::MalformedBlock(format!(
            "{} bounds for {} block variables",
            req.bounds.len(),
            sub.num_vars()
        )));
    }
    if req.bounds.iter().any(|(lo, hi)| lo > hi) {
        return Ok(PricerResult::infeasible());
    }
    match sub.structure {
        BlockStructure::Knapsack => price_knapsack(req),
        BlockStructure::Path => price_path(req),
        BlockStructure::Generic => price_generic(req),
    }
}

// ---------------------------------------------------------------------------
// knapsack blocks
// ---------------------------------------------------------------------------

/// Bounded knapsack by dynamic programming over integer capacity: maximize
/// `profits . counts` subject to `sizes . counts <= capacity` and
/// `counts[i] <= max_count[i]`. Ties prefer smaller counts, so the empty
/// pattern wins under all-zero profits.
pub fn knapsack_dp(
    sizes: &[u32],
    profits: &[f64],
    capacity: u32,
    max_count: &[u32],
) -> (Vec<u32>, f64) {
    let n = sizes.len();
    assert_eq!(profits.len(), n);
    assert_eq!(max_count.len(), n);
    let cap = capacity as usize;
    // dp[i][c]: best value over items 0..i with capacity c
    let mut dp = vec![vec![0.0f64; cap + 1]; n + 1];
    let mut take = vec![vec![0u32; cap + 1]; n];
    for i in 0..n {
        for c in 0..=cap {
            dp[i + 1][c] = dp[i][c];
            take[i][c] = 0;
            if sizes[i] == 0 {
                // zero-size item: grab the full allowance when profitable
                if profits[i] > 0.0 && max_count[i] > 0 {
                    let v = dp[i][c] + profits[i] * max_count[i] as f64;
                    if v > dp[i + 1][c] + 1e-12 {
                        dp[i + 1][c] = v;
                        take[i][c] = max_count[i];
                    }
                }
                continue;
            }
            let most = (c / sizes[i] as usize).min(max_count[i] as usize);
            for k in 1..=most {
                let v = dp[i][c - k * sizes[i] as usize] + profits[i] * k as f64;
                if v > dp[i + 1][c] + 1e-12 {
                    dp[i + 1][c] = v;
                    take[i][c] = k as u32;
                }
            }
        }
    }
    let mut counts = vec![0u32; n];
    let mut c = cap;
    for i in (0..n).rev() {
        let k = take[i][c];
        counts[i] = k;
        c -= k as usize * sizes[i] as usize;
    }
    (counts, dp[n][cap])
}

struct KnapsackShape {
    /// Local index of the binary on/off indicator, if the capacity row is
    /// written as `sizes . items - capacity * indicator <= 0`.
    indicator: Option<usize>,
    items: Vec<usize>,
    sizes: Vec<u32>,
    capacity: u32,
}

fn as_u32(v: f64, what: &str) -> Result<u32, PricingError> {
    let r = v.round();
    if (v - r).abs() > 1e-9 || r < 0.0 || r > u32::MAX as f64 {
        return Err(PricingError::MalformedBlock(format!(
            "{} must be a nonnegative integer, got {}",
            what, v
        )));
    }
    Ok(r as u32)
}

fn knapsack_shape(sub: &BlockSubmodel) -> Result<KnapsackShape, PricingError> {
    if sub.rows.len() != 1 || sub.rows[0].relation != Relation::Le {
        return Err(PricingError::MalformedBlock(
            "knapsack block needs exactly one <= row".into(),
        ));
    }
    let row = &sub.rows[0];
    let negatives: Vec<usize> = (0..sub.num_vars())
        .filter(|&j| row.coeffs[j] < 0.0)
        .collect();
    match negatives.len() {
        0 => {
            let items: Vec<usize> = (0..sub.num_vars()).collect();
            let sizes = items
                .iter()
                .map(|&j| as_u32(row.coeffs[j], "size"))
                .collect::<Result<_, _>>()?;
            Ok(KnapsackShape {
                indicator: None,
                items,
                sizes,
                capacity: as_u32(row.rhs, "capacity")?,
            })
        }
        1 => {
            let ind = negatives[0];
            if row.rhs.abs() > 1e-9 {
                return Err(PricingError::MalformedBlock(
                    "indicator knapsack row must have rhs 0".into(),
                ));
            }
            if sub.bounds[ind] != (0.0, 1.0) || !sub.integer[ind] {
                return Err(PricingError::MalformedBlock(
                    "knapsack indicator must be binary".into(),
                ));
            }
            let items: Vec<usize> = (0..sub.num_vars()).filter(|&j| j != ind).collect();
            let sizes = items
                .iter()
                .map(|&j| as_u32(row.coeffs[j], "size"))
                .collect::<Result<_, _>>()?;
            Ok(KnapsackShape {
                indicator: Some(ind),
                items,
                sizes,
                capacity: as_u32(-row.coeffs[ind], "capacity")?,
            })
        }
        _ => Err(PricingError::MalformedBlock(
            "knapsack row has more than one negative coefficient".into(),
        )),
    }
}

fn effective_int_bounds(
    bounds: &[(f64, f64)],
    j: usize,
    cap_by_size: Option<u32>,
) -> Result<(u32, u32), PricingError> {
    let (lo, hi) = bounds[j];
    let lo = lo.max(0.0).ceil();
    let mut hi = hi.floor();
    if let Some(c) = cap_by_size {
        hi = hi.min(c as f64);
    }
    if hi < lo {
        return Ok((1, 0)); // empty domain marker
    }
    Ok((as_u32(lo, "lower bound")?, as_u32(hi, "upper bound")?))
}

fn make_priced(sub: &BlockSubmodel, values: Vec<f64>, rc: f64) -> PricedColumn {
    PricedColumn {
        column: Column::from_point(sub, values),
        reduced_cost: rc,
    }
}

fn price_knapsack(req: &PricerRequest) -> Result<PricerResult, PricingError> {
    let sub = req.submodel;
    let shape = knapsack_shape(sub)?;
    let w = req.weights();
    let sigma = req.sigma();

    // Zero point: feasible iff the indicator (if any) may be off and every
    // item's lower bound is zero.
    let zero_ok = {
        let ind_ok = match shape.indicator {
            Some(ind) => req.bounds[ind].0 <= 0.0,
            None => true,
        };
        ind_ok && shape.items.iter().all(|&j| req.bounds[j].0 <= 0.0)
    };

    // Pattern side: pre-commit item lower bounds, then DP over the rest.
    let mut base = vec![0u32; shape.items.len()];
    let mut max_extra = vec![0u32; shape.items.len()];
    let mut used: u64 = 0;
    let mut pattern_ok = match shape.indicator {
        Some(ind) => req.bounds[ind].1 >= 1.0,
        None => true,
    };
    if pattern_ok {
        for (k, &j) in shape.items.iter().enumerate() {
            let cap_by_size = if shape.sizes[k] > 0 {
                Some(shape.capacity / shape.sizes[k])
            } else {
                None
            };
            let (lo, hi) = effective_int_bounds(req.bounds, j, cap_by_size)?;
            if lo > hi {
                pattern_ok = false;
                break;
            }
            base[k] = lo;
            max_extra[k] = hi - lo;
            used += (lo * shape.sizes[k]) as u64;
        }
    }
    if pattern_ok && used > shape.capacity as u64 {
        pattern_ok = false;
    }

    if !pattern_ok && !zero_ok {
        return Ok(PricerResult::infeasible());
    }

    let build_values = |counts: &[u32], on: bool| -> Vec<f64> {
        let mut values = vec![0.0; sub.num_vars()];
        if let Some(ind) = shape.indicator {
            values[ind] = if on { 1.0 } else { 0.0 };
        }
        for (k, &j) in shape.items.iter().enumerate() {
            values[j] = counts[k] as f64;
        }
        values
    };
    let rc_of = |values: &[f64]| -> f64 {
        values.iter().zip(&w).map(|(v, wj)| v * wj).sum::<f64>() - sigma
    };

    if req.mode == PricingMode::Heuristic {
        // greedy by profit density
        if !pattern_ok {
            return Ok(PricerResult {
                columns: Vec::new(),
                best_reduced_cost: f64::INFINITY,
                exact: false,
            });
        }
        let mut counts = base.clone();
        let mut left = shape.capacity as i64 - used as i64;
        let mut order: Vec<usize> = (0..shape.items.len()).collect();
        order.sort_by(|&a, &b| {
            let da = -w[shape.items[a]] / shape.sizes[a].max(1) as f64;
            let db = -w[shape.items[b]] / shape.sizes[b].max(1) as f64;
            db.partial_cmp(&da)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(a.cmp(&b))
        });
        for &k in &order {
            if w[shape.items[k]] >= 0.0 {
                continue;
            }
            let fit = if shape.sizes[k] == 0 {
                max_extra[k]
            } else {
                (left / shape.sizes[k] as i64)
                    .max(0)
                    .min(max_extra[k] as i64) as u32
            };
            counts[k] += fit;
            left -= (fit * shape.sizes[k]) as i64;
        }
        let values = build_values(&counts, true);
        let rc = rc_of(&values);
        let mut columns = Vec::new();
        if rc < -req.rc_tolerance {
            let pc = make_priced(sub, values, rc);
            if !req.excluded.contains(&pc.column.fingerprint) {
                columns.push(pc);
            }
        }
        let best = columns
            .first()
            .map(|c| c.reduced_cost)
            .unwrap_or(f64::INFINITY);
        return Ok(PricerResult {
            columns,
            best_reduced_cost: best,
            exact: false,
        });
    }

    // Exact: DP for the best pattern.
    let mut candidates: Vec<(f64, Vec<f64>)> = Vec::new();
    if zero_ok {
        let values = build_values(&vec![0; shape.items.len()], false);
        let rc = rc_of(&values);
        candidates.push((rc, values));
    }
    if pattern_ok {
        let profits: Vec<f64> = shape.items.iter().map(|&j| -w[j]).collect();
        let left = shape.capacity - used as u32;
        let (extra, _) = knapsack_dp(&shape.sizes, &profits, left, &max_extra);
        let counts: Vec<u32> = base.iter().zip(&extra).map(|(b, e)| b + e).collect();
        let values = build_values(&counts, true);
        let rc = rc_of(&values);
        candidates.push((rc, values));
    }
    candidates.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
    let dp_best = candidates.first().expect("at least one side feasible");

    let dp_best_fp = util::fingerprint(sub.block_id as u64 + 1, &dp_best.1);
    if !req.excluded.contains(&dp_best_fp) {
        let best_rc = dp_best.0;
        let mut columns = Vec::new();
        if best_rc < -req.rc_tolerance {
            columns.push(make_priced(sub, dp_best.1.clone(), best_rc));
        }
        return Ok(PricerResult {
            columns,
            best_reduced_cost: best_rc,
            exact: true,
        });
    }

    // The DP optimum is already pooled (possible under pattern-count
    // branching); fall back to bounded enumeration to certify the best
    // pattern outside the pool.
    enumerate_patterns(
        req, &shape, zero_ok, pattern_ok, &base, &max_extra, &w, sigma,
    )
}

#[allow(clippy::too_many_arguments)]
fn enumerate_patterns(
    req: &PricerRequest,
    shape: &KnapsackShape,
    zero_ok: bool,
    pattern_ok: bool,
    base: &[u32],
    max_extra: &[u32],
    w: &[f64],
    sigma: f64,
) -> Result<PricerResult, PricingError> {
    const LIMIT: usize = 2_000_000;
    let sub = req.submodel;
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut improving: Vec<(f64, Vec<f64>)> = Vec::new();
    let mut visited = 0usize;

    let mut consider = |values: Vec<f64>, rc: f64, req: &PricerRequest| {
        let fp = util::fingerprint(sub.block_id as u64 + 1, &values);
        if req.excluded.contains(&fp) {
            return;
        }
        if best.as_ref().map_or(true, |(b, _)| rc < *b - 1e-15) {
            best = Some((rc, values.clone()));
        }
        if rc < -req.rc_tolerance {
            improving.push((rc, values));
        }
    };

    if zero_ok {
        let mut values = vec![0.0; sub.num_vars()];
        if let Some(ind) = shape.indicator {
            values[ind] = 0.0;
        }
        let rc = values.iter().zip(w).map(|(v, wj)| v * wj).sum::<f64>() - sigma;
        consider(values, rc, req);
    }
    if pattern_ok {
        let mut counts = base.to_vec();
        let mut stack_used: u64 = base
            .iter()
            .zip(&shape.sizes)
            .map(|(c, s)| (*c * *s) as u64)
            .sum();
        // depth-first over item counts in index order
        fn rec(
            k: usize,
            counts: &mut Vec<u32>,
            used: &mut u64,
            visited: &mut usize,
            shape: &KnapsackShape,
            base: &[u32],
            max_extra: &[u32],
            sub: &BlockSubmodel,
            w: &[f64],
            sigma: f64,
            req: &PricerRequest,
            consider: &mut dyn FnMut(Vec<f64>, f64, &PricerRequest),
        ) -> Result<(), PricingError> {
            if *visited > LIMIT {
                return Err(PricingError::EnumerationLimit);
            }
            if k == shape.items.len() {
                *visited += 1;
                let mut values = vec![0.0; sub.num_vars()];
                if let Some(ind) = shape.indicator {
                    values[ind] = 1.0;
                }
                for (i, &j) in shape.items.iter().enumerate() {
                    values[j] = counts[i] as f64;
                }
                let rc = values.iter().zip(w).map(|(v, wj)| v * wj).sum::<f64>() - sigma;
                consider(values, rc, req);
                return Ok(());
            }
            let size = shape.sizes[k] as u64;
            for extra in 0..=max_extra[k] {
                let add = extra as u64 * size;
                if *used + add > shape.capacity as u64 {
                    break;
                }
                counts[k] = base[k] + extra;
                *used += add;
                rec(
                    k + 1,
                    counts,
                    used,
                    visited,
                    shape,
                    base,
                    max_extra,
                    sub,
                    w,
                    sigma,
                    req,
                    consider,
                )?;
                *used -= add;
                counts[k] = base[k];
            }
            Ok(())
        }
        rec(
            0,
            &mut counts,
            &mut stack_used,
            &mut visited,
            shape,
            base,
            max_extra,
            sub,
            w,
            sigma,
            req,
            &mut consider,
        )?;
    }

    improving.sort_by(|a, b| {
        a.0.partial_cmp(&b.0)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| util::fingerprint(0, &a.1).cmp(&util::fingerprint(0, &b.1)))
    });
    improving.truncate(req.max_columns);
    Ok(PricerResult {
        columns: improving
            .into_iter()
            .map(|(rc, v)| make_priced(sub, v, rc))
            .collect(),
        best_reduced_cost: best.map(|(rc, _)| rc).unwrap_or(f64::INFINITY),
        exact: true,
    })
}

// ---------------------------------------------------------------------------
// path blocks
// ---------------------------------------------------------------------------

struct PathShape {
    graph: PathGraph,
    source: usize,
    sink: usize,
    /// resource consumptions per (<= row, arc) and their limits
    resources: Vec<Vec<f64>>,
    limits: Vec<f64>,
}

fn path_shape(sub: &BlockSubmodel) -> Result<PathShape, PricingError> {
    let n = sub.num_vars();
    let eq_rows: Vec<usize> = (0..sub.rows.len())
        .filter(|&i| sub.rows[i].relation == Relation::Eq)
        .collect();
    if eq_rows.is_empty() {
        return Err(PricingError::MalformedBlock(
            "path block needs flow-conservation equality rows".into(),
        ));
    }
    let mut source = None;
    let mut sink = None;
    for (node, &ri) in eq_rows.iter().enumerate() {
        let rhs = sub.rows[ri].rhs;
        if (rhs - 1.0).abs() < 1e-9 {
            if source.replace(node).is_some() {
                return Err(PricingError::MalformedBlock("two source rows".into()));
            }
        } else if (rhs + 1.0).abs() < 1e-9 {
            if sink.replace(node).is_some() {
                return Err(PricingError::MalformedBlock("two sink rows".into()));
            }
        } else if rhs.abs() > 1e-9 {
            return Err(PricingError::MalformedBlock(format!(
                "conservation rhs must be -1, 0 or 1, got {}",
                rhs
            )));
        }
    }
    let (source, sink) = match (source, sink) {
        (Some(s), Some(t)) => (s, t),
        _ => {
            return Err(PricingError::MalformedBlock(
                "path block needs one source and one sink row".into(),
            ))
        }
    };

    let mut graph = PathGraph::new(eq_rows.len());
    for j in 0..n {
        let mut tail = None;
        let mut head = None;
        for (node, &ri) in eq_rows.iter().enumerate() {
            let a = sub.rows[ri].coeffs[j];
            if (a - 1.0).abs() < 1e-9 {
                if tail.replace(node).is_some() {
                    return Err(PricingError::MalformedBlock(format!(
                        "arc variable {} leaves two nodes",
                        sub.var_names[j]
                    )));
                }
            } else if (a + 1.0).abs() < 1e-9 {
                if head.replace(node).is_some() {
                    return Err(PricingError::MalformedBlock(format!(
                        "arc variable {} enters two nodes",
                        sub.var_names[j]
                    )));
                }
            } else if a.abs() > 1e-9 {
                return Err(PricingError::MalformedBlock(
                    "conservation coefficients must be -1, 0 or 1".into(),
                ));
            }
        }
        match (tail, head) {
            (Some(t), Some(h)) => {
                let idx = graph.add_arc(t, h);
                debug_assert_eq!(idx, j);
            }
            _ => {
                return Err(PricingError::MalformedBlock(format!(
                    "variable {} is not an arc",
                    sub.var_names[j]
                )))
            }
        }
    }

    let mut resources = Vec::new();
    let mut limits = Vec::new();
    for row in &sub.rows {
        match row.relation {
            Relation::Eq => {}
            Relation::Le => {
                if row.coeffs.iter().any(|a| *a < 0.0) {
                    return Err(PricingError::MalformedBlock(
                        "resource rows need nonnegative consumptions".into(),
                    ));
                }
                resources.push(row.coeffs.clone());
                limits.push(row.rhs);
            }
            Relation::Ge => {
                return Err(PricingError::MalformedBlock(
                    ">= rows are not supported in path blocks".into(),
                ))
            }
        }
    }

    Ok(PathShape {
        graph,
        source,
        sink,
        resources,
        limits,
    })
}

fn price_path(req: &PricerRequest) -> Result<PricerResult, PricingError> {
    let sub = req.submodel;
    let shape = path_shape(sub)?;
    let w = req.weights();
    let sigma = req.sigma();

    let mut forbidden = Vec::new();
    let mut forced = Vec::new();
    for j in 0..sub.num_vars() {
        let (lo, hi) = req.bounds[j];
        if hi < 0.5 {
            forbidden.push(j);
        } else if lo > 0.5 {
            if lo > 1.0 + 1e-9 {
                return Ok(PricerResult::infeasible());
            }
            forced.push(j);
        }
    }
    if forced.iter().any(|f| forbidden.contains(f)) {
        return Ok(PricerResult::infeasible());
    }

    let path_to_column = |arcs: &[usize]| -> Vec<f64> {
        let mut values = vec![0.0; sub.num_vars()];
        for &a in arcs {
            values[a] = 1.0;
        }
        values
    };

    if req.mode == PricingMode::Heuristic {
        // k-shortest-path heuristic; defers to the exact labeler when
        // branching forces arcs or prices go negative on a cyclic graph.
        if !forced.is_empty() {
            return Ok(PricerResult {
                columns: Vec::new(),
                best_reduced_cost: f64::INFINITY,
                exact: false,
            });
        }
        let mut sub_graph = PathGraph::new(shape.graph.num_nodes);
        let mut price_map = Vec::new();
        let mut arc_map = Vec::new();
        for (j, arc) in shape.graph.arcs.iter().enumerate() {
            if !forbidden.contains(&j) {
                sub_graph.add_arc(arc.tail, arc.head);
                price_map.push(w[j]);
                arc_map.push(j);
            }
        }
        let ranked = match path::k_shortest_paths(
            &sub_graph,
            &price_map,
            shape.source,
            shape.sink,
            req.max_columns,
        ) {
            Ok(r) => r,
            Err(PathError::NegativePricesInCyclicGraph) => Vec::new(),
            Err(PathError::BadInput(m)) => return Err(PricingError::MalformedBlock(m)),
            Err(_) => Vec::new(),
        };
        let mut columns = Vec::new();
        let mut best = f64::INFINITY;
        for p in ranked {
            let orig_arcs: Vec<usize> = p.arcs.iter().map(|&a| arc_map[a]).collect();
            let values = path_to_column(&orig_arcs);
            // resource rows still apply
            if sub.check_point(&values, 1e-9).is_err() {
                continue;
            }
            let rc = p.price - sigma;
            best = best.min(rc);
            if rc < -req.rc_tolerance {
                let pc = make_priced(sub, values, rc);
                if !req.excluded.contains(&pc.column.fingerprint) {
                    columns.push(pc);
                }
            }
        }
        return Ok(PricerResult {
            columns,
            best_reduced_cost: best,
            exact: false,
        });
    }

    let query = RcspQuery {
        prices: &w,
        resources: &shape.resources,
        limits: &shape.limits,
        source: shape.source,
        sink: shape.sink,
        forbidden: &forbidden,
        forced: &forced,
        max_results: req.max_columns.max(1),
    };
    let paths = match path::rcsp_label_setting(&shape.graph, &query) {
        Ok(p) => p,
        Err(PathError::NoFeasiblePath) => return Ok(PricerResult::infeasible()),
        Err(PathError::BadInput(m)) => return Err(PricingError::MalformedBlock(m)),
        Err(PathError::TooManyNodes(n)) => {
            return Err(PricingError::Unsupported(format!(
                "{} nodes exceed the exact labeler limit",
                n
            )))
        }
        Err(PathError::NegativePricesInCyclicGraph) => unreachable!("labeler handles negatives"),
    };

    let best = paths[0].price - sigma;
    let mut columns = Vec::new();
    for p in &paths {
        let rc = p.price - sigma;
        if rc < -req.rc_tolerance {
            let pc = make_priced(sub, path_to_column(&p.arcs), rc);
            if !req.excluded.contains(&pc.column.fingerprint) {
                columns.push(pc);
            }
        }
    }
    Ok(PricerResult {
        columns,
        best_reduced_cost: best,
        exact: true,
    })
}

// ---------------------------------------------------------------------------
// generic blocks
// ---------------------------------------------------------------------------

fn price_generic(req: &PricerRequest) -> Result<PricerResult, PricingError> {
    let sub = req.submodel;
    if req.mode == PricingMode::Heuristic {
        // no cheap generic heuristic; the driver escalates to exact
        return Ok(PricerResult {
            columns: Vec::new(),
            best_reduced_cost: f64::INFINITY,
            exact: false,
        });
    }
    let all_integer = sub.integer.iter().all(|i| *i);
    if all_integer {
        return enumerate_generic(req);
    }
    if sub.integer.iter().any(|i| *i) {
        return Err(PricingError::Unsupported(
            "mixed integer/continuous generic blocks".into(),
        ));
    }
    // continuous block: an optimal simplex solution is a vertex, hence an
    // extreme point column
    let w = req.weights();
    let mut lp = LpProblem::new(w.clone());
    lp.bounds = req.bounds.to_vec();
    for row in &sub.rows {
        lp.push_row(row.coeffs.clone(), row.relation, row.rhs);
    }
    let sol = lp::solve_lp(&lp, &LpConfig::default()).map_err(PricingError::Lp)?;
    match sol.status {
        LpStatus::Infeasible => Ok(PricerResult::infeasible()),
        LpStatus::Unbounded => Err(PricingError::Unsupported(
            "unbounded generic block polytope".into(),
        )),
        LpStatus::Optimal => {
            let rc = sol.objective - req.sigma();
            let mut columns = Vec::new();
            if rc < -req.rc_tolerance {
                let pc = make_priced(sub, sol.primal.clone(), rc);
                if !req.excluded.contains(&pc.column.fingerprint) {
                    columns.push(pc);
                }
            }
            Ok(PricerResult {
                columns,
                best_reduced_cost: rc,
                exact: true,
            })
        }
    }
}

fn enumerate_generic(req: &PricerRequest) -> Result<PricerResult, PricingError> {
    const LIMIT: usize = 2_000_000;
    let sub = req.submodel;
    let w = req.weights();
    let sigma = req.sigma();
    let n = sub.num_vars();

    let mut domains: Vec<(i64, i64)> = Vec::with_capacity(n);
    for j in 0..n {
        let (lo, hi) = req.bounds[j];
        let lo = lo.ceil();
        let hi = hi.floor();
        if hi < lo {
            return Ok(PricerResult::infeasible());
        }
        if !lo.is_finite() || !hi.is_finite() {
            return Err(PricingError::Unsupported(
                "unbounded integer generic block".into(),
            ));
        }
        domains.push((lo as i64, hi as i64));
    }

    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut improving: Vec<(f64, Vec<f64>)> = Vec::new();
    let mut values = vec![0.0; n];
    let mut visited = 0usize;

    fn rec(
        j: usize,
        values: &mut Vec<f64>,
        visited: &mut usize,
        domains: &[(i64, i64)],
        sub: &BlockSubmodel,
        w: &[f64],
        sigma: f64,
        req: &PricerRequest,
        best: &mut Option<(f64, Vec<f64>)>,
        improving: &mut Vec<(f64, Vec<f64>)>,
    ) -> Result<(), PricingError> {
        if *visited > LIMIT {
            return Err(PricingError::EnumerationLimit);
        }
        if j == values.len() {
            *visited += 1;
            if sub.check_point(values, 1e-9).is_err() {
                return Ok(());
            }
            let rc = values.iter().zip(w).map(|(v, wj)| v * wj).sum::<f64>() - sigma;
            let fp = util::fingerprint(sub.block_id as u64 + 1, values);
            if req.excluded.contains(&fp) {
                return Ok(());
            }
            if best.as_ref().map_or(true, |(b, _)| rc < *b - 1e-15) {
                *best = Some((rc, values.clone()));
            }
            if rc < -req.rc_tolerance {
                improving.push((rc, values.clone()));
            }
            return Ok(());
        }
        for v in domains[j].0..=domains[j].1 {
            values[j] = v as f64;
            rec(
                j + 1,
                values,
                visited,
                domains,
                sub,
                w,
                sigma,
                req,
                best,
                improving,
            )?;
        }
        values[j] = 0.0;
        Ok(())
    }
    rec(
        0,
        &mut values,
        &mut visited,
        &domains,
        sub,
        &w,
        sigma,
        req,
        &mut best,
        &mut improving,
    )?;

    improving.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
    improving.truncate(req.max_columns);
    match best {
        None => Ok(PricerResult::infeasible()),
        Some((rc, _)) => Ok(PricerResult {
            columns: improving
                .into_iter()
                .map(|(rc, v)| make_priced(sub, v, rc))
                .collect(),
            best_reduced_cost: rc,
            exact: true,
        }),
    }
}
