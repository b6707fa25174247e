//! The restricted master problem.
//!
//! Holds the column pool, assembles and solves the LRMP, splits its duals
//! into linking prices and per-block convexity prices, and maps master
//! weights back to original variables.
//!
//! Master layout for a pool `C`:
//!
//! ```text
//! min  sum_c cost_c * w_c
//! s.t. sum_c linking_coeffs_c[i] * w_c  (rel_i)  rhs_i     one per linking row
//!      sum_{c in block b} w_c = 1                          per convexity block
//!      lb_c <= w_c                                         (ub from branching)
//! ```
//!
//! Aggregated blocks have no convexity row; their weights are pattern
//! counts. Big-M artificial columns keep every LRMP feasible: one slack
//! direction per linking row plus one zero-point column per convexity block.

use crate::lp::{self, LpConfig, LpError, LpProblem, LpStatus, Relation};
use crate::model::{block_submodel, BlockSubmodel, CompactModel};
use crate::util::{self, fingerprint, TOL_FEAS, TOL_INT};
use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

#[derive(Clone, Debug)]
pub struct Column {
    /// Owning block id; `None` only for linking-row artificials.
    pub block_id: Option<usize>,
    pub cost: f64,
    /// Coefficient of this column in each linking row.
    pub linking_coeffs: Vec<f64>,
    /// The extreme point in the block's local variables (empty for
    /// linking-row artificials).
    pub original_values: Vec<f64>,
    pub is_artificial: bool,
    pub fingerprint: u64,
}

impl Column {
    /// Build a column from a block point; cost and linking coefficients are
    /// derived from the submodel so the column invariant holds by
    /// construction.
    pub fn from_point(sub: &BlockSubmodel, values: Vec<f64>) -> Column {
        let cost = sub.point_cost(&values);
        let linking_coeffs = sub.point_linking_coeffs(&values);
        let fp = fingerprint(sub.block_id as u64 + 1, &values);
        Column {
            block_id: Some(sub.block_id),
            cost,
            linking_coeffs,
            original_values: values,
            is_artificial: false,
            fingerprint: fp,
        }
    }
}

/// Linking-row duals plus per-block convexity duals.
#[derive(Clone, Debug)]
pub struct DualPrices {
    pub linking: Vec<f64>,
    /// Indexed by block position; `None` for aggregated blocks (they carry
    /// no convexity row).
    pub convexity: Vec<Option<f64>>,
}

#[derive(Clone, Debug)]
pub struct LrmpSolution {
    /// One weight per pool column.
    pub weights: Vec<f64>,
    pub duals: DualPrices,
    pub objective: f64,
    pub lp_iterations: usize,
}

#[derive(Clone, Debug)]
pub struct RmpState {
    pub columns: Vec<Column>,
    pub big_m: f64,
    /// Weight bounds imposed by the tree search, keyed by column
    /// fingerprint; columns without an entry get `[0, +inf)`.
    pub weight_bounds: BTreeMap<u64, (f64, f64)>,
    pub last: Option<LrmpSolution>,
    fingerprints: HashSet<u64>,
}

#[derive(Debug)]
pub enum MasterError {
    Lp(LpError),
    /// The LRMP came back infeasible or unbounded; with artificial columns
    /// in the pool this indicates inconsistent weight bounds.
    BadLrmp(LpStatus),
}

impl fmt::Display for MasterError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MasterError::Lp(e) => write!(f, "master LP failed: {}", e),
            MasterError::BadLrmp(s) => write!(f, "LRMP solved to unexpected status {:?}", s),
        }
    }
}

impl std::error::Error for MasterError {}

impl From<LpError> for MasterError {
    fn from(e: LpError) -> Self {
        MasterError::Lp(e)
    }
}

/// Big-M cost for artificial columns: dominates any feasible objective but
/// stays in well-conditioned float range.
pub fn big_m_for(model: &CompactModel) -> f64 {
    let max_cost = model.costs.iter().fold(0.0f64, |a, c| a.max(c.abs()));
    1e4 * (1.0 + max_cost) * (model.linking_rows.len().max(1) as f64)
}

fn artificial_for_row(row_idx: usize, coeff: f64, nlinking: usize, big_m: f64) -> Column {
    let mut linking_coeffs = vec![0.0; nlinking];
    linking_coeffs[row_idx] = coeff;
    Column {
        block_id: None,
        cost: big_m,
        linking_coeffs,
        original_values: Vec::new(),
        is_artificial: true,
        fingerprint: fingerprint(0, &[row_idx as f64, coeff]),
    }
}

fn artificial_for_block(block_id: usize, block_vars: usize, nlinking: usize, big_m: f64) -> Column {
    Column {
        block_id: Some(block_id),
        cost: big_m,
        linking_coeffs: vec![0.0; nlinking],
        original_values: vec![0.0; block_vars],
        is_artificial: true,
        fingerprint: fingerprint(0, &[f64::from(u32::MAX), block_id as f64]),
    }
}

impl RmpState {
    pub fn contains_fingerprint(&self, fp: u64) -> bool {
        self.fingerprints.contains(&fp)
    }

    pub fn fingerprints(&self) -> &HashSet<u64> {
        &self.fingerprints
    }

    pub fn num_real_columns(&self) -> usize {
        self.columns.iter().filter(|c| !c.is_artificial).count()
    }

    /// Indices of the non-artificial columns of one block.
    pub fn block_columns(&self, block_id: usize) -> Vec<usize> {
        self.columns
            .iter()
            .enumerate()
            .filter(|(_, c)| c.block_id == Some(block_id) && !c.is_artificial)
            .map(|(i, _)| i)
            .collect()
    }

    fn push_unchecked(&mut self, col: Column) {
        self.fingerprints.insert(col.fingerprint);
        self.columns.push(col);
    }

    /// A copy of this state keeping only the columns the predicate accepts;
    /// the cached solution is dropped, weight bounds are carried over.
    pub fn retain_columns(&self, mut keep: impl FnMut(&Column) -> bool) -> RmpState {
        let mut out = RmpState {
            columns: Vec::new(),
            big_m: self.big_m,
            weight_bounds: self.weight_bounds.clone(),
            last: None,
            fingerprints: HashSet::new(),
        };
        for col in &self.columns {
            if keep(col) {
                out.push_unchecked(col.clone());
            }
        }
        out
    }
}

/// Create the root RMP: insert the warm-start columns, then add artificial
/// columns so the first LRMP is feasible no matter what the warm start
/// covers (one slack direction per linking row, both directions for
/// equalities, plus a zero-point column per convexity block).
pub fn init_rmp(model: &CompactModel, initial_columns: Vec<Column>) -> RmpState {
    let big_m = big_m_for(model);
    let mut rmp = RmpState {
        columns: Vec::new(),
        big_m,
        weight_bounds: BTreeMap::new(),
        last: None,
        fingerprints: HashSet::new(),
    };
    add_columns(model, &mut rmp, initial_columns);

    let nlinking = model.linking_rows.len();
    for (i, row) in model.linking_rows.iter().enumerate() {
        match row.relation {
            Relation::Ge => rmp.push_unchecked(artificial_for_row(i, 1.0, nlinking, big_m)),
            Relation::Le => rmp.push_unchecked(artificial_for_row(i, -1.0, nlinking, big_m)),
            Relation::Eq => {
                rmp.push_unchecked(artificial_for_row(i, 1.0, nlinking, big_m));
                rmp.push_unchecked(artificial_for_row(i, -1.0, nlinking, big_m));
            }
        }
    }
    for block in &model.blocks {
        if !block.is_aggregated() {
            rmp.push_unchecked(artificial_for_block(
                block.id,
                block.var_count,
                nlinking,
                big_m,
            ));
        }
    }
    rmp
}

/// Insert columns into the pool; duplicates (by fingerprint) and columns
/// failing their block's feasibility check are skipped. Returns the number
/// actually inserted.
pub fn add_columns(model: &CompactModel, rmp: &mut RmpState, columns: Vec<Column>) -> usize {
    let mut sorted = columns;
    // deterministic insertion order regardless of pricing completion order
    sorted.sort_by_key(|c| (c.block_id, c.fingerprint));

    let mut submodels: HashMap<usize, BlockSubmodel> = HashMap::new();
    let mut added = 0;
    for col in sorted {
        if rmp.fingerprints.contains(&col.fingerprint) {
            continue;
        }
        if !col.is_artificial {
            let block_id = match col.block_id {
                Some(b) => b,
                None => {
                    util::log_debug(|| "rejected column without block id".to_string());
                    continue;
                }
            };
            let sub = match submodels.entry(block_id) {
                std::collections::hash_map::Entry::Occupied(e) => e.into_mut(),
                std::collections::hash_map::Entry::Vacant(e) => {
                    match block_submodel(model, block_id) {
                        Ok(s) => e.insert(s),
                        Err(_) => {
                            util::log_debug(|| {
                                format!("rejected column of unknown block {}", block_id)
                            });
                            continue;
                        }
                    }
                }
            };
            if let Err(why) = sub.check_point(&col.original_values, TOL_FEAS.max(1e-7)) {
                util::log_debug(|| format!("rejected infeasible column: {}", why));
                continue;
            }
            // the linking coefficients must match the linking-row map
            let expect = sub.point_linking_coeffs(&col.original_values);
            let consistent = expect
                .iter()
                .zip(&col.linking_coeffs)
                .all(|(a, b)| (a - b).abs() <= 1e-7);
            if !consistent || expect.len() != col.linking_coeffs.len() {
                util::log_debug(|| "rejected column with inconsistent linking coefficients".into());
                continue;
            }
        }
        rmp.push_unchecked(col);
        added += 1;
    }
    added
}

/// Assemble and solve the LRMP; returns weights, split duals and objective,
/// and caches the solution on the state.
pub fn solve_lrmp(model: &CompactModel, rmp: &mut RmpState) -> Result<LrmpSolution, MasterError> {
    let n = rmp.columns.len();
    let nlinking = model.linking_rows.len();

    let costs: Vec<f64> = rmp.columns.iter().map(|c| c.cost).collect();
    let mut lp = LpProblem::new(costs);
    lp.bounds = rmp
        .columns
        .iter()
        .map(|c| {
            if c.is_artificial {
                (0.0, f64::INFINITY)
            } else {
                rmp.weight_bounds
                    .get(&c.fingerprint)
                    .copied()
                    .unwrap_or((0.0, f64::INFINITY))
            }
        })
        .collect();

    for (i, row) in model.linking_rows.iter().enumerate() {
        let coeffs: Vec<f64> = rmp.columns.iter().map(|c| c.linking_coeffs[i]).collect();
        lp.push_row(coeffs, row.relation, row.rhs);
    }
    let mut convexity_rows = Vec::new();
    for block in &model.blocks {
        if block.is_aggregated() {
            continue;
        }
        let coeffs: Vec<f64> = rmp
            .columns
            .iter()
            .map(|c| {
                if c.block_id == Some(block.id) {
                    1.0
                } else {
                    0.0
                }
            })
            .collect();
        convexity_rows.push(block.id);
        lp.push_row(coeffs, Relation::Eq, 1.0);
    }

    let sol = lp::solve_lp(&lp, &LpConfig::default())?;
    if sol.status != LpStatus::Optimal {
        return Err(MasterError::BadLrmp(sol.status));
    }

    let linking = sol.duals[..nlinking].to_vec();
    let mut convexity = vec![None; model.blocks.len()];
    for (k, &block_id) in convexity_rows.iter().enumerate() {
        let pos = model.blocks.iter().position(|b| b.id == block_id).unwrap();
        convexity[pos] = Some(sol.duals[nlinking + k]);
    }

    let out = LrmpSolution {
        weights: sol.primal[..n].to_vec(),
        duals: DualPrices { linking, convexity },
        objective: sol.objective,
        lp_iterations: sol.iterations,
    };
    rmp.last = Some(out.clone());
    Ok(out)
}

/// Master weights mapped back to the original variables.
#[derive(Clone, Debug)]
pub struct RecoveredSolution {
    /// Blended original values per block position (`sum w_c * point_c`).
    pub block_values: Vec<Vec<f64>>,
    /// For aggregated blocks: `(pool column index, weight)` for every column
    /// with weight above the integrality tolerance.
    pub patterns: Vec<(usize, f64)>,
    /// Some artificial column is active: the recovered point is not feasible
    /// for the original problem.
    pub artificial_active: bool,
}

pub fn recover_original_solution(
    model: &CompactModel,
    rmp: &RmpState,
    weights: &[f64],
) -> RecoveredSolution {
    let mut block_values: Vec<Vec<f64>> = model
        .blocks
        .iter()
        .map(|b| vec![0.0; b.var_count])
        .collect();
    let mut patterns = Vec::new();
    let mut artificial_active = false;

    // columns appended after the solve that produced `weights` carry none
    for (ci, col) in rmp.columns.iter().enumerate().take(weights.len()) {
        let w = weights[ci];
        if col.is_artificial {
            if w > TOL_INT {
                artificial_active = true;
            }
            continue;
        }
        if w.abs() <= 1e-12 {
            continue;
        }
        let block_id = col.block_id.expect("real column has a block");
        let pos = model
            .blocks
            .iter()
            .position(|b| b.id == block_id)
            .expect("column block exists");
        for (x, v) in block_values[pos].iter_mut().zip(&col.original_values) {
            *x += w * v;
        }
        if model.blocks[pos].is_aggregated() && w > TOL_INT {
            patterns.push((ci, w));
        }
    }

    RecoveredSolution {
        block_values,
        patterns,
        artificial_active,
    }
}

/// What the tree search should branch on.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FractionalTarget {
    /// An original variable of a convexity block took a fractional value.
    OriginalVar {
        block_id: usize,
        local_var: usize,
        global_var: usize,
        value: f64,
    },
    /// A pattern count of an aggregated block is fractional.
    PatternCount {
        column: usize,
        fingerprint: u64,
        value: f64,
    },
}

impl FractionalTarget {
    pub fn value(&self) -> f64 {
        match self {
            FractionalTarget::OriginalVar { value, .. } => *value,
            FractionalTarget::PatternCount { value, .. } => *value,
        }
    }
}

/// `None` iff the recovered solution is integral: every integer-flagged
/// original variable of a convexity block, and every pattern count of an
/// aggregated block, is within `TOL_INT` of an integer. Otherwise returns
/// the most fractional quantity (`|frac - 0.5|` minimal, ties broken by the
/// lowest variable index, pattern counts after original variables).
pub fn select_fractional(
    model: &CompactModel,
    rmp: &RmpState,
    weights: &[f64],
) -> Option<FractionalTarget> {
    let recovered = recover_original_solution(model, rmp, weights);
    let mut best: Option<(f64, usize, FractionalTarget)> = None;
    let mut consider = |score: f64, order: usize, t: FractionalTarget| {
        let better = match &best {
            None => true,
            Some((bs, bo, _)) => {
                score < *bs - 1e-12 || ((score - *bs).abs() <= 1e-12 && order < *bo)
            }
        };
        if better {
            best = Some((score, order, t));
        }
    };

    for (pos, block) in model.blocks.iter().enumerate() {
        if block.is_aggregated() {
            continue;
        }
        for (local, v) in recovered.block_values[pos].iter().enumerate() {
            let global = block.var_start + local;
            if !model.variables[global].integer {
                continue;
            }
            let frac = util::frac_distance(*v);
            if frac > TOL_INT {
                consider(
                    (frac - 0.5).abs(),
                    global,
                    FractionalTarget::OriginalVar {
                        block_id: block.id,
                        local_var: local,
                        global_var: global,
                        value: *v,
                    },
                );
            }
        }
    }
    let base = model.num_vars();
    for (ci, col) in rmp.columns.iter().enumerate().take(weights.len()) {
        if col.is_artificial {
            continue;
        }
        let block_id = col.block_id.expect("real column has a block");
        let aggregated = model
            .blocks
            .iter()
            .any(|b| b.id == block_id && b.is_aggregated());
        if !aggregated {
            continue;
        }
        let w = weights[ci];
        let frac = util::frac_distance(w);
        if frac > TOL_INT {
            consider(
                (frac - 0.5).abs(),
                base + ci,
                FractionalTarget::PatternCount {
                    column: ci,
                    fingerprint: col.fingerprint,
                    value: w,
                },
            );
        }
    }
    best.map(|(_, _, t)| t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::LpRow;
    use crate::model::{Block, BlockStructure, Variable};
    use crate::testkit::cs1_model;

    fn cs1_pattern(model: &CompactModel, z1: f64, z2: f64) -> Column {
        let sub = block_submodel(model, 0).unwrap();
        Column::from_point(&sub, vec![1.0, z1, z2])
    }

    #[test]
    fn empty_warm_start_gets_one_artificial_per_linking_row() {
        let m = cs1_model();
        let mut rmp = init_rmp(&m, Vec::new());
        assert_eq!(rmp.columns.len(), 2); // both rows are >=
        assert!(rmp.columns.iter().all(|c| c.is_artificial));
        let sol = solve_lrmp(&m, &mut rmp).unwrap();
        // artificials carry the full demand at big-M cost
        assert!((sol.objective - rmp.big_m * 6.0).abs() < 1e-6 * rmp.big_m);
    }

    #[test]
    fn singleton_warm_start_costs_six_rolls() {
        let m = cs1_model();
        let cols = vec![cs1_pattern(&m, 1.0, 0.0), cs1_pattern(&m, 0.0, 1.0)];
        let mut rmp = init_rmp(&m, cols);
        assert_eq!(rmp.num_real_columns(), 2);
        let sol = solve_lrmp(&m, &mut rmp).unwrap();
        assert!((sol.objective - 6.0).abs() < 1e-9);
    }

    #[test]
    fn full_pattern_set_reaches_lp_optimum_with_known_duals() {
        let m = cs1_model();
        let cols = vec![
            cs1_pattern(&m, 3.0, 0.0),
            cs1_pattern(&m, 1.0, 1.0),
            cs1_pattern(&m, 0.0, 2.0),
        ];
        let mut rmp = init_rmp(&m, cols);
        let sol = solve_lrmp(&m, &mut rmp).unwrap();
        assert!((sol.objective - 7.0 / 3.0).abs() < 1e-9);
        assert!((sol.duals.linking[0] - 1.0 / 3.0).abs() < 1e-9);
        assert!((sol.duals.linking[1] - 0.5).abs() < 1e-9);
        assert_eq!(sol.duals.convexity, vec![None]);
        // consistency between the LP duals and the pool: every column's
        // reduced cost is nonnegative at the optimum
        for col in &rmp.columns {
            let rc = col.cost
                - sol
                    .duals
                    .linking
                    .iter()
                    .zip(&col.linking_coeffs)
                    .map(|(y, a)| y * a)
                    .sum::<f64>();
            assert!(rc >= -1e-7, "column prices at {}", rc);
        }
    }

    #[test]
    fn integral_weights_recover_the_chosen_points() {
        let m = two_block_convex();
        let s0 = block_submodel(&m, 0).unwrap();
        let s1 = block_submodel(&m, 1).unwrap();
        let rmp = init_rmp(
            &m,
            vec![
                Column::from_point(&s0, vec![2.0]),
                Column::from_point(&s1, vec![1.0]),
            ],
        );
        let mut weights = vec![0.0; rmp.columns.len()];
        for (ci, col) in rmp.columns.iter().enumerate() {
            if !col.is_artificial {
                weights[ci] = 1.0;
            }
        }
        let rec = recover_original_solution(&m, &rmp, &weights);
        assert_eq!(rec.block_values, vec![vec![2.0], vec![1.0]]);
        assert!(!rec.artificial_active);
    }

    #[test]
    fn add_columns_dedups_and_validates() {
        let m = cs1_model();
        let mut rmp = init_rmp(&m, vec![cs1_pattern(&m, 1.0, 0.0)]);
        // duplicate
        assert_eq!(
            add_columns(&m, &mut rmp, vec![cs1_pattern(&m, 1.0, 0.0)]),
            0
        );
        // new pattern
        assert_eq!(
            add_columns(&m, &mut rmp, vec![cs1_pattern(&m, 3.0, 0.0)]),
            1
        );
        // knapsack violation: 4 items of size 3 exceed width 10 (also the
        // variable bound); build the bogus column by hand
        let sub = block_submodel(&m, 0).unwrap();
        let mut bogus = Column::from_point(&sub, vec![1.0, 3.0, 0.0]);
        bogus.original_values = vec![1.0, 4.0, 0.0];
        bogus.fingerprint = fingerprint(99, &bogus.original_values);
        assert_eq!(add_columns(&m, &mut rmp, vec![bogus]), 0);
        // inconsistent linking coefficients
        let mut crooked = cs1_pattern(&m, 0.0, 2.0);
        crooked.linking_coeffs[0] += 1.0;
        assert_eq!(add_columns(&m, &mut rmp, vec![crooked]), 0);
    }

    #[test]
    fn recover_reports_fractional_pattern_counts() {
        let m = cs1_model();
        let cols = vec![
            cs1_pattern(&m, 3.0, 0.0),
            cs1_pattern(&m, 1.0, 1.0),
            cs1_pattern(&m, 0.0, 2.0),
        ];
        let mut rmp = init_rmp(&m, cols);
        let sol = solve_lrmp(&m, &mut rmp).unwrap();
        let rec = recover_original_solution(&m, &rmp, &sol.weights);
        assert!(!rec.artificial_active);
        let mut counts: Vec<f64> = rec.patterns.iter().map(|(_, w)| *w).collect();
        counts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(counts.len(), 2);
        assert!((counts[0] - 1.0).abs() < 1e-9);
        assert!((counts[1] - 4.0 / 3.0).abs() < 1e-9);
    }

    #[test]
    fn recover_flags_active_artificials() {
        let m = cs1_model();
        let mut rmp = init_rmp(&m, Vec::new());
        let sol = solve_lrmp(&m, &mut rmp).unwrap();
        let rec = recover_original_solution(&m, &rmp, &sol.weights);
        assert!(rec.artificial_active);
    }

    // two convexity blocks, one integer variable each
    fn two_block_convex() -> CompactModel {
        CompactModel {
            variables: vec![
                Variable::integer("a", 0.0, 2.0),
                Variable::integer("b", 0.0, 2.0),
            ],
            costs: vec![1.0, 2.0],
            linking_rows: vec![LpRow {
                coeffs: vec![1.0, 1.0],
                relation: Relation::Ge,
                rhs: 1.0,
            }],
            block_rows: vec![vec![], vec![]],
            blocks: vec![
                Block {
                    id: 0,
                    var_start: 0,
                    var_count: 1,
                    structure: BlockStructure::Generic,
                    multiplicity: None,
                },
                Block {
                    id: 1,
                    var_start: 1,
                    var_count: 1,
                    structure: BlockStructure::Generic,
                    multiplicity: None,
                },
            ],
        }
    }

    #[test]
    fn single_column_per_convexity_block_forces_unit_weights() {
        let m = two_block_convex();
        let s0 = block_submodel(&m, 0).unwrap();
        let s1 = block_submodel(&m, 1).unwrap();
        let cols = vec![
            Column::from_point(&s0, vec![2.0]),
            Column::from_point(&s1, vec![1.0]),
        ];
        let mut rmp = init_rmp(&m, cols);
        let sol = solve_lrmp(&m, &mut rmp).unwrap();
        // each block must put weight one on its only real column
        for (ci, col) in rmp.columns.iter().enumerate() {
            if !col.is_artificial {
                assert!((sol.weights[ci] - 1.0).abs() < 1e-9);
            }
        }
        assert!((sol.objective - (2.0 + 2.0)).abs() < 1e-9);
        assert!(sol.duals.convexity.iter().all(|s| s.is_some()));
    }

    #[test]
    fn select_fractional_picks_most_fractional_with_tie_break() {
        let m = two_block_convex();
        let s0 = block_submodel(&m, 0).unwrap();
        let s1 = block_submodel(&m, 1).unwrap();
        let mut rmp = init_rmp(
            &m,
            vec![
                Column::from_point(&s0, vec![0.0]),
                Column::from_point(&s0, vec![1.0]),
                Column::from_point(&s1, vec![1.0]),
            ],
        );
        // weights blending block 0 to x = 0.5, block 1 integral at 1.0
        let mut weights = vec![0.0; rmp.columns.len()];
        let idx0 = rmp.block_columns(0);
        let idx1 = rmp.block_columns(1);
        weights[idx0[0]] = 0.5;
        weights[idx0[1]] = 0.5;
        weights[idx1[0]] = 1.0;
        match select_fractional(&m, &rmp, &weights) {
            Some(FractionalTarget::OriginalVar {
                global_var, value, ..
            }) => {
                assert_eq!(global_var, 0);
                assert!((value - 0.5).abs() < 1e-9);
            }
            other => panic!("expected fractional original variable, got {:?}", other),
        }
        // integral weights: nothing to branch on
        weights[idx0[0]] = 0.0;
        weights[idx0[1]] = 1.0;
        assert_eq!(select_fractional(&m, &rmp, &weights), None);

        // tie |0.2-0.5| = |0.8-0.5| resolved to the lower variable index;
        // express by blending both blocks
        let m2 = two_block_convex();
        let t0 = block_submodel(&m2, 0).unwrap();
        let t1 = block_submodel(&m2, 1).unwrap();
        let mut rmp2 = init_rmp(
            &m2,
            vec![
                Column::from_point(&t0, vec![0.0]),
                Column::from_point(&t0, vec![1.0]),
                Column::from_point(&t1, vec![0.0]),
                Column::from_point(&t1, vec![1.0]),
            ],
        );
        let mut w2 = vec![0.0; rmp2.columns.len()];
        let i0 = rmp2.block_columns(0);
        let i1 = rmp2.block_columns(1);
        w2[i0[0]] = 0.8;
        w2[i0[1]] = 0.2; // x0 = 0.2
        w2[i1[0]] = 0.2;
        w2[i1[1]] = 0.8; // x1 = 0.8
        match select_fractional(&m2, &rmp2, &w2) {
            Some(FractionalTarget::OriginalVar { global_var, .. }) => assert_eq!(global_var, 0),
            other => panic!("unexpected {:?}", other),
        }
        let _ = (&mut rmp, &mut rmp2);
    }

    #[test]
    fn fractional_pattern_counts_become_branch_targets() {
        let m = cs1_model();
        let cols = vec![cs1_pattern(&m, 3.0, 0.0), cs1_pattern(&m, 0.0, 2.0)];
        let mut rmp = init_rmp(&m, cols);
        let sol = solve_lrmp(&m, &mut rmp).unwrap();
        // optimum over these two patterns: 4/3 and 1
        match select_fractional(&m, &rmp, &sol.weights) {
            Some(FractionalTarget::PatternCount { value, .. }) => {
                assert!((value - 4.0 / 3.0).abs() < 1e-9);
            }
            other => panic!("unexpected {:?}", other),
        }
    }

    #[test]
    fn weight_bounds_are_honored() {
        let m = cs1_model();
        let cols = vec![
            cs1_pattern(&m, 3.0, 0.0),
            cs1_pattern(&m, 1.0, 1.0),
            cs1_pattern(&m, 0.0, 2.0),
        ];
        let fp = cols[0].fingerprint;
        let mut rmp = init_rmp(&m, cols);
        rmp.weight_bounds.insert(fp, (2.0, f64::INFINITY));
        let sol = solve_lrmp(&m, &mut rmp).unwrap();
        let ci = rmp
            .columns
            .iter()
            .position(|c| c.fingerprint == fp)
            .unwrap();
        assert!(sol.weights[ci] >= 2.0 - 1e-9);
        assert!(sol.objective >= 7.0 / 3.0 - 1e-9);
    }
}
