//! Dense revised-simplex linear programming engine.
//!
//! Minimizes `c'x` subject to general rows (`<=`, `>=`, `=`) and variable
//! bounds, and returns both a primal solution and one dual value per row.
//! The duals are the currency of the column-generation loop: reduced costs
//! everywhere in this crate are `cost - duals . column`.
//!
//! Sign convention for a minimization problem: duals of `>=` rows are
//! nonnegative, duals of `<=` rows are nonpositive, duals of `=` rows are
//! free. Every optimal solve satisfies `reduced_cost >= 0` for variables at
//! their lower bound and `<= 0` at their upper bound.
//!
//! The implementation is deliberately plain: two-phase primal simplex over
//! an explicit dense basis inverse, Bland's smallest-index rule for both the
//! entering and leaving choice (deterministic and cycle-free), periodic
//! refactorization for accuracy. Desk-scale problems do not need sparsity.

use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Relation::Le => write!(f, "<="),
            Relation::Ge => write!(f, ">="),
            Relation::Eq => write!(f, "="),
        }
    }
}

#[derive(Clone, Debug)]
pub struct LpRow {
    pub coeffs: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

/// Minimization problem: `min costs'x` over the rows and bounds.
#[derive(Clone, Debug)]
pub struct LpProblem {
    pub costs: Vec<f64>,
    pub rows: Vec<LpRow>,
    /// One `(lower, upper)` pair per variable; defaults to `[0, +inf)`.
    pub bounds: Vec<(f64, f64)>,
}

impl LpProblem {
    pub fn new(costs: Vec<f64>) -> Self {
        let n = costs.len();
        LpProblem {
            costs,
            rows: Vec::new(),
            bounds: vec![(0.0, f64::INFINITY); n],
        }
    }

    pub fn push_row(&mut self, coeffs: Vec<f64>, relation: Relation, rhs: f64) {
        self.rows.push(LpRow {
            coeffs,
            relation,
            rhs,
        });
    }

    pub fn num_vars(&self) -> usize {
        self.costs.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    fn check(&self) -> Result<(), LpError> {
        let n = self.num_vars();
        if self.bounds.len() != n {
            return Err(LpError::Malformed(format!(
                "{} bound pairs for {} variables",
                self.bounds.len(),
                n
            )));
        }
        for c in &self.costs {
            if !c.is_finite() {
                return Err(LpError::Malformed("non-finite cost coefficient".into()));
            }
        }
        for (i, row) in self.rows.iter().enumerate() {
            if row.coeffs.len() != n {
                return Err(LpError::Malformed(format!(
                    "row {} has {} coefficients, expected {}",
                    i,
                    row.coeffs.len(),
                    n
                )));
            }
            if !row.rhs.is_finite() || row.coeffs.iter().any(|a| !a.is_finite()) {
                return Err(LpError::Malformed(format!("row {} has non-finite data", i)));
            }
        }
        for (j, &(lo, hi)) in self.bounds.iter().enumerate() {
            if lo.is_nan() || hi.is_nan() {
                return Err(LpError::Malformed(format!("variable {} has NaN bound", j)));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug)]
pub struct LpSolution {
    pub status: LpStatus,
    pub primal: Vec<f64>,
    /// One dual per problem row (empty unless Optimal).
    pub duals: Vec<f64>,
    pub objective: f64,
    /// Dual objective including finite-bound contributions; equals
    /// `objective` up to the solver tolerance at an optimum.
    pub dual_objective: f64,
    pub iterations: usize,
    /// Final basis (internal standard-form column indices), exposed so
    /// callers can assert determinism.
    pub basis: Vec<usize>,
}

impl LpSolution {
    fn empty(status: LpStatus, iterations: usize) -> Self {
        LpSolution {
            status,
            primal: Vec::new(),
            duals: Vec::new(),
            objective: match status {
                LpStatus::Unbounded => f64::NEG_INFINITY,
                _ => f64::INFINITY,
            },
            dual_objective: f64::NAN,
            iterations,
            basis: Vec::new(),
        }
    }
}

#[derive(Clone, Debug)]
pub enum LpError {
    Malformed(String),
    /// Pivot budget exhausted; carries the iteration count actually spent.
    IterationLimit {
        iterations: usize,
    },
    /// Basis matrix became numerically singular (should not happen on
    /// well-scaled desk instances).
    Singular,
}

impl fmt::Display for LpError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LpError::Malformed(msg) => write!(f, "malformed problem: {}", msg),
            LpError::IterationLimit { iterations } => {
                write!(f, "iteration limit reached after {} pivots", iterations)
            }
            LpError::Singular => write!(f, "singular basis matrix"),
        }
    }
}

impl std::error::Error for LpError {}

#[derive(Clone, Copy, Debug)]
pub struct LpConfig {
    pub tol_feas: f64,
    pub tol_opt: f64,
    /// Pivot budget; `None` means `50 * (rows + cols)` of the internal
    /// standard form.
    pub max_iterations: Option<usize>,
}

impl Default for LpConfig {
    fn default() -> Self {
        LpConfig {
            tol_feas: 1e-9,
            tol_opt: 1e-7,
            max_iterations: None,
        }
    }
}

/// Reduced costs `c_j - duals . column_j` for every variable.
pub fn reduced_costs(problem: &LpProblem, duals: &[f64]) -> Result<Vec<f64>, LpError> {
    if duals.len() != problem.num_rows() {
        return Err(LpError::Malformed(format!(
            "{} duals for {} rows",
            duals.len(),
            problem.num_rows()
        )));
    }
    let mut rc = problem.costs.clone();
    for (row, &y) in problem.rows.iter().zip(duals) {
        if y == 0.0 {
            continue;
        }
        for (r, &a) in rc.iter_mut().zip(&row.coeffs) {
            *r -= y * a;
        }
    }
    Ok(rc)
}

/// KKT diagnostics for an Optimal solution.
#[derive(Clone, Copy, Debug)]
pub struct KktReport {
    /// Largest row or bound violation of the primal point.
    pub max_primal_violation: f64,
    /// Largest violation of dual sign / complementary-slackness conditions.
    pub max_dual_violation: f64,
    /// `|primal objective - dual objective|`.
    pub duality_gap: f64,
}

pub fn verify_kkt(problem: &LpProblem, solution: &LpSolution) -> KktReport {
    let x = &solution.primal;
    let y = &solution.duals;
    let mut primal = 0.0f64;
    for row in &problem.rows {
        let act: f64 = row.coeffs.iter().zip(x).map(|(a, v)| a * v).sum();
        let viol = match row.relation {
            Relation::Le => act - row.rhs,
            Relation::Ge => row.rhs - act,
            Relation::Eq => (act - row.rhs).abs(),
        };
        primal = primal.max(viol);
    }
    for (j, &(lo, hi)) in problem.bounds.iter().enumerate() {
        primal = primal.max(lo - x[j]).max(x[j] - hi);
    }

    let rc = reduced_costs(problem, y).unwrap_or_else(|_| vec![f64::NAN; problem.num_vars()]);
    let mut dual = 0.0f64;
    for (i, row) in problem.rows.iter().enumerate() {
        // dual sign per relation (minimization)
        let sign_viol = match row.relation {
            Relation::Le => y[i].max(0.0),
            Relation::Ge => (-y[i]).max(0.0),
            Relation::Eq => 0.0,
        };
        dual = dual.max(sign_viol);
        let act: f64 = row.coeffs.iter().zip(x).map(|(a, v)| a * v).sum();
        if row.relation != Relation::Eq {
            dual = dual.max((y[i] * (act - row.rhs)).abs());
        }
    }
    for (j, &(lo, hi)) in problem.bounds.iter().enumerate() {
        let d = rc[j];
        let at_lo = lo.is_finite() && (x[j] - lo).abs() <= 1e-7;
        let at_hi = hi.is_finite() && (hi - x[j]).abs() <= 1e-7;
        if at_lo && at_hi {
            continue; // fixed variable: any reduced cost is fine
        } else if at_lo {
            dual = dual.max(-d);
        } else if at_hi {
            dual = dual.max(d);
        } else {
            dual = dual.max(d.abs());
        }
    }

    let gap = (solution.objective - solution.dual_objective).abs();
    KktReport {
        max_primal_violation: primal.max(0.0),
        max_dual_violation: dual.max(0.0),
        duality_gap: gap,
    }
}

/// Plain-text dump of a problem, for bug reports.
pub fn dump_problem(problem: &LpProblem) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "min  {}\n",
        problem
            .costs
            .iter()
            .enumerate()
            .map(|(j, c)| format!("{:+} x{}", c, j))
            .collect::<Vec<_>>()
            .join(" ")
    ));
    for row in &problem.rows {
        let lhs = row
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, a)| **a != 0.0)
            .map(|(j, a)| format!("{:+} x{}", a, j))
            .collect::<Vec<_>>()
            .join(" ");
        out.push_str(&format!("s.t. {} {} {}\n", lhs, row.relation, row.rhs));
    }
    for (j, &(lo, hi)) in problem.bounds.iter().enumerate() {
        out.push_str(&format!("     {} <= x{} <= {}\n", lo, j, hi));
    }
    out
}

// ---------------------------------------------------------------------------
// internal standard form
// ---------------------------------------------------------------------------

// Transform applied to one original variable to make it nonnegative.
#[derive(Clone, Copy, Debug)]
enum VarMap {
    // x = lower + t[col]
    Shifted { col: usize, lower: f64 },
    // x = upper - t[col]   (lower bound is -inf)
    Mirrored { col: usize, upper: f64 },
    // x = t[pos] - t[neg]  (free variable)
    Split { pos: usize, neg: usize },
}

struct StandardForm {
    ncols: usize, // structural (transformed) columns
    rows: Vec<Vec<f64>>,
    rhs: Vec<f64>,
    relations: Vec<Relation>,
    row_sign: Vec<f64>, // +-1 applied to make rhs nonnegative
    costs: Vec<f64>,
    cost_offset: f64,
    var_map: Vec<VarMap>,
    n_orig_rows: usize,
}

fn build_standard_form(problem: &LpProblem) -> Result<StandardForm, StandardFormOutcome> {
    let n = problem.num_vars();
    let mut var_map = Vec::with_capacity(n);
    let mut ncols = 0usize;
    for &(lo, hi) in &problem.bounds {
        if lo > hi {
            return Err(StandardFormOutcome::EmptyBox);
        }
        if lo.is_finite() {
            var_map.push(VarMap::Shifted {
                col: ncols,
                lower: lo,
            });
            ncols += 1;
        } else if hi.is_finite() {
            var_map.push(VarMap::Mirrored {
                col: ncols,
                upper: hi,
            });
            ncols += 1;
        } else {
            var_map.push(VarMap::Split {
                pos: ncols,
                neg: ncols + 1,
            });
            ncols += 2;
        }
    }

    let mut costs = vec![0.0; ncols];
    let mut cost_offset = 0.0;
    for (j, &c) in problem.costs.iter().enumerate() {
        match var_map[j] {
            VarMap::Shifted { col, lower } => {
                costs[col] = c;
                cost_offset += c * lower;
            }
            VarMap::Mirrored { col, upper } => {
                costs[col] = -c;
                cost_offset += c * upper;
            }
            VarMap::Split { pos, neg } => {
                costs[pos] = c;
                costs[neg] = -c;
            }
        }
    }

    let n_orig_rows = problem.num_rows();
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    let mut relations = Vec::new();
    for row in &problem.rows {
        let mut coeffs = vec![0.0; ncols];
        let mut b = row.rhs;
        for (j, &a) in row.coeffs.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            match var_map[j] {
                VarMap::Shifted { col, lower } => {
                    coeffs[col] = a;
                    b -= a * lower;
                }
                VarMap::Mirrored { col, upper } => {
                    coeffs[col] = -a;
                    b -= a * upper;
                }
                VarMap::Split { pos, neg } => {
                    coeffs[pos] = a;
                    coeffs[neg] = -a;
                }
            }
        }
        rows.push(coeffs);
        rhs.push(b);
        relations.push(row.relation);
    }
    // finite upper bounds of shifted variables become explicit rows
    for (j, &(lo, hi)) in problem.bounds.iter().enumerate() {
        if lo.is_finite() && hi.is_finite() {
            if let VarMap::Shifted { col, lower } = var_map[j] {
                let mut coeffs = vec![0.0; ncols];
                coeffs[col] = 1.0;
                rows.push(coeffs);
                rhs.push(hi - lower);
                relations.push(Relation::Le);
            }
        }
    }

    let mut row_sign = vec![1.0; rows.len()];
    for i in 0..rows.len() {
        if rhs[i] < 0.0 {
            row_sign[i] = -1.0;
            rhs[i] = -rhs[i];
            for a in rows[i].iter_mut() {
                *a = -*a;
            }
            relations[i] = match relations[i] {
                Relation::Le => Relation::Ge,
                Relation::Ge => Relation::Le,
                Relation::Eq => Relation::Eq,
            };
        }
    }

    Ok(StandardForm {
        ncols,
        rows,
        rhs,
        relations,
        row_sign,
        costs,
        cost_offset,
        var_map,
        n_orig_rows,
    })
}

enum StandardFormOutcome {
    EmptyBox,
}

// Dense simplex working state over the standard form augmented with slack,
// surplus and artificial columns.
struct Tableau {
    m: usize,
    ncols_total: usize,
    n_real: usize, // structural + slack/surplus columns; artificials follow
    cols: Vec<Vec<f64>>,
    rhs: Vec<f64>,
    basis: Vec<usize>,
    binv: Vec<Vec<f64>>,
    iterations: usize,
}

impl Tableau {
    fn new(sf: &StandardForm) -> Self {
        let m = sf.rows.len();
        let mut cols: Vec<Vec<f64>> = (0..sf.ncols)
            .map(|j| (0..m).map(|i| sf.rows[i][j]).collect())
            .collect();
        let mut slack_of_row: Vec<Option<usize>> = vec![None; m];
        for i in 0..m {
            match sf.relations[i] {
                Relation::Le => {
                    let mut col = vec![0.0; m];
                    col[i] = 1.0;
                    slack_of_row[i] = Some(cols.len());
                    cols.push(col);
                }
                Relation::Ge => {
                    let mut col = vec![0.0; m];
                    col[i] = -1.0;
                    cols.push(col);
                }
                Relation::Eq => {}
            }
        }
        let n_real = cols.len();
        let mut basis = Vec::with_capacity(m);
        for i in 0..m {
            match slack_of_row[i] {
                Some(j) => basis.push(j),
                None => {
                    let mut col = vec![0.0; m];
                    col[i] = 1.0;
                    basis.push(cols.len());
                    cols.push(col);
                }
            }
        }
        let ncols_total = cols.len();
        let mut binv = vec![vec![0.0; m]; m];
        for (i, row) in binv.iter_mut().enumerate() {
            row[i] = 1.0;
        }
        Tableau {
            m,
            ncols_total,
            n_real,
            cols,
            rhs: sf.rhs.clone(),
            basis,
            binv,
            iterations: 0,
        }
    }

    fn is_artificial(&self, j: usize) -> bool {
        j >= self.n_real
    }

    fn basic_values(&self) -> Vec<f64> {
        (0..self.m)
            .map(|i| self.binv[i].iter().zip(&self.rhs).map(|(a, b)| a * b).sum())
            .collect()
    }

    fn duals(&self, costs: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.m];
        for (i, &bj) in self.basis.iter().enumerate() {
            let cb = costs[bj];
            if cb == 0.0 {
                continue;
            }
            for (yk, bk) in y.iter_mut().zip(self.binv[i].iter()) {
                *yk += cb * bk;
            }
        }
        y
    }

    fn apply_binv(&self, col: &[f64]) -> Vec<f64> {
        (0..self.m)
            .map(|i| self.binv[i].iter().zip(col).map(|(a, b)| a * b).sum())
            .collect()
    }

    // Recompute the basis inverse from scratch (Gauss-Jordan with partial
    // pivoting) to shed accumulated round-off.
    fn refactorize(&mut self) -> Result<(), LpError> {
        let m = self.m;
        let mut work: Vec<Vec<f64>> = (0..m)
            .map(|i| {
                let mut row: Vec<f64> = self.basis.iter().map(|&j| self.cols[j][i]).collect();
                let mut id = vec![0.0; m];
                id[i] = 1.0;
                row.extend(id);
                row
            })
            .collect();
        for k in 0..m {
            let mut piv = k;
            for r in k + 1..m {
                if work[r][k].abs() > work[piv][k].abs() {
                    piv = r;
                }
            }
            if work[piv][k].abs() < 1e-12 {
                return Err(LpError::Singular);
            }
            work.swap(k, piv);
            let p = work[k][k];
            for v in work[k].iter_mut() {
                *v /= p;
            }
            for r in 0..m {
                if r != k {
                    let f = work[r][k];
                    if f != 0.0 {
                        for c in 0..2 * m {
                            work[r][c] -= f * work[k][c];
                        }
                    }
                }
            }
        }
        for i in 0..m {
            for c in 0..m {
                self.binv[i][c] = work[i][m + c];
            }
        }
        Ok(())
    }

    fn pivot(&mut self, row: usize, entering: usize, direction: &[f64]) {
        let pv = direction[row];
        for c in 0..self.m {
            self.binv[row][c] /= pv;
        }
        for i in 0..self.m {
            if i != row && direction[i] != 0.0 {
                let f = direction[i];
                for c in 0..self.m {
                    self.binv[i][c] -= f * self.binv[row][c];
                }
            }
        }
        self.basis[row] = entering;
    }

    // One simplex phase under Bland's rule. `allow` filters entering
    // candidates. Returns Ok(true) on optimality, Ok(false) on unboundedness.
    fn run_phase(
        &mut self,
        costs: &[f64],
        tol_opt: f64,
        max_iterations: usize,
        allow: impl Fn(usize) -> bool,
    ) -> Result<bool, LpError> {
        const PIVOT_TOL: f64 = 1e-10;
        const REFACTOR_EVERY: usize = 64;
        let mut since_refactor = 0usize;
        loop {
            let y = self.duals(costs);
            // Bland: the lowest-index candidate with negative reduced cost.
            let mut entering = None;
            'cols: for j in 0..self.ncols_total {
                if !allow(j) || self.basis.contains(&j) {
                    continue;
                }
                let d: f64 =
                    costs[j] - y.iter().zip(&self.cols[j]).map(|(a, b)| a * b).sum::<f64>();
                if d < -tol_opt {
                    entering = Some(j);
                    break 'cols;
                }
            }
            let entering = match entering {
                Some(j) => j,
                None => return Ok(true),
            };

            let direction = self.apply_binv(&self.cols[entering]);
            let xb = self.basic_values();
            // Ratio test; ties broken by the smallest basic variable index.
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.m {
                if direction[i] > PIVOT_TOL {
                    let ratio = (xb[i].max(0.0)) / direction[i];
                    match leave {
                        None => leave = Some((i, ratio)),
                        Some((li, lr)) => {
                            if ratio < lr - 1e-12
                                || ((ratio - lr).abs() <= 1e-12 && self.basis[i] < self.basis[li])
                            {
                                leave = Some((i, ratio));
                            }
                        }
                    }
                }
            }
            let (leave_row, _) = match leave {
                Some(l) => l,
                None => return Ok(false),
            };

            self.pivot(leave_row, entering, &direction);
            self.iterations += 1;
            since_refactor += 1;
            if since_refactor >= REFACTOR_EVERY {
                self.refactorize()?;
                since_refactor = 0;
            }
            if self.iterations >= max_iterations {
                return Err(LpError::IterationLimit {
                    iterations: self.iterations,
                });
            }
        }
    }
}

/// Solve a linear program; returns an `Optimal`, `Infeasible` or `Unbounded`
/// solution, or an error for malformed input and exhausted pivot budgets.
pub fn solve_lp(problem: &LpProblem, config: &LpConfig) -> Result<LpSolution, LpError> {
    problem.check()?;
    let sf = match build_standard_form(problem) {
        Ok(sf) => sf,
        Err(StandardFormOutcome::EmptyBox) => {
            return Ok(LpSolution::empty(LpStatus::Infeasible, 0))
        }
    };

    let mut t = Tableau::new(&sf);
    let m = t.m;
    let max_iterations = config
        .max_iterations
        .unwrap_or(50 * (m + t.ncols_total).max(1));

    if m == 0 {
        // no rows: each variable sits at its cheapest finite bound
        let mut x = vec![0.0; problem.num_vars()];
        let mut obj = 0.0;
        for (j, &c) in problem.costs.iter().enumerate() {
            let (lo, hi) = problem.bounds[j];
            let v = if c > 0.0 {
                if lo.is_finite() {
                    lo
                } else {
                    return Ok(LpSolution::empty(LpStatus::Unbounded, 0));
                }
            } else if c < 0.0 {
                if hi.is_finite() {
                    hi
                } else {
                    return Ok(LpSolution::empty(LpStatus::Unbounded, 0));
                }
            } else if lo.is_finite() {
                lo
            } else if hi.is_finite() {
                hi
            } else {
                0.0
            };
            x[j] = v;
            obj += c * v;
        }
        return Ok(LpSolution {
            status: LpStatus::Optimal,
            primal: x,
            duals: Vec::new(),
            objective: obj,
            dual_objective: obj,
            iterations: 0,
            basis: Vec::new(),
        });
    }

    // Phase 1: minimize the sum of artificial values.
    let has_artificials = t.ncols_total > t.n_real;
    if has_artificials {
        let mut phase1_costs = vec![0.0; t.ncols_total];
        for j in t.n_real..t.ncols_total {
            phase1_costs[j] = 1.0;
        }
        let optimal = t.run_phase(&phase1_costs, config.tol_opt, max_iterations, |_| true)?;
        if !optimal {
            // phase-1 objective is bounded below by zero
            return Err(LpError::Singular);
        }
        let xb = t.basic_values();
        let infeas: f64 = t
            .basis
            .iter()
            .zip(&xb)
            .filter(|(j, _)| t.is_artificial(**j))
            .map(|(_, v)| v.max(0.0))
            .sum();
        let scale = 1.0 + t.rhs.iter().fold(0.0f64, |a, b| a.max(b.abs()));
        if infeas > config.tol_feas.max(1e-9) * scale * 10.0 {
            return Ok(LpSolution::empty(LpStatus::Infeasible, t.iterations));
        }
        // Pivot zero-level artificials out of the basis where a real column
        // is available; rows with none are redundant and stay pinned at zero.
        for row in 0..m {
            if !t.is_artificial(t.basis[row]) {
                continue;
            }
            let mut target = None;
            for j in 0..t.n_real {
                if t.basis.contains(&j) {
                    continue;
                }
                let entry: f64 = t.binv[row].iter().zip(&t.cols[j]).map(|(a, b)| a * b).sum();
                if entry.abs() > 1e-7 {
                    target = Some(j);
                    break;
                }
            }
            if let Some(j) = target {
                let direction = t.apply_binv(&t.cols[j]);
                t.pivot(row, j, &direction);
                t.refactorize()?;
            }
        }
    }

    // Phase 2: the real objective; artificial columns may never re-enter.
    let mut phase2_costs = vec![0.0; t.ncols_total];
    phase2_costs[..sf.ncols].copy_from_slice(&sf.costs);
    let n_real = t.n_real;
    let optimal = t.run_phase(&phase2_costs, config.tol_opt, max_iterations, |j| {
        j < n_real
    })?;
    if !optimal {
        return Ok(LpSolution::empty(LpStatus::Unbounded, t.iterations));
    }
    t.refactorize()?;

    // Recover the primal point in original variable space.
    let xb = t.basic_values();
    let mut xt = vec![0.0; t.ncols_total];
    for (i, &j) in t.basis.iter().enumerate() {
        xt[j] = xb[i];
    }
    let mut x = vec![0.0; problem.num_vars()];
    for (j, vm) in sf.var_map.iter().enumerate() {
        x[j] = match *vm {
            VarMap::Shifted { col, lower } => lower + xt[col],
            VarMap::Mirrored { col, upper } => upper - xt[col],
            VarMap::Split { pos, neg } => xt[pos] - xt[neg],
        };
    }
    let objective: f64 = problem.costs.iter().zip(&x).map(|(c, v)| c * v).sum();
    debug_assert!(
        (objective
            - (xt
                .iter()
                .zip(&phase2_costs)
                .map(|(v, c)| c * v)
                .sum::<f64>()
                + sf.cost_offset))
            .abs()
            <= 1e-6 * (1.0 + objective.abs())
    );

    // Duals of the original rows: undo the rhs sign flips and drop the
    // internal bound rows.
    let y_int = t.duals(&phase2_costs);
    let duals: Vec<f64> = (0..sf.n_orig_rows)
        .map(|i| sf.row_sign[i] * y_int[i])
        .collect();

    // Dual objective with finite-bound contributions.
    let rc = reduced_costs(problem, &duals)?;
    let mut dual_objective: f64 = problem
        .rows
        .iter()
        .zip(&duals)
        .map(|(row, y)| row.rhs * y)
        .sum();
    for (j, &(lo, hi)) in problem.bounds.iter().enumerate() {
        let d = rc[j];
        if d > 0.0 && lo.is_finite() {
            dual_objective += d * lo;
        } else if d < 0.0 && hi.is_finite() {
            dual_objective += d * hi;
        }
    }

    Ok(LpSolution {
        status: LpStatus::Optimal,
        primal: x,
        duals,
        objective,
        dual_objective,
        iterations: t.iterations,
        basis: t.basis.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::util::Rng;

    fn solve(p: &LpProblem) -> LpSolution {
        solve_lp(p, &LpConfig::default()).expect("solve failed")
    }

    #[test]
    fn single_binding_constraint() {
        // min x  s.t. x >= 3, x >= 0
        let mut p = LpProblem::new(vec![1.0]);
        p.push_row(vec![1.0], Relation::Ge, 3.0);
        let s = solve(&p);
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.primal[0] - 3.0).abs() < 1e-9);
        assert!((s.objective - 3.0).abs() < 1e-9);
        assert!((s.duals[0] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn lowest_index_entering_picks_x() {
        // min -x - y  s.t. x + y <= 1. Three vertices: (0,0), (1,0), (0,1);
        // both unit vertices are optimal and Bland lands on x first.
        let mut p = LpProblem::new(vec![-1.0, -1.0]);
        p.push_row(vec![1.0, 1.0], Relation::Le, 1.0);
        let s = solve(&p);
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective + 1.0).abs() < 1e-9);
        assert!((s.primal[0] - 1.0).abs() < 1e-9);
        assert!(s.primal[1].abs() < 1e-9);
    }

    #[test]
    fn empty_feasible_set() {
        // min x  s.t. x <= -1, x >= 0
        let mut p = LpProblem::new(vec![1.0]);
        p.push_row(vec![1.0], Relation::Le, -1.0);
        let s = solve(&p);
        assert_eq!(s.status, LpStatus::Infeasible);
    }

    #[test]
    fn le_row_gets_nonpositive_dual() {
        // min -x  s.t. x <= 2: dual must be -1 so that rc = -1 - y >= 0.
        let mut p = LpProblem::new(vec![-1.0]);
        p.push_row(vec![1.0], Relation::Le, 2.0);
        let s = solve(&p);
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.primal[0] - 2.0).abs() < 1e-9);
        assert!((s.duals[0] + 1.0).abs() < 1e-9);
        let k = verify_kkt(&p, &s);
        assert!(k.max_primal_violation < 1e-9);
        assert!(k.max_dual_violation < 1e-9);
        assert!(k.duality_gap < 1e-9);
    }

    #[test]
    fn equality_row_and_free_dual() {
        // min x + 2y  s.t. x + y = 4, y <= 3
        let mut p = LpProblem::new(vec![1.0, 2.0]);
        p.push_row(vec![1.0, 1.0], Relation::Eq, 4.0);
        let s = solve(&p);
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.primal[0] - 4.0).abs() < 1e-9);
        assert!((s.objective - 4.0).abs() < 1e-9);
    }

    #[test]
    fn unbounded_detected() {
        let mut p = LpProblem::new(vec![-1.0, 0.0]);
        p.push_row(vec![0.0, 1.0], Relation::Le, 1.0);
        let s = solve(&p);
        assert_eq!(s.status, LpStatus::Unbounded);
    }

    #[test]
    fn upper_bounds_as_rows() {
        // min -x - 2y with 0 <= x <= 1.5, 0 <= y <= 2, x + y <= 3
        let mut p = LpProblem::new(vec![-1.0, -2.0]);
        p.bounds = vec![(0.0, 1.5), (0.0, 2.0)];
        p.push_row(vec![1.0, 1.0], Relation::Le, 3.0);
        let s = solve(&p);
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.primal[0] - 1.0).abs() < 1e-9);
        assert!((s.primal[1] - 2.0).abs() < 1e-9);
        assert!((s.objective + 5.0).abs() < 1e-9);
        let k = verify_kkt(&p, &s);
        assert!(k.duality_gap < 1e-8, "gap {}", k.duality_gap);
    }

    #[test]
    fn negative_lower_bound_and_free_variable() {
        // min x + y, x in [-5, 5], y free, x + y >= -2, y >= -4
        let mut p = LpProblem::new(vec![1.0, 1.0]);
        p.bounds = vec![(-5.0, 5.0), (f64::NEG_INFINITY, f64::INFINITY)];
        p.push_row(vec![1.0, 1.0], Relation::Ge, -2.0);
        p.push_row(vec![0.0, 1.0], Relation::Ge, -4.0);
        let s = solve(&p);
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective + 2.0).abs() < 1e-8, "obj {}", s.objective);
        let k = verify_kkt(&p, &s);
        assert!(k.max_primal_violation < 1e-8);
        assert!(k.duality_gap < 1e-8);
    }

    #[test]
    fn upper_bounded_only_variable_is_mirrored() {
        // x has no lower bound: the solver substitutes from the upper end
        let mut p = LpProblem::new(vec![-1.0, 1.0]);
        p.bounds = vec![(f64::NEG_INFINITY, 5.0), (0.0, 2.0)];
        p.push_row(vec![1.0, 1.0], Relation::Le, 10.0);
        let s = solve(&p);
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.primal[0] - 5.0).abs() < 1e-9);
        assert!(s.primal[1].abs() < 1e-9);
        assert!((s.objective + 5.0).abs() < 1e-9);
        let k = verify_kkt(&p, &s);
        assert!(k.max_primal_violation < 1e-9);
        assert!(k.max_dual_violation < 1e-9);
        assert!(k.duality_gap < 1e-8);
    }

    #[test]
    fn malformed_inputs_rejected() {
        let mut p = LpProblem::new(vec![1.0, 1.0]);
        p.push_row(vec![1.0], Relation::Le, 1.0);
        assert!(matches!(
            solve_lp(&p, &LpConfig::default()),
            Err(LpError::Malformed(_))
        ));
        let mut q = LpProblem::new(vec![f64::NAN]);
        q.push_row(vec![1.0], Relation::Le, 1.0);
        assert!(matches!(
            solve_lp(&q, &LpConfig::default()),
            Err(LpError::Malformed(_))
        ));
    }

    #[test]
    fn crossed_bounds_are_infeasible() {
        let mut p = LpProblem::new(vec![1.0]);
        p.bounds = vec![(2.0, 1.0)];
        let s = solve(&p);
        assert_eq!(s.status, LpStatus::Infeasible);
    }

    #[test]
    fn reduced_costs_zero_duals() {
        let mut p = LpProblem::new(vec![3.0, -2.0]);
        p.push_row(vec![1.0, 1.0], Relation::Le, 1.0);
        let rc = reduced_costs(&p, &[0.0]).unwrap();
        assert_eq!(rc, vec![3.0, -2.0]);
        assert!(reduced_costs(&p, &[0.0, 0.0]).is_err());
    }

    #[test]
    fn reduced_costs_nonnegative_at_optimum() {
        let mut p = LpProblem::new(vec![2.0, 3.0, 4.0]);
        p.push_row(vec![1.0, 1.0, 0.0], Relation::Ge, 2.0);
        p.push_row(vec![0.0, 1.0, 1.0], Relation::Ge, 3.0);
        let s = solve(&p);
        let rc = reduced_costs(&p, &s.duals).unwrap();
        for d in rc {
            assert!(d >= -1e-7);
        }
    }

    #[test]
    fn kkt_flags_injected_error() {
        let mut p = LpProblem::new(vec![1.0]);
        p.push_row(vec![1.0], Relation::Ge, 3.0);
        let mut s = solve(&p);
        let clean = verify_kkt(&p, &s);
        assert!(clean.max_primal_violation < 1e-12);
        s.primal[0] -= 0.1;
        let dirty = verify_kkt(&p, &s);
        assert!((dirty.max_primal_violation - 0.1).abs() < 1e-9);
    }

    #[test]
    fn beale_cycling_example_terminates_under_bland() {
        // Beale's classic cycling instance; Dantzig's rule cycles, Bland's
        // must reach the optimum -0.05 at x3 = 1.
        let mut p = LpProblem::new(vec![-0.75, 150.0, -0.02, 6.0]);
        p.push_row(vec![0.25, -60.0, -0.04, 9.0], Relation::Le, 0.0);
        p.push_row(vec![0.5, -90.0, -0.02, 3.0], Relation::Le, 0.0);
        p.push_row(vec![0.0, 0.0, 1.0, 0.0], Relation::Le, 1.0);
        let s = solve(&p);
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective + 0.05).abs() < 1e-9, "obj {}", s.objective);
        assert!((s.primal[2] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn redundant_equality_rows_are_harmless() {
        // the second row is twice the first: one artificial stays pinned
        // at zero in the basis of the dependent row
        let mut p = LpProblem::new(vec![1.0, 2.0]);
        p.push_row(vec![1.0, 1.0], Relation::Eq, 2.0);
        p.push_row(vec![2.0, 2.0], Relation::Eq, 4.0);
        let s = solve(&p);
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective - 2.0).abs() < 1e-9); // x = 2, y = 0
        let k = verify_kkt(&p, &s);
        assert!(k.max_primal_violation < 1e-9);
        assert!(k.duality_gap < 1e-8);
    }

    #[test]
    fn dump_is_readable() {
        let mut p = LpProblem::new(vec![1.0, -2.0]);
        p.bounds = vec![(0.0, 4.0), (0.0, f64::INFINITY)];
        p.push_row(vec![1.0, 1.0], Relation::Le, 3.0);
        let text = dump_problem(&p);
        assert!(text.contains("min"));
        assert!(text.contains("<= 3"));
        assert!(text.contains("x1"));
    }

    #[test]
    fn deterministic_bases() {
        let mut p = LpProblem::new(vec![1.0, 2.0, -1.0, 0.5]);
        p.bounds = vec![(0.0, 4.0); 4];
        p.push_row(vec![1.0, 1.0, 1.0, 1.0], Relation::Le, 6.0);
        p.push_row(vec![2.0, 0.0, 1.0, -1.0], Relation::Ge, 1.0);
        let a = solve(&p);
        let b = solve(&p);
        assert_eq!(a.basis, b.basis);
        assert_eq!(a.primal, b.primal);
        assert_eq!(a.objective.to_bits(), b.objective.to_bits());
    }

    // Random feasible bounded LPs: x* is sampled first and the rhs is set
    // around A x*, so feasibility holds by construction.
    fn random_lp(rng: &mut Rng, nvars: usize, nrows: usize) -> LpProblem {
        let xstar: Vec<f64> = (0..nvars).map(|_| rng.uniform(0.0, 3.0)).collect();
        let costs: Vec<f64> = (0..nvars).map(|_| rng.uniform(-5.0, 5.0)).collect();
        let mut p = LpProblem::new(costs);
        p.bounds = vec![(0.0, 10.0); nvars];
        for _ in 0..nrows {
            let coeffs: Vec<f64> = (0..nvars)
                .map(|_| {
                    if rng.unit() < 0.3 {
                        0.0
                    } else {
                        rng.uniform(-4.0, 4.0)
                    }
                })
                .collect();
            let act: f64 = coeffs.iter().zip(&xstar).map(|(a, b)| a * b).sum();
            match rng.below(3) {
                0 => p.push_row(coeffs, Relation::Le, act + rng.uniform(0.0, 2.0)),
                1 => p.push_row(coeffs, Relation::Ge, act - rng.uniform(0.0, 2.0)),
                _ => p.push_row(coeffs, Relation::Eq, act),
            }
        }
        p
    }

    #[test]
    fn strong_duality_on_seeded_lps() {
        let mut rng = Rng::new(20240601);
        for trial in 0..120 {
            let nvars = 2 + (rng.below(11) as usize);
            let nrows = 1 + (rng.below(9) as usize);
            let p = random_lp(&mut rng, nvars, nrows);
            let s = match solve_lp(&p, &LpConfig::default()) {
                Ok(s) => s,
                Err(e) => panic!("trial {}: {}", trial, e),
            };
            assert_eq!(s.status, LpStatus::Optimal, "trial {}", trial);
            let gap = (s.objective - s.dual_objective).abs();
            assert!(
                gap <= 1e-6 * (1.0 + s.objective.abs()),
                "trial {}: gap {}",
                trial,
                gap
            );
            let k = verify_kkt(&p, &s);
            assert!(k.max_primal_violation <= 1e-8, "trial {}: {:?}", trial, k);
            assert!(k.max_dual_violation <= 1e-8, "trial {}: {:?}", trial, k);
        }
    }

    #[test]
    fn iteration_limit_reported() {
        let mut p = LpProblem::new(vec![-1.0, -1.0, -1.0]);
        p.push_row(vec![1.0, 2.0, 3.0], Relation::Le, 10.0);
        p.push_row(vec![3.0, 1.0, 2.0], Relation::Le, 10.0);
        let cfg = LpConfig {
            max_iterations: Some(1),
            ..LpConfig::default()
        };
        match solve_lp(&p, &cfg) {
            Err(LpError::IterationLimit { iterations }) => assert_eq!(iterations, 1),
            other => panic!(
                "expected iteration limit, got {:?}",
                other.map(|s| s.status)
            ),
        }
    }
}
