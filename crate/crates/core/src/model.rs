//! Block-angular compact models.
//!
//! A [`CompactModel`] holds the original problem in the shape the
//! decomposition needs: a few linking rows coupling everything, plus per-block
//! row sets that each touch the variables of exactly one block. Blocks may
//! optionally be *aggregated*: a single representative block standing for
//! `multiplicity` identical copies (the cutting-stock pattern formulation),
//! in which case the master drops the convexity row and lets pattern counts
//! run free over `>= 0`.

use crate::lp::{LpProblem, LpRow, Relation};
use std::fmt;

#[derive(Clone, Debug)]
pub struct Variable {
    pub name: String,
    pub integer: bool,
    pub lower: f64,
    pub upper: f64,
}

impl Variable {
    pub fn integer(name: impl Into<String>, lower: f64, upper: f64) -> Self {
        Variable {
            name: name.into(),
            integer: true,
            lower,
            upper,
        }
    }

    pub fn continuous(name: impl Into<String>, lower: f64, upper: f64) -> Self {
        Variable {
            name: name.into(),
            integer: false,
            lower,
            upper,
        }
    }
}

/// Structure tag used to pick a pricing algorithm for the block.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BlockStructure {
    Generic,
    Knapsack,
    Path,
}

#[derive(Clone, Debug)]
pub struct Block {
    pub id: usize,
    pub var_start: usize,
    pub var_count: usize,
    pub structure: BlockStructure,
    /// `None`: the master carries a `sum(lambda) = 1` convexity row for this
    /// block. `Some(m)`: the block stands for `m` identical copies and its
    /// master weights are unconstrained pattern counts.
    pub multiplicity: Option<u32>,
}

impl Block {
    pub fn var_range(&self) -> std::ops::Range<usize> {
        self.var_start..self.var_start + self.var_count
    }

    pub fn is_aggregated(&self) -> bool {
        self.multiplicity.is_some()
    }
}

#[derive(Clone, Debug)]
pub struct CompactModel {
    pub variables: Vec<Variable>,
    pub costs: Vec<f64>,
    /// Complicating constraints; coefficients are dense over all variables.
    pub linking_rows: Vec<LpRow>,
    /// `block_rows[b]` are the rows owned by `blocks[b]`; coefficients are
    /// dense over all variables but must only touch that block's range.
    pub block_rows: Vec<Vec<LpRow>>,
    pub blocks: Vec<Block>,
}

#[derive(Clone, Debug)]
pub enum StructureViolation {
    BadDimension(String),
    VariableNotInAnyBlock {
        var: usize,
    },
    BlocksOverlap {
        first: usize,
        second: usize,
    },
    /// A row declared as belonging to one block touches variables of others.
    RowSpansBlocks {
        owner_block: usize,
        row: usize,
        touched_blocks: Vec<usize>,
    },
    BadBounds {
        var: usize,
    },
    NonFinite(String),
    BadMultiplicity {
        block: usize,
    },
}

impl fmt::Display for StructureViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StructureViolation::BadDimension(msg) => write!(f, "dimension mismatch: {}", msg),
            StructureViolation::VariableNotInAnyBlock { var } => {
                write!(f, "variable {} is not covered by any block", var)
            }
            StructureViolation::BlocksOverlap { first, second } => {
                write!(f, "blocks {} and {} overlap", first, second)
            }
            StructureViolation::RowSpansBlocks {
                owner_block,
                row,
                touched_blocks,
            } => write!(
                f,
                "row {} of block {} touches blocks {:?}",
                row, owner_block, touched_blocks
            ),
            StructureViolation::BadBounds { var } => {
                write!(f, "variable {} has lower > upper", var)
            }
            StructureViolation::NonFinite(msg) => write!(f, "non-finite data: {}", msg),
            StructureViolation::BadMultiplicity { block } => {
                write!(f, "block {} has zero multiplicity", block)
            }
        }
    }
}

#[derive(Clone, Debug)]
pub enum ModelError {
    UnknownBlock(usize),
    Invalid(Vec<StructureViolation>),
}

impl fmt::Display for ModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelError::UnknownBlock(id) => write!(f, "unknown block id {}", id),
            ModelError::Invalid(v) => {
                write!(f, "invalid model structure ({} violations)", v.len())
            }
        }
    }
}

impl std::error::Error for ModelError {}

/// Everything a pricer or enumerator needs about one block, with
/// coefficients re-indexed to the block's local variables.
#[derive(Clone, Debug)]
pub struct BlockSubmodel {
    pub block_id: usize,
    pub var_offset: usize,
    pub var_names: Vec<String>,
    pub costs: Vec<f64>,
    pub bounds: Vec<(f64, f64)>,
    pub integer: Vec<bool>,
    pub rows: Vec<LpRow>,
    /// Linking-row coefficient map restricted to this block: one local
    /// vector per linking row of the model.
    pub linking_coeffs: Vec<Vec<f64>>,
    pub structure: BlockStructure,
    pub multiplicity: Option<u32>,
}

impl BlockSubmodel {
    pub fn num_vars(&self) -> usize {
        self.costs.len()
    }

    /// Objective contribution of a block point.
    pub fn point_cost(&self, values: &[f64]) -> f64 {
        self.costs.iter().zip(values).map(|(c, v)| c * v).sum()
    }

    /// Linking-row coefficients generated by a block point.
    pub fn point_linking_coeffs(&self, values: &[f64]) -> Vec<f64> {
        self.linking_coeffs
            .iter()
            .map(|lc| lc.iter().zip(values).map(|(a, v)| a * v).sum())
            .collect()
    }

    /// Check a point against the block rows, bounds and integrality flags.
    pub fn check_point(&self, values: &[f64], tol: f64) -> Result<(), String> {
        if values.len() != self.num_vars() {
            return Err(format!(
                "point has {} values, block has {} variables",
                values.len(),
                self.num_vars()
            ));
        }
        for (j, &v) in values.iter().enumerate() {
            let (lo, hi) = self.bounds[j];
            if v < lo - tol || v > hi + tol {
                return Err(format!(
                    "{} = {} outside [{}, {}]",
                    self.var_names[j], v, lo, hi
                ));
            }
            if self.integer[j] && crate::util::frac_distance(v) > 1e-6 {
                return Err(format!("{} = {} is not integral", self.var_names[j], v));
            }
        }
        for (i, row) in self.rows.iter().enumerate() {
            let act: f64 = row.coeffs.iter().zip(values).map(|(a, v)| a * v).sum();
            let ok = match row.relation {
                Relation::Le => act <= row.rhs + tol,
                Relation::Ge => act >= row.rhs - tol,
                Relation::Eq => (act - row.rhs).abs() <= tol,
            };
            if !ok {
                return Err(format!(
                    "block row {} violated: {} {} {}",
                    i, act, row.relation, row.rhs
                ));
            }
        }
        Ok(())
    }
}

impl CompactModel {
    pub fn num_vars(&self) -> usize {
        self.variables.len()
    }

    pub fn block_of_var(&self, var: usize) -> Option<usize> {
        self.blocks
            .iter()
            .position(|b| b.var_range().contains(&var))
    }

    fn block_index(&self, block_id: usize) -> Option<usize> {
        self.blocks.iter().position(|b| b.id == block_id)
    }

    /// All variable costs and rhs values integral, all variables integer:
    /// the objective of any feasible integral solution is then an integer,
    /// which lets the tree search round node bounds up.
    pub fn integral_objective(&self) -> bool {
        self.variables.iter().all(|v| v.integer)
            && self
                .costs
                .iter()
                .all(|c| crate::util::frac_distance(*c) < 1e-12)
    }
}

/// Structural validation; an empty result means the model is block-angular.
pub fn validate(model: &CompactModel) -> Vec<StructureViolation> {
    let mut out = Vec::new();
    let n = model.num_vars();
    if model.costs.len() != n {
        out.push(StructureViolation::BadDimension(format!(
            "{} costs for {} variables",
            model.costs.len(),
            n
        )));
    }
    if model.block_rows.len() != model.blocks.len() {
        out.push(StructureViolation::BadDimension(format!(
            "{} block row sets for {} blocks",
            model.block_rows.len(),
            model.blocks.len()
        )));
    }

    let mut owner: Vec<Option<usize>> = vec![None; n];
    for (bi, block) in model.blocks.iter().enumerate() {
        if block.var_start + block.var_count > n {
            out.push(StructureViolation::BadDimension(format!(
                "block {} range {:?} exceeds {} variables",
                block.id,
                block.var_range(),
                n
            )));
            continue;
        }
        for v in block.var_range() {
            match owner[v] {
                None => owner[v] = Some(bi),
                Some(first) => out.push(StructureViolation::BlocksOverlap {
                    first: model.blocks[first].id,
                    second: block.id,
                }),
            }
        }
        if block.multiplicity == Some(0) {
            out.push(StructureViolation::BadMultiplicity { block: block.id });
        }
    }
    for (v, o) in owner.iter().enumerate() {
        if o.is_none() {
            out.push(StructureViolation::VariableNotInAnyBlock { var: v });
        }
    }

    for (j, var) in model.variables.iter().enumerate() {
        if var.lower > var.upper {
            out.push(StructureViolation::BadBounds { var: j });
        }
        if !var.lower.is_finite() && !var.upper.is_finite() && var.lower.is_nan() {
            out.push(StructureViolation::NonFinite(format!(
                "bounds of {}",
                var.name
            )));
        }
    }
    for (what, rows) in std::iter::once(("linking", &model.linking_rows))
        .chain(model.block_rows.iter().map(|r| ("block", r)))
    {
        for (i, row) in rows.iter().enumerate() {
            if row.coeffs.len() != n {
                out.push(StructureViolation::BadDimension(format!(
                    "{} row {} has {} coefficients for {} variables",
                    what,
                    i,
                    row.coeffs.len(),
                    n
                )));
            } else if !row.rhs.is_finite() || row.coeffs.iter().any(|a| !a.is_finite()) {
                out.push(StructureViolation::NonFinite(format!("{} row {}", what, i)));
            }
        }
    }

    // block rows must not reach outside their block
    for (bi, rows) in model.block_rows.iter().enumerate() {
        if bi >= model.blocks.len() {
            break;
        }
        let range = model.blocks[bi].var_range();
        for (ri, row) in rows.iter().enumerate() {
            if row.coeffs.len() != n {
                continue;
            }
            let mut touched: Vec<usize> = Vec::new();
            for (v, &a) in row.coeffs.iter().enumerate() {
                if a != 0.0 && !range.contains(&v) {
                    if let Some(ob) = model.block_of_var(v) {
                        let id = model.blocks[ob].id;
                        if !touched.contains(&id) {
                            touched.push(id);
                        }
                    }
                }
            }
            if !touched.is_empty() {
                let mut all = vec![model.blocks[bi].id];
                all.extend(touched);
                out.push(StructureViolation::RowSpansBlocks {
                    owner_block: model.blocks[bi].id,
                    row: ri,
                    touched_blocks: all,
                });
            }
        }
    }
    out
}

/// LP relaxation of the compact model: integrality dropped, aggregated
/// blocks expanded into their `multiplicity` identical copies.
pub fn lp_relaxation(model: &CompactModel) -> LpProblem {
    let copies: Vec<u32> = model
        .blocks
        .iter()
        .map(|b| b.multiplicity.unwrap_or(1))
        .collect();
    let total_vars: usize = model
        .blocks
        .iter()
        .zip(&copies)
        .map(|(b, &m)| b.var_count * m as usize)
        .sum();

    // column index of (block position, copy, local var) in the relaxation
    let mut offset = Vec::with_capacity(model.blocks.len());
    let mut cursor = 0usize;
    for (b, &m) in model.blocks.iter().zip(&copies) {
        offset.push(cursor);
        cursor += b.var_count * m as usize;
    }

    let mut costs = vec![0.0; total_vars];
    let mut bounds = vec![(0.0, f64::INFINITY); total_vars];
    for (bi, block) in model.blocks.iter().enumerate() {
        for copy in 0..copies[bi] as usize {
            for (local, v) in block.var_range().enumerate() {
                let col = offset[bi] + copy * block.var_count + local;
                costs[col] = model.costs[v];
                bounds[col] = (model.variables[v].lower, model.variables[v].upper);
            }
        }
    }

    let mut lp = LpProblem::new(costs);
    lp.bounds = bounds;
    for row in &model.linking_rows {
        let mut coeffs = vec![0.0; total_vars];
        for (bi, block) in model.blocks.iter().enumerate() {
            for copy in 0..copies[bi] as usize {
                for (local, v) in block.var_range().enumerate() {
                    let a = row.coeffs[v];
                    if a != 0.0 {
                        coeffs[offset[bi] + copy * block.var_count + local] = a;
                    }
                }
            }
        }
        lp.push_row(coeffs, row.relation, row.rhs);
    }
    for (bi, block) in model.blocks.iter().enumerate() {
        for row in &model.block_rows[bi] {
            for copy in 0..copies[bi] as usize {
                let mut coeffs = vec![0.0; total_vars];
                for (local, v) in block.var_range().enumerate() {
                    let a = row.coeffs[v];
                    if a != 0.0 {
                        coeffs[offset[bi] + copy * block.var_count + local] = a;
                    }
                }
                lp.push_row(coeffs, row.relation, row.rhs);
            }
        }
    }
    lp
}

/// Extract one block as a standalone constraint set with local indices.
pub fn block_submodel(model: &CompactModel, block_id: usize) -> Result<BlockSubmodel, ModelError> {
    let bi = model
        .block_index(block_id)
        .ok_or(ModelError::UnknownBlock(block_id))?;
    let block = &model.blocks[bi];
    let range = block.var_range();

    let rows = model.block_rows[bi]
        .iter()
        .map(|row| LpRow {
            coeffs: row.coeffs[range.clone()].to_vec(),
            relation: row.relation,
            rhs: row.rhs,
        })
        .collect();
    let linking_coeffs = model
        .linking_rows
        .iter()
        .map(|row| row.coeffs[range.clone()].to_vec())
        .collect();

    Ok(BlockSubmodel {
        block_id,
        var_offset: block.var_start,
        var_names: model.variables[range.clone()]
            .iter()
            .map(|v| v.name.clone())
            .collect(),
        costs: model.costs[range.clone()].to_vec(),
        bounds: model.variables[range.clone()]
            .iter()
            .map(|v| (v.lower, v.upper))
            .collect(),
        integer: model.variables[range.clone()]
            .iter()
            .map(|v| v.integer)
            .collect(),
        rows,
        linking_coeffs,
        structure: block.structure,
        multiplicity: block.multiplicity,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    // The three-block toy with one complicating row: x1 + x2 + x3 <= 10
    // linking, and one private row per block.
    fn three_block_toy() -> CompactModel {
        let variables = vec![
            Variable::integer("x1", 0.0, 10.0),
            Variable::integer("x2", 0.0, 10.0),
            Variable::integer("x3", 0.0, 10.0),
        ];
        let linking = vec![LpRow {
            coeffs: vec![1.0, 1.0, 1.0],
            relation: Relation::Le,
            rhs: 10.0,
        }];
        let block_rows = vec![
            vec![LpRow {
                coeffs: vec![2.0, 0.0, 0.0],
                relation: Relation::Le,
                rhs: 7.0,
            }],
            vec![LpRow {
                coeffs: vec![0.0, 1.0, 0.0],
                relation: Relation::Le,
                rhs: 5.0,
            }],
            vec![LpRow {
                coeffs: vec![0.0, 0.0, 3.0],
                relation: Relation::Le,
                rhs: 9.0,
            }],
        ];
        let blocks = (0..3)
            .map(|i| Block {
                id: i,
                var_start: i,
                var_count: 1,
                structure: BlockStructure::Generic,
                multiplicity: None,
            })
            .collect();
        CompactModel {
            variables,
            costs: vec![-1.0, -2.0, -2.0],
            linking_rows: linking,
            block_rows,
            blocks,
        }
    }

    #[test]
    fn toy_validates_clean() {
        assert!(validate(&three_block_toy()).is_empty());
    }

    #[test]
    fn cross_block_row_is_flagged() {
        let mut m = three_block_toy();
        // a row of block 0 that also touches x2
        m.block_rows[0].push(LpRow {
            coeffs: vec![1.0, 1.0, 0.0],
            relation: Relation::Le,
            rhs: 3.0,
        });
        let v = validate(&m);
        assert_eq!(v.len(), 1);
        match &v[0] {
            StructureViolation::RowSpansBlocks {
                owner_block,
                row,
                touched_blocks,
            } => {
                assert_eq!(*owner_block, 0);
                assert_eq!(*row, 1);
                assert!(touched_blocks.contains(&1));
            }
            other => panic!("unexpected violation {:?}", other),
        }
    }

    #[test]
    fn uncovered_variable_is_flagged() {
        let mut m = three_block_toy();
        m.blocks.pop();
        m.block_rows.pop();
        // block row of removed block would now be out of place; drop it too
        let v = validate(&m);
        assert!(v
            .iter()
            .any(|x| matches!(x, StructureViolation::VariableNotInAnyBlock { var: 2 })));
    }

    #[test]
    fn submodel_of_middle_block() {
        let m = three_block_toy();
        let sub = block_submodel(&m, 1).unwrap();
        assert_eq!(sub.num_vars(), 1);
        assert_eq!(sub.var_names, vec!["x2".to_string()]);
        assert_eq!(sub.rows.len(), 1);
        assert_eq!(sub.rows[0].coeffs, vec![1.0]);
        assert_eq!(sub.rows[0].rhs, 5.0);
        assert_eq!(sub.linking_coeffs, vec![vec![1.0]]);
        assert!(block_submodel(&m, 9).is_err());
    }

    #[test]
    fn single_block_submodel_is_whole_model_minus_linking() {
        let m = CompactModel {
            variables: vec![
                Variable::continuous("a", 0.0, 4.0),
                Variable::continuous("b", 0.0, 4.0),
            ],
            costs: vec![1.0, 1.0],
            linking_rows: vec![LpRow {
                coeffs: vec![1.0, 1.0],
                relation: Relation::Ge,
                rhs: 1.0,
            }],
            block_rows: vec![vec![LpRow {
                coeffs: vec![1.0, 2.0],
                relation: Relation::Le,
                rhs: 6.0,
            }]],
            blocks: vec![Block {
                id: 0,
                var_start: 0,
                var_count: 2,
                structure: BlockStructure::Generic,
                multiplicity: None,
            }],
        };
        let sub = block_submodel(&m, 0).unwrap();
        assert_eq!(sub.rows.len(), m.block_rows[0].len());
        assert_eq!(sub.costs, m.costs);
        assert_eq!(sub.bounds.len(), 2);
    }

    #[test]
    fn relaxation_of_pure_lp_is_identical() {
        let m = three_block_toy();
        let lp = lp_relaxation(&m);
        assert_eq!(lp.num_vars(), 3);
        assert_eq!(lp.num_rows(), 4); // 1 linking + 3 block rows
        assert_eq!(lp.costs, m.costs);
        assert_eq!(lp.rows[0].coeffs, vec![1.0, 1.0, 1.0]);
        assert_eq!(lp.bounds[1], (0.0, 10.0));
    }

    #[test]
    fn relaxation_expands_aggregated_blocks() {
        // one block (2 vars) standing for 3 copies
        let m = CompactModel {
            variables: vec![
                Variable::integer("y", 0.0, 1.0),
                Variable::integer("z", 0.0, 5.0),
            ],
            costs: vec![1.0, 0.0],
            linking_rows: vec![LpRow {
                coeffs: vec![0.0, 1.0],
                relation: Relation::Ge,
                rhs: 4.0,
            }],
            block_rows: vec![vec![LpRow {
                coeffs: vec![-6.0, 2.0],
                relation: Relation::Le,
                rhs: 0.0,
            }]],
            blocks: vec![Block {
                id: 0,
                var_start: 0,
                var_count: 2,
                structure: BlockStructure::Knapsack,
                multiplicity: Some(3),
            }],
        };
        let lp = lp_relaxation(&m);
        assert_eq!(lp.num_vars(), 6);
        assert_eq!(lp.num_rows(), 1 + 3);
        // linking row sums z over all copies
        assert_eq!(lp.rows[0].coeffs, vec![0.0, 1.0, 0.0, 1.0, 0.0, 1.0]);
        // each copy gets its own capacity row
        assert_eq!(lp.rows[1].coeffs, vec![-6.0, 2.0, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(lp.rows[3].coeffs, vec![0.0, 0.0, 0.0, 0.0, -6.0, 2.0]);
    }

    #[test]
    fn block_rows_round_trip() {
        // union of submodel rows re-embedded plus linking rows reproduces
        // the compact row set
        let m = three_block_toy();
        let mut rebuilt: Vec<Vec<f64>> = Vec::new();
        for b in &m.blocks {
            let sub = block_submodel(&m, b.id).unwrap();
            for row in &sub.rows {
                let mut global = vec![0.0; m.num_vars()];
                for (local, a) in row.coeffs.iter().enumerate() {
                    global[sub.var_offset + local] = *a;
                }
                rebuilt.push(global);
            }
        }
        let originals: Vec<&LpRow> = m.block_rows.iter().flatten().collect();
        assert_eq!(rebuilt.len(), originals.len());
        for (got, want) in rebuilt.iter().zip(originals) {
            assert_eq!(got, &want.coeffs);
        }
    }

    #[test]
    fn point_check_catches_violations() {
        let m = three_block_toy();
        let sub = block_submodel(&m, 0).unwrap();
        assert!(sub.check_point(&[3.0], 1e-9).is_ok());
        assert!(sub.check_point(&[4.0], 1e-9).is_err()); // 2*4 > 7
        assert!(sub.check_point(&[2.5], 1e-9).is_err()); // not integral
        assert!(sub.check_point(&[-1.0], 1e-9).is_err()); // below bound
    }

    #[test]
    fn integral_objective_detection() {
        let mut m = three_block_toy();
        assert!(m.integral_objective());
        m.costs[0] = -1.5;
        assert!(!m.integral_objective());
    }
}
