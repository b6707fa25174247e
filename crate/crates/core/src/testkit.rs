//! Shared fixtures for unit tests.

use crate::lp::{LpRow, Relation};
use crate::model::{Block, BlockStructure, CompactModel, Variable};

/// CS-1: roll width 10, items (size 3, demand 4) and (size 5, demand 2),
/// as an aggregated knapsack block with an indicator variable:
/// block vars `(use, cut3, cut5)`, row `3 cut3 + 5 cut5 - 10 use <= 0`,
/// linking rows `cut3 >= 4` and `cut5 >= 2`, objective counts `use`.
///
/// Known values: LRMP optimum 7/3 with duals (1/3, 1/2), integer optimum 3.
pub fn cs1_model() -> CompactModel {
    CompactModel {
        variables: vec![
            Variable::integer("use", 0.0, 1.0),
            Variable::integer("cut3", 0.0, 3.0),
            Variable::integer("cut5", 0.0, 2.0),
        ],
        costs: vec![1.0, 0.0, 0.0],
        linking_rows: vec![
            LpRow {
                coeffs: vec![0.0, 1.0, 0.0],
                relation: Relation::Ge,
                rhs: 4.0,
            },
            LpRow {
                coeffs: vec![0.0, 0.0, 1.0],
                relation: Relation::Ge,
                rhs: 2.0,
            },
        ],
        block_rows: vec![vec![LpRow {
            coeffs: vec![-10.0, 3.0, 5.0],
            relation: Relation::Le,
            rhs: 0.0,
        }]],
        blocks: vec![Block {
            id: 0,
            var_start: 0,
            var_count: 3,
            structure: BlockStructure::Knapsack,
            multiplicity: Some(6),
        }],
    }
}

/// A one-task path block over the diamond 0 -> {1,2} -> 3 with arc order
/// (0-1, 0-2, 1-3, 2-3), costs (1, 2, 1, 2) and a shared capacity row per
/// arc of capacity 1.
pub fn diamond_model() -> CompactModel {
    let arcs = [(0usize, 1usize), (0, 2), (1, 3), (2, 3)];
    let costs = [1.0, 2.0, 1.0, 2.0];
    let n = arcs.len();
    let variables = arcs
        .iter()
        .map(|(t, h)| Variable::integer(format!("use_{}_{}", t, h), 0.0, 1.0))
        .collect();
    // flow conservation over nodes 0..4 for one unit 0 -> 3
    let mut block_rows = Vec::new();
    for node in 0..4usize {
        let mut coeffs = vec![0.0; n];
        for (j, (t, h)) in arcs.iter().enumerate() {
            if *t == node {
                coeffs[j] += 1.0;
            }
            if *h == node {
                coeffs[j] -= 1.0;
            }
        }
        let rhs = match node {
            0 => 1.0,
            3 => -1.0,
            _ => 0.0,
        };
        block_rows.push(LpRow {
            coeffs,
            relation: Relation::Eq,
            rhs,
        });
    }
    let linking_rows = (0..n)
        .map(|j| {
            let mut coeffs = vec![0.0; n];
            coeffs[j] = 1.0;
            LpRow {
                coeffs,
                relation: Relation::Le,
                rhs: 1.0,
            }
        })
        .collect();
    CompactModel {
        variables,
        costs: costs.to_vec(),
        linking_rows,
        block_rows: vec![block_rows],
        blocks: vec![Block {
            id: 0,
            var_start: 0,
            var_count: n,
            structure: BlockStructure::Path,
            multiplicity: None,
        }],
    }
}
