//! Cutting stock: cover per-item demand with cut patterns of a fixed roll
//! width, minimizing the number of rolls.
//!
//! The compact model is one aggregated knapsack block standing for
//! `sum(demand)` identical rolls: a binary `use` indicator plus one count
//! per item type, coupled by `sum(size_i * cut_i) <= width * use`. Columns
//! are cut patterns with cost `use`, and the master counts pattern copies.

use super::BuildError;
use crate::lp::{LpRow, Relation};
use crate::master::Column;
use crate::model::{block_submodel, Block, BlockStructure, CompactModel, Variable};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CsItem {
    pub size: u32,
    pub demand: u32,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CuttingStockInstance {
    pub roll_width: u32,
    pub items: Vec<CsItem>,
}

impl CuttingStockInstance {
    pub fn validate(&self) -> Result<(), BuildError> {
        if self.roll_width == 0 {
            return Err(BuildError::new("roll_width", "must be positive"));
        }
        if self.items.is_empty() {
            return Err(BuildError::new("items", "at least one item type"));
        }
        for (i, item) in self.items.iter().enumerate() {
            if item.size == 0 || item.size > self.roll_width {
                return Err(BuildError::new(
                    format!("items[{}].size", i),
                    format!("must be in 1..={}", self.roll_width),
                ));
            }
            if item.demand == 0 {
                return Err(BuildError::new(
                    format!("items[{}].demand", i),
                    "must be at least 1",
                ));
            }
        }
        Ok(())
    }

    pub fn total_demand(&self) -> u32 {
        self.items.iter().map(|i| i.demand).sum()
    }

    /// `sum(size * demand) / width`: no packing can beat this roll count.
    pub fn volume_bound(&self) -> f64 {
        let volume: u64 = self
            .items
            .iter()
            .map(|i| i.size as u64 * i.demand as u64)
            .sum();
        volume as f64 / self.roll_width as f64
    }
}

pub fn build_cutting_stock(instance: &CuttingStockInstance) -> CompactModel {
    let m = instance.items.len();
    let n = m + 1; // indicator + one count per item

    let mut variables = vec![Variable::integer("use", 0.0, 1.0)];
    for (i, item) in instance.items.iter().enumerate() {
        let per_roll = instance.roll_width / item.size;
        let ub = per_roll.min(item.demand) as f64;
        variables.push(Variable::integer(format!("cut{}", i), 0.0, ub));
    }

    let mut costs = vec![0.0; n];
    costs[0] = 1.0;

    let linking_rows = instance
        .items
        .iter()
        .enumerate()
        .map(|(i, item)| {
            let mut coeffs = vec![0.0; n];
            coeffs[i + 1] = 1.0;
            LpRow {
                coeffs,
                relation: Relation::Ge,
                rhs: item.demand as f64,
            }
        })
        .collect();

    let mut capacity = vec![0.0; n];
    capacity[0] = -(instance.roll_width as f64);
    for (i, item) in instance.items.iter().enumerate() {
        capacity[i + 1] = item.size as f64;
    }

    CompactModel {
        variables,
        costs,
        linking_rows,
        block_rows: vec![vec![LpRow {
            coeffs: capacity,
            relation: Relation::Le,
            rhs: 0.0,
        }]],
        blocks: vec![Block {
            id: 0,
            var_start: 0,
            var_count: n,
            structure: BlockStructure::Knapsack,
            multiplicity: Some(instance.total_demand()),
        }],
    }
}

/// Singleton patterns: one piece of one item type per roll.
pub fn warm_start(model: &CompactModel, instance: &CuttingStockInstance) -> Vec<Column> {
    let sub = block_submodel(model, 0).expect("cutting stock has block 0");
    (0..instance.items.len())
        .map(|i| {
            let mut values = vec![0.0; sub.num_vars()];
            values[0] = 1.0;
            values[i + 1] = 1.0;
            Column::from_point(&sub, values)
        })
        .collect()
}
