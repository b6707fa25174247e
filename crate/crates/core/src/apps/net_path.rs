//! Network service-path allocation: route each task's demand along one path
//! from its source to its sink, sharing arc capacities, minimizing the total
//! routed cost.
//!
//! One path block per task (convexity master): binary arc-usage variables
//! under flow-conservation rows, an optional hop budget row, and arc
//! capacity linking rows `sum_k demand_k * use_{k,a} <= capacity_a`. Arc
//! costs must be nonnegative, which keeps simple-path pricing exact.

use super::BuildError;
use crate::lp::{LpRow, Relation};
use crate::master::Column;
use crate::model::{block_submodel, Block, BlockStructure, CompactModel, Variable};
use crate::path::{k_shortest_paths, PathGraph};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NetArc {
    pub from: usize,
    pub to: usize,
    pub cost: f64,
    pub capacity: u32,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NetTask {
    pub src: usize,
    pub dst: usize,
    pub demand: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_hops: Option<u32>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NetPathInstance {
    pub nodes: usize,
    pub arcs: Vec<NetArc>,
    pub tasks: Vec<NetTask>,
}

impl NetPathInstance {
    pub fn validate(&self) -> Result<(), BuildError> {
        if self.nodes == 0 {
            return Err(BuildError::new("nodes", "must be positive"));
        }
        if self.tasks.is_empty() {
            return Err(BuildError::new("tasks", "at least one task"));
        }
        for (i, arc) in self.arcs.iter().enumerate() {
            if arc.from >= self.nodes || arc.to >= self.nodes {
                return Err(BuildError::new(
                    format!("arcs[{}]", i),
                    format!("endpoint outside 0..{}", self.nodes),
                ));
            }
            if arc.from == arc.to {
                return Err(BuildError::new(format!("arcs[{}]", i), "self loop"));
            }
            if arc.capacity == 0 {
                return Err(BuildError::new(
                    format!("arcs[{}].capacity", i),
                    "must be positive",
                ));
            }
            if !arc.cost.is_finite() || arc.cost < 0.0 {
                return Err(BuildError::new(
                    format!("arcs[{}].cost", i),
                    "must be a nonnegative number",
                ));
            }
        }
        for (k, task) in self.tasks.iter().enumerate() {
            if task.src >= self.nodes || task.dst >= self.nodes {
                return Err(BuildError::new(
                    format!("tasks[{}]", k),
                    format!("endpoint outside 0..{}", self.nodes),
                ));
            }
            if task.src == task.dst {
                return Err(BuildError::new(format!("tasks[{}]", k), "src equals dst"));
            }
            if task.demand == 0 {
                return Err(BuildError::new(
                    format!("tasks[{}].demand", k),
                    "must be at least 1",
                ));
            }
        }
        Ok(())
    }

    pub fn graph(&self) -> PathGraph {
        let mut g = PathGraph::new(self.nodes);
        for arc in &self.arcs {
            g.add_arc(arc.from, arc.to);
        }
        g
    }
}

pub fn build_net_path(instance: &NetPathInstance) -> CompactModel {
    let na = instance.arcs.len();
    let nt = instance.tasks.len();
    let total_vars = na * nt;

    let mut variables = Vec::with_capacity(total_vars);
    let mut costs = Vec::with_capacity(total_vars);
    for (k, task) in instance.tasks.iter().enumerate() {
        for (a, arc) in instance.arcs.iter().enumerate() {
            variables.push(Variable::integer(
                format!("t{}_a{}_{}_{}", k, a, arc.from, arc.to),
                0.0,
                1.0,
            ));
            costs.push(task.demand as f64 * arc.cost);
        }
    }

    // arc capacities couple all tasks
    let linking_rows = (0..na)
        .map(|a| {
            let mut coeffs = vec![0.0; total_vars];
            for (k, task) in instance.tasks.iter().enumerate() {
                coeffs[k * na + a] = task.demand as f64;
            }
            LpRow {
                coeffs,
                relation: Relation::Le,
                rhs: instance.arcs[a].capacity as f64,
            }
        })
        .collect();

    let mut block_rows = Vec::with_capacity(nt);
    for (k, task) in instance.tasks.iter().enumerate() {
        let mut rows = Vec::with_capacity(instance.nodes + 1);
        for node in 0..instance.nodes {
            let mut coeffs = vec![0.0; total_vars];
            for (a, arc) in instance.arcs.iter().enumerate() {
                if arc.from == node {
                    coeffs[k * na + a] += 1.0;
                }
                if arc.to == node {
                    coeffs[k * na + a] -= 1.0;
                }
            }
            let rhs = if node == task.src {
                1.0
            } else if node == task.dst {
                -1.0
            } else {
                0.0
            };
            rows.push(LpRow {
                coeffs,
                relation: Relation::Eq,
                rhs,
            });
        }
        if let Some(hops) = task.max_hops {
            let mut coeffs = vec![0.0; total_vars];
            for a in 0..na {
                coeffs[k * na + a] = 1.0;
            }
            rows.push(LpRow {
                coeffs,
                relation: Relation::Le,
                rhs: hops as f64,
            });
        }
        block_rows.push(rows);
    }

    let blocks = (0..nt)
        .map(|k| Block {
            id: k,
            var_start: k * na,
            var_count: na,
            structure: BlockStructure::Path,
            multiplicity: None,
        })
        .collect();

    CompactModel {
        variables,
        costs,
        linking_rows,
        block_rows,
        blocks,
    }
}

/// Up to three cheapest paths per task, capacities ignored; paths that
/// break the task's hop budget are dropped (artificials backstop whatever
/// is missing).
pub fn warm_start(model: &CompactModel, instance: &NetPathInstance) -> Vec<Column> {
    const K: usize = 3;
    let graph = instance.graph();
    let mut columns = Vec::new();
    for (k, task) in instance.tasks.iter().enumerate() {
        let prices: Vec<f64> = instance
            .arcs
            .iter()
            .map(|a| task.demand as f64 * a.cost)
            .collect();
        let sub = match block_submodel(model, k) {
            Ok(s) => s,
            Err(_) => continue,
        };
        let ranked = match k_shortest_paths(&graph, &prices, task.src, task.dst, K) {
            Ok(r) => r,
            Err(_) => continue,
        };
        for p in ranked {
            if let Some(hops) = task.max_hops {
                if p.arcs.len() > hops as usize {
                    continue;
                }
            }
            let mut values = vec![0.0; sub.num_vars()];
            for &a in &p.arcs {
                values[a] = 1.0;
            }
            columns.push(Column::from_point(&sub, values));
        }
    }
    columns
}
