//! Seeded instance generators. Same seed and parameters, byte-identical
//! instance — the generators feed both the CLI and the acceptance suite.

use super::cutting_stock::{CsItem, CuttingStockInstance};
use super::net_path::{NetArc, NetPathInstance, NetTask};
use crate::lp::{self, LpConfig, LpStatus};
use crate::model::lp_relaxation;
use crate::util::Rng;

#[derive(Clone, Copy, Debug)]
pub struct CsGenParams {
    pub items: usize,
    pub width: u32,
    pub max_size: u32,
    pub max_demand: u32,
}

impl Default for CsGenParams {
    fn default() -> Self {
        CsGenParams {
            items: 4,
            width: 30,
            max_size: 20,
            max_demand: 8,
        }
    }
}

pub fn gen_cutting_stock(seed: u64, params: &CsGenParams) -> Result<CuttingStockInstance, String> {
    if params.items == 0 || params.width == 0 {
        return Err("items and width must be positive".into());
    }
    let mut rng = Rng::new(seed ^ 0xc5_5e_ed);
    let hi = params.max_size.min(params.width).max(2);
    // sizes at least a seventh of the width keep pattern counts desk-scale
    let lo = (params.width / 7).max(2).min(hi);
    let mut items = Vec::with_capacity(params.items);
    for _ in 0..params.items {
        let size = rng.range(lo as i64, hi as i64) as u32;
        let demand = rng.range(1, params.max_demand.max(1) as i64) as u32;
        items.push(CsItem { size, demand });
    }
    let inst = CuttingStockInstance {
        roll_width: params.width,
        items,
    };
    inst.validate().map_err(|e| e.to_string())?;
    Ok(inst)
}

#[derive(Clone, Copy, Debug)]
pub struct NetGenParams {
    pub nodes: usize,
    pub extra_arcs: usize,
    pub tasks: usize,
    pub max_demand: u32,
    pub max_capacity: u32,
    /// Minimum distance between a task's source and sink in the spine
    /// ordering; larger spans admit more alternative routes.
    pub min_task_span: usize,
}

impl Default for NetGenParams {
    fn default() -> Self {
        NetGenParams {
            nodes: 8,
            extra_arcs: 10,
            tasks: 3,
            max_demand: 2,
            max_capacity: 3,
            min_task_span: 1,
        }
    }
}

/// Generate a net-path instance whose tasks are all individually routable:
/// a forward spine over a random node ordering guarantees source-to-sink
/// paths, and the joint capacity load is sanity-checked through the compact
/// LP relaxation, regenerating on failure (bounded retries).
pub fn gen_net_path(seed: u64, params: &NetGenParams) -> Result<NetPathInstance, String> {
    if params.nodes < 2 || params.tasks == 0 {
        return Err("need at least two nodes and one task".into());
    }
    for attempt in 0..60u64 {
        let mut rng = Rng::new(seed.wrapping_mul(0x9e37).wrapping_add(attempt) ^ 0x6e_e7);
        let n = params.nodes;

        // random ordering; spine arcs go forward so order[i] reaches order[j]
        // for i < j
        let mut order: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            let j = rng.below(i as u64 + 1) as usize;
            order.swap(i, j);
        }
        let mut seen = std::collections::HashSet::new();
        let mut arcs = Vec::new();
        for w in order.windows(2) {
            seen.insert((w[0], w[1]));
            arcs.push(NetArc {
                from: w[0],
                to: w[1],
                cost: rng.range(1, 9) as f64,
                capacity: rng.range(1, params.max_capacity.max(1) as i64) as u32,
            });
        }
        for _ in 0..params.extra_arcs {
            let from = rng.below(n as u64) as usize;
            let to = rng.below(n as u64) as usize;
            if from == to || seen.contains(&(from, to)) {
                continue;
            }
            seen.insert((from, to));
            arcs.push(NetArc {
                from,
                to,
                cost: rng.range(1, 9) as f64,
                capacity: rng.range(1, params.max_capacity.max(1) as i64) as u32,
            });
        }

        let span = params.min_task_span.clamp(1, n - 1);
        let mut tasks = Vec::with_capacity(params.tasks);
        for _ in 0..params.tasks {
            // src at least `span` positions before dst in the ordering
            let i = rng.below((n - span) as u64) as usize;
            let j = (i + span + rng.below((n - i - span) as u64) as usize).min(n - 1);
            tasks.push(NetTask {
                src: order[i],
                dst: order[j],
                demand: rng.range(1, params.max_demand.max(1) as i64) as u32,
                max_hops: None,
            });
        }

        let inst = NetPathInstance {
            nodes: n,
            arcs,
            tasks,
        };
        if inst.validate().is_err() {
            continue;
        }
        // joint-load sanity: the compact LP relaxation must be feasible
        let model = super::net_path::build_net_path(&inst);
        let lp = lp_relaxation(&model);
        match lp::solve_lp(&lp, &LpConfig::default()) {
            Ok(sol) if sol.status == LpStatus::Optimal => return Ok(inst),
            _ => continue,
        }
    }
    Err("unsatisfiable size parameters: no feasible instance within the retry budget".into())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_instance() {
        let p = CsGenParams::default();
        let a = gen_cutting_stock(7, &p).unwrap();
        let b = gen_cutting_stock(7, &p).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
        let c = gen_cutting_stock(8, &p).unwrap();
        assert_ne!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&c).unwrap()
        );

        let q = NetGenParams::default();
        let x = gen_net_path(3, &q).unwrap();
        let y = gen_net_path(3, &q).unwrap();
        assert_eq!(
            serde_json::to_string(&x).unwrap(),
            serde_json::to_string(&y).unwrap()
        );
    }

    #[test]
    fn batch_of_seeds_validates() {
        for seed in 0..50u64 {
            let cs = gen_cutting_stock(seed, &CsGenParams::default()).unwrap();
            assert!(cs.validate().is_ok());
            let np = gen_net_path(seed, &NetGenParams::default()).unwrap();
            assert!(np.validate().is_ok());
        }
    }
}
