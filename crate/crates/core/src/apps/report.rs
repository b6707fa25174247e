//! Solution reports: a JSON document with a fixed top-level shape
//! (`status`, `objective`, `bounds`, `iterations`, `nodes`, `wall_ms`,
//! `verified`, `solution`) plus a human-readable rendering.
//!
//! A report only claims `verified: true` after the assembled solution has
//! been re-checked against the compact model; capped or infeasible runs
//! never carry an "optimal" status.

use super::Instance;
use crate::branch_price::{BpResult, BpTermination};
use crate::colgen::{verify_solution, CgResult, CgTermination, IntegerSolution};
use crate::model::CompactModel;
use crate::oracle::{BruteForceSolution, MipResult};
use serde::Serialize;
use serde_json::{json, Value};

#[derive(Clone, Debug, Serialize)]
pub struct ReportBounds {
    pub lb: Option<f64>,
    pub ub: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub status: String,
    pub objective: Option<f64>,
    pub bounds: ReportBounds,
    pub iterations: usize,
    pub nodes: usize,
    pub wall_ms: u128,
    pub verified: bool,
    pub solution: Option<Value>,
}

fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

/// Exit code the CLI maps this report to: 0 solved, 2 infeasible, 3 limit.
pub fn exit_code(report: &Report) -> i32 {
    match report.status.as_str() {
        "optimal" | "converged" | "feasible" => 0,
        "infeasible" => 2,
        _ => 3,
    }
}

pub enum SolveOutcome<'a> {
    Cg {
        cg: &'a CgResult,
        rounded: Option<&'a IntegerSolution>,
    },
    Bp(&'a BpResult),
    Oracle(Option<&'a MipResult>, usize),
}

pub fn solution_report(
    instance: &Instance,
    model: &CompactModel,
    outcome: &SolveOutcome,
    wall_ms: u128,
) -> Report {
    match outcome {
        SolveOutcome::Cg { cg, rounded } => {
            let status = if cg.artificials_active {
                "infeasible_or_under_initialized".to_string()
            } else {
                match cg.termination {
                    CgTermination::Converged => "converged".to_string(),
                    CgTermination::IterationCap => "iteration_cap".to_string(),
                    CgTermination::TimeLimit => "time_limit".to_string(),
                }
            };
            let (solution, verified) = match rounded {
                Some(sol) => {
                    let ok = verify_solution(model, sol).is_ok();
                    (Some(render_solution_json(instance, model, sol, ok)), ok)
                }
                None => (None, false),
            };
            Report {
                status,
                objective: rounded.map(|s| s.objective).or(finite(cg.objective)),
                bounds: ReportBounds {
                    lb: finite(cg.lagrangian_lb),
                    ub: rounded.map(|s| s.objective),
                },
                iterations: cg.iterations,
                nodes: 0,
                wall_ms,
                verified,
                solution,
            }
        }
        SolveOutcome::Bp(bp) => {
            let status = match bp.termination {
                BpTermination::Optimal => "optimal".to_string(),
                BpTermination::Infeasible => "infeasible".to_string(),
                BpTermination::BeamExhausted => {
                    if bp.objective.is_some() {
                        "feasible".to_string()
                    } else {
                        "beam_exhausted".to_string()
                    }
                }
                BpTermination::NodeLimit => "node_limit".to_string(),
                BpTermination::TimeLimit => "time_limit".to_string(),
            };
            let (solution, verified) = match &bp.solution {
                Some(sol) => {
                    let ok = verify_solution(model, sol).is_ok();
                    (Some(render_solution_json(instance, model, sol, ok)), ok)
                }
                None => (None, false),
            };
            Report {
                status,
                objective: bp.objective,
                bounds: ReportBounds {
                    lb: finite(bp.lower_bound),
                    ub: finite(bp.upper_bound),
                },
                iterations: bp.cg_iterations,
                nodes: bp.nodes_explored,
                wall_ms,
                verified,
                solution,
            }
        }
        SolveOutcome::Oracle(mip, nodes) => match mip {
            Some(res) => {
                let sol = brute_force_to_integer_solution(model, res);
                let ok = verify_solution(model, &sol).is_ok();
                Report {
                    status: "optimal".to_string(),
                    objective: Some(res.objective),
                    bounds: ReportBounds {
                        lb: Some(res.objective),
                        ub: Some(res.objective),
                    },
                    iterations: 0,
                    nodes: res.nodes,
                    wall_ms,
                    verified: ok,
                    solution: Some(render_solution_json(instance, model, &sol, ok)),
                }
            }
            None => Report {
                status: "infeasible".to_string(),
                objective: None,
                bounds: ReportBounds { lb: None, ub: None },
                iterations: 0,
                nodes: *nodes,
                wall_ms,
                verified: false,
                solution: None,
            },
        },
    }
}

fn brute_force_to_integer_solution(model: &CompactModel, mip: &MipResult) -> IntegerSolution {
    match &mip.solution {
        BruteForceSolution::Convex { block_points } => IntegerSolution {
            objective: mip.objective,
            block_points: block_points.clone(),
            patterns: Vec::new(),
        },
        BruteForceSolution::Aggregated { patterns } => IntegerSolution {
            objective: mip.objective,
            block_points: model.blocks.iter().map(|_| Vec::new()).collect(),
            patterns: patterns.clone(),
        },
    }
}

fn render_solution_json(
    instance: &Instance,
    model: &CompactModel,
    solution: &IntegerSolution,
    verified: bool,
) -> Value {
    match instance {
        Instance::CuttingStock(_) => {
            let mut patterns: Vec<Value> = Vec::new();
            let mut rolls = 0u32;
            for (values, copies) in &solution.patterns {
                // values[0] is the use indicator; the counts follow
                let counts: Vec<u64> = values.iter().skip(1).map(|v| v.round() as u64).collect();
                rolls += copies;
                patterns.push(json!({ "counts": counts, "copies": copies }));
            }
            json!({ "rolls": rolls, "patterns": patterns, "verified": verified })
        }
        Instance::NetPath(inst) => {
            let na = inst.arcs.len();
            let mut tasks: Vec<Value> = Vec::new();
            let mut loads = vec![0u64; na];
            for (k, task) in inst.tasks.iter().enumerate() {
                let usage = &solution.block_points[k];
                let used: Vec<usize> = (0..na).filter(|&a| usage[a] > 0.5).collect();
                for &a in &used {
                    loads[a] += task.demand as u64;
                }
                // walk the path from the source
                let mut nodes = vec![task.src];
                let mut arc_order = Vec::new();
                let mut cur = task.src;
                let mut remaining = used.clone();
                while cur != task.dst {
                    let next = remaining.iter().position(|&a| inst.arcs[a].from == cur);
                    match next {
                        Some(i) => {
                            let a = remaining.remove(i);
                            arc_order.push(a);
                            cur = inst.arcs[a].to;
                            nodes.push(cur);
                        }
                        None => break, // not a path; verification already failed
                    }
                }
                let cost: f64 = used
                    .iter()
                    .map(|&a| task.demand as f64 * inst.arcs[a].cost)
                    .sum();
                tasks.push(json!({
                    "task": k,
                    "nodes": nodes,
                    "arcs": arc_order,
                    "cost": cost,
                }));
            }
            let arc_loads: Vec<Value> = inst
                .arcs
                .iter()
                .enumerate()
                .map(|(a, arc)| {
                    json!({
                        "arc": a,
                        "from": arc.from,
                        "to": arc.to,
                        "load": loads[a],
                        "capacity": arc.capacity,
                    })
                })
                .collect();
            let _ = model;
            json!({ "tasks": tasks, "arc_loads": arc_loads, "verified": verified })
        }
    }
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("status     : {}\n", self.status));
        match self.objective {
            Some(v) => out.push_str(&format!("objective  : {}\n", v)),
            None => out.push_str("objective  : -\n"),
        }
        out.push_str(&format!(
            "bounds     : lb {} / ub {}\n",
            self.bounds.lb.map_or("-".into(), |v| format!("{}", v)),
            self.bounds.ub.map_or("-".into(), |v| format!("{}", v)),
        ));
        out.push_str(&format!(
            "iterations : {}  nodes : {}  wall_ms : {}\n",
            self.iterations, self.nodes, self.wall_ms
        ));
        out.push_str(&format!("verified   : {}\n", self.verified));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::apps::cutting_stock::warm_start as cs_warm;
    use crate::apps::cutting_stock::CsItem;
    use crate::apps::net_path::warm_start as np_warm;
    use crate::apps::net_path::{NetArc, NetTask};
    use crate::apps::{CuttingStockInstance, NetPathInstance};
    use crate::branch_price::{run_bp, BpConfig};
    use crate::colgen::{run_cg, CgConfig};
    use crate::master::init_rmp;
    use crate::pricing::StructurePricer;

    fn cs1() -> CuttingStockInstance {
        CuttingStockInstance {
            roll_width: 10,
            items: vec![CsItem { size: 3, demand: 4 }, CsItem { size: 5, demand: 2 }],
        }
    }

    fn np1() -> NetPathInstance {
        NetPathInstance {
            nodes: 5,
            arcs: vec![
                NetArc {
                    from: 0,
                    to: 2,
                    cost: 1.0,
                    capacity: 1,
                },
                NetArc {
                    from: 1,
                    to: 2,
                    cost: 1.0,
                    capacity: 1,
                },
                NetArc {
                    from: 2,
                    to: 4,
                    cost: 1.0,
                    capacity: 1,
                },
                NetArc {
                    from: 0,
                    to: 3,
                    cost: 2.0,
                    capacity: 1,
                },
                NetArc {
                    from: 1,
                    to: 3,
                    cost: 2.0,
                    capacity: 1,
                },
                NetArc {
                    from: 3,
                    to: 4,
                    cost: 2.0,
                    capacity: 1,
                },
            ],
            tasks: vec![
                NetTask {
                    src: 0,
                    dst: 4,
                    demand: 1,
                    max_hops: None,
                },
                NetTask {
                    src: 1,
                    dst: 4,
                    demand: 1,
                    max_hops: None,
                },
            ],
        }
    }

    #[test]
    fn cs1_bp_report_is_verified_three_rolls() {
        let inst = Instance::CuttingStock(cs1());
        let model = inst.build_model().unwrap();
        let warm = cs_warm(
            &model,
            match &inst {
                Instance::CuttingStock(i) => i,
                _ => unreachable!(),
            },
        );
        let bp = run_bp(&model, &StructurePricer, warm, &BpConfig::default()).unwrap();
        let report = solution_report(&inst, &model, &SolveOutcome::Bp(&bp), 5);
        assert_eq!(report.status, "optimal");
        assert_eq!(report.objective, Some(3.0));
        assert!(report.verified);
        let sol = report.solution.as_ref().unwrap();
        assert_eq!(sol["rolls"], 3);
        assert_eq!(exit_code(&report), 0);
        // JSON round-trips through serde
        let text = report.to_json();
        assert!(text.contains("\"status\": \"optimal\""));
    }

    #[test]
    fn np1_report_loads_respect_capacity() {
        let inst = Instance::NetPath(np1());
        let model = inst.build_model().unwrap();
        let warm = np_warm(
            &model,
            match &inst {
                Instance::NetPath(i) => i,
                _ => unreachable!(),
            },
        );
        let bp = run_bp(&model, &StructurePricer, warm, &BpConfig::default()).unwrap();
        let report = solution_report(&inst, &model, &SolveOutcome::Bp(&bp), 1);
        assert!(report.verified);
        let sol = report.solution.as_ref().unwrap();
        for load in sol["arc_loads"].as_array().unwrap() {
            assert!(load["load"].as_u64().unwrap() <= load["capacity"].as_u64().unwrap());
        }
        // objective equals the recomputed sum of task path costs
        let total: f64 = sol["tasks"]
            .as_array()
            .unwrap()
            .iter()
            .map(|t| t["cost"].as_f64().unwrap())
            .sum();
        assert!((total - report.objective.unwrap()).abs() < 1e-9);
    }

    #[test]
    fn capped_cg_report_claims_no_optimum() {
        let inst = Instance::CuttingStock(cs1());
        let model = inst.build_model().unwrap();
        let mut rmp = init_rmp(&model, Vec::new());
        let config = CgConfig {
            max_iterations: 1,
            ..CgConfig::default()
        };
        let cg = run_cg(&model, &mut rmp, &StructurePricer, &config).unwrap();
        let report = solution_report(
            &inst,
            &model,
            &SolveOutcome::Cg {
                cg: &cg,
                rounded: None,
            },
            2,
        );
        assert_ne!(report.status, "optimal");
        assert_ne!(report.status, "converged");
        assert!(!report.verified);
        assert_eq!(exit_code(&report), 3);
    }
}
