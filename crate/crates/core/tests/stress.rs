//! Wider seeded sweeps than the acceptance suite: more combinatorial
//! cutting-stock shapes (small items, larger demands) and tighter net-path
//! capacity mixes, always against the brute-force oracle.

use colgen::apps::generate::{gen_cutting_stock, gen_net_path, CsGenParams, NetGenParams};
use colgen::apps::Instance;
use colgen::branch_price::{run_bp, BpConfig, BpTermination, NodeStrategy};
use colgen::colgen::{run_cg, CgConfig, CgTermination};
use colgen::master::init_rmp;
use colgen::oracle;
use colgen::pricing::StructurePricer;

#[test]
fn cutting_stock_stress_against_oracle() {
    for seed in 1000..1040u64 {
        let params = CsGenParams {
            items: 3 + (seed % 4) as usize,
            width: 20 + (seed * 3 % 21) as u32,
            max_size: 12,
            max_demand: 10,
        };
        let inst = gen_cutting_stock(seed, &params).unwrap();
        let instance = Instance::CuttingStock(inst);
        let model = instance.build_model().unwrap();
        let warm = instance.warm_start(&model);
        let bp = run_bp(&model, &StructurePricer, warm, &BpConfig::default())
            .unwrap_or_else(|e| panic!("seed {}: {}", seed, e));
        let truth = oracle::brute_force_mip(&model, 20_000_000)
            .unwrap_or_else(|e| panic!("seed {}: oracle {}", seed, e))
            .expect("covering instances are feasible");
        assert!(bp.optimal, "seed {}", seed);
        assert_eq!(bp.objective, Some(truth.objective), "seed {}", seed);
    }
}

#[test]
fn net_path_stress_against_oracle() {
    let mut feasible = 0;
    let mut infeasible = 0;
    for seed in 2000..2030u64 {
        let params = NetGenParams {
            nodes: 7 + (seed % 4) as usize,
            extra_arcs: 12,
            tasks: 3 + (seed % 3) as usize,
            max_demand: 3,
            max_capacity: 3,
            min_task_span: 2,
        };
        let inst = match gen_net_path(seed, &params) {
            Ok(i) => i,
            Err(_) => continue, // some shapes have no feasible layout
        };
        let instance = Instance::NetPath(inst);
        let model = instance.build_model().unwrap();
        let warm = instance.warm_start(&model);
        let bp = run_bp(&model, &StructurePricer, warm, &BpConfig::default())
            .unwrap_or_else(|e| panic!("seed {}: {}", seed, e));
        match oracle::brute_force_mip(&model, 20_000_000).unwrap() {
            Some(truth) => {
                assert!(bp.optimal, "seed {}", seed);
                assert_eq!(bp.objective, Some(truth.objective), "seed {}", seed);
                feasible += 1;
            }
            None => {
                assert_eq!(bp.termination, BpTermination::Infeasible, "seed {}", seed);
                infeasible += 1;
            }
        }
    }
    // the sweep must exercise both outcomes to mean anything
    assert!(feasible >= 10, "only {} feasible instances", feasible);
    assert!(infeasible >= 1, "no infeasible instance in the sweep");
}

#[test]
fn dfs_and_best_first_agree_on_objectives() {
    for seed in 3000..3015u64 {
        let params = CsGenParams {
            items: 4,
            width: 25,
            max_size: 14,
            max_demand: 6,
        };
        let inst = gen_cutting_stock(seed, &params).unwrap();
        let instance = Instance::CuttingStock(inst);
        let model = instance.build_model().unwrap();
        let warm = instance.warm_start(&model);
        let best_first =
            run_bp(&model, &StructurePricer, warm.clone(), &BpConfig::default()).unwrap();
        let dfs = run_bp(
            &model,
            &StructurePricer,
            warm,
            &BpConfig {
                strategy: NodeStrategy::Dfs,
                ..BpConfig::default()
            },
        )
        .unwrap();
        assert_eq!(best_first.objective, dfs.objective, "seed {}", seed);
    }
}

#[test]
fn cg_bound_is_always_sandwiched_under_stress() {
    for seed in 4000..4025u64 {
        let params = CsGenParams {
            items: 5,
            width: 30,
            max_size: 15,
            max_demand: 9,
        };
        let inst = gen_cutting_stock(seed, &params).unwrap();
        let instance = Instance::CuttingStock(inst);
        let model = instance.build_model().unwrap();
        let warm = instance.warm_start(&model);
        let mut rmp = init_rmp(&model, warm);
        let cg = run_cg(&model, &mut rmp, &StructurePricer, &CgConfig::default()).unwrap();
        assert_eq!(cg.termination, CgTermination::Converged, "seed {}", seed);
        let truth = oracle::brute_force_mip(&model, 20_000_000)
            .unwrap()
            .expect("feasible");
        assert!(
            cg.lagrangian_lb <= truth.objective + 1e-6,
            "seed {}: lb {} vs ip {}",
            seed,
            cg.lagrangian_lb,
            truth.objective
        );
        assert!(
            cg.objective <= truth.objective + 1e-6,
            "seed {}: lp {} above ip {}",
            seed,
            cg.objective,
            truth.objective
        );
        // integral objective: the rounded-up LP bound also holds
        assert!(
            (cg.objective - 1e-6).ceil() <= truth.objective + 1e-9,
            "seed {}",
            seed
        );
    }
}
