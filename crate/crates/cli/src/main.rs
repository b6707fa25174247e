//! Batch front end: load an instance, run column generation, branch-and-
//! price or the brute-force oracle, emit a report and optional CSV traces.
//!
//! Exit codes: 0 solved, 1 input error, 2 infeasible, 3 limit hit.

use colgen::apps::report::{exit_code, solution_report, SolveOutcome};
use colgen::apps::{generate, parse_instance, Instance};
use colgen::branch_price::{history_to_csv, run_bp, BpConfig, NodeStrategy};
use colgen::colgen::{round_to_integer, run_cg, trace_to_csv, CgConfig};
use colgen::master::init_rmp;
use colgen::oracle;
use colgen::pricing::StructurePricer;
use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::{Duration, Instant};

const USAGE: &str = "\
colgen - column generation / branch-and-price solver

USAGE:
  colgen solve --instance PATH --algorithm {cg|bp|oracle} [OPTIONS]
  colgen gen --kind {cutting_stock|net_path} --seed N [OPTIONS]

SOLVE OPTIONS:
  --instance PATH        instance JSON file (required)
  --algorithm ALG        cg | bp | oracle (required)
  --beam-width N         bp only: N or 'unlimited' (default unlimited)
  --max-iters N          column-generation iteration cap (default 500)
  --rc-tol FLOAT         reduced-cost convergence tolerance (default 1e-6)
  --node-strategy S      bp only: best_first | dfs (default best_first)
  --time-limit SECS      wall-clock limit
  --seed N               recorded for reproducibility (solvers are
                         deterministic; the seed does not alter results)
  --out PATH             write the report JSON here
  --trace PATH           write the iteration / UB-LB trace CSV here

GEN OPTIONS:
  --kind KIND            cutting_stock | net_path (required)
  --seed N               generator seed (required)
  --out PATH             output file (default stdout)
  cutting_stock:  --items N --width W --max-size S --max-demand D
  net_path:       --nodes N --extra-arcs M --tasks K --max-demand D
                  --max-capacity C --min-span S

Environment: COLGEN_LOG={off,info,debug}
";

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    ExitCode::from(run(args) as u8)
}

fn run(args: Vec<String>) -> i32 {
    if args.is_empty() || args[0] == "--help" || args[0] == "-h" {
        print!("{}", USAGE);
        return if args.is_empty() { 1 } else { 0 };
    }
    let (cmd, rest) = args.split_first().expect("nonempty");
    let flags = match parse_flags(rest) {
        Ok(f) => f,
        Err(msg) => {
            eprintln!("error: {}", msg);
            return 1;
        }
    };
    match cmd.as_str() {
        "solve" => cmd_solve(&flags),
        "gen" => cmd_gen(&flags),
        other => {
            eprintln!("error: unknown command '{}'\n{}", other, USAGE);
            1
        }
    }
}

fn parse_flags(args: &[String]) -> Result<BTreeMap<String, String>, String> {
    let mut map = BTreeMap::new();
    let mut it = args.iter();
    while let Some(flag) = it.next() {
        let key = flag
            .strip_prefix("--")
            .ok_or_else(|| format!("expected a --flag, got '{}'", flag))?;
        let value = it
            .next()
            .ok_or_else(|| format!("flag --{} needs a value", key))?;
        map.insert(key.to_string(), value.clone());
    }
    Ok(map)
}

fn get_parsed<T: std::str::FromStr>(
    flags: &BTreeMap<String, String>,
    key: &str,
    default: T,
) -> Result<T, String> {
    match flags.get(key) {
        None => Ok(default),
        Some(raw) => raw
            .parse::<T>()
            .map_err(|_| format!("flag --{} has invalid value '{}'", key, raw)),
    }
}

fn cmd_solve(flags: &BTreeMap<String, String>) -> i32 {
    let path = match flags.get("instance") {
        Some(p) => p,
        None => {
            eprintln!("error: --instance is required");
            return 1;
        }
    };
    let algorithm = match flags.get("algorithm").map(|s| s.as_str()) {
        Some(a @ ("cg" | "bp" | "oracle")) => a.to_string(),
        Some(other) => {
            eprintln!("error: unknown algorithm '{}'", other);
            return 1;
        }
        None => {
            eprintln!("error: --algorithm is required");
            return 1;
        }
    };

    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {}", path, e);
            return 1;
        }
    };
    let instance: Instance = match parse_instance(&text) {
        Ok(i) => i,
        Err(msg) => {
            eprintln!("error: {}: {}", path, msg);
            return 1;
        }
    };
    let model = match instance.build_model() {
        Ok(m) => m,
        Err(e) => {
            eprintln!("error: {}", e);
            return 1;
        }
    };

    let max_iters = match get_parsed(flags, "max-iters", 500usize) {
        Ok(v) => v,
        Err(m) => return input_error(&m),
    };
    let rc_tol = match get_parsed(flags, "rc-tol", 1e-6f64) {
        Ok(v) => v,
        Err(m) => return input_error(&m),
    };
    let time_limit = match flags.get("time-limit") {
        None => None,
        Some(raw) => match raw.parse::<f64>() {
            Ok(secs) if secs > 0.0 => Some(Duration::from_secs_f64(secs)),
            _ => return input_error(&format!("flag --time-limit has invalid value '{}'", raw)),
        },
    };
    let cg_config = CgConfig {
        rc_tolerance: rc_tol,
        max_iterations: max_iters,
        time_limit,
        ..CgConfig::default()
    };

    let started = Instant::now();
    let warm = instance.warm_start(&model);
    let pricer = StructurePricer;

    let (report, trace_csv) = match algorithm.as_str() {
        "cg" => {
            let mut rmp = init_rmp(&model, warm);
            let cg = match run_cg(&model, &mut rmp, &pricer, &cg_config) {
                Ok(cg) => cg,
                Err(e) => {
                    eprintln!("error: column generation failed: {}", e);
                    return 1;
                }
            };
            let rounded = round_to_integer(&model, &rmp, &cg, &pricer).ok();
            let report = solution_report(
                &instance,
                &model,
                &SolveOutcome::Cg {
                    cg: &cg,
                    rounded: rounded.as_ref(),
                },
                started.elapsed().as_millis(),
            );
            (report, Some(trace_to_csv(&cg.trace)))
        }
        "bp" => {
            let beam_width = match flags.get("beam-width").map(|s| s.as_str()) {
                None | Some("unlimited") => None,
                Some(raw) => match raw.parse::<usize>() {
                    Ok(w) if w >= 1 => Some(w),
                    _ => {
                        return input_error(&format!(
                            "flag --beam-width has invalid value '{}'",
                            raw
                        ))
                    }
                },
            };
            let strategy = match flags.get("node-strategy").map(|s| s.as_str()) {
                None | Some("best_first") => NodeStrategy::BestFirst,
                Some("dfs") => NodeStrategy::Dfs,
                Some(other) => return input_error(&format!("unknown node strategy '{}'", other)),
            };
            let config = BpConfig {
                cg: cg_config,
                beam_width,
                strategy,
                node_limit: None,
                time_limit,
            };
            let bp = match run_bp(&model, &pricer, warm, &config) {
                Ok(bp) => bp,
                Err(e) => {
                    eprintln!("error: branch-and-price failed: {}", e);
                    return 1;
                }
            };
            let report = solution_report(
                &instance,
                &model,
                &SolveOutcome::Bp(&bp),
                started.elapsed().as_millis(),
            );
            (report, Some(history_to_csv(&bp.history)))
        }
        "oracle" => {
            const ORACLE_LIMIT: usize = 2_000_000;
            match oracle::brute_force_mip(&model, ORACLE_LIMIT) {
                Ok(mip) => {
                    let report = solution_report(
                        &instance,
                        &model,
                        &SolveOutcome::Oracle(mip.as_ref(), 0),
                        started.elapsed().as_millis(),
                    );
                    (report, None)
                }
                Err(oracle::OracleError::LimitExceeded) => {
                    eprintln!("oracle: enumeration limit exceeded");
                    return 3;
                }
                Err(e) => {
                    eprintln!("error: oracle failed: {}", e);
                    return 1;
                }
            }
        }
        _ => unreachable!("validated above"),
    };

    print!("{}", report.to_text());
    if let Some(out) = flags.get("out") {
        if let Err(e) = std::fs::write(out, report.to_json()) {
            eprintln!("error: cannot write {}: {}", out, e);
            return 1;
        }
    }
    if let (Some(trace_path), Some(csv)) = (flags.get("trace"), trace_csv) {
        if let Err(e) = std::fs::write(trace_path, csv) {
            eprintln!("error: cannot write {}: {}", trace_path, e);
            return 1;
        }
    }
    exit_code(&report)
}

fn input_error(msg: &str) -> i32 {
    eprintln!("error: {}", msg);
    1
}

fn cmd_gen(flags: &BTreeMap<String, String>) -> i32 {
    let kind = match flags.get("kind").map(|s| s.as_str()) {
        Some(k @ ("cutting_stock" | "net_path")) => k.to_string(),
        Some(other) => return input_error(&format!("unknown kind '{}'", other)),
        None => return input_error("--kind is required"),
    };
    let seed = match flags.get("seed") {
        Some(raw) => match raw.parse::<u64>() {
            Ok(s) => s,
            Err(_) => return input_error(&format!("flag --seed has invalid value '{}'", raw)),
        },
        None => return input_error("--seed is required"),
    };

    let instance = if kind == "cutting_stock" {
        let params = generate::CsGenParams {
            items: match get_parsed(flags, "items", 4usize) {
                Ok(v) => v,
                Err(m) => return input_error(&m),
            },
            width: match get_parsed(flags, "width", 30u32) {
                Ok(v) => v,
                Err(m) => return input_error(&m),
            },
            max_size: match get_parsed(flags, "max-size", 20u32) {
                Ok(v) => v,
                Err(m) => return input_error(&m),
            },
            max_demand: match get_parsed(flags, "max-demand", 8u32) {
                Ok(v) => v,
                Err(m) => return input_error(&m),
            },
        };
        match generate::gen_cutting_stock(seed, &params) {
            Ok(i) => Instance::CuttingStock(i),
            Err(m) => return input_error(&m),
        }
    } else {
        let params = generate::NetGenParams {
            nodes: match get_parsed(flags, "nodes", 8usize) {
                Ok(v) => v,
                Err(m) => return input_error(&m),
            },
            extra_arcs: match get_parsed(flags, "extra-arcs", 10usize) {
                Ok(v) => v,
                Err(m) => return input_error(&m),
            },
            tasks: match get_parsed(flags, "tasks", 3usize) {
                Ok(v) => v,
                Err(m) => return input_error(&m),
            },
            max_demand: match get_parsed(flags, "max-demand", 2u32) {
                Ok(v) => v,
                Err(m) => return input_error(&m),
            },
            max_capacity: match get_parsed(flags, "max-capacity", 3u32) {
                Ok(v) => v,
                Err(m) => return input_error(&m),
            },
            min_task_span: match get_parsed(flags, "min-span", 1usize) {
                Ok(v) => v,
                Err(m) => return input_error(&m),
            },
        };
        match generate::gen_net_path(seed, &params) {
            Ok(i) => Instance::NetPath(i),
            Err(m) => return input_error(&m),
        }
    };

    let text = serde_json::to_string_pretty(&instance).expect("instance serializes");
    match flags.get("out") {
        Some(path) => {
            if let Err(e) = std::fs::write(path, text) {
                return input_error(&format!("cannot write {}: {}", path, e));
            }
        }
        None => println!("{}", text),
    }
    0
}
