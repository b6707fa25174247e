//! Column generation and branch-and-price for block-angular programs.
//!
//! The toolkit decomposes a [`model::CompactModel`] — a few linking rows
//! over otherwise independent variable blocks — into a restricted master
//! problem over extreme-point columns ([`master`]) and per-block pricing
//! problems ([`pricing`]). The [`colgen`] driver iterates the two until no
//! column prices below the tolerance, and [`branch_price`] wraps that loop
//! into an exact tree search over original-variable bounds. Desk-scale
//! ground truth for all of it lives in [`oracle`].
//!
//! Two ready-made applications bind the machinery to instances:
//! cutting stock (aggregated knapsack pricing) and network service-path
//! allocation (per-task shortest-path pricing over shared arc capacities),
//! both under [`apps`]. The LP engine in [`lp`] is a dense two-phase
//! revised simplex returning primal and dual solutions.
//!
//! ```no_run
//! use colgen::apps::parse_instance;
//! use colgen::branch_price::{run_bp, BpConfig};
//! use colgen::pricing::StructurePricer;
//!
//! let instance = parse_instance(r#"{ "type": "cutting_stock", "roll_width": 10,
//!     "items": [ { "size": 3, "demand": 4 }, { "size": 5, "demand": 2 } ] }"#).unwrap();
//! let model = instance.build_model().unwrap();
//! let warm = instance.warm_start(&model);
//! let result = run_bp(&model, &StructurePricer, warm, &BpConfig::default()).unwrap();
//! assert_eq!(result.objective, Some(3.0));
//! ```

pub mod apps;
pub mod branch_price;
pub mod colgen;
pub mod lp;
pub mod master;
pub mod model;
pub mod oracle;
pub mod path;
pub mod pricing;
pub mod util;

#[cfg(test)]
pub(crate) mod testkit;
