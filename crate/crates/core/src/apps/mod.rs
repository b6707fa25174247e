//! Concrete block-angular applications: cutting stock (aggregated knapsack
//! master) and network service-path allocation (per-task convexity master
//! over arc-capacity linking rows). Instance JSON, model builders, warm
//! starts and solution reports live here.

pub mod cutting_stock;
pub mod generate;
pub mod net_path;
pub mod report;

use crate::master::Column;
use crate::model::CompactModel;
use serde::{Deserialize, Serialize};
use std::fmt;

pub use cutting_stock::CuttingStockInstance;
pub use net_path::NetPathInstance;
pub use report::{Report, ReportBounds};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "type")]
pub enum Instance {
    #[serde(rename = "cutting_stock")]
    CuttingStock(CuttingStockInstance),
    #[serde(rename = "net_path")]
    NetPath(NetPathInstance),
}

#[derive(Debug)]
pub struct BuildError {
    pub field: String,
    pub message: String,
}

impl BuildError {
    pub fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        BuildError {
            field: field.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for BuildError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid instance ({}): {}", self.field, self.message)
    }
}

impl std::error::Error for BuildError {}

impl Instance {
    pub fn validate(&self) -> Result<(), BuildError> {
        match self {
            Instance::CuttingStock(i) => i.validate(),
            Instance::NetPath(i) => i.validate(),
        }
    }

    pub fn build_model(&self) -> Result<CompactModel, BuildError> {
        self.validate()?;
        Ok(match self {
            Instance::CuttingStock(i) => cutting_stock::build_cutting_stock(i),
            Instance::NetPath(i) => net_path::build_net_path(i),
        })
    }

    pub fn warm_start(&self, model: &CompactModel) -> Vec<Column> {
        match self {
            Instance::CuttingStock(i) => cutting_stock::warm_start(model, i),
            Instance::NetPath(i) => net_path::warm_start(model, i),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Instance::CuttingStock(_) => "cutting_stock",
            Instance::NetPath(_) => "net_path",
        }
    }
}

/// Parse an instance JSON document.
pub fn parse_instance(text: &str) -> Result<Instance, String> {
    serde_json::from_str::<Instance>(text)
        .map_err(|e| format!("line {}, column {}: {}", e.line(), e.column(), e))
}
