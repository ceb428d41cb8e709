//! Analytical cost model: parameters, storage, MACs, activation memory,
//! energy and over-the-air update size.
//!
//! One MAC is one multiply-accumulate. Bias additions are not counted.

mod energy;
mod layer;
mod memory;
mod model;
mod platform;
mod report;

pub use energy::{energy_estimate, energy_from_inputs, EnergyInputs};
pub use layer::{layer_macs, layer_params};
pub use memory::{peak_activation_bytes, peak_activation_bytes_shaped};
pub use model::{activation_traffic_elements, layer_costs, model_macs, model_params, storage_bytes};
pub use platform::PlatformSpec;
pub use report::{report, MetricsReport};

use crate::ir::IrError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CostError {
    #[error(transparent)]
    Graph(#[from] IrError),
    #[error("invalid platform: {0}")]
    Platform(String),
    #[error("batch size must be at least 1")]
    Batch,
}
