use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::ir::ArchGraph;
use crate::units;

use super::energy::{energy_from_inputs, EnergyInputs};
use super::platform::PlatformSpec;
use super::CostError;

/// The cost metrics of one architecture on one platform.
///
/// `fps_proxy` is `macs_per_second / total_macs`; it ignores memory
/// stalls and is `None` for graphs without any MACs. Accuracy and training
/// latency are never computed, only carried when recorded elsewhere.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricsReport {
    pub model: String,
    pub total_params: u64,
    pub storage_bytes: u64,
    pub total_macs: u64,
    pub peak_activation_bytes: u64,
    pub energy_per_frame: f64,
    pub fps_proxy: Option<f64>,
    pub ota_bytes: u64,
    #[serde(default)]
    pub recorded_top5_error: Option<f64>,
    #[serde(default)]
    pub recorded_training_latency: Option<f64>,
}

/// Evaluates every cost metric of `graph` at batch size 1.
pub fn report(graph: &ArchGraph, platform: &PlatformSpec) -> Result<MetricsReport, CostError> {
    platform.check()?;
    let inputs = EnergyInputs::from_graph(graph, platform.word_bytes)?;
    let storage_bytes = inputs.params * platform.word_bytes;
    Ok(MetricsReport {
        model: graph.name().to_string(),
        total_params: inputs.params,
        storage_bytes,
        total_macs: inputs.macs,
        peak_activation_bytes: inputs.peak_activation_bytes,
        energy_per_frame: energy_from_inputs(&inputs, platform, 1)?,
        fps_proxy: (inputs.macs > 0).then(|| platform.macs_per_second / inputs.macs as f64),
        ota_bytes: storage_bytes,
        recorded_top5_error: None,
        recorded_training_latency: None,
    })
}

impl MetricsReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Aligned two-column table.
    pub fn to_table(&self) -> String {
        let fps = self
            .fps_proxy
            .map_or_else(|| "n/a".to_string(), |f| format!("{f:.2} FPS (proxy)"));
        let err = self
            .recorded_top5_error
            .map_or_else(|| "n/a".to_string(), |e| format!("{:.2}%", e * 100.0));
        let rows = [
            ("model", self.model.clone()),
            ("params", units::count(self.total_params, "params")),
            ("storage", units::bytes(self.storage_bytes)),
            ("MACs", units::count(self.total_macs, "MACs")),
            ("peak activations", units::bytes(self.peak_activation_bytes)),
            ("energy/frame", units::joules(self.energy_per_frame)),
            ("throughput", fps),
            ("OTA update", units::bytes(self.ota_bytes)),
            ("top-5 error", err),
        ];
        let mut out = String::new();
        for (k, v) in rows {
            let _ = writeln!(out, "{k:<18} {v}");
        }
        out
    }
}
