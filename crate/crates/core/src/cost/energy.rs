use serde::{Deserialize, Serialize};

use crate::ir::ArchGraph;

use super::memory::peak_activation_bytes_shaped;
use super::model::{activation_traffic_elements, layer_costs};
use super::platform::PlatformSpec;
use super::CostError;

/// The graph-derived quantities the energy model needs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnergyInputs {
    pub params: u64,
    pub macs: u64,
    pub peak_activation_bytes: u64,
    /// Input plus output activation elements summed over all layers.
    pub activation_traffic: u64,
}

impl EnergyInputs {
    pub fn from_graph(graph: &ArchGraph, word_bytes: u64) -> Result<Self, CostError> {
        let shaped = graph.shaped()?;
        let costs = layer_costs(&shaped);
        Ok(Self {
            params: costs.iter().map(|c| c.0).sum(),
            macs: costs.iter().map(|c| c.1).sum(),
            peak_activation_bytes: peak_activation_bytes_shaped(&shaped, word_bytes),
            activation_traffic: activation_traffic_elements(&shaped),
        })
    }
}

/// First-order energy per frame: every MAC costs `e_mac`; every off-chip
/// word costs `offchip_ratio * e_mac`.
///
/// Parameters are off-chip when they do not fit in on-chip memory, and then
/// stream once per batch. Activations spill when they do not fit in the
/// on-chip memory left over by resident parameters; a spill moves every
/// layer's input and output through DRAM.
pub fn energy_from_inputs(
    inputs: &EnergyInputs,
    platform: &PlatformSpec,
    batch: u32,
) -> Result<f64, CostError> {
    if batch == 0 {
        return Err(CostError::Batch);
    }
    let storage = inputs.params * platform.word_bytes;
    let params_resident = storage <= platform.on_chip_bytes;
    let param_words = if params_resident {
        0.0
    } else {
        inputs.params as f64 / batch as f64
    };
    let reserved = if params_resident { storage } else { 0 };
    let activation_words = if reserved + inputs.peak_activation_bytes > platform.on_chip_bytes {
        inputs.activation_traffic as f64
    } else {
        0.0
    };
    let compute = inputs.macs as f64 * platform.e_mac;
    let memory = (param_words + activation_words) * platform.offchip_ratio * platform.e_mac;
    Ok(compute + memory)
}

pub fn energy_estimate(
    graph: &ArchGraph,
    platform: &PlatformSpec,
    batch: u32,
) -> Result<f64, CostError> {
    let inputs = EnergyInputs::from_graph(graph, platform.word_bytes)?;
    energy_from_inputs(&inputs, platform, batch)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn platform(on_chip: u64) -> PlatformSpec {
        PlatformSpec {
            on_chip_bytes: on_chip,
            e_mac: 1e-12,
            offchip_ratio: 100.0,
            word_bytes: 4,
            macs_per_second: 1e9,
        }
    }

    const MODEL: EnergyInputs = EnergyInputs {
        params: 1_000_000,
        macs: 100_000_000,
        peak_activation_bytes: 800_000,
        activation_traffic: 400_000,
    };

    #[test]
    fn spilled_params_double_the_energy() {
        let e = energy_from_inputs(&MODEL, &platform(1 << 20), 1).unwrap();
        assert!((e - 200e-6).abs() < 1e-15, "{e}");
        let e = energy_from_inputs(&MODEL, &platform(16 << 20), 1).unwrap();
        assert!((e - 100e-6).abs() < 1e-15, "{e}");
    }

    #[test]
    fn batching_amortizes_parameter_traffic() {
        let e = energy_from_inputs(&MODEL, &platform(1 << 20), 4).unwrap();
        assert!((e - 125e-6).abs() < 1e-15, "{e}");
        assert!(matches!(
            energy_from_inputs(&MODEL, &platform(1 << 20), 0),
            Err(CostError::Batch)
        ));
    }

    #[test]
    fn spilled_activations_are_charged() {
        let mut m = MODEL;
        m.peak_activation_bytes = 2 << 20;
        let e = energy_from_inputs(&m, &platform(1 << 20), 1).unwrap();
        let expected = 100e-6 + 100e-6 + 400_000.0 * 100.0 * 1e-12;
        assert!((e - expected).abs() < 1e-15);
    }

    #[test]
    fn halving_spilled_params_lowers_energy() {
        let mut half = MODEL;
        half.params /= 2;
        let p = platform(1 << 20);
        assert!(
            energy_from_inputs(&half, &p, 1).unwrap() < energy_from_inputs(&MODEL, &p, 1).unwrap()
        );
    }
}
