use serde::{Deserialize, Serialize};

use super::CostError;

fn default_offchip_ratio() -> f64 {
    100.0
}

fn default_word_bytes() -> u64 {
    4
}

/// Target platform for the analytical energy and throughput estimates.
///
/// An off-chip word access costs `offchip_ratio` MACs' worth of energy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlatformSpec {
    pub on_chip_bytes: u64,
    /// Joules per multiply-accumulate.
    pub e_mac: f64,
    #[serde(default = "default_offchip_ratio")]
    pub offchip_ratio: f64,
    #[serde(default = "default_word_bytes")]
    pub word_bytes: u64,
    pub macs_per_second: f64,
}

impl Default for PlatformSpec {
    /// 8192 KB of SRAM, 1 pJ/MAC, 100 GMAC/s, fp32 words.
    fn default() -> Self {
        Self {
            on_chip_bytes: 8192 * 1024,
            e_mac: 1e-12,
            offchip_ratio: default_offchip_ratio(),
            word_bytes: default_word_bytes(),
            macs_per_second: 1e11,
        }
    }
}

impl PlatformSpec {
    pub fn check(&self) -> Result<(), CostError> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(CostError::Platform(format!("{name} must be positive and finite, got {v}")))
            }
        };
        positive("on_chip_bytes", self.on_chip_bytes as f64)?;
        positive("e_mac", self.e_mac)?;
        positive("offchip_ratio", self.offchip_ratio)?;
        positive("word_bytes", self.word_bytes as f64)?;
        positive("macs_per_second", self.macs_per_second)
    }

    pub fn from_json(text: &str) -> Result<Self, CostError> {
        let p: PlatformSpec =
            serde_json::from_str(text).map_err(|e| CostError::Platform(e.to_string()))?;
        p.check()?;
        Ok(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_defaults_and_rejections() {
        let p = PlatformSpec::from_json(
            r#"{"on_chip_bytes": 1048576, "e_mac": 1e-12, "macs_per_second": 1e9}"#,
        )
        .unwrap();
        assert_eq!(p.offchip_ratio, 100.0);
        assert_eq!(p.word_bytes, 4);
        assert!(PlatformSpec::from_json(
            r#"{"on_chip_bytes": 0, "e_mac": 1e-12, "macs_per_second": 1e9}"#
        )
        .is_err());
        assert!(PlatformSpec::from_json(
            r#"{"on_chip_bytes": 1, "e_mac": 1e-12, "macs_per_second": 1e9, "dram": 3}"#
        )
        .is_err());
    }
}
