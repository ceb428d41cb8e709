//! Budget checks for a single design point.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::point::DesignPoint;
use super::DseError;
use crate::units;

/// Deployment budgets. An absent field is unconstrained.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstraintSet {
    #[serde(default)]
    pub max_onchip_bytes: Option<u64>,
    #[serde(default)]
    pub max_top5_error: Option<f64>,
    #[serde(default)]
    pub min_fps_required: Option<f64>,
    /// Advisory only: missing it warns but never fails.
    #[serde(default)]
    pub min_fps_desired: Option<f64>,
    #[serde(default)]
    pub max_energy_per_frame: Option<f64>,
}

impl ConstraintSet {
    pub fn check(&self) -> Result<(), DseError> {
        let floats = [
            ("max_top5_error", self.max_top5_error),
            ("min_fps_required", self.min_fps_required),
            ("min_fps_desired", self.min_fps_desired),
            ("max_energy_per_frame", self.max_energy_per_frame),
        ];
        for (name, v) in floats {
            if v.is_some_and(|v| v.is_nan() || v <= 0.0) {
                return Err(DseError::BadConstraint(name));
            }
        }
        if self.max_onchip_bytes == Some(0) {
            return Err(DseError::BadConstraint("max_onchip_bytes"));
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self, DseError> {
        let c: Self = serde_json::from_str(text)?;
        c.check()?;
        Ok(c)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Pass,
    Fail,
    /// An advisory target was missed.
    Warn,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstraintResult {
    pub constraint: String,
    pub limit: f64,
    pub measured: Option<f64>,
    pub status: Status,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstraintReport {
    pub passed: bool,
    pub results: Vec<ConstraintResult>,
}

impl ConstraintReport {
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        for r in &self.results {
            let status = match r.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
                Status::Warn => "WARN",
            };
            let _ = writeln!(out, "{status:<5} {:<22} {}", r.constraint, r.detail);
        }
        let _ = writeln!(out, "overall {}", if self.passed { "PASS" } else { "FAIL" });
        out
    }
}

fn status(ok: bool) -> Status {
    if ok {
        Status::Pass
    } else {
        Status::Fail
    }
}

/// Checks every set budget. On-chip memory must hold the weights and the
/// peak live activations together. A missing frame rate (a graph without
/// MACs) counts as unbounded.
pub fn check_constraints(point: &DesignPoint, c: &ConstraintSet) -> ConstraintReport {
    let m = &point.metrics;
    let mut results = Vec::new();
    if let Some(max) = c.max_onchip_bytes {
        let need = m.storage_bytes + m.peak_activation_bytes;
        results.push(ConstraintResult {
            constraint: "sram".into(),
            limit: max as f64,
            measured: Some(need as f64),
            status: status(need <= max),
            detail: format!(
                "weights {} + activations {} = {} vs {}",
                units::bytes(m.storage_bytes),
                units::bytes(m.peak_activation_bytes),
                units::bytes(need),
                units::bytes(max)
            ),
        });
    }
    if let Some(max) = c.max_top5_error {
        let (s, detail) = match point.top5_error {
            Some(e) => (status(e <= max), format!("{:.2}% vs {:.2}%", e * 100.0, max * 100.0)),
            None => (Status::Fail, "no recorded top-5 error".to_string()),
        };
        results.push(ConstraintResult {
            constraint: "top5_error".into(),
            limit: max,
            measured: point.top5_error,
            status: s,
            detail,
        });
    }
    let fps = m.fps_proxy.unwrap_or(f64::INFINITY);
    for (name, min, advisory) in [
        ("fps_required", c.min_fps_required, false),
        ("fps_desired", c.min_fps_desired, true),
    ] {
        if let Some(min) = min {
            let ok = fps >= min;
            results.push(ConstraintResult {
                constraint: name.into(),
                limit: min,
                measured: m.fps_proxy,
                status: match (ok, advisory) {
                    (true, _) => Status::Pass,
                    (false, true) => Status::Warn,
                    (false, false) => Status::Fail,
                },
                detail: format!("{fps:.2} FPS (proxy) vs {min:.2} FPS"),
            });
        }
    }
    if let Some(max) = c.max_energy_per_frame {
        results.push(ConstraintResult {
            constraint: "energy_per_frame".into(),
            limit: max,
            measured: Some(m.energy_per_frame),
            status: status(m.energy_per_frame < max),
            detail: format!("{} vs {}", units::joules(m.energy_per_frame), units::joules(max)),
        });
    }
    ConstraintReport {
        passed: results.iter().all(|r| r.status != Status::Fail),
        results,
    }
}
