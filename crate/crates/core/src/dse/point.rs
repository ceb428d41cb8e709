//! Design points and objective lookup.

use std::cmp::Ordering;
use std::fmt;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::cost::MetricsReport;

/// A metaparameter setting: a number (`p`, `width_mult`, `pool_count`) or
/// a word (`pool_placement`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MetaValue {
    Number(f64),
    Text(String),
}

impl MetaValue {
    /// Reads a table cell: numbers when they parse, text otherwise.
    pub fn parse(cell: &str) -> Self {
        let cell = cell.trim();
        match cell.parse::<f64>() {
            Ok(x) if x.is_finite() => Self::Number(x),
            _ => Self::Text(cell.to_string()),
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Self::Number(x) => Some(*x),
            Self::Text(_) => None,
        }
    }

    /// Total order: numbers before text, numbers by value, text bytewise.
    pub fn cmp_key(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Self::Number(a), Self::Number(b)) => a.total_cmp(b),
            (Self::Number(_), Self::Text(_)) => Ordering::Less,
            (Self::Text(_), Self::Number(_)) => Ordering::Greater,
            (Self::Text(a), Self::Text(b)) => a.cmp(b),
        }
    }
}

impl fmt::Display for MetaValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Number(x) => write!(f, "{x}"),
            Self::Text(s) => f.write_str(s),
        }
    }
}

impl From<f64> for MetaValue {
    fn from(x: f64) -> Self {
        Self::Number(x)
    }
}

impl From<&str> for MetaValue {
    fn from(s: &str) -> Self {
        Self::Text(s.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignPoint {
    pub metaparams: IndexMap<String, MetaValue>,
    pub metrics: MetricsReport,
    pub top5_error: Option<f64>,
}

/// Names under which metric values can be looked up.
pub const METRIC_NAMES: [&str; 8] = [
    "total_params",
    "storage_bytes",
    "total_macs",
    "peak_activation_bytes",
    "energy_per_frame",
    "fps_proxy",
    "ota_bytes",
    "top5_error",
];

/// Anything that exposes named numeric values for ranking.
pub trait Objectives {
    fn objective(&self, name: &str) -> Option<f64>;
}

impl Objectives for DesignPoint {
    fn objective(&self, name: &str) -> Option<f64> {
        let m = &self.metrics;
        match name {
            "total_params" => Some(m.total_params as f64),
            "storage_bytes" => Some(m.storage_bytes as f64),
            "total_macs" => Some(m.total_macs as f64),
            "peak_activation_bytes" => Some(m.peak_activation_bytes as f64),
            "energy_per_frame" => Some(m.energy_per_frame),
            "fps_proxy" => m.fps_proxy,
            "ota_bytes" => Some(m.ota_bytes as f64),
            "top5_error" => self.top5_error,
            other => self.metaparams.get(other).and_then(MetaValue::as_f64),
        }
    }
}

impl Objectives for IndexMap<String, String> {
    fn objective(&self, name: &str) -> Option<f64> {
        self.get(name)?.trim().parse().ok()
    }
}
