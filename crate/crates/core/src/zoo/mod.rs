//! Parametric generators for the reference architecture families.

mod classic;
mod fire;
mod mobilenet;
mod placement;
mod squeezenet;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use classic::{alexnet, vgg19};
pub use fire::{append_fire, fire_module, FireSpec};
pub use mobilenet::{mobilenet_like, MOBILENET_BLOCKS};
pub use placement::{place_downsampling, Downsampling, PoolPlacement};
pub use squeezenet::{
    fire_stages, split_expand, squeezenet, squeezenet_with_pools, CANONICAL_POOLS, FIRE_STAGES,
    SQUEEZENET_INPUT, SQUEEZENET_LAYERS,
};

use crate::ir::{ArchGraph, IrError};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ZooError {
    #[error("p must be in (0, 1], got {0}")]
    InvalidP(f64),
    #[error("width multiplier must be in (0, 1], got {0}")]
    InvalidWidth(f64),
    #[error("cannot place {pools} pools among {layers} layers")]
    TooManyPools { pools: usize, layers: usize },
    #[error("pool position {0} is out of range")]
    PoolPosition(usize),
    #[error("unknown pool placement `{0}` (expected early, even or late)")]
    UnknownPlacement(String),
    #[error("unknown family `{0}` (expected alexnet, vgg19, squeezenet or mobilenet)")]
    UnknownFamily(String),
    #[error(transparent)]
    Graph(#[from] IrError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    AlexNet,
    Vgg19,
    SqueezeNet,
    MobileNet,
}

impl Family {
    pub const ALL: [Family; 4] = [
        Family::AlexNet,
        Family::Vgg19,
        Family::SqueezeNet,
        Family::MobileNet,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::AlexNet => "alexnet",
            Family::Vgg19 => "vgg19",
            Family::SqueezeNet => "squeezenet",
            Family::MobileNet => "mobilenet",
        }
    }

    /// Metaparameters this family responds to.
    pub fn metaparams(self) -> &'static [&'static str] {
        match self {
            Family::AlexNet | Family::Vgg19 => &[],
            Family::SqueezeNet => &["p", "pool_placement", "pool_count"],
            Family::MobileNet => &["width_mult"],
        }
    }

    pub fn build(self, config: &FamilyConfig) -> Result<ArchGraph, ZooError> {
        match self {
            Family::AlexNet => Ok(alexnet()),
            Family::Vgg19 => Ok(vgg19()),
            Family::SqueezeNet => squeezenet(config.p, config.pooling),
            Family::MobileNet => mobilenet_like(config.width_mult),
        }
    }
}

impl FromStr for Family {
    type Err = ZooError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| ZooError::UnknownFamily(s.to_string()))
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Knob settings shared by all generators; each family reads its own.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FamilyConfig {
    pub p: f64,
    pub pooling: PoolPlacement,
    pub width_mult: f64,
}

impl Default for FamilyConfig {
    fn default() -> Self {
        Self {
            p: 0.5,
            pooling: PoolPlacement::default(),
            width_mult: 1.0,
        }
    }
}
