use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::ZooError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Downsampling {
    Early,
    Even,
    Late,
}

impl FromStr for Downsampling {
    type Err = ZooError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "early" => Ok(Self::Early),
            "even" => Ok(Self::Even),
            "late" => Ok(Self::Late),
            other => Err(ZooError::UnknownPlacement(other.to_string())),
        }
    }
}

impl fmt::Display for Downsampling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Early => "early",
            Self::Even => "even",
            Self::Late => "late",
        })
    }
}

/// Where `pool_count` downsampling layers go along the network depth.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PoolPlacement {
    pub strategy: Downsampling,
    pub pool_count: usize,
}

impl Default for PoolPlacement {
    fn default() -> Self {
        Self {
            strategy: Downsampling::Even,
            pool_count: 3,
        }
    }
}

/// 1-based layer positions after which to downsample, for a network of
/// `num_layers` eligible layers.
///
/// Even placement rounds `k * L / (P + 1)` half-up; a position that
/// collides with its predecessor is pushed one layer deeper.
pub fn place_downsampling(
    num_layers: usize,
    placement: PoolPlacement,
) -> Result<Vec<usize>, ZooError> {
    let (l, p) = (num_layers, placement.pool_count);
    if p >= l {
        return Err(ZooError::TooManyPools {
            pools: p,
            layers: l,
        });
    }
    Ok(match placement.strategy {
        Downsampling::Early => (1..=p).collect(),
        Downsampling::Late => (l - p + 1..=l).collect(),
        Downsampling::Even => {
            let mut out: Vec<usize> = Vec::with_capacity(p);
            for k in 1..=p {
                // round(k*L/(P+1)) half-up, in integers.
                let mut pos = (2 * k * l + p + 1) / (2 * (p + 1));
                if let Some(&prev) = out.last() {
                    pos = pos.max(prev + 1);
                }
                out.push(pos);
            }
            out
        }
    })
}
