use std::fmt;

use serde::{Deserialize, Serialize};

/// Height x width x channels of a single-image activation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TensorShape {
    pub height: usize,
    pub width: usize,
    pub channels: usize,
}

impl TensorShape {
    pub const fn new(height: usize, width: usize, channels: usize) -> Self {
        Self {
            height,
            width,
            channels,
        }
    }

    pub fn is_valid(&self) -> bool {
        self.height >= 1 && self.width >= 1 && self.channels >= 1
    }

    /// Number of scalar elements (H * W * C).
    pub fn elements(&self) -> u64 {
        self.height as u64 * self.width as u64 * self.channels as u64
    }

    pub fn spatial(&self) -> u64 {
        self.height as u64 * self.width as u64
    }
}

impl fmt::Display for TensorShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}x{}", self.height, self.width, self.channels)
    }
}
