use std::fmt;

use serde::{Deserialize, Serialize};

use super::shape::TensorShape;

fn one() -> usize {
    1
}

fn yes() -> bool {
    true
}

/// 2-D convolution. Padding is symmetric and zero-valued.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvSpec {
    pub kernel_h: usize,
    pub kernel_w: usize,
    pub filters: usize,
    #[serde(default = "one")]
    pub groups: usize,
    #[serde(default = "one")]
    pub stride: usize,
    #[serde(default)]
    pub pad: usize,
    #[serde(default = "yes")]
    pub bias: bool,
}

impl ConvSpec {
    /// Square kernel, stride 1, "same" padding for odd kernels, one group, bias on.
    pub fn square(kernel: usize, filters: usize) -> Self {
        Self {
            kernel_h: kernel,
            kernel_w: kernel,
            filters,
            groups: 1,
            stride: 1,
            pad: kernel / 2,
            bias: true,
        }
    }

    pub fn with_stride(mut self, stride: usize) -> Self {
        self.stride = stride;
        self
    }

    pub fn with_pad(mut self, pad: usize) -> Self {
        self.pad = pad;
        self
    }

    pub fn with_groups(mut self, groups: usize) -> Self {
        self.groups = groups;
        self
    }

    pub fn with_bias(mut self, bias: bool) -> Self {
        self.bias = bias;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FullyConnectedSpec {
    pub filters: usize,
    #[serde(default = "yes")]
    pub bias: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PoolKind {
    Max,
    Avg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PoolSpec {
    pub kind: PoolKind,
    pub kernel: usize,
    pub stride: usize,
    #[serde(default)]
    pub ceil_mode: bool,
}

impl PoolSpec {
    pub fn max(kernel: usize, stride: usize) -> Self {
        Self {
            kind: PoolKind::Max,
            kernel,
            stride,
            ceil_mode: false,
        }
    }

    pub fn ceil(mut self) -> Self {
        self.ceil_mode = true;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShuffleSpec {
    pub groups: usize,
}

/// One typed layer of an architecture graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LayerSpec {
    Input(TensorShape),
    Conv(ConvSpec),
    FullyConnected(FullyConnectedSpec),
    Pool(PoolSpec),
    GlobalAvgPool,
    Relu,
    Shuffle(ShuffleSpec),
    Concat,
}

/// Reasons a layer cannot be bound to its input shapes.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BindError {
    #[error("{field} must be positive")]
    ZeroParameter { field: &'static str },
    #[error("groups must divide filters (groups={groups}, filters={filters})")]
    GroupsFilters { groups: usize, filters: usize },
    #[error("groups must divide input channels (groups={groups}, channels={channels})")]
    GroupsChannels { groups: usize, channels: usize },
    #[error("concat inputs disagree on spatial size ({first} vs {other})")]
    ConcatSpatial {
        first: TensorShape,
        other: TensorShape,
    },
    #[error("non-positive output dimension for input {input}")]
    NonPositive { input: TensorShape },
}

impl LayerSpec {
    /// Short op tag, as used in architecture descriptors.
    pub fn tag(&self) -> &'static str {
        match self {
            LayerSpec::Input(_) => "input",
            LayerSpec::Conv(_) => "conv",
            LayerSpec::FullyConnected(_) => "fc",
            LayerSpec::Pool(_) => "pool",
            LayerSpec::GlobalAvgPool => "gap",
            LayerSpec::Relu => "relu",
            LayerSpec::Shuffle(_) => "shuffle",
            LayerSpec::Concat => "concat",
        }
    }

    pub fn has_weights(&self) -> bool {
        matches!(self, LayerSpec::Conv(_) | LayerSpec::FullyConnected(_))
    }

    /// Checks the layer's own parameters, independent of any input.
    pub fn check_params(&self) -> Result<(), BindError> {
        let zero = |field| Err(BindError::ZeroParameter { field });
        match *self {
            LayerSpec::Input(s) => {
                if s.height == 0 {
                    return zero("height");
                }
                if s.width == 0 {
                    return zero("width");
                }
                if s.channels == 0 {
                    return zero("channels");
                }
            }
            LayerSpec::Conv(c) => {
                for (field, v) in [
                    ("kernel_h", c.kernel_h),
                    ("kernel_w", c.kernel_w),
                    ("filters", c.filters),
                    ("groups", c.groups),
                    ("stride", c.stride),
                ] {
                    if v == 0 {
                        return zero(field);
                    }
                }
                if c.filters % c.groups != 0 {
                    return Err(BindError::GroupsFilters {
                        groups: c.groups,
                        filters: c.filters,
                    });
                }
            }
            LayerSpec::FullyConnected(fc) => {
                if fc.filters == 0 {
                    return zero("filters");
                }
            }
            LayerSpec::Pool(p) => {
                if p.kernel == 0 {
                    return zero("kernel");
                }
                if p.stride == 0 {
                    return zero("stride");
                }
            }
            LayerSpec::Shuffle(s) => {
                if s.groups == 0 {
                    return zero("groups");
                }
            }
            LayerSpec::GlobalAvgPool | LayerSpec::Relu | LayerSpec::Concat => {}
        }
        Ok(())
    }

    /// Output shape given the shapes of all predecessors (in edge order).
    ///
    /// Callers are expected to have checked arity; single-input layers read
    /// `inputs[0]`.
    pub fn output_shape(&self, inputs: &[TensorShape]) -> Result<TensorShape, BindError> {
        self.check_params()?;
        let out = match *self {
            LayerSpec::Input(s) => s,
            LayerSpec::Conv(c) => {
                let input = inputs[0];
                if !input.channels.is_multiple_of(c.groups) {
                    return Err(BindError::GroupsChannels {
                        groups: c.groups,
                        channels: input.channels,
                    });
                }
                let h = window_count(input.height, c.kernel_h, c.stride, c.pad, false);
                let w = window_count(input.width, c.kernel_w, c.stride, c.pad, false);
                match (h, w) {
                    (Some(h), Some(w)) => TensorShape::new(h, w, c.filters),
                    _ => return Err(BindError::NonPositive { input }),
                }
            }
            LayerSpec::FullyConnected(fc) => TensorShape::new(1, 1, fc.filters),
            LayerSpec::Pool(p) => {
                let input = inputs[0];
                let h = window_count(input.height, p.kernel, p.stride, 0, p.ceil_mode);
                let w = window_count(input.width, p.kernel, p.stride, 0, p.ceil_mode);
                match (h, w) {
                    (Some(h), Some(w)) => TensorShape::new(h, w, input.channels),
                    _ => return Err(BindError::NonPositive { input }),
                }
            }
            LayerSpec::GlobalAvgPool => TensorShape::new(1, 1, inputs[0].channels),
            LayerSpec::Relu => inputs[0],
            LayerSpec::Shuffle(s) => {
                let input = inputs[0];
                if !input.channels.is_multiple_of(s.groups) {
                    return Err(BindError::GroupsChannels {
                        groups: s.groups,
                        channels: input.channels,
                    });
                }
                input
            }
            LayerSpec::Concat => {
                let first = inputs[0];
                let mut channels = 0;
                for other in inputs {
                    if other.height != first.height || other.width != first.width {
                        return Err(BindError::ConcatSpatial {
                            first,
                            other: *other,
                        });
                    }
                    channels += other.channels;
                }
                TensorShape::new(first.height, first.width, channels)
            }
        };
        Ok(out)
    }
}

/// Number of sliding-window positions along one axis.
///
/// `floor((in + 2*pad - kernel) / stride) + 1`, or the ceiling variant. In
/// ceil mode the last window must start inside the (padded) input.
pub fn window_count(
    input: usize,
    kernel: usize,
    stride: usize,
    pad: usize,
    ceil_mode: bool,
) -> Option<usize> {
    let padded = input + 2 * pad;
    if padded < kernel || stride == 0 {
        return None;
    }
    let span = padded - kernel;
    let mut n = if ceil_mode {
        span.div_ceil(stride) + 1
    } else {
        span / stride + 1
    };
    if ceil_mode && (n - 1) * stride >= input + pad {
        n -= 1;
    }
    Some(n)
}

impl fmt::Display for LayerSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LayerSpec::Input(s) => write!(f, "input {s}"),
            LayerSpec::Conv(c) => {
                write!(f, "conv {}x{}/{} F={}", c.kernel_h, c.kernel_w, c.stride, c.filters)?;
                if c.groups != 1 {
                    write!(f, " g={}", c.groups)?;
                }
                if c.pad != 0 {
                    write!(f, " pad={}", c.pad)?;
                }
                Ok(())
            }
            LayerSpec::FullyConnected(fc) => write!(f, "fc F={}", fc.filters),
            LayerSpec::Pool(p) => {
                let kind = match p.kind {
                    PoolKind::Max => "max",
                    PoolKind::Avg => "avg",
                };
                write!(f, "{kind}pool {}/{}", p.kernel, p.stride)?;
                if p.ceil_mode {
                    write!(f, " ceil")?;
                }
                Ok(())
            }
            LayerSpec::GlobalAvgPool => write!(f, "global avgpool"),
            LayerSpec::Relu => write!(f, "relu"),
            LayerSpec::Shuffle(s) => write!(f, "shuffle g={}", s.groups),
            LayerSpec::Concat => write!(f, "concat"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn window_count_floor_and_ceil() {
        assert_eq!(window_count(227, 11, 4, 0, false), Some(55));
        assert_eq!(window_count(56, 2, 2, 0, false), Some(28));
        // 111 -> 55 either way for 3/2; 112 differs.
        assert_eq!(window_count(112, 3, 2, 0, false), Some(55));
        assert_eq!(window_count(112, 3, 2, 0, true), Some(56));
        assert_eq!(window_count(2, 3, 1, 0, false), None);
        assert_eq!(window_count(2, 3, 1, 1, false), Some(2));
    }

    #[test]
    fn conv_rejects_bad_groups() {
        let conv = LayerSpec::Conv(ConvSpec::square(3, 8).with_groups(3));
        assert!(matches!(
            conv.output_shape(&[TensorShape::new(4, 4, 6)]),
            Err(BindError::GroupsFilters { groups: 3, filters: 8 })
        ));
        let conv = LayerSpec::Conv(ConvSpec::square(3, 8).with_groups(4));
        assert!(matches!(
            conv.output_shape(&[TensorShape::new(4, 4, 6)]),
            Err(BindError::GroupsChannels { groups: 4, channels: 6 })
        ));
    }
}
