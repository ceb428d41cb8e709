use crate::ir::TensorShape;

use super::ExecError;

/// Single-image activation, stored channel-major then row-major:
/// element `(c, y, x)` lives at `(c * H + y) * W + x`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor3D {
    shape: TensorShape,
    values: Vec<f32>,
}

impl Tensor3D {
    pub fn new(shape: TensorShape, values: Vec<f32>) -> Result<Self, ExecError> {
        if values.len() as u64 != shape.elements() {
            return Err(ExecError::TensorLength {
                shape,
                len: values.len(),
            });
        }
        Ok(Self { shape, values })
    }

    pub fn zeros(shape: TensorShape) -> Self {
        Self {
            shape,
            values: vec![0.0; shape.elements() as usize],
        }
    }

    pub fn from_fn(shape: TensorShape, mut f: impl FnMut(usize, usize, usize) -> f32) -> Self {
        let mut t = Self::zeros(shape);
        for c in 0..shape.channels {
            for y in 0..shape.height {
                for x in 0..shape.width {
                    let i = t.index(c, y, x);
                    t.values[i] = f(c, y, x);
                }
            }
        }
        t
    }

    pub fn shape(&self) -> TensorShape {
        self.shape
    }

    pub fn values(&self) -> &[f32] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f32> {
        self.values
    }

    #[inline]
    pub fn index(&self, c: usize, y: usize, x: usize) -> usize {
        (c * self.shape.height + y) * self.shape.width + x
    }

    #[inline]
    pub fn get(&self, c: usize, y: usize, x: usize) -> f32 {
        self.values[self.index(c, y, x)]
    }

    /// One channel as a contiguous `H * W` slice.
    pub fn channel(&self, c: usize) -> &[f32] {
        let plane = self.shape.height * self.shape.width;
        &self.values[c * plane..(c + 1) * plane]
    }

    pub(crate) fn values_mut(&mut self) -> &mut [f32] {
        &mut self.values
    }
}
