//! Magnitude pruning.

use super::CompressError;
use crate::weights::WeightTensor;

#[derive(Debug, Clone, PartialEq)]
pub struct Pruned {
    pub tensor: WeightTensor,
    /// `true` for entries that survived pruning.
    pub mask: Vec<bool>,
}

/// Zeroes the `floor(sparsity · N)` smallest-magnitude entries. Equal
/// magnitudes are pruned in index order.
pub fn prune_magnitude(t: &WeightTensor, sparsity: f64) -> Result<Pruned, CompressError> {
    if !(0.0..1.0).contains(&sparsity) {
        return Err(CompressError::Sparsity(sparsity));
    }
    check_finite(t)?;
    let n = t.values.len();
    let k = ((sparsity * n as f64).floor() as usize).min(n);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        t.values[a]
            .abs()
            .total_cmp(&t.values[b].abs())
            .then(a.cmp(&b))
    });
    let mut mask = vec![true; n];
    let mut values = t.values.clone();
    for &i in &order[..k] {
        mask[i] = false;
        values[i] = 0.0;
    }
    Ok(Pruned {
        tensor: WeightTensor {
            name: t.name.clone(),
            shape: t.shape.clone(),
            values,
        },
        mask,
    })
}

pub(crate) fn check_finite(t: &WeightTensor) -> Result<(), CompressError> {
    match t.values.iter().position(|v| !v.is_finite()) {
        Some(i) => Err(CompressError::NonFinite {
            tensor: t.name.clone(),
            index: i,
        }),
        None => Ok(()),
    }
}
