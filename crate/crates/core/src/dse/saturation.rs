//! Saturation point detection.

use super::point::Objectives;
use super::DseError;

pub const DEFAULT_EPSILON: f64 = 0.005;

/// Index of the first point after which no larger point lowers top-5
/// error by more than `epsilon`.
///
/// Points must be strictly increasing in `axis`. Returns `None` for an
/// empty list, or when the last point still improves on its predecessor
/// by more than `epsilon`.
pub fn find_saturation<T: Objectives>(
    points: &[T],
    axis: &str,
    epsilon: f64,
) -> Result<Option<usize>, DseError> {
    let mut errors = Vec::with_capacity(points.len());
    let mut prev_axis: Option<f64> = None;
    for (i, p) in points.iter().enumerate() {
        let a = p.objective(axis).ok_or_else(|| DseError::MissingMetric {
            index: i,
            metric: axis.to_string(),
        })?;
        if prev_axis.is_some_and(|prev| prev >= a) {
            return Err(DseError::Unordered {
                index: i,
                axis: axis.to_string(),
            });
        }
        prev_axis = Some(a);
        errors.push(p.objective("top5_error").ok_or(DseError::MissingAccuracy(i))?);
    }
    let n = errors.len();
    if n <= 1 {
        return Ok(if n == 1 { Some(0) } else { None });
    }
    // best[i] = lowest error among points i..n.
    let mut best = errors.clone();
    for i in (0..n - 1).rev() {
        best[i] = best[i].min(best[i + 1]);
    }
    Ok((0..n - 1).find(|&s| errors[s] - best[s + 1] <= epsilon))
}

#[cfg(test)]
mod tests {
    use super::*;
    use indexmap::IndexMap;

    fn pts(rows: &[(f64, f64)]) -> Vec<IndexMap<String, String>> {
        rows.iter()
            .map(|&(x, e)| {
                IndexMap::from([("x".to_string(), x.to_string()), ("top5_error".to_string(), e.to_string())])
            })
            .collect()
    }

    #[test]
    fn flat_table_saturates_at_first() {
        let p = pts(&[(0.5, 0.15), (0.675, 0.15), (0.75, 0.15), (0.825, 0.15), (1.0, 0.15)]);
        assert_eq!(find_saturation(&p, "x", DEFAULT_EPSILON).unwrap(), Some(0));
    }

    #[test]
    fn improving_sequence_has_none() {
        let p = pts(&[(1.0, 0.30), (2.0, 0.25), (3.0, 0.20)]);
        assert_eq!(find_saturation(&p, "x", 0.01).unwrap(), None);
    }

    #[test]
    fn plateau_after_improvement() {
        let p = pts(&[(1.0, 0.30), (2.0, 0.20), (3.0, 0.203), (4.0, 0.198)]);
        assert_eq!(find_saturation(&p, "x", 0.005).unwrap(), Some(1));
        assert_eq!(find_saturation(&p[..1], "x", 0.005).unwrap(), Some(0));
    }

    #[test]
    fn errors_on_bad_input() {
        let p = pts(&[(2.0, 0.3), (1.0, 0.2)]);
        assert!(matches!(find_saturation(&p, "x", 0.005), Err(DseError::Unordered { index: 1, .. })));
        let mut p = pts(&[(1.0, 0.3), (2.0, 0.2)]);
        p[1].shift_remove("top5_error");
        assert!(matches!(find_saturation(&p, "x", 0.005), Err(DseError::MissingAccuracy(1))));
    }
}
