//! Grid sweeps over generator metaparameters.

use indexmap::IndexMap;
use rayon::prelude::*;

use super::point::{DesignPoint, MetaValue};
use super::DseError;
use crate::cost::{report, PlatformSpec};
use crate::zoo::{Downsampling, Family, FamilyConfig};

pub type Grid = IndexMap<String, Vec<MetaValue>>;

pub const DEFAULT_SWEEP_CAP: usize = 10_000;

/// Applies one cell of metaparameters on top of the default config.
pub fn configure(
    family: Family,
    values: &IndexMap<String, MetaValue>,
) -> Result<FamilyConfig, DseError> {
    let mut cfg = FamilyConfig::default();
    for (name, value) in values {
        if !family.metaparams().contains(&name.as_str()) {
            return Err(DseError::UnknownMetaparam {
                family: family.name(),
                name: name.clone(),
            });
        }
        let bad = || DseError::BadValue {
            name: name.clone(),
            value: value.to_string(),
        };
        match (name.as_str(), value) {
            ("p", MetaValue::Number(x)) => cfg.p = *x,
            ("width_mult", MetaValue::Number(x)) => cfg.width_mult = *x,
            ("pool_count", MetaValue::Number(x)) if x.fract() == 0.0 && *x >= 0.0 => {
                cfg.pooling.pool_count = *x as usize
            }
            ("pool_placement", MetaValue::Text(s)) => {
                cfg.pooling.strategy = s.parse::<Downsampling>().map_err(|_| bad())?
            }
            _ => return Err(bad()),
        }
    }
    Ok(cfg)
}

/// Every cell of `grid`, the first axis varying slowest and each axis in
/// its listed order.
pub fn grid_cells(grid: &Grid, cap: usize) -> Result<Vec<IndexMap<String, MetaValue>>, DseError> {
    if grid.is_empty() {
        return Err(DseError::EmptyGrid);
    }
    let mut size = 1usize;
    for (name, values) in grid {
        if values.is_empty() {
            return Err(DseError::EmptyAxis(name.clone()));
        }
        size = size.saturating_mul(values.len());
    }
    if size > cap {
        return Err(DseError::CapExceeded { size, cap });
    }
    let mut cells = vec![IndexMap::new()];
    for (name, values) in grid {
        cells = cells
            .into_iter()
            .flat_map(|cell| {
                values.iter().map(move |v| {
                    let mut c = cell.clone();
                    c.insert(name.clone(), v.clone());
                    c
                })
            })
            .collect();
    }
    Ok(cells)
}

/// Evaluates every grid cell. Cells are evaluated in parallel and returned
/// in grid order.
pub fn sweep(
    family: Family,
    grid: &Grid,
    platform: &PlatformSpec,
    cap: usize,
) -> Result<Vec<DesignPoint>, DseError> {
    let cells = grid_cells(grid, cap)?;
    for cell in &cells {
        configure(family, cell)?;
    }
    cells
        .into_par_iter()
        .map(|metaparams| {
            let cfg = configure(family, &metaparams)?;
            let graph = family.build(&cfg)?;
            let metrics = report(&graph, platform)?;
            Ok(DesignPoint {
                metaparams,
                metrics,
                top5_error: None,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(axes: &[(&str, Vec<MetaValue>)]) -> Grid {
        axes.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
    }

    #[test]
    fn cells_are_ordered_first_axis_slowest() {
        let g = grid(&[
            ("p", vec![0.5.into(), 1.0.into()]),
            ("pool_placement", vec!["early".into(), "late".into()]),
        ]);
        let cells = grid_cells(&g, 100).unwrap();
        let flat: Vec<String> = cells
            .iter()
            .map(|c| format!("{}/{}", c["p"], c["pool_placement"]))
            .collect();
        assert_eq!(flat, ["0.5/early", "0.5/late", "1/early", "1/late"]);
        assert!(matches!(grid_cells(&g, 3), Err(DseError::CapExceeded { size: 4, cap: 3 })));
    }

    #[test]
    fn rejects_bad_grids() {
        let p = PlatformSpec::default();
        assert!(matches!(
            sweep(Family::SqueezeNet, &grid(&[("p", vec![])]), &p, 10),
            Err(DseError::EmptyAxis(_))
        ));
        assert!(matches!(
            sweep(Family::SqueezeNet, &grid(&[("width_mult", vec![1.0.into()])]), &p, 10),
            Err(DseError::UnknownMetaparam { .. })
        ));
        assert!(matches!(
            sweep(Family::SqueezeNet, &grid(&[("pool_placement", vec!["middle".into()])]), &p, 10),
            Err(DseError::BadValue { .. })
        ));
        assert!(matches!(sweep(Family::SqueezeNet, &Grid::new(), &p, 10), Err(DseError::EmptyGrid)));
    }

    #[test]
    fn single_cell_equals_direct_report() {
        let p = PlatformSpec::default();
        let points = sweep(Family::MobileNet, &grid(&[("width_mult", vec![0.5.into()])]), &p, 10).unwrap();
        let direct = report(&crate::zoo::mobilenet_like(0.5).unwrap(), &p).unwrap();
        assert_eq!(points.len(), 1);
        assert_eq!(points[0].metrics, direct);
    }
}
