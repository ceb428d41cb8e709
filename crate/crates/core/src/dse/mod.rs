//! Design-space exploration: grid sweeps, recorded accuracy, saturation
//! points, Pareto fronts and deployment budgets.

mod accuracy;
mod constraints;
mod io;
mod pareto;
mod point;
mod saturation;
mod sweep;

pub use accuracy::{attach_accuracy, AccuracyRow, AccuracyTable, ERROR_COLUMN};
pub use constraints::{check_constraints, ConstraintReport, ConstraintResult, ConstraintSet, Status};
pub use io::{read_points_csv, write_points_csv, write_rows_csv, CsvPoint, SweepEntry, SweepReport};
pub use pareto::{dominance_witnesses, dominates, pareto_front, Objective, Sense};
pub use point::{DesignPoint, MetaValue, Objectives, METRIC_NAMES};
pub use saturation::{find_saturation, DEFAULT_EPSILON};
pub use sweep::{configure, grid_cells, sweep, Grid, DEFAULT_SWEEP_CAP};

use crate::cost::CostError;
use crate::zoo::ZooError;

#[derive(Debug, thiserror::Error)]
pub enum DseError {
    #[error("grid has no axes")]
    EmptyGrid,
    #[error("grid axis `{0}` has no values")]
    EmptyAxis(String),
    #[error("grid has {size} cells, more than the cap of {cap}")]
    CapExceeded { size: usize, cap: usize },
    #[error("family {family} has no metaparameter `{name}`")]
    UnknownMetaparam { family: &'static str, name: String },
    #[error("bad value `{value}` for metaparameter `{name}`")]
    BadValue { name: String, value: String },
    #[error("accuracy table has no `top5_error` column")]
    MissingErrorColumn,
    #[error("line {line}: top-5 error `{value}` is not a fraction in [0, 1]")]
    BadError { line: usize, value: String },
    #[error("accuracy table column `{0}` is not a metaparameter of the points")]
    UnknownColumn(String),
    #[error("accuracy rows on lines {first} and {second} conflict")]
    ConflictingRows { first: usize, second: usize },
    #[error("point {0} has no top-5 error")]
    MissingAccuracy(usize),
    #[error("point {index} is not above its predecessor in `{axis}`")]
    Unordered { index: usize, axis: String },
    #[error("point {index} has no value for `{metric}`")]
    MissingMetric { index: usize, metric: String },
    #[error("no objectives given")]
    NoObjectives,
    #[error("bad objective `{0}`, expected metric[:min|:max]")]
    BadObjective(String),
    #[error("constraint `{0}` must be positive")]
    BadConstraint(&'static str),
    #[error(transparent)]
    Zoo(#[from] ZooError),
    #[error(transparent)]
    Cost(#[from] CostError),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
