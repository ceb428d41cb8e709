//! Pareto fronts over named objectives.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use super::point::Objectives;
use super::DseError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Objective {
    pub metric: String,
    pub sense: Sense,
}

impl Objective {
    pub fn min(metric: &str) -> Self {
        Self {
            metric: metric.to_string(),
            sense: Sense::Minimize,
        }
    }

    pub fn max(metric: &str) -> Self {
        Self {
            metric: metric.to_string(),
            sense: Sense::Maximize,
        }
    }

    /// Parses a comma-separated list such as `total_params:min,fps_proxy:max`.
    pub fn parse_list(s: &str) -> Result<Vec<Self>, DseError> {
        let list: Vec<Self> = s
            .split(',')
            .filter(|t| !t.trim().is_empty())
            .map(str::parse)
            .collect::<Result<_, _>>()?;
        if list.is_empty() {
            return Err(DseError::NoObjectives);
        }
        Ok(list)
    }
}

impl FromStr for Objective {
    type Err = DseError;

    /// `metric`, `metric:min` or `metric:max`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let (metric, sense) = match s.split_once(':') {
            None => (s, Sense::Minimize),
            Some((m, "min")) => (m, Sense::Minimize),
            Some((m, "max")) => (m, Sense::Maximize),
            Some(_) => return Err(DseError::BadObjective(s.to_string())),
        };
        if metric.is_empty() {
            return Err(DseError::BadObjective(s.to_string()));
        }
        Ok(Self {
            metric: metric.to_string(),
            sense,
        })
    }
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sense = match self.sense {
            Sense::Minimize => "min",
            Sense::Maximize => "max",
        };
        write!(f, "{}:{sense}", self.metric)
    }
}

/// Objective vectors, negated where maximized so that lower is better.
fn oriented<T: Objectives>(points: &[T], objectives: &[Objective]) -> Result<Vec<Vec<f64>>, DseError> {
    if objectives.is_empty() {
        return Err(DseError::NoObjectives);
    }
    points
        .iter()
        .enumerate()
        .map(|(i, p)| {
            objectives
                .iter()
                .map(|o| {
                    let v = p
                        .objective(&o.metric)
                        .filter(|v| !v.is_nan())
                        .ok_or_else(|| DseError::MissingMetric {
                            index: i,
                            metric: o.metric.clone(),
                        })?;
                    Ok(match o.sense {
                        Sense::Minimize => v,
                        Sense::Maximize => -v,
                    })
                })
                .collect()
        })
        .collect()
}

/// True if `a` is no worse than `b` everywhere and better somewhere.
pub fn dominates(a: &[f64], b: &[f64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y) && a.iter().zip(b).any(|(x, y)| x < y)
}

fn lex(a: &[f64], b: &[f64]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

/// Indices of the non-dominated points, best first by the first
/// objective. Points with identical objective values are all kept.
pub fn pareto_front<T: Objectives>(points: &[T], objectives: &[Objective]) -> Result<Vec<usize>, DseError> {
    let v = oriented(points, objectives)?;
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| lex(&v[a], &v[b]).then(a.cmp(&b)));
    // Only earlier points in lexicographic order can dominate later ones,
    // and dominance is transitive, so front members are enough to test.
    let mut front: Vec<usize> = Vec::new();
    for i in order {
        if !front.iter().any(|&f| dominates(&v[f], &v[i])) {
            front.push(i);
        }
    }
    Ok(front)
}

/// For each point, a front member that dominates it, or `None` if the
/// point is on the front.
pub fn dominance_witnesses<T: Objectives>(
    points: &[T],
    objectives: &[Objective],
    front: &[usize],
) -> Result<Vec<Option<usize>>, DseError> {
    let v = oriented(points, objectives)?;
    Ok((0..points.len())
        .map(|i| front.iter().copied().find(|&f| dominates(&v[f], &v[i])))
        .collect())
}
