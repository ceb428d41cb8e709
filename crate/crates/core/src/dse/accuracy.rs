//! Joining recorded accuracy onto design points.

use std::io::Read;

use super::point::{DesignPoint, MetaValue};
use super::DseError;

pub const ERROR_COLUMN: &str = "top5_error";

#[derive(Debug, Clone, PartialEq)]
pub struct AccuracyRow {
    /// 1-based line in the source table.
    pub line: usize,
    pub key: Vec<MetaValue>,
    pub top5_error: f64,
}

/// Recorded top-5 error keyed by metaparameter values.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct AccuracyTable {
    pub columns: Vec<String>,
    pub rows: Vec<AccuracyRow>,
}

impl AccuracyTable {
    /// Reads a CSV table whose header names metaparameters plus `top5_error`.
    pub fn from_csv<R: Read>(reader: R) -> Result<Self, DseError> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
        let err_col = header
            .iter()
            .position(|h| h == ERROR_COLUMN)
            .ok_or(DseError::MissingErrorColumn)?;
        let columns: Vec<String> = header
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != err_col)
            .map(|(_, h)| h.clone())
            .collect();
        let mut rows = Vec::new();
        for record in rdr.records() {
            let record = record?;
            let line = record.position().map_or(0, |p| p.line() as usize);
            let cell = record.get(err_col).unwrap_or("");
            let top5_error = cell
                .parse::<f64>()
                .ok()
                .filter(|e| (0.0..=1.0).contains(e))
                .ok_or_else(|| DseError::BadError {
                    line,
                    value: cell.to_string(),
                })?;
            let key = record
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != err_col)
                .map(|(_, c)| MetaValue::parse(c))
                .collect();
            rows.push(AccuracyRow {
                line,
                key,
                top5_error,
            });
        }
        let table = Self { columns, rows };
        table.check_conflicts()?;
        Ok(table)
    }

    fn check_conflicts(&self) -> Result<(), DseError> {
        for (i, a) in self.rows.iter().enumerate() {
            for b in &self.rows[i + 1..] {
                if keys_equal(&a.key, &b.key) && a.top5_error != b.top5_error {
                    return Err(DseError::ConflictingRows {
                        first: a.line,
                        second: b.line,
                    });
                }
            }
        }
        Ok(())
    }
}

fn values_equal(a: &MetaValue, b: &MetaValue) -> bool {
    match (a, b) {
        (MetaValue::Number(x), MetaValue::Number(y)) => x == y,
        (MetaValue::Text(x), MetaValue::Text(y)) => x == y,
        _ => false,
    }
}

fn keys_equal(a: &[MetaValue], b: &[MetaValue]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| values_equal(x, y))
}

/// Sets `top5_error` on every point matched by a row. Returns the rows
/// that matched no point.
pub fn attach_accuracy(
    points: &mut [DesignPoint],
    table: &AccuracyTable,
) -> Result<Vec<AccuracyRow>, DseError> {
    if table.rows.is_empty() {
        return Ok(Vec::new());
    }
    for col in &table.columns {
        if points.iter().any(|p| !p.metaparams.contains_key(col)) {
            return Err(DseError::UnknownColumn(col.clone()));
        }
    }
    let mut used = vec![false; table.rows.len()];
    for point in points.iter_mut() {
        let key: Vec<&MetaValue> = table.columns.iter().map(|c| &point.metaparams[c]).collect();
        if let Some(i) = table
            .rows
            .iter()
            .position(|r| r.key.iter().zip(&key).all(|(a, b)| values_equal(a, b)))
        {
            used[i] = true;
            point.top5_error = Some(table.rows[i].top5_error);
            point.metrics.recorded_top5_error = Some(table.rows[i].top5_error);
        }
    }
    Ok(table
        .rows
        .iter()
        .zip(used)
        .filter(|(_, u)| !u)
        .map(|(r, _)| r.clone())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_detects_conflicts() {
        let t = AccuracyTable::from_csv("p,top5_error\n0.5,0.15\n0.75,0.15\n0.5,0.15\n".as_bytes()).unwrap();
        assert_eq!(t.columns, ["p"]);
        assert_eq!(t.rows.len(), 3);
        assert_eq!(t.rows[1].line, 3);
        let err = AccuracyTable::from_csv("p,top5_error\n0.5,0.15\n0.50,0.2\n".as_bytes()).unwrap_err();
        assert!(matches!(err, DseError::ConflictingRows { first: 2, second: 3 }));
        assert!(AccuracyTable::from_csv("p,err\n0.5,0.1\n".as_bytes()).is_err());
        assert!(AccuracyTable::from_csv("p,top5_error\n0.5,1.5\n".as_bytes()).is_err());
    }
}
