//! CSV and JSON exchange for design points.

use std::io::{Read, Write};

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use super::point::{DesignPoint, Objectives, METRIC_NAMES};
use super::pareto::Objective;
use super::DseError;

/// A row read back from a points CSV.
pub type CsvPoint = IndexMap<String, String>;

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(String::new, |v| v.to_string())
}

/// Writes one row per point: metaparameters, metrics, error and flags.
pub fn write_points_csv<W: Write>(
    out: W,
    points: &[DesignPoint],
    pareto: &[bool],
    saturation: Option<usize>,
) -> Result<(), DseError> {
    let mut meta: Vec<&String> = Vec::new();
    for p in points {
        for k in p.metaparams.keys() {
            if !meta.contains(&k) {
                meta.push(k);
            }
        }
    }
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<&str> = vec!["model"];
    header.extend(meta.iter().map(|s| s.as_str()));
    header.extend(METRIC_NAMES);
    header.extend(["pareto", "saturation"]);
    w.write_record(&header)?;
    for (i, p) in points.iter().enumerate() {
        let mut row = vec![p.metrics.model.clone()];
        row.extend(
            meta.iter()
                .map(|k| p.metaparams.get(*k).map_or_else(String::new, |v| v.to_string())),
        );
        row.extend(METRIC_NAMES.iter().map(|m| fmt_opt(p.objective(m))));
        row.push(pareto.get(i).copied().unwrap_or(false).to_string());
        row.push((saturation == Some(i)).to_string());
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads any CSV with a header row into string maps.
pub fn read_points_csv<R: Read>(input: R) -> Result<(Vec<String>, Vec<CsvPoint>), DseError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for record in rdr.records() {
        let record = record?;
        rows.push(header.iter().cloned().zip(record.iter().map(str::to_string)).collect());
    }
    Ok((header, rows))
}

pub fn write_rows_csv<W: Write>(out: W, header: &[String], rows: &[&CsvPoint]) -> Result<(), DseError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for r in rows {
        w.write_record(header.iter().map(|h| r.get(h).map_or("", String::as_str)))?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepEntry {
    #[serde(flatten)]
    pub point: DesignPoint,
    pub pareto: bool,
    pub saturation: bool,
}

/// Machine-readable sweep result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub family: String,
    pub objectives: Vec<String>,
    pub points: Vec<SweepEntry>,
    pub saturation_axis: Option<String>,
    pub saturation_index: Option<usize>,
    pub unmatched_accuracy_lines: Vec<usize>,
}

impl SweepReport {
    pub fn new(
        family: &str,
        points: Vec<DesignPoint>,
        objectives: &[Objective],
        front: &[usize],
        saturation: Option<(&str, Option<usize>)>,
        unmatched_accuracy_lines: Vec<usize>,
    ) -> Self {
        let sat = saturation.and_then(|(_, i)| i);
        Self {
            family: family.to_string(),
            objectives: objectives.iter().map(ToString::to_string).collect(),
            points: points
                .into_iter()
                .enumerate()
                .map(|(i, point)| SweepEntry {
                    point,
                    pareto: front.contains(&i),
                    saturation: sat == Some(i),
                })
                .collect(),
            saturation_axis: saturation.map(|(a, _)| a.to_string()),
            saturation_index: sat,
            unmatched_accuracy_lines,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}
