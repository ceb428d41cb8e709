//! Subcommand implementations.

use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use dnnscope::compress::{self, CompressionConfig, CompressError};
use dnnscope::cost::{report, MetricsReport};
use dnnscope::dse::{
    self, attach_accuracy, check_constraints, find_saturation, pareto_front, AccuracyTable,
    ConstraintSet, DesignPoint, DseError, Grid, Objective, SweepReport,
};
use dnnscope::verify::{reencode_identity, run_suite};
use dnnscope::weights::{random_weights, read_sdnw, write_sdnw};
use dnnscope::zoo::Family;
use serde::Serialize;

use crate::error::{CliError, CliResult};
use crate::model::{platform, read, read_bytes, write};
use crate::{CheckArgs, CompressArgs, DecompressArgs, DescribeArgs, Format, ParetoArgs, SweepArgs, VerifyArgs};

fn json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report serializes") + "\n"
}

fn emit(text: &str) -> CliResult {
    io::stdout().write_all(text.as_bytes())?;
    Ok(())
}

pub fn describe(a: DescribeArgs) -> CliResult {
    let graph = a.model.graph()?;
    let platform = platform(a.model.platform.as_deref())?;
    let metrics = report(&graph, &platform).map_err(CliError::usage)?;
    if let Some(path) = &a.emit_arch {
        write(path, graph.to_descriptor())?;
    }
    if let Some(path) = &a.emit_weights {
        let weights = random_weights(&graph, a.seed).map_err(CliError::usage)?;
        write(path, write_sdnw(&weights))?;
    }
    match a.format {
        Format::Table => emit(&metrics.to_table()),
        Format::Json => emit(&(metrics.to_json() + "\n")),
    }
}

/// Maps sweep errors: bad requests are usage errors, bad files are I/O.
fn dse_error(e: DseError) -> CliError {
    match e {
        DseError::Csv(_) | DseError::Json(_) | DseError::Io(_) => CliError::io(e),
        DseError::ConflictingRows { .. }
        | DseError::BadError { .. }
        | DseError::MissingErrorColumn
        | DseError::UnknownColumn(_) => CliError::io(e),
        DseError::MissingAccuracy(_) | DseError::Unordered { .. } => CliError::Failed(e.to_string()),
        _ => CliError::usage(e),
    }
}

fn default_objectives(points: &[DesignPoint]) -> Vec<Objective> {
    if !points.is_empty() && points.iter().all(|p| p.top5_error.is_some()) {
        vec![Objective::min("total_params"), Objective::min("top5_error")]
    } else {
        vec![Objective::min("total_params"), Objective::min("total_macs")]
    }
}

fn with_extension(prefix: &Path, ext: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}

pub fn sweep(a: SweepArgs) -> CliResult {
    let family: Family = a.family.parse().map_err(CliError::usage)?;
    let grid: Grid = serde_json::from_str(&read(&a.grid)?).map_err(|e| CliError::file(&a.grid, e))?;
    let platform = platform(a.platform.as_deref())?;
    let mut points = dse::sweep(family, &grid, &platform, a.cap).map_err(dse_error)?;

    let mut unmatched_lines = Vec::new();
    if let Some(path) = &a.accuracy {
        let file = File::open(path).map_err(|e| CliError::file(path, e))?;
        let table = AccuracyTable::from_csv(file).map_err(|e| CliError::file(path, e))?;
        for row in attach_accuracy(&mut points, &table).map_err(dse_error)? {
            eprintln!("note: accuracy row on line {} matches no design point", row.line);
            unmatched_lines.push(row.line);
        }
    }

    let saturation = match (&a.saturation_axis, &a.accuracy) {
        (Some(axis), Some(_)) => Some((axis.as_str(), find_saturation(&points, axis, a.epsilon).map_err(dse_error)?)),
        (Some(_), None) => {
            eprintln!("note: --saturation-axis needs --accuracy; skipping saturation");
            None
        }
        _ => None,
    };
    let objectives = match &a.objectives {
        Some(s) => Objective::parse_list(s).map_err(CliError::usage)?,
        None => default_objectives(&points),
    };
    let front = pareto_front(&points, &objectives).map_err(dse_error)?;
    let flags: Vec<bool> = (0..points.len()).map(|i| front.contains(&i)).collect();
    let sat_index = saturation.and_then(|(_, i)| i);

    let mut csv = Vec::new();
    dse::write_points_csv(&mut csv, &points, &flags, sat_index).map_err(dse_error)?;
    match &a.out {
        Some(prefix) => {
            let report = SweepReport::new(family.name(), points, &objectives, &front, saturation, unmatched_lines);
            let csv_path = with_extension(prefix, "csv");
            let json_path = with_extension(prefix, "json");
            write(&csv_path, &csv)?;
            write(&json_path, report.to_json() + "\n")?;
            emit(&format!(
                "{} points, {} on the Pareto front, saturation: {}\nwrote {} and {}\n",
                flags.len(),
                front.len(),
                sat_index.map_or("none".to_string(), |i| format!("row {}", i + 1)),
                csv_path.display(),
                json_path.display()
            ))
        }
        None => {
            io::stdout().write_all(&csv)?;
            Ok(())
        }
    }
}

pub fn pareto(a: ParetoArgs) -> CliResult {
    let objectives = Objective::parse_list(&a.objectives).map_err(CliError::usage)?;
    let file = File::open(&a.points).map_err(|e| CliError::file(&a.points, e))?;
    let (header, rows) = dse::read_points_csv(file).map_err(|e| CliError::file(&a.points, e))?;
    let front = pareto_front(&rows, &objectives).map_err(|e| match e {
        DseError::MissingMetric { .. } => CliError::file(&a.points, e),
        other => CliError::usage(other),
    })?;
    let selected: Vec<_> = front.iter().map(|&i| &rows[i]).collect();
    let mut out = Vec::new();
    dse::write_rows_csv(&mut out, &header, &selected).map_err(CliError::io)?;
    match &a.out {
        Some(path) => write(path, out),
        None => {
            io::stdout().write_all(&out)?;
            Ok(())
        }
    }
}

fn load_point(path: &Path) -> CliResult<DesignPoint> {
    let text = read(path)?;
    if let Ok(point) = serde_json::from_str::<DesignPoint>(&text) {
        return Ok(point);
    }
    let metrics: MetricsReport = serde_json::from_str(&text).map_err(|e| CliError::file(path, e))?;
    Ok(DesignPoint {
        top5_error: metrics.recorded_top5_error,
        metaparams: Default::default(),
        metrics,
    })
}

pub fn check(a: CheckArgs) -> CliResult {
    let constraints =
        ConstraintSet::from_json(&read(&a.constraints)?).map_err(|e| CliError::file(&a.constraints, e))?;
    let mut point = match &a.point {
        Some(path) => load_point(path)?,
        None => {
            let graph = a.model.graph()?;
            let platform = platform(a.model.platform.as_deref())?;
            DesignPoint {
                metaparams: a.model.metaparams(),
                metrics: report(&graph, &platform).map_err(CliError::usage)?,
                top5_error: None,
            }
        }
    };
    if let Some(e) = a.top5_error {
        if !(0.0..=1.0).contains(&e) {
            return Err(CliError::usage(format!("--top5-error {e} is not a fraction in [0, 1]")));
        }
        point.top5_error = Some(e);
    }
    let result = check_constraints(&point, &constraints);
    match a.format {
        Format::Table => emit(&result.to_table())?,
        Format::Json => emit(&json(&result))?,
    }
    if result.passed {
        Ok(())
    } else {
        Err(CliError::Failed(format!("{} violates a hard constraint", point.metrics.model)))
    }
}

fn compress_error(e: CompressError) -> CliError {
    match e {
        CompressError::Sparsity(_) | CompressError::Bits(_) | CompressError::RelIndexBits(_) => CliError::usage(e),
        other => CliError::io(other),
    }
}

pub fn compress(a: CompressArgs) -> CliResult {
    let cfg = CompressionConfig {
        sparsity: a.sparsity,
        bits: a.bits,
        rel_index_bits: a.rel_index_bits,
        ..Default::default()
    };
    // Reject bad settings before touching any file.
    if !(0.0..1.0).contains(&cfg.sparsity) {
        return Err(compress_error(CompressError::Sparsity(cfg.sparsity)));
    }
    if !(1..=8).contains(&cfg.bits) {
        return Err(compress_error(CompressError::Bits(cfg.bits)));
    }
    if !(1..=16).contains(&cfg.rel_index_bits) {
        return Err(compress_error(CompressError::RelIndexBits(cfg.rel_index_bits)));
    }
    let weights = read_sdnw(&read_bytes(&a.weights)?).map_err(|e| CliError::file(&a.weights, e))?;
    let out = compress::compress(&weights, &cfg).map_err(compress_error)?;
    write(&a.out, out.model.to_bytes())?;
    match a.format {
        Format::Table => emit(&out.report.to_table()),
        Format::Json => emit(&json(&out.report)),
    }
}

pub fn decompress(a: DecompressArgs) -> CliResult {
    let tensors = compress::decode(&read_bytes(&a.input)?).map_err(|e| CliError::file(&a.input, e))?;
    write(&a.out, write_sdnw(&tensors))?;
    emit(&format!("{} tensors written to {}\n", tensors.len(), a.out.display()))
}

pub fn verify(a: VerifyArgs) -> CliResult {
    if a.cases == 0 {
        return Err(CliError::usage("--cases must be at least 1"));
    }
    let mut result = run_suite(a.seed, a.cases);
    if let Some(path) = &a.container {
        let bytes = read_bytes(path)?;
        let same = reencode_identity(&bytes).map_err(|e| CliError::file(path, e))?;
        result.properties.push(dnnscope::verify::PropertyResult {
            name: "container_reencode".into(),
            cases: 1,
            passed: same,
            detail: if same { "ok".into() } else { "re-encoding differs".into() },
        });
        result.passed &= same;
    }
    match a.format {
        Format::Table => emit(&result.to_table())?,
        Format::Json => emit(&json(&result))?,
    }
    if result.passed {
        Ok(())
    } else {
        Err(CliError::Failed("property suite failed".into()))
    }
}
