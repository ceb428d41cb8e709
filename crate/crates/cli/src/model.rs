//! Selecting an architecture from a descriptor file or a family.

use std::fs;
use std::path::{Path, PathBuf};

use clap::Args;
use dnnscope::cost::PlatformSpec;
use dnnscope::dse::{configure, MetaValue};
use dnnscope::ir::{ArchGraph, IrError};
use dnnscope::zoo::Family;
use indexmap::IndexMap;

use crate::error::{CliError, CliResult};

#[derive(Args, Default)]
pub struct ModelArgs {
    /// Architecture descriptor (JSON).
    #[arg(long, conflicts_with = "family")]
    pub arch: Option<PathBuf>,
    /// Built-in family: alexnet, vgg19, squeezenet or mobilenet.
    #[arg(long)]
    pub family: Option<String>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub pool_placement: Option<String>,
    #[arg(long)]
    pub pool_count: Option<usize>,
    #[arg(long)]
    pub width_mult: Option<f64>,
    /// Platform description (JSON).
    #[arg(long)]
    pub platform: Option<PathBuf>,
}

pub type MetaMap = IndexMap<String, MetaValue>;

pub fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::file(path, e))
}

pub fn read_bytes(path: &Path) -> CliResult<Vec<u8>> {
    fs::read(path).map_err(|e| CliError::file(path, e))
}

pub fn write(path: &Path, data: impl AsRef<[u8]>) -> CliResult {
    fs::write(path, data).map_err(|e| CliError::file(path, e))
}

pub fn platform(path: Option<&Path>) -> CliResult<PlatformSpec> {
    match path {
        Some(p) => PlatformSpec::from_json(&read(p)?).map_err(|e| CliError::file(p, e)),
        None => Ok(PlatformSpec::default()),
    }
}

/// Parses and validates a descriptor file.
pub fn load_arch(path: &Path) -> CliResult<ArchGraph> {
    let graph = ArchGraph::from_descriptor(&read(path)?).map_err(|e| CliError::file(path, e))?;
    graph
        .validate()
        .map_err(|v| CliError::Failed(format!("{}: {}", path.display(), IrError::Invalid(v))))?;
    Ok(graph)
}

impl ModelArgs {
    /// Metaparameters given on the command line, in flag order.
    pub fn metaparams(&self) -> MetaMap {
        let mut m = MetaMap::new();
        if let Some(p) = self.p {
            m.insert("p".into(), MetaValue::Number(p));
        }
        if let Some(s) = &self.pool_placement {
            m.insert("pool_placement".into(), MetaValue::Text(s.clone()));
        }
        if let Some(n) = self.pool_count {
            m.insert("pool_count".into(), MetaValue::Number(n as f64));
        }
        if let Some(w) = self.width_mult {
            m.insert("width_mult".into(), MetaValue::Number(w));
        }
        m
    }

    pub fn graph(&self) -> CliResult<ArchGraph> {
        match (&self.arch, &self.family) {
            (Some(path), _) => {
                if !self.metaparams().is_empty() {
                    return Err(CliError::usage("metaparameter flags need --family, not --arch"));
                }
                load_arch(path)
            }
            (None, Some(name)) => {
                let family: Family = name.parse().map_err(CliError::usage)?;
                let cfg = configure(family, &self.metaparams())
                    .map_err(CliError::usage)?;
                family.build(&cfg).map_err(CliError::usage)
            }
            (None, None) => Err(CliError::usage("one of --arch or --family is required")),
        }
    }
}
