//! Experiment configuration: a TOML file with flag overrides. All numbers
//! may be written as plain TOML numbers or as strings with fraction literals
//! (`"7/16"`), which keeps dyadic constants exact.

use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::Deserialize;

use arclaw_core::measures::{ulam_fixed_density, CoreMeasure};
use arclaw_core::systems::{build_system, Family};
use arclaw_core::textio::parse_real;
use arclaw_core::{Core, Measure, System};

/// A number that may arrive as a TOML float, integer, or fraction string.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum Num {
    Float(f64),
    Int(i64),
    Text(String),
}

impl Num {
    pub fn value(&self) -> Result<f64> {
        match self {
            Num::Float(v) => Ok(*v),
            Num::Int(v) => Ok(*v as f64),
            Num::Text(s) => Ok(parse_real(s)?),
        }
    }
}

fn opt_num(n: &Option<Num>) -> Result<Option<f64>> {
    n.as_ref().map(Num::value).transpose()
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    #[serde(default)]
    pub system: SystemSection,
    #[serde(default)]
    pub measure: MeasureSection,
    #[serde(default)]
    pub simulation: SimulationSection,
    #[serde(default)]
    pub test: TestSection,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSection {
    pub family: Option<String>,
    pub delta: Option<Num>,
    pub c: Option<Num>,
    pub f0: Option<Vec<Vec<Num>>>,
    pub f1: Option<Vec<Vec<Num>>>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureSection {
    pub atoms: Option<String>,
    pub grid: Option<usize>,
    pub tol: Option<Num>,
    #[serde(rename = "max-iters")]
    pub max_iters: Option<usize>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationSection {
    pub steps: Option<usize>,
    pub trajectories: Option<usize>,
    pub seed: Option<u64>,
    pub threshold: Option<Num>,
    pub dust: Option<Num>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TestSection {
    #[serde(rename = "ks-tol")]
    pub ks_tol: Option<Num>,
    pub depth: Option<usize>,
    #[serde(rename = "e-lo")]
    pub e_lo: Option<Num>,
    #[serde(rename = "e-hi")]
    pub e_hi: Option<Num>,
    pub tol: Option<Num>,
}

pub fn load_config(path: Option<&Path>) -> Result<FileConfig> {
    match path {
        None => Ok(FileConfig::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .with_context(|| format!("cannot read config {}", p.display()))?;
            toml::from_str(&text).with_context(|| format!("cannot parse config {}", p.display()))
        }
    }
}

/// Fully resolved system + core: family/flags merged over the config file.
pub struct ResolvedSystem {
    pub system: System,
    pub core: Core,
    pub label: String,
}

pub fn resolve_system(
    file: &SystemSection,
    family_flag: Option<&str>,
    delta_flag: Option<f64>,
    c_flag: Option<f64>,
) -> Result<ResolvedSystem> {
    let family_name = family_flag
        .map(str::to_string)
        .or_else(|| file.family.clone())
        .unwrap_or_else(|| "hy".to_string());
    let delta = delta_flag.or(opt_num(&file.delta)?);
    let family: Family<f64> = match family_name.as_str() {
        "hy" => Family::Hy,
        "gen-hy" => Family::GenHy {
            delta: delta.context("gen-hy requires --delta")?,
        },
        "pl-gh" => Family::PlGh {
            delta: delta.context("pl-gh requires --delta")?,
        },
        "custom" => {
            let f0 = parse_pieces(file.f0.as_ref().context("custom system requires [system] f0")?)?;
            let f1 = parse_pieces(file.f1.as_ref().context("custom system requires [system] f1")?)?;
            let c = c_flag
                .or(opt_num(&file.c)?)
                .context("custom system requires c")?;
            Family::Custom { f0, f1, c }
        }
        other => bail!("unknown family {other:?} (hy | gen-hy | pl-gh | custom)"),
    };
    let system = build_system(family)?;
    let c_override = c_flag.or(opt_num(&file.c)?);
    let core = match c_override {
        Some(c) if !matches!(system.family(), Family::Custom { .. }) => system.validate_core(c)?,
        _ => system.core()?,
    };
    let label = system.family().label();
    Ok(ResolvedSystem { system, core, label })
}

fn parse_pieces(rows: &[Vec<Num>]) -> Result<Vec<(f64, f64, f64, f64)>> {
    rows.iter()
        .map(|row| {
            if row.len() != 4 {
                bail!("each piece needs 4 entries [lo, hi, slope, intercept]");
            }
            Ok((
                row[0].value()?,
                row[1].value()?,
                row[2].value()?,
                row[3].value()?,
            ))
        })
        .collect()
}

/// How the invariant measure is produced.
pub enum MeasureSource {
    Atoms(Vec<(f64, f64)>),
    Ulam { grid: usize, tol: f64, max_iters: usize },
}

pub fn resolve_measure_source(
    file: &MeasureSection,
    atoms_flag: Option<&str>,
    grid_flag: Option<usize>,
    tol_flag: Option<f64>,
    max_iters_flag: Option<usize>,
) -> Result<MeasureSource> {
    let atoms_text = atoms_flag.map(str::to_string).or_else(|| file.atoms.clone());
    if let Some(text) = atoms_text {
        let mut atoms = Vec::new();
        for part in text.split(',') {
            let (p, w) = part
                .split_once(':')
                .with_context(|| format!("atom {part:?} must be position:weight"))?;
            atoms.push((parse_real(p)?, parse_real(w)?));
        }
        return Ok(MeasureSource::Atoms(atoms));
    }
    let grid = grid_flag.or(file.grid).unwrap_or(4096);
    let tol = tol_flag.or(opt_num(&file.tol)?).unwrap_or(1e-10);
    let max_iters = max_iters_flag.or(file.max_iters).unwrap_or(100_000);
    Ok(MeasureSource::Ulam { grid, tol, max_iters })
}

impl MeasureSource {
    /// Builds the measure on the given core; Ulam sources solve for it.
    pub fn build(&self, core: &Core) -> Result<Measure, arclaw_core::measures::MeasureError> {
        match self {
            MeasureSource::Atoms(atoms) => CoreMeasure::discrete(core.c(), atoms.clone()),
            MeasureSource::Ulam { grid, tol, max_iters } => {
                ulam_fixed_density(core, *grid, *tol, *max_iters)
            }
        }
    }

    pub fn is_density(&self) -> bool {
        matches!(self, MeasureSource::Ulam { .. })
    }
}
