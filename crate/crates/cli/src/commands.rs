//! Subcommand implementations and CSV emission.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};
use sha2::{Digest, Sha256};

use arclaw_core::measures::{
    beta_b, extend_mu, invariance_residual, CoreMeasure, MeasureData,
};
use arclaw_core::montecarlo::{darling_kac_ensemble, occupation_ensemble, SimulationConfig};
use arclaw_core::randomwalk::coefficients;
use arclaw_core::stats::{half_normal_cdf, ks_distance, EmpiricalDistribution, LampertiLaw};
use arclaw_core::systems::CellIndex;
use arclaw_core::{textio, Measure};

use crate::config::{
    load_config, resolve_measure_source, resolve_system, FileConfig, ResolvedSystem,
};
use crate::{DkArgs, InvariantArgs, MuArgs, SimulateArgs, WalkArgs};

fn short_hash(parts: &[String]) -> String {
    let mut hasher = Sha256::new();
    for p in parts {
        hasher.update(p.as_bytes());
        hasher.update(b"\n");
    }
    let digest = hasher.finalize();
    digest[..8].iter().map(|b| format!("{b:02x}")).collect()
}

fn open_out(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("cannot create {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(std::io::stdout())),
    })
}

pub fn walk(args: WalkArgs) -> Result<i32> {
    let coeffs = coefficients(args.max_n);
    let hash = short_hash(&[format!("walk max_n={}", args.max_n)]);
    let mut out = open_out(args.out.as_deref())?;
    writeln!(out, "# arclaw walk config_hash={hash} max_n={}", args.max_n)?;
    writeln!(out, "n,c_n,cumulative,karamata_ratio")?;
    for n in 1..=args.max_n {
        writeln!(
            out,
            "{n},{},{},{}",
            coeffs.c(n),
            coeffs.cumulative(n),
            coeffs.karamata_ratio(n)
        )?;
    }
    out.flush()?;
    Ok(0)
}

struct Prepared {
    resolved: ResolvedSystem,
    nu: Measure,
    source_is_density: bool,
}

fn prepare(
    config: &FileConfig,
    system: &crate::SystemArgs,
    measure: &crate::MeasureArgs,
) -> Result<Prepared> {
    let resolved = resolve_system(
        &config.system,
        system.family.as_deref(),
        system.delta,
        system.c,
    )?;
    let source = resolve_measure_source(
        &config.measure,
        measure.atoms.as_deref(),
        measure.grid,
        measure.tol,
        measure.max_iters,
    )?;
    let nu = source.build(&resolved.core)?;
    Ok(Prepared {
        resolved,
        nu,
        source_is_density: source.is_density(),
    })
}

pub fn invariant(args: InvariantArgs) -> Result<i32> {
    let config = load_config(args.system.config.as_deref())?;
    let prepared = prepare(&config, &args.system, &args.measure)?;
    let residual = invariance_residual(&prepared.resolved.core, &prepared.nu)?;
    let bb = beta_b(&prepared.nu)?;
    println!(
        "invariant system={} c={} residual={residual:e} beta={} b={}",
        prepared.resolved.label,
        prepared.resolved.core.c(),
        bb.beta,
        bb.b
    );
    if let Some(path) = &args.out {
        std::fs::write(path, textio::measure_to_text(&prepared.nu))
            .with_context(|| format!("cannot write {}", path.display()))?;
    }
    Ok(0)
}

/// The occupation fraction counts time in `[1/2, 1]`; its limit law is the
/// Lamperti law whose mean is the `I₁⁺` share `1 − β`, i.e. parameter
/// `β/(1−β) = 1/b`.
fn occupation_parameter(beta: f64) -> f64 {
    beta / (1.0 - beta)
}

struct EnsembleRun {
    samples: Vec<f64>,
    beta: f64,
    b: f64,
    steps: usize,
    traj: usize,
    seed: u64,
    hash: String,
}

fn run_occupation(args: &SimulateArgs) -> Result<EnsembleRun> {
    let config = load_config(args.system.config.as_deref())?;
    let prepared = prepare(&config, &args.system, &args.measure)?;
    let steps = args.steps.or(config.simulation.steps).unwrap_or(100_000);
    let traj = args.traj.or(config.simulation.trajectories).unwrap_or(1_000);
    let seed = args.seed.or(config.simulation.seed).unwrap_or(0);
    let threshold = match (args.threshold, &config.simulation.threshold) {
        (Some(t), _) => t,
        (None, Some(n)) => n.value()?,
        (None, None) => 0.5,
    };
    let dust = match (args.dust, &config.simulation.dust) {
        (Some(d), _) => d,
        (None, Some(n)) => n.value()?,
        // exact dyadic orbits are correct for atomic measures; densities
        // need fresh low-order bits to behave like generic points
        (None, None) => {
            if prepared.source_is_density {
                2.0f64.powi(-50)
            } else {
                0.0
            }
        }
    };
    let bb = beta_b(&prepared.nu)?;
    let initial = match args.theta {
        Some(theta) => CoreMeasure::discrete(prepared.resolved.core.c(), vec![(theta, 1.0)])?,
        None => prepared.nu.clone(),
    };
    let mut sim = SimulationConfig::new(steps, traj, seed, initial);
    sim.threshold = (threshold, 1.0);
    if dust > 0.0 {
        sim = sim.with_dust(dust);
    }
    let samples = occupation_ensemble(&prepared.resolved.system, &prepared.resolved.core, &sim)?;
    let hash = short_hash(&[
        format!("system={}", prepared.resolved.label),
        format!("c={}", prepared.resolved.core.c()),
        format!("steps={steps} traj={traj} seed={seed} threshold={threshold} dust={dust}"),
        format!("theta={:?}", args.theta),
    ]);
    Ok(EnsembleRun {
        samples: samples.values,
        beta: bb.beta,
        b: bb.b,
        steps,
        traj,
        seed,
        hash,
    })
}

fn write_samples(run: &EnsembleRun, what: &str, path: Option<&Path>) -> Result<()> {
    let mut out = open_out(path)?;
    writeln!(
        out,
        "# arclaw {what} config_hash={} seed={} steps={} trajectories={}",
        run.hash, run.seed, run.steps, run.traj
    )?;
    writeln!(out, "index,value")?;
    for (i, v) in run.samples.iter().enumerate() {
        writeln!(out, "{i},{v}")?;
    }
    out.flush()?;
    Ok(())
}

pub fn simulate(args: SimulateArgs) -> Result<i32> {
    let run = run_occupation(&args)?;
    write_samples(&run, "simulate", args.out.as_deref())?;
    eprintln!(
        "simulate beta={} b={} steps={} trajectories={} seed={}",
        run.beta, run.b, run.steps, run.traj, run.seed
    );
    Ok(0)
}

pub fn arcsine_test(args: SimulateArgs) -> Result<i32> {
    let file = load_config(args.system.config.as_deref())?;
    let ks_tol = match (args.ks_tol, &file.test.ks_tol) {
        (Some(t), _) => t,
        (None, Some(n)) => n.value()?,
        (None, None) => 0.05,
    };
    let run = run_occupation(&args)?;
    if let Some(path) = &args.out {
        write_samples(&run, "arcsine-test", Some(path))?;
    }
    let law = LampertiLaw::new(occupation_parameter(run.beta))?;
    let samples = EmpiricalDistribution::new(run.samples.clone())?;
    let ks = ks_distance(&samples, |x| law.cdf(x).unwrap_or(1.0));
    let pass = ks < ks_tol;
    println!(
        "arcsine-test beta={} b={} occupation_b={} ks={ks} tol={ks_tol} verdict={}",
        run.beta,
        run.b,
        law.b(),
        if pass { "PASS" } else { "FAIL" }
    );
    Ok(if pass { 0 } else { 1 })
}

pub fn dk_test(args: DkArgs) -> Result<i32> {
    let config = load_config(args.sim.system.config.as_deref())?;
    let ks_tol = match (args.sim.ks_tol, &config.test.ks_tol) {
        (Some(t), _) => t,
        (None, Some(n)) => n.value()?,
        (None, None) => 0.1,
    };
    let prepared = prepare(&config, &args.sim.system, &args.sim.measure)?;
    let steps = args.sim.steps.or(config.simulation.steps).unwrap_or(1_000_000);
    let traj = args.sim.traj.or(config.simulation.trajectories).unwrap_or(500);
    let seed = args.sim.seed.or(config.simulation.seed).unwrap_or(0);
    let depth = args.depth.or(config.test.depth).unwrap_or(60);
    let (y_lo, y_hi) = prepared.resolved.core.y_bounds();
    let e_lo = match (args.e_lo, &config.test.e_lo) {
        (Some(v), _) => v,
        (None, Some(n)) => n.value()?,
        (None, None) => y_lo,
    };
    let e_hi = match (args.e_hi, &config.test.e_hi) {
        (Some(v), _) => v,
        (None, Some(n)) => n.value()?,
        (None, None) => y_hi,
    };
    let bb = beta_b(&prepared.nu)?;
    let mu = extend_mu(&prepared.nu, depth, &prepared.resolved.system)?;
    let dust = match (args.sim.dust, &config.simulation.dust) {
        (Some(d), _) => d,
        (None, Some(n)) => n.value()?,
        (None, None) => {
            if prepared.source_is_density {
                2.0f64.powi(-50)
            } else {
                0.0
            }
        }
    };
    let initial = match args.sim.theta {
        Some(theta) => CoreMeasure::discrete(prepared.resolved.core.c(), vec![(theta, 1.0)])?,
        None => prepared.nu.clone(),
    };
    let mut sim = SimulationConfig::new(steps, traj, seed, initial);
    if dust > 0.0 {
        sim = sim.with_dust(dust);
    }
    let dk = darling_kac_ensemble(
        &prepared.resolved.system,
        &prepared.resolved.core,
        &sim,
        (e_lo, e_hi),
        &mu,
    )?;
    let scale = dk.predicted_scale();
    let samples = EmpiricalDistribution::new(dk.values.clone())?;
    let ks = ks_distance(&samples, |x| half_normal_cdf(scale, x).unwrap_or(0.0));
    if let Some(path) = &args.sim.out {
        let run = EnsembleRun {
            samples: dk.values.clone(),
            beta: bb.beta,
            b: bb.b,
            steps,
            traj,
            seed,
            hash: short_hash(&[format!(
                "dk system={} e=[{e_lo},{e_hi}) steps={steps} traj={traj} seed={seed}",
                prepared.resolved.label
            )]),
        };
        write_samples(&run, "dk-test", Some(path))?;
    }
    let pass = ks < ks_tol;
    println!(
        "dk-test beta={} b={} mu_e={} mu_e0={} scale={scale} ks={ks} tol={ks_tol} verdict={}",
        bb.beta,
        bb.b,
        dk.mu_e,
        dk.mu_e0,
        if pass { "PASS" } else { "FAIL" }
    );
    Ok(if pass { 0 } else { 1 })
}

pub fn mu_check(args: MuArgs) -> Result<i32> {
    let config = load_config(args.system.config.as_deref())?;
    let prepared = prepare(&config, &args.system, &args.measure)?;
    let depth = args.depth.or(config.test.depth).unwrap_or(60);
    let tol = match (args.residual_tol, &config.test.tol) {
        (Some(t), _) => t,
        (None, Some(n)) => n.value()?,
        (None, None) => 1e-12,
    };
    let nu = &prepared.nu;
    let system = &prepared.resolved.system;
    let mu = extend_mu(nu, depth, system)?;
    let (minus, _, plus) = nu.side_masses();
    let bb = beta_b(nu)?;

    let mut worst_mass = 0.0f64;
    for n in 1..=depth as u32 {
        let dm = (mu.cell_mass(CellIndex::Left(n))? - 2.0 * minus).abs();
        let dp = (mu.cell_mass(CellIndex::Right(n))? - 2.0 * plus).abs();
        worst_mass = worst_mass.max(dm).max(dp);
    }

    // test intervals: tail cells a few levels deep on both sides plus Y slices
    let c = prepared.resolved.core.c();
    let mut sets: Vec<(f64, f64)> = Vec::new();
    let max_level = (depth - 1).min(8) as u32;
    for n in 1..=max_level {
        let (lo, hi) = arclaw_core::systems::cell_interval(CellIndex::Left(n), c);
        sets.push((lo, hi));
        let (lo, hi) = arclaw_core::systems::cell_interval(CellIndex::Right(n), c);
        sets.push((lo, hi));
    }
    let (y_lo, y_hi) = prepared.resolved.core.y_bounds();
    for k in 0..4 {
        let lo = y_lo + (y_hi - y_lo) * k as f64 / 4.0;
        let hi = y_lo + (y_hi - y_lo) * (k + 1) as f64 / 4.0;
        sets.push((lo, hi));
    }
    let residual = arclaw_core::measures::mu_t_invariance_residual(system, &mu, &sets)?;

    let mass_tol = match nu.data() {
        MeasureData::Discrete(_) => 0.0,
        MeasureData::StepDensity(_) => 1e-10,
    };
    let mass_ok = worst_mass <= mass_tol;
    let resid_ok = residual < tol;
    println!(
        "mu-check system={} beta={} b={} depth={depth} level_mass_error={worst_mass:e} \
         invariance_residual={residual:e} tol={tol:e} verdict={}",
        prepared.resolved.label,
        bb.beta,
        bb.b,
        if mass_ok && resid_ok { "PASS" } else { "FAIL" }
    );
    Ok(if mass_ok && resid_ok { 0 } else { 1 })
}
