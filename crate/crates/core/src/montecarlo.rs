//! Reproducible trajectory ensembles for the random iteration.
//!
//! Symbols are fair i.i.d. bits. Randomness comes from counter-based ChaCha8
//! streams keyed by `(seed, trajectory index, purpose)`, so ensembles are
//! embarrassingly parallel and bit-reproducible regardless of worker count.
//! Every step of every trajectory is executed; there is no excursion
//! fast-forwarding.
//!
//! ## Depth extension
//!
//! A tail excursion multiplies the frame-local coordinate by 2 or 1/2
//! exactly, but a `f64` underflows once an orbit wanders ~1000 cells deep,
//! and million-step orbits regularly do. [`OrbitState`] therefore carries an
//! extra exponent: the true coordinate is `stored · 2^(−512·shift)`, with the
//! stored value kept in a normalized band while `shift > 0`. Scaling steps
//! stay exact at any depth and re-entry to moderate depths restores the plain
//! representation bit-for-bit.
//!
//! ## Dust
//!
//! With dyadic branch coefficients, `f64` arithmetic on the core region is
//! *exact*, so a deterministic expanding core consumes one significand bit
//! per step and every orbit collapses onto a short dyadic cycle within ~53
//! core steps — the analogue of iterating the doubling map in floating
//! point. For systems whose invariant measure is absolutely continuous this
//! collapse is an artifact: the real-number orbit of a generic point never
//! runs out of digits. `core_dust` models exactly those missing digits by
//! appending random low-order bits (amplitude ~2⁻⁵⁰) after each *general*
//! branch application. Tail scalings are never dusted, so excursion
//! bit-exactness is untouched. Leave it off (the default) for systems with
//! atomic invariant measures, whose exact dyadic orbits are the true ones.

use rand::RngCore;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use thiserror::Error;

use crate::measures::{MeasureData, MeasureError};
use crate::systems::{
    locate_cell, CellIndex, StepKind, Symbol, SystemError, TailPoint,
};
use crate::{Core, Measure, Point, System, TailMeasure};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimulationError {
    #[error("initial law has no mass")]
    ZeroMassLaw,
    #[error("initial law lives on c = {measure_c} but the core has c = {core_c}")]
    MismatchedCore { measure_c: f64, core_c: f64 },
    #[error("target set [{lo}, {hi}) is not contained in Y")]
    TargetOutsideCore { lo: f64, hi: f64 },
    #[error("target set has zero mass under mu")]
    ZeroTargetMass,
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    System(#[from] SystemError),
}

/// Purpose tag of a random stream within one trajectory.
#[derive(Clone, Copy, Debug)]
pub enum StreamPurpose {
    Initial = 0,
    Symbols = 1,
    Dust = 2,
}

/// The ChaCha stream for `(seed, trajectory, purpose)`.
pub fn stream(seed: u64, trajectory: u64, purpose: StreamPurpose) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trajectory.wrapping_mul(4) + purpose as u64);
    rng
}

const fn pow2(e: i64) -> f64 {
    f64::from_bits(((e + 1023) as u64) << 52)
}

// stored-value band while shift > 0; one step moves by a factor of two,
// rebanding multiplies by 2^±512, and nothing ever goes subnormal
const BAND_LO: f64 = pow2(-900);
const BAND_HI: f64 = pow2(-388);
const SHIFT_UP: f64 = pow2(512);
const SHIFT_DOWN: f64 = pow2(-512);

/// A trajectory point with unbounded tail depth: the actual frame-local
/// coordinate is `point's stored value · 2^(−512·shift)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OrbitState {
    pub point: Point,
    pub shift: u32,
}

impl OrbitState {
    pub fn new(point: Point) -> Self {
        Self { point, shift: 0 }
    }

    /// Collapses to a plain point; depths beyond the `f64` range saturate to
    /// the respective endpoint.
    pub fn to_point(self) -> Point {
        if self.shift == 0 {
            return self.point;
        }
        let mut v = self.point.stored();
        for _ in 0..self.shift {
            v *= SHIFT_DOWN;
        }
        match self.point {
            TailPoint::FromZero(_) => TailPoint::FromZero(v),
            TailPoint::FromOne(_) => TailPoint::FromOne(v),
        }
    }

    /// Cell location; the depth accounts for the exponent shift.
    pub fn cell(self, c: f64) -> Result<CellIndex, SystemError> {
        let base = locate_cell(self.point, c)?;
        if self.shift == 0 {
            return Ok(base);
        }
        let extra = 512 * self.shift;
        Ok(match base {
            CellIndex::Left(n) => CellIndex::Left(n + extra),
            CellIndex::Right(n) => CellIndex::Right(n + extra),
            CellIndex::Core => CellIndex::Core,
        })
    }

    #[inline]
    fn is_deep(self) -> bool {
        self.shift > 0
    }
}

/// Occupation indicator for the half-open interval `[lo, hi)`, closed at 1
/// when `hi = 1`. Membership is evaluated frame-exactly.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IndicatorSet {
    lo: f64,
    hi: f64,
    w_lo: f64,
    w_hi: f64,
}

impl IndicatorSet {
    pub fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi, w_lo: 1.0 - lo, w_hi: 1.0 - hi }
    }

    /// `1{x ≥ 1/2}`.
    pub fn right_half() -> Self {
        Self::new(0.5, 1.0)
    }

    pub fn bounds(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    #[inline]
    pub fn contains(&self, s: &OrbitState) -> bool {
        if s.is_deep() {
            // x is within 2^-388 of an endpoint
            return match s.point {
                TailPoint::FromZero(_) => self.lo == 0.0,
                TailPoint::FromOne(_) => self.hi == 1.0,
            };
        }
        match s.point {
            TailPoint::FromZero(v) => v >= self.lo && (v < self.hi || (self.hi == 1.0 && v <= 1.0)),
            TailPoint::FromOne(w) => w <= self.w_lo && (w > self.w_hi || self.hi == 1.0),
        }
    }
}

/// Ensemble parameters. `initial` is the law of the starting point; the
/// occupation indicator defaults to `[1/2, 1]`; `core_dust` is off by
/// default (see the module docs).
#[derive(Clone, Debug)]
pub struct SimulationConfig {
    pub steps: usize,
    pub trajectories: usize,
    pub seed: u64,
    pub initial: Measure,
    pub threshold: (f64, f64),
    pub core_dust: Option<f64>,
}

impl SimulationConfig {
    pub fn new(steps: usize, trajectories: usize, seed: u64, initial: Measure) -> Self {
        Self {
            steps,
            trajectories,
            seed,
            initial,
            threshold: (0.5, 1.0),
            core_dust: None,
        }
    }

    pub fn with_dust(mut self, amplitude: f64) -> Self {
        self.core_dust = Some(amplitude);
        self
    }
}

/// Occupation fractions `A_N`, one per trajectory, plus the config echo.
#[derive(Clone, Debug)]
pub struct OccupationSamples {
    pub values: Vec<f64>,
    pub breakpoint_hits: Vec<u64>,
    pub steps: usize,
    pub trajectories: usize,
    pub seed: u64,
    pub threshold: (f64, f64),
}

/// `√N`-normalized visit counts to a target set `E ⊆ Y`.
#[derive(Clone, Debug)]
pub struct DarlingKacSamples {
    pub values: Vec<f64>,
    pub target: (f64, f64),
    pub mu_e: f64,
    pub mu_e0: f64,
    pub steps: usize,
    pub trajectories: usize,
    pub seed: u64,
}

impl DarlingKacSamples {
    /// The predicted scale `2μ(E)/μ(E₀)` of the half-normal comparison law.
    pub fn predicted_scale(&self) -> f64 {
        2.0 * self.mu_e / self.mu_e0
    }
}

/// One sample from a measure on `Y`: atoms by cumulative weight, step
/// densities by inverse CDF over the grid with uniform jitter in the cell.
pub fn draw_initial(law: &Measure, rng: &mut ChaCha8Rng) -> Result<Point, SimulationError> {
    let total = law.total_mass();
    if !(total > 0.0) {
        return Err(SimulationError::ZeroMassLaw);
    }
    let u = uniform_f64(rng) * total;
    match law.data() {
        MeasureData::Discrete(atoms) => {
            let mut acc = 0.0;
            for &(p, w) in atoms {
                acc += w;
                if u < acc {
                    return Ok(TailPoint::new(p));
                }
            }
            Ok(TailPoint::new(atoms.last().unwrap().0))
        }
        MeasureData::StepDensity(values) => {
            let (y_lo, _) = law.y_bounds();
            let h = law.cell_width().unwrap();
            let mut acc = 0.0;
            let mut idx = values.len() - 1;
            for (i, &d) in values.iter().enumerate() {
                acc += d * h;
                if u < acc {
                    idx = i;
                    break;
                }
            }
            let cell_lo = y_lo + idx as f64 * h;
            Ok(TailPoint::new(cell_lo + uniform_f64(rng) * h))
        }
    }
}

#[inline]
fn uniform_f64(rng: &mut ChaCha8Rng) -> f64 {
    // 53 random bits into [0, 1)
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

struct BitStream {
    word: u64,
    left: u8,
}

impl BitStream {
    fn new() -> Self {
        Self { word: 0, left: 0 }
    }

    #[inline]
    fn next(&mut self, rng: &mut ChaCha8Rng) -> bool {
        if self.left == 0 {
            self.word = rng.next_u64();
            self.left = 64;
        }
        let bit = self.word & 1 == 1;
        self.word >>= 1;
        self.left -= 1;
        bit
    }
}

/// Per-trajectory outcome.
#[derive(Clone, Copy, Debug)]
pub struct TrajectoryResult {
    pub occupation_count: u64,
    pub endpoint: OrbitState,
    /// Visits that landed exactly on an interior breakpoint of either map
    /// (or on 1/2); the reflection symmetry argument is exact only when this
    /// stays zero.
    pub breakpoint_hits: u64,
}

struct Runner<'a> {
    system: &'a System,
    indicator: IndicatorSet,
    dust: Option<f64>,
    breakpoints: Vec<f64>,
}

impl<'a> Runner<'a> {
    fn new(system: &'a System, indicator: IndicatorSet, dust: Option<f64>) -> Self {
        let mut breakpoints = system.f0().interior_breakpoints();
        breakpoints.extend(system.f1().interior_breakpoints());
        breakpoints.push(0.5);
        breakpoints.sort_by(|a, b| a.partial_cmp(b).unwrap());
        breakpoints.dedup();
        Self { system, indicator, dust, breakpoints }
    }

    #[inline]
    fn advance(
        &self,
        state: OrbitState,
        symbol: Symbol,
        dust_rng: &mut Option<ChaCha8Rng>,
        breakpoint_hits: &mut u64,
    ) -> OrbitState {
        if state.is_deep() {
            // only the exact tail scalings can apply this deep
            let factor = match (state.point.is_from_one(), symbol) {
                (false, Symbol::Zero) | (true, Symbol::One) => 0.5,
                (false, Symbol::One) | (true, Symbol::Zero) => 2.0,
            };
            let mut v = state.point.stored() * factor;
            let mut shift = state.shift;
            if v < BAND_LO && v > 0.0 {
                v *= SHIFT_UP;
                shift += 1;
            } else if v >= BAND_HI {
                v *= SHIFT_DOWN;
                shift -= 1;
            }
            let point = match state.point {
                TailPoint::FromZero(_) => TailPoint::FromZero(v),
                TailPoint::FromOne(_) => TailPoint::FromOne(v),
            };
            return OrbitState { point, shift };
        }

        let x = state.point.value_from_zero();
        if self.breakpoints.iter().any(|&b| b == x) {
            *breakpoint_hits += 1;
        }
        let (mut point, kind) = self.system.map(symbol).evaluate_traced(state.point);
        if kind == StepKind::General {
            if let (Some(eps), Some(rng)) = (self.dust, dust_rng.as_mut()) {
                let xi = (uniform_f64(rng) - 0.5) * eps;
                let v = point.stored();
                let perturbed = v + xi;
                if perturbed > 0.0 && perturbed < 0.5 {
                    point = match point {
                        TailPoint::FromZero(_) => TailPoint::FromZero(perturbed),
                        TailPoint::FromOne(_) => TailPoint::FromOne(perturbed),
                    };
                }
            }
        }
        let v = point.stored();
        if v < BAND_LO && v > 0.0 {
            OrbitState { point: point.scale(SHIFT_UP), shift: 1 }
        } else {
            OrbitState { point, shift: 0 }
        }
    }

    fn run(
        &self,
        x0: Point,
        steps: usize,
        sym_rng: &mut ChaCha8Rng,
        mut dust_rng: Option<ChaCha8Rng>,
        flip_symbols: bool,
    ) -> TrajectoryResult {
        let mut state = OrbitState::new(x0);
        let mut bits = BitStream::new();
        let mut count = 0u64;
        let mut breakpoint_hits = 0u64;
        for _ in 0..steps {
            if self.indicator.contains(&state) {
                count += 1;
            }
            let mut symbol = Symbol::from_bit(bits.next(sym_rng));
            if flip_symbols {
                symbol = symbol.flip();
            }
            state = self.advance(state, symbol, &mut dust_rng, &mut breakpoint_hits);
        }
        TrajectoryResult {
            occupation_count: count,
            endpoint: state,
            breakpoint_hits,
        }
    }
}

/// Iterates `x_{n+1} = f_{symbol}(x_n)` with fair i.i.d. symbols from the
/// stream, counting `x_n ≥ 1/2` over `n = 0 … N−1` (the start included).
pub fn run_trajectory(
    system: &System,
    x0: Point,
    steps: usize,
    stream: &mut ChaCha8Rng,
) -> TrajectoryResult {
    Runner::new(system, IndicatorSet::right_half(), None).run(x0, steps, stream, None, false)
}

/// Forced-symbol variant for orbit inspection.
pub fn run_trajectory_symbols(system: &System, x0: Point, symbols: &[Symbol]) -> TrajectoryResult {
    let runner = Runner::new(system, IndicatorSet::right_half(), None);
    let mut state = OrbitState::new(x0);
    let mut count = 0u64;
    let mut hits = 0u64;
    for &s in symbols {
        if runner.indicator.contains(&state) {
            count += 1;
        }
        state = runner.advance(state, s, &mut None, &mut hits);
    }
    TrajectoryResult { occupation_count: count, endpoint: state, breakpoint_hits: hits }
}

fn ensemble(
    system: &System,
    core: &Core,
    config: &SimulationConfig,
    indicator: IndicatorSet,
    antithetic: bool,
) -> Result<Vec<TrajectoryResult>, SimulationError> {
    if config.initial.c() != core.c() {
        return Err(SimulationError::MismatchedCore {
            measure_c: config.initial.c(),
            core_c: core.c(),
        });
    }
    let runner = Runner::new(system, indicator, config.core_dust);
    (0..config.trajectories as u64)
        .into_par_iter()
        .map(|i| {
            let mut init_rng = stream(config.seed, i, StreamPurpose::Initial);
            let mut x0 = draw_initial(&config.initial, &mut init_rng)?;
            if antithetic {
                // exact reflection: swap the frame, keep the stored value
                x0 = match x0 {
                    TailPoint::FromZero(v) => TailPoint::FromOne(v),
                    TailPoint::FromOne(w) => TailPoint::FromZero(w),
                };
            }
            let mut sym_rng = stream(config.seed, i, StreamPurpose::Symbols);
            let dust_rng = config
                .core_dust
                .map(|_| stream(config.seed, i, StreamPurpose::Dust));
            Ok(runner.run(x0, config.steps, &mut sym_rng, dust_rng, antithetic))
        })
        .collect()
}

/// `M` independent trajectories from the initial law; `values` are the
/// occupation fractions `A_N`.
pub fn occupation_ensemble(
    system: &System,
    core: &Core,
    config: &SimulationConfig,
) -> Result<OccupationSamples, SimulationError> {
    let indicator = IndicatorSet::new(config.threshold.0, config.threshold.1);
    let results = ensemble(system, core, config, indicator, false)?;
    Ok(pack_occupation(results, config))
}

/// The matched antithetic ensemble: same streams, symbols flipped and the
/// drawn starting points reflected (`x ↦ 1 − x`, exact in frame terms).
pub fn occupation_ensemble_antithetic(
    system: &System,
    core: &Core,
    config: &SimulationConfig,
) -> Result<OccupationSamples, SimulationError> {
    let indicator = IndicatorSet::new(config.threshold.0, config.threshold.1);
    let results = ensemble(system, core, config, indicator, true)?;
    Ok(pack_occupation(results, config))
}

fn pack_occupation(results: Vec<TrajectoryResult>, config: &SimulationConfig) -> OccupationSamples {
    OccupationSamples {
        values: results
            .iter()
            .map(|r| r.occupation_count as f64 / config.steps as f64)
            .collect(),
        breakpoint_hits: results.iter().map(|r| r.breakpoint_hits).collect(),
        steps: config.steps,
        trajectories: config.trajectories,
        seed: config.seed,
        threshold: config.threshold,
    }
}

/// `√N`-normalized counts of visits to `E ⊆ Y`, with the `μ` masses needed
/// for the half-normal comparison law.
pub fn darling_kac_ensemble(
    system: &System,
    core: &Core,
    config: &SimulationConfig,
    target: (f64, f64),
    mu: &TailMeasure,
) -> Result<DarlingKacSamples, SimulationError> {
    let (y_lo, y_hi) = core.y_bounds();
    if target.0 < y_lo || target.1 > y_hi || target.0 >= target.1 {
        return Err(SimulationError::TargetOutsideCore { lo: target.0, hi: target.1 });
    }
    let mu_e = mu.measure_interval(target.0, target.1)?;
    if !(mu_e > 0.0) {
        return Err(SimulationError::ZeroTargetMass);
    }
    let masses = mu.tail_masses();
    let indicator = IndicatorSet::new(target.0, target.1);
    let results = ensemble(system, core, config, indicator, false)?;
    let norm = (config.steps as f64).sqrt();
    Ok(DarlingKacSamples {
        values: results
            .iter()
            .map(|r| r.occupation_count as f64 / norm)
            .collect(),
        target,
        mu_e,
        mu_e0: masses.i1_minus + masses.i1_plus,
        steps: config.steps,
        trajectories: config.trajectories,
        seed: config.seed,
    })
}

/// Checks that along the forced-symbol orbit every step taken from a tail
/// cell of depth ≥ 2 moves the depth by exactly the walk increment: toward
/// the core under symbol 1 on the left tail and symbol 0 on the right tail,
/// one cell deeper otherwise.
pub fn walk_consistency(system: &System, x0: Point, symbols: &[Symbol]) -> bool {
    let c = system.c();
    let runner = Runner::new(system, IndicatorSet::right_half(), None);
    let mut state = OrbitState::new(x0);
    let mut hits = 0u64;
    for &s in symbols {
        let before = state.cell(c);
        let next = runner.advance(state, s, &mut None, &mut hits);
        let after = next.cell(c);
        if let (Ok(b), Ok(a)) = (before, after) {
            match b {
                CellIndex::Left(n) if n >= 2 => {
                    let expected = if s == Symbol::One { n - 1 } else { n + 1 };
                    if a != CellIndex::Left(expected) {
                        return false;
                    }
                }
                CellIndex::Right(n) if n >= 2 => {
                    let expected = if s == Symbol::Zero { n - 1 } else { n + 1 };
                    if a != CellIndex::Right(expected) {
                        return false;
                    }
                }
                _ => {}
            }
        }
        state = next;
    }
    true
}
