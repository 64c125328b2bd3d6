//! Property tests for the structural invariants: branch evaluation against
//! direct affine arithmetic, bit-exact tail behaviour, transfer-operator mass
//! conservation, and reproducibility of ensembles.

use proptest::prelude::*;

use arclaw_core::measures::{annealed_push, beta_b, extend_mu, CoreMeasure};
use arclaw_core::montecarlo::{occupation_ensemble, SimulationConfig};
use arclaw_core::systems::{
    build_system, cell_interval, locate_cell, CellIndex, Family, Symbol, TailPoint,
};
use arclaw_core::{Core, Measure, System};

fn family_strategy() -> impl Strategy<Value = Family<f64>> {
    prop_oneof![
        Just(Family::Hy),
        (0.0..=1.0f64 / 6.0).prop_map(|delta| Family::GenHy { delta }),
        (0.01..=0.66f64).prop_map(|delta| Family::PlGh { delta }),
    ]
}

fn ulp_distance(a: f64, b: f64) -> u64 {
    if a == b {
        return 0;
    }
    let (x, y) = (a.to_bits(), b.to_bits());
    if (a >= 0.0) == (b >= 0.0) {
        x.abs_diff(y)
    } else {
        u64::MAX
    }
}

proptest! {
    /// Frame-aware evaluation agrees with plain affine evaluation of the
    /// located branch to within one ulp.
    #[test]
    fn tile_property(family in family_strategy(), x in 0.0..1.0f64) {
        let sys = build_system(family).unwrap();
        for map in [sys.f0(), sys.f1()] {
            let direct = map.eval_plain(x);
            let framed = map.evaluate(TailPoint::new(x)).value_from_zero();
            prop_assert!(
                ulp_distance(direct, framed) <= 1,
                "x={x}: direct {direct} vs framed {framed}"
            );
        }
    }

    /// On tail cells of depth ≥ 2 the two maps invert each other bit-exactly.
    #[test]
    fn tail_commutation(
        family in family_strategy(),
        depth in 2u32..60,
        frac in 0.001..0.999f64,
        right_side in proptest::bool::ANY,
    ) {
        let sys = build_system(family).unwrap();
        let c = sys.c();
        let idx = if right_side { CellIndex::Right(depth) } else { CellIndex::Left(depth) };
        let p = point_in_cell(idx, c, frac);
        let a = sys.step(Symbol::Zero, sys.step(Symbol::One, p));
        let b = sys.step(Symbol::One, sys.step(Symbol::Zero, p));
        prop_assert_eq!(a, p);
        prop_assert_eq!(b, p);
    }

    /// One step moves a depth ≥ 2 tail point exactly one cell: toward the
    /// core under f₁ on the left and f₀ on the right, one deeper otherwise.
    #[test]
    fn cell_transport(
        family in family_strategy(),
        depth in 2u32..50,
        frac in 0.001..0.999f64,
        right_side in proptest::bool::ANY,
    ) {
        let sys = build_system(family).unwrap();
        let c = sys.c();
        let idx = if right_side { CellIndex::Right(depth) } else { CellIndex::Left(depth) };
        let p = point_in_cell(idx, c, frac);
        prop_assert_eq!(locate_cell(p, c).unwrap(), idx);
        let (toward, away) = if right_side {
            (Symbol::Zero, Symbol::One)
        } else {
            (Symbol::One, Symbol::Zero)
        };
        let shallower = locate_cell(sys.step(toward, p), c).unwrap();
        let deeper = locate_cell(sys.step(away, p), c).unwrap();
        let expect = |n: u32| if right_side { CellIndex::Right(n) } else { CellIndex::Left(n) };
        prop_assert_eq!(shallower, expect(depth - 1));
        prop_assert_eq!(deeper, expect(depth + 1));
    }

    /// `f₁ = σ ∘ f₀ ∘ σ` for the symmetric family, away from breakpoints.
    #[test]
    fn gen_hy_reflection_symmetry(
        delta in 0.0..=1.0f64 / 6.0,
        x in 0.0001..0.9999f64,
    ) {
        let sys = build_system(Family::GenHy { delta }).unwrap();
        let snapped_delta = 0.5 - sys.f1().pieces()[0].hi;
        let near_breakpoint = [0.5 - snapped_delta, 0.5 + snapped_delta, 0.5]
            .iter()
            .any(|b| (x - b).abs() < 1e-9);
        prop_assume!(!near_breakpoint);
        let lhs = sys.f1().eval_plain(x);
        let rhs = 1.0 - sys.f0().eval_plain(1.0 - x);
        prop_assert!((lhs - rhs).abs() < 1e-12, "x={x}: {lhs} vs {rhs}");
    }

    /// The annealed transfer operator preserves total mass.
    #[test]
    fn annealed_push_mass_preservation(
        weights in proptest::collection::vec(0.01..1.0f64, 1..6),
        positions in proptest::collection::vec(0.26..0.74f64, 6),
        densities in proptest::collection::vec(0.0..3.0f64, 16),
    ) {
        let core = skewed_core();
        let atoms: Vec<(f64, f64)> = weights
            .iter()
            .zip(&positions)
            .map(|(&w, &p)| (p, w))
            .collect();
        let m = CoreMeasure::discrete(0.5, atoms).unwrap();
        let pushed = annealed_push(&core, &m).unwrap();
        prop_assert!((pushed.total_mass() - m.total_mass()).abs() < 1e-12);

        let d = CoreMeasure::step_density(0.5, densities).unwrap();
        let pushed = annealed_push(&core, &d).unwrap();
        prop_assert!((pushed.total_mass() - d.total_mass()).abs() < 1e-12);
    }

    /// `μ(Iₙ₊₁^±) = 2ν(I₁^±)` exactly for discrete measures, every level.
    #[test]
    fn extend_mu_level_masses(
        w in 0.05..0.95f64,
        depth in 1usize..40,
    ) {
        let sys = build_system(Family::PlGh { delta: 0.5 }).unwrap();
        let nu = CoreMeasure::discrete(0.5, vec![(0.25, w), (0.5, 1.0 - w)]).unwrap();
        let mu = extend_mu(&nu, depth, &sys).unwrap();
        let (minus, _, plus) = nu.side_masses();
        for n in 1..=depth as u32 {
            prop_assert_eq!(mu.cell_mass(CellIndex::Left(n)).unwrap(), 2.0 * minus);
            prop_assert_eq!(mu.cell_mass(CellIndex::Right(n)).unwrap(), 2.0 * plus);
        }
    }

    /// β and b do not change when the measure is rescaled.
    #[test]
    fn beta_b_scale_invariance(
        wm in 0.05..1.0f64,
        wp in 0.05..1.0f64,
        lambda in 0.01..50.0f64,
    ) {
        let m = CoreMeasure::discrete(0.5, vec![(0.3, wm), (0.6, wp)]).unwrap();
        let scaled =
            CoreMeasure::discrete(0.5, vec![(0.3, wm * lambda), (0.6, wp * lambda)]).unwrap();
        let a = beta_b(&m).unwrap();
        let b = beta_b(&scaled).unwrap();
        prop_assert!((a.beta - b.beta).abs() < 1e-12);
    }
}

fn point_in_cell(idx: CellIndex, c: f64, frac: f64) -> TailPoint<f64> {
    match idx {
        CellIndex::Left(_) => {
            let (lo, hi) = cell_interval(idx, c);
            TailPoint::FromZero(lo + frac * (hi - lo))
        }
        CellIndex::Right(n) => {
            // build in the distance-from-1 frame: w ∈ (c/2ⁿ, c/2ⁿ⁻¹]
            let mut w_hi = c;
            for _ in 1..n {
                w_hi *= 0.5;
            }
            let w_lo = 0.5 * w_hi;
            let w = w_lo + frac.max(1e-6) * (w_hi - w_lo);
            TailPoint::FromOne(if w > w_hi { w_hi } else { w })
        }
        CellIndex::Core => {
            let (lo, hi) = cell_interval(idx, c);
            TailPoint::new(lo + frac * (hi - lo))
        }
    }
}

fn skewed_core() -> Core {
    Core::from_parts(
        0.5,
        vec![(0.25, 0.5, 2.0, -0.25), (0.5, 0.75, 1.0, -0.25)],
        vec![(0.25, 0.5, 2.0, -0.25), (0.5, 0.75, 1.0, -0.25)],
    )
    .unwrap()
}

fn plgh_system() -> (System, Core) {
    let sys = build_system(Family::PlGh { delta: 0.5 }).unwrap();
    let core = sys.core().unwrap();
    (sys, core)
}

/// Lévy distance between two measures' CDFs, evaluated on a probe grid.
fn levy_distance(a: &Measure, b: &Measure, probes: &[f64]) -> f64 {
    let cdf = |m: &Measure, x: f64| m.mass_in(0.0, x);
    let mut lo = 0.0f64;
    let mut hi = 0.5f64;
    for _ in 0..40 {
        let eps = 0.5 * (lo + hi);
        let ok = probes.iter().all(|&x| {
            let fa = cdf(a, x);
            fa <= cdf(b, x + eps) + eps && fa >= cdf(b, x - eps) - eps
        });
        if ok {
            hi = eps;
        } else {
            lo = eps;
        }
    }
    hi
}

#[test]
fn discrete_and_density_pushforwards_agree_in_levy_distance() {
    let core = skewed_core();
    let atoms = vec![(0.3, 0.4), (0.45, 0.25), (0.6, 0.35)];
    let discrete = CoreMeasure::discrete(0.5, atoms.clone()).unwrap();
    let pushed_discrete = annealed_push(&core, &discrete).unwrap();

    let approx_at = |grid: usize| -> Measure {
        let h = 0.5 / grid as f64;
        let mut values = vec![0.0f64; grid];
        for &(p, w) in &atoms {
            let i = (((p - 0.25) / h) as usize).min(grid - 1);
            values[i] += w / h;
        }
        let m = CoreMeasure::step_density(0.5, values).unwrap();
        annealed_push(&core, &m).unwrap()
    };

    let probes: Vec<f64> = (0..=400).map(|k| 0.25 + k as f64 * 0.5 / 400.0).collect();
    let coarse = levy_distance(&pushed_discrete, &approx_at(64), &probes);
    let fine = levy_distance(&pushed_discrete, &approx_at(1024), &probes);
    assert!(fine < coarse, "coarse {coarse} fine {fine}");
    assert!(fine < 0.01, "fine {fine}");
}

#[test]
fn ensembles_do_not_depend_on_worker_count() {
    let (sys, core) = plgh_system();
    let nu = CoreMeasure::discrete(0.5, vec![(0.25, 0.5), (0.5, 0.5)]).unwrap();
    let config = SimulationConfig::new(3_000, 48, 2024, nu);
    let baseline = occupation_ensemble(&sys, &core, &config).unwrap();
    for workers in [1usize, 2, 4] {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .unwrap();
        let run = pool.install(|| occupation_ensemble(&sys, &core, &config).unwrap());
        assert_eq!(run.values, baseline.values, "workers = {workers}");
    }
}

#[test]
fn sub_streams_are_independent() {
    // drawing more or fewer initial samples must not shift the symbol stream
    use arclaw_core::montecarlo::{draw_initial, run_trajectory, stream, StreamPurpose};
    let (sys, _) = plgh_system();
    let nu = CoreMeasure::discrete(0.5, vec![(0.25, 0.5), (0.5, 0.5)]).unwrap();
    let mut init = stream(5, 0, StreamPurpose::Initial);
    let _ = draw_initial(&nu, &mut init).unwrap();
    let _ = draw_initial(&nu, &mut init).unwrap();
    let mut sym_a = stream(5, 0, StreamPurpose::Symbols);
    let a = run_trajectory(&sys, TailPoint::new(0.25), 500, &mut sym_a);
    let mut sym_b = stream(5, 0, StreamPurpose::Symbols);
    let b = run_trajectory(&sys, TailPoint::new(0.25), 500, &mut sym_b);
    assert_eq!(a.occupation_count, b.occupation_count);
    assert_eq!(a.endpoint, b.endpoint);
}

#[test]
fn f32_kernels_share_the_exactness_properties() {
    // the numeric core is scalar-generic; spot-check the f32 instantiation
    let sys = build_system::<f32>(Family::GenHy { delta: 0.125 }).unwrap();
    let core = sys.core().unwrap();
    assert!(core.is_deterministic());
    let y = 7.0f32 / 16.0;
    let z = core.step(Symbol::Zero, y).unwrap();
    assert_eq!(z, 23.0f32 / 32.0);
    assert_eq!(core.step(Symbol::Zero, z).unwrap(), y);
    let p = TailPoint::FromZero(7.0f32 / 64.0);
    let q = sys.step(Symbol::One, sys.step(Symbol::Zero, p));
    assert_eq!(q, p);
}
