use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use schwarz_core::bounds::{check_main_bound, chen_rhs, ring_grid, schwarz_quotient};
use schwarz_core::harmonic::{Precomposed, RHarmonicField};
use schwarz_core::lemma::{generate_logconcave, lemma_grid, propi1_slack, r_ratio, LemaProbe};
use schwarz_core::metric::interior_grid;
use schwarz_core::{hyperbolic_distance, BoundaryData, HTransform, HarmonicField, Metric1D, Mobius, PoissonExtension, Tolerances};

const SAMPLES: usize = 1024;

/// Families with finite mass and non-negative curvature.
fn positive_family() -> impl Strategy<Value = Metric1D> {
    prop_oneof![
        Just(Metric1D::constant()),
        Just(Metric1D::cosine()),
        (-3.0..3.0f64).prop_map(Metric1D::exponential),
        (0.0..3.0f64).prop_map(Metric1D::gaussian),
        (0.05..2.0f64).prop_map(|d| Metric1D::parabolic(d).unwrap()),
    ]
}

fn disk_point(max_radius: f64) -> impl Strategy<Value = Complex64> {
    (0.0..1.0f64, 0.0..TAU).prop_map(move |(r, t)| Complex64::from_polar(max_radius * r.sqrt(), t))
}

fn smooth(seed: u64) -> BoundaryData {
    BoundaryData::random_smooth(seed, SAMPLES).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn h_is_strictly_increasing_and_inverts(metric in positive_family(), a in -0.999..0.999f64, b in -0.999..0.999f64) {
        prop_assume!((a - b).abs() > 1e-9);
        let h = HTransform::new(&metric).unwrap();
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assert!(h.eval(lo).unwrap() < h.eval(hi).unwrap());
        let t = h.eval(a).unwrap();
        prop_assert!(t.abs() < h.mass());
        prop_assert!((h.inverse(t).unwrap() - a).abs() < 1e-9);
    }

    #[test]
    fn analytic_and_numeric_curvature_agree(metric in positive_family()) {
        for u in interior_grid(&metric, 99) {
            // the numeric path divides second differences of log R by R^2
            let exact = metric.curvature_at(u).unwrap();
            let err = (exact - metric.curvature_numeric(u).unwrap()).abs();
            let scale = exact.abs().max(metric.density(u).unwrap().powi(-2)).max(1.0);
            prop_assert!(err < 1e-6 * scale, "{} at {u}", metric.name());
            prop_assert!(exact >= -1e-12);
        }
    }

    #[test]
    fn r_ratio_is_even_in_both_arguments(k in 1e-3..25.0f64, x in 0.0..0.999f64) {
        let r = r_ratio(k, x).unwrap();
        prop_assert!((r_ratio(-k, x).unwrap() - r).abs() < 1e-12);
        prop_assert!((r_ratio(k, -x).unwrap() - r).abs() < 1e-12);
        prop_assert!(r <= 1.0 + 1e-9);
    }

    #[test]
    fn distance_is_mobius_invariant(seed in any::<u64>(), z in disk_point(0.9), w in disk_point(0.9)) {
        let t = Mobius::random(&mut ChaCha8Rng::seed_from_u64(seed), 0.8);
        let before = hyperbolic_distance(z, w).unwrap();
        let after = hyperbolic_distance(t.apply(z), t.apply(w)).unwrap();
        prop_assert!((before - after).abs() < 1e-9 * (1.0 + before));
    }

    #[test]
    fn harmonic_extension_obeys_maximum_principle(seed in 0..1000u64, z in disk_point(0.99)) {
        let b = smooth(seed);
        let samples = b.samples();
        let (lo, hi) = samples.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| (l.min(v), h.max(v)));
        let g = PoissonExtension::new(&b).value(z).unwrap();
        prop_assert!(g >= lo - 1e-12 && g <= hi + 1e-12);
    }

    #[test]
    fn extension_at_origin_is_the_sample_mean(seed in 0..1000u64) {
        let b = smooth(seed);
        let samples = b.samples();
        let mean = samples.iter().sum::<f64>() / samples.len() as f64;
        prop_assert!((PoissonExtension::new(&b).value(Complex64::new(0.0, 0.0)).unwrap() - mean).abs() < 1e-10);
    }

    #[test]
    fn even_data_gives_conjugation_symmetric_extension(c1 in -0.4..0.4f64, c2 in -0.3..0.3f64, z in disk_point(0.95)) {
        let b = BoundaryData::from_fn(|t| c1 * t.cos() + c2 * (2.0 * t).cos() + 0.2 * (3.0 * t).cos(), SAMPLES).unwrap();
        let g = PoissonExtension::new(&b);
        prop_assert!((g.value(z).unwrap() - g.value(z.conj()).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn kernel_gradient_matches_central_differences(seed in 0..1000u64, z in disk_point(0.9)) {
        let g = PoissonExtension::new(&smooth(seed));
        let h = 1e-5;
        let dx = (g.value(z + h).unwrap() - g.value(z - h).unwrap()) / (2.0 * h);
        let dy = (g.value(z + Complex64::new(0.0, h)).unwrap() - g.value(z - Complex64::new(0.0, h)).unwrap()) / (2.0 * h);
        let grad = g.gradient(z).unwrap();
        prop_assert!((grad.re - dx).abs() < 1e-6 && (grad.im - dy).abs() < 1e-6, "{grad} vs {dx} {dy}");
    }

    #[test]
    fn euclidean_gradient_stays_below_chen_bound(seed in 0..1000u64, z in disk_point(0.95)) {
        let g = PoissonExtension::new(&smooth(seed));
        let slack = chen_rhs(g.value(z).unwrap(), z).unwrap() - g.gradient(z).unwrap().norm();
        prop_assert!(slack >= -1e-9);
    }

    #[test]
    fn generated_diffeomorphisms_satisfy_the_lemma(seed in any::<u64>(), knots in 2usize..9) {
        let d = generate_logconcave(seed, knots).unwrap();
        prop_assert!(propi1_slack(&d, &lemma_grid(2001)).min_slack >= -1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn quotient_commutes_with_disk_automorphisms(metric in positive_family(), seed in 0..1000u64, z in disk_point(0.5)) {
        let f = RHarmonicField::new(&metric, &smooth(seed)).unwrap();
        let t = Mobius::random(&mut ChaCha8Rng::seed_from_u64(seed), 0.5);
        let moved = Precomposed { inner: f.clone(), map: t };
        let lhs = schwarz_quotient(&moved, z).unwrap();
        let rhs = schwarz_quotient(&f, t.apply(z)).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-6, "{lhs} vs {rhs}");
    }

    #[test]
    fn quotient_never_exceeds_four_over_pi(metric in positive_family(), seed in 0..1000u64) {
        let f = RHarmonicField::new(&metric, &smooth(seed)).unwrap();
        let grid = ring_grid(12, 48, 0.95);
        let max = grid.iter().map(|&z| schwarz_quotient(&f, z).unwrap()).fold(0.0, f64::max);
        prop_assert!(max <= 4.0 / PI + 1e-6, "{max}");
        prop_assert!(check_main_bound(&metric, &smooth(seed), &grid, &Tolerances::default()).unwrap().passed);
    }

    #[test]
    fn r_harmonic_solution_solves_the_equation(metric in positive_family(), seed in 0..1000u64, z in disk_point(0.8)) {
        let f = RHarmonicField::new(&metric, &smooth(seed)).unwrap();
        let residual = schwarz_core::harmonic::pde_residual(&metric, &f, z, 1e-3).unwrap();
        let scale = f.gradient(z).unwrap().norm_sqr().max(1.0);
        prop_assert!(residual.abs() < 1e-4 * scale, "{residual}");
    }

    #[test]
    fn smoothed_sharpness_family_satisfies_the_unimodal_lemma(n in 2u32..12, eps in 0.005..0.05f64) {
        let nf = n as f64;
        let metric = Metric1D::mollified_psi((nf - 1.0) * (nf - 1.0), 1.0 / nf, eps).unwrap();
        let probe = LemaProbe::new(&metric).unwrap();
        for v in lemma_grid(501) {
            prop_assert!(probe.slack(v).unwrap() >= -1e-9);
        }
    }
}
