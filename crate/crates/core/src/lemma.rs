//! Scalar lemmas behind the gradient bounds, with randomized oracles and
//! sharpness sweeps.
//!
//! * `1 - f(x)^2 <= f'(x) (1 - x^2)` for increasing diffeomorphisms of `[-1, 1]`
//!   with log-concave derivative, probed on random piecewise-exponential `f'`.
//! * The tangent-line quantities `r(k, x)` and `dif(x)` from its proof.
//! * `sin(pi int_v^1 R / 2r) <= (pi / 2r)(1 - |v|) R(v)` for unimodal densities,
//!   and the piecewise family `psi(a, s)` that shows the constant is sharp.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::{HTransform, Metric1D};
use crate::mollifier::OddPiecewiseMap;

/// Grids used by the scalar checks stop this far from `+-1`.
pub const EDGE_GAP: f64 = 1e-4;

/// `n` uniform points on `[-1 + EDGE_GAP, 1 - EDGE_GAP]`.
pub fn lemma_grid(n: usize) -> Vec<f64> {
    let a = 1.0 - EDGE_GAP;
    (0..n).map(|i| -a + 2.0 * a * i as f64 / (n - 1) as f64).collect()
}

/// An increasing diffeomorphism of `[-1, 1]` onto itself.
pub trait Diffeomorphism {
    fn value(&self, x: f64) -> f64;
    fn derivative(&self, x: f64) -> f64;
}

/// A diffeomorphism given by closures for `f` and `f'`.
pub struct FnDiffeo<F, D>(pub F, pub D);

impl<F: Fn(f64) -> f64, D: Fn(f64) -> f64> Diffeomorphism for FnDiffeo<F, D> {
    fn value(&self, x: f64) -> f64 {
        (self.0)(x)
    }
    fn derivative(&self, x: f64) -> f64 {
        (self.1)(x)
    }
}

/// `expm1(y) / y`, continuous at `0`.
fn rel_expm1(y: f64) -> f64 {
    if y.abs() < 1e-300 {
        1.0
    } else {
        y.exp_m1() / y
    }
}

/// `f` with `f' = C exp(h)`, `h` piecewise linear and concave through the knots.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogConcaveDiffeo {
    knots: Vec<(f64, f64)>,
    #[serde(skip)]
    log_scale: f64,
    /// `int_{-1}^{x_i} exp(h)` at each knot.
    #[serde(skip)]
    cumulative: Vec<f64>,
}

impl LogConcaveDiffeo {
    /// Knots `(x_i, h_i)` with `x_0 = -1`, `x_m = 1` and nonincreasing slopes.
    pub fn from_knots(knots: Vec<(f64, f64)>) -> Result<Self> {
        if knots.len() < 2 || knots[0].0 != -1.0 || knots[knots.len() - 1].0 != 1.0 {
            return Err(Error::InvalidInput("knots must run from -1 to 1".into()));
        }
        if knots.windows(2).any(|w| !(w[1].0 > w[0].0)) {
            return Err(Error::InvalidInput("knot abscissae must increase".into()));
        }
        let slopes: Vec<f64> = knots.windows(2).map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0)).collect();
        if slopes.windows(2).any(|s| s[1] > s[0] + 1e-12 * (1.0 + s[0].abs())) {
            return Err(Error::InvalidInput("log-derivative must be concave".into()));
        }
        let mut cumulative = vec![0.0];
        for (w, k) in knots.windows(2).zip(&slopes) {
            let len = w[1].0 - w[0].0;
            let piece = w[0].1.exp() * len * rel_expm1(k * len);
            cumulative.push(cumulative.last().unwrap() + piece);
        }
        let log_scale = (2.0 / cumulative.last().unwrap()).ln();
        Ok(LogConcaveDiffeo { knots, log_scale, cumulative })
    }

    /// The identity map (`h = 0`).
    pub fn identity() -> Self {
        Self::from_knots(vec![(-1.0, 0.0), (1.0, 0.0)]).expect("identity knots are valid")
    }

    pub fn knots(&self) -> &[(f64, f64)] {
        &self.knots
    }

    fn locate(&self, x: f64) -> usize {
        self.knots.partition_point(|k| k.0 <= x).clamp(1, self.knots.len() - 1) - 1
    }

    fn slope(&self, i: usize) -> f64 {
        let (a, b) = (self.knots[i], self.knots[i + 1]);
        (b.1 - a.1) / (b.0 - a.0)
    }

    /// `h(x) = log f'(x)` up to the normalization constant.
    fn log_weight(&self, x: f64) -> f64 {
        let i = self.locate(x);
        self.knots[i].1 + self.slope(i) * (x - self.knots[i].0)
    }
}

impl Diffeomorphism for LogConcaveDiffeo {
    fn value(&self, x: f64) -> f64 {
        let i = self.locate(x);
        let k = self.slope(i);
        let scale = self.log_scale.exp();
        if x <= 0.0 {
            let len = x - self.knots[i].0;
            let partial = self.knots[i].1.exp() * len * rel_expm1(k * len);
            -1.0 + scale * (self.cumulative[i] + partial)
        } else {
            // integrate down from 1 so that 1 - f keeps full relative precision
            let len = self.knots[i + 1].0 - x;
            let partial = self.log_weight(x).exp() * len * rel_expm1(k * len);
            let tail = self.cumulative.last().unwrap() - self.cumulative[i + 1];
            1.0 - scale * (tail + partial)
        }
    }

    fn derivative(&self, x: f64) -> f64 {
        (self.log_scale + self.log_weight(x)).exp()
    }
}

/// A reproducible random log-concave diffeomorphism with `knot_count` knots:
/// interior abscissae uniform on `(-1, 1)`, slopes drawn uniformly on `[-5, 5]`
/// and sorted decreasingly.
pub fn generate_logconcave(seed: u64, knot_count: usize) -> Result<LogConcaveDiffeo> {
    if knot_count < 2 {
        return Err(Error::InvalidInput("knot_count must be at least 2".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut xs: Vec<f64> = (0..knot_count - 2).map(|_| rng.gen_range(-1.0..1.0)).collect();
    xs.sort_by(f64::total_cmp);
    xs.insert(0, -1.0);
    xs.push(1.0);
    let mut slopes: Vec<f64> = (0..knot_count - 1).map(|_| rng.gen_range(-5.0..=5.0)).collect();
    slopes.sort_by(|a, b| b.total_cmp(a));
    let mut knots = vec![(-1.0, 0.0)];
    for (w, k) in xs.windows(2).zip(&slopes) {
        let h = knots.last().unwrap().1 + k * (w[1] - w[0]);
        knots.push((w[1], h));
    }
    LogConcaveDiffeo::from_knots(knots)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SlackSummary {
    pub min_slack: f64,
    pub argmin: f64,
    pub max_slack: f64,
    /// Every slack lies within the equality band.
    pub equality_everywhere: bool,
}

/// `min_x f'(x)(1 - x^2) - (1 - f(x)^2)` over `grid`.
pub fn propi1_slack<D: Diffeomorphism + ?Sized>(diffeo: &D, grid: &[f64]) -> SlackSummary {
    let mut s = SlackSummary { min_slack: f64::INFINITY, argmin: f64::NAN, max_slack: f64::NEG_INFINITY, equality_everywhere: true };
    for &x in grid {
        let f = diffeo.value(x);
        let slack = diffeo.derivative(x) * (1.0 - x * x) - (1.0 - f * f);
        if slack < s.min_slack {
            s.min_slack = slack;
            s.argmin = x;
        }
        s.max_slack = s.max_slack.max(slack);
        s.equality_everywhere &= slack.abs() <= 1e-9;
    }
    s
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleFailure {
    pub seed: u64,
    pub knot_count: usize,
    pub knots: Vec<(f64, f64)>,
    pub x: f64,
    pub slack: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleSummary {
    pub trials: usize,
    pub grid_points: usize,
    pub min_slack: f64,
    pub worst_seed: u64,
    pub failures: Vec<OracleFailure>,
}

/// Knot count used for the `i`-th oracle trial.
pub fn oracle_knot_count(i: u64) -> usize {
    2 + (i % 7) as usize
}

/// Runs the log-concave lemma on `trials` generated diffeomorphisms with seeds
/// `seed, seed + 1, ...`; slacks below `-tolerance` are failures.
pub fn propi1_oracle(trials: usize, seed: u64, grid_points: usize, tolerance: f64) -> Result<OracleSummary> {
    let grid = lemma_grid(grid_points);
    let results: Vec<(u64, usize, LogConcaveDiffeo, SlackSummary)> = (0..trials as u64)
        .into_par_iter()
        .map(|i| {
            let s = seed.wrapping_add(i);
            let kc = oracle_knot_count(i);
            let d = generate_logconcave(s, kc)?;
            let summary = propi1_slack(&d, &grid);
            Ok((s, kc, d, summary))
        })
        .collect::<Result<_>>()?;
    let mut out = OracleSummary { trials, grid_points, min_slack: f64::INFINITY, worst_seed: seed, failures: Vec::new() };
    for (s, kc, d, summary) in results {
        if summary.min_slack < out.min_slack {
            out.min_slack = summary.min_slack;
            out.worst_seed = s;
        }
        if summary.min_slack < -tolerance {
            out.failures.push(OracleFailure { seed: s, knot_count: kc, knots: d.knots.clone(), x: summary.argmin, slack: summary.min_slack });
        }
    }
    Ok(out)
}

/// `r(k, x) = 2 (cosh k - cosh kx) csch k / (k (1 - x^2))`.
///
/// Evaluated as `2 (1 - e^{-2a})(1 - e^{-2b}) / (k (1 - x^2)(1 - e^{-2k}))` with
/// `a = k(1+x)/2`, `b = k(1-x)/2` for `k > 0`, which is free of cancellation for
/// small `k` and of overflow for large `k`.
pub fn r_ratio(k: f64, x: f64) -> Result<f64> {
    if k == 0.0 || !k.is_finite() {
        return Err(Error::ParameterOutOfRange(format!("r(k, x) needs a finite nonzero k, got {k}")));
    }
    if !(x.abs() < 1.0) {
        return Err(Error::ParameterOutOfRange(format!("r(k, x) needs |x| < 1, got {x}")));
    }
    Ok(dif_core(k.abs(), x) / (1.0 - x * x))
}

/// `(1 - x^2) r(k, x)` for `k > 0`, `x` in `[-1, 1]`.
fn dif_core(k: f64, x: f64) -> f64 {
    let a = 0.5 * k * (1.0 + x);
    let b = 0.5 * k * (1.0 - x);
    2.0 * (-(-2.0 * a).exp_m1()) * (-(-2.0 * b).exp_m1()) / (k * (-(-2.0 * k).exp_m1()))
}

/// `dif(x) = (1 - x^2) r(k, x) - (1 - x^2)`.
pub fn dif(k: f64, x: f64) -> f64 {
    dif_core(k.abs(), x) - (1.0 - x * x)
}

/// `sinh(k x) / sinh(k)` for `k > 0`.
fn sinh_ratio(k: f64, x: f64) -> f64 {
    (k * (x - 1.0)).exp() * (-(-2.0 * k * x).exp_m1()) / (-(-2.0 * k).exp_m1())
}

/// `dif'''(x) = -2 k^2 csch(k) sinh(k x)`.
pub fn dif_third(k: f64, x: f64) -> f64 {
    -2.0 * k * k * sinh_ratio(k, x)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DifDiagnostics {
    pub k: f64,
    pub max_dif: f64,
    pub max_dif_third: f64,
    pub dif_at_one: f64,
    /// Finite-difference estimates of `dif'(0)` and `dif'(1)`.
    pub dif_prime_at_zero: f64,
    pub dif_prime_at_one: f64,
}

pub fn dif_diagnostics(k: f64, grid: &[f64]) -> Result<DifDiagnostics> {
    if !(k > 0.0) {
        return Err(Error::ParameterOutOfRange(format!("dif diagnostics need k > 0, got {k}")));
    }
    if grid.iter().any(|x| !(0.0..=1.0).contains(x)) {
        return Err(Error::InvalidInput("dif grid must lie in [0, 1]".into()));
    }
    let h = 1e-5;
    let d = |x: f64| dif(k, x);
    Ok(DifDiagnostics {
        k,
        max_dif: grid.iter().map(|&x| d(x)).fold(f64::NEG_INFINITY, f64::max),
        max_dif_third: grid.iter().map(|&x| dif_third(k, x)).fold(f64::NEG_INFINITY, f64::max),
        dif_at_one: d(1.0),
        dif_prime_at_zero: (d(h) - d(-h)) / (2.0 * h),
        dif_prime_at_one: (3.0 * d(1.0) - 4.0 * d(1.0 - h) + d(1.0 - 2.0 * h)) / (2.0 * h),
    })
}

/// The concave sharpness map on `[0, 1]`:
/// `(1 + 2as - as^2) x - a x^2` on `[0, s)`, `1 + (1 - as^2)(x - 1)` on `[s, 1]`,
/// extended oddly to `[-1, 0]`.
pub fn psi_family(a: f64, s: f64) -> Result<OddPiecewiseMap> {
    let u = a * s * s;
    if !(a > 0.0 && s > 0.0 && s < 1.0 && u > 0.0 && u < 1.0) {
        return Err(Error::ParameterOutOfRange(format!("psi family needs a > 0, s and a s^2 in (0, 1); got a={a}, s={s}")));
    }
    OddPiecewiseMap::new(vec![0.0, s, 1.0], vec![[0.0, 1.0 + 2.0 * a * s - u, -a], [u, 1.0 - u, 0.0]])
}

/// `cos(phi(s)) / ((1 - s^2) phi'(s))` for `phi = (pi/2) psi(a, s)`, i.e.
/// `2 sin((pi/2)(1 - s)(1 - u)) / (pi (1 - s^2)(1 - u))` with `u = a s^2`.
pub fn sharpness_ratio(a: f64, s: f64) -> Result<f64> {
    let u = a * s * s;
    if !(a > 0.0 && s > 0.0 && s < 1.0 && u < 1.0) {
        return Err(Error::ParameterOutOfRange(format!("sharpness ratio needs a > 0, s in (0, 1), a s^2 < 1; got a={a}, s={s}")));
    }
    Ok(2.0 * (FRAC_PI_2 * (1.0 - s) * (1.0 - u)).sin() / (PI * (1.0 - s * s) * (1.0 - u)))
}

/// One row of an extremal sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub parameters: BTreeMap<String, f64>,
    pub ratio: f64,
}

/// The sharpness ratio along `s = 1/n`, `u = ((n-1)/n)^2` for `n = 2..=n_max`.
pub fn sharpness_sweep(n_max: usize) -> Result<Vec<SweepRecord>> {
    (2..=n_max)
        .map(|n| {
            let nf = n as f64;
            let s = 1.0 / nf;
            let u = ((nf - 1.0) / nf).powi(2);
            let a = (nf - 1.0) * (nf - 1.0);
            let ratio = sharpness_ratio(a, s)?;
            let parameters = BTreeMap::from([("n".to_string(), nf), ("s".to_string(), s), ("u".to_string(), u)]);
            Ok(SweepRecord { parameters, ratio })
        })
        .collect()
}

/// `r(k, x)` on the product of `k_count` values in `(0, k_max]` and `x_count`
/// values in `[0, x_max]`.
pub fn r_ratio_sweep(k_max: f64, k_count: usize, x_max: f64, x_count: usize) -> Result<Vec<SweepRecord>> {
    let mut out = Vec::with_capacity(k_count * x_count);
    for i in 1..=k_count {
        let k = k_max * i as f64 / k_count as f64;
        for j in 0..x_count {
            let x = x_max * j as f64 / (x_count - 1) as f64;
            let parameters = BTreeMap::from([("k".to_string(), k), ("x".to_string(), x)]);
            out.push(SweepRecord { parameters, ratio: r_ratio(k, x)? });
        }
    }
    Ok(out)
}

/// Evaluates the unimodal-metric inequality for one density.
#[derive(Debug, Clone)]
pub struct LemaProbe {
    transform: HTransform,
}

impl LemaProbe {
    pub fn new(metric: &Metric1D) -> Result<Self> {
        if !metric.is_unimodal(2001) {
            return Err(Error::PreconditionViolated(format!(
                "{} is not increasing on (-1, 0) and decreasing on (0, 1)",
                metric.name()
            )));
        }
        Ok(LemaProbe { transform: HTransform::new(metric)? })
    }

    pub fn mass(&self) -> f64 {
        self.transform.mass()
    }

    /// `(pi / 2r)(1 - |v|) R(v) - sin(pi int_v^1 R / (2r))`.
    pub fn slack(&self, v: f64) -> Result<f64> {
        let r = self.transform.mass();
        let density = self.transform.metric().density(v)?;
        let upper = r - self.transform.eval(v)?;
        Ok(PI / (2.0 * r) * (1.0 - v.abs()) * density - (PI * upper / (2.0 * r)).sin())
    }
}

pub fn lema_slack(metric: &Metric1D, v: f64) -> Result<f64> {
    LemaProbe::new(metric)?.slack(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_is_an_equality_case() {
        let s = propi1_slack(&LogConcaveDiffeo::identity(), &lemma_grid(2001));
        assert!(s.equality_everywhere);
        assert!(s.min_slack.abs() < 1e-15);
    }

    #[test]
    fn sine_diffeo_slack_at_origin() {
        let d = FnDiffeo(|x: f64| (FRAC_PI_2 * x).sin(), |x: f64| FRAC_PI_2 * (FRAC_PI_2 * x).cos());
        let at_zero = propi1_slack(&d, &[0.0]);
        assert!((at_zero.min_slack - (FRAC_PI_2 - 1.0)).abs() < 1e-15);
        assert!(propi1_slack(&d, &lemma_grid(20001)).min_slack >= 0.0);
    }

    #[test]
    fn generated_diffeos_are_normalized_and_deterministic() {
        for seed in 0..50 {
            let d = generate_logconcave(seed, 2 + (seed as usize % 6)).unwrap();
            assert!((d.value(1.0) - 1.0).abs() < 1e-10);
            assert!((d.value(-1.0) + 1.0).abs() < 1e-10);
            let g = lemma_grid(201);
            assert!(g.windows(2).all(|w| d.value(w[1]) > d.value(w[0])));
        }
        assert_eq!(generate_logconcave(7, 5).unwrap(), generate_logconcave(7, 5).unwrap());
        let two = generate_logconcave(1, 2).unwrap();
        assert_eq!(two.knots().len(), 2);
        assert!(generate_logconcave(1, 1).is_err());
    }

    #[test]
    fn two_knot_diffeo_matches_exponential_closed_form() {
        let d = generate_logconcave(1, 2).unwrap();
        let (x0, x1) = (d.knots()[0], d.knots()[1]);
        let k = (x1.1 - x0.1) / (x1.0 - x0.0);
        // f' = k e^{kx} / sinh k, f = (e^{kx} - cosh k) / sinh k
        for &x in &[-0.8, 0.1, 0.95] {
            let f = ((k * x).exp() - k.cosh()) / k.sinh();
            assert!((d.value(x) - f).abs() < 1e-13);
            assert!((d.derivative(x) - k * (k * x).exp() / k.sinh()).abs() < 1e-12);
        }
    }

    #[test]
    fn value_is_the_integral_of_the_derivative() {
        let d = generate_logconcave(99, 6).unwrap();
        let v = crate::scalar::integrate(&|t| d.derivative(t), -1.0, 0.37, 1e-13);
        assert!((d.value(0.37) - (-1.0 + v)).abs() < 1e-11);
    }

    #[test]
    fn rejects_convex_log_derivative() {
        assert!(LogConcaveDiffeo::from_knots(vec![(-1.0, 0.0), (0.0, -1.0), (1.0, 0.5)]).is_err());
    }

    #[test]
    fn r_ratio_examples() {
        assert!((r_ratio(2.0, 0.0).unwrap() - 1f64.tanh()).abs() < 1e-15);
        for &x in &[0.0, 0.5, 0.9] {
            assert!((r_ratio(1e-4, x).unwrap() - 1.0).abs() < 1e-6);
        }
        assert!(r_ratio(0.0, 0.3).is_err());
        assert!(r_ratio(1.0, 1.0).is_err());
    }

    #[test]
    fn r_ratio_matches_hyperbolic_definition() {
        let direct = |k: f64, x: f64| 2.0 * (k.cosh() - (k * x).cosh()) / (k.sinh() * k * (1.0 - x * x));
        for &k in &[0.5, 3.0, -7.0, 15.0] {
            for &x in &[-0.7, 0.0, 0.33, 0.99] {
                let a = r_ratio(k, x).unwrap();
                assert!((a - direct(k, x)).abs() < 1e-12 * a.abs().max(1.0), "k={k} x={x}");
            }
        }
    }

    #[test]
    fn dif_anchor_values() {
        assert_eq!(dif(1.0, 1.0), 0.0);
        let expected = 2.0 * (3f64.cosh() - 1.0) / (3f64.sinh() * 3.0) - 1.0;
        assert!((dif(3.0, 0.0) - expected).abs() < 1e-15);
        assert!((expected + 0.396_56).abs() < 1e-5);
        let d = dif_diagnostics(2.5, &[0.0, 0.25, 0.5, 1.0]).unwrap();
        assert!(d.max_dif <= 0.0 && d.max_dif_third <= 0.0);
        assert!(d.dif_prime_at_zero.abs() < 1e-8 && d.dif_prime_at_one.abs() < 1e-8);
    }

    #[test]
    fn dif_third_matches_differences() {
        let k = 4.0;
        let h = 1e-3;
        for &x in &[0.2, 0.6] {
            let fd = (dif(k, x + 2.0 * h) - 2.0 * dif(k, x + h) + 2.0 * dif(k, x - h) - dif(k, x - 2.0 * h)) / (2.0 * h * h * h);
            assert!((fd - dif_third(k, x)).abs() < 1e-4 * dif_third(k, x).abs().max(1.0));
        }
    }

    #[test]
    fn psi_family_shape() {
        let psi = psi_family(81.0, 0.1).unwrap();
        assert!((psi.value(1.0) - 1.0).abs() < 1e-15);
        assert_eq!(psi.value(0.0), 0.0);
        assert!((psi.value(-0.3) + psi.value(0.3)).abs() < 1e-15);
        // branches agree at x = s
        let (a, s) = (81.0f64, 0.1f64);
        let left = (1.0 + 2.0 * a * s - a * s * s) * s - a * s * s;
        let right = 1.0 + (1.0 - a * s * s) * (s - 1.0);
        assert!((left - right).abs() < 1e-12);
        assert!((psi.value(s) - right).abs() < 1e-12);
        let tiny = psi_family(1e-9, 0.5).unwrap();
        assert!((0..=10).all(|i| (tiny.value(i as f64 / 10.0) - i as f64 / 10.0).abs() < 1e-8));
        assert!(psi_family(200.0, 0.1).is_err());
        assert!(psi_family(1.0, 1.0).is_err());
    }

    #[test]
    fn sharpness_ratio_examples() {
        // n = 10: s = 0.1, u = 0.81
        let x = FRAC_PI_2 * 0.9 * 0.19;
        let expected = x.sin() / x / 1.1;
        let v = sharpness_ratio(81.0, 0.1).unwrap();
        assert!((v - expected).abs() < 1e-15);
        assert!((v - 0.898_199).abs() < 1e-6);
        let n = 1000.0f64;
        assert!(sharpness_ratio((n - 1.0) * (n - 1.0), 1.0 / n).unwrap() > 0.99);
        let limit = 2.0 * (FRAC_PI_2 * 0.5).sin() / (PI * 0.75);
        assert!((sharpness_ratio(1e-12, 0.5).unwrap() - limit).abs() < 1e-10);
        assert!((limit - 0.600_2).abs() < 1e-4);
        assert!(sharpness_ratio(4.0, 0.5).is_err());
    }

    #[test]
    fn sharpness_ratio_equals_cos_phi_over_phi_prime() {
        for &(a, s) in &[(81.0, 0.1), (2.0, 0.5), (10.0, 0.2)] {
            let psi = psi_family(a, s).unwrap();
            let phi = FRAC_PI_2 * psi.value(s);
            let dphi = FRAC_PI_2 * psi.derivative(s);
            let direct = phi.cos() / ((1.0 - s * s) * dphi);
            assert!((direct - sharpness_ratio(a, s).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn lema_examples() {
        let one = Metric1D::constant();
        assert!((lema_slack(&one, 0.0).unwrap() - (FRAC_PI_2 - 1.0)).abs() < 1e-12);
        assert!(lema_slack(&one, 0.999_999).unwrap().abs() < 1e-5);
        assert!(matches!(lema_slack(&Metric1D::exponential(1.0), 0.0), Err(Error::PreconditionViolated(_))));
    }
}
