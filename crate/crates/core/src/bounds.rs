//! Gradient and distance bounds for R-harmonic functions, evaluated pointwise and
//! collected into reports.
//!
//! Slack is always `rhs - lhs`; a report passes when its smallest slack is at
//! least `-tolerance`.

use std::f64::consts::{FRAC_2_PI, PI};
use std::fmt::Write as _;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::Tolerances;
use crate::disk::{check_inside, hyperbolic_distance, interval_distance};
use crate::error::{Error, Result};
use crate::harmonic::{BoundaryData, HarmonicField, RHarmonicField};
use crate::metric::{interior_grid, log_concavity_report, HTransform, Metric1D};

const FOUR_OVER_PI: f64 = 2.0 * FRAC_2_PI;
/// Samples used to test unimodality and curvature sign of a metric.
const SHAPE_SAMPLES: usize = 999;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundPoint {
    pub z: Complex64,
    /// Second point of a pair, for two-point bounds.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub w: Option<Complex64>,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
}

impl BoundPoint {
    pub fn new(z: Complex64, lhs: f64, rhs: f64) -> Self {
        BoundPoint { z, w: None, lhs, rhs, slack: rhs - lhs }
    }
}

/// Smallest slack of one inequality in a chain of estimates.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinkSummary {
    pub name: String,
    pub min_slack: f64,
    pub worst_point: Complex64,
}

/// The intermediate estimates between `|∇f|` and the final bound, all in units
/// of `|∇f|`:
///
/// `|∇f| <= (4/pi) cos(pi phi / 2) / (phi' (1 - |z|^2))`
/// `     <= (4/pi) (1 - phi^2) / (phi' (1 - |z|^2))`
/// `     <= (4/pi) (1 - f^2) / (1 - |z|^2)`
///
/// where `phi = H(f) / r` is the normalized transform, harmonic with values in `(-1, 1)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainReport {
    pub links: Vec<LinkSummary>,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub bound_name: String,
    pub points: Vec<BoundPoint>,
    pub min_slack: f64,
    pub worst_point: Complex64,
    pub passed: bool,
    pub tolerance: f64,
    /// False when the hypotheses of the bound are not met; the points are still
    /// evaluated but a negative slack is not a failure.
    pub applicable: bool,
    pub warnings: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chain: Option<ChainReport>,
}

impl BoundReport {
    pub fn from_points(bound_name: impl Into<String>, points: Vec<BoundPoint>, tolerance: f64) -> Result<Self> {
        let worst = points
            .iter()
            .min_by(|a, b| a.slack.total_cmp(&b.slack))
            .ok_or_else(|| Error::InvalidInput("a bound report needs at least one point".into()))?;
        let (min_slack, worst_point) = (worst.slack, worst.z);
        Ok(BoundReport {
            bound_name: bound_name.into(),
            points,
            min_slack,
            worst_point,
            passed: min_slack >= -tolerance,
            tolerance,
            applicable: true,
            warnings: Vec::new(),
            chain: None,
        })
    }

    /// Whether the report represents a violated bound whose hypotheses hold.
    pub fn is_failure(&self) -> bool {
        self.applicable && !self.passed
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Rows `z_re,z_im,lhs,rhs,slack`, with `w_re,w_im` appended for pair reports.
    pub fn to_csv(&self) -> String {
        let pairs = self.points.iter().any(|p| p.w.is_some());
        let mut out = String::from(if pairs { "z_re,z_im,lhs,rhs,slack,w_re,w_im\n" } else { "z_re,z_im,lhs,rhs,slack\n" });
        for p in &self.points {
            write!(out, "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}", p.z.re, p.z.im, p.lhs, p.rhs, p.slack).unwrap();
            if pairs {
                let w = p.w.unwrap_or(p.z);
                write!(out, ",{:.16e},{:.16e}", w.re, w.im).unwrap();
            }
            out.push('\n');
        }
        out
    }
}

/// The origin followed by `angles` points on each of `radii - 1` circles with
/// radii spaced evenly in `(0, radius]`.
pub fn ring_grid(radii: usize, angles: usize, radius: f64) -> Vec<Complex64> {
    let mut grid = vec![Complex64::new(0.0, 0.0)];
    for i in 1..radii {
        let r = radius * i as f64 / (radii - 1) as f64;
        grid.extend((0..angles).map(|j| Complex64::from_polar(r, 2.0 * PI * j as f64 / angles as f64)));
    }
    grid
}

/// 24 radii by 96 angles up to radius 0.95.
pub fn default_grid() -> Vec<Complex64> {
    ring_grid(24, 96, 0.95)
}

/// `samples` points on the segment from 0 (excluded) to `radius e^{i angle}`.
pub fn radial_grid(angle: f64, samples: usize, radius: f64) -> Vec<Complex64> {
    (1..=samples).map(|i| Complex64::from_polar(radius * i as f64 / samples as f64, angle)).collect()
}

/// Pairs of points drawn uniformly from the disk of the given radius.
pub fn random_pairs(seed: u64, count: usize, radius: f64) -> Vec<(Complex64, Complex64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut point = || Complex64::from_polar(radius * rng.gen::<f64>().sqrt(), rng.gen_range(0.0..2.0 * PI));
    (0..count).map(|_| (point(), point())).collect()
}

fn value_in_interval<F: HarmonicField + ?Sized>(field: &F, z: Complex64) -> Result<f64> {
    let f = field.value(z)?;
    if !(f.abs() < 1.0) {
        return Err(Error::Domain { value: f, lo: -1.0, hi: 1.0 });
    }
    Ok(f)
}

/// `|∇f(z)| (1 - |z|^2) / (1 - f(z)^2)`.
pub fn schwarz_quotient<F: HarmonicField + ?Sized>(field: &F, z: Complex64) -> Result<f64> {
    check_inside(z)?;
    let f = value_in_interval(field, z)?;
    Ok(field.gradient(z)?.norm() * (1.0 - z.norm_sqr()) / (1.0 - f * f))
}

/// `(4/pi) cos(pi g / 2) / (1 - |z|^2)`, the sharp gradient bound for a harmonic
/// `g` with values in `(-1, 1)`.
pub fn chen_rhs(g: f64, z: Complex64) -> Result<f64> {
    check_inside(z)?;
    if !(g.abs() < 1.0) {
        return Err(Error::Domain { value: g, lo: -1.0, hi: 1.0 });
    }
    Ok(FOUR_OVER_PI * (0.5 * PI * g).cos() / (1.0 - z.norm_sqr()))
}

/// `min_b (1 - b^2) - cos(pi b / 2)` over the samples.
pub fn cos_quadratic_majorant_check(samples: &[f64]) -> Result<f64> {
    let mut min = f64::INFINITY;
    for &b in samples {
        if !(0.0..=1.0).contains(&b) {
            return Err(Error::Domain { value: b, lo: 0.0, hi: 1.0 });
        }
        min = min.min((1.0 - b * b) - (0.5 * PI * b).cos());
    }
    Ok(min)
}

fn curvature_warning(metric: &Metric1D) -> Result<Option<String>> {
    let report = log_concavity_report(metric, &interior_grid(metric, SHAPE_SAMPLES))?;
    Ok((!report.is_nonnegative).then(|| {
        format!(
            "metric {} has negative curvature (min {:.6e} at u = {:.6}); the 4/pi bound is not guaranteed",
            metric.name(),
            report.min_curvature,
            report.argmin
        )
    }))
}

fn summarize(name: &str, rows: &[(Complex64, f64)]) -> LinkSummary {
    let (worst_point, min_slack) = rows.iter().copied().min_by(|a, b| a.1.total_cmp(&b.1)).unwrap_or_default();
    LinkSummary { name: name.into(), min_slack, worst_point }
}

/// Checks `|∇f| <= (4/pi)(1 - f^2)/(1 - |z|^2)` for the R-harmonic extension of
/// `boundary`, together with the intermediate chain when `R` is integrable.
pub fn check_main_bound(metric: &Metric1D, boundary: &BoundaryData, grid: &[Complex64], tol: &Tolerances) -> Result<BoundReport> {
    let field = RHarmonicField::with_tolerances(metric, boundary, tol)?;
    check_main_bound_for(&field, grid, tol)
}

pub fn check_main_bound_for(field: &RHarmonicField, grid: &[Complex64], tol: &Tolerances) -> Result<BoundReport> {
    let metric = field.primitive().metric();
    let transform = HTransform::from_primitive(field.primitive().clone());
    let rows: Vec<(BoundPoint, Option<[f64; 3]>)> = grid
        .par_iter()
        .map(|&z| {
            check_inside(z)?;
            let f = value_in_interval(field, z)?;
            let grad = field.gradient(z)?.norm();
            let weight = 1.0 - z.norm_sqr();
            let rhs = FOUR_OVER_PI * (1.0 - f * f) / weight;
            let links = match &transform {
                Ok(h) => {
                    let phi = h.eval(f)? / h.mass();
                    let dphi = metric.density(f)? / h.mass();
                    let chen = FOUR_OVER_PI * (0.5 * PI * phi).cos() / (dphi * weight);
                    let quadratic = FOUR_OVER_PI * (1.0 - phi * phi) / (dphi * weight);
                    Some([chen - grad, quadratic - chen, rhs - quadratic])
                }
                Err(_) => None,
            };
            Ok((BoundPoint::new(z, grad, rhs), links))
        })
        .collect::<Result<_>>()?;
    let points = rows.iter().map(|r| r.0).collect();
    let mut report = BoundReport::from_points("main", points, tol.check_slack)?;
    if let Some(w) = curvature_warning(metric)? {
        report.warnings.push(w);
    }
    match transform {
        Ok(_) => {
            let names = ["chen", "cos_quadratic", "log_concave_lemma"];
            let links: Vec<LinkSummary> = (0..3)
                .map(|k| {
                    let slacks: Vec<(Complex64, f64)> = rows.iter().map(|(p, l)| (p.z, l.unwrap()[k])).collect();
                    summarize(names[k], &slacks)
                })
                .collect();
            let holds = links.iter().all(|l| l.min_slack >= -tol.check_slack);
            report.chain = Some(ChainReport { links, holds });
        }
        Err(e) => report.warnings.push(format!("intermediate chain skipped: {e}")),
    }
    Ok(report)
}

/// Reports for `|∇f| <= 2(1 - |f|)/(1 - |z|^2)` and `|f| <= (4/pi) arctan|z|` on
/// `grid`, for metrics increasing on `(-1, 0)` and decreasing on `(0, 1)`. The
/// second also needs `f(0) = 0` and equal mass on both sides of 0.
pub fn check_kalajpos(metric: &Metric1D, boundary: &BoundaryData, grid: &[Complex64], tol: &Tolerances) -> Result<(BoundReport, BoundReport)> {
    let field = RHarmonicField::with_tolerances(metric, boundary, tol)?;
    let rows: Vec<(BoundPoint, BoundPoint)> = grid
        .par_iter()
        .map(|&z| {
            check_inside(z)?;
            let f = value_in_interval(&field, z)?;
            let grad = field.gradient(z)?.norm();
            let gradient = BoundPoint::new(z, grad, 2.0 * (1.0 - f.abs()) / (1.0 - z.norm_sqr()));
            let value = BoundPoint::new(z, f.abs(), FOUR_OVER_PI * z.norm().atan());
            Ok((gradient, value))
        })
        .collect::<Result<_>>()?;
    let (first, second): (Vec<_>, Vec<_>) = rows.into_iter().unzip();
    let mut gradient = BoundReport::from_points("kalajpos_gradient", first, tol.check_slack)?;
    let mut value = BoundReport::from_points("kalajpos_value", second, tol.check_slack)?;
    if !metric.is_unimodal(SHAPE_SAMPLES) {
        for r in [&mut gradient, &mut value] {
            r.applicable = false;
            r.warnings.push(format!("metric {} is not unimodal about 0", metric.name()));
        }
    }
    let f0 = field.value(Complex64::new(0.0, 0.0))?;
    if f0.abs() > tol.equality {
        value.applicable = false;
        value.warnings.push(format!("f(0) = {f0:e} is not 0"));
    }
    let p = field.primitive();
    match (p.lower_limit(), p.upper_limit()) {
        (Ok(lo), Ok(hi)) => {
            // int_{-1}^0 R = -lo and int_0^1 R = hi
            let r = 0.5 * (hi - lo);
            if (hi + lo).abs() > 1e-9 * r {
                value.applicable = false;
                value.warnings.push(format!("masses on (-1, 0) and (0, 1) differ: {:e} vs {hi:e}", -lo));
            }
        }
        (lo, hi) => {
            value.applicable = false;
            let e = lo.err().or(hi.err()).unwrap();
            value.warnings.push(format!("mass comparison unavailable: {e}"));
        }
    }
    Ok((gradient, value))
}

/// `d_h(f(z), f(w)) <= (4/pi) d_h(z, w)` over the given pairs.
pub fn check_distance_contraction(metric: &Metric1D, boundary: &BoundaryData, pairs: &[(Complex64, Complex64)], tol: &Tolerances) -> Result<BoundReport> {
    let field = RHarmonicField::with_tolerances(metric, boundary, tol)?;
    let points = pairs
        .par_iter()
        .map(|&(z, w)| {
            let lhs = interval_distance(value_in_interval(&field, z)?, value_in_interval(&field, w)?)?;
            let rhs = FOUR_OVER_PI * hyperbolic_distance(z, w)?;
            Ok(BoundPoint { w: Some(w), ..BoundPoint::new(z, lhs, rhs) })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut report = BoundReport::from_points("distance_contraction", points, tol.check_slack)?;
    if let Some(w) = curvature_warning(metric)? {
        report.warnings.push(w);
    }
    Ok(report)
}
