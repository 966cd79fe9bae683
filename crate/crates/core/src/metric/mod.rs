//! Conformal strip metrics `rho(u, v) = R(u)` given by a positive density on an
//! open interval, their Gaussian curvature, and the H-transform that turns
//! R-harmonic functions into Euclidean harmonic ones.

mod spec;
mod tabulated;
mod transform;

use std::f64::consts::FRAC_PI_2;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lemma::psi_family;
use crate::mollifier::{MollifiedMap, OddPiecewiseMap};

pub use spec::MetricSpec;
pub use tabulated::MonotoneCubic;
pub use transform::{inverse_h, mass, transform_h, HTransform, Primitive};

/// Named metric densities.
#[derive(Debug, Clone, PartialEq)]
pub enum MetricFamily {
    /// `R = 1`, the Euclidean metric.
    Constant,
    /// `R = exp(c u)`, zero curvature.
    Exponential { c: f64 },
    /// `R = cos(pi u / 2)`, curvature `(pi^2 / 4) sec^4(pi u / 2)`.
    Cosine,
    /// `R = 1 / (1 - u^2)`, curvature `-2 (1 + u^2)`; not integrable.
    Hyperbolic,
    /// `R = sec(pi u / 2)`, curvature `-pi^2 / 4`; not integrable.
    Secant,
    /// `R = 1 + delta - u^2`.
    Parabolic { delta: f64 },
    /// `R = exp(-c u^2)`.
    Gaussian { c: f64 },
    /// `R = psi'` for the piecewise sharpness family `psi(a, s)`.
    LemmaPsi { a: f64, s: f64, map: Arc<OddPiecewiseMap> },
    /// `R = psi_eps'`, the mollified sharpness family (or any mollified map).
    Mollified { map: Arc<MollifiedMap>, psi: Option<(f64, f64)> },
    Tabulated(Arc<MonotoneCubic>),
    /// `R = 1 - exp(-u)` on `(0, inf)`.
    HalfPlaneOneMinusExp,
}

/// A positive density `R` on an open interval `(lo, hi)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Metric1D {
    family: MetricFamily,
    lo: f64,
    hi: f64,
}

impl Metric1D {
    pub fn constant() -> Self {
        Self::on_natural_domain(MetricFamily::Constant)
    }
    pub fn exponential(c: f64) -> Self {
        Self::on_natural_domain(MetricFamily::Exponential { c })
    }
    pub fn cosine() -> Self {
        Self::on_natural_domain(MetricFamily::Cosine)
    }
    pub fn hyperbolic() -> Self {
        Self::on_natural_domain(MetricFamily::Hyperbolic)
    }
    pub fn secant() -> Self {
        Self::on_natural_domain(MetricFamily::Secant)
    }
    pub fn half_plane() -> Self {
        Self::on_natural_domain(MetricFamily::HalfPlaneOneMinusExp)
    }

    pub fn parabolic(delta: f64) -> Result<Self> {
        if !(delta > 0.0) {
            return Err(Error::ParameterOutOfRange(format!("parabolic metric needs delta > 0, got {delta}")));
        }
        Ok(Self::on_natural_domain(MetricFamily::Parabolic { delta }))
    }

    pub fn gaussian(c: f64) -> Self {
        Self::on_natural_domain(MetricFamily::Gaussian { c })
    }

    pub fn lemma_psi(a: f64, s: f64) -> Result<Self> {
        let map = psi_family(a, s)?;
        Ok(Self::on_natural_domain(MetricFamily::LemmaPsi { a, s, map: Arc::new(map) }))
    }

    pub fn mollified_psi(a: f64, s: f64, eps: f64) -> Result<Self> {
        let map = MollifiedMap::new(psi_family(a, s)?, eps)?;
        Ok(Self::on_natural_domain(MetricFamily::Mollified { map: Arc::new(map), psi: Some((a, s)) }))
    }

    pub fn tabulated(u: Vec<f64>, r: Vec<f64>) -> Result<Self> {
        let table = MonotoneCubic::new(u, r)?;
        let (lo, hi) = (table.lo(), table.hi());
        Ok(Metric1D { family: MetricFamily::Tabulated(Arc::new(table)), lo, hi })
    }

    /// The family on its natural domain: `(0, inf)` for the half-plane density,
    /// `(-1, 1)` otherwise.
    pub fn on_natural_domain(family: MetricFamily) -> Self {
        let (lo, hi) = match family {
            MetricFamily::HalfPlaneOneMinusExp => (0.0, f64::INFINITY),
            _ => (-1.0, 1.0),
        };
        Metric1D { family, lo, hi }
    }

    /// The same density restricted to `(lo, hi)`, which must lie in the natural domain.
    pub fn on_interval(family: MetricFamily, lo: f64, hi: f64) -> Result<Self> {
        let natural = Self::on_natural_domain(family);
        let explicit_ok = match &natural.family {
            MetricFamily::Constant | MetricFamily::Exponential { .. } | MetricFamily::Gaussian { .. } => true,
            _ => lo >= natural.lo && hi <= natural.hi,
        };
        if !(lo < hi) || !explicit_ok {
            return Err(Error::InvalidInput(format!("interval ({lo}, {hi}) is not admissible for this density")));
        }
        Ok(Metric1D { lo, hi, ..natural })
    }

    pub fn family(&self) -> &MetricFamily {
        &self.family
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    /// Short label used in reports.
    pub fn name(&self) -> String {
        match &self.family {
            MetricFamily::Constant => "constant".into(),
            MetricFamily::Exponential { c } => format!("exponential(c={c})"),
            MetricFamily::Cosine => "cosine".into(),
            MetricFamily::Hyperbolic => "hyperbolic".into(),
            MetricFamily::Secant => "secant".into(),
            MetricFamily::Parabolic { delta } => format!("parabolic(delta={delta})"),
            MetricFamily::Gaussian { c } => format!("gaussian(c={c})"),
            MetricFamily::LemmaPsi { a, s, .. } => format!("lemma_psi(a={a}, s={s})"),
            MetricFamily::Mollified { map, psi: Some((a, s)) } => {
                format!("mollified_psi(a={a}, s={s}, eps={})", map.epsilon())
            }
            MetricFamily::Mollified { map, psi: None } => format!("mollified(eps={})", map.epsilon()),
            MetricFamily::Tabulated(t) => format!("tabulated({} knots)", t.knots().0.len()),
            MetricFamily::HalfPlaneOneMinusExp => "half_plane_one_minus_exp".into(),
        }
    }

    /// Whether the family is known to have non-negative curvature everywhere.
    pub fn declares_nonnegative_curvature(&self) -> bool {
        match &self.family {
            MetricFamily::Constant
            | MetricFamily::Exponential { .. }
            | MetricFamily::Cosine
            | MetricFamily::Parabolic { .. }
            | MetricFamily::HalfPlaneOneMinusExp => true,
            MetricFamily::Gaussian { c } => *c >= 0.0,
            _ => false,
        }
    }

    pub fn contains(&self, u: f64) -> bool {
        u > self.lo && u < self.hi
    }

    fn check(&self, u: f64) -> Result<()> {
        if self.contains(u) {
            Ok(())
        } else {
            Err(Error::Domain { value: u, lo: self.lo, hi: self.hi })
        }
    }

    /// `R(u)`, without a domain check.
    pub(crate) fn r(&self, u: f64) -> f64 {
        self.jet(u).0
    }

    /// `R`, `R'` and `R''` at `u`, without a domain check.
    pub(crate) fn jet(&self, u: f64) -> (f64, f64, f64) {
        match &self.family {
            MetricFamily::Constant => (1.0, 0.0, 0.0),
            MetricFamily::Exponential { c } => {
                let e = (c * u).exp();
                (e, c * e, c * c * e)
            }
            MetricFamily::Cosine => {
                let (s, c) = (FRAC_PI_2 * u).sin_cos();
                (c, -FRAC_PI_2 * s, -FRAC_PI_2 * FRAC_PI_2 * c)
            }
            MetricFamily::Hyperbolic => {
                let d = 1.0 - u * u;
                (1.0 / d, 2.0 * u / (d * d), (2.0 + 6.0 * u * u) / (d * d * d))
            }
            MetricFamily::Secant => {
                let (s, c) = (FRAC_PI_2 * u).sin_cos();
                let sec = 1.0 / c;
                let t = s / c;
                let k = FRAC_PI_2;
                (sec, k * sec * t, k * k * sec * (2.0 * t * t + 1.0))
            }
            MetricFamily::Parabolic { delta } => (1.0 + delta - u * u, -2.0 * u, -2.0),
            MetricFamily::Gaussian { c } => {
                let e = (-c * u * u).exp();
                (e, -2.0 * c * u * e, (4.0 * c * c * u * u - 2.0 * c) * e)
            }
            MetricFamily::LemmaPsi { map, .. } => (map.derivative(u), map.second_derivative(u), 0.0),
            MetricFamily::Mollified { map, .. } => (map.derivative(u), map.second_derivative(u), map.third_derivative(u)),
            MetricFamily::Tabulated(t) => t.eval(u),
            MetricFamily::HalfPlaneOneMinusExp => {
                let e = (-u).exp();
                (-(-u).exp_m1(), e, -e)
            }
        }
    }

    /// `R(u)` for `u` inside the domain.
    pub fn density(&self, u: f64) -> Result<f64> {
        self.check(u)?;
        Ok(self.r(u))
    }

    /// `R'(u)`; every built-in family supplies it analytically.
    pub fn d_density(&self, u: f64) -> Result<f64> {
        self.check(u)?;
        Ok(self.jet(u).1)
    }

    /// `R''(u)` where the family supplies it.
    pub fn d2_density(&self, u: f64) -> Result<Option<f64>> {
        self.check(u)?;
        Ok(Some(self.jet(u).2))
    }

    /// `R'(u)` by central differences with step `max(1e-6, 1e-6 |u|)`, shrunk to stay inside.
    pub fn numeric_d_density(&self, u: f64) -> Result<f64> {
        self.check(u)?;
        let room = (u - self.lo).min(self.hi - u);
        let h = (1e-6f64).max(1e-6 * u.abs()).min(0.5 * room);
        if h < 1e-13 {
            return Err(Error::DerivativeUnavailable { at: u });
        }
        Ok((self.r(u + h) - self.r(u - h)) / (2.0 * h))
    }

    /// `R'(u) / R(u)`, the coefficient of `|grad f|^2` in the R-harmonic equation.
    pub fn log_derivative(&self, u: f64) -> Result<f64> {
        self.check(u)?;
        let (r, dr, _) = self.jet(u);
        Ok(dr / r)
    }

    /// Gaussian curvature `-(1 / R^2) (R' / R)'` of the strip metric at `u`.
    pub fn curvature_at(&self, u: f64) -> Result<f64> {
        self.check(u)?;
        let (r, dr, d2r) = self.jet(u);
        let q = dr / r;
        Ok(-(d2r / r - q * q) / (r * r))
    }

    /// Curvature from symmetric second differences of `log R`, Richardson-extrapolated
    /// over steps `h` and `h / 2` with `h = 1e-2 min(1, distance to the boundary)`.
    pub fn curvature_numeric(&self, u: f64) -> Result<f64> {
        self.check(u)?;
        let room = (u - self.lo).min(self.hi - u);
        let h = 1e-2 * room.min(1.0);
        if h < 1e-10 {
            return Err(Error::DerivativeUnavailable { at: u });
        }
        let log_r = |x: f64| self.r(x).ln();
        let second = |h: f64| (log_r(u + h) - 2.0 * log_r(u) + log_r(u - h)) / (h * h);
        let d2 = (4.0 * second(0.5 * h) - second(h)) / 3.0;
        let r = self.r(u);
        Ok(-d2 / (r * r))
    }

    /// Checks that `R` is nondecreasing on `(lo, 0]` and nonincreasing on `[0, hi)`
    /// on a uniform sample of `n` interior points.
    pub fn is_unimodal(&self, n: usize) -> bool {
        if !self.contains(0.0) {
            return false;
        }
        let (lo, hi) = (self.lo.max(-1e6), self.hi.min(1e6));
        let pts: Vec<f64> = (1..=n).map(|i| lo + (hi - lo) * i as f64 / (n + 1) as f64).collect();
        let scale = pts.iter().map(|&u| self.r(u)).fold(0.0, f64::max);
        let tol = 1e-12 * scale;
        pts.windows(2).all(|w| {
            let d = self.r(w[1]) - self.r(w[0]);
            if w[1] <= 0.0 {
                d >= -tol
            } else if w[0] >= 0.0 {
                d <= tol
            } else {
                true
            }
        })
    }

    /// Serializable description of this metric.
    pub fn spec(&self) -> MetricSpec {
        MetricSpec::describe(self)
    }
}

/// Mollifies an odd increasing map with bandwidth `eps` and returns the density
/// `R_eps = psi_eps'` on `(-1, 1)`.
pub fn mollify(psi: OddPiecewiseMap, eps: f64) -> Result<Metric1D> {
    let map = MollifiedMap::new(psi, eps)?;
    Ok(Metric1D::on_natural_domain(MetricFamily::Mollified { map: Arc::new(map), psi: None }))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LogConcavityReport {
    pub min_curvature: f64,
    pub argmin: f64,
    pub is_nonnegative: bool,
    /// `min_t R(t0) exp(q t) - R(t)` with `q = R'(t0) / R(t0)`, `t0 = 0` when inside.
    pub min_majorant_slack: f64,
    pub exp_majorant_ok: bool,
}

/// Scans the curvature over `grid` and checks the exponential majorant
/// `R(t) <= R(t0) exp((R'(t0) / R(t0)) (t - t0))` implied by log-concavity.
pub fn log_concavity_report(metric: &Metric1D, grid: &[f64]) -> Result<LogConcavityReport> {
    if grid.is_empty() {
        return Err(Error::InvalidInput("empty grid".into()));
    }
    let anchor = if metric.contains(0.0) { 0.0 } else { metric.lo + 1.0 };
    let (r0, dr0, _) = metric.jet(anchor);
    let q = dr0 / r0;
    let mut min_curvature = f64::INFINITY;
    let mut argmin = grid[0];
    let mut min_slack = f64::INFINITY;
    for &u in grid {
        let k = metric.curvature_at(u)?;
        if k < min_curvature {
            min_curvature = k;
            argmin = u;
        }
        let slack = r0 * (q * (u - anchor)).exp() - metric.r(u);
        min_slack = min_slack.min(slack);
    }
    Ok(LogConcavityReport {
        min_curvature,
        argmin,
        is_nonnegative: min_curvature >= -1e-9,
        min_majorant_slack: min_slack,
        exp_majorant_ok: min_slack >= -1e-9,
    })
}

/// `n` uniformly spaced points strictly inside `(lo, hi)` (an infinite `hi` is
/// replaced by `lo + 10`).
pub fn interior_grid(metric: &Metric1D, n: usize) -> Vec<f64> {
    let (lo, hi) = metric.domain();
    let hi = if hi.is_finite() { hi } else { lo + 10.0 };
    (1..=n).map(|i| lo + (hi - lo) * i as f64 / (n + 1) as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn curvature_examples() {
        assert!((Metric1D::hyperbolic().curvature_at(0.0).unwrap() + 2.0).abs() < 1e-15);
        assert_eq!(Metric1D::constant().curvature_at(0.37).unwrap(), 0.0);
        let sec = Metric1D::secant().curvature_at(0.3).unwrap();
        assert!((sec + PI * PI / 4.0).abs() < 1e-12);
        // hand derivation: -(1/R^2)(log R)'' with (log cos)'' = -(pi^2/4) sec^2
        let cos = Metric1D::cosine().curvature_at(0.0).unwrap();
        assert!((cos - PI * PI / 4.0).abs() < 1e-14);
    }

    #[test]
    fn numeric_curvature_agrees_with_analytic() {
        for m in [Metric1D::hyperbolic(), Metric1D::cosine(), Metric1D::exponential(1.5), Metric1D::gaussian(2.0)] {
            for &u in &[-0.9, -0.31, 0.0, 0.42, 0.88] {
                let a = m.curvature_at(u).unwrap();
                let n = m.curvature_numeric(u).unwrap();
                assert!((a - n).abs() < 1e-6 * (1.0 + a.abs()), "{} at {u}: {a} vs {n}", m.name());
            }
        }
    }

    #[test]
    fn numeric_first_derivative_agrees() {
        let m = Metric1D::cosine();
        for &u in &[-0.7, 0.0, 0.5] {
            assert!((m.numeric_d_density(u).unwrap() - m.d_density(u).unwrap()).abs() < 1e-8);
        }
    }

    #[test]
    fn endpoints_are_excluded() {
        let m = Metric1D::cosine();
        assert!(matches!(m.density(1.0), Err(Error::Domain { .. })));
        assert!(matches!(m.curvature_at(-1.0), Err(Error::Domain { .. })));
        assert!(Metric1D::half_plane().density(0.0).is_err());
        assert!(Metric1D::half_plane().density(40.0).is_ok());
    }

    #[test]
    fn half_plane_curvature_is_quarter_csch_squared() {
        let m = Metric1D::half_plane();
        for &x in &[0.3, 2.0, 5.0] {
            let r = m.density(x).unwrap();
            let minus_log_second = m.curvature_at(x).unwrap() * r * r;
            let expected = 0.25 / (0.5 * x).sinh().powi(2);
            assert!((minus_log_second - expected).abs() < 1e-12 * expected.max(1.0));
        }
    }

    #[test]
    fn log_concavity_reports() {
        let cos = Metric1D::cosine();
        let rep = log_concavity_report(&cos, &interior_grid(&cos, 999)).unwrap();
        assert!(rep.is_nonnegative && rep.exp_majorant_ok);
        let hyp = Metric1D::hyperbolic();
        let rep = log_concavity_report(&hyp, &interior_grid(&hyp, 999)).unwrap();
        assert!(!rep.is_nonnegative);
        assert!(rep.min_curvature <= -2.0);
        let one = Metric1D::constant();
        let rep = log_concavity_report(&one, &interior_grid(&one, 99)).unwrap();
        assert_eq!(rep.min_curvature, 0.0);
        assert_eq!(rep.min_majorant_slack, 0.0);
        assert!(rep.exp_majorant_ok);
        assert!(log_concavity_report(&one, &[1.5]).is_err());
    }

    #[test]
    fn unimodality() {
        assert!(Metric1D::cosine().is_unimodal(2001));
        assert!(Metric1D::constant().is_unimodal(2001));
        assert!(Metric1D::lemma_psi(81.0, 0.1).unwrap().is_unimodal(2001));
        assert!(!Metric1D::exponential(1.0).is_unimodal(2001));
        assert!(!Metric1D::hyperbolic().is_unimodal(2001));
    }

    #[test]
    fn identity_mollifies_to_constant_density() {
        let m = mollify(OddPiecewiseMap::identity(), 0.2).unwrap();
        for &u in &[-0.95, 0.0, 0.6] {
            assert!((m.density(u).unwrap() - 1.0).abs() < 1e-14);
        }
    }
}
