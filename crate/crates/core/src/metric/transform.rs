use super::Metric1D;
use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::scalar::{integrate, invert_increasing};

/// Table nodes per unit length; nodes sit at `j / NODES` for `|j| < NODES`.
const NODES: usize = 256;
/// Dyadic shells `[1 - 2^-k, 1 - 2^-(k+1)]` are summed up to this `k`.
const LAST_SHELL: i32 = 52;

/// The primitive `P(u) = int_0^u R` of a density on `(-1, 1)`, tabulated at
/// uniform nodes and completed by adaptive quadrature between nodes.
///
/// The one-sided limits `P(-1+)` and `P(1-)` are found by summing dyadic shells
/// towards each endpoint; they are `None` when the shells stop decaying or the
/// running sum passes the divergence ceiling.
#[derive(Debug, Clone)]
pub struct Primitive {
    metric: Metric1D,
    /// `P(j / NODES)` for `j = -(NODES-1) ..= NODES-1`, stored at index `j + NODES - 1`.
    table: Vec<f64>,
    lower: std::result::Result<f64, String>,
    upper: std::result::Result<f64, String>,
    tol: f64,
    inverse_tol: f64,
}

impl Primitive {
    pub fn new(metric: &Metric1D) -> Result<Self> {
        Self::with_tolerances(metric, &Tolerances::default())
    }

    pub fn with_tolerances(metric: &Metric1D, tol: &Tolerances) -> Result<Self> {
        if metric.domain() != (-1.0, 1.0) {
            let (lo, hi) = metric.domain();
            return Err(Error::InvalidInput(format!("the H-transform needs the domain (-1, 1), got ({lo}, {hi})")));
        }
        let n = NODES as i64;
        let r = |u: f64| metric.r(u);
        let panel_tol = tol.quadrature / NODES as f64;
        let mut table = vec![0.0; 2 * NODES - 1];
        let mid = NODES - 1;
        for j in 1..n {
            let (a, b) = ((j - 1) as f64 / n as f64, j as f64 / n as f64);
            table[mid + j as usize] = table[mid + j as usize - 1] + integrate(&r, a, b, panel_tol);
            table[mid - j as usize] = table[mid - j as usize + 1] - integrate(&r, -b, -a, panel_tol);
        }
        let edge = (NODES - 1) as f64 / NODES as f64;
        let upper = shells(&r, 1.0, table[2 * NODES - 2], edge, tol);
        let lower = shells(&r, -1.0, table[0], -edge, tol);
        Ok(Primitive { metric: metric.clone(), table, lower, upper, tol: panel_tol, inverse_tol: tol.inverse })
    }

    pub fn metric(&self) -> &Metric1D {
        &self.metric
    }

    /// `P(u)` for `u` in `(-1, 1)`.
    pub fn eval(&self, u: f64) -> Result<f64> {
        if !(u > -1.0 && u < 1.0) {
            return Err(Error::Domain { value: u, lo: -1.0, hi: 1.0 });
        }
        Ok(self.eval_unchecked(u))
    }

    fn eval_unchecked(&self, u: f64) -> f64 {
        let lim = (NODES - 1) as i64;
        let j = ((u * NODES as f64).round() as i64).clamp(-lim, lim);
        let node = j as f64 / NODES as f64;
        let base = self.table[(j + lim) as usize];
        base + integrate(&|x: f64| self.metric.r(x), node, u, self.tol)
    }

    /// `P(-1+)`, or the reason it is infinite.
    pub fn lower_limit(&self) -> Result<f64> {
        self.lower.clone().map_err(Error::NonIntegrable)
    }

    pub fn upper_limit(&self) -> Result<f64> {
        self.upper.clone().map_err(Error::NonIntegrable)
    }

    /// `r = (1/2) int_{-1}^{1} R`.
    pub fn mass(&self) -> Result<f64> {
        Ok(0.5 * (self.upper_limit()? - self.lower_limit()?))
    }

    /// The unique `u` with `P(u) = p`.
    pub fn inverse(&self, p: f64) -> Result<f64> {
        let lo_lim = self.lower.as_ref().copied().unwrap_or(f64::NEG_INFINITY);
        let hi_lim = self.upper.as_ref().copied().unwrap_or(f64::INFINITY);
        if !(p > lo_lim && p < hi_lim) {
            return Err(Error::OutOfRange { value: p, lo: lo_lim, hi: hi_lim });
        }
        let k = self.table.partition_point(|&v| v <= p);
        let lim = (NODES - 1) as f64;
        let (lo, hi) = if k == 0 {
            (-1.0, -lim / NODES as f64)
        } else if k == self.table.len() {
            (lim / NODES as f64, 1.0)
        } else {
            let j = k as f64 - lim;
            ((j - 1.0) / NODES as f64, j / NODES as f64)
        };
        let scale = if let (Ok(a), Ok(b)) = (&self.lower, &self.upper) { 0.5 * (b - a) } else { 1.0f64.max(p.abs()) };
        let u = invert_increasing(
            |u| self.eval_unchecked(u),
            |u| self.metric.r(u),
            p,
            lo,
            hi,
            self.inverse_tol * scale,
        );
        Ok(u)
    }
}

/// Integral of `r` from `start` (where the primitive equals `base`) towards the
/// endpoint `side = +-1`, returning the primitive's one-sided limit.
fn shells<F: Fn(f64) -> f64>(r: &F, side: f64, base: f64, start: f64, tol: &Tolerances) -> std::result::Result<f64, String> {
    let first = (1.0 - start.abs()).log2().round() as i32;
    let first = -first;
    let mut total = 0.0;
    let mut recent: Vec<f64> = Vec::new();
    for k in first..=LAST_SHELL {
        let a = side * (1.0 - 2f64.powi(-k));
        let b = side * (1.0 - 2f64.powi(-(k + 1)));
        let shell = side * integrate(r, a.min(b), a.max(b), tol.quadrature * 1e-2);
        total += shell;
        if !total.is_finite() || (base + total).abs() > tol.divergence_ceiling {
            return Err(format!("integral towards {side} exceeds {:e}", tol.divergence_ceiling));
        }
        if shell.abs() <= 1e-16 * (1.0 + (base + total).abs()) {
            return Ok(base + total);
        }
        recent.push(shell.abs());
    }
    // geometric tail estimate from the last few shell ratios
    let n = recent.len();
    let ratio = (1..5).map(|i| recent[n - i] / recent[n - i - 1]).fold(0.0, f64::max);
    if ratio < 0.9 {
        let last = recent[n - 1];
        Ok(base + total + side * last * ratio / (1.0 - ratio))
    } else {
        Err(format!("integral towards {side} does not converge (shell ratio {ratio:.4})"))
    }
}

/// `H(u) = -(1/2)(int_0^1 R + int_0^-1 R) + int_0^u R`, increasing from `-r` to `r`.
#[derive(Debug, Clone)]
pub struct HTransform {
    primitive: Primitive,
    mass: f64,
    offset: f64,
}

impl HTransform {
    pub fn new(metric: &Metric1D) -> Result<Self> {
        Self::from_primitive(Primitive::new(metric)?)
    }

    pub fn from_primitive(primitive: Primitive) -> Result<Self> {
        let (lo, hi) = (primitive.lower_limit()?, primitive.upper_limit()?);
        Ok(HTransform { mass: 0.5 * (hi - lo), offset: -0.5 * (hi + lo), primitive })
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn primitive(&self) -> &Primitive {
        &self.primitive
    }

    pub fn metric(&self) -> &Metric1D {
        self.primitive.metric()
    }

    /// `H(0)`.
    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn eval(&self, u: f64) -> Result<f64> {
        Ok(self.offset + self.primitive.eval(u)?)
    }

    pub fn inverse(&self, t: f64) -> Result<f64> {
        if t.abs() >= self.mass {
            return Err(Error::OutOfRange { value: t, lo: -self.mass, hi: self.mass });
        }
        self.primitive.inverse(t - self.offset)
    }
}

/// `r = (1/2) int_{-1}^{1} R`.
pub fn mass(metric: &Metric1D) -> Result<f64> {
    Primitive::new(metric)?.mass()
}

/// `H(u)` for a single point; build an [`HTransform`] for repeated use.
pub fn transform_h(metric: &Metric1D, u: f64) -> Result<f64> {
    HTransform::new(metric)?.eval(u)
}

pub fn inverse_h(metric: &Metric1D, t: f64) -> Result<f64> {
    HTransform::new(metric)?.inverse(t)
}
