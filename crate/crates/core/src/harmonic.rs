//! Harmonic extension of boundary data on the unit circle, the lift to
//! `R`-harmonic maps through the primitive of `R`, and residual diagnostics.
//!
//! A function `f` into `(-1, 1)` solves `Δf + (R'/R)(f) |∇f|² = 0` exactly when
//! `P(f)` is harmonic, `P` being any primitive of `R`. Solving therefore reduces
//! to one Poisson integral of `P(f*)` followed by a monotone inversion, which
//! also works when `R` is not integrable as long as the boundary values stay
//! strictly inside the interval.

use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::disk::{check_inside, Mobius};
use crate::error::{Error, Result};
use crate::metric::{Metric1D, Primitive};

#[derive(Debug, Clone, PartialEq)]
enum Profile {
    /// Values at `theta_j = 2 pi j / N`.
    Sampled(Vec<f64>),
    /// `levels[i]` on the arc from `breaks[i]` to the next break, cyclically.
    Piecewise { breaks: Vec<f64>, levels: Vec<f64> },
}

/// A function on the unit circle with values in `[lo, hi]`.
///
/// Smooth data is stored as uniform samples and integrated with the trapezoid
/// rule. Piecewise-constant data keeps its arcs and is extended exactly through
/// harmonic measure.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryData {
    profile: Profile,
    sample_count: usize,
    lo: f64,
    hi: f64,
}

fn theta(j: usize, n: usize) -> f64 {
    TAU * j as f64 / n as f64
}

impl BoundaryData {
    /// Samples `f` at `sample_count` uniform angles; values must lie in `[-1, 1]`.
    pub fn from_fn<F: Fn(f64) -> f64>(f: F, sample_count: usize) -> Result<Self> {
        Self::from_fn_in(f, sample_count, -1.0, 1.0)
    }

    pub fn from_fn_in<F: Fn(f64) -> f64>(f: F, sample_count: usize, lo: f64, hi: f64) -> Result<Self> {
        if sample_count < 8 {
            return Err(Error::InvalidInput(format!("boundary needs at least 8 samples, got {sample_count}")));
        }
        let values = (0..sample_count).map(|j| f(theta(j, sample_count))).collect();
        Self::checked(Profile::Sampled(values), sample_count, lo, hi)
    }

    fn checked(profile: Profile, sample_count: usize, lo: f64, hi: f64) -> Result<Self> {
        let values = match &profile {
            Profile::Sampled(v) => v,
            Profile::Piecewise { levels, .. } => levels,
        };
        if let Some(bad) = values.iter().find(|v| !(**v >= lo && **v <= hi)) {
            return Err(Error::InvalidInput(format!("boundary value {bad} outside [{lo}, {hi}]")));
        }
        Ok(BoundaryData { profile, sample_count, lo, hi })
    }

    pub fn constant(c: f64, sample_count: usize) -> Result<Self> {
        Self::from_fn(|_| c, sample_count)
    }

    /// `cos theta`, the trace of `Re z`.
    pub fn cosine(sample_count: usize) -> Result<Self> {
        Self::from_fn(f64::cos, sample_count)
    }

    /// `tanh(n cos theta)`, the trace of `tanh(n Re z)`.
    pub fn tanh_cosine(n: f64, sample_count: usize) -> Result<Self> {
        Self::from_fn(|t| (n * t.cos()).tanh(), sample_count)
    }

    /// `+1` on the upper half circle, `-1` on the lower.
    pub fn step(sample_count: usize) -> Result<Self> {
        Self::piecewise(vec![0.0, PI], vec![1.0, -1.0], sample_count)
    }

    /// Piecewise-constant data; `breaks` must increase within `[0, 2 pi)`.
    pub fn piecewise(breaks: Vec<f64>, levels: Vec<f64>, sample_count: usize) -> Result<Self> {
        if breaks.is_empty() || breaks.len() != levels.len() {
            return Err(Error::InvalidInput("piecewise boundary needs one level per break".into()));
        }
        if breaks.windows(2).any(|w| !(w[1] > w[0])) || breaks[0] < 0.0 || *breaks.last().unwrap() >= TAU {
            return Err(Error::InvalidInput("boundary breaks must increase within [0, 2 pi)".into()));
        }
        Self::checked(Profile::Piecewise { breaks, levels }, sample_count, -1.0, 1.0)
    }

    /// Data given at arbitrary angles, resampled by periodic linear interpolation
    /// unless the angles already form the uniform grid.
    pub fn from_samples(theta_in: &[f64], values: &[f64], sample_count: usize) -> Result<Self> {
        if theta_in.len() != values.len() || theta_in.len() < 2 {
            return Err(Error::InvalidInput("boundary samples need matching theta and values arrays".into()));
        }
        let n = theta_in.len();
        let uniform = theta_in.iter().enumerate().all(|(j, t)| (t - theta(j, n)).abs() < 1e-12);
        if uniform && n == sample_count {
            return Self::checked(Profile::Sampled(values.to_vec()), n, -1.0, 1.0);
        }
        let mut pts: Vec<(f64, f64)> = theta_in.iter().map(|t| t.rem_euclid(TAU)).zip(values.iter().copied()).collect();
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        if pts.windows(2).any(|w| w[1].0 == w[0].0) {
            return Err(Error::InvalidInput("boundary sample angles must be distinct modulo 2 pi".into()));
        }
        let interp = |t: f64| {
            let k = pts.partition_point(|p| p.0 <= t);
            let (a, b) = if k == 0 || k == pts.len() {
                let (last, first) = (pts[pts.len() - 1], pts[0]);
                (last, (first.0 + TAU, first.1))
            } else {
                (pts[k - 1], pts[k])
            };
            let t = if t < a.0 { t + TAU } else { t };
            a.1 + (b.1 - a.1) * (t - a.0) / (b.0 - a.0)
        };
        Self::from_fn(interp, sample_count)
    }

    /// Random trigonometric polynomial of degree 4 with decaying coefficients,
    /// rescaled to a peak magnitude in `[0.5, 0.9]`.
    pub fn random_smooth(seed: u64, sample_count: usize) -> Result<Self> {
        Self::random_trig(seed, sample_count, &[1, 2, 3, 4], true)
    }

    /// Like [`BoundaryData::random_smooth`] but odd under `theta -> theta + pi`,
    /// so its extension is odd under `z -> -z`.
    pub fn random_antipodal(seed: u64, sample_count: usize) -> Result<Self> {
        Self::random_trig(seed, sample_count, &[1, 3, 5], false)
    }

    fn random_trig(seed: u64, sample_count: usize, modes: &[u32], with_mean: bool) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mean = if with_mean { rng.gen_range(-0.5..0.5) } else { 0.0 };
        let coeffs: Vec<(f64, f64, f64)> = modes
            .iter()
            .map(|&m| {
                let scale = 1.0 / (m * m) as f64;
                (m as f64, scale * rng.gen_range(-1.0..1.0), scale * rng.gen_range(-1.0..1.0))
            })
            .collect();
        let amplitude = rng.gen_range(0.5..0.9);
        let raw = |t: f64| mean + coeffs.iter().map(|(m, a, b)| a * (m * t).cos() + b * (m * t).sin()).sum::<f64>();
        let peak = (0..sample_count).map(|j| raw(theta(j, sample_count)).abs()).fold(0.0, f64::max);
        Self::from_fn(|t| amplitude * raw(t) / peak, sample_count)
    }

    /// `a * x + b * y` sampled on the finer of the two grids, with no range
    /// restriction on the result.
    pub fn combine(a: f64, x: &BoundaryData, b: f64, y: &BoundaryData) -> Result<Self> {
        let n = x.sample_count.max(y.sample_count);
        Self::from_fn_in(|t| a * x.value_at(t) + b * y.value_at(t), n, f64::NEG_INFINITY, f64::INFINITY)
    }

    /// Applies `f` to every value; the result is declared to live in `[lo, hi]`.
    pub fn map<F: Fn(f64) -> Result<f64>>(&self, f: F, lo: f64, hi: f64) -> Result<Self> {
        let profile = match &self.profile {
            Profile::Sampled(v) => Profile::Sampled(v.iter().map(|&x| f(x)).collect::<Result<_>>()?),
            Profile::Piecewise { breaks, levels } => {
                Profile::Piecewise { breaks: breaks.clone(), levels: levels.iter().map(|&x| f(x)).collect::<Result<_>>()? }
            }
        };
        Self::checked(profile, self.sample_count, lo, hi)
    }

    pub fn sample_count(&self) -> usize {
        self.sample_count
    }

    pub fn target(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn is_piecewise(&self) -> bool {
        matches!(self.profile, Profile::Piecewise { .. })
    }

    pub fn thetas(&self) -> Vec<f64> {
        (0..self.sample_count).map(|j| theta(j, self.sample_count)).collect()
    }

    pub fn samples(&self) -> Vec<f64> {
        match &self.profile {
            Profile::Sampled(v) => v.clone(),
            Profile::Piecewise { .. } => self.thetas().into_iter().map(|t| self.value_at(t)).collect(),
        }
    }

    /// Boundary value at any angle: periodic cubic interpolation of samples, or
    /// the arc level (the mean of both sides at a break).
    pub fn value_at(&self, t: f64) -> f64 {
        let t = t.rem_euclid(TAU);
        match &self.profile {
            Profile::Sampled(v) => {
                let n = v.len();
                let pos = t / TAU * n as f64;
                let i = pos.floor() as i64;
                let s = pos - i as f64;
                let at = |k: i64| v[k.rem_euclid(n as i64) as usize];
                let w = [
                    -s * (s - 1.0) * (s - 2.0) / 6.0,
                    (s + 1.0) * (s - 1.0) * (s - 2.0) / 2.0,
                    -(s + 1.0) * s * (s - 2.0) / 2.0,
                    (s + 1.0) * s * (s - 1.0) / 6.0,
                ];
                let value = w[0] * at(i - 1) + w[1] * at(i) + w[2] * at(i + 1) + w[3] * at(i + 2);
                value.clamp(self.lo, self.hi)
            }
            Profile::Piecewise { breaks, levels } => {
                let m = breaks.len();
                if let Some(k) = breaks.iter().position(|b| (b - t).abs() < 1e-14 || (b - t).abs() > TAU - 1e-14) {
                    return 0.5 * (levels[k] + levels[(k + m - 1) % m]);
                }
                let k = breaks.partition_point(|&b| b <= t);
                levels[(k + m - 1) % m]
            }
        }
    }
}

/// JSON form of boundary data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum BoundarySpec {
    #[serde(rename = "samples")]
    Samples {
        theta: Vec<f64>,
        values: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        sample_count: Option<usize>,
    },
    /// Presets: `step`, `cosine`, `constant {c}`, `tanh-cosine {n}`,
    /// `random-smooth {seed}`, `random-antipodal {seed}`; every preset accepts
    /// `sample_count`.
    #[serde(rename = "expression-preset")]
    Preset {
        name: String,
        #[serde(default)]
        params: BTreeMap<String, f64>,
    },
}

impl BoundarySpec {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn build(&self, default_samples: usize) -> Result<BoundaryData> {
        match self {
            BoundarySpec::Samples { theta, values, sample_count } => {
                BoundaryData::from_samples(theta, values, sample_count.unwrap_or(default_samples))
            }
            BoundarySpec::Preset { name, params } => {
                let n = params.get("sample_count").map_or(default_samples, |v| *v as usize);
                let need = |key: &str| {
                    params.get(key).copied().ok_or_else(|| Error::Parse(format!("boundary preset {name:?} requires parameter {key:?}")))
                };
                match name.as_str() {
                    "step" => BoundaryData::step(n),
                    "cosine" => BoundaryData::cosine(n),
                    "constant" => BoundaryData::constant(need("c")?, n),
                    "tanh-cosine" => BoundaryData::tanh_cosine(need("n")?, n),
                    "random-smooth" => BoundaryData::random_smooth(need("seed")? as u64, n),
                    "random-antipodal" => BoundaryData::random_antipodal(need("seed")? as u64, n),
                    other => Err(Error::Parse(format!("unknown boundary preset {other:?}"))),
                }
            }
        }
    }
}

impl std::str::FromStr for BoundaryData {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BoundarySpec::from_json(s)?.build(Tolerances::default().sample_count)
    }
}

/// A real function on the open unit disk with its gradient.
///
/// Gradients are returned as complex numbers `f_x + i f_y`.
pub trait HarmonicField: Send + Sync {
    fn value(&self, z: Complex64) -> Result<f64>;
    fn gradient(&self, z: Complex64) -> Result<Complex64>;
    /// The target metric for `R`-harmonic fields; `None` for Euclidean ones.
    fn metric(&self) -> Option<&Metric1D> {
        None
    }
}

impl<F: HarmonicField + ?Sized> HarmonicField for &F {
    fn value(&self, z: Complex64) -> Result<f64> {
        (**self).value(z)
    }
    fn gradient(&self, z: Complex64) -> Result<Complex64> {
        (**self).gradient(z)
    }
    fn metric(&self) -> Option<&Metric1D> {
        (**self).metric()
    }
}

#[derive(Debug, Clone)]
enum Kernel {
    Trapezoid { cos: Vec<f64>, sin: Vec<f64>, values: Vec<f64> },
    Arcs { breaks: Vec<f64>, levels: Vec<f64> },
}

/// The Poisson integral of boundary data.
#[derive(Debug, Clone)]
pub struct PoissonExtension {
    kernel: Kernel,
}

/// Continuous change of `arg(w - z)` as `w` runs counterclockwise from
/// `e^{i a}` to `e^{i b}`, and its gradient in `z`.
fn arc_angle(z: Complex64, a: f64, b: f64) -> (f64, Complex64) {
    let (wa, wb) = (Complex64::from_polar(1.0, a), Complex64::from_polar(1.0, b));
    let raw = ((wb - z) / (wa - z)).arg();
    // the angle lies strictly between half the arc and half the arc plus pi
    let center = 0.5 * (b - a) + 0.5 * PI;
    let delta = center + (raw - center + PI).rem_euclid(TAU) - PI;
    let dlog = 1.0 / (wa - z) - 1.0 / (wb - z);
    (delta, Complex64::i() * dlog.conj())
}

impl PoissonExtension {
    pub fn new(boundary: &BoundaryData) -> Self {
        let kernel = match &boundary.profile {
            Profile::Sampled(values) => {
                let n = values.len();
                Kernel::Trapezoid {
                    cos: (0..n).map(|j| theta(j, n).cos()).collect(),
                    sin: (0..n).map(|j| theta(j, n).sin()).collect(),
                    values: values.clone(),
                }
            }
            Profile::Piecewise { breaks, levels } => Kernel::Arcs { breaks: breaks.clone(), levels: levels.clone() },
        };
        PoissonExtension { kernel }
    }

    fn arcs(&self, z: Complex64, breaks: &[f64], levels: &[f64]) -> (f64, Complex64) {
        let m = breaks.len();
        if m == 1 {
            return (levels[0], Complex64::new(0.0, 0.0));
        }
        let mut value = 0.0;
        let mut grad = Complex64::new(0.0, 0.0);
        for i in 0..m {
            let (a, b) = (breaks[i], if i + 1 < m { breaks[i + 1] } else { breaks[0] + TAU });
            let (delta, d_delta) = arc_angle(z, a, b);
            value += levels[i] * (2.0 * delta - (b - a)) / TAU;
            grad += levels[i] * d_delta / PI;
        }
        (value, grad)
    }
}

impl HarmonicField for PoissonExtension {
    fn value(&self, z: Complex64) -> Result<f64> {
        check_inside(z)?;
        Ok(match &self.kernel {
            Kernel::Trapezoid { cos, sin, values } => {
                let r2 = z.norm_sqr();
                let num = 1.0 - r2;
                let sum: f64 = (0..values.len())
                    .map(|j| values[j] / (1.0 + r2 - 2.0 * (z.re * cos[j] + z.im * sin[j])))
                    .sum();
                num * sum / values.len() as f64
            }
            Kernel::Arcs { breaks, levels } => self.arcs(z, breaks, levels).0,
        })
    }

    fn gradient(&self, z: Complex64) -> Result<Complex64> {
        check_inside(z)?;
        Ok(match &self.kernel {
            Kernel::Trapezoid { cos, sin, values } => {
                let r2 = z.norm_sqr();
                let num = 1.0 - r2;
                let mut acc = Complex64::new(0.0, 0.0);
                for j in 0..values.len() {
                    let w = Complex64::new(cos[j], sin[j]);
                    let d = 1.0 + r2 - 2.0 * (z.re * cos[j] + z.im * sin[j]);
                    // grad of (1 - |z|^2) / |w - z|^2
                    acc += values[j] * (-2.0 * z * d - 2.0 * num * (z - w)) / (d * d);
                }
                acc / values.len() as f64
            }
            Kernel::Arcs { breaks, levels } => self.arcs(z, breaks, levels).1,
        })
    }
}

/// `f = P^{-1}(g)` where `g` extends `P(f*)` harmonically.
#[derive(Debug, Clone)]
pub struct RHarmonicField {
    primitive: Primitive,
    lifted: PoissonExtension,
}

impl RHarmonicField {
    pub fn new(metric: &Metric1D, boundary: &BoundaryData) -> Result<Self> {
        Self::with_tolerances(metric, boundary, &Tolerances::default())
    }

    pub fn with_tolerances(metric: &Metric1D, boundary: &BoundaryData, tol: &Tolerances) -> Result<Self> {
        Self::from_primitive(Primitive::with_tolerances(metric, tol)?, boundary)
    }

    pub fn from_primitive(primitive: Primitive, boundary: &BoundaryData) -> Result<Self> {
        let (lo, hi) = boundary.target();
        if lo < -1.0 || hi > 1.0 {
            return Err(Error::InvalidInput(format!("boundary target [{lo}, {hi}] exceeds [-1, 1]")));
        }
        let lifted = boundary.map(
            |v| {
                if v == 1.0 {
                    primitive.upper_limit()
                } else if v == -1.0 {
                    primitive.lower_limit()
                } else {
                    primitive.eval(v)
                }
            },
            f64::NEG_INFINITY,
            f64::INFINITY,
        )?;
        Ok(RHarmonicField { lifted: PoissonExtension::new(&lifted), primitive })
    }

    pub fn primitive(&self) -> &Primitive {
        &self.primitive
    }

    /// The harmonic function `P(f)`.
    pub fn lifted(&self) -> &PoissonExtension {
        &self.lifted
    }
}

impl HarmonicField for RHarmonicField {
    fn value(&self, z: Complex64) -> Result<f64> {
        self.primitive.inverse(self.lifted.value(z)?)
    }

    fn gradient(&self, z: Complex64) -> Result<Complex64> {
        let f = self.value(z)?;
        Ok(self.lifted.gradient(z)? / self.primitive.metric().density(f)?)
    }

    fn metric(&self) -> Option<&Metric1D> {
        Some(self.primitive.metric())
    }
}

type ValueFn = dyn Fn(Complex64) -> f64 + Send + Sync;
type GradientFn = dyn Fn(Complex64) -> Complex64 + Send + Sync;

/// A field given by explicit formulas.
#[derive(Clone)]
pub struct ClosedFormField {
    label: String,
    value: Arc<ValueFn>,
    gradient: Arc<GradientFn>,
    metric: Option<Metric1D>,
}

impl std::fmt::Debug for ClosedFormField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ClosedFormField").field("label", &self.label).field("metric", &self.metric).finish()
    }
}

impl ClosedFormField {
    pub fn new<V, G>(label: impl Into<String>, value: V, gradient: G, metric: Option<Metric1D>) -> Self
    where
        V: Fn(Complex64) -> f64 + Send + Sync + 'static,
        G: Fn(Complex64) -> Complex64 + Send + Sync + 'static,
    {
        ClosedFormField { label: label.into(), value: Arc::new(value), gradient: Arc::new(gradient), metric }
    }

    pub fn constant(c: f64, metric: Option<Metric1D>) -> Self {
        Self::new(format!("constant {c}"), move |_| c, |_| Complex64::new(0.0, 0.0), metric)
    }

    /// `tanh(n x)`, harmonic for the density `1 / (1 - u^2)`.
    pub fn tanh_linear(n: f64) -> Self {
        Self::new(
            format!("tanh({n} x)"),
            move |z: Complex64| (n * z.re).tanh(),
            move |z: Complex64| {
                let sech = 1.0 / (n * z.re).cosh();
                Complex64::new(n * sech * sech, 0.0)
            },
            Some(Metric1D::hyperbolic()),
        )
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

impl HarmonicField for ClosedFormField {
    fn value(&self, z: Complex64) -> Result<f64> {
        check_inside(z)?;
        Ok((self.value)(z))
    }

    fn gradient(&self, z: Complex64) -> Result<Complex64> {
        check_inside(z)?;
        Ok((self.gradient)(z))
    }

    fn metric(&self) -> Option<&Metric1D> {
        self.metric.as_ref()
    }
}

/// `f ∘ T` for a disk automorphism `T`.
#[derive(Debug, Clone)]
pub struct Precomposed<F> {
    pub inner: F,
    pub map: Mobius,
}

impl<F: HarmonicField> HarmonicField for Precomposed<F> {
    fn value(&self, z: Complex64) -> Result<f64> {
        check_inside(z)?;
        self.inner.value(self.map.apply(z))
    }

    fn gradient(&self, z: Complex64) -> Result<Complex64> {
        check_inside(z)?;
        Ok(self.map.derivative(z).conj() * self.inner.gradient(self.map.apply(z))?)
    }

    fn metric(&self) -> Option<&Metric1D> {
        self.inner.metric()
    }
}

pub fn harmonic_extend(boundary: &BoundaryData, z: Complex64) -> Result<f64> {
    PoissonExtension::new(boundary).value(z)
}

pub fn gradient_of(boundary: &BoundaryData, z: Complex64) -> Result<Complex64> {
    PoissonExtension::new(boundary).gradient(z)
}

/// One-off evaluation; build an [`RHarmonicField`] for repeated use.
pub fn solve_r_harmonic(metric: &Metric1D, boundary: &BoundaryData, z: Complex64) -> Result<f64> {
    check_inside(z)?;
    RHarmonicField::new(metric, boundary)?.value(z)
}

fn check_stencil(z: Complex64, h: f64) -> Result<()> {
    if z.norm() + h < 1.0 {
        Ok(())
    } else {
        Err(Error::StencilOutsideDisk { re: z.re, im: z.im, h })
    }
}

/// `Δf + (R'/R)(f) |∇f|²` from five-point differences of `field.value`.
pub fn pde_residual<F: HarmonicField + ?Sized>(metric: &Metric1D, field: &F, z: Complex64, h: f64) -> Result<f64> {
    check_stencil(z, h)?;
    let f = |w: Complex64| field.value(w);
    let (c, e, w, n, s) = (f(z)?, f(z + h)?, f(z - h)?, f(z + Complex64::new(0.0, h))?, f(z - Complex64::new(0.0, h))?);
    let laplacian = (e + w + n + s - 4.0 * c) / (h * h);
    let (fx, fy) = ((e - w) / (2.0 * h), (n - s) / (2.0 * h));
    Ok(laplacian + metric.log_derivative(c)? * (fx * fx + fy * fy))
}

/// `R(f)^2 f_z^2` with `f_z = (f_x - i f_y) / 2` from the field's gradient.
pub fn hopf_differential<F: HarmonicField + ?Sized>(metric: &Metric1D, field: &F, z: Complex64) -> Result<Complex64> {
    let f = field.value(z)?;
    let dz = field.gradient(z)?.conj() * 0.5;
    let r = metric.density(f)?;
    Ok(r * r * dz * dz)
}

/// Largest Cauchy-Riemann defect `max(|U_x - V_y|, |U_y + V_x|)` of the Hopf
/// differential `U + iV` over `grid`, by central differences.
pub fn hopf_holomorphy_residual<F: HarmonicField + ?Sized>(metric: &Metric1D, field: &F, grid: &[Complex64], h: f64) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for &z in grid {
        check_stencil(z, h)?;
        let hopf = |w: Complex64| hopf_differential(metric, field, w);
        let dx = (hopf(z + h)? - hopf(z - h)?) / (2.0 * h);
        let dy = (hopf(z + Complex64::new(0.0, h))? - hopf(z - Complex64::new(0.0, h))?) / (2.0 * h);
        // d/dz-bar = (d/dx + i d/dy) / 2
        let defect = dx + Complex64::i() * dy;
        worst = worst.max(defect.re.abs()).max(defect.im.abs());
    }
    Ok(worst)
}
