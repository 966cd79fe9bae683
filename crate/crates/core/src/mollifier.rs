//! Mollification of odd, increasing, piecewise-quadratic maps of `[-1, 1]`.
//!
//! A map is given on `[0, 1]` by quadratic pieces, extended oddly to `[-1, 0]`
//! and affinely (with the slope at `1`) beyond `+-1`. Convolution with the
//! scaled bump `sigma_eps(t) = sigma(t / eps) / eps` is evaluated in closed form
//! from the partial moments `S_k(t) = int_{-1}^t z^k sigma(z) dz`, `k = 0, 1, 2`,
//! which are tabulated once with cubic Hermite interpolation.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::scalar::integrate;

const TABLE_CELLS: usize = 4096;
const SHAPE_TOL: f64 = 1e-9;

fn raw_bump(z: f64) -> f64 {
    if z.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - z * z)).exp()
    }
}

/// The standard exponential bump on `(-1, 1)`, normalized to unit mass.
#[derive(Debug)]
pub struct Bump {
    norm: f64,
    knots: Vec<f64>,
    moments: [Vec<f64>; 3],
}

impl Bump {
    pub fn get() -> &'static Bump {
        static BUMP: OnceLock<Bump> = OnceLock::new();
        BUMP.get_or_init(Bump::build)
    }

    fn build() -> Bump {
        let mass = integrate(&raw_bump, -1.0, 1.0, 1e-16);
        let norm = 1.0 / mass;
        let h = 2.0 / TABLE_CELLS as f64;
        let knots: Vec<f64> = (0..=TABLE_CELLS).map(|i| -1.0 + h * i as f64).collect();
        let mut moments = [vec![0.0; TABLE_CELLS + 1], vec![0.0; TABLE_CELLS + 1], vec![0.0; TABLE_CELLS + 1]];
        for (k, table) in moments.iter_mut().enumerate() {
            let integrand = |z: f64| norm * z.powi(k as i32) * raw_bump(z);
            for i in 0..TABLE_CELLS {
                table[i + 1] = table[i] + integrate(&integrand, knots[i], knots[i + 1], 1e-18);
            }
        }
        Bump { norm, knots, moments }
    }

    /// Normalized density `sigma(z)`.
    pub fn density(&self, z: f64) -> f64 {
        self.norm * raw_bump(z)
    }

    /// `S_k(t)` for `k` in `0..=2`, clamped to the support.
    pub fn partial_moment(&self, k: usize, t: f64) -> f64 {
        if t <= -1.0 {
            return 0.0;
        }
        let table = &self.moments[k];
        if t >= 1.0 {
            return table[TABLE_CELLS];
        }
        let h = 2.0 / TABLE_CELLS as f64;
        let i = (((t + 1.0) / h) as usize).min(TABLE_CELLS - 1);
        let (x0, x1) = (self.knots[i], self.knots[i + 1]);
        let s = (t - x0) / h;
        let d = |x: f64| x.powi(k as i32) * self.density(x);
        let (y0, y1, d0, d1) = (table[i], table[i + 1], d(x0), d(x1));
        let h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
        let h10 = s * (1.0 - s) * (1.0 - s);
        let h01 = s * s * (3.0 - 2.0 * s);
        let h11 = s * s * (s - 1.0);
        h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1
    }
}

/// One quadratic piece `c0 + c1 x + c2 x^2` on `[lo, hi]` (either end may be infinite).
#[derive(Debug, Clone, Copy, PartialEq)]
struct Piece {
    lo: f64,
    hi: f64,
    c: [f64; 3],
}

impl Piece {
    fn value(&self, x: f64) -> f64 {
        self.c[0] + x * (self.c[1] + x * self.c[2])
    }
    fn slope(&self, x: f64) -> f64 {
        self.c[1] + 2.0 * self.c[2] * x
    }
    fn curvature(&self) -> f64 {
        2.0 * self.c[2]
    }
}

/// An odd, increasing, `C^1` map of `[-1, 1]` onto itself built from quadratic
/// pieces on `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct OddPiecewiseMap {
    /// Breakpoints `0 = b_0 < ... < b_m = 1`.
    breaks: Vec<f64>,
    /// Coefficients `[c0, c1, c2]` of each piece on `[b_i, b_{i+1}]`.
    coeffs: Vec<[f64; 3]>,
    line: Vec<Piece>,
}

impl OddPiecewiseMap {
    pub fn new(breaks: Vec<f64>, coeffs: Vec<[f64; 3]>) -> Result<Self> {
        if breaks.len() < 2 || coeffs.len() != breaks.len() - 1 {
            return Err(Error::InvalidInput("need m+1 breakpoints for m pieces".into()));
        }
        if breaks[0] != 0.0 || *breaks.last().unwrap() != 1.0 || breaks.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidInput("breakpoints must increase from 0 to 1".into()));
        }
        let pieces: Vec<Piece> = breaks
            .windows(2)
            .zip(&coeffs)
            .map(|(w, c)| Piece { lo: w[0], hi: w[1], c: *c })
            .collect();
        if pieces[0].value(0.0).abs() > SHAPE_TOL || (pieces.last().unwrap().value(1.0) - 1.0).abs() > SHAPE_TOL {
            return Err(Error::InvalidInput("map must send 0 to 0 and 1 to 1".into()));
        }
        for w in pieces.windows(2) {
            let b = w[0].hi;
            if (w[0].value(b) - w[1].value(b)).abs() > SHAPE_TOL || (w[0].slope(b) - w[1].slope(b)).abs() > SHAPE_TOL {
                return Err(Error::InvalidInput(format!("map is not C^1 at {b}")));
            }
        }
        // slopes are affine on each piece, so checking the ends suffices
        if pieces.iter().any(|p| p.slope(p.lo) <= 0.0 || p.slope(p.hi) <= 0.0) {
            return Err(Error::InvalidInput("map must be strictly increasing".into()));
        }
        let line = full_line(&pieces);
        Ok(OddPiecewiseMap { breaks, coeffs, line })
    }

    /// The identity map.
    pub fn identity() -> Self {
        Self::new(vec![0.0, 1.0], vec![[0.0, 1.0, 0.0]]).expect("identity is valid")
    }

    fn piece_at(&self, x: f64) -> &Piece {
        let i = self.line.partition_point(|p| p.hi < x);
        &self.line[i.min(self.line.len() - 1)]
    }

    /// Value of the extended map at any real `x`.
    pub fn value(&self, x: f64) -> f64 {
        self.piece_at(x).value(x)
    }

    pub fn derivative(&self, x: f64) -> f64 {
        self.piece_at(x).slope(x)
    }

    pub fn second_derivative(&self, x: f64) -> f64 {
        self.piece_at(x).curvature()
    }

    pub fn breaks(&self) -> &[f64] {
        &self.breaks
    }

    /// Largest second derivative in absolute value (a Lipschitz bound of the derivative).
    pub fn derivative_lipschitz(&self) -> f64 {
        self.coeffs.iter().map(|c| (2.0 * c[2]).abs()).fold(0.0, f64::max)
    }
}

fn full_line(pieces: &[Piece]) -> Vec<Piece> {
    let last = pieces.last().unwrap();
    let end_slope = last.slope(1.0);
    let mut line = Vec::with_capacity(2 * pieces.len() + 2);
    // x <= -1: -1 + s (x + 1)
    line.push(Piece { lo: f64::NEG_INFINITY, hi: -1.0, c: [end_slope - 1.0, end_slope, 0.0] });
    for p in pieces.iter().rev() {
        // -q(-x) = -c0 + c1 x - c2 x^2
        line.push(Piece { lo: -p.hi, hi: -p.lo, c: [-p.c[0], p.c[1], -p.c[2]] });
    }
    line.extend_from_slice(pieces);
    line.push(Piece { lo: 1.0, hi: f64::INFINITY, c: [1.0 - end_slope, end_slope, 0.0] });
    line
}

/// The mollified and renormalized map `psi_eps = phi_eps / phi_eps(1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MollifiedMap {
    base: OddPiecewiseMap,
    eps: f64,
    scale: f64,
    /// Points where the second derivative of the base map jumps, with the jump.
    jumps: Vec<(f64, f64)>,
}

impl MollifiedMap {
    pub fn new(base: OddPiecewiseMap, eps: f64) -> Result<Self> {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::InvalidInput(format!("epsilon must lie in (0, 1), got {eps}")));
        }
        let jumps = base
            .line
            .windows(2)
            .map(|w| (w[0].hi, w[1].curvature() - w[0].curvature()))
            .filter(|(_, j)| *j != 0.0)
            .collect();
        let mut m = MollifiedMap { base, eps, scale: 1.0, jumps };
        m.scale = m.convolve(1.0, 0);
        Ok(m)
    }

    pub fn epsilon(&self) -> f64 {
        self.eps
    }

    pub fn base(&self) -> &OddPiecewiseMap {
        &self.base
    }

    /// `d^order/dx^order` of `phi_eps(x)` for `order` in `0..=2`, by partial moments.
    fn convolve(&self, x: f64, order: usize) -> f64 {
        let bump = Bump::get();
        let eps = self.eps;
        let mut acc = 0.0;
        for p in &self.base.line {
            // y = x - eps z in [lo, hi]  <=>  z in [(x - hi)/eps, (x - lo)/eps]
            let z_lo = ((x - p.hi) / eps).max(-1.0);
            let z_hi = ((x - p.lo) / eps).min(1.0);
            if z_lo >= z_hi {
                continue;
            }
            let d = |k: usize| bump.partial_moment(k, z_hi) - bump.partial_moment(k, z_lo);
            acc += match order {
                0 => p.value(x) * d(0) - eps * p.slope(x) * d(1) + eps * eps * p.c[2] * d(2),
                1 => p.slope(x) * d(0) - eps * p.curvature() * d(1),
                _ => p.curvature() * d(0),
            };
        }
        acc
    }

    pub fn value(&self, x: f64) -> f64 {
        x.signum() * self.convolve(x.abs(), 0) / self.scale
    }

    /// The smoothed density `R_eps = psi_eps'`; even in `x`.
    pub fn derivative(&self, x: f64) -> f64 {
        self.convolve(x.abs(), 1) / self.scale
    }

    pub fn second_derivative(&self, x: f64) -> f64 {
        x.signum() * self.convolve(x.abs(), 2) / self.scale
    }

    pub fn third_derivative(&self, x: f64) -> f64 {
        let bump = Bump::get();
        let xa = x.abs();
        let s: f64 = self.jumps.iter().map(|(b, j)| j * bump.density((xa - b) / self.eps) / self.eps).sum();
        s / self.scale
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bump_has_unit_mass_and_zero_odd_moment() {
        let b = Bump::get();
        assert!((b.partial_moment(0, 1.0) - 1.0).abs() < 1e-14);
        assert!(b.partial_moment(1, 1.0).abs() < 1e-15);
        assert!((b.partial_moment(0, 0.0) - 0.5).abs() < 1e-14);
    }

    #[test]
    fn partial_moments_match_direct_quadrature() {
        let b = Bump::get();
        for &t in &[-0.93, -0.41, 0.0123, 0.5, 0.977] {
            for k in 0..3 {
                let direct = integrate(&|z: f64| z.powi(k as i32) * b.density(z), -1.0, t, 1e-16);
                assert!((b.partial_moment(k, t) - direct).abs() < 1e-13, "k={k} t={t}");
            }
        }
    }

    #[test]
    fn rejects_non_monotone_or_kinked_maps() {
        // slope jumps at 0.5
        let kinked = OddPiecewiseMap::new(vec![0.0, 0.5, 1.0], vec![[0.0, 1.5, 0.0], [0.5, 0.5, 0.0]]);
        assert!(kinked.is_err());
        assert!(OddPiecewiseMap::new(vec![0.0, 1.0], vec![[0.0, 2.0, -1.5]]).is_err());
        assert!(OddPiecewiseMap::new(vec![0.0, 1.0], vec![[0.0, 0.5, 0.0]]).is_err());
    }

    #[test]
    fn odd_extension_and_affine_tail() {
        let m = OddPiecewiseMap::new(vec![0.0, 1.0], vec![[0.0, 1.5, -0.5]]).unwrap();
        assert!((m.value(-0.4) + m.value(0.4)).abs() < 1e-15);
        assert!((m.value(1.2) - (1.0 + 0.5 * 0.2)).abs() < 1e-15);
        assert!((m.derivative(-1.3) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn identity_survives_mollification() {
        let m = MollifiedMap::new(OddPiecewiseMap::identity(), 0.3).unwrap();
        for &x in &[-0.99, -0.2, 0.0, 0.45, 0.999] {
            assert!((m.value(x) - x).abs() < 1e-14);
            assert!((m.derivative(x) - 1.0).abs() < 1e-14);
            assert!(m.second_derivative(x).abs() < 1e-14);
        }
    }

    #[test]
    fn mollified_derivatives_match_differences() {
        // 2.5x - 2x^2 on [0, 0.5), then 0.5 + 0.5x
        let base = OddPiecewiseMap::new(vec![0.0, 0.5, 1.0], vec![[0.0, 2.5, -2.0], [0.5, 0.5, 0.0]]).unwrap();
        let m = MollifiedMap::new(base, 0.1).unwrap();
        let h = 1e-5;
        for &x in &[0.05, 0.46, 0.53, 0.7, -0.2] {
            let fd1 = (m.value(x + h) - m.value(x - h)) / (2.0 * h);
            let fd2 = (m.derivative(x + h) - m.derivative(x - h)) / (2.0 * h);
            let fd3 = (m.second_derivative(x + h) - m.second_derivative(x - h)) / (2.0 * h);
            assert!((fd1 - m.derivative(x)).abs() < 1e-8, "x={x}");
            assert!((fd2 - m.second_derivative(x)).abs() < 1e-6, "x={x}");
            assert!((fd3 - m.third_derivative(x)).abs() < 1e-3 * (1.0 + m.third_derivative(x).abs()), "x={x}");
        }
        assert!((m.value(1.0) - 1.0).abs() < 1e-15);
    }
}
