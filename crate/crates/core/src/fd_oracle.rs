//! Independent finite-difference solver for `Δf + (R'/R)(f) |∇f|² = 0` on the
//! disk, used to cross-check the transform-based solution.
//!
//! The equation is relaxed in divergence form `div(R(f) ∇f) = 0` on a Cartesian
//! grid over `[-1, 1]^2`, with `R` taken at the midpoint of each arm, so every
//! nodal update is a positively weighted mean of its neighbours. Nodes next to
//! the circle use Shortley-Weller arms that end on the circle itself, carrying
//! the boundary value at the intersection angle. The sweep is successive
//! over-relaxation, started from the interpolated solution on the grid of half
//! the resolution when `n` is odd and large enough.

use std::fmt::Write as _;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::harmonic::{BoundaryData, HarmonicField};
use crate::metric::Metric1D;

/// Nodes closer than this fraction of `h` to the circle take the boundary value.
const PIN_FRACTION: f64 = 1e-3;
const STALL_WINDOW: usize = 100;
const ACCELERATE_BELOW: f64 = 1e-4;
const MIN_RESOLUTION: usize = 33;

#[derive(Debug, Clone, Copy)]
enum Arm {
    Node(usize),
    Fixed(f64),
}

#[derive(Debug, Clone)]
struct Stencil {
    node: usize,
    /// East, west, north, south.
    arms: [Arm; 4],
    lengths: [f64; 4],
}

/// Grid values of a relaxation solve; `None` outside the open disk.
#[derive(Debug, Clone)]
pub struct GridField {
    n: usize,
    h: f64,
    values: Vec<Option<f64>>,
    /// Points on the circle where arms end, with their boundary values.
    boundary: Vec<(Complex64, f64)>,
    sweeps: usize,
    last_update: f64,
}

impl GridField {
    pub fn resolution(&self) -> usize {
        self.n
    }

    pub fn spacing(&self) -> f64 {
        self.h
    }

    pub fn sweeps(&self) -> usize {
        self.sweeps
    }

    pub fn last_update(&self) -> f64 {
        self.last_update
    }

    pub fn point(&self, i: usize, j: usize) -> Complex64 {
        Complex64::new(-1.0 + i as f64 * self.h, -1.0 + j as f64 * self.h)
    }

    pub fn value(&self, i: usize, j: usize) -> Option<f64> {
        self.values[j * self.n + i]
    }

    /// Every node inside the disk with its value.
    pub fn interior(&self) -> Vec<(Complex64, f64)> {
        let mut out = Vec::new();
        for j in 0..self.n {
            for i in 0..self.n {
                if let Some(v) = self.value(i, j) {
                    out.push((self.point(i, j), v));
                }
            }
        }
        out
    }

    pub fn boundary(&self) -> &[(Complex64, f64)] {
        &self.boundary
    }

    /// Rows `x,y,f` for interior nodes followed by the boundary points.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,y,f\n");
        for (z, v) in self.interior().into_iter().chain(self.boundary.iter().copied()) {
            writeln!(out, "{:.16e},{:.16e},{:.16e}", z.re, z.im, v).unwrap();
        }
        out
    }
}

fn build_stencils(n: usize, h: f64, boundary: &BoundaryData, values: &mut [Option<f64>], ring: &mut Vec<(Complex64, f64)>) -> Vec<Stencil> {
    let pos = |k: usize| -1.0 + k as f64 * h;
    let inside = |i: usize, j: usize| {
        let (x, y) = (pos(i), pos(j));
        1.0 - (x * x + y * y).sqrt() > PIN_FRACTION * h
    };
    let on_circle = |z: Complex64| boundary.value_at(z.im.atan2(z.re));
    for j in 0..n {
        for i in 0..n {
            let z = Complex64::new(pos(i), pos(j));
            if inside(i, j) {
                values[j * n + i] = Some(0.0);
            } else if z.norm() < 1.0 {
                // pinned to the circle
                values[j * n + i] = Some(on_circle(z));
            }
        }
    }
    let mut stencils = Vec::new();
    for j in 1..n - 1 {
        for i in 1..n - 1 {
            if !inside(i, j) {
                continue;
            }
            let (x, y) = (pos(i), pos(j));
            let mut arms = [Arm::Fixed(0.0); 4];
            let mut lengths = [h; 4];
            let dirs = [(1i64, 0i64), (-1, 0), (0, 1), (0, -1)];
            for (d, (di, dj)) in dirs.into_iter().enumerate() {
                let (ni, nj) = ((i as i64 + di) as usize, (j as i64 + dj) as usize);
                let idx = nj * n + ni;
                if inside(ni, nj) {
                    arms[d] = Arm::Node(idx);
                } else if let Some(v) = values[idx] {
                    arms[d] = Arm::Fixed(v);
                } else {
                    // arm ends where the ray from (x, y) meets the circle
                    let s = if di != 0 {
                        (1.0 - y * y).sqrt() - di as f64 * x
                    } else {
                        (1.0 - x * x).sqrt() - dj as f64 * y
                    };
                    let hit = Complex64::new(x + di as f64 * s, y + dj as f64 * s);
                    let v = on_circle(hit);
                    ring.push((hit, v));
                    arms[d] = Arm::Fixed(v);
                    lengths[d] = s;
                }
            }
            stencils.push(Stencil { node: j * n + i, arms, lengths });
        }
    }
    stencils
}

/// Mean of the coarse values surrounding fine node `(i, j)`; coarse node `(a, b)`
/// sits at fine node `(2a, 2b)`.
fn interpolate_coarse(coarse: &GridField, i: usize, j: usize) -> Option<f64> {
    let (mut sum, mut count) = (0.0, 0);
    for b in [j / 2, j.div_ceil(2)] {
        for a in [i / 2, i.div_ceil(2)] {
            if let Some(v) = coarse.value(a, b).filter(|v| v.is_finite()) {
                sum += v;
                count += 1;
            }
        }
    }
    (count > 0).then(|| sum / count as f64)
}

/// Relaxes the discrete equation on an `n x n` grid.
pub fn fd_solve_oracle(metric: &Metric1D, boundary: &BoundaryData, n: usize) -> Result<GridField> {
    fd_solve_with(metric, boundary, n, &Tolerances::default())
}

pub fn fd_solve_with(metric: &Metric1D, boundary: &BoundaryData, n: usize, tol: &Tolerances) -> Result<GridField> {
    if n < MIN_RESOLUTION {
        return Err(Error::InvalidInput(format!("grid resolution must be at least {MIN_RESOLUTION}, got {n}")));
    }
    let (lo, hi) = metric.domain();
    let h = 2.0 / (n - 1) as f64;
    let mut values = vec![None; n * n];
    let mut ring = Vec::new();
    let stencils = build_stencils(n, h, boundary, &mut values, &mut ring);
    if let Some(&(_, v)) = ring.iter().find(|(_, v)| !(*v >= lo && *v <= hi)) {
        return Err(Error::InvalidInput(format!("boundary value {v} lies outside the metric domain [{lo}, {hi}]")));
    }
    let samples = boundary.samples();
    let start = samples.iter().sum::<f64>() / samples.len() as f64;
    let margin = 1e-12 * (hi - lo).min(1.0);
    let mut u: Vec<f64> = values.iter().map(|v| v.unwrap_or(f64::NAN)).collect();
    let half = n.div_ceil(2);
    let coarse = if n % 2 == 1 && half >= MIN_RESOLUTION { Some(fd_solve_with(metric, boundary, half, tol)?) } else { None };
    for s in &stencils {
        let guess = coarse.as_ref().and_then(|c| interpolate_coarse(c, s.node % n, s.node / n)).unwrap_or(start);
        u[s.node] = guess.clamp(lo + margin, hi - margin);
    }
    // Gauss-Seidel until the updates are small, since over-relaxed steps far from
    // the solution can strand nodes at a singular endpoint of the domain. Then the
    // optimal Laplacian factor, halved towards 1 whenever a window of sweeps stalls.
    let optimal = 2.0 / (1.0 + (std::f64::consts::PI / (n - 1) as f64).sin());
    let mut omega = 1.0;
    let mut accelerated = false;
    let mut window_start = f64::INFINITY;
    let mut sweeps = 0;
    let mut last_update = f64::INFINITY;
    while sweeps < tol.fd_max_sweeps {
        sweeps += 1;
        let mut largest: f64 = 0.0;
        for s in &stencils {
            let u0 = u[s.node];
            let arm = |d: usize| match s.arms[d] {
                Arm::Node(k) => u[k],
                Arm::Fixed(v) => v,
            };
            let [he, hw, hn, hs] = s.lengths;
            let coeffs = [2.0 / (he * (he + hw)), 2.0 / (hw * (he + hw)), 2.0 / (hn * (hn + hs)), 2.0 / (hs * (hn + hs))];
            let (mut num, mut den) = (0.0, 0.0);
            for (d, a) in coeffs.into_iter().enumerate() {
                let ud = arm(d);
                let w = a * metric.r(0.5 * (u0 + ud));
                num += w * ud;
                den += w;
            }
            let target = if den > 0.0 && den.is_finite() {
                num / den
            } else {
                (0..4).map(|d| coeffs[d] * arm(d)).sum::<f64>() / coeffs.iter().sum::<f64>()
            };
            let mut step = omega * (target - u0);
            while !(u0 + step > lo + margin && u0 + step < hi - margin) {
                step *= 0.5;
            }
            u[s.node] = u0 + step;
            largest = largest.max(step.abs());
        }
        last_update = largest;
        if !accelerated && largest < ACCELERATE_BELOW {
            accelerated = true;
            omega = optimal;
            window_start = f64::INFINITY;
        }
        if accelerated && sweeps % STALL_WINDOW == 0 {
            if largest > 0.9 * window_start {
                omega = 1.0 + 0.5 * (omega - 1.0);
            }
            window_start = largest;
        }
        if !largest.is_finite() {
            break;
        }
        if largest < tol.fd_update {
            break;
        }
    }
    if !(last_update <= tol.fd_failure) {
        return Err(Error::NoConvergence { sweeps, last_update });
    }
    for s in &stencils {
        values[s.node] = Some(u[s.node]);
    }
    Ok(GridField { n, h, values, boundary: ring, sweeps, last_update })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SupDifference {
    pub max: f64,
    pub at: Complex64,
    pub nodes: usize,
}

/// Largest `|grid - field|` over nodes with `|z| <= radius`.
pub fn sup_difference<F: HarmonicField + ?Sized>(grid: &GridField, field: &F, radius: f64) -> Result<SupDifference> {
    let nodes: Vec<(Complex64, f64)> = grid.interior().into_iter().filter(|(z, _)| z.norm() <= radius).collect();
    let diffs: Vec<(f64, Complex64)> = nodes
        .par_iter()
        .map(|&(z, v)| Ok(((field.value(z)? - v).abs(), z)))
        .collect::<Result<_>>()?;
    let (max, at) = diffs.into_iter().fold((0.0, Complex64::new(0.0, 0.0)), |acc, d| if d.0 > acc.0 { d } else { acc });
    Ok(SupDifference { max, at, nodes: nodes.len() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harmonic::{ClosedFormField, RHarmonicField};

    #[test]
    fn constant_boundary_converges_in_one_sweep() {
        let b = BoundaryData::constant(0.3, 256).unwrap();
        let g = fd_solve_oracle(&Metric1D::cosine(), &b, 33).unwrap();
        assert_eq!(g.sweeps(), 1);
        // pinned nodes carry the interpolated boundary value, exact up to rounding
        assert!(g.interior().iter().all(|(_, v)| (*v - 0.3).abs() < 1e-14));
    }

    #[test]
    fn laplace_with_linear_data_is_reproduced() {
        let b = BoundaryData::cosine(1024).unwrap();
        let g = fd_solve_oracle(&Metric1D::constant(), &b, 65).unwrap();
        // Re z is reproduced by the five-point scheme up to boundary interpolation error
        let worst = g.interior().iter().map(|(z, v)| (z.re - v).abs()).fold(0.0, f64::max);
        assert!(worst < 1e-6, "{worst}");
    }

    #[test]
    fn rejects_coarse_grids_and_reports_csv() {
        let b = BoundaryData::cosine(256).unwrap();
        assert!(fd_solve_oracle(&Metric1D::constant(), &b, 32).is_err());
        let g = fd_solve_oracle(&Metric1D::constant(), &b, 33).unwrap();
        let csv = g.to_csv();
        assert!(csv.starts_with("x,y,f\n"));
        assert_eq!(csv.lines().count(), 1 + g.interior().len() + g.boundary().len());
    }

    #[test]
    fn tight_sweep_cap_reports_no_convergence() {
        let b = BoundaryData::random_smooth(1, 256).unwrap();
        let tol = Tolerances { fd_max_sweeps: 3, ..Tolerances::default() };
        assert!(matches!(fd_solve_with(&Metric1D::constant(), &b, 65, &tol), Err(Error::NoConvergence { .. })));
    }

    #[test]
    fn nonlinear_solve_converges_towards_the_transform_solution() {
        let m = Metric1D::cosine();
        let b = BoundaryData::random_smooth(6, 1024).unwrap();
        let exact = RHarmonicField::new(&m, &b).unwrap();
        let coarse = sup_difference(&fd_solve_oracle(&m, &b, 41).unwrap(), &exact, 0.95).unwrap();
        let fine = sup_difference(&fd_solve_oracle(&m, &b, 81).unwrap(), &exact, 0.95).unwrap();
        assert!(fine.max < coarse.max / 3.0, "{} {}", coarse.max, fine.max);
    }

    #[test]
    fn hyperbolic_tanh_is_a_discrete_fixed_point_to_second_order() {
        let b = BoundaryData::tanh_cosine(1.5, 1024).unwrap();
        let g = fd_solve_oracle(&Metric1D::hyperbolic(), &b, 81).unwrap();
        let d = sup_difference(&g, &ClosedFormField::tanh_linear(1.5), 1.0).unwrap();
        assert!(d.max < 1e-3, "{}", d.max);
    }
}
