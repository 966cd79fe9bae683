//! Unit-disk geometry: hyperbolic distance and disk automorphisms.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub(crate) fn check_inside(z: Complex64) -> Result<()> {
    if z.norm_sqr() < 1.0 {
        Ok(())
    } else {
        Err(Error::OutsideDisk { re: z.re, im: z.im })
    }
}

/// `artanh(|z - w| / |1 - z conj(w)|)`.
pub fn hyperbolic_distance(z: Complex64, w: Complex64) -> Result<f64> {
    check_inside(z)?;
    check_inside(w)?;
    let ratio = (z - w).norm() / (Complex64::new(1.0, 0.0) - z * w.conj()).norm();
    Ok(ratio.min(1.0).atanh())
}

/// The same distance restricted to the diameter `(-1, 1)`.
pub fn interval_distance(a: f64, b: f64) -> Result<f64> {
    for v in [a, b] {
        if !(v.abs() < 1.0) {
            return Err(Error::Domain { value: v, lo: -1.0, hi: 1.0 });
        }
    }
    Ok(((a - b).abs() / (1.0 - a * b).abs()).min(1.0).atanh())
}

/// `T(z) = e^{i alpha} (z - a) / (1 - conj(a) z)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mobius {
    pub rotation: f64,
    pub center: Complex64,
}

impl Mobius {
    pub fn new(rotation: f64, center: Complex64) -> Result<Self> {
        check_inside(center)?;
        Ok(Mobius { rotation, center })
    }

    /// A random automorphism with `|a| < max_radius`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, max_radius: f64) -> Self {
        let radius = max_radius * rng.gen::<f64>().sqrt();
        let angle = rng.gen_range(0.0..std::f64::consts::TAU);
        Mobius { rotation: rng.gen_range(0.0..std::f64::consts::TAU), center: Complex64::from_polar(radius, angle) }
    }

    fn unit(&self) -> Complex64 {
        Complex64::from_polar(1.0, self.rotation)
    }

    pub fn apply(&self, z: Complex64) -> Complex64 {
        self.unit() * (z - self.center) / (1.0 - self.center.conj() * z)
    }

    pub fn derivative(&self, z: Complex64) -> Complex64 {
        let d = 1.0 - self.center.conj() * z;
        self.unit() * (1.0 - self.center.norm_sqr()) / (d * d)
    }

    pub fn inverse(&self) -> Mobius {
        // T^{-1}(w) = S(e^{-i alpha} w) with S(v) = (v + a) / (1 + conj(a) v)
        Mobius { rotation: 0.0, center: -self.center }.after_rotation(-self.rotation)
    }

    /// `self` precomposed with the rotation `z -> e^{i beta} z`.
    fn after_rotation(&self, beta: f64) -> Mobius {
        let r = Complex64::from_polar(1.0, beta);
        // e^{i alpha}(r z - a)/(1 - conj(a) r z) = e^{i(alpha + beta)}(z - a/r)/(1 - conj(a/r) z)
        Mobius { rotation: self.rotation + beta, center: self.center / r }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn distance_examples() {
        let z = Complex64::new(0.5, 0.0);
        assert!((hyperbolic_distance(Complex64::new(0.0, 0.0), z).unwrap() - 0.5f64.atanh()).abs() < 1e-15);
        assert!((0.5f64.atanh() - 0.549_306_144_334_054_8).abs() < 1e-15);
        let w = Complex64::new(0.3, -0.7);
        assert_eq!(hyperbolic_distance(w, w).unwrap(), 0.0);
        assert!(hyperbolic_distance(Complex64::new(1.0, 0.0), w).is_err());
        assert!((interval_distance(-0.2, 0.6).unwrap() - hyperbolic_distance(Complex64::new(-0.2, 0.0), Complex64::new(0.6, 0.0)).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn automorphism_maps_center_to_origin_and_inverts() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let t = Mobius::random(&mut rng, 0.9);
            assert!(t.apply(t.center).norm() < 1e-15);
            let z = Complex64::new(0.1, -0.4);
            assert!((t.inverse().apply(t.apply(z)) - z).norm() < 1e-13);
            let h = 1e-6;
            let fd = (t.apply(z + h) - t.apply(z - h)) / (2.0 * h);
            assert!((fd - t.derivative(z)).norm() < 1e-8);
        }
    }
}
