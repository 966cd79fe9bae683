use crate::error::{Error, Result};

/// Shape-preserving (Fritsch-Carlson) cubic Hermite interpolant.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneCubic {
    x: Vec<f64>,
    y: Vec<f64>,
    d: Vec<f64>,
}

impl MonotoneCubic {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        let n = x.len();
        if n < 2 || y.len() != n {
            return Err(Error::InvalidInput("tabulated metric needs at least two (u, R) pairs of equal length".into()));
        }
        if x.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidInput("tabulated abscissae must be strictly increasing".into()));
        }
        if y.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
            return Err(Error::InvalidInput("tabulated densities must be positive and finite".into()));
        }
        let secants: Vec<f64> = x.windows(2).zip(y.windows(2)).map(|(xw, yw)| (yw[1] - yw[0]) / (xw[1] - xw[0])).collect();
        let mut d = vec![0.0; n];
        d[0] = secants[0];
        d[n - 1] = secants[n - 2];
        for i in 1..n - 1 {
            let (a, b) = (secants[i - 1], secants[i]);
            if a * b <= 0.0 {
                d[i] = 0.0;
            } else {
                // weighted harmonic mean
                let (h0, h1) = (x[i] - x[i - 1], x[i + 1] - x[i]);
                let (w1, w2) = (2.0 * h1 + h0, h1 + 2.0 * h0);
                d[i] = (w1 + w2) / (w1 / a + w2 / b);
            }
        }
        Ok(MonotoneCubic { x, y, d })
    }

    pub fn lo(&self) -> f64 {
        self.x[0]
    }

    pub fn hi(&self) -> f64 {
        *self.x.last().unwrap()
    }

    pub fn knots(&self) -> (&[f64], &[f64]) {
        (&self.x, &self.y)
    }

    /// Value and first two derivatives at `t`.
    pub fn eval(&self, t: f64) -> (f64, f64, f64) {
        let i = self.x.partition_point(|&v| v <= t).clamp(1, self.x.len() - 1) - 1;
        let h = self.x[i + 1] - self.x[i];
        let s = (t - self.x[i]) / h;
        let (y0, y1, d0, d1) = (self.y[i], self.y[i + 1], self.d[i] * h, self.d[i + 1] * h);
        // cubic in s: a + b s + c s^2 + e s^3
        let a = y0;
        let b = d0;
        let c = 3.0 * (y1 - y0) - 2.0 * d0 - d1;
        let e = 2.0 * (y0 - y1) + d0 + d1;
        let v = a + s * (b + s * (c + s * e));
        let dv = (b + s * (2.0 * c + 3.0 * s * e)) / h;
        let d2v = (2.0 * c + 6.0 * s * e) / (h * h);
        (v, dv, d2v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_knots_and_stays_monotone() {
        let x = vec![-1.0, -0.5, 0.0, 0.5, 1.0];
        let y = vec![0.2, 0.9, 1.0, 0.9, 0.2];
        let m = MonotoneCubic::new(x.clone(), y.clone()).unwrap();
        for (xi, yi) in x.iter().zip(&y) {
            assert!((m.eval(*xi).0 - yi).abs() < 1e-15);
        }
        let mut prev = m.eval(0.0).0;
        for i in 1..=100 {
            let v = m.eval(i as f64 / 100.0).0;
            assert!(v <= prev + 1e-15);
            prev = v;
        }
    }

    #[test]
    fn derivatives_match_differences() {
        let m = MonotoneCubic::new(vec![0.0, 0.3, 0.7, 1.0], vec![1.0, 1.4, 2.5, 2.6]).unwrap();
        let h = 1e-6;
        for &t in &[0.1, 0.45, 0.8] {
            let fd = (m.eval(t + h).0 - m.eval(t - h).0) / (2.0 * h);
            assert!((fd - m.eval(t).1).abs() < 1e-7);
        }
    }

    #[test]
    fn rejects_bad_tables() {
        assert!(MonotoneCubic::new(vec![0.0, 0.0], vec![1.0, 1.0]).is_err());
        assert!(MonotoneCubic::new(vec![0.0, 1.0], vec![1.0, -1.0]).is_err());
        assert!(MonotoneCubic::new(vec![0.0], vec![1.0]).is_err());
    }
}
