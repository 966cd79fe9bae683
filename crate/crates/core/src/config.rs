//! Numerical tolerances shared by every module, gathered in one place so the
//! command-line front end can override and record them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Absolute tolerance of adaptive quadrature.
    pub quadrature: f64,
    /// Running integral estimate above which a density is declared non-integrable.
    pub divergence_ceiling: f64,
    /// Bound checks pass when the minimum slack is at least `-check_slack`.
    pub check_slack: f64,
    /// Slack magnitude reported as an equality case.
    pub equality: f64,
    /// Boundary samples used by the Poisson integral.
    pub sample_count: usize,
    /// Outer radius of evaluation grids.
    pub eval_radius: f64,
    /// Relaxation stops once the largest update falls below this.
    pub fd_update: f64,
    /// An update above this at the sweep cap is a convergence failure.
    pub fd_failure: f64,
    pub fd_max_sweeps: usize,
    /// Relative residual accepted by the inverse H-transform.
    pub inverse: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            quadrature: 1e-12,
            divergence_ceiling: 1e12,
            check_slack: 1e-9,
            equality: 1e-9,
            sample_count: 1024,
            eval_radius: 0.95,
            fd_update: 1e-10,
            fd_failure: 1e-8,
            fd_max_sweeps: 100_000,
            inverse: 1e-12,
        }
    }
}

impl Tolerances {
    /// Labels accepted by [`Tolerances::set`].
    pub const LABELS: [&'static str; 10] = [
        "quadrature",
        "divergence_ceiling",
        "check_slack",
        "equality",
        "sample_count",
        "eval_radius",
        "fd_update",
        "fd_failure",
        "fd_max_sweeps",
        "inverse",
    ];

    pub fn set(&mut self, label: &str, value: f64) -> Result<()> {
        if !value.is_finite() || value <= 0.0 {
            return Err(Error::InvalidInput(format!("tolerance {label} must be positive, got {value}")));
        }
        match label {
            "quadrature" => self.quadrature = value,
            "divergence_ceiling" => self.divergence_ceiling = value,
            "check_slack" => self.check_slack = value,
            "equality" => self.equality = value,
            "sample_count" => self.sample_count = value as usize,
            "eval_radius" if value < 1.0 => self.eval_radius = value,
            "fd_update" => self.fd_update = value,
            "fd_failure" => self.fd_failure = value,
            "fd_max_sweeps" => self.fd_max_sweeps = value as usize,
            "inverse" => self.inverse = value,
            _ => return Err(Error::InvalidInput(format!("unknown or out-of-range tolerance {label}={value}"))),
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overrides_apply_and_reject_unknown_labels() {
        let mut t = Tolerances::default();
        t.set("check_slack", 1e-6).unwrap();
        assert_eq!(t.check_slack, 1e-6);
        assert!(t.set("nonsense", 1.0).is_err());
        assert!(t.set("eval_radius", 1.5).is_err());
        assert!(t.set("quadrature", -1.0).is_err());
    }
}
