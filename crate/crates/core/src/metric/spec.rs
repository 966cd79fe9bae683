use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{Metric1D, MetricFamily};
use crate::error::{Error, Result};

/// JSON form of a metric: `{"kind": "...", "params": {...}}`, or for tables
/// `{"kind": "tabulated", "u": [...], "R": [...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricSpec {
    pub kind: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub params: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u: Option<Vec<f64>>,
    #[serde(rename = "R", default, skip_serializing_if = "Option::is_none")]
    pub r: Option<Vec<f64>>,
}

impl MetricSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    fn param(&self, name: &str) -> Result<f64> {
        self.params
            .get(name)
            .copied()
            .ok_or_else(|| Error::Parse(format!("metric kind {:?} requires parameter {name:?}", self.kind)))
    }

    fn param_or(&self, name: &str, default: f64) -> f64 {
        self.params.get(name).copied().unwrap_or(default)
    }

    pub fn build(&self) -> Result<Metric1D> {
        match self.kind.as_str() {
            "constant" => Ok(Metric1D::constant()),
            "exponential" => Ok(Metric1D::exponential(self.param("c")?)),
            "cosine" => Ok(Metric1D::cosine()),
            "hyperbolic" => Ok(Metric1D::hyperbolic()),
            "secant" => Ok(Metric1D::secant()),
            "parabolic" => Metric1D::parabolic(self.param_or("delta", 0.1)),
            "gaussian" => Ok(Metric1D::gaussian(self.param("c")?)),
            "lemma_psi" => Metric1D::lemma_psi(self.param("a")?, self.param("s")?),
            "mollified_psi" => Metric1D::mollified_psi(self.param("a")?, self.param("s")?, self.param("epsilon")?),
            "half_plane_one_minus_exp" | "half_plane" => Ok(Metric1D::half_plane()),
            "tabulated" => {
                let (Some(u), Some(r)) = (&self.u, &self.r) else {
                    return Err(Error::Parse("tabulated metric needs \"u\" and \"R\" arrays".into()));
                };
                Metric1D::tabulated(u.clone(), r.clone())
            }
            other => Err(Error::Parse(format!("unknown metric kind {other:?}"))),
        }
    }

    pub fn describe(metric: &Metric1D) -> MetricSpec {
        let mut params = BTreeMap::new();
        let (mut u, mut r) = (None, None);
        let kind = match metric.family() {
            MetricFamily::Constant => "constant",
            MetricFamily::Exponential { c } => {
                params.insert("c".into(), *c);
                "exponential"
            }
            MetricFamily::Cosine => "cosine",
            MetricFamily::Hyperbolic => "hyperbolic",
            MetricFamily::Secant => "secant",
            MetricFamily::Parabolic { delta } => {
                params.insert("delta".into(), *delta);
                "parabolic"
            }
            MetricFamily::Gaussian { c } => {
                params.insert("c".into(), *c);
                "gaussian"
            }
            MetricFamily::LemmaPsi { a, s, .. } => {
                params.insert("a".into(), *a);
                params.insert("s".into(), *s);
                "lemma_psi"
            }
            MetricFamily::Mollified { map, psi } => {
                params.insert("epsilon".into(), map.epsilon());
                match psi {
                    Some((a, s)) => {
                        params.insert("a".into(), *a);
                        params.insert("s".into(), *s);
                        "mollified_psi"
                    }
                    None => "mollified",
                }
            }
            MetricFamily::Tabulated(t) => {
                let (x, y) = t.knots();
                u = Some(x.to_vec());
                r = Some(y.to_vec());
                "tabulated"
            }
            MetricFamily::HalfPlaneOneMinusExp => "half_plane_one_minus_exp",
        };
        MetricSpec { kind: kind.into(), params, u, r }
    }
}

impl std::str::FromStr for Metric1D {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        MetricSpec::from_json(s)?.build()
    }
}
