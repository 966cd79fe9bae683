//! Python bindings for `schwarz-core`.
//!
//! Reports cross the boundary as JSON text decoded with the standard `json`
//! module, so Python callers get plain dicts.

use num_complex::Complex64;
use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;

use schwarz_core::bounds;
use schwarz_core::gallery;
use schwarz_core::harmonic::RHarmonicField;
use schwarz_core::lemma;
use schwarz_core::{BoundaryData, BoundarySpec, Error, HTransform, HarmonicField, Metric1D, MetricSpec, Tolerances};

fn to_py(e: Error) -> PyErr {
    if e.is_numeric() {
        PyArithmeticError::new_err(e.to_string())
    } else {
        PyValueError::new_err(e.to_string())
    }
}

fn json_loads<'py>(py: Python<'py>, text: &str) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (text,))
}

/// JSON for a metric given by kind and keyword parameters.
fn metric_json(kind: &str, params: &[(String, f64)]) -> String {
    let params: serde_json::Map<String, serde_json::Value> = params.iter().map(|(k, v)| (k.clone(), (*v).into())).collect();
    serde_json::json!({ "kind": kind, "params": params }).to_string()
}

/// A conformal metric `R(u)|du|` on an interval of the line.
#[pyclass(name = "Metric", module = "schwarz_lab", frozen)]
struct PyMetric {
    inner: Metric1D,
}

#[pymethods]
impl PyMetric {
    /// `Metric("exponential", c=1.0)`; keyword arguments are the family parameters.
    #[new]
    #[pyo3(signature = (kind, **params))]
    fn new(kind: &str, params: Option<std::collections::HashMap<String, f64>>) -> PyResult<Self> {
        let mut params: Vec<(String, f64)> = params.unwrap_or_default().into_iter().collect();
        params.sort_by(|a, b| a.0.cmp(&b.0));
        Self::from_json(&metric_json(kind, &params))
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let inner = MetricSpec::from_json(text).and_then(|s| s.build()).map_err(to_py)?;
        Ok(PyMetric { inner })
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.name()
    }

    #[getter]
    fn domain(&self) -> (f64, f64) {
        self.inner.domain()
    }

    fn density(&self, u: f64) -> PyResult<f64> {
        self.inner.density(u).map_err(to_py)
    }

    fn curvature(&self, u: f64) -> PyResult<f64> {
        self.inner.curvature_at(u).map_err(to_py)
    }

    fn is_unimodal(&self) -> bool {
        self.inner.is_unimodal(999)
    }

    /// `r = (1/2) ∫R` over the whole interval.
    fn mass(&self) -> PyResult<f64> {
        Ok(HTransform::new(&self.inner).map_err(to_py)?.mass())
    }

    fn h(&self, u: f64) -> PyResult<f64> {
        HTransform::new(&self.inner).and_then(|h| h.eval(u)).map_err(to_py)
    }

    fn h_inverse(&self, t: f64) -> PyResult<f64> {
        HTransform::new(&self.inner).and_then(|h| h.inverse(t)).map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!("Metric({})", self.inner.name())
    }
}

/// Boundary values on the unit circle.
#[pyclass(name = "Boundary", module = "schwarz_lab", frozen)]
struct PyBoundary {
    inner: BoundaryData,
}

#[pymethods]
impl PyBoundary {
    /// Named preset: `step`, `cosine`, `constant`, `tanh-cosine`, `random-smooth`, `random-antipodal`.
    #[staticmethod]
    #[pyo3(signature = (name, **params))]
    fn preset(name: &str, params: Option<std::collections::HashMap<String, f64>>) -> PyResult<Self> {
        let spec = BoundarySpec::Preset { name: name.into(), params: params.unwrap_or_default().into_iter().collect() };
        Ok(PyBoundary { inner: spec.build(Tolerances::default().sample_count).map_err(to_py)? })
    }

    #[staticmethod]
    fn samples(theta: Vec<f64>, values: Vec<f64>) -> PyResult<Self> {
        let inner = BoundaryData::from_samples(&theta, &values, Tolerances::default().sample_count).map_err(to_py)?;
        Ok(PyBoundary { inner })
    }

    fn value_at(&self, theta: f64) -> f64 {
        self.inner.value_at(theta)
    }
}

/// The solution `f` of the `R`-harmonic Dirichlet problem.
#[pyclass(name = "Solution", module = "schwarz_lab", frozen)]
struct PySolution {
    field: RHarmonicField,
}

#[pymethods]
impl PySolution {
    #[new]
    fn new(metric: &PyMetric, boundary: &PyBoundary) -> PyResult<Self> {
        Ok(PySolution { field: RHarmonicField::new(&metric.inner, &boundary.inner).map_err(to_py)? })
    }

    fn value(&self, x: f64, y: f64) -> PyResult<f64> {
        self.field.value(Complex64::new(x, y)).map_err(to_py)
    }

    /// `(f_x, f_y)`.
    fn gradient(&self, x: f64, y: f64) -> PyResult<(f64, f64)> {
        let g = self.field.gradient(Complex64::new(x, y)).map_err(to_py)?;
        Ok((g.re, g.im))
    }

    /// `|∇f| (1 - |z|^2) / (1 - f^2)`.
    fn schwarz_quotient(&self, x: f64, y: f64) -> PyResult<f64> {
        bounds::schwarz_quotient(&self.field, Complex64::new(x, y)).map_err(to_py)
    }
}

/// Main gradient bound on a ring grid of the given radius, as a dict.
#[pyfunction]
#[pyo3(signature = (metric, boundary, radius = 0.95))]
fn check_main_bound<'py>(py: Python<'py>, metric: &PyMetric, boundary: &PyBoundary, radius: f64) -> PyResult<Bound<'py, PyAny>> {
    let grid = bounds::ring_grid(24, 96, radius);
    let report = bounds::check_main_bound(&metric.inner, &boundary.inner, &grid, &Tolerances::default()).map_err(to_py)?;
    json_loads(py, &report.to_json().map_err(to_py)?)
}

/// One of `negative-curvature`, `zero-curvature`, `strip`, `half-plane`.
#[pyfunction]
#[pyo3(signature = (name, n = 3, c = 1.0, k = 1.0))]
fn run_gallery<'py>(py: Python<'py>, name: &str, n: u32, c: f64, k: f64) -> PyResult<Bound<'py, PyAny>> {
    let report = match name {
        "negative-curvature" => gallery::run_negative_curvature_example(n),
        "zero-curvature" => BoundaryData::random_smooth(0, Tolerances::default().sample_count)
            .and_then(|b| gallery::run_zero_curvature_example(c, &b, &bounds::default_grid())),
        "strip" => gallery::run_strip_example(k),
        "half-plane" => gallery::run_halfplane_example(),
        other => return Err(PyValueError::new_err(format!("unknown gallery example {other:?}"))),
    }
    .map_err(to_py)?;
    json_loads(py, &report.to_json().map_err(to_py)?)
}

/// Randomized check of the log-concave diffeomorphism inequality.
#[pyfunction]
#[pyo3(signature = (trials = 1000, seed = 0, grid_points = 2001))]
fn propi1_oracle<'py>(py: Python<'py>, trials: usize, seed: u64, grid_points: usize) -> PyResult<Bound<'py, PyAny>> {
    let summary = lemma::propi1_oracle(trials, seed, grid_points, Tolerances::default().check_slack).map_err(to_py)?;
    json_loads(py, &serde_json::to_string(&summary).map_err(|e| PyValueError::new_err(e.to_string()))?)
}

#[pyfunction]
fn hyperbolic_distance(ax: f64, ay: f64, bx: f64, by: f64) -> PyResult<f64> {
    schwarz_core::hyperbolic_distance(Complex64::new(ax, ay), Complex64::new(bx, by)).map_err(to_py)
}

#[pymodule]
pub fn schwarz_lab(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyMetric>()?;
    m.add_class::<PyBoundary>()?;
    m.add_class::<PySolution>()?;
    m.add_function(wrap_pyfunction!(check_main_bound, m)?)?;
    m.add_function(wrap_pyfunction!(run_gallery, m)?)?;
    m.add_function(wrap_pyfunction!(propi1_oracle, m)?)?;
    m.add_function(wrap_pyfunction!(hyperbolic_distance, m)?)?;
    Ok(())
}
