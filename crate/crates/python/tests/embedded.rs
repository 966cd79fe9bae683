use pyo3::prelude::*;
use pyo3::types::PyDict;

fn run(script: &std::ffi::CStr) -> PyResult<()> {
    Python::attach(|py| {
        let module = pyo3::wrap_pymodule!(schwarz_lab::schwarz_lab)(py);
        let globals = PyDict::new(py);
        globals.set_item("sl", module)?;
        py.run(script, Some(&globals), None)
    })
}

#[test]
fn metric_and_solution_round_trip_through_python() {
    run(c"
import math
m = sl.Metric('exponential', c=1.0)
assert math.isclose(m.density(0.5), math.exp(0.5))
assert abs(m.h_inverse(m.h(-0.4)) + 0.4) < 1e-10
s = sl.Solution(sl.Metric('cosine'), sl.Boundary.preset('cosine'))
gx, gy = s.gradient(0.1, 0.2)
h = 1e-5
assert abs(gx - (s.value(0.1 + h, 0.2) - s.value(0.1 - h, 0.2)) / (2 * h)) < 1e-6
assert s.schwarz_quotient(0.3, -0.2) <= 4 / math.pi
")
    .unwrap();
}

#[test]
fn reports_arrive_as_dicts() {
    run(c"
strip = sl.run_gallery('strip', k=2.0)
assert strip['name'] == 'strip'
assert abs(strip['computed']['schwarz_quotient_at_0'] - 8 / 3.141592653589793) < 1e-8
r = sl.check_main_bound(sl.Metric('constant'), sl.Boundary.samples([0.0, 2.0, 4.0], [0.5, -0.2, 0.1]), radius=0.9)
assert r['passed'] and r['bound_name'] == 'main'
")
    .unwrap();
}

#[test]
fn errors_map_to_python_exception_types() {
    run(c"
for make, kind in ((lambda: sl.Metric('exponential'), ValueError),
                   (lambda: sl.Metric('secant').mass(), ArithmeticError),
                   (lambda: sl.run_gallery('torus'), ValueError),
                   (lambda: sl.hyperbolic_distance(1.0, 0.0, 0.0, 0.0), ValueError)):
    try:
        make()
    except kind:
        pass
    else:
        raise AssertionError(kind)
")
    .unwrap();
}
