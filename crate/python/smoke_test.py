"""Smoke test for the schwarz_lab extension module.

Build and install first, e.g. `maturin develop -m crates/python/Cargo.toml`,
then run `python python/smoke_test.py`.
"""

import math

import schwarz_lab as sl


def main():
    cosine = sl.Metric("cosine")
    assert math.isclose(cosine.density(0.0), 1.0)
    assert math.isclose(cosine.mass(), 2.0 / math.pi, rel_tol=1e-12)
    assert abs(cosine.h_inverse(cosine.h(0.3)) - 0.3) < 1e-10

    step = sl.Boundary.preset("step")
    solution = sl.Solution(cosine, step)
    assert abs(solution.value(0.0, 0.0)) < 1e-12
    # On the imaginary axis P(f) = (2/pi) sin(pi f / 2) is (2/pi) times the
    # harmonic measure (4/pi) atan(y) of the upper arc.
    y = 0.5
    expected = 2.0 / math.pi * math.asin(4.0 / math.pi * math.atan(y))
    assert abs(solution.value(0.0, y) - expected) < 1e-9
    # |grad f(0)| = 8/pi^2, below the sharp constant 4/pi.
    assert math.isclose(solution.schwarz_quotient(0.0, 0.0), 8.0 / math.pi**2, rel_tol=1e-9)

    report = sl.check_main_bound(cosine, step)
    assert report["passed"] and report["min_slack"] > -1e-9

    hyperbolic = sl.run_gallery("negative-curvature", n=3)
    assert abs(hyperbolic["computed"]["schwarz_quotient_at_0"] - 3.0) < 1e-9
    assert hyperbolic["violations"]

    oracle = sl.propi1_oracle(trials=50, seed=1, grid_points=201)
    assert not oracle["failures"]

    assert math.isclose(sl.hyperbolic_distance(0.0, 0.0, 0.5, 0.0), math.atanh(0.5))

    for bad in (lambda: sl.Metric("no-such-family"), lambda: sl.Metric("hyperbolic").mass()):
        try:
            bad()
        except (ValueError, ArithmeticError) as e:
            print("expected error:", type(e).__name__, e)
        else:
            raise AssertionError("expected an error")
    print("python smoke test: ok")


if __name__ == "__main__":
    main()
