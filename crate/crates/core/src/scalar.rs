//! One-dimensional numerics: adaptive Gauss-Kronrod quadrature, safeguarded Newton
//! inversion of monotone functions and golden-section maximization.

/// Kronrod abscissae on `[0, 1]`; odd indices are the embedded Gauss nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];
const MAX_PANELS: usize = 2000;

/// 15-point Kronrod estimate on `[a, b]` and its distance to the 7-point Gauss rule.
fn kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    let mut abs = WGK[7] * fc.abs();
    for i in 0..7 {
        let (f1, f2) = (f(c - h * XGK[i]), f(c + h * XGK[i]));
        k += WGK[i] * (f1 + f2);
        abs += WGK[i] * (f1.abs() + f2.abs());
        if i % 2 == 1 {
            g += WG[i / 2] * (f1 + f2);
        }
    }
    (k * h, ((k - g) * h).abs(), abs * h.abs())
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

/// Globally adaptive Gauss-Kronrod quadrature of `f` over `[a, b]` with absolute
/// tolerance `tol`.
///
/// The panel with the largest error estimate is bisected until the summed
/// estimate meets `tol`, every remaining error is at the rounding level of its
/// panel, or `MAX_PANELS` is reached.
pub fn integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    if a > b {
        return -integrate(f, b, a, tol);
    }
    let panel = |a: f64, b: f64| {
        let (value, err, abs) = kronrod(f, a, b);
        let m = 0.5 * (a + b);
        // unresolvable: at the rounding floor or too narrow to split
        let error = if err <= 50.0 * f64::EPSILON * abs || m <= a || m >= b { 0.0 } else { err };
        Panel { a, b, value, error }
    };
    let mut panels = vec![panel(a, b)];
    loop {
        let total: f64 = panels.iter().map(|p| p.error).sum();
        if total <= tol || !total.is_finite() || panels.len() >= MAX_PANELS {
            break;
        }
        let (worst, _) = panels.iter().enumerate().fold((0, -1.0), |acc, (i, p)| if p.error > acc.1 { (i, p.error) } else { acc });
        if panels[worst].error == 0.0 {
            break;
        }
        let p = panels.swap_remove(worst);
        let m = 0.5 * (p.a + p.b);
        panels.push(panel(p.a, m));
        panels.push(panel(m, p.b));
    }
    panels.iter().map(|p| p.value).sum()
}

/// Solves `g(u) = target` for increasing `g` on the bracket `[lo, hi]`, where
/// `g(lo) <= target <= g(hi)` is assumed. `dg` is the derivative of `g`.
///
/// Newton steps that leave the bracket fall back to bisection. Stops when the
/// residual is below `abs_tol` or the bracket collapses.
pub fn invert_increasing<G, D>(g: G, dg: D, target: f64, mut lo: f64, mut hi: f64, abs_tol: f64) -> f64
where
    G: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    let mut u = 0.5 * (lo + hi);
    for _ in 0..200 {
        let r = g(u) - target;
        if r.abs() <= abs_tol {
            return u;
        }
        if r > 0.0 {
            hi = u;
        } else {
            lo = u;
        }
        let slope = dg(u);
        let newton = u - r / slope;
        let next = if slope > 0.0 && newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
        if next == u || hi - lo <= f64::EPSILON * hi.abs().max(lo.abs()).max(1e-300) {
            return next;
        }
        u = next;
    }
    u
}

/// Maximizer and maximum of a unimodal function on `[a, b]`.
pub fn golden_section_max<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, xtol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > xtol {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

/// Coarse scan followed by golden-section refinement around the best sample.
pub fn scan_then_golden<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, samples: usize, xtol: f64) -> (f64, f64) {
    let step = (b - a) / samples as f64;
    let (best, _) = (0..=samples)
        .map(|i| {
            let x = a + step * i as f64;
            (i, f(x))
        })
        .fold((0, f64::NEG_INFINITY), |acc, (i, v)| if v > acc.1 { (i, v) } else { acc });
    let lo = (a + step * best as f64 - step).max(a);
    let hi = (a + step * best as f64 + step).min(b);
    golden_section_max(f, lo, hi, xtol)
}
