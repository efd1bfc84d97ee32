use crate::error::{Error, Result};

/// Default absolute tolerance for quadrature.
pub const QUAD_TOL: f64 = 1e-9;

const MAX_DEPTH: u32 = 48;

// Gauss–Kronrod 7/15 abscissae and weights on [-1, 1] (QUADPACK qk15).
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
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// One 15-point Kronrod panel: (integral, |Kronrod − Gauss|).
fn kronrod15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        kron += WGK[j] * s;
        // Gauss nodes are the odd-indexed Kronrod nodes.
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kron * h, ((kron - gauss) * h).abs())
}

fn adapt<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, whole: (f64, f64), depth: u32) -> Result<(f64, f64)> {
    let (value, err) = whole;
    if !value.is_finite() {
        return Err(Error::QuadratureFailure { a, b, estimate: f64::INFINITY });
    }
    if err <= tol.max(4.0 * f64::EPSILON * value.abs()) {
        return Ok((value, err));
    }
    if depth >= MAX_DEPTH || (b - a) <= 8.0 * f64::EPSILON * a.abs().max(b.abs()) {
        return Err(Error::QuadratureFailure { a, b, estimate: err });
    }
    let m = 0.5 * (a + b);
    let left = kronrod15(f, a, m);
    let right = kronrod15(f, m, b);
    let (lv, le) = adapt(f, a, m, 0.5 * tol, left, depth + 1)?;
    let (rv, re) = adapt(f, m, b, 0.5 * tol, right, depth + 1)?;
    Ok((lv + rv, le + re))
}

/// Adaptive Gauss–Kronrod quadrature of `f` over `[a, b]` with absolute
/// error estimate at most `tol`. Reversed limits give the negated integral.
pub fn integrate_fn<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    if a > b {
        return integrate_fn(f, b, a, tol).map(|v| -v);
    }
    let first = kronrod15(&f, a, b);
    adapt(&f, a, b, tol, first, 0).map(|(v, _)| v)
}

/// Integral over `[a, b]` when the integrand may blow up at `a` and/or `b`.
///
/// The singular end is truncated at distance `eps`, shrunk by a factor 100
/// per round until the added tail contribution drops below `tol`. A tail
/// that never settles (non-integrable singularity) is a
/// [`Error::QuadratureFailure`].
pub fn integrate_singular<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    singular_at_a: bool,
    singular_at_b: bool,
    tol: f64,
) -> Result<f64> {
    if !singular_at_a && !singular_at_b {
        return integrate_fn(f, a, b, tol);
    }
    let width = b - a;
    let min_eps = 1e-14 * width.abs().max(1.0);
    let mut eps = 1e-2 * width.abs();
    let lim = |e: f64| {
        (
            if singular_at_a { a + e } else { a },
            if singular_at_b { b - e } else { b },
        )
    };
    let (lo, hi) = lim(eps);
    let mut value = integrate_fn(&f, lo, hi, 0.25 * tol)?;
    loop {
        let next = eps * 1e-2;
        if next < min_eps {
            return Err(Error::QuadratureFailure { a, b, estimate: f64::INFINITY });
        }
        let mut tail = 0.0;
        if singular_at_a {
            tail += integrate_fn(&f, a + next, a + eps, 0.25 * tol)?;
        }
        if singular_at_b {
            tail += integrate_fn(&f, b - eps, b - next, 0.25 * tol)?;
        }
        value += tail;
        eps = next;
        if tail.abs() < 0.5 * tol {
            return Ok(value);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant() {
        assert!((integrate_fn(|_| 1.0, 0.0, 1.0, QUAD_TOL).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn product_kendall_integrand() {
        // ∫_{0.5}^{1} t/u du with t = 0.5 -> 0.5 ln 2
        let t = 0.5;
        let v = integrate_fn(|u| t / u, 0.5, 1.0, QUAD_TOL).unwrap();
        assert!((v - 0.5 * std::f64::consts::LN_2).abs() < 1e-10);
    }

    #[test]
    fn log_log_antiderivative() {
        // ∫_{1/e}^{0.5} ds/(s ln s) = ln(ln 2) - ln(1)
        let a = (-1.0f64).exp();
        let v = integrate_fn(|s: f64| 1.0 / (s * s.ln()), a, 0.5, QUAD_TOL).unwrap();
        assert!((v - (std::f64::consts::LN_2).ln()).abs() < 1e-9);
        assert!((v + 0.366_512_920_581_664_3).abs() < 1e-9);
    }

    #[test]
    fn reversed_limits() {
        let v = integrate_fn(|x| x, 1.0, 0.0, QUAD_TOL).unwrap();
        assert!((v + 0.5).abs() < 1e-12);
    }

    #[test]
    fn integrable_log_singularity() {
        let v = integrate_singular(|x: f64| x.ln(), 0.0, 1.0, true, false, 1e-9).unwrap();
        assert!((v + 1.0).abs() < 1e-8);
    }

    #[test]
    fn divergent_tail_is_reported() {
        // ∫ ds/(s ln s) diverges at s = 1.
        let r = integrate_singular(|s: f64| 1.0 / (s * s.ln()), 0.5, 1.0, false, true, 1e-9);
        assert!(matches!(r, Err(Error::QuadratureFailure { .. })));
    }

    #[test]
    fn smooth_oscillatory() {
        let v = integrate_fn(|x: f64| (10.0 * x).cos(), 0.0, 3.0, 1e-11).unwrap();
        assert!((v - (30.0f64).sin() / 10.0).abs() < 1e-10);
    }
}
