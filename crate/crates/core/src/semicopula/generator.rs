use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numkit::{
    central_difference, curvature_verdict, linspace, Curvature, Fn1, SlackTracker, Tolerance, Verdict,
};
use crate::univariate::SurvivalModel;

/// Whether a generator (or survival function) is known to be convex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Convexity {
    Yes,
    No,
    Unchecked,
}

/// Archimedean generator: continuous, strictly decreasing `φ : [0,1] → [0,∞]`
/// with `φ(1) = 0`, together with its pseudo-inverse
/// `φ⁻¹(x) = inf{t : φ(t) <= x}` (zero for `x >= φ(0)`).
#[derive(Clone)]
pub struct Generator {
    name: String,
    phi: Fn1,
    phi_inv: Fn1,
    phi_prime: Option<Fn1>,
    convexity: Convexity,
    phi_at_zero: f64,
}

impl fmt::Debug for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Generator")
            .field("name", &self.name)
            .field("convexity", &self.convexity)
            .field("phi_at_zero", &self.phi_at_zero)
            .finish()
    }
}

fn param(name: &str, v: f64, ok: bool) -> Result<f64> {
    if v.is_finite() && ok {
        Ok(v)
    } else {
        Err(Error::InvalidParameter(format!("{name}: invalid parameter {v}")))
    }
}

impl Generator {
    /// Generator from closures. `phi_inv` must already be the pseudo-inverse;
    /// `phi_prime` may be omitted, in which case central differences are used.
    pub fn new<P, Q>(name: impl Into<String>, phi: P, phi_inv: Q, convexity: Convexity) -> Self
    where
        P: Fn(f64) -> f64 + Send + Sync + 'static,
        Q: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let phi: Fn1 = Arc::new(phi);
        let phi_at_zero = phi(0.0);
        Self {
            name: name.into(),
            phi,
            phi_inv: Arc::new(phi_inv),
            phi_prime: None,
            convexity,
            phi_at_zero: if phi_at_zero.is_nan() { f64::INFINITY } else { phi_at_zero },
        }
    }

    pub fn with_derivative<D>(mut self, d: D) -> Self
    where
        D: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        self.phi_prime = Some(Arc::new(d));
        self
    }

    /// `φ(t) = -ln t`; generates the product copula.
    pub fn independence() -> Self {
        Self::new("log", |t: f64| -t.ln(), |x: f64| (-x).exp(), Convexity::Yes).with_derivative(|t: f64| -1.0 / t)
    }

    /// `φ(t) = (t^{-θ} - 1)/θ`, `θ > 0`.
    pub fn clayton(theta: f64) -> Result<Self> {
        let th = param("clayton", theta, theta > 0.0)?;
        Ok(Self::new(
            format!("clayton:{th}"),
            move |t: f64| (t.powf(-th) - 1.0) / th,
            move |x: f64| (1.0 + th * x).powf(-1.0 / th),
            Convexity::Yes,
        )
        .with_derivative(move |t: f64| -t.powf(-th - 1.0)))
    }

    /// `φ(t) = (-ln t)^θ`, `θ > 0`; convex (a copula) for `θ >= 1`.
    pub fn gumbel(theta: f64) -> Result<Self> {
        let th = param("gumbel", theta, theta > 0.0)?;
        let convexity = if th >= 1.0 { Convexity::Yes } else { Convexity::No };
        Ok(Self::new(
            format!("gumbel:{th}"),
            move |t: f64| (-t.ln()).powf(th),
            move |x: f64| (-x.powf(1.0 / th)).exp(),
            convexity,
        )
        .with_derivative(move |t: f64| -th * (-t.ln()).powf(th - 1.0) / t))
    }

    /// `φ(t) = -ln((e^{-θt} - 1)/(e^{-θ} - 1))`, `θ ≠ 0`.
    pub fn frank(theta: f64) -> Result<Self> {
        let th = param("frank", theta, theta != 0.0)?;
        let d = (-th).exp_m1();
        Ok(Self::new(
            format!("frank:{th}"),
            move |t: f64| -((-th * t).exp_m1() / d).ln(),
            move |x: f64| -(((-x).exp() * d).ln_1p()) / th,
            Convexity::Yes,
        )
        .with_derivative(move |t: f64| th * (-th * t).exp() / (-th * t).exp_m1()))
    }

    /// `φ(t) = cos(πt/2)`: non-strict (`φ(0) = 1`) and concave, so the
    /// generated function is a semi-copula with a zero region.
    pub fn cosine() -> Self {
        Self::new(
            "cosine",
            |t: f64| (FRAC_PI_2 * t).cos(),
            |x: f64| if x >= 1.0 { 0.0 } else { x.max(0.0).acos() / FRAC_PI_2 },
            Convexity::No,
        )
        .with_derivative(|t: f64| -FRAC_PI_2 * (FRAC_PI_2 * t).sin())
    }

    /// `φ(t) = sqrt(-ln t)`: strict but not convex.
    pub fn sqrt_log() -> Self {
        Self::new(
            "sqrt-log",
            |t: f64| (-t.ln()).sqrt(),
            |x: f64| (-x * x).exp(),
            Convexity::No,
        )
        .with_derivative(|t: f64| -0.5 / (t * (-t.ln()).sqrt()))
    }

    /// `φ = Ḡ⁻¹`, the generator of the Schur-constant model with marginal `Ḡ`.
    pub fn from_survival(m: &SurvivalModel) -> Self {
        let (a, b, c) = (m.clone(), m.clone(), m.clone());
        let mut g = Self::new(
            format!("schur:{}", m.name()),
            move |t: f64| a.inverse_survival(t),
            move |x: f64| b.survival(x),
            m.convexity(),
        );
        if m.has_density() {
            g = g.with_derivative(move |t: f64| -1.0 / c.density(c.inverse_survival(t)).unwrap_or(f64::NAN));
        }
        g
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn convexity(&self) -> Convexity {
        self.convexity
    }

    pub fn with_convexity(mut self, c: Convexity) -> Self {
        self.convexity = c;
        self
    }

    /// `φ(0+)`: infinite for strict generators.
    pub fn phi_at_zero(&self) -> f64 {
        self.phi_at_zero
    }

    pub fn is_strict(&self) -> bool {
        self.phi_at_zero.is_infinite()
    }

    pub fn phi(&self, t: f64) -> f64 {
        if t >= 1.0 {
            return 0.0;
        }
        if t <= 0.0 {
            return self.phi_at_zero;
        }
        (self.phi)(t)
    }

    pub fn phi_inv(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 1.0;
        }
        if x >= self.phi_at_zero {
            return 0.0;
        }
        (self.phi_inv)(x).clamp(0.0, 1.0)
    }

    pub fn has_analytic_derivative(&self) -> bool {
        self.phi_prime.is_some()
    }

    pub fn phi_prime(&self, t: f64) -> f64 {
        match &self.phi_prime {
            Some(d) => d(t),
            None => central_difference(&|s: f64| self.phi(s), t, 0.0, 1.0),
        }
    }

    /// Checks `φ(1) = 0`, strict decrease on a grid, and `φ(φ⁻¹(x)) = x`
    /// on the range of `φ`.
    pub fn check(&self) -> Result<()> {
        let one = self.phi(1.0 - 1e-15);
        if !(one.abs() < 1e-6) {
            return Err(Error::InvalidGenerator(format!("{}: φ(1) = {one}, expected 0", self.name)));
        }
        let grid = linspace(0.0, 1.0, 129);
        let vals: Vec<f64> = grid[1..128].iter().map(|&t| self.phi(t)).collect();
        for (i, w) in vals.windows(2).enumerate() {
            if !(w[1] < w[0]) {
                return Err(Error::InvalidGenerator(format!(
                    "{}: not strictly decreasing near t = {}",
                    self.name,
                    grid[i + 2]
                )));
            }
        }
        for &t in &grid[1..128] {
            let x = self.phi(t);
            let back = self.phi(self.phi_inv(x));
            if (back - x).abs() > 1e-8 * (1.0 + x.abs()) {
                return Err(Error::InvalidGenerator(format!(
                    "{}: φ(φ⁻¹({x})) = {back}",
                    self.name
                )));
            }
        }
        Ok(())
    }

    /// Grid check of convexity of `φ` on `[lo, 1]`.
    pub fn convexity_verdict(&self, n: usize, tol: Tolerance) -> Verdict {
        let grid = linspace(0.02, 1.0, n.max(8));
        curvature_verdict(|t| self.phi(t), &grid, Curvature::Convex, tol)
    }

    /// Round-trip `φ⁻¹(φ(t)) = t` on a grid; worst absolute error as slack.
    pub fn round_trip_verdict(&self, grid: &[f64], abs: f64) -> Verdict {
        let mut tr = SlackTracker::new();
        for &t in grid {
            tr.push(abs - (self.phi_inv(self.phi(t)) - t).abs(), &[t]);
        }
        tr.finish(Tolerance::sharp(0.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_generators_pass_check() {
        let gens = [
            Generator::independence(),
            Generator::clayton(2.0).unwrap(),
            Generator::gumbel(1.5).unwrap(),
            Generator::frank(2.0).unwrap(),
            Generator::frank(-3.0).unwrap(),
            Generator::cosine(),
            Generator::sqrt_log(),
        ];
        for g in &gens {
            g.check().unwrap_or_else(|e| panic!("{e}"));
        }
    }

    #[test]
    fn pseudo_inverse_of_non_strict_generator() {
        let g = Generator::cosine();
        assert_eq!(g.phi_at_zero(), 1.0);
        assert!(!g.is_strict());
        assert_eq!(g.phi_inv(1.5), 0.0);
        assert!((g.phi_inv(0.5) - 2.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn analytic_derivatives_match_differences() {
        for g in [
            Generator::independence(),
            Generator::clayton(0.5).unwrap(),
            Generator::gumbel(2.0).unwrap(),
            Generator::frank(-3.0).unwrap(),
            Generator::cosine(),
            Generator::sqrt_log(),
        ] {
            for t in [0.1, 0.4, 0.8] {
                let a = g.phi_prime(t);
                let n = central_difference(&|s: f64| g.phi(s), t, 0.0, 1.0);
                assert!((a - n).abs() < 1e-6 * (1.0 + a.abs()), "{}: {a} vs {n}", g.name());
            }
        }
    }

    #[test]
    fn convexity_grid_check_agrees_with_flags() {
        let tol = Tolerance::default();
        assert!(Generator::clayton(1.0).unwrap().convexity_verdict(64, tol).holds());
        assert!(Generator::cosine().convexity_verdict(64, tol).fails());
        assert!(Generator::sqrt_log().convexity_verdict(64, tol).fails());
    }

    #[test]
    fn non_decreasing_generator_rejected() {
        let g = Generator::new("bad", |t: f64| t, |x: f64| x, Convexity::Unchecked);
        assert!(matches!(g.check(), Err(Error::InvalidGenerator(_))));
    }

    #[test]
    fn schur_generator_is_marginal_inverse() {
        let m = SurvivalModel::weibull(0.5, 1.0).unwrap();
        let g = Generator::from_survival(&m);
        assert!((g.phi(0.5) - m.inverse_survival(0.5)).abs() < 1e-14);
        assert_eq!(g.convexity(), Convexity::Yes);
        g.check().unwrap();
    }
}
