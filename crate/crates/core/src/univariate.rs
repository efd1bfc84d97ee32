//! One-dimensional survival functions `Ḡ` on `[0, ∞)`, their failure rates
//! and cumulative hazards, the ageing classes IFR/DFR, IFRA/DFRA, NBU/NWU,
//! and finite mixtures with their posterior reweighting.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numkit::{
    bracket_decreasing, central_difference, curvature_verdict, generalized_inverse, linspace,
    monotonicity_of_values, monotonicity_verdict, Curvature, Direction, RealFunction1D, SlackTracker,
    Tolerance, Verdict,
};
use crate::semicopula::{Convexity, Generator};

/// Left cutoff for grids on which the failure rate or `R(x)/x` is evaluated.
pub const LEFT_CUTOFF: f64 = 1e-6;

/// Finite mixture `Σ w_j Ḡ_j` with a prior over the component index.
#[derive(Clone, Debug)]
pub struct MixtureModel {
    weights: Vec<f64>,
    components: Vec<SurvivalModel>,
}

impl MixtureModel {
    pub fn new(weights: Vec<f64>, components: Vec<SurvivalModel>) -> Result<Self> {
        if weights.is_empty() || weights.len() != components.len() {
            return Err(Error::InvalidParameter(format!(
                "mixture needs matching non-empty weights and components ({} vs {})",
                weights.len(),
                components.len()
            )));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::InvalidParameter(format!(
                "mixture weights must be nonnegative: {weights:?}"
            )));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "mixture weights sum to {total}, not 1"
            )));
        }
        Ok(Self { weights, components })
    }

    /// Mixture of exponentials with the given rates.
    pub fn exponentials(rates: &[f64], weights: &[f64]) -> Result<Self> {
        let components = rates
            .iter()
            .map(|&r| SurvivalModel::exponential(r))
            .collect::<Result<Vec<_>>>()?;
        Self::new(weights.to_vec(), components)
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn components(&self) -> &[SurvivalModel] {
        &self.components
    }

    /// Posterior law of the component index given survival past `t`:
    /// `w_j Ḡ_j(t) / Σ_k w_k Ḡ_k(t)`, computed in log space.
    pub fn posterior_weights(&self, t: f64) -> Result<Vec<f64>> {
        let logs: Vec<f64> = self
            .weights
            .iter()
            .zip(&self.components)
            .map(|(&w, c)| if w > 0.0 { w.ln() + c.log_survival(t) } else { f64::NEG_INFINITY })
            .collect();
        let top = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if !top.is_finite() {
            return Err(Error::EvaluationOverflow { x: t });
        }
        let unnorm: Vec<f64> = logs.iter().map(|l| (l - top).exp()).collect();
        let total: f64 = unnorm.iter().sum();
        Ok(unnorm.into_iter().map(|p| p / total).collect())
    }

    /// Failure rate as the posterior average of component rates.
    pub fn predictive_failure_rate(&self, t: f64) -> Result<f64> {
        let post = self.posterior_weights(t)?;
        let mut r = 0.0;
        for (p, c) in post.iter().zip(&self.components) {
            if *p > 0.0 {
                r += p * c.failure_rate(t)?;
            }
        }
        Ok(r)
    }

    fn survival(&self, x: f64) -> f64 {
        self.weights
            .iter()
            .zip(&self.components)
            .map(|(w, c)| w * c.survival(x))
            .sum()
    }

    fn log_survival(&self, x: f64) -> f64 {
        let logs: Vec<f64> = self
            .weights
            .iter()
            .zip(&self.components)
            .filter(|(w, _)| **w > 0.0)
            .map(|(w, c)| w.ln() + c.log_survival(x))
            .collect();
        let top = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if !top.is_finite() {
            return top;
        }
        top + logs.iter().map(|l| (l - top).exp()).sum::<f64>().ln()
    }

    fn density(&self, x: f64) -> Option<f64> {
        let mut g = 0.0;
        for (w, c) in self.weights.iter().zip(&self.components) {
            g += w * c.density(x)?;
        }
        Some(g)
    }
}

/// Survival function `Ḡ` on `[0, ∞)`, strictly decreasing and positive.
#[derive(Clone)]
pub enum SurvivalModel {
    Exponential { rate: f64 },
    Weibull { shape: f64, scale: f64 },
    /// Lomax form `(1 + x/scale)^(-shape)`.
    Pareto { shape: f64, scale: f64 },
    /// `Ḡ = φ⁻¹` for a strict Archimedean generator `φ`.
    GeneratorInverse(Generator),
    Mixture(MixtureModel),
    /// `R_Ḡ = R_outer ∘ R_inner⁻¹`, i.e. `Ḡ(x) = H̄_outer(H̄_inner⁻¹(e^{-x}))`.
    RiskComposition {
        outer: Box<SurvivalModel>,
        inner: Box<SurvivalModel>,
    },
    /// User-supplied survival function, density optional.
    Custom {
        name: String,
        survival: RealFunction1D,
        density: Option<RealFunction1D>,
    },
}

impl fmt::Debug for SurvivalModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(Error::InvalidParameter(format!("{name} must be positive and finite, got {v}")))
    }
}

impl SurvivalModel {
    pub fn exponential(rate: f64) -> Result<Self> {
        Ok(Self::Exponential { rate: positive("rate", rate)? })
    }

    pub fn weibull(shape: f64, scale: f64) -> Result<Self> {
        Ok(Self::Weibull {
            shape: positive("shape", shape)?,
            scale: positive("scale", scale)?,
        })
    }

    pub fn pareto(shape: f64, scale: f64) -> Result<Self> {
        Ok(Self::Pareto {
            shape: positive("shape", shape)?,
            scale: positive("scale", scale)?,
        })
    }

    pub fn mixture(mix: MixtureModel) -> Self {
        Self::Mixture(mix)
    }

    /// The generator's inverse as a survival function; the generator must be
    /// strict (`φ(0+) = ∞`) so that `Ḡ > 0` on the half-line.
    pub fn generator_inverse(g: Generator) -> Result<Self> {
        if g.phi_at_zero().is_finite() {
            return Err(Error::InvalidParameter(format!(
                "generator `{}` is not strict: φ(0+) = {} (inverse is not positive on [0, ∞))",
                g.name(),
                g.phi_at_zero()
            )));
        }
        Ok(Self::GeneratorInverse(g))
    }

    pub fn risk_composition(outer: SurvivalModel, inner: SurvivalModel) -> Self {
        Self::RiskComposition {
            outer: Box::new(outer),
            inner: Box::new(inner),
        }
    }

    pub fn custom(name: impl Into<String>, survival: RealFunction1D, density: Option<RealFunction1D>) -> Self {
        Self::Custom {
            name: name.into(),
            survival,
            density,
        }
    }

    pub fn name(&self) -> String {
        match self {
            Self::Exponential { rate } => format!("exp:{rate}"),
            Self::Weibull { shape, scale } => format!("weibull:{shape}:{scale}"),
            Self::Pareto { shape, scale } => format!("pareto:{shape}:{scale}"),
            Self::GeneratorInverse(g) => format!("geninv:{}", g.name()),
            Self::Mixture(m) => {
                let parts: Vec<String> = m.components.iter().map(|c| c.name()).collect();
                let ws: Vec<String> = m.weights.iter().map(|w| w.to_string()).collect();
                format!("mix[{}]:[{}]", parts.join(","), ws.join(","))
            }
            Self::RiskComposition { outer, inner } => {
                format!("compose({},{})", outer.name(), inner.name())
            }
            Self::Custom { name, .. } => name.clone(),
        }
    }

    pub fn survival(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 1.0;
        }
        match self {
            Self::Mixture(m) => m.survival(x),
            Self::GeneratorInverse(g) => g.phi_inv(x),
            Self::Custom { survival, .. } => survival.eval(x),
            _ => (-self.cumulative_hazard(x)).exp(),
        }
    }

    pub fn log_survival(&self, x: f64) -> f64 {
        -self.cumulative_hazard(x)
    }

    /// `R(x) = -ln Ḡ(x)`, evaluated without forming `Ḡ` where possible.
    pub fn cumulative_hazard(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        match self {
            Self::Exponential { rate } => rate * x,
            Self::Weibull { shape, scale } => (x / scale).powf(*shape),
            Self::Pareto { shape, scale } => shape * (x / scale).ln_1p(),
            Self::GeneratorInverse(g) => -g.phi_inv(x).ln(),
            Self::Mixture(m) => -m.log_survival(x),
            Self::RiskComposition { outer, inner } => {
                outer.cumulative_hazard(inner.inverse_cumulative_hazard(x))
            }
            Self::Custom { survival, .. } => -survival.eval(x).ln(),
        }
    }

    /// `R⁻¹(y)`, i.e. `Ḡ⁻¹(e^{-y})`.
    pub fn inverse_cumulative_hazard(&self, y: f64) -> f64 {
        if y <= 0.0 {
            return 0.0;
        }
        if y.is_infinite() {
            return f64::INFINITY;
        }
        match self {
            Self::Exponential { rate } => y / rate,
            Self::Weibull { shape, scale } => scale * y.powf(1.0 / shape),
            Self::Pareto { shape, scale } => scale * (y / shape).exp_m1(),
            Self::GeneratorInverse(g) => g.phi((-y).exp()),
            Self::RiskComposition { outer, inner } => {
                inner.cumulative_hazard(outer.inverse_cumulative_hazard(y))
            }
            Self::Mixture(_) | Self::Custom { .. } => {
                let r = |x: f64| self.cumulative_hazard(x);
                match bracket_decreasing(|x| -r(x), -y, 1.0) {
                    Ok(b) => generalized_inverse(r, y, b, true, 0.0),
                    Err(_) => f64::INFINITY,
                }
            }
        }
    }

    /// `Ḡ⁻¹(u)` for `u ∈ [0, 1]`, with `Ḡ⁻¹(0) = ∞` and `Ḡ⁻¹(1) = 0`.
    pub fn inverse_survival(&self, u: f64) -> f64 {
        if u >= 1.0 {
            return 0.0;
        }
        if u <= 0.0 {
            return f64::INFINITY;
        }
        match self {
            Self::GeneratorInverse(g) => g.phi(u),
            _ => self.inverse_cumulative_hazard(-u.ln()),
        }
    }

    /// Density `g = -dḠ/dx`; `None` only for custom models without one.
    pub fn density(&self, x: f64) -> Option<f64> {
        let x = x.max(0.0);
        match self {
            Self::Exponential { rate } => Some(rate * (-rate * x).exp()),
            Self::Weibull { shape, scale } => {
                let z = x / scale;
                Some(shape / scale * z.powf(shape - 1.0) * (-z.powf(*shape)).exp())
            }
            Self::Pareto { shape, scale } => Some(shape / scale * (1.0 + x / scale).powf(-shape - 1.0)),
            Self::GeneratorInverse(g) => {
                let d = g.phi_prime(g.phi_inv(x));
                Some(-1.0 / d)
            }
            Self::Mixture(m) => m.density(x),
            Self::RiskComposition { .. } => {
                let r = self.failure_rate(x).ok()?;
                Some(r * self.survival(x))
            }
            Self::Custom { density, .. } => density.as_ref().map(|d| d.eval(x)),
        }
    }

    pub fn has_density(&self) -> bool {
        !matches!(self, Self::Custom { density: None, .. })
    }

    /// `r(x) = g(x)/Ḡ(x)`.
    pub fn failure_rate(&self, x: f64) -> Result<f64> {
        let x = x.max(0.0);
        match self {
            Self::Exponential { rate } => Ok(*rate),
            Self::Weibull { shape, scale } => Ok(shape / scale * (x / scale).powf(shape - 1.0)),
            Self::Pareto { shape, scale } => Ok(shape / (scale + x)),
            Self::RiskComposition { outer, inner } => {
                // R'(x) = r_outer(y) / r_inner(y), y = R_inner⁻¹(x)
                let y = inner.inverse_cumulative_hazard(x);
                Ok(outer.failure_rate(y)? / inner.failure_rate(y)?)
            }
            Self::Custom { survival, density: None, .. } => {
                let s = survival.eval(x);
                if s < f64::MIN_POSITIVE {
                    return Err(Error::EvaluationOverflow { x });
                }
                let d = central_difference(&|y: f64| -survival.eval(y).ln(), x, 0.0, f64::INFINITY);
                Ok(d)
            }
            _ => {
                let s = self.survival(x);
                if s < f64::MIN_POSITIVE {
                    return Err(Error::EvaluationOverflow { x });
                }
                let g = self.density(x).ok_or_else(|| Error::MissingDensity(self.name()))?;
                Ok(g / s)
            }
        }
    }

    /// Convexity of `Ḡ`: analytic where the family decides it, otherwise a
    /// grid check of chord slopes.
    pub fn convexity(&self) -> Convexity {
        match self {
            Self::Exponential { .. } | Self::Pareto { .. } => Convexity::Yes,
            Self::Weibull { shape, .. } => {
                if *shape <= 1.0 {
                    Convexity::Yes
                } else {
                    Convexity::No
                }
            }
            Self::GeneratorInverse(g) => g.convexity(),
            Self::Mixture(m) if m.components.iter().all(|c| c.convexity() == Convexity::Yes) => Convexity::Yes,
            _ => {
                let grid = linspace(0.0, self.default_x_max(), 257);
                let v = curvature_verdict(|x| self.survival(x), &grid, Curvature::Convex, Tolerance::default());
                if v.holds() {
                    Convexity::Yes
                } else {
                    Convexity::No
                }
            }
        }
    }

    pub fn median(&self) -> f64 {
        self.inverse_survival(0.5)
    }

    /// Upper end of default grids: eight median lifetimes.
    pub fn default_x_max(&self) -> f64 {
        let m = self.median();
        if m.is_finite() && m > 0.0 {
            8.0 * m
        } else {
            8.0
        }
    }

    /// Grid `[LEFT_CUTOFF, x_max]` with `n` points.
    pub fn ageing_grid(&self, x_max: Option<f64>, n: usize) -> Vec<f64> {
        linspace(LEFT_CUTOFF, x_max.unwrap_or_else(|| self.default_x_max()), n.max(16))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct IfrDfr {
    pub ifr: Verdict,
    pub dfr: Verdict,
}

#[derive(Debug, Clone, Serialize)]
pub struct IfraDfra {
    pub ifra: Verdict,
    pub dfra: Verdict,
}

#[derive(Debug, Clone, Serialize)]
pub struct NbuNwu {
    pub nbu: Verdict,
    pub nwu: Verdict,
}

/// IFR/DFR from the monotonicity of the failure rate; models without a
/// density fall back to convexity/concavity of `R = -ln Ḡ` (log-concavity
/// of `Ḡ`).
pub fn classify_ifr_dfr(m: &SurvivalModel, grid: &[f64], tol: Tolerance) -> IfrDfr {
    if m.has_density() {
        let rates: Vec<f64> = grid
            .iter()
            .map(|&x| m.failure_rate(x).unwrap_or(f64::NAN))
            .collect();
        IfrDfr {
            ifr: monotonicity_of_values(grid, &rates, Direction::Increasing, tol),
            dfr: monotonicity_of_values(grid, &rates, Direction::Decreasing, tol),
        }
    } else {
        let r = |x: f64| m.cumulative_hazard(x);
        IfrDfr {
            ifr: curvature_verdict(r, grid, Curvature::Convex, tol),
            dfr: curvature_verdict(r, grid, Curvature::Concave, tol),
        }
    }
}

/// IFRA/DFRA from the monotonicity of `R(x)/x` (grid must exclude 0).
pub fn classify_ifra_dfra(m: &SurvivalModel, grid: &[f64], tol: Tolerance) -> IfraDfra {
    let avg: Vec<f64> = grid.iter().map(|&x| m.cumulative_hazard(x) / x).collect();
    IfraDfra {
        ifra: monotonicity_of_values(grid, &avg, Direction::Increasing, tol),
        dfra: monotonicity_of_values(grid, &avg, Direction::Decreasing, tol),
    }
}

/// NBU: `Ḡ(x+y) <= Ḡ(x)Ḡ(y)`; NWU the reverse, over all grid pairs.
pub fn classify_nbu_nwu(m: &SurvivalModel, grid: &[f64], tol: Tolerance) -> NbuNwu {
    let mut nbu = SlackTracker::new();
    let mut nwu = SlackTracker::new();
    let s: Vec<f64> = grid.iter().map(|&x| m.survival(x)).collect();
    for (i, &x) in grid.iter().enumerate() {
        for (j, &y) in grid.iter().enumerate().skip(i) {
            let d = s[i] * s[j] - m.survival(x + y);
            nbu.push(d, &[x, y]);
            nwu.push(-d, &[x, y]);
        }
    }
    NbuNwu {
        nbu: nbu.finish(tol),
        nwu: nwu.finish(tol),
    }
}

/// `Ḡ(0) = 1`, `0 <= Ḡ <= 1`, `Ḡ` nonincreasing and `g >= 0` on the grid.
pub fn check_survival_invariants(m: &SurvivalModel, grid: &[f64], tol: Tolerance) -> Verdict {
    let mut tr = SlackTracker::new();
    tr.push(-(m.survival(0.0) - 1.0).abs(), &[0.0]);
    let mut prev = 1.0;
    for &x in grid {
        let s = m.survival(x);
        tr.push(s.min(1.0 - s), &[x]);
        tr.push(prev - s, &[x]);
        if let Some(d) = m.density(x) {
            tr.push(d, &[x]);
        }
        prev = s;
    }
    tr.finish(tol)
}

/// Monotonicity of an arbitrary function of the model along a grid; small
/// convenience used by the harness.
pub fn rate_monotonicity(m: &SurvivalModel, grid: &[f64], direction: Direction, tol: Tolerance) -> Verdict {
    monotonicity_verdict(|x| m.failure_rate(x).unwrap_or(f64::NAN), grid, direction, tol)
}
