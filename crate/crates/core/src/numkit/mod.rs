//! Numerical substrate shared by every other module: monotone inverses,
//! adaptive quadrature, finite-difference derivatives and the grid checks
//! that turn inequalities into [`Verdict`]s.
//!
//! All function objects here are immutable once built and every routine is
//! pure, so grid sweeps can be run from several threads.

mod inverse;
mod quad;
mod verdict;

use std::sync::Arc;

pub use inverse::{bracket_decreasing, generalized_inverse, monotone_inverse, INVERSE_TOL};
pub use quad::{integrate_fn, integrate_singular, QUAD_TOL};
pub use verdict::{SlackTracker, Tolerance, Verdict, VerdictStatus};

use crate::error::Result;

pub type Fn1 = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Behaviour of a function at a domain endpoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Endpoint {
    Finite,
    Diverges,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Domain {
    pub lo: f64,
    pub hi: f64,
    pub lo_end: Endpoint,
    pub hi_end: Endpoint,
}

impl Domain {
    pub const fn finite(lo: f64, hi: f64) -> Self {
        Self {
            lo,
            hi,
            lo_end: Endpoint::Finite,
            hi_end: Endpoint::Finite,
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo && x <= self.hi
    }
}

/// A real function on an interval with optional analytic derivative.
#[derive(Clone)]
pub struct RealFunction1D {
    f: Fn1,
    df: Option<Fn1>,
    domain: Domain,
}

impl std::fmt::Debug for RealFunction1D {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RealFunction1D")
            .field("domain", &self.domain)
            .field("analytic_derivative", &self.df.is_some())
            .finish()
    }
}

impl RealFunction1D {
    pub fn new<F>(f: F, domain: Domain) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            f: Arc::new(f),
            df: None,
            domain,
        }
    }

    pub fn with_derivative<D>(mut self, df: D) -> Self
    where
        D: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        self.df = Some(Arc::new(df));
        self
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.f)(x)
    }

    pub fn has_analytic_derivative(&self) -> bool {
        self.df.is_some()
    }

    /// Analytic derivative when attached, Richardson-extrapolated central
    /// difference otherwise.
    pub fn derivative(&self, x: f64) -> f64 {
        match &self.df {
            Some(df) => df(x),
            None => central_difference(&*self.f, x, self.domain.lo, self.domain.hi),
        }
    }

    /// Checks the attached derivative against central differences at the
    /// given interior points (relative slack `rel`).
    pub fn derivative_consistency(&self, points: &[f64], rel: f64) -> Verdict {
        let mut tr = SlackTracker::new();
        if let Some(df) = &self.df {
            for &x in points {
                let a = df(x);
                let n = central_difference(&*self.f, x, self.domain.lo, self.domain.hi);
                tr.push(rel * (1.0 + a.abs()) - (a - n).abs(), &[x]);
            }
        } else {
            tr.push(0.0, &[]);
        }
        tr.finish(Tolerance::sharp(0.0))
    }

    pub fn inverse(&self, target: f64, tol: f64) -> Result<f64> {
        monotone_inverse(&*self.f, target, (self.domain.lo, self.domain.hi), tol)
    }

    /// Integral over `[a, b]`; endpoints that coincide with a diverging
    /// domain end are truncated and their tails checked.
    pub fn integrate(&self, a: f64, b: f64, tol: f64) -> Result<f64> {
        let sa = a == self.domain.lo && self.domain.lo_end == Endpoint::Diverges;
        let sb = b == self.domain.hi && self.domain.hi_end == Endpoint::Diverges;
        integrate_singular(&*self.f, a, b, sa, sb, tol)
    }
}

/// Central difference with one Richardson step; the step is shrunk so that
/// both stencils stay inside `[lo, hi]`, falling back to a one-sided
/// second-order formula right at an endpoint.
pub fn central_difference<F: Fn(f64) -> f64 + ?Sized>(f: &F, x: f64, lo: f64, hi: f64) -> f64 {
    let scale = 1.0 + x.abs();
    let mut h = 1e-3 * scale;
    let room = (x - lo).min(hi - x);
    if room > 0.0 {
        h = h.min(0.1 * room);
    }
    if room <= 0.0 || h < 1e-9 * scale {
        let h = 1e-5 * scale;
        let s = if x - lo < hi - x { 1.0 } else { -1.0 };
        let (f0, f1, f2) = (f(x), f(x + s * h), f(x + 2.0 * s * h));
        return s * (-3.0 * f0 + 4.0 * f1 - f2) / (2.0 * h);
    }
    let d = |h: f64| (f(x + h) - f(x - h)) / (2.0 * h);
    let (d1, d2) = (d(h), d(0.5 * h));
    (4.0 * d2 - d1) / 3.0
}

/// `n` equally spaced points from `a` to `b` inclusive.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..n)
            .map(|i| {
                if i == n - 1 {
                    b
                } else {
                    a + (b - a) * i as f64 / (n - 1) as f64
                }
            })
            .collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Increasing,
    Decreasing,
}

/// Monotonicity of `f` along an ordered grid, from consecutive differences.
/// The witness is the pair of consecutive grid points with the worst step.
pub fn monotonicity_verdict<F: Fn(f64) -> f64>(f: F, grid: &[f64], direction: Direction, tol: Tolerance) -> Verdict {
    let values: Vec<f64> = grid.iter().map(|&x| f(x)).collect();
    monotonicity_of_values(grid, &values, direction, tol)
}

/// Same as [`monotonicity_verdict`] on precomputed values.
pub fn monotonicity_of_values(grid: &[f64], values: &[f64], direction: Direction, tol: Tolerance) -> Verdict {
    let mut tr = SlackTracker::new();
    for i in 1..grid.len() {
        let step = values[i] - values[i - 1];
        let slack = match direction {
            Direction::Increasing => step,
            Direction::Decreasing => -step,
        };
        tr.push(slack, &[grid[i - 1], grid[i]]);
    }
    tr.finish(tol)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Curvature {
    Convex,
    Concave,
}

/// Convexity/concavity of `f` on a grid via monotone chord slopes.
/// Witness: the three consecutive points whose slopes break the pattern.
pub fn curvature_verdict<F: Fn(f64) -> f64>(f: F, grid: &[f64], curvature: Curvature, tol: Tolerance) -> Verdict {
    let values: Vec<f64> = grid.iter().map(|&x| f(x)).collect();
    let slopes: Vec<f64> = (1..grid.len())
        .map(|i| (values[i] - values[i - 1]) / (grid[i] - grid[i - 1]))
        .collect();
    let mut tr = SlackTracker::new();
    for i in 1..slopes.len() {
        let step = slopes[i] - slopes[i - 1];
        let slack = match curvature {
            Curvature::Convex => step,
            Curvature::Concave => -step,
        };
        tr.push(slack, &[grid[i - 1], grid[i], grid[i + 1]]);
    }
    tr.finish(tol)
}
