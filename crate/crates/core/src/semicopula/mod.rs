//! Semi-copulas, quasi-copulas and copulas on `[0,1]²`, Archimedean
//! construction from generators, and grid checks of their dependence
//! properties.

mod checks;
mod generator;

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

pub use checks::{
    check_frechet_bounds, check_lipschitz, check_ltd_rti, check_migrativity, check_pqd, check_sd, check_si,
    validate, MigrativityGrid, Migrativity, Pqd, TailDependence, Validation,
};
pub use generator::{Convexity, Generator};

use crate::error::{Error, Result};
use crate::numkit::{central_difference, generalized_inverse};
use crate::univariate::SurvivalModel;

pub type Fn2 = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// What a bivariate function on `[0,1]²` is known (or claimed) to be.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    SemiCopula,
    QuasiCopula,
    Copula,
}

/// Nondecreasing `S : [0,1]² → [0,1]` with `S(u,1) = u`, `S(1,v) = v`.
#[derive(Clone)]
pub struct SemiCopula {
    name: String,
    kind: Kind,
    eval: Fn2,
    partial_u: Option<Fn2>,
    generator: Option<Generator>,
}

impl fmt::Debug for SemiCopula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SemiCopula")
            .field("name", &self.name)
            .field("kind", &self.kind)
            .field("archimedean", &self.generator.is_some())
            .finish()
    }
}

/// Tolerance used when inverting sections `v ↦ S(u, v)`.
const SECTION_TOL: f64 = 1e-14;

impl SemiCopula {
    pub fn from_fn<F>(name: impl Into<String>, kind: Kind, f: F) -> Self
    where
        F: Fn(f64, f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            name: name.into(),
            kind,
            eval: Arc::new(f),
            partial_u: None,
            generator: None,
        }
    }

    pub fn with_partial_u<F>(mut self, f: F) -> Self
    where
        F: Fn(f64, f64) -> f64 + Send + Sync + 'static,
    {
        self.partial_u = Some(Arc::new(f));
        self
    }

    /// Attaches a generator to a function already known to equal
    /// `φ⁻¹(φ(u) + φ(v))`; evaluation keeps using the given closure.
    pub fn with_generator(mut self, g: Generator) -> Self {
        self.generator = Some(g);
        self
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn product() -> Self {
        Self::archimedean(Generator::independence())
            .expect("independence generator is valid")
            .renamed("pi")
    }

    pub fn upper() -> Self {
        Self::from_fn("m", Kind::Copula, |u, v| u.min(v))
            .with_partial_u(|u, v| if u < v { 1.0 } else { 0.0 })
    }

    pub fn lower() -> Self {
        Self::from_fn("w", Kind::Copula, |u, v| (u + v - 1.0).max(0.0))
            .with_partial_u(|u, v| if u + v > 1.0 { 1.0 } else { 0.0 })
    }

    /// `S(u,v) = φ⁻¹(φ(u) + φ(v))`. A copula when `φ` is convex, otherwise
    /// only a semi-copula.
    pub fn archimedean(g: Generator) -> Result<Self> {
        g.check()?;
        let kind = match g.convexity() {
            Convexity::Yes => Kind::Copula,
            _ => Kind::SemiCopula,
        };
        let (ge, gp) = (g.clone(), g.clone());
        Ok(Self {
            name: g.name().to_string(),
            kind,
            eval: Arc::new(move |u, v| {
                if u <= 0.0 || v <= 0.0 {
                    return 0.0;
                }
                ge.phi_inv(ge.phi(u) + ge.phi(v))
            }),
            partial_u: Some(Arc::new(move |u, v| {
                if v <= 0.0 {
                    return 0.0;
                }
                if v >= 1.0 {
                    return 1.0;
                }
                let x = gp.phi(u) + gp.phi(v);
                if x >= gp.phi_at_zero() {
                    return 0.0;
                }
                let s = gp.phi_inv(x);
                gp.phi_prime(u) / gp.phi_prime(s)
            })),
            generator: Some(g),
        })
    }

    /// Survival copula `Ĉ(u,v) = u + v - 1 + C(1-u, 1-v)`.
    pub fn survival_from_connecting(c: &SemiCopula) -> Result<Self> {
        if c.kind != Kind::Copula {
            return Err(Error::NotACopula(format!("{} is not a copula", c.name)));
        }
        let (ce, cp) = (c.clone(), c.partial_u.clone());
        let mut out = Self::from_fn(format!("survival({})", c.name), Kind::Copula, move |u, v| {
            (u + v - 1.0 + ce.eval(1.0 - u, 1.0 - v)).clamp(0.0, 1.0)
        });
        if let Some(p) = cp {
            out = out.with_partial_u(move |u, v| 1.0 - p(1.0 - u, 1.0 - v));
        }
        Ok(out)
    }

    /// Diagnostic only: `c · S`, which breaks the boundary conditions while
    /// keeping the claimed kind of `S`.
    pub fn scaled(c: f64, s: &SemiCopula) -> Self {
        let se = s.clone();
        Self::from_fn(format!("scaled:{c}:{}", s.name), s.kind, move |u, v| c * se.eval(u, v))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn generator(&self) -> Option<&Generator> {
        self.generator.as_ref()
    }

    pub fn has_analytic_partial(&self) -> bool {
        self.partial_u.is_some()
    }

    pub fn eval(&self, u: f64, v: f64) -> f64 {
        (self.eval)(u.clamp(0.0, 1.0), v.clamp(0.0, 1.0))
    }

    /// `∂S/∂u`, analytic when available, central difference otherwise.
    pub fn partial_u(&self, u: f64, v: f64) -> f64 {
        match &self.partial_u {
            Some(p) => p(u, v),
            None => central_difference(&|x: f64| self.eval(x, v), u, 0.0, 1.0),
        }
    }

    /// Generalized inverse of the section `v ↦ S(u, v)` at level `t`:
    /// `sup{v : S(u, v) <= t}`.
    pub fn section_inverse(&self, u: f64, t: f64) -> f64 {
        generalized_inverse(|v| self.eval(u, v), t, (0.0, 1.0), true, SECTION_TOL)
    }

    /// Checks that every section `v ↦ S(u, v)` is strictly increasing on a
    /// grid, which the integral form of the Kendall function needs.
    pub fn check_invertible_sections(&self) -> Result<()> {
        let vs = crate::numkit::linspace(0.0, 1.0, 65);
        for k in 1..16 {
            let u = k as f64 / 16.0;
            let mut prev = self.eval(u, 0.0);
            for &v in &vs[1..] {
                let s = self.eval(u, v);
                if !(s > prev) {
                    return Err(Error::SectionInversionFailure { u });
                }
                prev = s;
            }
        }
        Ok(())
    }
}

/// Schur-constant semi-copula `Ḡ(Ḡ⁻¹(u) + Ḡ⁻¹(v))` of a marginal; a copula
/// exactly when `Ḡ` is convex.
pub fn schur_constant_semicopula(m: &SurvivalModel) -> Result<SemiCopula> {
    SemiCopula::archimedean(Generator::from_survival(m))
}
