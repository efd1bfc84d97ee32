//! Exchangeable bivariate survival models `F̄(x,y) = Ĉ(Ḡ(x), Ḡ(y))`, the
//! transform `γ(u) = exp(-Ḡ⁻¹(u))`, the ageing function
//! `B = γ ∘ Ĉ ∘ (γ⁻¹ × γ⁻¹)` and the bivariate ageing checks.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numkit::{linspace, SlackTracker, Tolerance, Verdict, VerdictStatus};
use crate::semicopula::{
    check_migrativity, schur_constant_semicopula, validate, Fn2, Generator, Kind, Migrativity, MigrativityGrid,
    SemiCopula,
};
use crate::univariate::SurvivalModel;

#[derive(Clone, Debug)]
pub struct BivariateModel {
    copula: SemiCopula,
    marginal: SurvivalModel,
}

impl BivariateModel {
    /// `copula` is the survival copula `Ĉ` and must be a copula.
    pub fn new(copula: SemiCopula, marginal: SurvivalModel) -> Result<Self> {
        if copula.kind() != Kind::Copula {
            return Err(Error::NotACopula(format!(
                "survival copula `{}` is only a {:?}",
                copula.name(),
                copula.kind()
            )));
        }
        Ok(Self { copula, marginal })
    }

    pub fn copula(&self) -> &SemiCopula {
        &self.copula
    }

    pub fn marginal(&self) -> &SurvivalModel {
        &self.marginal
    }

    pub fn joint_survival(&self, x: f64, y: f64) -> f64 {
        self.copula.eval(self.marginal.survival(x), self.marginal.survival(y))
    }

    pub fn gamma(&self) -> GammaTransform {
        GammaTransform::new(self.marginal.clone())
    }

    /// Default upper end for `x`-grids.
    pub fn x_max(&self) -> f64 {
        self.marginal.default_x_max()
    }
}

/// `γ(u) = exp(-Ḡ⁻¹(u))` and `γ⁻¹(z) = Ḡ(-ln z)`.
#[derive(Clone, Debug)]
pub struct GammaTransform {
    marginal: SurvivalModel,
}

impl GammaTransform {
    pub fn new(marginal: SurvivalModel) -> Self {
        Self { marginal }
    }

    pub fn gamma(&self, u: f64) -> f64 {
        if u <= 0.0 {
            return 0.0;
        }
        if u >= 1.0 {
            return 1.0;
        }
        (-self.marginal.inverse_survival(u)).exp()
    }

    pub fn gamma_inv(&self, z: f64) -> f64 {
        if z <= 0.0 {
            return 0.0;
        }
        if z >= 1.0 {
            return 1.0;
        }
        self.marginal.survival(-z.ln())
    }

    /// `γ'(u) = γ(u) / g(Ḡ⁻¹(u))`.
    pub fn gamma_prime(&self, u: f64) -> Option<f64> {
        let x = self.marginal.inverse_survival(u);
        Some((-x).exp() / self.marginal.density(x)?)
    }

    /// `(γ⁻¹)'(z) = g(-ln z) / z`.
    pub fn gamma_inv_prime(&self, z: f64) -> Option<f64> {
        Some(self.marginal.density(-z.ln())? / z)
    }
}

/// Ageing function `B(u,v) = γ(Ĉ(γ⁻¹(u), γ⁻¹(v)))`, evaluated lazily by
/// composition. For Archimedean `Ĉ = C_φ` it carries the generator
/// `ψ(u) = φ(Ḡ(-ln u))`.
pub fn ageing_function(mdl: &BivariateModel) -> SemiCopula {
    let gm = mdl.gamma();
    let c = mdl.copula.clone();
    let (g1, c1) = (gm.clone(), c.clone());
    let name = format!("B[{}|{}]", c.name(), mdl.marginal.name());
    let mut b = SemiCopula::from_fn(name.clone(), Kind::SemiCopula, move |u, v| {
        g1.gamma(c1.eval(g1.gamma_inv(u), g1.gamma_inv(v)))
    });
    if mdl.marginal.has_density() {
        let (g2, c2) = (gm.clone(), c.clone());
        b = b.with_partial_u(move |u, v| {
            if u <= 0.0 || u >= 1.0 {
                return f64::NAN;
            }
            let (a, bb) = (g2.gamma_inv(u), g2.gamma_inv(v));
            let inner = c2.eval(a, bb);
            if inner <= 0.0 {
                return 0.0;
            }
            let outer = g2.gamma_prime(inner).unwrap_or(f64::NAN);
            outer * c2.partial_u(a, bb) * g2.gamma_inv_prime(u).unwrap_or(f64::NAN)
        });
    }
    if let Some(phi) = c.generator() {
        let psi = transported_generator(phi, &mdl.marginal);
        if psi.check().is_ok() {
            b = b.with_generator(psi);
        }
    }
    b.renamed(name)
}

/// `ψ(u) = φ(Ḡ(-ln u))`, `ψ⁻¹(x) = exp(-Ḡ⁻¹(φ⁻¹(x)))`.
pub fn transported_generator(phi: &Generator, m: &SurvivalModel) -> Generator {
    let (p1, m1) = (phi.clone(), m.clone());
    let (p2, m2) = (phi.clone(), m.clone());
    let mut psi = Generator::new(
        format!("psi[{}|{}]", phi.name(), m.name()),
        move |u: f64| p1.phi(m1.survival(-u.ln())),
        move |x: f64| {
            let z = p2.phi_inv(x);
            if z <= 0.0 {
                0.0
            } else {
                (-m2.inverse_survival(z)).exp()
            }
        },
        crate::semicopula::Convexity::Unchecked,
    );
    if m.has_density() {
        let (p3, m3) = (phi.clone(), m.clone());
        psi = psi.with_derivative(move |u: f64| {
            let x = -u.ln();
            p3.phi_prime(m3.survival(x)) * m3.density(x).unwrap_or(f64::NAN) / u
        });
    }
    psi
}

/// Schur-constant model `F̄(x,y) = Ḡ(x + y)`; needs a convex `Ḡ`.
pub fn schur_constant_model(m: &SurvivalModel) -> Result<BivariateModel> {
    let c = schur_constant_semicopula(m)?;
    if c.kind() != Kind::Copula {
        return Err(Error::NotACopula(format!(
            "marginal {} is not convex, so its Schur-constant semi-copula is not a copula",
            m.name()
        )));
    }
    BivariateModel::new(c, m.clone())
}

/// Points `(x, y, t)` with `0 <= x < y <= x_max`, `t > 0`, both within and
/// beyond `y - x`.
#[derive(Debug, Clone)]
pub struct AgeingGrid {
    pub points: Vec<[f64; 3]>,
}

impl AgeingGrid {
    pub fn uniform(x_max: f64, n_xy: usize, n_t: usize) -> Self {
        let xs = linspace(0.0, x_max, n_xy);
        let ts = linspace(0.0, x_max, n_t + 1);
        let mut points = Vec::new();
        for (i, &x) in xs.iter().enumerate() {
            for &y in &xs[i + 1..] {
                for &t in &ts[1..] {
                    points.push([x, y, t]);
                }
            }
        }
        Self { points }
    }

    /// The image `(e^{-x}, e^{-y}, e^{-t})`, i.e. the same inequalities
    /// restated for the ageing function.
    pub fn to_migrativity(&self) -> MigrativityGrid {
        MigrativityGrid {
            points: self
                .points
                .iter()
                .map(|&[x, y, t]| [(-x).exp(), (-y).exp(), (-t).exp()])
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BivAgeing {
    pub biv_ifr: Verdict,
    pub biv_dfr: Verdict,
}

/// `F̄(x+t, y) >= F̄(x, y+t)` for `x < y` (biv-IFR), reversed for biv-DFR.
pub fn biv_ageing_check<F: Fn(f64, f64) -> f64>(joint: F, grid: &AgeingGrid, tol: Tolerance) -> BivAgeing {
    let mut pos = SlackTracker::new();
    let mut neg = SlackTracker::new();
    for p in &grid.points {
        let [x, y, t] = *p;
        let d = joint(x + t, y) - joint(x, y + t);
        pos.push(d, p);
        neg.push(-d, p);
    }
    BivAgeing {
        biv_ifr: pos.finish(tol),
        biv_dfr: neg.finish(tol),
    }
}

pub fn biv_ifr_check(mdl: &BivariateModel, grid: &AgeingGrid, tol: Tolerance) -> BivAgeing {
    biv_ageing_check(|x, y| mdl.joint_survival(x, y), grid, tol)
}

#[derive(Debug, Clone, Serialize)]
pub struct Schur {
    pub concave: Verdict,
    pub convex: Verdict,
}

/// Schur-concavity through majorization along anti-diagonals: on each line
/// `x + y = c`, `F̄(x, c - x)` must be nondecreasing as `x` moves from `0`
/// to `c/2` (symmetric functions only). Schur-convexity is the reverse.
pub fn schur_check<F: Fn(f64, f64) -> f64>(joint: F, x_max: f64, n_c: usize, n_x: usize, tol: Tolerance) -> Schur {
    let mut pos = SlackTracker::new();
    let mut neg = SlackTracker::new();
    for &c in &linspace(0.0, 2.0 * x_max, n_c + 1)[1..] {
        let xs = linspace(0.0, 0.5 * c, n_x);
        let vals: Vec<f64> = xs.iter().map(|&x| joint(x, c - x)).collect();
        for k in 1..xs.len() {
            let d = vals[k] - vals[k - 1];
            pos.push(d, &[xs[k - 1], xs[k], c]);
            neg.push(-d, &[xs[k - 1], xs[k], c]);
        }
    }
    Schur {
        concave: pos.finish(tol),
        convex: neg.finish(tol),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Positive,
    Negative,
    /// Both positive and negative verdicts hold (equality case).
    Both,
    Neither,
}

fn side(pos: &Verdict, neg: &Verdict) -> Side {
    match (pos.holds(), neg.holds()) {
        (true, true) => Side::Both,
        (true, false) => Side::Positive,
        (false, true) => Side::Negative,
        (false, false) => Side::Neither,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Triangle {
    pub biv: BivAgeing,
    pub schur: Schur,
    pub migrativity: Migrativity,
    pub sides: [Side; 3],
    /// No property is certified by one route and refuted by another.
    pub agree: bool,
}

fn conflict(vs: [&Verdict; 3]) -> bool {
    let holds = vs.iter().any(|v| v.status == VerdictStatus::Holds);
    let fails = vs.iter().any(|v| v.status == VerdictStatus::Fails);
    holds && fails
}

/// The three equivalent conditions: biv-IFR of `F̄`, Schur-concavity of
/// `F̄`, supermigrativity of `B` (and their negative counterparts).
pub fn equivalence_triangle(mdl: &BivariateModel, grid: &AgeingGrid, n_schur: usize, tol: Tolerance) -> Triangle {
    let biv = biv_ifr_check(mdl, grid, tol);
    let x_max = grid.points.iter().map(|p| p[1]).fold(0.0, f64::max);
    let schur = schur_check(|x, y| mdl.joint_survival(x, y), x_max, n_schur, n_schur, tol);
    let b = ageing_function(mdl);
    let migrativity = check_migrativity(&b, &grid.to_migrativity(), tol);
    let sides = [
        side(&biv.biv_ifr, &biv.biv_dfr),
        side(&schur.concave, &schur.convex),
        side(&migrativity.pmd, &migrativity.nmd),
    ];
    let agree = !conflict([&biv.biv_ifr, &schur.concave, &migrativity.pmd])
        && !conflict([&biv.biv_dfr, &schur.convex, &migrativity.nmd]);
    Triangle {
        biv,
        schur,
        migrativity,
        sides,
        agree,
    }
}

/// `M̄(x,y) = H̄(-ln B(e^{-x}, e^{-y}))` with the 2-increasing check of its
/// induced copula `(u,v) ↦ M̄(H̄⁻¹(u), H̄⁻¹(v))`.
#[derive(Clone)]
pub struct Rebuilt {
    pub joint: Fn2,
    pub induced_copula: SemiCopula,
    pub validation: Verdict,
}

impl std::fmt::Debug for Rebuilt {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Rebuilt").field("validation", &self.validation).finish()
    }
}

pub fn rebuild_from_ageing(b: &SemiCopula, h: &SurvivalModel, grid: &[f64], tol: Tolerance) -> Rebuilt {
    let (b1, h1) = (b.clone(), h.clone());
    let joint: Fn2 = Arc::new(move |x, y| h1.survival(-b1.eval((-x).exp(), (-y).exp()).ln()));
    let (j2, h2) = (joint.clone(), h.clone());
    let induced = SemiCopula::from_fn(format!("rebuilt[{}|{}]", b.name(), h.name()), Kind::SemiCopula, move |u, v| {
        if u <= 0.0 || v <= 0.0 {
            return 0.0;
        }
        j2(h2.inverse_survival(u), h2.inverse_survival(v))
    });
    let validation = validate(&induced, grid, tol).two_increasing;
    Rebuilt {
        joint,
        induced_copula: induced,
        validation,
    }
}
