//! Numerical verification of the dependence/ageing implications over a
//! registry of parametric models, plus the mixture (Simpson-type) demo.
//!
//! An implication is checked as a material conditional over verdicts: a
//! premise that does not hold makes it vacuous; otherwise the conclusion
//! either holds (confirmed), fails (violation) or is tolerance-limited
//! (unresolved).

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bivmodel::{ageing_function, biv_ageing_check, equivalence_triangle, AgeingGrid, BivariateModel};
use crate::error::{Error, Result};
use crate::kendall::{
    classify_pkd_nkd, curve_integral, curve_archimedean, curve_transport, kendall_partition_sup, reconstruct_generator,
    reconstruction_smoothness, standard_grid, Refinement,
};
use crate::numkit::{curvature_verdict, linspace, Curvature, Tolerance, Verdict, VerdictStatus};
use crate::registry::{parse_copula, parse_generator, parse_marginal};
use crate::semicopula::{
    check_ltd_rti, check_migrativity, check_pqd, check_sd, check_si, validate, Kind, MigrativityGrid, SemiCopula,
};
use crate::univariate::{
    classify_ifr_dfr, classify_ifra_dfra, classify_nbu_nwu, MixtureModel, SurvivalModel,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Selector {
    #[serde(rename = "C_hat")]
    C,
    #[serde(rename = "G_bar")]
    G,
    B,
    H1,
    H2,
}

impl fmt::Display for Selector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::C => "C_hat",
            Self::G => "G_bar",
            Self::B => "B",
            Self::H1 => "H1",
            Self::H2 => "H2",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Property {
    Ifr,
    Dfr,
    Ifra,
    Dfra,
    Pmd,
    Nmd,
    Pkd,
    Nkd,
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Ifr => "IFR",
            Self::Dfr => "DFR",
            Self::Ifra => "IFRA",
            Self::Dfra => "DFRA",
            Self::Pmd => "PMD",
            Self::Nmd => "NMD",
            Self::Pkd => "PKD",
            Self::Nkd => "NKD",
        })
    }
}

type Claim = (Selector, Property);

#[derive(Debug, Clone, Copy)]
pub struct ImplicationCase {
    pub item: &'static str,
    pub premises: [Claim; 2],
    pub conclusion: Claim,
    pub source: &'static str,
}

impl ImplicationCase {
    pub fn statement(&self) -> String {
        let [(s1, p1), (s2, p2)] = self.premises;
        let (s, p) = self.conclusion;
        format!("{s1} {p1} & {s2} {p2} => {s} {p}")
    }
}

macro_rules! case {
    ($item:literal, $src:expr, ($s1:ident, $p1:ident), ($s2:ident, $p2:ident) => ($s:ident, $p:ident)) => {
        ImplicationCase {
            item: $item,
            premises: [(Selector::$s1, Property::$p1), (Selector::$s2, Property::$p2)],
            conclusion: (Selector::$s, Property::$p),
            source: $src,
        }
    };
}

const MIGRATIVE: &str = "migrativity-ageing";
const KENDALL: &str = "kendall-ageing";
const RISK: &str = "risk-composition";

/// Supermigrativity of `Ĉ` and `B` against IFR/DFR of `Ḡ`.
pub const MIGRATIVITY_CASES: [ImplicationCase; 6] = [
    case!("i", MIGRATIVE, (G, Ifr), (C, Pmd) => (B, Pmd)),
    case!("ii", MIGRATIVE, (G, Dfr), (C, Nmd) => (B, Nmd)),
    case!("iii", MIGRATIVE, (B, Pmd), (G, Dfr) => (C, Pmd)),
    case!("iv", MIGRATIVE, (B, Nmd), (G, Ifr) => (C, Nmd)),
    case!("v", MIGRATIVE, (C, Pmd), (B, Nmd) => (G, Dfr)),
    case!("vi", MIGRATIVE, (C, Nmd), (B, Pmd) => (G, Ifr)),
];

/// Kendall dependence of `Ĉ` and `B` against IFRA/DFRA of `Ḡ`.
pub const KENDALL_CASES: [ImplicationCase; 6] = [
    case!("i", KENDALL, (G, Ifra), (C, Pkd) => (B, Pkd)),
    case!("ii", KENDALL, (G, Dfra), (C, Nkd) => (B, Nkd)),
    case!("iii", KENDALL, (B, Pkd), (G, Dfra) => (C, Pkd)),
    case!("iv", KENDALL, (B, Nkd), (G, Ifra) => (C, Nkd)),
    case!("v", KENDALL, (C, Pkd), (B, Nkd) => (G, Dfra)),
    case!("vi", KENDALL, (C, Nkd), (B, Pkd) => (G, Ifra)),
];

/// IFRA/DFRA of `Ḡ = H̄₁ ∘ H̄₂⁻¹ ∘ exp(-·)` and its two ingredients.
pub const RISK_CASES: [ImplicationCase; 6] = [
    case!("i", RISK, (G, Ifra), (H1, Dfra) => (H2, Dfra)),
    case!("ii", RISK, (G, Dfra), (H1, Ifra) => (H2, Ifra)),
    case!("iii", RISK, (H2, Dfra), (G, Dfra) => (H1, Dfra)),
    case!("iv", RISK, (H2, Ifra), (G, Ifra) => (H1, Ifra)),
    case!("v", RISK, (H1, Dfra), (H2, Ifra) => (G, Dfra)),
    case!("vi", RISK, (H1, Ifra), (H2, Dfra) => (G, Ifra)),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Vacuous,
    Confirmed,
    /// Premises hold but the conclusion is tolerance-limited.
    Unresolved,
    #[serde(rename = "VIOLATION")]
    Violation,
}

#[derive(Debug, Clone, Serialize)]
pub struct ObjectVerdict {
    pub object: String,
    pub property: String,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, Serialize)]
pub struct ItemOutcome {
    pub item: String,
    pub statement: String,
    pub outcome: Outcome,
    /// Grid point of the failing conclusion (violations only).
    pub witness: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub model_id: String,
    pub check: String,
    pub skipped: Option<String>,
    pub verdicts: Vec<ObjectVerdict>,
    pub outcomes: Vec<ItemOutcome>,
    pub tolerance: Tolerance,
    pub notes: Vec<String>,
}

impl VerificationReport {
    fn new(model_id: &str, check: &str, tol: Tolerance) -> Self {
        Self {
            model_id: model_id.to_string(),
            check: check.to_string(),
            skipped: None,
            verdicts: Vec::new(),
            outcomes: Vec::new(),
            tolerance: tol,
            notes: Vec::new(),
        }
    }

    fn record(&mut self, object: impl fmt::Display, property: impl fmt::Display, v: &Verdict) {
        self.verdicts.push(ObjectVerdict {
            object: object.to_string(),
            property: property.to_string(),
            verdict: v.clone(),
        });
    }

    pub fn verdict(&self, object: &str, property: &str) -> Option<&Verdict> {
        self.verdicts
            .iter()
            .find(|o| o.object == object && o.property == property)
            .map(|o| &o.verdict)
    }

    pub fn count(&self, o: Outcome) -> usize {
        self.outcomes.iter().filter(|x| x.outcome == o).count()
    }

    pub fn violations(&self) -> usize {
        self.count(Outcome::Violation)
    }

    fn apply(&mut self, cases: &[ImplicationCase]) {
        for case in cases {
            let get = |(s, p): Claim| self.verdict(&s.to_string(), &p.to_string()).cloned();
            let premises: Vec<Option<Verdict>> = case.premises.iter().map(|&c| get(c)).collect();
            let conclusion = get(case.conclusion);
            let (outcome, witness) = if premises.iter().any(|p| !p.as_ref().is_some_and(Verdict::holds)) {
                (Outcome::Vacuous, None)
            } else {
                match conclusion {
                    Some(v) if v.holds() => (Outcome::Confirmed, None),
                    Some(v) if v.fails() => (Outcome::Violation, v.witness.clone()),
                    _ => (Outcome::Unresolved, None),
                }
            };
            self.outcomes.push(ItemOutcome {
                item: case.item.to_string(),
                statement: case.statement(),
                outcome,
                witness,
            });
        }
    }
}

/// Grid sizes and tolerances for the harness.
#[derive(Debug, Clone, Serialize)]
pub struct HarnessConfig {
    pub tol: Tolerance,
    /// Used for Kendall-based verdicts, whose inputs carry quadrature error.
    pub kendall_tol: Tolerance,
    pub n_x: usize,
    pub x_max: Option<f64>,
    pub n_uv: usize,
    pub n_s: usize,
    pub n_biv: usize,
    pub n_biv_t: usize,
    pub n_schur: usize,
    pub n_copula: usize,
    pub kendall_grid: Vec<f64>,
    pub cross_check_t: Vec<f64>,
    pub route_tol: f64,
    /// Table size used when reconstructing the generator from `K_Ĉ`.
    pub reconstruct_n: usize,
    pub refine: Refinement,
}

impl Default for HarnessConfig {
    fn default() -> Self {
        Self {
            tol: Tolerance::default(),
            kendall_tol: Tolerance::sharp(1e-6),
            n_x: 64,
            x_max: None,
            n_uv: 16,
            n_s: 8,
            n_biv: 12,
            n_biv_t: 8,
            n_schur: 24,
            n_copula: 33,
            kendall_grid: standard_grid(),
            cross_check_t: vec![0.25, 0.5, 0.75],
            route_tol: 1e-3,
            reconstruct_n: 255,
            refine: Refinement::default(),
        }
    }
}

impl HarnessConfig {
    fn x_grid(&self, m: &SurvivalModel) -> Vec<f64> {
        m.ageing_grid(self.x_max, self.n_x)
    }

    fn ageing_grid(&self, mdl: &BivariateModel) -> AgeingGrid {
        AgeingGrid::uniform(self.x_max.unwrap_or_else(|| mdl.x_max()), self.n_biv, self.n_biv_t)
    }
}

/// Migrativity form: `{Ḡ: IFR/DFR, Ĉ: PMD/NMD, B: PMD/NMD}` and the six
/// implications between them. Biv-IFR/DFR of `F̄` is recorded alongside.
pub fn verify_migrativity_ageing(id: &str, mdl: &BivariateModel, cfg: &HarnessConfig) -> VerificationReport {
    let mut r = VerificationReport::new(id, MIGRATIVE, cfg.tol);
    let g = classify_ifr_dfr(mdl.marginal(), &cfg.x_grid(mdl.marginal()), cfg.tol);
    let mg = MigrativityGrid::uniform(cfg.n_uv, cfg.n_s);
    let c = check_migrativity(mdl.copula(), &mg, cfg.tol);
    let b = check_migrativity(&ageing_function(mdl), &mg, cfg.tol);
    let biv = biv_ageing_check(|x, y| mdl.joint_survival(x, y), &cfg.ageing_grid(mdl), cfg.tol);
    r.record(Selector::G, Property::Ifr, &g.ifr);
    r.record(Selector::G, Property::Dfr, &g.dfr);
    r.record(Selector::C, Property::Pmd, &c.pmd);
    r.record(Selector::C, Property::Nmd, &c.nmd);
    r.record(Selector::B, Property::Pmd, &b.pmd);
    r.record(Selector::B, Property::Nmd, &b.nmd);
    r.record("F_bar", "biv-IFR", &biv.biv_ifr);
    r.record("F_bar", "biv-DFR", &biv.biv_dfr);
    r.apply(&MIGRATIVITY_CASES);
    r
}

/// Kendall form: `{Ḡ: IFRA/DFRA, Ĉ: PKD/NKD, B: PKD/NKD}` with `K_Ĉ` from the
/// integral route and `K_B` transported from it, both cross-checked against
/// the partition supremum before any implication is evaluated.
pub fn verify_kendall_ageing(id: &str, mdl: &BivariateModel, cfg: &HarnessConfig) -> Result<VerificationReport> {
    let mut r = VerificationReport::new(id, KENDALL, cfg.kendall_tol);
    if mdl.copula().check_invertible_sections().is_err() {
        r.skipped = Some("survival copula has non-invertible sections".into());
        return Ok(r);
    }
    if !mdl.marginal().has_density() {
        r.skipped = Some("marginal has no density".into());
        return Ok(r);
    }
    let grid = &cfg.kendall_grid;
    let k_c = curve_integral(mdl.copula(), grid)?;
    let k_b = curve_transport(&k_c, mdl.marginal(), grid)?;
    let b = ageing_function(mdl);
    for &t in &cfg.cross_check_t {
        for (s, k) in [(mdl.copula(), &k_c), (&b, &k_b)] {
            let left = k.eval(t)?;
            let right = kendall_partition_sup(s, t, cfg.refine).value;
            if !((left - right).abs() <= cfg.route_tol) {
                return Err(Error::RouteMismatch { t, left, right });
            }
        }
    }
    let a = classify_ifra_dfra(mdl.marginal(), &cfg.x_grid(mdl.marginal()), cfg.tol);
    let pc = classify_pkd_nkd(&k_c, cfg.kendall_tol);
    let pb = classify_pkd_nkd(&k_b, cfg.kendall_tol);
    r.record(Selector::G, Property::Ifra, &a.ifra);
    r.record(Selector::G, Property::Dfra, &a.dfra);
    r.record(Selector::C, Property::Pkd, &pc.pkd);
    r.record(Selector::C, Property::Nkd, &pc.nkd);
    r.record(Selector::B, Property::Pkd, &pb.pkd);
    r.record(Selector::B, Property::Nkd, &pb.nkd);
    r.record(Selector::C, "K>=t", &k_c.lower_bound_verdict(cfg.kendall_tol));
    r.record(Selector::B, "K>=t", &k_b.lower_bound_verdict(cfg.kendall_tol));
    match k_c.densified(cfg.reconstruct_n).and_then(|d| reconstruct_generator(&d, 0.5)) {
        Ok(phi) => {
            let smooth = reconstruction_smoothness(&phi, &k_c, 1e-4);
            r.record("phi_reconstructed", "fd-consistent", &smooth);
            r.notes.push(
                "differentiability of the reconstructed generator is recorded from finite differences, not certified"
                    .into(),
            );
        }
        Err(e) => r.notes.push(format!("generator reconstruction unavailable: {e}")),
    }
    r.apply(&KENDALL_CASES);
    Ok(r)
}

/// IFRA/DFRA of `H̄₁`, `H̄₂` and the composed `Ḡ`.
pub fn verify_risk_composition(id: &str, h1: &SurvivalModel, h2: &SurvivalModel, cfg: &HarnessConfig) -> VerificationReport {
    let mut r = VerificationReport::new(id, RISK, cfg.tol);
    let g = SurvivalModel::risk_composition(h1.clone(), h2.clone());
    for (sel, m) in [(Selector::G, &g), (Selector::H1, h1), (Selector::H2, h2)] {
        let a = classify_ifra_dfra(m, &cfg.x_grid(m), cfg.tol);
        r.record(sel, Property::Ifra, &a.ifra);
        r.record(sel, Property::Dfra, &a.dfra);
    }
    r.apply(&RISK_CASES);
    r
}

fn agreement(left: &Verdict, right: &Verdict) -> Outcome {
    match (left.status, right.status) {
        (VerdictStatus::Holds, VerdictStatus::Holds) | (VerdictStatus::Fails, VerdictStatus::Fails) => {
            Outcome::Confirmed
        }
        (VerdictStatus::Holds, VerdictStatus::Fails) | (VerdictStatus::Fails, VerdictStatus::Holds) => {
            Outcome::Violation
        }
        _ => Outcome::Unresolved,
    }
}

/// Dependence of `C_φ` against ageing of `φ⁻¹`, each side computed by its
/// own module: PQD/NWU, PKD/DFRA, LTD/DFR, SI/log-convex density, and the
/// negative duals. The ageing side is sampled at `x = φ(u)` for the same
/// `u` grid the copula side uses.
pub fn verify_generator_equivalences(id: &str, key: &str, cfg: &HarnessConfig) -> Result<VerificationReport> {
    let mut r = VerificationReport::new(id, "generator-equivalences", cfg.tol);
    let g = parse_generator(key)?;
    let c = SemiCopula::archimedean(g.clone())?;
    let inv = SurvivalModel::generator_inverse(g.clone())?;

    let ugrid = linspace(0.0, 1.0, cfg.n_copula);
    let interior: Vec<f64> = ugrid[1..ugrid.len() - 1].to_vec();
    let mut xgrid: Vec<f64> = interior.iter().map(|&u| g.phi(u)).collect();
    xgrid.sort_by(f64::total_cmp);
    let kgrid = &cfg.kendall_grid;
    let mut kx: Vec<f64> = kgrid.iter().map(|&t| g.phi(t)).collect();
    kx.sort_by(f64::total_cmp);

    let pqd = check_pqd(&c, &interior, cfg.tol);
    let nbu = classify_nbu_nwu(&inv, &xgrid, cfg.tol);
    let pkd = classify_pkd_nkd(&curve_archimedean(&g, kgrid)?, cfg.kendall_tol);
    let fra = classify_ifra_dfra(&inv, &kx, cfg.kendall_tol);
    let tail = check_ltd_rti(&c, &ugrid, cfg.tol);
    let fr = classify_ifr_dfr(&inv, &xgrid, cfg.tol);
    let si = check_si(&c, &ugrid, cfg.tol);
    let sd = check_sd(&c, &ugrid, cfg.tol);
    let log_f = |x: f64| inv.density(x).map_or(f64::NAN, f64::ln);
    let lf_convex = curvature_verdict(log_f, &xgrid, Curvature::Convex, cfg.tol);
    let lf_concave = curvature_verdict(log_f, &xgrid, Curvature::Concave, cfg.tol);

    let pairs: [(&str, &str, &Verdict, &str, &Verdict); 8] = [
        ("PQD-NWU", "PQD", &pqd.pqd, "NWU", &nbu.nwu),
        ("NQD-NBU", "NQD", &pqd.nqd, "NBU", &nbu.nbu),
        ("PKD-DFRA", "PKD", &pkd.pkd, "DFRA", &fra.dfra),
        ("NKD-IFRA", "NKD", &pkd.nkd, "IFRA", &fra.ifra),
        ("LTD-DFR", "LTD", &tail.ltd, "DFR", &fr.dfr),
        ("LTI-IFR", "LTI", &tail.lti, "IFR", &fr.ifr),
        ("SI-logconvex", "SI", &si, "log-density convex", &lf_convex),
        ("SD-logconcave", "SD", &sd, "log-density concave", &lf_concave),
    ];
    for (item, lp, lv, rp, rv) in pairs {
        r.record("C_phi", lp, lv);
        r.record("phi_inv", rp, rv);
        let outcome = agreement(lv, rv);
        r.outcomes.push(ItemOutcome {
            item: item.to_string(),
            statement: format!("C_phi {lp} <=> phi_inv {rp}"),
            outcome,
            witness: if outcome == Outcome::Violation {
                lv.witness.clone().or_else(|| rv.witness.clone())
            } else {
                None
            },
        });
    }
    Ok(r)
}

/// Three equivalent bivariate ageing conditions, reported as two items
/// (positive and negative side).
pub fn verify_triangle(id: &str, mdl: &BivariateModel, cfg: &HarnessConfig) -> VerificationReport {
    let mut r = VerificationReport::new(id, "ageing-triangle", cfg.tol);
    let t = equivalence_triangle(mdl, &cfg.ageing_grid(mdl), cfg.n_schur, cfg.tol);
    r.record("F_bar", "biv-IFR", &t.biv.biv_ifr);
    r.record("F_bar", "Schur-concave", &t.schur.concave);
    r.record(Selector::B, Property::Pmd, &t.migrativity.pmd);
    r.record("F_bar", "biv-DFR", &t.biv.biv_dfr);
    r.record("F_bar", "Schur-convex", &t.schur.convex);
    r.record(Selector::B, Property::Nmd, &t.migrativity.nmd);
    for (item, vs) in [
        ("positive", [&t.biv.biv_ifr, &t.schur.concave, &t.migrativity.pmd]),
        ("negative", [&t.biv.biv_dfr, &t.schur.convex, &t.migrativity.nmd]),
    ] {
        let holds = vs.iter().filter(|v| v.holds()).count();
        let fails = vs.iter().filter(|v| v.fails()).count();
        let outcome = if holds > 0 && fails > 0 {
            Outcome::Violation
        } else if holds == 3 || fails == 3 {
            Outcome::Confirmed
        } else {
            Outcome::Unresolved
        };
        r.outcomes.push(ItemOutcome {
            item: item.to_string(),
            statement: format!("biv-ageing, Schur and migrativity of B agree ({item} side)"),
            outcome,
            witness: vs.iter().find(|v| v.fails()).and_then(|v| v.witness.clone()),
        });
    }
    r
}

#[derive(Debug, Clone, Serialize)]
pub struct SimpsonReport {
    pub components_ifr: Vec<Verdict>,
    pub conditional_biv_ifr: Verdict,
    pub mixture_ifr: Verdict,
    pub mixture_dfr: Verdict,
}

/// Each component IFR, the conditionally i.i.d. pair biv-IFR, and yet the
/// mixture marginal may fail IFR.
pub fn simpson_demo(mix: &MixtureModel, n: usize, tol: Tolerance) -> SimpsonReport {
    let m = SurvivalModel::mixture(mix.clone());
    let grid = m.ageing_grid(None, n);
    let components_ifr = mix
        .components()
        .iter()
        .map(|c| classify_ifr_dfr(c, &grid, tol).ifr)
        .collect();
    let joint = |x: f64, y: f64| -> f64 {
        mix.weights()
            .iter()
            .zip(mix.components())
            .map(|(w, c)| w * c.survival(x) * c.survival(y))
            .sum()
    };
    let cond = biv_ageing_check(joint, &AgeingGrid::uniform(m.default_x_max(), 12, 8), tol);
    let c = classify_ifr_dfr(&m, &grid, tol);
    SimpsonReport {
        components_ifr,
        conditional_biv_ifr: cond.biv_ifr,
        mixture_ifr: c.ifr,
        mixture_dfr: c.dfr,
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
pub struct ModelEntry {
    pub id: String,
    pub copula: String,
    pub marginal: String,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
pub struct PairEntry {
    pub id: String,
    pub h1: String,
    pub h2: String,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
pub struct GeneratorEntry {
    pub id: String,
    pub generator: String,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
pub struct MixtureEntry {
    pub id: String,
    pub rates: Vec<f64>,
    pub weights: Vec<f64>,
}

/// A registry of models to sweep; deserializable from configuration.
#[derive(Debug, Clone, Default, Deserialize, Serialize)]
pub struct Registry {
    #[serde(default)]
    pub model: Vec<ModelEntry>,
    #[serde(default)]
    pub risk_pair: Vec<PairEntry>,
    #[serde(default)]
    pub generator: Vec<GeneratorEntry>,
    #[serde(default)]
    pub mixture: Vec<MixtureEntry>,
}

impl Registry {
    pub fn builtin() -> Self {
        let models: &[(&str, &str)] = &[
            ("pi", "exp:1"),
            ("pi", "weibull:2:1"),
            ("pi", "weibull:0.5:1"),
            ("pi", "pareto:2:1"),
            ("pi", "mixexp:1,5:0.5,0.5"),
            ("m", "weibull:2:1"),
            ("m", "mixexp:1,5:0.5,0.5"),
            ("w", "weibull:2:1"),
            ("w", "exp:1"),
            ("clayton:0.5", "weibull:2:1"),
            ("clayton:1", "exp:1"),
            ("clayton:1", "weibull:2:1"),
            ("clayton:1", "weibull:0.5:1"),
            ("clayton:2", "pareto:2:1"),
            ("clayton:2", "mixexp:1,5:0.5,0.5"),
            ("gumbel:1.5", "weibull:0.5:1"),
            ("gumbel:2", "exp:1"),
            ("gumbel:2", "weibull:2:1"),
            ("frank:2", "weibull:2:1"),
            ("frank:2", "pareto:2:1"),
            ("frank:-3", "exp:1"),
            ("frank:-3", "weibull:2:1"),
            ("frank:-3", "weibull:0.5:1"),
            ("schur:exp:1", "exp:1"),
            ("schur:weibull:0.5:1", "weibull:0.5:1"),
            ("schur:pareto:2:1", "pareto:2:1"),
        ];
        let model = models
            .iter()
            .map(|(c, m)| ModelEntry {
                id: format!("{c}|{m}"),
                copula: c.to_string(),
                marginal: m.to_string(),
            })
            .collect();
        let pairs: &[(&str, &str)] = &[
            ("weibull:2:1", "weibull:2:1"),
            ("weibull:0.5:1", "weibull:2:1"),
            ("weibull:2:1", "weibull:0.5:1"),
            ("exp:1", "weibull:2:1"),
            ("pareto:2:1", "exp:1"),
            ("weibull:1.5:1", "weibull:0.7:1"),
            ("mixexp:1,5:0.5,0.5", "weibull:2:1"),
        ];
        let risk_pair = pairs
            .iter()
            .map(|(a, b)| PairEntry {
                id: format!("{a}~{b}"),
                h1: a.to_string(),
                h2: b.to_string(),
            })
            .collect();
        let generator = [
            "pi",
            "clayton:0.5",
            "clayton:1",
            "clayton:2",
            "gumbel:1.5",
            "gumbel:2",
            "frank:2",
            "frank:-3",
            "arch-gen:sqrt-log",
            "schur:weibull:0.5:1",
        ]
        .iter()
        .map(|k| GeneratorEntry {
            id: k.to_string(),
            generator: k.to_string(),
        })
        .collect();
        let mixture = vec![MixtureEntry {
            id: "mixexp:1,5:0.5,0.5".into(),
            rates: vec![1.0, 5.0],
            weights: vec![0.5, 0.5],
        }];
        Self {
            model,
            risk_pair,
            generator,
            mixture,
        }
    }

    /// Seeded random families: Clayton/Gumbel/Frank/product copulas with
    /// Weibull marginals of shape in `[0.3, 3]`.
    pub fn fuzz(seed: u64, n: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut model = Vec::with_capacity(n);
        for i in 0..n {
            let copula = match rng.gen_range(0..4) {
                0 => format!("clayton:{:.4}", rng.gen_range(0.2..5.0)),
                1 => format!("gumbel:{:.4}", rng.gen_range(1.0..4.0)),
                2 => {
                    let mag: f64 = rng.gen_range(0.5..8.0);
                    let th = if rng.gen_bool(0.5) { mag } else { -mag };
                    format!("frank:{th:.4}")
                }
                _ => "pi".to_string(),
            };
            let marginal = format!("weibull:{:.4}:1", rng.gen_range(0.3..3.0));
            model.push(ModelEntry {
                id: format!("fuzz-{i:03}|{copula}|{marginal}"),
                copula,
                marginal,
            });
        }
        Self {
            model,
            ..Self::default()
        }
    }

    pub fn model_count(&self) -> usize {
        self.model.len()
    }
}

/// Rejects copulas that fail their own claimed structure before any
/// implication is evaluated.
fn checked_model(e: &ModelEntry, cfg: &HarnessConfig) -> Result<BivariateModel> {
    let c = parse_copula(&e.copula)?;
    let m = parse_marginal(&e.marginal)?;
    let v = validate(&c, &linspace(0.0, 1.0, 17), cfg.tol);
    if !(v.boundary.holds() && v.monotone.holds()) || (c.kind() == Kind::Copula && v.two_increasing.fails()) {
        return Err(Error::NotACopula(format!(
            "model `{}`: copula `{}` fails validation (boundary {:?}, monotone {:?}, 2-increasing {:?})",
            e.id, e.copula, v.boundary.status, v.monotone.status, v.two_increasing.status
        )));
    }
    BivariateModel::new(c, m)
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct SweepSummary {
    pub models: usize,
    pub reports: usize,
    pub vacuous: usize,
    pub confirmed: usize,
    pub unresolved: usize,
    pub violations: usize,
    pub skipped: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Sweep {
    pub reports: Vec<VerificationReport>,
    pub simpson: Vec<(String, SimpsonReport)>,
    pub summary: SweepSummary,
}

/// Runs every check of the registry. Models are processed in parallel and
/// reports come back ordered by check family and then model id.
pub fn run_sweep(reg: &Registry, cfg: &HarnessConfig) -> Result<Sweep> {
    let mut models = reg.model.clone();
    models.sort_by(|a, b| a.id.cmp(&b.id));
    let per_model: Vec<Vec<VerificationReport>> = models
        .par_iter()
        .map(|e| -> Result<Vec<VerificationReport>> {
            let mdl = checked_model(e, cfg)?;
            Ok(vec![
                verify_migrativity_ageing(&e.id, &mdl, cfg),
                verify_kendall_ageing(&e.id, &mdl, cfg)?,
                verify_triangle(&e.id, &mdl, cfg),
            ])
        })
        .collect::<Result<_>>()?;

    let mut pairs = reg.risk_pair.clone();
    pairs.sort_by(|a, b| a.id.cmp(&b.id));
    let risk: Vec<VerificationReport> = pairs
        .par_iter()
        .map(|p| Ok(verify_risk_composition(&p.id, &parse_marginal(&p.h1)?, &parse_marginal(&p.h2)?, cfg)))
        .collect::<Result<_>>()?;

    let mut gens = reg.generator.clone();
    gens.sort_by(|a, b| a.id.cmp(&b.id));
    let equiv: Vec<VerificationReport> = gens
        .par_iter()
        .map(|g| verify_generator_equivalences(&g.id, &g.generator, cfg))
        .collect::<Result<_>>()?;

    let mut simpson = Vec::new();
    for m in &reg.mixture {
        let mix = MixtureModel::exponentials(&m.rates, &m.weights)?;
        simpson.push((m.id.clone(), simpson_demo(&mix, cfg.n_x, cfg.tol)));
    }

    let mut reports = Vec::new();
    for kind in 0..3 {
        for r in &per_model {
            reports.push(r[kind].clone());
        }
    }
    reports.extend(risk);
    reports.extend(equiv);

    let mut summary = SweepSummary {
        models: models.len(),
        reports: reports.len(),
        ..SweepSummary::default()
    };
    for r in &reports {
        if r.skipped.is_some() {
            summary.skipped += 1;
        }
        summary.vacuous += r.count(Outcome::Vacuous);
        summary.confirmed += r.count(Outcome::Confirmed);
        summary.unresolved += r.count(Outcome::Unresolved);
        summary.violations += r.violations();
    }
    Ok(Sweep {
        reports,
        simpson,
        summary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model(c: &str, m: &str) -> BivariateModel {
        BivariateModel::new(parse_copula(c).unwrap(), parse_marginal(m).unwrap()).unwrap()
    }

    fn outcome(r: &VerificationReport, item: &str) -> Outcome {
        r.outcomes.iter().find(|o| o.item == item).unwrap().outcome
    }

    #[test]
    fn migrativity_examples() {
        let cfg = HarnessConfig::default();
        let r = verify_migrativity_ageing("w2", &model("pi", "weibull:2:1"), &cfg);
        assert_eq!(outcome(&r, "i"), Outcome::Confirmed);
        assert_eq!(r.violations(), 0);
        let r = verify_migrativity_ageing("cl", &model("clayton:1", "exp:1"), &cfg);
        assert_eq!(outcome(&r, "iii"), Outcome::Confirmed);
        let r = verify_migrativity_ageing("sc", &model("schur:exp:1", "exp:1"), &cfg);
        assert_eq!(r.violations(), 0);
        assert!(r.outcomes.iter().all(|o| matches!(o.outcome, Outcome::Vacuous | Outcome::Confirmed)));
    }

    #[test]
    fn kendall_examples() {
        let cfg = HarnessConfig::default();
        let r = verify_kendall_ageing("a", &model("clayton:1", "weibull:1:1"), &cfg).unwrap();
        assert_eq!(outcome(&r, "i"), Outcome::Confirmed);
        let r = verify_kendall_ageing("b", &model("pi", "weibull:0.5:1"), &cfg).unwrap();
        assert_eq!(outcome(&r, "ii"), Outcome::Confirmed);
        let r = verify_kendall_ageing("c", &model("pi", "weibull:2:1"), &cfg).unwrap();
        assert_eq!(outcome(&r, "i"), Outcome::Confirmed);
        let r = verify_kendall_ageing("m", &model("m", "weibull:2:1"), &cfg).unwrap();
        assert!(r.skipped.is_some());
    }

    #[test]
    fn risk_composition_examples() {
        let cfg = HarnessConfig::default();
        let w = |s: f64| SurvivalModel::weibull(s, 1.0).unwrap();
        let r = verify_risk_composition("same", &w(1.7), &w(1.7), &cfg);
        assert!(r.verdict("G_bar", "IFRA").unwrap().holds());
        assert!(r.verdict("G_bar", "DFRA").unwrap().holds());
        let r = verify_risk_composition("v", &w(0.5), &w(2.0), &cfg);
        assert_eq!(outcome(&r, "v"), Outcome::Confirmed);
        let r = verify_risk_composition("vi", &w(2.0), &w(0.5), &cfg);
        assert_eq!(outcome(&r, "vi"), Outcome::Confirmed);
    }

    #[test]
    fn generator_equivalence_examples() {
        let cfg = HarnessConfig::default();
        for key in ["clayton:1", "gumbel:2", "arch-gen:sqrt-log"] {
            let r = verify_generator_equivalences(key, key, &cfg).unwrap();
            assert_eq!(r.violations(), 0, "{key}: {:#?}", r.outcomes);
        }
        let r = verify_generator_equivalences("c", "clayton:1", &cfg).unwrap();
        for p in ["PQD", "PKD", "LTD", "SI"] {
            assert!(r.verdict("C_phi", p).unwrap().holds(), "{p}");
        }
        let r = verify_generator_equivalences("s", "arch-gen:sqrt-log", &cfg).unwrap();
        for p in ["NQD", "NKD"] {
            assert!(r.verdict("C_phi", p).unwrap().holds(), "{p}");
        }
        assert!(r.verdict("C_phi", "LTD").unwrap().fails());
    }

    #[test]
    fn simpson_examples() {
        let tol = Tolerance::default();
        let mix = MixtureModel::exponentials(&[1.0, 5.0], &[0.5, 0.5]).unwrap();
        let s = simpson_demo(&mix, 64, tol);
        assert!(s.components_ifr.iter().all(Verdict::holds));
        assert!(s.conditional_biv_ifr.holds());
        assert!(s.mixture_ifr.fails() && s.mixture_dfr.holds());

        let single = MixtureModel::exponentials(&[2.0], &[1.0]).unwrap();
        assert!(simpson_demo(&single, 64, tol).mixture_ifr.holds());

        let near = MixtureModel::exponentials(&[1.0, 1.01], &[0.5, 0.5]).unwrap();
        let s = simpson_demo(&near, 64, Tolerance::new(1e-3, 1e-9));
        assert!(s.mixture_dfr.holds());
        assert!(s.mixture_ifr.inconclusive());
    }

    #[test]
    fn fuzz_registry_is_deterministic() {
        let a = Registry::fuzz(42, 10);
        let b = Registry::fuzz(42, 10);
        let ids = |r: &Registry| r.model.iter().map(|m| m.id.clone()).collect::<Vec<_>>();
        assert_eq!(ids(&a), ids(&b));
        assert_ne!(ids(&a), ids(&Registry::fuzz(7, 10)));
    }

    #[test]
    fn corrupted_copula_is_rejected() {
        let reg = Registry {
            model: vec![ModelEntry {
                id: "broken".into(),
                copula: "scaled:0.9:pi".into(),
                marginal: "exp:1".into(),
            }],
            ..Registry::default()
        };
        assert!(matches!(run_sweep(&reg, &HarnessConfig::default()), Err(Error::NotACopula(_))));
    }
}
