//! Generalized Kendall distributions of semi-copulas: partition supremum,
//! Archimedean closed form, integral form, transport to the ageing function;
//! PKD/NKD classification, Kendall equivalence and generator reconstruction.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numkit::{
    generalized_inverse, integrate_fn, linspace, Fn1, SlackTracker, Tolerance, Verdict, QUAD_TOL,
};
use crate::semicopula::{Convexity, Generator, SemiCopula};
use crate::univariate::SurvivalModel;

/// Minimum gap `K(s) - s` for a curve to count as pseudo-Archimedean.
pub const GAP_TOL: f64 = 1e-6;

/// Interior grid `{0.05, 0.10, ..., 0.95}`.
pub fn standard_grid() -> Vec<f64> {
    (1..20).map(|k| k as f64 * 0.05).collect()
}

/// `K_Π(t) = t - t ln t`.
pub fn kendall_product(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else {
        t - t * t.ln()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    PartitionSup,
    ArchimedeanClosedForm,
    IntegralForm,
    TransportedFromCopula,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::PartitionSup => "partition-sup",
            Self::ArchimedeanClosedForm => "archimedean-closed-form",
            Self::IntegralForm => "integral-form",
            Self::TransportedFromCopula => "transported-from-copula",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [
            Self::PartitionSup,
            Self::ArchimedeanClosedForm,
            Self::IntegralForm,
            Self::TransportedFromCopula,
        ]
        .into_iter()
        .find(|p| p.as_str() == s)
    }
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// `K` tabulated on an interior grid of `(0,1)`, with `K(0)=0`, `K(1)=1`
/// fixed by convention. An attached evaluator allows resampling.
#[derive(Clone)]
pub struct KendallCurve {
    grid: Vec<f64>,
    values: Vec<f64>,
    provenance: Provenance,
    evaluator: Option<Fn1>,
}

impl fmt::Debug for KendallCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("KendallCurve")
            .field("provenance", &self.provenance)
            .field("points", &self.grid.len())
            .field("evaluator", &self.evaluator.is_some())
            .finish()
    }
}

impl KendallCurve {
    pub fn tabulated(grid: Vec<f64>, values: Vec<f64>, provenance: Provenance) -> Result<Self> {
        if grid.len() != values.len() || grid.is_empty() {
            return Err(Error::GridMismatch);
        }
        if grid.windows(2).any(|w| !(w[0] < w[1])) || grid[0] <= 0.0 || grid[grid.len() - 1] >= 1.0 {
            return Err(Error::InvalidParameter("Kendall grid must be increasing inside (0,1)".into()));
        }
        Ok(Self {
            grid,
            values,
            provenance,
            evaluator: None,
        })
    }

    /// Evaluates `k` at every grid point (in parallel) and keeps `k` for later
    /// resampling.
    pub fn from_evaluator<F>(grid: &[f64], provenance: Provenance, k: F) -> Result<Self>
    where
        F: Fn(f64) -> Result<f64> + Send + Sync + 'static,
    {
        let values = grid.par_iter().map(|&t| k(t)).collect::<Result<Vec<_>>>()?;
        let mut c = Self::tabulated(grid.to_vec(), values, provenance)?;
        c.evaluator = Some(Arc::new(move |t| k(t).unwrap_or(f64::NAN)));
        Ok(c)
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn has_evaluator(&self) -> bool {
        self.evaluator.is_some()
    }

    /// Exact value at `t`: endpoints by convention, grid points from the
    /// table, anything else through the evaluator.
    pub fn eval(&self, t: f64) -> Result<f64> {
        if t <= 0.0 {
            return Ok(0.0);
        }
        if t >= 1.0 {
            return Ok(1.0);
        }
        if let Some(e) = &self.evaluator {
            return Ok(e(t));
        }
        match self.grid.binary_search_by(|g| g.total_cmp(&t)) {
            Ok(i) => Ok(self.values[i]),
            Err(_) => Err(Error::GridMismatch),
        }
    }

    /// Table of this curve on `n` interior uniform points plus its own grid,
    /// without the evaluator. Cheap to evaluate between nodes.
    pub fn densified(&self, n: usize) -> Result<Self> {
        let mut grid = uniform_grid(n);
        grid.extend_from_slice(&self.grid);
        grid.sort_by(f64::total_cmp);
        grid.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        let values = grid.par_iter().map(|&t| self.eval(t)).collect::<Result<Vec<_>>>()?;
        Self::tabulated(grid, values, self.provenance)
    }

    /// Piecewise-linear interpolation through `(0,0)`, the table and `(1,1)`.
    /// Only used when the caller explicitly asks for it.
    pub fn interpolate(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        if t >= 1.0 {
            return 1.0;
        }
        let i = self.grid.partition_point(|&g| g <= t);
        let (t0, k0) = if i == 0 { (0.0, 0.0) } else { (self.grid[i - 1], self.values[i - 1]) };
        let (t1, k1) = if i == self.grid.len() { (1.0, 1.0) } else { (self.grid[i], self.values[i]) };
        if t1 == t0 {
            return k0;
        }
        k0 + (k1 - k0) * (t - t0) / (t1 - t0)
    }

    /// `K(t) >= t` at every grid point.
    pub fn lower_bound_verdict(&self, tol: Tolerance) -> Verdict {
        let mut tr = SlackTracker::new();
        for (&t, &k) in self.grid.iter().zip(&self.values) {
            tr.push(k - t, &[t]);
        }
        tr.finish(tol)
    }
}

/// Refinement schedule for [`kendall_partition_sup`].
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Refinement {
    pub start_n: usize,
    pub max_n: usize,
    pub tol: f64,
}

impl Default for Refinement {
    fn default() -> Self {
        Self {
            start_n: 1 << 6,
            max_n: 1 << 14,
            tol: 1e-4,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SupEstimate {
    pub value: f64,
    pub cells: usize,
    /// False when `max_n` was reached before successive values settled.
    pub converged: bool,
}

const SECTION_TOL: f64 = 1e-14;

fn partition_sum(s: &SemiCopula, t: f64, n: usize) -> f64 {
    let step = (1.0 - t) / n as f64;
    let cell = |k: usize| {
        let a = t + step * k as f64;
        let b = if k + 1 == n { 1.0 } else { t + step * (k + 1) as f64 };
        let v = generalized_inverse(|v| s.eval(b, v), t, (0.0, 1.0), true, SECTION_TOL);
        s.eval(b, v) - s.eval(a, v)
    };
    let sum: f64 = if n >= 256 {
        (0..n).into_par_iter().map(cell).collect::<Vec<_>>().iter().sum()
    } else {
        (0..n).map(cell).sum()
    };
    // cells below t contribute t in total
    t + sum
}

/// Partition-supremum Kendall value `K_S(t)` over dyadic partitions of
/// `(t, 1]` (with `0` and `t` always partition points).
///
/// The finest-level value is returned: for non-convex generators a coarse
/// partition can exceed the fine-mesh limit, and the fine-mesh limit is
/// what agrees with the other routes.
pub fn kendall_partition_sup(s: &SemiCopula, t: f64, refine: Refinement) -> SupEstimate {
    if t <= 0.0 {
        return SupEstimate { value: 0.0, cells: 0, converged: true };
    }
    if t >= 1.0 {
        return SupEstimate { value: 1.0, cells: 0, converged: true };
    }
    let mut n = refine.start_n.max(1);
    let mut prev = partition_sum(s, t, n);
    loop {
        if n * 2 > refine.max_n {
            return SupEstimate { value: prev, cells: n, converged: false };
        }
        n *= 2;
        let cur = partition_sum(s, t, n);
        if (cur - prev).abs() < refine.tol {
            return SupEstimate { value: cur, cells: n, converged: true };
        }
        prev = cur;
    }
}

/// `K(t) = t - φ(t)/φ'(t)`.
pub fn kendall_archimedean(g: &Generator, t: f64) -> Result<f64> {
    if t <= 0.0 {
        return Ok(0.0);
    }
    if t >= 1.0 {
        return Ok(1.0);
    }
    let d = g.phi_prime(t);
    if !d.is_finite() || d.abs() < 1e-300 {
        return Err(Error::DegenerateGenerator { t });
    }
    Ok(t - g.phi(t) / d)
}

/// `K(t) = t + ∫_t^1 ∂C/∂u(u, C_u⁻¹(t)) du`; needs strictly increasing
/// sections.
pub fn kendall_integral(c: &SemiCopula, t: f64) -> Result<f64> {
    c.check_invertible_sections()?;
    kendall_integral_unchecked(c, t)
}

fn kendall_integral_unchecked(c: &SemiCopula, t: f64) -> Result<f64> {
    if t <= 0.0 {
        return Ok(0.0);
    }
    if t >= 1.0 {
        return Ok(1.0);
    }
    let integrand = |u: f64| {
        let v = c.section_inverse(u, t);
        c.partial_u(u, v)
    };
    Ok(t + integrate_fn(integrand, t, 1.0, 1e-10)?)
}

/// `K_B(t) = t + γ'(γ⁻¹(t)) [K_Ĉ(γ⁻¹(t)) - γ⁻¹(t)]`, with
/// `γ⁻¹(t) = Ḡ(-ln t)` and `γ'(γ⁻¹(t)) = t / g(-ln t)`.
pub fn transport_kendall_to_ageing(k_c: &KendallCurve, m: &SurvivalModel, t: f64) -> Result<f64> {
    if t <= 0.0 {
        return Ok(0.0);
    }
    if t >= 1.0 {
        return Ok(1.0);
    }
    if !m.has_density() {
        return Err(Error::MissingDensity(m.name()));
    }
    let x = -t.ln();
    let z = m.survival(x);
    let g = m.density(x).ok_or_else(|| Error::MissingDensity(m.name()))?;
    let kz = k_c.eval(z)?;
    Ok(t + t / g * (kz - z))
}

pub fn curve_partition_sup(s: &SemiCopula, grid: &[f64], refine: Refinement) -> Result<KendallCurve> {
    let s = s.clone();
    KendallCurve::from_evaluator(grid, Provenance::PartitionSup, move |t| {
        Ok(kendall_partition_sup(&s, t, refine).value)
    })
}

pub fn curve_archimedean(g: &Generator, grid: &[f64]) -> Result<KendallCurve> {
    let g = g.clone();
    KendallCurve::from_evaluator(grid, Provenance::ArchimedeanClosedForm, move |t| kendall_archimedean(&g, t))
}

pub fn curve_integral(c: &SemiCopula, grid: &[f64]) -> Result<KendallCurve> {
    c.check_invertible_sections()?;
    let c = c.clone();
    KendallCurve::from_evaluator(grid, Provenance::IntegralForm, move |t| kendall_integral_unchecked(&c, t))
}

pub fn curve_transport(k_c: &KendallCurve, m: &SurvivalModel, grid: &[f64]) -> Result<KendallCurve> {
    if !m.has_density() {
        return Err(Error::MissingDensity(m.name()));
    }
    let (k, m) = (k_c.clone(), m.clone());
    KendallCurve::from_evaluator(grid, Provenance::TransportedFromCopula, move |t| {
        transport_kendall_to_ageing(&k, &m, t)
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct Pkd {
    pub pkd: Verdict,
    pub nkd: Verdict,
}

/// PKD: `K <= K_Π` on the grid; NKD: `K >= K_Π`.
pub fn classify_pkd_nkd(k: &KendallCurve, tol: Tolerance) -> Pkd {
    let mut pos = SlackTracker::new();
    let mut neg = SlackTracker::new();
    for (&t, &v) in k.grid.iter().zip(&k.values) {
        let d = kendall_product(t) - v;
        pos.push(d, &[t]);
        neg.push(-d, &[t]);
    }
    Pkd {
        pkd: pos.finish(tol),
        nkd: neg.finish(tol),
    }
}

/// `sup |K1 - K2|` within `tol` on a common grid. Grids that differ are
/// reconciled by evaluating the curve that carries an evaluator.
pub fn kendall_equivalent(k1: &KendallCurve, k2: &KendallCurve, tol: f64) -> Result<Verdict> {
    let (grid, a, b): (Vec<f64>, Vec<f64>, Vec<f64>) = if k1.grid == k2.grid {
        (k1.grid.clone(), k1.values.clone(), k2.values.clone())
    } else if k2.has_evaluator() {
        let b = k1.grid.iter().map(|&t| k2.eval(t)).collect::<Result<_>>()?;
        (k1.grid.clone(), k1.values.clone(), b)
    } else if k1.has_evaluator() {
        let a = k2.grid.iter().map(|&t| k1.eval(t)).collect::<Result<_>>()?;
        (k2.grid.clone(), a, k2.values.clone())
    } else {
        return Err(Error::GridMismatch);
    };
    let mut tr = SlackTracker::new();
    for ((t, x), y) in grid.iter().zip(&a).zip(&b) {
        tr.push(tol - (x - y).abs(), &[*t]);
    }
    Ok(tr.finish(Tolerance::sharp(0.0)))
}

/// Pseudo-generator `φ(t) = exp(∫_{t0}^t ds / (s - K(s)))`, normalized by
/// `φ(t0) = 1`.
///
/// `K` is read through its evaluator when present and by linear
/// interpolation of the table (through `(0,0)` and `(1,1)`) otherwise. The
/// derivative is left to finite differences so that the closed-form
/// Kendall value of the result is an independent check of the input.
pub fn reconstruct_generator(k: &KendallCurve, t0: f64) -> Result<Generator> {
    if !(t0 > 0.0 && t0 < 1.0) {
        return Err(Error::InvalidParameter(format!("t0 must lie in (0,1), got {t0}")));
    }
    let mut bad: Option<(f64, f64)> = None;
    for (&t, &v) in k.grid.iter().zip(&k.values) {
        if !(v - t > GAP_TOL) {
            bad = Some(match bad {
                None => (t, t),
                Some((a, _)) => (a, t),
            });
        }
    }
    if let Some((from, to)) = bad {
        return Err(Error::NotPseudoArchimedean { from, to });
    }

    let kfun: Fn1 = match &k.evaluator {
        Some(e) => e.clone(),
        None => {
            let table = k.clone();
            Arc::new(move |t| table.interpolate(t))
        }
    };
    let log_phi = {
        let kfun = kfun.clone();
        move |t: f64| -> f64 {
            integrate_fn(|s: f64| 1.0 / (s - kfun(s)), t0, t, 0.1 * QUAD_TOL).unwrap_or(f64::NAN)
        }
    };
    let phi = {
        let log_phi = log_phi.clone();
        move |t: f64| {
            if t >= 1.0 {
                0.0
            } else if t <= 0.0 {
                f64::INFINITY
            } else {
                log_phi(t).exp()
            }
        }
    };
    let phi_inv = {
        let log_phi = log_phi.clone();
        move |x: f64| {
            if x <= 0.0 {
                return 1.0;
            }
            let target = x.ln();
            generalized_inverse(&log_phi, target, (1e-12, 1.0 - 1e-15), false, 1e-13)
        }
    };
    Ok(Generator::new(format!("reconstructed(t0={t0})"), phi, phi_inv, Convexity::Unchecked))
}

/// Finite-difference derivative of a reconstructed generator against
/// `φ(t)/(t - K(t))`, relative slack `rel`.
pub fn reconstruction_smoothness(g: &Generator, k: &KendallCurve, rel: f64) -> Verdict {
    let mut tr = SlackTracker::new();
    for &t in &k.grid {
        let kv = k.eval(t).unwrap_or_else(|_| k.interpolate(t));
        let expect = g.phi(t) / (t - kv);
        let got = g.phi_prime(t);
        tr.push(rel * expect.abs().max(1e-12) - (got - expect).abs(), &[t]);
    }
    tr.finish(Tolerance::sharp(0.0))
}

/// Default grid used by Kendall curve commands.
pub fn uniform_grid(n: usize) -> Vec<f64> {
    let n = n.max(2);
    linspace(0.0, 1.0, n + 2)[1..=n].to_vec()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_2_PI;

    fn close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b}");
    }

    #[test]
    fn partition_sup_golden() {
        let r = Refinement::default();
        close(kendall_partition_sup(&SemiCopula::upper(), 0.5, r).value, 0.5, 1e-3);
        close(kendall_partition_sup(&SemiCopula::lower(), 0.5, r).value, 1.0, 1e-3);
        close(kendall_partition_sup(&SemiCopula::product(), 0.5, r).value, 0.846_574, 1e-3);
    }

    #[test]
    fn partition_sup_endpoints() {
        let r = Refinement::default();
        assert_eq!(kendall_partition_sup(&SemiCopula::product(), 0.0, r).value, 0.0);
        assert_eq!(kendall_partition_sup(&SemiCopula::product(), 1.0, r).value, 1.0);
    }

    #[test]
    fn closed_form_golden() {
        close(kendall_archimedean(&Generator::clayton(1.0).unwrap(), 0.5).unwrap(), 0.75, 1e-12);
        close(kendall_archimedean(&Generator::gumbel(2.0).unwrap(), 0.5).unwrap(), 0.673_287, 1e-6);
        close(kendall_archimedean(&Generator::cosine(), 0.5).unwrap(), 0.5 + FRAC_2_PI, 1e-12);
        close(kendall_archimedean(&Generator::cosine(), 0.5).unwrap(), 1.136_620, 1e-6);
        assert!(kendall_archimedean(&Generator::cosine(), 0.01).unwrap() > 10.0);
    }

    #[test]
    fn degenerate_generator() {
        let g = Generator::new("flat", |t: f64| 1.0 - t, |x: f64| 1.0 - x, Convexity::Yes).with_derivative(|_| 0.0);
        assert!(matches!(kendall_archimedean(&g, 0.5), Err(Error::DegenerateGenerator { .. })));
    }

    #[test]
    fn integral_golden() {
        close(kendall_integral(&SemiCopula::product(), 0.5).unwrap(), 0.846_574, 1e-6);
        let c = SemiCopula::archimedean(Generator::clayton(1.0).unwrap()).unwrap();
        close(kendall_integral(&c, 0.5).unwrap(), 0.75, 1e-6);
        assert!(matches!(
            kendall_integral(&SemiCopula::upper(), 0.5),
            Err(Error::SectionInversionFailure { .. })
        ));
    }

    #[test]
    fn pkd_examples() {
        let tol = Tolerance::sharp(1e-9);
        let g = standard_grid();
        let m = KendallCurve::tabulated(g.clone(), g.clone(), Provenance::PartitionSup).unwrap();
        assert!(classify_pkd_nkd(&m, tol).pkd.holds());
        let c = curve_archimedean(&Generator::clayton(1.0).unwrap(), &g).unwrap();
        assert!(classify_pkd_nkd(&c, tol).pkd.holds());
        let w = curve_archimedean(&Generator::sqrt_log(), &g).unwrap();
        let v = classify_pkd_nkd(&w, tol);
        assert!(v.nkd.holds() && v.pkd.fails());
    }

    #[test]
    fn equivalence_examples() {
        let g = standard_grid();
        let p = curve_archimedean(&Generator::independence(), &g).unwrap();
        assert!(kendall_equivalent(&p, &p, 1e-9).unwrap().holds());
        let c = curve_archimedean(&Generator::clayton(1.0).unwrap(), &g).unwrap();
        let gu = curve_archimedean(&Generator::gumbel(2.0).unwrap(), &g).unwrap();
        assert!(kendall_equivalent(&c, &gu, 1e-3).unwrap().fails());
        let a = KendallCurve::tabulated(vec![0.25, 0.5], vec![0.5, 0.8], Provenance::PartitionSup).unwrap();
        let b = KendallCurve::tabulated(vec![0.3, 0.5], vec![0.5, 0.8], Provenance::PartitionSup).unwrap();
        assert!(matches!(kendall_equivalent(&a, &b, 1e-3), Err(Error::GridMismatch)));
    }

    #[test]
    fn reconstruct_product() {
        let g = standard_grid();
        let k = curve_archimedean(&Generator::independence(), &g).unwrap();
        let t0 = (-1.0f64).exp();
        let phi = reconstruct_generator(&k, t0).unwrap();
        for t in [0.1, 0.5, 0.9] {
            close(phi.phi(t), -t.ln(), 1e-7);
        }
        for &t in &g {
            close(kendall_archimedean(&phi, t).unwrap(), kendall_product(t), 1e-3);
        }
        assert!(reconstruction_smoothness(&phi, &k, 1e-5).holds());
    }

    #[test]
    fn reconstruct_clayton() {
        let g = standard_grid();
        let k = curve_archimedean(&Generator::clayton(1.0).unwrap(), &g).unwrap();
        let phi = reconstruct_generator(&k, 0.5).unwrap();
        for t in [0.1, 0.3, 0.8] {
            close(phi.phi(t), 1.0 / t - 1.0, 1e-7);
        }
    }

    #[test]
    fn reconstruct_rejects_upper_bound() {
        let g = standard_grid();
        let k = KendallCurve::tabulated(g.clone(), g.clone(), Provenance::PartitionSup).unwrap();
        match reconstruct_generator(&k, 0.5) {
            Err(Error::NotPseudoArchimedean { from, to }) => {
                close(from, 0.05, 1e-12);
                close(to, 0.95, 1e-12);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn transport_examples() {
        let g = standard_grid();
        let kp = curve_archimedean(&Generator::independence(), &g).unwrap();
        let w2 = SurvivalModel::weibull(2.0, 1.0).unwrap();
        close(transport_kendall_to_ageing(&kp, &w2, 0.5).unwrap(), 0.673_287, 1e-6);
        let e = SurvivalModel::exponential(1.0).unwrap();
        close(transport_kendall_to_ageing(&kp, &e, 0.5).unwrap(), 0.846_574, 1e-6);
    }

    #[test]
    fn interpolation_through_endpoints() {
        let k = KendallCurve::tabulated(vec![0.5], vec![0.8], Provenance::PartitionSup).unwrap();
        close(k.interpolate(0.25), 0.4, 1e-15);
        close(k.interpolate(0.75), 0.9, 1e-15);
        assert!(matches!(k.eval(0.3), Err(Error::GridMismatch)));
        close(k.eval(0.5).unwrap(), 0.8, 0.0);
    }
}
