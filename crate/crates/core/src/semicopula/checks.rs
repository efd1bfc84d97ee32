use serde::Serialize;

use super::{Kind, SemiCopula};
use crate::numkit::{linspace, SlackTracker, Tolerance, Verdict};

/// Lower cutoff on `u` for ratio-based tail checks.
const RATIO_CUTOFF: f64 = 1e-4;

#[derive(Debug, Clone, Serialize)]
pub struct Validation {
    pub boundary: Verdict,
    pub monotone: Verdict,
    pub two_increasing: Verdict,
}

impl Validation {
    pub fn all_hold(&self) -> bool {
        self.boundary.holds() && self.monotone.holds() && self.two_increasing.holds()
    }
}

/// Boundary conditions, componentwise monotonicity and the rectangle
/// inequality on the product grid `grid × grid`.
pub fn validate(s: &SemiCopula, grid: &[f64], tol: Tolerance) -> Validation {
    let n = grid.len();
    let vals: Vec<Vec<f64>> = grid.iter().map(|&u| grid.iter().map(|&v| s.eval(u, v)).collect()).collect();

    let mut boundary = SlackTracker::new();
    for &w in grid {
        boundary.push(-(s.eval(w, 1.0) - w).abs(), &[w, 1.0]);
        boundary.push(-(s.eval(1.0, w) - w).abs(), &[1.0, w]);
        boundary.push(-s.eval(w, 0.0).abs(), &[w, 0.0]);
        boundary.push(-s.eval(0.0, w).abs(), &[0.0, w]);
    }

    let mut monotone = SlackTracker::new();
    let mut rect = SlackTracker::new();
    for i in 0..n {
        for j in 0..n {
            if i + 1 < n {
                monotone.push(vals[i + 1][j] - vals[i][j], &[grid[i], grid[j], grid[i + 1], grid[j]]);
            }
            if j + 1 < n {
                monotone.push(vals[i][j + 1] - vals[i][j], &[grid[i], grid[j], grid[i], grid[j + 1]]);
            }
            if i + 1 < n && j + 1 < n {
                let v = vals[i + 1][j + 1] - vals[i][j + 1] - vals[i + 1][j] + vals[i][j];
                rect.push(v, &[grid[i], grid[j], grid[i + 1], grid[j + 1]]);
            }
        }
    }
    Validation {
        boundary: boundary.finish(Tolerance::new(tol.tol, 1e-12)),
        monotone: monotone.finish(tol),
        two_increasing: rect.finish(Tolerance::new(tol.tol, tol.floor.max(1e-10))),
    }
}

/// 1-Lipschitz in each argument (quasi-copula bound) on consecutive cells.
pub fn check_lipschitz(s: &SemiCopula, grid: &[f64], tol: Tolerance) -> Verdict {
    let mut tr = SlackTracker::new();
    for w in grid.windows(2) {
        let (a, b) = (w[0], w[1]);
        for &z in grid {
            tr.push((b - a) - (s.eval(b, z) - s.eval(a, z)).abs(), &[a, b, z]);
            tr.push((b - a) - (s.eval(z, b) - s.eval(z, a)).abs(), &[z, a, b]);
        }
    }
    tr.finish(tol)
}

/// `W <= S <= M` pointwise.
pub fn check_frechet_bounds(s: &SemiCopula, grid: &[f64], tol: Tolerance) -> Verdict {
    let mut tr = SlackTracker::new();
    for &u in grid {
        for &v in grid {
            let c = s.eval(u, v);
            tr.push(c - (u + v - 1.0).max(0.0), &[u, v]);
            tr.push(u.min(v) - c, &[u, v]);
        }
    }
    tr.finish(tol)
}

#[derive(Debug, Clone, Serialize)]
pub struct Pqd {
    pub pqd: Verdict,
    pub nqd: Verdict,
}

/// Pointwise comparison with the product copula.
pub fn check_pqd(s: &SemiCopula, grid: &[f64], tol: Tolerance) -> Pqd {
    let mut pos = SlackTracker::new();
    let mut neg = SlackTracker::new();
    for &u in grid {
        for &v in grid {
            let d = s.eval(u, v) - u * v;
            pos.push(d, &[u, v]);
            neg.push(-d, &[u, v]);
        }
    }
    Pqd {
        pqd: pos.finish(tol),
        nqd: neg.finish(tol),
    }
}

/// Points `(u, v, s)` with `0 <= v <= u <= 1` and `0 < s < 1`.
#[derive(Debug, Clone)]
pub struct MigrativityGrid {
    pub points: Vec<[f64; 3]>,
}

impl MigrativityGrid {
    /// All ordered pairs `v <= u` from an `n_uv`-point grid of `(0, 1]`
    /// crossed with `n_s` interior values of `s`.
    pub fn uniform(n_uv: usize, n_s: usize) -> Self {
        let uv = linspace(0.0, 1.0, n_uv + 1);
        let ss = linspace(0.0, 1.0, n_s + 2);
        let mut points = Vec::new();
        for (i, &u) in uv.iter().enumerate().skip(1) {
            for &v in &uv[1..=i] {
                for &s in &ss[1..=n_s] {
                    points.push([u, v, s]);
                }
            }
        }
        Self { points }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Migrativity {
    pub pmd: Verdict,
    pub nmd: Verdict,
}

/// Supermigrativity `S(us, v) >= S(u, sv)` (PMD) and its reverse (NMD).
pub fn check_migrativity(c: &SemiCopula, grid: &MigrativityGrid, tol: Tolerance) -> Migrativity {
    let mut pos = SlackTracker::new();
    let mut neg = SlackTracker::new();
    for p in &grid.points {
        let [u, v, s] = *p;
        let d = c.eval(u * s, v) - c.eval(u, s * v);
        pos.push(d, p);
        neg.push(-d, p);
    }
    Migrativity {
        pmd: pos.finish(tol),
        nmd: neg.finish(tol),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TailDependence {
    /// `u ↦ S(u,v)/u` nonincreasing.
    pub ltd: Verdict,
    /// `u ↦ S(u,v)/u` nondecreasing.
    pub lti: Verdict,
    /// Right tail increasing of the pair whose survival copula is `S`,
    /// computed from the connecting copula as `u ↦ P(V > v | U > u)`.
    pub rti: Verdict,
}

pub fn check_ltd_rti(s: &SemiCopula, grid: &[f64], tol: Tolerance) -> TailDependence {
    let us: Vec<f64> = grid.iter().copied().filter(|&u| u >= RATIO_CUTOFF).collect();
    let mut ltd = SlackTracker::new();
    let mut lti = SlackTracker::new();
    for &v in grid {
        let ratios: Vec<f64> = us.iter().map(|&u| s.eval(u, v) / u).collect();
        for k in 1..us.len() {
            let d = ratios[k] - ratios[k - 1];
            ltd.push(-d, &[us[k - 1], us[k], v]);
            lti.push(d, &[us[k - 1], us[k], v]);
        }
    }

    let rti = if s.kind() == Kind::Copula {
        let c = SemiCopula::survival_from_connecting(s).expect("kind checked");
        let us: Vec<f64> = grid.iter().copied().filter(|&u| u <= 1.0 - RATIO_CUTOFF).collect();
        let mut tr = SlackTracker::new();
        for &v in grid {
            let tail: Vec<f64> = us.iter().map(|&u| (1.0 - u - v + c.eval(u, v)) / (1.0 - u)).collect();
            for k in 1..us.len() {
                tr.push(tail[k] - tail[k - 1], &[us[k - 1], us[k], v]);
            }
        }
        tr.finish(tol)
    } else {
        Verdict::unevaluated()
    };

    TailDependence {
        ltd: ltd.finish(tol),
        lti: lti.finish(tol),
        rti,
    }
}

fn partial_monotonicity(s: &SemiCopula, grid: &[f64], tol: Tolerance, decreasing: bool) -> Verdict {
    let us: Vec<f64> = grid
        .iter()
        .copied()
        .filter(|&u| (RATIO_CUTOFF..=1.0 - RATIO_CUTOFF).contains(&u))
        .collect();
    let mut tr = SlackTracker::new();
    for &v in grid {
        let d: Vec<f64> = us.iter().map(|&u| s.partial_u(u, v)).collect();
        for k in 1..us.len() {
            let step = d[k] - d[k - 1];
            tr.push(if decreasing { -step } else { step }, &[us[k - 1], us[k], v]);
        }
    }
    tr.finish(tol)
}

/// Stochastically increasing: `∂S/∂u` nonincreasing in `u` for each `v`.
pub fn check_si(s: &SemiCopula, grid: &[f64], tol: Tolerance) -> Verdict {
    partial_monotonicity(s, grid, tol, true)
}

/// Stochastically decreasing: `∂S/∂u` nondecreasing in `u` for each `v`.
pub fn check_sd(s: &SemiCopula, grid: &[f64], tol: Tolerance) -> Verdict {
    partial_monotonicity(s, grid, tol, false)
}
