//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any
//! failure.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use ageing_core::bivmodel::{ageing_function, BivariateModel};
use ageing_core::harness::{
    run_sweep, simpson_demo, verify_triangle, HarnessConfig, Outcome, Registry,
};
use ageing_core::kendall::{
    curve_archimedean, curve_integral, curve_partition_sup, curve_transport, kendall_archimedean, kendall_integral,
    kendall_partition_sup, reconstruct_generator, standard_grid, KendallCurve, Refinement,
};
use ageing_core::numkit::linspace;
use ageing_core::registry::{parse_copula, parse_generator, parse_marginal};
use ageing_core::semicopula::{check_ltd_rti, check_migrativity, check_pqd, validate, Kind, MigrativityGrid, SemiCopula};
use ageing_core::univariate::MixtureModel;
use ageing_core::{Error, Tolerance};

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn near(label: &str, got: f64, want: f64, tol: f64) -> Result<(), String> {
    ensure((got - want).abs() <= tol, || format!("{label}: {got} vs {want} (tol {tol:e})"))
}

fn copula(k: &str) -> SemiCopula {
    parse_copula(k).unwrap_or_else(|e| panic!("{k}: {e}"))
}

fn kendall_golden_values() -> Check {
    let r = Refinement::default();
    let sup = |k: &str, t: f64| kendall_partition_sup(&copula(k), t, r).value;
    let closed = |k: &str, t: f64| kendall_archimedean(&parse_generator(k).unwrap(), t).unwrap();
    let integral = |k: &str, t: f64| kendall_integral(&copula(k), t).unwrap();
    for (k, want) in [("pi", 0.846_574), ("clayton:1", 0.75), ("gumbel:2", 0.673_287)] {
        near(&format!("{k} sup"), sup(k, 0.5), want, 1e-3)?;
        near(&format!("{k} closed"), closed(k, 0.5), want, 1e-6)?;
        near(&format!("{k} integral"), integral(k, 0.5), want, 1e-6)?;
    }
    near("m sup", sup("m", 0.5), 0.5, 1e-3)?;
    near("w sup", sup("w", 0.5), 1.0, 1e-3)?;
    near("cosine closed", closed("arch-gen:cosine", 0.5), 1.136_620, 1e-6)?;
    near("cosine sup", sup("arch-gen:cosine", 0.5), 1.136_620, 1e-3)?;
    let k01 = closed("arch-gen:cosine", 0.01);
    ensure(k01 > 10.0, || format!("cosine K(0.01) = {k01}, expected > 10"))?;
    Ok(format!("13 values; cosine K(0.01) = {k01:.3}"))
}

fn route_agreement() -> Check {
    let start = Instant::now();
    let grid = standard_grid();
    let mut worst = 0.0f64;
    for k in ["pi", "clayton:0.5", "clayton:1", "clayton:2", "gumbel:1.5", "gumbel:2"] {
        let c = copula(k);
        let s = curve_partition_sup(&c, &grid, Refinement::default()).map_err(|e| e.to_string())?;
        let a = curve_archimedean(c.generator().unwrap(), &grid).map_err(|e| e.to_string())?;
        let i = curve_integral(&c, &grid).map_err(|e| e.to_string())?;
        for j in 0..grid.len() {
            let (x, y, z) = (s.values()[j], a.values()[j], i.values()[j]);
            let d = (x - y).abs().max((y - z).abs()).max((x - z).abs());
            worst = worst.max(d);
            ensure(d <= 1e-3, || format!("{k} at t = {}: sup {x}, closed {y}, integral {z}", grid[j]))?;
        }
    }
    let took = start.elapsed();
    ensure(took < Duration::from_secs(30), || format!("took {took:?}"))?;
    Ok(format!("max gap {worst:.2e} in {:.1}s", took.as_secs_f64()))
}

fn transport_formula() -> Check {
    let grid = standard_grid();
    let w2 = parse_marginal("weibull:2:1").unwrap();
    let k_c = curve_archimedean(&parse_generator("pi").unwrap(), &grid).map_err(|e| e.to_string())?;
    let k_b = curve_transport(&k_c, &w2, &grid).map_err(|e| e.to_string())?;
    let b = ageing_function(&BivariateModel::new(copula("pi"), w2).unwrap());
    let (mut closed_gap, mut sup_gap) = (0.0f64, 0.0f64);
    for (&t, &v) in grid.iter().zip(k_b.values()) {
        let closed = t - t * t.ln() / 2.0;
        let sup = kendall_partition_sup(&b, t, Refinement::default()).value;
        near(&format!("closed form at {t}"), v, closed, 1e-6)?;
        near(&format!("partition sup at {t}"), v, sup, 1e-3)?;
        closed_gap = closed_gap.max((v - closed).abs());
        sup_gap = sup_gap.max((v - sup).abs());
    }
    near("K_B(0.5)", k_b.eval(0.5).unwrap(), 0.673_287, 1e-6)?;
    Ok(format!("closed gap {closed_gap:.1e}, sup gap {sup_gap:.1e}"))
}

fn reconstruction_round_trip() -> Check {
    let grid = standard_grid();
    let mut worst = 0.0f64;
    for k in ["pi", "clayton:1"] {
        let curve = curve_archimedean(&parse_generator(k).unwrap(), &grid).map_err(|e| e.to_string())?;
        let phi = reconstruct_generator(&curve.densified(255).unwrap(), 0.5).map_err(|e| e.to_string())?;
        for (&t, &v) in grid.iter().zip(curve.values()) {
            let back = kendall_archimedean(&phi, t).map_err(|e| e.to_string())?;
            near(&format!("{k} at {t}"), back, v, 1e-3)?;
            worst = worst.max((back - v).abs());
        }
    }
    let m = curve_partition_sup(&copula("m"), &grid, Refinement::default()).unwrap();
    match reconstruct_generator(&m, 0.5) {
        Err(Error::NotPseudoArchimedean { .. }) => {}
        other => return Err(format!("M input gave {:?}", other.map(|g| g.name().to_string()))),
    }
    Ok(format!("max round-trip error {worst:.1e}; M rejected"))
}

fn sup_gap(a: &SemiCopula, b: &SemiCopula) -> f64 {
    let g = linspace(0.0, 1.0, 64);
    let mut worst = 0.0f64;
    for &u in &g {
        for &v in &g {
            worst = worst.max((a.eval(u, v) - b.eval(u, v)).abs());
        }
    }
    worst
}

fn ageing_function_identities() -> Check {
    let exp = parse_marginal("exp:1").unwrap();
    let mut worst_exp = 0.0f64;
    for k in ["pi", "m", "w", "clayton:1", "gumbel:2", "frank:-3", "schur:weibull:0.5:1"] {
        let c = copula(k);
        let b = ageing_function(&BivariateModel::new(c.clone(), exp.clone()).unwrap());
        let d = sup_gap(&b, &c);
        ensure(d <= 1e-10, || format!("exp marginal, {k}: sup|B - C| = {d:e}"))?;
        worst_exp = worst_exp.max(d);
    }
    let pi = copula("pi");
    let mut worst_schur = 0.0f64;
    for m in ["exp:1", "weibull:0.5:1", "pareto:2:1", "mixexp:1,5:0.5,0.5"] {
        let g = parse_marginal(m).unwrap();
        let c = copula(&format!("schur:{m}"));
        let b = ageing_function(&BivariateModel::new(c, g).unwrap());
        let d = sup_gap(&b, &pi);
        ensure(d <= 1e-6, || format!("Schur-constant {m}: sup|B - Pi| = {d:e}"))?;
        worst_schur = worst_schur.max(d);
    }
    let b = ageing_function(&BivariateModel::new(pi, parse_marginal("weibull:2:1").unwrap()).unwrap());
    let d = sup_gap(&b, &copula("gumbel:2"));
    ensure(d <= 1e-8, || format!("(Pi, Weibull 2): sup|B - Gumbel 2| = {d:e}"))?;
    Ok(format!("exp {worst_exp:.1e}, Schur {worst_schur:.1e}, Gumbel {d:.1e}"))
}

fn triangle_agreement(reg: &Registry, cfg: &HarnessConfig) -> Check {
    let mut unresolved = 0;
    for e in &reg.model {
        let mdl = BivariateModel::new(copula(&e.copula), parse_marginal(&e.marginal).unwrap()).unwrap();
        let r = verify_triangle(&e.id, &mdl, cfg);
        for o in &r.outcomes {
            ensure(o.outcome != Outcome::Violation, || format!("{}: {} disagree at {:?}", e.id, o.item, o.witness))?;
            unresolved += usize::from(o.outcome == Outcome::Unresolved);
        }
    }
    Ok(format!("{} models, {unresolved} tolerance-limited sides", reg.model.len()))
}

fn harness_sweep(reg: &Registry, cfg: &HarnessConfig) -> Check {
    let start = Instant::now();
    let s = run_sweep(reg, cfg).map_err(|e| e.to_string())?;
    ensure(s.summary.models >= 20, || format!("only {} models", s.summary.models))?;
    for check in ["migrativity-ageing", "kendall-ageing", "risk-composition", "generator-equivalences"] {
        ensure(s.reports.iter().any(|r| r.check == check), || format!("no {check} reports"))?;
    }
    if s.summary.violations > 0 {
        let first = s
            .reports
            .iter()
            .flat_map(|r| r.outcomes.iter().map(move |o| (r, o)))
            .find(|(_, o)| o.outcome == Outcome::Violation)
            .map(|(r, o)| format!("{} {}: {}", r.check, r.model_id, o.statement));
        return Err(format!("{} violations, first {first:?}", s.summary.violations));
    }
    let mix = MixtureModel::exponentials(&[1.0, 5.0], &[0.5, 0.5]).unwrap();
    let demo = simpson_demo(&mix, cfg.n_x, cfg.tol);
    ensure(demo.components_ifr.iter().all(|v| v.holds()), || "component IFR".into())?;
    ensure(demo.mixture_ifr.fails(), || format!("mixture IFR {:?}", demo.mixture_ifr.status))?;
    ensure(demo.mixture_dfr.holds(), || format!("mixture DFR {:?}", demo.mixture_dfr.status))?;
    Ok(format!(
        "{} models, {} reports, {} confirmed, {} vacuous, {} unresolved, 0 violations in {:.1}s",
        s.summary.models,
        s.summary.reports,
        s.summary.confirmed,
        s.summary.vacuous,
        s.summary.unresolved,
        start.elapsed().as_secs_f64()
    ))
}

fn universal_invariants(reg: &Registry, cfg: &HarnessConfig) -> Check {
    let grid = standard_grid();
    let ktol = Tolerance::sharp(1e-6);
    let ugrid = linspace(0.0, 1.0, 33);
    let interior = &ugrid[1..ugrid.len() - 1];
    let mg = MigrativityGrid::uniform(cfg.n_uv, cfg.n_s);
    let mut curves: Vec<(String, KendallCurve, bool)> = Vec::new();
    let mut keys: Vec<String> = reg.model.iter().map(|e| e.copula.clone()).collect();
    keys.sort();
    keys.dedup();
    let mut pmd_checked = 0;
    for k in &keys {
        let c = copula(k);
        let quasi = c.kind() >= Kind::QuasiCopula && validate(&c, &ugrid, cfg.tol).all_hold();
        let sup = curve_partition_sup(&c, &grid, Refinement::default()).map_err(|e| e.to_string())?;
        curves.push((format!("{k} sup"), sup, quasi));
        if let Some(g) = c.generator() {
            curves.push((format!("{k} closed"), curve_archimedean(g, &grid).map_err(|e| e.to_string())?, quasi));
        }
        if check_migrativity(&c, &mg, cfg.tol).pmd.holds() {
            pmd_checked += 1;
            ensure(check_pqd(&c, interior, cfg.tol).pqd.holds(), || format!("{k}: PMD without PQD"))?;
        }
    }
    for e in &reg.model {
        let mdl = BivariateModel::new(copula(&e.copula), parse_marginal(&e.marginal).unwrap()).unwrap();
        let b = ageing_function(&mdl);
        if check_migrativity(&b, &mg, cfg.tol).pmd.holds() {
            pmd_checked += 1;
            ensure(check_pqd(&b, interior, cfg.tol).pqd.holds(), || format!("B of {}: PMD without PQD", e.id))?;
        }
        if let (Some(g), true) = (mdl.copula().generator(), mdl.marginal().has_density()) {
            let k_c = curve_archimedean(g, &grid).map_err(|e| e.to_string())?;
            let k_b = curve_transport(&k_c, mdl.marginal(), &grid).map_err(|e| e.to_string())?;
            curves.push((format!("B of {} transported", e.id), k_b, false));
        }
    }
    for (name, k, quasi) in &curves {
        ensure(k.lower_bound_verdict(ktol).holds(), || format!("{name}: K(t) < t"))?;
        if *quasi {
            let top = k.values().iter().cloned().fold(f64::MIN, f64::max);
            ensure(top <= 1.0 + 1e-6, || format!("{name}: K reaches {top}"))?;
        }
    }
    let mut arch = 0;
    for g in &reg.generator {
        let c = copula(&g.generator);
        let ltd = check_ltd_rti(&c, &ugrid, cfg.tol).ltd.status;
        let pmd = check_migrativity(&c, &mg, cfg.tol).pmd.status;
        ensure(ltd == pmd, || format!("{}: LTD {ltd:?} vs PMD {pmd:?}", g.id))?;
        arch += 1;
    }
    Ok(format!(
        "{} curves, {pmd_checked} PMD objects also PQD, {arch} Archimedean LTD = PMD",
        curves.len()
    ))
}

fn main() -> ExitCode {
    let reg = Registry::builtin();
    let cfg = HarnessConfig::default();
    let criteria: Vec<(&str, Box<dyn Fn() -> Check>)> = vec![
        ("kendall golden values", Box::new(kendall_golden_values)),
        ("kendall route agreement", Box::new(route_agreement)),
        ("transport to the ageing function", Box::new(transport_formula)),
        ("generator reconstruction round trip", Box::new(reconstruction_round_trip)),
        ("ageing function identities", Box::new(ageing_function_identities)),
        ("biv-ageing / Schur / migrativity agreement", Box::new(|| triangle_agreement(&reg, &cfg))),
        ("builtin harness sweep", Box::new(|| harness_sweep(&reg, &cfg))),
        ("universal invariants", Box::new(|| universal_invariants(&reg, &cfg))),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("PASS  criterion {} {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL  criterion {} {name}: {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
