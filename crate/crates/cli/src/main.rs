mod output;
mod spec;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use ageing_core::bivmodel::{ageing_function, BivariateModel};
use ageing_core::harness::{run_sweep, HarnessConfig, Outcome, Registry, Sweep};
use ageing_core::kendall::{
    classify_pkd_nkd, curve_archimedean, curve_integral, curve_partition_sup, curve_transport, kendall_archimedean,
    reconstruct_generator, standard_grid, uniform_grid, KendallCurve, Provenance, Refinement,
};
use ageing_core::numkit::linspace;
use ageing_core::semicopula::{
    check_ltd_rti, check_migrativity, check_pqd, check_si, validate, MigrativityGrid, SemiCopula,
};
use ageing_core::univariate::{
    check_survival_invariants, classify_ifr_dfr, classify_ifra_dfra, classify_nbu_nwu, MixtureModel,
    SurvivalModel,
};
use ageing_core::{Error, Tolerance, Verdict};

use output::{read_kendall_csv, Csv};
use spec::ModelSpec;

const VERSION: &str = env!("CARGO_PKG_VERSION");

const PKD_NOTE: &str = "PKD means K(t) <= t - t ln t on (0,1) (positive dependence moves mass of C(U,V) to higher \
                        levels); NKD is the reverse inequality";

#[derive(Debug)]
pub struct CliError {
    code: u8,
    msg: String,
}

impl CliError {
    pub fn new(code: u8, msg: impl Into<String>) -> Self {
        Self { code, msg: msg.into() }
    }

    pub fn input(msg: impl Into<String>) -> Self {
        Self::new(2, msg)
    }

    /// Parse-level errors are input errors, anything else is internal.
    pub fn from_core_input(e: Error) -> Self {
        Self::from_core(e, 3)
    }

    fn from_core(e: Error, code: u8) -> Self {
        match e {
            Error::InvalidParameter(_) | Error::UnknownFamily { .. } => Self::input(e.to_string()),
            _ => Self::new(code, e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::new(3, format!("write failed: {e}"))
    }
}

#[derive(Parser)]
#[command(name = "ageing", version, about = "Semi-copulas, Kendall distributions and bivariate ageing checks")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone, Default)]
struct ModelArgs {
    /// TOML file with `copula`, `marginal` and an optional `[grids]` table
    #[arg(long)]
    config: Option<PathBuf>,
    /// Copula family key, e.g. `clayton:2`
    #[arg(long)]
    copula: Option<String>,
    /// Marginal family key, e.g. `weibull:2:1`
    #[arg(long)]
    marginal: Option<String>,
    /// Grid size
    #[arg(long)]
    grid: Option<usize>,
    /// Verdict tolerance
    #[arg(long)]
    tol: Option<f64>,
    /// Right end of the ageing grid
    #[arg(long)]
    xmax: Option<f64>,
    /// Output file instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

impl ModelArgs {
    fn spec(&self) -> Result<ModelSpec, CliError> {
        let base = match &self.config {
            Some(p) => ModelSpec::load(p)?,
            None => ModelSpec::default(),
        };
        Ok(base.merge(self.copula.clone(), self.marginal.clone(), self.grid, self.tol, self.xmax))
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Route {
    Sup,
    Closed,
    Integral,
    #[value(name = "transport-B")]
    TransportB,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check the copula axioms and the marginal's survival-function invariants
    Validate(ModelArgs),
    /// Tabulate a Kendall distribution function
    Kendall {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, value_enum, default_value = "sup")]
        route: Route,
    },
    /// Classify marginal, copula and ageing function
    Classify(ModelArgs),
    /// Run the implication harness over a registry (`builtin` or a TOML file)
    Verify {
        registry: String,
        /// Replace the registry models by seeded random families
        #[arg(long)]
        fuzz: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 50)]
        n: usize,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        xmax: Option<f64>,
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Recover a pseudo-generator from a Kendall curve
    Reconstruct {
        #[command(flatten)]
        model: ModelArgs,
        /// Kendall curve as `t,K` rows instead of a copula
        #[arg(long)]
        kendall_csv: Option<PathBuf>,
        /// Normalization point, φ(t0) = 1
        #[arg(long, default_value_t = 0.5)]
        t0: f64,
    },
    /// Predictive failure rate and posterior weights of an exponential mixture
    DemoMixture {
        #[arg(long, value_delimiter = ',', required = true)]
        rates: Vec<f64>,
        #[arg(long, value_delimiter = ',', required = true)]
        weights: Vec<f64>,
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long)]
        xmax: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.cmd) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e.msg);
            ExitCode::from(e.code)
        }
    }
}

fn run(cmd: Cmd) -> Result<u8, CliError> {
    match cmd {
        Cmd::Validate(m) => cmd_validate(&m),
        Cmd::Kendall { model, route } => cmd_kendall(&model, route),
        Cmd::Classify(m) => cmd_classify(&m),
        Cmd::Verify {
            registry,
            fuzz,
            seed,
            n,
            tol,
            xmax,
            grid,
            out,
        } => cmd_verify(&registry, fuzz.then_some((seed, n)), tol, xmax, grid, out.as_deref()),
        Cmd::Reconstruct { model, kendall_csv, t0 } => cmd_reconstruct(&model, kendall_csv.as_deref(), t0),
        Cmd::DemoMixture {
            rates,
            weights,
            grid,
            xmax,
            out,
        } => cmd_demo_mixture(&rates, &weights, grid, xmax, out.as_deref()),
    }
}

fn verdict_json(v: &Verdict) -> Value {
    json!({ "status": v.status, "margin": v.margin, "witness": v.witness })
}

fn write_json(out: Option<&Path>, v: &Value) -> Result<(), CliError> {
    let mut w = output::open(out)?;
    writeln!(w, "{}", serde_json::to_string_pretty(v).expect("serializable"))?;
    w.flush()?;
    Ok(())
}

fn copula_grid(spec: &ModelSpec) -> Vec<f64> {
    linspace(0.0, 1.0, spec.grids.size.unwrap_or(33).max(3))
}

fn kendall_grid(spec: &ModelSpec) -> Vec<f64> {
    spec.grids.size.map(uniform_grid).unwrap_or_else(standard_grid)
}

fn cmd_validate(m: &ModelArgs) -> Result<u8, CliError> {
    let spec = m.spec()?;
    let tol = spec.tolerance()?;
    let c = spec.copula()?;
    let v = validate(&c, &copula_grid(&spec), tol);
    let mut ok = v.all_hold();
    let mut report = json!({
        "copula": {
            "key": spec.copula,
            "kind": c.kind(),
            "boundary": verdict_json(&v.boundary),
            "monotone": verdict_json(&v.monotone),
            "two_increasing": verdict_json(&v.two_increasing),
        },
    });
    if spec.marginal.is_some() {
        let g = spec.marginal()?;
        let inv = check_survival_invariants(&g, &g.ageing_grid(spec.grids.x_max, 64), tol);
        ok &= inv.holds();
        report["marginal"] = json!({ "key": spec.marginal, "invariants": verdict_json(&inv) });
    }
    report["valid"] = json!(ok);
    write_json(m.out.as_deref(), &report)?;
    Ok(if ok { 0 } else { 1 })
}

fn inapplicable(route: &str, reason: impl Into<String>) -> CliError {
    CliError::new(1, Error::RouteInapplicable { route: route.into(), reason: reason.into() }.to_string())
}

fn kendall_via(c: &SemiCopula, route: Route, grid: &[f64]) -> Result<KendallCurve, CliError> {
    match route {
        Route::Sup => curve_partition_sup(c, grid, Refinement::default()).map_err(|e| CliError::from_core(e, 3)),
        Route::Closed => {
            let g = c
                .generator()
                .ok_or_else(|| inapplicable("closed", format!("`{}` is not Archimedean", c.name())))?;
            curve_archimedean(g, grid).map_err(|e| inapplicable("closed", e.to_string()))
        }
        Route::Integral => curve_integral(c, grid).map_err(|e| inapplicable("integral", e.to_string())),
        Route::TransportB => unreachable!("transport needs a marginal"),
    }
}

/// Closed form when Archimedean, else the integral form, else the sup.
fn best_curve(c: &SemiCopula, grid: &[f64]) -> Result<KendallCurve, CliError> {
    if c.generator().is_some() {
        if let Ok(k) = kendall_via(c, Route::Closed, grid) {
            return Ok(k);
        }
    }
    if c.check_invertible_sections().is_ok() {
        if let Ok(k) = kendall_via(c, Route::Integral, grid) {
            return Ok(k);
        }
    }
    kendall_via(c, Route::Sup, grid)
}

fn cmd_kendall(m: &ModelArgs, route: Route) -> Result<u8, CliError> {
    let spec = m.spec()?;
    let c = spec.copula()?;
    let grid = kendall_grid(&spec);
    let (k, route_name) = match route {
        Route::TransportB => {
            let g = spec.marginal()?;
            let k_c = best_curve(&c, &grid)?;
            if !k_c.has_evaluator() {
                return Err(inapplicable("transport-B", "K of the copula is only available on a grid"));
            }
            let k = curve_transport(&k_c, &g, &grid).map_err(|e| inapplicable("transport-B", e.to_string()))?;
            (k, "transport-B")
        }
        r => (
            kendall_via(&c, r, &grid)?,
            match r {
                Route::Sup => "sup",
                Route::Closed => "closed",
                _ => "integral",
            },
        ),
    };
    let comments = vec![
        format!(
            "ageing {VERSION} spec={} tol={:e}",
            spec.digest(&format!("kendall;route={route_name}")),
            spec.tolerance()?.tol
        ),
        format!("provenance={} copula={}", k.provenance(), c.name()),
    ];
    let mut csv = Csv::new(output::open(m.out.as_deref())?, &comments, &["t", "K"])?;
    for (&t, &v) in k.grid().iter().zip(k.values()) {
        csv.row(&[t, v])?;
    }
    csv.finish()?;
    Ok(0)
}

fn cmd_classify(m: &ModelArgs) -> Result<u8, CliError> {
    let spec = m.spec()?;
    let tol = spec.tolerance()?;
    let kendall_tol = Tolerance::sharp(1e-6);
    let c = spec.copula()?;
    let g = spec.marginal()?;
    let mdl = BivariateModel::new(c.clone(), g.clone()).map_err(|e| CliError::new(1, e.to_string()))?;
    let b = ageing_function(&mdl);

    let xg = g.ageing_grid(spec.grids.x_max, spec.grids.size.unwrap_or(64));
    let fr = classify_ifr_dfr(&g, &xg, tol);
    let fra = classify_ifra_dfra(&g, &xg, tol);
    let nbu = classify_nbu_nwu(&g, &xg, tol);

    let ug = copula_grid(&spec);
    let interior = &ug[1..ug.len() - 1];
    let mg = MigrativityGrid::uniform(16, 8);
    let kgrid = kendall_grid(&spec);
    let k_c = best_curve(&c, &kgrid)?;
    let k_b = if g.has_density() && k_c.has_evaluator() {
        curve_transport(&k_c, &g, &kgrid).map_err(|e| CliError::from_core(e, 3))?
    } else {
        kendall_via(&b, Route::Sup, &kgrid)?
    };
    let pqd = check_pqd(&c, interior, tol);
    let mc = check_migrativity(&c, &mg, tol);
    let tail = check_ltd_rti(&c, &ug, tol);
    let si = check_si(&c, &ug, tol);
    let pc = classify_pkd_nkd(&k_c, kendall_tol);
    let mb = check_migrativity(&b, &mg, tol);
    let pb = classify_pkd_nkd(&k_b, kendall_tol);

    let report = json!({
        "model": { "copula": spec.copula, "marginal": spec.marginal },
        "tolerance": tol,
        "kendall_tolerance": kendall_tol,
        "marginal": {
            "IFR": verdict_json(&fr.ifr),
            "DFR": verdict_json(&fr.dfr),
            "IFRA": verdict_json(&fra.ifra),
            "DFRA": verdict_json(&fra.dfra),
            "NBU": verdict_json(&nbu.nbu),
            "NWU": verdict_json(&nbu.nwu),
        },
        "copula": {
            "PQD": verdict_json(&pqd.pqd),
            "PMD": verdict_json(&mc.pmd),
            "NMD": verdict_json(&mc.nmd),
            "LTD": verdict_json(&tail.ltd),
            "SI": verdict_json(&si),
            "PKD": verdict_json(&pc.pkd),
            "NKD": verdict_json(&pc.nkd),
        },
        "ageing_function": {
            "PMD": verdict_json(&mb.pmd),
            "NMD": verdict_json(&mb.nmd),
            "PKD": verdict_json(&pb.pkd),
            "NKD": verdict_json(&pb.nkd),
        },
        "kendall_provenance": { "copula": k_c.provenance(), "ageing_function": k_b.provenance() },
        "notes": [PKD_NOTE],
    });
    write_json(m.out.as_deref(), &report)?;
    Ok(0)
}

fn load_registry(name: &str) -> Result<Registry, CliError> {
    if name == "builtin" {
        return Ok(Registry::builtin());
    }
    let text = std::fs::read_to_string(name).map_err(|e| CliError::input(format!("cannot read {name}: {e}")))?;
    toml::from_str(&text).map_err(|e| CliError::input(format!("{name}: {e}")))
}

fn summary_table(s: &Sweep) -> String {
    let mut rows: Vec<(String, [usize; 5])> = Vec::new();
    for r in &s.reports {
        let idx = match rows.iter().position(|(c, _)| *c == r.check) {
            Some(i) => i,
            None => {
                rows.push((r.check.clone(), [0; 5]));
                rows.len() - 1
            }
        };
        let e = &mut rows[idx].1;
        e[0] += r.count(Outcome::Vacuous);
        e[1] += r.count(Outcome::Confirmed);
        e[2] += r.count(Outcome::Unresolved);
        e[3] += r.violations();
        e[4] += usize::from(r.skipped.is_some());
    }
    let mut out = format!(
        "{:<24} {:>8} {:>10} {:>11} {:>10} {:>8}\n",
        "check", "vacuous", "confirmed", "unresolved", "VIOLATION", "skipped"
    );
    for (c, e) in &rows {
        out += &format!("{c:<24} {:>8} {:>10} {:>11} {:>10} {:>8}\n", e[0], e[1], e[2], e[3], e[4]);
    }
    let t = &s.summary;
    out += &format!(
        "{:<24} {:>8} {:>10} {:>11} {:>10} {:>8}\n",
        "total", t.vacuous, t.confirmed, t.unresolved, t.violations, t.skipped
    );
    out += &format!("models: {}  reports: {}\n", t.models, t.reports);
    out
}

fn cmd_verify(
    registry: &str,
    fuzz: Option<(u64, usize)>,
    tol: Option<f64>,
    x_max: Option<f64>,
    grid: Option<usize>,
    out: Option<&Path>,
) -> Result<u8, CliError> {
    let mut reg = load_registry(registry)?;
    if let Some((seed, n)) = fuzz {
        reg.model = Registry::fuzz(seed, n).model;
    }
    let mut cfg = HarnessConfig::default();
    if let Some(t) = tol {
        cfg.tol = ModelSpec::default().merge(None, None, None, Some(t), None).tolerance()?;
    }
    cfg.x_max = x_max;
    if let Some(n) = grid {
        cfg.n_x = n.max(4);
    }
    let sweep = run_sweep(&reg, &cfg).map_err(|e| CliError::from_core(e, 3))?;
    let mut w = output::open(out)?;
    for r in &sweep.reports {
        writeln!(w, "{}", serde_json::to_string(r).expect("serializable"))?;
    }
    for (id, s) in &sweep.simpson {
        let line = json!({ "model_id": id, "check": "mixture-demo", "report": s });
        writeln!(w, "{line}")?;
    }
    w.flush()?;
    let table = summary_table(&sweep);
    if out.is_some() {
        print!("{table}");
    } else {
        eprint!("{table}");
    }
    Ok(if sweep.summary.violations == 0 { 0 } else { 1 })
}

fn cmd_reconstruct(m: &ModelArgs, csv: Option<&Path>, t0: f64) -> Result<u8, CliError> {
    let spec = m.spec()?;
    let (k, source) = match csv {
        Some(p) => {
            let (ts, ks) = read_kendall_csv(p)?;
            let k = KendallCurve::tabulated(ts, ks, Provenance::PartitionSup).map_err(CliError::from_core_input)?;
            (k, p.display().to_string())
        }
        None => {
            let c = spec.copula()?;
            let k = best_curve(&c, &kendall_grid(&spec))?;
            let k = if k.has_evaluator() {
                k.densified(255).map_err(|e| CliError::from_core(e, 3))?
            } else {
                k
            };
            (k, c.name().to_string())
        }
    };
    let phi = reconstruct_generator(&k, t0).map_err(|e| CliError::from_core(e, 1))?;
    let comments = vec![
        format!(
            "ageing {VERSION} spec={} tol={:e}",
            spec.digest(&format!("reconstruct;t0={t0};source={source}")),
            spec.tolerance()?.tol
        ),
        format!("t0={t0} source={source}"),
    ];
    let grid = match csv {
        Some(_) => k.grid().to_vec(),
        None => kendall_grid(&spec),
    };
    let mut w = Csv::new(output::open(m.out.as_deref())?, &comments, &["t", "phi", "roundtrip_error"])?;
    for &t in &grid {
        let kt = k.eval(t).unwrap_or_else(|_| k.interpolate(t));
        let back = kendall_archimedean(&phi, t).unwrap_or(f64::NAN);
        w.row(&[t, phi.phi(t), (back - kt).abs()])?;
    }
    w.finish()?;
    Ok(0)
}

fn cmd_demo_mixture(
    rates: &[f64],
    weights: &[f64],
    grid: Option<usize>,
    x_max: Option<f64>,
    out: Option<&Path>,
) -> Result<u8, CliError> {
    let mix = MixtureModel::exponentials(rates, weights).map_err(|e| CliError::input(e.to_string()))?;
    let model = SurvivalModel::mixture(mix.clone());
    let x_max = x_max.unwrap_or_else(|| model.default_x_max());
    if !(x_max > 0.0 && x_max.is_finite()) {
        return Err(CliError::input(format!("--xmax must be positive, got {x_max}")));
    }
    let ts = linspace(0.0, x_max, grid.unwrap_or(41).max(2));
    let mut header = vec!["t".to_string(), "rate".to_string()];
    header.extend((1..=rates.len()).map(|j| format!("posterior_{j}")));
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let fmt = |v: &[f64]| v.iter().map(|x| format!("{x}")).collect::<Vec<_>>().join(";");
    let comments = vec![
        format!(
            "ageing {VERSION} spec={} tol=0",
            ModelSpec::default().digest(&format!("demo-mixture;rates={};weights={};x_max={x_max}", fmt(rates), fmt(weights)))
        ),
        format!("rates={} weights={}", fmt(rates), fmt(weights)),
    ];
    let mut w = Csv::new(output::open(out)?, &comments, &header)?;
    for &t in &ts {
        let r = mix.predictive_failure_rate(t).map_err(|e| CliError::from_core(e, 3))?;
        let mut row = vec![t, r];
        row.extend(mix.posterior_weights(t).map_err(|e| CliError::from_core(e, 3))?);
        w.row(&row)?;
    }
    w.finish()?;
    Ok(0)
}
