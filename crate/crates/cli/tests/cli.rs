use std::path::Path;
use std::process::{Command, Output};

fn ageing(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ageing"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn data_rows(csv: &str) -> Vec<Vec<f64>> {
    csv.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("json output")
}

#[test]
fn validate_exit_codes() {
    assert_eq!(code(&ageing(&["validate", "--copula", "pi", "--marginal", "exp:1"])), 0);
    let o = ageing(&["validate", "--copula", "arch-gen:cosine"]);
    assert_eq!(code(&o), 1);
    assert_eq!(json(&o)["copula"]["two_increasing"]["status"], "fails");
    let o = ageing(&["validate", "--copula", "clayton:abc"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("abc"));
    let o = ageing(&["validate", "--copula", "student:3"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("clayton:<theta>"));
    assert_eq!(code(&ageing(&["validate"])), 2);
    assert_eq!(code(&ageing(&["frobnicate"])), 2);
}

#[test]
fn kendall_csv_format_and_values() {
    let o = ageing(&["kendall", "--copula", "pi", "--route", "closed"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let mut lines = text.lines();
    let first = lines.next().unwrap();
    assert!(first.starts_with("# ageing ") && first.contains("spec=") && first.contains("tol="), "{first}");
    assert!(lines.next().unwrap().contains("provenance=archimedean-closed-form"));
    assert_eq!(lines.next().unwrap(), "t,K");
    for row in data_rows(&text) {
        let t = row[0];
        assert!((row[1] - (t - t * t.ln())).abs() < 1e-11);
    }
    let cell = text.lines().nth(3).unwrap().split(',').nth(1).unwrap();
    let digits = cell.trim_start_matches("0.").trim_start_matches('0').len();
    assert_eq!(digits, 12, "{cell}");

    let m = stdout(&ageing(&["kendall", "--copula", "m", "--route", "sup"]));
    assert!(data_rows(&m).iter().all(|r| (r[1] - r[0]).abs() < 1e-3));
    let c = stdout(&ageing(&["kendall", "--copula", "clayton:1", "--route", "integral"]));
    assert!(data_rows(&c).iter().all(|r| (r[1] - (2.0 * r[0] - r[0] * r[0])).abs() < 1e-6));
}

#[test]
fn kendall_route_errors() {
    assert_eq!(code(&ageing(&["kendall", "--copula", "m", "--route", "closed"])), 1);
    assert_eq!(code(&ageing(&["kendall", "--copula", "pi", "--route", "transport-B"])), 2);
    let o = ageing(&["kendall", "--copula", "pi", "--marginal", "weibull:2:1", "--route", "transport-B"]);
    assert_eq!(code(&o), 0);
    for r in data_rows(&stdout(&o)) {
        assert!((r[1] - (r[0] - r[0] * r[0].ln() / 2.0)).abs() < 1e-6);
    }
}

#[test]
fn classify_reports() {
    let o = ageing(&["classify", "--copula", "clayton:1", "--marginal", "weibull:2:1"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["copula"]["PKD"]["status"], "holds");
    assert_eq!(v["marginal"]["IFRA"]["status"], "holds");
    assert_eq!(v["ageing_function"]["PKD"]["status"], "holds");
    assert!(v["notes"][0].as_str().unwrap().contains("PKD"));

    let v = json(&ageing(&["classify", "--copula", "pi", "--marginal", "mixexp:1,5:0.5,0.5"]));
    assert_eq!(v["marginal"]["DFR"]["status"], "holds");
    assert_eq!(v["marginal"]["IFR"]["status"], "fails");
    assert_eq!(v["ageing_function"]["NMD"]["status"], "holds");

    let v = json(&ageing(&["classify", "--copula", "pi", "--marginal", "exp:1"]));
    for side in ["marginal", "copula", "ageing_function"] {
        for (k, x) in v[side].as_object().unwrap() {
            assert_eq!(x["status"], "holds", "{side} {k}");
        }
    }
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("model.toml");
    std::fs::write(&cfg, "copula = \"clayton:1\"\nmarginal = \"exp:1\"\n[grids]\nsize = 5\n").unwrap();
    let o = ageing(&["kendall", "--config", cfg.to_str().unwrap(), "--route", "closed"]);
    assert_eq!(code(&o), 0);
    assert_eq!(data_rows(&stdout(&o)).len(), 5);
    let o = ageing(&["kendall", "--config", cfg.to_str().unwrap(), "--copula", "pi", "--route", "closed"]);
    assert!(stdout(&o).contains("copula=pi"));

    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "copula = \"pi\"\ncolour = 3\n").unwrap();
    assert_eq!(code(&ageing(&["validate", "--config", bad.to_str().unwrap()])), 2);
}

#[test]
fn reconstruct_from_copula_and_csv() {
    let o = ageing(&["reconstruct", "--copula", "pi", "--t0", "0.36787944117144233"]);
    assert_eq!(code(&o), 0);
    for r in data_rows(&stdout(&o)) {
        assert!((r[1] + r[0].ln()).abs() < 1e-3, "{r:?}");
        assert!(r[2] < 1e-3);
    }
    let o = ageing(&["reconstruct", "--copula", "clayton:1", "--t0", "0.5"]);
    for r in data_rows(&stdout(&o)) {
        let want = 1.0 / r[0] - 1.0;
        assert!((r[1] - want).abs() < 1e-3 * want, "{r:?}");
    }
    let o = ageing(&["reconstruct", "--copula", "m"]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("pseudo-Archimedean"));

    let dir = tempfile::tempdir().unwrap();
    let k = dir.path().join("k.csv");
    let curve = ageing(&["kendall", "--copula", "clayton:1", "--route", "closed", "--grid", "99", "--out", k.to_str().unwrap()]);
    assert_eq!(code(&curve), 0);
    let o = ageing(&["reconstruct", "--kendall-csv", k.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(data_rows(&stdout(&o)).iter().all(|r| r[2] < 1e-3));
    assert_eq!(code(&ageing(&["reconstruct", "--kendall-csv", "/nonexistent.csv"])), 2);
}

#[test]
fn mixture_demo() {
    let rows = data_rows(&stdout(&ageing(&["demo-mixture", "--rates", "1,5", "--weights", "0.5,0.5"])));
    assert!((rows[0][1] - 3.0).abs() < 1e-12);
    assert!(rows.windows(2).all(|w| w[1][1] < w[0][1]));
    assert!(rows.iter().all(|r| (r[2] + r[3] - 1.0).abs() < 1e-12));
    let rows = data_rows(&stdout(&ageing(&["demo-mixture", "--rates", "1,5", "--weights", "0.9,0.1"])));
    assert!((rows[0][1] - 1.4).abs() < 1e-12);
    let rows = data_rows(&stdout(&ageing(&["demo-mixture", "--rates", "2", "--weights", "1"])));
    assert!(rows.iter().all(|r| r[1] == 2.0));
    assert_eq!(code(&ageing(&["demo-mixture", "--rates", "1,5", "--weights", "0.5,0.6"])), 2);
    assert_eq!(code(&ageing(&["demo-mixture", "--rates", "1,5", "--weights", "1"])), 2);
}

fn small_registry(dir: &Path) -> String {
    let p = dir.join("reg.toml");
    std::fs::write(
        &p,
        r#"
[[model]]
id = "clayton-weibull"
copula = "clayton:1"
marginal = "weibull:2:1"

[[model]]
id = "pi-mixture"
copula = "pi"
marginal = "mixexp:1,5:0.5,0.5"

[[risk_pair]]
id = "w2-w05"
h1 = "weibull:2:1"
h2 = "weibull:0.5:1"

[[generator]]
id = "gumbel"
generator = "gumbel:2"
"#,
    )
    .unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn verify_registry_file() {
    let dir = tempfile::tempdir().unwrap();
    let reg = small_registry(dir.path());
    let o = ageing(&["verify", &reg]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let lines: Vec<serde_json::Value> = stdout(&o).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 2 * 3 + 2);
    assert!(lines.iter().all(|l| l["outcomes"].as_array().unwrap().iter().all(|x| x["outcome"] != "VIOLATION")));
    assert!(String::from_utf8_lossy(&o.stderr).contains("VIOLATION"));
}

#[test]
fn verify_rejects_corrupted_copula() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.toml");
    std::fs::write(&p, "[[model]]\nid = \"broken\"\ncopula = \"scaled:0.9:pi\"\nmarginal = \"exp:1\"\n").unwrap();
    let o = ageing(&["verify", p.to_str().unwrap()]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("broken"));
    std::fs::write(&p, "[[model]]\nid = \"x\"\ncopula = \"nope\"\nmarginal = \"exp:1\"\n").unwrap();
    assert_eq!(code(&ageing(&["verify", p.to_str().unwrap()])), 2);
    assert_eq!(code(&ageing(&["verify", "/nonexistent.toml"])), 2);
}

#[test]
fn fuzz_is_deterministic() {
    let args = ["verify", "builtin", "--fuzz", "--seed", "42", "--n", "4"];
    let (a, b) = (ageing(&args), ageing(&args));
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).contains("fuzz-003"));
    let c = ageing(&["verify", "builtin", "--fuzz", "--seed", "7", "--n", "4"]);
    assert_ne!(a.stdout, c.stdout);
}
