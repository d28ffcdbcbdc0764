use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn bolhalf(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bolhalf")).args(args).current_dir(dir).output().expect("run bolhalf")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

/// `(exponent, real part)` pairs of an exact series file.
fn exact_terms(text: &str) -> Vec<(i64, String)> {
    text.lines()
        .skip(1)
        .map(|l| {
            let t: Vec<&str> = l.split_whitespace().collect();
            assert_eq!(t[1], "1", "integral exponents expected");
            let re = if t[3] == "1" { t[2].to_string() } else { format!("{}/{}", t[2], t[3]) };
            (t[0].parse().unwrap(), re)
        })
        .collect()
}

#[test]
fn theta0_file_starts_one_half_q_q4() {
    let dir = TempDir::new().unwrap();
    let o = bolhalf(&["theta", "--kind", "theta0", "--char", "triv:1", "--prec", "100"], dir.path());
    assert_eq!(code(&o), 0);
    let terms = exact_terms(&stdout(&o));
    let expect: Vec<(i64, String)> =
        [(0, "1/2"), (1, "1"), (4, "1"), (9, "1")].iter().map(|(e, c)| (*e, c.to_string())).collect();
    assert_eq!(terms[..4], expect[..]);
    assert_eq!(terms.len(), 10);
    assert!(stdout(&o).starts_with("1 0 1 100 1 exact"));
}

#[test]
fn delta_of_theta0_matches_theta1_through_the_driver() {
    let dir = TempDir::new().unwrap();
    let p = dir.path();
    for (kind, chi, file) in [("theta0", "kron:5", "t0.qs"), ("theta1", "kron:-3", "t1.qs")] {
        let o = bolhalf(&["theta", "--kind", kind, "--char", chi, "--prec", "120", "--out", file], p);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    }
    for a in ["-2", "2/3", "3"] {
        let o = bolhalf(
            &["delta", "--a", a, "--k", "3/2", "--psi0", "kron:5", "--psi1", "kron:-3", "--in", "t0.qs", "--prec", "100", "--out", "d.qs", "--json", "d.json"],
            p,
        );
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        let d = std::fs::read_to_string(p.join("d.qs")).unwrap();
        let t1 = std::fs::read_to_string(p.join("t1.qs")).unwrap();
        let t1_terms: Vec<_> = exact_terms(&t1).into_iter().filter(|(e, _)| *e < 100).collect();
        assert_eq!(exact_terms(&d), t1_terms, "a = {a}");
        assert_eq!(read_json(&p.join("d.json"))["result"]["achieved"], "100");
    }
}

#[test]
fn help_and_usage_errors() {
    let dir = TempDir::new().unwrap();
    let o = bolhalf(&["run", "--help"], dir.path());
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("Usage"));
    assert_eq!(code(&bolhalf(&["frobnicate"], dir.path())), 2);
    assert_eq!(code(&bolhalf(&["theta", "--kind", "theta0", "--char", "nonsense:3"], dir.path())), 2);
    assert_eq!(code(&bolhalf(&["theta", "--kind", "theta7", "--char", "triv:1"], dir.path())), 2);
    assert_eq!(code(&bolhalf(&["suite", "no-such-suite"], dir.path())), 2);
    assert_eq!(code(&bolhalf(&["bessel", "--n", "1", "--z", "-1"], dir.path())), 2);
    assert_eq!(code(&bolhalf(&["lseries", "--in", "missing.qs"], dir.path())), 2);
    assert_eq!(code(&bolhalf(&["--tol", "-1", "suite", "bracket-ratio"], dir.path())), 2);
}

#[test]
fn config_file_and_overrides() {
    let dir = TempDir::new().unwrap();
    let p = dir.path();
    std::fs::write(p.join("run.cfg"), "# series length\nprec = 30\n").unwrap();
    let o = bolhalf(&["--config", "run.cfg", "theta", "--kind", "theta0", "--char", "triv:1"], p);
    assert!(stdout(&o).starts_with("1 0 1 30 1 exact"));
    let o = bolhalf(&["--config", "run.cfg", "--prec", "12", "theta", "--kind", "theta0", "--char", "triv:1"], p);
    assert!(stdout(&o).starts_with("1 0 1 12 1 exact"));
    std::fs::write(p.join("bad.cfg"), "precision = 30\n").unwrap();
    let o = bolhalf(&["--config", "bad.cfg", "theta", "--kind", "theta0", "--char", "triv:1"], p);
    assert_eq!(code(&o), 2);
}

#[test]
fn suite_verdict_is_deterministic_and_self_describing() {
    let dir = TempDir::new().unwrap();
    let p = dir.path();
    for out in ["a.json", "b.json"] {
        let o = bolhalf(&["suite", "bracket-ratio", "--seed", "0", "--json", out], p);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    }
    let a = std::fs::read(p.join("a.json")).unwrap();
    assert_eq!(a, std::fs::read(p.join("b.json")).unwrap());
    let v = read_json(&p.join("a.json"));
    assert_eq!(v["schema"], "bolhalf.suite/1");
    assert_eq!(v["criterion"], 11);
    assert_eq!(v["pass"], true);
    assert_eq!(v["config"]["prec_bits"], 128);
    assert_eq!(v["config"]["seed"], 0);
    assert!(v["checks"].as_array().unwrap().iter().all(|c| c.get("seed").is_some() && c.get("tolerance").is_some()));
}

#[test]
fn suite_delta_theta_passes() {
    let dir = TempDir::new().unwrap();
    let o = bolhalf(&["suite", "delta-theta"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["checks"].as_array().unwrap().len(), 18);
}

#[test]
fn run_collects_several_suites_in_order() {
    let dir = TempDir::new().unwrap();
    let o = bolhalf(&["run", "bracket-ratio", "theta-map", "--json", "r.json"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v = read_json(&dir.path().join("r.json"));
    let names: Vec<&str> = v["result"]["suites"].as_array().unwrap().iter().map(|s| s["suite"].as_str().unwrap()).collect();
    assert_eq!(names, ["bracket-ratio", "theta-map"]);
    assert_eq!(v["schema"], "bolhalf.report/1");
}

#[test]
fn verify_then_functional_equation() {
    let dir = TempDir::new().unwrap();
    let p = dir.path();
    bolhalf(&["theta", "--kind", "theta0", "--char", "triv:1", "--prec", "600", "--out", "t0.qs"], p);
    let o = bolhalf(&["verify", "--in", "t0.qs", "--meta", "1,4,triv:1,0", "--seed", "11", "--tol", "1e-10"], p);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    // the same series declared with a wrong weight fails the check
    let o = bolhalf(&["verify", "--in", "t0.qs", "--meta", "3,4,triv:1,0", "--seed", "11", "--tol", "1e-10"], p);
    assert_eq!(code(&o), 1);
    let o = bolhalf(&["verify", "--in", "t0.qs", "--meta", "1,4,triv:1,0", "--fricke", "4", "--pairs", "10", "--tol", "1e-10", "--json", "w.json"], p);
    assert_eq!(code(&o), 0);
    let c = &read_json(&p.join("w.json"))["result"]["report"]["derived_constant"];
    let g_factor = format!("{},{}", c[0].as_f64().unwrap(), c[1].as_f64().unwrap());
    let o = bolhalf(
        &["fe", "--f", "t0.qs", "--g", "t0.qs", "--meta", "1,4,triv:1,0", "--chi", "gen:3:2=1", "--g-factor", &g_factor, "--json", "fe.json"],
        p,
    );
    assert_eq!(code(&o), 0, "{} {}", stdout(&o), String::from_utf8_lossy(&o.stderr));
    let r = read_json(&p.join("fe.json"));
    assert!(r["result"]["report"]["residual"].as_f64().unwrap() < 1e-6);
}

#[test]
fn lseries_value_and_certificate_failure() {
    let dir = TempDir::new().unwrap();
    let p = dir.path();
    bolhalf(&["theta", "--kind", "theta0", "--char", "triv:1", "--prec", "200", "--out", "t0.qs"], p);
    let o = bolhalf(&["lseries", "--in", "t0.qs", "--out", "value.txt"], p);
    assert_eq!(code(&o), 0);
    let v = std::fs::read_to_string(p.join("value.txt")).unwrap();
    let re: f64 = v.split_whitespace().next().unwrap().parse().unwrap();
    assert!(re > 0.0);
    // support so close to 0 that 200 terms cannot bound the tail
    let o = bolhalf(&["lseries", "--in", "t0.qs", "--phi", "bump:0.0001,0.0002"], p);
    assert_eq!(code(&o), 3, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn sc_landscape_and_threshold() {
    let dir = TempDir::new().unwrap();
    let p = dir.path();
    std::fs::write(p.join("sc.cfg"), "k = 2\nn = 4\nd = 3\n").unwrap();
    let o = bolhalf(&["sc", "--params", "sc.cfg", "--tol", "1e-4", "--json", "sc.json"], p);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert_eq!(read_json(&p.join("sc.json"))["result"]["landscape"][0]["report"]["records"].as_array().unwrap().len(), 10);
    std::fs::write(p.join("half.cfg"), "k = 3/2\nn = 4\nd = 3\n").unwrap();
    let o = bolhalf(&["sc", "--params", "half.cfg", "--h", "one", "--h", "exp:0.2", "--p-grid", "0.5,5,4", "--json", "h.json"], p);
    assert_eq!(code(&o), 0);
    assert_eq!(read_json(&p.join("h.json"))["result"]["mode"], "exploratory");
    // Talbot cannot invert a compactly supported original inside its support
    let o = bolhalf(&["sc", "--params", "sc.cfg", "--inversion", "talbot", "--p-grid", "1,2,3"], p);
    assert_eq!(code(&o), 1);
}
