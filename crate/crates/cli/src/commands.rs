//! Subcommand implementations. Each returns an [`Outcome`]: a pass flag, a
//! JSON result and a short human-readable summary.

use std::fs::File;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use bolhalf::arith::{rat, with_prec, Coeff, Cx, MpC, MpReal, QQi, Real, C64};
use bolhalf::bol_ops::{delta0_closed_form, delta_a, rankin_cohen, selberg_lift};
use bolhalf::characters::DirichletCharacter;
use bolhalf::forms::{FormMeta, FormMetaSummary, HalfWeight};
use bolhalf::lseries::alpha::HFunction;
use bolhalf::lseries::bessel::{bessel_half, bessel_series, Sign};
use bolhalf::lseries::sc::{real_grid, sc_residual, Inversion, ScOptions, ScParams};
use bolhalf::lseries::{fe_residual, lseries_value, LOptions, LValue, TestFunction};
use bolhalf::modular_verify::{automorphy_residual, fricke_points, fricke_relation, sample_pairs};
use bolhalf::qseries::{read_series, write_series, AnySeries, QSeries};
use bolhalf::suites::{run_suite, SuiteConfig, Verdict};
use bolhalf::thetas::{theta_series, ThetaContext, ThetaKind};
use num_rational::BigRational;
use serde_json::{json, Value};

use crate::config::RunConfig;

/// Exit status of a failed invocation, with its message.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub msg: String,
}

impl Failure {
    pub fn usage(msg: impl Into<String>) -> Self {
        Failure { code: 2, msg: msg.into() }
    }
}

impl From<bolhalf::Error> for Failure {
    fn from(e: bolhalf::Error) -> Self {
        use bolhalf::Error::*;
        let code = match e {
            InvalidArgument(_) | Parse(_) | OutOfContract(_) | Io(_) => 2,
            _ => 3,
        };
        Failure { code, msg: e.to_string() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure { code: 2, msg: e.to_string() }
    }
}

pub type CmdResult = Result<Outcome, Failure>;

pub struct Outcome {
    pub pass: bool,
    /// Exit code to use instead of the pass flag.
    pub code: Option<i32>,
    pub result: Value,
    pub text: String,
    /// Series text written to `--out` or standard output.
    pub series: Option<String>,
}

impl Outcome {
    fn new(pass: bool, result: Value, text: String) -> Self {
        Outcome { pass, code: None, result, text, series: None }
    }
}

fn parse<T: FromStr>(s: &str, what: &str) -> Result<T, Failure>
where
    T::Err: std::fmt::Display,
{
    s.parse::<T>().map_err(|e| Failure::usage(format!("bad {what} '{s}': {e}")))
}

fn character(s: &str) -> Result<DirichletCharacter, Failure> {
    Ok(DirichletCharacter::parse(s)?)
}

fn read_file(path: &Path) -> Result<AnySeries, Failure> {
    let f = File::open(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    read_series(BufReader::new(f)).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn series_text<C: Coeff>(f: &QSeries<C>) -> Result<String, Failure> {
    let mut buf = Vec::new();
    write_series(f, &mut buf)?;
    Ok(String::from_utf8(buf).expect("series text is ascii"))
}

/// Run `body` on the series in its own coefficient ring: Gaussian rationals
/// for exact files, complex floats at the file's precision otherwise.
fn on_series<T>(
    any: &AnySeries,
    bits: u32,
    exact: impl FnOnce(&QSeries<QQi>) -> Result<T, Failure>,
    float: impl FnOnce(&QSeries<MpC>) -> Result<T, Failure>,
) -> Result<T, Failure> {
    match any {
        AnySeries::Exact(s) => exact(s),
        AnySeries::Float { series, bits: b } => with_prec((*b).max(bits as usize), || float(series)),
    }
}

pub fn theta(kind: &str, chi: &str, t: u64, cfg: &RunConfig) -> CmdResult {
    let kind: ThetaKind = kind.parse()?;
    let psi = character(chi)?;
    let prec = cfg.truncation(100) as i64;
    let bits = cfg.bits().unwrap_or(128);
    let (text, meta) = match theta_series::<QQi>(kind, &psi, t, prec) {
        Ok((f, meta)) => (series_text(&f)?, meta),
        // values outside Q(i): fall back to floating coefficients
        Err(bolhalf::Error::Inexact(_)) => with_prec(bits as usize, || -> Result<_, Failure> {
            let (f, meta) = theta_series::<MpC>(kind, &psi, t, prec)?;
            Ok((series_text(&f)?, meta))
        })?,
        Err(e) => return Err(e.into()),
    };
    let meta = FormMetaSummary::from(&meta);
    let summary = format!("{kind} for {psi}, t = {t}: weight {}, level {}, known mod q^{prec}", meta.weight, meta.level);
    let mut out = Outcome::new(true, json!({ "kind": kind.to_string(), "character": chi, "t": t, "prec": prec, "meta": meta }), summary);
    out.series = Some(text);
    Ok(out)
}

pub struct DeltaArgs<'a> {
    pub a: &'a str,
    pub k: &'a str,
    pub psi0: &'a str,
    pub psi1: &'a str,
    pub input: &'a Path,
    pub closed_form: bool,
}

pub fn delta(args: &DeltaArgs, cfg: &RunConfig) -> CmdResult {
    let a: BigRational = parse(args.a, "a")?;
    let k: HalfWeight = args.k.parse()?;
    let ctx = ThetaContext::parse(args.psi0, args.psi1)?;
    let any = read_file(args.input)?;
    let target = cfg.prec.map(|p| rat(p as i64, 1));
    let bits = cfg.bits().unwrap_or(128);
    let (text, achieved) = on_series(
        &any,
        bits,
        |f| delta_generic(f, k, &a, &ctx, target.as_ref(), args.closed_form),
        |f| delta_generic(f, k, &a, &ctx, target.as_ref(), args.closed_form),
    )?;
    let summary = format!("delta_{a}^{{k-1}} with k = {k}: known mod q^{achieved}");
    let mut out = Outcome::new(
        true,
        json!({
            "a": a.to_string(), "k": k.to_string(), "psi0": args.psi0, "psi1": args.psi1,
            "closed_form": args.closed_form,
            "requested": target.map(|t| t.to_string()),
            "achieved": achieved.to_string(),
        }),
        summary,
    );
    out.series = Some(text);
    Ok(out)
}

fn delta_generic<C: Coeff>(
    f: &QSeries<C>,
    k: HalfWeight,
    a: &BigRational,
    ctx: &ThetaContext,
    target: Option<&BigRational>,
    closed_form: bool,
) -> Result<(String, BigRational), Failure> {
    if closed_form {
        if *a != rat(0, 1) {
            return Err(Failure::usage("--closed-form expands delta_0; use --a 0"));
        }
        let mut g = delta0_closed_form(f, k, ctx)?;
        if let Some(t) = target {
            g = g.truncate_at(t);
        }
        Ok((series_text(&g)?, g.precision()))
    } else {
        let out = delta_a(f, k, a, ctx, target)?;
        Ok((series_text(&out.series)?, out.achieved))
    }
}

pub fn rc(n: u32, k: &str, l: &str, f: &Path, g: &Path, cfg: &RunConfig) -> CmdResult {
    let (k, l): (HalfWeight, HalfWeight) = (k.parse()?, l.parse()?);
    let bits = cfg.bits().unwrap_or(128);
    let (text, power) = match (read_file(f)?, read_file(g)?) {
        (AnySeries::Exact(f), AnySeries::Exact(g)) => {
            let r = rankin_cohen(&f, &g, n, k, l)?;
            (series_text(&r.series)?, r.two_pi_i_power)
        }
        (x, y) => with_prec(bits as usize, || -> Result<_, Failure> {
            let r = rankin_cohen(&x.to_float(), &y.to_float(), n, k, l)?;
            Ok((series_text(&r.series)?, r.two_pi_i_power))
        })?,
    };
    let summary = format!("[f, g]_{n} with k = {k}, l = {l}; the series carries a factor (2 pi i)^{power}");
    let mut out = Outcome::new(true, json!({ "n": n, "k": k.to_string(), "l": l.to_string(), "two_pi_i_power": power }), summary);
    out.series = Some(text);
    Ok(out)
}

pub fn selberg(k: i64, f: &Path, cfg: &RunConfig) -> CmdResult {
    let bits = cfg.bits().unwrap_or(128);
    let (text, fmeta, lmeta) = on_series(&read_file(f)?, bits, |s| selberg_generic(s, k), |s| selberg_generic(s, k))?;
    let summary = format!("S(F) for F = f(4z) theta0: weight {}, level {}", lmeta.weight, lmeta.level);
    let mut out = Outcome::new(true, json!({ "k": k, "f_theta_meta": fmeta, "lift_meta": lmeta }), summary);
    out.series = Some(text);
    Ok(out)
}

fn selberg_generic<C: Coeff>(f: &QSeries<C>, k: i64) -> Result<(String, FormMetaSummary, FormMetaSummary), Failure> {
    let out = selberg_lift(f, k)?;
    Ok((series_text(&out.lift)?, FormMetaSummary::from(&out.f_theta_meta), FormMetaSummary::from(&out.lift_meta)))
}

pub struct VerifyArgs<'a> {
    pub input: &'a Path,
    pub meta: &'a str,
    pub fricke: Option<u64>,
    pub g: Option<&'a Path>,
    pub pairs: usize,
    pub c_max: u64,
}

pub fn verify(args: &VerifyArgs, cfg: &RunConfig) -> CmdResult {
    let meta = FormMeta::parse(args.meta)?;
    let bits = cfg.bits().map_err(Failure::usage)?;
    let seed = cfg.seed_or(0);
    let tol = cfg.tol_or(1e-8);
    let f = read_file(args.input)?;
    let g = args.g.map(read_file).transpose()?;
    with_prec(bits as usize, || {
        let f = f.to_float();
        match args.fricke {
            Some(m) => {
                let g = g.map(|g| g.to_float()).unwrap_or_else(|| f.clone());
                let pts: Vec<MpC> = fricke_points(m, args.pairs, seed).iter().map(Cx::from_c64).collect();
                let rep = fricke_relation(&f, &g, m, meta.weight, None, &pts, tol)?;
                let text = format!(
                    "f | W_{m} = c g with c = {:.12} {:+.12}i; spread {:.2e} over {} points (tol {tol:e})",
                    rep.derived_constant[0],
                    rep.derived_constant[1],
                    rep.spread,
                    rep.records.len()
                );
                Ok(Outcome::new(rep.pass, json!({ "mode": "fricke", "bits": bits, "seed": seed, "report": rep }), text))
            }
            None => {
                let pairs: Vec<(_, MpC)> =
                    sample_pairs(meta.level, args.c_max, args.pairs, seed).into_iter().map(|(g, z)| (g, Cx::from_c64(&z))).collect();
                let rep = automorphy_residual(&f, &meta, &pairs, tol)?;
                let text = format!(
                    "automorphy on Gamma0({}): max residual {:.2e} over {} admissible pairs, {} skipped (tol {tol:e})",
                    meta.level, rep.max_residual, rep.admissible, rep.skipped
                );
                let pass = rep.pass && rep.admissible > 0;
                Ok(Outcome::new(pass, json!({ "mode": "automorphy", "bits": bits, "seed": seed, "report": rep }), text))
            }
        }
    })
}

fn lvalue_json(v: &LValue<MpReal>) -> Value {
    json!({
        "value": [v.value.re.to_string_digits(30), v.value.im.to_string_digits(30)],
        "abs_sum": v.abs_sum,
        "terms": v.terms,
        "certificate": v.certificate,
    })
}

pub fn lseries(input: &Path, chi: &str, phi: &str, out: Option<&Path>, cfg: &RunConfig) -> CmdResult {
    let chi = character(chi)?;
    let phi: TestFunction = phi.parse()?;
    let bits = cfg.bits().map_err(Failure::usage)?;
    let any = read_file(input)?;
    let mut opts = LOptions::default();
    if let Some(t) = cfg.tol {
        opts.rel_tol = t;
        opts.tail_tol = t;
    }
    let (val, j) = with_prec(bits as usize, || -> Result<_, Failure> {
        let v: LValue<MpReal> = match &any {
            AnySeries::Exact(f) => lseries_value(f, &chi, &phi, &opts)?,
            AnySeries::Float { series, .. } => lseries_value(series, &chi, &phi, &opts)?,
        };
        Ok((format!("{} {}", v.value.re.to_string_digits(30), v.value.im.to_string_digits(30)), lvalue_json(&v)))
    })?;
    if let Some(p) = out {
        std::fs::write(p, format!("{val}\n"))?;
    }
    Ok(Outcome::new(true, json!({ "chi": chi.to_string(), "phi": phi.to_string(), "bits": bits, "value": j }), val))
}

pub struct FeArgs<'a> {
    pub f: &'a Path,
    pub g: &'a Path,
    pub meta: &'a str,
    pub chi: &'a str,
    pub phi: &'a str,
    pub g_factor: &'a str,
}

fn complex_arg(s: &str) -> Result<(f64, f64), Failure> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    match parts.as_slice() {
        [re] => Ok((parse(re, "real part")?, 0.0)),
        [re, im] => Ok((parse(re, "real part")?, parse(im, "imaginary part")?)),
        _ => Err(Failure::usage(format!("expected 're' or 're,im', got '{s}'"))),
    }
}

pub fn fe(args: &FeArgs, cfg: &RunConfig) -> CmdResult {
    let meta = FormMeta::parse(args.meta)?;
    let chi = character(args.chi)?;
    let phi: TestFunction = args.phi.parse()?;
    let (gre, gim) = complex_arg(args.g_factor)?;
    let bits = cfg.bits().map_err(Failure::usage)?;
    let tol = cfg.tol_or(1e-6);
    let (f, g) = (read_file(args.f)?, read_file(args.g)?);
    with_prec(bits as usize, || {
        let c: MpC = Cx::from_f64(gre, gim);
        let opts = LOptions::default();
        let rep = match (&f, &g) {
            (AnySeries::Exact(f), AnySeries::Exact(g)) => fe_residual(f, g, &c, &meta, &chi, &phi, &opts, tol)?,
            _ => fe_residual(&f.to_float(), &g.to_float(), &c, &meta, &chi, &phi, &opts, tol)?,
        };
        let text = format!(
            "functional equation, k = {}, N = {}, D = {}: residual {:.3e} (tol {tol:e})",
            rep.weight, rep.level, rep.d, rep.residual
        );
        Ok(Outcome::new(rep.pass, json!({ "bits": bits, "report": rep }), text))
    })
}

/// SC parameters from a `key = value` file.
fn sc_params(path: &Path) -> Result<(ScParams, Option<String>), Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    let mut kv = std::collections::BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Failure::usage(format!("{}:{}: expected 'key = value'", path.display(), i + 1)))?;
        kv.insert(k.trim().to_string(), v.trim().to_string());
    }
    const KNOWN: [&str; 9] = ["k", "n", "n_prime", "d", "chi", "psi", "psi_prime", "lambda", "h"];
    if let Some(k) = kv.keys().find(|k| !KNOWN.contains(&k.as_str())) {
        return Err(Failure::usage(format!("{}: unknown key '{k}' (known: {})", path.display(), KNOWN.join(", "))));
    }
    let get = |k: &str| kv.get(k).cloned().ok_or_else(|| Failure::usage(format!("{}: missing key '{k}'", path.display())));
    let n: u64 = parse(&get("n")?, "n")?;
    let n_prime: u64 = kv.get("n_prime").map(|s| parse(s, "n_prime")).transpose()?.unwrap_or(n);
    let d: u64 = parse(&get("d")?, "d")?;
    let level = n.max(n_prime);
    let triv_level = format!("triv:{level}");
    let (lre, lim) = complex_arg(kv.get("lambda").map(String::as_str).unwrap_or("1"))?;
    let params = ScParams {
        k: get("k")?.parse()?,
        n,
        n_prime,
        d,
        chi: character(kv.get("chi").cloned().unwrap_or(format!("triv:{d}")).as_str())?,
        psi: character(kv.get("psi").unwrap_or(&triv_level))?,
        psi_prime: character(kv.get("psi_prime").unwrap_or(&triv_level))?,
        lambda: C64::new(lre, lim),
        h: HFunction::one(),
    };
    Ok((params, kv.get("h").cloned()))
}

fn p_grid(spec: &str) -> Result<Vec<C64>, Failure> {
    let parts: Vec<&str> = spec.split(',').map(str::trim).collect();
    match parts.as_slice() {
        [lo, hi, n] => {
            let (lo, hi, n): (f64, f64, usize) = (parse(lo, "grid start")?, parse(hi, "grid end")?, parse(n, "grid size")?);
            if !(lo > 0.0 && hi >= lo && n > 0) {
                return Err(Failure::usage(format!("grid '{spec}' must satisfy 0 < lo <= hi and count > 0")));
            }
            Ok(real_grid(lo, hi, n))
        }
        _ => Err(Failure::usage(format!("grid must be 'lo,hi,count', got '{spec}'"))),
    }
}

pub fn sc(params: &Path, hs: &[String], grid: &str, phi: &str, inversion: &str, cfg: &RunConfig) -> CmdResult {
    let (base, file_h) = sc_params(params)?;
    let grid = p_grid(grid)?;
    let phi: TestFunction = phi.parse()?;
    let inversion = match inversion {
        "exact" => Inversion::Exact,
        "numerical" => Inversion::Numerical,
        "talbot" => Inversion::Talbot,
        other => return Err(Failure::usage(format!("unknown inversion '{other}' (exact | numerical | talbot)"))),
    };
    let mut family: Vec<HFunction> = hs.iter().map(|s| s.parse()).collect::<Result<_, _>>()?;
    if family.is_empty() {
        family.push(file_h.as_deref().unwrap_or("one").parse()?);
    }
    let opts = ScOptions { inversion, ..Default::default() };
    let mut reports = Vec::new();
    let mut lines = Vec::new();
    let mut all_ok = true;
    for h in family {
        let params = ScParams { h: h.clone(), ..base.clone() };
        match sc_residual(&params, &phi, &grid, &opts) {
            Ok(rep) => {
                let ok = cfg.tol.map_or(true, |t| rep.max_residual < t);
                all_ok &= ok;
                lines.push(format!("h = {h}: max residual {:.3e}", rep.max_residual));
                reports.push(json!({ "h": h.to_string(), "pass": ok, "report": rep }));
            }
            // a failed inversion is part of the landscape, not a crash
            Err(e) => {
                all_ok = false;
                lines.push(format!("h = {h}: {e}"));
                reports.push(json!({ "h": h.to_string(), "pass": false, "error": e.to_string() }));
            }
        }
    }
    let mode = if cfg.tol.is_some() { "threshold" } else { "exploratory" };
    Ok(Outcome::new(all_ok, json!({ "mode": mode, "tol": cfg.tol, "landscape": reports }), lines.join("\n")))
}

pub fn bessel(n: u32, sign: &str, zs: &str, cfg: &RunConfig) -> CmdResult {
    let sign = match sign {
        "+" | "plus" => Sign::Plus,
        "-" | "minus" => Sign::Minus,
        other => return Err(Failure::usage(format!("sign must be + or -, got '{other}'"))),
    };
    let zs: Vec<String> = zs.split(',').map(|s| s.trim().to_string()).collect();
    let bits = cfg.bits().map_err(Failure::usage)?;
    let tol = cfg.tol_or(1e-12);
    let doubled = if sign == Sign::Plus { 2 * n as i64 + 1 } else { -(2 * n as i64 + 1) };
    with_prec(bits as usize, || {
        let mut rows = Vec::new();
        let mut lines = Vec::new();
        let mut pass = true;
        for z in &zs {
            let x = MpReal::parse(z).filter(|x| x.to_f64() > 0.0).ok_or_else(|| Failure::usage(format!("z must be positive, got '{z}'")))?;
            let v = bessel_half(n, sign, &x)?;
            let s = bessel_series(doubled, &x)?;
            let scale = v.abs().to_f64().max(s.abs().to_f64());
            let rel = if scale == 0.0 { 0.0 } else { (v.clone() - s).abs().to_f64() / scale };
            pass &= rel < tol;
            lines.push(format!("J_{doubled}/2({z}) = {}", v.to_string_digits(25)));
            rows.push(json!({ "z": z, "value": v.to_string_digits(30), "series_rel_diff": rel }));
        }
        Ok(Outcome::new(pass, json!({ "order_doubled": doubled, "bits": bits, "tol": tol, "values": rows }), lines.join("\n")))
    })
}

pub fn suite_config(cfg: &RunConfig) -> Result<SuiteConfig, Failure> {
    Ok(SuiteConfig { prec_bits: cfg.bits().map_err(Failure::usage)?, seed: cfg.seed_or(0), tol: cfg.tol })
}

pub fn verdict_line(v: &Verdict) -> String {
    let failing: Vec<&str> = v.checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect();
    format!(
        "[{}] {} (criterion {}): {} checks{}",
        if v.pass { "PASS" } else { "FAIL" },
        v.suite,
        v.criterion,
        v.checks.len(),
        if failing.is_empty() { String::new() } else { format!(", failing: {}", failing.join("; ")) }
    )
}

fn code_of(verdicts: &[Verdict]) -> i32 {
    verdicts.iter().map(Verdict::exit_code).max_by_key(|c| match c {
        3 => 2,
        1 => 1,
        _ => 0,
    })
    .unwrap_or(0)
}

pub fn suite(name: &str, cfg: &RunConfig) -> CmdResult {
    let v = run_suite(name, &suite_config(cfg)?)?;
    let mut out = Outcome::new(v.pass, serde_json::to_value(&v).expect("verdict serializes"), verdict_line(&v));
    out.code = Some(v.exit_code());
    Ok(out)
}

/// Several suites, run concurrently; the report lists them in request order.
pub fn run(names: &[String], cfg: &RunConfig) -> CmdResult {
    let scfg = suite_config(cfg)?;
    let names: Vec<String> = if names.is_empty() {
        bolhalf::suites::suite_names().into_iter().map(String::from).collect()
    } else {
        names.to_vec()
    };
    for n in &names {
        if !bolhalf::suites::suite_names().contains(&n.as_str()) {
            return Err(Failure::usage(format!("unknown suite '{n}'; known: {}", bolhalf::suites::suite_names().join(", "))));
        }
    }
    let verdicts: Vec<Verdict> = std::thread::scope(|s| {
        let handles: Vec<_> = names
            .iter()
            .map(|n| {
                let scfg = &scfg;
                std::thread::Builder::new().stack_size(64 << 20).spawn_scoped(s, move || run_suite(n, scfg)).expect("spawn")
            })
            .collect();
        handles.into_iter().map(|h| h.join().map_err(|_| Failure { code: 3, msg: "suite thread panicked".into() })).collect::<Result<Vec<_>, _>>()
    })?
    .into_iter()
    .collect::<Result<_, _>>()?;
    let text = verdicts.iter().map(verdict_line).collect::<Vec<_>>().join("\n");
    let pass = verdicts.iter().all(|v| v.pass);
    let code = code_of(&verdicts);
    let mut out = Outcome::new(pass, json!({ "suites": verdicts }), text);
    out.code = Some(code);
    Ok(out)
}

/// Write `content` to `path`, or standard output for `-`.
pub fn emit(path: &Path, content: &str) -> Result<(), Failure> {
    if path == Path::new("-") {
        let mut so = std::io::stdout().lock();
        so.write_all(content.as_bytes())?;
        so.flush()?;
    } else {
        std::fs::write(path, content).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    }
    Ok(())
}

pub fn stdout_path() -> PathBuf {
    PathBuf::from("-")
}
