//! `bolhalf`: batch driver for series construction, operators, numerical
//! verification and the acceptance suites.
//!
//! Exit codes: 0 pass, 1 check failure, 2 usage error, 3 numerical failure.

mod commands;
mod config;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use commands::{emit, stdout_path, CmdResult, DeltaArgs, FeArgs, Failure, VerifyArgs};
use config::RunConfig;

const REPORT_SCHEMA: &str = "bolhalf.report/1";

#[derive(Parser, Debug)]
#[command(name = "bolhalf", version, about = "Half-integral weight Bol operators, theta series and L-series checks")]
struct Cli {
    /// Write the JSON report to PATH ('-' for standard output).
    #[arg(long, global = true, value_name = "PATH")]
    json: Option<PathBuf>,
    /// Precision: q-adic truncation for theta/delta/rc/selberg, working bits otherwise.
    #[arg(long, global = true, value_name = "P")]
    prec: Option<u32>,
    /// Tolerance for the checks of this invocation.
    #[arg(long, global = true, value_name = "TOL")]
    tol: Option<f64>,
    /// Base seed for sampled points and random inputs.
    #[arg(long, global = true, value_name = "SEED")]
    seed: Option<u64>,
    /// Key-value config file (prec, tol, seed, json); flags override it.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Build theta0, theta1 or a Serre-Stark series.
    Theta {
        #[arg(long, value_name = "theta0|theta1|st")]
        kind: String,
        #[arg(long = "char", value_name = "SPEC")]
        chi: String,
        #[arg(long, default_value_t = 1)]
        t: u64,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Apply delta_a^{k-1} (or its closed-form expansion at a = 0).
    Delta {
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[arg(long, allow_hyphen_values = true)]
        k: String,
        #[arg(long, value_name = "SPEC")]
        psi0: String,
        #[arg(long, value_name = "SPEC")]
        psi1: String,
        #[arg(long = "in", value_name = "FILE")]
        input: PathBuf,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
        #[arg(long)]
        closed_form: bool,
    },
    /// Rankin-Cohen bracket [f, g]_n.
    Rc {
        #[arg(long)]
        n: u32,
        #[arg(long, allow_hyphen_values = true)]
        k: String,
        #[arg(long, allow_hyphen_values = true)]
        l: String,
        f: PathBuf,
        g: PathBuf,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Selberg lift S(F) of F = f(4z) theta0 for f of weight k on SL2(Z).
    Selberg {
        #[arg(long)]
        k: i64,
        f: PathBuf,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Numerical automorphy or Fricke check of a series.
    Verify {
        #[arg(long = "in", value_name = "FILE")]
        input: PathBuf,
        /// '2k,N,charspec,n0'
        #[arg(long, allow_hyphen_values = true)]
        meta: String,
        /// Check f|W_M = c g instead, deriving c.
        #[arg(long, value_name = "M")]
        fricke: Option<u64>,
        /// The series g of the Fricke check (default f).
        #[arg(long, value_name = "FILE")]
        g: Option<PathBuf>,
        #[arg(long, default_value_t = 20)]
        pairs: usize,
        #[arg(long, default_value_t = 2)]
        c_max: u64,
    },
    /// Twisted L-series value L_f(chi, phi).
    Lseries {
        #[arg(long = "in", value_name = "FILE")]
        input: PathBuf,
        #[arg(long, default_value = "triv:1", allow_hyphen_values = true)]
        chi: String,
        #[arg(long, default_value = "bump:1,2")]
        phi: String,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Functional-equation residual for f and g = f|W_N / g-factor.
    Fe {
        #[arg(long, value_name = "FILE")]
        f: PathBuf,
        #[arg(long, value_name = "FILE")]
        g: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        meta: String,
        #[arg(long, default_value = "triv:1", allow_hyphen_values = true)]
        chi: String,
        #[arg(long, default_value = "bump:1,2")]
        phi: String,
        /// Constant c in f|W_N = c g, as 're' or 're,im'.
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        g_factor: String,
    },
    /// Residual landscape of the sufficient condition on h.
    Sc {
        /// Key-value file: k, n, n_prime, d, chi, psi, psi_prime, lambda, h.
        #[arg(long, value_name = "FILE")]
        params: PathBuf,
        /// Candidate h; repeat to scan a family.
        #[arg(long, value_name = "NAME:ARGS")]
        h: Vec<String>,
        #[arg(long, default_value = "0.5,5,10", value_name = "LO,HI,COUNT")]
        p_grid: String,
        #[arg(long, default_value = "bump:1,2")]
        phi: String,
        #[arg(long, default_value = "numerical", value_name = "exact|numerical|talbot")]
        inversion: String,
    },
    /// J_{+-(n+1/2)}(z) from the closed forms, compared with the series.
    Bessel {
        #[arg(long)]
        n: u32,
        #[arg(long, default_value = "+", allow_hyphen_values = true)]
        sign: String,
        /// Comma-separated positive points.
        #[arg(long)]
        z: String,
    },
    /// Run one acceptance suite and write its JSON verdict.
    Suite {
        /// delta-theta, closed-form, theta-map, automorphy, fricke, fe-integral,
        /// fe-half, alpha, sc, bessel or bracket-ratio.
        name: String,
    },
    /// Run several suites (all by default) concurrently.
    Run { names: Vec<String> },
}

fn dispatch(cli: &Cli, cfg: &RunConfig) -> CmdResult {
    match &cli.cmd {
        Cmd::Theta { kind, chi, t, .. } => commands::theta(kind, chi, *t, cfg),
        Cmd::Delta { a, k, psi0, psi1, input, closed_form, .. } => commands::delta(
            &DeltaArgs { a, k, psi0, psi1, input, closed_form: *closed_form },
            cfg,
        ),
        Cmd::Rc { n, k, l, f, g, .. } => commands::rc(*n, k, l, f, g, cfg),
        Cmd::Selberg { k, f, .. } => commands::selberg(*k, f, cfg),
        Cmd::Verify { input, meta, fricke, g, pairs, c_max } => commands::verify(
            &VerifyArgs { input, meta, fricke: *fricke, g: g.as_deref(), pairs: *pairs, c_max: *c_max },
            cfg,
        ),
        Cmd::Lseries { input, chi, phi, out } => commands::lseries(input, chi, phi, out.as_deref(), cfg),
        Cmd::Fe { f, g, meta, chi, phi, g_factor } => {
            commands::fe(&FeArgs { f, g, meta, chi, phi, g_factor }, cfg)
        }
        Cmd::Sc { params, h, p_grid, phi, inversion } => commands::sc(params, h, p_grid, phi, inversion, cfg),
        Cmd::Bessel { n, sign, z } => commands::bessel(*n, sign, z, cfg),
        Cmd::Suite { name } => commands::suite(name, cfg),
        Cmd::Run { names } => commands::run(names, cfg),
    }
}

fn command_name(cmd: &Cmd) -> &'static str {
    match cmd {
        Cmd::Theta { .. } => "theta",
        Cmd::Delta { .. } => "delta",
        Cmd::Rc { .. } => "rc",
        Cmd::Selberg { .. } => "selberg",
        Cmd::Verify { .. } => "verify",
        Cmd::Lseries { .. } => "lseries",
        Cmd::Fe { .. } => "fe",
        Cmd::Sc { .. } => "sc",
        Cmd::Bessel { .. } => "bessel",
        Cmd::Suite { .. } => "suite",
        Cmd::Run { .. } => "run",
    }
}

fn series_out(cmd: &Cmd) -> Option<PathBuf> {
    match cmd {
        Cmd::Theta { out, .. } | Cmd::Delta { out, .. } | Cmd::Rc { out, .. } | Cmd::Selberg { out, .. } => {
            Some(out.clone().unwrap_or_else(stdout_path))
        }
        _ => None,
    }
}

fn execute(cli: &Cli) -> Result<i32, Failure> {
    let over = RunConfig { prec: cli.prec, tol: cli.tol, seed: cli.seed, json: cli.json.clone() };
    over.validate().map_err(Failure::usage)?;
    let cfg = match &cli.config {
        Some(p) => RunConfig::load(p).map_err(Failure::usage)?.merged(over),
        None => over,
    };
    let out = dispatch(cli, &cfg)?;
    let name = command_name(&cli.cmd);
    // suites and batch runs report on stdout unless told otherwise
    let json_path = cfg.json.clone().or_else(|| matches!(name, "suite" | "run").then(stdout_path));
    let mut stdout_used = false;
    if let (Some(text), Some(path)) = (&out.series, series_out(&cli.cmd)) {
        stdout_used |= path == stdout_path();
        emit(&path, text)?;
    }
    if let Some(path) = &json_path {
        let report = if matches!(name, "suite") {
            out.result.clone()
        } else {
            json!({ "schema": REPORT_SCHEMA, "command": name, "config": cfg, "pass": out.pass, "result": out.result })
        };
        let mut text = serde_json::to_string_pretty(&report).expect("report serializes");
        text.push('\n');
        stdout_used |= *path == stdout_path();
        emit(path, &text)?;
    }
    if stdout_used {
        eprintln!("{}", out.text);
    } else {
        println!("{}", out.text);
    }
    Ok(out.code.unwrap_or(if out.pass { 0 } else { 1 }))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        // help and version exit 0, usage errors 2
        Err(e) => e.exit(),
    };
    // deep recursion in the big-number routines wants a larger stack
    let worker = std::thread::Builder::new()
        .stack_size(64 << 20)
        .spawn(move || catch_unwind(AssertUnwindSafe(|| execute(&cli))))
        .expect("spawn worker");
    let code = match worker.join() {
        Ok(Ok(Ok(code))) => code,
        Ok(Ok(Err(f))) => {
            eprintln!("bolhalf: {}", f.msg);
            f.code
        }
        _ => {
            eprintln!("bolhalf: internal error");
            3
        }
    };
    ExitCode::from(code as u8)
}
