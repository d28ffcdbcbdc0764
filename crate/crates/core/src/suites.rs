//! Named end-to-end verification suites, one per acceptance criterion.
//!
//! Every suite returns a [`Verdict`] that embeds the configuration, seeds,
//! working precisions and tolerances it ran with. Numerical failures become
//! failed checks carrying the error text, so a verdict is always produced.

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::arith::{rat, with_prec, Cx, MpC, MpReal, Real, C64};
use crate::bol_ops::{bracket_ratio, delta0_closed_form, delta_a, selberg_lift, theta_map_half, ProportionalityReport};
use crate::characters::{characters_mod, DirichletCharacter};
use crate::error::{Error, Result};
use crate::forms::{FormMeta, HalfWeight};
use crate::lseries::alpha::{alpha_apply, alpha_multiplier, AlphaMode, AlphaOutput, AlphaTime, HFunction};
use crate::lseries::bessel::{bessel_half, bessel_series, Sign};
use crate::lseries::sc::{real_grid, sc_residual, Inversion, ScOptions, ScParams};
use crate::lseries::{fe_residual, laplace_gk, lseries_value, lseries_with_image, LOptions, LValue, TestFunction};
use crate::modular_verify::{automorphy_residual, fricke_points, fricke_relation, sample_pairs, GroupElement};
use crate::qseries::{delta_cusp, delta_inverse, QSeries};
use crate::thetas::{enumerate_serre_stark, fricke_theta_constants, theta_series, ThetaContext, ThetaKind};

pub const SCHEMA: &str = "bolhalf.suite/1";

/// Suite names with their criterion number and a one-line title.
pub const SUITES: [(&str, u32, &str); 11] = [
    ("delta-theta", 1, "delta_a of theta0 is theta1 through q^500"),
    ("closed-form", 2, "closed-form expansion equals delta_0"),
    ("theta-map", 3, "theta map on the Serre-Stark basis of M_{1/2}(100, chi_5)"),
    ("automorphy", 4, "automorphy of theta0, theta1 and the Selberg lift of Delta"),
    ("fricke", 5, "Fricke relations for theta series"),
    ("fe-integral", 6, "functional equation for Delta"),
    ("fe-half", 7, "functional equation for theta0 and a weakly holomorphic form"),
    ("alpha", 8, "alpha_D time domain against multiplier, and the multiplier identity for L-series"),
    ("sc", 9, "sufficient-condition explorer"),
    ("bessel", 10, "half-integer order Bessel closed forms"),
    ("bracket-ratio", 11, "proportionality constant of delta_{2/3}^{3/2}(F) and [theta1, f(4.)]_1"),
];

#[derive(Clone, Debug, Serialize)]
pub struct SuiteConfig {
    /// Working precision for multiprecision evaluation; checks that need more
    /// raise it and record the value they used.
    pub prec_bits: u32,
    /// Base seed; each check adds a fixed offset.
    pub seed: u64,
    /// Replaces every numerical tolerance when set.
    pub tol: Option<f64>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig { prec_bits: 128, seed: 0, tol: None }
    }
}

impl SuiteConfig {
    fn tol(&self, default: f64) -> f64 {
        self.tol.unwrap_or(default)
    }

    fn seed(&self, offset: u64) -> u64 {
        self.seed.wrapping_add(offset)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub measured: Option<f64>,
    pub tolerance: Option<f64>,
    pub prec_bits: Option<u32>,
    pub seed: Option<u64>,
    pub detail: String,
    /// Set when the check could not be evaluated.
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub data: Option<serde_json::Value>,
    /// Wall-clock seconds; kept out of the JSON so reports stay reproducible.
    #[serde(skip)]
    pub seconds: f64,
}

impl Check {
    fn new(name: impl Into<String>, pass: bool) -> Self {
        Check {
            name: name.into(),
            pass,
            measured: None,
            tolerance: None,
            prec_bits: None,
            seed: None,
            detail: String::new(),
            error: None,
            data: None,
            seconds: 0.0,
        }
    }

    /// Passes iff `measured < tol`.
    fn below(name: impl Into<String>, measured: f64, tol: f64) -> Self {
        let mut c = Check::new(name, measured < tol);
        c.measured = Some(measured);
        c.tolerance = Some(tol);
        c
    }

    fn prec(mut self, bits: u32) -> Self {
        self.prec_bits = Some(bits);
        self
    }

    fn seeded(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    fn detail(mut self, d: impl Into<String>) -> Self {
        self.detail = d.into();
        self
    }

    fn data(mut self, v: &impl Serialize) -> Self {
        self.data = serde_json::to_value(v).ok();
        self
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Verdict {
    pub schema: &'static str,
    pub suite: String,
    pub criterion: u32,
    pub title: String,
    pub config: SuiteConfig,
    pub pass: bool,
    /// Some check failed to evaluate rather than failing its comparison.
    pub infrastructure_failure: bool,
    pub checks: Vec<Check>,
    #[serde(skip)]
    pub seconds: f64,
}

impl Verdict {
    /// 0 pass, 1 check failure, 3 evaluation failure.
    pub fn exit_code(&self) -> i32 {
        if self.infrastructure_failure {
            3
        } else if self.pass {
            0
        } else {
            1
        }
    }
}

/// Run `body`, turning errors and panics into a failed check.
fn guarded(name: &str, body: impl FnOnce() -> Result<Vec<Check>>) -> Vec<Check> {
    let start = Instant::now();
    let out = match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(v)) => v,
        Ok(Err(e)) => vec![failed(name, e.to_string())],
        Err(p) => {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            vec![failed(name, format!("internal error: {msg}"))]
        }
    };
    let secs = start.elapsed().as_secs_f64();
    let n = out.len().max(1) as f64;
    out.into_iter().map(|mut c| {
        c.seconds = secs / n;
        c
    })
    .collect()
}

fn failed(name: &str, msg: String) -> Check {
    let mut c = Check::new(name, false);
    c.error = Some(msg);
    c
}

pub fn run_suite(name: &str, cfg: &SuiteConfig) -> Result<Verdict> {
    let &(suite, criterion, title) = SUITES
        .iter()
        .find(|s| s.0 == name)
        .ok_or_else(|| Error::InvalidArgument(format!("unknown suite '{name}'; known: {}", suite_names().join(", "))))?;
    if cfg.prec_bits < 64 {
        return Err(Error::InvalidArgument(format!("precision must be at least 64 bits, got {}", cfg.prec_bits)));
    }
    if let Some(t) = cfg.tol {
        if !(t > 0.0) {
            return Err(Error::InvalidArgument(format!("tolerance must be positive, got {t}")));
        }
    }
    let start = Instant::now();
    let checks = with_prec(cfg.prec_bits as usize, || match suite {
        "delta-theta" => delta_theta(cfg),
        "closed-form" => closed_form(cfg),
        "theta-map" => theta_map(cfg),
        "automorphy" => automorphy(cfg),
        "fricke" => fricke(cfg),
        "fe-integral" => fe_integral(cfg),
        "fe-half" => fe_half(cfg),
        "alpha" => alpha(cfg),
        "sc" => sc(cfg),
        "bessel" => bessel(cfg),
        _ => bracket_ratio_suite(cfg),
    });
    let infrastructure_failure = checks.iter().any(|c| c.error.is_some());
    Ok(Verdict {
        schema: SCHEMA,
        suite: suite.to_string(),
        criterion,
        title: title.to_string(),
        config: cfg.clone(),
        pass: !checks.is_empty() && checks.iter().all(|c| c.pass),
        infrastructure_failure,
        checks,
        seconds: start.elapsed().as_secs_f64(),
    })
}

pub fn suite_names() -> Vec<&'static str> {
    SUITES.iter().map(|s| s.0).collect()
}

/// Random Laurent series with a nonzero leading coefficient at `q^{-m}`,
/// `0 <= m <= n0`, small rational coefficients, known through `q^{prec-1}`.
pub fn random_laurent(rng: &mut ChaCha8Rng, n0: i64, prec: i64) -> QSeries<BigRational> {
    let start = -rng.gen_range(0..=n0);
    let coeffs = (start..prec)
        .enumerate()
        .map(|(j, _)| if j == 0 { rat(rng.gen_range(1..=9), 1) } else { rat(rng.gen_range(-9..=9), rng.gen_range(1..=3)) })
        .collect();
    QSeries::new(1, start, prec, coeffs)
}

const THETA_PAIRS: [(&str, &str); 3] = [("triv:1", "kron:-4"), ("kron:5", "kron:-3"), ("kron:8", "kron:-8")];

fn delta_theta(_cfg: &SuiteConfig) -> Vec<Check> {
    let mut out = Vec::new();
    for (p0, p1) in THETA_PAIRS {
        out.extend(guarded(&format!("{p0},{p1}"), || {
            let ctx = ThetaContext::parse(p0, p1)?;
            let t0: QSeries<BigRational> = ctx.theta0(501)?;
            let t1: QSeries<BigRational> = ctx.theta1(500)?;
            let target = rat(500, 1);
            let mut v = Vec::new();
            for a in -2..=3 {
                let r = delta_a(&t0, HalfWeight::from_doubled(3), &rat(a, 1), &ctx, Some(&target))?;
                let ok = r.achieved >= target && r.series.truncate(500).agrees_with(&t1) && r.series.prec_units() >= 500;
                v.push(
                    Check::new(format!("psi0={p0} psi1={p1} a={a}"), ok)
                        .detail(format!("exact rationals, output known to q^{}", r.achieved)),
                );
            }
            Ok(v)
        }));
    }
    out
}

fn closed_form(cfg: &SuiteConfig) -> Vec<Check> {
    let seed = cfg.seed(11);
    guarded("closed-form", || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ctx = ThetaContext::parse("kron:5", "kron:-3")?;
        let mut v = Vec::new();
        for doubled in [5, 7, 9] {
            let k = HalfWeight::from_doubled(doubled);
            let (mut agree, mut reach) = (0, i64::MAX);
            for _ in 0..20 {
                let f = random_laurent(&mut rng, 5, 201);
                let direct = delta_a(&f, k, &rat(0, 1), &ctx, None)?.series;
                let closed = delta0_closed_form(&f, k, &ctx)?;
                reach = reach.min(direct.prec_units());
                if direct == closed {
                    agree += 1;
                }
            }
            let ok = agree == 20 && reach >= 200;
            v.push(
                Check::new(format!("k={k}"), ok)
                    .seeded(seed)
                    .detail(format!("{agree}/20 random series identical, both known through q^{}", reach - 1)),
            );
        }
        Ok(v)
    })
}

fn theta_map(_cfg: &SuiteConfig) -> Vec<Check> {
    guarded("theta-map", || {
        let chi5 = DirichletCharacter::parse("kron:5")?;
        let mut basis: Vec<(u64, u64)> =
            enumerate_serre_stark(5, &chi5)?.into_iter().map(|(p, t)| (p.conductor(), t)).collect();
        basis.sort();
        let mut v = vec![Check::new("serre-stark basis of M_{1/2}(100, chi_5)", basis == vec![(1, 5), (5, 1)])
            .detail(format!("(conductor, t) pairs {basis:?}"))];
        let prec = 401;
        let (t5, m5) = theta_series::<BigRational>(ThetaKind::SerreStark, &DirichletCharacter::trivial(1), 5, prec)?;
        let (img5, _) = theta_map_half(&t5, &m5)?;
        v.push(Check::new("(triv, 5) maps to 0", img5.is_zero() && img5.prec_units() >= 400).detail(format!(
            "image known through q^{}",
            img5.prec_units() - 1
        )));
        let (t, meta) = theta_series::<BigRational>(ThetaKind::SerreStark, &chi5, 1, prec)?;
        let (img, tmeta) = theta_map_half(&t, &meta)?;
        let (t1, _) = theta_series::<BigRational>(ThetaKind::Theta1, &chi5.twist_by_minus_one(), 1, prec)?;
        let ok = img.truncate(400) == t1.truncate(400) && img.prec_units() >= 400;
        v.push(Check::new("(chi_5, 1) maps to theta1 with psi1 = chi_5 (-1/.)", ok).detail(format!(
            "exact through q^399 of q^400; image weight {}, level {}",
            tmeta.weight, tmeta.level
        )));
        Ok(v)
    })
}

fn mp_pairs(n: u64, count: usize, seed: u64) -> Vec<(GroupElement, MpC)> {
    sample_pairs(n, 2, count, seed).into_iter().map(|(g, z)| (g, Cx::from_c64(&z))).collect()
}

fn automorphy(cfg: &SuiteConfig) -> Vec<Check> {
    let bits = cfg.prec_bits;
    let mut v = Vec::new();
    let (s0, s1, s2) = (cfg.seed(11), cfg.seed(12), cfg.seed(5));
    let tol = cfg.tol(1e-10);
    v.extend(guarded("theta0 level 4", || {
        let (f, m) = theta_series::<BigRational>(ThetaKind::Theta0, &DirichletCharacter::trivial(1), 1, 2000)?;
        let rep = automorphy_residual(&f, &m, &mp_pairs(4, 20, s0), tol)?;
        let mut c = Check::below("theta0(triv) level 4", rep.max_residual, tol).prec(bits).seeded(s0);
        c.pass = rep.pass && rep.skipped == 0;
        Ok(vec![c.detail(format!("{} admissible pairs, {} skipped", rep.admissible, rep.skipped)).data(&rep)])
    }));
    v.extend(guarded("theta1 level 64", || {
        let (f, m) = theta_series::<BigRational>(ThetaKind::Theta1, &DirichletCharacter::parse("kron:-4")?, 1, 6000)?;
        let rep = automorphy_residual(&f, &m, &mp_pairs(64, 20, s1), tol)?;
        let mut c = Check::below(format!("theta1(chi_-4) level {}", m.level), rep.max_residual, tol).prec(bits).seeded(s1);
        c.pass = rep.pass && rep.skipped == 0 && m.level == 64;
        Ok(vec![c.detail(format!("{} admissible pairs, {} skipped", rep.admissible, rep.skipped)).data(&rep)])
    }));
    let tol8 = cfg.tol(1e-8);
    v.extend(guarded("selberg lift", || {
        let d: QSeries<BigRational> = delta_cusp(500)?;
        let s = selberg_lift(&d, 12)?;
        let rep = automorphy_residual(&s.lift, &s.lift_meta, &mp_pairs(2, 20, s2), tol8)?;
        let mut c = Check::below("S(F) for f = Delta", rep.max_residual, tol8).prec(bits).seeded(s2);
        c.pass = rep.pass && rep.skipped == 0 && s.lift_meta.weight == HalfWeight::integral(24) && s.lift_meta.level == 2;
        Ok(vec![c
            .detail(format!("weight {}, level {}, {} admissible pairs", s.lift_meta.weight, s.lift_meta.level, rep.admissible))
            .data(&rep)])
    }));
    v
}

fn fricke(cfg: &SuiteConfig) -> Vec<Check> {
    let bits = cfg.prec_bits;
    let mut v = Vec::new();
    let (s0, s1) = (cfg.seed(1), cfg.seed(2));
    let tol = cfg.tol(1e-10);
    v.extend(guarded("theta0 W_4", || {
        let (t0, _) = theta_series::<BigRational>(ThetaKind::Theta0, &DirichletCharacter::trivial(1), 1, 600)?;
        let pts: Vec<MpC> = fricke_points(4, 10, s0).iter().map(Cx::from_c64).collect();
        let rep = fricke_relation(&t0, &t0, 4, HalfWeight::from_doubled(1), None, &pts, tol)?;
        let c = rep.derived_constant;
        Ok(vec![Check::below("theta0(triv) | W_4 constant stable over 10 points", rep.spread, tol)
            .prec(bits)
            .seeded(s0)
            .detail(format!("derived constant {:.15} {:+.15}i", c[0], c[1]))
            .data(&rep)])
    }));
    let tol8 = cfg.tol(1e-8);
    for (kind, psi, doubled) in [(ThetaKind::Theta0, "kron:8", 1), (ThetaKind::Theta1, "kron:-8", 3)] {
        v.extend(guarded(&format!("{kind} {psi} W_256"), || {
            let ch = DirichletCharacter::parse(psi)?;
            let (f, _) = theta_series::<BigRational>(kind, &ch, 1, 4000)?;
            let pts: Vec<MpC> = fricke_points(256, 10, s1).iter().map(Cx::from_c64).collect();
            let c = fricke_theta_constants::<MpReal>(&ch, kind)?;
            let rep = fricke_relation(&f, &f, 256, HalfWeight::from_doubled(doubled), Some(&c), &pts, tol8)?;
            let m = rep.max_residual.unwrap_or(f64::INFINITY);
            let mut chk = Check::below(format!("{kind}({psi}) | W_256 = c {kind}"), m, tol8).prec(bits).seeded(s1);
            chk.pass &= rep.pass;
            Ok(vec![chk.detail(format!("c = {:.12} {:+.12}i", c.re.to_f64(), c.im.to_f64())).data(&rep)])
        }));
    }
    v
}

fn bump() -> TestFunction {
    TestFunction::bump(1.0, 2.0).expect("valid support")
}

fn fe_integral(cfg: &SuiteConfig) -> Vec<Check> {
    let bits = cfg.prec_bits;
    let tol = cfg.tol(1e-6);
    let mut v = Vec::new();
    for d in [1u64, 3, 5] {
        v.extend(guarded(&format!("D={d}"), || {
            let delta: QSeries<BigRational> = delta_cusp(160)?;
            let meta = FormMeta::new(HalfWeight::integral(12), 1, DirichletCharacter::trivial(1), 0)?;
            let mut out = Vec::new();
            for chi in characters_mod(d)? {
                let r = fe_residual::<_, MpReal>(&delta, &delta, &Cx::one(), &meta, &chi, &bump(), &LOptions::default(), tol)?;
                out.push(Check::below(format!("Delta, D={d}, chi={chi}"), r.residual, tol).prec(bits).data(&r));
            }
            Ok(out)
        }));
    }
    v
}

fn fe_half(cfg: &SuiteConfig) -> Vec<Check> {
    let bits = cfg.prec_bits;
    let mut v = Vec::new();
    let (s0, s1) = (cfg.seed(5), cfg.seed(9));
    let tol = cfg.tol(1e-6);
    v.extend(guarded("theta0 D=3", || {
        let (t0, meta) = theta_series::<BigRational>(ThetaKind::Theta0, &DirichletCharacter::trivial(1), 1, 600)?;
        let pts: Vec<MpC> = fricke_points(4, 10, s0).iter().map(Cx::from_c64).collect();
        let fit = fricke_relation(&t0, &t0, 4, meta.weight, None, &pts, 1e-10)?;
        let c = Cx::from_f64(fit.derived_constant[0], fit.derived_constant[1]);
        let mut out = vec![Check::below("g = theta0 | W_4 fitted constant spread", fit.spread, 1e-10)
            .prec(bits)
            .seeded(s0)
            .detail(format!("c = {:.15} {:+.15}i", fit.derived_constant[0], fit.derived_constant[1]))];
        for chi in characters_mod(3)? {
            let r = fe_residual::<_, MpReal>(&t0, &t0, &c, &meta, &chi, &bump(), &LOptions::default(), tol)?;
            out.push(Check::below(format!("theta0, N=4, D=3, chi={chi}"), r.residual, tol).prec(bits).data(&r));
        }
        Ok(out)
    }));
    let tol5 = cfg.tol(1e-5);
    let wh_bits = bits.max(320);
    v.extend(guarded("weakly holomorphic", || {
        with_prec(wh_bits as usize, || {
            let n_g = 1100;
            let (t0, meta0) = theta_series::<BigRational>(ThetaKind::Theta0, &DirichletCharacter::trivial(1), 1, n_g)?;
            let dinv: QSeries<BigRational> = delta_inverse(n_g)?;
            let f = t0.truncate(n_g).mul(&dinv.rescale(4))?.truncate(n_g);
            let g = t0.mul(&dinv)?.truncate(n_g);
            let k = HalfWeight::from_doubled(-23);
            let meta = FormMeta::new(k, 4, meta0.character.clone(), 4)?;
            let pts: Vec<MpC> = fricke_points(4, 10, s1).iter().map(Cx::from_c64).collect();
            let fit = fricke_relation(&f, &g, 4, k, None, &pts, 1e-10)?;
            let c = Cx::from_f64(fit.derived_constant[0], fit.derived_constant[1]);
            let reference: MpC = Cx::from_polar(&MpReal::from_i64(4096), &(-MpReal::pi() / MpReal::from_i64(4)));
            let dev = (c.clone() - reference).abs().to_f64() / 4096.0;
            let r = fe_residual::<_, MpReal>(&f, &g, &c, &meta, &DirichletCharacter::trivial(1), &bump(), &LOptions::default(), tol5)?;
            Ok(vec![
                Check::below("transported constant against 2^12 e^{-i pi/4}", dev, 1e-8)
                    .prec(wh_bits)
                    .seeded(s1)
                    .detail(format!("derived {:.6} {:+.6}i, spread {:.1e}", fit.derived_constant[0], fit.derived_constant[1], fit.spread)),
                Check::below("theta0 / Delta(4z), weight -23/2, level 4, D=1", r.residual, tol5).prec(wh_bits).data(&r),
            ])
        })
    }));
    v
}

fn rel(a: &C64, b: &C64) -> f64 {
    let s = a.abs().max(b.abs());
    if s == 0.0 {
        0.0
    } else {
        (a.clone() - b.clone()).abs() / s
    }
}

fn alpha(cfg: &SuiteConfig) -> Vec<Check> {
    let bits = cfg.prec_bits;
    let mut v = Vec::new();
    let (s0, s1) = (cfg.seed(17), cfg.seed(23));
    let tol = cfg.tol(1e-8);
    v.extend(guarded("time domain", || {
        let phi = bump();
        let mut rng = ChaCha8Rng::seed_from_u64(s0);
        let mut out = Vec::new();
        for m in 1..=3i64 {
            let k = HalfWeight::integral(m + 1);
            for d in [1u64, 3] {
                let a = match alpha_apply(&phi, d, k, &HFunction::one(), AlphaMode::TimeDomain)? {
                    AlphaOutput::Time(AlphaTime::Compact(f)) => f,
                    _ => return Err(Error::Convergence("integral k gave a non-compact time-domain image".into())),
                };
                let mut worst: f64 = 0.0;
                for _ in 0..20 {
                    let p = C64::new(rng.gen_range(0.1..4.0), rng.gen_range(-6.0..6.0));
                    let lhs = laplace_gk(&a, &p, 1e-13)?.value;
                    let rhs = alpha_multiplier(&p, d, k, &HFunction::one())? * laplace_gk(&phi, &p, 1e-13)?.value;
                    worst = worst.max(rel(&lhs, &rhs));
                }
                out.push(
                    Check::below(format!("k-1={m}, D={d}, h=1: L((D/2pi)^m phi^(m)) vs multiplier"), worst, tol)
                        .seeded(s0)
                        .detail("20 points, Re p in [0.1, 4), Im p in [-6, 6)"),
                );
            }
        }
        Ok(out)
    }));
    let tol_comp = cfg.tol(1e-11);
    v.extend(guarded("multiplier identity", || {
        let mut rng = ChaCha8Rng::seed_from_u64(s1);
        let hs = [
            HFunction::Ell,
            HFunction::ExpDecay { beta: 0.3 },
            HFunction::Rational { beta: 0.5 },
            HFunction::Trig { amp: 0.4, omega: 1.3 },
            HFunction::Const { re: 0.5, im: -1.0 },
        ];
        let mut out = Vec::new();
        for (i, h) in hs.iter().enumerate() {
            let k = HalfWeight::from_doubled([3, 4, 5, 3, 6][i]);
            let d = [1u64, 3, 5, 7, 3][i];
            let chi = characters_mod(d)?.pop().unwrap_or_else(|| DirichletCharacter::trivial(d));
            let terms: Vec<(i64, MpC)> =
                (1..=40).map(|n| (n, Cx::from_f64(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))).collect();
            let f = QSeries::from_terms(1, 41, terms.clone());
            let kr = MpReal::from_ratio(k.doubled - 2, 2);
            let mut weighted = Vec::with_capacity(terms.len());
            for (n, c) in &terms {
                let hn = h.eval(&Cx::<MpReal>::real(MpReal::from_i64(*n)))?;
                weighted.push((*n, c.clone() * hn.scale(&MpReal::from_i64(*n).powf(&kr))));
            }
            let fw = QSeries::from_terms(1, 41, weighted);
            let img = match alpha_apply(&bump(), d, k, h, AlphaMode::LaplaceDomain)? {
                AlphaOutput::Laplace(a) => a,
                _ => return Err(Error::Convergence("Laplace mode returned a time-domain image".into())),
            };
            let lhs: MpC = lseries_with_image(&f, &chi, |_, p: &MpReal| img.at(&Cx::real(p.clone())))?;
            let rhs: LValue<MpReal> = lseries_value(&fw, &chi, &bump(), &LOptions::default())?;
            let err = (lhs.clone() - rhs.value).abs().to_f64() / lhs.abs().to_f64();
            out.push(
                Check::below(format!("h={h}, k={k}, D={d}, chi={chi}"), err, tol_comp)
                    .prec(bits)
                    .seeded(s1)
                    .detail("40 random complex coefficients"),
            );
        }
        Ok(out)
    }));
    v
}

fn sc_params(k: HalfWeight, h: HFunction) -> ScParams {
    ScParams {
        k,
        n: 4,
        n_prime: 4,
        d: 3,
        chi: DirichletCharacter::trivial(3),
        psi: DirichletCharacter::trivial(4),
        psi_prime: DirichletCharacter::trivial(4),
        lambda: C64::one(),
        h,
    }
}

fn sc(cfg: &SuiteConfig) -> Vec<Check> {
    let mut v = Vec::new();
    let tol = cfg.tol(1e-4);
    for kk in [2, 3, 4] {
        v.extend(guarded(&format!("k={kk}"), || {
            let grid = real_grid(0.5, 5.0, 10);
            let rep = sc_residual(&sc_params(HalfWeight::integral(kk), HFunction::one()), &bump(), &grid, &ScOptions::default())?;
            Ok(vec![Check::below(format!("integral k={kk}, N=N'=4, D=3, h=1, numerical inversion"), rep.max_residual, tol)
                .detail("10 real points in [0.5, 5]")
                .data(&rep)])
        }));
    }
    for h in [HFunction::one(), HFunction::ExpDecay { beta: 0.2 }] {
        for inversion in [Inversion::Exact, Inversion::Numerical] {
            v.extend(guarded(&format!("half-integral h={h}"), || {
                let grid = real_grid(0.5, 5.0, 6);
                let rep = sc_residual(
                    &sc_params(HalfWeight::from_doubled(3), h.clone()),
                    &bump(),
                    &grid,
                    &ScOptions { inversion, ..Default::default() },
                )?;
                // exploratory: only completeness of the landscape is checked
                let complete = rep.records.len() == grid.len() && rep.records.iter().all(|r| r.residual.is_finite());
                let mut c = Check::new(format!("landscape k=3/2, h={h}, {inversion:?} inversion"), complete);
                c.measured = Some(rep.max_residual);
                Ok(vec![c.detail("exploratory, no threshold on the residual").data(&rep)])
            }));
        }
    }
    v
}

fn bessel(cfg: &SuiteConfig) -> Vec<Check> {
    let bits = cfg.prec_bits.max(256);
    let tol = cfg.tol(1e-12);
    guarded("bessel", || {
        with_prec(bits as usize, || {
            let mut out = Vec::new();
            for n in 0..=5u32 {
                for sign in [Sign::Plus, Sign::Minus] {
                    let doubled = if sign == Sign::Plus { 2 * n as i64 + 1 } else { -(2 * n as i64 + 1) };
                    let mut worst: f64 = 0.0;
                    for j in 1..=50 {
                        let z = MpReal::from_ratio(20 * j, 50);
                        let a = bessel_half(n, sign, &z)?;
                        let b = bessel_series(doubled, &z)?;
                        let s = a.abs().to_f64().max(b.abs().to_f64());
                        worst = worst.max((a - b).abs().to_f64() / s);
                    }
                    out.push(
                        Check::below(format!("J_{{{}{}/2}}", if doubled < 0 { "-" } else { "" }, doubled.abs()), worst, tol)
                            .prec(bits)
                            .detail("50 points z = 0.4 j, relative to the ascending series"),
                    );
                }
            }
            Ok(out)
        })
    })
}

fn bracket_ratio_suite(cfg: &SuiteConfig) -> Vec<Check> {
    let seed = cfg.seed(35);
    let tol = cfg.tol(1e-10);
    guarded("bracket-ratio", || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ctx = ThetaContext::parse("triv:1", "kron:-4")?;
        let mut reports = Vec::new();
        for _ in 0..2 {
            let f = random_laurent(&mut rng, 2, 12);
            let (r, n) = bracket_ratio(&f, &ctx)?;
            reports.push((r, n));
        }
        let mut out = Vec::new();
        for (i, (r, n)) in reports.iter().enumerate() {
            out.push(
                Check::new(format!("input {} is proportional", i + 1), r.is_some())
                    .seeded(seed)
                    .detail(format!("{n} nonzero coefficients compared"))
                    .data(&ProportionalityReport::from_ratio(r.as_ref(), *n)),
            );
        }
        let (a, b) = (&reports[0].0, &reports[1].0);
        let diff = match (a, b) {
            (Some(a), Some(b)) => {
                let d = (a - b).to_f64().unwrap_or(f64::INFINITY).abs();
                d / a.to_f64().unwrap_or(1.0).abs().max(f64::MIN_POSITIVE)
            }
            _ => f64::INFINITY,
        };
        let rep = ProportionalityReport::from_ratio(a.as_ref(), reports[0].1);
        out.push(Check::below("ratio independent of f", diff, tol).seeded(seed).detail(format!(
            "computed constant {:.12}i (series ratio {}), printed 3/(pi i) = {:.12}i",
            rep.constant_im, rep.series_ratio, -3.0 / PI
        )));
        Ok(out)
    })
}
