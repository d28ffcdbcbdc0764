//! L-series of weakly holomorphic forms evaluated on test functions, their
//! functional equations, the `alpha_D` operator, the explorer for the
//! sufficient condition on `h`, and half-integer order Bessel functions.
//!
//! `L_f(chi, phi) = sum_{n >= -n0} c_n tau_{conj chi}(n) (L phi)(2 pi n / D)`.

pub mod alpha;
pub mod bessel;
pub mod laplace;
pub mod quad;
pub mod sc;
pub mod testfn;

use serde::Serialize;

use crate::arith::{Coeff, Cx, Real};
use crate::characters::{eps, DirichletCharacter};
use crate::error::{Error, Result};
use crate::forms::{FormMeta, HalfWeight};
use crate::qseries::{fit_tail, QSeries};

pub use laplace::{l1_norm, laplace, laplace_gk, LaplaceGrid};
pub use testfn::TestFunction;

#[derive(Clone, Copy, Debug, Serialize)]
pub struct LOptions {
    /// Agreement required between successive quadrature levels of the sum.
    pub rel_tol: f64,
    /// Allowed certified tail, relative to the value.
    pub tail_tol: f64,
    pub min_level: u32,
    pub max_level: u32,
}

impl Default for LOptions {
    fn default() -> Self {
        LOptions { rel_tol: 1e-12, tail_tol: 1e-12, min_level: 4, max_level: 11 }
    }
}

/// Convergence certificate for the omitted terms `n >= n_max`.
#[derive(Clone, Debug, Serialize)]
pub struct Certificate {
    pub n_max: i64,
    /// `D ||phi||_1 sum_{n >= n_max} A e^{C sqrt n} e^{-2 pi n a / D}` from the tail fit.
    pub tail_bound: f64,
    pub relative_tail: f64,
    /// Truncation that would meet the tolerance, when one exists.
    pub required_n_max: Option<f64>,
    pub tol: f64,
    pub pass: bool,
    pub heuristic: bool,
}

#[derive(Clone, Debug)]
pub struct LValue<R: Real> {
    pub value: Cx<R>,
    /// `sum |c_n tau(n) (L phi)(2 pi n / D)|`, the cancellation scale.
    pub abs_sum: f64,
    pub terms: usize,
    pub level: u32,
    pub level_change: f64,
    pub certificate: Certificate,
}

/// The certificate alone: checks the tail model of `f` against the left
/// support endpoint of `phi`.
pub fn certificate<C: Coeff>(f: &QSeries<C>, d: u64, phi: &TestFunction, l1: f64, scale: f64, tol: f64) -> Certificate {
    let (a, _) = phi.support();
    let y = a / d as f64;
    let fit = fit_tail(f);
    let n_max = f.prec_units();
    let factor = d as f64 * l1;
    let tail = factor * fit.tail_bound(n_max as f64, y, 1);
    let relative = tail / scale.max(f64::MIN_POSITIVE);
    let required = fit.required_precision(y, 1, tol * scale / factor.max(f64::MIN_POSITIVE));
    Certificate {
        n_max,
        tail_bound: tail,
        relative_tail: relative,
        required_n_max: required,
        tol,
        pass: relative <= tol,
        heuristic: true,
    }
}

/// `L_f(chi, phi)` over the stored coefficients of `f` (integer exponents).
///
/// The Laplace values come from one tanh-sinh rule shared by all `n`; the
/// rule is refined until the whole sum is stable. A failed certificate is an
/// error naming the required truncation.
pub fn lseries_value<C: Coeff, R: Real>(
    f: &QSeries<C>,
    chi: &DirichletCharacter,
    phi: &TestFunction,
    opts: &LOptions,
) -> Result<LValue<R>> {
    let v = lseries_value_uncertified(f, chi, phi, opts)?;
    if !v.certificate.pass {
        return Err(Error::Convergence(format!(
            "L-series tail {:e} (relative {:e}) exceeds {:e} at n_max = {}; required n_max = {}",
            v.certificate.tail_bound,
            v.certificate.relative_tail,
            opts.tail_tol,
            v.certificate.n_max,
            v.certificate.required_n_max.map_or("none (series diverges on this support)".into(), |n| format!("{n}"))
        )));
    }
    Ok(v)
}

/// As [`lseries_value`] but returns a failed certificate instead of an error.
pub fn lseries_value_uncertified<C: Coeff, R: Real>(
    f: &QSeries<C>,
    chi: &DirichletCharacter,
    phi: &TestFunction,
    opts: &LOptions,
) -> Result<LValue<R>> {
    let coeffs: Vec<(i64, Cx<R>)> = integer_terms(f)?;
    let taus = twist_table::<R>(chi);
    let d = chi.modulus();
    lseries_from_terms(&coeffs, d, &taus, phi, opts, |l1, scale| certificate(f, d, phi, l1, scale, opts.tail_tol))
}

pub(crate) fn integer_terms<C: Coeff, R: Real>(f: &QSeries<C>) -> Result<Vec<(i64, Cx<R>)>> {
    if f.denom() != 1 {
        let g = f.coarsen();
        if g.denom() != 1 {
            return Err(Error::InvalidArgument("L-series need integer exponents".into()));
        }
        return integer_terms(&g);
    }
    Ok(f.terms().map(|(e, c)| (e, c.to_cx::<R>())).collect())
}

/// `tau_{conj chi}(r)` for `r = 0..D`.
pub fn twist_table<R: Real>(chi: &DirichletCharacter) -> Vec<Cx<R>> {
    let c = chi.conj();
    (0..chi.modulus() as i64).map(|r| c.gauss_sum::<R>(r)).collect()
}

pub(crate) fn lseries_from_terms<R: Real>(
    terms: &[(i64, Cx<R>)],
    d: u64,
    taus: &[Cx<R>],
    phi: &TestFunction,
    opts: &LOptions,
    cert: impl Fn(f64, f64) -> Certificate,
) -> Result<LValue<R>> {
    let l1: f64 = l1_norm::<R>(phi, 1e-10)?.to_f64();
    if terms.is_empty() {
        return Ok(LValue {
            value: Cx::zero(),
            abs_sum: 0.0,
            terms: 0,
            level: 0,
            level_change: 0.0,
            certificate: cert(l1, f64::MIN_POSITIVE),
        });
    }
    let lo = terms.first().map(|t| t.0).unwrap_or(0);
    let hi = terms.last().map(|t| t.0).unwrap_or(0);
    let step = R::from_i64(2) * R::pi() / R::from_i64(d as i64);
    let weights: Vec<(usize, Cx<R>)> = terms
        .iter()
        .filter_map(|(n, c)| {
            let t = taus[n.rem_euclid(d as i64) as usize].clone();
            if t.is_zero() || c.is_zero() {
                None
            } else {
                Some(((n - lo) as usize, c.clone() * t))
            }
        })
        .collect();
    let sum_at = |level: u32| -> (Cx<R>, f64) {
        let lap = LaplaceGrid::<R>::new(phi, level).values(&step, lo, hi);
        let mut s = Cx::zero();
        let mut abs = 0.0;
        for (i, w) in &weights {
            let t = w.scale(&lap[*i]);
            abs += t.abs().to_f64();
            s = s + t;
        }
        (s, abs)
    };
    let eps = R::epsilon().to_f64();
    let (mut prev, _) = sum_at(opts.min_level);
    for level in opts.min_level + 1..=opts.max_level {
        let (cur, abs) = sum_at(level);
        let change = (cur.clone() - prev.clone()).abs().to_f64();
        let scale = cur.abs().to_f64().max(abs * eps * 1e3);
        if change <= opts.rel_tol * scale {
            let certificate = cert(l1, cur.abs().to_f64().max(abs * eps));
            return Ok(LValue { value: cur, abs_sum: abs, terms: weights.len(), level, level_change: change, certificate });
        }
        prev = cur;
    }
    Err(Error::Convergence(format!("L-series quadrature did not stabilize by level {}", opts.max_level)))
}

/// `L` against an arbitrary Laplace-side function `p -> G(p)`, i.e.
/// `sum c_n tau(n) G(2 pi n / D)`; used for the multiplier representation of
/// `alpha_D`.
pub fn lseries_with_image<C: Coeff, R: Real>(
    f: &QSeries<C>,
    chi: &DirichletCharacter,
    image: impl Fn(i64, &R) -> Result<Cx<R>>,
) -> Result<Cx<R>> {
    let terms: Vec<(i64, Cx<R>)> = integer_terms(f)?;
    let taus = twist_table::<R>(chi);
    let d = chi.modulus() as i64;
    let step = R::from_i64(2) * R::pi() / R::from_i64(d);
    let mut s = Cx::zero();
    for (n, c) in terms {
        let t = taus[n.rem_euclid(d) as usize].clone();
        if t.is_zero() || c.is_zero() {
            continue;
        }
        s = s + c * t * image(n, &(step.clone() * R::from_i64(n)))?;
    }
    Ok(s)
}

/// The constant and the `g`-side twist of the functional equation:
/// `i^k chi(-N) psi(D) / N^{k/2-1}` with twist `conj chi` for integral `k`, and
/// `i^k psi_D(-1)^{k-1/2} psi_D(N) chi(-N) psi(D) / (eps_D N^{k/2-1})` with
/// twist `conj chi psi_D` for half-integral `k`.
pub fn fe_constant<R: Real>(meta: &FormMeta, chi: &DirichletCharacter) -> Result<(Cx<R>, DirichletCharacter)> {
    let d = chi.modulus();
    let n = meta.level;
    if num_integer::gcd(d, n) != 1 {
        return Err(Error::InvalidArgument(format!("gcd(D, N) = gcd({d}, {n}) must be 1")));
    }
    let k = meta.weight;
    let kr = R::from_ratio(k.doubled, 2);
    let i_k = Cx::cis(&(R::pi() * kr.clone() / R::from_i64(2)));
    let n_pow = R::from_i64(n as i64).powf(&(R::one() - kr / R::from_i64(2)));
    let common = i_k * chi.value_cx::<R>(-(n as i64)) * meta.character.value_cx::<R>(d as i64);
    if k.is_integral() {
        return Ok((common.scale(&n_pow), chi.conj()));
    }
    let psi_d = DirichletCharacter::psi_d(d as i64)?;
    let e = (k.doubled - 1) / 2;
    let sign_m1 = psi_d.value_sign(-1).unwrap_or(0);
    let sign = if e.rem_euclid(2) == 0 { 1 } else { sign_m1 } * psi_d.value_sign(n as i64).unwrap_or(0);
    let eps_d = eps(d as i64)?.to_cx::<R>();
    let c = common.scale(&(n_pow * R::from_i64(sign))) / eps_d;
    Ok((c, chi.conj().product(&psi_d)))
}

#[derive(Clone, Debug, Serialize)]
pub struct FeReport {
    pub weight: String,
    pub level: u64,
    pub d: u64,
    pub chi: String,
    pub g_twist: String,
    pub phi: String,
    pub lhs: [f64; 2],
    pub rhs: [f64; 2],
    pub constant: [f64; 2],
    pub residual: f64,
    pub tol: f64,
    pub pass: bool,
    pub lhs_certificate: Certificate,
    pub rhs_certificate: Certificate,
}

fn pair<R: Real>(z: &Cx<R>) -> [f64; 2] {
    [z.re.to_f64(), z.im.to_f64()]
}

/// Both sides of the functional equation for `f` and `g = g_factor * g_series`
/// (`g = f|_k W_N`), with relative residual `|LHS - RHS| / max(|LHS|, |RHS|)`.
#[allow(clippy::too_many_arguments)]
pub fn fe_residual<C: Coeff, R: Real>(
    f: &QSeries<C>,
    g: &QSeries<C>,
    g_factor: &Cx<R>,
    meta: &FormMeta,
    chi: &DirichletCharacter,
    phi: &TestFunction,
    opts: &LOptions,
    tol: f64,
) -> Result<FeReport> {
    let (c, twist) = fe_constant::<R>(meta, chi)?;
    let phi_w = phi.fricke(meta.weight.dual(), meta.level)?;
    let lhs = lseries_value::<C, R>(f, chi, phi, opts)?;
    let rhs_g = lseries_value::<C, R>(g, &twist, &phi_w, opts)?;
    let rhs = c.clone() * g_factor.clone() * rhs_g.value.clone();
    let s = lhs.value.abs().to_f64().max(rhs.abs().to_f64());
    let residual = if s == 0.0 { 0.0 } else { (lhs.value.clone() - rhs.clone()).abs().to_f64() / s };
    Ok(FeReport {
        weight: meta.weight.to_string(),
        level: meta.level,
        d: chi.modulus(),
        chi: chi.to_string(),
        g_twist: twist.to_string(),
        phi: phi.to_string(),
        lhs: pair(&lhs.value),
        rhs: pair(&rhs),
        constant: pair(&c),
        residual,
        tol,
        pass: residual < tol,
        lhs_certificate: lhs.certificate,
        rhs_certificate: rhs_g.certificate,
    })
}

/// `(phi|_k W_M)` as a test function.
pub fn testfn_fricke(phi: &TestFunction, k: HalfWeight, m: u64) -> Result<TestFunction> {
    phi.fricke(k, m)
}
