//! The classical Bol operator, the `delta_a` family, its closed-form
//! expansion, the weight-1/2 theta map, Rankin-Cohen brackets and the
//! Selberg lift.
//!
//! `D = q d/dq` throughout; the factors of `2 pi i` separating `D` from
//! `d/dz` are carried as an integer tag where they matter.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

pub use crate::forms::HalfWeight;

use crate::arith::{rat, Coeff};
use crate::characters::{is_square, isqrt, kronecker, DirichletCharacter};
use crate::error::{Error, Result};
use crate::forms::FormMeta;
use crate::qseries::QSeries;
use crate::thetas::{theta_series, ThetaContext, ThetaKind};

/// `D^{k-1}` for integral `k >= 1`: weight `2 - k` to weight `k`.
pub fn classical_bol<C: Coeff>(f: &QSeries<C>, k: HalfWeight) -> Result<QSeries<C>> {
    let k = k.integer()?;
    if k < 1 {
        return Err(Error::InvalidArgument(format!("classical Bol needs k >= 1, got {k}")));
    }
    Ok(f.bol((k - 1) as u32))
}

/// `k - 3/2` as a nonnegative integer.
fn bol_order(k: HalfWeight) -> Result<u32> {
    if k.is_integral() || k.doubled < 3 {
        return Err(Error::InvalidArgument(format!("k - 3/2 must be a nonnegative integer, got k = {k}")));
    }
    Ok(((k.doubled - 3) / 2) as u32)
}

/// Output of [`delta_a`].
#[derive(Clone, Debug)]
pub struct DeltaOutput<C> {
    pub series: QSeries<C>,
    /// Precision the caller asked for.
    pub requested: BigRational,
    /// Precision actually delivered (never more than the propagation rules allow).
    pub achieved: BigRational,
}

/// How the inner product of [`delta_a`] is formed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Grouping {
    /// `D^m((theta0^{1-3a} theta1^a) f)`.
    ThetaFirst,
    /// `D^m(theta0^{1-3a} (theta1^a f))`.
    InputFirst,
    /// `sum_j C(m, j) D^j(theta0^{1-3a} theta1^a) D^{m-j} f`.
    Leibniz,
}

struct ThetaPowers<C> {
    inner: QSeries<C>,
    t0: QSeries<C>,
    t1: QSeries<C>,
    outer: QSeries<C>,
}

fn theta_powers<C: Coeff>(ctx: &ThetaContext, a: &BigRational, rel: i64) -> Result<ThetaPowers<C>> {
    let v0 = theta0_valuation(ctx);
    let t0: QSeries<C> = ctx.theta0(v0 + rel.max(1))?;
    let t1: QSeries<C> = ctx.theta1(1 + rel.max(1))?;
    let three_a = a * rat(3, 1);
    let p0_in = rat(1, 1) - &three_a;
    let p0_out = &three_a - rat(2, 1);
    let p1_out = rat(1, 1) - a;
    let t0_in = t0.pow(&p0_in)?;
    let t1_in = t1.pow(a)?;
    let outer = t0.pow(&p0_out)?.mul(&t1.pow(&p1_out)?)?;
    Ok(ThetaPowers { inner: t0_in.mul(&t1_in)?, t0: t0_in, t1: t1_in, outer })
}

fn theta0_valuation(ctx: &ThetaContext) -> i64 {
    // psi0(0) contributes only for the trivial character mod 1.
    if ctx.psi0.modulus() == 1 {
        0
    } else {
        1
    }
}

/// `delta_a^{k-1}(f) = theta0^{3a-2} theta1^{1-a} D^{k-3/2}(theta0^{1-3a} theta1^a f)`.
///
/// The theta powers are built to the relative precision of `f`, which is
/// exactly what the product rules can use; the output is truncated to
/// `prec` if that is lower. Rational `a` produces Puiseux series.
pub fn delta_a<C: Coeff>(
    f: &QSeries<C>,
    k: HalfWeight,
    a: &BigRational,
    ctx: &ThetaContext,
    prec: Option<&BigRational>,
) -> Result<DeltaOutput<C>> {
    delta_a_grouped(f, k, a, ctx, prec, Grouping::ThetaFirst)
}

pub fn delta_a_grouped<C: Coeff>(
    f: &QSeries<C>,
    k: HalfWeight,
    a: &BigRational,
    ctx: &ThetaContext,
    prec: Option<&BigRational>,
    grouping: Grouping,
) -> Result<DeltaOutput<C>> {
    let m = bol_order(k)?;
    let rel_rat = f.precision() - f.valuation();
    let rel = rel_rat.ceil().to_integer().to_i64().ok_or_else(|| Error::InvalidArgument("precision overflow".into()))?;
    let v0 = theta0_valuation(ctx);
    // valuation of theta0^{1-3a} theta1^a times theta0^{3a-2} theta1^{1-a}
    let v_shift = rat(1 - v0, 1);
    let ceiling = f.precision() + &v_shift;
    let requested = prec.cloned().unwrap_or_else(|| ceiling.clone());
    if f.is_zero() {
        let p = requested.clone().min(ceiling);
        let units = (&p * BigRational::from_integer(BigInt::from(f.denom()))).floor().to_integer().to_i64().unwrap_or(0);
        let achieved = QSeries::<C>::zero(f.denom(), units).precision();
        return Ok(DeltaOutput { series: QSeries::zero(f.denom(), units), requested, achieved });
    }
    let th = theta_powers::<C>(ctx, a, rel)?;
    let d = match grouping {
        Grouping::ThetaFirst => th.inner.mul(f)?.bol(m),
        Grouping::InputFirst => th.t0.mul(&th.t1.mul(f)?)?.bol(m),
        Grouping::Leibniz => {
            let mut acc: Option<QSeries<C>> = None;
            for j in 0..=m {
                let binom = BigRational::from_integer(num_integer::binomial(BigInt::from(m), BigInt::from(j)));
                let term = th.inner.bol(j).mul(&f.bol(m - j))?.scale_rational(&binom);
                acc = Some(match acc {
                    None => term,
                    Some(s) => s.add(&term)?,
                });
            }
            acc.expect("m + 1 >= 1 terms")
        }
    };
    let out = th.outer.mul(&d)?.coarsen();
    let out = out.truncate_at(&requested);
    let expected_valuation = f.valuation() + &v_shift;
    if out.precision() <= expected_valuation {
        return Err(Error::PrecisionStarvation(format!(
            "output precision {} does not exceed the valuation {expected_valuation}; supply f to a higher precision",
            out.precision()
        )));
    }
    let achieved = out.precision();
    Ok(DeltaOutput { series: out, requested, achieved })
}

/// Metadata of `delta_a^{k-1}(f)`: weight `k`, level of the context, character
/// `psi (-1/.) psi1 / psi0` where `psi` is the character of `f`.
pub fn delta_meta(f_char: &DirichletCharacter, k: HalfWeight, ctx: &ThetaContext, pole_order: u64) -> Result<FormMeta> {
    if !ctx.psi0.is_real() || !ctx.psi1.is_real() {
        return Err(Error::OutOfContract(
            "the character of delta_a is only pinned down for real psi0, psi1".into(),
        ));
    }
    let chi = f_char.twist_by_minus_one().product(&ctx.psi1).product(&ctx.psi0.conj());
    let level = ctx.level.lcm(&chi.modulus());
    FormMeta::new(k, level, chi, pole_order)
}

/// Pole order of a series with integer or fractional exponents.
pub fn pole_order<C: Coeff>(f: &QSeries<C>) -> u64 {
    if f.is_zero() {
        return 0;
    }
    let v = f.valuation();
    if v.is_negative() {
        (-v.floor()).to_integer().to_u64().unwrap_or(u64::MAX)
    } else {
        0
    }
}

/// `theta1 / theta0^2 = sum_{n >= -1} a_n q^n` with absolute precision `prec`.
pub fn theta_ratio<C: Coeff>(ctx: &ThetaContext, prec: i64) -> Result<QSeries<C>> {
    if ctx.psi0.is_trivial() {
        return Err(Error::InvalidArgument("theta1/theta0^2 needs a nontrivial psi0".into()));
    }
    // theta0 has valuation 1, so relative precision prec + 1 suffices.
    let r = prec + 1;
    let t0: QSeries<C> = ctx.theta0(1 + r)?;
    let t1: QSeries<C> = ctx.theta1(1 + r)?;
    Ok(t1.mul(&t0.pow(&rat(-2, 1))?)?.truncate(prec))
}

/// The explicit expansion of `delta_0^{k-1}(f)`: the coefficient of `q^n` is
/// `sum_l c_l sum_{m=1}^{n+1-l} (l+m)^{k-3/2} psi0(sqrt m) a_{n-l-m}`.
pub fn delta0_closed_form<C: Coeff>(f: &QSeries<C>, k: HalfWeight, ctx: &ThetaContext) -> Result<QSeries<C>> {
    let e = bol_order(k)?;
    if ctx.psi0.is_trivial() {
        return Err(Error::InvalidArgument("the closed form needs a nontrivial psi0".into()));
    }
    let f = f.coarsen();
    if f.denom() != 1 {
        return Err(Error::InvalidArgument("the closed form needs integer exponents".into()));
    }
    let pf = f.prec_units();
    if f.is_zero() {
        return Ok(QSeries::zero(1, pf));
    }
    let vf = f.start();
    // a_j is needed for j <= pf - 1 - vf - 1.
    let a = theta_ratio::<C>(ctx, pf - vf - 1)?;
    let psi_sqrt: Vec<C> = (0..=(pf - vf + 1).max(1))
        .map(|m| {
            if m >= 1 && is_square(m as u64) {
                ctx.psi0.value_coeff::<C>(isqrt(m as u64) as i64)
            } else {
                Ok(C::zero())
            }
        })
        .collect::<Result<_>>()?;
    let mut coeffs = Vec::with_capacity((pf - vf) as usize);
    for n in vf..pf {
        let mut acc = C::zero();
        for (l, c) in f.terms() {
            if l > n {
                break;
            }
            for m in 1..=(n + 1 - l) {
                let s = &psi_sqrt[m as usize];
                if s.is_zero() {
                    continue;
                }
                let aj = a.coeff(n - l - m);
                if aj.is_zero() {
                    continue;
                }
                let w = BigRational::from_integer(num_traits::pow(BigInt::from(l + m), e as usize));
                acc.add_assign(&c.mul(s).mul(&aj).mul_rational(&w));
            }
        }
        coeffs.push(acc);
    }
    Ok(QSeries::new(1, vf, pf, coeffs))
}

/// `ell(n) = (-1/sqrt n)` on perfect squares, `0` elsewhere, `ell(0) = 0`.
///
/// `(-1/.)` is the character mod 4, so `ell` also vanishes at even square
/// roots; this is what makes `theta_{psi0,1}` map onto `theta_1` with
/// `psi1 = psi0 (-1/.)`.
pub fn ell(n: u64) -> i64 {
    if n == 0 || !is_square(n) {
        return 0;
    }
    let r = isqrt(n) as i64;
    if r % 2 == 0 {
        0
    } else {
        kronecker(-1, r)
    }
}

/// The weight-1/2 to 3/2 map `sum a(n) q^n -> sum a(n) ell(n) n^{1/2} q^n`.
pub fn theta_map_half<C: Coeff>(f: &QSeries<C>, meta: &FormMeta) -> Result<(QSeries<C>, FormMeta)> {
    if meta.weight.doubled != 1 {
        return Err(Error::InvalidArgument(format!("expected weight 1/2, got {}", meta.weight)));
    }
    let g = f.coarsen();
    if g.start() < 0 && !g.is_zero() {
        return Err(Error::InvalidArgument("negative exponents are not allowed here".into()));
    }
    if g.denom() != 1 {
        return Err(Error::InvalidArgument("the map is defined on integer exponents".into()));
    }
    let out = g.coeff_map(|n| {
        let n = n.to_integer().to_u64().unwrap_or(0);
        let l = ell(n);
        if l == 0 {
            C::zero()
        } else {
            C::from_i64(l * isqrt(n) as i64)
        }
    });
    let target = FormMeta::new(HalfWeight::from_doubled(3), 16 * meta.level, meta.character.clone(), 0)?;
    Ok((out, target))
}

/// A series standing for `(2 pi i)^two_pi_i_power * series`.
#[derive(Clone, Debug, PartialEq)]
pub struct Tagged<C> {
    pub series: QSeries<C>,
    pub two_pi_i_power: i64,
}

/// `prod_{i=0}^{len-1} (x + i)`.
fn pochhammer(x: &BigRational, len: u32) -> BigRational {
    (0..len).fold(<BigRational as One>::one(), |acc, i| acc * (x + rat(i as i64, 1)))
}

/// `[f, g]_n = sum_j (-1)^{n-j} C(n,j) Gamma(k+n)Gamma(l+n)/(Gamma(k+j)Gamma(l+n-j)) f^{(j)} g^{(n-j)}`
/// with `d/dz = 2 pi i D`; the Gamma ratios are finite Pochhammer products.
pub fn rankin_cohen<C: Coeff>(
    f: &QSeries<C>,
    g: &QSeries<C>,
    n: u32,
    k: HalfWeight,
    l: HalfWeight,
) -> Result<Tagged<C>> {
    let kr = k.as_rational();
    let lr = l.as_rational();
    let mut acc: Option<QSeries<C>> = None;
    for j in 0..=n {
        let binom = BigRational::from_integer(num_integer::binomial(BigInt::from(n), BigInt::from(j)));
        let gk = pochhammer(&(&kr + rat(j as i64, 1)), n - j);
        let gl = pochhammer(&(&lr + rat((n - j) as i64, 1)), j);
        let sign = if (n - j) % 2 == 0 { rat(1, 1) } else { rat(-1, 1) };
        let w = sign * binom * gk * gl;
        let term = f.bol(j).mul(&g.bol(n - j))?.scale_rational(&w);
        acc = Some(match acc {
            None => term,
            Some(s) => s.add(&term)?,
        });
    }
    Ok(Tagged { series: acc.expect("n + 1 >= 1 terms").coarsen(), two_pi_i_power: n as i64 })
}

/// Output of [`selberg_lift`].
#[derive(Clone, Debug)]
pub struct SelbergLift<C> {
    /// `F(z) = f(4z) theta0(z)`.
    pub f_theta: QSeries<C>,
    pub f_theta_meta: FormMeta,
    /// `S(F)(z) = f(z)^2 - 2^{k-1} f(2z)^2`.
    pub lift: QSeries<C>,
    pub lift_meta: FormMeta,
}

pub fn selberg_lift<C: Coeff>(f: &QSeries<C>, k: i64) -> Result<SelbergLift<C>> {
    if k <= 0 || k % 2 != 0 {
        return Err(Error::InvalidArgument(format!("the Selberg lift needs a positive even weight, got {k}")));
    }
    if f.denom() != 1 {
        return Err(Error::InvalidArgument("expected a level-1 form with integer exponents".into()));
    }
    let f4 = f.rescale(4);
    let (theta0, _) = theta_series::<C>(ThetaKind::Theta0, &DirichletCharacter::trivial(1), 1, f4.prec_units())?;
    let f_theta = f4.mul(&theta0)?;
    let two_pow = BigRational::from_integer(num_traits::pow(BigInt::from(2), (k - 1) as usize));
    let f2 = f.rescale(2);
    let lift = f.mul(f)?.sub(&f2.mul(&f2)?.scale_rational(&two_pow))?;
    let triv = DirichletCharacter::trivial(1);
    Ok(SelbergLift {
        f_theta_meta: FormMeta::new(HalfWeight::from_doubled(2 * k + 1), 4, triv.clone(), 0)?,
        f_theta,
        lift_meta: FormMeta::new(HalfWeight::integral(2 * k), 2, triv, 0)?,
        lift,
    })
}

/// Outcome of comparing `delta_{2/3}^{3/2}(F)` with `[theta1, f(4.)]_1`.
#[derive(Clone, Debug, Serialize)]
pub struct ProportionalityReport {
    /// `delta = ratio * bracket` coefficientwise (the bracket without its `2 pi i`).
    pub series_ratio: String,
    /// The constant multiplying the full bracket `[theta1, f(4.)]_1`, i.e.
    /// `series_ratio / (2 pi i)`, as a complex number.
    pub constant_re: f64,
    pub constant_im: f64,
    /// `3/(pi i)` for comparison.
    pub printed_re: f64,
    pub printed_im: f64,
    pub coefficients_compared: usize,
    pub proportional: bool,
}

/// Ratio `delta_{2/3}^{3/2}(f(4.) theta0) / [theta1, f(4.)]_1` over exact rationals.
/// Returns `None` for the ratio if the two series are not proportional.
pub fn bracket_ratio(f: &QSeries<BigRational>, ctx: &ThetaContext) -> Result<(Option<BigRational>, usize)> {
    let f4 = f.rescale(4);
    let t0: QSeries<BigRational> = ctx.theta0(f4.prec_units() - f4.start() + 1)?;
    let big_f = f4.mul(&t0)?;
    let k = HalfWeight::from_doubled(5);
    let delta = delta_a(&big_f, k, &rat(2, 3), ctx, None)?.series;
    let t1: QSeries<BigRational> = ctx.theta1(f4.prec_units() - f4.start() + 2)?;
    let bracket = rankin_cohen(&t1, &f4, 1, HalfWeight::from_doubled(3), HalfWeight::from_doubled(-2))?;
    let (delta, br) = (delta.coarsen(), bracket.series.coarsen());
    let m = delta.denom().lcm(&br.denom());
    let (delta, br) = (delta.refine(m / delta.denom()), br.refine(m / br.denom()));
    let p = delta.prec_units().min(br.prec_units());
    let lo = delta.start().min(br.start());
    let mut ratio: Option<BigRational> = None;
    let mut compared = 0;
    for e in lo..p {
        let (x, y) = (delta.coeff(e), br.coeff(e));
        match (Zero::is_zero(&x), Zero::is_zero(&y)) {
            (true, true) => continue,
            (false, true) | (true, false) => return Ok((None, compared)),
            (false, false) => {
                let r = x / y;
                if ratio.as_ref().is_some_and(|q| *q != r) {
                    return Ok((None, compared));
                }
                ratio = Some(r);
                compared += 1;
            }
        }
    }
    Ok((ratio, compared))
}

impl ProportionalityReport {
    pub fn from_ratio(ratio: Option<&BigRational>, compared: usize) -> Self {
        use std::f64::consts::PI;
        let r = ratio.map(|r| r.to_f64().unwrap_or(f64::NAN)).unwrap_or(f64::NAN);
        // r / (2 pi i) = -i r / (2 pi)
        ProportionalityReport {
            series_ratio: ratio.map(|r| r.to_string()).unwrap_or_else(|| "not proportional".into()),
            constant_re: 0.0,
            constant_im: -r / (2.0 * PI),
            printed_re: 0.0,
            printed_im: -3.0 / PI,
            coefficients_compared: compared,
            proportional: ratio.is_some(),
        }
    }
}
