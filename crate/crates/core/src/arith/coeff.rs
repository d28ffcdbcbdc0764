//! Coefficient rings for q-series: exact rationals, exact Gaussian rationals,
//! and floating complex numbers at `f64` or multiprecision.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::cx::Cx;
use super::mp::MpReal;
use super::real::Real;

/// A root of unity `e^{2 pi i num/den}`, stored reduced with `0 <= num < den`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Angle {
    pub num: u64,
    pub den: u64,
}

impl Angle {
    pub const ONE: Angle = Angle { num: 0, den: 1 };
    pub const MINUS_ONE: Angle = Angle { num: 1, den: 2 };

    pub fn new(num: i64, den: u64) -> Angle {
        assert!(den > 0);
        let n = num.rem_euclid(den as i64) as u64;
        let g = n.gcd(&den);
        Angle { num: n / g, den: den / g }
    }
    pub fn add(self, o: Angle) -> Angle {
        let den = self.den.lcm(&o.den);
        let n = self.num * (den / self.den) + o.num * (den / o.den);
        Angle::new((n % den) as i64, den)
    }
    pub fn neg(self) -> Angle {
        Angle::new(-(self.num as i64), self.den)
    }
    pub fn times(self, k: i64) -> Angle {
        let n = ((self.num as i128 * k as i128).rem_euclid(self.den as i128)) as i64;
        Angle::new(n, self.den)
    }
    /// Real value when the root of unity is `+1` or `-1`.
    pub fn as_sign(self) -> Option<i64> {
        match self.den {
            1 => Some(1),
            2 => Some(-1),
            _ => None,
        }
    }
    pub fn to_cx<R: Real>(self) -> Cx<R> {
        match (self.num, self.den) {
            (0, 1) => Cx::one(),
            (1, 2) => Cx::real(-R::one()),
            (1, 4) => Cx::i(),
            (3, 4) => Cx::new(R::zero(), -R::one()),
            _ => {
                let t = R::from_i64(2) * R::pi() * R::from_ratio(self.num as i64, self.den as i64);
                Cx::cis(&t)
            }
        }
    }
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Exact `r^(1/q)` for a nonnegative rational, if it is rational.
pub fn rational_root(r: &BigRational, q: u32) -> Option<BigRational> {
    if r.is_negative() {
        return None;
    }
    let n = r.numer().nth_root(q);
    let d = r.denom().nth_root(q);
    if num_traits::pow(n.clone(), q as usize) == *r.numer() && num_traits::pow(d.clone(), q as usize) == *r.denom() {
        Some(BigRational::new(n, d))
    } else {
        None
    }
}

fn rational_pow(r: &BigRational, p: i64) -> Option<BigRational> {
    if p < 0 && Zero::is_zero(r) {
        return None;
    }
    let base = if p < 0 { r.recip() } else { r.clone() };
    Some(num_traits::pow(base, p.unsigned_abs() as usize))
}

pub trait Coeff: Clone + Debug + PartialEq + Send + Sync + 'static {
    /// Whether arithmetic in this ring is exact.
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn inv(&self) -> Option<Self>;
    fn from_rational(r: &BigRational) -> Self;
    /// The root of unity, when representable in this ring.
    fn from_unit(a: Angle) -> Option<Self>;
    /// Principal branch of `self^(p/q)`, when representable.
    fn pow_ratio(&self, p: i64, q: i64) -> Option<Self>;
    fn to_cx<R: Real>(&self) -> Cx<R>;
    /// Exact Gaussian-rational value, when the coefficient is exact.
    fn to_qqi(&self) -> Option<QQi>;
    fn from_qqi(z: &QQi) -> Option<Self>;
    /// Floating value, for floating rings only.
    fn from_mpc(z: &Cx<MpReal>) -> Option<Self>;

    fn from_i64(n: i64) -> Self {
        Self::from_rational(&BigRational::from_integer(BigInt::from(n)))
    }
    fn mul_rational(&self, r: &BigRational) -> Self {
        self.mul(&Self::from_rational(r))
    }
    fn add_assign(&mut self, o: &Self) {
        *self = self.add(o);
    }
    fn magnitude(&self) -> f64 {
        self.to_cx::<f64>().abs()
    }
    /// Natural log of the absolute value, robust to magnitudes beyond `f64`.
    fn log_magnitude(&self) -> f64 {
        self.magnitude().ln()
    }

    /// First `len` coefficients of the product of two dense coefficient runs.
    fn convolve(a: &[Self], b: &[Self], len: usize) -> Vec<Self> {
        generic_convolve(a, b, len)
    }
}

/// Sparse-aware schoolbook convolution: the outer loop runs over the
/// nonzero entries of the sparser operand.
pub fn generic_convolve<C: Coeff>(a: &[C], b: &[C], len: usize) -> Vec<C> {
    let mut out = vec![C::zero(); len];
    let nnz_a = a.iter().filter(|x| !x.is_zero()).count();
    let nnz_b = b.iter().filter(|x| !x.is_zero()).count();
    let (s, d) = if nnz_a <= nnz_b { (a, b) } else { (b, a) };
    for (i, x) in s.iter().enumerate().take(len) {
        if x.is_zero() {
            continue;
        }
        let top = d.len().min(len - i);
        for (j, y) in d[..top].iter().enumerate() {
            if !y.is_zero() {
                let p = x.mul(y);
                out[i + j].add_assign(&p);
            }
        }
    }
    out
}

/// Clear denominators: returns integer numerators over a common denominator.
fn common_denominator(a: &[BigRational]) -> (Vec<BigInt>, BigInt) {
    let mut l = BigInt::one();
    for x in a {
        if !x.denom().is_one() {
            l = l.lcm(x.denom());
        }
    }
    let v = a
        .iter()
        .map(|x| if Zero::is_zero(x) { BigInt::zero() } else { x.numer() * (&l / x.denom()) })
        .collect();
    (v, l)
}

fn rational_convolve(a: &[BigRational], b: &[BigRational], len: usize) -> Vec<BigRational> {
    let (na, da) = common_denominator(a);
    let (nb, db) = common_denominator(b);
    let den = da * db;
    let nnz_a = na.iter().filter(|x| !x.is_zero()).count();
    let nnz_b = nb.iter().filter(|x| !x.is_zero()).count();
    let (s, d) = if nnz_a <= nnz_b { (&na, &nb) } else { (&nb, &na) };
    let mut acc = vec![BigInt::zero(); len];
    for (i, x) in s.iter().enumerate().take(len) {
        if x.is_zero() {
            continue;
        }
        let top = d.len().min(len - i);
        for (j, y) in d[..top].iter().enumerate() {
            if !y.is_zero() {
                acc[i + j] += x * y;
            }
        }
    }
    acc.into_iter().map(|n| BigRational::new(n, den.clone())).collect()
}

impl Coeff for BigRational {
    const EXACT: bool = true;

    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn inv(&self) -> Option<Self> {
        if Zero::is_zero(self) {
            None
        } else {
            Some(self.recip())
        }
    }
    fn from_rational(r: &BigRational) -> Self {
        r.clone()
    }
    fn from_unit(a: Angle) -> Option<Self> {
        a.as_sign().map(|s| BigRational::from_integer(BigInt::from(s)))
    }
    fn pow_ratio(&self, p: i64, q: i64) -> Option<Self> {
        let (p, q) = normalize_ratio(p, q);
        if q == 1 {
            return rational_pow(self, p);
        }
        if self.is_negative() {
            return None;
        }
        rational_pow(&rational_root(self, q as u32)?, p)
    }
    fn to_cx<R: Real>(&self) -> Cx<R> {
        Cx::real(R::from_rational(self))
    }
    fn to_qqi(&self) -> Option<QQi> {
        Some(QQi::real(self.clone()))
    }
    fn from_qqi(z: &QQi) -> Option<Self> {
        if Zero::is_zero(&z.im) {
            Some(z.re.clone())
        } else {
            None
        }
    }
    fn from_mpc(_: &Cx<MpReal>) -> Option<Self> {
        None
    }
    fn log_magnitude(&self) -> f64 {
        log_abs_bigint(self.numer()) - log_abs_bigint(self.denom())
    }
    fn add_assign(&mut self, o: &Self) {
        *self += o;
    }
    fn convolve(a: &[Self], b: &[Self], len: usize) -> Vec<Self> {
        rational_convolve(a, b, len)
    }
}

fn normalize_ratio(p: i64, q: i64) -> (i64, i64) {
    assert!(q != 0, "zero denominator in exponent");
    let g = p.gcd(&q).max(1);
    let (p, q) = (p / g, q / g);
    if q < 0 {
        (-p, -q)
    } else {
        (p, q)
    }
}

/// Exact Gaussian rational `re + i im`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QQi {
    pub re: BigRational,
    pub im: BigRational,
}

impl QQi {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        QQi { re, im }
    }
    pub fn real(re: BigRational) -> Self {
        QQi { re, im: Zero::zero() }
    }
    pub fn i() -> Self {
        QQi { re: Zero::zero(), im: One::one() }
    }
    pub fn is_real(&self) -> bool {
        Zero::is_zero(&self.im)
    }
    pub fn conj(&self) -> Self {
        QQi { re: self.re.clone(), im: -&self.im }
    }
    /// `(|z|, quarter turns)` when `z` lies on a coordinate axis.
    fn axis_form(&self) -> Option<(BigRational, i64)> {
        match (Zero::is_zero(&self.re), Zero::is_zero(&self.im)) {
            (_, true) if self.re.is_negative() => Some((-&self.re, 2)),
            (_, true) => Some((self.re.clone(), 0)),
            (true, false) if self.im.is_negative() => Some((-&self.im, -1)),
            (true, false) => Some((self.im.clone(), 1)),
            _ => None,
        }
    }
}

impl Coeff for QQi {
    const EXACT: bool = true;

    fn zero() -> Self {
        QQi::real(Zero::zero())
    }
    fn one() -> Self {
        QQi::real(One::one())
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(&self.re) && Zero::is_zero(&self.im)
    }
    fn add(&self, o: &Self) -> Self {
        QQi::new(&self.re + &o.re, &self.im + &o.im)
    }
    fn sub(&self, o: &Self) -> Self {
        QQi::new(&self.re - &o.re, &self.im - &o.im)
    }
    fn mul(&self, o: &Self) -> Self {
        if self.is_real() && o.is_real() {
            return QQi::real(&self.re * &o.re);
        }
        QQi::new(&self.re * &o.re - &self.im * &o.im, &self.re * &o.im + &self.im * &o.re)
    }
    fn neg(&self) -> Self {
        QQi::new(-&self.re, -&self.im)
    }
    fn inv(&self) -> Option<Self> {
        if Coeff::is_zero(self) {
            return None;
        }
        let d = &self.re * &self.re + &self.im * &self.im;
        Some(QQi::new(&self.re / &d, -&self.im / &d))
    }
    fn from_rational(r: &BigRational) -> Self {
        QQi::real(r.clone())
    }
    fn from_unit(a: Angle) -> Option<Self> {
        let one = || <BigRational as One>::one();
        match (a.num, a.den) {
            (0, 1) => Some(QQi::real(one())),
            (1, 2) => Some(QQi::real(-one())),
            (1, 4) => Some(QQi::new(Zero::zero(), one())),
            (3, 4) => Some(QQi::new(Zero::zero(), -one())),
            _ => None,
        }
    }
    fn pow_ratio(&self, p: i64, q: i64) -> Option<Self> {
        let (p, q) = normalize_ratio(p, q);
        if q == 1 {
            let base = if p < 0 { self.inv()? } else { self.clone() };
            let mut acc = QQi::one();
            for _ in 0..p.unsigned_abs() {
                acc = acc.mul(&base);
            }
            return Some(acc);
        }
        let (r, quarters) = self.axis_form()?;
        // arg = quarters * pi/2, so the result's angle in quarter turns is quarters*p/q.
        let num = quarters * p;
        if num % q != 0 {
            return None;
        }
        let mag = rational_pow(&rational_root(&r, q as u32)?, p)?;
        let unit = QQi::from_unit(Angle::new(num / q, 4))?;
        Some(unit.mul(&QQi::real(mag)))
    }
    fn to_cx<R: Real>(&self) -> Cx<R> {
        Cx::new(R::from_rational(&self.re), R::from_rational(&self.im))
    }
    fn to_qqi(&self) -> Option<QQi> {
        Some(self.clone())
    }
    fn from_qqi(z: &QQi) -> Option<Self> {
        Some(z.clone())
    }
    fn from_mpc(_: &Cx<MpReal>) -> Option<Self> {
        None
    }
    fn log_magnitude(&self) -> f64 {
        let a = self.re.log_magnitude();
        let b = self.im.log_magnitude();
        let (hi, lo) = if a > b { (a, b) } else { (b, a) };
        if hi == f64::NEG_INFINITY {
            return hi;
        }
        hi + 0.5 * (1.0 + (2.0 * (lo - hi)).exp()).ln()
    }
    fn convolve(a: &[Self], b: &[Self], len: usize) -> Vec<Self> {
        let ar: Vec<BigRational> = a.iter().map(|x| x.re.clone()).collect();
        let br: Vec<BigRational> = b.iter().map(|x| x.re.clone()).collect();
        let a_real = a.iter().all(|x| x.is_real());
        let b_real = b.iter().all(|x| x.is_real());
        let rr = rational_convolve(&ar, &br, len);
        if a_real && b_real {
            return rr.into_iter().map(QQi::real).collect();
        }
        let ai: Vec<BigRational> = a.iter().map(|x| x.im.clone()).collect();
        let bi: Vec<BigRational> = b.iter().map(|x| x.im.clone()).collect();
        let ii = rational_convolve(&ai, &bi, len);
        let ri = rational_convolve(&ar, &bi, len);
        let ir = rational_convolve(&ai, &br, len);
        (0..len).map(|n| QQi::new(&rr[n] - &ii[n], &ri[n] + &ir[n])).collect()
    }
}

macro_rules! float_coeff {
    ($r:ty) => {
        impl Coeff for Cx<$r> {
            const EXACT: bool = false;

            fn zero() -> Self {
                Cx::zero()
            }
            fn one() -> Self {
                Cx::one()
            }
            fn is_zero(&self) -> bool {
                Cx::is_zero(self)
            }
            fn add(&self, o: &Self) -> Self {
                self.clone() + o.clone()
            }
            fn sub(&self, o: &Self) -> Self {
                self.clone() - o.clone()
            }
            fn mul(&self, o: &Self) -> Self {
                self.clone() * o.clone()
            }
            fn neg(&self) -> Self {
                -self.clone()
            }
            fn inv(&self) -> Option<Self> {
                if Cx::is_zero(self) {
                    None
                } else {
                    Some(Cx::inv(self))
                }
            }
            fn from_rational(r: &BigRational) -> Self {
                Cx::real(<$r as Real>::from_rational(r))
            }
            fn from_unit(a: Angle) -> Option<Self> {
                Some(a.to_cx())
            }
            fn pow_ratio(&self, p: i64, q: i64) -> Option<Self> {
                let (p, q) = normalize_ratio(p, q);
                if q == 1 {
                    if p < 0 && Cx::is_zero(self) {
                        return None;
                    }
                    return Some(self.powi(p));
                }
                Some(self.powr(&<$r as Real>::from_ratio(p, q)))
            }
            fn to_cx<R: Real>(&self) -> Cx<R> {
                convert_cx(self)
            }
            fn to_qqi(&self) -> Option<QQi> {
                None
            }
            fn from_qqi(z: &QQi) -> Option<Self> {
                Some(z.to_cx())
            }
            fn from_mpc(z: &Cx<MpReal>) -> Option<Self> {
                Some(convert_cx(z))
            }
            fn magnitude(&self) -> f64 {
                self.to_c64().abs()
            }
            fn log_magnitude(&self) -> f64 {
                if Cx::is_zero(self) {
                    return f64::NEG_INFINITY;
                }
                Real::to_f64(&self.abs().ln())
            }
        }
    };
}

float_coeff!(f64);
float_coeff!(MpReal);

/// Convert between complex types of different real backends.
pub fn convert_cx<A: Real, B: Real>(z: &Cx<A>) -> Cx<B> {
    Cx::new(B::from_mp(&z.re.to_mp()), B::from_mp(&z.im.to_mp()))
}

/// `ln |n|` without overflow (`-inf` for zero).
pub fn log_abs_bigint(n: &BigInt) -> f64 {
    let bits = n.bits();
    if bits == 0 {
        return f64::NEG_INFINITY;
    }
    if bits < 1000 {
        return n.abs().to_f64().map(f64::ln).unwrap_or(f64::INFINITY);
    }
    let shift = bits - 60;
    let top = (n.abs() >> shift as usize).to_f64().unwrap_or(1.0);
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// Lift an exact integer into any coefficient ring.
pub fn from_bigint<C: Coeff>(n: &BigInt) -> C {
    C::from_rational(&BigRational::from_integer(n.clone()))
}
