//! Complex numbers over any [`Real`].
//!
//! All multivalued functions use the principal branch with
//! `-pi < arg <= pi`; a signed zero imaginary part never flips the branch.

use std::ops::{Add, Div, Mul, Neg, Sub};

use super::real::Real;

#[derive(Clone, Debug, PartialEq)]
pub struct Cx<R> {
    pub re: R,
    pub im: R,
}

pub type C64 = Cx<f64>;

impl<R: Real> Cx<R> {
    pub fn new(re: R, im: R) -> Self {
        Cx { re, im }
    }
    pub fn real(re: R) -> Self {
        Cx { re, im: R::zero() }
    }
    pub fn zero() -> Self {
        Cx::real(R::zero())
    }
    pub fn one() -> Self {
        Cx::real(R::one())
    }
    pub fn i() -> Self {
        Cx::new(R::zero(), R::one())
    }
    pub fn from_f64(re: f64, im: f64) -> Self {
        Cx::new(R::from_f64(re), R::from_f64(im))
    }
    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
    pub fn conj(&self) -> Self {
        Cx::new(self.re.clone(), -self.im.clone())
    }
    pub fn norm_sqr(&self) -> R {
        self.re.clone() * self.re.clone() + self.im.clone() * self.im.clone()
    }
    pub fn abs(&self) -> R {
        let a = self.re.abs();
        let b = self.im.abs();
        let (big, small) = if a < b { (b, a) } else { (a, b) };
        if big.is_zero() {
            return big;
        }
        let r = small / big.clone();
        big * (R::one() + r.clone() * r).sqrt()
    }
    pub fn arg(&self) -> R {
        if self.im.is_zero() {
            return if self.re < R::zero() { R::pi() } else { R::zero() };
        }
        self.im.atan2(&self.re)
    }
    pub fn scale(&self, s: &R) -> Self {
        Cx::new(self.re.clone() * s.clone(), self.im.clone() * s.clone())
    }
    pub fn mul_i(&self) -> Self {
        Cx::new(-self.im.clone(), self.re.clone())
    }
    pub fn inv(&self) -> Self {
        let d = self.norm_sqr();
        Cx::new(self.re.clone() / d.clone(), -self.im.clone() / d)
    }
    /// `e^{i theta}`.
    pub fn cis(theta: &R) -> Self {
        Cx::new(theta.cos(), theta.sin())
    }
    pub fn from_polar(r: &R, theta: &R) -> Self {
        Cx::cis(theta).scale(r)
    }
    pub fn exp(&self) -> Self {
        Cx::from_polar(&self.re.exp(), &self.im)
    }
    pub fn ln(&self) -> Self {
        Cx::new(self.abs().ln(), self.arg())
    }
    /// Principal `self^e` for a real exponent; `0^e = 0` for `e > 0` and `0^0 = 1`.
    pub fn powr(&self, e: &R) -> Self {
        if self.is_zero() {
            return if e.is_zero() { Cx::one() } else { Cx::zero() };
        }
        Cx::from_polar(&self.abs().powf(e), &(self.arg() * e.clone()))
    }
    pub fn powc(&self, e: &Self) -> Self {
        if self.is_zero() {
            return if e.is_zero() { Cx::one() } else { Cx::zero() };
        }
        (self.ln() * e.clone()).exp()
    }
    pub fn powi(&self, n: i64) -> Self {
        let mut base = if n < 0 { self.inv() } else { self.clone() };
        let mut k = n.unsigned_abs();
        let mut acc = Cx::one();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc * base.clone();
            }
            k >>= 1;
            if k > 0 {
                base = base.clone() * base;
            }
        }
        acc
    }
    pub fn sqrt(&self) -> Self {
        self.powr(&R::from_ratio(1, 2))
    }
    pub fn to_c64(&self) -> C64 {
        Cx::new(self.re.to_f64(), self.im.to_f64())
    }
    pub fn from_c64(z: &C64) -> Self {
        Cx::new(R::from_f64(z.re), R::from_f64(z.im))
    }
}

impl<R: Real> Add for Cx<R> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Cx::new(self.re + o.re, self.im + o.im)
    }
}

impl<R: Real> Sub for Cx<R> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Cx::new(self.re - o.re, self.im - o.im)
    }
}

impl<R: Real> Mul for Cx<R> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let re = self.re.clone() * o.re.clone() - self.im.clone() * o.im.clone();
        let im = self.re * o.im + self.im * o.re;
        Cx::new(re, im)
    }
}

impl<R: Real> Div for Cx<R> {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        self * o.inv()
    }
}

impl<R: Real> Neg for Cx<R> {
    type Output = Self;
    fn neg(self) -> Self {
        Cx::new(-self.re, -self.im)
    }
}

impl<R: Real> Mul<R> for Cx<R> {
    type Output = Self;
    fn mul(self, s: R) -> Self {
        Cx::new(self.re * s.clone(), self.im * s)
    }
}
