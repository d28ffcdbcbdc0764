//! Truncated Laurent/Puiseux series in `q = e^{2 pi i z}`.
//!
//! Exponents live on the lattice `(1/M)Z`. A series stores its coefficients
//! densely from the valuation up to (but excluding) its absolute precision
//! `P`, meaning it is known modulo `q^P`. Precision propagates pessimistically:
//! sums keep `min(P_f, P_g)`, products `min(P_f + v_g, P_g + v_f)`.

mod delta;
mod eval;
mod io;
mod pow;

pub use delta::{delta_cusp, delta_inverse, euler_product};
pub use eval::{eval_series, fit_tail, EvalResult, TailFit};
pub use io::{read_series, write_series, AnySeries};

use std::sync::atomic::{AtomicU64, Ordering};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};

use crate::arith::Coeff;
use crate::error::{Error, Result};

static MAX_DENOM: AtomicU64 = AtomicU64::new(24);

/// Largest lattice denominator any operation may produce.
pub fn max_denominator() -> u64 {
    MAX_DENOM.load(Ordering::Relaxed)
}

pub fn set_max_denominator(m: u64) {
    MAX_DENOM.store(m.max(1), Ordering::Relaxed);
}

#[derive(Clone, Debug, PartialEq)]
pub struct QSeries<C> {
    denom: u64,
    start: i64,
    prec: i64,
    coeffs: Vec<C>,
}

impl<C: Coeff> QSeries<C> {
    /// Series `sum coeffs[j] q^{(start + j)/denom} + O(q^{prec/denom})`.
    /// Coefficients past `prec` are dropped, missing ones are zero.
    pub fn new(denom: u64, start: i64, prec: i64, mut coeffs: Vec<C>) -> Self {
        assert!(denom > 0, "lattice denominator must be positive");
        let len = (prec - start).max(0) as usize;
        coeffs.truncate(len);
        coeffs.resize(len, C::zero());
        let mut s = QSeries { denom, start: start.min(prec), prec, coeffs };
        s.normalize();
        s
    }

    /// Build from `(exponent numerator, coefficient)` pairs over `denom`.
    pub fn from_terms(denom: u64, prec: i64, terms: impl IntoIterator<Item = (i64, C)>) -> Self {
        let terms: Vec<(i64, C)> = terms.into_iter().filter(|(e, c)| *e < prec && !c.is_zero()).collect();
        let start = terms.iter().map(|t| t.0).min().unwrap_or(prec);
        let mut coeffs = vec![C::zero(); (prec - start).max(0) as usize];
        for (e, c) in terms {
            coeffs[(e - start) as usize].add_assign(&c);
        }
        Self::new(denom, start, prec, coeffs)
    }

    pub fn zero(denom: u64, prec: i64) -> Self {
        QSeries { denom, start: prec, prec, coeffs: Vec::new() }
    }

    pub fn constant(c: C, prec: i64) -> Self {
        Self::new(1, 0, prec, vec![c])
    }

    pub fn one(prec: i64) -> Self {
        Self::constant(C::one(), prec)
    }

    pub fn monomial(c: C, exp: i64, denom: u64, prec: i64) -> Self {
        Self::from_terms(denom, prec, [(exp, c)])
    }

    fn normalize(&mut self) {
        let lead = self.coeffs.iter().position(|c| !c.is_zero()).unwrap_or(self.coeffs.len());
        if lead > 0 {
            self.coeffs.drain(..lead);
            self.start += lead as i64;
        }
    }

    pub fn denom(&self) -> u64 {
        self.denom
    }
    /// Valuation numerator over `denom` (equals `prec_units` for the zero series).
    pub fn start(&self) -> i64 {
        self.start
    }
    pub fn prec_units(&self) -> i64 {
        self.prec
    }
    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }
    pub fn valuation(&self) -> BigRational {
        ratio(self.start, self.denom)
    }
    pub fn precision(&self) -> BigRational {
        ratio(self.prec, self.denom)
    }
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
    pub fn nnz(&self) -> usize {
        self.coeffs.iter().filter(|c| !c.is_zero()).count()
    }
    pub fn leading(&self) -> Option<&C> {
        self.coeffs.first()
    }

    /// Coefficient of `q^{e/denom}`; zero outside the stored range.
    pub fn coeff(&self, e: i64) -> C {
        if e < self.start || e >= self.prec {
            return C::zero();
        }
        self.coeffs[(e - self.start) as usize].clone()
    }

    /// Coefficient at a rational exponent; zero if it is off the lattice.
    pub fn coeff_at(&self, e: &BigRational) -> C {
        let scaled = e * BigRational::from_integer(BigInt::from(self.denom));
        if !scaled.is_integer() {
            return C::zero();
        }
        match scaled.to_integer().to_i64() {
            Some(n) => self.coeff(n),
            None => C::zero(),
        }
    }

    /// Nonzero terms as `(exponent numerator, coefficient)`.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &C)> + '_ {
        self.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(move |(j, c)| (self.start + j as i64, c))
    }

    /// Same series on the finer lattice `(1/(denom*factor))Z`.
    pub fn refine(&self, factor: u64) -> Self {
        if factor == 1 {
            return self.clone();
        }
        let f = factor as i64;
        let mut coeffs = vec![C::zero(); ((self.prec - self.start) * f) as usize];
        for (j, c) in self.coeffs.iter().enumerate() {
            coeffs[j * factor as usize] = c.clone();
        }
        QSeries { denom: self.denom * factor, start: self.start * f, prec: self.prec * f, coeffs }
    }

    pub fn with_denom(&self, denom: u64) -> Result<Self> {
        if denom % self.denom != 0 {
            return Err(Error::InvalidArgument(format!("{} does not divide {denom}", self.denom)));
        }
        if denom > max_denominator() {
            return Err(Error::LatticeOverflow(denom, max_denominator()));
        }
        Ok(self.refine(denom / self.denom))
    }

    /// Coarsest lattice that represents the series and its precision exactly.
    pub fn coarsen(&self) -> Self {
        let mut g = self.denom as i64;
        g = g.gcd(&self.prec);
        if !self.is_zero() {
            g = g.gcd(&self.start);
        }
        for (e, _) in self.terms() {
            g = g.gcd(&e);
            if g == 1 {
                break;
            }
        }
        let g = g.max(1);
        if g == 1 {
            return self.clone();
        }
        let terms: Vec<(i64, C)> = self.terms().map(|(e, c)| (e / g, c.clone())).collect();
        QSeries::from_terms(self.denom / g as u64, self.prec / g, terms)
    }

    /// Lower the absolute precision to `prec` units (no-op if already lower).
    pub fn truncate(&self, prec: i64) -> Self {
        if prec >= self.prec {
            return self.clone();
        }
        let keep = (prec - self.start).max(0) as usize;
        QSeries::new(self.denom, self.start.min(prec), prec, self.coeffs[..keep.min(self.coeffs.len())].to_vec())
    }

    /// Truncate at a rational precision.
    pub fn truncate_at(&self, prec: &BigRational) -> Self {
        let units = (prec * BigRational::from_integer(BigInt::from(self.denom))).floor().to_integer();
        self.truncate(units.to_i64().unwrap_or(i64::MAX))
    }

    fn aligned(&self, other: &Self) -> Result<(Self, Self)> {
        let m = self.denom.lcm(&other.denom);
        Ok((self.with_denom(m)?, other.with_denom(m)?))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.combine(other, |a, b| a.add(b))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.combine(other, |a, b| a.sub(b))
    }

    fn combine(&self, other: &Self, op: impl Fn(&C, &C) -> C) -> Result<Self> {
        let (a, b) = self.aligned(other)?;
        let prec = a.prec.min(b.prec);
        let start = a.start.min(b.start).min(prec);
        let coeffs = (start..prec).map(|e| op(&a.coeff(e), &b.coeff(e))).collect();
        Ok(QSeries::new(a.denom, start, prec, coeffs))
    }

    pub fn neg(&self) -> Self {
        QSeries { coeffs: self.coeffs.iter().map(|c| c.neg()).collect(), ..self.clone() }
    }

    pub fn scale(&self, s: &C) -> Self {
        QSeries::new(self.denom, self.start, self.prec, self.coeffs.iter().map(|c| c.mul(s)).collect())
    }

    pub fn scale_rational(&self, r: &BigRational) -> Self {
        QSeries::new(self.denom, self.start, self.prec, self.coeffs.iter().map(|c| c.mul_rational(r)).collect())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        let (a, b) = self.aligned(other)?;
        let prec = (a.prec + b.start).min(b.prec + a.start);
        let start = (a.start + b.start).min(prec);
        let len = (prec - start).max(0) as usize;
        if a.is_zero() || b.is_zero() {
            return Ok(QSeries::zero(a.denom, prec));
        }
        let coeffs = C::convolve(&a.coeffs, &b.coeffs, len);
        Ok(QSeries::new(a.denom, start, prec, coeffs))
    }

    /// Multiply by `q^{e/denom}`.
    pub fn shift(&self, e: i64) -> Self {
        QSeries { start: self.start + e, prec: self.prec + e, ..self.clone() }
    }

    /// `D^m`: the coefficient at exponent `n` is multiplied by `n^m` (`0^0 = 1`).
    pub fn bol(&self, m: u32) -> Self {
        if m == 0 {
            return self.clone();
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(j, c)| {
                if c.is_zero() {
                    return C::zero();
                }
                let n = ratio(self.start + j as i64, self.denom);
                c.mul_rational(&num_traits::pow(n, m as usize))
            })
            .collect();
        QSeries::new(self.denom, self.start, self.prec, coeffs)
    }

    /// `f(z) -> f(m z)`, i.e. `q -> q^m`.
    pub fn rescale(&self, m: u64) -> Self {
        assert!(m > 0, "rescale factor must be positive");
        let mi = m as i64;
        let mut coeffs = vec![C::zero(); ((self.prec - self.start) * mi) as usize];
        for (j, c) in self.coeffs.iter().enumerate() {
            coeffs[j * m as usize] = c.clone();
        }
        QSeries { denom: self.denom, start: self.start * mi, prec: self.prec * mi, coeffs }
    }

    /// Multiply the coefficient at each exponent `n` by `w(n)`.
    pub fn coeff_map(&self, w: impl Fn(&BigRational) -> C) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(j, c)| if c.is_zero() { C::zero() } else { c.mul(&w(&ratio(self.start + j as i64, self.denom))) })
            .collect();
        QSeries::new(self.denom, self.start, self.prec, coeffs)
    }

    /// Fallible variant of [`QSeries::coeff_map`].
    pub fn try_coeff_map(&self, w: impl Fn(&BigRational) -> Result<C>) -> Result<Self> {
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for (j, c) in self.coeffs.iter().enumerate() {
            coeffs.push(if c.is_zero() { C::zero() } else { c.mul(&w(&ratio(self.start + j as i64, self.denom))?) });
        }
        Ok(QSeries::new(self.denom, self.start, self.prec, coeffs))
    }

    /// Convert the coefficients into another ring.
    pub fn convert<D: Coeff>(&self) -> Result<QSeries<D>> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| {
                if let Some(q) = c.to_qqi() {
                    D::from_qqi(&q).ok_or_else(|| Error::Inexact("non-real coefficient in a real ring".into()))
                } else {
                    D::from_mpc(&c.to_cx()).ok_or_else(|| Error::Inexact("floating coefficient in an exact ring".into()))
                }
            })
            .collect::<Result<Vec<D>>>()?;
        Ok(QSeries::new(self.denom, self.start, self.prec, coeffs))
    }

    /// Whether two series agree on every exponent below both precisions.
    pub fn agrees_with(&self, other: &Self) -> bool {
        let Ok((a, b)) = self.aligned(other) else { return false };
        let p = a.prec.min(b.prec);
        let lo = a.start.min(b.start).min(p);
        (lo..p).all(|e| a.coeff(e) == b.coeff(e))
    }

    /// Largest coefficient difference on the common precision range.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let Ok((a, b)) = self.aligned(other) else { return f64::INFINITY };
        let p = a.prec.min(b.prec);
        let lo = a.start.min(b.start).min(p);
        (lo..p).map(|e| a.coeff(e).sub(&b.coeff(e)).magnitude()).fold(0.0, f64::max)
    }
}

pub(crate) fn ratio(n: i64, d: u64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Express a rational exponent on the lattice `(1/denom)Z`, if possible.
pub(crate) fn to_units(r: &BigRational, denom: u64) -> Option<i64> {
    let s = r * BigRational::from_integer(BigInt::from(denom));
    if s.is_integer() {
        s.to_integer().to_i64()
    } else {
        None
    }
}

/// Smallest `M'` that is a multiple of `denom` and puts `r` on `(1/M')Z`.
pub(crate) fn lattice_for(r: &BigRational, denom: u64) -> u64 {
    let d = r.denom().abs().to_u64().unwrap_or(u64::MAX);
    denom.lcm(&d)
}


#[cfg(test)]
mod tests;
