//! Inversion and (fractional) powers.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{lattice_for, max_denominator, ratio, to_units, QSeries};
use crate::arith::Coeff;
use crate::error::{Error, Result};

impl<C: Coeff> QSeries<C> {
    /// Multiplicative inverse: valuation `-v`, precision `P - 2v`.
    pub fn inv(&self) -> Result<Self> {
        let e0 = self.leading().ok_or(Error::NotInvertible)?;
        let inv0 = e0.inv().ok_or(Error::NotInvertible)?;
        let len = (self.prec - self.start) as usize;
        let h = &self.coeffs;
        let support: Vec<usize> = (1..len).filter(|&k| !h[k].is_zero()).collect();
        let mut g = Vec::with_capacity(len);
        g.push(inv0.clone());
        for n in 1..len {
            let mut acc = C::zero();
            for &k in support.iter().take_while(|&&k| k <= n) {
                if !g[n - k].is_zero() {
                    acc.add_assign(&h[k].mul(&g[n - k]));
                }
            }
            g.push(acc.mul(&inv0).neg());
        }
        Ok(QSeries::new(self.denom, -self.start, self.prec - 2 * self.start, g))
    }

    /// `f^n` for `n >= 0` by repeated squaring.
    pub fn pow_int(&self, n: u64) -> Result<Self> {
        if n == 0 {
            return Ok(self.unit_power_one());
        }
        let mut base = self.clone();
        let mut acc: Option<Self> = None;
        let mut k = n;
        while k > 0 {
            if k & 1 == 1 {
                acc = Some(match acc {
                    None => base.clone(),
                    Some(a) => a.mul(&base)?,
                });
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(acc.expect("n > 0"))
    }

    /// `f^0 = 1`, carrying the relative precision of `f`.
    fn unit_power_one(&self) -> Self {
        let rel = if self.is_zero() { 0 } else { self.prec - self.start };
        QSeries::new(self.denom, 0, rel, vec![C::one()])
    }

    /// Principal-branch power `f^r` for rational `r`.
    ///
    /// Non-negative integer exponents of dense series use repeated squaring;
    /// everything else uses the recurrence for `h^r` of a power series `h` with `h(0) != 0`,
    /// `n h_0 g_n = sum_{k=1}^{n} ((r+1)k - n) h_k g_{n-k}`.
    pub fn pow(&self, r: &BigRational) -> Result<Self> {
        if Zero::is_zero(r) {
            return Ok(self.unit_power_one());
        }
        if r.is_integer() && !r.is_negative() {
            let n = r.to_integer().to_u64().ok_or_else(|| Error::InvalidArgument("exponent too large".into()))?;
            // A sparse base (theta series, Euler product) is cheaper through
            // the recurrence, which costs O(len * nnz) instead of O(len^2).
            let len = (self.prec - self.start).max(0) as usize;
            if n == 1 || self.is_zero() || self.nnz() * 8 > len {
                return self.pow_int(n);
            }
        }
        self.pow_recurrence(r)
    }

    /// [`QSeries::pow`] through the power recurrence for every exponent.
    pub fn pow_recurrence(&self, r: &BigRational) -> Result<Self> {
        if Zero::is_zero(r) {
            return Ok(self.unit_power_one());
        }
        let (base, start) = self.lattice_for_power(r)?;
        let h = &base.coeffs;
        let len = (base.prec - base.start) as usize;
        let (p, q) = small_ratio(r)?;
        let g0 = h[0]
            .pow_ratio(p, q)
            .ok_or_else(|| Error::Inexact(format!("leading coefficient to the power {r}")))?;
        let inv_h0 = h[0].inv().ok_or(Error::NotInvertible)?;
        let r1 = r + <BigRational as One>::one();
        let support: Vec<usize> = (1..len).filter(|&k| !h[k].is_zero()).collect();
        let mut g = Vec::with_capacity(len);
        g.push(g0);
        for n in 1..len {
            let mut acc = C::zero();
            for &k in support.iter().take_while(|&&k| k <= n) {
                if g[n - k].is_zero() {
                    continue;
                }
                let w = &r1 * BigRational::from_integer(BigInt::from(k)) - BigRational::from_integer(BigInt::from(n));
                if Zero::is_zero(&w) {
                    continue;
                }
                acc.add_assign(&h[k].mul(&g[n - k]).mul_rational(&w));
            }
            g.push(acc.mul(&inv_h0).mul_rational(&ratio(1, n as u64)));
        }
        Ok(QSeries::new(base.denom, start, start + len as i64, g))
    }

    /// The same power through `exp(r log u)` on the unit part `u = f / (e0 q^v)`.
    /// Slower than [`QSeries::pow`]; kept as an independent construction.
    pub fn pow_explog(&self, r: &BigRational) -> Result<Self> {
        if Zero::is_zero(r) {
            return Ok(self.unit_power_one());
        }
        let (base, start) = self.lattice_for_power(r)?;
        let len = (base.prec - base.start) as usize;
        let (p, q) = small_ratio(r)?;
        let e0 = &base.coeffs[0];
        let g0 = e0.pow_ratio(p, q).ok_or_else(|| Error::Inexact(format!("leading coefficient to the power {r}")))?;
        let inv0 = e0.inv().ok_or(Error::NotInvertible)?;
        let u: Vec<C> = base.coeffs.iter().map(|c| c.mul(&inv0)).collect();
        // n L_n = n u_n - sum_{k=1}^{n-1} k L_k u_{n-k}
        let mut l = vec![C::zero(); len];
        for n in 1..len {
            let mut acc = u[n].mul_rational(&ratio(n as i64, 1));
            for k in 1..n {
                if !l[k].is_zero() && !u[n - k].is_zero() {
                    acc = acc.sub(&l[k].mul(&u[n - k]).mul_rational(&ratio(k as i64, 1)));
                }
            }
            l[n] = acc.mul_rational(&ratio(1, n as u64));
        }
        let gl: Vec<C> = l.iter().map(|c| c.mul_rational(r)).collect();
        // n E_n = sum_{k=1}^{n} k G_k E_{n-k}
        let mut e = vec![C::zero(); len];
        e[0] = C::one();
        for n in 1..len {
            let mut acc = C::zero();
            for k in 1..=n {
                if !gl[k].is_zero() && !e[n - k].is_zero() {
                    acc.add_assign(&gl[k].mul(&e[n - k]).mul_rational(&ratio(k as i64, 1)));
                }
            }
            e[n] = acc.mul_rational(&ratio(1, n as u64));
        }
        let coeffs = e.iter().map(|c| c.mul(&g0)).collect();
        Ok(QSeries::new(base.denom, start, start + len as i64, coeffs))
    }

    /// Refine so that `r * v` is on the lattice; returns the refined series
    /// and the new valuation in its units.
    fn lattice_for_power(&self, r: &BigRational) -> Result<(Self, i64)> {
        if self.is_zero() {
            return Err(Error::NotInvertible);
        }
        let v = self.valuation() * r;
        let m = lattice_for(&v, self.denom);
        if m > max_denominator() {
            return Err(Error::LatticeOverflow(m, max_denominator()));
        }
        let base = self.refine(m / self.denom);
        let start = to_units(&v, m).ok_or_else(|| Error::InvalidArgument("exponent overflow".into()))?;
        Ok((base, start))
    }
}

fn small_ratio(r: &BigRational) -> Result<(i64, i64)> {
    match (r.numer().to_i64(), r.denom().to_i64()) {
        (Some(p), Some(q)) => Ok((p, q)),
        _ => Err(Error::InvalidArgument(format!("exponent {r} too large"))),
    }
}
