//! `J_{+-(n+1/2)}` through the Rayleigh-type closed forms
//! `J_{n+1/2}(z) = sqrt(2/pi) z^{n+1/2} (-(1/z) d/dz)^n (sin z / z)` and
//! `J_{-n-1/2}(z) = (-1)^n sqrt(2/pi) z^{n+1/2} (-(1/z) d/dz)^n (cos z / z)`.
//!
//! The iterated operator is expanded exactly: with `w = 1/z`,
//! `-(1/z) d/dz (A(w) sin z + B(w) cos z) = (w^3 A' + w B) sin z + (w^3 B' - w A) cos z`.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::arith::Real;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

/// Integer polynomials in `w = 1/z` multiplying `sin z` and `cos z` after `n`
/// applications of `-(1/z) d/dz`.
pub fn rayleigh_polynomials(n: u32, sign: Sign) -> (Vec<BigInt>, Vec<BigInt>) {
    let w = vec![BigInt::zero(), BigInt::one()];
    let (mut a, mut b) = match sign {
        Sign::Plus => (w, vec![]),
        Sign::Minus => (vec![], w),
    };
    for _ in 0..n {
        let na = add(&shift(&deriv(&a), 3), &shift(&b, 1));
        let nb = sub(&shift(&deriv(&b), 3), &shift(&a, 1));
        a = na;
        b = nb;
    }
    (a, b)
}

fn deriv(p: &[BigInt]) -> Vec<BigInt> {
    p.iter().enumerate().skip(1).map(|(i, c)| c * BigInt::from(i)).collect()
}

fn shift(p: &[BigInt], k: usize) -> Vec<BigInt> {
    if p.is_empty() {
        return vec![];
    }
    let mut v = vec![BigInt::zero(); k];
    v.extend_from_slice(p);
    v
}

fn add(p: &[BigInt], q: &[BigInt]) -> Vec<BigInt> {
    let n = p.len().max(q.len());
    (0..n).map(|i| p.get(i).cloned().unwrap_or_default() + q.get(i).cloned().unwrap_or_default()).collect()
}

fn sub(p: &[BigInt], q: &[BigInt]) -> Vec<BigInt> {
    let n = p.len().max(q.len());
    (0..n).map(|i| p.get(i).cloned().unwrap_or_default() - q.get(i).cloned().unwrap_or_default()).collect()
}

fn horner<R: Real>(p: &[BigInt], w: &R) -> R {
    p.iter().rev().fold(R::zero(), |acc, c| acc * w.clone() + R::from_bigint(c))
}

/// `J_{n+1/2}(z)` or `J_{-n-1/2}(z)` for `z > 0` from the closed forms.
pub fn bessel_half<R: Real>(n: u32, sign: Sign, z: &R) -> Result<R> {
    if !(*z > R::zero()) {
        return Err(Error::InvalidArgument("bessel_half needs z > 0".into()));
    }
    let (a, b) = rayleigh_polynomials(n, sign);
    let w = R::one() / z.clone();
    let inner = horner(&a, &w) * z.sin() + horner(&b, &w) * z.cos();
    let nu = R::from_ratio(2 * n as i64 + 1, 2);
    let pref = (R::from_i64(2) / R::pi()).sqrt() * z.powf(&nu);
    let s = if sign == Sign::Minus && n % 2 == 1 { -R::one() } else { R::one() };
    Ok(s * pref * inner)
}

/// `J_nu(z) = sum_m (-1)^m (z/2)^{2m+nu} / (m! Gamma(m+nu+1))` for half-integer
/// `nu = doubled / 2`, summed until the terms fall below the working epsilon.
pub fn bessel_series<R: Real>(doubled_nu: i64, z: &R) -> Result<R> {
    if doubled_nu % 2 == 0 {
        return Err(Error::InvalidArgument("only half-integer orders are supported".into()));
    }
    if !(*z > R::zero()) {
        return Err(Error::InvalidArgument("bessel_series needs z > 0".into()));
    }
    let nu = R::from_ratio(doubled_nu, 2);
    // Gamma(nu + 1) from Gamma(1/2) = sqrt(pi) by the recurrence.
    let mut gamma = R::pi().sqrt();
    let mut x2 = 1i64; // 2x, currently x = 1/2
    let target = doubled_nu + 2;
    while x2 < target {
        gamma = gamma * R::from_ratio(x2, 2);
        x2 += 2;
    }
    while x2 > target {
        x2 -= 2;
        gamma = gamma / R::from_ratio(x2, 2);
    }
    let half = z.clone() / R::from_i64(2);
    let q = -(half.clone() * half.clone());
    let mut term = half.powf(&nu) / gamma;
    let mut sum = term.clone();
    let eps = R::epsilon();
    let mut m = 0i64;
    loop {
        m += 1;
        // divide by m (m + nu)
        term = term * q.clone() / (R::from_i64(m) * (R::from_i64(m) + nu.clone()));
        sum = sum + term.clone();
        if m > 10 && term.abs() <= eps.clone() * sum.abs() {
            break;
        }
        if m > 100_000 {
            return Err(Error::Convergence("ascending Bessel series did not converge".into()));
        }
    }
    Ok(sum)
}
