//! The discriminant `Delta = q prod (1 - q^n)^24` and its inverse.

use num_bigint::BigInt;
use num_rational::BigRational;

use super::QSeries;
use crate::arith::Coeff;
use crate::error::{Error, Result};

/// `prod_{n>=1} (1 - q^n)` to precision `prec` via the pentagonal number theorem.
pub fn euler_product<C: Coeff>(prec: i64) -> QSeries<C> {
    let mut terms = Vec::new();
    let mut k: i64 = 0;
    loop {
        let mut any = false;
        for kk in if k == 0 { vec![0] } else { vec![k, -k] } {
            let e = kk * (3 * kk - 1) / 2;
            if e < prec {
                any = true;
                let sign = if kk.rem_euclid(2) == 0 { 1 } else { -1 };
                terms.push((e, C::from_i64(sign)));
            }
        }
        if !any {
            break;
        }
        k += 1;
    }
    QSeries::from_terms(1, prec, terms)
}

/// `Delta` to absolute precision `prec` (exact integer coefficients).
pub fn delta_cusp<C: Coeff>(prec: i64) -> Result<QSeries<C>> {
    if prec < 2 {
        return Err(Error::InvalidArgument("Delta needs precision at least 2".into()));
    }
    let e = euler_product::<C>(prec - 1);
    Ok(e.pow(&BigRational::from_integer(BigInt::from(24)))?.shift(1))
}

/// `1/Delta` to absolute precision `prec` (valuation `-1`).
pub fn delta_inverse<C: Coeff>(prec: i64) -> Result<QSeries<C>> {
    if prec < 0 {
        return Err(Error::InvalidArgument("precision must be at least 0".into()));
    }
    let e = euler_product::<C>(prec + 1);
    Ok(e.pow(&BigRational::from_integer(BigInt::from(-24)))?.shift(-1))
}
