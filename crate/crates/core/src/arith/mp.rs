//! Multiprecision reals on top of `astro-float`.
//!
//! The working precision is a per-thread setting so that generic code written
//! against [`Real`] does not have to thread a precision argument around.
//! Use [`with_prec`] to run a closure at a given bit count.

use std::cell::{Cell, RefCell};
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use astro_float::{BigFloat, Consts, RoundingMode, Sign};
use num_bigint::BigInt;
use num_traits::Signed;

use super::real::Real;

const RM: RoundingMode = RoundingMode::ToEven;
pub const DEFAULT_BITS: usize = 128;

thread_local! {
    static PREC: Cell<usize> = const { Cell::new(DEFAULT_BITS) };
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("astro-float constants cache"));
}

/// Current working precision in bits.
pub fn prec() -> usize {
    PREC.with(|p| p.get())
}

/// Run `f` with the working precision set to `bits`, restoring it afterwards.
pub fn with_prec<T>(bits: usize, f: impl FnOnce() -> T) -> T {
    struct Restore(usize);
    impl Drop for Restore {
        fn drop(&mut self) {
            PREC.with(|p| p.set(self.0));
        }
    }
    let _guard = Restore(PREC.with(|p| p.replace(bits.max(64))));
    f()
}

fn with_cc<T>(f: impl FnOnce(&mut Consts) -> T) -> T {
    CONSTS.with(|c| f(&mut c.borrow_mut()))
}

#[derive(Clone)]
pub struct MpReal(pub BigFloat);

impl MpReal {
    pub fn inner(&self) -> &BigFloat {
        &self.0
    }

    /// Parse a decimal literal at the working precision.
    pub fn parse(s: &str) -> Option<MpReal> {
        let t = s.trim();
        if t.is_empty() {
            return None;
        }
        let x = with_cc(|cc| BigFloat::parse(t, astro_float::Radix::Dec, prec(), RM, cc));
        if x.is_nan() {
            None
        } else {
            Some(MpReal(x))
        }
    }

    /// Decimal rendering with the given number of significant digits.
    pub fn to_string_digits(&self, digits: usize) -> String {
        if self.0.is_zero() {
            return "0".into();
        }
        let p = ((digits as f64) * 3.33).ceil() as usize + 8;
        let mut x = self.0.clone();
        let _ = x.set_precision(p.max(64), RM);
        with_cc(|cc| x.format(astro_float::Radix::Dec, RM, cc)).unwrap_or_else(|_| format!("{}", self.to_f64()))
    }
}

impl fmt::Debug for MpReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_string_digits(24))
    }
}

impl fmt::Display for MpReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_string_digits(24))
    }
}

impl PartialEq for MpReal {
    fn eq(&self, o: &Self) -> bool {
        self.0.cmp(&o.0) == Some(0)
    }
}

impl PartialOrd for MpReal {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        self.0.cmp(&o.0).map(|c| c.cmp(&0))
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident) => {
        impl $tr for MpReal {
            type Output = MpReal;
            fn $m(self, o: MpReal) -> MpReal {
                MpReal(self.0.$m(&o.0, prec(), RM))
            }
        }
        impl<'a> $tr<&'a MpReal> for &'a MpReal {
            type Output = MpReal;
            fn $m(self, o: &'a MpReal) -> MpReal {
                MpReal(self.0.$m(&o.0, prec(), RM))
            }
        }
    };
}
binop!(Add, add);
binop!(Sub, sub);
binop!(Mul, mul);
binop!(Div, div);

impl Neg for MpReal {
    type Output = MpReal;
    fn neg(self) -> MpReal {
        MpReal(self.0.neg())
    }
}

impl Real for MpReal {
    fn from_f64(x: f64) -> Self {
        MpReal(BigFloat::from_f64(x, prec().max(64)))
    }
    fn from_i64(n: i64) -> Self {
        MpReal(BigFloat::from_i64(n, prec().max(64)))
    }
    fn from_bigint(n: &BigInt) -> Self {
        let p = prec().max(n.bits() as usize + 64);
        let mut acc = BigFloat::from_i64(0, p);
        let radix = BigFloat::from_f64(18446744073709551616.0, p);
        for d in n.magnitude().iter_u64_digits().rev() {
            acc = acc.mul(&radix, p, RM).add(&BigFloat::from_u64(d, p), p, RM);
        }
        if n.is_negative() {
            acc = acc.neg();
        }
        let _ = acc.set_precision(prec(), RM);
        MpReal(acc)
    }
    fn to_f64(&self) -> f64 {
        let x = &self.0;
        if x.is_nan() {
            return f64::NAN;
        }
        if x.is_inf_pos() {
            return f64::INFINITY;
        }
        if x.is_inf_neg() {
            return f64::NEG_INFINITY;
        }
        if x.is_zero() {
            return 0.0;
        }
        match x.as_raw_parts() {
            Some((m, _n, s, e, _)) => {
                // Mantissa words are little-endian with the top bit of the
                // last word set; value = 0.m * 2^e.
                let mut v = 0.0f64;
                for w in m.iter().rev().take(2) {
                    v = v * 18446744073709551616.0 + (*w as f64);
                }
                let words = m.len().min(2) as i32;
                let mag = v * 2f64.powi(-64 * words) * 2f64.powi(e.clamp(-1100, 1100));
                if s == Sign::Neg {
                    -mag
                } else {
                    mag
                }
            }
            None => f64::NAN,
        }
    }
    fn pi() -> Self {
        MpReal(with_cc(|cc| cc.pi(prec(), RM)))
    }
    fn sqrt(&self) -> Self {
        MpReal(self.0.sqrt(prec(), RM))
    }
    fn exp(&self) -> Self {
        MpReal(with_cc(|cc| self.0.exp(prec(), RM, cc)))
    }
    fn ln(&self) -> Self {
        MpReal(with_cc(|cc| self.0.ln(prec(), RM, cc)))
    }
    fn sin(&self) -> Self {
        MpReal(with_cc(|cc| self.0.sin(prec(), RM, cc)))
    }
    fn cos(&self) -> Self {
        MpReal(with_cc(|cc| self.0.cos(prec(), RM, cc)))
    }
    fn atan2(&self, x: &Self) -> Self {
        let y = self;
        let zero = <Self as Real>::zero();
        if x.0.is_zero() {
            if y.0.is_zero() {
                return zero;
            }
            let half_pi = Self::pi() / Self::from_i64(2);
            return if *y > zero { half_pi } else { -half_pi };
        }
        let t = MpReal(with_cc(|cc| (y / x).0.atan(prec(), RM, cc)));
        if *x > zero {
            t
        } else if *y >= zero {
            t + Self::pi()
        } else {
            t - Self::pi()
        }
    }
    fn epsilon() -> Self {
        let one = BigFloat::from_i64(1, prec());
        let mut e = one.clone();
        e.set_exponent(1 - prec() as i32);
        MpReal(e)
    }
    fn to_mp(&self) -> MpReal {
        self.clone()
    }
    fn from_mp(x: &MpReal) -> Self {
        x.clone()
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
    fn abs(&self) -> Self {
        MpReal(self.0.abs())
    }
    fn powi(&self, n: i32) -> Self {
        let p = MpReal(self.0.powi(n.unsigned_abs() as usize, prec(), RM));
        if n < 0 {
            Self::one() / p
        } else {
            p
        }
    }
}
