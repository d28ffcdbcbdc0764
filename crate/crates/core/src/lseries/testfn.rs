//! Compactly supported test functions on the positive reals.
//!
//! Every family evaluates through truncated Taylor expansions, so derivatives
//! of any order come from exact recurrences rather than finite differences.

use std::fmt;
use std::str::FromStr;

use crate::arith::Real;
use crate::error::{Error, Result};
use crate::forms::HalfWeight;

#[derive(Clone, Debug, PartialEq)]
pub enum TestFunction {
    /// `exp(-1/((t-a)(b-t)))` on `(a, b)`.
    Bump { a: f64, b: f64 },
    /// The indicator of `[a, b]`.
    Indicator { a: f64, b: f64 },
    /// `((t-a)(b-t))^m` on `[a, b]`, of class `C^{m-1}`.
    PolyBump { a: f64, b: f64, m: u32 },
    /// `phi((M x)^{-1}) (M x)^{-k}`.
    Fricke { inner: Box<TestFunction>, k: HalfWeight, m: u64 },
    /// `phi(x - c)`.
    Shift { inner: Box<TestFunction>, c: f64 },
    /// `scale * phi^{(order)}`.
    Derivative { inner: Box<TestFunction>, order: u32, scale: f64 },
}

fn check_support(a: f64, b: f64) -> Result<()> {
    if !(a > 0.0 && b > a && b.is_finite()) {
        return Err(Error::InvalidArgument(format!("support [{a}, {b}] must satisfy 0 < a < b < inf")));
    }
    Ok(())
}

impl TestFunction {
    pub fn bump(a: f64, b: f64) -> Result<Self> {
        check_support(a, b)?;
        Ok(TestFunction::Bump { a, b })
    }

    pub fn indicator(a: f64, b: f64) -> Result<Self> {
        check_support(a, b)?;
        Ok(TestFunction::Indicator { a, b })
    }

    pub fn poly_bump(a: f64, b: f64, m: u32) -> Result<Self> {
        check_support(a, b)?;
        if m == 0 {
            return Err(Error::InvalidArgument("poly-bump exponent must be positive".into()));
        }
        Ok(TestFunction::PolyBump { a, b, m })
    }

    /// `(phi|_k W_M)(x) = phi((M x)^{-1}) (M x)^{-k}`.
    pub fn fricke(&self, k: HalfWeight, m: u64) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidArgument("M must be positive".into()));
        }
        Ok(TestFunction::Fricke { inner: Box::new(self.clone()), k, m })
    }

    pub fn shift(&self, c: f64) -> Result<Self> {
        let (a, _) = self.support();
        if !(a + c > 0.0) {
            return Err(Error::InvalidArgument(format!("shift by {c} leaves (0, inf)")));
        }
        Ok(TestFunction::Shift { inner: Box::new(self.clone()), c })
    }

    pub fn derivative(&self, order: u32, scale: f64) -> Result<Self> {
        if order > self.smoothness() {
            return Err(Error::InvalidArgument(format!(
                "{self} has {} continuous derivatives, {order} requested",
                self.smoothness()
            )));
        }
        Ok(TestFunction::Derivative { inner: Box::new(self.clone()), order, scale })
    }

    pub fn support(&self) -> (f64, f64) {
        match self {
            TestFunction::Bump { a, b } | TestFunction::Indicator { a, b } | TestFunction::PolyBump { a, b, .. } => {
                (*a, *b)
            }
            TestFunction::Fricke { inner, m, .. } => {
                let (a, b) = inner.support();
                let m = *m as f64;
                (1.0 / (m * b), 1.0 / (m * a))
            }
            TestFunction::Shift { inner, c } => {
                let (a, b) = inner.support();
                (a + c, b + c)
            }
            TestFunction::Derivative { inner, .. } => inner.support(),
        }
    }

    /// Number of continuous derivatives; `u32::MAX` for smooth functions.
    pub fn smoothness(&self) -> u32 {
        match self {
            TestFunction::Bump { .. } => u32::MAX,
            TestFunction::Indicator { .. } => 0,
            TestFunction::PolyBump { m, .. } => m - 1,
            TestFunction::Fricke { inner, .. } | TestFunction::Shift { inner, .. } => inner.smoothness(),
            TestFunction::Derivative { inner, order, .. } => inner.smoothness().saturating_sub(*order),
        }
    }

    /// Taylor coefficients `phi^{(j)}(x) / j!` for `j = 0..=order`; zero
    /// outside the open support.
    pub fn taylor<R: Real>(&self, x: &R, order: usize) -> Vec<R> {
        let (a, b) = self.support();
        if !(*x > R::from_f64(a) && *x < R::from_f64(b)) {
            return vec![R::zero(); order + 1];
        }
        match self {
            TestFunction::Bump { a, b } => {
                let (ta, tb) = (x.clone() - R::from_f64(*a), R::from_f64(*b) - x.clone());
                let p = vec![ta.clone() * tb.clone(), tb - ta, -R::one()];
                let g: Vec<R> = series_inv(&pad(p, order + 1)).into_iter().map(|c| -c).collect();
                series_exp(&g)
            }
            TestFunction::Indicator { .. } => {
                let mut v = vec![R::zero(); order + 1];
                v[0] = R::one();
                v
            }
            TestFunction::PolyBump { a, b, m } => {
                let (ta, tb) = (x.clone() - R::from_f64(*a), R::from_f64(*b) - x.clone());
                let p = pad(vec![ta.clone() * tb.clone(), tb - ta, -R::one()], order + 1);
                let mut acc = pad(vec![R::one()], order + 1);
                for _ in 0..*m {
                    acc = series_mul(&acc, &p);
                }
                acc
            }
            TestFunction::Fricke { inner, k, m } => {
                let mr = R::from_i64(*m as i64);
                let u0 = R::one() / (mr.clone() * x.clone());
                // 1/(M(x+e)) - u0 = sum_{j>=1} (-1)^j e^j / (M x^{j+1})
                let mut delta = vec![R::zero(); order + 1];
                let mut xp = x.clone();
                for (j, d) in delta.iter_mut().enumerate().skip(1) {
                    xp = xp * x.clone();
                    let t = R::one() / (mr.clone() * xp.clone());
                    *d = if j % 2 == 1 { -t } else { t };
                }
                let phi = inner.taylor(&u0, order);
                let composed = series_compose(&phi, &delta);
                // (M(x+e))^{-k} = (Mx)^{-k} (1 + e/x)^{-k}
                let kk = R::from_ratio(k.doubled, 2);
                let base = (mr * x.clone()).powf(&-kk.clone());
                let mut w = vec![base];
                for j in 1..=order {
                    let prev = w[j - 1].clone();
                    let jr = R::from_i64(j as i64);
                    w.push(prev * (-kk.clone() - jr.clone() + R::one()) / (jr * x.clone()));
                }
                series_mul(&composed, &w)
            }
            TestFunction::Shift { inner, c } => inner.taylor(&(x.clone() - R::from_f64(*c)), order),
            TestFunction::Derivative { inner, order: m, scale } => {
                let m = *m as usize;
                let t = inner.taylor(x, order + m);
                let s = R::from_f64(*scale);
                (0..=order)
                    .map(|j| {
                        // (j+m)!/j!
                        let mut f = R::one();
                        for i in (j + 1)..=(j + m) {
                            f = f * R::from_i64(i as i64);
                        }
                        t[j + m].clone() * f * s.clone()
                    })
                    .collect()
            }
        }
    }

    pub fn eval<R: Real>(&self, x: &R) -> R {
        self.taylor(x, 0).swap_remove(0)
    }

    /// `phi^{(m)}(x)`.
    pub fn eval_derivative<R: Real>(&self, m: u32, x: &R) -> Result<R> {
        if m > self.smoothness() {
            return Err(Error::InvalidArgument(format!("{self} is not C^{m}")));
        }
        let t = self.taylor(x, m as usize);
        let mut f = R::one();
        for i in 2..=m {
            f = f * R::from_i64(i as i64);
        }
        Ok(t[m as usize].clone() * f)
    }
}

fn pad<R: Real>(mut v: Vec<R>, n: usize) -> Vec<R> {
    v.resize(n, R::zero());
    v.truncate(n);
    v
}

pub(crate) fn series_mul<R: Real>(x: &[R], y: &[R]) -> Vec<R> {
    let n = x.len().min(y.len());
    (0..n).map(|i| (0..=i).fold(R::zero(), |s, j| s + x[j].clone() * y[i - j].clone())).collect()
}

fn series_inv<R: Real>(x: &[R]) -> Vec<R> {
    let u = R::one() / x[0].clone();
    let mut out = vec![u.clone()];
    for i in 1..x.len() {
        let s = (1..=i).fold(R::zero(), |s, j| s + x[j].clone() * out[i - j].clone());
        out.push(-(s * u.clone()));
    }
    out
}

fn series_exp<R: Real>(x: &[R]) -> Vec<R> {
    let mut out = vec![x[0].exp()];
    for i in 1..x.len() {
        let s = (1..=i).fold(R::zero(), |s, j| s + x[j].clone() * R::from_i64(j as i64) * out[i - j].clone());
        out.push(s / R::from_i64(i as i64));
    }
    out
}

/// `sum_j phi_j delta^j` for `delta` without constant term.
fn series_compose<R: Real>(phi: &[R], delta: &[R]) -> Vec<R> {
    let n = phi.len();
    let mut out = vec![R::zero(); n];
    let mut pw = pad(vec![R::one()], n);
    for c in phi {
        for (o, p) in out.iter_mut().zip(&pw) {
            *o = o.clone() + c.clone() * p.clone();
        }
        pw = series_mul(&pw, delta);
    }
    out
}

impl FromStr for TestFunction {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let (name, args) = s.split_once(':').ok_or_else(|| Error::Parse(format!("test function '{s}' needs name:args")))?;
        let nums: Vec<&str> = args.split(',').map(str::trim).collect();
        let num = |i: usize| -> Result<f64> {
            nums.get(i)
                .ok_or_else(|| Error::Parse(format!("'{s}': missing argument {}", i + 1)))?
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("'{s}': {e}")))
        };
        match name {
            "bump" if nums.len() == 2 => TestFunction::bump(num(0)?, num(1)?),
            "indicator" if nums.len() == 2 => TestFunction::indicator(num(0)?, num(1)?),
            "poly-bump" if nums.len() == 3 => {
                let m = nums[2].parse::<u32>().map_err(|e| Error::Parse(format!("'{s}': {e}")))?;
                TestFunction::poly_bump(num(0)?, num(1)?, m)
            }
            _ => Err(Error::Parse(format!("unknown test function '{s}' (bump:a,b | indicator:a,b | poly-bump:a,b,m)"))),
        }
    }
}

impl fmt::Display for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TestFunction::Bump { a, b } => write!(f, "bump:{a},{b}"),
            TestFunction::Indicator { a, b } => write!(f, "indicator:{a},{b}"),
            TestFunction::PolyBump { a, b, m } => write!(f, "poly-bump:{a},{b},{m}"),
            TestFunction::Fricke { inner, k, m } => write!(f, "({inner})|_{k} W_{m}"),
            TestFunction::Shift { inner, c } => write!(f, "({inner})(x - {c})"),
            TestFunction::Derivative { inner, order, scale } => write!(f, "{scale} * ({inner})^({order})"),
        }
    }
}
