//! `alpha_D(phi) = L^{-1}((Dp/2pi)^{k-1} h(Dp/2pi) (L phi)(p))`.
//!
//! In the Laplace domain `alpha_D(phi)` is carried as its multiplier
//! representation, which is all an L-series needs. In the time domain an
//! integer `k - 1 = m` gives `c (D/2pi)^m phi^{(m)}` for constant `h = c`; a
//! half-integer `m = n + 1/2` gives the Riemann-Liouville derivative
//! `D^m phi(t) = (1/sqrt(pi)) int_a^{min(t,b)} phi^{(n+1)}(s) (t-s)^{-1/2} ds`,
//! which is no longer compactly supported (it decays like `t^{-m-1}`).

use std::fmt;
use std::str::FromStr;

use super::laplace::laplace;
use super::quad::tanh_sinh;
use super::testfn::TestFunction;
use crate::arith::{Cx, Real};
use crate::bol_ops::ell;
use crate::error::{Error, Result};
use crate::forms::HalfWeight;

/// A bounded map `h` used by `alpha_D`, extended to complex arguments where
/// it has an analytic formula.
#[derive(Clone, Debug, PartialEq)]
pub enum HFunction {
    Const { re: f64, im: f64 },
    /// `e^{-beta x}`
    ExpDecay { beta: f64 },
    /// `1 / (1 + beta x)`
    Rational { beta: f64 },
    /// `1 + amp cos(omega x)`
    Trig { amp: f64, omega: f64 },
    /// `l(n)` at integers only.
    Ell,
}

impl HFunction {
    pub fn one() -> Self {
        HFunction::Const { re: 1.0, im: 0.0 }
    }

    pub fn zero() -> Self {
        HFunction::Const { re: 0.0, im: 0.0 }
    }

    pub fn constant(&self) -> Option<(f64, f64)> {
        match self {
            HFunction::Const { re, im } => Some((*re, *im)),
            _ => None,
        }
    }

    pub fn eval<R: Real>(&self, x: &Cx<R>) -> Result<Cx<R>> {
        Ok(match self {
            HFunction::Const { re, im } => Cx::new(R::from_f64(*re), R::from_f64(*im)),
            HFunction::ExpDecay { beta } => (-x.scale(&R::from_f64(*beta))).exp(),
            HFunction::Rational { beta } => (Cx::one() + x.scale(&R::from_f64(*beta))).inv(),
            HFunction::Trig { amp, omega } => {
                // cos w = (e^{iw} + e^{-iw}) / 2
                let w = x.scale(&R::from_f64(*omega)).mul_i();
                let c = (w.exp() + (-w).exp()).scale(&R::from_ratio(1, 2));
                Cx::one() + c.scale(&R::from_f64(*amp))
            }
            HFunction::Ell => {
                let n = x.re.to_f64().round();
                let off = (x.re.clone() - R::from_f64(n)).abs().to_f64() + x.im.abs().to_f64();
                if off > 1e-9 * n.abs().max(1.0) {
                    return Err(Error::InvalidArgument("h = l is only defined at integers".into()));
                }
                if n < 0.0 {
                    Cx::zero()
                } else {
                    Cx::real(R::from_i64(ell(n as u64)))
                }
            }
        })
    }
}

impl FromStr for HFunction {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let (name, args) = s.split_once(':').unwrap_or((s, ""));
        let nums: Result<Vec<f64>> = if args.is_empty() {
            Ok(vec![])
        } else {
            args.split(',').map(|a| a.trim().parse::<f64>().map_err(|e| Error::Parse(format!("h '{s}': {e}")))).collect()
        };
        let nums = nums?;
        match (name, nums.as_slice()) {
            ("one", []) => Ok(HFunction::one()),
            ("zero", []) => Ok(HFunction::zero()),
            ("const", [re]) => Ok(HFunction::Const { re: *re, im: 0.0 }),
            ("const", [re, im]) => Ok(HFunction::Const { re: *re, im: *im }),
            ("exp", [beta]) => Ok(HFunction::ExpDecay { beta: *beta }),
            ("rational", [beta]) if *beta >= 0.0 => Ok(HFunction::Rational { beta: *beta }),
            ("trig", [amp, omega]) => Ok(HFunction::Trig { amp: *amp, omega: *omega }),
            ("ell", []) => Ok(HFunction::Ell),
            _ => Err(Error::Parse(format!(
                "unknown h '{s}' (one | zero | const:re[,im] | exp:beta | rational:beta | trig:amp,omega | ell)"
            ))),
        }
    }
}

impl fmt::Display for HFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HFunction::Const { re, im } if *im == 0.0 => write!(f, "const:{re}"),
            HFunction::Const { re, im } => write!(f, "const:{re},{im}"),
            HFunction::ExpDecay { beta } => write!(f, "exp:{beta}"),
            HFunction::Rational { beta } => write!(f, "rational:{beta}"),
            HFunction::Trig { amp, omega } => write!(f, "trig:{amp},{omega}"),
            HFunction::Ell => write!(f, "ell"),
        }
    }
}

/// `(Dp/2pi)^{k-1} h(Dp/2pi)` with the principal power.
pub fn alpha_multiplier<R: Real>(p: &Cx<R>, d: u64, k: HalfWeight, h: &HFunction) -> Result<Cx<R>> {
    let x = p.scale(&(R::from_i64(d as i64) / (R::from_i64(2) * R::pi())));
    let hv = h.eval(&x)?;
    if hv.is_zero() {
        return Ok(Cx::zero());
    }
    let e = R::from_ratio(k.doubled - 2, 2);
    let pw = if x.is_zero() {
        if k.doubled > 2 {
            Cx::zero()
        } else if k.doubled == 2 {
            Cx::one()
        } else {
            return Err(Error::InvalidArgument("multiplier is singular at p = 0".into()));
        }
    } else {
        x.powr(&e)
    };
    Ok(pw * hv)
}

/// Laplace-domain representation of `alpha_D(phi)`.
#[derive(Clone, Debug)]
pub struct AlphaImage {
    pub phi: TestFunction,
    pub d: u64,
    pub k: HalfWeight,
    pub h: HFunction,
    pub rel_tol: f64,
}

impl AlphaImage {
    pub fn at<R: Real>(&self, p: &Cx<R>) -> Result<Cx<R>> {
        let m = alpha_multiplier(p, self.d, self.k, &self.h)?;
        if m.is_zero() {
            return Ok(m);
        }
        Ok(m * laplace(&self.phi, p, self.rel_tol)?.value)
    }
}

/// Riemann-Liouville derivative of order `n + 1/2`, times `scale`.
#[derive(Clone, Debug)]
pub struct HalfDerivative {
    pub phi: TestFunction,
    pub n: u32,
    pub scale: f64,
    pub rel_tol: f64,
}

impl HalfDerivative {
    pub fn eval<R: Real>(&self, t: &R) -> Result<R> {
        let (a, b) = self.phi.support();
        let (ar, br) = (R::from_f64(a), R::from_f64(b));
        if !(*t > ar) || self.scale == 0.0 {
            return Ok(R::zero());
        }
        let order = self.n + 1;
        let phi = &self.phi;
        let r = if *t > br {
            // smooth integrand on the whole support
            tanh_sinh(
                |s: &R| {
                    let d = phi.eval_derivative(order, s).unwrap_or_else(|_| R::zero());
                    Cx::real(d / (t.clone() - s.clone()).sqrt())
                },
                &ar,
                &br,
                self.rel_tol,
                14,
            )?
        } else {
            // s = t - u^2 removes the singularity at s = t
            let hi = (t.clone() - ar).sqrt();
            tanh_sinh(
                |u: &R| {
                    let s = t.clone() - u.clone() * u.clone();
                    Cx::real(phi.eval_derivative(order, &s).unwrap_or_else(|_| R::zero()) * R::from_i64(2))
                },
                &R::zero(),
                &hi,
                self.rel_tol,
                14,
            )?
        };
        Ok(r.value.re * R::from_f64(self.scale) / R::pi().sqrt())
    }
}

/// Time-domain `alpha_D(phi)` for constant or exponential `h`.
#[derive(Clone, Debug)]
pub enum AlphaTime {
    Compact(TestFunction),
    Half(HalfDerivative),
}

impl AlphaTime {
    pub fn eval<R: Real>(&self, t: &R) -> Result<R> {
        match self {
            AlphaTime::Compact(f) => Ok(f.eval(t)),
            AlphaTime::Half(h) => h.eval(t),
        }
    }

    /// Right end of the support, infinite for the half-integer case.
    pub fn support_end(&self) -> f64 {
        match self {
            AlphaTime::Compact(f) => f.support().1,
            AlphaTime::Half(_) => f64::INFINITY,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AlphaMode {
    LaplaceDomain,
    TimeDomain,
}

#[derive(Clone, Debug)]
pub enum AlphaOutput {
    Laplace(AlphaImage),
    Time(AlphaTime),
}

pub fn alpha_apply(phi: &TestFunction, d: u64, k: HalfWeight, h: &HFunction, mode: AlphaMode) -> Result<AlphaOutput> {
    if d == 0 {
        return Err(Error::InvalidArgument("D must be positive".into()));
    }
    match mode {
        AlphaMode::LaplaceDomain => {
            Ok(AlphaOutput::Laplace(AlphaImage { phi: phi.clone(), d, k, h: h.clone(), rel_tol: 1e-12 }))
        }
        AlphaMode::TimeDomain => Ok(AlphaOutput::Time(alpha_time(phi, d, k, h)?)),
    }
}

pub fn alpha_time(phi: &TestFunction, d: u64, k: HalfWeight, h: &HFunction) -> Result<AlphaTime> {
    // e^{-beta x} at x = Dp/2pi is a shift by beta D / 2pi
    let (phi, (re, im)) = match h {
        HFunction::ExpDecay { beta } => (phi.shift(beta * d as f64 / (2.0 * std::f64::consts::PI))?, (1.0, 0.0)),
        _ => (
            phi.clone(),
            h.constant().ok_or_else(|| {
                Error::OutOfContract(format!(
                    "time-domain alpha_D needs a constant or exponential h, got {h}; use the Laplace domain"
                ))
            })?,
        ),
    };
    let phi = &phi;
    if im != 0.0 {
        return Err(Error::OutOfContract("time-domain alpha_D supports real constants only".into()));
    }
    if k.doubled < 2 {
        return Err(Error::InvalidArgument(format!("alpha_D needs k >= 1, got {k}")));
    }
    let base = d as f64 / (2.0 * std::f64::consts::PI);
    if k.is_integral() {
        let m = (k.doubled / 2 - 1) as u32;
        Ok(AlphaTime::Compact(phi.derivative(m, re * base.powi(m as i32))?))
    } else {
        let n = ((k.doubled - 3) / 2) as u32;
        if phi.smoothness() < n + 1 {
            return Err(Error::InvalidArgument(format!("{phi} is not C^{}", n + 1)));
        }
        let scale = re * base.powf(k.as_f64() - 1.0);
        Ok(AlphaTime::Half(HalfDerivative { phi: phi.clone(), n, scale, rel_tol: 1e-12 }))
    }
}
