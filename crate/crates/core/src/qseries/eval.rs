//! Numerical evaluation of truncated q-series with a heuristic tail bound.

use serde::Serialize;

use super::QSeries;
use crate::arith::{Coeff, Cx, Real};
use crate::error::{Error, Result};

/// Fitted growth model `|c_n| <= A e^{C sqrt(n)}` for the stored coefficients.
///
/// `C` is `1.1` times the least-squares slope of `ln|c_n|` against `sqrt(n)`
/// over the upper half of the stored positive-exponent nonzero terms (clamped
/// at zero), plus `0.1`; `A` is then the smallest constant making the model an
/// upper bound on every stored positive-exponent term. This is a heuristic
/// extrapolation, not a proof.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct TailFit {
    pub ln_a: f64,
    pub c: f64,
    pub samples: usize,
    pub heuristic: bool,
}

impl TailFit {
    /// Bound for `sum_{n >= P} |c_n| e^{-2 pi y n}` over the lattice `(1/M)Z`.
    pub fn tail_bound(&self, prec: f64, y: f64, denom: u64) -> f64 {
        if self.ln_a == f64::NEG_INFINITY {
            return 0.0;
        }
        let p = prec.max(1.0 / denom as f64);
        let decay = 2.0 * std::f64::consts::PI * y;
        let slope = self.c / (2.0 * p.sqrt()) - decay;
        if slope >= 0.0 {
            return f64::INFINITY;
        }
        let ln_t = self.ln_a + self.c * p.sqrt() - decay * p;
        let rho = (slope / denom as f64).exp();
        (ln_t.exp()) / (1.0 - rho)
    }

    /// Smallest absolute precision whose tail bound at height `y` is at most
    /// `target`, searched by doubling then bisection.
    pub fn required_precision(&self, y: f64, denom: u64, target: f64) -> Option<f64> {
        let ok = |p: f64| self.tail_bound(p, y, denom) <= target;
        let mut hi = 1.0;
        while !ok(hi) {
            hi *= 2.0;
            if hi > 1e9 {
                return None;
            }
        }
        let mut lo = hi / 2.0;
        if ok(lo) {
            return Some(lo.max(1.0));
        }
        for _ in 0..40 {
            let mid = 0.5 * (lo + hi);
            if ok(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Some(hi.ceil())
    }
}

pub fn fit_tail<C: Coeff>(f: &QSeries<C>) -> TailFit {
    let pts: Vec<(f64, f64)> = f
        .terms()
        .filter(|(e, _)| *e > 0)
        .map(|(e, c)| ((e as f64 / f.denom() as f64).sqrt(), c.log_magnitude()))
        .collect();
    if pts.is_empty() {
        return TailFit { ln_a: f64::NEG_INFINITY, c: 0.0, samples: 0, heuristic: true };
    }
    let upper = &pts[pts.len() / 2..];
    let slope = if upper.len() >= 2 {
        let n = upper.len() as f64;
        let mx = upper.iter().map(|p| p.0).sum::<f64>() / n;
        let my = upper.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = upper.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = upper.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
        if sxx > 0.0 {
            sxy / sxx
        } else {
            0.0
        }
    } else {
        0.0
    };
    let c = 1.1 * slope.max(0.0) + 0.1;
    let ln_a = pts.iter().map(|(s, l)| l - c * s).fold(f64::NEG_INFINITY, f64::max);
    TailFit { ln_a, c, samples: pts.len(), heuristic: true }
}

#[derive(Clone, Debug)]
pub struct EvalResult<R> {
    pub value: Cx<R>,
    /// Heuristic bound on the omitted terms.
    pub tail_bound: f64,
    /// `ln sum |c_n| |q^n|` over the stored terms, a natural magnitude scale.
    pub ln_abs_sum: f64,
    pub fit: TailFit,
}

impl<R> EvalResult<R> {
    pub fn abs_sum(&self) -> f64 {
        self.ln_abs_sum.exp()
    }
}

/// Evaluate `sum c_n e^{2 pi i n z}` over the stored terms at `Im z > 0`.
pub fn eval_series<C: Coeff, R: Real>(f: &QSeries<C>, z: &Cx<R>) -> Result<EvalResult<R>> {
    if !(z.im > R::zero()) {
        return Err(Error::InvalidArgument("evaluation point must satisfy Im z > 0".into()));
    }
    let m = f.denom() as i64;
    let two_pi_i = Cx::new(R::zero(), R::from_i64(2) * R::pi());
    // q^{e/M} = exp(2 pi i z e / M)
    let at = |e: i64| (two_pi_i.clone() * z.clone() * Cx::real(R::from_ratio(e, m))).exp();
    let y = z.im.to_f64();
    let ln_q = -2.0 * std::f64::consts::PI * y / m as f64;

    let mut value = Cx::<R>::zero();
    let mut ln_terms = Vec::with_capacity(f.nnz());
    let len = f.coeffs().len();
    let sparse = f.nnz() * 16 < len;
    if sparse {
        for (e, c) in f.terms() {
            value = value + c.to_cx::<R>() * at(e);
            ln_terms.push(c.log_magnitude() + ln_q * e as f64);
        }
    } else {
        let step = at(1);
        let mut w = at(f.start());
        for (j, c) in f.coeffs().iter().enumerate() {
            if j > 0 {
                w = if j % 256 == 0 { at(f.start() + j as i64) } else { w * step.clone() };
            }
            if !c.is_zero() {
                value = value + c.to_cx::<R>() * w.clone();
                ln_terms.push(c.log_magnitude() + ln_q * (f.start() + j as i64) as f64);
            }
        }
    }
    let fit = fit_tail(f);
    let prec = f.prec_units() as f64 / m as f64;
    let tail_bound = fit.tail_bound(prec, y, f.denom());
    Ok(EvalResult { value, tail_bound, ln_abs_sum: log_sum_exp(&ln_terms), fit })
}

pub(crate) fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY || m.is_infinite() {
        return m;
    }
    m + xs.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}
