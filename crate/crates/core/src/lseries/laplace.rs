//! Forward Laplace transforms of test functions and two numerical inverses.
//!
//! The Talbot contour needs the image to decay in the left half-plane. For a
//! function supported on `[a, b]` the image grows like `e^{|s| b}` there, so
//! Talbot recovers `f(t)` only for `t > b`; the node-doubling check reports
//! the failure elsewhere. The Bromwich-line trapezoid rule has no such
//! restriction: with period `T` it returns `sum_k f(t + kT) e^{-sigma k T}`,
//! which is exact for compact support once `T` exceeds the support.

use std::f64::consts::PI;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use super::quad::{gk_adaptive_floor, tanh_sinh, QuadResult, TanhSinh};
use super::testfn::TestFunction;
use crate::arith::{Cx, Real, C64};
use crate::error::{Error, Result};

/// `(L phi)(s) = int_a^b e^{-st} phi(t) dt` by tanh-sinh at the working precision.
pub fn laplace<R: Real>(phi: &TestFunction, s: &Cx<R>, rel_tol: f64) -> Result<QuadResult<Cx<R>>> {
    let (a, b) = phi.support();
    let ms = -s.clone();
    tanh_sinh(|t: &R| (ms.clone().scale(t)).exp().scale(&phi.eval(t)), &R::from_f64(a), &R::from_f64(b), rel_tol, 16)
}

/// The same transform by adaptive Gauss-Kronrod in `f64`.
pub fn laplace_gk(phi: &TestFunction, s: &C64, rel_tol: f64) -> Result<QuadResult<C64>> {
    let (a, b) = phi.support();
    // the phase s t carries an absolute error of about eps |s| b
    let floor = 100.0 * f64::EPSILON * (1.0 + s.abs() * b);
    gk_adaptive_floor(|t| (-s.clone() * t).exp() * phi.eval(&t), a, b, &[], rel_tol, floor)
}

/// `int |phi|`.
pub fn l1_norm<R: Real>(phi: &TestFunction, rel_tol: f64) -> Result<R> {
    let (a, b) = phi.support();
    let r = tanh_sinh(|t: &R| Cx::real(phi.eval(t).abs()), &R::from_f64(a), &R::from_f64(b), rel_tol, 16)?;
    Ok(r.value.re)
}

/// `(L phi)(n * step)` for a range of integers `n` on a fixed tanh-sinh rule,
/// using `e^{-(n+1) step t} = e^{-n step t} e^{-step t}`.
pub struct LaplaceGrid<R: Real> {
    weighted: Vec<R>,
    nodes: Vec<R>,
    pub level: u32,
}

impl<R: Real> LaplaceGrid<R> {
    pub fn new(phi: &TestFunction, level: u32) -> Self {
        let (a, b) = phi.support();
        let rule = TanhSinh::new(&R::from_f64(a), &R::from_f64(b), level);
        let weighted = rule.nodes.iter().zip(&rule.weights).map(|(x, w)| phi.eval(x) * w.clone()).collect();
        LaplaceGrid { weighted, nodes: rule.nodes, level }
    }

    /// Values for `n = lo..=hi`.
    pub fn values(&self, step: &R, lo: i64, hi: i64) -> Vec<R> {
        let count = (hi - lo + 1).max(0) as usize;
        let mut out = vec![R::zero(); count];
        for (x, w) in self.nodes.iter().zip(&self.weighted) {
            if w.is_zero() {
                continue;
            }
            let ratio = (-(step.clone() * x.clone())).exp();
            let mut e = (-(step.clone() * x.clone() * R::from_i64(lo))).exp() * w.clone();
            for o in out.iter_mut() {
                *o = o.clone() + e.clone();
                e = e * ratio.clone();
            }
        }
        out
    }
}

/// Fixed Talbot contour `s(theta) = r theta (cot theta + i)`, `r = 2M/(5t)`, for
/// a real-valued original.
pub fn talbot<R: Real>(image: &impl Fn(&Cx<R>) -> Result<Cx<R>>, t: &R, nodes: usize) -> Result<R> {
    if !(*t > R::zero()) || nodes < 2 {
        return Err(Error::InvalidArgument("Talbot needs t > 0 and at least 2 nodes".into()));
    }
    let m = R::from_i64(nodes as i64);
    let r = R::from_i64(2) * m.clone() / (R::from_i64(5) * t.clone());
    let mut acc = (image(&Cx::real(r.clone()))? * Cx::real((r.clone() * t.clone()).exp())).re / R::from_i64(2);
    for k in 1..nodes {
        let th = R::from_i64(k as i64) * R::pi() / m.clone();
        let cot = th.cos() / th.sin();
        let s = Cx::new(r.clone() * th.clone() * cot.clone(), r.clone() * th.clone());
        let sigma = th.clone() + (th.clone() * cot.clone() - R::one()) * cot;
        let term = (s.scale(t)).exp() * image(&s)? * Cx::new(R::one(), sigma);
        acc = acc + term.re;
    }
    Ok(acc * r / m)
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct TalbotReport {
    pub value: f64,
    pub nodes: usize,
    pub doubled_value: f64,
    pub rel_change: f64,
}

/// Talbot at `nodes` and `2 nodes`; disagreement beyond `rel_tol` is an error
/// carrying both values.
pub fn talbot_checked<R: Real>(
    image: &impl Fn(&Cx<R>) -> Result<Cx<R>>,
    t: &R,
    nodes: usize,
    rel_tol: f64,
) -> Result<TalbotReport> {
    let v1 = talbot(image, t, nodes)?.to_f64();
    let v2 = talbot(image, t, 2 * nodes)?.to_f64();
    let change = (v1 - v2).abs() / v2.abs().max(1e-300);
    if !(change <= rel_tol) {
        return Err(Error::Convergence(format!(
            "Talbot at t = {}: {nodes} nodes give {v1:e}, {} nodes give {v2:e} (relative change {change:e})",
            t.to_f64(),
            2 * nodes
        )));
    }
    Ok(TalbotReport { value: v2, nodes, doubled_value: v2, rel_change: change })
}

/// Samples of an image on the line `Re s = sigma`, inverted by the trapezoid rule.
#[derive(Clone, Debug)]
pub struct Bromwich {
    pub sigma: f64,
    pub period: f64,
    /// `(omega_j, F(sigma + i omega_j))` for `j = -J..=J`.
    pub samples: Vec<(f64, C64)>,
}

impl Bromwich {
    /// Sample until `|F|` stays below `rel_tol * max |F|` for 64 consecutive
    /// frequencies on both sides.
    pub fn new(
        image: impl Fn(&C64) -> Result<C64>,
        period: f64,
        sigma: f64,
        rel_tol: f64,
        max_samples: usize,
    ) -> Result<Self> {
        let dw = 2.0 * PI / period;
        let mut samples = vec![(0.0, image(&C64::new(sigma, 0.0))?)];
        let mut peak = samples[0].1.abs();
        for dir in [1.0, -1.0] {
            let mut quiet = 0;
            let mut j = 1;
            while quiet < 64 {
                if samples.len() >= max_samples {
                    return Err(Error::Convergence(format!(
                        "Bromwich sampling reached {max_samples} frequencies (|omega| = {:.1}) before the image decayed",
                        j as f64 * dw
                    )));
                }
                let w = dir * j as f64 * dw;
                let v = image(&C64::new(sigma, w))?;
                peak = peak.max(v.abs());
                quiet = if v.abs() <= rel_tol * peak { quiet + 1 } else { 0 };
                samples.push((w, v));
                j += 1;
            }
        }
        Ok(Bromwich { sigma, period, samples })
    }

    /// Samples of `multiplier(s) (L phi)(s)` on the line, with `L phi` from the
    /// trapezoid rule on `points` nodes spanning one period (a single FFT;
    /// the phases are exact roots of unity, so the only noise is `eps ||phi||`).
    /// Each side is cut where the sample envelope reaches its minimum, i.e.
    /// where the image has decayed into the noise the multiplier amplifies.
    /// Spectrally accurate for test functions smooth to all orders.
    pub fn from_test_function(
        phi: &TestFunction,
        multiplier: impl Fn(&C64) -> Result<C64>,
        period: f64,
        sigma: f64,
        points: usize,
    ) -> Result<Self> {
        let (a, b) = phi.support();
        if !(period > b - a) {
            return Err(Error::InvalidArgument(format!("period {period} must exceed the support length {}", b - a)));
        }
        let h = period / points as f64;
        let mut buf: Vec<Complex<f64>> = (0..points)
            .map(|m| {
                let t = a + m as f64 * h;
                Complex::new((-sigma * t).exp() * phi.eval(&t), 0.0)
            })
            .collect();
        FftPlanner::new().plan_fft_forward(points).process(&mut buf);
        let dw = 2.0 * PI / period;
        let value = |j: i64| -> Result<(f64, C64)> {
            let w = j as f64 * dw;
            let c = buf[j.rem_euclid(points as i64) as usize];
            let f = C64::new(c.re, c.im) * C64::cis(&(-w * a)) * h;
            Ok((w, multiplier(&C64::new(sigma, w))? * f))
        };
        let half = (points / 2) as i64 - 1;
        let mut samples = vec![value(0)?];
        for dir in [1i64, -1] {
            let side: Vec<(f64, C64)> = (1..=half).map(|j| value(dir * j)).collect::<Result<_>>()?;
            let mags: Vec<f64> = side.iter().map(|(_, v)| v.abs()).collect();
            const WINDOW: usize = 16;
            let envelope = |j: usize| mags[j..j + WINDOW].iter().cloned().fold(0.0, f64::max);
            let cut = (0..mags.len().saturating_sub(WINDOW)).fold(0, |best, j| if envelope(j) < envelope(best) { j } else { best });
            samples.extend(side.into_iter().take(cut));
        }
        Ok(Bromwich { sigma, period, samples })
    }

    /// `f(t)` (plus the aliases `f(t + kT) e^{-sigma k T}`, `k != 0`).
    pub fn eval(&self, t: f64) -> C64 {
        let dw = 2.0 * PI / self.period;
        let s = self.samples.iter().fold(C64::zero(), |acc, (w, v)| acc + v.clone() * C64::cis(&(w * t)));
        s * ((self.sigma * t).exp() * dw / (2.0 * PI))
    }
}
