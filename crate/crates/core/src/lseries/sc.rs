//! Explorer for the sufficient condition
//!
//! `b (Dp/2pi)^{k-1} h(Dp/2pi) L(phi(1/(Nx)) (Nx)^{k-2})(p) = L((Nx)^{-k} A(1/(Nx)))(p)`,
//! `A = alpha_D(phi)`.
//!
//! The left side is a forward transform. The right side needs `A` in the time
//! domain, which is taken either from its closed form (`Inversion::Exact`) or
//! from a numerical inverse Laplace transform of its image
//! (`Inversion::Numerical`: Bromwich trapezoid up to the support end, Talbot
//! beyond; `Inversion::Talbot` uses Talbot throughout and reports its failures
//! on compactly supported originals). With `t = 1/(Nx)` the right side is
//! `(1/N) int e^{-p/(Nt)} t^{k-2} A(t) dt`.

use std::f64::consts::PI;

use num_integer::gcd;
use serde::Serialize;

use super::alpha::{alpha_multiplier, alpha_time, HFunction};
use super::laplace::{laplace_gk, talbot, talbot_checked, Bromwich};
use super::quad::gk_composite_rule;
use super::testfn::TestFunction;
use crate::arith::C64;
use crate::characters::DirichletCharacter;
use crate::error::{Error, Result};
use crate::forms::HalfWeight;

#[derive(Clone, Debug)]
pub struct ScParams {
    pub k: HalfWeight,
    pub n: u64,
    pub n_prime: u64,
    pub d: u64,
    pub chi: DirichletCharacter,
    pub psi: DirichletCharacter,
    pub psi_prime: DirichletCharacter,
    pub lambda: C64,
    pub h: HFunction,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Inversion {
    Exact,
    /// Bromwich trapezoid up to the support end, Talbot beyond.
    Numerical,
    /// Talbot everywhere, with the node-doubling check.
    Talbot,
}

#[derive(Clone, Debug)]
pub struct ScOptions {
    pub inversion: Inversion,
    pub rel_tol: f64,
    pub max_samples: usize,
    pub talbot_nodes: usize,
    pub panels: usize,
}

impl Default for ScOptions {
    fn default() -> Self {
        ScOptions { inversion: Inversion::Numerical, rel_tol: 1e-11, max_samples: 40_000, talbot_nodes: 32, panels: 96 }
    }
}

/// `N'/N` or `N/N'` as an integer, with `true` when `N | N'`.
fn level_ratio(n: u64, n_prime: u64) -> Result<(i64, bool)> {
    if n_prime % n == 0 {
        Ok(((n_prime / n) as i64, true))
    } else if n % n_prime == 0 {
        Ok(((n / n_prime) as i64, false))
    } else {
        Err(Error::OutOfContract(format!("b is defined when N | N' or N' | N, got N = {n}, N' = {n_prime}")))
    }
}

/// The constant `b`.
///
/// Half-integral `k`: `lambda psi_D((-1)^{2k} N'/N) chi(N'/N) psi'(D)/psi(D) (N N')^{-k/2} N'`.
/// Integral `k`: `lambda (-1)^{k-1} chi(N'/N) psi'(D)/psi(D) (N N')^{-k/2} N'`.
/// A ratio `N'/N` below 1 is read as the inverse of `N/N'` in the unit group.
pub fn b_factor(p: &ScParams) -> Result<C64> {
    if p.n == 0 || p.n_prime == 0 || p.d == 0 {
        return Err(Error::InvalidArgument("N, N' and D must be positive".into()));
    }
    if gcd(p.d, p.n * p.n_prime) != 1 {
        return Err(Error::InvalidArgument(format!("gcd(D, N N') must be 1 (D = {}, N N' = {})", p.d, p.n * p.n_prime)));
    }
    let (r, up) = level_ratio(p.n, p.n_prime)?;
    let chi_r = p.chi.value_cx::<f64>(r);
    let chi_r = if up { chi_r } else { chi_r.conj() };
    let psi_d = p.psi.value_cx::<f64>(p.d as i64);
    if psi_d.abs() < 0.5 {
        return Err(Error::InvalidArgument(format!("psi(D) = 0 for D = {}", p.d)));
    }
    let ratio = p.psi_prime.value_cx::<f64>(p.d as i64) / psi_d;
    let kf = p.k.as_f64();
    let scale = ((p.n * p.n_prime) as f64).powf(-kf / 2.0) * p.n_prime as f64;
    let sign = if p.k.is_integral() {
        if (p.k.doubled / 2 - 1).rem_euclid(2) == 0 {
            1.0
        } else {
            -1.0
        }
    } else {
        // psi_D is real, so psi_D(r^{-1}) = psi_D(r)
        let psi_dd = DirichletCharacter::psi_d(p.d as i64)?;
        psi_dd.value_sign(-r).unwrap_or(0) as f64
    };
    Ok(p.lambda.clone() * chi_r * ratio * (scale * sign))
}

#[derive(Clone, Debug, Serialize)]
pub struct ScRecord {
    pub p: [f64; 2],
    pub lhs: [f64; 2],
    pub rhs: [f64; 2],
    pub residual: f64,
    /// `|Kronrod - Gauss|` of the right-side quadrature, relative.
    pub quad_error: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScReport {
    pub weight: String,
    pub n: u64,
    pub n_prime: u64,
    pub d: u64,
    pub h: String,
    pub phi: String,
    pub inversion: Inversion,
    pub b: [f64; 2],
    pub records: Vec<ScRecord>,
    pub max_residual: f64,
    pub bromwich_samples: usize,
}

fn pair(z: &C64) -> [f64; 2] {
    [z.re, z.im]
}

/// The time-domain `A` on `[lo, hi]` (and Talbot-based values past `hi`).
enum TimeSide {
    Closed(super::alpha::AlphaTime),
    Numerical { bromwich: Bromwich, split: f64, image: Box<dyn Fn(&C64) -> Result<C64>>, nodes: usize },
    Talbot { image: Box<dyn Fn(&C64) -> Result<C64>>, nodes: usize, tol: f64 },
}

impl TimeSide {
    fn eval(&self, t: f64) -> Result<C64> {
        match self {
            TimeSide::Closed(a) => Ok(C64::new(a.eval(&t)?, 0.0)),
            TimeSide::Numerical { bromwich, split, image, nodes } => {
                if t <= *split {
                    Ok(bromwich.eval(t))
                } else {
                    Ok(C64::new(talbot(image, &t, *nodes)?, 0.0))
                }
            }
            // the doubled rule is the configured one
            TimeSide::Talbot { image, nodes, tol } => Ok(C64::new(talbot_checked(image, &t, (*nodes / 2).max(2), *tol)?.value, 0.0)),
        }
    }
}

/// Left end and (possibly infinite) right end of the support of `A`, when
/// known from the form of `h`.
fn time_support(phi: &TestFunction, p: &ScParams) -> (f64, f64) {
    let (a, b) = phi.support();
    let tau = match p.h {
        HFunction::ExpDecay { beta } => beta * p.d as f64 / (2.0 * PI),
        _ => 0.0,
    };
    let compact = p.k.is_integral() && matches!(p.h, HFunction::Const { .. } | HFunction::ExpDecay { .. });
    (a + tau, if compact { b + tau } else { f64::INFINITY })
}

pub fn sc_residual(params: &ScParams, phi: &TestFunction, points: &[C64], opts: &ScOptions) -> Result<ScReport> {
    let b = b_factor(params)?;
    let k = params.k;
    let n = params.n as f64;
    let phi_w = phi.fricke(k.dual(), params.n)?;
    let (lo, hi) = time_support(phi, params);
    let (phi_start, phi_end) = phi.support();
    // end of the Bromwich range; Talbot (or the closed form) takes over past it
    let split = if hi.is_finite() { hi } else { 1.5 * (phi_end + lo - phi_start) };

    let image = {
        let (phi, d, h, tol) = (phi.clone(), params.d, params.h.clone(), opts.rel_tol);
        move |s: &C64| -> Result<C64> {
            let m = alpha_multiplier(s, d, k, &h)?;
            if m.is_zero() {
                return Ok(m);
            }
            Ok(m * laplace_gk(&phi, s, tol)?.value)
        }
    };
    let mut samples = 0;
    let side = match opts.inversion {
        Inversion::Exact => TimeSide::Closed(alpha_time(phi, params.d, k, &params.h)?),
        Inversion::Numerical => {
            let (period, sigma) =
                if hi.is_finite() { (1.5 * (hi - lo), 0.0) } else { (4.0 * split, 18.0 / (4.0 * split)) };
            let bromwich = if phi.smoothness() == u32::MAX {
                // enough nodes to resolve |omega| up to about 3e4
                let points = ((3e4 * period / PI) as usize).next_power_of_two();
                let (d, h) = (params.d, params.h.clone());
                Bromwich::from_test_function(phi, move |s| alpha_multiplier(s, d, k, &h), period, sigma, points)?
            } else {
                Bromwich::new(&image, period, sigma, opts.rel_tol * 0.1, opts.max_samples)?
            };
            samples = bromwich.samples.len();
            TimeSide::Numerical { bromwich, split, image: Box::new(image.clone()), nodes: opts.talbot_nodes }
        }
        Inversion::Talbot => TimeSide::Talbot { image: Box::new(image.clone()), nodes: opts.talbot_nodes, tol: 1e-6 },
    };

    // right side: fixed composite rule in t, shared by every p
    let mut rule: Vec<(f64, f64, f64, C64)> = Vec::new();
    for (t, wk, wg) in gk_composite_rule(lo, split, opts.panels) {
        let a = side.eval(t)?;
        rule.push((t, wk, wg, a.scale(&t.powf(k.as_f64() - 2.0))));
    }
    if !hi.is_finite() {
        // t = T/u on (0, 1], dt = T/u^2 du
        let t0 = split;
        for (u, wk, wg) in gk_composite_rule(0.0, 1.0, opts.panels) {
            let t = t0 / u;
            let a = side.eval(t)?;
            let jac = t0 / (u * u);
            rule.push((t, wk * jac, wg * jac, a.scale(&t.powf(k.as_f64() - 2.0))));
        }
    }

    let mut records = Vec::with_capacity(points.len());
    let mut max_residual: f64 = 0.0;
    for p in points {
        let lhs = b.clone() * alpha_multiplier(p, params.d, k, &params.h)? * laplace_gk(&phi_w, p, opts.rel_tol)?.value;
        let (mut rk, mut rg) = (C64::zero(), C64::zero());
        for (t, wk, wg, at) in &rule {
            let v = (-(p.clone()) * (1.0 / (n * t))).exp() * at.clone();
            rk = rk + v.clone() * *wk;
            rg = rg + v * *wg;
        }
        let rhs = rk.clone() * (1.0 / n);
        let quad_error = (rk.clone() - rg).abs() / rk.abs().max(1e-300);
        let s = lhs.abs().max(rhs.abs());
        let residual = if s == 0.0 { 0.0 } else { (lhs.clone() - rhs.clone()).abs() / s };
        max_residual = max_residual.max(residual);
        records.push(ScRecord { p: pair(p), lhs: pair(&lhs), rhs: pair(&rhs), residual, quad_error });
    }
    Ok(ScReport {
        weight: k.to_string(),
        n: params.n,
        n_prime: params.n_prime,
        d: params.d,
        h: params.h.to_string(),
        phi: phi.to_string(),
        inversion: opts.inversion,
        b: pair(&b),
        records,
        max_residual,
        bromwich_samples: samples,
    })
}

/// `count` points on the positive real axis, evenly spaced in `[lo, hi]`.
pub fn real_grid(lo: f64, hi: f64, count: usize) -> Vec<C64> {
    (0..count)
        .map(|j| {
            let x = if count == 1 { lo } else { lo + (hi - lo) * j as f64 / (count - 1) as f64 };
            C64::new(x, 0.0)
        })
        .collect()
}
