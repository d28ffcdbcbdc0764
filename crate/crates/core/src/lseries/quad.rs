//! Quadrature: adaptive Gauss-Kronrod (21 points) in `f64` and tanh-sinh at
//! any precision.

use crate::arith::{Cx, Real, C64};
use crate::error::{Error, Result};

const XGK: [f64; 11] = [
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.0,
];
const WGK: [f64; 11] = [
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077715983997520,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
];
const WG: [f64; 5] = [
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
];

#[derive(Clone, Debug)]
pub struct QuadResult<T> {
    pub value: T,
    pub error: f64,
    /// Integral of the absolute value, the natural scale for `error`.
    pub abs_integral: f64,
    pub evaluations: usize,
}

fn gk21(f: &impl Fn(f64) -> C64, a: f64, b: f64) -> (C64, f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc.clone() * WGK[10];
    let mut g = C64::zero();
    let mut abs = fc.abs() * WGK[10];
    for j in 0..10 {
        let x = h * XGK[j];
        let (f1, f2) = (f(c - x), f(c + x));
        abs += WGK[j] * (f1.abs() + f2.abs());
        let s = f1 + f2;
        k = k + s.clone() * WGK[j];
        if j % 2 == 1 {
            g = g + s * WG[j / 2];
        }
    }
    let k = k * h;
    let g = g * h;
    ((k.clone()), (k - g).abs(), abs * h.abs())
}

/// Adaptive bisection with GK21 panels over `[a, b]` split at `breaks`.
pub fn gk_adaptive(f: impl Fn(f64) -> C64, a: f64, b: f64, breaks: &[f64], rel_tol: f64) -> Result<QuadResult<C64>> {
    gk_adaptive_floor(f, a, b, breaks, rel_tol, 1e3 * f64::EPSILON)
}

/// As [`gk_adaptive`], also accepting an error below `floor * int |f|`, the
/// level at which the integrand values themselves are uncertain.
pub fn gk_adaptive_floor(
    f: impl Fn(f64) -> C64,
    a: f64,
    b: f64,
    breaks: &[f64],
    rel_tol: f64,
    floor: f64,
) -> Result<QuadResult<C64>> {
    let mut pts = vec![a];
    pts.extend(breaks.iter().copied().filter(|x| *x > a && *x < b));
    pts.push(b);
    let mut panels: Vec<(f64, f64, C64, f64, f64)> =
        pts.windows(2).map(|w| { let (v, e, s) = gk21(&f, w[0], w[1]); (w[0], w[1], v, e, s) }).collect();
    let mut evals = 21 * panels.len();
    for _ in 0..5000 {
        let total: C64 = panels.iter().fold(C64::zero(), |s, p| s + p.2.clone());
        let err: f64 = panels.iter().map(|p| p.3).sum();
        let abs: f64 = panels.iter().map(|p| p.4).sum();
        if err <= rel_tol * total.abs().max(1e-300) || err <= rel_tol.max(floor) * abs || abs == 0.0 {
            return Ok(QuadResult { value: total, error: err, abs_integral: abs, evaluations: evals });
        }
        let (i, _) = panels.iter().enumerate().fold((0, -1.0), |best, (i, p)| if p.3 > best.1 { (i, p.3) } else { best });
        let (pa, pb, ..) = panels.swap_remove(i);
        let m = 0.5 * (pa + pb);
        if !(m > pa && m < pb) {
            break;
        }
        for (x0, x1) in [(pa, m), (m, pb)] {
            let (v, e, s) = gk21(&f, x0, x1);
            panels.push((x0, x1, v, e, s));
        }
        evals += 42;
    }
    let total: C64 = panels.iter().fold(C64::zero(), |s, p| s + p.2.clone());
    let err: f64 = panels.iter().map(|p| p.3).sum();
    Err(Error::Convergence(format!(
        "adaptive Gauss-Kronrod stopped at estimated error {err:e} (value {:e}) after {evals} evaluations",
        total.abs()
    )))
}

/// Composite GK21 rule on `panels` equal panels: nodes with Kronrod weights
/// and embedded Gauss weights (zero at the Kronrod-only nodes).
pub fn gk_composite_rule(a: f64, b: f64, panels: usize) -> Vec<(f64, f64, f64)> {
    let width = (b - a) / panels as f64;
    let mut out = Vec::with_capacity(21 * panels);
    for p in 0..panels {
        let c = a + (p as f64 + 0.5) * width;
        let h = 0.5 * width;
        out.push((c, WGK[10] * h, 0.0));
        for j in 0..10 {
            let wg = if j % 2 == 1 { WG[j / 2] * h } else { 0.0 };
            out.push((c - h * XGK[j], WGK[j] * h, wg));
            out.push((c + h * XGK[j], WGK[j] * h, wg));
        }
    }
    out
}

/// Tanh-sinh nodes on `[a, b]` at step `2^{-level}`.
#[derive(Clone, Debug)]
pub struct TanhSinh<R: Real> {
    pub nodes: Vec<R>,
    pub weights: Vec<R>,
    pub level: u32,
}

impl<R: Real> TanhSinh<R> {
    pub fn new(a: &R, b: &R, level: u32) -> Self {
        let bits = -R::epsilon().to_f64().log2();
        // nodes reach within eps^2 of the endpoints, so x^{-1/2}-type endpoint
        // singularities lose nothing to truncation
        let t_max = (2.0 * bits * std::f64::consts::LN_2 / std::f64::consts::PI).asinh();
        let h = R::from_f64(0.5f64.powi(level as i32));
        let n = (t_max * 2f64.powi(level as i32)).ceil() as i64;
        let half_pi = R::pi() / R::from_i64(2);
        let width = b.clone() - a.clone();
        let mut nodes = Vec::with_capacity(2 * n as usize + 1);
        let mut weights = Vec::with_capacity(2 * n as usize + 1);
        for j in -n..=n {
            let t = h.clone() * R::from_i64(j);
            let sh = (t.exp() - (-t.clone()).exp()) / R::from_i64(2);
            let ch = (t.exp() + (-t.clone()).exp()) / R::from_i64(2);
            let u = half_pi.clone() * sh;
            let e = (-(u.abs() * R::from_i64(2))).exp();
            let one_e = R::one() + e.clone();
            // distance to the nearer endpoint, then the node itself
            let near = width.clone() * e.clone() / one_e.clone();
            let x = if j < 0 { a.clone() + near } else { b.clone() - near };
            let w = width.clone() * half_pi.clone() * ch * R::from_i64(2) * e / (one_e.clone() * one_e) * h.clone();
            if w.to_f64() == 0.0 && j != 0 {
                continue;
            }
            nodes.push(x);
            weights.push(w);
        }
        TanhSinh { nodes, weights, level }
    }

    pub fn apply(&self, f: impl Fn(&R) -> Cx<R>) -> (Cx<R>, f64) {
        let mut s = Cx::zero();
        let mut abs = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            let v = f(x);
            abs += v.abs().to_f64() * w.to_f64();
            s = s + v.scale(w);
        }
        (s, abs)
    }
}

/// Tanh-sinh with level doubling until successive levels agree to `rel_tol`.
pub fn tanh_sinh<R: Real>(f: impl Fn(&R) -> Cx<R>, a: &R, b: &R, rel_tol: f64, max_level: u32) -> Result<QuadResult<Cx<R>>> {
    let mut prev: Option<Cx<R>> = None;
    let mut evals = 0;
    for level in 2..=max_level {
        let rule = TanhSinh::new(a, b, level);
        evals += rule.nodes.len();
        let (v, abs) = rule.apply(&f);
        if let Some(p) = prev {
            let err = (v.clone() - p).abs().to_f64();
            if err <= rel_tol * v.abs().to_f64() || err <= rel_tol * 1e-3 * abs || abs == 0.0 {
                return Ok(QuadResult { value: v, error: err, abs_integral: abs, evaluations: evals });
            }
        }
        prev = Some(v);
    }
    Err(Error::Convergence(format!("tanh-sinh did not converge by level {max_level} ({evals} evaluations)")))
}
