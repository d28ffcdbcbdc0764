//! Numerical certification of modular transformation laws.
//!
//! Evaluation points are drawn on or near the isometric circle `|cz + d| = 1`
//! of each sampled `gamma`, so that `Im z` and `Im gamma z` stay comparable
//! and the truncation tails on both sides are controlled by the same height.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::arith::{Angle, Coeff, Cx, Real, C64};
use crate::characters::{eps, kronecker};
use crate::error::{Error, Result};
use crate::forms::{FormMeta, HalfWeight};
use crate::qseries::{eval_series, TailFit};
use crate::qseries::QSeries;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct GroupElement {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl GroupElement {
    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        if a as i128 * d as i128 - b as i128 * c as i128 != 1 {
            return Err(Error::InvalidArgument(format!("({a} {b}; {c} {d}) does not have determinant 1")));
        }
        Ok(GroupElement { a, b, c, d })
    }

    pub fn identity() -> Self {
        GroupElement { a: 1, b: 0, c: 0, d: 1 }
    }

    pub fn translation(n: i64) -> Self {
        GroupElement { a: 1, b: n, c: 0, d: 1 }
    }

    pub fn in_gamma0(&self, n: u64) -> bool {
        self.c % n as i64 == 0
    }

    pub fn mul(&self, o: &Self) -> Self {
        GroupElement {
            a: self.a * o.a + self.b * o.c,
            b: self.a * o.b + self.b * o.d,
            c: self.c * o.a + self.d * o.c,
            d: self.c * o.b + self.d * o.d,
        }
    }

    pub fn neg(&self) -> Self {
        GroupElement { a: -self.a, b: -self.b, c: -self.c, d: -self.d }
    }

    pub fn as_array(&self) -> [i64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    /// `cz + d`.
    pub fn j<R: Real>(&self, z: &Cx<R>) -> Cx<R> {
        z.scale(&R::from_i64(self.c)) + Cx::real(R::from_i64(self.d))
    }

    /// `(az + b) / (cz + d)`.
    pub fn act<R: Real>(&self, z: &Cx<R>) -> Cx<R> {
        let num = z.scale(&R::from_i64(self.a)) + Cx::real(R::from_i64(self.b));
        num / self.j(z)
    }
}

impl std::fmt::Display for GroupElement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({} {}; {} {})", self.a, self.b, self.c, self.d)
    }
}

/// The root of unity `(c/d) eps_d^{2k}` for half-integral `k`, and 1 for
/// integral `k`.
pub fn theta_multiplier(g: &GroupElement, k: HalfWeight) -> Result<Angle> {
    if k.is_integral() {
        return Ok(Angle::ONE);
    }
    if g.c % 4 != 0 {
        return Err(Error::InvalidArgument(format!("half-integral slash needs gamma in Gamma0(4), got {g}")));
    }
    let sign = match kronecker(g.c, g.d) {
        1 => Angle::ONE,
        -1 => Angle::new(1, 2),
        _ => return Err(Error::InvalidArgument(format!("gcd(c, d) != 1 for {g}"))),
    };
    Ok(sign.add(eps(g.d)?.times(k.doubled)))
}

/// `(c/d) eps_d^{2k} (cz + d)^{-k}` with the principal branch.
pub fn slash_factor<R: Real>(g: &GroupElement, k: HalfWeight, z: &Cx<R>) -> Result<Cx<R>> {
    let mult = theta_multiplier(g, k)?.to_cx::<R>();
    let e = -R::from_ratio(k.doubled, 2);
    Ok(mult * g.j(z).powr(&e))
}

/// A value together with a heuristic bound on its truncation error and the
/// magnitude scale `sum |c_n q^n|` it was computed from.
#[derive(Clone, Debug)]
pub struct PointValue<R> {
    pub value: Cx<R>,
    pub tail_bound: f64,
    pub scale: f64,
}

/// Anything that can be evaluated on the upper half-plane with a tail estimate.
pub trait Evaluate<R: Real> {
    fn evaluate(&self, z: &Cx<R>) -> Result<PointValue<R>>;
}

impl<C: Coeff, R: Real> Evaluate<R> for QSeries<C> {
    fn evaluate(&self, z: &Cx<R>) -> Result<PointValue<R>> {
        let e = eval_series(self, z)?;
        let scale = e.abs_sum();
        Ok(PointValue { value: e.value, tail_bound: e.tail_bound, scale })
    }
}

/// Wraps a closure as an [`Evaluate`] implementor.
pub struct FnEval<F>(pub F);

impl<R: Real, F: Fn(&Cx<R>) -> Result<PointValue<R>>> Evaluate<R> for FnEval<F> {
    fn evaluate(&self, z: &Cx<R>) -> Result<PointValue<R>> {
        (self.0)(z)
    }
}

fn check_tail<R: Real>(p: &PointValue<R>, tail_tol: Option<f64>) -> Result<()> {
    if let Some(tol) = tail_tol {
        let scale = p.scale.max(p.value.abs().to_f64());
        if !(p.tail_bound <= tol * scale) {
            return Err(Error::TailBound { bound: p.tail_bound / scale.max(f64::MIN_POSITIVE), tol });
        }
    }
    Ok(())
}

/// `(f|_k gamma)(z)`. With `tail_tol` set, a relative tail bound above it at
/// `gamma z` is an error.
pub fn slash_value<R: Real>(
    f: &impl Evaluate<R>,
    g: &GroupElement,
    meta: &FormMeta,
    z: &Cx<R>,
    tail_tol: Option<f64>,
) -> Result<PointValue<R>> {
    if !(z.im > R::zero()) {
        return Err(Error::InvalidArgument("Im z must be positive".into()));
    }
    let factor = slash_factor(g, meta.weight, z)?;
    let w = g.act(z);
    let at = f.evaluate(&w)?;
    check_tail(&at, tail_tol)?;
    let s = factor.abs().to_f64();
    Ok(PointValue { value: factor * at.value, tail_bound: s * at.tail_bound, scale: s * at.scale })
}

/// `(f|_k W_M)(z) = f(-1/(Mz)) (sqrt(M) z)^{-k}`.
pub fn fricke_slash_value<R: Real>(
    f: &impl Evaluate<R>,
    m: u64,
    k: HalfWeight,
    z: &Cx<R>,
    tail_tol: Option<f64>,
) -> Result<PointValue<R>> {
    if m == 0 || !(z.im > R::zero()) {
        return Err(Error::InvalidArgument("need M > 0 and Im z > 0".into()));
    }
    let mr = R::from_i64(m as i64);
    let w = -(z.scale(&mr)).inv();
    let at = f.evaluate(&w)?;
    check_tail(&at, tail_tol)?;
    let factor = z.scale(&mr.sqrt()).powr(&-R::from_ratio(k.doubled, 2));
    let s = factor.abs().to_f64();
    Ok(PointValue { value: factor * at.value, tail_bound: s * at.tail_bound, scale: s * at.scale })
}

/// Seeded sample of `Gamma0(N)` with `0 < c <= c_max N`.
///
/// The first element is always `(1 0; N 1)`. `c` is taken positive since
/// `gamma` and `-gamma` act identically on the upper half-plane.
pub fn sample_gamma0(n: u64, c_max: u64, count: usize, seed: u64) -> Vec<GroupElement> {
    let n = n.max(1) as i64;
    let c_max = c_max.max(1) as i64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    if count > 0 {
        out.push(GroupElement { a: 1, b: 0, c: n, d: 1 });
    }
    let mut guard = 0;
    while out.len() < count && guard < 100 * count + 100 {
        guard += 1;
        let c = n * rng.gen_range(1..=c_max);
        let d = rng.gen_range(-3 * c..=3 * c);
        if num_integer::gcd(c, d) != 1 {
            continue;
        }
        // a d = 1 mod c
        let a = mod_inverse(d, c);
        let b = (a as i128 * d as i128 - 1) / c as i128;
        let g = GroupElement { a, b: b as i64, c, d };
        debug_assert!(GroupElement::new(g.a, g.b, g.c, g.d).is_ok());
        if !out.contains(&g) {
            out.push(g);
        }
    }
    out
}

fn mod_inverse(d: i64, c: i64) -> i64 {
    if c == 1 {
        return 0;
    }
    let e = num_integer::Integer::extended_gcd(&d.rem_euclid(c), &c);
    e.x.rem_euclid(c)
}

/// A point near the isometric circle of `g`: `z = -d/c + r e^{i theta} / c`
/// with `r` in `[0.85, 1.15]` and `theta` in `[pi/4, 3 pi/4]`, so that
/// `Im gamma z = Im z / r^2`.
pub fn isometric_point(g: &GroupElement, rng: &mut impl Rng) -> C64 {
    let r = rng.gen_range(0.85..1.15);
    let th = rng.gen_range(PI / 4.0..3.0 * PI / 4.0);
    if g.c == 0 {
        return C64::new(rng.gen_range(-0.5..0.5), rng.gen_range(0.8..1.2));
    }
    let c = g.c as f64;
    C64::new(-(g.d as f64) / c + r * th.cos() / c, r * th.sin() / c)
}

/// `count` seeded `(gamma, z)` pairs for `Gamma0(N)`.
pub fn sample_pairs(n: u64, c_max: u64, count: usize, seed: u64) -> Vec<(GroupElement, C64)> {
    let gs = sample_gamma0(n, c_max, count, seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    gs.into_iter().map(|g| (g, isometric_point(&g, &mut rng))).collect()
}

/// Points `r e^{i theta} / sqrt(M)` near the fixed circle of `W_M`.
pub fn fricke_points(m: u64, count: usize, seed: u64) -> Vec<C64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s = (m as f64).sqrt();
    (0..count)
        .map(|_| {
            let r: f64 = rng.gen_range(0.8..1.25);
            let th: f64 = rng.gen_range(PI / 5.0..4.0 * PI / 5.0);
            C64::new(r * th.cos() / s, r * th.sin() / s)
        })
        .collect()
}

/// Smallest absolute precision (in units of `q`) for which the fitted tail at
/// height `y` falls below `target`.
pub fn required_precision(fit: &TailFit, y: f64, denom: u64, target: f64) -> Option<f64> {
    fit.required_precision(y, denom, target)
}

fn pair_of<R: Real>(z: &Cx<R>) -> [f64; 2] {
    [z.re.to_f64(), z.im.to_f64()]
}

#[derive(Clone, Debug, Serialize)]
pub struct PairRecord {
    pub gamma: [i64; 4],
    pub z: [f64; 2],
    pub lhs: [f64; 2],
    pub rhs: [f64; 2],
    pub residual: f64,
    /// Relative truncation bound of the two sides (heuristic).
    pub tail_bound: f64,
    pub admissible: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ResidualReport {
    pub records: Vec<PairRecord>,
    pub max_residual: f64,
    pub admissible: usize,
    pub skipped: usize,
    pub tol: f64,
    pub pass: bool,
    pub tail_heuristic: bool,
}

/// `max |(f|gamma)(z) - psi(d) f(z)| / max(|lhs|, |rhs|)` over the admissible
/// pairs. A pair is admissible when the relative tail of both sides is below
/// `tol / 10`.
pub fn automorphy_residual<R: Real>(
    f: &impl Evaluate<R>,
    meta: &FormMeta,
    pairs: &[(GroupElement, Cx<R>)],
    tol: f64,
) -> Result<ResidualReport> {
    let mut records = Vec::with_capacity(pairs.len());
    for (g, z) in pairs {
        if !g.in_gamma0(meta.level) {
            return Err(Error::InvalidArgument(format!("{g} is not in Gamma0({})", meta.level)));
        }
        let lhs = slash_value(f, g, meta, z, None)?;
        let base = f.evaluate(z)?;
        let chi = meta.character.value_cx::<R>(g.d);
        let rhs = chi * base.value.clone();
        let la = lhs.value.abs().to_f64();
        let ra = rhs.abs().to_f64();
        let scale = la.max(ra);
        let diff = (lhs.value.clone() - rhs.clone()).abs().to_f64();
        let (residual, tail) = if scale > 0.0 {
            (diff / scale, (lhs.tail_bound + base.tail_bound) / scale)
        } else {
            (0.0, if lhs.tail_bound + base.tail_bound > 0.0 { f64::INFINITY } else { 0.0 })
        };
        records.push(PairRecord {
            gamma: g.as_array(),
            z: pair_of(z),
            lhs: pair_of(&lhs.value),
            rhs: pair_of(&rhs),
            residual,
            tail_bound: tail,
            admissible: tail <= tol / 10.0,
        });
    }
    let admissible = records.iter().filter(|r| r.admissible).count();
    if admissible == 0 {
        return Err(Error::InvalidArgument("no admissible (gamma, z) pairs; raise the truncation order".into()));
    }
    let max_residual = records.iter().filter(|r| r.admissible).map(|r| r.residual).fold(0.0, f64::max);
    Ok(ResidualReport {
        skipped: records.len() - admissible,
        records,
        max_residual,
        admissible,
        tol,
        pass: max_residual < tol,
        tail_heuristic: true,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct FrickeRecord {
    pub z: [f64; 2],
    pub lhs: [f64; 2],
    pub rhs: [f64; 2],
    /// `(f|W)(z) / g(z)`.
    pub ratio: [f64; 2],
    pub residual: Option<f64>,
    pub tail_bound: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct FrickeReport {
    pub level: u64,
    pub records: Vec<FrickeRecord>,
    /// Ratio at the first point, derived rather than assumed.
    pub derived_constant: [f64; 2],
    /// `max |ratio_i - ratio_0| / |ratio_0|`.
    pub spread: f64,
    pub expected_constant: Option<[f64; 2]>,
    pub max_residual: Option<f64>,
    pub max_tail: f64,
    pub tol: f64,
    pub pass: bool,
}

/// Check `f|_k W_M = c g` at the given points. Without `expected` the
/// constant is derived from the first point and the test is its stability.
pub fn fricke_relation<R: Real>(
    f: &impl Evaluate<R>,
    g: &impl Evaluate<R>,
    m: u64,
    k: HalfWeight,
    expected: Option<&Cx<R>>,
    points: &[Cx<R>],
    tol: f64,
) -> Result<FrickeReport> {
    if points.is_empty() {
        return Err(Error::InvalidArgument("no sample points".into()));
    }
    let mut records = Vec::new();
    let mut ratios: Vec<Cx<R>> = Vec::new();
    let mut max_tail: f64 = 0.0;
    for z in points {
        let lhs = fricke_slash_value(f, m, k, z, None)?;
        let rhs = g.evaluate(z)?;
        if rhs.value.is_zero() {
            return Err(Error::InvalidArgument("g vanishes at a sample point".into()));
        }
        let ratio = lhs.value.clone() / rhs.value.clone();
        let residual = expected.map(|c| {
            let cr = c.clone() * rhs.value.clone();
            let s = lhs.value.abs().to_f64().max(cr.abs().to_f64());
            (lhs.value.clone() - cr).abs().to_f64() / s
        });
        let scale = lhs.value.abs().to_f64().max(rhs.value.abs().to_f64());
        let tail = (lhs.tail_bound + rhs.tail_bound) / scale;
        max_tail = max_tail.max(tail);
        records.push(FrickeRecord {
            z: pair_of(z),
            lhs: pair_of(&lhs.value),
            rhs: pair_of(&rhs.value),
            ratio: pair_of(&ratio),
            residual,
            tail_bound: tail,
        });
        ratios.push(ratio);
    }
    let r0 = ratios[0].clone();
    let spread =
        ratios.iter().map(|r| (r.clone() - r0.clone()).abs().to_f64()).fold(0.0, f64::max) / r0.abs().to_f64();
    let max_residual = if expected.is_some() {
        Some(records.iter().filter_map(|r| r.residual).fold(0.0, f64::max))
    } else {
        None
    };
    let pass = spread < tol && max_residual.map_or(true, |r| r < tol) && max_tail <= tol / 10.0;
    Ok(FrickeReport {
        level: m,
        records,
        derived_constant: pair_of(&r0),
        spread,
        expected_constant: expected.map(pair_of),
        max_residual,
        max_tail,
        tol,
        pass,
    })
}

/// Truncated Taylor expansion `g(z + e) = sum_j c_j w^j` in `w = 2 pi i e`,
/// so that `D^j g(z) = j! c_j` for the normalized derivative `D`.
#[derive(Clone, Debug)]
pub struct Jet<R: Real> {
    pub c: Vec<Cx<R>>,
    pub tail_bound: f64,
}

impl<R: Real> Jet<R> {
    pub fn order(&self) -> usize {
        self.c.len() - 1
    }

    pub fn of_series<C: Coeff>(f: &QSeries<C>, z: &Cx<R>, order: usize) -> Result<Self> {
        let mut c = Vec::with_capacity(order + 1);
        let mut fact = R::one();
        let mut tail: f64 = 0.0;
        for j in 0..=order {
            if j > 0 {
                fact = fact * R::from_i64(j as i64);
            }
            let e = eval_series(&f.bol(j as u32), z)?;
            tail = tail.max(e.tail_bound / fact.to_f64());
            c.push(e.value.scale(&(R::one() / fact.clone())));
        }
        Ok(Jet { c, tail_bound: tail })
    }

    pub fn value(&self) -> Cx<R> {
        self.c[0].clone()
    }

    /// `D^m` at the base point.
    pub fn bol(&self, m: usize) -> Cx<R> {
        let mut fact = R::one();
        for j in 2..=m {
            fact = fact * R::from_i64(j as i64);
        }
        self.c[m].scale(&fact)
    }

    pub fn mul(&self, o: &Self) -> Self {
        let n = self.c.len().min(o.c.len());
        let c = (0..n)
            .map(|i| (0..=i).fold(Cx::zero(), |s, j| s + self.c[j].clone() * o.c[i - j].clone()))
            .collect();
        Jet { c, tail_bound: self.tail_bound.max(o.tail_bound) }
    }

    pub fn inv(&self) -> Result<Self> {
        if self.c[0].is_zero() {
            return Err(Error::NotInvertible);
        }
        let u = self.c[0].inv();
        let mut out: Vec<Cx<R>> = vec![u.clone()];
        for i in 1..self.c.len() {
            let s = (1..=i).fold(Cx::zero(), |s, j| s + self.c[j].clone() * out[i - j].clone());
            out.push(-(s * u.clone()));
        }
        Ok(Jet { c: out, tail_bound: self.tail_bound })
    }

    fn ln(&self) -> Result<Self> {
        // (ln g)' = g'/g with the principal logarithm of the value
        if self.c[0].is_zero() {
            return Err(Error::NotInvertible);
        }
        let n = self.c.len();
        let inv = self.inv()?;
        let deriv: Vec<Cx<R>> = (1..n).map(|j| self.c[j].scale(&R::from_i64(j as i64))).collect();
        let mut out = vec![self.c[0].ln()];
        for i in 1..n {
            let s = (0..i).fold(Cx::zero(), |s, j| s + deriv[j].clone() * inv.c[i - 1 - j].clone());
            out.push(s.scale(&(R::one() / R::from_i64(i as i64))));
        }
        Ok(Jet { c: out, tail_bound: self.tail_bound })
    }

    fn exp(&self) -> Self {
        let n = self.c.len();
        let mut out = vec![self.c[0].exp()];
        for i in 1..n {
            let s = (1..=i).fold(Cx::zero(), |s, j| s + self.c[j].scale(&R::from_i64(j as i64)) * out[i - j].clone());
            out.push(s.scale(&(R::one() / R::from_i64(i as i64))));
        }
        Jet { c: out, tail_bound: self.tail_bound }
    }

    /// `g^r` through the principal logarithm of `g(z)`.
    pub fn pow(&self, r: &R) -> Result<Self> {
        let l = self.ln()?;
        Ok(Jet { c: l.c.iter().map(|x| x.scale(r)).collect(), tail_bound: l.tail_bound }.exp())
    }

    pub fn powi(&self, n: i64) -> Result<Self> {
        let base = if n < 0 { self.inv()? } else { self.clone() };
        let mut acc = Jet { c: vec![Cx::zero(); self.c.len()], tail_bound: self.tail_bound };
        acc.c[0] = Cx::one();
        for _ in 0..n.unsigned_abs() {
            acc = acc.mul(&base);
        }
        Ok(acc)
    }
}

/// Pointwise `theta0^{3a-2} theta1^{1-a} D^m(theta0^{1-3a} theta1^a f)` from
/// jets of `theta0`, `theta1` and `f` at one point, `m = k - 3/2`.
pub fn delta_pointwise<R: Real>(t0: &Jet<R>, t1: &Jet<R>, f: &Jet<R>, k: HalfWeight, a: &R) -> Result<Cx<R>> {
    if !k.is_half_integral() || k.doubled < 3 {
        return Err(Error::InvalidArgument(format!("delta needs half-integral k >= 3/2, got {k}")));
    }
    let m = ((k.doubled - 3) / 2) as usize;
    if t0.order() < m || t1.order() < m || f.order() < m {
        return Err(Error::InvalidArgument(format!("jets of order {m} are required")));
    }
    let three_a = a.clone() * R::from_i64(3);
    let inner = t0.pow(&(R::one() - three_a.clone()))?.mul(&t1.pow(a)?).mul(f);
    let outer = t0.value().powc(&Cx::real(three_a - R::from_i64(2))) * t1.value().powc(&Cx::real(R::one() - a.clone()));
    Ok(outer * inner.bol(m))
}
