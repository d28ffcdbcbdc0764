//! Dirichlet characters, the Kronecker symbol, `eps_d` and generalized Gauss sums.

use std::collections::VecDeque;
use std::fmt;

use num_integer::Integer;
use num_rational::BigRational;

use crate::arith::{rat, Angle, Coeff, Cx, Real};
use crate::error::{Error, Result};

/// Kronecker symbol `(a/n)` with the full extension to even, negative and zero `n`.
pub fn kronecker(a: i64, n: i64) -> i64 {
    let mut a = a as i128;
    let mut n = n as i128;
    if n == 0 {
        return if a == 1 || a == -1 { 1 } else { 0 };
    }
    let mut r = 1;
    if n < 0 {
        n = -n;
        if a < 0 {
            r = -r;
        }
    }
    let v = n.trailing_zeros();
    n >>= v;
    if v > 0 {
        if a % 2 == 0 {
            return 0;
        }
        if v % 2 == 1 && matches!(a.rem_euclid(8), 3 | 5) {
            r = -r;
        }
    }
    a = a.rem_euclid(n);
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            if matches!(n % 8, 3 | 5) {
                r = -r;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            r = -r;
        }
        a %= n;
    }
    if n == 1 {
        r
    } else {
        0
    }
}

/// `eps_d`: 1 for `d = 1 mod 4` and `i` for `d = 3 mod 4`, as a root of unity.
pub fn eps(d: i64) -> Result<Angle> {
    match d.rem_euclid(4) {
        1 => Ok(Angle::ONE),
        3 => Ok(Angle::new(1, 4)),
        _ => Err(Error::InvalidArgument(format!("eps_d needs odd d, got {d}"))),
    }
}

pub fn is_fundamental_discriminant(d: i64) -> bool {
    if d == 1 {
        return true;
    }
    if d == 0 {
        return false;
    }
    match d.rem_euclid(4) {
        1 => is_squarefree(d.unsigned_abs()),
        0 => {
            let m = d / 4;
            matches!(m.rem_euclid(4), 2 | 3) && is_squarefree(m.unsigned_abs())
        }
        _ => false,
    }
}

pub fn is_squarefree(n: u64) -> bool {
    let mut p = 2u64;
    let mut m = n;
    while p * p <= m {
        if m % p == 0 {
            m /= p;
            if m % p == 0 {
                return false;
            }
        }
        p += 1;
    }
    true
}

/// `(s, f)` with `n = s * f^2` and `s` squarefree.
pub fn squarefree_decomposition(n: u64) -> (u64, u64) {
    let mut s = 1u64;
    let mut f = 1u64;
    for (p, e) in factorize(n) {
        s *= p.pow(e % 2);
        f *= p.pow(e / 2);
    }
    (s, f)
}

pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn divisors(n: u64) -> Vec<u64> {
    let mut d: Vec<u64> = (1..=n).take_while(|k| k * k <= n).filter(|k| n % k == 0).flat_map(|k| [k, n / k]).collect();
    d.sort_unstable();
    d.dedup();
    d
}

pub fn is_square(n: u64) -> bool {
    let r = (n as f64).sqrt().round() as u64;
    (r.saturating_sub(1)..=r + 1).any(|s| s * s == n)
}

pub fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// Carmichael function: the exponent of `(Z/nZ)^*`.
pub fn carmichael(n: u64) -> u64 {
    factorize(n).into_iter().fold(1, |acc, (p, e)| {
        let l = if p == 2 {
            match e {
                1 => 1,
                2 => 2,
                _ => 1 << (e - 2),
            }
        } else {
            (p - 1) * p.pow(e - 1)
        };
        acc.lcm(&l)
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DirichletCharacter {
    modulus: u64,
    values: Vec<Option<Angle>>,
    parity: Parity,
    conductor: u64,
    is_primitive: bool,
    is_real: bool,
    zero_value_override: Option<BigRational>,
    label: String,
}

impl fmt::Display for DirichletCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label)
    }
}

impl DirichletCharacter {
    /// Build from a full value table; `None` marks a zero value.
    pub fn from_table(modulus: u64, values: Vec<Option<Angle>>, label: impl Into<String>) -> Result<Self> {
        if modulus == 0 || values.len() as u64 != modulus {
            return Err(Error::InvalidArgument("value table length must equal the modulus".into()));
        }
        for (u, v) in values.iter().enumerate() {
            let unit = (u as u64).gcd(&modulus) == 1;
            if unit != v.is_some() {
                return Err(Error::InvalidArgument(format!("value at {u} inconsistent with gcd({u}, {modulus})")));
            }
        }
        let mut chi = DirichletCharacter {
            modulus,
            values,
            parity: Parity::Even,
            conductor: modulus,
            is_primitive: true,
            is_real: true,
            zero_value_override: None,
            label: label.into(),
        };
        chi.check_multiplicative()?;
        chi.parity = match chi.value(-1) {
            Some(a) if a == Angle::ONE => Parity::Even,
            _ => Parity::Odd,
        };
        chi.is_real = chi.values.iter().flatten().all(|a| a.den <= 2);
        chi.conductor = chi.compute_conductor();
        chi.is_primitive = chi.conductor == modulus;
        Ok(chi)
    }

    fn check_multiplicative(&self) -> Result<()> {
        let n = self.modulus;
        // Exhaustive for small moduli; for large ones the first few dozen
        // units against everything still catches any inconsistent table built
        // from a generating set.
        let limit = if n <= 1000 { n } else { 64.min(n) };
        for u in 1..limit {
            let Some(a) = self.values[u as usize] else { continue };
            for v in 1..n {
                let Some(b) = self.values[v as usize] else { continue };
                let w = (u * v) % n;
                if self.values[w as usize] != Some(a.add(b)) {
                    return Err(Error::InvalidArgument(format!("table is not multiplicative at {u}*{v}")));
                }
            }
        }
        Ok(())
    }

    fn compute_conductor(&self) -> u64 {
        let n = self.modulus;
        for d in divisors(n) {
            let trivial_on_kernel = (1..n)
                .filter(|u| u % d == 1 % d && u.gcd(&n) == 1)
                .all(|u| self.values[u as usize] == Some(Angle::ONE));
            if trivial_on_kernel {
                return d;
            }
        }
        n
    }

    pub fn trivial(modulus: u64) -> Self {
        let values = (0..modulus).map(|u| (u.gcd(&modulus) == 1).then_some(Angle::ONE)).collect();
        Self::from_table(modulus, values, format!("triv:{modulus}")).expect("trivial character")
    }

    /// The trivial character with an explicit value at `0`, used only by theta builders.
    pub fn trivial_with_override(modulus: u64, zero_value: BigRational) -> Self {
        let mut chi = Self::trivial(modulus);
        chi.zero_value_override = Some(zero_value);
        chi
    }

    /// `u -> (disc/u)` for a fundamental discriminant.
    pub fn kronecker_discriminant(disc: i64) -> Result<Self> {
        if !is_fundamental_discriminant(disc) {
            return Err(Error::InvalidArgument(format!("{disc} is not a fundamental discriminant")));
        }
        let m = disc.unsigned_abs();
        let values = (0..m)
            .map(|u| match kronecker(disc, u as i64) {
                0 => None,
                1 => Some(Angle::ONE),
                _ => Some(Angle::MINUS_ONE),
            })
            .collect();
        Self::from_table(m, values, format!("kron:{disc}"))
    }

    /// `u -> (u/D)` for odd positive `D`.
    pub fn psi_d(d: i64) -> Result<Self> {
        if d <= 0 || d % 2 == 0 {
            return Err(Error::InvalidArgument(format!("psiD needs odd positive D, got {d}")));
        }
        let m = d as u64;
        let values = (0..m)
            .map(|u| match kronecker(u as i64, d) {
                0 => None,
                1 => Some(Angle::ONE),
                _ => Some(Angle::MINUS_ONE),
            })
            .collect();
        Self::from_table(m, values, format!("psiD:{d}"))
    }

    /// Trivial for square `t`; otherwise the Kronecker character of the
    /// fundamental discriminant of `Q(sqrt t)`.
    pub fn chi_t(t: u64) -> Result<Self> {
        if t == 0 {
            return Err(Error::InvalidArgument("chi_t needs t >= 1".into()));
        }
        let (s, _) = squarefree_decomposition(t);
        if s == 1 {
            let mut chi = Self::trivial(1);
            chi.label = format!("chit:{t}");
            return Ok(chi);
        }
        let s = s as i64;
        let disc = if s % 4 == 1 { s } else { 4 * s };
        let mut chi = Self::kronecker_discriminant(disc)?;
        chi.label = format!("chit:{t}");
        Ok(chi)
    }

    /// Character mod `n` with generator `g` sent to `exp(2 pi i e / lambda(n))`.
    pub fn from_generators(n: u64, gens: &[(u64, i64)]) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("modulus must be positive".into()));
        }
        let lam = carmichael(n);
        let mut values: Vec<Option<Angle>> = vec![None; n as usize];
        let one = 1 % n;
        values[one as usize] = Some(Angle::ONE);
        let gens: Vec<(u64, Angle)> = gens
            .iter()
            .map(|&(g, e)| {
                let g = g % n;
                if g.gcd(&n) != 1 {
                    Err(Error::InvalidArgument(format!("generator {g} is not a unit mod {n}")))
                } else {
                    Ok((g, Angle::new(e, lam)))
                }
            })
            .collect::<Result<_>>()?;
        let mut queue = VecDeque::from([one]);
        while let Some(x) = queue.pop_front() {
            let ax = values[x as usize].expect("visited");
            for &(g, ag) in &gens {
                let y = (x * g) % n;
                let ay = ax.add(ag);
                match values[y as usize] {
                    None => {
                        values[y as usize] = Some(ay);
                        queue.push_back(y);
                    }
                    Some(prev) if prev != ay => {
                        return Err(Error::InvalidArgument(format!(
                            "generator images inconsistent with element orders (value at {y})"
                        )))
                    }
                    Some(_) => {}
                }
            }
        }
        if (0..n).any(|u| u.gcd(&n) == 1 && values[u as usize].is_none()) {
            return Err(Error::InvalidArgument(format!("generators do not generate (Z/{n})^*")));
        }
        let label = format!(
            "gen:{n}:{}",
            gens.iter().map(|(g, a)| format!("{g}={}/{}", a.num, a.den)).collect::<Vec<_>>().join(",")
        );
        Self::from_table(n, values, label)
    }

    /// Parse the CLI mini-language: `triv:N`, `kron:D`, `psiD:D`, `chit:t`, `gen:N:g=e,...`.
    pub fn parse(spec: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("malformed character spec '{spec}'"));
        let mut parts = spec.splitn(3, ':');
        let kind = parts.next().ok_or_else(bad)?;
        let arg = parts.next().ok_or_else(bad)?;
        let int = |s: &str| s.trim().parse::<i64>().map_err(|_| bad());
        match kind {
            "triv" => {
                let n = int(arg)?;
                if n <= 0 {
                    return Err(bad());
                }
                Ok(Self::trivial(n as u64))
            }
            "kron" => Self::kronecker_discriminant(int(arg)?),
            "psiD" => Self::psi_d(int(arg)?),
            "chit" => {
                let t = int(arg)?;
                if t <= 0 {
                    return Err(bad());
                }
                Self::chi_t(t as u64)
            }
            "gen" => {
                let n = int(arg)?;
                if n <= 0 {
                    return Err(bad());
                }
                let list = parts.next().unwrap_or("");
                let gens = list
                    .split(',')
                    .filter(|s| !s.trim().is_empty())
                    .map(|item| {
                        let (g, e) = item.split_once('=').ok_or_else(bad)?;
                        Ok((int(g)?.rem_euclid(n) as u64, int(e)?))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Self::from_generators(n as u64, &gens)
            }
            _ => Err(bad()),
        }
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }
    pub fn parity(&self) -> Parity {
        self.parity
    }
    pub fn is_even(&self) -> bool {
        self.parity == Parity::Even
    }
    pub fn conductor(&self) -> u64 {
        self.conductor
    }
    pub fn is_primitive(&self) -> bool {
        self.is_primitive
    }
    pub fn is_real(&self) -> bool {
        self.is_real
    }
    pub fn is_trivial(&self) -> bool {
        self.values.iter().flatten().all(|a| *a == Angle::ONE)
    }
    pub fn zero_value_override(&self) -> Option<&BigRational> {
        self.zero_value_override.as_ref()
    }
    pub fn label(&self) -> &str {
        &self.label
    }
    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Raw table value at `n` (the zero-value override is not consulted).
    pub fn value(&self, n: i64) -> Option<Angle> {
        self.values[n.rem_euclid(self.modulus as i64) as usize]
    }

    /// `chi(n)` as `+1, -1, 0` for real characters.
    pub fn value_sign(&self, n: i64) -> Option<i64> {
        match self.value(n) {
            None => Some(0),
            Some(a) => a.as_sign(),
        }
    }

    pub fn value_cx<R: Real>(&self, n: i64) -> Cx<R> {
        self.value(n).map(|a| a.to_cx()).unwrap_or_else(Cx::zero)
    }

    pub fn value_coeff<C: Coeff>(&self, n: i64) -> Result<C> {
        match self.value(n) {
            None => Ok(C::zero()),
            Some(a) => C::from_unit(a).ok_or_else(|| Error::Inexact(format!("root of unity {}/{}", a.num, a.den))),
        }
    }

    /// Theta-builder value: the override applies at `n = 0` only.
    pub fn theta_value<C: Coeff>(&self, n: i64) -> Result<C> {
        if n == 0 {
            if let Some(r) = &self.zero_value_override {
                return Ok(C::from_rational(r));
            }
        }
        self.value_coeff(n)
    }

    pub fn conj(&self) -> Self {
        let values = self.values.iter().map(|v| v.map(Angle::neg)).collect();
        let mut chi = Self::from_table(self.modulus, values, format!("conj({})", self.label)).expect("conjugate");
        if self.is_real {
            chi.label = self.label.clone();
        }
        chi
    }

    /// Pointwise product modulo the lcm of the moduli.
    pub fn product(&self, other: &Self) -> Self {
        let m = self.modulus.lcm(&other.modulus);
        let values = (0..m)
            .map(|u| {
                if u.gcd(&m) != 1 {
                    return None;
                }
                Some(self.value(u as i64)?.add(other.value(u as i64)?))
            })
            .collect();
        Self::from_table(m, values, format!("{}*{}", self.label, other.label)).expect("product of characters")
    }

    /// Product with `d -> (-1/d)`.
    pub fn twist_by_minus_one(&self) -> Self {
        let m4 = Self::kronecker_discriminant(-4).expect("-4 is fundamental");
        self.product(&m4)
    }

    /// Same character viewed modulo a multiple of its modulus.
    pub fn lift(&self, modulus: u64) -> Result<Self> {
        if modulus % self.modulus != 0 {
            return Err(Error::InvalidArgument(format!("{} does not divide {modulus}", self.modulus)));
        }
        let mut chi = self.product(&Self::trivial(modulus));
        chi.label = self.label.clone();
        Ok(chi)
    }

    /// The primitive character inducing this one, modulo the conductor.
    pub fn primitive(&self) -> Self {
        if self.is_primitive {
            return self.clone();
        }
        let r = self.conductor;
        let values = (0..r)
            .map(|u| {
                if u.gcd(&r) != 1 {
                    return None;
                }
                let lift = (0..self.modulus).map(|j| u + j * r).find(|v| v.gcd(&self.modulus) == 1)?;
                self.value(lift as i64)
            })
            .collect();
        Self::from_table(r, values, format!("prim({})", self.label)).expect("primitive character")
    }

    /// Equality of values on integers coprime to both moduli (and to `extra`).
    pub fn agrees_on_units(&self, other: &Self, extra: u64) -> bool {
        let m = self.modulus.lcm(&other.modulus).lcm(&extra.max(1));
        (1..=m).filter(|u| u.gcd(&m) == 1).all(|u| self.value(u as i64) == other.value(u as i64))
    }

    /// Generalized Gauss sum `sum_{u mod D} chi(u) e^{2 pi i n u / D}`.
    pub fn gauss_sum<R: Real>(&self, n: i64) -> Cx<R> {
        let d = self.modulus as i64;
        let mut s = Cx::<R>::zero();
        for u in 0..d {
            if let Some(a) = self.value(u) {
                let phase = Angle::new((n.rem_euclid(d) as i128 * u as i128 % d as i128) as i64, d as u64);
                s = s + a.add(phase).to_cx();
            }
        }
        s
    }
}

/// All Dirichlet characters mod `d` for cyclic unit groups (`d = 1, 2, 4, p^k,
/// 2p^k`), indexed by `j` with `chi_j(g) = e^{2 pi i j / phi(d)}` for the
/// least primitive root `g`.
pub fn characters_mod(d: u64) -> Result<Vec<DirichletCharacter>> {
    if d == 0 {
        return Err(Error::InvalidArgument("modulus must be positive".into()));
    }
    let units: Vec<u64> = (0..d).filter(|u| u.gcd(&d) == 1 && (d > 1 || *u == 0)).collect();
    let order = units.len() as u64;
    let g = (1..d.max(2))
        .find(|g| {
            g.gcd(&d) == 1 && {
                let mut x = 1u64 % d;
                let mut k = 0;
                loop {
                    x = x * g % d;
                    k += 1;
                    if x == 1 % d {
                        break k == order;
                    }
                }
            }
        })
        .ok_or_else(|| Error::OutOfContract(format!("(Z/{d})^* is not cyclic")))?;
    let mut log = vec![None; d as usize];
    let mut x = 1 % d;
    for e in 0..order {
        log[x as usize] = Some(e as i64);
        x = x * g % d;
    }
    (0..order)
        .map(|j| {
            let values = log.iter().map(|l| l.map(|e| Angle::new(j as i64 * e, order))).collect();
            DirichletCharacter::from_table(d, values, format!("char:{d}.{j}"))
        })
        .collect()
}

/// `1/2` as used for the constant term of the trivial-character theta series.
pub fn theta_zero_convention() -> BigRational {
    rat(1, 2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::C64;

    fn euler(a: i64, p: i64) -> i64 {
        let mut r = 1i64;
        let mut b = a.rem_euclid(p);
        let mut e = (p - 1) / 2;
        while e > 0 {
            if e & 1 == 1 {
                r = r * b % p;
            }
            b = b * b % p;
            e >>= 1;
        }
        if r == p - 1 {
            -1
        } else {
            r
        }
    }

    #[test]
    fn kronecker_examples() {
        assert_eq!(kronecker(0, 1), 1);
        assert_eq!(kronecker(2, 5), -1);
        assert_eq!(kronecker(-1, 3), -1);
        assert_eq!(kronecker(2, 5), euler(2, 5));
        assert_eq!(kronecker(5, 8), -1);
        assert_eq!(kronecker(3, -1), 1);
        assert_eq!(kronecker(-3, -1), -1);
    }

    #[test]
    fn kronecker_matches_euler_criterion() {
        for p in [3i64, 5, 7, 11, 13, 97, 101, 199] {
            for a in -50..50 {
                assert_eq!(kronecker(a, p), euler(a, p), "({a}/{p})");
            }
        }
    }

    #[test]
    fn eps_table() {
        assert_eq!(eps(1).unwrap(), Angle::ONE);
        assert_eq!(eps(3).unwrap(), Angle::new(1, 4));
        assert_eq!(eps(7).unwrap().times(2).as_sign(), Some(kronecker(-1, 7)));
        assert!(eps(4).is_err());
    }

    #[test]
    fn character_examples() {
        let c5 = DirichletCharacter::kronecker_discriminant(5).unwrap();
        let vals: Vec<i64> = (1..5).map(|u| c5.value_sign(u).unwrap()).collect();
        assert_eq!(vals, vec![1, -1, -1, 1]);
        assert!(c5.is_even() && c5.is_real() && c5.is_primitive());
        assert!(DirichletCharacter::chi_t(4).unwrap().is_trivial());
        let t = DirichletCharacter::trivial_with_override(1, rat(1, 2));
        assert_eq!(t.theta_value::<BigRational>(0).unwrap(), rat(1, 2));
        assert_eq!(t.value_coeff::<BigRational>(0).unwrap(), rat(1, 1));
        let tw = DirichletCharacter::trivial(1).twist_by_minus_one();
        assert_eq!(tw.modulus(), 4);
        assert_eq!((tw.value_sign(1), tw.value_sign(3)), (Some(1), Some(-1)));
        assert!((c5.product(&c5)).agrees_on_units(&DirichletCharacter::trivial(5), 1));
    }

    #[test]
    fn generator_presentation() {
        // 2 generates (Z/5)^*, lambda(5)=4: 2 -> i gives the quartic character.
        let chi = DirichletCharacter::from_generators(5, &[(2, 1)]).unwrap();
        assert_eq!(chi.value(2), Some(Angle::new(1, 4)));
        assert_eq!(chi.value(4), Some(Angle::MINUS_ONE));
        assert!(!chi.is_real());
        // 4 has order 2 mod 5, so it cannot map to a primitive 4th root of unity.
        assert!(DirichletCharacter::from_generators(5, &[(4, 1)]).is_err());
        // 4 alone does not generate.
        assert!(DirichletCharacter::from_generators(5, &[(4, 2)]).is_err());
        let c8 = DirichletCharacter::parse("gen:8:3=1,5=1").unwrap();
        assert!(c8.agrees_on_units(&DirichletCharacter::kronecker_discriminant(8).unwrap(), 1));
    }

    #[test]
    fn gauss_sum_examples() {
        let c = DirichletCharacter::kronecker_discriminant(-3).unwrap();
        let t: C64 = c.gauss_sum(1);
        assert!(t.re.abs() < 1e-14 && (t.im - 3f64.sqrt()).abs() < 1e-14);
        let t0: C64 = c.gauss_sum(0);
        assert!(t0.abs() < 1e-14);
        let one: C64 = DirichletCharacter::trivial(1).gauss_sum(1);
        assert!((one.re - 1.0).abs() < 1e-15);
        let c8: C64 = DirichletCharacter::kronecker_discriminant(8).unwrap().gauss_sum(1);
        assert!((c8.re - 8f64.sqrt()).abs() < 1e-13 && c8.im.abs() < 1e-13);
    }

    #[test]
    fn parse_errors() {
        assert!(DirichletCharacter::parse("kron:20").is_err() && DirichletCharacter::parse("kron:12").is_ok());
        assert!(DirichletCharacter::parse("bogus:1").is_err());
        assert!(DirichletCharacter::parse("psiD:4").is_err());
        assert!(DirichletCharacter::parse("triv").is_err());
        assert_eq!(DirichletCharacter::parse("psiD:3").unwrap().value_sign(2), Some(-1));
    }
}
