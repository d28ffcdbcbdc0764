//! Unary theta series, the Serre-Stark basis and the Fricke constants of
//! `theta_0`, `theta_1`.
//!
//! `theta_0 = sum_{n>=0} psi0(n) q^{n^2}` (with `psi0(0) = 1/2` for the
//! trivial character), `theta_1 = sum_{n>=1} n psi1(n) q^{n^2}`, and
//! `theta_{psi,t} = sum_{n>=0} psi(n) q^{t n^2}`.

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use num_rational::BigRational;

use crate::arith::{Coeff, Cx, Real};
use crate::characters::{divisors, theta_zero_convention, DirichletCharacter};
use crate::error::{Error, Result};
use crate::forms::{FormMeta, HalfWeight};
use crate::qseries::QSeries;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ThetaKind {
    Theta0,
    Theta1,
    SerreStark,
}

impl FromStr for ThetaKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "theta0" => Ok(ThetaKind::Theta0),
            "theta1" => Ok(ThetaKind::Theta1),
            "st" | "serre_stark" | "serre-stark" => Ok(ThetaKind::SerreStark),
            _ => Err(Error::Parse(format!("unknown theta kind '{s}'"))),
        }
    }
}

impl fmt::Display for ThetaKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ThetaKind::Theta0 => "theta0",
            ThetaKind::Theta1 => "theta1",
            ThetaKind::SerreStark => "st",
        })
    }
}

/// The pair `(psi0, psi1)` fixing `theta_0`, `theta_1` and the common level.
#[derive(Clone, Debug)]
pub struct ThetaContext {
    pub psi0: DirichletCharacter,
    pub psi1: DirichletCharacter,
    pub n0: u64,
    pub n1: u64,
    pub level: u64,
}

impl ThetaContext {
    pub fn new(psi0: DirichletCharacter, psi1: DirichletCharacter) -> Result<Self> {
        if !psi0.is_even() {
            return Err(Error::InvalidArgument(format!("psi0 = {psi0} must be even")));
        }
        if psi1.is_even() {
            return Err(Error::InvalidArgument(format!("psi1 = {psi1} must be odd")));
        }
        let n0 = psi0.modulus();
        let n1 = psi1.modulus();
        let level = (4 * n0 * n0).lcm(&(4 * n1 * n1));
        Ok(ThetaContext { psi0, psi1, n0, n1, level })
    }

    pub fn parse(psi0: &str, psi1: &str) -> Result<Self> {
        Self::new(DirichletCharacter::parse(psi0)?, DirichletCharacter::parse(psi1)?)
    }

    pub fn theta0<C: Coeff>(&self, prec: i64) -> Result<QSeries<C>> {
        Ok(theta_series(ThetaKind::Theta0, &self.psi0, 1, prec)?.0)
    }

    pub fn theta1<C: Coeff>(&self, prec: i64) -> Result<QSeries<C>> {
        Ok(theta_series(ThetaKind::Theta1, &self.psi1, 1, prec)?.0)
    }
}

/// `psi(0)` as used by the theta builders: an explicit override if present,
/// `1/2` for the trivial character mod 1, and the table value otherwise.
fn theta_zero_value<C: Coeff>(psi: &DirichletCharacter) -> Result<C> {
    if psi.zero_value_override().is_some() {
        return psi.theta_value(0);
    }
    if psi.modulus() == 1 {
        return Ok(C::from_rational(&theta_zero_convention()));
    }
    psi.value_coeff(0)
}

/// Build `theta_0`, `theta_1` or `theta_{psi,t}` to absolute precision `prec`.
pub fn theta_series<C: Coeff>(
    kind: ThetaKind,
    psi: &DirichletCharacter,
    t: u64,
    prec: i64,
) -> Result<(QSeries<C>, FormMeta)> {
    if t == 0 {
        return Err(Error::InvalidArgument("t must be positive".into()));
    }
    let n = psi.modulus();
    let (t, weight, level, character) = match kind {
        ThetaKind::Theta0 => {
            if !psi.is_even() {
                return Err(Error::InvalidArgument(format!("theta0 needs an even character, got {psi}")));
            }
            (1, HalfWeight::from_doubled(1), 4 * n * n, psi.clone())
        }
        ThetaKind::Theta1 => {
            if psi.is_even() {
                return Err(Error::InvalidArgument(format!("theta1 needs an odd character, got {psi}")));
            }
            (1, HalfWeight::from_doubled(3), 4 * n * n, psi.twist_by_minus_one())
        }
        ThetaKind::SerreStark => {
            if !psi.is_even() {
                return Err(Error::InvalidArgument(format!("Serre-Stark series need an even character, got {psi}")));
            }
            let chi_t = DirichletCharacter::chi_t(t)?;
            let r = psi.conductor();
            (t, HalfWeight::from_doubled(1), (4 * r * r * t).lcm(&chi_t.modulus()).lcm(&n), psi.product(&chi_t))
        }
    };
    let t = t as i64;
    let mut terms = Vec::new();
    let mut m: i64 = 0;
    while t * m * m < prec {
        let c: C = match kind {
            ThetaKind::Theta1 => {
                if m == 0 {
                    C::zero()
                } else {
                    psi.value_coeff::<C>(m)?.mul(&C::from_i64(m))
                }
            }
            _ if m == 0 => theta_zero_value(psi)?,
            _ => psi.value_coeff(m)?,
        };
        terms.push((t * m * m, c));
        m += 1;
    }
    let meta = FormMeta::new(weight, level, character, 0)?;
    Ok((QSeries::from_terms(1, prec, terms), meta))
}

/// All pairs `(psi, t)` with `psi` even primitive of conductor `r`,
/// `r^2 t | N0^2` and `psi0 = psi chi_t` on units mod `4 N0^2`.
///
/// On those units `psi` is forced to be the primitive character inducing
/// `psi0 chi_t`, so the enumeration runs over `t` alone.
pub fn enumerate_serre_stark(n0: u64, psi0: &DirichletCharacter) -> Result<Vec<(DirichletCharacter, u64)>> {
    if !psi0.is_even() {
        return Err(Error::InvalidArgument(format!("psi0 = {psi0} must be even")));
    }
    if n0 == 0 || n0 % psi0.modulus() != 0 {
        return Err(Error::InvalidArgument(format!("modulus of {psi0} must divide N0 = {n0}")));
    }
    let n0sq = n0 * n0;
    let mut out = Vec::new();
    for t in divisors(n0sq) {
        let chi_t = DirichletCharacter::chi_t(t)?;
        let m = psi0.modulus().lcm(&chi_t.modulus()).lcm(&(2 * n0)).lcm(&4);
        let eta = psi0.lift(m)?.product(&chi_t);
        let psi = eta.primitive();
        let r = psi.conductor();
        if psi.is_even() && n0sq % (r * r * t) == 0 {
            let label = if psi.modulus() == 1 { "triv:1".to_string() } else { psi.label().to_string() };
            out.push((psi.with_label(label), t));
        }
    }
    Ok(out)
}

/// The eigenvalue in `theta_0 | W = (i N0)^{-1/2} tau(psi0) theta_0`
/// (`W = W_{4 N0^2}`), or `theta_1 | W = -(i N1)^{-1/2} tau(psi1) theta_1`.
pub fn fricke_theta_constants<R: Real>(psi: &DirichletCharacter, kind: ThetaKind) -> Result<Cx<R>> {
    if !psi.is_real() || !psi.is_primitive() {
        return Err(Error::InvalidArgument(format!("{psi} must be real and primitive")));
    }
    let n = psi.modulus();
    // (i N)^{-1/2} = N^{-1/2} e^{-i pi / 4} on the principal branch.
    let root = Cx::from_polar(&(R::one() / R::from_i64(n as i64).sqrt()), &(-R::pi() / R::from_i64(4)));
    let tau = psi.gauss_sum::<R>(1);
    match kind {
        ThetaKind::Theta0 if psi.is_even() => Ok(root * tau),
        ThetaKind::Theta1 if !psi.is_even() => Ok(-(root * tau)),
        _ => Err(Error::InvalidArgument(format!("parity of {psi} does not match {kind}"))),
    }
}

/// The `n = 0` slot convention, exposed for reports.
pub fn zero_slot_value(psi: &DirichletCharacter) -> Result<BigRational> {
    theta_zero_value::<BigRational>(psi)
}
