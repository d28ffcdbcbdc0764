//! Plain-text interchange format.
//!
//! ```text
//! M v_num v_den P_num P_den mode
//! e_num e_den re_num re_den im_num im_den      (mode = exact)
//! e_num e_den re im                            (mode = float:<bits>)
//! ```
//!
//! One line per nonzero coefficient, in increasing exponent order; exponents
//! between the valuation and the precision that are not listed are zero.
//! Exact mode round-trips bit for bit.

use std::io::{BufRead, Write};

use num_bigint::BigInt;
use num_rational::BigRational;

use super::{ratio, to_units, QSeries};
use crate::arith::{mp, Coeff, Cx, MpC, MpReal, QQi};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum AnySeries {
    Exact(QSeries<QQi>),
    Float { series: QSeries<MpC>, bits: usize },
}

impl AnySeries {
    pub fn denom(&self) -> u64 {
        match self {
            AnySeries::Exact(s) => s.denom(),
            AnySeries::Float { series, .. } => series.denom(),
        }
    }

    /// Floating view at the current working precision.
    pub fn to_float(&self) -> QSeries<MpC> {
        match self {
            AnySeries::Exact(s) => s.convert().expect("exact to floating conversion"),
            AnySeries::Float { series, .. } => series.clone(),
        }
    }
}

pub fn write_series<C: Coeff>(f: &QSeries<C>, mut out: impl Write) -> Result<()> {
    let v = f.valuation();
    let p = f.precision();
    let mode = if C::EXACT { "exact".to_string() } else { format!("float:{}", mp::prec()) };
    writeln!(out, "{} {} {} {} {} {}", f.denom(), v.numer(), v.denom(), p.numer(), p.denom(), mode)?;
    let digits = (mp::prec() as f64 * std::f64::consts::LOG10_2).ceil() as usize + 3;
    for (e, c) in f.terms() {
        let x = ratio(e, f.denom());
        if C::EXACT {
            let z = c.to_qqi().ok_or_else(|| Error::Inexact("exact coefficient expected".into()))?;
            writeln!(
                out,
                "{} {} {} {} {} {}",
                x.numer(),
                x.denom(),
                z.re.numer(),
                z.re.denom(),
                z.im.numer(),
                z.im.denom()
            )?;
        } else {
            let z: Cx<MpReal> = c.to_cx();
            writeln!(out, "{} {} {} {}", x.numer(), x.denom(), z.re.to_string_digits(digits), z.im.to_string_digits(digits))?;
        }
    }
    Ok(())
}

fn parse_int(tok: Option<&str>, what: &str) -> Result<BigInt> {
    tok.ok_or_else(|| Error::Parse(format!("missing {what}")))?
        .parse::<BigInt>()
        .map_err(|_| Error::Parse(format!("bad integer for {what}")))
}

fn parse_ratio(num: Option<&str>, den: Option<&str>, what: &str) -> Result<BigRational> {
    let n = parse_int(num, what)?;
    let d = parse_int(den, what)?;
    if d == BigInt::from(0) {
        return Err(Error::Parse(format!("zero denominator in {what}")));
    }
    Ok(BigRational::new(n, d))
}

pub fn read_series(input: impl BufRead) -> Result<AnySeries> {
    let mut lines = input.lines();
    let header = loop {
        match lines.next() {
            Some(l) => {
                let l = l?;
                if !l.trim().is_empty() && !l.trim_start().starts_with('#') {
                    break l;
                }
            }
            None => return Err(Error::Parse("empty series file".into())),
        }
    };
    let mut h = header.split_whitespace();
    let m: u64 = h.next().and_then(|t| t.parse().ok()).filter(|&m| m > 0).ok_or_else(|| Error::Parse("bad lattice denominator".into()))?;
    let v = parse_ratio(h.next(), h.next(), "valuation")?;
    let p = parse_ratio(h.next(), h.next(), "precision")?;
    let mode = h.next().ok_or_else(|| Error::Parse("missing mode".into()))?.to_string();
    let v_units = to_units(&v, m).ok_or_else(|| Error::Parse("valuation off the lattice".into()))?;
    let p_units = to_units(&p, m).ok_or_else(|| Error::Parse("precision off the lattice".into()))?;
    let exact = match mode.as_str() {
        "exact" => true,
        s if s.starts_with("float") => false,
        _ => return Err(Error::Parse(format!("unknown mode '{mode}'"))),
    };
    let bits = mode.strip_prefix("float:").and_then(|b| b.parse::<usize>().ok()).unwrap_or(mp::prec());

    let mut exact_terms = Vec::new();
    let mut float_terms = Vec::new();
    let mut last: Option<i64> = None;
    for line in lines {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let mut tok = t.split_whitespace();
        let e = parse_ratio(tok.next(), tok.next(), "exponent")?;
        let e_units = to_units(&e, m).ok_or_else(|| Error::Parse(format!("exponent {e} off the lattice")))?;
        if e_units < v_units || e_units >= p_units {
            return Err(Error::Parse(format!("exponent {e} outside [valuation, precision)")));
        }
        if last.is_some_and(|l| e_units <= l) {
            return Err(Error::Parse("exponents must be strictly increasing".into()));
        }
        last = Some(e_units);
        if exact {
            let re = parse_ratio(tok.next(), tok.next(), "real part")?;
            let im = parse_ratio(tok.next(), tok.next(), "imaginary part")?;
            exact_terms.push((e_units, QQi::new(re, im)));
        } else {
            let (re, im) = mp::with_prec(bits, || {
                let re = tok.next().and_then(MpReal::parse);
                let im = tok.next().and_then(MpReal::parse);
                (re, im)
            });
            let re = re.ok_or_else(|| Error::Parse("bad real part".into()))?;
            let im = im.ok_or_else(|| Error::Parse("bad imaginary part".into()))?;
            float_terms.push((e_units, Cx::new(re, im)));
        }
    }
    let first = if exact { exact_terms.first().map(|t| t.0) } else { float_terms.first().map(|t| t.0) };
    if first.unwrap_or(p_units) != v_units {
        return Err(Error::Parse("header valuation does not match the first term".into()));
    }
    Ok(if exact {
        AnySeries::Exact(QSeries::from_terms(m, p_units, exact_terms))
    } else {
        AnySeries::Float { series: QSeries::from_terms(m, p_units, float_terms), bits }
    })
}
