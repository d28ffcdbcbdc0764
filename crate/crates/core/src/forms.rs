//! Weights and form metadata shared by the builders, operators and verifiers.

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use num_rational::BigRational;
use serde::Serialize;

use crate::arith::rat;
use crate::characters::DirichletCharacter;
use crate::error::{Error, Result};

/// A weight `k = doubled / 2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct HalfWeight {
    pub doubled: i64,
}

impl HalfWeight {
    pub const fn from_doubled(doubled: i64) -> Self {
        HalfWeight { doubled }
    }
    pub const fn integral(k: i64) -> Self {
        HalfWeight { doubled: 2 * k }
    }
    pub fn is_integral(&self) -> bool {
        self.doubled % 2 == 0
    }
    pub fn is_half_integral(&self) -> bool {
        !self.is_integral()
    }
    pub fn as_rational(&self) -> BigRational {
        rat(self.doubled, 2)
    }
    pub fn as_f64(&self) -> f64 {
        self.doubled as f64 / 2.0
    }
    /// `k` when integral.
    pub fn integer(&self) -> Result<i64> {
        if self.is_integral() {
            Ok(self.doubled / 2)
        } else {
            Err(Error::InvalidArgument(format!("weight {self} is not integral")))
        }
    }
    /// `2 - k`.
    pub fn dual(&self) -> Self {
        HalfWeight { doubled: 4 - self.doubled }
    }
    pub fn add(&self, o: HalfWeight) -> Self {
        HalfWeight { doubled: self.doubled + o.doubled }
    }
}

impl fmt::Display for HalfWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integral() {
            write!(f, "{}", self.doubled / 2)
        } else {
            write!(f, "{}/2", self.doubled)
        }
    }
}

impl FromStr for HalfWeight {
    type Err = Error;
    /// Accepts `5/2`, `-23/2`, `3`, or the decimal forms `2.5`, `-11.5`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(format!("bad weight '{s}'"));
        if let Some((n, d)) = s.split_once('/') {
            let n: i64 = n.trim().parse().map_err(|_| bad())?;
            return match d.trim() {
                "2" => Ok(HalfWeight { doubled: n }),
                "1" => Ok(HalfWeight { doubled: 2 * n }),
                _ => Err(bad()),
            };
        }
        if let Ok(k) = s.parse::<i64>() {
            return Ok(HalfWeight::integral(k));
        }
        let x: f64 = s.parse().map_err(|_| bad())?;
        let d = (2.0 * x).round();
        if (2.0 * x - d).abs() > 1e-12 {
            return Err(bad());
        }
        Ok(HalfWeight { doubled: d as i64 })
    }
}

/// Weight, level, character and pole order of a (weakly holomorphic) form.
#[derive(Clone, Debug, PartialEq)]
pub struct FormMeta {
    pub weight: HalfWeight,
    pub level: u64,
    pub character: DirichletCharacter,
    pub pole_order: u64,
}

impl FormMeta {
    pub fn new(weight: HalfWeight, level: u64, character: DirichletCharacter, pole_order: u64) -> Result<Self> {
        if level == 0 {
            return Err(Error::InvalidArgument("level must be positive".into()));
        }
        if weight.is_half_integral() && level % 4 != 0 {
            return Err(Error::InvalidArgument(format!("half-integral weight needs 4 | N, got N = {level}")));
        }
        if level % character.modulus() != 0 {
            return Err(Error::InvalidArgument(format!(
                "character modulus {} does not divide the level {level}",
                character.modulus()
            )));
        }
        Ok(FormMeta { weight, level, character, pole_order })
    }

    /// Parse `2k,N,charspec,n0` where the first field is the doubled weight.
    pub fn parse(spec: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("metadata must be '2k,N,charspec,n0', got '{spec}'"));
        let fields: Vec<&str> = spec.split(',').map(str::trim).collect();
        if fields.len() < 4 {
            return Err(bad());
        }
        let doubled: i64 = fields[0].parse().map_err(|_| bad())?;
        let level: u64 = fields[1].parse().map_err(|_| bad())?;
        let n0: u64 = fields[fields.len() - 1].parse().map_err(|_| bad())?;
        // Generator specs may themselves contain commas.
        let char_spec = fields[2..fields.len() - 1].join(",");
        let chi = DirichletCharacter::parse(&char_spec)?;
        Self::new(HalfWeight::from_doubled(doubled), level, chi, n0)
    }

    /// The same form viewed at a multiple of its level.
    pub fn at_level(&self, level: u64) -> Result<Self> {
        if level % self.level != 0 {
            return Err(Error::InvalidArgument(format!("{} does not divide {level}", self.level)));
        }
        Self::new(self.weight, level, self.character.clone(), self.pole_order)
    }

    pub fn lcm_level(&self, other: &FormMeta) -> u64 {
        self.level.lcm(&other.level)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FormMetaSummary {
    pub weight: String,
    pub level: u64,
    pub character: String,
    pub pole_order: u64,
}

impl From<&FormMeta> for FormMetaSummary {
    fn from(m: &FormMeta) -> Self {
        FormMetaSummary {
            weight: m.weight.to_string(),
            level: m.level,
            character: m.character.label().to_string(),
            pole_order: m.pole_order,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weight_parsing() {
        assert_eq!("5/2".parse::<HalfWeight>().unwrap().doubled, 5);
        assert_eq!("-23/2".parse::<HalfWeight>().unwrap().doubled, -23);
        assert_eq!("12".parse::<HalfWeight>().unwrap().doubled, 24);
        assert_eq!("-11.5".parse::<HalfWeight>().unwrap().doubled, -23);
        assert!("1/3".parse::<HalfWeight>().is_err());
        assert_eq!(HalfWeight::from_doubled(3).to_string(), "3/2");
        assert_eq!(HalfWeight::from_doubled(3).dual().doubled, 1);
    }

    #[test]
    fn metadata_checks() {
        assert!(FormMeta::parse("1,4,triv:1,0").is_ok());
        assert!(FormMeta::parse("1,6,triv:1,0").is_err());
        assert!(FormMeta::parse("3,64,kron:-4,0").is_ok());
        assert!(FormMeta::parse("24,2,triv:3,0").is_err());
        let m = FormMeta::parse("3,100,gen:5:2=1,0").unwrap();
        assert_eq!(m.character.modulus(), 5);
    }
}
