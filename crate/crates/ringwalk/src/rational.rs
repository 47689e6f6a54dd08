//! Exact rational phase coefficients.
//!
//! Phase schedules are stored as exact rationals so that winding integers
//! derived from them are exact, never rounded floats.

use num_rational::Ratio;
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::str::FromStr;

/// A rational coefficient `c` multiplying the modulation parameter φ.
///
/// Parsed from `"p"` or `"p/q"`; numerator and denominator are limited to
/// `i32` range so sums of schedules never overflow the `i64` backing.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PhaseCoeff(Ratio<i64>);

/// Error produced when parsing a [`PhaseCoeff`].
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CoeffParseError {
    #[error("empty coefficient")]
    Empty,
    #[error("invalid integer `{0}`")]
    BadInteger(String),
    #[error("coefficient denominator is zero")]
    ZeroDenominator,
    #[error("coefficient `{0}` has more than one `/`")]
    ExtraSlash(String),
}

impl PhaseCoeff {
    pub fn new(numer: i32, denom: i32) -> Result<Self, CoeffParseError> {
        if denom == 0 {
            return Err(CoeffParseError::ZeroDenominator);
        }
        Ok(PhaseCoeff(Ratio::new(i64::from(numer), i64::from(denom))))
    }

    pub fn integer(n: i32) -> Self {
        PhaseCoeff(Ratio::from_integer(i64::from(n)))
    }

    pub fn zero() -> Self {
        Self::integer(0)
    }

    pub fn to_f64(self) -> f64 {
        *self.0.numer() as f64 / *self.0.denom() as f64
    }

    pub fn is_integer(self) -> bool {
        self.0.is_integer()
    }

    pub fn ratio(self) -> Ratio<i64> {
        self.0
    }

    /// Exact sum of a schedule; `None` when the sum is not an integer.
    pub fn integer_sum(coeffs: &[PhaseCoeff]) -> Option<i64> {
        let total: Ratio<i64> = coeffs.iter().map(|c| c.0).sum();
        total.is_integer().then(|| total.to_integer())
    }
}

impl fmt::Display for PhaseCoeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for PhaseCoeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PhaseCoeff({self})")
    }
}

impl FromStr for PhaseCoeff {
    type Err = CoeffParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() {
            return Err(CoeffParseError::Empty);
        }
        let mut parts = s.split('/');
        let numer = parts.next().ok_or(CoeffParseError::Empty)?;
        let numer: i32 = numer
            .trim()
            .parse()
            .map_err(|_| CoeffParseError::BadInteger(numer.to_string()))?;
        let denom: i32 = match parts.next() {
            None => 1,
            Some(d) => d
                .trim()
                .parse()
                .map_err(|_| CoeffParseError::BadInteger(d.to_string()))?,
        };
        if parts.next().is_some() {
            return Err(CoeffParseError::ExtraSlash(s.to_string()));
        }
        PhaseCoeff::new(numer, denom)
    }
}

impl Serialize for PhaseCoeff {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for PhaseCoeff {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct V;
        impl de::Visitor<'_> for V {
            type Value = PhaseCoeff;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an integer or a string like \"p/q\"")
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<PhaseCoeff, E> {
                let n = i32::try_from(v)
                    .map_err(|_| E::custom(format!("coefficient {v} out of range")))?;
                Ok(PhaseCoeff::integer(n))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<PhaseCoeff, E> {
                let n = i32::try_from(v)
                    .map_err(|_| E::custom(format!("coefficient {v} out of range")))?;
                Ok(PhaseCoeff::integer(n))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<PhaseCoeff, E> {
                v.parse().map_err(E::custom)
            }
        }
        deserializer.deserialize_any(V)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_integers_and_fractions() {
        assert_eq!("3".parse::<PhaseCoeff>().unwrap(), PhaseCoeff::integer(3));
        assert_eq!("-1".parse::<PhaseCoeff>().unwrap(), PhaseCoeff::integer(-1));
        assert_eq!(
            " 1 / 2 ".parse::<PhaseCoeff>().unwrap(),
            PhaseCoeff::new(1, 2).unwrap()
        );
        assert_eq!(
            "-3/6".parse::<PhaseCoeff>().unwrap(),
            PhaseCoeff::new(-1, 2).unwrap()
        );
    }

    #[test]
    fn rejects_malformed() {
        assert!("".parse::<PhaseCoeff>().is_err());
        assert!("1/0".parse::<PhaseCoeff>().is_err());
        assert!("1/2/3".parse::<PhaseCoeff>().is_err());
        assert!("a".parse::<PhaseCoeff>().is_err());
        assert!("1.5".parse::<PhaseCoeff>().is_err());
        assert!("99999999999999999999".parse::<PhaseCoeff>().is_err());
    }

    #[test]
    fn integer_sum_detects_non_integers() {
        let half = PhaseCoeff::new(1, 2).unwrap();
        assert_eq!(PhaseCoeff::integer_sum(&[half, half]), Some(1));
        assert_eq!(PhaseCoeff::integer_sum(&[half]), None);
        let c = [
            PhaseCoeff::integer(1),
            PhaseCoeff::zero(),
            PhaseCoeff::integer(-1),
            PhaseCoeff::integer(1),
        ];
        assert_eq!(PhaseCoeff::integer_sum(&c), Some(1));
    }

    #[test]
    fn display_round_trips() {
        for s in ["0", "7", "-4", "1/2", "-5/3"] {
            let c: PhaseCoeff = s.parse().unwrap();
            assert_eq!(c.to_string(), s);
        }
    }
}
