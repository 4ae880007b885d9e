use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Bound on successor indices: a positive integer or ℵ₀.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CardinalBound {
    Finite(u64),
    #[default]
    Aleph0,
}

impl CardinalBound {
    /// Whether a finite index is strictly below the bound.
    pub fn admits(&self, index: &BigUint) -> bool {
        match self {
            CardinalBound::Finite(k) => *index < BigUint::from(*k),
            CardinalBound::Aleph0 => true,
        }
    }
}

impl fmt::Display for CardinalBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CardinalBound::Finite(k) => write!(f, "{k}"),
            CardinalBound::Aleph0 => f.write_str("aleph0"),
        }
    }
}

impl FromStr for CardinalBound {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "aleph0" | "ℵ0" | "ℵ₀" => Ok(CardinalBound::Aleph0),
            other => match other.parse::<u64>() {
                Ok(0) => Err("cardinal bound must be positive".into()),
                Ok(k) => Ok(CardinalBound::Finite(k)),
                Err(_) => Err(format!("expected a positive integer or 'aleph0', got '{other}'")),
            },
        }
    }
}

impl Serialize for CardinalBound {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            CardinalBound::Finite(k) => s.serialize_u64(*k),
            CardinalBound::Aleph0 => s.serialize_str("aleph0"),
        }
    }
}

impl<'de> Deserialize<'de> for CardinalBound {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(u64),
            Text(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(k) => k.to_string().parse().map_err(serde::de::Error::custom),
            Repr::Text(t) => t.parse().map_err(serde::de::Error::custom),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordering_puts_aleph0_last() {
        assert!(CardinalBound::Finite(1_000_000) < CardinalBound::Aleph0);
        assert!(CardinalBound::Finite(3) < CardinalBound::Finite(4));
        assert_eq!(CardinalBound::Finite(3).max(CardinalBound::Aleph0), CardinalBound::Aleph0);
    }

    #[test]
    fn admits_is_strict() {
        assert!(!CardinalBound::Finite(5).admits(&BigUint::from(5u32)));
        assert!(CardinalBound::Finite(5).admits(&BigUint::from(4u32)));
        assert!(CardinalBound::Aleph0.admits(&BigUint::from(u64::MAX)));
    }

    #[test]
    fn parses() {
        assert_eq!("aleph0".parse::<CardinalBound>(), Ok(CardinalBound::Aleph0));
        assert_eq!("7".parse::<CardinalBound>(), Ok(CardinalBound::Finite(7)));
        assert!("0".parse::<CardinalBound>().is_err());
    }
}
