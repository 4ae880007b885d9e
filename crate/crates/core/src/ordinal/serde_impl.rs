//! JSON form: `{"terms":[{"exp":<ordinal>,"coeff":<int>}]}`.
//!
//! Coefficients that do not fit in a `u64` are written as decimal strings.

use serde::de::Error as _;
use serde::ser::SerializeStruct;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{Cnf, Coefficient, Term};

struct CoeffOut<'a, C>(&'a C);

impl<C: Coefficient> Serialize for CoeffOut<'_, C> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.0.to_u64() {
            Some(v) => s.serialize_u64(v),
            None => s.serialize_str(&self.0.to_string()),
        }
    }
}

impl<C: Coefficient> Serialize for Term<C> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Term", 2)?;
        st.serialize_field("exp", &self.exp)?;
        st.serialize_field("coeff", &CoeffOut(&self.coeff))?;
        st.end()
    }
}

impl<C: Coefficient> Serialize for Cnf<C> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Ordinal", 1)?;
        st.serialize_field("terms", &self.terms)?;
        st.end()
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum CoeffIn {
    Num(u64),
    Text(String),
}

#[derive(Deserialize)]
struct TermIn {
    exp: serde_json::Value,
    coeff: CoeffIn,
}

#[derive(Deserialize)]
struct CnfIn {
    terms: Vec<TermIn>,
}

fn convert<C: Coefficient>(raw: CnfIn) -> Result<Cnf<C>, String> {
    let mut terms = Vec::with_capacity(raw.terms.len());
    for t in raw.terms {
        let exp_raw: CnfIn = serde_json::from_value(t.exp).map_err(|e| e.to_string())?;
        let exp = convert(exp_raw)?;
        let coeff = match t.coeff {
            CoeffIn::Num(v) => C::from_u64(v).ok_or("coefficient out of range")?,
            CoeffIn::Text(s) => s.parse::<C>().map_err(|_| format!("bad coefficient '{s}'"))?,
        };
        terms.push(Term { exp, coeff });
    }
    Cnf::from_terms(terms).ok_or_else(|| "terms are not in Cantor normal form".to_string())
}

impl<'de, C: Coefficient> Deserialize<'de> for Cnf<C> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        convert(CnfIn::deserialize(d)?).map_err(D::Error::custom)
    }
}
