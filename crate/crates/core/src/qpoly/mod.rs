//! Exact arithmetic over Q and Q(t).
//!
//! Everything in this crate bottoms out here: big rationals, dense univariate
//! polynomials over Q, reduced rational functions, valuations at the places of
//! Q̄(t), Weil heights, Yun squarefree decomposition and Newton polygons.
//!
//! Places of Q̄(t) are never enumerated. A monic squarefree polynomial over Q
//! stands for the set of its Q̄-roots, and every predicate that the
//! certificate layer needs is phrased with gcds and Yun decompositions.

mod gcd;
mod modp;
mod newton;
mod parse;
mod poly;
mod ratfunc;
mod squarefree;

pub use newton::{newton_polygon, NewtonPoint, NewtonPolygon, Place, Segment};
pub use parse::parse_ratfunc;
pub use poly::Poly;
pub use ratfunc::{PlaceWitness, RatFunc};
pub use squarefree::{is_pth_power_qbar, multiplicity_one_part, radical, yun_squarefree};

use num_bigint::BigInt;
use num_rational::BigRational;

/// Constant field element.
pub type Rat = BigRational;

pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn rat_frac(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub mod rat_serde {
    use super::Rat;
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rat, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&r.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rat, D::Error> {
        let s = String::deserialize(d)?;
        s.parse::<Rat>().map_err(D::Error::custom)
    }

    pub mod option {
        use super::Rat;
        use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

        pub fn serialize<S: Serializer>(r: &Option<Rat>, s: S) -> Result<S::Ok, S::Error> {
            match r {
                Some(r) => s.serialize_some(&r.to_string()),
                None => s.serialize_none(),
            }
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Rat>, D::Error> {
            let s = Option::<String>::deserialize(d)?;
            s.map(|s| s.parse::<Rat>().map_err(D::Error::custom))
                .transpose()
        }
    }
}
