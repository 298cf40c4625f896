use std::fmt;

use num_bigint::BigInt;
use serde::{de::Error as _, Deserialize, Deserializer, Serialize, Serializer};

use super::{Rat, RatFunc};
use crate::error::{Error, Result};

/// A place of Q(t) with rational center, or the place at infinity.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Place {
    Finite(Rat),
    Infinity,
}

impl Place {
    /// Valuation of a nonzero element at this place.
    pub fn valuation(&self, z: &RatFunc) -> Result<i64> {
        match self {
            Place::Finite(a) => z.valuation_at(a),
            Place::Infinity => z.infinite_valuation(),
        }
    }
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Finite(a) => write!(f, "{a}"),
            Place::Infinity => f.write_str("inf"),
        }
    }
}

impl std::str::FromStr for Place {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if matches!(s, "inf" | "infinity" | "∞") {
            return Ok(Place::Infinity);
        }
        let z = super::parse_ratfunc(s)?;
        z.as_constant().map(Place::Finite).ok_or(Error::Parse {
            pos: 0,
            msg: "place must be a rational number or inf".into(),
        })
    }
}

impl Serialize for Place {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Place {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(D::Error::custom)
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct NewtonPoint {
    pub index: usize,
    /// `None` stands for `+∞` (a zero coefficient).
    pub valuation: Option<i64>,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Segment {
    #[serde(with = "super::rat_serde")]
    pub slope: Rat,
    pub length: usize,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct NewtonPolygon {
    pub points: Vec<NewtonPoint>,
    pub lower_hull: Vec<Segment>,
}

impl NewtonPolygon {
    /// Single segment whose slope, in lowest terms, has denominator `d`.
    /// Over Q̄(t) this forces the polynomial to be irreducible of degree `d`
    /// (total ramification at the place).
    pub fn is_totally_ramified(&self, d: usize) -> bool {
        match self.lower_hull.as_slice() {
            [seg] => seg.length == d && *seg.slope.denom() == BigInt::from(d),
            _ => false,
        }
    }
}

/// Lower convex hull of `(j, v(coeffs[j]))`; zero coefficients are skipped.
/// Slopes are `Δv / Δj` and strictly increase along the hull.
pub fn newton_polygon(coeffs: &[RatFunc], place: &Place) -> Result<NewtonPolygon> {
    let top = coeffs
        .iter()
        .rposition(|c| !c.is_zero())
        .ok_or(Error::EmptyInput)?;
    let coeffs = &coeffs[..=top];
    let mut points = Vec::with_capacity(coeffs.len());
    let mut finite: Vec<(i64, i64)> = Vec::new();
    for (j, c) in coeffs.iter().enumerate() {
        if c.is_zero() {
            points.push(NewtonPoint {
                index: j,
                valuation: None,
            });
        } else {
            let v = place.valuation(c)?;
            points.push(NewtonPoint {
                index: j,
                valuation: Some(v),
            });
            finite.push((j as i64, v));
        }
    }
    let mut hull: Vec<(i64, i64)> = Vec::new();
    for &pt in &finite {
        while hull.len() >= 2 {
            let (j0, v0) = hull[hull.len() - 2];
            let (j1, v1) = hull[hull.len() - 1];
            // drop the middle point unless slope(0,1) < slope(1,pt)
            let lhs = (v1 - v0) as i128 * (pt.0 - j1) as i128;
            let rhs = (pt.1 - v1) as i128 * (j1 - j0) as i128;
            if lhs >= rhs {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(pt);
    }
    let lower_hull = hull
        .windows(2)
        .map(|w| {
            let dj = w[1].0 - w[0].0;
            let dv = w[1].1 - w[0].1;
            Segment {
                slope: Rat::new(dv.into(), dj.into()),
                length: dj as usize,
            }
        })
        .collect();
    Ok(NewtonPolygon { points, lower_hull })
}
