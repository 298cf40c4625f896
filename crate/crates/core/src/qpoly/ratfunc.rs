use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{One, Zero};
use serde::{de::Error as _, Deserialize, Deserializer, Serialize, Serializer};

use super::squarefree::yun_squarefree;
use super::{Poly, Rat};
use crate::error::{Error, Result};

/// Element of Q(t) in reduced form: `gcd(num, den) = 1`, `den` monic.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatFunc {
    num: Poly,
    den: Poly,
}

impl RatFunc {
    /// Reduced representative of `num / den`.
    pub fn normalize(num: Poly, den: Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        if num.is_zero() {
            return Ok(Self::zero());
        }
        let (num, den) = if den.is_constant() {
            (num, den)
        } else {
            let g = num.gcd(&den);
            if g.is_one() {
                (num, den)
            } else {
                (
                    num.exact_div(&g).expect("gcd divides"),
                    den.exact_div(&g).expect("gcd divides"),
                )
            }
        };
        let lc = den.leading();
        if lc.is_one() {
            return Ok(RatFunc { num, den });
        }
        let inv = lc.recip();
        Ok(RatFunc {
            num: num.scale(&inv),
            den: den.scale(&inv),
        })
    }

    pub fn from_poly(p: Poly) -> Self {
        RatFunc {
            num: p,
            den: Poly::one(),
        }
    }

    pub fn constant(c: Rat) -> Self {
        Self::from_poly(Poly::constant(c))
    }

    pub fn zero() -> Self {
        Self::from_poly(Poly::zero())
    }

    pub fn one() -> Self {
        Self::from_poly(Poly::one())
    }

    pub fn t() -> Self {
        Self::from_poly(Poly::t())
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    /// Element of the constant field Q.
    pub fn is_constant(&self) -> bool {
        self.num.is_constant() && self.den.is_one()
    }

    pub fn as_constant(&self) -> Option<Rat> {
        self.is_constant().then(|| self.num.coeff(0))
    }

    pub fn pow(&self, e: u32) -> RatFunc {
        // coprimality and monicity survive powering
        RatFunc {
            num: self.num.pow(e),
            den: self.den.pow(e),
        }
    }

    pub fn recip(&self) -> Result<RatFunc> {
        if self.is_zero() {
            return Err(Error::ZeroInput);
        }
        RatFunc::normalize(self.den.clone(), self.num.clone())
    }

    /// Order of vanishing at `t = a`.
    pub fn valuation_at(&self, a: &Rat) -> Result<i64> {
        if self.is_zero() {
            return Err(Error::ZeroInput);
        }
        Ok(self.num.root_multiplicity(a) as i64 - self.den.root_multiplicity(a) as i64)
    }

    /// Valuation at the place `t = ∞`: `deg den - deg num`.
    pub fn infinite_valuation(&self) -> Result<i64> {
        if self.is_zero() {
            return Err(Error::ZeroInput);
        }
        Ok(self.den.deg() as i64 - self.num.deg() as i64)
    }

    /// Function-field Weil height: total pole order, `max(deg num, deg den)`.
    pub fn weil_height(&self) -> u64 {
        if self.is_zero() {
            return 0;
        }
        self.num.deg().max(self.den.deg()) as u64
    }

    /// The same height summed place by place: finite poles from the Yun
    /// decomposition of the denominator, weighted by factor degree, plus the
    /// pole order at infinity.
    pub fn weil_height_by_places(&self) -> u64 {
        if self.is_zero() {
            return 0;
        }
        let finite: u64 = if self.den.is_constant() {
            0
        } else {
            yun_squarefree(&self.den)
                .expect("nonzero denominator")
                .iter()
                .map(|(f, m)| (f.deg() * m) as u64)
                .sum()
        };
        let at_inf = (-self.infinite_valuation().expect("nonzero")).max(0) as u64;
        finite + at_inf
    }

    /// Exact value at `t = a`.
    pub fn specialize(&self, a: &Rat) -> Result<Rat> {
        let d = self.den.eval(a);
        if d.is_zero() {
            return Err(Error::PoleAtPoint);
        }
        Ok(self.num.eval(a) / d)
    }

    /// Square root in Q(t), normalized so the numerator has a positive
    /// leading coefficient.
    pub fn sqrt(&self) -> Option<RatFunc> {
        if self.is_zero() {
            return Some(RatFunc::zero());
        }
        // gcd(num, den) = 1, so num/den is a square iff num*den is
        let s = (&self.num * &self.den).sqrt()?;
        Some(RatFunc::normalize(s, self.den.clone()).expect("nonzero denominator"))
    }

    fn add_sub(&self, rhs: &RatFunc, sub: bool) -> RatFunc {
        let combine = |a: &Poly, b: &Poly| if sub { a - b } else { a + b };
        if self.den == rhs.den {
            let num = combine(&self.num, &rhs.num);
            if self.den.is_one() {
                return RatFunc::from_poly(num);
            }
            return RatFunc::normalize(num, self.den.clone()).expect("nonzero denominator");
        }
        if rhs.den.is_one() {
            let num = combine(&self.num, &(&rhs.num * &self.den));
            // den stays coprime to the new numerator
            return RatFunc {
                num,
                den: self.den.clone(),
            };
        }
        if self.den.is_one() {
            let num = combine(&(&self.num * &rhs.den), &rhs.num);
            return RatFunc {
                num,
                den: rhs.den.clone(),
            };
        }
        let num = combine(&(&self.num * &rhs.den), &(&rhs.num * &self.den));
        RatFunc::normalize(num, &self.den * &rhs.den).expect("nonzero denominator")
    }
}

impl Add for &RatFunc {
    type Output = RatFunc;
    fn add(self, rhs: &RatFunc) -> RatFunc {
        self.add_sub(rhs, false)
    }
}

impl Sub for &RatFunc {
    type Output = RatFunc;
    fn sub(self, rhs: &RatFunc) -> RatFunc {
        self.add_sub(rhs, true)
    }
}

impl Mul for &RatFunc {
    type Output = RatFunc;
    fn mul(self, rhs: &RatFunc) -> RatFunc {
        if self.den.is_one() && rhs.den.is_one() {
            return RatFunc::from_poly(&self.num * &rhs.num);
        }
        RatFunc::normalize(&self.num * &rhs.num, &self.den * &rhs.den).expect("nonzero denominator")
    }
}

/// Panics on division by zero; use [`RatFunc::recip`] for a checked inverse.
impl Div for &RatFunc {
    type Output = RatFunc;
    fn div(self, rhs: &RatFunc) -> RatFunc {
        assert!(!rhs.is_zero(), "division by zero in Q(t)");
        RatFunc::normalize(&self.num * &rhs.den, &self.den * &rhs.num).expect("nonzero denominator")
    }
}

impl Neg for &RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        RatFunc {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for RatFunc {
            type Output = RatFunc;
            fn $m(self, rhs: RatFunc) -> RatFunc {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&RatFunc> for RatFunc {
            type Output = RatFunc;
            fn $m(self, rhs: &RatFunc) -> RatFunc {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Neg for RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        -&self
    }
}

impl From<Poly> for RatFunc {
    fn from(p: Poly) -> Self {
        RatFunc::from_poly(p)
    }
}

impl From<Rat> for RatFunc {
    fn from(c: Rat) -> Self {
        RatFunc::constant(c)
    }
}

/// Canonical serialization `(num)/(den)`.
impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})/({})", self.num, self.den)
    }
}

impl fmt::Debug for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RatFunc{self}")
    }
}

impl std::str::FromStr for RatFunc {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        super::parse_ratfunc(s)
    }
}

impl Serialize for RatFunc {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for RatFunc {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        super::parse_ratfunc(&s).map_err(D::Error::custom)
    }
}

/// A finite set of places of Q̄(t): the Q̄-roots of a monic squarefree
/// polynomial over Q, optionally together with the place at infinity.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct PlaceWitness {
    pub finite_part: Poly,
    pub includes_infinity: bool,
}

impl PlaceWitness {
    pub fn empty() -> Self {
        PlaceWitness {
            finite_part: Poly::one(),
            includes_infinity: false,
        }
    }

    /// `finite_part` must be nonzero; it is made monic. Squarefreeness is
    /// the caller's obligation and is checked in debug builds.
    pub fn new(finite_part: Poly, includes_infinity: bool) -> Self {
        assert!(!finite_part.is_zero(), "witness polynomial must be nonzero");
        let finite_part = finite_part.monic();
        debug_assert!(
            finite_part.is_constant() || finite_part.is_coprime(&finite_part.derivative()),
            "witness polynomial must be squarefree"
        );
        PlaceWitness {
            finite_part,
            includes_infinity,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.finite_part.is_constant() && !self.includes_infinity
    }

    /// Number of places of Q̄(t) in the set.
    pub fn place_count(&self) -> usize {
        self.finite_part.deg() + usize::from(self.includes_infinity)
    }

    /// Drops every finite place at which `g` vanishes; `g = 0` drops them all.
    pub fn remove_roots_of(&mut self, g: &Poly) {
        if g.is_zero() {
            self.finite_part = Poly::one();
            return;
        }
        if self.finite_part.is_constant() || g.is_constant() {
            return;
        }
        let common = self.finite_part.gcd(g);
        if !common.is_constant() {
            self.finite_part = self
                .finite_part
                .exact_div(&common)
                .expect("gcd divides")
                .monic();
        }
    }

    pub fn union(&self, other: &PlaceWitness) -> PlaceWitness {
        PlaceWitness {
            finite_part: self.finite_part.lcm(&other.finite_part),
            includes_infinity: self.includes_infinity || other.includes_infinity,
        }
    }

    pub fn divides(&self, other: &PlaceWitness) -> bool {
        self.finite_part.divides(&other.finite_part)
            && (!self.includes_infinity || other.includes_infinity)
    }
}

impl fmt::Display for PlaceWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.finite_part)?;
        if self.includes_infinity {
            f.write_str(" + place at infinity")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qpoly::{rat, rat_frac};

    fn p(v: &[i64]) -> Poly {
        Poly::from_i64s(v)
    }

    fn rf(n: &[i64], d: &[i64]) -> RatFunc {
        RatFunc::normalize(p(n), p(d)).unwrap()
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(rf(&[-1, 0, 1], &[-1, 1]), RatFunc::from_poly(p(&[1, 1])));
        assert_eq!(rf(&[0, 2], &[2]), RatFunc::t());
        assert_eq!(rf(&[0, 1], &[0, 1]), RatFunc::one());
        assert_eq!(
            RatFunc::normalize(p(&[1]), Poly::zero()),
            Err(Error::ZeroDenominator)
        );
        let z = rf(&[1], &[0, 3]);
        assert!(z.den().is_monic());
        assert_eq!(z.num(), &Poly::constant(rat_frac(1, 3)));
    }

    #[test]
    fn valuation_examples() {
        let z = rf(&[0, 0, 1], &[-1, 1]);
        assert_eq!(z.valuation_at(&rat(0)), Ok(2));
        assert_eq!(z.valuation_at(&rat(1)), Ok(-1));
        assert_eq!(z.valuation_at(&rat(2)), Ok(0));
        assert_eq!(z.infinite_valuation(), Ok(-1));
        assert_eq!(rf(&[1], &[0, 1]).infinite_valuation(), Ok(1));
        assert_eq!(rf(&[1, 1], &[2, 1]).infinite_valuation(), Ok(0));
        assert_eq!(RatFunc::zero().valuation_at(&rat(0)), Err(Error::ZeroInput));
        assert_eq!(RatFunc::zero().infinite_valuation(), Err(Error::ZeroInput));
    }

    #[test]
    fn height_examples() {
        assert_eq!(rf(&[0, 0, 1], &[-1, 1]).weil_height(), 2);
        assert_eq!(RatFunc::constant(rat_frac(7, 3)).weil_height(), 0);
        assert_eq!(rf(&[1, 0, 0, 1], &[0, 0, 0, 0, 0, 1]).weil_height(), 5);
        assert_eq!(RatFunc::zero().weil_height(), 0);
    }

    #[test]
    fn specialize_examples() {
        assert_eq!(rf(&[-1, 2, 1], &[1]).specialize(&rat(1)), Ok(rat(2)));
        assert_eq!(
            rf(&[1], &[-1, 1]).specialize(&rat(1)),
            Err(Error::PoleAtPoint)
        );
    }

    #[test]
    fn arithmetic_stays_reduced() {
        let a = rf(&[1], &[-1, 1]);
        let b = rf(&[1], &[1, 1]);
        let s = &a + &b; // 2t/(t^2-1)
        assert_eq!(s, rf(&[0, 2], &[-1, 0, 1]));
        let d = &a - &a;
        assert!(d.is_zero());
        let q = &s / &a; // 2t/(t+1)
        assert_eq!(q, rf(&[0, 2], &[1, 1]));
    }
}
