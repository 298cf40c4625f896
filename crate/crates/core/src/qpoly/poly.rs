use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{de::Error as _, Deserialize, Deserializer, Serialize, Serializer};

use super::Rat;

/// Dense univariate polynomial over Q in the variable `t`, constant term first.
///
/// The coefficient vector never carries trailing zeros, so the zero polynomial
/// is the empty vector.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    coeffs: Vec<Rat>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Rat>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn from_i64s(coeffs: &[i64]) -> Self {
        Self::new(
            coeffs
                .iter()
                .map(|&c| Rat::from_integer(c.into()))
                .collect(),
        )
    }

    pub fn from_ints(coeffs: Vec<BigInt>) -> Self {
        Self::new(coeffs.into_iter().map(Rat::from_integer).collect())
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly {
            coeffs: vec![Rat::one()],
        }
    }

    pub fn constant(c: Rat) -> Self {
        Self::new(vec![c])
    }

    /// The variable `t`.
    pub fn t() -> Self {
        Self::monomial(Rat::one(), 1)
    }

    pub fn monomial(c: Rat, k: usize) -> Self {
        let mut coeffs = vec![Rat::zero(); k + 1];
        coeffs[k] = c;
        Self::new(coeffs)
    }

    /// `t - a`
    pub fn linear_root(a: &Rat) -> Self {
        Poly {
            coeffs: vec![-a.clone(), Rat::one()],
        }
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Rat> {
        self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Rat {
        self.coeffs.get(k).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    /// True for nonzero constants and for zero.
    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree with `deg 0 = 0`; callers use this where the zero case is excluded.
    pub fn deg(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> Rat {
        self.coeffs.last().cloned().unwrap_or_else(Rat::zero)
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().is_some_and(One::is_one)
    }

    pub fn monic(&self) -> Poly {
        match self.coeffs.last() {
            None => Poly::zero(),
            Some(lc) if lc.is_one() => self.clone(),
            Some(lc) => {
                let inv = lc.recip();
                Poly {
                    coeffs: self.coeffs.iter().map(|c| c * &inv).collect(),
                }
            }
        }
    }

    pub fn scale(&self, k: &Rat) -> Poly {
        if k.is_zero() {
            return Poly::zero();
        }
        Poly {
            coeffs: self.coeffs.iter().map(|c| c * k).collect(),
        }
    }

    pub fn eval(&self, a: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * a + c;
        }
        acc
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * Rat::from_integer(BigInt::from(k)))
                .collect(),
        )
    }

    pub fn pow(&self, mut e: u32) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Euclidean division over Q. Panics if `d` is zero.
    pub fn div_rem(&self, d: &Poly) -> (Poly, Poly) {
        let dd = d.degree().expect("division by the zero polynomial");
        if self.deg() < dd || self.is_zero() {
            return (Poly::zero(), self.clone());
        }
        let inv_lc = d.leading().recip();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![Rat::zero(); rem.len() - dd];
        for k in (dd..rem.len()).rev() {
            if rem[k].is_zero() {
                continue;
            }
            let q = &rem[k] * &inv_lc;
            for (i, dc) in d.coeffs.iter().enumerate() {
                let idx = k - dd + i;
                rem[idx] -= &q * dc;
            }
            quot[k - dd] = q;
        }
        rem.truncate(dd);
        (Poly::new(quot), Poly::new(rem))
    }

    pub fn rem(&self, d: &Poly) -> Poly {
        self.div_rem(d).1
    }

    pub fn divides(&self, other: &Poly) -> bool {
        !self.is_zero() && other.rem(self).is_zero()
    }

    /// Quotient when `d` divides `self` exactly.
    pub fn exact_div(&self, d: &Poly) -> Option<Poly> {
        let (q, r) = self.div_rem(d);
        r.is_zero().then_some(q)
    }

    /// Multiplicity of `t = a` as a root. Panics on the zero polynomial.
    pub fn root_multiplicity(&self, a: &Rat) -> usize {
        assert!(
            !self.is_zero(),
            "multiplicity at a root of the zero polynomial"
        );
        let mut count = 0;
        let mut cur = self.coeffs.clone();
        loop {
            // synthetic division by (t - a)
            let n = cur.len();
            if n < 2 {
                return count;
            }
            let mut quot = vec![Rat::zero(); n - 1];
            let mut carry = Rat::zero();
            for k in (0..n).rev() {
                let v = &cur[k] + &carry * a;
                if k == 0 {
                    if !v.is_zero() {
                        return count;
                    }
                } else {
                    quot[k - 1] = v.clone();
                }
                carry = v;
            }
            count += 1;
            cur = quot;
        }
    }

    /// Primitive integer polynomial with positive leading coefficient and the
    /// same roots.
    pub(crate) fn primitive_int(&self) -> Vec<BigInt> {
        let mut l = BigInt::one();
        for c in &self.coeffs {
            l = l.lcm(c.denom());
        }
        let mut ints: Vec<BigInt> = self
            .coeffs
            .iter()
            .map(|c| c.numer() * (&l / c.denom()))
            .collect();
        super::gcd::make_primitive(&mut ints);
        ints
    }

    /// Exact square root over Q when one exists, normalized to a positive
    /// leading coefficient.
    pub fn sqrt(&self) -> Option<Poly> {
        if self.is_zero() {
            return Some(Poly::zero());
        }
        let d = self.deg();
        if d % 2 == 1 {
            return None;
        }
        let m = d / 2;
        let lead = rat_sqrt(&self.leading())?;
        let mut s = vec![Rat::zero(); m + 1];
        s[m] = lead;
        let two_lead = &s[m] * Rat::from_integer(BigInt::from(2));
        for k in 1..=m {
            // coefficient of t^(2m-k) in s^2
            let target = 2 * m - k;
            let mut acc = Rat::zero();
            for i in (m - k + 1)..=m {
                let j = target - i;
                if j > m || j < m - k + 1 {
                    continue;
                }
                acc += &s[i] * &s[j];
            }
            s[m - k] = (&self.coeffs[target] - acc) / &two_lead;
        }
        let root = Poly::new(s);
        (&root * &root == *self).then_some(root)
    }
}

/// Square root in Q, if any.
pub(crate) fn rat_sqrt(r: &Rat) -> Option<Rat> {
    if r.is_negative() {
        return None;
    }
    let n = int_sqrt(r.numer())?;
    let d = int_sqrt(r.denom())?;
    Some(Rat::new(n, d))
}

fn int_sqrt(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let s = n.sqrt();
    (&s * &s == *n).then_some(s)
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let (long, short) = if self.coeffs.len() >= rhs.coeffs.len() {
            (self, rhs)
        } else {
            (rhs, self)
        };
        let mut out = long.coeffs.clone();
        for (o, c) in out.iter_mut().zip(&short.coeffs) {
            *o += c;
        }
        Poly::new(out)
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = self.coeffs.clone();
        out.resize(n, Rat::zero());
        for (o, c) in out.iter_mut().zip(&rhs.coeffs) {
            *o -= c;
        }
        Poly::new(out)
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Rat::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] += a * b;
                }
            }
        }
        Poly::new(out)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Poly {
            type Output = Poly;
            fn $m(self, rhs: Poly) -> Poly {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Poly> for Poly {
            type Output = Poly;
            fn $m(self, rhs: &Poly) -> Poly {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let abs = c.abs();
            if first {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            first = false;
            match k {
                0 => write!(f, "{abs}")?,
                _ => {
                    if !abs.is_one() {
                        write!(f, "{abs}*")?;
                    }
                    if k == 1 {
                        f.write_str("t")?;
                    } else {
                        write!(f, "t^{k}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({self})")
    }
}

impl Serialize for Poly {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Poly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        let z = super::parse_ratfunc(&s).map_err(D::Error::custom)?;
        if !z.den().is_one() {
            return Err(D::Error::custom("expected a polynomial"));
        }
        Ok(z.num().clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qpoly::{rat, rat_frac};

    #[test]
    fn display_round_trips_through_parser() {
        let p = Poly::new(vec![rat(-1), rat_frac(1, 2), rat(0), rat(-3)]);
        assert_eq!(p.to_string(), "-3*t^3 + 1/2*t - 1");
        let back = crate::qpoly::parse_ratfunc(&p.to_string()).unwrap();
        assert_eq!(back.num(), &p);
        assert_eq!(Poly::zero().to_string(), "0");
        assert_eq!(Poly::from_i64s(&[-1, 2, 1]).to_string(), "t^2 + 2*t - 1");
    }

    #[test]
    fn division_and_multiplicity() {
        let a = Poly::from_i64s(&[-1, 0, 1]); // t^2 - 1
        let b = Poly::from_i64s(&[-1, 1]);
        let (q, r) = a.div_rem(&b);
        assert_eq!(q, Poly::from_i64s(&[1, 1]));
        assert!(r.is_zero());
        let c = Poly::from_i64s(&[-1, 1]).pow(3) * Poly::from_i64s(&[2, 1]);
        assert_eq!(c.root_multiplicity(&rat(1)), 3);
        assert_eq!(c.root_multiplicity(&rat(-2)), 1);
        assert_eq!(c.root_multiplicity(&rat(0)), 0);
    }

    #[test]
    fn exact_square_roots() {
        let s = Poly::new(vec![rat_frac(1, 3), rat(-2), rat(0), rat(5)]);
        let sq = &s * &s;
        let r = sq.sqrt().unwrap();
        assert_eq!(&r * &r, sq);
        assert!(Poly::from_i64s(&[1, -2]).sqrt().is_none());
        assert!(Poly::from_i64s(&[2, 0, 2]).sqrt().is_none());
        assert!(Poly::from_i64s(&[-1]).sqrt().is_none());
    }
}
