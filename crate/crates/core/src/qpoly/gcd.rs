//! Polynomial gcd over Q.
//!
//! Inputs are cleared to primitive integer polynomials. A word-size modular
//! image bounds the gcd degree first; most calls made by the certificate layer
//! are coprimality checks and stop there. The remaining cases run a
//! subresultant pseudo-remainder sequence with a final content strip.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::modp::gcd_degree_bound;
use super::poly::Poly;

/// Divides out the integer content and makes the leading coefficient positive.
pub(crate) fn make_primitive(v: &mut Vec<BigInt>) {
    while v.last().is_some_and(Zero::is_zero) {
        v.pop();
    }
    let Some(lc) = v.last() else { return };
    let mut g = BigInt::zero();
    for c in v.iter() {
        g = g.gcd(c);
        if g.is_one() {
            break;
        }
    }
    if lc.is_negative() {
        g = -g;
    }
    if !g.is_one() {
        for c in v.iter_mut() {
            *c = &*c / &g;
        }
    }
}

fn deg(v: &[BigInt]) -> usize {
    v.len() - 1
}

/// `lc(b)^(deg a - deg b + 1) * a mod b` over Z.
fn prem(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let db = deg(b);
    let lb = &b[db];
    let mut r = a.to_vec();
    let mut steps = (deg(a) + 1 - db) as u32;
    while !r.is_empty() && r.len() > db {
        let dr = r.len() - 1;
        let lr = r[dr].clone();
        for c in r.iter_mut() {
            *c *= lb;
        }
        for (i, bc) in b.iter().enumerate() {
            r[i + dr - db] -= &lr * bc;
        }
        r.pop();
        while r.last().is_some_and(Zero::is_zero) {
            r.pop();
        }
        steps -= 1;
    }
    if steps > 0 && !r.is_empty() {
        let k = num_traits::pow(lb.clone(), steps as usize);
        for c in r.iter_mut() {
            *c *= &k;
        }
    }
    r
}

fn subresultant_gcd(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let (mut a, mut b) = if a.len() >= b.len() {
        (a.to_vec(), b.to_vec())
    } else {
        (b.to_vec(), a.to_vec())
    };
    make_primitive(&mut a);
    make_primitive(&mut b);
    let mut g = BigInt::one();
    let mut h = BigInt::one();
    loop {
        let delta = (deg(&a) - deg(&b)) as u32;
        let r = prem(&a, &b);
        if r.is_empty() {
            break;
        }
        if r.len() == 1 {
            return vec![BigInt::one()];
        }
        let divisor = &g * num_traits::pow(h.clone(), delta as usize);
        let r: Vec<BigInt> = r.into_iter().map(|c| c / &divisor).collect();
        a = std::mem::replace(&mut b, r);
        g = a[deg(&a)].clone();
        h = match delta {
            0 => h,
            1 => g.clone(),
            _ => {
                num_traits::pow(g.clone(), delta as usize)
                    / num_traits::pow(h, (delta - 1) as usize)
            }
        };
    }
    make_primitive(&mut b);
    b
}

impl Poly {
    /// Monic gcd; `gcd(0, 0) = 0`.
    pub fn gcd(&self, other: &Poly) -> Poly {
        if self.is_zero() {
            return other.monic();
        }
        if other.is_zero() {
            return self.monic();
        }
        if self.is_constant() || other.is_constant() {
            return Poly::one();
        }
        let ia = self.primitive_int();
        let ib = other.primitive_int();
        let bound = gcd_degree_bound(&ia, &ib);
        if bound == Some(0) {
            return Poly::one();
        }
        let (small, large) = if self.deg() <= other.deg() {
            (self, other)
        } else {
            (other, self)
        };
        if bound == Some(small.deg()) && small.divides(large) {
            return small.monic();
        }
        Poly::from_ints(subresultant_gcd(&ia, &ib)).monic()
    }

    pub fn is_coprime(&self, other: &Poly) -> bool {
        self.gcd(other).is_constant()
    }

    pub fn lcm(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let g = self.gcd(other);
        (self * &other.exact_div(&g).expect("gcd divides")).monic()
    }
}
