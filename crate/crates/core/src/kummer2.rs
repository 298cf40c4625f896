//! Brute-force Galois orders for `x^2 + c` at levels 1 and 2.
//!
//! Kummer theory over `Q(t)` reduces both orders to square tests. Level 1 is
//! `Q(t)(sqrt(D))` with `D = beta - c`. Level 2 adjoins the square roots of
//! `z - c` and `-z - c` where `z = sqrt(D)`; the new group is `C_2^k` with `2^k`
//! the size of the subgroup of `K1*/K1*^2` they generate.
//!
//! The oracle works over `Q(t)` while certificates speak over `Q̄(t)`. Orders
//! over `Q̄(t)` divide those over `Q(t)` and both are capped at 2 and 4, so a
//! saturated certificate must meet the maximal order here.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qpoly::{Rat, RatFunc};

/// `sqrt(z)` in `Q(t)` when it exists.
pub fn sqrt_qt(z: &RatFunc) -> Option<RatFunc> {
    z.sqrt()
}

/// Whether `z` is a square in `Q(t)`, sign and constant included.
pub fn is_square_qt(z: &RatFunc) -> Result<bool> {
    if z.is_zero() {
        return Err(Error::ZeroInput);
    }
    Ok(sqrt_qt(z).is_some())
}

/// `u + v*sqrt(d)` in `Q(t)(sqrt(d))`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct QuadElem {
    pub u: RatFunc,
    pub v: RatFunc,
    pub d: RatFunc,
}

impl QuadElem {
    pub fn new(u: RatFunc, v: RatFunc, d: RatFunc) -> Self {
        QuadElem { u, v, d }
    }

    pub fn is_zero(&self) -> bool {
        self.u.is_zero() && self.v.is_zero()
    }

    pub fn mul(&self, other: &QuadElem) -> QuadElem {
        debug_assert_eq!(self.d, other.d);
        let u = &(&self.u * &other.u) + &(&(&self.v * &other.v) * &self.d);
        let v = &(&self.u * &other.v) + &(&self.v * &other.u);
        QuadElem {
            u,
            v,
            d: self.d.clone(),
        }
    }

    /// `u^2 - v^2 d`.
    pub fn norm(&self) -> RatFunc {
        &(&self.u * &self.u) - &(&(&self.v * &self.v) * &self.d)
    }
}

/// Whether `x` is a square in `Q(t)(sqrt(d))`.
///
/// For `v != 0`, `x = (a + b sqrt(d))^2` forces `a^2 = (u +- w)/2` with
/// `w^2 = u^2 - v^2 d`, and `a` then determines `b = v/(2a)`. For `v = 0`,
/// either `a = 0` or `b = 0`, so `u` or `u d` is a square in `Q(t)`.
pub fn is_square_in_quadratic(x: &QuadElem) -> Result<bool> {
    if x.d.is_zero() || sqrt_qt(&x.d).is_some() {
        return Err(Error::InvalidExtension);
    }
    if x.is_zero() {
        return Err(Error::ZeroInput);
    }
    if x.v.is_zero() {
        return Ok(sqrt_qt(&x.u).is_some() || sqrt_qt(&(&x.u * &x.d)).is_some());
    }
    let Some(w) = sqrt_qt(&x.norm()) else {
        return Ok(false);
    };
    let half = RatFunc::constant(Rat::new(1.into(), 2.into()));
    let plus = &(&x.u + &w) * &half;
    let minus = &(&x.u - &w) * &half;
    Ok(sqrt_qt(&plus).is_some() || sqrt_qt(&minus).is_some())
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct GalOrders {
    pub order1: u32,
    pub order2: u32,
}

/// Orders of `Gal(K1/K)` and `Gal(K2/K1)` for `x^2 + c` over `K = Q(t)`.
/// A split first level (`beta - c` a square) is outside the oracle.
pub fn gal_orders_level12(c: &RatFunc, beta: &RatFunc) -> Result<GalOrders> {
    let d = beta - c;
    if d.is_zero() || sqrt_qt(&d).is_some() {
        return Err(Error::DegenerateTower);
    }
    let neg_c = -c;
    let one = RatFunc::one();
    let plus = QuadElem::new(neg_c.clone(), one.clone(), d.clone());
    let minus = QuadElem::new(neg_c, -&one, d.clone());
    // (z - c)(-z - c) = c^2 - d
    let product = QuadElem::new(&(c * c) - &d, RatFunc::zero(), d);
    let mut squares = 0;
    for x in [&plus, &minus, &product] {
        // all three are nonzero since d is not a square
        if is_square_in_quadratic(x)? {
            squares += 1;
        }
    }
    let order2 = match squares {
        0 => 4,
        3 => 1,
        _ => 2,
    };
    Ok(GalOrders { order1: 2, order2 })
}
