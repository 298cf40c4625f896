use super::{Poly, RatFunc};
use crate::error::{Error, Result};

/// Yun's squarefree decomposition over Q.
///
/// Returns monic, squarefree, pairwise coprime factors with strictly
/// increasing multiplicities; `p = lc(p) * prod f_i^(m_i)`. A nonzero constant
/// decomposes to the empty list.
pub fn yun_squarefree(p: &Poly) -> Result<Vec<(Poly, usize)>> {
    if p.is_zero() {
        return Err(Error::ZeroInput);
    }
    if p.is_constant() {
        return Ok(Vec::new());
    }
    let dp = p.derivative();
    let a0 = p.gcd(&dp);
    if a0.is_one() {
        return Ok(vec![(p.monic(), 1)]);
    }
    let mut out = Vec::new();
    let mut b = p.exact_div(&a0).expect("gcd divides");
    let c = dp.exact_div(&a0).expect("gcd divides");
    let mut d = &c - &b.derivative();
    let mut i = 1;
    while !b.is_constant() {
        let a = b.gcd(&d);
        let next_b = b.exact_div(&a).expect("gcd divides");
        let c = d.exact_div(&a).expect("gcd divides");
        d = &c - &next_b.derivative();
        if !a.is_constant() {
            out.push((a.monic(), i));
        }
        b = next_b;
        i += 1;
    }
    Ok(out)
}

/// Product of the multiplicity-1 factors: the places where `p` vanishes to
/// order exactly one. Monic; `1` if there are none.
pub fn multiplicity_one_part(p: &Poly) -> Result<Poly> {
    Ok(yun_squarefree(p)?
        .into_iter()
        .find(|(_, m)| *m == 1)
        .map(|(f, _)| f)
        .unwrap_or_else(Poly::one))
}

/// Monic squarefree part (product of all Yun factors).
pub fn radical(p: &Poly) -> Result<Poly> {
    Ok(yun_squarefree(p)?
        .into_iter()
        .fold(Poly::one(), |acc, (f, _)| &acc * &f))
}

/// Whether `z` is a `p`-th power in Q̄(t): every place multiplicity is
/// divisible by `p`. Constants are always `p`-th powers over Q̄.
pub fn is_pth_power_qbar(z: &RatFunc, p: u64) -> Result<bool> {
    if z.is_zero() {
        return Err(Error::ZeroInput);
    }
    for part in [z.num(), z.den()] {
        if yun_squarefree(part)?
            .iter()
            .any(|(_, m)| !(*m as u64).is_multiple_of(p))
        {
            return Ok(false);
        }
    }
    Ok(true)
}
