//! Condition R and Condition U at the places of Q̄(t).
//!
//! A place `p` satisfies Condition R at `beta` for `f` and `n` when `f` has
//! good separable reduction at `p` (here: `v(c) >= 0`, separability being
//! automatic in residue characteristic 0), `v(d_i) = 0` for `i < n`,
//! `v(d_n) = 1` and `v(beta) = 0`. Condition U asks for `v(d_i) = 0` for all
//! `i <= n` instead of the last two clauses' ramification requirement.

use serde::{Deserialize, Serialize};

use super::{critical_gaps, CriticalGap};
use crate::dynamics::UnicriticalMap;
use crate::error::{Error, Result};
use crate::qpoly::{multiplicity_one_part, radical, PlaceWitness, Poly, RatFunc};

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum Mode {
    R,
    U,
}

/// Mode R: every place satisfying Condition R at level `n`.
///
/// Mode U: the places *failing* Condition U through level `n`. Condition U
/// holds at all but finitely many places, so the exceptional set is the finite
/// object; [`satisfying_u`] filters a candidate set against it. When some
/// `d_i` vanishes identically every place fails Condition U, which has no
/// finite representation, so mode U reports `NotApplicable`.
pub fn condition_witness(
    f: &UnicriticalMap,
    beta: &RatFunc,
    n: u32,
    mode: Mode,
) -> Result<PlaceWitness> {
    let gaps = critical_gaps(f, beta, n)?;
    if mode == Mode::U && gaps.iter().any(|g| g.d.is_zero()) {
        return Err(Error::NotApplicable(
            "some f^i(0) - beta vanishes; Condition U fails everywhere".into(),
        ));
    }
    Ok(match mode {
        Mode::R => r_witness_from_gaps(f, beta, &gaps),
        Mode::U => u_obstruction_from_gaps(f, beta, &gaps),
    })
}

/// The members of `candidates` that satisfy Condition U at `beta` for `f`
/// through level `n`.
pub fn satisfying_u(
    f: &UnicriticalMap,
    beta: &RatFunc,
    n: u32,
    candidates: &PlaceWitness,
) -> Result<PlaceWitness> {
    let gaps = critical_gaps(f, beta, n)?;
    Ok(filter_u(f, beta, &gaps, candidates))
}

pub(crate) fn filter_u(
    f: &UnicriticalMap,
    beta: &RatFunc,
    gaps: &[CriticalGap],
    candidates: &PlaceWitness,
) -> PlaceWitness {
    let mut w = candidates.clone();
    w.remove_roots_of(f.c().den());
    w.remove_roots_of(beta.num());
    w.remove_roots_of(beta.den());
    for g in gaps {
        w.remove_roots_of(g.d.num());
        w.remove_roots_of(g.d.den());
    }
    if w.includes_infinity && !infinity_satisfies_u(f, beta, gaps) {
        w.includes_infinity = false;
    }
    w
}

fn unit_at_infinity(z: &RatFunc) -> bool {
    !z.is_zero() && z.infinite_valuation() == Ok(0)
}

fn good_reduction_at_infinity(f: &UnicriticalMap) -> bool {
    f.c().is_zero() || f.c().infinite_valuation().is_ok_and(|v| v >= 0)
}

fn infinity_satisfies_u(f: &UnicriticalMap, beta: &RatFunc, gaps: &[CriticalGap]) -> bool {
    good_reduction_at_infinity(f)
        && unit_at_infinity(beta)
        && gaps.iter().all(|g| unit_at_infinity(&g.d))
}

/// `gaps = [d_0, ..., d_n]`.
pub(crate) fn r_witness_from_gaps(
    f: &UnicriticalMap,
    beta: &RatFunc,
    gaps: &[CriticalGap],
) -> PlaceWitness {
    let (last, earlier) = gaps.split_last().expect("at least d_0");
    let dn = &last.d;
    if dn.is_zero() {
        return PlaceWitness::empty();
    }
    let simple = if dn.num().is_constant() {
        Poly::one()
    } else {
        multiplicity_one_part(dn.num()).expect("nonzero")
    };
    let mut w = PlaceWitness::new(simple, false);
    w.remove_roots_of(dn.den());
    w.remove_roots_of(f.c().den());
    w.remove_roots_of(beta.num());
    w.remove_roots_of(beta.den());
    for g in earlier {
        w.remove_roots_of(g.d.num());
        w.remove_roots_of(g.d.den());
    }
    w.includes_infinity = good_reduction_at_infinity(f)
        && unit_at_infinity(beta)
        && earlier.iter().all(|g| unit_at_infinity(&g.d))
        && dn.infinite_valuation() == Ok(1);
    w
}

fn u_obstruction_from_gaps(
    f: &UnicriticalMap,
    beta: &RatFunc,
    gaps: &[CriticalGap],
) -> PlaceWitness {
    let mut bad = Poly::one();
    let mut add = |p: &Poly| {
        if !p.is_constant() {
            bad = bad.lcm(&radical(p).expect("nonzero"));
        }
    };
    add(f.c().den());
    add(beta.num());
    add(beta.den());
    for g in gaps {
        add(g.d.num());
        add(g.d.den());
    }
    PlaceWitness::new(bad, !infinity_satisfies_u(f, beta, gaps))
}
