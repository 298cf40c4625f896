//! Irreducibility of `f^n(x) - beta` and eventual stability.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::{cite, critical_gaps, too_deep, Status};
use crate::dynamics::{
    classify_point, classify_rational, PointClass, UnicriticalMap, DEFAULT_MAX_ITER,
};
use crate::error::{Error, Result};
use crate::qpoly::{is_pth_power_qbar, newton_polygon, Place, Rat, RatFunc};

pub const DEFAULT_LAMBDA_BOUND: u64 = 50;
/// Largest `q^n` for the Newton-polygon test.
const NP_MAX_DEGREE: u64 = 4096;
/// Bound on `q^n * h(c) * q^(n-1)`, the size of the coefficient table.
const NP_MAX_WORK: u64 = 1 << 14;
/// Largest residue field walked by the mod-p certificate.
const JL_MAX_PRIME: u64 = 1 << 20;

/// Per-level Capelli-chain status for levels `1..=n_max`.
///
/// Level `n` is certified iff level `n - 1` is and `d_n` is not a `p`-th power
/// in Q̄(t). If `f^(n-1)(x) - beta` is irreducible with root `z`, the norm of
/// `z - c` down to Q̄(t) is `+-d_n`; a non-`p`-th-power norm keeps
/// `x^q - (z - c)` irreducible over a field containing the `q`-th roots of
/// unity, and Capelli's lemma lifts this to `f^n(x) - beta`.
pub fn capelli_norm_stability(
    f: &UnicriticalMap,
    beta: &RatFunc,
    n_max: u32,
) -> Result<Vec<Status>> {
    let gaps = critical_gaps(f, beta, n_max)?;
    Ok(capelli_from_gaps(f, &gaps[1..]))
}

pub(crate) fn capelli_from_gaps(f: &UnicriticalMap, gaps: &[super::CriticalGap]) -> Vec<Status> {
    let mut ok = true;
    gaps.iter()
        .map(|g| {
            ok = ok && !g.d.is_zero() && !is_pth_power_qbar(&g.d, f.p()).expect("nonzero");
            Status::from_bool(ok)
        })
        .collect()
}

/// Coefficients (in `x`, constant term first) of `f^n(x) - beta`.
///
/// `f^n(x) = H_n(x^q)` with `H_1(y) = y + c` and `H_k = H_(k-1)^q + c`, so only
/// polynomials of degree `q^(n-1)` are ever raised to the `q`-th power.
pub fn f_iterate_coefficients(f: &UnicriticalMap, beta: &RatFunc, n: u32) -> Result<Vec<RatFunc>> {
    if n == 0 {
        return Ok(vec![-beta, RatFunc::one()]);
    }
    let q = f.q() as usize;
    let mut h = vec![f.c().clone(), RatFunc::one()];
    for _ in 1..n {
        let mut acc = h.clone();
        for _ in 1..q {
            acc = mul_coeffs(&acc, &h);
        }
        acc[0] = &acc[0] + f.c();
        h = acc;
    }
    let mut out = vec![RatFunc::zero(); (h.len() - 1) * q + 1];
    for (j, c) in h.into_iter().enumerate() {
        out[j * q] = c;
    }
    out[0] = &out[0] - beta;
    Ok(out)
}

fn mul_coeffs(a: &[RatFunc], b: &[RatFunc]) -> Vec<RatFunc> {
    let mut out = vec![RatFunc::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if !y.is_zero() {
                out[i + j] = &out[i + j] + &(x * y);
            }
        }
    }
    out
}

/// Newton-polygon irreducibility test for `f^n(x) - beta` at `place`:
/// certified iff the polygon is one segment whose slope has denominator
/// exactly `q^n` (total ramification).
pub fn np_irreducibility(
    f: &UnicriticalMap,
    beta: &RatFunc,
    n: u32,
    place: &Place,
) -> Result<Status> {
    let q = f.q();
    let deg = q
        .checked_pow(n)
        .filter(|&d| d <= NP_MAX_DEGREE)
        .ok_or(Error::LevelTooDeep { level: n })?;
    if !f.is_isotrivial() {
        let work = deg
            .checked_mul(f.c().weil_height())
            .and_then(|w| w.checked_mul(q.pow(n.saturating_sub(1))));
        if work.is_none_or(|w| w > NP_MAX_WORK) {
            return Err(Error::LevelTooDeep { level: n });
        }
    }
    let coeffs = f_iterate_coefficients(f, beta, n).map_err(|e| too_deep(e, n))?;
    let np = newton_polygon(&coeffs, place)?;
    Ok(Status::from_bool(np.is_totally_ramified(deg as usize)))
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StabilityKind {
    /// `f^n(x) - beta` irreducible over Q̄(t) for every `n <= levels`.
    CapelliChain { levels: u32 },
    /// Unique backward orbit of the reduced basepoint on `P^1(F_p)`.
    ModP {
        prime: u64,
        /// Specialization point for maps over Q(t); `None` over Q.
        #[serde(with = "crate::qpoly::rat_serde::option")]
        specialization: Option<Rat>,
        /// `v_p(c)`, `None` for `c = 0`.
        c_valuation: Option<i64>,
        /// Residue of the basepoint, or `"inf"`.
        reduced_basepoint: String,
        cycle_length: u64,
        /// `[b, g^-1(b), g^-2(b), ...]` up to the return to `b`.
        cycle: Vec<String>,
    },
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct StabilityCertificate {
    pub kind: StabilityKind,
    /// Bound on the number of irreducible factors of `f^n(x) - beta`, when
    /// the certificate yields one.
    pub factor_bound: Option<u64>,
    pub citations: Vec<String>,
}

fn v_p(x: &BigInt, p: u64) -> i64 {
    let p = BigInt::from(p);
    let mut x = x.clone();
    let mut v = 0;
    while !x.is_zero() && x.is_multiple_of(&p) {
        x /= &p;
        v += 1;
    }
    v
}

fn rat_valuation(x: &Rat, p: u64) -> Option<i64> {
    (!x.is_zero()).then(|| v_p(x.numer(), p) - v_p(x.denom(), p))
}

/// Residue of an integral-at-`p` rational.
fn reduce(x: &Rat, p: u64) -> u64 {
    let pb = BigInt::from(p);
    let num = x.numer().mod_floor(&pb).to_u64().expect("residue");
    let den = x.denom().mod_floor(&pb).to_u64().expect("residue");
    let inv = pow_mod(den, p - 2, p);
    (num as u128 * inv as u128 % p as u128) as u64
}

fn pow_mod(a: u64, mut e: u64, p: u64) -> u64 {
    let m = p as u128;
    let mut acc: u128 = 1;
    let mut b = a as u128 % m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    acc as u64
}

/// Mod-`p` eventual-stability certificate for `x^q + c` over Q.
///
/// With `v_p(c) >= 0` the reduction `x -> x^q + c` on `P^1(F_p)` is a
/// bijection (`x^q = x` on `F_p`), so every point has exactly one preimage and
/// the backward orbit of the reduced basepoint is a cycle through it. For
/// non-periodic `beta` this gives eventual stability over Q.
pub fn jl_eventual_stability(q: u64, c: &Rat, beta: &Rat) -> Result<StabilityCertificate> {
    let (p, _) = crate::dynamics::prime_power(q)?;
    let c_valuation = rat_valuation(c, p);
    if c_valuation.is_some_and(|v| v < 0) {
        return Err(Error::NotApplicable(format!("v_{p}(c) < 0")));
    }
    match classify_rational(q, c, beta, DEFAULT_MAX_ITER)? {
        PointClass::Periodic { period } => return Err(Error::PeriodicBasepoint { period }),
        PointClass::Unknown { iterations } => return Err(Error::ClassificationUnknown(iterations)),
        _ => {}
    }
    if p > JL_MAX_PRIME {
        return Err(Error::LimitExceeded(format!("residue field of size {p}")));
    }
    let cbar = reduce(c, p);
    // index p stands for the point at infinity
    let forward: Vec<u64> = (0..p)
        .map(|x| ((pow_mod(x, q, p) as u128 + cbar as u128) % p as u128) as u64)
        .chain(std::iter::once(p))
        .collect();
    let mut inverse = vec![u64::MAX; (p + 1) as usize];
    for (x, &y) in forward.iter().enumerate() {
        assert_eq!(inverse[y as usize], u64::MAX, "reduced map is a bijection");
        inverse[y as usize] = x as u64;
    }
    let start = if rat_valuation(beta, p).is_some_and(|v| v < 0) {
        p
    } else {
        reduce(beta, p)
    };
    let name = |x: u64| {
        if x == p {
            "inf".to_string()
        } else {
            x.to_string()
        }
    };
    let mut cycle = vec![name(start)];
    let mut y = inverse[start as usize];
    while y != start {
        debug_assert_eq!(inverse[forward[y as usize] as usize], y);
        cycle.push(name(y));
        y = inverse[y as usize];
    }
    Ok(StabilityCertificate {
        kind: StabilityKind::ModP {
            prime: p,
            specialization: None,
            c_valuation,
            reduced_basepoint: name(start),
            cycle_length: cycle.len() as u64,
            cycle,
        },
        factor_bound: None,
        citations: vec![cite::JONES_LEVY.into()],
    })
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum StabilityOutcome {
    Certified(StabilityCertificate),
    Unknown {
        /// Last level of the unbroken Capelli chain.
        chain_certified_through: u32,
        specializations_tried: u64,
    },
}

/// Rationals `u/v` in lowest terms ordered by `|u| + v`, then `v`, then sign.
pub(crate) fn specialization_points(bound: u64) -> impl Iterator<Item = Rat> {
    (1..=bound).flat_map(|s| {
        (1..=s).flat_map(move |v| {
            let u = s - v;
            let reduced = BigInt::from(u).gcd(&BigInt::from(v)) == BigInt::from(1u8);
            let signs: &[i64] = if u == 0 { &[1] } else { &[1, -1] };
            signs
                .iter()
                .filter(move |_| reduced)
                .map(move |&sgn| Rat::new(BigInt::from(sgn * u as i64), BigInt::from(v)))
                .collect::<Vec<_>>()
        })
    })
}

/// Eventual stability of `(f, beta)` over Q(t): the Capelli chain through
/// `n_max`, else a specialization `t = a` with `c(a)` integral at `p` and
/// `beta(a)` non-periodic, certified modulo `p`.
pub fn stability_certificate_funcfield(
    f: &UnicriticalMap,
    beta: &RatFunc,
    n_max: u32,
    lambda_bound: u64,
) -> Result<StabilityOutcome> {
    match classify_point(f, beta, DEFAULT_MAX_ITER) {
        PointClass::Periodic { period } => return Err(Error::PeriodicBasepoint { period }),
        PointClass::Unknown { iterations } => return Err(Error::ClassificationUnknown(iterations)),
        _ => {}
    }
    let chain = capelli_norm_stability(f, beta, n_max)?;
    let through = chain.iter().take_while(|s| s.is_certified()).count() as u32;
    if through == n_max {
        return Ok(StabilityOutcome::Certified(StabilityCertificate {
            kind: StabilityKind::CapelliChain { levels: n_max },
            factor_bound: Some(1),
            citations: vec![cite::CAPELLI.into()],
        }));
    }
    let mut tried = 0;
    if !f.is_isotrivial() {
        for a in specialization_points(lambda_bound) {
            tried += 1;
            let (Ok(ca), Ok(ba)) = (f.c().specialize(&a), beta.specialize(&a)) else {
                continue;
            };
            match jl_eventual_stability(f.q(), &ca, &ba) {
                Ok(mut cert) => {
                    if let StabilityKind::ModP { specialization, .. } = &mut cert.kind {
                        *specialization = Some(a);
                    }
                    cert.citations.push(cite::SPECIALIZATION.into());
                    return Ok(StabilityOutcome::Certified(cert));
                }
                Err(Error::NotApplicable(_) | Error::PeriodicBasepoint { .. })
                | Err(Error::ClassificationUnknown(_)) => continue,
                Err(e) => return Err(e),
            }
        }
    }
    Ok(StabilityOutcome::Unknown {
        chain_certified_through: through,
        specializations_tried: tried,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qpoly::{parse_ratfunc, rat, rat_frac};

    fn rf(s: &str) -> RatFunc {
        parse_ratfunc(s).unwrap()
    }

    fn map(q: u64, c: &str) -> UnicriticalMap {
        UnicriticalMap::new(q, rf(c)).unwrap()
    }

    #[test]
    fn capelli_examples() {
        use Status::*;
        assert_eq!(
            capelli_norm_stability(&map(2, "t"), &rf("1 - t"), 2).unwrap(),
            vec![Certified, Certified]
        );
        assert_eq!(
            capelli_norm_stability(&map(2, "t"), &rf("t + 1"), 1).unwrap(),
            vec![Unknown]
        );
        assert_eq!(
            capelli_norm_stability(&map(3, "t"), &rf("-t"), 1).unwrap(),
            vec![Certified]
        );
    }

    #[test]
    fn iterate_coefficients_match_direct_iteration() {
        let f = map(3, "t + 1");
        let beta = rf("t^2");
        let coeffs = f_iterate_coefficients(&f, &beta, 2).unwrap();
        assert_eq!(coeffs.len(), 10);
        let x = rat_frac(2, 3);
        let direct = f.iterate(&RatFunc::constant(x.clone()), 2).unwrap() - &beta;
        let horner = coeffs.iter().rev().fold(RatFunc::zero(), |acc, c| {
            &(&acc * &RatFunc::constant(x.clone())) + c
        });
        assert_eq!(horner, direct);
    }

    #[test]
    fn newton_polygon_examples() {
        assert_eq!(
            np_irreducibility(&map(2, "5"), &rf("t"), 3, &Place::Infinity),
            Ok(Status::Certified)
        );
        assert_eq!(
            np_irreducibility(&map(2, "5"), &rf("t^2"), 1, &Place::Infinity),
            Ok(Status::Unknown)
        );
        assert_eq!(
            np_irreducibility(
                &map(2, "t"),
                &rf("1 - t"),
                1,
                &Place::Finite(rat_frac(1, 2))
            ),
            Ok(Status::Certified)
        );
        assert_eq!(
            np_irreducibility(&map(2, "t"), &rf("1 - t"), 9, &Place::Infinity),
            Err(Error::LevelTooDeep { level: 9 })
        );
    }

    fn cycle_length(cert: &StabilityCertificate) -> u64 {
        match &cert.kind {
            StabilityKind::ModP { cycle_length, .. } => *cycle_length,
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn jl_examples() {
        assert_eq!(
            cycle_length(&jl_eventual_stability(2, &rat(5), &rat(3)).unwrap()),
            2
        );
        assert_eq!(
            cycle_length(&jl_eventual_stability(3, &rat(2), &rat(1)).unwrap()),
            3
        );
        assert!(matches!(
            jl_eventual_stability(2, &rat_frac(1, 2), &rat(0)),
            Err(Error::NotApplicable(_))
        ));
        assert_eq!(
            jl_eventual_stability(2, &rat(-1), &rat(0)),
            Err(Error::PeriodicBasepoint { period: 2 })
        );
        // basepoint with a p in the denominator reduces to infinity
        assert_eq!(
            cycle_length(&jl_eventual_stability(2, &rat(1), &rat_frac(1, 2)).unwrap()),
            1
        );
    }

    #[test]
    fn specialization_order() {
        let pts: Vec<Rat> = specialization_points(3).collect();
        let expect = [
            rat(0),
            rat(1),
            rat(-1),
            rat(2),
            rat(-2),
            rat_frac(1, 2),
            rat_frac(-1, 2),
        ];
        assert_eq!(pts, expect);
    }

    #[test]
    fn funcfield_stability_examples() {
        let f = map(2, "t");
        assert!(matches!(
            stability_certificate_funcfield(&f, &rf("1 - t"), 8, 50).unwrap(),
            StabilityOutcome::Certified(StabilityCertificate {
                kind: StabilityKind::CapelliChain { levels: 8 },
                ..
            })
        ));
        let StabilityOutcome::Certified(cert) =
            stability_certificate_funcfield(&f, &rf("t + 1"), 4, 50).unwrap()
        else {
            panic!("expected a mod-p certificate");
        };
        let StabilityKind::ModP {
            prime: 2,
            specialization: Some(a),
            ..
        } = cert.kind
        else {
            panic!("expected ModP");
        };
        // a = 0 gives beta(0) = 1, fixed by x^2; a = 1 is the first valid point
        assert_eq!(a, rat(1));
        assert!(jl_eventual_stability(2, &rat(3), &rat(4)).is_ok());
        let g = map(2, "t - t^2");
        assert_eq!(
            stability_certificate_funcfield(&g, &rf("t"), 4, 50),
            Err(Error::PeriodicBasepoint { period: 1 })
        );
    }
}
