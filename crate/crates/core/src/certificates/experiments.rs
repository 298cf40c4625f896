//! Place counts behind the height lemmas, computed exactly at desk scale.

use serde::{Deserialize, Serialize};

use crate::dynamics::UnicriticalMap;
use crate::error::{Error, Result};
use crate::qpoly::{multiplicity_one_part, radical, PlaceWitness, Poly, Rat, RatFunc};

/// Parameters of a counting experiment; `0 < epsilon < q` and `0 < delta`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub n_max: u32,
    pub sample: String,
    #[serde(with = "crate::qpoly::rat_serde")]
    pub delta: Rat,
    #[serde(with = "crate::qpoly::rat_serde")]
    pub epsilon: Rat,
}

impl ExperimentConfig {
    pub fn new(
        n_max: u32,
        sample: impl Into<String>,
        delta: Rat,
        epsilon: Rat,
        q: u64,
    ) -> Result<Self> {
        let zero = Rat::from_integer(0.into());
        if delta <= zero || epsilon <= zero || epsilon >= Rat::from_integer(q.into()) {
            return Err(Error::NotApplicable(
                "need 0 < delta and 0 < epsilon < q".into(),
            ));
        }
        Ok(ExperimentConfig {
            n_max,
            sample: sample.into(),
            delta,
            epsilon,
        })
    }
}

/// `[gamma, f(gamma), ..., f^n(gamma)]`, rejecting `f^m(gamma) = target`.
fn orbit_avoiding(
    f: &UnicriticalMap,
    gamma: &RatFunc,
    target: &RatFunc,
    n: u32,
) -> Result<Vec<RatFunc>> {
    let orbit = f.orbit(gamma, n as usize)?;
    if let Some(m) = orbit.iter().position(|x| x == target) {
        return Err(Error::OrbitCollision { m: m as u32 });
    }
    Ok(orbit)
}

/// Number of places of Q̄(t), infinity included, where
/// `v(f^n(gamma) - beta) = 1`.
pub fn count_v1_places(f: &UnicriticalMap, gamma: &RatFunc, beta: &RatFunc, n: u32) -> Result<u64> {
    let orbit = orbit_avoiding(f, gamma, beta, n)?;
    let d = &orbit[n as usize] - beta;
    let finite = if d.num().is_constant() {
        0
    } else {
        multiplicity_one_part(d.num())?.deg() as u64
    };
    Ok(finite + u64::from(d.infinite_valuation()? == 1))
}

fn support(z: &RatFunc) -> Poly {
    if z.num().is_constant() {
        Poly::one()
    } else {
        radical(z.num()).expect("nonzero")
    }
}

/// Number of places with `v(f^n(gamma) - beta2) > 0` and
/// `v(f^m(gamma) - beta1) > 0` for some `0 < m < n`.
pub fn x_set_size(
    f: &UnicriticalMap,
    gamma: &RatFunc,
    beta1: &RatFunc,
    beta2: &RatFunc,
    n: u32,
) -> Result<u64> {
    let orbit = orbit_avoiding(f, gamma, beta2, n)?;
    if let Some(m) = (1..n as usize).find(|&m| &orbit[m] == beta1) {
        return Err(Error::OrbitCollision { m: m as u32 });
    }
    let target = &orbit[n as usize] - beta2;
    let mut remaining = support(&target);
    let target_inf = target.infinite_valuation()? > 0;
    let mut count = 0u64;
    let mut inf_hit = false;
    for x in &orbit[1..n as usize] {
        let dm = x - beta1;
        if !remaining.is_constant() {
            let g = remaining.gcd(dm.num());
            if !g.is_constant() {
                count += g.deg() as u64;
                remaining = remaining.exact_div(&g).expect("gcd divides");
            }
        }
        inf_hit |= target_inf && dm.infinite_valuation()? > 0;
    }
    Ok(count + u64::from(inf_hit))
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct SweepShell {
    pub m: u32,
    pub n: u32,
    /// Degree of the cumulative witness through this shell.
    pub degree: usize,
    pub includes_infinity: bool,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct SweepReport {
    pub witness: PlaceWitness,
    pub shells: Vec<SweepShell>,
}

impl SweepReport {
    /// Shell `k` (1-based) adds nothing beyond shell `k - 1`.
    pub fn stable_between(&self, from: usize, to: usize) -> bool {
        let at = |k: usize| &self.shells[k - 1];
        at(from).degree == at(to).degree && at(from).includes_infinity == at(to).includes_infinity
    }
}

/// Places `v` with `v(f1^m(0) - c1) > 0` and `v(f2^n(0) - c2) > 0` for some
/// `1 <= m <= m_max`, `1 <= n <= n_max`, reported cumulatively over shells
/// `(min(k, m_max), min(k, n_max))`.
pub fn common_support_sweep(
    f1: &UnicriticalMap,
    c1: &RatFunc,
    f2: &UnicriticalMap,
    c2: &RatFunc,
    m_max: u32,
    n_max: u32,
) -> Result<SweepReport> {
    let top = m_max.max(n_max);
    let a = orbit_gaps(f1, c1, top, 1)?;
    let b = orbit_gaps(f2, c2, top, 2)?;
    let mut acc = Poly::one();
    let mut inf = false;
    let mut shells = Vec::new();
    let (mut prev_m, mut prev_n) = (0, 0);
    for k in 1..=top {
        let (m, n) = (k.min(m_max), k.min(n_max));
        for i in 1..=m {
            for j in 1..=n {
                if i <= prev_m && j <= prev_n {
                    continue;
                }
                let ((x, x_inf), (y, y_inf)) = (&a[i as usize], &b[j as usize]);
                let g = x.gcd(y);
                if !g.is_constant() {
                    acc = acc.lcm(&g);
                }
                inf |= *x_inf && *y_inf;
            }
        }
        (prev_m, prev_n) = (m, n);
        shells.push(SweepShell {
            m,
            n,
            degree: acc.deg(),
            includes_infinity: inf,
        });
    }
    Ok(SweepReport {
        witness: PlaceWitness::new(acc, inf),
        shells,
    })
}

/// `(support of f^l(0) - target, zero at infinity)` for `l = 0..=top`.
fn orbit_gaps(
    f: &UnicriticalMap,
    target: &RatFunc,
    top: u32,
    map: usize,
) -> Result<Vec<(Poly, bool)>> {
    let orbit = f.orbit(&RatFunc::zero(), top as usize)?;
    orbit
        .iter()
        .enumerate()
        .map(|(l, x)| {
            let d = x - target;
            if d.is_zero() {
                return Err(Error::PostcriticalTarget { map, ell: l as u32 });
            }
            Ok((support(&d), d.infinite_valuation()? > 0))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qpoly::parse_ratfunc;

    fn rf(s: &str) -> RatFunc {
        parse_ratfunc(s).unwrap()
    }

    fn map(c: &str) -> UnicriticalMap {
        UnicriticalMap::new(2, rf(c)).unwrap()
    }

    #[test]
    fn v1_counts() {
        let f = map("t");
        let zero = RatFunc::zero();
        assert_eq!(count_v1_places(&f, &zero, &rf("1 - t"), 2), Ok(2));
        assert_eq!(count_v1_places(&f, &zero, &rf("1 - t"), 1), Ok(1));
        assert_eq!(count_v1_places(&f, &zero, &rf("t - (t-1)^2"), 1), Ok(0));
        assert_eq!(
            count_v1_places(&f, &zero, &rf("t^2 + t"), 3),
            Err(Error::OrbitCollision { m: 2 })
        );
    }

    #[test]
    fn x_set_examples() {
        let f = map("t");
        let one = RatFunc::one();
        let zero = RatFunc::zero();
        assert_eq!(x_set_size(&f, &one, &zero, &zero, 2), Ok(0));
        assert_eq!(x_set_size(&f, &one, &rf("5"), &rf("7"), 1), Ok(0));
        // f(1) = t + 1, f^2(1) = t^2 + 3t + 1; both gaps vanish at t = 2
        let u = rf("t + 5");
        let b1 = rf("t + 1 - (t - 2)");
        let b2 = &rf("t^2 + 3*t + 1") - &(&rf("t - 2") * &u);
        assert!(x_set_size(&f, &one, &b1, &b2, 2).unwrap() >= 1);
    }

    #[test]
    fn sweep_examples() {
        let f = map("t");
        let r = common_support_sweep(&f, &rf("1 - t"), &f, &rf("1 + t"), 4, 4).unwrap();
        assert_eq!(r.shells.len(), 4);
        assert!(r.shells.windows(2).all(|w| w[0].degree <= w[1].degree));
        // targets f(0) - (t - 3) shifted so that both gaps vanish at t = 3
        let r = common_support_sweep(&f, &rf("3"), &f, &rf("2*t - 3"), 1, 1).unwrap();
        assert!(Poly::from_i64s(&[-3, 1]).divides(&r.witness.finite_part));
        assert_eq!(
            common_support_sweep(&f, &rf("t"), &f, &rf("1"), 2, 2),
            Err(Error::PostcriticalTarget { map: 1, ell: 1 })
        );
    }
}
