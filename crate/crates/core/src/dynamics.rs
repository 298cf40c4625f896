//! Orbits of `f(x) = x^q + c` over Q(t) and over Q.
//!
//! Non-preperiodicity is detected by escape criteria, each of which forces a
//! strictly monotone quantity along the remaining orbit:
//!
//! * finite place of Q(t) (or prime of Z) with `v(x) < 0` and `q v(x) < v(c)`:
//!   then `v(f(x)) = q v(x) < v(x)` and the condition persists;
//! * the place at infinity, with the same inequality on `deg den - deg num`;
//! * function-field height: `h(x^q) <= h(f(x)) + h(c)`, so
//!   `(q-1) h(x) > h(c)` gives `h(f(x)) > h(x)` and the condition persists;
//! * over Q, `|x| >= |c| + 2` gives `|f(x)| > |x|`;
//! * over Q, `H(a + b) <= 2 H(a) H(b)` for the naive height, so
//!   `H(x)^(q-1) > 2 H(c)` gives `H(f(x)) > H(x)`.
//!
//! When none fires within the iteration budget the answer is `Unknown`.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qpoly::{radical, PlaceWitness, Poly, Rat, RatFunc};

pub const DEFAULT_MAX_ITER: usize = 64;
pub const DEFAULT_DEGREE_CAP: usize = 1 << 20;

/// `f(x) = x^q + c` with `q = p^r`. Equality and serialization ignore the
/// degree cap.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "MapRepr", into = "MapRepr")]
pub struct UnicriticalMap {
    p: u64,
    r: u32,
    q: u64,
    c: RatFunc,
    degree_cap: usize,
}

impl PartialEq for UnicriticalMap {
    fn eq(&self, other: &Self) -> bool {
        self.q == other.q && self.c == other.c
    }
}

impl Eq for UnicriticalMap {}

#[derive(Serialize, Deserialize)]
struct MapRepr {
    q: u64,
    c: RatFunc,
}

impl TryFrom<MapRepr> for UnicriticalMap {
    type Error = Error;
    fn try_from(m: MapRepr) -> Result<Self> {
        UnicriticalMap::new(m.q, m.c)
    }
}

impl From<UnicriticalMap> for MapRepr {
    fn from(f: UnicriticalMap) -> Self {
        MapRepr { q: f.q, c: f.c }
    }
}

/// `(p, r)` with `q = p^r`, `p` prime.
pub fn prime_power(q: u64) -> Result<(u64, u32)> {
    if q < 2 {
        return Err(Error::NotPrimePower(q));
    }
    let mut p = 2;
    while p * p <= q && !q.is_multiple_of(p) {
        p += 1;
    }
    if !q.is_multiple_of(p) {
        p = q;
    }
    let (mut m, mut r) = (q, 0);
    while m % p == 0 {
        m /= p;
        r += 1;
    }
    if m == 1 {
        Ok((p, r))
    } else {
        Err(Error::NotPrimePower(q))
    }
}

impl UnicriticalMap {
    pub fn new(q: u64, c: RatFunc) -> Result<Self> {
        let (p, r) = prime_power(q)?;
        Ok(UnicriticalMap {
            p,
            r,
            q,
            c,
            degree_cap: DEFAULT_DEGREE_CAP,
        })
    }

    /// Largest height an iterate may reach before `LimitExceeded`.
    pub fn with_degree_cap(mut self, cap: usize) -> Self {
        self.degree_cap = cap;
        self
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn c(&self) -> &RatFunc {
        &self.c
    }

    pub fn degree_cap(&self) -> usize {
        self.degree_cap
    }

    /// `c` constant.
    pub fn is_isotrivial(&self) -> bool {
        self.c.is_constant()
    }

    pub fn apply(&self, z: &RatFunc) -> Result<RatFunc> {
        let h = z.weil_height() as u128 * self.q as u128;
        if h > self.degree_cap as u128 {
            return Err(Error::LimitExceeded(format!(
                "iterate height {h} exceeds the degree cap {}",
                self.degree_cap
            )));
        }
        Ok(&z.pow(self.q as u32) + &self.c)
    }

    /// `f^n(z)`.
    pub fn iterate(&self, z: &RatFunc, n: usize) -> Result<RatFunc> {
        let mut x = z.clone();
        for _ in 0..n {
            x = self.apply(&x)?;
        }
        Ok(x)
    }

    /// `[z, f(z), ..., f^n(z)]`.
    pub fn orbit(&self, z: &RatFunc, n: usize) -> Result<Vec<RatFunc>> {
        let mut out = Vec::with_capacity(n + 1);
        out.push(z.clone());
        for i in 0..n {
            let next = self.apply(&out[i])?;
            out.push(next);
        }
        Ok(out)
    }

    /// The map with `c` replaced by `c(a)`.
    pub fn specialize(&self, a: &Rat) -> Result<UnicriticalMap> {
        let c = RatFunc::constant(self.c.specialize(a)?);
        Ok(UnicriticalMap { c, ..self.clone() })
    }
}

/// `z(a)`.
pub fn specialize(z: &RatFunc, a: &Rat) -> Result<Rat> {
    z.specialize(a)
}

/// Which escape criterion fired.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Escape {
    /// Places of Q̄(t) (finite roots, and possibly infinity) where
    /// `v(x) < 0` and `q v(x) < v(c)`.
    Places { places: PlaceWitness },
    /// `(q-1) h(x) > h(c)`.
    Height { height: u64, parameter_height: u64 },
    /// `|x| >= |c| + 2` over Q.
    Archimedean,
    /// Over Q: the part of `den(x)^q` not absorbed by `den(c)`; its prime
    /// divisors are the escaping primes.
    PrimeDenominator { escaping_part: String },
    /// Over Q: `H(x)^(q-1) > 2 H(c)`.
    NaiveHeight { height: String },
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct EscapeEvidence {
    /// Orbit index `k` with `f^k(beta)` satisfying the criterion.
    pub iterate: usize,
    pub criterion: Escape,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum PointClass {
    Periodic { period: usize },
    Preperiodic { tail: usize, period: usize },
    Wandering { evidence: EscapeEvidence },
    Unknown { iterations: usize },
}

pub fn naive_height(x: &Rat) -> BigInt {
    x.numer().abs().max(x.denom().clone())
}

/// First escape criterion satisfied by `x`, if any.
pub fn escape_criterion(f: &UnicriticalMap, x: &RatFunc) -> Option<Escape> {
    let q = f.q;
    let c = &f.c;
    if x.is_constant() && c.is_constant() {
        let xv = x.as_constant().expect("constant");
        let cv = c.as_constant().expect("constant");
        if xv.abs() >= cv.abs() + Rat::from_integer(2.into()) {
            return Some(Escape::Archimedean);
        }
        let dq = num_traits::pow(xv.denom().clone(), q as usize);
        let g = dq.gcd(cv.denom());
        if !xv.denom().is_one() && g != dq {
            return Some(Escape::PrimeDenominator {
                escaping_part: (&dq / &g).to_string(),
            });
        }
        let h = naive_height(&xv);
        if num_traits::pow(h.clone(), (q - 1) as usize) > naive_height(&cv) * 2 {
            return Some(Escape::NaiveHeight {
                height: h.to_string(),
            });
        }
        return None;
    }
    let hx = x.weil_height();
    let hc = c.weil_height();
    let finite = escaping_finite_places(q, x, c);
    let at_inf = !x.is_zero() && {
        let vx = x.infinite_valuation().expect("nonzero");
        let vc = if c.is_zero() {
            i64::MAX
        } else {
            c.infinite_valuation().expect("nonzero")
        };
        vx < 0 && (q as i64).saturating_mul(vx) < vc
    };
    if !finite.is_constant() || at_inf {
        return Some(Escape::Places {
            places: PlaceWitness::new(finite, at_inf),
        });
    }
    if (q - 1) * hx > hc {
        return Some(Escape::Height {
            height: hx,
            parameter_height: hc,
        });
    }
    None
}

/// Radical of `den(x)^q / gcd(den(x)^q, den(c))`.
fn escaping_finite_places(q: u64, x: &RatFunc, c: &RatFunc) -> Poly {
    let dx = x.den();
    if dx.is_constant() {
        return Poly::one();
    }
    let dq = dx.pow(q as u32);
    let g = dq.gcd(c.den());
    let part = dq.exact_div(&g).expect("gcd divides");
    if part.is_constant() {
        Poly::one()
    } else {
        radical(&part).expect("nonzero")
    }
}

/// Classifies `beta` by exact orbit repetition or an escape criterion.
pub fn classify_point(f: &UnicriticalMap, beta: &RatFunc, max_iter: usize) -> PointClass {
    let mut seen: HashMap<RatFunc, usize> = HashMap::new();
    let mut x = beta.clone();
    for k in 0..=max_iter {
        if let Some(&j) = seen.get(&x) {
            return if j == 0 {
                PointClass::Periodic { period: k }
            } else {
                PointClass::Preperiodic {
                    tail: j,
                    period: k - j,
                }
            };
        }
        if let Some(criterion) = escape_criterion(f, &x) {
            return PointClass::Wandering {
                evidence: EscapeEvidence {
                    iterate: k,
                    criterion,
                },
            };
        }
        if k == max_iter {
            break;
        }
        let Ok(next) = f.apply(&x) else { break };
        seen.insert(x, k);
        x = next;
    }
    PointClass::Unknown {
        iterations: max_iter,
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum NotPostcritical {
    /// The critical orbit is finite and avoids `beta`.
    CriticalOrbitRepeats { preperiod: usize, period: usize },
    /// From iterate `n` on, heights of `f^k(0)` exceed `h(beta)` and grow.
    HeightEscape { iterate: usize },
    /// `c` is constant but `beta` is not, so no iterate of `0` can equal it.
    ConstantOrbit,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Postcriticality {
    Postcritical { n: usize },
    NotPostcritical(NotPostcritical),
}

impl Postcriticality {
    pub fn is_postcritical(&self) -> bool {
        matches!(self, Postcriticality::Postcritical { .. })
    }
}

/// Least `n >= 1` with `f^n(0) = beta`, or a proof that none exists.
pub fn is_postcritical(f: &UnicriticalMap, beta: &RatFunc) -> Result<Postcriticality> {
    if f.is_isotrivial() && !beta.is_constant() {
        return Ok(Postcriticality::NotPostcritical(
            NotPostcritical::ConstantOrbit,
        ));
    }
    let constant = f.is_isotrivial();
    let q = f.q;
    let mut seen: HashMap<RatFunc, usize> = HashMap::new();
    let mut x = RatFunc::zero();
    seen.insert(x.clone(), 0);
    for n in 1.. {
        x = f.apply(&x)?;
        if &x == beta {
            return Ok(Postcriticality::Postcritical { n });
        }
        if let Some(&j) = seen.get(&x) {
            return Ok(Postcriticality::NotPostcritical(
                NotPostcritical::CriticalOrbitRepeats {
                    preperiod: j,
                    period: n - j,
                },
            ));
        }
        let escaped = if constant {
            let xv = x.as_constant().expect("constant orbit");
            let cv = f.c.as_constant().expect("constant");
            let h = naive_height(&xv);
            h > naive_height(&beta.as_constant().expect("constant"))
                && num_traits::pow(h, (q - 1) as usize) > naive_height(&cv) * 2
        } else {
            let h = x.weil_height();
            h > beta.weil_height() && (q - 1) * h > f.c.weil_height()
        };
        if escaped {
            return Ok(Postcriticality::NotPostcritical(
                NotPostcritical::HeightEscape { iterate: n },
            ));
        }
        seen.insert(x.clone(), n);
    }
    unreachable!("the loop only exits by returning")
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NotPcfEvidence {
    /// A PCF map `x^q + c` has `c` constant.
    NonConstantParameter,
    Escape(EscapeEvidence),
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum CriticalOrbit {
    Pcf { preperiod: usize, period: usize },
    NotPcf { evidence: NotPcfEvidence },
    Unknown { iterations: usize },
}

pub fn critical_orbit_status(f: &UnicriticalMap, max_iter: usize) -> CriticalOrbit {
    if !f.is_isotrivial() {
        return CriticalOrbit::NotPcf {
            evidence: NotPcfEvidence::NonConstantParameter,
        };
    }
    match classify_point(f, &RatFunc::zero(), max_iter) {
        PointClass::Periodic { period } => CriticalOrbit::Pcf {
            preperiod: 0,
            period,
        },
        PointClass::Preperiodic { tail, period } => CriticalOrbit::Pcf {
            preperiod: tail,
            period,
        },
        PointClass::Wandering { evidence } => CriticalOrbit::NotPcf {
            evidence: NotPcfEvidence::Escape(evidence),
        },
        PointClass::Unknown { iterations } => CriticalOrbit::Unknown { iterations },
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct HeightInterval {
    #[serde(with = "crate::qpoly::rat_serde")]
    pub lower: Rat,
    #[serde(with = "crate::qpoly::rat_serde")]
    pub upper: Rat,
    pub n: usize,
}

impl HeightInterval {
    pub fn width(&self) -> Rat {
        &self.upper - &self.lower
    }

    pub fn contains(&self, x: &Rat) -> bool {
        &self.lower <= x && x <= &self.upper
    }

    pub fn is_subset_of(&self, other: &HeightInterval) -> bool {
        other.lower <= self.lower && self.upper <= other.upper
    }
}

/// Total pole order of `c` at places whose pole order is divisible by `q`
/// (infinity included). Only at those places can `x^q` and `c` cancel, so
/// `h(f(x)) - q h(x)` lies in `[-b_div, h(c)]`.
fn divisible_pole_mass(f: &UnicriticalMap) -> u64 {
    let c = &f.c;
    if c.is_constant() {
        return 0;
    }
    let q = f.q as usize;
    let mut total = 0u64;
    if !c.den().is_constant() {
        for (g, m) in crate::qpoly::yun_squarefree(c.den()).expect("nonzero") {
            if m % q == 0 {
                total += (g.deg() * m) as u64;
            }
        }
    }
    let pole_inf = -c.infinite_valuation().expect("nonzero");
    if pole_inf > 0 && (pole_inf as usize).is_multiple_of(q) {
        total += pole_inf as u64;
    }
    total
}

/// Rational enclosure of the canonical height `lim h(f^n(z)) / q^n`.
///
/// Telescoping the per-step bound `-b_div <= h(f(x)) - q h(x) <= h(c)` gives
/// `[h_n/q^n - b_div/((q-1)q^n), h_n/q^n + h(c)/((q-1)q^n)]`. When no pole of
/// `c` has order divisible by `q` the lower end is `h_n/q^n` and the width is
/// `h(c)/((q-1)q^n)`. Consecutive intervals are nested.
pub fn canonical_height_interval(
    f: &UnicriticalMap,
    z: &RatFunc,
    n: usize,
) -> Result<HeightInterval> {
    let hn = f.iterate(z, n)?.weil_height();
    let qn = num_traits::pow(BigInt::from(f.q), n);
    let base = Rat::new(BigInt::from(hn), qn.clone());
    let scale = BigInt::from(f.q - 1) * qn;
    let up = Rat::new(BigInt::from(f.c.weil_height()), scale.clone());
    let down = Rat::new(BigInt::from(divisible_pole_mass(f)), scale);
    Ok(HeightInterval {
        lower: &base - &down,
        upper: &base + &up,
        n,
    })
}

/// `true` for periodic or preperiodic classifications.
pub fn is_preperiodic_class(c: &PointClass) -> bool {
    matches!(
        c,
        PointClass::Periodic { .. } | PointClass::Preperiodic { .. }
    )
}

/// Shorthand used by search loops over Q.
pub fn classify_rational(q: u64, c: &Rat, x: &Rat, max_iter: usize) -> Result<PointClass> {
    let f = UnicriticalMap::new(q, RatFunc::constant(c.clone()))?;
    Ok(classify_point(&f, &RatFunc::constant(x.clone()), max_iter))
}
