//! Several preimage trees at once: `(f_1, alpha_1), ..., (f_s, alpha_s)`.
//!
//! Level `n` of the multitree is saturated, `Gal = C_q^(s q^(n-1))` over the
//! previous level, once every `f_i^n(x) - alpha_i` is irreducible and there
//! are places `p_1, ..., p_s` with `p_i` satisfying Condition R at `alpha_i`
//! and Condition U at every other `alpha_j`. All `alpha_i` lie in `Q(t)`, so
//! the extra unramified-in-`L` clause is empty. Basepoints with a rational
//! preimage (`q = 2`) enter as their subtrees, as in the single-tree case.
//!
//! The periodic-curve hypothesis that makes saturation eventual is not
//! decidable here. Pairs with the same parameter get the exact orbit test;
//! other pairs get a bounded common-support sweep, reported as heuristic.

use serde::{Deserialize, Serialize};

use crate::certificates::{
    build_components, cite, common_support_sweep, infinite_index_reason, product_level, tree_level,
    Component, InfiniteReason, LevelCertificate, Status, SweepReport,
};
use crate::dynamics::UnicriticalMap;
use crate::error::{Error, Result};
use crate::qpoly::{PlaceWitness, RatFunc};

pub const DEFAULT_ORBIT_BOUND: u32 = 32;
/// Shells of the common-support sweep; iterates at shell `k` have degree
/// about `q^k deg c`, so this stays small.
pub const DEFAULT_SWEEP_SHELLS: u32 = 4;

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct MultiEntry {
    pub map: UnicriticalMap,
    pub alpha: RatFunc,
}

/// Nonempty list of entries sharing `q`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(try_from = "Vec<MultiEntry>", into = "Vec<MultiEntry>")]
pub struct MultiSpec {
    entries: Vec<MultiEntry>,
}

impl TryFrom<Vec<MultiEntry>> for MultiSpec {
    type Error = Error;
    fn try_from(entries: Vec<MultiEntry>) -> Result<Self> {
        MultiSpec::new(entries)
    }
}

impl From<MultiSpec> for Vec<MultiEntry> {
    fn from(s: MultiSpec) -> Self {
        s.entries
    }
}

impl MultiSpec {
    pub fn new(entries: Vec<MultiEntry>) -> Result<Self> {
        let q = entries.first().ok_or(Error::EmptyInput)?.map.q();
        if entries.iter().any(|e| e.map.q() != q) {
            return Err(Error::ShapeMismatch);
        }
        Ok(MultiSpec { entries })
    }

    pub fn entries(&self) -> &[MultiEntry] {
        &self.entries
    }

    pub fn q(&self) -> u64 {
        self.entries[0].map.q()
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// `alpha_i = f^m(alpha_j)`.
    IFromJ,
    /// `alpha_j = f^m(alpha_i)`.
    JFromI,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum Admissibility {
    /// Neither basepoint lies on the forward orbit of the other.
    Pass,
    Fail {
        m: u32,
        direction: Direction,
    },
    Unknown {
        reason: String,
    },
    /// Different parameters: the common support of the critical gaps, swept
    /// over shells `1..=bound`.
    HeuristicPass {
        stable: bool,
        sweep: SweepReport,
    },
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct PairReport {
    pub i: usize,
    pub j: usize,
    /// `alpha_j` was replaced by `-alpha_j` to match `c_j = -c_i`.
    pub negated: bool,
    pub admissibility: Admissibility,
}

enum OrbitHit {
    Hit(u32),
    Clear,
    Undecided,
}

/// Whether `target = f^m(start)` for some `m >= 0`. Exact whenever the orbit
/// cycles or reaches a height-escaping iterate above `h(target)` within
/// `bound` steps: past that point heights strictly increase, since
/// `h(x^q + c) >= q h(x) - h(c) > h(x)` when `(q - 1) h(x) > h(c)`.
fn orbit_hits(f: &UnicriticalMap, start: &RatFunc, target: &RatFunc, bound: u32) -> OrbitHit {
    let hc = f.c().weil_height();
    let ht = target.weil_height();
    let mut seen: Vec<RatFunc> = Vec::new();
    let mut x = start.clone();
    for m in 0..=bound {
        if &x == target {
            return OrbitHit::Hit(m);
        }
        if seen.contains(&x) {
            return OrbitHit::Clear;
        }
        let h = x.weil_height();
        if (f.q() - 1) * h > hc && h > ht {
            return OrbitHit::Clear;
        }
        seen.push(x.clone());
        x = match f.apply(&x) {
            Ok(y) => y,
            Err(_) => return OrbitHit::Undecided,
        };
    }
    OrbitHit::Undecided
}

/// Three-valued check of the no-periodic-curve hypothesis for each pair
/// `i < j`: exact orbit search up to `orbit_bound` steps for matching
/// parameters, a `sweep_shells`-shell common-support sweep otherwise.
pub fn pairwise_admissibility(
    spec: &MultiSpec,
    orbit_bound: u32,
    sweep_shells: u32,
) -> Vec<PairReport> {
    let e = &spec.entries;
    let mut out = Vec::new();
    for i in 0..e.len() {
        for j in i + 1..e.len() {
            let (ci, cj) = (e[i].map.c(), e[j].map.c());
            // over Q the only (q-1)-th root of unity besides 1 is -1, q odd
            let negated = ci != cj && spec.q() % 2 == 1 && &-ci == cj;
            let admissibility = if ci == cj || negated {
                let f = &e[i].map;
                let aj = if negated {
                    -&e[j].alpha
                } else {
                    e[j].alpha.clone()
                };
                same_parameter(f, &e[i].alpha, &aj, orbit_bound)
            } else {
                match common_support_sweep(
                    &e[i].map,
                    &e[i].alpha,
                    &e[j].map,
                    &e[j].alpha,
                    sweep_shells,
                    sweep_shells,
                ) {
                    Ok(sweep) => {
                        let k = sweep.shells.len();
                        let stable = k >= 2 && sweep.stable_between(k - 1, k);
                        Admissibility::HeuristicPass { stable, sweep }
                    }
                    Err(err) => Admissibility::Unknown {
                        reason: err.to_string(),
                    },
                }
            };
            out.push(PairReport {
                i,
                j,
                negated,
                admissibility,
            });
        }
    }
    out
}

fn same_parameter(f: &UnicriticalMap, ai: &RatFunc, aj: &RatFunc, bound: u32) -> Admissibility {
    let forward = orbit_hits(f, ai, aj, bound);
    if let OrbitHit::Hit(m) = forward {
        return Admissibility::Fail {
            m,
            direction: Direction::JFromI,
        };
    }
    let backward = orbit_hits(f, aj, ai, bound);
    if let OrbitHit::Hit(m) = backward {
        return Admissibility::Fail {
            m,
            direction: Direction::IFromJ,
        };
    }
    match (forward, backward) {
        (OrbitHit::Clear, OrbitHit::Clear) => Admissibility::Pass,
        _ => Admissibility::Unknown {
            reason: format!("orbit bound {bound} reached"),
        },
    }
}

/// Witness for one subtree of one entry. Entries whose `f(x) - alpha` splits
/// over Q(t) (`q = 2`) contribute one subtree per rational preimage.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct SystemWitness {
    pub entry: usize,
    pub alpha: RatFunc,
    pub offset: u32,
    /// Places with Condition R here and Condition U at every other subtree;
    /// empty when the subtree only starts below this level.
    pub witness: PlaceWitness,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(tag = "tag", rename_all = "snake_case")]
pub enum SimultaneousOutcome {
    /// Every witness is nonempty.
    Certificate {
        level: u32,
        witness_system: Vec<SystemWitness>,
    },
    Unknown {
        level: u32,
        witness_system: Vec<SystemWitness>,
        empty_entries: Vec<usize>,
    },
}

impl SimultaneousOutcome {
    pub fn witness_system(&self) -> &[SystemWitness] {
        match self {
            SimultaneousOutcome::Certificate { witness_system, .. }
            | SimultaneousOutcome::Unknown { witness_system, .. } => witness_system,
        }
    }

    pub fn is_certificate(&self) -> bool {
        matches!(self, SimultaneousOutcome::Certificate { .. })
    }
}

fn components(spec: &MultiSpec, n: u32) -> Result<Vec<Component>> {
    let pairs: Vec<(&UnicriticalMap, &RatFunc)> =
        spec.entries.iter().map(|e| (&e.map, &e.alpha)).collect();
    build_components(&pairs, n)
}

fn witness_system(comps: &[&Component], n: u32) -> (Vec<SystemWitness>, bool) {
    let p = product_level(comps, n);
    let system = comps
        .iter()
        .zip(p.certs)
        .map(|(c, cert)| SystemWitness {
            entry: c.entry,
            alpha: c.alpha.clone(),
            offset: c.offset,
            witness: cert.map(|x| x.witness).unwrap_or_else(PlaceWitness::empty),
        })
        .collect();
    (system, p.saturated)
}

/// Simultaneous R/U witnesses at level `n >= 1`.
pub fn simultaneous_witnesses(spec: &MultiSpec, n: u32) -> Result<SimultaneousOutcome> {
    if n == 0 {
        return Err(Error::NotApplicable("levels start at 1".into()));
    }
    let comps = components(spec, n)?;
    let refs: Vec<&Component> = comps.iter().collect();
    let (witness_system, _) = witness_system(&refs, n);
    let mut empty_entries: Vec<usize> = witness_system
        .iter()
        .filter(|w| w.witness.is_empty())
        .map(|w| w.entry)
        .collect();
    empty_entries.dedup();
    Ok(if empty_entries.is_empty() {
        SimultaneousOutcome::Certificate {
            level: n,
            witness_system,
        }
    } else {
        SimultaneousOutcome::Unknown {
            level: n,
            witness_system,
            empty_entries,
        }
    })
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct MultiLevel {
    pub level: u32,
    /// Single-tree certificate of each entry at this level.
    pub entries: Vec<LevelCertificate>,
    pub witness_system: Vec<SystemWitness>,
    pub saturation: Status,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(tag = "tag", rename_all = "snake_case")]
pub enum MultiVerdictKind {
    /// Entry `entry` has infinite index on its own tree.
    RefusedInfiniteIndex {
        entry: usize,
        reason: InfiniteReason,
    },
    /// Some pair lies on a periodic curve.
    RefusedAdmissibility {
        i: usize,
        j: usize,
        m: u32,
        direction: Direction,
    },
    /// Levels `run_start..=certified_through` are saturated for the product.
    Certified {
        run_start: u32,
        certified_through: u32,
        levels: Vec<MultiLevel>,
    },
    Unknown {
        first_failing_level: u32,
        levels: Vec<MultiLevel>,
    },
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct MultiVerdict {
    pub entries: Vec<MultiEntry>,
    pub admissibility: Vec<PairReport>,
    pub verdict: MultiVerdictKind,
    pub citations: Vec<String>,
}

impl MultiVerdict {
    pub fn levels(&self) -> &[MultiLevel] {
        match &self.verdict {
            MultiVerdictKind::Certified { levels, .. }
            | MultiVerdictKind::Unknown { levels, .. } => levels,
            _ => &[],
        }
    }
}

/// Product-group saturation for levels `1..=n_max`. Requires nonconstant
/// parameters and basepoints that are neither periodic nor postcritical.
pub fn disjointness_verdict(spec: &MultiSpec, n_max: u32) -> Result<MultiVerdict> {
    if n_max == 0 {
        return Err(Error::NotApplicable("need at least one level".into()));
    }
    let e = &spec.entries;
    if let Some(i) = e.iter().position(|x| x.map.is_isotrivial()) {
        return Err(Error::Unsupported(format!(
            "entry {i} has a constant parameter"
        )));
    }
    let entries = e.clone();
    let cites = |c: &[&str]| c.iter().map(|s| s.to_string()).collect::<Vec<_>>();
    for (i, x) in e.iter().enumerate() {
        if let Some(reason) = infinite_index_reason(&x.map, &x.alpha)? {
            return Ok(MultiVerdict {
                entries,
                admissibility: Vec::new(),
                verdict: MultiVerdictKind::RefusedInfiniteIndex { entry: i, reason },
                citations: cites(&[cite::NECESSARY]),
            });
        }
    }
    let admissibility = pairwise_admissibility(spec, DEFAULT_ORBIT_BOUND, DEFAULT_SWEEP_SHELLS);
    for r in &admissibility {
        if let Admissibility::Fail { m, direction } = r.admissibility {
            return Ok(MultiVerdict {
                entries,
                verdict: MultiVerdictKind::RefusedAdmissibility {
                    i: r.i,
                    j: r.j,
                    m,
                    direction,
                },
                admissibility,
                citations: cites(&[cite::DISJOINTNESS_HYPOTHESIS]),
            });
        }
    }
    let comps = components(spec, n_max)?;
    let refs: Vec<&Component> = comps.iter().collect();
    let levels: Vec<MultiLevel> = (1..=n_max)
        .map(|n| {
            let certs = (0..e.len())
                .map(|i| {
                    let own: Vec<&Component> =
                        refs.iter().copied().filter(|c| c.entry == i).collect();
                    tree_level(&own, n)
                })
                .collect::<Vec<_>>();
            let (witness_system, witnesses_ok) = witness_system(&refs, n);
            // irreducibility is part of witnesses_ok for split entries
            let saturated = witnesses_ok
                && certs
                    .iter()
                    .all(|c| !c.split.is_empty() || c.irreducibility.status.is_certified());
            MultiLevel {
                level: n,
                entries: certs,
                witness_system,
                saturation: Status::from_bool(saturated),
            }
        })
        .collect();
    let run = levels
        .iter()
        .rev()
        .take_while(|l| l.saturation.is_certified())
        .count() as u32;
    let verdict = if run > 0 {
        MultiVerdictKind::Certified {
            run_start: n_max - run + 1,
            certified_through: n_max,
            levels,
        }
    } else {
        let first = levels
            .iter()
            .find(|l| !l.saturation.is_certified())
            .expect("unsaturated")
            .level;
        MultiVerdictKind::Unknown {
            first_failing_level: first,
            levels,
        }
    };
    Ok(MultiVerdict {
        entries,
        admissibility,
        verdict,
        citations: cites(&[
            cite::MULTITREE,
            cite::INDEX_SATURATION,
            cite::DISJOINTNESS_HYPOTHESIS,
        ]),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certificates::{condition_witness, finite_index_verdict, Mode};
    use crate::qpoly::parse_ratfunc;

    fn rf(s: &str) -> RatFunc {
        parse_ratfunc(s).unwrap()
    }

    fn spec(q: u64, pairs: &[(&str, &str)]) -> MultiSpec {
        MultiSpec::new(
            pairs
                .iter()
                .map(|(c, a)| MultiEntry {
                    map: UnicriticalMap::new(q, rf(c)).unwrap(),
                    alpha: rf(a),
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn spec_validation() {
        assert_eq!(MultiSpec::new(vec![]), Err(Error::EmptyInput));
        let a = MultiEntry {
            map: UnicriticalMap::new(2, rf("t")).unwrap(),
            alpha: rf("1"),
        };
        let b = MultiEntry {
            map: UnicriticalMap::new(3, rf("t")).unwrap(),
            alpha: rf("1"),
        };
        assert_eq!(MultiSpec::new(vec![a, b]), Err(Error::ShapeMismatch));
    }

    #[test]
    fn admissibility_examples() {
        let r = pairwise_admissibility(&spec(2, &[("t", "1 - t"), ("t", "1 + t")]), 8, 4);
        assert_eq!(r[0].admissibility, Admissibility::Pass);
        // f^2(1 - t) = ((1 - t)^2 + t)^2 + t
        let r = pairwise_admissibility(
            &spec(2, &[("t", "1 - t"), ("t", "(t^2 - t + 1)^2 + t")]),
            8,
            4,
        );
        assert_eq!(
            r[0].admissibility,
            Admissibility::Fail {
                m: 2,
                direction: Direction::JFromI
            }
        );
        let r = pairwise_admissibility(&spec(2, &[("t", "1 - t"), ("t^2", "1 + t")]), 4, 4);
        assert!(matches!(
            r[0].admissibility,
            Admissibility::HeuristicPass { .. }
        ));
    }

    #[test]
    fn odd_q_negated_parameter() {
        // f_2(x) = -f_1(-x), and -alpha_2 = f_1(alpha_1)
        let r = pairwise_admissibility(&spec(3, &[("t", "1"), ("-t", "-t - 1")]), 8, 4);
        assert!(r[0].negated);
        assert_eq!(
            r[0].admissibility,
            Admissibility::Fail {
                m: 1,
                direction: Direction::JFromI
            }
        );
    }

    #[test]
    fn witnesses_for_the_two_entry_fixture() {
        // 1 + t = 1 + f(0) splits into the subtrees over 1 and -1
        let s = spec(2, &[("t", "1 - t"), ("t", "1 + t")]);
        let out = simultaneous_witnesses(&s, 3).unwrap();
        assert!(out.is_certificate());
        let system = out.witness_system();
        assert_eq!(system.len(), 3);
        assert_eq!((system[1].alpha.clone(), system[1].offset), (rf("1"), 1));
        for w in system {
            let e = &s.entries()[w.entry];
            let level = 3 - w.offset;
            let r = condition_witness(&e.map, &w.alpha, level, Mode::R).unwrap();
            assert!(!w.witness.is_empty() && w.witness.divides(&r));
        }
        // at level 2 the place t = 1 is R for the subtree over 1 but a zero of 1 - t
        let out = simultaneous_witnesses(&s, 2).unwrap();
        assert!(
            matches!(out, SimultaneousOutcome::Unknown { ref empty_entries, .. } if empty_entries == &[1])
        );
    }

    #[test]
    fn single_entry_is_the_r_witness() {
        let s = spec(2, &[("t", "1 - t")]);
        let out = simultaneous_witnesses(&s, 3).unwrap();
        let e = &s.entries()[0];
        assert_eq!(
            out.witness_system()[0].witness,
            condition_witness(&e.map, &e.alpha, 3, Mode::R).unwrap()
        );
    }

    #[test]
    fn collision_kills_a_witness() {
        // d_2 for alpha_1 = 1 - t is t^2 + 2t - 1, the numerator of alpha_2
        let s = spec(2, &[("t", "1 - t"), ("t", "t^2 + 2*t - 1")]);
        let out = simultaneous_witnesses(&s, 2).unwrap();
        assert!(
            matches!(out, SimultaneousOutcome::Unknown { ref empty_entries, .. } if empty_entries.contains(&0))
        );
    }

    #[test]
    fn verdict_examples() {
        let v = disjointness_verdict(&spec(2, &[("t", "1 - t"), ("t", "1 + t")]), 5).unwrap();
        assert!(matches!(
            v.verdict,
            MultiVerdictKind::Certified {
                run_start: 3,
                certified_through: 5,
                ..
            }
        ));
        let v = disjointness_verdict(&spec(2, &[("t", "1 - t"), ("t", "t^2 + t")]), 3).unwrap();
        assert_eq!(
            v.verdict,
            MultiVerdictKind::RefusedInfiniteIndex {
                entry: 1,
                reason: InfiniteReason::Postcritical { n: 2 }
            }
        );
        let v = disjointness_verdict(&spec(2, &[("t", "1 - t"), ("t", "(t^2 - t + 1)^2 + t")]), 3)
            .unwrap();
        assert!(matches!(
            v.verdict,
            MultiVerdictKind::RefusedAdmissibility { m: 2, .. }
        ));
        assert!(matches!(
            disjointness_verdict(&spec(2, &[("3", "t")]), 2),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn single_entry_matches_single_tree() {
        for alpha in ["1 - t", "1 + t", "t^3 - 2"] {
            let s = spec(2, &[("t", alpha)]);
            let multi = disjointness_verdict(&s, 4).unwrap();
            let single =
                finite_index_verdict(&s.entries()[0].map, &s.entries()[0].alpha, 4).unwrap();
            let a: Vec<&LevelCertificate> =
                multi.levels().iter().flat_map(|l| &l.entries).collect();
            let b: Vec<&LevelCertificate> = single.levels().iter().collect();
            assert_eq!(a, b);
            let sa: Vec<Status> = multi.levels().iter().map(|l| l.saturation).collect();
            let sb: Vec<Status> = single.levels().iter().map(|l| l.saturation).collect();
            assert_eq!(sa, sb);
        }
    }

    #[test]
    fn json_shape() {
        let v = disjointness_verdict(&spec(2, &[("t", "1 - t"), ("t", "1 + t")]), 2).unwrap();
        let json = serde_json::to_value(&v).unwrap();
        assert!(json["entries"].is_array());
        assert!(json["verdict"]["levels"][0]["witness_system"].is_array());
    }
}
