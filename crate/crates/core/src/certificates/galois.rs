//! Level certificates and the finite-index verdict pipeline.

use serde::{Deserialize, Serialize};

use super::product::tree_trail;
use super::stability::capelli_from_gaps;
use super::witness::r_witness_from_gaps;
use super::{
    cite, critical_gaps, np_irreducibility, CriticalGap, Irreducibility, IrreducibilityMethod,
    LevelCertificate, Status,
};
use crate::dynamics::{
    classify_point, critical_orbit_status, is_postcritical, CriticalOrbit, PointClass,
    Postcriticality, UnicriticalMap, DEFAULT_MAX_ITER,
};
use crate::error::{Error, Result};
use crate::qpoly::{Place, RatFunc};

/// Certificate for level `n`: irreducibility by the Capelli chain (Newton
/// polygon at infinity as fallback) and the Condition R witness. Split
/// basepoints (`q = 2`) are certified through their subtrees.
pub fn level_galois_certificate(
    f: &UnicriticalMap,
    beta: &RatFunc,
    n: u32,
) -> Result<LevelCertificate> {
    if n == 0 {
        return Err(Error::NotApplicable("levels start at 1".into()));
    }
    Ok(tree_trail(f, beta, n)?.pop().expect("n >= 1"))
}

fn np_status(f: &UnicriticalMap, beta: &RatFunc, n: u32) -> Result<Status> {
    match np_irreducibility(f, beta, n, &Place::Infinity) {
        Err(Error::LevelTooDeep { .. }) => Ok(Status::Unknown),
        other => other,
    }
}

/// Certificates for levels `1..=gaps.len()-1`.
pub(crate) fn level_trail(
    f: &UnicriticalMap,
    beta: &RatFunc,
    gaps: &[CriticalGap],
) -> Result<Vec<LevelCertificate>> {
    let chain = capelli_from_gaps(f, &gaps[1..]);
    let mut out = Vec::with_capacity(chain.len());
    for (i, status) in chain.into_iter().enumerate() {
        let n = i as u32 + 1;
        let irreducibility = if status.is_certified() {
            Irreducibility {
                status,
                method: IrreducibilityMethod::CapelliNorm,
            }
        } else {
            Irreducibility {
                status: np_status(f, beta, n)?,
                method: IrreducibilityMethod::NewtonPolygon,
            }
        };
        let witness = r_witness_from_gaps(f, beta, &gaps[..=i + 1]);
        out.push(assemble(n, irreducibility, &witness));
    }
    Ok(out)
}

pub(crate) fn assemble(
    n: u32,
    irreducibility: Irreducibility,
    witness: &crate::qpoly::PlaceWitness,
) -> LevelCertificate {
    let saturated = irreducibility.status.is_certified() && !witness.is_empty();
    let mut citations = Vec::new();
    if irreducibility.status.is_certified() {
        citations.push(
            match irreducibility.method {
                IrreducibilityMethod::CapelliNorm => cite::CAPELLI,
                IrreducibilityMethod::NewtonPolygon => cite::NEWTON_POLYGON,
            }
            .to_string(),
        );
    }
    if saturated {
        citations.push(cite::RAMIFICATION.to_string());
    }
    LevelCertificate {
        level: n,
        irreducibility,
        r_witness: (!witness.is_empty()).then(|| witness.finite_part.clone()),
        r_witness_infinity: witness.includes_infinity,
        saturation: Status::from_bool(saturated),
        citations,
        split: Vec::new(),
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum InfiniteReason {
    Periodic { period: usize },
    Postcritical { n: usize },
    PcfIsotrivial { preperiod: usize, period: usize },
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(tag = "tag", rename_all = "snake_case")]
pub enum VerdictKind {
    InfiniteIndex {
        reason: InfiniteReason,
    },
    /// Levels `run_start..=certified_through` are all saturated.
    FiniteIndexCertified {
        levels: Vec<LevelCertificate>,
        run_start: u32,
        certified_through: u32,
    },
    /// Isotrivial non-PCF map with every level `1..=through` saturated.
    SurjectiveCertified {
        through: u32,
        levels: Vec<LevelCertificate>,
    },
    Unknown {
        first_failing_level: u32,
        levels: Vec<LevelCertificate>,
    },
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Verdict {
    pub verdict: VerdictKind,
    pub citations: Vec<String>,
}

impl Verdict {
    fn new(verdict: VerdictKind, citations: &[&str]) -> Self {
        Verdict {
            verdict,
            citations: citations.iter().map(|s| s.to_string()).collect(),
        }
    }

    /// Per-level certificates, empty for infinite-index verdicts.
    pub fn levels(&self) -> &[LevelCertificate] {
        match &self.verdict {
            VerdictKind::InfiniteIndex { .. } => &[],
            VerdictKind::FiniteIndexCertified { levels, .. }
            | VerdictKind::SurjectiveCertified { levels, .. }
            | VerdictKind::Unknown { levels, .. } => levels,
        }
    }
}

/// Periodic or postcritical basepoints; `None` if neither.
pub(crate) fn infinite_index_reason(
    f: &UnicriticalMap,
    beta: &RatFunc,
) -> Result<Option<InfiniteReason>> {
    match classify_point(f, beta, DEFAULT_MAX_ITER) {
        PointClass::Periodic { period } => return Ok(Some(InfiniteReason::Periodic { period })),
        PointClass::Unknown { iterations } => return Err(Error::ClassificationUnknown(iterations)),
        _ => {}
    }
    Ok(match is_postcritical(f, beta)? {
        Postcriticality::Postcritical { n } => Some(InfiniteReason::Postcritical { n }),
        Postcriticality::NotPostcritical(_) => None,
    })
}

fn first_unsaturated(levels: &[LevelCertificate]) -> Option<u32> {
    levels
        .iter()
        .find(|l| !l.saturation.is_certified())
        .map(|l| l.level)
}

/// Periodic/postcritical short circuit, then the isotrivial branch (PCF
/// infinite index, or Newton-polygon surjectivity), then level certificates
/// for `1..=n_max` with a terminal saturated run.
pub fn finite_index_verdict(f: &UnicriticalMap, beta: &RatFunc, n_max: u32) -> Result<Verdict> {
    if n_max == 0 {
        return Err(Error::NotApplicable("levels start at 1".into()));
    }
    if let Some(reason) = infinite_index_reason(f, beta)? {
        return Ok(Verdict::new(
            VerdictKind::InfiniteIndex { reason },
            &[cite::NECESSARY],
        ));
    }
    if f.is_isotrivial() {
        return isotrivial_verdict(f, beta, &critical_gaps(f, beta, n_max)?);
    }
    let levels = tree_trail(f, beta, n_max)?;
    let run = levels
        .iter()
        .rev()
        .take_while(|l| l.saturation.is_certified())
        .count() as u32;
    if run > 0 {
        let kind = VerdictKind::FiniteIndexCertified {
            run_start: n_max - run + 1,
            certified_through: n_max,
            levels,
        };
        return Ok(Verdict::new(
            kind,
            &[cite::INDEX_SATURATION, cite::RAMIFICATION],
        ));
    }
    let first = first_unsaturated(&levels).expect("level n_max is unsaturated");
    Ok(Verdict::new(
        VerdictKind::Unknown {
            first_failing_level: first,
            levels,
        },
        &[cite::INDEX_SATURATION],
    ))
}

fn isotrivial_verdict(f: &UnicriticalMap, beta: &RatFunc, gaps: &[CriticalGap]) -> Result<Verdict> {
    match critical_orbit_status(f, DEFAULT_MAX_ITER) {
        CriticalOrbit::Pcf { preperiod, period } => {
            let kind = VerdictKind::InfiniteIndex {
                reason: InfiniteReason::PcfIsotrivial { preperiod, period },
            };
            return Ok(Verdict::new(kind, &[cite::PCF_ISOTRIVIAL]));
        }
        CriticalOrbit::Unknown { iterations } => {
            return Err(Error::ClassificationUnknown(iterations))
        }
        CriticalOrbit::NotPcf { .. } => {}
    }
    let mut levels = Vec::with_capacity(gaps.len() - 1);
    for n in 1..gaps.len() {
        let irreducibility = Irreducibility {
            status: np_status(f, beta, n as u32)?,
            method: IrreducibilityMethod::NewtonPolygon,
        };
        let witness = r_witness_from_gaps(f, beta, &gaps[..=n]);
        levels.push(assemble(n as u32, irreducibility, &witness));
    }
    let n_max = (gaps.len() - 1) as u32;
    Ok(match first_unsaturated(&levels) {
        None => Verdict::new(
            VerdictKind::SurjectiveCertified {
                through: n_max,
                levels,
            },
            &[
                cite::ISOTRIVIAL_NEWTON,
                cite::RAMIFICATION,
                cite::INDEX_SATURATION,
            ],
        ),
        Some(first) => Verdict::new(
            VerdictKind::Unknown {
                first_failing_level: first,
                levels,
            },
            &[cite::ISOTRIVIAL_NEWTON],
        ),
    })
}
