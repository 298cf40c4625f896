//! Certificates for the iterated Galois groups of `f(x) = x^q + c` over Q̄(t).
//!
//! Everything here is one-sided: `Certified` is a proof, `Unknown` claims
//! nothing. The central objects are the critical gaps
//! `d_n = f^n(0) - beta`, whose factorization pattern controls both
//! irreducibility of `f^n(x) - beta` (through the norm argument behind
//! Capelli's lemma) and ramification at level `n` (Condition R).

mod experiments;
mod galois;
mod product;
mod stability;
mod witness;

pub use experiments::{
    common_support_sweep, count_v1_places, x_set_size, ExperimentConfig, SweepReport, SweepShell,
};
pub use galois::{
    finite_index_verdict, level_galois_certificate, InfiniteReason, Verdict, VerdictKind,
};
pub use stability::{
    capelli_norm_stability, f_iterate_coefficients, jl_eventual_stability, np_irreducibility,
    stability_certificate_funcfield, StabilityCertificate, StabilityKind, StabilityOutcome,
    DEFAULT_LAMBDA_BOUND,
};
pub use witness::{condition_witness, satisfying_u, Mode};

pub use product::ComponentCertificate;

pub(crate) use galois::infinite_index_reason;
pub(crate) use product::{build_components, product_level, tree_level, Component};

use serde::{Deserialize, Serialize};

use crate::dynamics::UnicriticalMap;
use crate::error::{Error, Result};
use crate::qpoly::{Poly, RatFunc};

/// Short descriptive citations attached to certificates and verdicts.
pub mod cite {
    pub const NECESSARY: &str =
        "necessary conditions: a periodic or postcritical basepoint has infinite index";
    pub const PCF_ISOTRIVIAL: &str =
        "PCF maps: abelianization of [C_q]^n is C_q^n, so the index is infinite";
    pub const ISOTRIVIAL_NEWTON: &str =
        "isotrivial non-PCF maps: Newton polygon at infinity plus Condition R give surjectivity";
    pub const INDEX_SATURATION: &str =
        "index-saturation criterion: finite index iff level quotients are eventually full";
    pub const RAMIFICATION: &str =
        "Condition R and irreducibility give Gal(K_n/K_{n-1}) = C_q^(q^(n-1))";
    pub const CAPELLI: &str = "Capelli lemma with the norm of z - c equal to +-(f^n(0) - beta)";
    pub const NEWTON_POLYGON: &str = "Newton polygon: one segment of slope denominator q^n";
    pub const JONES_LEVY: &str = "Jones-Levy eventual stability: unique backward orbit modulo p";
    pub const SPECIALIZATION: &str =
        "eventual stability transported from an integral non-periodic specialization";
    pub const MULTITREE: &str =
        "simultaneous Condition R/U witnesses give the product saturation C_q^(s q^(n-1))";
    pub const SPLIT: &str =
        "split basepoint: f(x) - beta factors over Q(t), so the tree is a union of subtrees one level down";
    pub const DISJOINTNESS_HYPOTHESIS: &str =
        "disjointness hypothesis: no periodic curve through (alpha_i, alpha_j)";
}

/// `d_n = f^n(0) - beta` for one level.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct CriticalGap {
    pub n: u32,
    pub d: RatFunc,
}

/// `[d_0, ..., d_n]` with `d_0 = -beta`; a degree-cap overflow becomes
/// `LevelTooDeep`.
pub fn critical_gaps(f: &UnicriticalMap, beta: &RatFunc, n: u32) -> Result<Vec<CriticalGap>> {
    let orbit = f
        .orbit(&RatFunc::zero(), n as usize)
        .map_err(|e| too_deep(e, n))?;
    Ok(orbit
        .into_iter()
        .enumerate()
        .map(|(i, x)| CriticalGap {
            n: i as u32,
            d: &x - beta,
        })
        .collect())
}

pub(crate) fn too_deep(e: Error, level: u32) -> Error {
    match e {
        Error::LimitExceeded(_) => Error::LevelTooDeep { level },
        other => other,
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Certified,
    Unknown,
}

impl Status {
    pub fn is_certified(self) -> bool {
        self == Status::Certified
    }

    pub(crate) fn from_bool(b: bool) -> Self {
        if b {
            Status::Certified
        } else {
            Status::Unknown
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IrreducibilityMethod {
    CapelliNorm,
    NewtonPolygon,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Irreducibility {
    pub status: Status,
    /// The method that certified, or the last one attempted.
    pub method: IrreducibilityMethod,
}

/// Per-level record of the hypotheses of the ramification criterion.
///
/// `saturation` is `Certified` only if `irreducibility` is `Certified` and the
/// R-witness is nonempty, or, for a split basepoint, if every subtree in
/// `split` is irreducible with a nonempty witness.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct LevelCertificate {
    pub level: u32,
    pub irreducibility: Irreducibility,
    /// Finite part of the R-witness; `None` when the witness is empty.
    pub r_witness: Option<Poly>,
    pub r_witness_infinity: bool,
    pub saturation: Status,
    pub citations: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub split: Vec<ComponentCertificate>,
}

impl LevelCertificate {
    pub fn witness(&self) -> crate::qpoly::PlaceWitness {
        match &self.r_witness {
            Some(p) => crate::qpoly::PlaceWitness::new(p.clone(), self.r_witness_infinity),
            None => crate::qpoly::PlaceWitness::empty(),
        }
    }
}
