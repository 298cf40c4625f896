//! Split basepoints and products of preimage trees.
//!
//! When `q = 2` and `beta - c = w^2` in Q(t), `f(x) - beta = (x - w)(x + w)`
//! and the tree over `beta` is the union of the trees over `w` and `-w` one
//! level down: `K_n(beta) = K_(n-1)(w) K_(n-1)(-w)`. Splitting repeats while
//! the square roots stay in Q(t). A collection of such components
//! `(alpha_i, m_i)` is saturated at level `n` when every `m_i < n`, every
//! `f^(n - m_i)(x) - alpha_i` is irreducible, and each component has a place
//! with Condition R at its own level and Condition U at every other
//! component's level. The quotient is then `C_q^(sum q^(n - m_i - 1))`, which
//! equals `C_q^(s q^(n-1))` for `s` trees.

use serde::{Deserialize, Serialize};

use super::galois::level_trail;
use super::witness::filter_u;
use super::{
    cite, critical_gaps, CriticalGap, Irreducibility, IrreducibilityMethod, LevelCertificate,
    Status,
};
use crate::dynamics::UnicriticalMap;
use crate::error::Result;
use crate::qpoly::{PlaceWitness, RatFunc};

/// One subtree of a split basepoint at one level of the whole tree.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct ComponentCertificate {
    pub alpha: RatFunc,
    /// Depth of `alpha` below the basepoint.
    pub offset: u32,
    /// Level inside the subtree, `n - offset`.
    pub level: u32,
    pub irreducibility: Irreducibility,
    /// Places with Condition R at `alpha` and Condition U at the other
    /// components.
    pub witness: PlaceWitness,
}

pub(crate) struct Component {
    pub entry: usize,
    pub map: UnicriticalMap,
    pub alpha: RatFunc,
    pub offset: u32,
    pub gaps: Vec<CriticalGap>,
    /// Single-tree certificates for subtree levels `1..=n_max - offset`.
    pub trail: Vec<LevelCertificate>,
}

/// Leaves of the splitting of `beta`, depth first, `w` before `-w`. Only
/// depths below `n_max` are split; deeper splits cannot change levels up to
/// `n_max`.
pub(crate) fn split_points(f: &UnicriticalMap, beta: &RatFunc, n_max: u32) -> Vec<(RatFunc, u32)> {
    let mut out = Vec::new();
    let mut stack = vec![(beta.clone(), 0u32)];
    while let Some((alpha, m)) = stack.pop() {
        let root = if f.q() == 2 && m + 1 < n_max {
            (&alpha - f.c()).sqrt()
        } else {
            None
        };
        match root {
            Some(w) if !w.is_zero() => {
                stack.push((-&w, m + 1));
                stack.push((w, m + 1));
            }
            _ => out.push((alpha, m)),
        }
    }
    out
}

pub(crate) fn build_components(
    entries: &[(&UnicriticalMap, &RatFunc)],
    n_max: u32,
) -> Result<Vec<Component>> {
    let mut out = Vec::new();
    for (entry, (f, beta)) in entries.iter().enumerate() {
        for (alpha, offset) in split_points(f, beta, n_max) {
            let gaps = critical_gaps(f, &alpha, n_max - offset)?;
            let trail = level_trail(f, &alpha, &gaps)?;
            out.push(Component {
                entry,
                map: (*f).clone(),
                alpha,
                offset,
                gaps,
                trail,
            });
        }
    }
    Ok(out)
}

pub(crate) struct ProductLevel {
    /// `None` for components that only start below level `n`.
    pub certs: Vec<Option<ComponentCertificate>>,
    pub saturated: bool,
}

pub(crate) fn product_level(comps: &[&Component], n: u32) -> ProductLevel {
    let active = |c: &Component| c.offset < n;
    let certs: Vec<Option<ComponentCertificate>> = comps
        .iter()
        .enumerate()
        .map(|(i, c)| {
            if !active(c) {
                return None;
            }
            let level = n - c.offset;
            let own = &c.trail[level as usize - 1];
            let mut witness = own.witness();
            for (j, other) in comps.iter().enumerate() {
                if j != i && active(other) {
                    let lj = (n - other.offset) as usize;
                    witness = filter_u(&other.map, &other.alpha, &other.gaps[..=lj], &witness);
                }
            }
            Some(ComponentCertificate {
                alpha: c.alpha.clone(),
                offset: c.offset,
                level,
                irreducibility: own.irreducibility,
                witness,
            })
        })
        .collect();
    let saturated = certs.iter().all(|c| {
        c.as_ref()
            .is_some_and(|c| c.irreducibility.status.is_certified() && !c.witness.is_empty())
    });
    ProductLevel { certs, saturated }
}

/// Level-`n` certificate of one tree given its components.
pub(crate) fn tree_level(comps: &[&Component], n: u32) -> LevelCertificate {
    if let [c] = comps {
        if c.offset == 0 {
            return c.trail[n as usize - 1].clone();
        }
    }
    let p = product_level(comps, n);
    let mut citations = vec![cite::SPLIT.to_string()];
    if p.saturated {
        citations.push(cite::RAMIFICATION.to_string());
        citations.push(cite::MULTITREE.to_string());
    }
    LevelCertificate {
        level: n,
        irreducibility: Irreducibility {
            status: Status::Unknown,
            method: IrreducibilityMethod::CapelliNorm,
        },
        r_witness: None,
        r_witness_infinity: false,
        saturation: Status::from_bool(p.saturated),
        citations,
        split: p.certs.into_iter().flatten().collect(),
    }
}

/// Certificates for levels `1..=n_max` of the tree over `beta`, splitting
/// rational preimages when `q = 2`.
pub(crate) fn tree_trail(
    f: &UnicriticalMap,
    beta: &RatFunc,
    n_max: u32,
) -> Result<Vec<LevelCertificate>> {
    let comps = build_components(&[(f, beta)], n_max)?;
    let refs: Vec<&Component> = comps.iter().collect();
    Ok((1..=n_max).map(|n| tree_level(&refs, n)).collect())
}
