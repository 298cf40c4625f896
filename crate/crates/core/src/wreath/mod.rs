//! The iterated wreath product `[C_q]^n` acting on the `q`-ary tree.
//!
//! Group elements are portraits ([`TreeAut`]); subgroups are given by
//! generators ([`GroupHandle`]) and measured with a stabilizer chain on the
//! `q^n` leaves. Level `n` of a subgroup tower is *saturated* when the kernel
//! of truncation to level `n - 1` is as large as possible, `q^(q^(n-1))`.

mod portrait;
mod schreier;

pub use portrait::{LeafWord, TreeAut};
pub use schreier::{Perm, StabilizerChain};

use std::sync::OnceLock;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_POINT_CAP: usize = 4096;

/// `|[C_q]^n| = q^((q^n - 1)/(q - 1))`.
pub fn full_group_order(q: u32, n: u32) -> BigUint {
    BigUint::from(q).pow(portrait::internal_nodes(q, n) as u32)
}

/// Subgroup of `[C_q]^n` given by generators. The stabilizer chain is built
/// on first use and cached.
#[derive(Debug)]
pub struct GroupHandle {
    q: u32,
    depth: u32,
    generators: Vec<TreeAut>,
    point_cap: usize,
    chain: OnceLock<StabilizerChain>,
}

impl Clone for GroupHandle {
    fn clone(&self) -> Self {
        GroupHandle {
            q: self.q,
            depth: self.depth,
            generators: self.generators.clone(),
            point_cap: self.point_cap,
            chain: self.chain.clone(),
        }
    }
}

impl GroupHandle {
    pub fn new(q: u32, depth: u32, generators: Vec<TreeAut>) -> Result<Self> {
        if q < 2 || generators.iter().any(|g| g.q() != q || g.depth() != depth) {
            return Err(Error::ShapeMismatch);
        }
        Ok(GroupHandle {
            q,
            depth,
            generators,
            point_cap: DEFAULT_POINT_CAP,
            chain: OnceLock::new(),
        })
    }

    /// The whole of `[C_q]^n`.
    pub fn full(q: u32, depth: u32) -> Self {
        GroupHandle::new(q, depth, TreeAut::all_node_generators(q, depth)).expect("matching shapes")
    }

    pub fn with_point_cap(mut self, cap: usize) -> Self {
        self.point_cap = cap;
        self
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn generators(&self) -> &[TreeAut] {
        &self.generators
    }

    fn points(&self) -> Result<usize> {
        (self.q as usize)
            .checked_pow(self.depth)
            .filter(|&n| n <= self.point_cap)
            .ok_or_else(|| {
                Error::LimitExceeded(format!("q^n exceeds the point cap {}", self.point_cap))
            })
    }

    fn chain(&self) -> Result<&StabilizerChain> {
        let n = self.points()?;
        Ok(self.chain.get_or_init(|| {
            let perms: Vec<Perm> = self
                .generators
                .iter()
                .map(TreeAut::to_permutation)
                .collect();
            StabilizerChain::new(n, perms.iter())
        }))
    }

    pub fn order(&self) -> Result<BigUint> {
        Ok(self.chain()?.order())
    }

    pub fn contains(&self, g: &TreeAut) -> Result<bool> {
        if g.q() != self.q || g.depth() != self.depth {
            return Err(Error::ShapeMismatch);
        }
        Ok(self.chain()?.contains(&g.to_permutation()))
    }

    /// Image under truncation to `depth`.
    pub fn project(&self, depth: u32) -> Result<GroupHandle> {
        let gens = self
            .generators
            .iter()
            .map(|g| g.truncate(depth))
            .collect::<Result<Vec<_>>>()?;
        Ok(GroupHandle::new(self.q, depth, gens)?.with_point_cap(self.point_cap))
    }
}

pub fn subgroup_order(h: &GroupHandle) -> Result<BigUint> {
    h.order()
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct LevelIndex {
    pub level: u32,
    pub order: String,
    pub index: String,
    pub saturated: bool,
}

/// Index and saturation for each group of a truncation-compatible tower
/// (`levels[k+1]` projects onto `levels[k]`, depths consecutive).
pub fn saturation_sequence(levels: &[GroupHandle]) -> Result<Vec<LevelIndex>> {
    for (k, pair) in levels.windows(2).enumerate() {
        let (lower, upper) = (&pair[0], &pair[1]);
        if upper.q != lower.q || upper.depth != lower.depth + 1 {
            return Err(Error::IncompatibleLevels(k + 1));
        }
        let proj = upper.project(lower.depth)?;
        for g in proj.generators() {
            if !lower.contains(g)? {
                return Err(Error::IncompatibleLevels(k + 1));
            }
        }
        if proj.order()? != lower.order()? {
            return Err(Error::IncompatibleLevels(k + 1));
        }
    }
    let mut out = Vec::with_capacity(levels.len());
    for (k, h) in levels.iter().enumerate() {
        let n = h.depth;
        let order = h.order()?;
        let prev = match k {
            0 if n == 0 => BigUint::from(1u8),
            0 => h.project(n - 1)?.order()?,
            _ => levels[k - 1].order()?,
        };
        let saturated =
            n >= 1 && order == prev * BigUint::from(h.q).pow((h.q as usize).pow(n - 1) as u32);
        let index = full_group_order(h.q, n) / &order;
        out.push(LevelIndex {
            level: n,
            order: order.to_string(),
            index: index.to_string(),
            saturated,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_orders() {
        assert_eq!(full_group_order(2, 3), BigUint::from(128u32));
        assert_eq!(full_group_order(3, 2), BigUint::from(81u32));
        assert_eq!(full_group_order(2, 1), BigUint::from(2u32));
        assert_eq!(
            GroupHandle::full(2, 3).order().unwrap(),
            BigUint::from(128u32)
        );
    }

    #[test]
    fn small_subgroups() {
        let swap = TreeAut::node_generator(2, 2, &[]).unwrap();
        assert_eq!(
            subgroup_order(&GroupHandle::new(2, 2, vec![swap]).unwrap()).unwrap(),
            BigUint::from(2u32)
        );
        assert_eq!(
            subgroup_order(&GroupHandle::new(2, 2, vec![]).unwrap()).unwrap(),
            BigUint::from(1u32)
        );
    }

    #[test]
    fn point_cap() {
        let h = GroupHandle::full(2, 13);
        assert!(matches!(h.order(), Err(Error::LimitExceeded(_))));
    }

    #[test]
    fn full_tower_is_saturated() {
        let tower: Vec<GroupHandle> = (1..=3).map(|n| GroupHandle::full(2, n)).collect();
        let seq = saturation_sequence(&tower).unwrap();
        assert!(seq.iter().all(|l| l.saturated && l.index == "1"));
    }

    fn leaf_stabilizer(q: u32, n: u32) -> GroupHandle {
        // node generators away from the path 0, 00, ..., fix the leaf 0...0
        let gens = (0..n)
            .flat_map(|k| {
                (0..q.pow(k)).filter(|&pos| pos != 0).map(move |pos| {
                    let mut addr = vec![0u32; k as usize];
                    let mut r = pos;
                    for d in addr.iter_mut().rev() {
                        *d = r % q;
                        r /= q;
                    }
                    TreeAut::node_generator(q, n, &addr).unwrap()
                })
            })
            .collect();
        GroupHandle::new(q, n, gens).unwrap()
    }

    #[test]
    fn leaf_stabilizer_is_never_saturated() {
        let tower: Vec<GroupHandle> = (1..=3).map(|n| leaf_stabilizer(2, n)).collect();
        let seq = saturation_sequence(&tower).unwrap();
        assert!(seq.iter().all(|l| !l.saturated));
        // |Stab| = |[C_2]^n| / 2^n
        assert_eq!(seq[2].index, "8");
    }

    #[test]
    fn index_two_at_level_two() {
        // root swap together with the product of both depth-1 generators
        let a = TreeAut::node_generator(2, 2, &[]).unwrap();
        let b = TreeAut::from_labels(2, 2, vec![0, 1, 1]).unwrap();
        let h2 = GroupHandle::new(2, 2, vec![a, b]).unwrap();
        let h1 = h2.project(1).unwrap();
        let seq = saturation_sequence(&[h1, h2]).unwrap();
        assert_eq!(seq[1].order, "4");
        assert_eq!(seq[1].index, "2");
        assert!(seq[0].saturated && !seq[1].saturated);
    }

    #[test]
    fn incompatible_tower() {
        let h1 = GroupHandle::new(2, 1, vec![]).unwrap();
        let h2 = GroupHandle::full(2, 2);
        assert_eq!(
            saturation_sequence(&[h1, h2]),
            Err(Error::IncompatibleLevels(1))
        );
        let h3 = GroupHandle::full(2, 3);
        assert_eq!(
            saturation_sequence(&[GroupHandle::full(2, 1), h3]),
            Err(Error::IncompatibleLevels(1))
        );
    }
}
