use std::collections::BTreeMap;

use serde::{de::Error as _, Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Element of `[C_q]^n` as a portrait: one residue mod `q` per internal node
/// of the depth-`n` `q`-ary tree, stored breadth first (depth `k` occupies
/// indices `(q^k - 1)/(q - 1) ..`, addresses in lexicographic order).
///
/// `act` adds the label at the current node to the next digit and then
/// descends into the child named by the *input* digit.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct TreeAut {
    q: u32,
    depth: u32,
    labels: Vec<u32>,
}

/// Leaf of the depth-`n` tree as a word of digits in `0..q`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LeafWord(pub Vec<u32>);

pub(crate) fn internal_nodes(q: u32, depth: u32) -> usize {
    (0..depth).map(|k| (q as usize).pow(k)).sum()
}

fn level_offset(q: u32, k: u32) -> usize {
    internal_nodes(q, k)
}

impl TreeAut {
    pub fn identity(q: u32, depth: u32) -> Self {
        assert!(q >= 2, "q must be at least 2");
        TreeAut {
            q,
            depth,
            labels: vec![0; internal_nodes(q, depth)],
        }
    }

    /// Labels in breadth-first node order, reduced mod `q`.
    pub fn from_labels(q: u32, depth: u32, labels: Vec<u32>) -> Result<Self> {
        if q < 2 || labels.len() != internal_nodes(q, depth) {
            return Err(Error::ShapeMismatch);
        }
        Ok(TreeAut {
            q,
            depth,
            labels: labels.into_iter().map(|l| l % q).collect(),
        })
    }

    /// Label 1 at `address`, 0 elsewhere.
    pub fn node_generator(q: u32, depth: u32, address: &[u32]) -> Result<Self> {
        let mut g = TreeAut::identity(q, depth);
        let i = g.node_index(address)?;
        g.labels[i] = 1;
        Ok(g)
    }

    /// One generator per internal node; they generate all of `[C_q]^n`.
    pub fn all_node_generators(q: u32, depth: u32) -> Vec<TreeAut> {
        (0..internal_nodes(q, depth))
            .map(|i| {
                let mut g = TreeAut::identity(q, depth);
                g.labels[i] = 1;
                g
            })
            .collect()
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn is_identity(&self) -> bool {
        self.labels.iter().all(|&l| l == 0)
    }

    fn node_index(&self, address: &[u32]) -> Result<usize> {
        if address.len() >= self.depth as usize || address.iter().any(|&a| a >= self.q) {
            return Err(Error::ShapeMismatch);
        }
        let k = address.len() as u32;
        let pos = address
            .iter()
            .fold(0usize, |acc, &a| acc * self.q as usize + a as usize);
        Ok(level_offset(self.q, k) + pos)
    }

    pub fn label(&self, address: &[u32]) -> Result<u32> {
        Ok(self.labels[self.node_index(address)?])
    }

    pub fn set_label(&mut self, address: &[u32], value: u32) -> Result<()> {
        let i = self.node_index(address)?;
        self.labels[i] = value % self.q;
        Ok(())
    }

    fn check_shape(&self, other: &TreeAut) -> Result<()> {
        if self.q == other.q && self.depth == other.depth {
            Ok(())
        } else {
            Err(Error::ShapeMismatch)
        }
    }

    /// Image of a leaf.
    pub fn act(&self, w: &LeafWord) -> Result<LeafWord> {
        if w.0.len() != self.depth as usize || w.0.iter().any(|&a| a >= self.q) {
            return Err(Error::ShapeMismatch);
        }
        Ok(LeafWord(self.act_digits(&w.0)))
    }

    fn act_digits(&self, digits: &[u32]) -> Vec<u32> {
        let q = self.q as usize;
        let mut out = Vec::with_capacity(digits.len());
        let mut pos = 0usize;
        for (k, &a) in digits.iter().enumerate() {
            let node = level_offset(self.q, k as u32) + pos;
            out.push((a + self.labels[node]) % self.q);
            pos = pos * q + a as usize;
        }
        out
    }

    /// Image of every leaf, leaves indexed lexicographically.
    pub fn to_permutation(&self) -> Vec<u32> {
        let q = self.q as usize;
        let n = q.pow(self.depth);
        let mut perm = vec![0u32; n];
        let mut digits = vec![0u32; self.depth as usize];
        for (x, slot) in perm.iter_mut().enumerate() {
            let mut r = x;
            for d in digits.iter_mut().rev() {
                *d = (r % q) as u32;
                r /= q;
            }
            let img = self.act_digits(&digits);
            *slot = img.iter().fold(0u32, |acc, &b| acc * self.q + b);
        }
        perm
    }

    /// `(self * other)(w) = self(other(w))`: the label at input node `u` is
    /// `other_u + self_{other(u)}`.
    pub fn compose(&self, other: &TreeAut) -> Result<TreeAut> {
        self.check_shape(other)?;
        let q = self.q as usize;
        let mut labels = vec![0u32; self.labels.len()];
        // (index of u in its level, index of other(u) in its level)
        let mut frontier = vec![(0usize, 0usize)];
        for k in 0..self.depth {
            let off = level_offset(self.q, k);
            let mut next = Vec::with_capacity(frontier.len() * q);
            for &(u, image) in &frontier {
                let tau = other.labels[off + u];
                labels[off + u] = (tau + self.labels[off + image]) % self.q;
                for a in 0..q {
                    let b = (a + tau as usize) % q;
                    next.push((u * q + a, image * q + b));
                }
            }
            frontier = next;
        }
        Ok(TreeAut {
            q: self.q,
            depth: self.depth,
            labels,
        })
    }

    pub fn inverse(&self) -> TreeAut {
        let q = self.q as usize;
        let mut labels = vec![0u32; self.labels.len()];
        let mut frontier = vec![(0usize, 0usize)];
        for k in 0..self.depth {
            let off = level_offset(self.q, k);
            let mut next = Vec::with_capacity(frontier.len() * q);
            for &(u, image) in &frontier {
                let s = self.labels[off + u];
                labels[off + image] = (self.q - s) % self.q;
                for a in 0..q {
                    next.push((u * q + a, image * q + (a + s as usize) % q));
                }
            }
            frontier = next;
        }
        TreeAut {
            q: self.q,
            depth: self.depth,
            labels,
        }
    }

    /// Component `k` is the sum of the labels at depth `k`, mod `q`.
    pub fn abelianize(&self) -> Vec<u32> {
        (0..self.depth)
            .map(|k| {
                let off = level_offset(self.q, k);
                let len = (self.q as usize).pow(k);
                (self.labels[off..off + len]
                    .iter()
                    .map(|&l| l as u64)
                    .sum::<u64>()
                    % self.q as u64) as u32
            })
            .collect()
    }

    /// Restriction to the top `depth` levels.
    pub fn truncate(&self, depth: u32) -> Result<TreeAut> {
        if depth > self.depth {
            return Err(Error::ShapeMismatch);
        }
        let n = internal_nodes(self.q, depth);
        Ok(TreeAut {
            q: self.q,
            depth,
            labels: self.labels[..n].to_vec(),
        })
    }

    fn address_of(&self, index: usize) -> String {
        let mut k = 0;
        while level_offset(self.q, k + 1) <= index {
            k += 1;
        }
        let mut pos = index - level_offset(self.q, k);
        let mut digits = vec![0u32; k as usize];
        for d in digits.iter_mut().rev() {
            *d = pos as u32 % self.q;
            pos /= self.q as usize;
        }
        digits
            .iter()
            .map(|d| char::from_digit(*d, 36).expect("q <= 36"))
            .collect()
    }
}

#[derive(Serialize, Deserialize)]
struct PortraitRepr {
    q: u32,
    depth: u32,
    /// Nonzero labels keyed by node address (`""` is the root).
    labels: BTreeMap<String, u32>,
}

impl Serialize for TreeAut {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let labels = self
            .labels
            .iter()
            .enumerate()
            .filter(|(_, &l)| l != 0)
            .map(|(i, &l)| (self.address_of(i), l))
            .collect();
        PortraitRepr {
            q: self.q,
            depth: self.depth,
            labels,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for TreeAut {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = PortraitRepr::deserialize(d)?;
        if !(2..=36).contains(&r.q) {
            return Err(D::Error::custom("q must lie in 2..=36"));
        }
        let mut g = TreeAut::identity(r.q, r.depth);
        for (addr, label) in r.labels {
            let digits: Option<Vec<u32>> = addr.chars().map(|c| c.to_digit(36)).collect();
            let digits = digits.ok_or_else(|| D::Error::custom(format!("bad address {addr:?}")))?;
            g.set_label(&digits, label).map_err(D::Error::custom)?;
        }
        Ok(g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn word(s: &str) -> LeafWord {
        LeafWord(s.chars().map(|c| c.to_digit(10).unwrap()).collect())
    }

    #[test]
    fn root_swap_action() {
        let g = TreeAut::node_generator(2, 2, &[]).unwrap();
        for (a, b) in [("00", "10"), ("01", "11"), ("10", "00"), ("11", "01")] {
            assert_eq!(g.act(&word(a)).unwrap(), word(b));
        }
        assert_eq!(g.abelianize(), vec![1, 0]);
        assert!(g.compose(&g).unwrap().is_identity());
    }

    #[test]
    fn subtree_generator_action() {
        let g = TreeAut::node_generator(2, 2, &[0]).unwrap();
        for (a, b) in [("00", "01"), ("01", "00"), ("10", "10"), ("11", "11")] {
            assert_eq!(g.act(&word(a)).unwrap(), word(b));
        }
        let both = TreeAut::from_labels(2, 2, vec![0, 1, 1]).unwrap();
        assert_eq!(both.abelianize(), vec![0, 0]);
    }

    #[test]
    fn composition_is_a_left_action() {
        let s = TreeAut::node_generator(2, 2, &[0]).unwrap();
        let t = TreeAut::node_generator(2, 2, &[]).unwrap();
        let st = s.compose(&t).unwrap();
        for w in ["00", "01", "10", "11"] {
            let w = word(w);
            assert_eq!(st.act(&w).unwrap(), s.act(&t.act(&w).unwrap()).unwrap());
        }
        assert_eq!(s.compose(&TreeAut::identity(2, 2)).unwrap(), s);
    }

    #[test]
    fn shape_errors() {
        let a = TreeAut::identity(2, 2);
        let b = TreeAut::identity(3, 2);
        assert_eq!(a.compose(&b), Err(Error::ShapeMismatch));
        assert_eq!(a.act(&word("0")), Err(Error::ShapeMismatch));
        assert_eq!(a.act(&word("02")), Err(Error::ShapeMismatch));
    }

    #[test]
    fn portrait_json() {
        let mut g = TreeAut::identity(3, 3);
        g.set_label(&[], 2).unwrap();
        g.set_label(&[1, 2], 1).unwrap();
        let json = serde_json::to_string(&g).unwrap();
        assert_eq!(json, r#"{"q":3,"depth":3,"labels":{"":2,"12":1}}"#);
        assert_eq!(serde_json::from_str::<TreeAut>(&json).unwrap(), g);
    }
}
