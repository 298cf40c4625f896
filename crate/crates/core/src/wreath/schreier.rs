//! Deterministic Schreier-Sims for small permutation groups.
//!
//! Permutations are images of `0..n`; `mul(a, b)` applies `a` first. Base
//! points are chosen as the smallest point moved by the element that forced a
//! new level, so runs are reproducible. Transversal entries are never
//! replaced once set, which keeps previously sifted elements sifting to the
//! identity as the chain grows.

use num_bigint::BigUint;

pub type Perm = Vec<u32>;

pub fn identity(n: usize) -> Perm {
    (0..n as u32).collect()
}

pub fn mul(a: &Perm, b: &Perm) -> Perm {
    a.iter().map(|&x| b[x as usize]).collect()
}

pub fn inv(a: &Perm) -> Perm {
    let mut out = vec![0u32; a.len()];
    for (x, &y) in a.iter().enumerate() {
        out[y as usize] = x as u32;
    }
    out
}

fn is_identity(a: &Perm) -> bool {
    a.iter().enumerate().all(|(x, &y)| x as u32 == y)
}

#[derive(Clone, Debug)]
struct Level {
    base: u32,
    gens: Vec<Perm>,
    /// `transversal[x]` maps `base` to `x`; `inverse[x]` is its inverse.
    transversal: Vec<Option<Perm>>,
    inverse: Vec<Option<Perm>>,
    orbit: Vec<u32>,
    /// `done[k]`: generators already paired with `orbit[k]` for Schreier
    /// generators. Pairs never change once formed, so each is sifted once.
    done: Vec<usize>,
}

impl Level {
    fn new(base: u32, n: usize) -> Self {
        let mut transversal = vec![None; n];
        transversal[base as usize] = Some(identity(n));
        let inverse = transversal.clone();
        Level {
            base,
            gens: Vec::new(),
            transversal,
            inverse,
            orbit: vec![base],
            done: vec![0],
        }
    }

    fn extend_orbit(&mut self) {
        let mut i = 0;
        while i < self.orbit.len() {
            let x = self.orbit[i];
            for s in &self.gens {
                let y = s[x as usize];
                if self.transversal[y as usize].is_none() {
                    let uy = mul(
                        self.transversal[x as usize].as_ref().expect("orbit point"),
                        s,
                    );
                    self.inverse[y as usize] = Some(inv(&uy));
                    self.transversal[y as usize] = Some(uy);
                    self.orbit.push(y);
                    self.done.push(0);
                }
            }
            i += 1;
        }
    }

    /// Next unprocessed Schreier generator `u_x s u_{xs}^-1`.
    fn next_schreier(&mut self) -> Option<Perm> {
        let k = (0..self.orbit.len()).find(|&k| self.done[k] < self.gens.len())?;
        let x = self.orbit[k] as usize;
        let s = &self.gens[self.done[k]];
        self.done[k] += 1;
        let ux = self.transversal[x].as_ref().expect("orbit point");
        let uy_inv = self.inverse[s[x] as usize].as_ref().expect("orbit point");
        Some(mul(&mul(ux, s), uy_inv))
    }
}

#[derive(Clone, Debug)]
pub struct StabilizerChain {
    n: usize,
    levels: Vec<Level>,
}

impl StabilizerChain {
    pub fn new<'a>(n: usize, gens: impl IntoIterator<Item = &'a Perm>) -> Self {
        let mut chain = StabilizerChain {
            n,
            levels: Vec::new(),
        };
        for g in gens {
            chain.add(g.clone(), 0);
        }
        chain
    }

    /// Residue of `g` and the level at which sifting stopped.
    fn sift(&self, mut g: Perm, from: usize) -> (Perm, usize) {
        for (i, level) in self.levels.iter().enumerate().skip(from) {
            let x = g[level.base as usize];
            match &level.inverse[x as usize] {
                Some(u) => g = mul(&g, u),
                None => return (g, i),
            }
        }
        let depth = self.levels.len();
        (g, depth)
    }

    fn add(&mut self, g: Perm, from: usize) {
        let (h, j) = self.sift(g, from);
        if is_identity(&h) {
            return;
        }
        if j == self.levels.len() {
            let base = h
                .iter()
                .enumerate()
                .find(|(x, &y)| *x as u32 != y)
                .expect("non-identity")
                .0;
            self.levels.push(Level::new(base as u32, self.n));
        }
        // h fixes every earlier base point, so it lies in each G^(i), i <= j
        for i in (0..=j).rev() {
            self.levels[i].gens.push(h.clone());
            self.levels[i].extend_orbit();
        }
        for i in (0..=j).rev() {
            while let Some(s) = self.levels[i].next_schreier() {
                self.add(s, i + 1);
            }
        }
    }

    pub fn order(&self) -> BigUint {
        self.levels.iter().fold(BigUint::from(1u8), |acc, l| {
            acc * BigUint::from(l.orbit.len())
        })
    }

    pub fn contains(&self, g: &Perm) -> bool {
        g.len() == self.n && is_identity(&self.sift(g.clone(), 0).0)
    }

    pub fn base(&self) -> Vec<u32> {
        self.levels.iter().map(|l| l.base).collect()
    }
}
