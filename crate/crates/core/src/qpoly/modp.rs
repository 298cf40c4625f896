//! Word-size modular images used to short-circuit gcd computations.
//!
//! If `p` divides neither leading coefficient, the degree of `gcd(a mod p,
//! b mod p)` is an upper bound for the degree of the gcd over Q. A degree-0
//! image therefore proves coprimality without touching big integers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

pub(crate) const PRIMES: [u64; 3] = [2_147_483_647, 2_147_483_629, 2_147_483_587];

fn reduce(x: &BigInt, p: u64) -> u64 {
    x.mod_floor(&BigInt::from(p))
        .to_u64()
        .expect("residue fits in u64")
}

fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * a % p;
        }
        a = a * a % p;
        e >>= 1;
    }
    acc
}

fn trim(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

/// Reduces `a` mod `p`; `None` if the leading coefficient vanishes.
fn image(a: &[BigInt], p: u64) -> Option<Vec<u64>> {
    let v: Vec<u64> = a.iter().map(|c| reduce(c, p)).collect();
    (v.last().copied().unwrap_or(0) != 0).then_some(v)
}

fn gcd_degree_mod(mut a: Vec<u64>, mut b: Vec<u64>, p: u64) -> usize {
    if a.len() < b.len() {
        std::mem::swap(&mut a, &mut b);
    }
    while !b.is_empty() {
        // a <- a mod b
        let db = b.len() - 1;
        let inv = inv_mod(b[db], p);
        while a.len() > db {
            let k = a.len() - 1;
            let q = a[k] * inv % p;
            if q != 0 {
                for (i, &bc) in b.iter().enumerate() {
                    let idx = k - db + i;
                    a[idx] = (a[idx] + p - q * bc % p) % p;
                }
            }
            a.pop();
            trim(&mut a);
        }
        trim(&mut a);
        std::mem::swap(&mut a, &mut b);
    }
    a.len().saturating_sub(1)
}

/// Smallest gcd degree seen across the word-size primes whose reduction keeps
/// both degrees; `None` if every prime was unlucky.
pub(crate) fn gcd_degree_bound(a: &[BigInt], b: &[BigInt]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for &p in PRIMES.iter().take(2) {
        let (Some(ia), Some(ib)) = (image(a, p), image(b, p)) else {
            continue;
        };
        let d = gcd_degree_mod(ia, ib, p);
        best = Some(best.map_or(d, |b| b.min(d)));
        if d == 0 {
            break;
        }
    }
    best
}
