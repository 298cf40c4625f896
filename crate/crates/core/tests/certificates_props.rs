use arboreal::certificates::{
    capelli_norm_stability, condition_witness, count_v1_places, critical_gaps,
    level_galois_certificate, np_irreducibility, x_set_size, Mode, Status,
};
use arboreal::dynamics::UnicriticalMap;
use arboreal::error::Error;
use arboreal::kummer2::gal_orders_level12;
use arboreal::qpoly::{Place, Poly, RatFunc};
use proptest::prelude::*;

fn poly(max_len: usize) -> impl Strategy<Value = Poly> {
    prop::collection::vec(-3i64..=3, 1..=max_len).prop_map(|c| Poly::from_i64s(&c))
}

fn ratfunc() -> impl Strategy<Value = RatFunc> {
    (poly(3), poly(2).prop_filter("nonzero", |p| !p.is_zero()))
        .prop_map(|(n, d)| RatFunc::normalize(n, d).unwrap())
}

fn nonconstant() -> impl Strategy<Value = RatFunc> {
    ratfunc().prop_filter("nonconstant", |z| !z.is_constant())
}

fn polyfunc(max_deg: usize) -> impl Strategy<Value = RatFunc> {
    poly(max_deg + 1).prop_map(RatFunc::from_poly)
}

fn coprime(a: &Poly, b: &Poly) -> bool {
    b.is_zero() && a.is_constant() || a.gcd(b).is_constant()
}

/// Degree of `z` as a map to P^1: its number of zeros with multiplicity.
fn map_degree(z: &RatFunc) -> u64 {
    z.num().deg().max(z.den().deg()) as u64
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn r_witnesses_are_sound(c in nonconstant(), beta in ratfunc(), q in prop::sample::select(vec![2u64, 3]), n in 1u32..=3) {
        let f = UnicriticalMap::new(q, c).unwrap();
        let w = condition_witness(&f, &beta, n, Mode::R).unwrap();
        let gaps = critical_gaps(&f, &beta, n).unwrap();
        let dn = &gaps[n as usize].d;
        let p = &w.finite_part;
        if !p.is_constant() {
            // every root of w is a simple root of num(d_n)
            prop_assert!(p.divides(dn.num()));
            prop_assert!(coprime(p, &dn.num().exact_div(p).unwrap()));
            for g in &gaps[..n as usize] {
                prop_assert!(coprime(p, g.d.num()) && coprime(p, g.d.den()));
            }
            for other in [beta.num(), beta.den(), f.c().den(), dn.den()] {
                prop_assert!(coprime(p, other));
            }
        }
        if w.includes_infinity {
            prop_assert_eq!(dn.infinite_valuation(), Ok(1));
        }
    }

    #[test]
    fn capelli_chain_is_monotone(c in nonconstant(), beta in ratfunc(), q in prop::sample::select(vec![2u64, 3])) {
        let f = UnicriticalMap::new(q, c).unwrap();
        let chain = capelli_norm_stability(&f, &beta, 4).unwrap();
        let k = chain.iter().take_while(|s| s.is_certified()).count();
        prop_assert!(chain[k..].iter().all(|s| *s == Status::Unknown));
    }

    #[test]
    fn irreducibility_methods_agree(c in nonconstant(), beta in ratfunc(), n in 1u32..=3) {
        let f = UnicriticalMap::new(2, c).unwrap();
        let capelli = capelli_norm_stability(&f, &beta, n).unwrap()[n as usize - 1];
        let np = match np_irreducibility(&f, &beta, n, &Place::Infinity) {
            Ok(s) => s,
            Err(Error::LevelTooDeep { .. }) => Status::Unknown,
            Err(e) => panic!("{e}"),
        };
        let cert = level_galois_certificate(&f, &beta, n).unwrap();
        // an unsplit tree reports irreducible iff one of the two tests certifies
        if cert.split.is_empty() {
            prop_assert_eq!(cert.irreducibility.status.is_certified(), capelli.is_certified() || np.is_certified());
        }
        if cert.saturation.is_certified() && cert.split.is_empty() {
            prop_assert!(cert.irreducibility.status.is_certified() && cert.r_witness.is_some() || cert.r_witness_infinity);
        }
    }

    #[test]
    fn certificates_agree_with_the_kummer_oracle(c in polyfunc(3), beta in polyfunc(3)) {
        prop_assume!(!c.is_constant());
        let orders = match gal_orders_level12(&c, &beta) {
            Ok(o) => o,
            Err(Error::DegenerateTower) => return Ok(()),
            Err(e) => panic!("{e}"),
        };
        prop_assert!(orders.order2 != 4 || orders.order1 == 2);
        let f = UnicriticalMap::new(2, c).unwrap();
        if level_galois_certificate(&f, &beta, 1).unwrap().saturation.is_certified() {
            prop_assert_eq!(orders.order1, 2);
        }
        if level_galois_certificate(&f, &beta, 2).unwrap().saturation.is_certified() {
            prop_assert_eq!(orders.order2, 4);
        }
    }

    #[test]
    fn v1_count_is_bounded_by_the_zeros(c in nonconstant(), beta in ratfunc(), n in 1u32..=4) {
        let f = UnicriticalMap::new(2, c).unwrap();
        let gaps = critical_gaps(&f, &beta, n).unwrap();
        let dn = &gaps[n as usize].d;
        match count_v1_places(&f, &RatFunc::zero(), &beta, n) {
            Ok(k) => {
                prop_assert!(k <= map_degree(dn));
                let squarefree_poly = dn.is_polynomial()
                    && !dn.is_constant()
                    && coprime(dn.num(), &dn.num().derivative());
                if squarefree_poly {
                    prop_assert_eq!(k, dn.num().deg() as u64);
                }
            }
            Err(Error::OrbitCollision { .. }) => prop_assert!(dn.is_zero() || gaps.iter().any(|g| g.d.is_zero())),
            Err(e) => panic!("{e}"),
        }
    }

    #[test]
    fn x_set_is_bounded_by_the_target(gamma in ratfunc(), b1 in ratfunc(), b2 in ratfunc(), n in 2u32..=4) {
        let f = UnicriticalMap::new(2, RatFunc::t()).unwrap();
        if let Ok(k) = x_set_size(&f, &gamma, &b1, &b2, n) {
            let target = &f.iterate(&gamma, n as usize).unwrap() - &b2;
            prop_assert!(k <= map_degree(&target));
        }
    }
}

#[test]
fn flagship_witnesses() {
    let f = UnicriticalMap::new(2, RatFunc::t()).unwrap();
    let beta = arboreal::qpoly::parse_ratfunc("1 - t").unwrap();
    let w1 = condition_witness(&f, &beta, 1, Mode::R).unwrap();
    let w2 = condition_witness(&f, &beta, 2, Mode::R).unwrap();
    assert_eq!(w1.finite_part.to_string(), "t - 1/2");
    assert_eq!(w2.finite_part.to_string(), "t^2 + 2*t - 1");
}
