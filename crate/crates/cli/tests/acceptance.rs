//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
//! the test fails if any criterion does.

use std::time::{Duration, Instant};

use clap::Parser;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use arboreal::certificates::{
    common_support_sweep, count_v1_places, finite_index_verdict, jl_eventual_stability,
    level_galois_certificate, x_set_size, InfiniteReason, StabilityKind, VerdictKind,
};
use arboreal::dynamics::{canonical_height_interval, UnicriticalMap};
use arboreal::kummer2::gal_orders_level12;
use arboreal::multitree::{disjointness_verdict, MultiEntry, MultiSpec, MultiVerdictKind};
use arboreal::qpoly::{parse_ratfunc, rat, rat_frac, RatFunc};
use arboreal::wreath::{full_group_order, subgroup_order, GroupHandle, LeafWord, TreeAut};
use arboreal_cli::{build_report, random_pairs, Cli, Report};

fn rf(s: &str) -> RatFunc {
    parse_ratfunc(s).unwrap()
}

fn map(q: u64, c: &str) -> UnicriticalMap {
    UnicriticalMap::new(q, rf(c)).unwrap()
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn flagship() -> Outcome {
    let start = Instant::now();
    let v = finite_index_verdict(&map(2, "t"), &rf("1 - t"), 8).unwrap();
    let elapsed = start.elapsed();
    let VerdictKind::FiniteIndexCertified {
        levels,
        certified_through,
        ..
    } = &v.verdict
    else {
        return outcome(false, format!("verdict {:?}", v.verdict));
    };
    let w = |i: usize| {
        levels[i]
            .r_witness
            .as_ref()
            .map(|p| p.to_string())
            .unwrap_or_default()
    };
    let pass = *certified_through == 8
        && w(0) == "t - 1/2"
        && w(1) == "t^2 + 2*t - 1"
        && elapsed < Duration::from_secs(10);
    outcome(
        pass,
        format!(
            "certified through {certified_through}, witnesses [{}], [{}], {elapsed:.2?}",
            w(0),
            w(1)
        ),
    )
}

/// `(q, c, beta, expected reason)`
type ReasonCase = (u64, &'static str, &'static str, InfiniteReason);

fn necessary_conditions() -> Outcome {
    use InfiniteReason::*;
    let suite: Vec<ReasonCase> = vec![
        (2, "t", "t", Postcritical { n: 1 }),
        (2, "t", "t^2 + t", Postcritical { n: 2 }),
        (2, "t", "(t^2 + t)^2 + t", Postcritical { n: 3 }),
        (2, "1/t", "1/t", Postcritical { n: 1 }),
        (3, "t", "t^3 + t", Postcritical { n: 2 }),
        // t is fixed by x^2 + t - t^2
        (2, "t - t^2", "t", Periodic { period: 1 }),
        // t -> -t - 1 -> t under x^2 - t^2 - t - 1
        (2, "-t^2 - t - 1", "t", Periodic { period: 2 }),
        (3, "t - t^3", "t", Periodic { period: 1 }),
        (2, "-2", "-1", Periodic { period: 1 }),
        // 0 -> -1 -> 0: constant PCF parameter
        (
            2,
            "-1",
            "t",
            PcfIsotrivial {
                preperiod: 0,
                period: 2,
            },
        ),
    ];
    let mut misses = Vec::new();
    for (q, c, beta, want) in &suite {
        let got = finite_index_verdict(&map(*q, c), &rf(beta), 6).map(|v| v.verdict);
        if !matches!(&got, Ok(VerdictKind::InfiniteIndex { reason }) if reason == want) {
            misses.push(format!("(q={q}, c={c}, beta={beta}) -> {got:?}"));
        }
    }
    outcome(
        misses.is_empty(),
        format!(
            "{}/{} reasons correct {}",
            suite.len() - misses.len(),
            suite.len(),
            misses.join("; ")
        ),
    )
}

fn oracle_agreement() -> Outcome {
    let pairs = random_pairs(2024, 30);
    let (mut claims, mut disagreements) = (0, Vec::new());
    for (c, beta) in &pairs {
        let orders = gal_orders_level12(c, beta).unwrap();
        let f = UnicriticalMap::new(2, c.clone()).unwrap();
        for (n, want) in [(1, orders.order1 == 2), (2, orders.order2 == 4)] {
            if level_galois_certificate(&f, beta, n)
                .unwrap()
                .saturation
                .is_certified()
            {
                claims += 1;
                if !want {
                    disagreements.push(format!("c={c}, beta={beta}, level {n}"));
                }
            }
        }
    }
    outcome(
        disagreements.is_empty() && pairs.len() >= 20 && claims > 0,
        format!(
            "{} pairs, {claims} certified claims, {} disagreements {}",
            pairs.len(),
            disagreements.len(),
            disagreements.join("; ")
        ),
    )
}

fn random_elem(rng: &mut ChaCha8Rng, q: u32, n: u32) -> TreeAut {
    let len = (0..n).map(|k| q.pow(k) as usize).sum();
    TreeAut::from_labels(q, n, (0..len).map(|_| rng.gen_range(0..q)).collect()).unwrap()
}

fn random_shape(rng: &mut ChaCha8Rng) -> (u32, u32) {
    if rng.gen_bool(0.5) {
        (2, rng.gen_range(1..=6))
    } else {
        (3, rng.gen_range(1..=4))
    }
}

fn wreath_engine() -> Outcome {
    let start = Instant::now();
    let mut failures = 0;
    for (q, n) in [(2u32, 1u32), (2, 2), (2, 3), (2, 4), (3, 1), (3, 2), (3, 3)] {
        let exponent = (q.pow(n) - 1) / (q - 1);
        let expected = (q as u64).pow(exponent).to_string();
        let got = subgroup_order(&GroupHandle::full(q, n))
            .unwrap()
            .to_string();
        failures += usize::from(got != expected || full_group_order(q, n).to_string() != expected);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..1000 {
        let (q, n) = random_shape(&mut rng);
        let (a, b) = (random_elem(&mut rng, q, n), random_elem(&mut rng, q, n));
        let sum: Vec<u32> = a
            .abelianize()
            .iter()
            .zip(b.abelianize())
            .map(|(x, y)| (x + y) % q)
            .collect();
        failures += usize::from(a.compose(&b).unwrap().abelianize() != sum);
    }
    for _ in 0..500 {
        let (q, n) = random_shape(&mut rng);
        let (s, t) = (random_elem(&mut rng, q, n), random_elem(&mut rng, q, n));
        let w = LeafWord((0..n).map(|_| rng.gen_range(0..q)).collect());
        let lhs = s.compose(&t).unwrap().act(&w).unwrap();
        failures += usize::from(lhs != s.act(&t.act(&w).unwrap()).unwrap());
    }
    let elapsed = start.elapsed();
    outcome(
        failures == 0 && elapsed < Duration::from_secs(5),
        format!("{failures} failures, {elapsed:.2?}"),
    )
}

fn canonical_height() -> Outcome {
    let iv = canonical_height_interval(&map(2, "t"), &RatFunc::zero(), 10).unwrap();
    let bound = rat_frac(1, 1024);
    outcome(
        iv.contains(&rat_frac(1, 2)) && iv.width() <= bound,
        format!("[{}, {}], width {}", iv.lower, iv.upper, iv.width()),
    )
}

/// Basepoints for the counting criteria: none is postcritical for `x^2 + t`.
const SAMPLE: [&str; 5] = ["1 - t", "2", "t + 2", "-3*t", "1/t"];

fn v1_counts() -> Outcome {
    let f = map(2, "t");
    // h_f(0) = 1/2, so the comparison value is 2^n / 2
    let mut worst = (f64::INFINITY, String::new());
    for beta in SAMPLE {
        for n in 4..=8u32 {
            let count = count_v1_places(&f, &RatFunc::zero(), &rf(beta), n).unwrap();
            let ratio = count as f64 / (1u64 << (n - 1)) as f64;
            if ratio < worst.0 {
                worst = (ratio, format!("beta = {beta}, n = {n}, count {count}"));
            }
        }
    }
    outcome(
        worst.0 >= 0.8,
        format!("minimum ratio {:.3} at {}", worst.0, worst.1),
    )
}

fn x_sets_and_sweep() -> Outcome {
    let f = map(2, "t");
    let mut worst = (0.0f64, String::new());
    for pair in SAMPLE.windows(2) {
        for n in 6..=8u32 {
            let x = x_set_size(&f, &RatFunc::zero(), &rf(pair[0]), &rf(pair[1]), n).unwrap();
            let share = x as f64 / (1u64 << n) as f64;
            if share >= worst.0 {
                worst = (
                    share,
                    format!("betas {} / {}, n = {n}, size {x}", pair[0], pair[1]),
                );
            }
        }
    }
    let sweep =
        common_support_sweep(&map(2, "t"), &rf("1 - t"), &map(2, "t"), &rf("1 + t"), 4, 4).unwrap();
    let stable = sweep.stable_between(3, 4);
    let degrees: Vec<usize> = sweep.shells.iter().map(|s| s.degree).collect();
    // d_1 = 2t - 1 and 1 - 2t share t = 1/2; an independent gcd sweep gives [1, 1, 1, 1]
    let shared = common_support_sweep(
        &map(2, "t"),
        &rf("1 - t"),
        &map(2, "t"),
        &rf("3*t - 1"),
        4,
        4,
    )
    .unwrap();
    let shared_degrees: Vec<usize> = shared.shells.iter().map(|s| s.degree).collect();
    outcome(
        worst.0 <= 0.05 && stable && shared.stable_between(3, 4) && shared_degrees == [1, 1, 1, 1],
        format!(
            "max x-set share {:.4} ({}); sweep degrees {degrees:?}, shared-root fixture {shared_degrees:?}",
            worst.0, worst.1
        ),
    )
}

fn jones_levy() -> Outcome {
    // (q, c, beta, expected cycle length when hand-derived)
    let cases: [(u64, i64, i64, Option<u64>); 10] = [
        (2, 5, 3, Some(2)),
        (3, 2, 1, Some(3)),
        (2, 1, 2, None),
        (2, 3, 1, None),
        (2, -1, 2, None),
        (2, 7, 0, None),
        (3, 1, 0, None),
        (4, 1, 1, None),
        (5, 1, 2, None),
        (7, 2, 1, None),
    ];
    let mut bad = Vec::new();
    for (q, c, beta, want) in cases {
        match jl_eventual_stability(q, &rat(c), &rat(beta)) {
            Ok(cert) => match cert.kind {
                StabilityKind::ModP { cycle_length, .. }
                    if want.is_none_or(|w| w == cycle_length) => {}
                other => bad.push(format!("({q}, {c}, {beta}) -> {other:?}")),
            },
            Err(e) => bad.push(format!("({q}, {c}, {beta}) -> {e}")),
        }
    }
    outcome(
        bad.is_empty(),
        format!("{}/10 ModP certificates {}", 10 - bad.len(), bad.join("; ")),
    )
}

fn multitree() -> Outcome {
    let entry = |a: &str| MultiEntry {
        map: map(2, "t"),
        alpha: rf(a),
    };
    let spec = MultiSpec::new(vec![entry("1 - t"), entry("1 + t")]).unwrap();
    let v = disjointness_verdict(&spec, 5).unwrap();
    let through = match v.verdict {
        MultiVerdictKind::Certified {
            certified_through, ..
        } => certified_through,
        _ => 0,
    };
    let mut mismatches = Vec::new();
    for beta in ["1 - t", "1 + t", "t^3 - 2"] {
        let single = finite_index_verdict(&map(2, "t"), &rf(beta), 5).unwrap();
        let multi = disjointness_verdict(&MultiSpec::new(vec![entry(beta)]).unwrap(), 5).unwrap();
        let a = serde_json::to_string(single.levels()).unwrap();
        let b: Vec<_> = multi
            .levels()
            .iter()
            .map(|l| l.entries[0].clone())
            .collect();
        let sat_a: Vec<_> = single.levels().iter().map(|l| l.saturation).collect();
        let sat_b: Vec<_> = multi.levels().iter().map(|l| l.saturation).collect();
        if a != serde_json::to_string(&b).unwrap() || sat_a != sat_b {
            mismatches.push(beta);
        }
    }
    outcome(
        through == 5 && mismatches.is_empty(),
        format!("product certified through {through}; s = 1 mismatches {mismatches:?}"),
    )
}

fn determinism() -> Outcome {
    let runs: &[&[&str]] = &[
        &[
            "arboreal", "--json", "verdict", "--c", "t", "--beta", "1 - t", "--levels", "8",
        ],
        &[
            "arboreal", "--json", "verdict", "--c", "t", "--beta", "t^2 + t",
        ],
        &[
            "arboreal",
            "--json",
            "stability",
            "--c",
            "t",
            "--beta",
            "t + 1",
            "--levels",
            "4",
        ],
        &["arboreal", "--json", "heights", "--c", "t", "--n", "10"],
        &[
            "arboreal",
            "--json",
            "oracle2",
            "--seed",
            "11",
            "--samples",
            "20",
        ],
        &[
            "arboreal",
            "--json",
            "multitree",
            "--c",
            "t",
            "--alpha",
            "1 - t",
            "--alpha",
            "1 + t",
        ],
        &[
            "arboreal", "--json", "jl", "--q", "3", "--c", "2", "--beta", "1",
        ],
        &[
            "arboreal",
            "--json",
            "sweep-gcd",
            "--c1",
            "t",
            "--alpha1",
            "1 - t",
            "--c2",
            "2*t",
            "--alpha2",
            "1 + t",
        ],
    ];
    let mut bad = Vec::new();
    for args in runs {
        let cli = Cli::parse_from(*args);
        let (a, b) = (
            build_report(&cli).unwrap().to_json(),
            build_report(&cli).unwrap().to_json(),
        );
        let back: Report = serde_json::from_str(&a).unwrap();
        if a != b || back.to_json() != a {
            bad.push(args[2]);
        }
    }
    outcome(
        bad.is_empty(),
        format!("{} fixture reports, unstable: {bad:?}", runs.len()),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

#[test]
fn acceptance() {
    let criteria: [Criterion; 10] = [
        ("flagship finite-index certificate", flagship),
        ("necessary conditions", necessary_conditions),
        ("Kummer oracle agreement", oracle_agreement),
        ("wreath engine", wreath_engine),
        ("canonical height", canonical_height),
        ("v = 1 place counts", v1_counts),
        ("x-set sizes and common-support sweep", x_sets_and_sweep),
        ("mod-p eventual stability", jones_levy),
        ("multitree", multitree),
        ("JSON determinism and round trip", determinism),
    ];
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        println!(
            "criterion {:>2} {}: {name}: {}",
            i + 1,
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
        if !o.pass {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
