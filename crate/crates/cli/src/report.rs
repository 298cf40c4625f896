//! Report values and their text and JSON renderings.
//!
//! JSON is `serde_json` pretty output of [`Report`] followed by a newline.
//! Every container is ordered, so equal reports render to identical bytes.

use std::fmt::Write;

use serde::{Deserialize, Serialize};

use arboreal::certificates::{
    ExperimentConfig, InfiniteReason, IrreducibilityMethod, LevelCertificate, Mode,
    StabilityCertificate, StabilityKind, StabilityOutcome, Status, SweepReport, Verdict,
    VerdictKind,
};
use arboreal::dynamics::{HeightInterval, PointClass};
use arboreal::kummer2::GalOrders;
use arboreal::multitree::{Admissibility, MultiVerdict, MultiVerdictKind};
use arboreal::qpoly::{rat_serde, PlaceWitness, Rat, RatFunc};
use arboreal::wreath::{LevelIndex, TreeAut};

/// Generators of one level of a tower, as read by `wreath`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct GroupFile {
    pub q: u32,
    pub depth: u32,
    pub generators: Vec<TreeAut>,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct OracleCase {
    pub c: RatFunc,
    pub beta: RatFunc,
    /// `None` when `beta - c` is a square and the oracle does not apply.
    pub orders: Option<GalOrders>,
    pub certified1: bool,
    pub certified2: bool,
    pub agrees: bool,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct ExperimentRow {
    pub n: u32,
    /// One count per target.
    pub count_v1: Vec<u64>,
    pub x_set: Option<u64>,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Report {
    Verdict {
        q: u64,
        c: RatFunc,
        beta: RatFunc,
        levels: u32,
        verdict: Verdict,
    },
    Stability {
        q: u64,
        c: RatFunc,
        beta: RatFunc,
        levels: u32,
        chain: Vec<Status>,
        outcome: StabilityOutcome,
    },
    Witness {
        q: u64,
        c: RatFunc,
        beta: RatFunc,
        level: u32,
        mode: Mode,
        witness: PlaceWitness,
    },
    Heights {
        q: u64,
        c: RatFunc,
        z: RatFunc,
        n: usize,
        /// Weil height of the `n`-th iterate.
        height: u64,
        interval: HeightInterval,
        class: PointClass,
    },
    Wreath {
        levels: Vec<LevelIndex>,
    },
    Oracle2 {
        seed: u64,
        cases: Vec<OracleCase>,
    },
    Multitree {
        levels: u32,
        verdict: MultiVerdict,
    },
    SweepGcd {
        q: u64,
        c1: RatFunc,
        alpha1: RatFunc,
        c2: RatFunc,
        alpha2: RatFunc,
        /// The last shell added nothing.
        stable: bool,
        sweep: SweepReport,
    },
    Jl {
        q: u64,
        #[serde(with = "rat_serde")]
        c: Rat,
        #[serde(with = "rat_serde")]
        beta: Rat,
        certificate: StabilityCertificate,
    },
    Experiments {
        q: u64,
        c: RatFunc,
        gamma: RatFunc,
        betas: Vec<RatFunc>,
        config: ExperimentConfig,
        /// Canonical height enclosure of `gamma`.
        height: HeightInterval,
        rows: Vec<ExperimentRow>,
    },
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        render(self, &mut out).expect("writing to a string");
        out
    }
}

fn show(z: &RatFunc) -> String {
    if z.den().is_one() {
        z.num().to_string()
    } else {
        z.to_string()
    }
}

fn status(s: Status) -> &'static str {
    match s {
        Status::Certified => "certified",
        Status::Unknown => "unknown",
    }
}

/// Witnesses past this degree are summarized; `--json` has them in full.
const SHOW_DEGREE: usize = 8;

fn witness(w: &PlaceWitness) -> String {
    let d = w.finite_part.deg();
    if w.is_empty() {
        "none".into()
    } else if d > SHOW_DEGREE {
        let inf = if w.includes_infinity {
            " + place at infinity"
        } else {
            ""
        };
        format!("roots of a degree-{d} polynomial{inf}")
    } else {
        w.to_string()
    }
}

fn reason(r: &InfiniteReason) -> String {
    match r {
        InfiniteReason::Periodic { period } => format!("basepoint is periodic of period {period}"),
        InfiniteReason::Postcritical { n } => format!("basepoint is postcritical, beta = f^{n}(0)"),
        InfiniteReason::PcfIsotrivial { preperiod, period } => {
            format!("constant PCF map, critical orbit preperiod {preperiod} and period {period}")
        }
    }
}

fn orbit(class: &PointClass) -> String {
    match class {
        PointClass::Periodic { period } => format!("periodic of period {period}"),
        PointClass::Preperiodic { tail, period } => {
            format!("preperiodic, tail {tail} and period {period}")
        }
        PointClass::Wandering { evidence } => format!(
            "wandering (escape criterion holds at iterate {})",
            evidence.iterate
        ),
        PointClass::Unknown { iterations } => format!("unknown after {iterations} iterations"),
    }
}

fn cites(out: &mut String, citations: &[String]) -> std::fmt::Result {
    for c in citations {
        writeln!(out, "    [{c}]")?;
    }
    Ok(())
}

fn level_line(out: &mut String, l: &LevelCertificate) -> std::fmt::Result {
    if l.split.is_empty() {
        let method = match l.irreducibility.method {
            IrreducibilityMethod::CapelliNorm => "Capelli norm",
            IrreducibilityMethod::NewtonPolygon => "Newton polygon",
        };
        writeln!(
            out,
            "  level {}: irreducibility {} ({method}), R-witness {}, saturation {}",
            l.level,
            status(l.irreducibility.status),
            witness(&l.witness()),
            status(l.saturation)
        )?;
    } else {
        writeln!(
            out,
            "  level {}: split basepoint, saturation {}",
            l.level,
            status(l.saturation)
        )?;
        for s in &l.split {
            writeln!(
                out,
                "    subtree over {} (depth {}, level {}): irreducibility {}, witness {}",
                show(&s.alpha),
                s.offset,
                s.level,
                status(s.irreducibility.status),
                witness(&s.witness)
            )?;
        }
    }
    cites(out, &l.citations)
}

fn render(r: &Report, out: &mut String) -> std::fmt::Result {
    match r {
        Report::Verdict {
            q,
            c,
            beta,
            levels,
            verdict,
        } => {
            writeln!(
                out,
                "f(x) = {}, beta = {}, levels 1..={levels}",
                poly_text(*q, &show(c)),
                show(beta)
            )?;
            match &verdict.verdict {
                VerdictKind::InfiniteIndex { reason: reason_ } => {
                    writeln!(out, "verdict: infinite index ({})", reason(reason_))?;
                }
                VerdictKind::FiniteIndexCertified {
                    run_start,
                    certified_through,
                    ..
                } => {
                    writeln!(out, "verdict: finite index certified (levels {run_start}..={certified_through} saturated)")?;
                }
                VerdictKind::SurjectiveCertified { through, .. } => {
                    writeln!(out, "verdict: surjective through level {through}")?;
                }
                VerdictKind::Unknown {
                    first_failing_level,
                    ..
                } => {
                    writeln!(
                        out,
                        "verdict: unknown (level {first_failing_level} not certified saturated)"
                    )?;
                }
            }
            cites(out, &verdict.citations)?;
            for l in verdict.levels() {
                level_line(out, l)?;
            }
        }
        Report::Stability {
            q,
            c,
            beta,
            chain,
            outcome,
            ..
        } => {
            writeln!(
                out,
                "f(x) = {}, beta = {}",
                poly_text(*q, &show(c)),
                show(beta)
            )?;
            let chain: Vec<&str> = chain.iter().map(|s| status(*s)).collect();
            writeln!(out, "Capelli chain: {}", chain.join(", "))?;
            match outcome {
                StabilityOutcome::Certified(cert) => stability(out, cert)?,
                StabilityOutcome::Unknown { chain_certified_through, specializations_tried } => writeln!(
                    out,
                    "eventual stability: unknown (chain certified through {chain_certified_through}, {specializations_tried} specializations tried)"
                )?,
            }
        }
        Report::Witness {
            q,
            c,
            beta,
            level,
            mode,
            witness: w,
        } => {
            writeln!(
                out,
                "f(x) = {}, beta = {}, level {level}",
                poly_text(*q, &show(c)),
                show(beta)
            )?;
            match mode {
                Mode::R => writeln!(out, "places satisfying Condition R: {}", witness(w))?,
                Mode::U => writeln!(out, "places failing Condition U: {}", witness(w))?,
            }
        }
        Report::Heights {
            q,
            c,
            z,
            n,
            height,
            interval,
            class,
        } => {
            writeln!(out, "f(x) = {}, z = {}", poly_text(*q, &show(c)), show(z))?;
            writeln!(out, "h(f^{n}(z)) = {height}")?;
            writeln!(
                out,
                "canonical height in [{}, {}] (width {})",
                interval.lower,
                interval.upper,
                interval.width()
            )?;
            writeln!(out, "orbit: {}", orbit(class))?;
        }
        Report::Wreath { levels } => {
            for l in levels {
                writeln!(
                    out,
                    "level {}: order {}, index {}, {}",
                    l.level,
                    l.order,
                    l.index,
                    if l.saturated {
                        "saturated"
                    } else {
                        "not saturated"
                    }
                )?;
            }
        }
        Report::Oracle2 { cases, .. } => {
            for k in cases {
                let orders = match k.orders {
                    Some(o) => format!("orders {}, {}", o.order1, o.order2),
                    None => "split first level".into(),
                };
                writeln!(
                    out,
                    "c = {}, beta = {}: {orders}; certified levels 1/2: {}/{}; {}",
                    show(&k.c),
                    show(&k.beta),
                    k.certified1,
                    k.certified2,
                    if k.agrees { "agree" } else { "DISAGREE" }
                )?;
            }
            let agree = cases.iter().filter(|k| k.agrees).count();
            writeln!(out, "{agree}/{} cases agree", cases.len())?;
        }
        Report::Multitree { verdict, .. } => multitree(out, verdict)?,
        Report::SweepGcd { sweep, stable, .. } => {
            for s in &sweep.shells {
                writeln!(
                    out,
                    "shell ({}, {}): common support degree {}{}",
                    s.m,
                    s.n,
                    s.degree,
                    if s.includes_infinity {
                        " + place at infinity"
                    } else {
                        ""
                    }
                )?;
            }
            writeln!(out, "common support: {}", witness(&sweep.witness))?;
            writeln!(
                out,
                "last shell {}",
                if *stable { "stable" } else { "grew" }
            )?;
        }
        Report::Jl {
            q,
            c,
            beta,
            certificate,
        } => {
            writeln!(
                out,
                "f(x) = {}, beta = {beta}",
                poly_text(*q, &c.to_string())
            )?;
            stability(out, certificate)?;
        }
        Report::Experiments {
            betas,
            height,
            rows,
            ..
        } => {
            writeln!(
                out,
                "canonical height of gamma in [{}, {}]",
                height.lower, height.upper
            )?;
            let names: Vec<String> = betas.iter().map(show).collect();
            writeln!(out, "targets: {}", names.join("; "))?;
            for row in rows {
                let counts: Vec<String> = row.count_v1.iter().map(u64::to_string).collect();
                write!(out, "n = {}: v = 1 places {}", row.n, counts.join(", "))?;
                match row.x_set {
                    Some(x) => writeln!(out, "; x-set {x}")?,
                    None => writeln!(out)?,
                }
            }
        }
    }
    Ok(())
}

fn stability(out: &mut String, cert: &StabilityCertificate) -> std::fmt::Result {
    match &cert.kind {
        StabilityKind::CapelliChain { levels } => {
            writeln!(out, "eventually stable: irreducible through level {levels}")?;
        }
        StabilityKind::ModP {
            prime,
            specialization,
            cycle_length,
            cycle,
            ..
        } => {
            if let Some(a) = specialization {
                writeln!(out, "specialization t = {a}")?;
            }
            writeln!(
                out,
                "eventually stable: backward orbit mod {prime} is the cycle {} (length {cycle_length})",
                cycle.join(" <- ")
            )?;
        }
    }
    cites(out, &cert.citations)
}

fn multitree(out: &mut String, v: &MultiVerdict) -> std::fmt::Result {
    for (i, e) in v.entries.iter().enumerate() {
        writeln!(
            out,
            "entry {i}: f(x) = {}, alpha = {}",
            poly_text(e.map.q(), &show(e.map.c())),
            show(&e.alpha)
        )?;
    }
    for p in &v.admissibility {
        let a = match &p.admissibility {
            Admissibility::Pass => "pass".to_string(),
            Admissibility::Fail { m, .. } => format!("fail (orbit relation at m = {m})"),
            Admissibility::Unknown { reason } => format!("unknown ({reason})"),
            Admissibility::HeuristicPass { stable, .. } => {
                format!(
                    "heuristic pass (sweep {})",
                    if *stable { "stable" } else { "still growing" }
                )
            }
        };
        writeln!(out, "pair ({}, {}): {a}", p.i, p.j)?;
    }
    match &v.verdict {
        MultiVerdictKind::RefusedInfiniteIndex { entry, reason: r } => {
            writeln!(
                out,
                "refused: entry {entry} has infinite index ({})",
                reason(r)
            )?;
        }
        MultiVerdictKind::RefusedAdmissibility { i, j, m, .. } => {
            writeln!(out, "refused: entries {i} and {j} are related by f^{m}")?;
        }
        MultiVerdictKind::Certified {
            run_start,
            certified_through,
            ..
        } => {
            writeln!(
                out,
                "verdict: product saturated at levels {run_start}..={certified_through}"
            )?;
        }
        MultiVerdictKind::Unknown {
            first_failing_level,
            ..
        } => {
            writeln!(
                out,
                "verdict: unknown (level {first_failing_level} not certified)"
            )?;
        }
    }
    cites(out, &v.citations)?;
    for l in v.levels() {
        writeln!(
            out,
            "  level {}: saturation {}",
            l.level,
            status(l.saturation)
        )?;
        for w in &l.witness_system {
            writeln!(
                out,
                "    entry {} subtree {} (depth {}): {}",
                w.entry,
                show(&w.alpha),
                w.offset,
                witness(&w.witness)
            )?;
        }
    }
    Ok(())
}

/// `x^q + c`, folding a leading sign of `c` into the operator.
fn poly_text(q: u64, c: &str) -> String {
    match c.strip_prefix('-') {
        Some(rest) => format!("x^{q} - {rest}"),
        None => format!("x^{q} + {c}"),
    }
}
