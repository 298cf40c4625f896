//! Command-line front end for the `arboreal` certificate library.
//!
//! [`run`] parses nothing itself; it takes a parsed [`Cli`], dispatches to the
//! library and returns the rendered report. Exit codes: 0 on success
//! (including `Unknown` outcomes), 2 for malformed input, 3 for input outside
//! an operation's scope, 4 when a resource cap is hit.

mod report;

use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use arboreal::certificates::{
    capelli_norm_stability, common_support_sweep, condition_witness, count_v1_places,
    finite_index_verdict, jl_eventual_stability, level_galois_certificate,
    stability_certificate_funcfield, x_set_size, ExperimentConfig, Mode, DEFAULT_LAMBDA_BOUND,
};
use arboreal::dynamics::{
    canonical_height_interval, classify_point, UnicriticalMap, DEFAULT_DEGREE_CAP, DEFAULT_MAX_ITER,
};
use arboreal::kummer2::gal_orders_level12;
use arboreal::multitree::{disjointness_verdict, MultiEntry, MultiSpec};
use arboreal::qpoly::{parse_ratfunc, Poly, Rat, RatFunc};
use arboreal::wreath::{saturation_sequence, GroupHandle, TreeAut, DEFAULT_POINT_CAP};
use arboreal::Error;

pub use report::{ExperimentRow, GroupFile, OracleCase, Report};

#[derive(Parser, Debug, Clone)]
#[command(
    name = "arboreal",
    version,
    about = "Certificates for iterated Galois groups of x^q + c over Q(t)"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Emit the report as JSON.
    #[arg(long, global = true)]
    pub json: bool,
    /// Seed for randomized sampling.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Iteration budget for orbit classification.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_ITER)]
    pub max_iter: usize,
    /// Largest polynomial degree any iterate may reach.
    #[arg(long, global = true, env = "ARBOREAL_DEGREE_CAP", default_value_t = DEFAULT_DEGREE_CAP)]
    pub degree_cap: usize,
    /// Largest number of leaves a permutation group may act on.
    #[arg(long, global = true, env = "ARBOREAL_POINT_CAP", default_value_t = DEFAULT_POINT_CAP)]
    pub point_cap: usize,
}

#[derive(Args, Debug, Clone)]
pub struct MapArgs {
    /// Degree of x^q + c; must be a prime power.
    #[arg(long, default_value_t = 2)]
    pub q: u64,
    /// Parameter c as an expression in t.
    #[arg(long, allow_hyphen_values = true)]
    pub c: String,
    /// Basepoint as an expression in t.
    #[arg(long, allow_hyphen_values = true)]
    pub beta: String,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum WitnessMode {
    R,
    U,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Finite-index verdict with per-level saturation certificates.
    Verdict {
        #[command(flatten)]
        map: MapArgs,
        #[arg(long, default_value_t = 6)]
        levels: u32,
    },
    /// Eventual stability: Capelli chain, else a mod-p specialization.
    Stability {
        #[command(flatten)]
        map: MapArgs,
        #[arg(long, default_value_t = 6)]
        levels: u32,
        /// Specializations t = u/v are tried with |u| + v up to this bound.
        #[arg(long, default_value_t = DEFAULT_LAMBDA_BOUND)]
        lambda_bound: u64,
    },
    /// Places satisfying Condition R, or failing Condition U.
    Witness {
        #[command(flatten)]
        map: MapArgs,
        #[arg(long)]
        level: u32,
        #[arg(long, value_enum, default_value_t = WitnessMode::R)]
        mode: WitnessMode,
    },
    /// Canonical height enclosure and orbit classification of a point.
    Heights {
        #[arg(long, default_value_t = 2)]
        q: u64,
        #[arg(long, allow_hyphen_values = true)]
        c: String,
        /// Point whose orbit is measured.
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        z: String,
        #[arg(long, default_value_t = 10)]
        n: usize,
    },
    /// Orders, indices and saturation of a tower of subgroups of [C_q]^n.
    Wreath {
        /// Generator files for consecutive levels, each a JSON object
        /// `{"q": .., "depth": .., "generators": [portrait, ...]}`.
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Brute-force level-1/2 Galois orders for q = 2 against the certificates.
    Oracle2 {
        #[arg(long, requires = "beta", allow_hyphen_values = true)]
        c: Option<String>,
        #[arg(long, requires = "c", allow_hyphen_values = true)]
        beta: Option<String>,
        /// Number of random polynomial pairs of degree at most 3 when no
        /// explicit pair is given.
        #[arg(long, default_value_t = 20)]
        samples: usize,
    },
    /// Simultaneous certificates for several trees.
    Multitree {
        #[arg(long, default_value_t = 2)]
        q: u64,
        /// Parameters, one per basepoint, or a single one shared by all.
        #[arg(long = "c", required = true, allow_hyphen_values = true)]
        cs: Vec<String>,
        #[arg(long = "alpha", required = true, allow_hyphen_values = true)]
        alphas: Vec<String>,
        #[arg(long, default_value_t = 5)]
        levels: u32,
    },
    /// Common support of two critical-gap sequences, shell by shell.
    SweepGcd {
        #[arg(long, default_value_t = 2)]
        q: u64,
        #[arg(long, allow_hyphen_values = true)]
        c1: String,
        #[arg(long, allow_hyphen_values = true)]
        alpha1: String,
        #[arg(long, allow_hyphen_values = true)]
        c2: String,
        #[arg(long, allow_hyphen_values = true)]
        alpha2: String,
        #[arg(long, default_value_t = 4)]
        shells: u32,
    },
    /// Mod-p eventual stability for x^q + c over Q.
    Jl {
        #[arg(long, default_value_t = 2)]
        q: u64,
        #[arg(long, allow_hyphen_values = true)]
        c: String,
        #[arg(long, allow_hyphen_values = true)]
        beta: String,
    },
    /// Place counts behind the height lemmas for the orbit of gamma.
    Experiments {
        #[arg(long, default_value_t = 2)]
        q: u64,
        #[arg(long, allow_hyphen_values = true)]
        c: String,
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        gamma: String,
        /// One or more targets; the first two also give the x-set count.
        #[arg(long = "beta", required = true, allow_hyphen_values = true)]
        betas: Vec<String>,
        #[arg(long, default_value_t = 8)]
        levels: u32,
        #[arg(long, default_value = "1/10")]
        delta: String,
        #[arg(long, default_value = "1/10")]
        epsilon: String,
    },
}

/// A failed run: the message for stderr and the process exit code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse { .. } | Error::ZeroDenominator => 2,
            Error::LimitExceeded(_)
            | Error::LevelTooDeep { .. }
            | Error::ClassificationUnknown(_) => 4,
            _ => 3,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: message.into(),
    }
}

fn expr(src: &str) -> Result<RatFunc, Failure> {
    Ok(parse_ratfunc(src)?)
}

fn rational(src: &str) -> Result<Rat, Failure> {
    expr(src)?.as_constant().ok_or_else(|| Failure {
        code: 3,
        message: format!("{src:?} is not a rational constant"),
    })
}

fn unicritical(cli: &Cli, q: u64, c: &str) -> Result<UnicriticalMap, Failure> {
    Ok(UnicriticalMap::new(q, expr(c)?)?.with_degree_cap(cli.degree_cap))
}

fn check_levels(n: u32) -> Result<(), Failure> {
    if n == 0 {
        return Err(usage("levels start at 1"));
    }
    Ok(())
}

/// Runs one command and renders its report.
pub fn run(cli: &Cli) -> Result<String, Failure> {
    let report = build_report(cli)?;
    Ok(if cli.json {
        report.to_json()
    } else {
        report.to_text()
    })
}

pub fn build_report(cli: &Cli) -> Result<Report, Failure> {
    Ok(match &cli.command {
        Command::Verdict { map, levels } => {
            check_levels(*levels)?;
            let f = unicritical(cli, map.q, &map.c)?;
            let beta = expr(&map.beta)?;
            let verdict = finite_index_verdict(&f, &beta, *levels)?;
            Report::Verdict {
                q: map.q,
                c: f.c().clone(),
                beta,
                levels: *levels,
                verdict,
            }
        }
        Command::Stability {
            map,
            levels,
            lambda_bound,
        } => {
            check_levels(*levels)?;
            let f = unicritical(cli, map.q, &map.c)?;
            let beta = expr(&map.beta)?;
            let chain = capelli_norm_stability(&f, &beta, *levels)?;
            let outcome = stability_certificate_funcfield(&f, &beta, *levels, *lambda_bound)?;
            Report::Stability {
                q: map.q,
                c: f.c().clone(),
                beta,
                levels: *levels,
                chain,
                outcome,
            }
        }
        Command::Witness { map, level, mode } => {
            check_levels(*level)?;
            let f = unicritical(cli, map.q, &map.c)?;
            let beta = expr(&map.beta)?;
            let mode = match mode {
                WitnessMode::R => Mode::R,
                WitnessMode::U => Mode::U,
            };
            let witness = condition_witness(&f, &beta, *level, mode)?;
            Report::Witness {
                q: map.q,
                c: f.c().clone(),
                beta,
                level: *level,
                mode,
                witness,
            }
        }
        Command::Heights { q, c, z, n } => {
            let f = unicritical(cli, *q, c)?;
            let z = expr(z)?;
            let interval = canonical_height_interval(&f, &z, *n)?;
            let class = classify_point(&f, &z, cli.max_iter);
            let height = f.iterate(&z, *n)?.weil_height();
            Report::Heights {
                q: *q,
                c: f.c().clone(),
                z,
                n: *n,
                height,
                interval,
                class,
            }
        }
        Command::Wreath { files } => {
            let mut tower = Vec::with_capacity(files.len());
            for path in files {
                let text = fs::read_to_string(path)
                    .map_err(|e| usage(format!("{}: {e}", path.display())))?;
                let file: GroupFile = serde_json::from_str(&text)
                    .map_err(|e| usage(format!("{}: {e}", path.display())))?;
                tower.push(
                    GroupHandle::new(file.q, file.depth, file.generators)?
                        .with_point_cap(cli.point_cap),
                );
            }
            Report::Wreath {
                levels: saturation_sequence(&tower)?,
            }
        }
        Command::Oracle2 { c, beta, samples } => {
            let pairs = match (c, beta) {
                (Some(c), Some(b)) => vec![(expr(c)?, expr(b)?)],
                _ => random_pairs(cli.seed, *samples),
            };
            let cases = pairs
                .into_iter()
                .map(|(c, beta)| oracle_case(cli, c, beta))
                .collect::<Result<Vec<_>, _>>()?;
            Report::Oracle2 {
                seed: cli.seed,
                cases,
            }
        }
        Command::Multitree {
            q,
            cs,
            alphas,
            levels,
        } => {
            check_levels(*levels)?;
            if cs.len() != 1 && cs.len() != alphas.len() {
                return Err(usage("give one --c per --alpha, or a single shared --c"));
            }
            let entries = alphas
                .iter()
                .enumerate()
                .map(|(i, a)| {
                    let c = if cs.len() == 1 { &cs[0] } else { &cs[i] };
                    Ok(MultiEntry {
                        map: unicritical(cli, *q, c)?,
                        alpha: expr(a)?,
                    })
                })
                .collect::<Result<Vec<_>, Failure>>()?;
            let spec = MultiSpec::new(entries)?;
            Report::Multitree {
                levels: *levels,
                verdict: disjointness_verdict(&spec, *levels)?,
            }
        }
        Command::SweepGcd {
            q,
            c1,
            alpha1,
            c2,
            alpha2,
            shells,
        } => {
            check_levels(*shells)?;
            let (f1, f2) = (unicritical(cli, *q, c1)?, unicritical(cli, *q, c2)?);
            let (a1, a2) = (expr(alpha1)?, expr(alpha2)?);
            let sweep = common_support_sweep(&f1, &a1, &f2, &a2, *shells, *shells)?;
            let k = sweep.shells.len();
            let stable = k >= 2 && sweep.stable_between(k - 1, k);
            Report::SweepGcd {
                q: *q,
                c1: f1.c().clone(),
                alpha1: a1,
                c2: f2.c().clone(),
                alpha2: a2,
                stable,
                sweep,
            }
        }
        Command::Jl { q, c, beta } => {
            let (c, beta) = (rational(c)?, rational(beta)?);
            let certificate = jl_eventual_stability(*q, &c, &beta)?;
            Report::Jl {
                q: *q,
                c,
                beta,
                certificate,
            }
        }
        Command::Experiments {
            q,
            c,
            gamma,
            betas,
            levels,
            delta,
            epsilon,
        } => {
            check_levels(*levels)?;
            let config = ExperimentConfig::new(
                *levels,
                format!("gamma = {gamma}"),
                rational(delta)?,
                rational(epsilon)?,
                *q,
            )?;
            experiments(cli, *q, c, gamma, betas, config)?
        }
    })
}

fn random_poly(rng: &mut ChaCha8Rng, min_deg: usize) -> RatFunc {
    let deg = rng.gen_range(min_deg..=3);
    let mut coeffs: Vec<i64> = (0..=deg).map(|_| rng.gen_range(-3..=3)).collect();
    if coeffs[deg] == 0 {
        coeffs[deg] = 1;
    }
    RatFunc::from_poly(Poly::from_i64s(&coeffs))
}

/// Random `(c, beta)` with `c` nonconstant, `beta - c` not a square in Q(t),
/// both of degree at most 3.
pub fn random_pairs(seed: u64, count: usize) -> Vec<(RatFunc, RatFunc)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let c = random_poly(&mut rng, 1);
        let beta = random_poly(&mut rng, 0);
        let d = &beta - &c;
        if !d.is_zero() && d.sqrt().is_none() {
            out.push((c, beta));
        }
    }
    out
}

fn oracle_case(cli: &Cli, c: RatFunc, beta: RatFunc) -> Result<OracleCase, Failure> {
    let orders = match gal_orders_level12(&c, &beta) {
        Ok(o) => Some(o),
        Err(Error::DegenerateTower) => None,
        Err(e) => return Err(e.into()),
    };
    let (certified1, certified2) = if c.is_constant() {
        (false, false)
    } else {
        let f = UnicriticalMap::new(2, c.clone())?.with_degree_cap(cli.degree_cap);
        let sat = |n| level_galois_certificate(&f, &beta, n).map(|l| l.saturation.is_certified());
        (sat(1)?, sat(2)?)
    };
    let agrees = match orders {
        Some(o) => (!certified1 || o.order1 == 2) && (!certified2 || o.order2 == 4),
        None => !certified1 && !certified2,
    };
    Ok(OracleCase {
        c,
        beta,
        orders,
        certified1,
        certified2,
        agrees,
    })
}

fn experiments(
    cli: &Cli,
    q: u64,
    c: &str,
    gamma: &str,
    betas: &[String],
    config: ExperimentConfig,
) -> Result<Report, Failure> {
    let f = unicritical(cli, q, c)?;
    let gamma = expr(gamma)?;
    let betas = betas
        .iter()
        .map(|b| expr(b))
        .collect::<Result<Vec<_>, _>>()?;
    let height = canonical_height_interval(&f, &gamma, config.n_max as usize)?;
    let mut rows = Vec::new();
    for n in 1..=config.n_max {
        let v1 = betas
            .iter()
            .map(|b| count_v1_places(&f, &gamma, b, n).map_err(Failure::from))
            .collect::<Result<Vec<_>, _>>()?;
        let x_set = match betas.as_slice() {
            [b1, b2, ..] if n >= 2 => Some(x_set_size(&f, &gamma, b1, b2, n)?),
            _ => None,
        };
        rows.push(ExperimentRow {
            n,
            count_v1: v1,
            x_set,
        });
    }
    Ok(Report::Experiments {
        q,
        c: f.c().clone(),
        gamma,
        betas,
        config,
        height,
        rows,
    })
}

/// Portrait generators for `[C_q]^n` as a generator file, for scripting.
pub fn full_group_file(q: u32, depth: u32) -> GroupFile {
    GroupFile {
        q,
        depth,
        generators: TreeAut::all_node_generators(q, depth),
    }
}
