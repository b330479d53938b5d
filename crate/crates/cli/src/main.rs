//! `lmph` — simulate random simplicial filtrations, compute their persistent
//! homology exactly, evaluate the matching closed-form limits, and run the
//! Monte Carlo experiments connecting the two.
//!
//! All randomness flows from `--seed` (default 42); identical invocations
//! produce byte-identical outputs. Exit codes: 0 success, 2 usage error,
//! 1 internal invariant violation (e.g. a rank disagreement between the two
//! working primes).

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use lmph_core::complex::sample_filtration;
use lmph_core::experiments::{
    mc_diagonal_mass, mc_diagram_distance, mc_observable, mc_persistent_betti, rank_experiment,
    tail_mass_experiment, Report, TrialConfig,
};
use lmph_core::gw::{census, gw_star_census, population_dynamics, CensusSide, PoolInit};
use lmph_core::limits::{
    beta_hat, fixed_points, fixed_points_general, lambda_qc, lambda_qc_curve, xi_hat_cdf,
    DegreeDistribution, LimitParams,
};
use lmph_core::linalg::{leaf_removal, rank_checked, tanner};
use lmph_core::observable::Observable;
use lmph_core::persistence::reduce_diagram;
use lmph_core::{io, Error};

#[derive(Parser)]
#[command(name = "lmph", version, about = "Random filtrations, exact persistence, and their limits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Init {
    Zeros,
    Ones,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Source {
    /// Tanner graph of a simulated window matrix
    Mn,
    /// Monte Carlo over branching trees
    Gw,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Experiment {
    /// persistent Betti numbers vs their limits
    Betti,
    /// weighted CDF-discrepancy statistic of empirical diagrams
    Distance,
    /// diagonal (zero-persistence) mass
    Diagonal,
    /// window-matrix rank vs its limit
    Rank,
    /// diagram observable vs the limit integral
    Observable,
    /// empirical tail mass above death thresholds
    Tail,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a filtration and write its dump and verbose diagram files.
    Simulate(SimulateArgs),
    /// Evaluate closed-form limit quantities.
    Limit(LimitArgs),
    /// Run a Monte Carlo experiment and report against theory.
    Compare(CompareArgs),
    /// Rank and leaf-removal peel of a matrix (from a file or simulated).
    Rank(RankArgs),
    /// Population dynamics estimates for the spectral atom at zero.
    Gw(GwArgs),
    /// Neighborhood-ball census of a Tanner graph or of branching trees.
    Census(CensusArgs),
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    n: u32,
    #[arg(long, default_value_t = 1)]
    k: u32,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Filtration dump destination
    #[arg(long, default_value = "filtration.txt")]
    out_filtration: String,
    /// Verbose diagram destination
    #[arg(long, default_value = "diagram.txt")]
    out_diagram: String,
}

#[derive(Args)]
struct LimitArgs {
    #[arg(long, default_value_t = 1)]
    k: u32,
    /// Window start; with --s selects the (q, c) = (exp(-r), s - r) family
    #[arg(long)]
    r: Option<f64>,
    /// Window end
    #[arg(long)]
    s: Option<f64>,
    /// Direct survival probability (alternative to --r/--s)
    #[arg(long)]
    q: Option<f64>,
    /// Direct intensity (alternative to --r/--s)
    #[arg(long)]
    c: Option<f64>,
    /// Write a CSV grid of beta_hat and the limit CDF up to this bound
    #[arg(long)]
    grid_out: Option<String>,
    #[arg(long, default_value_t = 5.0)]
    grid_max: f64,
    #[arg(long, default_value_t = 50)]
    grid_steps: u32,
}

#[derive(Args)]
struct CompareArgs {
    #[arg(long, value_enum)]
    experiment: Experiment,
    #[arg(long)]
    n: u32,
    #[arg(long, default_value_t = 1)]
    k: u32,
    #[arg(long, default_value_t = 20)]
    trials: u32,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Window starts (betti pairs the i-th r with the i-th s; rank takes exactly one)
    #[arg(long, value_delimiter = ',', default_value = "1.0")]
    r: Vec<f64>,
    /// Window ends
    #[arg(long, value_delimiter = ',', default_value = "2.0")]
    s: Vec<f64>,
    #[arg(long, default_value_t = 0.05)]
    tolerance: f64,
    /// Observable expression for --experiment observable
    #[arg(long, default_value = "s-r")]
    obs: String,
    /// Death thresholds for --experiment tail
    #[arg(long, value_delimiter = ',', default_value = "0,1,2,4,8")]
    u: Vec<f64>,
    /// Worker threads for the trials
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Also write one value per trial as CSV
    #[arg(long)]
    per_trial_csv: Option<String>,
}

#[derive(Args)]
struct RankArgs {
    /// Matrix file (`rows cols` header, then `r c v` triplets)
    #[arg(long, conflicts_with_all = ["n", "r", "s"])]
    input: Option<String>,
    /// Simulate the window matrix of a filtration instead
    #[arg(long)]
    n: Option<u32>,
    #[arg(long, default_value_t = 1)]
    k: u32,
    #[arg(long, default_value_t = 0.0)]
    r: f64,
    #[arg(long, default_value_t = 2.0)]
    s: f64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

#[derive(Args)]
struct GwArgs {
    #[arg(long, default_value_t = 1)]
    k: u32,
    /// Survival probability of the window family
    #[arg(long)]
    q: Option<f64>,
    /// Intensity of the window family
    #[arg(long)]
    c: Option<f64>,
    /// Head law, e.g. `pois:2`, `bin:3:0.5`, `dirac:2`, `pmf:0.2,0.5,0.3`
    #[arg(long, conflicts_with_all = ["q", "c"])]
    mu: Option<String>,
    /// Body law, same syntax as --mu
    #[arg(long, requires = "mu")]
    nu: Option<String>,
    #[arg(long, default_value_t = 100_000)]
    pool: usize,
    #[arg(long, default_value_t = 200)]
    iters: u32,
    #[arg(long, value_enum, default_value_t = Init::Zeros)]
    init: Init,
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

#[derive(Args)]
struct CensusArgs {
    #[arg(long, value_enum)]
    source: Source,
    #[arg(long)]
    n: Option<u32>,
    #[arg(long, default_value_t = 1)]
    k: u32,
    #[arg(long, default_value_t = 0.7)]
    r: f64,
    #[arg(long, default_value_t = 2.0)]
    s: f64,
    /// Tree count for --source gw
    #[arg(long, default_value_t = 100_000)]
    trees: u64,
    #[arg(long, default_value_t = 2)]
    radius: u32,
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

fn parse_distribution(spec: &str) -> Result<DegreeDistribution, Error> {
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.as_slice() {
        ["pois", l] => Ok(DegreeDistribution::Poisson(
            l.parse().map_err(|_| Error::Parse(format!("bad rate `{l}`")))?,
        )),
        ["bin", m, p] => Ok(DegreeDistribution::Binomial {
            trials: m.parse().map_err(|_| Error::Parse(format!("bad trial count `{m}`")))?,
            p: p.parse().map_err(|_| Error::Parse(format!("bad probability `{p}`")))?,
        }),
        ["dirac", m] => Ok(DegreeDistribution::Dirac(
            m.parse().map_err(|_| Error::Parse(format!("bad point `{m}`")))?,
        )),
        ["pmf", list] => {
            let pmf: Result<Vec<f64>, _> = list.split(',').map(str::parse).collect();
            DegreeDistribution::explicit(
                pmf.map_err(|_| Error::Parse(format!("bad pmf `{list}`")))?,
            )
        }
        _ => Err(Error::Parse(format!(
            "unknown distribution `{spec}` (want pois:L, bin:M:P, dirac:M, or pmf:p0,p1,..)"
        ))),
    }
}

fn emit_report(rep: &Report, format: Format, per_trial_csv: Option<&str>) -> Result<(), Error> {
    match format {
        Format::Json => println!("{}", rep.to_json()),
        Format::Text => print!("{}", rep.to_text()),
    }
    if let Some(path) = per_trial_csv {
        let mut w = BufWriter::new(File::create(path)?);
        w.write_all(rep.per_trial_csv().as_bytes())?;
    }
    Ok(())
}

fn run_simulate(a: SimulateArgs) -> Result<(), Error> {
    let f = sample_filtration(a.n, a.k, a.seed)?;
    let mut w = BufWriter::new(File::create(&a.out_filtration)?);
    io::write_filtration(&f, &mut w)?;
    w.flush()?;
    let d = reduce_diagram(&f);
    let mut w = BufWriter::new(File::create(&a.out_diagram)?);
    io::write_diagram(&d, &mut w)?;
    w.flush()?;
    println!(
        "{}",
        json!({
            "schema": 1,
            "n": a.n,
            "k": a.k,
            "seed": a.seed,
            "top_faces": f.top_times().len(),
            "normalizer": d.normalizer(),
            "atoms": d.atoms().len(),
            "diagonal_mass": d.diagonal_mass(),
            "filtration_file": a.out_filtration,
            "diagram_file": a.out_diagram,
        })
    );
    Ok(())
}

fn run_limit(a: LimitArgs) -> Result<(), Error> {
    if a.k < 1 {
        return Err(Error::InvalidParameters("k must be >= 1".into()));
    }
    let (r, s, q, c) = match (a.r, a.s, a.q, a.c) {
        (Some(r), Some(s), None, None) => {
            let p = LimitParams::from_window(a.k, r, s)?;
            (Some(r), Some(s), p.q, p.c)
        }
        (None, None, Some(q), Some(c)) => {
            if !(0.0 < q && q <= 1.0) || c < 0.0 {
                return Err(Error::InvalidParameters(format!(
                    "need q in (0, 1] and c >= 0, got q = {q}, c = {c}"
                )));
            }
            (None, None, q, c)
        }
        _ => {
            return Err(Error::InvalidParameters(
                "pass either --r and --s, or --q and --c".into(),
            ))
        }
    };
    let fp = fixed_points(a.k, q, c);
    let (bh, cdf) = match (r, s) {
        (Some(r), Some(s)) => (Some(beta_hat(a.k, r, s)), Some(xi_hat_cdf(a.k, r, s)?)),
        _ => (None, None),
    };
    println!(
        "{}",
        json!({
            "schema": 1,
            "k": a.k,
            "r": r,
            "s": s,
            "q": q,
            "c": c,
            "alpha": fp.alpha,
            "alpha_prime": fp.alpha_prime,
            "lambda": lambda_qc(a.k, q, c),
            "beta_hat": bh,
            "cdf": cdf,
        })
    );
    if let Some(path) = a.grid_out {
        if a.grid_steps == 0 || a.grid_max <= 0.0 {
            return Err(Error::InvalidParameters("grid needs positive size and steps".into()));
        }
        let mut w = BufWriter::new(File::create(path)?);
        writeln!(w, "r,s,beta_hat,cdf")?;
        for i in 0..=a.grid_steps {
            for j in 0..=a.grid_steps {
                let (gr, gs) = (
                    a.grid_max * i as f64 / a.grid_steps as f64,
                    a.grid_max * j as f64 / a.grid_steps as f64,
                );
                writeln!(
                    w,
                    "{gr},{gs},{},{}",
                    beta_hat(a.k, gr, gs),
                    xi_hat_cdf(a.k, gr, gs)?
                )?;
            }
        }
        w.flush()?;
    }
    Ok(())
}

fn run_compare(a: CompareArgs) -> Result<(), Error> {
    let cfg = TrialConfig {
        n: a.n,
        k: a.k,
        trials: a.trials,
        seed0: a.seed,
        r_list: a.r.clone(),
        s_list: a.s.clone(),
        tolerance: a.tolerance,
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(a.jobs.max(1))
        .build()
        .map_err(|e| Error::InvalidParameters(format!("thread pool: {e}")))?;
    let rep = pool.install(|| match a.experiment {
        Experiment::Betti => mc_persistent_betti(&cfg),
        Experiment::Distance => mc_diagram_distance(&cfg),
        Experiment::Diagonal => mc_diagonal_mass(&cfg),
        Experiment::Rank => rank_experiment(&cfg),
        Experiment::Observable => {
            let f_spec = Observable::parse(&a.obs)?;
            mc_observable(&cfg, &f_spec)
        }
        Experiment::Tail => tail_mass_experiment(&cfg, &a.u),
    })?;
    emit_report(&rep, a.format, a.per_trial_csv.as_deref())
}

fn run_rank(a: RankArgs) -> Result<(), Error> {
    let m = match (&a.input, a.n) {
        (Some(path), None) => io::read_matrix(BufReader::new(File::open(path)?))?,
        (None, Some(n)) => {
            let f = sample_filtration(n, a.k, a.seed)?;
            if a.s == 0.0 {
                f.coboundary_matrix(0.0, None)?
            } else {
                f.coboundary_matrix(a.s, Some(a.r))?
            }
        }
        _ => return Err(Error::InvalidParameters("pass --input or --n, not both".into())),
    };
    let rank = rank_checked(&m)?;
    let peel = leaf_removal(&m, None);
    let residual_rank = rank_checked(&peel.residual)?;
    let certificate_ok = peel.removed_rank + residual_rank == rank;
    if !certificate_ok {
        return Err(Error::PrimeDisagreement {
            p1: lmph_core::PRIME_PRIMARY,
            p2: lmph_core::PRIME_CONFIRM,
            r1: rank,
            r2: peel.removed_rank + residual_rank,
        });
    }
    let g = tanner(&m);
    println!(
        "{}",
        json!({
            "schema": 1,
            "rows": m.row_count(),
            "cols": m.col_count(),
            "rank": rank,
            "tanner_edges": (0..m.row_count()).map(|r| g.row_neighbors(r).len()).sum::<usize>(),
            "peel": {
                "rounds": peel.l_sets.len(),
                "removed_rank": peel.removed_rank,
                "l_final": peel.l_sets.last().map_or(0, |s| s.len()),
                "k_final": peel.k_sets.last().map_or(0, |s| s.len()),
                "residual_rows": peel.residual.row_count(),
                "residual_cols": peel.residual.col_count(),
                "residual_rank": residual_rank,
                "rank_upper_bound": peel.rank_upper_bound(),
                "certificate_ok": certificate_ok,
            },
            "transpose_bound": lmph_core::linalg::leaf_removal_transpose_bound(&m),
        })
    );
    Ok(())
}

fn run_gw(a: GwArgs) -> Result<(), Error> {
    let (mu, nu, family) = match (&a.mu, &a.nu, a.q, a.c) {
        (Some(mu), Some(nu), None, None) => {
            (parse_distribution(mu)?, parse_distribution(nu)?, None)
        }
        (None, None, Some(q), Some(c)) => {
            if !(0.0 < q && q <= 1.0) || c < 0.0 {
                return Err(Error::InvalidParameters(format!(
                    "need q in (0, 1] and c >= 0, got q = {q}, c = {c}"
                )));
            }
            (
                DegreeDistribution::Poisson(c),
                DegreeDistribution::Binomial { trials: a.k + 1, p: q },
                Some((q, c)),
            )
        }
        _ => {
            return Err(Error::InvalidParameters(
                "pass either --q and --c, or --mu and --nu".into(),
            ))
        }
    };
    let init = match a.init {
        Init::Zeros => PoolInit::Zeros,
        Init::Ones => PoolInit::Ones,
    };
    let rep = population_dynamics(&mu, &nu, a.pool, a.iters, init, a.seed)?;
    let fp = fixed_points_general(&mu, &nu)?;
    let lambda_at = |t: f64| match family {
        Some((q, c)) => lambda_qc_curve(a.k, q, c, t),
        None => lmph_core::limits::lambda_general(&mu, &nu, t).expect("t in [0, 1]"),
    };
    println!(
        "{}",
        json!({
            "schema": 1,
            "mu": format!("{mu:?}"),
            "nu": format!("{nu:?}"),
            "pool": a.pool,
            "iters": a.iters,
            "init": if init == PoolInit::Zeros { "zeros" } else { "ones" },
            "seed": a.seed,
            "t_est": rep.t_est,
            "eta_est": rep.eta_est,
            "alpha": fp.alpha,
            "alpha_prime": fp.alpha_prime,
            "lambda_at_alpha": lambda_at(fp.alpha),
            "lambda_at_alpha_prime": lambda_at(fp.alpha_prime),
        })
    );
    Ok(())
}

fn run_census(a: CensusArgs) -> Result<(), Error> {
    let counts = match a.source {
        Source::Mn => {
            let n = a.n.ok_or_else(|| {
                Error::InvalidParameters("--source mn needs --n".into())
            })?;
            let f = sample_filtration(n, a.k, a.seed)?;
            let m = f.coboundary_matrix(a.s, Some(a.r))?;
            census(&tanner(&m), CensusSide::Cols, a.radius)?
        }
        Source::Gw => {
            let q = (-a.r).exp();
            let c = a.s - a.r;
            if c < 0.0 {
                return Err(Error::InvalidParameters("need r <= s".into()));
            }
            gw_star_census(
                &DegreeDistribution::Poisson(c),
                &DegreeDistribution::Binomial { trials: a.k + 1, p: q },
                a.radius,
                a.trees,
                a.seed,
            )?
        }
    };
    for (key, freq) in counts.frequencies() {
        println!("{key} {freq}");
    }
    Ok(())
}

fn main() -> ExitCode {
    // die quietly when a downstream pipe closes (e.g. `lmph census | head`)
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate(a) => run_simulate(a),
        Command::Limit(a) => run_limit(a),
        Command::Compare(a) => run_compare(a),
        Command::Rank(a) => run_rank(a),
        Command::Gw(a) => run_gw(a),
        Command::Census(a) => run_census(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::PrimeDisagreement { .. } => ExitCode::from(1),
                _ => ExitCode::from(2),
            }
        }
    }
}
