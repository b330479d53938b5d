//! Monte Carlo harness tying the simulated filtrations to the closed-form
//! limits: persistent-Betti convergence, the weighted CDF-discrepancy
//! statistic, diagonal mass, rank experiments, observables, and tail
//! diagnostics.
//!
//! Trial `i` of a run draws its seed as `derive_seed(seed0, i)`, so every
//! report regenerates bit-identically from its configuration regardless of
//! how many worker threads execute the trials.

use rayon::prelude::*;
use serde::Serialize;

use crate::complex::{sample_filtration, LMFiltration};
use crate::limits::{
    self, beta_hat, diagonal_cdf, diagonal_density, diagonal_total, lambda_qc,
    promoting_expectation, xi_hat_cdf,
};
use crate::linalg::{leaf_removal_transpose_bound, rank_checked};
use crate::observable::Observable;
use crate::persistence::{persistent_betti, reduce_diagram, VerboseDiagram};
use crate::{binomial, derive_seed, Error, Result};

/// Shared experiment configuration.
#[derive(Debug, Clone, Serialize)]
pub struct TrialConfig {
    pub n: u32,
    pub k: u32,
    pub trials: u32,
    pub seed0: u64,
    pub r_list: Vec<f64>,
    pub s_list: Vec<f64>,
    /// Acceptance tolerance on `|mean - theory|` where a theory value exists.
    pub tolerance: f64,
}

impl TrialConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials < 1 {
            return Err(Error::InvalidParameters("need at least one trial".into()));
        }
        if self.r_list.is_empty() || self.s_list.is_empty() {
            return Err(Error::InvalidParameters("r/s lists must be nonempty".into()));
        }
        Ok(())
    }
}

/// One measured quantity of a report.
#[derive(Debug, Clone, Serialize)]
pub struct Entry {
    pub label: String,
    pub values: Vec<f64>,
    pub mean: f64,
    pub sd: f64,
    pub theory: Option<f64>,
    pub tolerance: Option<f64>,
    pub pass: Option<bool>,
}

impl Entry {
    fn new(label: String, values: Vec<f64>, theory: Option<f64>, tolerance: Option<f64>) -> Entry {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let sd = if values.len() > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        let pass = match (theory, tolerance) {
            (Some(t), Some(tol)) => Some((mean - t).abs() <= tol),
            _ => None,
        };
        Entry { label, values, mean, sd, theory, tolerance, pass }
    }
}

/// Machine- and human-readable experiment outcome.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema: u32,
    pub experiment: String,
    pub config: TrialConfig,
    pub entries: Vec<Entry>,
}

impl Report {
    fn new(experiment: &str, config: &TrialConfig, entries: Vec<Entry>) -> Report {
        Report { schema: 1, experiment: experiment.into(), config: config.clone(), entries }
    }

    /// All tolerance-bearing entries passed (vacuously true without any).
    pub fn passed(&self) -> bool {
        self.entries.iter().all(|e| e.pass != Some(false))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Aligned-column rendering.
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "experiment: {}  n={} k={} trials={} seed0={}\n",
            self.experiment, self.config.n, self.config.k, self.config.trials, self.config.seed0
        );
        out.push_str(&format!(
            "{:<28} {:>12} {:>12} {:>12} {:>8} {:>6}\n",
            "label", "mean", "sd", "theory", "tol", "pass"
        ));
        for e in &self.entries {
            out.push_str(&format!(
                "{:<28} {:>12.6} {:>12.6} {:>12} {:>8} {:>6}\n",
                e.label,
                e.mean,
                e.sd,
                e.theory.map_or("-".into(), |t| format!("{t:.6}")),
                e.tolerance.map_or("-".into(), |t| format!("{t}")),
                e.pass.map_or("-".into(), |p| if p { "yes".into() } else { "NO".to_string() }),
            ));
        }
        out
    }

    /// One `trial,label,value` row per trial per entry.
    pub fn per_trial_csv(&self) -> String {
        let mut out = String::from("trial,label,value\n");
        for e in &self.entries {
            for (i, v) in e.values.iter().enumerate() {
                out.push_str(&format!("{i},{},{v}\n", e.label));
            }
        }
        out
    }
}

fn run_trials<T: Send>(
    cfg: &TrialConfig,
    per_trial: impl Fn(&LMFiltration) -> Result<T> + Sync,
) -> Result<Vec<T>> {
    (0..cfg.trials)
        .into_par_iter()
        .map(|i| {
            let f = sample_filtration(cfg.n, cfg.k, derive_seed(cfg.seed0, i as u64))?;
            per_trial(&f)
        })
        .collect()
}

/// Normalized persistent Betti numbers at each `(r_list[i], s_list[i])` pair
/// against the limiting constants.
pub fn mc_persistent_betti(cfg: &TrialConfig) -> Result<Report> {
    cfg.validate()?;
    if cfg.r_list.len() != cfg.s_list.len() {
        return Err(Error::InvalidParameters(
            "betti experiment pairs r_list[i] with s_list[i]; lengths differ".into(),
        ));
    }
    let norm = binomial(cfg.n as u64, cfg.k as u64) as f64;
    let rows = run_trials(cfg, |f| {
        cfg.r_list
            .iter()
            .zip(&cfg.s_list)
            .map(|(&r, &s)| Ok(persistent_betti(f, r, s)? as f64 / norm))
            .collect::<Result<Vec<f64>>>()
    })?;
    let entries = cfg
        .r_list
        .iter()
        .zip(&cfg.s_list)
        .enumerate()
        .map(|(j, (&r, &s))| {
            let values: Vec<f64> = rows.iter().map(|row| row[j]).collect();
            Entry::new(
                format!("beta(r={r},s={s})/C(n,k)"),
                values,
                Some(beta_hat(cfg.k, r, s)),
                Some(cfg.tolerance),
            )
        })
        .collect();
    Ok(Report::new("mc_persistent_betti", cfg, entries))
}

/// Weighted sum of CDF discrepancies against the limit CDF over the fixed
/// half-integer enumeration, truncated at 40 terms (the tail weight is below
/// `2^-40`).
///
/// Pairs are enumerated diagonal by diagonal: `(0,0), (0,1/2), (1/2,0),
/// (0,1), (1/2,1/2), (1,0), ...`, the `i`-th carrying weight `2^-i`.
pub fn rho_statistic(k: u32, cdf: &dyn Fn(f64, f64) -> f64) -> Result<f64> {
    let mut acc = 0.0;
    let mut i = 0i32;
    'outer: for d in 0u32.. {
        for a in 0..=d {
            i += 1;
            if i > 40 {
                break 'outer;
            }
            let (r, s) = (a as f64 / 2.0, (d - a) as f64 / 2.0);
            acc += 2.0f64.powi(-i) * (cdf(r, s) - xi_hat_cdf(k, r, s)?).abs();
        }
    }
    Ok(acc)
}

/// Mean CDF-discrepancy statistic of the empirical verbose diagrams; the
/// interesting content is its decrease along growing `n`.
pub fn mc_diagram_distance(cfg: &TrialConfig) -> Result<Report> {
    cfg.validate()?;
    let values = run_trials(cfg, |f| {
        let d = reduce_diagram(f);
        rho_statistic(cfg.k, &|r, s| d.cdf(r, s))
    })?;
    let entries = vec![Entry::new("rho".into(), values, None, None)];
    Ok(Report::new("mc_diagram_distance", cfg, entries))
}

/// Diagonal (zero-persistence) mass per trial, checked three ways per trial
/// and compared to the exact finite-size expectation and the limit.
pub fn mc_diagonal_mass(cfg: &TrialConfig) -> Result<Report> {
    cfg.validate()?;
    let norm = binomial(cfg.n as u64 - 1, cfg.k as u64);
    let values = run_trials(cfg, |f| {
        let d = reduce_diagram(f);
        // the three counts behind the diagonal mass must agree exactly
        let from_diagram = d.diagonal_multiplicity();
        let from_promoting = f.promoting_count();
        let off: u64 = d.off_diagonal().atoms().iter().map(|a| a.2).sum();
        assert_eq!(from_diagram, from_promoting, "diagonal mass disagrees with promoting count");
        assert_eq!(from_diagram, norm - off, "diagonal mass disagrees with complement");
        Ok(from_diagram as f64 / norm as f64)
    })?;
    let finite_n = promoting_expectation(cfg.n, cfg.k)?;
    let entries = vec![
        Entry::new("diagonal_mass".into(), values.clone(), Some(finite_n), Some(cfg.tolerance)),
        Entry::new("diagonal_mass_vs_limit".into(), values, Some(diagonal_total(cfg.k)), None),
    ];
    Ok(Report::new("mc_diagonal_mass", cfg, entries))
}

/// Normalized rank of the window matrix against the limiting constant
/// `q (1 - lambda_{q,c})`, plus the row/column ratio and the peel-bound gap.
pub fn rank_experiment(cfg: &TrialConfig) -> Result<Report> {
    cfg.validate()?;
    if cfg.r_list.len() != 1 || cfg.s_list.len() != 1 {
        return Err(Error::InvalidParameters(
            "rank experiment takes a single (r, s) window".into(),
        ));
    }
    let (r, s) = (cfg.r_list[0], cfg.s_list[0]);
    if r < 0.0 || s < r {
        return Err(Error::InvalidParameters(format!("need 0 <= r <= s, got ({r}, {s})")));
    }
    let cols_norm = binomial(cfg.n as u64, cfg.k as u64) as f64;
    let rows = run_trials(cfg, |f| {
        let m = if s == 0.0 {
            f.coboundary_matrix(0.0, None)?
        } else {
            f.coboundary_matrix(s, Some(r))?
        };
        let rank = rank_checked(&m)? as f64;
        let ratio = m.row_count() as f64 / m.col_count().max(1) as f64;
        let gap = (leaf_removal_transpose_bound(&m) as f64 - rank) / cols_norm;
        Ok([rank / cols_norm, ratio, gap])
    })?;
    let q = (-r).exp();
    let c = s - r;
    let rank_theory = q * (1.0 - lambda_qc(cfg.k, q, c.max(0.0)));
    let ratio_theory = c / (q * (cfg.k as f64 + 1.0));
    let col = |j: usize| rows.iter().map(|v| v[j]).collect::<Vec<f64>>();
    let entries = vec![
        Entry::new(
            format!("rank(M({r},{s}))/C(n,k)"),
            col(0),
            Some(rank_theory),
            Some(cfg.tolerance),
        ),
        Entry::new("rows_per_cols".into(), col(1), Some(ratio_theory), None),
        Entry::new("peel_bound_gap".into(), col(2), None, None),
    ];
    Ok(Report::new("rank_experiment", cfg, entries))
}

/// Exact diagram integral of an observable per trial against the limit
/// integral.
pub fn mc_observable(cfg: &TrialConfig, f_spec: &Observable) -> Result<Report> {
    cfg.validate()?;
    let values = run_trials(cfg, |f| Ok(reduce_diagram(f).integrate(f_spec)))?;
    let theory = observable_integral_limit(cfg.k, f_spec)?;
    let entries = vec![Entry::new(
        "observable_integral".into(),
        values,
        Some(theory),
        Some(cfg.tolerance),
    )];
    Ok(Report::new("mc_observable", cfg, entries))
}

/// Exact integral of an observable against one empirical diagram.
pub fn observable_integral_diagram(d: &VerboseDiagram, f_spec: &Observable) -> f64 {
    d.integrate(f_spec)
}

/// Integral of an observable against the limiting verbose diagram.
///
/// The diagonal component integrates the closed-form diagonal density by
/// quadrature; the rest is a midpoint Stieltjes sum over dyadic grids of the
/// CDF with Richardson extrapolation, refined until successive extrapolated
/// estimates differ by less than `1e-4`. The integration box grows until the
/// remaining tail mass times a probe of `|f|` is below `1e-6`.
pub fn observable_integral_limit(k: u32, f_spec: &Observable) -> Result<f64> {
    let diag_part = limits::adaptive_simpson(
        &|x| f_spec.eval(x, x) * diagonal_density(k, x),
        0.0,
        40.0,
        1e-8,
    );

    let mut u = 16.0f64;
    loop {
        let tail = 1.0 - xi_hat_cdf(k, u, u)?;
        let probe = [
            f_spec.eval(0.0, u).abs(),
            f_spec.eval(u, u).abs(),
            f_spec.eval(0.0, 2.0 * u).abs(),
            f_spec.eval(2.0 * u, 2.0 * u).abs(),
            f_spec.eval(0.0, 4.0 * u).abs(),
            f_spec.eval(4.0 * u, 4.0 * u).abs(),
        ]
        .into_iter()
        .fold(1.0f64, f64::max);
        if tail * probe < 1e-6 || u >= 8192.0 {
            break;
        }
        u *= 2.0;
    }

    let mut prev_raw: Option<f64> = None;
    let mut prev_ext: Option<f64> = None;
    let mut best = None;
    for n in [64usize, 128, 256, 512] {
        let raw = off_diagonal_midpoint_sum(k, f_spec, u, n)?;
        if let Some(p) = prev_raw {
            let ext = raw + (raw - p) / 3.0;
            if let Some(pe) = prev_ext {
                if (ext - pe).abs() < 1e-4 {
                    best = Some(ext);
                    break;
                }
            }
            prev_ext = Some(ext);
        }
        prev_raw = Some(raw);
        best = prev_ext.or(prev_raw);
    }
    Ok(diag_part + best.expect("at least one refinement level ran"))
}

/// Midpoint Stieltjes sum of `f` against the off-diagonal part of the limit
/// measure on an `n x n` grid over `[0, u]^2`.
fn off_diagonal_midpoint_sum(k: u32, f_spec: &Observable, u: f64, n: usize) -> Result<f64> {
    let xs: Vec<f64> = (0..=n).map(|i| i as f64 * u / n as f64).collect();
    let table: Vec<Vec<f64>> = xs
        .par_iter()
        .map(|&r| xs.iter().map(|&s| xi_hat_cdf(k, r, s)).collect::<Result<Vec<f64>>>())
        .collect::<Result<Vec<_>>>()?;
    let dcdf: Vec<f64> = xs.iter().map(|&x| diagonal_cdf(k, x)).collect();
    let h = u / n as f64;
    let mut acc = 0.0;
    for i in 0..n {
        for j in i..n {
            let mass = table[i + 1][j + 1] - table[i][j + 1] - table[i + 1][j] + table[i][j];
            let off = if i == j { mass - (dcdf[i + 1] - dcdf[i]) } else { mass };
            if off <= 0.0 {
                continue;
            }
            let (r, s) = if i == j {
                (xs[i] + h / 3.0, xs[i] + 2.0 * h / 3.0)
            } else {
                (0.5 * (xs[i] + xs[i + 1]), 0.5 * (xs[j] + xs[j + 1]))
            };
            acc += off * f_spec.eval(r, s);
        }
    }
    Ok(acc)
}

/// Empirical mass above death time `u`, per `u` in the list; purely a decay
/// diagnostic, so no theory column is attached.
pub fn tail_mass_experiment(cfg: &TrialConfig, u_list: &[f64]) -> Result<Report> {
    cfg.validate()?;
    if u_list.is_empty() {
        return Err(Error::InvalidParameters("need at least one tail threshold".into()));
    }
    let rows = run_trials(cfg, |f| {
        let d = reduce_diagram(f);
        Ok(u_list.iter().map(|&u| d.tail_mass(u)).collect::<Vec<f64>>())
    })?;
    let entries = u_list
        .iter()
        .enumerate()
        .map(|(j, &u)| {
            Entry::new(
                format!("tail_mass(u={u})"),
                rows.iter().map(|r| r[j]).collect(),
                None,
                None,
            )
        })
        .collect();
    Ok(Report::new("tail_mass", cfg, entries))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_cfg(n: u32, k: u32, trials: u32, r: f64, s: f64, tol: f64) -> TrialConfig {
        TrialConfig { n, k, trials, seed0: 42, r_list: vec![r], s_list: vec![s], tolerance: tol }
    }

    #[test]
    fn betti_at_time_zero_is_exactly_zero() {
        let cfg = small_cfg(20, 1, 5, 0.0, 2.0, 1.0);
        let rep = mc_persistent_betti(&cfg).unwrap();
        assert!(rep.entries[0].values.iter().all(|&v| v == 0.0));
        assert_eq!(rep.entries[0].theory, Some(0.0));
    }

    #[test]
    fn reports_regenerate_identically() {
        let cfg = small_cfg(25, 1, 6, 1.0, 2.0, 0.5);
        let a = mc_persistent_betti(&cfg).unwrap().to_json();
        let b = mc_persistent_betti(&cfg).unwrap().to_json();
        assert_eq!(a, b);
    }

    #[test]
    fn rho_of_the_limit_is_zero_and_bounded() {
        let zero = rho_statistic(1, &|r, s| xi_hat_cdf(1, r, s).unwrap()).unwrap();
        assert_eq!(zero, 0.0);
        let one = rho_statistic(1, &|_, _| 1.0).unwrap();
        assert!(one <= 2.0);
    }

    #[test]
    fn diagram_distance_report_is_bounded() {
        let cfg = small_cfg(30, 1, 5, 0.0, 0.0, 1.0);
        let rep = mc_diagram_distance(&cfg).unwrap();
        assert!(rep.entries[0].values.iter().all(|&v| (0.0..=2.0).contains(&v)));
    }

    #[test]
    fn diagonal_mass_three_way_identity_and_tolerance() {
        let cfg = small_cfg(30, 1, 50, 0.0, 0.0, 0.05);
        let rep = mc_diagonal_mass(&cfg).unwrap();
        assert_eq!(rep.entries[0].pass, Some(true), "{}", rep.to_text());
    }

    #[test]
    fn rank_experiment_empty_window() {
        let cfg = small_cfg(30, 1, 3, 0.0, 0.0, 0.01);
        let rep = rank_experiment(&cfg).unwrap();
        assert!(rep.entries[0].values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn rank_experiment_small_run_matches_loosely() {
        let cfg = small_cfg(120, 1, 8, 0.0, 1.5, 0.08);
        let rep = rank_experiment(&cfg).unwrap();
        assert_eq!(rep.entries[0].pass, Some(true), "{}", rep.to_text());
        // peel gap is reported, never judged
        assert!(rep.entries[2].pass.is_none());
    }

    #[test]
    fn constant_observable_integrates_to_one() {
        let one = Observable::parse("1").unwrap();
        let cfg = small_cfg(15, 1, 4, 0.0, 0.0, 0.5);
        for i in 0..cfg.trials {
            let f = sample_filtration(cfg.n, cfg.k, derive_seed(cfg.seed0, i as u64)).unwrap();
            assert_eq!(reduce_diagram(&f).integrate(&one), 1.0);
        }
        assert!((observable_integral_limit(1, &one).unwrap() - 1.0).abs() < 2e-3);
    }

    #[test]
    fn lifetime_on_single_edge_is_zero() {
        let f = sample_filtration(2, 1, 9).unwrap();
        let life = Observable::parse("s-r").unwrap();
        assert_eq!(reduce_diagram(&f).integrate(&life), 0.0);
    }

    #[test]
    fn bounded_observable_integral_stays_in_range() {
        let f_spec = Observable::parse("exp(-1*s)").unwrap();
        let f = sample_filtration(25, 1, 3).unwrap();
        let v = reduce_diagram(&f).integrate(&f_spec);
        assert!(v > 0.0 && v < 1.0);
    }

    #[test]
    fn lifetime_limit_matches_one_dimensional_slice_formula() {
        // integral of (s - r) against the limit equals
        // integral_0^inf (lambda_{1,u} - exp(-u)) du
        let life = Observable::parse("s-r").unwrap();
        let two_d = observable_integral_limit(1, &life).unwrap();
        let one_d = limits::adaptive_simpson(
            &|x| lambda_qc(1, 1.0, x) - (-x).exp(),
            0.0,
            40.0,
            1e-9,
        );
        assert!((two_d - one_d).abs() < 2e-3, "{two_d} vs {one_d}");
    }

    #[test]
    fn tail_mass_endpoints_and_decay() {
        let cfg = small_cfg(25, 1, 6, 0.0, 0.0, 1.0);
        let us = [0.0, 2.0, 4.0, 25.0];
        let rep = tail_mass_experiment(&cfg, &us).unwrap();
        assert!(rep.entries[0].values.iter().all(|&v| v == 1.0));
        assert!(rep.entries[3].values.iter().all(|&v| v == 0.0));
        assert!(rep.entries[1].mean >= rep.entries[2].mean);
    }
}
