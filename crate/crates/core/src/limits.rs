//! Closed-form limits: generating functions, the nullity functional and its
//! fixed points, limiting persistent-Betti constants and diagram CDFs,
//! diagonal masses, and the homology-limit recovery for the classical
//! complete-skeleton model.
//!
//! Everything here is a deterministic real function of its parameters; the
//! Monte Carlo side of the crate converges to these values.

use std::cell::RefCell;
use std::collections::HashMap;

use rand::Rng;

use crate::{binomial, Error, Result};

/// Offspring law of a branching process; finite second moments throughout.
#[derive(Debug, Clone, PartialEq)]
pub enum DegreeDistribution {
    Poisson(f64),
    /// Binomial with `trials` trials and success probability `p`.
    Binomial { trials: u32, p: f64 },
    Dirac(u32),
    /// Finitely supported pmf `p[i] = P(X = i)`.
    Explicit(Vec<f64>),
}

use DegreeDistribution::*;

impl DegreeDistribution {
    pub fn explicit(pmf: Vec<f64>) -> Result<Self> {
        if pmf.is_empty() || pmf.iter().any(|&p| !(0.0..=1.0).contains(&p)) {
            return Err(Error::InvalidParameters("pmf entries must lie in [0, 1]".into()));
        }
        let total: f64 = pmf.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameters(format!(
                "pmf sums to {total}, not 1 within 1e-12"
            )));
        }
        Ok(Explicit(pmf))
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Poisson(l) if *l < 0.0 || !l.is_finite() => {
                Err(Error::InvalidParameters(format!("Poisson rate {l}")))
            }
            Binomial { p, .. } if !(0.0..=1.0).contains(p) => {
                Err(Error::InvalidParameters(format!("Binomial probability {p}")))
            }
            Explicit(pmf) => Self::explicit(pmf.clone()).map(|_| ()),
            _ => Ok(()),
        }
    }

    pub fn mean(&self) -> f64 {
        match self {
            Poisson(l) => *l,
            Binomial { trials, p } => *trials as f64 * p,
            Dirac(m) => *m as f64,
            Explicit(pmf) => pmf.iter().enumerate().map(|(i, p)| i as f64 * p).sum(),
        }
    }

    /// Probability generating function `sum_i p_i t^i` for `t` in `[0, 1]`.
    pub fn pgf(&self, t: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::Domain(format!("pgf argument {t} outside [0, 1]")));
        }
        Ok(self.pgf_unchecked(t))
    }

    fn pgf_unchecked(&self, t: f64) -> f64 {
        match self {
            Poisson(l) => (-l * (1.0 - t)).exp(),
            Binomial { trials, p } => (1.0 - p + p * t).powi(*trials as i32),
            Dirac(m) => t.powi(*m as i32),
            Explicit(pmf) => pmf.iter().rev().fold(0.0, |acc, &p| acc * t + p),
        }
    }

    /// The size-biased law `p'_i = (i + 1) p_{i+1} / mean`.
    ///
    /// Poisson is a fixed point; Binomial and Dirac drop one trial.
    pub fn size_bias(&self) -> Result<DegreeDistribution> {
        match self {
            Poisson(l) => Ok(Poisson(*l)),
            Binomial { trials, p } => {
                if *trials == 0 || *p == 0.0 {
                    return Err(Error::Domain("size bias of a zero-mean law".into()));
                }
                Ok(Binomial { trials: trials - 1, p: *p })
            }
            Dirac(m) => {
                if *m == 0 {
                    return Err(Error::Domain("size bias of a zero-mean law".into()));
                }
                Ok(Dirac(m - 1))
            }
            Explicit(pmf) => {
                let mean = self.mean();
                if mean <= 0.0 {
                    return Err(Error::Domain("size bias of a zero-mean law".into()));
                }
                let biased: Vec<f64> = (0..pmf.len().saturating_sub(1))
                    .map(|i| (i as f64 + 1.0) * pmf[i + 1] / mean)
                    .collect();
                Ok(Explicit(if biased.is_empty() { vec![1.0] } else { biased }))
            }
        }
    }

    /// Draws one value; deterministic given the generator state.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u32 {
        match self {
            Poisson(l) => {
                if *l == 0.0 {
                    0
                } else {
                    let d = rand_distr::Poisson::new(*l).expect("validated rate");
                    rand_distr::Distribution::sample(&d, rng) as u32
                }
            }
            Binomial { trials, p } => {
                if *p == 0.0 || *trials == 0 {
                    0
                } else {
                    let d = rand_distr::Binomial::new(*trials as u64, *p).expect("validated p");
                    rand_distr::Distribution::sample(&d, rng) as u32
                }
            }
            Dirac(m) => *m,
            Explicit(pmf) => {
                let u: f64 = rng.gen();
                let mut acc = 0.0;
                for (i, &p) in pmf.iter().enumerate() {
                    acc += p;
                    if u < acc {
                        return i as u32;
                    }
                }
                (pmf.len() - 1) as u32
            }
        }
    }
}

/// Validated parameter bundle for the window family: dimension `k`, survival
/// probability `q = exp(-r)`, intensity `c = s - r`.
#[derive(Debug, Clone, Copy)]
pub struct LimitParams {
    pub k: u32,
    pub q: f64,
    pub c: f64,
    pub r: f64,
    pub s: f64,
}

impl LimitParams {
    pub fn from_window(k: u32, r: f64, s: f64) -> Result<Self> {
        if k < 1 {
            return Err(Error::InvalidParameters("k must be >= 1".into()));
        }
        if r < 0.0 || s < 0.0 || !r.is_finite() || !s.is_finite() {
            return Err(Error::InvalidParameters(format!("need r, s >= 0, got ({r}, {s})")));
        }
        Ok(LimitParams { k, q: (-r).exp(), c: (s - r).max(0.0), r, s })
    }
}

/// The general nullity functional
/// `Lambda(t) = f(mu, 1 - f(nu', 1-t)) - (mu_bar/nu_bar) (1 - f(nu, 1-t) - nu_bar t f(nu', 1-t))`.
pub fn lambda_general(mu: &DegreeDistribution, nu: &DegreeDistribution, t: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::Domain(format!("t = {t} outside [0, 1]")));
    }
    let nu_bar = nu.mean();
    if nu_bar <= 0.0 {
        return Err(Error::Domain("nu must have positive mean".into()));
    }
    let mu_bar = mu.mean();
    let nu_b = nu.size_bias()?;
    let fnu_b = nu_b.pgf(1.0 - t)?;
    let head = mu.pgf(1.0 - fnu_b)?;
    Ok(head - mu_bar / nu_bar * (1.0 - nu.pgf(1.0 - t)? - nu_bar * t * fnu_b))
}

/// The window-family curve
/// `Lambda_{q,c}(t) = exp(-c (1-qt)^k) - c/(q(k+1)) (1 - (1-qt)^{k+1} - q(k+1) t (1-qt)^k)`.
pub fn lambda_qc_curve(k: u32, q: f64, c: f64, t: f64) -> f64 {
    debug_assert!(k >= 1 && (0.0 < q && q <= 1.0) && c >= 0.0 && (0.0..=1.0).contains(&t));
    let kp1 = k as f64 + 1.0;
    let u = 1.0 - q * t;
    let uk = u.powi(k as i32);
    (-c * uk).exp() - c / (q * kp1) * (1.0 - u * uk - q * kp1 * t * uk)
}

/// Fixed-point residual `phi_c(t) = exp(-c (1-qt)^k) - t`, the sign of the
/// curve's derivative.
pub fn phi_qc(k: u32, q: f64, c: f64, t: f64) -> f64 {
    (-c * (1.0 - q * t).powi(k as i32)).exp() - t
}

/// First-order surrogate of the curve obtained by linearizing the
/// exponential; within `c^2` of it uniformly, and maximized at `t = 1`.
pub fn lambda_qc_linearized(k: u32, q: f64, c: f64, t: f64) -> f64 {
    let kp1 = k as f64 + 1.0;
    let u = 1.0 - q * t;
    let uk = u.powi(k as i32);
    1.0 - c * uk - c / (q * kp1) * (1.0 - u * uk - q * kp1 * t * uk)
}

/// All solutions of a scalar fixed-point equation in `[0, 1]`.
#[derive(Debug, Clone)]
pub struct FixedPointReport {
    /// Sorted, deduplicated roots.
    pub roots: Vec<f64>,
    /// Residual of the defining equation at each root.
    pub residuals: Vec<f64>,
    /// Smallest root.
    pub alpha: f64,
    /// Largest root.
    pub alpha_prime: f64,
}

const ROOT_GRID: usize = 10_000;
const ROOT_TOL: f64 = 1e-13;
const ROOT_DEDUPE: f64 = 1e-9;

/// Roots of `g` in `[0, 1]` by sign-change bracketing on a uniform grid,
/// refined by bisection.
fn unit_interval_roots(g: &dyn Fn(f64) -> f64, force_one: bool) -> Vec<f64> {
    let h = 1.0 / ROOT_GRID as f64;
    let mut roots = Vec::new();
    let mut prev_t = 0.0;
    let mut prev_v = g(0.0);
    if prev_v == 0.0 {
        roots.push(0.0);
    }
    for i in 1..=ROOT_GRID {
        let t = i as f64 * h;
        let v = g(t);
        if v == 0.0 {
            roots.push(t);
        } else if prev_v != 0.0 && (prev_v < 0.0) != (v < 0.0) {
            let (mut a, mut b) = (prev_t, t);
            let mut va = prev_v;
            while b - a > ROOT_TOL {
                let mid = 0.5 * (a + b);
                let vm = g(mid);
                if vm == 0.0 {
                    a = mid;
                    break;
                }
                if (va < 0.0) != (vm < 0.0) {
                    b = mid;
                } else {
                    a = mid;
                    va = vm;
                }
            }
            roots.push(0.5 * (a + b));
        }
        prev_t = t;
        prev_v = v;
    }
    if force_one {
        roots.push(1.0);
    }
    roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    roots.dedup_by(|a, b| (*a - *b).abs() <= ROOT_DEDUPE);
    roots
}

/// Fixed points of `t = exp(-c (1-qt)^k)` in `[0, 1]`.
///
/// For `q = 1` the root `t = 1` holds identically and is inserted outright.
pub fn fixed_points(k: u32, q: f64, c: f64) -> FixedPointReport {
    let g = move |t: f64| phi_qc(k, q, c, t);
    let roots = unit_interval_roots(&g, q == 1.0);
    let residuals = roots.iter().map(|&t| g(t)).collect();
    let alpha = roots[0];
    let alpha_prime = *roots.last().unwrap();
    FixedPointReport { roots, residuals, alpha, alpha_prime }
}

/// Fixed points of `t = f(mu', 1 - f(nu', 1-t))` in `[0, 1]`.
pub fn fixed_points_general(
    mu: &DegreeDistribution,
    nu: &DegreeDistribution,
) -> Result<FixedPointReport> {
    let mu_b = mu.size_bias().or_else(|_| match mu {
        // zero-rate Poisson still self-biases
        Poisson(l) if *l == 0.0 => Ok(Poisson(0.0)),
        _ => Err(Error::Domain("size bias of a zero-mean law".into())),
    })?;
    let nu_b = nu.size_bias()?;
    let g = move |t: f64| {
        mu_b.pgf_unchecked(1.0 - nu_b.pgf_unchecked(1.0 - t)) - t
    };
    let roots = unit_interval_roots(&g, false);
    if roots.is_empty() {
        // continuity of g with g(0) >= 0, g(1) <= 0 guarantees a root; only
        // an exact-zero dedupe artifact could empty the list
        return Err(Error::Domain("no fixed point found in [0, 1]".into()));
    }
    let residuals = roots.iter().map(|&t| g(t)).collect();
    let alpha = roots[0];
    let alpha_prime = *roots.last().unwrap();
    Ok(FixedPointReport { roots, residuals, alpha, alpha_prime })
}

/// `lambda_{q,c} = max_{t in [0,1]} Lambda_{q,c}(t)`, evaluated at the
/// extreme fixed points. Thread-locally memoized; the diagram-CDF surface
/// evaluates this at many repeated arguments.
pub fn lambda_qc(k: u32, q: f64, c: f64) -> f64 {
    if c == 0.0 {
        return 1.0;
    }
    thread_local! {
        static CACHE: RefCell<HashMap<(u32, u64, u64), f64>> = RefCell::new(HashMap::new());
    }
    let key = (k, q.to_bits(), c.to_bits());
    if let Some(v) = CACHE.with(|c| c.borrow().get(&key).copied()) {
        return v;
    }
    let fp = fixed_points(k, q, c);
    let v = lambda_qc_curve(k, q, c, fp.alpha).max(lambda_qc_curve(k, q, c, fp.alpha_prime));
    CACHE.with(|c| {
        let mut map = c.borrow_mut();
        if map.len() > 1 << 20 {
            map.clear();
        }
        map.insert(key, v);
    });
    v
}

/// Global maximum of `f` on `[0, 1]`: dense grid, then golden-section
/// refinement around every grid-local maximum. Independent of any
/// fixed-point reasoning; used to cross-check [`lambda_qc`].
pub fn max_on_unit_interval(f: &dyn Fn(f64) -> f64, grid: usize) -> f64 {
    let h = 1.0 / grid as f64;
    let vals: Vec<f64> = (0..=grid).map(|i| f(i as f64 * h)).collect();
    let mut best = f64::NEG_INFINITY;
    let golden = |mut a: f64, mut b: f64| -> f64 {
        let inv_phi = 0.618_033_988_749_894_9;
        let mut c = b - inv_phi * (b - a);
        let mut d = a + inv_phi * (b - a);
        let (mut fc, mut fd) = (f(c), f(d));
        while b - a > 1e-13 {
            if fc > fd {
                b = d;
                d = c;
                fd = fc;
                c = b - inv_phi * (b - a);
                fc = f(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + inv_phi * (b - a);
                fd = f(d);
            }
        }
        f(0.5 * (a + b))
    };
    for i in 0..=grid {
        let here = vals[i];
        let left = if i > 0 { vals[i - 1] } else { f64::NEG_INFINITY };
        let right = if i < grid { vals[i + 1] } else { f64::NEG_INFINITY };
        if here >= left && here >= right {
            let a = if i > 0 { (i - 1) as f64 * h } else { 0.0 };
            let b = if i < grid { (i + 1) as f64 * h } else { 1.0 };
            best = best.max(here).max(golden(a, b));
        }
    }
    best
}

/// Limiting normalized persistent Betti number.
///
/// `beta_hat(k, r, s) = lambda_{1,s} - exp(-r) lambda_{exp(-r), s-r}` for
/// `r < s`, and `lambda_{1,s} - exp(-r)` for `r >= s` (the two branches agree
/// at the seam since `lambda_{q,0} = 1`).
pub fn beta_hat(k: u32, r: f64, s: f64) -> f64 {
    debug_assert!(r >= 0.0 && s >= 0.0);
    let q = (-r).exp();
    if r < s {
        lambda_qc(k, 1.0, s) - q * lambda_qc(k, q, s - r)
    } else {
        lambda_qc(k, 1.0, s) - q
    }
}

/// CDF of the limiting verbose diagram: `f(r, s) = 1 - exp(-r) - beta_hat`.
///
/// Numerical noise below `1e-9` outside `[0, 1]` is clamped; anything larger
/// aborts.
pub fn xi_hat_cdf(k: u32, r: f64, s: f64) -> Result<f64> {
    if r < 0.0 || s < 0.0 {
        return Err(Error::Domain(format!("need r, s >= 0, got ({r}, {s})")));
    }
    let v = 1.0 - (-r).exp() - beta_hat(k, r, s);
    if !(-1e-9..=1.0 + 1e-9).contains(&v) {
        return Err(Error::Domain(format!("CDF value {v} escapes [0, 1] at ({r}, {s})")));
    }
    Ok(v.clamp(0.0, 1.0))
}

/// Density of the limiting diagram on the diagonal:
/// `(1 - (1 - exp(-x))^{k+1}) / (k + 1)`.
pub fn diagonal_density(k: u32, x: f64) -> f64 {
    (1.0 - (1.0 - (-x).exp()).powi(k as i32 + 1)) / (k as f64 + 1.0)
}

/// Adaptive Simpson quadrature with absolute tolerance.
pub(crate) fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(f: &dyn Fn(f64) -> f64, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        (m, fm, (b - a) / 6.0 * (fa + 4.0 * fm + fb))
    }
    #[allow(clippy::too_many_arguments)]
    fn rec(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        m: f64,
        fm: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let (lm, flm, left) = simpson(f, a, fa, m, fm);
        let (rm, frm, right) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            rec(f, a, fa, m, fm, lm, flm, left, tol / 2.0, depth - 1)
                + rec(f, m, fm, b, fb, rm, frm, right, tol / 2.0, depth - 1)
        }
    }
    let (fa, fb) = (f(a), f(b));
    let (m, fm, whole) = simpson(f, a, fa, b, fb);
    rec(f, a, fa, b, fb, m, fm, whole, tol, 60)
}

/// Mass of the limiting diagram on the diagonal segment over `(a, b]`, by
/// quadrature of [`diagonal_density`] to `1e-10`. An infinite `b` is
/// truncated where the density falls below `1e-14`.
pub fn diagonal_mass(k: u32, a: f64, b: f64) -> Result<f64> {
    if a < 0.0 || b < a {
        return Err(Error::Domain(format!("need 0 <= a < b, got ({a}, {b})")));
    }
    let upper = if b.is_finite() { b } else { a.max(40.0) };
    Ok(adaptive_simpson(&|x| diagonal_density(k, x), a, upper, 1e-10))
}

/// Closed form of the diagonal CDF `integral_0^x` of the density.
pub(crate) fn diagonal_cdf(k: u32, x: f64) -> f64 {
    let kp1 = k as u64 + 1;
    let mut acc = 0.0;
    for j in 1..=kp1 {
        let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
        acc += sign * binomial(kp1, j) as f64 * (1.0 - (-(j as f64) * x).exp()) / j as f64;
    }
    acc / kp1 as f64
}

/// Total diagonal mass `(1/(k+1)) sum_{j=1}^{k+1} 1/j`.
pub fn diagonal_total(k: u32) -> f64 {
    (1..=k as u64 + 1).map(|j| 1.0 / j as f64).sum::<f64>() / (k as f64 + 1.0)
}

/// Finite-`n` expected diagonal mass:
/// `(1/(k+1)) integral_0^n [1 - (1 - (1 - x/n)^{n-k-1})^{k+1}] dx`,
/// already normalized by the cycle count.
pub fn promoting_expectation(n: u32, k: u32) -> Result<f64> {
    if n < k + 1 {
        return Err(Error::InvalidParameters(format!("need n >= k + 1, got n = {n}, k = {k}")));
    }
    let e = (n - k - 1) as i32;
    let nf = n as f64;
    let g = move |x: f64| 1.0 - (1.0 - (1.0 - x / nf).powi(e)).powi(k as i32 + 1);
    Ok(adaptive_simpson(&g, 0.0, nf, 1e-10) / (k as f64 + 1.0))
}

/// Limiting normalized top homology of the complete-skeleton model:
/// the maximum over fixed points of
/// `c t (1-t)^k + c/(k+1) (1-t)^{k+1} - (1-t)`.
pub fn lp_betti_limit(k: u32, c: f64) -> f64 {
    debug_assert!(c >= 0.0);
    if c == 0.0 {
        return 0.0;
    }
    let fp = fixed_points(k, 1.0, c);
    let g = |t: f64| {
        let u = 1.0 - t;
        let uk = u.powi(k as i32);
        c * t * uk + c / (k as f64 + 1.0) * u * uk - u
    };
    fp.roots.iter().map(|&t| g(t)).fold(f64::NEG_INFINITY, f64::max)
}

/// Smallest intensity at which [`lp_betti_limit`] leaves zero, located by
/// bisection on `c` to `1e-9`.
pub fn lp_critical(k: u32) -> f64 {
    let positive = |c: f64| lp_betti_limit(k, c) > 1e-12;
    let mut hi = 1.0;
    while !positive(hi) {
        hi *= 2.0;
        assert!(hi < 1e6, "no supercritical regime found");
    }
    let mut lo = hi / 2.0;
    while hi - lo > 1e-9 {
        let mid = 0.5 * (lo + hi);
        if positive(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Asymptotic normalized rank deficit for a matrix whose Tanner graph looks
/// locally like the two-law branching tree.
#[derive(Debug, Clone)]
pub struct RankLimitReport {
    /// `1 - max(Lambda(alpha), Lambda(alpha'))`, the limiting rank per column.
    pub value: f64,
    pub alpha: f64,
    pub alpha_prime: f64,
    /// `max(Lambda(alpha), Lambda(alpha'))`.
    pub lambda: f64,
    /// Whether a dense grid confirmed that the global maximum of `Lambda` is
    /// attained at one of the extreme fixed points (within `1e-9`).
    pub hypothesis_ok: bool,
}

pub fn rank_limit(mu: &DegreeDistribution, nu: &DegreeDistribution) -> Result<RankLimitReport> {
    mu.validate()?;
    nu.validate()?;
    if nu.mean() <= 0.0 {
        return Err(Error::Domain("nu must have positive mean".into()));
    }
    let fp = fixed_points_general(mu, nu)?;
    let lam = |t: f64| lambda_general(mu, nu, t).expect("t in [0, 1]");
    let lambda = lam(fp.alpha).max(lam(fp.alpha_prime));
    let grid_max = max_on_unit_interval(&|t| lam(t), 4000);
    let hypothesis_ok = grid_max <= lambda + 1e-9;
    Ok(RankLimitReport {
        value: 1.0 - lambda,
        alpha: fp.alpha,
        alpha_prime: fp.alpha_prime,
        lambda,
        hypothesis_ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pgf_closed_forms() {
        assert!((Poisson(2.0).pgf(1.0).unwrap() - 1.0).abs() < 1e-15);
        let b = Binomial { trials: 3, p: 0.25 };
        assert!((b.pgf(0.4).unwrap() - (0.75 + 0.25 * 0.4f64).powi(3)).abs() < 1e-15);
        assert!((Dirac(4).pgf(0.5).unwrap() - 0.0625).abs() < 1e-15);
        assert!(Poisson(1.0).pgf(1.5).is_err());
    }

    #[test]
    fn explicit_pgf_tracks_truncated_poisson() {
        // truncated Poisson(2) pmf, tail mass ~ 1e-23
        let mut pmf = Vec::new();
        let mut term = (-2.0f64).exp();
        for i in 0..=30 {
            pmf.push(term);
            term *= 2.0 / (i as f64 + 1.0);
        }
        let tail: f64 = 1.0 - pmf.iter().sum::<f64>();
        *pmf.last_mut().unwrap() += tail;
        let d = DegreeDistribution::explicit(pmf).unwrap();
        assert!((d.pgf(0.5).unwrap() - (-1.0f64).exp()).abs() < 1e-9);
        assert!((d.mean() - 2.0).abs() < 1e-9);
    }

    #[test]
    fn size_bias_rules() {
        assert_eq!(Poisson(1.5).size_bias().unwrap(), Poisson(1.5));
        assert_eq!(
            (Binomial { trials: 3, p: 0.4 }).size_bias().unwrap(),
            Binomial { trials: 2, p: 0.4 }
        );
        assert_eq!(Dirac(3).size_bias().unwrap(), Dirac(2));
        assert!(Dirac(0).size_bias().is_err());
    }

    #[test]
    fn explicit_size_bias_matches_closed_form() {
        // Binomial(3, 0.4) written out explicitly must bias to Binomial(2, 0.4)
        let q: f64 = 0.4;
        let pmf: Vec<f64> =
            (0..=3).map(|i| binomial(3, i) as f64 * q.powi(i as i32) * (1.0 - q).powi(3 - i as i32)).collect();
        let biased = DegreeDistribution::explicit(pmf).unwrap().size_bias().unwrap();
        let expect = Binomial { trials: 2, p: q };
        for t in [0.0, 0.3, 0.7, 1.0] {
            assert!((biased.pgf(t).unwrap() - expect.pgf(t).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn lambda_general_specializes_to_window_curve() {
        for k in 1..=3u32 {
            for &q in &[0.2, 0.5, 0.8, 1.0] {
                for &c in &[0.1, 1.0, 3.0, 6.0] {
                    let mu = Poisson(c);
                    let nu = Binomial { trials: k + 1, p: q };
                    for i in 0..=10 {
                        let t = i as f64 / 10.0;
                        let general = lambda_general(&mu, &nu, t).unwrap();
                        let special = lambda_qc_curve(k, q, c, t);
                        assert!(
                            (general - special).abs() <= 1e-12,
                            "k={k} q={q} c={c} t={t}: {general} vs {special}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn lambda_curve_endpoint_values() {
        // at t = 0 only the head term survives
        assert!((lambda_qc_curve(2, 0.7, 1.3, 0.0) - (-1.3f64).exp()).abs() < 1e-15);
        // c = 0 flattens the curve to 1
        for i in 0..=10 {
            assert_eq!(lambda_qc_curve(1, 0.5, 0.0, i as f64 / 10.0), 1.0);
        }
        // q = 1, t = 1 collapses to 1 - c/(k+1)
        for k in 1..=3u32 {
            let c = 2.5;
            assert!(
                (lambda_qc_curve(k, 1.0, c, 1.0) - (1.0 - c / (k as f64 + 1.0))).abs() < 1e-12
            );
        }
    }

    #[test]
    fn curve_derivative_matches_closed_form() {
        // d/dt Lambda = c k q (1-qt)^{k-1} (exp(-c(1-qt)^k) - t)
        let mut rng_state = 123456789u64;
        let mut next = || {
            rng_state = rng_state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (rng_state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..20 {
            let k = 1 + (next() * 3.0) as u32;
            let q = 0.2 + 0.8 * next();
            let c = 0.2 + 5.0 * next();
            let t = 0.05 + 0.9 * next();
            let h = 1e-6;
            let numeric =
                (lambda_qc_curve(k, q, c, t + h) - lambda_qc_curve(k, q, c, t - h)) / (2.0 * h);
            let closed = c * k as f64 * q * (1.0 - q * t).powi(k as i32 - 1) * phi_qc(k, q, c, t);
            let scale = closed.abs().max(1e-3);
            assert!((numeric - closed).abs() / scale < 1e-6, "k={k} q={q} c={c} t={t}");
        }
    }

    #[test]
    fn subcritical_unique_fixed_point() {
        let fp = fixed_points(1, 1.0, 0.5);
        assert_eq!(fp.roots.len(), 1);
        assert_eq!(fp.alpha, 1.0);
        assert_eq!(fp.alpha_prime, 1.0);
    }

    #[test]
    fn supercritical_fixed_points_k1() {
        // at q = 1, c = 4 the residual has a small root and the trivial root 1
        let fp = fixed_points(1, 1.0, 4.0);
        assert_eq!(fp.roots.len(), 2);
        assert!(fp.alpha < 0.2);
        assert_eq!(fp.alpha_prime, 1.0);
        for (&t, &res) in fp.roots.iter().zip(&fp.residuals) {
            assert!(res.abs() <= 1e-12, "root {t} residual {res}");
        }
    }

    #[test]
    fn three_fixed_points_k2() {
        let fp = fixed_points(2, 1.0, 4.0);
        assert_eq!(fp.roots.len(), 3);
        assert!(fp.alpha < 0.1 && fp.alpha_prime == 1.0);
    }

    #[test]
    fn fixed_point_residuals_small_on_parameter_grid() {
        for k in 1..=3 {
            for &q in &[0.2, 0.4, 0.6, 0.8, 1.0] {
                for &c in &[0.1, 0.5, 1.0, 2.0, 4.0, 6.0] {
                    let fp = fixed_points(k, q, c);
                    for (&t, &res) in fp.roots.iter().zip(&fp.residuals) {
                        assert!(res.abs() <= 1e-12, "k={k} q={q} c={c} root={t} res={res}");
                    }
                }
            }
        }
    }

    #[test]
    fn lambda_matches_dense_grid_max() {
        for k in 1..=3u32 {
            for &q in &[0.2, 0.6, 1.0] {
                for &c in &[0.1, 1.0, 2.5, 4.0, 6.0] {
                    let fast = lambda_qc(k, q, c);
                    let slow = max_on_unit_interval(&|t| lambda_qc_curve(k, q, c, t), 10_000);
                    assert!((fast - slow).abs() <= 1e-9, "k={k} q={q} c={c}: {fast} vs {slow}");
                }
            }
        }
    }

    #[test]
    fn lambda_linear_bound() {
        // |lambda - (1 - c/(q(k+1)) (1 - (1-q)^{k+1}))| <= c^2
        for k in 1..=3u32 {
            for &q in &[0.2, 0.5, 1.0] {
                for &c in &[0.05, 0.2, 0.5, 1.0] {
                    let kp1 = k as f64 + 1.0;
                    let approx = 1.0 - c / (q * kp1) * (1.0 - (1.0 - q).powi(k as i32 + 1));
                    assert!(
                        (approx - lambda_qc(k, q, c)).abs() <= c * c,
                        "k={k} q={q} c={c}"
                    );
                }
            }
        }
    }

    #[test]
    fn linearized_curve_within_c_squared() {
        for k in 1..=3u32 {
            for &q in &[0.3, 0.7, 1.0] {
                for &c in &[0.1, 0.6, 1.5] {
                    for i in 0..=20 {
                        let t = i as f64 / 20.0;
                        let gap =
                            (lambda_qc_linearized(k, q, c, t) - lambda_qc_curve(k, q, c, t)).abs();
                        assert!(gap <= c * c, "k={k} q={q} c={c} t={t} gap={gap}");
                    }
                }
            }
        }
    }

    #[test]
    fn beta_hat_basics() {
        // s = 0: lambda_{1,0} = 1, so beta_hat = 1 - exp(-r)
        for &r in &[0.0, 0.5, 2.0] {
            assert!((beta_hat(1, r, 0.0) - (1.0 - (-r).exp())).abs() < 1e-12);
        }
        // r = 0: no cycles yet
        for &s in &[0.3, 1.0, 4.0] {
            assert!(beta_hat(2, 0.0, s).abs() < 1e-12);
        }
    }

    #[test]
    fn beta_hat_seam_continuity() {
        for k in 1..=3u32 {
            for &r in &[0.1, 0.5, 1.0, 2.0, 5.0] {
                let below = lambda_qc(k, 1.0, r) - (-r).exp() * lambda_qc(k, (-r).exp(), 0.0);
                let above = beta_hat(k, r, r);
                assert!((below - above).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn cdf_monotone_and_bounded_on_grid() {
        let k = 1;
        let pts: Vec<f64> = (0..50).map(|i| i as f64 * 0.1).collect();
        let mut grid = vec![vec![0.0; pts.len()]; pts.len()];
        for (i, &r) in pts.iter().enumerate() {
            for (j, &s) in pts.iter().enumerate() {
                grid[i][j] = xi_hat_cdf(k, r, s).unwrap();
            }
        }
        for i in 0..pts.len() {
            for j in 0..pts.len() {
                if i > 0 {
                    assert!(grid[i][j] >= grid[i - 1][j] - 1e-10);
                }
                if j > 0 {
                    assert!(grid[i][j] >= grid[i][j - 1] - 1e-10);
                }
            }
        }
    }

    #[test]
    fn cdf_saturates() {
        assert!(xi_hat_cdf(1, 0.0, 3.0).unwrap().abs() < 1e-12);
        assert!(xi_hat_cdf(1, 20.0, 20.0).unwrap() > 0.999);
    }

    #[test]
    fn diagonal_totals() {
        assert!((diagonal_total(1) - 0.75).abs() < 1e-15);
        assert!((diagonal_total(2) - 11.0 / 18.0).abs() < 1e-15);
    }

    #[test]
    fn diagonal_mass_integrates_to_total() {
        for k in 1..=3 {
            let m = diagonal_mass(k, 0.0, f64::INFINITY).unwrap();
            assert!((m - diagonal_total(k)).abs() < 1e-8, "k={k}");
        }
    }

    #[test]
    fn diagonal_cdf_closed_form_matches_quadrature() {
        for k in 1..=2 {
            for &x in &[0.3, 1.0, 2.5, 7.0] {
                let quad = diagonal_mass(k, 0.0, x).unwrap();
                assert!((diagonal_cdf(k, x) - quad).abs() < 1e-9);
            }
            assert!((diagonal_cdf(k, 60.0) - diagonal_total(k)).abs() < 1e-12);
        }
    }

    #[test]
    fn promoting_expectation_degenerate_and_small() {
        // n = k + 1: the integrand is constant 1
        assert!((promoting_expectation(2, 1).unwrap() - 1.0).abs() < 1e-12);
        assert!((promoting_expectation(3, 2).unwrap() - 1.0).abs() < 1e-12);
        // n = 3, k = 1: (1/2) * integral of 1 - (x/3)^2 = 1
        assert!((promoting_expectation(3, 1).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn promoting_expectation_tends_to_diagonal_total() {
        let v = promoting_expectation(10_000, 1).unwrap();
        assert!((v - diagonal_total(1)).abs() < 1e-3, "got {v}");
    }

    #[test]
    fn lp_limit_identity_with_lambda() {
        for k in 1..=2u32 {
            for &c in &[0.5, 1.5, 3.0, 4.5, 6.0] {
                let direct = lp_betti_limit(k, c);
                let via_lambda = c / (k as f64 + 1.0) - 1.0 + lambda_qc(k, 1.0, c);
                assert!((direct - via_lambda).abs() <= 1e-10, "k={k} c={c}");
            }
        }
    }

    #[test]
    fn lp_critical_two_methods_agree() {
        let k = 1;
        let fine = lp_critical(k);
        // independent scan for the first sign change of the maximand
        let mut scan = None;
        let mut c = 0.05;
        while c < 20.0 {
            if lp_betti_limit(k, c) > 1e-12 {
                scan = Some(c);
                break;
            }
            c += 1e-3;
        }
        let mut hi = scan.expect("supercritical regime exists");
        let mut lo = hi - 1e-3;
        while hi - lo > 1e-9 {
            let m = 0.5 * (lo + hi);
            if lp_betti_limit(k, m) > 1e-12 {
                hi = m;
            } else {
                lo = m;
            }
        }
        assert!((fine - 0.5 * (lo + hi)).abs() <= 1e-6);
        // below critical the limit is exactly zero
        assert_eq!(lp_betti_limit(k, fine - 0.01), 0.0);
        assert!(lp_betti_limit(k, fine + 0.01) > 0.0);
    }

    #[test]
    fn rank_limit_examples() {
        // matched unit-degree laws give a full-rank (matching) pattern
        let rep = rank_limit(&Dirac(1), &Dirac(1)).unwrap();
        assert!(rep.hypothesis_ok);
        assert!((rep.value - 1.0).abs() < 1e-12);
        // finite instances of that pattern: signed permutation matrices
        use rand::seq::SliceRandom;
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(4);
        for size in [5usize, 12, 20] {
            let mut perm: Vec<usize> = (0..size).collect();
            perm.shuffle(&mut rng);
            let entries: Vec<(u32, u32, i8)> = perm
                .iter()
                .enumerate()
                .map(|(r, &c)| (r as u32, c as u32, if rng.gen::<bool>() { 1 } else { -1 }))
                .collect();
            let m = crate::linalg::SparseSignMatrix::new(
                (0..size as u64).collect(),
                (0..size as u64).collect(),
                entries,
            )
            .unwrap();
            assert_eq!(crate::linalg::rank_exact_small(&m).unwrap(), size as u64);
        }

        // zero-rate head law: no rows at all, rank deficit total
        let rep = rank_limit(&Poisson(0.0), &Binomial { trials: 2, p: 0.5 }).unwrap();
        assert!((rep.value - 0.0).abs() < 1e-12);

        // window family: value must match 1 - lambda_{q,c}
        for &(k, q, c) in &[(1u32, 1.0, 1.5), (1, 0.6, 2.0), (2, 0.8, 3.0)] {
            let rep = rank_limit(&Poisson(c), &Binomial { trials: k + 1, p: q }).unwrap();
            assert!(rep.hypothesis_ok, "k={k} q={q} c={c}");
            assert!((rep.value - (1.0 - lambda_qc(k, q, c))).abs() <= 1e-9);
        }
    }

    #[test]
    fn sampling_matches_mean() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(7);
        for d in [
            Poisson(2.5),
            Binomial { trials: 4, p: 0.3 },
            Dirac(3),
            DegreeDistribution::explicit(vec![0.2, 0.5, 0.3]).unwrap(),
        ] {
            let m: f64 =
                (0..20_000).map(|_| d.sample(&mut rng) as f64).sum::<f64>() / 20_000.0;
            assert!((m - d.mean()).abs() < 0.05, "{d:?}: {m}");
        }
    }
}
