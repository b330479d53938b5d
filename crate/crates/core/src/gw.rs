//! Two-type branching trees, local neighborhood censuses, and the pooled
//! population-dynamics iteration for the spectral atom at zero.
//!
//! The tree with laws `(mu, nu)` puts `mu` offspring at the root, the
//! size-biased `nu` at odd depths and the size-biased `mu` at even depths.
//! Neighborhood balls of Tanner graphs are keyed up to rooted isomorphism
//! and compared to Monte Carlo censuses of these trees in total variation.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::limits::DegreeDistribution;
use crate::linalg::TannerGraph;
use crate::{Error, Result};

/// A finite rooted tree; node 0 is the root, children listed per node.
#[derive(Debug, Clone)]
pub struct RootedTree {
    children: Vec<Vec<u32>>,
}

impl RootedTree {
    pub fn node_count(&self) -> usize {
        self.children.len()
    }

    pub fn children(&self, v: usize) -> &[u32] {
        &self.children[v]
    }

    pub fn root_degree(&self) -> usize {
        self.children[0].len()
    }

    /// Canonical encoding up to rooted isomorphism: children codes sorted
    /// and wrapped in parentheses.
    pub fn canonical_key(&self) -> String {
        fn code(tree: &RootedTree, v: usize) -> String {
            let mut parts: Vec<String> =
                tree.children[v].iter().map(|&c| code(tree, c as usize)).collect();
            parts.sort();
            format!("({})", parts.concat())
        }
        code(self, 0)
    }
}

fn size_bias_allowing_zero(law: &DegreeDistribution) -> Result<DegreeDistribution> {
    match law {
        DegreeDistribution::Poisson(l) if *l == 0.0 => Ok(DegreeDistribution::Poisson(0.0)),
        other => other.size_bias(),
    }
}

fn sample_tree<R: Rng>(
    root_law: &DegreeDistribution,
    even_law: &DegreeDistribution,
    odd_law: &DegreeDistribution,
    depth: u32,
    rng: &mut R,
) -> RootedTree {
    let mut children: Vec<Vec<u32>> = vec![Vec::new()];
    let mut frontier = vec![(0u32, 0u32)]; // (node, depth)
    while let Some((v, d)) = frontier.pop() {
        if d == depth {
            continue;
        }
        let law = if d == 0 {
            root_law
        } else if d % 2 == 1 {
            odd_law
        } else {
            even_law
        };
        let count = law.sample(rng);
        for _ in 0..count {
            let id = children.len() as u32;
            children.push(Vec::new());
            children[v as usize].push(id);
            frontier.push((id, d + 1));
        }
    }
    RootedTree { children }
}

/// Samples the star-rooted tree: root offspring `mu`, then alternating
/// size-biased laws, truncated at `depth`.
pub fn sample_gw_star(
    mu: &DegreeDistribution,
    nu: &DegreeDistribution,
    depth: u32,
    seed: u64,
) -> Result<RootedTree> {
    mu.validate()?;
    nu.validate()?;
    let mu_b = size_bias_allowing_zero(mu)?;
    let nu_b = nu.size_bias()?;
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    Ok(sample_tree(mu, &mu_b, &nu_b, depth, &mut rng))
}

/// Samples the non-rooted variant: the root also uses the size-biased head
/// law.
pub fn sample_gw(
    mu_prime: &DegreeDistribution,
    nu_prime: &DegreeDistribution,
    depth: u32,
    seed: u64,
) -> Result<RootedTree> {
    mu_prime.validate()?;
    nu_prime.validate()?;
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    Ok(sample_tree(mu_prime, mu_prime, nu_prime, depth, &mut rng))
}

/// Which side of the bipartition roots the census.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CensusSide {
    Rows,
    Cols,
}

/// Empirical distribution of neighborhood-ball isomorphism types.
#[derive(Debug, Clone, Default)]
pub struct Census {
    counts: BTreeMap<String, u64>,
    total: u64,
}

impl Census {
    pub fn record(&mut self, key: String) {
        *self.counts.entry(key).or_insert(0) += 1;
        self.total += 1;
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn counts(&self) -> &BTreeMap<String, u64> {
        &self.counts
    }

    /// `(key, frequency)` sorted by descending frequency, then key.
    pub fn frequencies(&self) -> Vec<(String, f64)> {
        let mut out: Vec<(String, f64)> = self
            .counts
            .iter()
            .map(|(k, &c)| (k.clone(), c as f64 / self.total as f64))
            .collect();
        out.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then_with(|| a.0.cmp(&b.0)));
        out
    }

    /// Pools another census into this one (counts add).
    pub fn merge(&mut self, other: &Census) {
        for (k, &c) in other.counts.iter() {
            *self.counts.entry(k.clone()).or_insert(0) += c;
        }
        self.total += other.total;
    }

    /// Total variation distance between the two frequency vectors.
    pub fn tv_distance(&self, other: &Census) -> f64 {
        let mut keys: Vec<&String> = self.counts.keys().collect();
        keys.extend(other.counts.keys());
        keys.sort();
        keys.dedup();
        let mut acc = 0.0;
        for k in keys {
            let a = *self.counts.get(k).unwrap_or(&0) as f64 / self.total.max(1) as f64;
            let b = *other.counts.get(k).unwrap_or(&0) as f64 / other.total.max(1) as f64;
            acc += (a - b).abs();
        }
        acc / 2.0
    }
}

/// Vertex id within a bipartite graph walk.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct BipVertex {
    row_side: bool,
    index: u32,
}

/// Canonical key of the radius-`radius` ball around `root`.
///
/// Tree balls get the exact rooted-isomorphism code. Balls containing a
/// cycle get a coarser key that is still isomorphism-invariant (and disjoint
/// from every tree key), flagged with a `cyc` prefix.
fn ball_key(g: &TannerGraph, side: CensusSide, root: u32, radius: u32) -> String {
    use std::collections::HashMap;
    let mut dist: HashMap<BipVertex, u32> = HashMap::new();
    let start = BipVertex { row_side: side == CensusSide::Rows, index: root };
    dist.insert(start, 0);
    let mut order = vec![start];
    let mut parent: HashMap<BipVertex, BipVertex> = HashMap::new();
    let mut head = 0;
    while head < order.len() {
        let v = order[head];
        head += 1;
        let d = dist[&v];
        if d == radius {
            continue;
        }
        let neighbors: &[u32] = if v.row_side {
            g.row_neighbors(v.index as usize)
        } else {
            g.col_neighbors(v.index as usize)
        };
        for &u in neighbors {
            let w = BipVertex { row_side: !v.row_side, index: u };
            if let std::collections::hash_map::Entry::Vacant(slot) = dist.entry(w) {
                slot.insert(d + 1);
                parent.insert(w, v);
                order.push(w);
            }
        }
    }
    // induced edge count inside the ball
    let mut edges = 0usize;
    for v in &order {
        if v.row_side {
            for &u in g.row_neighbors(v.index as usize) {
                if dist.contains_key(&BipVertex { row_side: false, index: u }) {
                    edges += 1;
                }
            }
        }
    }
    if edges == order.len() - 1 {
        // a tree: the BFS tree is the whole ball
        let index_of: HashMap<BipVertex, u32> =
            order.iter().enumerate().map(|(i, &v)| (v, i as u32)).collect();
        let mut children: Vec<Vec<u32>> = vec![Vec::new(); order.len()];
        for v in &order[1..] {
            children[index_of[&parent[v]] as usize].push(index_of[v]);
        }
        RootedTree { children }.canonical_key()
    } else {
        let mut profile: Vec<(u32, usize)> = order
            .iter()
            .map(|v| {
                let neighbors: &[u32] = if v.row_side {
                    g.row_neighbors(v.index as usize)
                } else {
                    g.col_neighbors(v.index as usize)
                };
                let deg = neighbors
                    .iter()
                    .filter(|&&u| dist.contains_key(&BipVertex { row_side: !v.row_side, index: u }))
                    .count();
                (dist[v], deg)
            })
            .collect();
        profile.sort_unstable();
        format!("cyc|v{}|e{}|{:?}", order.len(), edges, profile)
    }
}

/// Exact census of ball types rooted at every vertex of one side.
pub fn census(g: &TannerGraph, side: CensusSide, radius: u32) -> Result<Census> {
    if radius > 6 {
        return Err(Error::InvalidParameters(format!("radius {radius} exceeds the cap of 6")));
    }
    if !radius.is_multiple_of(2) {
        return Err(Error::InvalidParameters("census radius must be even".into()));
    }
    let count = match side {
        CensusSide::Rows => g.row_count(),
        CensusSide::Cols => g.col_count(),
    };
    if count == 0 {
        return Err(Error::InvalidParameters("census over an empty vertex class".into()));
    }
    let mut out = Census::default();
    for v in 0..count {
        out.record(ball_key(g, side, v as u32, radius));
    }
    Ok(out)
}

/// Monte Carlo census of depth-`radius` tree balls of the star-rooted tree.
pub fn gw_star_census(
    mu: &DegreeDistribution,
    nu: &DegreeDistribution,
    radius: u32,
    trees: u64,
    seed: u64,
) -> Result<Census> {
    if radius > 6 {
        return Err(Error::InvalidParameters(format!("radius {radius} exceeds the cap of 6")));
    }
    if trees == 0 {
        return Err(Error::InvalidParameters("need at least one tree".into()));
    }
    mu.validate()?;
    nu.validate()?;
    let mu_b = size_bias_allowing_zero(mu)?;
    let nu_b = nu.size_bias()?;
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut out = Census::default();
    for _ in 0..trees {
        let tree = sample_tree(mu, &mu_b, &nu_b, radius, &mut rng);
        out.record(tree.canonical_key());
    }
    Ok(out)
}

/// Pool initialization for [`population_dynamics`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PoolInit {
    Zeros,
    Ones,
}

/// Estimates from the pooled iteration.
#[derive(Debug, Clone)]
pub struct PopulationReport {
    /// Fraction of the final pool that is strictly positive.
    pub t_est: f64,
    /// Mean of the root-law resampling of the final pool; estimates the
    /// expected spectral mass at zero.
    pub eta_est: f64,
    /// Positive fraction after each iteration.
    pub t_history: Vec<f64>,
}

/// Pooled iteration of the recursion
/// `x = (1 + sum_i (sum_j x_j)^-1)^-1`
/// with outer count drawn from the size-biased head law and inner counts
/// from the size-biased body law; an inner sum of zero forces `x = 0`.
///
/// The whole pool is resampled each iteration. After the final iteration the
/// pool is read out once more with the *unbiased* head law to estimate the
/// root quantity.
pub fn population_dynamics(
    mu: &DegreeDistribution,
    nu: &DegreeDistribution,
    pool_size: usize,
    iters: u32,
    init: PoolInit,
    seed: u64,
) -> Result<PopulationReport> {
    if pool_size < 10_000 {
        return Err(Error::InvalidParameters(format!(
            "pool size {pool_size} below the 10^4 floor"
        )));
    }
    if iters < 100 {
        return Err(Error::InvalidParameters(format!("iteration count {iters} below 100")));
    }
    mu.validate()?;
    nu.validate()?;
    let mu_b = size_bias_allowing_zero(mu)?;
    let nu_b = nu.size_bias()?;
    let mut rng = ChaCha12Rng::seed_from_u64(seed);

    let mut pool = vec![if init == PoolInit::Zeros { 0.0f64 } else { 1.0 }; pool_size];
    let mut next = vec![0.0f64; pool_size];
    let mut t_history = Vec::with_capacity(iters as usize);

    let draw = |law: &DegreeDistribution,
                pool: &[f64],
                rng: &mut ChaCha12Rng| -> f64 {
        let outer = law.sample(rng);
        let mut inv_sum = 0.0;
        for _ in 0..outer {
            let inner = nu_b.sample(rng);
            let mut s = 0.0;
            for _ in 0..inner {
                s += pool[rng.gen_range(0..pool.len())];
            }
            if s == 0.0 {
                return 0.0;
            }
            inv_sum += 1.0 / s;
        }
        1.0 / (1.0 + inv_sum)
    };

    for _ in 0..iters {
        for slot in next.iter_mut() {
            *slot = draw(&mu_b, &pool, &mut rng);
        }
        std::mem::swap(&mut pool, &mut next);
        let positive = pool.iter().filter(|&&x| x > 0.0).count();
        t_history.push(positive as f64 / pool_size as f64);
    }

    let t_est = *t_history.last().unwrap();
    let mut eta_acc = 0.0;
    for _ in 0..pool_size {
        eta_acc += draw(mu, &pool, &mut rng);
    }
    let eta_est = eta_acc / pool_size as f64;
    Ok(PopulationReport { t_est, eta_est, t_history })
}
