//! The random filtration of the complete `k`-dimensional complex on `[n]`.
//!
//! Every `k+1`-element subset of `{1, .., n}` (a top face) arrives at an
//! i.i.d. uniform random time in `[0, n]` and brings all of its subsets with
//! it: the time of a lower-dimensional face is the minimum arrival time over
//! the top faces containing it. Only top-face times are stored; everything
//! else is derived.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::linalg::SparseSignMatrix;
use crate::{binomial, Error, Result};

/// A face: strictly increasing vertices in `[1, n]`, dimension `len - 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Face {
    vertices: Vec<u32>,
}

impl Face {
    pub fn new(vertices: Vec<u32>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::InvalidFace("face needs at least one vertex".into()));
        }
        if vertices[0] == 0 {
            return Err(Error::InvalidFace("vertices are 1-based".into()));
        }
        if !vertices.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidFace(format!(
                "vertices must be strictly increasing, got {vertices:?}"
            )));
        }
        Ok(Face { vertices })
    }

    pub fn vertices(&self) -> &[u32] {
        &self.vertices
    }

    pub fn dimension(&self) -> usize {
        self.vertices.len() - 1
    }
}

/// Colexicographic bijection between `j`-subsets of `[n]` and `0..C(n, j)`.
///
/// For 0-based vertices `v_0 < v_1 < ... < v_{j-1}` the rank is
/// `sum_i C(v_i, i + 1)`; unranking greedily peels the largest coordinate.
#[derive(Debug, Clone, Copy)]
pub struct FaceIndexer {
    n: u32,
    j: u32,
}

impl FaceIndexer {
    pub fn new(n: u32, j: u32) -> Result<Self> {
        if j == 0 || j > n {
            return Err(Error::InvalidParameters(format!(
                "subset size {j} out of range for n = {n}"
            )));
        }
        Ok(FaceIndexer { n, j })
    }

    pub fn count(&self) -> u64 {
        binomial(self.n as u64, self.j as u64)
    }

    /// Rank of a face given by 1-based strictly increasing vertices.
    pub fn rank(&self, vertices: &[u32]) -> u64 {
        debug_assert_eq!(vertices.len(), self.j as usize);
        vertices
            .iter()
            .enumerate()
            .map(|(i, &v)| binomial((v - 1) as u64, i as u64 + 1))
            .sum()
    }

    /// Inverse of [`rank`](Self::rank); returns 1-based vertices.
    pub fn unrank(&self, mut rank: u64) -> Vec<u32> {
        debug_assert!(rank < self.count());
        let mut out = vec![0u32; self.j as usize];
        let mut top = self.n as u64;
        for i in (1..=self.j as u64).rev() {
            // largest v with C(v, i) <= rank, by binary search
            let (mut lo, mut hi) = (i - 1, top);
            while lo + 1 < hi {
                let mid = (lo + hi) / 2;
                if binomial(mid, i) <= rank {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            rank -= binomial(lo, i);
            out[i as usize - 1] = lo as u32 + 1;
            top = lo;
        }
        out
    }

    /// Iterates all `j`-subsets in colex order, i.e. in rank order.
    pub fn iter(&self) -> ColexIter {
        ColexIter {
            n: self.n,
            next: Some((1..=self.j).collect()),
        }
    }
}

/// Yields subsets in colexicographic order with O(j) amortized work per step.
pub struct ColexIter {
    n: u32,
    next: Option<Vec<u32>>,
}

impl Iterator for ColexIter {
    type Item = Vec<u32>;

    fn next(&mut self) -> Option<Vec<u32>> {
        let current = self.next.clone()?;
        let v = self.next.as_mut().unwrap();
        let j = v.len();
        // smallest position that can advance; lower positions reset to 1..i
        let mut advanced = false;
        for i in 0..j {
            let cap = if i + 1 < j { v[i + 1] - 1 } else { self.n };
            if v[i] < cap {
                v[i] += 1;
                for (off, slot) in v.iter_mut().enumerate().take(i) {
                    *slot = off as u32 + 1;
                }
                advanced = true;
                break;
            }
        }
        if !advanced {
            self.next = None;
        }
        Some(current)
    }
}

/// A sampled filtration: one uniform arrival time per top face.
#[derive(Debug, Clone)]
pub struct LMFiltration {
    n: u32,
    k: u32,
    seed: u64,
    /// Arrival time of each `k+1`-subset, indexed by colex rank.
    top_times: Vec<f64>,
}

/// Samples a filtration: i.i.d. `Uniform[0, n]` times, one per top face,
/// redrawn on exact collision so stored times are pairwise distinct.
/// Deterministic given `seed`.
pub fn sample_filtration(n: u32, k: u32, seed: u64) -> Result<LMFiltration> {
    if k < 1 || n < k + 1 {
        return Err(Error::InvalidParameters(format!(
            "need n >= k + 1 >= 2, got n = {n}, k = {k}"
        )));
    }
    let count = binomial(n as u64, (k + 1) as u64) as usize;
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut seen: HashSet<u64> = HashSet::with_capacity(count * 2);
    let mut top_times = Vec::with_capacity(count);
    for _ in 0..count {
        loop {
            let t: f64 = rng.gen::<f64>() * n as f64;
            if seen.insert(t.to_bits()) {
                top_times.push(t);
                break;
            }
        }
    }
    Ok(LMFiltration { n, k, seed, top_times })
}

impl LMFiltration {
    /// Rebuilds a filtration from explicit top-face times (colex order).
    pub fn from_parts(n: u32, k: u32, seed: u64, top_times: Vec<f64>) -> Result<Self> {
        if k < 1 || n < k + 1 {
            return Err(Error::InvalidParameters(format!(
                "need n >= k + 1 >= 2, got n = {n}, k = {k}"
            )));
        }
        let count = binomial(n as u64, (k + 1) as u64) as usize;
        if top_times.len() != count {
            return Err(Error::InvalidParameters(format!(
                "expected {count} top-face times, got {}",
                top_times.len()
            )));
        }
        let mut seen = HashSet::with_capacity(count * 2);
        for &t in &top_times {
            if !(0.0..=n as f64).contains(&t) {
                return Err(Error::InvalidParameters(format!("time {t} outside [0, {n}]")));
            }
            if !seen.insert(t.to_bits()) {
                return Err(Error::InvalidParameters(format!("duplicate time {t}")));
            }
        }
        Ok(LMFiltration { n, k, seed, top_times })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn top_face_indexer(&self) -> FaceIndexer {
        FaceIndexer::new(self.n, self.k + 1).expect("validated at construction")
    }

    pub fn facet_indexer(&self) -> FaceIndexer {
        FaceIndexer::new(self.n, self.k).expect("validated at construction")
    }

    pub fn top_times(&self) -> &[f64] {
        &self.top_times
    }

    /// Arrival time of a face of dimension at most `k`.
    ///
    /// A top face owns its sampled time; any lower face arrives with the
    /// earliest top face containing it.
    pub fn face_time(&self, face: &Face) -> Result<f64> {
        let m = face.vertices.len() as u32;
        if m > self.k + 1 {
            return Err(Error::InvalidFace(format!(
                "dimension {} exceeds k = {}",
                face.dimension(),
                self.k
            )));
        }
        if *face.vertices.last().unwrap() > self.n {
            return Err(Error::InvalidFace(format!(
                "vertex {} outside [1, {}]",
                face.vertices.last().unwrap(),
                self.n
            )));
        }
        if m == self.k + 1 {
            let idx = self.top_face_indexer();
            return Ok(self.top_times[idx.rank(&face.vertices) as usize]);
        }
        let idx = self.top_face_indexer();
        let mut best = f64::INFINITY;
        let need = (self.k + 1 - m) as usize;
        let pool: Vec<u32> =
            (1..=self.n).filter(|v| !face.vertices.contains(v)).collect();
        let mut choice = vec![0usize; need];
        // enumerate all `need`-subsets of the complement
        let mut depth = 0usize;
        let mut start = 0usize;
        loop {
            if depth == need {
                let mut verts = face.vertices.clone();
                verts.extend(choice.iter().map(|&i| pool[i]));
                verts.sort_unstable();
                let t = self.top_times[idx.rank(&verts) as usize];
                if t < best {
                    best = t;
                }
                if depth == 0 {
                    break;
                }
                depth -= 1;
                start = choice[depth] + 1;
                continue;
            }
            if start + (need - depth) > pool.len() {
                if depth == 0 {
                    break;
                }
                depth -= 1;
                start = choice[depth] + 1;
                continue;
            }
            choice[depth] = start;
            depth += 1;
            start = choice[depth - 1] + 1;
        }
        Ok(best)
    }

    /// Arrival time of every `k-1`-dimensional face, indexed by colex rank,
    /// computed in one pass over the top faces.
    pub fn facet_times(&self) -> Vec<f64> {
        let facet_idx = self.facet_indexer();
        let mut times = vec![f64::INFINITY; facet_idx.count() as usize];
        let mut facet = Vec::with_capacity(self.k as usize);
        for (verts, &t) in self.top_face_indexer().iter().zip(self.top_times.iter()) {
            for drop in 0..verts.len() {
                facet.clear();
                facet.extend(verts.iter().enumerate().filter(|(i, _)| *i != drop).map(|(_, &v)| v));
                let r = facet_idx.rank(&facet) as usize;
                if t < times[r] {
                    times[r] = t;
                }
            }
        }
        times
    }

    /// Faces present at time `t`, grouped by dimension `0..=k`.
    /// The result is closed under subsets by construction.
    pub fn complex_at(&self, t: f64) -> Result<Vec<Vec<Face>>> {
        if !(0.0..=self.n as f64).contains(&t) {
            return Err(Error::InvalidParameters(format!("time {t} outside [0, {}]", self.n)));
        }
        let top_idx = self.top_face_indexer();
        let mut by_dim: Vec<HashSet<Vec<u32>>> = vec![HashSet::new(); (self.k + 1) as usize];
        for (rank, &time) in self.top_times.iter().enumerate() {
            if time <= t {
                let verts = top_idx.unrank(rank as u64);
                for mask in 1u32..(1 << verts.len()) {
                    let sub: Vec<u32> = verts
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| mask >> i & 1 == 1)
                        .map(|(_, &v)| v)
                        .collect();
                    by_dim[sub.len() - 1].insert(sub);
                }
            }
        }
        Ok(by_dim
            .into_iter()
            .map(|set| {
                let mut faces: Vec<Vec<u32>> = set.into_iter().collect();
                faces.sort();
                faces.into_iter().map(|v| Face { vertices: v }).collect()
            })
            .collect())
    }

    /// Signed incidence matrix between top faces (rows) and `k-1`-faces
    /// (columns) of the window `(r, s]`.
    ///
    /// With `r = None`: rows are the top faces with time `<= s`, columns are
    /// all `C(n, k)` lower faces. With `r = Some(r)`: rows with time `<= r`
    /// and columns of faces present at `r` are deleted as well.
    ///
    /// Sign convention: the boundary of `[v_0 < ... < v_k]` assigns the facet
    /// omitting `v_i` the coefficient `(-1)^i`.
    pub fn coboundary_matrix(&self, s: f64, r: Option<f64>) -> Result<SparseSignMatrix> {
        if !(0.0..=self.n as f64).contains(&s) {
            return Err(Error::InvalidParameters(format!("s = {s} outside [0, {}]", self.n)));
        }
        if let Some(r) = r {
            if r >= s {
                return Err(Error::InvalidWindow { r, s });
            }
        }
        let top_idx = self.top_face_indexer();
        let facet_idx = self.facet_indexer();
        let col_count = facet_idx.count() as usize;

        let (col_ids, col_pos): (Vec<u64>, Vec<Option<u32>>) = match r {
            None => (
                (0..col_count as u64).collect(),
                (0..col_count).map(|i| Some(i as u32)).collect(),
            ),
            Some(r) => {
                let times = self.facet_times();
                let mut ids = Vec::new();
                let mut pos = vec![None; col_count];
                for (i, &t) in times.iter().enumerate() {
                    if t > r {
                        pos[i] = Some(ids.len() as u32);
                        ids.push(i as u64);
                    }
                }
                (ids, pos)
            }
        };

        let mut row_ids = Vec::new();
        let mut entries = Vec::new();
        let mut facet = Vec::with_capacity(self.k as usize);
        for (rank, (verts, &t)) in top_idx.iter().zip(self.top_times.iter()).enumerate() {
            if t > s || r.is_some_and(|r| t <= r) {
                continue;
            }
            let row = row_ids.len() as u32;
            row_ids.push(rank as u64);
            for drop in 0..verts.len() {
                facet.clear();
                facet.extend(verts.iter().enumerate().filter(|(i, _)| *i != drop).map(|(_, &v)| v));
                let col_rank = facet_idx.rank(&facet) as usize;
                if let Some(col) = col_pos[col_rank] {
                    let sign = if drop % 2 == 0 { 1i8 } else { -1i8 };
                    entries.push((row, col, sign));
                }
            }
        }
        SparseSignMatrix::new(row_ids, col_ids, entries)
    }

    /// Number of top faces whose arrival introduces at least one new
    /// `k-1`-dimensional face.
    pub fn promoting_count(&self) -> u64 {
        let facet_times = self.facet_times();
        let facet_idx = self.facet_indexer();
        let mut count = 0;
        let mut facet = Vec::with_capacity(self.k as usize);
        for (verts, &t) in self.top_face_indexer().iter().zip(self.top_times.iter()) {
            let mut promoting = false;
            for drop in 0..verts.len() {
                facet.clear();
                facet.extend(verts.iter().enumerate().filter(|(i, _)| *i != drop).map(|(_, &v)| v));
                if facet_times[facet_idx.rank(&facet) as usize] == t {
                    promoting = true;
                    break;
                }
            }
            if promoting {
                count += 1;
            }
        }
        count
    }
}
