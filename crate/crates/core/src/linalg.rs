//! Exact sparse linear algebra for sign matrices.
//!
//! Ranks are computed over large prime fields (primary `2^61 - 1`, confirmed
//! against `2^31 - 1`), with a fraction-exact rational oracle available at
//! small scale. The leaf-removal peel iteratively strips columns with at most
//! one live neighbor together with the rows they certify, which removes
//! exactly its own count from the rank: `rank(M) = |K_final| + rank(residual)`.

use num::rational::BigRational;
use num::{BigInt, Zero};

use crate::field::PrimeField;
use crate::{Error, Result, PRIME_CONFIRM, PRIME_PRIMARY};

/// A sparse matrix with entries in `{-1, +1}` (zeros omitted).
///
/// Rows and columns carry opaque `u64` labels; entries index positions in
/// the label lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseSignMatrix {
    row_ids: Vec<u64>,
    col_ids: Vec<u64>,
    entries: Vec<(u32, u32, i8)>,
}

impl SparseSignMatrix {
    pub fn new(row_ids: Vec<u64>, col_ids: Vec<u64>, entries: Vec<(u32, u32, i8)>) -> Result<Self> {
        let mut seen = std::collections::HashSet::with_capacity(entries.len());
        for &(r, c, v) in &entries {
            if v != 1 && v != -1 {
                return Err(Error::InvalidParameters(format!("entry value {v} not in {{-1, +1}}")));
            }
            if r as usize >= row_ids.len() || c as usize >= col_ids.len() {
                return Err(Error::InvalidParameters(format!(
                    "entry ({r}, {c}) outside {}x{}",
                    row_ids.len(),
                    col_ids.len()
                )));
            }
            if !seen.insert((r, c)) {
                return Err(Error::InvalidParameters(format!("duplicate entry at ({r}, {c})")));
            }
        }
        Ok(SparseSignMatrix { row_ids, col_ids, entries })
    }

    /// Builds a matrix from a dense sign pattern; any nonzero becomes its sign.
    pub fn from_dense(rows: &[Vec<i8>]) -> Result<Self> {
        let nr = rows.len();
        let nc = rows.first().map_or(0, |r| r.len());
        let mut entries = Vec::new();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != nc {
                return Err(Error::InvalidParameters("ragged dense matrix".into()));
            }
            for (j, &v) in row.iter().enumerate() {
                if v != 0 {
                    entries.push((i as u32, j as u32, v.signum()));
                }
            }
        }
        Self::new((0..nr as u64).collect(), (0..nc as u64).collect(), entries)
    }

    pub fn row_count(&self) -> usize {
        self.row_ids.len()
    }

    pub fn col_count(&self) -> usize {
        self.col_ids.len()
    }

    pub fn row_ids(&self) -> &[u64] {
        &self.row_ids
    }

    pub fn col_ids(&self) -> &[u64] {
        &self.col_ids
    }

    pub fn entries(&self) -> &[(u32, u32, i8)] {
        &self.entries
    }

    pub fn transpose(&self) -> SparseSignMatrix {
        SparseSignMatrix {
            row_ids: self.col_ids.clone(),
            col_ids: self.row_ids.clone(),
            entries: self.entries.iter().map(|&(r, c, v)| (c, r, v)).collect(),
        }
    }

    /// Submatrix of the kept rows and columns, labels preserved.
    pub fn submatrix(&self, keep_row: &[bool], keep_col: &[bool]) -> SparseSignMatrix {
        assert_eq!(keep_row.len(), self.row_count());
        assert_eq!(keep_col.len(), self.col_count());
        let mut row_map = vec![u32::MAX; self.row_count()];
        let mut col_map = vec![u32::MAX; self.col_count()];
        let mut row_ids = Vec::new();
        let mut col_ids = Vec::new();
        for (i, &keep) in keep_row.iter().enumerate() {
            if keep {
                row_map[i] = row_ids.len() as u32;
                row_ids.push(self.row_ids[i]);
            }
        }
        for (j, &keep) in keep_col.iter().enumerate() {
            if keep {
                col_map[j] = col_ids.len() as u32;
                col_ids.push(self.col_ids[j]);
            }
        }
        let entries = self
            .entries
            .iter()
            .filter(|&&(r, c, _)| keep_row[r as usize] && keep_col[c as usize])
            .map(|&(r, c, v)| (row_map[r as usize], col_map[c as usize], v))
            .collect();
        SparseSignMatrix { row_ids, col_ids, entries }
    }
}

/// Bipartite support graph of a sign matrix: rows on one side, columns on
/// the other, adjacent exactly where an entry is nonzero.
#[derive(Debug, Clone)]
pub struct TannerGraph {
    row_adj: Vec<Vec<u32>>,
    col_adj: Vec<Vec<u32>>,
}

impl TannerGraph {
    pub fn row_count(&self) -> usize {
        self.row_adj.len()
    }

    pub fn col_count(&self) -> usize {
        self.col_adj.len()
    }

    pub fn row_neighbors(&self, r: usize) -> &[u32] {
        &self.row_adj[r]
    }

    pub fn col_neighbors(&self, c: usize) -> &[u32] {
        &self.col_adj[c]
    }
}

pub fn tanner(m: &SparseSignMatrix) -> TannerGraph {
    let mut row_adj = vec![Vec::new(); m.row_count()];
    let mut col_adj = vec![Vec::new(); m.col_count()];
    for &(r, c, _) in m.entries() {
        row_adj[r as usize].push(c);
        col_adj[c as usize].push(r);
    }
    for adj in row_adj.iter_mut().chain(col_adj.iter_mut()) {
        adj.sort_unstable();
    }
    TannerGraph { row_adj, col_adj }
}

/// `a - factor * b` for sorted sparse rows over `field`.
pub(crate) fn row_axpy(
    field: &PrimeField,
    a: &[(u32, u64)],
    factor: u64,
    b: &[(u32, u64)],
) -> Vec<(u32, u64)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        match (a.get(i), b.get(j)) {
            (Some(&(ca, va)), Some(&(cb, vb))) if ca == cb => {
                let v = field.sub(va, field.mul(factor, vb));
                if v != 0 {
                    out.push((ca, v));
                }
                i += 1;
                j += 1;
            }
            (Some(&(ca, va)), Some(&(cb, _))) if ca < cb => {
                out.push((ca, va));
                i += 1;
            }
            (Some(_), Some(&(cb, vb))) => {
                let v = field.neg(field.mul(factor, vb));
                if v != 0 {
                    out.push((cb, v));
                }
                j += 1;
            }
            (Some(&(ca, va)), None) => {
                out.push((ca, va));
                i += 1;
            }
            (None, Some(&(cb, vb))) => {
                let v = field.neg(field.mul(factor, vb));
                if v != 0 {
                    out.push((cb, v));
                }
                j += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    out
}

/// Incremental row-space tracker over a prime field.
///
/// Rows are fed one at a time; each is reduced against the pivots collected
/// so far and either absorbed (dependent) or normalized and kept. The rank of
/// everything seen so far is available after every insertion, which makes
/// sweeps over a growing matrix a single elimination pass.
pub struct RowEliminator {
    field: PrimeField,
    /// pivot column -> index into `basis`; basis rows have leading coeff 1
    pivots: std::collections::HashMap<u32, usize>,
    basis: Vec<Vec<(u32, u64)>>,
}

impl RowEliminator {
    pub fn new(p: u64) -> Self {
        RowEliminator { field: PrimeField::new(p), pivots: std::collections::HashMap::new(), basis: Vec::new() }
    }

    /// Feeds a row (sorted by column, nonzero values); returns whether it was
    /// independent of everything seen before.
    pub fn add_row(&mut self, mut row: Vec<(u32, u64)>) -> bool {
        loop {
            let Some(&(c0, v0)) = row.first() else {
                return false;
            };
            match self.pivots.get(&c0) {
                Some(&bi) => {
                    row = row_axpy(&self.field, &row, v0, &self.basis[bi]);
                }
                None => {
                    let inv = self.field.inv(v0);
                    for e in row.iter_mut() {
                        e.1 = self.field.mul(e.1, inv);
                    }
                    self.pivots.insert(c0, self.basis.len());
                    self.basis.push(row);
                    return true;
                }
            }
        }
    }

    pub fn rank(&self) -> u64 {
        self.basis.len() as u64
    }
}

/// Rank over `Z/p` by sparse elimination with min-degree (Markowitz-style)
/// column pivoting.
pub fn rank_mod_p(m: &SparseSignMatrix, p: u64) -> u64 {
    let field = PrimeField::new(p);
    let ncols = m.col_count();
    let nrows = m.row_count();
    let mut rows: Vec<Vec<(u32, u64)>> = vec![Vec::new(); nrows];
    for &(r, c, v) in m.entries() {
        rows[r as usize].push((c, field.from_i64(v as i64)));
    }
    for row in rows.iter_mut() {
        row.sort_unstable_by_key(|e| e.0);
    }
    let mut col_deg = vec![0u32; ncols];
    let mut col_rows: Vec<Vec<u32>> = vec![Vec::new(); ncols];
    for (i, row) in rows.iter().enumerate() {
        for &(c, _) in row {
            col_deg[c as usize] += 1;
            col_rows[c as usize].push(i as u32);
        }
    }
    let mut active = vec![true; nrows];
    let mut col_done = vec![false; ncols];
    let mut rank = 0u64;

    let row_has = |row: &[(u32, u64)], c: u32| row.binary_search_by_key(&c, |e| e.0).is_ok();
    let row_val = |row: &[(u32, u64)], c: u32| {
        row.binary_search_by_key(&c, |e| e.0).ok().map(|i| row[i].1).unwrap()
    };

    loop {
        // min-degree live column
        let mut best: Option<(u32, u32)> = None;
        for c in 0..ncols {
            if col_done[c] || col_deg[c] == 0 {
                continue;
            }
            if best.is_none_or(|(d, _)| col_deg[c] < d) {
                best = Some((col_deg[c], c as u32));
                if col_deg[c] == 1 {
                    break;
                }
            }
        }
        let Some((_, pc)) = best else { break };

        // compact the (lazy) row list for the pivot column and pick the
        // shortest containing row as pivot
        let mut live: Vec<u32> = Vec::with_capacity(col_deg[pc as usize] as usize);
        for &r in &col_rows[pc as usize] {
            if active[r as usize] && row_has(&rows[r as usize], pc) && !live.contains(&r) {
                live.push(r);
            }
        }
        debug_assert_eq!(live.len(), col_deg[pc as usize] as usize);
        let &pr = live.iter().min_by_key(|&&r| rows[r as usize].len()).expect("deg > 0");

        let pivot_val = row_val(&rows[pr as usize], pc);
        let pivot_inv = field.inv(pivot_val);
        let pivot_row = std::mem::take(&mut rows[pr as usize]);

        for &r in &live {
            if r == pr {
                continue;
            }
            let factor = field.mul(row_val(&rows[r as usize], pc), pivot_inv);
            let merged = row_axpy(&field, &rows[r as usize], factor, &pivot_row);
            // degree bookkeeping: entries leaving and entering row r
            for &(c, _) in &rows[r as usize] {
                col_deg[c as usize] -= 1;
            }
            for &(c, _) in &merged {
                col_deg[c as usize] += 1;
                col_rows[c as usize].push(r);
            }
            rows[r as usize] = merged;
        }
        for &(c, _) in &pivot_row {
            col_deg[c as usize] -= 1;
        }
        active[pr as usize] = false;
        col_done[pc as usize] = true;
        rank += 1;
    }
    rank
}

/// Rank over the primary prime, confirmed against the second; a disagreement
/// is surfaced as an error rather than a silent wrong answer.
pub fn rank_checked(m: &SparseSignMatrix) -> Result<u64> {
    let r1 = rank_mod_p(m, PRIME_PRIMARY);
    let r2 = rank_mod_p(m, PRIME_CONFIRM);
    if r1 != r2 {
        return Err(Error::PrimeDisagreement { p1: PRIME_PRIMARY, p2: PRIME_CONFIRM, r1, r2 });
    }
    Ok(r1)
}

/// Rank over the rationals by fraction-exact dense elimination.
/// Oracle-scale only: refuses when the short side exceeds 60.
pub fn rank_exact_small(m: &SparseSignMatrix) -> Result<u64> {
    let nr = m.row_count();
    let nc = m.col_count();
    if nr.min(nc) > 60 {
        return Err(Error::OracleScale(format!("matrix is {nr}x{nc}, short side > 60")));
    }
    if nr == 0 || nc == 0 {
        return Ok(0);
    }
    let mut a: Vec<Vec<BigRational>> = vec![vec![BigRational::zero(); nc]; nr];
    for &(r, c, v) in m.entries() {
        a[r as usize][c as usize] = BigRational::from(BigInt::from(v));
    }
    let mut rank = 0usize;
    for col in 0..nc {
        let Some(pivot) = (rank..nr).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(rank, pivot);
        let inv = a[rank][col].recip();
        for x in a[rank].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = a[rank].clone();
        for (r, row) in a.iter_mut().enumerate() {
            if r != rank && !row[col].is_zero() {
                let f = row[col].clone();
                for (x, y) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                    *x -= y * &f;
                }
            }
        }
        rank += 1;
        if rank == nr {
            break;
        }
    }
    Ok(rank as u64)
}

/// Outcome of the leaf-removal peel.
///
/// `l_sets[i]` / `k_sets[i]` hold the column/row index sets after round
/// `i + 1`; they are nested and stabilize. The residual is the input with the
/// final row set and column set deleted, and
/// `rank(M) = removed_rank + rank(residual)`.
#[derive(Debug, Clone)]
pub struct PeelResult {
    pub l_sets: Vec<Vec<u32>>,
    pub k_sets: Vec<Vec<u32>>,
    pub residual: SparseSignMatrix,
    pub removed_rank: u64,
}

impl PeelResult {
    /// `removed_rank + #residual columns`, an upper bound on the rank.
    pub fn rank_upper_bound(&self) -> u64 {
        self.removed_rank + self.residual.col_count() as u64
    }
}

/// Runs the peel until the sets stabilize (or `max_rounds`).
///
/// Round `i`: a column joins `L_i` when at most one of its neighbors lies
/// outside `K_{i-1}`; a row joins `K_i` when it has a neighbor in `L_i`.
pub fn leaf_removal(m: &SparseSignMatrix, max_rounds: Option<usize>) -> PeelResult {
    let g = tanner(m);
    let nrows = m.row_count();
    let ncols = m.col_count();
    let mut in_k = vec![false; nrows];
    let mut in_l = vec![false; ncols];
    let mut l_sets = Vec::new();
    let mut k_sets = Vec::new();
    let mut rounds = 0usize;
    loop {
        rounds += 1;
        let mut changed = false;
        for (c, slot) in in_l.iter_mut().enumerate() {
            if *slot {
                continue;
            }
            let outside = g.col_neighbors(c).iter().filter(|&&r| !in_k[r as usize]).count();
            if outside <= 1 {
                *slot = true;
                changed = true;
            }
        }
        for (r, slot) in in_k.iter_mut().enumerate() {
            if *slot {
                continue;
            }
            if g.row_neighbors(r).iter().any(|&c| in_l[c as usize]) {
                *slot = true;
                changed = true;
            }
        }
        l_sets.push((0..ncols as u32).filter(|&c| in_l[c as usize]).collect::<Vec<_>>());
        k_sets.push((0..nrows as u32).filter(|&r| in_k[r as usize]).collect::<Vec<_>>());
        if !changed || max_rounds.is_some_and(|m| rounds >= m) {
            break;
        }
    }
    let keep_row: Vec<bool> = in_k.iter().map(|&b| !b).collect();
    let keep_col: Vec<bool> = in_l.iter().map(|&b| !b).collect();
    let residual = m.submatrix(&keep_row, &keep_col);
    let removed_rank = in_k.iter().filter(|&&b| b).count() as u64;
    PeelResult { l_sets, k_sets, residual, removed_rank }
}

/// Upper bound on the rank from peeling both the matrix and its transpose.
pub fn leaf_removal_transpose_bound(m: &SparseSignMatrix) -> u64 {
    let direct = leaf_removal(m, None).rank_upper_bound();
    let transposed = leaf_removal(&m.transpose(), None).rank_upper_bound();
    direct.min(transposed)
}
