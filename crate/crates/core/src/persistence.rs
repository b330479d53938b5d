//! Verbose persistence diagrams of the filtration, computed exactly by three
//! independent engines that must agree:
//!
//! * [`reduce_diagram`] — left-to-right boundary-matrix reduction in
//!   filtration order over a prime field, one atom per (creator, destroyer)
//!   pair, including zero-persistence atoms on the diagonal;
//! * [`betti_grid`] — the rank-difference identity
//!   `dim(Z(r) ∩ B(s)) = rank K(s) - rank M(r, s)`, evaluated by streaming
//!   elimination sweeps;
//! * [`good_basis`] — a greedy cycle basis picked in (birth, death) preorder
//!   whose restriction counts the same dimensions, at oracle scale.
//!
//! Homology is reduced: a virtual empty face precedes everything, so in
//! dimension zero the cycle space has dimension one less than the vertex
//! count. The diagram in dimension `k - 1` always carries total multiplicity
//! `C(n-1, k)`.

use std::collections::HashMap;

use crate::complex::{FaceIndexer, LMFiltration};
use crate::field::PrimeField;
use crate::linalg::{row_axpy, RowEliminator};
use crate::{binomial, Error, Result, PRIME_CONFIRM, PRIME_PRIMARY};

/// Weighted multiset of (birth, death) atoms normalized by the cycle count
/// of the full complex.
#[derive(Debug, Clone, PartialEq)]
pub struct VerboseDiagram {
    n: u32,
    k: u32,
    seed: u64,
    /// `(birth, death, multiplicity)`, sorted by (birth, death).
    atoms: Vec<(f64, f64, u64)>,
    /// `C(n-1, k)`; the full diagram's total multiplicity.
    normalizer: u64,
}

impl VerboseDiagram {
    pub fn from_parts(
        n: u32,
        k: u32,
        seed: u64,
        normalizer: u64,
        mut atoms: Vec<(f64, f64, u64)>,
    ) -> Result<Self> {
        for &(b, d, m) in &atoms {
            if b.is_nan() || d.is_nan() || b > d || m == 0 {
                return Err(Error::InvalidParameters(format!("bad atom ({b}, {d}, {m})")));
            }
        }
        atoms.sort_by(|a, b| (a.0, a.1).partial_cmp(&(b.0, b.1)).unwrap());
        Ok(VerboseDiagram { n, k, seed, atoms, normalizer })
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

    pub fn atoms(&self) -> &[(f64, f64, u64)] {
        &self.atoms
    }

    pub fn normalizer(&self) -> u64 {
        self.normalizer
    }

    pub fn total_multiplicity(&self) -> u64 {
        self.atoms.iter().map(|a| a.2).sum()
    }

    /// Measure of `[0, r] x [0, s]`: atoms with `b <= r` and `d <= s`,
    /// normalized.
    pub fn cdf(&self, r: f64, s: f64) -> f64 {
        self.count_box(r, s) as f64 / self.normalizer as f64
    }

    /// Atom multiplicity in `[0, r] x [0, s]`.
    pub fn count_box(&self, r: f64, s: f64) -> u64 {
        self.atoms.iter().filter(|&&(b, d, _)| b <= r && d <= s).map(|a| a.2).sum()
    }

    /// Normalized mass carried by zero-persistence atoms.
    pub fn diagonal_mass(&self) -> f64 {
        self.diagonal_multiplicity() as f64 / self.normalizer as f64
    }

    pub fn diagonal_multiplicity(&self) -> u64 {
        self.atoms.iter().filter(|&&(b, d, _)| b == d).map(|a| a.2).sum()
    }

    /// Restriction to strictly-positive persistence: drops `b == d` atoms,
    /// keeping the original normalizer (the result is a sub-probability
    /// multiset).
    pub fn off_diagonal(&self) -> VerboseDiagram {
        VerboseDiagram {
            n: self.n,
            k: self.k,
            seed: self.seed,
            atoms: self.atoms.iter().copied().filter(|&(b, d, _)| b < d).collect(),
            normalizer: self.normalizer,
        }
    }

    /// Normalized mass with death time exceeding `u`.
    pub fn tail_mass(&self, u: f64) -> f64 {
        self.atoms.iter().filter(|&&(_, d, _)| d > u).map(|a| a.2).sum::<u64>() as f64
            / self.normalizer as f64
    }

    /// Exact integral of an observable against the diagram.
    pub fn integrate(&self, f: &crate::observable::Observable) -> f64 {
        self.atoms.iter().map(|&(b, d, m)| m as f64 * f.eval(b, d)).sum::<f64>()
            / self.normalizer as f64
    }
}

/// Times of every face, dimension by dimension, cascaded down from the top.
fn times_by_dimension(f: &LMFiltration) -> Vec<Vec<f64>> {
    let k = f.k();
    let n = f.n();
    let mut times: Vec<Vec<f64>> = vec![Vec::new(); k as usize + 1];
    times[k as usize] = f.top_times().to_vec();
    for d in (0..k).rev() {
        let upper = FaceIndexer::new(n, d + 2).expect("valid");
        let lower = FaceIndexer::new(n, d + 1).expect("valid");
        let mut t = vec![f64::INFINITY; lower.count() as usize];
        let mut facet = Vec::with_capacity(d as usize + 1);
        for (verts, &time) in upper.iter().zip(times[d as usize + 1].iter()) {
            for drop in 0..verts.len() {
                facet.clear();
                facet.extend(
                    verts.iter().enumerate().filter(|(i, _)| *i != drop).map(|(_, &v)| v),
                );
                let r = lower.rank(&facet) as usize;
                if time < t[r] {
                    t[r] = time;
                }
            }
        }
        times[d as usize] = t;
    }
    times
}

/// Boundary-matrix reduction over the primary prime.
pub fn reduce_diagram(f: &LMFiltration) -> VerboseDiagram {
    reduce_diagram_with_prime(f, PRIME_PRIMARY)
}

/// Boundary-matrix reduction of the whole filtration over `Z/p`.
///
/// Faces are ordered by (time, dimension, colex rank) after a virtual empty
/// face, so a top face follows the facets it promotes at the shared arrival
/// time. One atom is emitted per destroyed `k-1`-cycle.
pub fn reduce_diagram_with_prime(f: &LMFiltration, p: u64) -> VerboseDiagram {
    let field = PrimeField::new(p);
    let k = f.k();
    let n = f.n();
    let times = times_by_dimension(f);

    #[derive(Clone, Copy)]
    struct Entry {
        time: f64,
        dim: u32,
        rank: u64,
    }
    let mut order: Vec<Entry> = Vec::new();
    for (d, t) in times.iter().enumerate() {
        for (rank, &time) in t.iter().enumerate() {
            order.push(Entry { time, dim: d as u32, rank: rank as u64 });
        }
    }
    order.sort_by(|a, b| {
        (a.time, a.dim, a.rank).partial_cmp(&(b.time, b.dim, b.rank)).unwrap()
    });

    // position 0 is the empty face; real faces start at 1
    let mut pos_of: Vec<Vec<u32>> = times.iter().map(|t| vec![0u32; t.len()]).collect();
    for (i, e) in order.iter().enumerate() {
        pos_of[e.dim as usize][e.rank as usize] = i as u32 + 1;
    }
    let indexers: Vec<FaceIndexer> =
        (1..=k + 1).map(|j| FaceIndexer::new(n, j).expect("valid")).collect();

    // low position -> reduced column of its destroyer
    let mut owner: HashMap<u32, Vec<(u32, u64)>> = HashMap::new();
    let mut atom_counts: HashMap<(u64, u64), u64> = HashMap::new();
    let one = 1u64;
    let minus_one = field.from_i64(-1);

    let mut facet = Vec::new();
    for e in &order {
        // boundary column of this face, sorted by row position
        let mut col: Vec<(u32, u64)> = if e.dim == 0 {
            vec![(0, one)]
        } else {
            let upper = &indexers[e.dim as usize];
            let lower = &indexers[e.dim as usize - 1];
            let verts = upper.unrank(e.rank);
            let mut c = Vec::with_capacity(verts.len());
            for drop in 0..verts.len() {
                facet.clear();
                facet.extend(
                    verts.iter().enumerate().filter(|(i, _)| *i != drop).map(|(_, &v)| v),
                );
                let coeff = if drop % 2 == 0 { one } else { minus_one };
                c.push((pos_of[e.dim as usize - 1][lower.rank(&facet) as usize], coeff));
            }
            c.sort_unstable_by_key(|&(p, _)| p);
            c
        };

        while let Some(&(low, v)) = col.last() {
            match owner.get(&low) {
                Some(other) => {
                    // other's low coefficient is normalized to 1
                    col = row_axpy(&field, &col, v, other);
                }
                None => {
                    let inv = field.inv(v);
                    for e in col.iter_mut() {
                        e.1 = field.mul(e.1, inv);
                    }
                    if e.dim == k {
                        // destroyer of a k-1 cycle: look up the creator face
                        let creator_pos = low;
                        let creator = order[creator_pos as usize - 1];
                        debug_assert_eq!(creator.dim, k - 1);
                        let birth = creator.time;
                        let death = e.time;
                        *atom_counts.entry((birth.to_bits(), death.to_bits())).or_insert(0) += 1;
                    }
                    owner.insert(low, col);
                    break;
                }
            }
        }
    }

    let normalizer = binomial(n as u64 - 1, k as u64);
    let mut atoms: Vec<(f64, f64, u64)> = atom_counts
        .into_iter()
        .map(|((b, d), m)| (f64::from_bits(b), f64::from_bits(d), m))
        .collect();
    atoms.sort_by(|a, b| (a.0, a.1).partial_cmp(&(b.0, b.1)).unwrap());
    let total: u64 = atoms.iter().map(|a| a.2).sum();
    assert_eq!(
        total, normalizer,
        "reduction must destroy exactly the cycle space of the full complex"
    );
    VerboseDiagram { n, k, seed: f.seed(), atoms, normalizer }
}

/// `dim(Z(r) ∩ B(s))` over a grid of window corners.
#[derive(Debug, Clone, PartialEq)]
pub struct BettiGrid {
    r_times: Vec<f64>,
    s_times: Vec<f64>,
    /// `values[i][j]` at `(r_times[i], s_times[j])`.
    values: Vec<Vec<u64>>,
}

impl BettiGrid {
    pub fn r_times(&self) -> &[f64] {
        &self.r_times
    }

    pub fn s_times(&self) -> &[f64] {
        &self.s_times
    }

    pub fn values(&self) -> &[Vec<u64>] {
        &self.values
    }

    pub fn value(&self, i: usize, j: usize) -> u64 {
        self.values[i][j]
    }
}

/// One incidence row per top face: arrival time plus signed facet columns.
type IncidenceRows = Vec<(f64, Vec<(u32, i8)>)>;

/// Rows of the top-face incidence, sorted by arrival time.
fn sorted_rows(f: &LMFiltration) -> (IncidenceRows, Vec<f64>) {
    let facet_idx = f.facet_indexer();
    let facet_times = f.facet_times();
    let mut rows: IncidenceRows = Vec::with_capacity(f.top_times().len());
    let mut facet = Vec::new();
    for (verts, &t) in f.top_face_indexer().iter().zip(f.top_times().iter()) {
        let mut entries = Vec::with_capacity(verts.len());
        for drop in 0..verts.len() {
            facet.clear();
            facet.extend(verts.iter().enumerate().filter(|(i, _)| *i != drop).map(|(_, &v)| v));
            let sign = if drop % 2 == 0 { 1i8 } else { -1i8 };
            entries.push((facet_idx.rank(&facet) as u32, sign));
        }
        entries.sort_unstable_by_key(|&(c, _)| c);
        rows.push((t, entries));
    }
    rows.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    (rows, facet_times)
}

/// One elimination sweep: rank of the rows with time in `(r, s]` restricted
/// to the columns alive after `r`, recorded at each `s` in ascending order.
fn rank_sweep(
    rows: &[(f64, Vec<(u32, i8)>)],
    facet_times: &[f64],
    r: Option<f64>,
    s_sorted: &[f64],
    p: u64,
) -> Vec<u64> {
    let field = PrimeField::new(p);
    let mut elim = RowEliminator::new(p);
    let mut out = Vec::with_capacity(s_sorted.len());
    let mut next = 0usize;
    for &(t, ref entries) in rows {
        if let Some(r) = r {
            if t <= r {
                continue;
            }
        }
        while next < s_sorted.len() && s_sorted[next] < t {
            out.push(elim.rank());
            next += 1;
        }
        if next == s_sorted.len() {
            break;
        }
        let row: Vec<(u32, u64)> = entries
            .iter()
            .filter(|&&(c, _)| r.is_none_or(|r| facet_times[c as usize] > r))
            .map(|&(c, v)| (c, field.from_i64(v as i64)))
            .collect();
        elim.add_row(row);
    }
    while next < s_sorted.len() {
        out.push(elim.rank());
        next += 1;
    }
    out
}

/// Computes the grid over `Z/p` only; [`betti_grid`] cross-checks two primes.
pub fn betti_grid_with_prime(
    f: &LMFiltration,
    r_list: &[f64],
    s_list: &[f64],
    p: u64,
) -> Result<BettiGrid> {
    if r_list.is_empty() || s_list.is_empty() {
        return Err(Error::InvalidParameters("empty grid axis".into()));
    }
    let (rows, facet_times) = sorted_rows(f);

    let mut s_order: Vec<usize> = (0..s_list.len()).collect();
    s_order.sort_by(|&a, &b| s_list[a].partial_cmp(&s_list[b]).unwrap());
    let s_sorted: Vec<f64> = s_order.iter().map(|&j| s_list[j]).collect();

    // rank K(s) for every s
    let rank_k_sorted = rank_sweep(&rows, &facet_times, None, &s_sorted, p);
    let mut rank_k = vec![0u64; s_list.len()];
    for (pos, &j) in s_order.iter().enumerate() {
        rank_k[j] = rank_k_sorted[pos];
    }

    let mut values = vec![vec![0u64; s_list.len()]; r_list.len()];
    for (i, &r) in r_list.iter().enumerate() {
        let rank_m_sorted = rank_sweep(&rows, &facet_times, Some(r), &s_sorted, p);
        for (pos, &j) in s_order.iter().enumerate() {
            let s = s_list[j];
            values[i][j] = if r < s {
                rank_k[j]
                    .checked_sub(rank_m_sorted[pos])
                    .expect("window rank cannot exceed the full-window rank")
            } else {
                rank_k[j]
            };
        }
    }
    Ok(BettiGrid { r_times: r_list.to_vec(), s_times: s_list.to_vec(), values })
}

/// `dim(Z(r) ∩ B(s))` on the grid, computed over both working primes; a
/// disagreement aborts rather than returning a silent wrong answer.
pub fn betti_grid(f: &LMFiltration, r_list: &[f64], s_list: &[f64]) -> Result<BettiGrid> {
    let a = betti_grid_with_prime(f, r_list, s_list, PRIME_PRIMARY)?;
    let b = betti_grid_with_prime(f, r_list, s_list, PRIME_CONFIRM)?;
    for (ra, rb) in a.values.iter().zip(&b.values) {
        for (&va, &vb) in ra.iter().zip(rb) {
            if va != vb {
                return Err(Error::PrimeDisagreement {
                    p1: PRIME_PRIMARY,
                    p2: PRIME_CONFIRM,
                    r1: va,
                    r2: vb,
                });
            }
        }
    }
    Ok(a)
}

/// `dim Z_{k-1}(Y(r))`: present `k-1`-faces minus the rank of their boundary
/// into dimension `k-2` (the augmentation when `k = 1`), over both primes.
pub fn dim_cycles_at(f: &LMFiltration, r: f64) -> Result<u64> {
    if !(0.0..=f.n() as f64).contains(&r) {
        return Err(Error::InvalidParameters(format!("r = {r} outside [0, {}]", f.n())));
    }
    let facet_times = f.facet_times();
    let present: Vec<u64> = facet_times
        .iter()
        .enumerate()
        .filter(|&(_, &t)| t <= r)
        .map(|(i, _)| i as u64)
        .collect();
    if f.k() == 1 {
        // reduced zeroth cycles: vertex chains with zero coefficient sum
        return Ok(present.len().saturating_sub(1) as u64);
    }
    let facet_idx = f.facet_indexer();
    let sub_idx = FaceIndexer::new(f.n(), f.k() - 1).expect("valid");
    let mut rank = None;
    for p in [PRIME_PRIMARY, PRIME_CONFIRM] {
        let field = PrimeField::new(p);
        let mut elim = RowEliminator::new(p);
        let mut facet = Vec::new();
        for &fr in &present {
            let verts = facet_idx.unrank(fr);
            let mut row = Vec::with_capacity(verts.len());
            for drop in 0..verts.len() {
                facet.clear();
                facet.extend(
                    verts.iter().enumerate().filter(|(i, _)| *i != drop).map(|(_, &v)| v),
                );
                let coeff = field.from_i64(if drop % 2 == 0 { 1 } else { -1 });
                row.push((sub_idx.rank(&facet) as u32, coeff));
            }
            row.sort_unstable_by_key(|&(c, _)| c);
            elim.add_row(row);
        }
        match rank {
            None => rank = Some(elim.rank()),
            Some(r1) if r1 != elim.rank() => {
                return Err(Error::PrimeDisagreement {
                    p1: PRIME_PRIMARY,
                    p2: PRIME_CONFIRM,
                    r1,
                    r2: elim.rank(),
                });
            }
            _ => {}
        }
    }
    Ok(present.len() as u64 - rank.unwrap())
}

/// Persistent Betti number `dim Z(r) - dim(Z(r) ∩ B(s))`.
pub fn persistent_betti(f: &LMFiltration, r: f64, s: f64) -> Result<u64> {
    if !(0.0..=f.n() as f64).contains(&s) {
        return Err(Error::InvalidParameters(format!("s = {s} outside [0, {}]", f.n())));
    }
    let z = dim_cycles_at(f, r)?;
    let zb = betti_grid(f, &[r], &[s])?.value(0, 0);
    Ok(z.checked_sub(zb).expect("Z(r) contains Z(r) ∩ B(s)"))
}

/// A cycle basis adapted to every window subspace: within the basis, the
/// cycles born by `r` and dead by `s` span `Z(r) ∩ B(s)` for all `(r, s)`.
#[derive(Debug, Clone)]
pub struct GoodBasis {
    /// (birth, death) of each basis cycle, in selection order.
    pub pairs: Vec<(f64, f64)>,
    /// Dense coordinates over `Z/p`, indexed by facet colex rank.
    pub vectors: Vec<Vec<u64>>,
    pub prime: u64,
}

impl GoodBasis {
    /// Number of basis cycles with `b <= r` and `d <= s`.
    pub fn count_box(&self, r: f64, s: f64) -> u64 {
        self.pairs.iter().filter(|&&(b, d)| b <= r && d <= s).count() as u64
    }
}

/// Dense echelon helper over `Z/p`.
struct DenseSpan {
    field: PrimeField,
    /// rows in echelon form, leading coefficient 1
    rows: Vec<Vec<u64>>,
    pivots: Vec<usize>,
}

impl DenseSpan {
    fn new(p: u64) -> Self {
        DenseSpan { field: PrimeField::new(p), rows: Vec::new(), pivots: Vec::new() }
    }

    fn reduce(&self, mut v: Vec<u64>) -> Vec<u64> {
        for (row, &piv) in self.rows.iter().zip(&self.pivots) {
            let c = v[piv];
            if c != 0 {
                for (x, &y) in v.iter_mut().zip(row) {
                    *x = self.field.sub(*x, self.field.mul(c, y));
                }
            }
        }
        v
    }

    /// Adds `v` if independent; returns whether it was.
    fn insert(&mut self, v: Vec<u64>) -> bool {
        let mut v = self.reduce(v);
        let Some(piv) = v.iter().position(|&x| x != 0) else {
            return false;
        };
        let inv = self.field.inv(v[piv]);
        for x in v.iter_mut() {
            *x = self.field.mul(*x, inv);
        }
        self.rows.push(v);
        self.pivots.push(piv);
        true
    }

    fn dim(&self) -> usize {
        self.rows.len()
    }
}

/// Greedy good basis at oracle scale (`C(n-1, k) <= 200`).
///
/// Event-time pairs are visited in (birth, death) preorder; at each pair, any
/// boundary vector supported on the faces present at the birth time and not
/// yet spanned joins the basis with exactly that (birth, death).
pub fn good_basis(f: &LMFiltration) -> Result<GoodBasis> {
    let normalizer = binomial(f.n() as u64 - 1, f.k() as u64);
    if normalizer > 200 {
        return Err(Error::OracleScale(format!(
            "cycle space dimension {normalizer} exceeds the 200 oracle cap"
        )));
    }
    let p = PRIME_PRIMARY;
    let field = PrimeField::new(p);
    let (rows, facet_times) = sorted_rows(f);
    let ncols = facet_times.len();

    let mut events: Vec<f64> = rows.iter().map(|r| r.0).collect();
    events.sort_by(|a, b| a.partial_cmp(b).unwrap());

    // boundary row space after each event, as dense echelons
    let mut spans: Vec<DenseSpan> = Vec::with_capacity(events.len());
    {
        let mut span = DenseSpan::new(p);
        let mut row_iter = rows.iter().peekable();
        for &t in &events {
            while let Some(&&(rt, ref entries)) = row_iter.peek() {
                if rt > t {
                    break;
                }
                let mut dense = vec![0u64; ncols];
                for &(c, v) in entries {
                    dense[c as usize] = field.from_i64(v as i64);
                }
                span.insert(dense);
                row_iter.next();
            }
            spans.push(DenseSpan {
                field,
                rows: span.rows.clone(),
                pivots: span.pivots.clone(),
            });
        }
    }

    let mut chosen = DenseSpan::new(p);
    let mut pairs = Vec::new();
    let mut vectors = Vec::new();
    'outer: for &b in events.iter() {
        for (di, &d) in events.iter().enumerate() {
            if d < b {
                continue;
            }
            // subspace of the boundary space at d supported on faces present at b
            let span_d = &spans[di];
            let out_cols: Vec<usize> =
                (0..ncols).filter(|&c| facet_times[c] > b).collect();
            // left kernel of the restriction to out columns:
            // echelonize [A | I] by the A part
            let rdim = span_d.dim();
            if rdim == 0 {
                continue;
            }
            let mut aug: Vec<(Vec<u64>, Vec<u64>)> = span_d
                .rows
                .iter()
                .enumerate()
                .map(|(i, row)| {
                    let a: Vec<u64> = out_cols.iter().map(|&c| row[c]).collect();
                    let mut id = vec![0u64; rdim];
                    id[i] = 1;
                    (a, id)
                })
                .collect();
            let mut pivot_rows: Vec<usize> = Vec::new();
            for col in 0..out_cols.len() {
                let Some(pr) = (0..rdim)
                    .find(|r| !pivot_rows.contains(r) && aug[*r].0[col] != 0)
                else {
                    continue;
                };
                pivot_rows.push(pr);
                let inv = field.inv(aug[pr].0[col]);
                let (a_part, x_part) = &mut aug[pr];
                for x in a_part.iter_mut().chain(x_part.iter_mut()) {
                    *x = field.mul(*x, inv);
                }
                for r in 0..rdim {
                    if r != pr && aug[r].0[col] != 0 {
                        let c = aug[r].0[col];
                        let (head, tail) = if r < pr {
                            let (h, t) = aug.split_at_mut(pr);
                            (&mut h[r], &t[0])
                        } else {
                            let (h, t) = aug.split_at_mut(r);
                            (&mut t[0], &h[pr])
                        };
                        for (x, &y) in head.0.iter_mut().zip(&tail.0) {
                            *x = field.sub(*x, field.mul(c, y));
                        }
                        for (x, &y) in head.1.iter_mut().zip(&tail.1) {
                            *x = field.sub(*x, field.mul(c, y));
                        }
                    }
                }
            }
            for (r, (a, x)) in aug.iter().enumerate() {
                if pivot_rows.contains(&r) || a.iter().any(|&v| v != 0) {
                    continue;
                }
                // x combines boundary rows into a vector supported at b
                let mut w = vec![0u64; ncols];
                for (coef, row) in x.iter().zip(&span_d.rows) {
                    if *coef != 0 {
                        for (wc, &rc) in w.iter_mut().zip(row) {
                            *wc = field.add(*wc, field.mul(*coef, rc));
                        }
                    }
                }
                if chosen.insert(w.clone()) {
                    pairs.push((b, d));
                    vectors.push(w);
                    if vectors.len() as u64 == normalizer {
                        break 'outer;
                    }
                }
            }
        }
    }
    assert_eq!(
        vectors.len() as u64,
        normalizer,
        "greedy selection must exhaust the cycle space"
    );
    Ok(GoodBasis { pairs, vectors, prime: p })
}
