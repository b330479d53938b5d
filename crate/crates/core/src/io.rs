//! Plain-text file formats.
//!
//! * Filtration dump: header `n k seed`, then one line `v1 .. v_{k+1} time`
//!   per top face, times printed with full round-trip precision.
//! * Matrix file: header `rows cols`, then triplets `r c v` with
//!   `v` in `{-1, 1}` and 0-based row/column indices.
//! * Diagram file: header `n k seed normalizer`, then lines
//!   `birth death multiplicity`.

use std::io::{BufRead, Write};

use crate::complex::{FaceIndexer, LMFiltration};
use crate::linalg::SparseSignMatrix;
use crate::persistence::VerboseDiagram;
use crate::{Error, Result};

pub fn write_filtration<W: Write>(f: &LMFiltration, w: &mut W) -> Result<()> {
    writeln!(w, "{} {} {}", f.n(), f.k(), f.seed())?;
    for (verts, &t) in f.top_face_indexer().iter().zip(f.top_times().iter()) {
        for v in &verts {
            write!(w, "{v} ")?;
        }
        writeln!(w, "{t}")?;
    }
    Ok(())
}

pub fn read_filtration<R: BufRead>(r: R) -> Result<LMFiltration> {
    let mut lines = r.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty filtration file".into()))??;
    let parts: Vec<&str> = header.split_whitespace().collect();
    let [n, k, seed] = parts.as_slice() else {
        return Err(Error::Parse(format!("bad filtration header `{header}`")));
    };
    let n: u32 = n.parse().map_err(|_| Error::Parse(format!("bad n `{n}`")))?;
    let k: u32 = k.parse().map_err(|_| Error::Parse(format!("bad k `{k}`")))?;
    let seed: u64 = seed.parse().map_err(|_| Error::Parse(format!("bad seed `{seed}`")))?;
    let idx = FaceIndexer::new(n, k + 1)
        .map_err(|e| Error::Parse(format!("bad dimensions: {e}")))?;
    let count = idx.count() as usize;
    let mut times = vec![f64::NAN; count];
    let mut seen = 0usize;
    for line in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != k as usize + 2 {
            return Err(Error::Parse(format!("expected {} fields: `{line}`", k + 2)));
        }
        let mut verts = Vec::with_capacity(k as usize + 1);
        for f in &fields[..fields.len() - 1] {
            let v: u32 = f.parse().map_err(|_| Error::Parse(format!("bad vertex `{f}`")))?;
            if v == 0 || v > n {
                return Err(Error::Parse(format!("vertex {v} outside [1, {n}]")));
            }
            verts.push(v);
        }
        if !verts.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::Parse(format!("vertices not strictly increasing: `{line}`")));
        }
        let t: f64 = fields[fields.len() - 1]
            .parse()
            .map_err(|_| Error::Parse(format!("bad time in `{line}`")))?;
        let rank = idx.rank(&verts) as usize;
        if !times[rank].is_nan() {
            return Err(Error::Parse(format!("duplicate face in `{line}`")));
        }
        times[rank] = t;
        seen += 1;
    }
    if seen != count {
        return Err(Error::Parse(format!("expected {count} top faces, found {seen}")));
    }
    LMFiltration::from_parts(n, k, seed, times)
}

pub fn write_matrix<W: Write>(m: &SparseSignMatrix, w: &mut W) -> Result<()> {
    writeln!(w, "{} {}", m.row_count(), m.col_count())?;
    let mut entries = m.entries().to_vec();
    entries.sort_unstable();
    for (r, c, v) in entries {
        writeln!(w, "{r} {c} {v}")?;
    }
    Ok(())
}

pub fn read_matrix<R: BufRead>(r: R) -> Result<SparseSignMatrix> {
    let mut lines = r.lines();
    let header = lines.next().ok_or_else(|| Error::Parse("empty matrix file".into()))??;
    let parts: Vec<&str> = header.split_whitespace().collect();
    let [rows, cols] = parts.as_slice() else {
        return Err(Error::Parse(format!("bad matrix header `{header}`")));
    };
    let rows: u64 = rows.parse().map_err(|_| Error::Parse(format!("bad row count `{rows}`")))?;
    let cols: u64 = cols.parse().map_err(|_| Error::Parse(format!("bad col count `{cols}`")))?;
    let mut entries = Vec::new();
    for line in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let [r, c, v] = fields.as_slice() else {
            return Err(Error::Parse(format!("expected `r c v`: `{line}`")));
        };
        let r: u32 = r.parse().map_err(|_| Error::Parse(format!("bad row `{r}`")))?;
        let c: u32 = c.parse().map_err(|_| Error::Parse(format!("bad col `{c}`")))?;
        let v: i8 = v.parse().map_err(|_| Error::Parse(format!("bad value `{v}`")))?;
        entries.push((r, c, v));
    }
    SparseSignMatrix::new((0..rows).collect(), (0..cols).collect(), entries)
        .map_err(|e| Error::Parse(format!("{e}")))
}

pub fn write_diagram<W: Write>(d: &VerboseDiagram, w: &mut W) -> Result<()> {
    writeln!(w, "{} {} {} {}", d.n(), d.k(), d.seed(), d.normalizer())?;
    for &(b, dd, m) in d.atoms() {
        writeln!(w, "{b} {dd} {m}")?;
    }
    Ok(())
}

pub fn read_diagram<R: BufRead>(r: R) -> Result<VerboseDiagram> {
    let mut lines = r.lines();
    let header = lines.next().ok_or_else(|| Error::Parse("empty diagram file".into()))??;
    let parts: Vec<&str> = header.split_whitespace().collect();
    let [n, k, seed, norm] = parts.as_slice() else {
        return Err(Error::Parse(format!("bad diagram header `{header}`")));
    };
    let n: u32 = n.parse().map_err(|_| Error::Parse(format!("bad n `{n}`")))?;
    let k: u32 = k.parse().map_err(|_| Error::Parse(format!("bad k `{k}`")))?;
    let seed: u64 = seed.parse().map_err(|_| Error::Parse(format!("bad seed `{seed}`")))?;
    let norm: u64 = norm.parse().map_err(|_| Error::Parse(format!("bad normalizer `{norm}`")))?;
    let mut atoms = Vec::new();
    for line in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let [b, d, m] = fields.as_slice() else {
            return Err(Error::Parse(format!("expected `birth death multiplicity`: `{line}`")));
        };
        let b: f64 = b.parse().map_err(|_| Error::Parse(format!("bad birth `{b}`")))?;
        let d: f64 = d.parse().map_err(|_| Error::Parse(format!("bad death `{d}`")))?;
        let m: u64 = m.parse().map_err(|_| Error::Parse(format!("bad multiplicity `{m}`")))?;
        atoms.push((b, d, m));
    }
    VerboseDiagram::from_parts(n, k, seed, norm, atoms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::sample_filtration;
    use crate::persistence::reduce_diagram;

    #[test]
    fn filtration_roundtrip_is_exact() {
        let f = sample_filtration(7, 2, 99).unwrap();
        let mut buf = Vec::new();
        write_filtration(&f, &mut buf).unwrap();
        let g = read_filtration(&buf[..]).unwrap();
        assert_eq!(f.n(), g.n());
        assert_eq!(f.k(), g.k());
        assert_eq!(f.seed(), g.seed());
        assert_eq!(f.top_times(), g.top_times());
    }

    #[test]
    fn matrix_roundtrip() {
        let f = sample_filtration(6, 1, 4).unwrap();
        let m = f.coboundary_matrix(3.0, Some(1.0)).unwrap();
        let mut buf = Vec::new();
        write_matrix(&m, &mut buf).unwrap();
        let m2 = read_matrix(&buf[..]).unwrap();
        assert_eq!(m.row_count(), m2.row_count());
        assert_eq!(m.col_count(), m2.col_count());
        let mut a = m.entries().to_vec();
        let mut b = m2.entries().to_vec();
        a.sort_unstable();
        b.sort_unstable();
        assert_eq!(a, b);
    }

    #[test]
    fn diagram_roundtrip() {
        let f = sample_filtration(8, 1, 12).unwrap();
        let d = reduce_diagram(&f);
        let mut buf = Vec::new();
        write_diagram(&d, &mut buf).unwrap();
        let d2 = read_diagram(&buf[..]).unwrap();
        assert_eq!(d, d2);
    }

    #[test]
    fn rejects_malformed_inputs() {
        assert!(read_filtration(&b"1"[..]).is_err());
        assert!(read_matrix(&b"2 2\n0 0 3\n"[..]).is_err());
        assert!(read_diagram(&b"4 1 0 3\n2.0 1.0 1\n"[..]).is_err());
    }
}
