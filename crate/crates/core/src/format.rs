//! On-disk formats.
//!
//! Binary files start with a 16-byte preamble: the magic `RPDPMATX`, a
//! little-endian `u32` version and a `u32` kind tag. All later integers are
//! `u64` and all reals `f64`, little-endian.
//!
//! Kind 1, published matrix: `n, m, sigma, epsilon, delta, seed,
//! noise_seed`, one calibrated byte plus 7 zero bytes, the 32-byte graph
//! digest, then `n·m` entries row-major. Absent `epsilon`/`delta` are NaN.
//!
//! Kind 2, eigen basis: `n, k`, one source byte plus 7 zero bytes, the `k`
//! values, then `n·k` vector entries row-major.
//!
//! Anything not starting with the magic is treated as a text edge list.

use std::collections::HashMap;
use std::io::{self, BufRead, Read, Write};

use crate::analytics::{Clustering, PccScores};
use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::publisher::{PublishMeta, PublishedMatrix};
use crate::scalar::Scalar;
use crate::spectral::{BasisSource, EigenBasis};

pub const MAGIC: &[u8; 8] = b"RPDPMATX";
pub const VERSION: u32 = 1;
const KIND_PUBLISHED: u32 = 1;
const KIND_BASIS: u32 = 2;

/// What a file holds, judged by its first bytes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FileKind {
    Published,
    Basis,
    EdgeList,
}

/// Classifies a file from (at least) its first 16 bytes.
pub fn sniff(head: &[u8]) -> Result<FileKind> {
    if head.len() < 8 || &head[..8] != MAGIC {
        return Ok(FileKind::EdgeList);
    }
    if head.len() < 16 {
        return Err(Error::Format("truncated header".into()));
    }
    let version = u32::from_le_bytes(head[8..12].try_into().unwrap());
    if version != VERSION {
        return Err(Error::Format(format!("unsupported format version {version}")));
    }
    match u32::from_le_bytes(head[12..16].try_into().unwrap()) {
        KIND_PUBLISHED => Ok(FileKind::Published),
        KIND_BASIS => Ok(FileKind::Basis),
        other => Err(Error::Format(format!("unknown file kind {other}"))),
    }
}

fn put_u64<W: Write>(w: &mut W, v: u64) -> io::Result<()> {
    w.write_all(&v.to_le_bytes())
}

fn put_f64<W: Write>(w: &mut W, v: f64) -> io::Result<()> {
    w.write_all(&v.to_le_bytes())
}

fn preamble<W: Write>(w: &mut W, kind: u32) -> io::Result<()> {
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&kind.to_le_bytes())
}

fn put_matrix<W: Write, T: Scalar>(w: &mut W, m: &DenseMatrix<T>) -> io::Result<()> {
    let mut buf = Vec::with_capacity(m.cols() * 8);
    for i in 0..m.rows() {
        buf.clear();
        for v in m.row(i) {
            buf.extend_from_slice(&v.as_f64().to_le_bytes());
        }
        w.write_all(&buf)?;
    }
    Ok(())
}

struct Reader<R> {
    inner: R,
}

impl<R: Read> Reader<R> {
    fn bytes<const N: usize>(&mut self) -> Result<[u8; N]> {
        let mut b = [0u8; N];
        self.inner.read_exact(&mut b).map_err(|e| match e.kind() {
            io::ErrorKind::UnexpectedEof => Error::Format("file is truncated".into()),
            _ => Error::Io(e),
        })?;
        Ok(b)
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.bytes()?))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.bytes()?))
    }

    fn usize(&mut self) -> Result<usize> {
        let v = self.u64()?;
        usize::try_from(v).map_err(|_| Error::Format(format!("size {v} does not fit in memory")))
    }

    fn preamble(&mut self, want: FileKind) -> Result<()> {
        let head: [u8; 16] = self.bytes()?;
        let kind = sniff(&head)?;
        if kind != want {
            return Err(Error::Format(format!("expected a {want:?} file, found {kind:?}")));
        }
        Ok(())
    }

    fn matrix<T: Scalar>(&mut self, rows: usize, cols: usize) -> Result<DenseMatrix<T>> {
        let len = rows
            .checked_mul(cols)
            .ok_or_else(|| Error::Format(format!("{rows}x{cols} overflows")))?;
        let mut data = Vec::with_capacity(len);
        for _ in 0..len {
            data.push(T::of(self.f64()?));
        }
        let mut trailing = [0u8; 1];
        if self.inner.read(&mut trailing)? != 0 {
            return Err(Error::Format("trailing bytes after payload".into()));
        }
        DenseMatrix::from_vec(rows, cols, data)
    }
}

fn opt_to_f64(v: Option<f64>) -> f64 {
    v.unwrap_or(f64::NAN)
}

fn f64_to_opt(v: f64) -> Option<f64> {
    (!v.is_nan()).then_some(v)
}

pub fn write_published<W: Write, T: Scalar>(mut w: W, p: &PublishedMatrix<T>) -> io::Result<()> {
    let meta = p.meta();
    preamble(&mut w, KIND_PUBLISHED)?;
    put_u64(&mut w, meta.n as u64)?;
    put_u64(&mut w, meta.m as u64)?;
    put_f64(&mut w, meta.sigma)?;
    put_f64(&mut w, opt_to_f64(meta.epsilon))?;
    put_f64(&mut w, opt_to_f64(meta.delta))?;
    put_u64(&mut w, meta.seed)?;
    put_u64(&mut w, meta.noise_seed)?;
    w.write_all(&[meta.calibrated as u8, 0, 0, 0, 0, 0, 0, 0])?;
    w.write_all(&meta.graph_digest)?;
    put_matrix(&mut w, p.data())?;
    w.flush()
}

pub fn read_published<R: Read, T: Scalar>(r: R) -> Result<PublishedMatrix<T>> {
    let mut r = Reader { inner: r };
    r.preamble(FileKind::Published)?;
    let n = r.usize()?;
    let m = r.usize()?;
    let sigma = r.f64()?;
    let epsilon = f64_to_opt(r.f64()?);
    let delta = f64_to_opt(r.f64()?);
    let seed = r.u64()?;
    let noise_seed = r.u64()?;
    let flags: [u8; 8] = r.bytes()?;
    let calibrated = match flags[0] {
        0 => false,
        1 => true,
        other => return Err(Error::Format(format!("bad calibrated flag {other}"))),
    };
    let graph_digest: [u8; 32] = r.bytes()?;
    let data = r.matrix(n, m)?;
    PublishedMatrix::from_parts(
        data,
        PublishMeta {
            n,
            m,
            sigma,
            epsilon,
            delta,
            seed,
            noise_seed,
            calibrated,
            graph_digest,
        },
    )
}

pub fn write_basis<W: Write, T: Scalar>(mut w: W, b: &EigenBasis<T>) -> io::Result<()> {
    preamble(&mut w, KIND_BASIS)?;
    put_u64(&mut w, b.n() as u64)?;
    put_u64(&mut w, b.k() as u64)?;
    w.write_all(&[b.source().code(), 0, 0, 0, 0, 0, 0, 0])?;
    for v in b.values() {
        put_f64(&mut w, v.as_f64())?;
    }
    put_matrix(&mut w, b.vectors())?;
    w.flush()
}

pub fn read_basis<R: Read, T: Scalar>(r: R) -> Result<EigenBasis<T>> {
    let mut r = Reader { inner: r };
    r.preamble(FileKind::Basis)?;
    let n = r.usize()?;
    let k = r.usize()?;
    let flags: [u8; 8] = r.bytes()?;
    let source = BasisSource::from_code(flags[0])?;
    let mut values = Vec::with_capacity(k);
    for _ in 0..k {
        values.push(T::of(r.f64()?));
    }
    let vectors = r.matrix(n, k)?;
    EigenBasis::new(vectors, values, source)
}

fn join<T: Scalar>(row: &[T]) -> String {
    row.iter().map(|v| v.as_f64().to_string()).collect::<Vec<_>>().join(",")
}

/// Header `c0,…,c{m-1}`, then one line per row.
pub fn write_published_csv<W: Write, T: Scalar>(mut w: W, p: &PublishedMatrix<T>) -> io::Result<()> {
    let header: Vec<String> = (0..p.m()).map(|j| format!("c{j}")).collect();
    writeln!(w, "{}", header.join(","))?;
    for i in 0..p.n() {
        writeln!(w, "{}", join(p.data().row(i)))?;
    }
    w.flush()
}

/// First line `values,λ_1,…,λ_k`, then one line of k coordinates per node.
pub fn write_basis_csv<W: Write, T: Scalar>(mut w: W, b: &EigenBasis<T>) -> io::Result<()> {
    writeln!(w, "values,{}", join(b.values()))?;
    for i in 0..b.n() {
        writeln!(w, "{}", join(b.vectors().row(i)))?;
    }
    w.flush()
}

fn parse_reals(line: &str, lineno: usize) -> Result<Vec<f64>> {
    line.split(',')
        .map(|t| {
            t.trim().parse::<f64>().map_err(|_| Error::Parse {
                line: lineno,
                message: format!("not a number: {t:?}"),
            })
        })
        .collect()
}

/// Reads [`write_basis_csv`] output. The source tag is not stored in CSV.
pub fn read_basis_csv<R: BufRead, T: Scalar>(r: R, source: BasisSource) -> Result<EigenBasis<T>> {
    let mut lines = r.lines();
    let first = lines.next().ok_or_else(|| Error::Format("empty basis CSV".into()))??;
    let Some(rest) = first.strip_prefix("values,") else {
        return Err(Error::Parse {
            line: 1,
            message: "first line must start with \"values,\"".into(),
        });
    };
    let values = parse_reals(rest, 1)?;
    let k = values.len();
    let mut data = Vec::new();
    let mut n = 0;
    for (idx, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let row = parse_reals(&line, idx + 2)?;
        if row.len() != k {
            return Err(Error::Parse {
                line: idx + 2,
                message: format!("expected {k} columns, found {}", row.len()),
            });
        }
        data.extend(row.into_iter().map(T::of));
        n += 1;
    }
    EigenBasis::new(
        DenseMatrix::from_vec(n, k, data)?,
        values.into_iter().map(T::of).collect(),
        source,
    )
}

/// `node_id,cluster` per node, in node order.
pub fn write_clustering_csv<W: Write>(mut w: W, c: &Clustering, node_ids: &[u64]) -> Result<()> {
    if node_ids.len() != c.n() {
        return Err(Error::Dimension(format!("{} ids for {} labels", node_ids.len(), c.n())));
    }
    writeln!(w, "node_id,cluster")?;
    for (id, l) in node_ids.iter().zip(c.labels()) {
        writeln!(w, "{id},{l}")?;
    }
    w.flush()?;
    Ok(())
}

/// Reads `node_id,cluster` rows against the node ids of a graph. Every node
/// must appear exactly once; `k` is one more than the largest label.
pub fn read_clustering_csv<R: BufRead>(r: R, node_ids: &[u64]) -> Result<Clustering> {
    let index: HashMap<u64, usize> = node_ids.iter().enumerate().map(|(i, &id)| (id, i)).collect();
    let mut labels: Vec<Option<usize>> = vec![None; node_ids.len()];
    for (idx, line) in r.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        let t = line.trim();
        if t.is_empty() || (lineno == 1 && t == "node_id,cluster") {
            continue;
        }
        let bad = |message: String| Error::Parse { line: lineno, message };
        let (id, label) = t.split_once(',').ok_or_else(|| bad("expected node_id,cluster".into()))?;
        let id: u64 = id.trim().parse().map_err(|_| bad(format!("bad node id {id:?}")))?;
        let label: usize = label.trim().parse().map_err(|_| bad(format!("bad cluster {label:?}")))?;
        let &i = index.get(&id).ok_or_else(|| bad(format!("node {id} is not in the graph")))?;
        if labels[i].replace(label).is_some() {
            return Err(bad(format!("node {id} listed twice")));
        }
    }
    let labels: Vec<usize> = labels
        .into_iter()
        .enumerate()
        .map(|(i, l)| l.ok_or_else(|| Error::Format(format!("node {} has no label", node_ids[i]))))
        .collect::<Result<_>>()?;
    let k = labels.iter().max().map_or(1, |m| m + 1);
    Clustering::new(labels, k)
}

/// `node_id,score` (plus a 1-based `rank` column when `with_rank`) for the
/// nodes listed in `order`, in that order.
pub fn write_pcc_csv<W: Write>(
    mut w: W,
    scores: &PccScores,
    node_ids: &[u64],
    order: &[usize],
    with_rank: bool,
) -> Result<()> {
    if node_ids.len() != scores.len() {
        return Err(Error::Dimension(format!("{} ids for {} scores", node_ids.len(), scores.len())));
    }
    writeln!(w, "{}", if with_rank { "node_id,score,rank" } else { "node_id,score" })?;
    for (r, &i) in order.iter().enumerate() {
        if with_rank {
            writeln!(w, "{},{},{}", node_ids[i], scores.scores()[i], r + 1)?;
        } else {
            writeln!(w, "{},{}", node_ids[i], scores.scores()[i])?;
        }
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn meta(n: usize, m: usize) -> PublishMeta {
        PublishMeta {
            n,
            m,
            sigma: 0.25,
            epsilon: None,
            delta: Some(0.01),
            seed: 7,
            noise_seed: u64::MAX,
            calibrated: false,
            graph_digest: [9; 32],
        }
    }

    #[test]
    fn published_round_trip() {
        let data = DenseMatrix::from_fn(3, 2, |i, j| i as f64 - 0.1 * j as f64);
        let p = PublishedMatrix::from_parts(data, meta(3, 2)).unwrap();
        let mut buf = Vec::new();
        write_published(&mut buf, &p).unwrap();
        assert_eq!(buf.len(), 16 + 7 * 8 + 8 + 32 + 6 * 8);
        assert_eq!(sniff(&buf).unwrap(), FileKind::Published);
        let back: PublishedMatrix<f64> = read_published(&buf[..]).unwrap();
        assert_eq!(back, p);
        assert!(matches!(read_published::<_, f64>(&buf[..buf.len() - 1]), Err(Error::Format(_))));
        assert!(read_basis::<_, f64>(&buf[..]).is_err());
    }

    #[test]
    fn basis_round_trip() {
        let v = DenseMatrix::from_columns(2, &[vec![0.6, 0.8], vec![-0.8, 0.6]]).unwrap();
        let b = EigenBasis::new(v, vec![2.5, -1.0], BasisSource::Lnpp).unwrap();
        let mut buf = Vec::new();
        write_basis(&mut buf, &b).unwrap();
        assert_eq!(sniff(&buf).unwrap(), FileKind::Basis);
        assert_eq!(read_basis::<_, f64>(&buf[..]).unwrap(), b);
        let mut csv = Vec::new();
        write_basis_csv(&mut csv, &b).unwrap();
        assert!(csv.starts_with(b"values,2.5,-1\n"));
        assert_eq!(read_basis_csv::<_, f64>(&csv[..], BasisSource::Lnpp).unwrap(), b);
    }

    #[test]
    fn sniff_text_and_bad_headers() {
        assert_eq!(sniff(b"0 1\n1 2\n").unwrap(), FileKind::EdgeList);
        let mut head = MAGIC.to_vec();
        head.extend_from_slice(&2u32.to_le_bytes());
        head.extend_from_slice(&1u32.to_le_bytes());
        assert!(sniff(&head).is_err());
    }

    #[test]
    fn clustering_csv_round_trip() {
        let c = Clustering::new(vec![1, 0, 1], 2).unwrap();
        let ids = [10, 20, 35];
        let mut buf = Vec::new();
        write_clustering_csv(&mut buf, &c, &ids).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap(), "node_id,cluster\n10,1\n20,0\n35,1\n");
        assert_eq!(read_clustering_csv(&buf[..], &ids).unwrap(), c);
        assert!(read_clustering_csv(&b"node_id,cluster\n10,1\n"[..], &ids).is_err());
    }

    #[test]
    fn pcc_csv_rows() {
        let s = PccScores::new(vec![0.5, 1.5], 1, false).unwrap();
        let mut buf = Vec::new();
        write_pcc_csv(&mut buf, &s, &[4, 9], &[1, 0], true).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "node_id,score,rank\n9,1.5,1\n4,0.5,2\n");
    }
}
