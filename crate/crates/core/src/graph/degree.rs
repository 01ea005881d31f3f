use std::collections::BTreeMap;
use std::io::{self, Write};

use super::SparseGraph;

/// `(degree, node_count)` pairs, ascending by degree, zero counts omitted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeHistogram {
    pub pairs: Vec<(usize, usize)>,
}

pub fn degree_distribution(g: &SparseGraph) -> DegreeHistogram {
    let mut counts = BTreeMap::new();
    for i in 0..g.n() {
        *counts.entry(g.degree(i)).or_insert(0usize) += 1;
    }
    DegreeHistogram {
        pairs: counts.into_iter().collect(),
    }
}

impl DegreeHistogram {
    pub fn total_nodes(&self) -> usize {
        self.pairs.iter().map(|&(_, c)| c).sum()
    }

    /// Least-squares slope of `ln(count)` against `ln(degree)` over degrees in
    /// `[min_degree, max_degree]`. `None` with fewer than two usable points.
    pub fn log_log_slope(&self, min_degree: usize, max_degree: usize) -> Option<f64> {
        let pts: Vec<(f64, f64)> = self
            .pairs
            .iter()
            .filter(|&&(d, _)| d >= min_degree.max(1) && d <= max_degree)
            .map(|&(d, c)| ((d as f64).ln(), (c as f64).ln()))
            .collect();
        if pts.len() < 2 {
            return None;
        }
        let k = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        (sxx > 0.0).then(|| sxy / sxx)
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "degree,count")?;
        for &(d, c) in &self.pairs {
            writeln!(w, "{d},{c}")?;
        }
        Ok(())
    }
}
