//! Seeded synthetic graph generators.

use super::SparseGraph;
use crate::analytics::Clustering;
use crate::error::{domain, Result};
use crate::rng::Stream;

/// Stochastic block model with planted communities. Pairs inside a block
/// connect with probability `p_in`, pairs across blocks with `p_out`, all
/// independently. Returns the planted labels alongside the graph.
pub fn gen_sbm(
    block_sizes: &[usize],
    p_in: f64,
    p_out: f64,
    seed: u64,
) -> Result<(SparseGraph, Clustering)> {
    if block_sizes.len() < 2 {
        return domain("a block model needs at least 2 blocks");
    }
    if block_sizes.contains(&0) {
        return domain("block sizes must be positive");
    }
    if !(0.0..=1.0).contains(&p_in) || !(0.0..=1.0).contains(&p_out) {
        return domain(format!("probabilities must lie in [0, 1], got p_in={p_in}, p_out={p_out}"));
    }
    if p_out >= p_in {
        return domain(format!(
            "p_out ({p_out}) must be below p_in ({p_in}) for a planted structure"
        ));
    }
    let labels: Vec<usize> = block_sizes
        .iter()
        .enumerate()
        .flat_map(|(b, &size)| std::iter::repeat_n(b, size))
        .collect();
    let n = labels.len();
    let mut rng = Stream::new(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            let p = if labels[u] == labels[v] { p_in } else { p_out };
            if rng.uniform() < p {
                edges.push((u, v));
            }
        }
    }
    let graph = SparseGraph::from_edges(n, edges)?;
    let planted = Clustering::new(labels, block_sizes.len())?;
    Ok((graph, planted))
}

/// Barabási–Albert growth. Starts from a star on `links_per_node + 1` nodes;
/// each later node attaches to `links_per_node` distinct existing nodes
/// chosen with probability proportional to degree.
pub fn gen_preferential_attachment(n: usize, links_per_node: usize, seed: u64) -> Result<SparseGraph> {
    if links_per_node == 0 || n <= links_per_node {
        return domain(format!(
            "need n > links_per_node >= 1, got n={n}, links_per_node={links_per_node}"
        ));
    }
    let m = links_per_node;
    let mut rng = Stream::new(seed);
    let mut edges: Vec<(usize, usize)> = Vec::with_capacity(m * n);
    // every endpoint of every edge; sampling uniformly from it is degree-proportional
    let mut endpoints: Vec<usize> = Vec::with_capacity(2 * m * n);
    for leaf in 1..=m {
        edges.push((0, leaf));
        endpoints.extend([0, leaf]);
    }
    let mut targets: Vec<usize> = Vec::with_capacity(m);
    for new in m + 1..n {
        targets.clear();
        while targets.len() < m {
            let t = endpoints[rng.below(endpoints.len())];
            if !targets.contains(&t) {
                targets.push(t);
            }
        }
        for &t in &targets {
            edges.push((new, t));
            endpoints.extend([new, t]);
        }
    }
    SparseGraph::from_edges(n, edges)
}

/// G(n, p): every pair independently present with probability `p`.
pub fn gen_erdos_renyi(n: usize, p: f64, seed: u64) -> Result<SparseGraph> {
    if !(0.0..=1.0).contains(&p) {
        return domain(format!("probability must lie in [0, 1], got {p}"));
    }
    let mut rng = Stream::new(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.uniform() < p {
                edges.push((u, v));
            }
        }
    }
    SparseGraph::from_edges(n, edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sbm_extremes_give_disjoint_triangles() {
        let (g, planted) = gen_sbm(&[3, 3], 1.0, 0.0, 11).unwrap();
        assert_eq!(planted.labels(), &[0, 0, 0, 1, 1, 1]);
        assert_eq!(g.edge_count(), 6);
        assert!(g.degrees().iter().all(|&d| d == 2));
        assert!(!g.has_edge(0, 3));
    }

    #[test]
    fn sbm_edge_count_near_expectation() {
        let (g, _) = gen_sbm(&[500, 500], 0.05, 0.005, 2024).unwrap();
        let within: f64 = 2.0 * (500.0 * 499.0 / 2.0);
        let across = 500.0 * 500.0;
        let mean = 0.05 * within + 0.005 * across;
        let sd = (0.05 * 0.95 * within + 0.005 * 0.995 * across).sqrt();
        assert!((g.edge_count() as f64 - mean).abs() <= 4.0 * sd, "{} vs {mean}", g.edge_count());
    }

    #[test]
    fn sbm_is_deterministic() {
        let a = gen_sbm(&[40, 60], 0.2, 0.02, 5).unwrap();
        let b = gen_sbm(&[40, 60], 0.2, 0.02, 5).unwrap();
        let c = gen_sbm(&[40, 60], 0.2, 0.02, 6).unwrap();
        assert_eq!(a.0, b.0);
        assert_ne!(a.0, c.0);
    }

    #[test]
    fn sbm_rejects_bad_parameters() {
        assert!(gen_sbm(&[3, 3], 0.1, 0.1, 0).is_err());
        assert!(gen_sbm(&[3, 3], 0.1, 0.2, 0).is_err());
        assert!(gen_sbm(&[6], 0.5, 0.1, 0).is_err());
        assert!(gen_sbm(&[3, 3], 1.5, 0.1, 0).is_err());
    }

    #[test]
    fn attachment_with_one_link_is_a_tree() {
        let g = gen_preferential_attachment(5, 1, 3).unwrap();
        assert_eq!(g.edge_count(), 4);
        g.validate().unwrap();
    }

    #[test]
    fn attachment_edge_ratio() {
        let g = gen_preferential_attachment(10_000, 8, 1).unwrap();
        let ratio = g.edge_count() as f64 / g.n() as f64;
        assert!((7.0..=9.0).contains(&ratio), "{ratio}");
        assert!(gen_preferential_attachment(3, 3, 0).is_err());
        assert!(gen_preferential_attachment(3, 0, 0).is_err());
    }

    #[test]
    fn erdos_renyi_extremes() {
        assert_eq!(gen_erdos_renyi(6, 1.0, 0).unwrap().edge_count(), 15);
        assert_eq!(gen_erdos_renyi(6, 0.0, 0).unwrap().edge_count(), 0);
    }
}
