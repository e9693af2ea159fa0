//! Structural quantities of a single realized graph.
//!
//! Undefined values (neighbour degree of an isolated vertex, clustering of a
//! vertex with fewer than two neighbours) are `None`, never zero.

use crate::error::{Error, Result};
use crate::generator::Graph;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VertexMetrics {
    pub degree: usize,
    /// Mean realized degree of the neighbours; defined iff `degree >= 1`.
    pub knn: Option<f64>,
    /// `2E / (d(d−1))`; defined iff `degree >= 2`.
    pub clustering: Option<f64>,
}

/// Integer ingredients of the per-vertex metrics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct VertexCounts {
    pub degree: u64,
    /// Σ of the realized degrees of the neighbours.
    pub neighbor_degree_sum: u64,
    /// Number of edges among the neighbours.
    pub triangles: u64,
}

/// Edges among each vertex's neighbours.
///
/// Every edge `u < v` is intersected with its endpoints' sorted neighbour
/// lists; each common neighbour `w` closes a triangle, and `(u, v)` is an edge
/// among `w`'s neighbours.
pub fn triangles_per_vertex(g: &Graph) -> Vec<u64> {
    let mut tri = vec![0u64; g.n()];
    for (u, v) in g.edges() {
        let (a, b) = (g.neighbors(u as usize), g.neighbors(v as usize));
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    tri[a[i] as usize] += 1;
                    i += 1;
                    j += 1;
                }
            }
        }
    }
    tri
}

pub fn vertex_counts(g: &Graph) -> Vec<VertexCounts> {
    let tri = triangles_per_vertex(g);
    (0..g.n())
        .map(|v| VertexCounts {
            degree: g.degree(v) as u64,
            neighbor_degree_sum: g.neighbors(v).iter().map(|&u| g.degree(u as usize) as u64).sum(),
            triangles: tri[v],
        })
        .collect()
}

/// Σ of `weights[u]` over the neighbours `u` of every vertex.
pub fn neighbor_weight_sums(g: &Graph, weights: &[u32]) -> Vec<u64> {
    (0..g.n())
        .map(|v| g.neighbors(v).iter().map(|&u| u64::from(weights[u as usize])).sum())
        .collect()
}

/// Mean *expected* degree of each vertex's realized neighbours, with the
/// desired degrees `expected` standing in for the neighbours' degrees.
pub fn knn_expected(g: &Graph, expected: &[u32]) -> Vec<Option<f64>> {
    neighbor_weight_sums(g, expected)
        .into_iter()
        .enumerate()
        .map(|(v, s)| {
            let d = g.degree(v);
            (d >= 1).then(|| s as f64 / d as f64)
        })
        .collect()
}

/// ```
/// use addnet::{metrics::vertex_metrics, Graph};
///
/// let path = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
/// let m = vertex_metrics(&path);
/// assert_eq!(m[1].knn, Some(1.0));
/// assert_eq!(m[1].clustering, Some(0.0));
/// assert_eq!(m[0].clustering, None);
/// ```
pub fn vertex_metrics(g: &Graph) -> Vec<VertexMetrics> {
    vertex_counts(g)
        .into_iter()
        .map(|c| {
            let d = c.degree as f64;
            VertexMetrics {
                degree: c.degree as usize,
                knn: (c.degree >= 1).then(|| c.neighbor_degree_sum as f64 / d),
                clustering: (c.degree >= 2).then(|| 2.0 * c.triangles as f64 / (d * (d - 1.0))),
            }
        })
        .collect()
}

/// Newman's degree assortativity over both orientations of every edge.
///
/// Sums are exact integers; `None` when there are no edges or the endpoint
/// degrees have zero variance.
pub fn assortativity(g: &Graph) -> Option<f64> {
    let m = g.edge_count() as i128;
    if m == 0 {
        return None;
    }
    let (mut s_prod, mut s_sum, mut s_sq) = (0i128, 0i128, 0i128);
    for (u, v) in g.edges() {
        let a = g.degree(u as usize) as i128;
        let b = g.degree(v as usize) as i128;
        s_prod += a * b;
        s_sum += a + b;
        s_sq += a * a + b * b;
    }
    // r = (Σab/M − (Σ(a+b)/2M)²) / (Σ(a²+b²)/2M − (Σ(a+b)/2M)²), scaled by 4M²
    let num = 4 * m * s_prod - s_sum * s_sum;
    let den = 2 * m * s_sq - s_sum * s_sum;
    if den == 0 {
        return None;
    }
    Some(num as f64 / den as f64)
}

/// Mean local clustering over vertices with degree >= 2.
pub fn mean_clustering(g: &Graph) -> Result<f64> {
    let values: Vec<f64> = vertex_metrics(g).iter().filter_map(|m| m.clustering).collect();
    if values.is_empty() {
        return Err(Error::NoEligibleVertices);
    }
    Ok(values.iter().sum::<f64>() / values.len() as f64)
}
