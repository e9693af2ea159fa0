//! One simple undirected realization per call, by an independent Bernoulli
//! trial on every unordered pair.
//!
//! The trial for pair `i < j` reads the uniform at counter `κ = i·N + j` of the
//! Philox stream keyed by the realization seed. Graphs are therefore identical
//! whatever order, or thread, visits the pairs.

use rayon::prelude::*;

use crate::degseq::DegreeSequence;
use crate::error::{Error, Result};
use crate::kernel::{ensure_usable, ClampPolicy, ClampReport, Kernel};
use crate::rng::CounterRng;

/// Simple undirected graph on vertices `0..n` with sorted neighbour lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adjacency: Vec<Vec<u32>>,
    edge_count: usize,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Self {
            adjacency: vec![Vec::new(); n],
            edge_count: 0,
        }
    }

    /// Builds a graph from an edge list, rejecting self-loops, repeated
    /// edges and out-of-range endpoints.
    pub fn from_edges(n: usize, edges: &[(u32, u32)]) -> Result<Self> {
        let mut adjacency = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u == v {
                return Err(Error::InvalidParams(format!("self-loop at vertex {u}")));
            }
            let (ui, vi) = (u as usize, v as usize);
            if ui >= n || vi >= n {
                return Err(Error::IndexOutOfRange { index: ui.max(vi), n });
            }
            adjacency[ui].push(v);
            adjacency[vi].push(u);
        }
        for list in &mut adjacency {
            list.sort_unstable();
            if list.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidParams("repeated edge".into()));
            }
        }
        Ok(Self {
            adjacency,
            edge_count: edges.len(),
        })
    }

    pub fn n(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.adjacency[v]
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adjacency.iter().map(Vec::len).collect()
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.adjacency.iter().enumerate().flat_map(|(u, list)| {
            let u = u as u32;
            list.iter().copied().filter(move |&v| v > u).map(move |v| (u, v))
        })
    }

    fn from_rows(rows: Vec<Vec<u32>>) -> Self {
        let n = rows.len();
        let mut adjacency: Vec<Vec<u32>> = vec![Vec::new(); n];
        let mut edge_count = 0;
        // Row i holds its neighbours j > i in ascending order. Visiting rows in
        // order appends smaller neighbours first, so lists come out sorted.
        for (i, row) in rows.iter().enumerate() {
            edge_count += row.len();
            for &j in row {
                adjacency[j as usize].push(i as u32);
            }
            adjacency[i].extend_from_slice(row);
        }
        Self {
            adjacency,
            edge_count,
        }
    }
}

fn sweep_row(
    degrees: &[u32],
    kernel: &Kernel,
    rng: &CounterRng,
    i: usize,
    report: &mut ClampReport,
) -> Vec<u32> {
    let n = degrees.len();
    let ki = degrees[i];
    let mut row = Vec::new();
    for (j, &kj) in degrees.iter().enumerate().skip(i + 1) {
        let prob = kernel.clamped(ki, kj);
        report.record(prob.clamped);
        if prob.value > 0.0 && rng.uniform((i * n + j) as u64) < prob.value {
            row.push(j as u32);
        }
    }
    row
}

fn prepare(seq: &DegreeSequence, kernel: &Kernel) -> Result<()> {
    if kernel.clamp_policy == ClampPolicy::Strict {
        ensure_usable(kernel, seq)?;
    } else {
        kernel.check_matches(seq)?;
    }
    Ok(())
}

/// Samples one realization. The returned report is a full census of the
/// pairs visited; under a strict kernel it never counts a clamp.
///
/// ```
/// use addnet::{generate, ClampPolicy, DegreeSequence, Kernel};
///
/// let seq = DegreeSequence::regular(5, 4).unwrap();
/// let kernel = Kernel::constant(1.0, ClampPolicy::Strict).unwrap();
/// let (g, report) = generate(&seq, &kernel, 7).unwrap();
/// assert_eq!(g.edge_count(), 10);
/// assert!(report.is_clean());
/// ```
pub fn generate(seq: &DegreeSequence, kernel: &Kernel, seed: u64) -> Result<(Graph, ClampReport)> {
    prepare(seq, kernel)?;
    let rng = CounterRng::new(seed);
    let degrees = seq.degrees();
    let mut report = ClampReport::default();
    let rows = (0..degrees.len())
        .map(|i| sweep_row(degrees, kernel, &rng, i, &mut report))
        .collect();
    Ok((Graph::from_rows(rows), report))
}

/// Same graph as [`generate`], with rows swept on the rayon pool.
pub fn generate_par(
    seq: &DegreeSequence,
    kernel: &Kernel,
    seed: u64,
) -> Result<(Graph, ClampReport)> {
    prepare(seq, kernel)?;
    let rng = CounterRng::new(seed);
    let degrees = seq.degrees();
    let (rows, reports): (Vec<Vec<u32>>, Vec<ClampReport>) = (0..degrees.len())
        .into_par_iter()
        .map(|i| {
            let mut report = ClampReport::default();
            let row = sweep_row(degrees, kernel, &rng, i, &mut report);
            (row, report)
        })
        .unzip();
    let report = reports
        .iter()
        .fold(ClampReport::default(), |acc, r| acc.merge(r));
    Ok((Graph::from_rows(rows), report))
}

/// `Σ_{i<j} p_ij` by exhaustive pair sweep.
pub fn expected_edge_total(seq: &DegreeSequence, kernel: &Kernel) -> Result<f64> {
    prepare(seq, kernel)?;
    let d = seq.degrees();
    let mut total = 0.0;
    for i in 0..d.len() {
        for j in i + 1..d.len() {
            total += kernel.clamped(d[i], d[j]).value;
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::KernelKind;

    fn reference() -> DegreeSequence {
        DegreeSequence::from_list(&[2, 3, 3, 4, 4, 4, 5, 7]).unwrap()
    }

    fn check_invariants(g: &Graph) {
        let mut degree_sum = 0;
        for v in 0..g.n() {
            let nb = g.neighbors(v);
            assert!(nb.windows(2).all(|w| w[0] < w[1]), "sorted, no multi-edges");
            assert!(!nb.contains(&(v as u32)), "no self-loops");
            for &u in nb {
                assert!(g.neighbors(u as usize).binary_search(&(v as u32)).is_ok());
            }
            degree_sum += nb.len();
        }
        assert_eq!(degree_sum, 2 * g.edge_count());
        assert_eq!(g.edges().count(), g.edge_count());
    }

    #[test]
    fn constant_extremes() {
        let seq = reference();
        let zero = Kernel::constant(0.0, ClampPolicy::Strict).unwrap();
        let (g, _) = generate(&seq, &zero, 1).unwrap();
        assert_eq!(g.edge_count(), 0);

        let seq5 = DegreeSequence::regular(5, 2).unwrap();
        let one = Kernel::constant(1.0, ClampPolicy::Strict).unwrap();
        let (g, _) = generate(&seq5, &one, 1).unwrap();
        assert_eq!(g.edge_count(), 10);
        check_invariants(&g);
    }

    #[test]
    fn deterministic_and_parallel_equal() {
        let seq = crate::degseq::sample_power_law(
            300,
            crate::degseq::PowerLawParams { gamma: 2.5, k_min: 3, k_max: 60 },
            5,
        )
        .unwrap();
        let k = Kernel::for_sequence(KernelKind::Additive, &seq, ClampPolicy::Clamp);
        let (a, ra) = generate(&seq, &k, 99).unwrap();
        let (b, rb) = generate(&seq, &k, 99).unwrap();
        let (c, rc) = generate_par(&seq, &k, 99).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, c);
        assert_eq!(ra, rb);
        assert_eq!(ra, rc);
        check_invariants(&a);
        let (d, _) = generate(&seq, &k, 100).unwrap();
        assert_ne!(a, d);
    }

    #[test]
    fn strict_refuses_infeasible() {
        let mut degrees = vec![1, 1];
        degrees.extend(std::iter::repeat_n(9, 8));
        let seq = DegreeSequence::from_list(&degrees).unwrap();
        let strict = Kernel::for_sequence(KernelKind::Additive, &seq, ClampPolicy::Strict);
        assert!(matches!(generate(&seq, &strict, 1), Err(Error::InfeasiblePair { .. })));
        let clamp = Kernel::for_sequence(KernelKind::Additive, &seq, ClampPolicy::Clamp);
        let (_, report) = generate(&seq, &clamp, 1).unwrap();
        assert_eq!(report, crate::kernel::pair_census(&clamp, &seq).unwrap());
        assert!(report.clamped_low > 0);
    }

    #[test]
    fn expected_edge_totals() {
        // Oracle: the 28 pair probabilities (k_i + k_j − 4)/8 summed directly.
        // Equivalently l − Σ_i p_ii / 2 = 16 − 2, not l = 16.
        let d = [2u32, 3, 3, 4, 4, 4, 5, 7];
        let mut oracle = 0.0;
        for i in 0..8 {
            for j in i + 1..8 {
                oracle += (d[i] + d[j]) as f64 - 4.0;
            }
        }
        oracle /= 8.0;
        assert_eq!(oracle, 14.0);
        let seq = reference();
        let k = Kernel::for_sequence(KernelKind::Additive, &seq, ClampPolicy::Strict);
        assert!((expected_edge_total(&seq, &k).unwrap() - oracle).abs() < 1e-12);

        let reg = DegreeSequence::regular(100, 4).unwrap();
        let k = Kernel::for_sequence(KernelKind::Additive, &reg, ClampPolicy::Strict);
        assert!((expected_edge_total(&reg, &k).unwrap() - 198.0).abs() < 1e-9);
        let zero = Kernel::constant(0.0, ClampPolicy::Strict).unwrap();
        assert_eq!(expected_edge_total(&reg, &zero).unwrap(), 0.0);
    }

    #[test]
    fn from_edges_validation() {
        assert!(Graph::from_edges(3, &[(0, 0)]).is_err());
        assert!(Graph::from_edges(3, &[(0, 1), (1, 0)]).is_err());
        assert!(Graph::from_edges(3, &[(0, 3)]).is_err());
        let g = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        check_invariants(&g);
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 1), (1, 2)]);
    }

    #[test]
    fn edge_indicators_uncorrelated() {
        // Pairs (0,1) and (0,2) share a vertex; their indicators must still be
        // independent. Covariance tested against 3 standard errors.
        let seq = reference();
        let k = Kernel::for_sequence(KernelKind::Additive, &seq, ClampPolicy::Strict);
        let r = 100_000u64;
        let (mut sa, mut sb, mut sab) = (0.0, 0.0, 0.0);
        let mut prods = Vec::with_capacity(r as usize);
        for t in 0..r {
            let (g, _) = generate(&seq, &k, crate::rng::realization_seed(3, t)).unwrap();
            let a = f64::from(u8::from(g.neighbors(0).contains(&1)));
            let b = f64::from(u8::from(g.neighbors(0).contains(&2)));
            sa += a;
            sb += b;
            sab += a * b;
            prods.push((a, b));
        }
        let rf = r as f64;
        let (ma, mb) = (sa / rf, sb / rf);
        let cov = sab / rf - ma * mb;
        let var_terms: f64 = prods
            .iter()
            .map(|&(a, b)| ((a - ma) * (b - mb) - cov).powi(2))
            .sum::<f64>()
            / (rf - 1.0);
        let se = (var_terms / rf).sqrt();
        assert!(cov.abs() < 3.0 * se, "cov {cov} se {se}");
        // marginals: p_01 = (2+3-4)/8, p_02 = (2+3-4)/8
        assert!((ma - 0.125).abs() < 3.0 * (0.125 * 0.875 / rf).sqrt());
    }
}
