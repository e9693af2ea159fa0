//! Closed-form ensemble predictions of the additive kernel, evaluated from
//! the desired degree sequence alone.
//!
//! With `z = ⟨k⟩`, `p = z/N` and `Q = ⟨k²⟩ − ⟨k⟩²`:
//!
//! | quantity | prediction |
//! |---|---|
//! | neighbour degree sum `K(k)` | `z·k + Q` |
//! | mean neighbour degree `k_nn(k)` | `z + Q/k` |
//! | assortativity `r` | `−Q² / (⟨k⟩⟨k³⟩ − ⟨k²⟩²)` |
//! | clustering spectrum `C(k)` | `p + 2Q/(N·k)` |
//! | mean clustering | `p + (2Q/N)·⟨1/k⟩` |
//! | linear law | `C(k) = (2/N)·k_nn(k) − p` |
//!
//! The spectra assume independent pairs, so the conditional probabilities in
//! the triangle count collapse to plain pair probabilities. `C(k)` also
//! replaces `k(k−1)` by `k²`; [`predict_expected_triangles_at`] gives the
//! exact, unapproximated triangle expectation for checking.

use serde::Serialize;

use crate::degseq::DegreeSequence;
use crate::error::{Error, Result};
use crate::kernel::Kernel;

/// `z + Q/k`.
pub fn predict_knn(seq: &DegreeSequence, k: u32) -> f64 {
    seq.avg_degree() + seq.variance() / f64::from(k)
}

/// `z·k + Q`.
pub fn predict_knn_sum(seq: &DegreeSequence, k: u32) -> f64 {
    seq.avg_degree() * f64::from(k) + seq.variance()
}

/// `−Q² / (⟨k⟩⟨k³⟩ − ⟨k²⟩²)`, or `None` when the denominator vanishes.
///
/// Both numerator and denominator come from exact integer power sums:
/// `N²·Q = NΣk² − (Σk)²` and `N²·(⟨k⟩⟨k³⟩ − ⟨k²⟩²) = ΣkΣk³ − (Σk²)²`. The
/// latter is zero exactly when all degrees are equal.
///
/// ```
/// use addnet::{analytic::predict_r, DegreeSequence};
///
/// let seq = DegreeSequence::from_list(&[2, 3, 3, 4, 4, 4, 5, 7]).unwrap();
/// assert!((predict_r(&seq).unwrap() + 4.0 / 37.0).abs() < 1e-15);
/// assert_eq!(predict_r(&DegreeSequence::regular(10, 3).unwrap()), None);
/// ```
pub fn predict_r(seq: &DegreeSequence) -> Option<f64> {
    let (s1, s2, s3) = seq.power_sums();
    let n = seq.n() as u128;
    let q_scaled = n * s2 - s1 * s1;
    let den_scaled = s1 * s3 - s2 * s2;
    if den_scaled == 0 {
        return None;
    }
    let q_scaled = q_scaled as f64;
    Some(-(q_scaled * q_scaled) / ((n * n) as f64 * den_scaled as f64))
}

/// `p + 2Q/(N·k)`.
pub fn predict_clustering_of_k(seq: &DegreeSequence, k: u32) -> f64 {
    seq.avg_connect_prob() + 2.0 * seq.variance() / (seq.n() as f64 * f64::from(k))
}

/// `p + (2Q/N)·⟨1/k⟩`.
pub fn predict_mean_clustering(seq: &DegreeSequence) -> f64 {
    seq.avg_connect_prob() + 2.0 * seq.variance() / seq.n() as f64 * seq.inv_degree_mean()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpectedDegree {
    /// `Σ_j p_ij` over all `j`, self-pair included: exactly `k_i`.
    pub idealized: f64,
    /// `Σ_{j≠i} p_ij = k_i − (2k_i − z)/N`, the simple-graph expectation.
    pub simple_graph: f64,
}

pub fn predict_expected_degree(seq: &DegreeSequence, i: usize) -> Result<ExpectedDegree> {
    let k = *seq
        .degrees()
        .get(i)
        .ok_or(Error::IndexOutOfRange { index: i, n: seq.n() })?;
    let k = f64::from(k);
    Ok(ExpectedDegree {
        idealized: k,
        simple_graph: k - (2.0 * k - seq.avg_degree()) / seq.n() as f64,
    })
}

/// `Σ_{m<n; m,n≠i} p_im·p_in·p_mn`, the exact expected number of edges among
/// the neighbours of `i` under independent pairs. `O(N²)`.
pub fn predict_expected_triangles_at(seq: &DegreeSequence, kernel: &Kernel, i: usize) -> Result<f64> {
    let d = seq.degrees();
    if i >= d.len() {
        return Err(Error::IndexOutOfRange { index: i, n: d.len() });
    }
    let mut row = Vec::with_capacity(d.len());
    for (j, &kj) in d.iter().enumerate() {
        row.push(if j == i { 0.0 } else { kernel.pair_prob(d[i], kj)?.value });
    }
    let mut total = 0.0;
    for m in 0..d.len() {
        if m == i || row[m] == 0.0 {
            continue;
        }
        for n in m + 1..d.len() {
            if n == i {
                continue;
            }
            total += row[m] * row[n] * kernel.pair_prob(d[m], d[n])?.value;
        }
    }
    Ok(total)
}

/// All scalar predictions for one sequence, plus the spectra as functions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AnalyticPrediction {
    pub n: usize,
    pub z: f64,
    pub p: f64,
    pub q: f64,
    pub mean_clustering: f64,
    pub r: Option<f64>,
    /// `2/N`.
    pub linear_slope: f64,
    /// `−p`.
    pub linear_intercept: f64,
}

impl AnalyticPrediction {
    pub fn new(seq: &DegreeSequence) -> Self {
        let p = seq.avg_connect_prob();
        Self {
            n: seq.n(),
            z: seq.avg_degree(),
            p,
            q: seq.variance(),
            mean_clustering: predict_mean_clustering(seq),
            r: predict_r(seq),
            linear_slope: 2.0 / seq.n() as f64,
            linear_intercept: -p,
        }
    }

    pub fn knn_of_k(&self, k: u32) -> f64 {
        self.z + self.q / f64::from(k)
    }

    pub fn knn_sum_of_k(&self, k: u32) -> f64 {
        self.z * f64::from(k) + self.q
    }

    pub fn clustering_of_k(&self, k: u32) -> f64 {
        self.p + 2.0 * self.q / (self.n as f64 * f64::from(k))
    }
}
