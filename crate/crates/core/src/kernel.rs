//! Connection-probability rules over vertex pairs.
//!
//! Three rules are provided: the additive kernel `(k_i + k_j − z) / N`, the
//! multiplicative Chung–Lu kernel `k_i k_j / 2m`, and a constant `p` (the
//! classical random graph). Raw values outside `[0, 1]` are either refused
//! ([`ClampPolicy::Strict`]) or clamped and counted ([`ClampPolicy::Clamp`]).
//! Clamping breaks the expected-degree identity and every closed-form
//! prediction built on it, so it is always reported.
//!
//! Self-pairs are never edges. The identity `Σ_j p_ij = k_i` counts `j = i`;
//! over `j != i` the row sum is `k_i − (2k_i − z)/N`. That bias is documented,
//! not corrected.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::degseq::DegreeSequence;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClampPolicy {
    #[default]
    Strict,
    Clamp,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "variant", rename_all = "kebab-case")]
pub enum KernelVariant {
    Additive { z: f64, n: usize },
    ChungLu { two_m: f64 },
    Constant { p: f64 },
}

/// Name of a kernel family, as accepted on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelKind {
    Additive,
    ChungLu,
    Constant,
}

impl FromStr for KernelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "additive" => Ok(Self::Additive),
            "chung-lu" => Ok(Self::ChungLu),
            "constant" => Ok(Self::Constant),
            other => Err(Error::InvalidParams(format!(
                "unknown kernel '{other}' (expected additive, chung-lu or constant)"
            ))),
        }
    }
}

impl fmt::Display for KernelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Additive => "additive",
            Self::ChungLu => "chung-lu",
            Self::Constant => "constant",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClampSide {
    Low,
    High,
}

/// A connection probability, with the side it was clamped from if any.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairProb {
    pub value: f64,
    pub clamped: Option<ClampSide>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct ClampReport {
    pub clamped_low: u64,
    pub clamped_high: u64,
    pub total_pairs: u64,
}

impl ClampReport {
    pub fn is_clean(&self) -> bool {
        self.clamped_low == 0 && self.clamped_high == 0
    }

    pub fn merge(&self, other: &ClampReport) -> ClampReport {
        ClampReport {
            clamped_low: self.clamped_low + other.clamped_low,
            clamped_high: self.clamped_high + other.clamped_high,
            total_pairs: self.total_pairs + other.total_pairs,
        }
    }

    pub(crate) fn record(&mut self, side: Option<ClampSide>) {
        self.total_pairs += 1;
        match side {
            Some(ClampSide::Low) => self.clamped_low += 1,
            Some(ClampSide::High) => self.clamped_high += 1,
            None => {}
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Kernel {
    pub variant: KernelVariant,
    pub clamp_policy: ClampPolicy,
}

impl Kernel {
    /// `(k_i + k_j − z) / n`.
    ///
    /// ```
    /// use addnet::{ClampPolicy, Kernel};
    ///
    /// let k = Kernel::additive(4.0, 1000, ClampPolicy::Strict).unwrap();
    /// assert_eq!(k.pair_prob(4, 4).unwrap().value, 0.004);
    /// assert_eq!(k.pair_prob(1, 3).unwrap().value, 0.0);
    /// ```
    pub fn additive(z: f64, n: usize, clamp_policy: ClampPolicy) -> Result<Self> {
        if !(z.is_finite() && z > 0.0) || n < 2 {
            return Err(Error::InvalidParams(format!(
                "additive kernel needs z > 0 and n >= 2 (z={z}, n={n})"
            )));
        }
        Ok(Self {
            variant: KernelVariant::Additive { z, n },
            clamp_policy,
        })
    }

    /// `k_i k_j / two_m`.
    pub fn chung_lu(two_m: f64, clamp_policy: ClampPolicy) -> Result<Self> {
        if !(two_m.is_finite() && two_m > 0.0) {
            return Err(Error::InvalidParams(format!(
                "chung-lu kernel needs two_m > 0, got {two_m}"
            )));
        }
        Ok(Self {
            variant: KernelVariant::ChungLu { two_m },
            clamp_policy,
        })
    }

    pub fn constant(p: f64, clamp_policy: ClampPolicy) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParams(format!(
                "constant kernel needs 0 <= p <= 1, got {p}"
            )));
        }
        Ok(Self {
            variant: KernelVariant::Constant { p },
            clamp_policy,
        })
    }

    /// The kernel of family `kind` whose parameters are read off `seq`.
    pub fn for_sequence(kind: KernelKind, seq: &DegreeSequence, clamp_policy: ClampPolicy) -> Self {
        let variant = match kind {
            KernelKind::Additive => KernelVariant::Additive {
                z: seq.avg_degree(),
                n: seq.n(),
            },
            KernelKind::ChungLu => KernelVariant::ChungLu {
                two_m: seq.degree_sum() as f64,
            },
            KernelKind::Constant => KernelVariant::Constant {
                p: seq.avg_connect_prob(),
            },
        };
        Self {
            variant,
            clamp_policy,
        }
    }

    pub fn kind(&self) -> KernelKind {
        match self.variant {
            KernelVariant::Additive { .. } => KernelKind::Additive,
            KernelVariant::ChungLu { .. } => KernelKind::ChungLu,
            KernelVariant::Constant { .. } => KernelKind::Constant,
        }
    }

    /// Unclamped kernel value.
    #[inline]
    pub fn raw(&self, k_i: u32, k_j: u32) -> f64 {
        match self.variant {
            KernelVariant::Additive { z, n } => (f64::from(k_i) + f64::from(k_j) - z) / n as f64,
            KernelVariant::ChungLu { two_m } => f64::from(k_i) * f64::from(k_j) / two_m,
            KernelVariant::Constant { p } => p,
        }
    }

    /// Clamps `raw(k_i, k_j)` into `[0, 1]` regardless of policy.
    #[inline]
    pub(crate) fn clamped(&self, k_i: u32, k_j: u32) -> PairProb {
        let raw = self.raw(k_i, k_j);
        if raw < 0.0 {
            PairProb { value: 0.0, clamped: Some(ClampSide::Low) }
        } else if raw > 1.0 {
            PairProb { value: 1.0, clamped: Some(ClampSide::High) }
        } else {
            PairProb { value: raw, clamped: None }
        }
    }

    pub fn pair_prob(&self, k_i: u32, k_j: u32) -> Result<PairProb> {
        let prob = self.clamped(k_i, k_j);
        if prob.clamped.is_some() && self.clamp_policy == ClampPolicy::Strict {
            return Err(Error::InfeasiblePair {
                k_i,
                k_j,
                raw: self.raw(k_i, k_j),
            });
        }
        Ok(prob)
    }

    pub fn check_matches(&self, seq: &DegreeSequence) -> Result<()> {
        if let KernelVariant::Additive { z, n } = self.variant {
            if n != seq.n() {
                return Err(Error::ParameterMismatch(format!(
                    "kernel n={n} but sequence has {} vertices",
                    seq.n()
                )));
            }
            let sz = seq.avg_degree();
            if (z - sz).abs() > 1e-12 * sz.max(1.0) {
                return Err(Error::ParameterMismatch(format!(
                    "kernel z={z} but sequence has z={sz}"
                )));
            }
        }
        Ok(())
    }
}

/// Counts pairs `i < j` whose raw probability leaves `[0, 1]`.
///
/// Every kernel here is non-decreasing in each degree, so a two-pointer sweep
/// over the sorted degrees counts the clamped pairs exactly in `O(N log N)`;
/// [`pair_census`] is the brute-force equivalent.
pub fn validate_feasibility(kernel: &Kernel, seq: &DegreeSequence) -> Result<ClampReport> {
    kernel.check_matches(seq)?;
    let mut sorted = seq.degrees().to_vec();
    sorted.sort_unstable();
    let n = sorted.len();

    let mut low = 0u64;
    let (mut lo, mut hi) = (0usize, n - 1);
    while lo < hi {
        if kernel.raw(sorted[lo], sorted[hi]) < 0.0 {
            low += (hi - lo) as u64;
            lo += 1;
        } else {
            hi -= 1;
        }
    }

    let mut high = 0u64;
    let (mut lo, mut hi) = (0usize, n - 1);
    while lo < hi {
        if kernel.raw(sorted[lo], sorted[hi]) > 1.0 {
            high += (hi - lo) as u64;
            hi -= 1;
        } else {
            lo += 1;
        }
    }

    Ok(ClampReport {
        clamped_low: low,
        clamped_high: high,
        total_pairs: (n * (n - 1) / 2) as u64,
    })
}

/// Exhaustive `O(N²)` clamp census over all unordered pairs.
pub fn pair_census(kernel: &Kernel, seq: &DegreeSequence) -> Result<ClampReport> {
    kernel.check_matches(seq)?;
    let degrees = seq.degrees();
    let mut report = ClampReport::default();
    for i in 0..degrees.len() {
        for j in i + 1..degrees.len() {
            report.record(kernel.clamped(degrees[i], degrees[j]).clamped);
        }
    }
    Ok(report)
}

/// Errors with the first infeasible pair when a strict kernel would clamp.
pub(crate) fn ensure_usable(kernel: &Kernel, seq: &DegreeSequence) -> Result<ClampReport> {
    let report = validate_feasibility(kernel, seq)?;
    if kernel.clamp_policy == ClampPolicy::Strict && !report.is_clean() {
        let (k_i, k_j) = if report.clamped_low > 0 {
            let kmin = seq.min_degree();
            (kmin, kmin)
        } else {
            let kmax = seq.max_degree();
            (kmax, kmax)
        };
        return Err(Error::InfeasiblePair {
            k_i,
            k_j,
            raw: kernel.raw(k_i, k_j),
        });
    }
    Ok(report)
}
