//! Desired degree sequences and their moments.
//!
//! A [`DegreeSequence`] is immutable once built. Power sums are held as exact
//! integers, so `z * N == Σk` and `Q == 0` iff every degree is equal hold
//! without rounding. Parity of `Σk` is irrelevant here: edges are independent
//! Bernoulli trials, not stub matchings.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};

use crate::error::{Error, Result};
use crate::rng::mix64;

#[derive(Debug, Clone, PartialEq)]
pub struct DegreeSequence {
    degrees: Vec<u32>,
    sum1: u128,
    sum2: u128,
    sum3: u128,
    inv_sum: f64,
}

impl DegreeSequence {
    /// Builds a sequence from explicit degrees.
    ///
    /// ```
    /// use addnet::DegreeSequence;
    ///
    /// let seq = DegreeSequence::from_list(&[2, 3, 3, 4, 4, 4, 5, 7]).unwrap();
    /// assert_eq!(seq.avg_degree(), 4.0);
    /// assert_eq!(seq.variance(), 2.0);
    /// assert!(DegreeSequence::from_list(&[0, 3]).is_err());
    /// ```
    pub fn from_list(degrees: &[u32]) -> Result<Self> {
        if degrees.len() < 2 {
            return Err(Error::InvalidParams(format!(
                "a degree sequence needs at least 2 vertices, got {}",
                degrees.len()
            )));
        }
        if let Some(pos) = degrees.iter().position(|&k| k == 0) {
            return Err(Error::InvalidParams(format!(
                "degree at position {pos} is 0; all degrees must be >= 1"
            )));
        }
        let (mut sum1, mut sum2, mut sum3) = (0u128, 0u128, 0u128);
        for &k in degrees {
            let k = u128::from(k);
            sum1 += k;
            sum2 += k * k;
            sum3 += k * k * k;
        }
        let inv_sum = neumaier_sum(degrees.iter().map(|&k| 1.0 / f64::from(k)));
        Ok(Self {
            degrees: degrees.to_vec(),
            sum1,
            sum2,
            sum3,
            inv_sum,
        })
    }

    /// All vertices with degree `k`.
    pub fn regular(n: usize, k: u32) -> Result<Self> {
        if n < 2 || k < 1 || k as usize > n - 1 {
            return Err(Error::InvalidParams(format!(
                "regular sequence needs 1 <= k <= n - 1 (n={n}, k={k})"
            )));
        }
        Self::from_list(&vec![k; n])
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    pub fn n(&self) -> usize {
        self.degrees.len()
    }

    pub fn degree_sum(&self) -> u128 {
        self.sum1
    }

    /// `(Σk, Σk², Σk³)` as exact integers.
    pub fn power_sums(&self) -> (u128, u128, u128) {
        (self.sum1, self.sum2, self.sum3)
    }

    pub fn min_degree(&self) -> u32 {
        self.degrees.iter().copied().min().unwrap_or(0)
    }

    pub fn max_degree(&self) -> u32 {
        self.degrees.iter().copied().max().unwrap_or(0)
    }

    /// `l = Σk / 2`.
    pub fn edge_count_expected(&self) -> f64 {
        self.sum1 as f64 / 2.0
    }

    /// `z = Σk / N`.
    pub fn avg_degree(&self) -> f64 {
        self.sum1 as f64 / self.n() as f64
    }

    /// `p = 2l / N² = z / N`.
    pub fn avg_connect_prob(&self) -> f64 {
        self.sum1 as f64 / (self.n() as f64 * self.n() as f64)
    }

    /// `Q = ⟨k²⟩ − ⟨k⟩²`, evaluated as `(NΣk² − (Σk)²) / N²` in integers.
    pub fn variance(&self) -> f64 {
        let n = self.n() as u128;
        let num = n * self.sum2 - self.sum1 * self.sum1;
        num as f64 / (n * n) as f64
    }

    pub fn moment2(&self) -> f64 {
        self.sum2 as f64 / self.n() as f64
    }

    pub fn moment3(&self) -> f64 {
        self.sum3 as f64 / self.n() as f64
    }

    /// `⟨1/k⟩`.
    pub fn inv_degree_mean(&self) -> f64 {
        self.inv_sum / self.n() as f64
    }

    /// FNV-1a over the degree list; identifies a sequence in run metadata.
    pub fn fingerprint(&self) -> u64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for &k in &self.degrees {
            for b in k.to_le_bytes() {
                h ^= u64::from(b);
                h = h.wrapping_mul(0x0000_0100_0000_01b3);
            }
        }
        h
    }
}

/// Parameters of a discrete power law `P(k) ∝ k^-gamma` on `[k_min, k_max]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLawParams {
    pub gamma: f64,
    pub k_min: u32,
    pub k_max: u32,
}

impl PowerLawParams {
    pub fn validate(&self, n: usize) -> Result<()> {
        if n < 2 {
            return Err(Error::InvalidParams(format!("n must be >= 2, got {n}")));
        }
        if !(self.gamma.is_finite() && self.gamma > 1.0) {
            return Err(Error::InvalidParams(format!(
                "gamma must be > 1, got {}",
                self.gamma
            )));
        }
        if self.k_min < 1 {
            return Err(Error::InvalidParams("k_min must be >= 1".into()));
        }
        if self.k_max < self.k_min {
            return Err(Error::InvalidParams(format!(
                "k_max ({}) must be >= k_min ({})",
                self.k_max, self.k_min
            )));
        }
        if self.k_max as usize > n - 1 {
            return Err(Error::InvalidParams(format!(
                "k_max ({}) must be <= n - 1 ({})",
                self.k_max,
                n - 1
            )));
        }
        Ok(())
    }

    /// Cumulative distribution over the support, normalized by the exact
    /// finite sum. Entry `i` is `P(k <= k_min + i)`.
    fn cdf(&self) -> Vec<f64> {
        let weights: Vec<f64> = (self.k_min..=self.k_max)
            .map(|k| f64::from(k).powf(-self.gamma))
            .collect();
        let total = neumaier_sum(weights.iter().copied());
        let mut acc = 0.0;
        let mut cdf: Vec<f64> = weights
            .iter()
            .map(|w| {
                acc += w;
                acc / total
            })
            .collect();
        if let Some(last) = cdf.last_mut() {
            *last = 1.0;
        }
        cdf
    }
}

/// I.i.d. draws from the discrete power law by inverse CDF.
pub fn sample_power_law(n: usize, params: PowerLawParams, seed: u64) -> Result<DegreeSequence> {
    params.validate(n)?;
    let cdf = params.cdf();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let degrees: Vec<u32> = (0..n)
        .map(|_| {
            let u: f64 = rng.random();
            let idx = cdf.partition_point(|&c| c <= u).min(cdf.len() - 1);
            params.k_min + idx as u32
        })
        .collect();
    DegreeSequence::from_list(&degrees)
}

/// Redraws whole power-law sequences until `accept` holds.
///
/// Attempt 0 uses `seed` itself, so an accepted first draw equals
/// [`sample_power_law`]. Returns the sequence and the number of attempts.
pub fn sample_power_law_until(
    n: usize,
    params: PowerLawParams,
    seed: u64,
    max_attempts: usize,
    accept: impl Fn(&DegreeSequence) -> bool,
) -> Result<(DegreeSequence, usize)> {
    params.validate(n)?;
    for attempt in 0..max_attempts {
        let s = if attempt == 0 {
            seed
        } else {
            mix64(seed ^ mix64(attempt as u64))
        };
        let seq = sample_power_law(n, params, s)?;
        if accept(&seq) {
            return Ok((seq, attempt + 1));
        }
    }
    Err(Error::InvalidParams(format!(
        "no acceptable power-law sequence within {max_attempts} attempts"
    )))
}

/// I.i.d. Poisson(mean) degrees conditioned on `k >= 1` (zeros are redrawn).
pub fn sample_poisson(n: usize, mean: f64, seed: u64) -> Result<DegreeSequence> {
    if !(mean.is_finite() && mean > 0.0) {
        return Err(Error::InvalidParams(format!("mean must be > 0, got {mean}")));
    }
    if n < 2 {
        return Err(Error::InvalidParams(format!("n must be >= 2, got {n}")));
    }
    let dist = Poisson::new(mean).map_err(|e| Error::InvalidParams(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let degrees: Vec<u32> = (0..n)
        .map(|_| loop {
            let k: f64 = dist.sample(&mut rng);
            if k >= 1.0 {
                break k as u32;
            }
        })
        .collect();
    DegreeSequence::from_list(&degrees)
}

pub(crate) fn neumaier_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}
