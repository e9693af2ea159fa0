//! Random graph ensembles with a prescribed degree sequence under the
//! additive connection kernel `p_ij = (k_i + k_j − z) / N`.
//!
//! The crate samples desired degree sequences ([`degseq`]), turns them into
//! pair probabilities ([`kernel`]), draws reproducible realizations
//! ([`generator`]), measures them ([`metrics`]), aggregates many of them
//! ([`ensemble`]) and compares the result with closed-form predictions
//! ([`analytic`]). The `addnet` binary wraps all of this in file-based
//! pipelines ([`cli`]).
//!
//! ```
//! use addnet::{run_ensemble, ClampPolicy, DegreeSequence, Kernel, KernelKind};
//! use addnet::analytic::predict_knn;
//!
//! let seq = DegreeSequence::from_list(&[2, 3, 3, 4, 4, 4, 5, 7]).unwrap();
//! let kernel = Kernel::for_sequence(KernelKind::Additive, &seq, ClampPolicy::Strict);
//! let summary = run_ensemble(&seq, &kernel, 200, 42, 2).unwrap();
//! assert_eq!(summary.realizations(), 200);
//! assert_eq!(predict_knn(&seq, 2), 5.0);
//! ```

pub mod analytic;
pub mod cli;
pub mod degseq;
pub mod ensemble;
pub mod error;
pub mod generator;
pub mod io;
pub mod kernel;
pub mod metrics;
pub mod rng;

pub use analytic::AnalyticPrediction;
pub use degseq::{sample_poisson, sample_power_law, DegreeSequence, PowerLawParams};
pub use ensemble::{merge_summaries, run_ensemble, DegreeSpectrum, EnsembleSummary};
pub use error::{Error, Result};
pub use generator::{expected_edge_total, generate, Graph};
pub use kernel::{validate_feasibility, ClampPolicy, ClampReport, Kernel, KernelKind};

// The guide under book/ is compiled and run as doc-tests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    struct Introduction;

    #[doc = include_str!("../../../book/src/degree-sequences.md")]
    struct DegreeSequences;

    #[doc = include_str!("../../../book/src/kernels.md")]
    struct Kernels;

    #[doc = include_str!("../../../book/src/generation.md")]
    struct Generation;

    #[doc = include_str!("../../../book/src/metrics.md")]
    struct Metrics;

    #[doc = include_str!("../../../book/src/predictions.md")]
    struct Predictions;

    #[doc = include_str!("../../../book/src/ensembles.md")]
    struct Ensembles;

    #[doc = include_str!("../../../book/src/cli.md")]
    struct Cli;

    #[doc = include_str!("../../../book/src/reproducibility.md")]
    struct Reproducibility;
}
