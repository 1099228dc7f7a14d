//! Nonparametric tests for network effects in weighted directed networks.
//!
//! Four effects are supported, each a covariance between two edges that
//! share a node:
//!
//! | effect            | covariance          |
//! |-------------------|---------------------|
//! | reciprocity (η₂)  | Cov(e_ij, e_ji)     |
//! | same-sender (η₃)  | Cov(e_ij, e_ik)     |
//! | same-receiver (η₄)| Cov(e_ji, e_ki)     |
//! | sender-receiver (η₅)| Cov(e_ij, e_jk)   |
//!
//! Complete estimators are computed in O(n²). When the complete estimator
//! may be degenerate under the null, tests use a reduced U-statistic: the
//! quadruple kernel ψ averaged over round(n^λ) randomly drawn quadruples,
//! studentized by its empirical spread.
//!
//! ```
//! use netfx::{generate, test_effect, EffectKind, GeneratorSpec, LatentConfig, Setting, TestConfig};
//!
//! let spec = GeneratorSpec {
//!     setting: Setting::B,
//!     config: LatentConfig::Normal,
//!     n: 60,
//!     c_squared: 1.0,
//!     null_case: false,
//! };
//! let net = generate(&spec, 7).unwrap();
//! let report = test_effect(&net, EffectKind::SameSender, &TestConfig::default()).unwrap();
//! assert!(report.reject);
//! ```

pub mod error;
pub mod estimators;
pub mod inference;
pub mod kernels;
pub mod network;
pub mod normal;
pub mod par;
pub mod rng;
pub mod simulation;

pub use error::{Error, Result};
pub use estimators::{
    complete_estimate, g11_hat, g21_hat, g51_hat, mean_edge, reduced_estimate, sample_quadruples, subsample_size,
    xi_squared_hat, EffectEstimate, EstimateMethod, QuadrupleSample, ReducedMoment,
};
pub use inference::{
    aggregated_reduced_test, combine_p_values, consecutive_seeds, degeneracy_threshold, diagnose_degeneracy,
    local_effects, reduced_test, studentized_complete_test, test_effect, test_effect_repeated, Branch,
    DegeneracyDiagnosis, LocalEffects, NodeEffects, TestConfig, TestReport, Verdict,
};
pub use kernels::{h1, h2, h3, h4, h5, h6, psi, r_correction, TupleView};
pub use network::{read_edge_list, write_edge_list, DirectedWeightedNetwork, EdgeRecord, EffectKind, RowColSummaries};
pub use simulation::{
    generate, monte_carlo, BranchCounts, GeneratorSpec, LatentConfig, MonteCarloSummary, Setting, SimulationSpec,
};
