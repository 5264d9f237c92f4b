//! Adaptive orthogonal-series density estimation on [0,1].
//!
//! The pipeline: estimate cosine-series coefficients from a sample, keep the
//! ones that clear a data-driven threshold, then shift and clip the series so
//! it integrates to one. A simulation harness scores the result against a
//! fixed-cutoff competitor by Monte-Carlo MISE.
//!
//! ```
//! use osde::{design_density, draw, estimate_coefficients, SamplerConfig};
//! use osde::{build_estimator, compute_lambda, p_algorithm, select};
//! use osde::{QuadratureRule, DEFAULT_E_STAR, DEFAULT_MAX_ITER};
//!
//! let truth = design_density();
//! let sample = draw(&truth, 500, &SamplerConfig::new(7)).unwrap();
//! let est = estimate_coefficients(&sample, truth.basis, 50);
//! let lambda = compute_lambda(&est).unwrap();
//! let report = select(&est, lambda, 1.0);
//! let raw = build_estimator(&report, truth.basis);
//! let f = p_algorithm(&raw, QuadratureRule::default(), DEFAULT_E_STAR, DEFAULT_MAX_ITER).unwrap();
//! assert!(f.eval(0.5) >= 0.0);
//! ```

pub mod basis;
pub mod coeffs;
pub mod error;
pub mod numerics;
pub mod project;
pub mod sampling;
pub mod sim;
pub mod sparsity;
pub mod threshold;

pub use basis::{BasisBoundProfile, BasisId};
pub use coeffs::{estimate_coefficients, max_deviation, CoefficientEstimate, Sample};
pub use error::{Error, Result};
pub use project::{p_algorithm, ProjectedDensity, DEFAULT_E_STAR, DEFAULT_MAX_ITER};
pub use sampling::{
    cdf, draw, draw_with_stream, invert_cdf, ks_statistic, SamplerConfig, SamplingMethod,
};
pub use sim::{
    comparison_cutoff, ise, mean_and_standard_error, run_adaptive_once, run_comparison_once,
    run_replication_set, run_simulation, stream_id, CutoffRounding, EstimatorKind,
    ReplicationRecord, SimulationCell, SimulationConfig, SimulationResult,
};
pub use threshold::{
    build_estimator, check_regularity, compute_lambda, select, RegularityCheck, ThresholdReport,
};
pub use sparsity::{
    check_membership_ak, check_membership_ek, check_membership_theta, design_density,
    minimal_tail_constant, uniform_density, Density, MembershipReport, SeriesDensity,
    SparsityParams,
};
pub use numerics::{
    integrate, std_normal_cdf, std_normal_quantile, std_normal_upper_tail, QuadratureKind,
    QuadratureRule, DEFAULT_PANELS,
};
