//! Stochastic block model and graphon estimation at desk scale.
//!
//! The crate covers the full experimental loop for exchangeable random
//! graphs: generating edge-probability matrices from graphons or block
//! models, sampling adjacency matrices, fitting the least-squares block
//! estimator (an exact solver for tiny instances and an alternating
//! surrogate with spectral initialization), link prediction from a
//! partially observed graph, operator-norm estimation with degree
//! trimming, and the packing / divergence constructions used for minimax
//! lower bounds.
//!
//! All randomness flows through explicit 64-bit seeds (ChaCha8 streams,
//! see [`rng`]); every operation is a pure function of its inputs, so
//! results are bit-reproducible across platforms and safe to run from
//! concurrent tasks.

pub mod completion;
pub mod error;
pub mod estim;
pub mod io;
pub mod linalg;
pub mod lower;
pub mod matrix;
pub mod metrics;
pub mod model;
pub mod rng;

pub use completion::{
    completion_objective, fit_completion, predict, q_from_assignment_completion, sample_omega,
    CompletionOptions, ObservationSet, DEFAULT_COVERAGE_FLOOR,
};
pub use error::{Error, Result};
pub use estim::{
    block_approximation_error, fit_alternating, fit_asymmetric, fit_exact, objective,
    oracle_assignment, oracle_assignment_by_quantiles, q_from_assignment, spectral_init, AsymFit,
    FitDiagnostics, FitMethod, FitOptions, FitResult, InitStrategy, SpectralInit,
};
pub use lower::{
    chi2_fano_bound, chi2_product_bernoulli, fano_bound, finite_k_instance, kl_product_bernoulli,
    required_cardinality, t1_family, t1_instance, t2_assignment, t2_instance, vg_packing,
    vg_packing_with_target, HardFamily, HardInstance, PackingSet, MAX_PACKING_LENGTH,
};
pub use matrix::{DenseMatrix, MatrixView, RectBinary};
pub use metrics::{
    adjacency_op_estimator, frobenius_vs_operator_check, mse_loss, operator_norm, trim_adjacency,
    trim_adjacency_with_average, ErrorReport, DEFAULT_OPNORM_MAX_ITER, DEFAULT_OPNORM_TOL,
};
pub use model::{
    block_average, check_design_regularity, sample_adjacency, sample_design, scale_to_sparsity,
    theta_from_blocks, theta_from_graphon, Adjacency, Assignment, BlockAverage, BlockMatrix,
    DesignDist, GraphonKind, GraphonSpec, LatentDesign, ProbMatrix,
};
