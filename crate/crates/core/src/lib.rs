//! High-order numerics for Caputo-type fractional derivatives with scale and
//! weight functions, and an implicit finite-difference solver for the
//! corresponding fractional advection-diffusion equation.
//!
//! The derivative of order alpha in (0,1) is discretized to order (4-alpha)
//! by piecewise interpolation of the weighted history (linear on the first
//! subinterval, quadratic on the second, cubic afterwards). The solver
//! transforms a weighted problem to unity weight, marches an implicit
//! tridiagonal scheme, and recovers the original variable.

pub mod analysis;
pub mod error;
pub mod functions;
pub mod gcfd;
pub mod pde;
pub mod problems;
pub mod weights;

pub use analysis::{
    error_inf, error_l2, observed_rate, run_refinement_study, series_error_inf, stability_check,
    truncation_bound, ConvergenceReport, StabilityReport, StudyAxis, StudyRow, TruncationCase,
    TruncationInputs,
};
pub use error::{Error, Result};
pub use functions::{
    validate_pair, GridFunction1D, HypothesisViolation, ScaleWeightPair, SpaceGrid, TimeGrid,
};
pub use gcfd::{caputo_power_factor, gcfd_apply, gcfd_reference, DerivativeSeries};
pub use pde::{
    recover_original, thomas_solve, time_march, transform_problem, AdvectionDiffusionProblem,
    SolutionField, TransformedProblem, TridiagonalSystem,
};
pub use problems::{
    builtin_problem, ex52, ex54, exp_quintic, BuiltinProblem, DerivativeBenchmark, PdeBenchmark,
};
pub use weights::{gamma, lambda_weights, KernelCoefficients, LambdaBuilder, LambdaWeights};
