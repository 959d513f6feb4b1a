//! Affine geometry of generalized quantum measurements.
//!
//! A measurement with `N` outcomes, described by positive effects that sum to
//! the identity, sends every density matrix of order `d` to a point in
//! probability space through an affine map `p = M r + c`, where `r` collects
//! the `d^2 - 1` free real parameters of the state. This crate constructs the
//! map explicitly, measures the dimension of the reachable convex body (at
//! most `d^2 - 1` no matter how large `N` is), and works backwards from
//! measured frequencies: linear inversion, membership tests against the
//! physical domain, error-box feasibility classification and positivity
//! repair.
//!
//! Modules:
//! - [`linalg`]: dense Hermitian eigensolver and real SVD kernels.
//! - [`states`]: density matrices, their real parameter vector, pure-state
//!   angles, Bloch vectors, spectral decomposition.
//! - [`povm`]: effect validation, the affine map `(M, c)`, effective
//!   dimension, tetrahedral and projective constructions.
//! - [`domain`]: outcome probabilities, sampled affine dimension, membership
//!   verdicts, tetrahedron coordinates.
//! - [`estimation`]: multinomial shot simulation, binomial dispersion, linear
//!   inversion, nearest-state projection, feasibility classification.
//! - [`io`]: JSON schemas shared with the command-line tool.
//! - [`rng`]: the seeded generator behind every randomized operation.
//!
//! ```
//! use povm_domain::{membership, probabilities, tetrahedral_povm, DensityMatrix};
//!
//! let povm = tetrahedral_povm();
//! let rho = DensityMatrix::maximally_mixed(2);
//! let point = probabilities(&rho, &povm).unwrap();
//! assert!(point.values().iter().all(|&p| (p - 0.25).abs() < 1e-15));
//! assert!(membership(&point, &povm, 1e-10).inside);
//! ```

// Tolerance checks are written `!(residual <= tol)` on purpose: a NaN
// residual must fail the check, which `residual > tol` would not do.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod domain;
pub mod estimation;
pub mod io;
pub mod linalg;
pub mod povm;
pub mod rng;
pub mod states;

/// Tolerance applied wherever an operation does not take an explicit one.
pub const DEFAULT_TOL: f64 = 1e-10;

pub use domain::{
    extreme_point_sample, membership, probabilities, subspace_dimension, tetrahedron_coordinates,
    DomainError, MembershipVerdict, ProbabilityPoint,
};
pub use estimation::{
    classify, dispersion, linear_inversion, project_to_physical, simulate_counts, CountRecord,
    ErrorBox, EstimationError, FeasibilityVerdict, InversionDiagnostics,
};
pub use linalg::{
    hermitian_eigen, is_psd, numerical_rank, svd, ComplexMatrix, EigenDecomposition, LinalgError,
    RealMatrix, Svd,
};
pub use povm::{
    build_affine_map, effective_dimension, projective_povm, random_povm, tetrahedral_povm,
    validate, AffineMap, Effect, Povm, PovmError, PovmValidation,
};
pub use states::{
    bloch_state, from_parameters, pure_state, random_density, spectral_decompose, to_parameters,
    BlochVector, DensityMatrix, PureStateAngles, StateError, StateParameters,
};
