//! The convex domain of outcome probabilities.
//!
//! The physical region is the image of the density matrices under the
//! affine map of a measurement: a convex body whose dimension never exceeds
//! `d^2 - 1` however many outcomes there are. This module evaluates the
//! forward map, estimates the affine dimension from sampled extreme points,
//! decides membership of a candidate probability vector by inverting the
//! map, and projects four-outcome qubit statistics into tetrahedron
//! coordinates.

use crate::linalg::{hermitian_eigen, numerical_rank, svd, LinalgError, RealMatrix, Svd};
use crate::povm::{build_affine_map, AffineMap, Povm};
use crate::rng::SplitMix64;
use crate::states::{
    from_parameters, param_count, pure_state, DensityMatrix, PureStateAngles, StateParameters,
};
use thiserror::Error;

/// Errors from domain queries.
#[derive(Debug, Error)]
pub enum DomainError {
    #[error("probability vector invalid: {0}")]
    InvalidProbabilities(String),
    #[error("state dimension {state} does not match measurement dimension {povm}")]
    DimensionMismatch { state: usize, povm: usize },
    #[error("need at least two points, got {got}")]
    TooFewPoints { got: usize },
    #[error("point {index} has {got} entries, expected {expected}")]
    MixedLengths {
        index: usize,
        expected: usize,
        got: usize,
    },
    #[error("expected {expected} outcomes, got {got}")]
    WrongOutcomeCount { expected: usize, got: usize },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// A vector of outcome probabilities: entries in `[0, 1]` within `1e-12`
/// and unit sum within `1e-10`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityPoint {
    values: Vec<f64>,
}

impl ProbabilityPoint {
    pub fn new(values: Vec<f64>) -> Result<Self, DomainError> {
        if values.is_empty() {
            return Err(DomainError::InvalidProbabilities("no entries".to_string()));
        }
        let mut sum = 0.0;
        for (i, &v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(DomainError::InvalidProbabilities(format!(
                    "entry {i} is not finite"
                )));
            }
            if !(-1e-12..=1.0 + 1e-12).contains(&v) {
                return Err(DomainError::InvalidProbabilities(format!(
                    "entry {i} = {v} outside [0, 1]"
                )));
            }
            sum += v;
        }
        if (sum - 1.0).abs() > 1e-10 {
            return Err(DomainError::InvalidProbabilities(format!(
                "entries sum to {sum}, expected 1"
            )));
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Result of a membership query against the physical domain.
#[derive(Debug, Clone)]
pub struct MembershipVerdict {
    /// Whether the point is the image of some density matrix, within
    /// tolerance.
    pub inside: bool,
    /// A state mapping to the queried point when `inside`, otherwise absent.
    pub witness_state: Option<DensityMatrix>,
    /// Smallest eigenvalue of the reconstructed Hermitian matrix.
    pub min_eigenvalue: f64,
    /// Euclidean distance from the query to the affine span of the domain.
    pub consistency_residual: f64,
    /// Whether the map is rank deficient, so the reconstruction picked the
    /// minimum-norm preimage among infinitely many.
    pub non_unique: bool,
}

/// Outcome probabilities of a state under a measurement, by the trace
/// pairing with every effect.
pub fn probabilities(rho: &DensityMatrix, povm: &Povm) -> Result<ProbabilityPoint, DomainError> {
    if rho.dim() != povm.dim() {
        return Err(DomainError::DimensionMismatch {
            state: rho.dim(),
            povm: povm.dim(),
        });
    }
    let d = rho.dim();
    let values = povm
        .effects()
        .iter()
        .map(|effect| {
            let mut p = 0.0;
            for i in 0..d {
                for j in 0..d {
                    p += (rho.matrix()[(i, j)] * effect[(j, i)]).re;
                }
            }
            p
        })
        .collect();
    ProbabilityPoint::new(values)
}

/// Affine dimension of a point cloud: the rank of the centered coordinate
/// matrix with singular values cut at `tol` times the largest.
pub fn subspace_dimension(points: &[ProbabilityPoint], tol: f64) -> Result<usize, DomainError> {
    if points.len() < 2 {
        return Err(DomainError::TooFewPoints { got: points.len() });
    }
    let n = points[0].len();
    for (index, point) in points.iter().enumerate() {
        if point.len() != n {
            return Err(DomainError::MixedLengths {
                index,
                expected: n,
                got: point.len(),
            });
        }
    }
    let count = points.len();
    let mut mean = vec![0.0; n];
    for point in points {
        for (m, &v) in mean.iter_mut().zip(point.values()) {
            *m += v / count as f64;
        }
    }
    let mut centered = RealMatrix::zeros(count, n);
    for (i, point) in points.iter().enumerate() {
        for (j, &v) in point.values().iter().enumerate() {
            centered[(i, j)] = v - mean[j];
        }
    }
    Ok(numerical_rank(&centered, tol)?)
}

/// Probability images of seeded random pure states, the extreme points of
/// the state set.
pub fn extreme_point_sample(povm: &Povm, count: usize, seed: u64) -> Vec<ProbabilityPoint> {
    let mut rng = SplitMix64::new(seed);
    (0..count)
        .map(|_| {
            let angles = PureStateAngles::sample(povm.dim(), &mut rng);
            probabilities(&pure_state(&angles), povm)
                .expect("pure state dimension matches by construction")
        })
        .collect()
}

/// Shared inversion machinery for one measurement: the affine map, its SVD
/// and the rank at the chosen cutoff.
pub(crate) struct AffineSolver {
    pub map: AffineMap,
    factor: Svd,
    pub rank: usize,
    rank_tol: f64,
    pub dim: usize,
}

impl AffineSolver {
    pub fn new(povm: &Povm, rank_tol: f64) -> Self {
        let map = build_affine_map(povm);
        let factor = svd(map.matrix()).expect("map entries are finite by construction");
        let rank = factor.rank(rank_tol);
        Self {
            map,
            factor,
            rank,
            rank_tol,
            dim: povm.dim(),
        }
    }

    /// Minimum-norm parameter vector whose image is closest to `q`.
    pub fn invert(&self, q: &[f64]) -> Vec<f64> {
        let rhs: Vec<f64> = q
            .iter()
            .zip(self.map.offset())
            .map(|(qi, ci)| qi - ci)
            .collect();
        self.factor.solve_min_norm(&rhs, self.rank_tol)
    }

    pub fn non_unique(&self) -> bool {
        self.rank < param_count(self.dim)
    }
}

pub(crate) fn membership_with(solver: &AffineSolver, q: &[f64], tol: f64) -> MembershipVerdict {
    let r = solver.invert(q);
    let model = solver.map.apply(&r);
    let consistency_residual = model
        .iter()
        .zip(q)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    let params = StateParameters::new(solver.dim, r).expect("solver output has full length");
    let h = from_parameters(&params);
    let eigen = hermitian_eigen(&h, 1e-6).expect("reconstruction is Hermitian by construction");
    let min_eigenvalue = eigen.eigenvalues.first().copied().unwrap_or(0.0);
    let inside = consistency_residual <= tol && min_eigenvalue >= -tol;
    MembershipVerdict {
        inside,
        witness_state: inside.then(|| DensityMatrix::from_matrix_unchecked(h)),
        min_eigenvalue,
        consistency_residual,
        non_unique: solver.non_unique(),
    }
}

/// Decides whether `q` lies in the physical domain of a measurement.
///
/// The minimum-norm preimage under the affine map is reconstructed and
/// checked: `inside` requires the image of the preimage to land back on `q`
/// within `tol` and the reconstructed matrix to be positive semidefinite
/// within `tol`. A verdict is always produced; no error path exists.
pub fn membership(q: &ProbabilityPoint, povm: &Povm, tol: f64) -> MembershipVerdict {
    let solver = AffineSolver::new(povm, tol);
    if q.len() != povm.len() {
        // Outcome count mismatch cannot be physical; report the distance to
        // the zero-padded or truncated query instead of panicking.
        let mut q_padded = q.values().to_vec();
        q_padded.resize(povm.len(), 0.0);
        let verdict = membership_with(&solver, &q_padded, tol);
        return MembershipVerdict {
            inside: false,
            witness_state: None,
            ..verdict
        };
    }
    membership_with(&solver, q.values(), tol)
}

/// Coordinates `x = p1 + p2 - p3 - p4`, `y = p1 - p2 + p3 - p4`,
/// `z = p1 - p2 - p3 + p4` of a four-outcome probability vector.
///
/// For the tetrahedral measurement these recover the Bloch vector divided by
/// `sqrt(3)`, so physical points satisfy `x^2 + y^2 + z^2 <= 1/3`.
pub fn tetrahedron_coordinates(q: &ProbabilityPoint) -> Result<(f64, f64, f64), DomainError> {
    if q.len() != 4 {
        return Err(DomainError::WrongOutcomeCount {
            expected: 4,
            got: q.len(),
        });
    }
    let p = q.values();
    Ok((
        p[0] + p[1] - p[2] - p[3],
        p[0] - p[1] + p[2] - p[3],
        p[0] - p[1] - p[2] + p[3],
    ))
}
