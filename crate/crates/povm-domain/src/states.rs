//! Density matrices and their real parametrizations.
//!
//! A density matrix of order `d` is Hermitian, has unit trace and no negative
//! eigenvalues, which leaves `d^2 - 1` free real numbers. The parameter
//! vector used throughout this crate lists the first `d - 1` diagonal entries
//! followed by the real parts and then the imaginary parts of the upper
//! triangle, both in row-major order. The last diagonal entry is fixed by the
//! trace.

use crate::linalg::{hermitian_eigen, ComplexMatrix, LinalgError};
use crate::rng::SplitMix64;
use num_complex::Complex64;
use thiserror::Error;

/// Entrywise validation bound used by the checked constructors.
const STATE_TOL: f64 = 1e-10;

/// Errors from state construction and conversion.
#[derive(Debug, Error)]
pub enum StateError {
    #[error("density matrix is not Hermitian: residual {residual:.3e}")]
    NotHermitian { residual: f64 },
    #[error("density matrix trace is {trace}, expected 1")]
    NotUnitTrace { trace: f64 },
    #[error("density matrix has negative eigenvalue {min_eigenvalue:.3e}")]
    NotPositive { min_eigenvalue: f64 },
    #[error("{kind} angle {value} outside {range}")]
    AngleOutOfRange {
        kind: &'static str,
        value: f64,
        range: &'static str,
    },
    #[error("Bloch vector norm {norm} exceeds 1")]
    OutsideBlochBall { norm: f64 },
    #[error("rank {rank} invalid for dimension {dim}")]
    BadRank { rank: usize, dim: usize },
    #[error("parameter vector has length {got}, expected {expected}")]
    WrongLength { expected: usize, got: usize },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Validated density matrix: Hermitian, unit trace and positive
/// semidefinite, each within `1e-10`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Checks all three defining properties before wrapping the matrix.
    pub fn new(matrix: ComplexMatrix) -> Result<Self, StateError> {
        if !matrix.is_finite() {
            return Err(StateError::Linalg(LinalgError::NonFinite));
        }
        let residual = matrix.hermiticity_residual();
        if !(residual <= STATE_TOL) {
            return Err(StateError::NotHermitian { residual });
        }
        let trace = matrix.trace().re;
        if !((trace - 1.0).abs() <= STATE_TOL) {
            return Err(StateError::NotUnitTrace { trace });
        }
        let eigen = hermitian_eigen(&matrix, STATE_TOL)?;
        let min_eigenvalue = eigen.eigenvalues.first().copied().unwrap_or(0.0);
        if min_eigenvalue < -STATE_TOL {
            return Err(StateError::NotPositive { min_eigenvalue });
        }
        Ok(Self { matrix })
    }

    /// Wraps a matrix known valid by construction.
    pub(crate) fn from_matrix_unchecked(matrix: ComplexMatrix) -> Self {
        Self { matrix }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        assert!(dim >= 1, "dimension must be at least 1");
        Self {
            matrix: ComplexMatrix::identity(dim).scale(1.0 / dim as f64),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.order()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }
}

/// The `d^2 - 1` real state parameters for a given dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct StateParameters {
    dim: usize,
    values: Vec<f64>,
}

impl StateParameters {
    pub fn new(dim: usize, values: Vec<f64>) -> Result<Self, StateError> {
        let expected = param_count(dim);
        if values.len() != expected {
            return Err(StateError::WrongLength {
                expected,
                got: values.len(),
            });
        }
        Ok(Self { dim, values })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Number of free real parameters of an order-`d` density matrix.
pub fn param_count(dim: usize) -> usize {
    dim * dim - 1
}

/// Hyperspherical description of a pure state.
///
/// `polar` holds `d - 1` angles in `[0, pi/2]` fixing the moduli of the
/// amplitudes; `phases` holds `d - 1` angles in `[0, 2 pi)` applied to all
/// but the last amplitude, which stays real and nonnegative. At the north
/// pole (all polar angles zero) the phases are redundant.
#[derive(Debug, Clone, PartialEq)]
pub struct PureStateAngles {
    polar: Vec<f64>,
    phases: Vec<f64>,
}

impl PureStateAngles {
    pub fn new(polar: Vec<f64>, phases: Vec<f64>) -> Result<Self, StateError> {
        if polar.len() != phases.len() {
            return Err(StateError::WrongLength {
                expected: polar.len(),
                got: phases.len(),
            });
        }
        for &a in &polar {
            if !(0.0..=std::f64::consts::FRAC_PI_2).contains(&a) {
                return Err(StateError::AngleOutOfRange {
                    kind: "polar",
                    value: a,
                    range: "[0, pi/2]",
                });
            }
        }
        for &a in &phases {
            if !(0.0..std::f64::consts::TAU).contains(&a) {
                return Err(StateError::AngleOutOfRange {
                    kind: "phase",
                    value: a,
                    range: "[0, 2pi)",
                });
            }
        }
        Ok(Self { polar, phases })
    }

    /// Uniform angle draw for a given dimension (not Haar measure).
    pub fn sample(dim: usize, rng: &mut SplitMix64) -> Self {
        assert!(dim >= 2, "pure-state angles need dimension at least 2");
        let polar = (0..dim - 1)
            .map(|_| rng.next_range(0.0, std::f64::consts::FRAC_PI_2))
            .collect();
        let phases = (0..dim - 1)
            .map(|_| rng.next_range(0.0, std::f64::consts::TAU))
            .collect();
        Self { polar, phases }
    }

    pub fn dim(&self) -> usize {
        self.polar.len() + 1
    }

    pub fn polar(&self) -> &[f64] {
        &self.polar
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }
}

/// Qubit Bloch vector; the closed ball of radius 1 is the physical region.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }
}

/// Reads the parameter vector off a density matrix.
pub fn to_parameters(rho: &DensityMatrix) -> StateParameters {
    let d = rho.dim();
    let m = rho.matrix();
    let mut values = Vec::with_capacity(param_count(d));
    for i in 0..d - 1 {
        values.push(m[(i, i)].re);
    }
    for i in 0..d {
        for j in i + 1..d {
            values.push(m[(i, j)].re);
        }
    }
    for i in 0..d {
        for j in i + 1..d {
            values.push(m[(i, j)].im);
        }
    }
    StateParameters { dim: d, values }
}

/// Rebuilds the Hermitian unit-trace matrix encoded by a parameter vector.
///
/// Positivity is not implied; arbitrary parameters may land outside the
/// physical region.
pub fn from_parameters(params: &StateParameters) -> ComplexMatrix {
    let d = params.dim;
    let v = &params.values;
    let mut m = ComplexMatrix::zeros(d);
    let mut diag_sum = 0.0;
    for i in 0..d - 1 {
        m[(i, i)] = Complex64::new(v[i], 0.0);
        diag_sum += v[i];
    }
    m[(d - 1, d - 1)] = Complex64::new(1.0 - diag_sum, 0.0);
    let n_off = d * (d - 1) / 2;
    let mut idx = 0;
    for i in 0..d {
        for j in i + 1..d {
            let re = v[d - 1 + idx];
            let im = v[d - 1 + n_off + idx];
            m[(i, j)] = Complex64::new(re, im);
            m[(j, i)] = Complex64::new(re, -im);
            idx += 1;
        }
    }
    m
}

/// Amplitude vector of the pure state described by hyperspherical angles.
pub fn pure_state_vector(angles: &PureStateAngles) -> Vec<Complex64> {
    let d = angles.dim();
    // Moduli from nested polar factoring: each angle splits off one
    // amplitude, the first angle feeds the final pair.
    let mut moduli = vec![0.0f64; d];
    let mut prefix = 1.0;
    for k in (3..=d).rev() {
        let a = angles.polar[d - k];
        moduli[k - 1] = prefix * a.cos();
        prefix *= a.sin();
    }
    let a = angles.polar[d - 2];
    moduli[0] = prefix * a.cos();
    moduli[1] = prefix * a.sin();
    let mut v: Vec<Complex64> = moduli[..d - 1]
        .iter()
        .zip(&angles.phases)
        .map(|(&m, &phase)| Complex64::from_polar(m, phase))
        .collect();
    v.push(Complex64::new(moduli[d - 1], 0.0));
    v
}

/// Rank-one density matrix of the pure state with the given angles.
pub fn pure_state(angles: &PureStateAngles) -> DensityMatrix {
    let v = pure_state_vector(angles);
    DensityMatrix::from_matrix_unchecked(ComplexMatrix::outer(&v))
}

/// Qubit density matrix for a Bloch vector inside the closed unit ball.
pub fn bloch_state(n: &BlochVector) -> Result<DensityMatrix, StateError> {
    let norm = n.norm();
    if !(norm <= 1.0 + STATE_TOL) {
        return Err(StateError::OutsideBlochBall { norm });
    }
    let m = ComplexMatrix::from_rows(vec![
        vec![
            Complex64::new((1.0 + n.z) / 2.0, 0.0),
            Complex64::new(n.x / 2.0, -n.y / 2.0),
        ],
        vec![
            Complex64::new(n.x / 2.0, n.y / 2.0),
            Complex64::new((1.0 - n.z) / 2.0, 0.0),
        ],
    ])
    .expect("2x2 rows are square");
    Ok(DensityMatrix::from_matrix_unchecked(m))
}

/// Convex mixture of orthogonal pure states reproducing `rho`.
///
/// Eigenvalues at or below `tol` are dropped and the surviving weights are
/// renormalized, so the weights always sum to 1. Weights come back in
/// descending order.
pub fn spectral_decompose(
    rho: &DensityMatrix,
    tol: f64,
) -> Result<Vec<(f64, DensityMatrix)>, StateError> {
    let eigen = hermitian_eigen(rho.matrix(), tol.max(STATE_TOL))?;
    let mut terms: Vec<(f64, DensityMatrix)> = Vec::new();
    let mut total = 0.0;
    for j in (0..rho.dim()).rev() {
        let w = eigen.eigenvalues[j];
        if w <= tol {
            break;
        }
        let v = eigen.eigenvector(j);
        terms.push((
            w,
            DensityMatrix::from_matrix_unchecked(ComplexMatrix::outer(&v)),
        ));
        total += w;
    }
    for term in &mut terms {
        term.0 /= total;
    }
    Ok(terms)
}

/// Seeded random density matrix of the requested rank.
///
/// Draws a `d x rank` complex Gaussian factor `G` and normalizes `G G†` to
/// unit trace, giving rank exactly `rank` with probability one.
pub fn random_density(dim: usize, rank: usize, seed: u64) -> Result<DensityMatrix, StateError> {
    if dim < 1 || rank < 1 || rank > dim {
        return Err(StateError::BadRank { rank, dim });
    }
    let mut rng = SplitMix64::new(seed);
    loop {
        let mut g = vec![vec![Complex64::new(0.0, 0.0); rank]; dim];
        for row in g.iter_mut() {
            for entry in row.iter_mut() {
                *entry = Complex64::new(rng.next_gaussian(), rng.next_gaussian());
            }
        }
        let b = ComplexMatrix::from_fn(dim, |i, j| {
            (0..rank).map(|k| g[i][k] * g[j][k].conj()).sum()
        });
        let trace = b.trace().re;
        if trace > 1e-12 {
            return Ok(DensityMatrix::from_matrix_unchecked(b.scale(1.0 / trace)));
        }
        // A numerically vanishing draw; take the next one from the stream.
    }
}
