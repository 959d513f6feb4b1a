//! Positive operator-valued measures and their affine probability map.
//!
//! An `N`-outcome measurement on a `d`-dimensional system is a list of
//! Hermitian positive semidefinite effects summing to the identity. Writing
//! effect `mu` as `x^mu + i y^mu` (real and imaginary parts) and a state by
//! its parameter vector `r`, the outcome probabilities are `p = M r + c`
//! with
//!
//! - row `mu` of `M`: the `d - 1` diagonal differences
//!   `x^mu_mm - x^mu_dd`, then `2 x^mu_mn` and `2 y^mu_mn` over the upper
//!   triangle in row-major order,
//! - offset `c_mu = x^mu_dd`.
//!
//! All `N` rows are kept even though they are linearly dependent (the
//! columns of `M` sum to zero and the offsets to one), so `M` has rank at
//! most `min(N - 1, d^2 - 1)`.

use crate::linalg::{hermitian_eigen, numerical_rank, ComplexMatrix, LinalgError, RealMatrix};
use crate::rng::SplitMix64;
use crate::states::param_count;
use crate::DEFAULT_TOL;
use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

/// Errors from measurement construction.
#[derive(Debug, Error)]
pub enum PovmError {
    #[error("measurement needs at least one effect")]
    Empty,
    #[error("effect {index} has order {got}, expected {expected}")]
    MixedOrders {
        index: usize,
        expected: usize,
        got: usize,
    },
    #[error("effect {index} is not Hermitian: residual {residual:.3e}")]
    EffectNotHermitian { index: usize, residual: f64 },
    #[error("effect {index} has negative eigenvalue {min_eigenvalue:.3e}")]
    EffectNotPositive { index: usize, min_eigenvalue: f64 },
    #[error("basis vectors are not orthonormal: residual {residual:.3e}")]
    NotOrthonormal { residual: f64 },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// A single validated effect: Hermitian and positive semidefinite within
/// `tol`.
#[derive(Debug, Clone, PartialEq)]
pub struct Effect {
    matrix: ComplexMatrix,
}

impl Effect {
    pub fn new(matrix: ComplexMatrix, tol: f64) -> Result<Self, PovmError> {
        if !matrix.is_finite() {
            return Err(PovmError::Linalg(LinalgError::NonFinite));
        }
        let residual = matrix.hermiticity_residual();
        if !(residual <= tol) {
            return Err(PovmError::EffectNotHermitian { index: 0, residual });
        }
        let eigen = hermitian_eigen(&matrix, tol)?;
        let min_eigenvalue = eigen.eigenvalues.first().copied().unwrap_or(0.0);
        if min_eigenvalue < -tol {
            return Err(PovmError::EffectNotPositive {
                index: 0,
                min_eigenvalue,
            });
        }
        Ok(Self { matrix })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }
}

/// An outcome list over a fixed dimension.
///
/// Construction checks only structure (at least one effect, all of equal
/// order, finite entries); run [`validate`] for the semantic report. Every
/// downstream operation documents that it expects a measurement that
/// validates cleanly.
#[derive(Debug, Clone, PartialEq)]
pub struct Povm {
    dim: usize,
    effects: Vec<ComplexMatrix>,
}

impl Povm {
    /// Wraps raw effect matrices without semantic validation.
    pub fn from_matrices(effects: Vec<ComplexMatrix>) -> Result<Self, PovmError> {
        let Some(first) = effects.first() else {
            return Err(PovmError::Empty);
        };
        let dim = first.order();
        for (index, e) in effects.iter().enumerate() {
            if e.order() != dim {
                return Err(PovmError::MixedOrders {
                    index,
                    expected: dim,
                    got: e.order(),
                });
            }
            if !e.is_finite() {
                return Err(PovmError::Linalg(LinalgError::NonFinite));
            }
        }
        Ok(Self { dim, effects })
    }

    /// Builds a measurement from individually validated effects.
    pub fn from_effects(effects: Vec<Effect>) -> Result<Self, PovmError> {
        Self::from_matrices(effects.into_iter().map(Effect::into_matrix).collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of outcomes.
    pub fn len(&self) -> usize {
        self.effects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.effects.is_empty()
    }

    pub fn effects(&self) -> &[ComplexMatrix] {
        &self.effects
    }

    pub fn effect(&self, mu: usize) -> &ComplexMatrix {
        &self.effects[mu]
    }
}

/// Per-effect findings gathered by [`validate`].
#[derive(Debug, Clone, Serialize)]
pub struct EffectReport {
    pub hermiticity_residual: f64,
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
}

/// Semantic validation report for a measurement.
#[derive(Debug, Clone, Serialize)]
pub struct PovmValidation {
    pub ok: bool,
    /// Largest entrywise deviation of the effect sum from the identity.
    pub completeness_residual: f64,
    pub effects: Vec<EffectReport>,
    /// Human-readable description of each violation found.
    pub violations: Vec<String>,
}

/// Checks Hermiticity and positivity of every effect and completeness of
/// their sum, each within `tol`. Violations are reported, never raised.
pub fn validate(povm: &Povm, tol: f64) -> PovmValidation {
    let d = povm.dim();
    let mut violations = Vec::new();
    let mut reports = Vec::with_capacity(povm.len());
    let mut sum = ComplexMatrix::zeros(d);
    for (index, effect) in povm.effects().iter().enumerate() {
        sum = sum.add(effect);
        let hermiticity_residual = effect.hermiticity_residual();
        if hermiticity_residual > tol {
            violations.push(format!(
                "effect {index} is not Hermitian (residual {hermiticity_residual:.3e})"
            ));
        }
        // Eigenvalues of the Hermitian part; for a Hermitian effect this is
        // the spectrum itself.
        let eigen = hermitian_eigen(&effect.hermitian_part(), f64::INFINITY)
            .expect("Hermitian part always decomposes");
        let min_eigenvalue = eigen.eigenvalues.first().copied().unwrap_or(0.0);
        let max_eigenvalue = eigen.eigenvalues.last().copied().unwrap_or(0.0);
        if min_eigenvalue < -tol {
            violations.push(format!(
                "effect {index} is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})"
            ));
        }
        reports.push(EffectReport {
            hermiticity_residual,
            min_eigenvalue,
            max_eigenvalue,
        });
    }
    let completeness_residual = sum.max_abs_diff(&ComplexMatrix::identity(d));
    if completeness_residual > tol {
        violations.push(format!(
            "effects do not sum to the identity (residual {completeness_residual:.3e})"
        ));
    }
    PovmValidation {
        ok: violations.is_empty(),
        completeness_residual,
        effects: reports,
        violations,
    }
}

/// The affine probability map `p = M r + c` of a measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineMap {
    matrix: RealMatrix,
    offset: Vec<f64>,
}

impl AffineMap {
    pub fn matrix(&self) -> &RealMatrix {
        &self.matrix
    }

    pub fn offset(&self) -> &[f64] {
        &self.offset
    }

    /// Number of outcomes `N`.
    pub fn n_outcomes(&self) -> usize {
        self.matrix.rows()
    }

    /// Number of state parameters `d^2 - 1`.
    pub fn n_params(&self) -> usize {
        self.matrix.cols()
    }

    pub fn apply(&self, r: &[f64]) -> Vec<f64> {
        let mut p = self.matrix.matvec(r);
        for (pi, ci) in p.iter_mut().zip(&self.offset) {
            *pi += ci;
        }
        p
    }
}

/// Assembles the affine map of a measurement from its effect entries.
pub fn build_affine_map(povm: &Povm) -> AffineMap {
    let d = povm.dim();
    let n = povm.len();
    let mut matrix = RealMatrix::zeros(n, param_count(d));
    let mut offset = vec![0.0; n];
    for (mu, effect) in povm.effects().iter().enumerate() {
        let x_dd = effect[(d - 1, d - 1)].re;
        offset[mu] = x_dd;
        let mut col = 0;
        for i in 0..d - 1 {
            matrix[(mu, col)] = effect[(i, i)].re - x_dd;
            col += 1;
        }
        for i in 0..d {
            for j in i + 1..d {
                matrix[(mu, col)] = 2.0 * effect[(i, j)].re;
                col += 1;
            }
        }
        for i in 0..d {
            for j in i + 1..d {
                matrix[(mu, col)] = 2.0 * effect[(i, j)].im;
                col += 1;
            }
        }
    }
    AffineMap { matrix, offset }
}

/// Rank of `M` with singular values cut at `tol` times the largest.
///
/// This is the dimension of the reachable probability region, at most
/// `min(N - 1, d^2 - 1)`.
pub fn effective_dimension(povm: &Povm, tol: f64) -> usize {
    let map = build_affine_map(povm);
    numerical_rank(map.matrix(), tol).expect("map entries are finite by construction")
}

/// Vertices of the regular tetrahedron inscribed in the unit sphere, one per
/// outcome of [`tetrahedral_povm`].
pub const TETRAHEDRON_VERTICES: [[f64; 3]; 4] = [
    [1.0, 1.0, 1.0],
    [1.0, -1.0, -1.0],
    [-1.0, 1.0, -1.0],
    [-1.0, -1.0, 1.0],
];

/// The symmetric four-outcome qubit measurement with effects
/// `(I + a_mu . sigma) / 4` along normalized tetrahedron vertices.
pub fn tetrahedral_povm() -> Povm {
    let s = 1.0 / 3.0f64.sqrt();
    let effects = TETRAHEDRON_VERTICES
        .iter()
        .map(|v| {
            let (ax, ay, az) = (v[0] * s, v[1] * s, v[2] * s);
            ComplexMatrix::from_rows(vec![
                vec![
                    Complex64::new((1.0 + az) / 4.0, 0.0),
                    Complex64::new(ax / 4.0, -ay / 4.0),
                ],
                vec![
                    Complex64::new(ax / 4.0, ay / 4.0),
                    Complex64::new((1.0 - az) / 4.0, 0.0),
                ],
            ])
            .expect("2x2 rows are square")
        })
        .collect();
    Povm::from_matrices(effects).expect("four effects of order 2")
}

/// Projective measurement onto an orthonormal basis.
///
/// The basis must be orthonormal within `tol` (largest Gram deviation from
/// the identity).
pub fn projective_povm(basis: &[Vec<Complex64>], tol: f64) -> Result<Povm, PovmError> {
    let d = basis.len();
    if d == 0 {
        return Err(PovmError::Empty);
    }
    for (index, v) in basis.iter().enumerate() {
        if v.len() != d {
            return Err(PovmError::MixedOrders {
                index,
                expected: d,
                got: v.len(),
            });
        }
    }
    let mut residual = 0.0f64;
    for i in 0..d {
        for j in 0..d {
            let dot: Complex64 = (0..d).map(|k| basis[i][k].conj() * basis[j][k]).sum();
            let want = if i == j { 1.0 } else { 0.0 };
            residual = residual.max((dot - want).norm());
        }
    }
    if !(residual <= tol) {
        return Err(PovmError::NotOrthonormal { residual });
    }
    Povm::from_matrices(basis.iter().map(|v| ComplexMatrix::outer(v)).collect())
}

/// Seeded random measurement with `n` full-rank effects.
///
/// Draws Gaussian factors `B_mu = G_mu G_mu†` and symmetrically normalizes
/// them by the inverse square root of their sum, which restores completeness
/// exactly up to rounding.
pub fn random_povm(dim: usize, n: usize, seed: u64) -> Povm {
    assert!(
        dim >= 1 && n >= 1,
        "need at least one effect and dimension 1"
    );
    let mut rng = SplitMix64::new(seed);
    loop {
        let raw: Vec<ComplexMatrix> = (0..n)
            .map(|_| {
                let g = ComplexMatrix::from_fn(dim, |_, _| {
                    Complex64::new(rng.next_gaussian(), rng.next_gaussian())
                });
                g.mul(&g.adjoint())
            })
            .collect();
        let mut sum = ComplexMatrix::zeros(dim);
        for b in &raw {
            sum = sum.add(b);
        }
        let eigen = hermitian_eigen(&sum, DEFAULT_TOL).expect("sum of Hermitian terms");
        let lo = eigen.eigenvalues.first().copied().unwrap_or(0.0);
        let hi = eigen.eigenvalues.last().copied().unwrap_or(0.0);
        if !(lo > 1e-10 * hi && hi > 0.0) {
            // Degenerate draw; try again further along the stream.
            continue;
        }
        let inv_sqrt = ComplexMatrix::from_fn(dim, |i, j| {
            (0..dim)
                .map(|k| {
                    eigen.eigenvectors[(i, k)]
                        * (1.0 / eigen.eigenvalues[k].sqrt())
                        * eigen.eigenvectors[(j, k)].conj()
                })
                .sum()
        });
        let effects = raw
            .into_iter()
            .map(|b| inv_sqrt.mul(&b).mul(&inv_sqrt))
            .collect();
        return Povm::from_matrices(effects).expect("n effects of equal order");
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{bloch_state, to_parameters, BlochVector, DensityMatrix};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn tetrahedral_povm_validates() {
        let povm = tetrahedral_povm();
        let report = validate(&povm, 1e-10);
        assert!(report.ok, "violations: {:?}", report.violations);
        assert!(report.completeness_residual < 1e-15);
    }

    #[test]
    fn tetrahedral_effects_have_known_spectrum() {
        // Each effect (I + a . sigma)/4 with |a| = 1 has eigenvalues 0 and
        // 1/2 and trace 1/2.
        let povm = tetrahedral_povm();
        for effect in povm.effects() {
            assert!((effect.trace().re - 0.5).abs() < 1e-15);
            let eigen = hermitian_eigen(effect, 1e-12).unwrap();
            assert!(eigen.eigenvalues[0].abs() < 1e-15);
            assert!((eigen.eigenvalues[1] - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn tetrahedron_vertex_dot_products() {
        // Distinct normalized vertices meet at cos = -1/3.
        let s = 1.0 / 3.0f64.sqrt();
        for (i, a) in TETRAHEDRON_VERTICES.iter().enumerate() {
            for (j, b) in TETRAHEDRON_VERTICES.iter().enumerate() {
                let dot = s * s * (a[0] * b[0] + a[1] * b[1] + a[2] * b[2]);
                let want = if i == j { 1.0 } else { -1.0 / 3.0 };
                assert!((dot - want).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn incomplete_povm_is_reported() {
        let effects = vec![
            ComplexMatrix::from_rows(vec![
                vec![c(1.0, 0.0), c(0.0, 0.0)],
                vec![c(0.0, 0.0), c(0.0, 0.0)],
            ])
            .unwrap(),
            ComplexMatrix::from_rows(vec![
                vec![c(0.0, 0.0), c(0.0, 0.0)],
                vec![c(0.0, 0.0), c(0.9, 0.0)],
            ])
            .unwrap(),
        ];
        let povm = Povm::from_matrices(effects).unwrap();
        let report = validate(&povm, 1e-10);
        assert!(!report.ok);
        assert!((report.completeness_residual - 0.1).abs() < 1e-15);
        assert_eq!(report.violations.len(), 1);
    }

    #[test]
    fn indefinite_effect_is_reported() {
        let effects = vec![
            ComplexMatrix::from_rows(vec![
                vec![c(1.1, 0.0), c(0.0, 0.0)],
                vec![c(0.0, 0.0), c(0.0, 0.0)],
            ])
            .unwrap(),
            ComplexMatrix::from_rows(vec![
                vec![c(-0.1, 0.0), c(0.0, 0.0)],
                vec![c(0.0, 0.0), c(1.0, 0.0)],
            ])
            .unwrap(),
        ];
        let povm = Povm::from_matrices(effects).unwrap();
        let report = validate(&povm, 1e-10);
        assert!(!report.ok);
        assert!(report
            .violations
            .iter()
            .any(|v| v.contains("positive semidefinite")));
        assert!((report.effects[1].min_eigenvalue + 0.1).abs() < 1e-12);
    }

    #[test]
    fn effect_constructor_validates() {
        let bad = ComplexMatrix::from_rows(vec![
            vec![c(0.5, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(-0.5, 0.0)],
        ])
        .unwrap();
        assert!(matches!(
            Effect::new(bad, 1e-10),
            Err(PovmError::EffectNotPositive { .. })
        ));
        let good = ComplexMatrix::identity(2).scale(0.5);
        let e = Effect::new(good, 1e-10).unwrap();
        let povm = Povm::from_effects(vec![e.clone(), e]).unwrap();
        assert!(validate(&povm, 1e-10).ok);
    }

    #[test]
    fn mixed_orders_rejected() {
        let effects = vec![ComplexMatrix::identity(2), ComplexMatrix::identity(3)];
        assert!(matches!(
            Povm::from_matrices(effects),
            Err(PovmError::MixedOrders { .. })
        ));
        assert!(matches!(Povm::from_matrices(vec![]), Err(PovmError::Empty)));
    }

    #[test]
    fn sigma_z_projective_map_is_exact() {
        // Effects diag(1,0) and diag(0,1): M rows (1,0,0) and (-1,0,0),
        // offsets (0,1).
        let basis = vec![
            vec![c(1.0, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(1.0, 0.0)],
        ];
        let povm = projective_povm(&basis, 1e-10).unwrap();
        let map = build_affine_map(&povm);
        assert_eq!(map.matrix().row(0), &[1.0, 0.0, 0.0]);
        assert_eq!(map.matrix().row(1), &[-1.0, 0.0, 0.0]);
        assert_eq!(map.offset(), &[0.0, 1.0]);
        assert_eq!(effective_dimension(&povm, 1e-10), 1);
    }

    #[test]
    fn tetrahedral_map_rows_follow_vertices() {
        // Row mu must be (a_z/2, a_x/2, -a_y/2) with offset (1 - a_z)/4.
        let povm = tetrahedral_povm();
        let map = build_affine_map(&povm);
        let s = 1.0 / 3.0f64.sqrt();
        for (mu, v) in TETRAHEDRON_VERTICES.iter().enumerate() {
            let (ax, ay, az) = (v[0] * s, v[1] * s, v[2] * s);
            let row = map.matrix().row(mu);
            assert!((row[0] - az / 2.0).abs() < 1e-15);
            assert!((row[1] - ax / 2.0).abs() < 1e-15);
            assert!((row[2] + ay / 2.0).abs() < 1e-15);
            assert!((map.offset()[mu] - (1.0 - az) / 4.0).abs() < 1e-15);
        }
        assert_eq!(effective_dimension(&povm, 1e-10), 3);
    }

    #[test]
    fn map_reproduces_born_probabilities() {
        // Dual route: trace pairing against the affine map.
        let povm = tetrahedral_povm();
        let map = build_affine_map(&povm);
        let rho = bloch_state(&BlochVector::new(0.2, -0.5, 0.6)).unwrap();
        let p_map = map.apply(to_parameters(&rho).values());
        for (mu, effect) in povm.effects().iter().enumerate() {
            let p_trace = rho.matrix().mul(effect).trace().re;
            assert!((p_map[mu] - p_trace).abs() < 1e-14);
        }
    }

    #[test]
    fn column_sums_and_offset_sum_invariants() {
        for seed in [1u64, 2, 3] {
            let povm = random_povm(3, 6, seed);
            let map = build_affine_map(&povm);
            for col in 0..map.n_params() {
                let sum: f64 = (0..map.n_outcomes())
                    .map(|row| map.matrix()[(row, col)])
                    .sum();
                assert!(sum.abs() < 1e-12, "column {col} sums to {sum:.3e}");
            }
            let c_sum: f64 = map.offset().iter().sum();
            assert!((c_sum - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn maximally_mixed_probabilities_are_scaled_traces() {
        let povm = random_povm(3, 5, 8);
        let rho = DensityMatrix::maximally_mixed(3);
        let map = build_affine_map(&povm);
        let p = map.apply(to_parameters(&rho).values());
        for (mu, effect) in povm.effects().iter().enumerate() {
            assert!((p[mu] - effect.trace().re / 3.0).abs() < 1e-13);
        }
    }

    #[test]
    fn random_povm_is_valid_and_deterministic() {
        let a = random_povm(2, 5, 33);
        let b = random_povm(2, 5, 33);
        for (x, y) in a.effects().iter().zip(b.effects()) {
            assert_eq!(x.max_abs_diff(y), 0.0);
        }
        let report = validate(&a, 1e-10);
        assert!(report.ok, "violations: {:?}", report.violations);
    }

    #[test]
    fn effective_dimension_is_capped_by_outcomes_and_parameters() {
        // Column sums of zero force rank <= N - 1; the parameter count caps
        // it at d^2 - 1.
        assert_eq!(effective_dimension(&random_povm(2, 2, 4), 1e-10), 1);
        assert_eq!(effective_dimension(&random_povm(2, 6, 4), 1e-10), 3);
        assert_eq!(effective_dimension(&random_povm(3, 4, 4), 1e-10), 3);
        assert_eq!(effective_dimension(&random_povm(3, 12, 4), 1e-10), 8);
    }

    #[test]
    fn effective_dimension_ignores_duplication_and_splitting() {
        let povm = tetrahedral_povm();
        let base = effective_dimension(&povm, 1e-10);
        // Duplicate outcomes with halved weight.
        let mut doubled = Vec::new();
        for e in povm.effects() {
            doubled.push(e.scale(0.5));
            doubled.push(e.scale(0.5));
        }
        let doubled = Povm::from_matrices(doubled).unwrap();
        assert!(validate(&doubled, 1e-10).ok);
        assert_eq!(effective_dimension(&doubled, 1e-10), base);
        // Permutation.
        let mut shuffled = povm.effects().to_vec();
        shuffled.swap(0, 3);
        shuffled.swap(1, 2);
        let shuffled = Povm::from_matrices(shuffled).unwrap();
        assert_eq!(effective_dimension(&shuffled, 1e-10), base);
    }

    #[test]
    fn trivial_povm_has_dimension_zero() {
        let half = ComplexMatrix::identity(2).scale(0.5);
        let povm = Povm::from_matrices(vec![half.clone(), half]).unwrap();
        assert!(validate(&povm, 1e-10).ok);
        assert_eq!(effective_dimension(&povm, 1e-10), 0);
    }

    #[test]
    fn fourier_projective_qutrit_dimension() {
        // The Fourier basis of a qutrit gives three rank-one projectors;
        // the map has rank N - 1 = 2.
        let d = 3;
        let w = std::f64::consts::TAU / d as f64;
        let basis: Vec<Vec<Complex64>> = (0..d)
            .map(|k| {
                (0..d)
                    .map(|j| Complex64::from_polar(1.0 / (d as f64).sqrt(), w * (k * j) as f64))
                    .collect()
            })
            .collect();
        let povm = projective_povm(&basis, 1e-10).unwrap();
        assert!(validate(&povm, 1e-10).ok);
        assert_eq!(effective_dimension(&povm, 1e-10), 2);
    }

    #[test]
    fn projective_rejects_skewed_basis() {
        let basis = vec![
            vec![c(1.0, 0.0), c(0.0, 0.0)],
            vec![c(0.5, 0.0), c(0.5, 0.0)],
        ];
        assert!(matches!(
            projective_povm(&basis, 1e-10),
            Err(PovmError::NotOrthonormal { .. })
        ));
    }
}
