//! Finite-sample estimation against the physical domain.
//!
//! Measured frequencies scatter around the true probabilities with binomial
//! dispersion per outcome, so an experiment defines an error box rather than
//! a point. This module simulates counts, inverts frequencies linearly (the
//! result need not be a physical state), repairs positivity by projecting
//! onto the closest density matrix, and classifies a count record as
//! feasible, marginal or insufficient depending on where its error box
//! stands relative to the domain.

use crate::domain::{membership_with, AffineSolver, DomainError, ProbabilityPoint};
use crate::linalg::{hermitian_eigen, ComplexMatrix, LinalgError};
use crate::povm::Povm;
use crate::rng::SplitMix64;
use crate::states::{from_parameters, DensityMatrix, StateError, StateParameters};
use crate::DEFAULT_TOL;
use thiserror::Error;

/// Number of interpolation steps toward the center tried by [`classify`]
/// before seeded sampling starts.
const LINE_STEPS: usize = 64;

/// Errors from estimation routines.
#[derive(Debug, Error)]
pub enum EstimationError {
    #[error("need at least one shot")]
    NoShots,
    #[error("counts sum to {got}, record claims {claimed}")]
    CountMismatch { claimed: u64, got: u64 },
    #[error("count record has {got} outcomes, measurement has {expected}")]
    WrongOutcomeCount { expected: usize, got: usize },
    #[error("matrix trace is {trace}, expected 1")]
    NotUnitTrace { trace: f64 },
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error(transparent)]
    State(#[from] StateError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Outcome counts of a repeated measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct CountRecord {
    n: u64,
    counts: Vec<u64>,
}

impl CountRecord {
    /// Builds a record from raw counts; the total must be positive.
    pub fn new(counts: Vec<u64>) -> Result<Self, EstimationError> {
        let n = counts.iter().sum();
        if n == 0 {
            return Err(EstimationError::NoShots);
        }
        Ok(Self { n, counts })
    }

    /// Builds a record from a claimed total and counts, checking agreement.
    pub fn from_parts(n: u64, counts: Vec<u64>) -> Result<Self, EstimationError> {
        let got: u64 = counts.iter().sum();
        if got != n {
            return Err(EstimationError::CountMismatch { claimed: n, got });
        }
        Self::new(counts)
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Observed frequencies `n_mu / n`.
    pub fn frequencies(&self) -> ProbabilityPoint {
        let q: Vec<f64> = self
            .counts
            .iter()
            .map(|&c| c as f64 / self.n as f64)
            .collect();
        ProbabilityPoint::new(q).expect("count frequencies are a probability vector")
    }
}

/// The error box of a count record: frequencies plus or minus `k` estimated
/// standard deviations per outcome.
#[derive(Debug, Clone)]
pub struct ErrorBox {
    pub center: ProbabilityPoint,
    pub halfwidths: Vec<f64>,
    pub k: f64,
}

impl ErrorBox {
    pub fn new(record: &CountRecord, k: f64) -> Self {
        let n = record.n() as f64;
        let halfwidths = dispersion(record).iter().map(|d| k * d / n).collect();
        Self {
            center: record.frequencies(),
            halfwidths,
            k,
        }
    }

    /// Whether `q` lies in the box intersected with the probability simplex.
    pub fn contains(&self, q: &[f64]) -> bool {
        if q.len() != self.halfwidths.len() {
            return false;
        }
        q.iter()
            .zip(self.center.values())
            .zip(&self.halfwidths)
            .all(|((&qi, &ci), &hi)| qi >= 0.0 && (qi - ci).abs() <= hi + 1e-12)
    }
}

/// Verdict of [`classify`].
#[derive(Debug, Clone)]
pub enum FeasibilityVerdict {
    /// The frequencies themselves are the image of a density matrix.
    Feasible { estimate: DensityMatrix },
    /// The frequencies are unphysical but their error box touches the
    /// domain; `boundary_point` is a physical point found inside the box.
    Marginal {
        boundary_point: ProbabilityPoint,
        estimate: DensityMatrix,
    },
    /// No physical point was found inside the error box within the budget.
    Insufficient,
}

/// Diagnostics attached to a linear inversion.
#[derive(Debug, Clone)]
pub struct InversionDiagnostics {
    /// Euclidean distance between the query and the image of the inverted
    /// parameters.
    pub consistency_residual: f64,
    /// Rank of the affine map at the default cutoff.
    pub effective_dimension: usize,
    /// Whether the inversion picked the minimum-norm preimage among many.
    pub non_unique: bool,
}

/// Simulates `n` independent shots of a measurement on a state.
///
/// Sampling walks the outcomes once, drawing each count from the binomial
/// distribution conditioned on the remaining shots and renormalized tail
/// probability, which is equivalent to `n` categorical draws but costs
/// `O(n)` uniforms in total. Fixed seeds give fixed records.
pub fn simulate_counts(
    rho: &DensityMatrix,
    povm: &Povm,
    n: u64,
    seed: u64,
) -> Result<CountRecord, EstimationError> {
    if n == 0 {
        return Err(EstimationError::NoShots);
    }
    let p = crate::domain::probabilities(rho, povm)?;
    let mut rng = SplitMix64::new(seed);
    let mut counts = vec![0u64; p.len()];
    let mut remaining = n;
    let mut tail = 1.0f64;
    for (mu, &p_mu) in p.values().iter().enumerate() {
        if remaining == 0 {
            break;
        }
        if mu + 1 == p.len() {
            counts[mu] = remaining;
            break;
        }
        let ratio = if tail > 0.0 {
            (p_mu / tail).clamp(0.0, 1.0)
        } else {
            0.0
        };
        let mut c = 0u64;
        for _ in 0..remaining {
            if rng.next_f64() < ratio {
                c += 1;
            }
        }
        counts[mu] = c;
        remaining -= c;
        tail -= p_mu;
    }
    CountRecord::new(counts)
}

/// Estimated binomial dispersion of each count,
/// `sqrt(n_mu (n - n_mu) / n)`.
pub fn dispersion(record: &CountRecord) -> Vec<f64> {
    let n = record.n() as f64;
    record
        .counts()
        .iter()
        .map(|&c| {
            let c = c as f64;
            (c * (n - c) / n).sqrt()
        })
        .collect()
}

/// Inverts frequencies through the affine map of a measurement.
///
/// Returns the Hermitian unit-trace matrix of the minimum-norm preimage.
/// Nothing forces it positive: frequencies outside the physical domain give
/// an unphysical matrix, which is the point of the downstream
/// classification.
pub fn linear_inversion(
    q: &ProbabilityPoint,
    povm: &Povm,
) -> Result<(ComplexMatrix, InversionDiagnostics), EstimationError> {
    if q.len() != povm.len() {
        return Err(EstimationError::WrongOutcomeCount {
            expected: povm.len(),
            got: q.len(),
        });
    }
    let solver = AffineSolver::new(povm, DEFAULT_TOL);
    let r = solver.invert(q.values());
    let model = solver.map.apply(&r);
    let consistency_residual = model
        .iter()
        .zip(q.values())
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    let params = StateParameters::new(solver.dim, r)?;
    let matrix = from_parameters(&params);
    let diagnostics = InversionDiagnostics {
        consistency_residual,
        effective_dimension: solver.rank,
        non_unique: solver.non_unique(),
    };
    Ok((matrix, diagnostics))
}

/// Projects a Hermitian unit-trace matrix onto the closest density matrix
/// in Frobenius norm.
///
/// The eigenvalues are projected onto the probability simplex by iterated
/// clipping: negative eigenvalues are zeroed and the deficit is spread
/// uniformly over the support that remains, repeating until the support
/// stabilizes. The eigenvectors are untouched.
pub fn project_to_physical(matrix: &ComplexMatrix) -> Result<DensityMatrix, EstimationError> {
    let trace = matrix.trace().re;
    if (trace - 1.0).abs() > 1e-8 {
        return Err(EstimationError::NotUnitTrace { trace });
    }
    let eigen = hermitian_eigen(matrix, 1e-8)?;
    let clipped = clip_to_simplex(&eigen.eigenvalues);
    let d = matrix.order();
    let projected = ComplexMatrix::from_fn(d, |i, j| {
        (0..d)
            .map(|k| eigen.eigenvectors[(i, k)] * clipped[k] * eigen.eigenvectors[(j, k)].conj())
            .sum()
    });
    Ok(DensityMatrix::from_matrix_unchecked(projected))
}

/// Euclidean projection of a real vector onto the probability simplex by
/// iterated clipping with uniform redistribution.
fn clip_to_simplex(values: &[f64]) -> Vec<f64> {
    let mut out = values.to_vec();
    let mut active: Vec<bool> = vec![true; out.len()];
    loop {
        let support = active.iter().filter(|&&a| a).count();
        if support == 0 {
            // Unreachable for unit-sum input; fall back to uniform.
            let d = out.len();
            return vec![1.0 / d as f64; d];
        }
        let surplus: f64 = out
            .iter()
            .zip(&active)
            .map(|(&v, &a)| if a { v } else { 0.0 })
            .sum::<f64>()
            - 1.0;
        let shift = surplus / support as f64;
        let mut changed = false;
        for (v, a) in out.iter_mut().zip(active.iter_mut()) {
            if !*a {
                *v = 0.0;
                continue;
            }
            *v -= shift;
            if *v < 0.0 {
                *v = 0.0;
                *a = false;
                changed = true;
            }
        }
        if !changed {
            return out;
        }
    }
}

/// Classifies a count record against the physical domain of a measurement.
///
/// The frequencies are tested first; if they are physical the verdict is
/// `Feasible`. Otherwise candidate points inside the error box of `k`
/// estimated standard deviations are tried, at most `budget` of them: the
/// projection of the frequencies onto the affine span, a line of points
/// from there toward the uniform image point, then seeded perturbations of
/// the frequencies snapped to the probability simplex. Candidate generation
/// does not depend on `k`; widening the box only admits more of the same
/// stream, so a verdict can only improve with `k`. The first candidate that
/// is both in the box and physical makes the verdict `Marginal`; if none is
/// found the verdict is `Insufficient`.
pub fn classify(
    record: &CountRecord,
    povm: &Povm,
    k: f64,
    budget: usize,
    seed: u64,
    tol: f64,
) -> Result<FeasibilityVerdict, EstimationError> {
    if record.len() != povm.len() {
        return Err(EstimationError::WrongOutcomeCount {
            expected: povm.len(),
            got: record.len(),
        });
    }
    let solver = AffineSolver::new(povm, tol);
    let q = record.frequencies();
    let first = membership_with(&solver, q.values(), tol);
    if first.inside {
        let estimate = project_to_physical(
            first
                .witness_state
                .expect("inside implies witness")
                .matrix(),
        )?;
        return Ok(FeasibilityVerdict::Feasible { estimate });
    }
    let error_box = ErrorBox::new(record, k);
    let n_out = povm.len();
    // Image of the maximally mixed state, the natural interior target.
    let p_mix = crate::domain::probabilities(&DensityMatrix::maximally_mixed(povm.dim()), povm)?
        .values()
        .to_vec();
    let sigma: Vec<f64> = dispersion(record)
        .iter()
        .map(|d| d / record.n() as f64)
        .collect();
    let mut rng = SplitMix64::new(seed);
    let mut candidate = vec![0.0; n_out];
    for attempt in 0..budget {
        if attempt == 0 {
            // Euclidean projection of q onto the affine span of the domain.
            let r = solver.invert(q.values());
            candidate = solver.map.apply(&r);
        } else if attempt <= LINE_STEPS {
            let t = attempt as f64 / LINE_STEPS as f64;
            for (c, (&qi, &mi)) in candidate.iter_mut().zip(q.values().iter().zip(&p_mix)) {
                *c = (1.0 - t) * qi + t * mi;
            }
        } else {
            // Seeded box-scale perturbations of q, snapped to the simplex.
            // Scales cycle so both timid and bold moves appear whatever the
            // budget; the draw itself never looks at k.
            let scale = [0.25, 0.5, 1.0, 2.0, 4.0][(attempt - LINE_STEPS - 1) % 5];
            let perturbed: Vec<f64> = q
                .values()
                .iter()
                .zip(&sigma)
                .map(|(&qi, &si)| qi + scale * si * rng.next_range(-1.0, 1.0))
                .collect();
            candidate = clip_to_simplex(&perturbed);
        }
        if !error_box.contains(&candidate) {
            continue;
        }
        let verdict = membership_with(&solver, &candidate, tol);
        if verdict.inside {
            let estimate = project_to_physical(
                verdict
                    .witness_state
                    .expect("inside implies witness")
                    .matrix(),
            )?;
            let boundary_point =
                ProbabilityPoint::new(candidate).expect("box candidates are probability vectors");
            return Ok(FeasibilityVerdict::Marginal {
                boundary_point,
                estimate,
            });
        }
    }
    Ok(FeasibilityVerdict::Insufficient)
}
