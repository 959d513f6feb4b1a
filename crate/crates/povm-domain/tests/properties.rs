//! Randomized invariants driven by proptest: membership decisions agree
//! with the forward map, the affine map matches trace pairing on fuzzed
//! seeds, and positivity repair is a projection.

use num_complex::Complex64;
use povm_domain::domain::{membership, probabilities};
use povm_domain::estimation::{project_to_physical, simulate_counts};
use povm_domain::linalg::{hermitian_eigen, ComplexMatrix};
use povm_domain::povm::{build_affine_map, random_povm, tetrahedral_povm};
use povm_domain::states::{bloch_state, random_density, to_parameters, BlochVector};
use proptest::prelude::*;

proptest! {
    #[test]
    fn physical_bloch_images_are_members(
        u in 0.0f64..1.0,
        cos_theta in -1.0f64..1.0,
        phi in 0.0f64..std::f64::consts::TAU,
    ) {
        // Radius from u^(1/3) covers the ball without touching the
        // boundary purity edge case, which has its own tests.
        let r = 0.999 * u.cbrt();
        let sin_theta = (1.0 - cos_theta * cos_theta).sqrt();
        let n = BlochVector::new(
            r * sin_theta * phi.cos(),
            r * sin_theta * phi.sin(),
            r * cos_theta,
        );
        let povm = tetrahedral_povm();
        let rho = bloch_state(&n).unwrap();
        let q = probabilities(&rho, &povm).unwrap();
        let verdict = membership(&q, &povm, 1e-10);
        prop_assert!(verdict.inside);
        let witness = verdict.witness_state.unwrap();
        let image = probabilities(&witness, &povm).unwrap();
        for (a, b) in image.values().iter().zip(q.values()) {
            prop_assert!((a - b).abs() <= 1e-10);
        }
    }

    #[test]
    fn affine_map_agrees_with_trace_pairing(
        seed in any::<u64>(),
        d in 2usize..5,
        extra in 0usize..4,
    ) {
        let povm = random_povm(d, d * d + extra, seed);
        let rho = random_density(d, d, seed ^ 0x9E37_79B9_7F4A_7C15).unwrap();
        let map = build_affine_map(&povm);
        let predicted = map.apply(to_parameters(&rho).values());
        let actual = probabilities(&rho, &povm).unwrap();
        for (lhs, rhs) in predicted.iter().zip(actual.values()) {
            prop_assert!((lhs - rhs).abs() <= 1e-12);
        }
    }

    #[test]
    fn positivity_repair_is_a_projection(
        raw in proptest::collection::vec(-1.5f64..1.5, 2..6),
    ) {
        // Shift an arbitrary diagonal to unit trace, repair it, and check
        // the result is a state and a fixed point.
        let d = raw.len();
        let shift = (1.0 - raw.iter().sum::<f64>()) / d as f64;
        let m = ComplexMatrix::from_fn(d, |i, j| {
            if i == j {
                Complex64::new(raw[i] + shift, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        let repaired = project_to_physical(&m).unwrap();
        let eigen = hermitian_eigen(repaired.matrix(), 1e-10).unwrap();
        prop_assert!(eigen.eigenvalues[0] >= -1e-12);
        let trace: f64 = eigen.eigenvalues.iter().sum();
        prop_assert!((trace - 1.0).abs() <= 1e-10);
        let again = project_to_physical(repaired.matrix()).unwrap();
        prop_assert!(again.matrix().max_abs_diff(repaired.matrix()) <= 1e-12);
    }

    #[test]
    fn simulated_counts_always_complete(
        shots in 1u64..2000,
        seed in any::<u64>(),
    ) {
        let povm = tetrahedral_povm();
        let rho = random_density(2, 2, seed).unwrap();
        let rec = simulate_counts(&rho, &povm, shots, seed).unwrap();
        prop_assert_eq!(rec.counts().iter().sum::<u64>(), shots);
        prop_assert_eq!(rec.counts().len(), 4);
        let repeat = simulate_counts(&rho, &povm, shots, seed).unwrap();
        prop_assert_eq!(repeat.counts(), rec.counts());
    }
}
