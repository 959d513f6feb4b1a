//! Acceptance gate: ten end-to-end checks covering the geometry of the
//! probability domain, the affine map, and the estimation pipeline.
//!
//! Each check prints a single `[PASS]`/`[FAIL]` line with its worst
//! observed figure; run with
//! `cargo test --test acceptance -- --nocapture` to see all of them.

use povm_domain::domain::{
    extreme_point_sample, membership, probabilities, subspace_dimension, tetrahedron_coordinates,
    ProbabilityPoint,
};
use povm_domain::estimation::{
    classify, linear_inversion, simulate_counts, CountRecord, FeasibilityVerdict,
};
use povm_domain::linalg::{hermitian_eigen, svd, RealMatrix};
use povm_domain::povm::{
    build_affine_map, effective_dimension, random_povm, tetrahedral_povm, Povm,
    TETRAHEDRON_VERTICES,
};
use povm_domain::rng::SplitMix64;
use povm_domain::states::{
    bloch_state, pure_state, random_density, spectral_decompose, to_parameters, BlochVector,
    DensityMatrix, PureStateAngles,
};

const SPHERE_TOL: f64 = 1e-12;
const COORD_TOL: f64 = 1e-12;
const RANK_REL_TOL: f64 = 1e-9;
const MIXTURE_TOL: f64 = 1e-12;
const MAP_TOL: f64 = 1e-12;
const ROUND_TRIP_TOL: f64 = 1e-10;
const STD_REL_TOL: f64 = 0.1;
const RECOMBINE_TOL: f64 = 1e-10;
const TANGENCY_TOL: f64 = 1e-12;
const SPHERE_RADIUS_SQ: f64 = 1.0 / 12.0;
const COORD_RADIUS_SQ: f64 = 1.0 / 3.0;

fn report(num: usize, label: &str, ok: bool, detail: &str) {
    let tag = if ok { "PASS" } else { "FAIL" };
    println!("[{tag}] criterion {num:>2}: {label} ({detail})");
    assert!(ok, "criterion {num} failed: {detail}");
}

fn quadrance(q: &ProbabilityPoint) -> f64 {
    q.values().iter().map(|&p| (p - 0.25) * (p - 0.25)).sum()
}

fn mix(a: &DensityMatrix, b: &DensityMatrix, x: f64) -> DensityMatrix {
    let m = a.matrix().scale(x).add(&b.matrix().scale(1.0 - x));
    DensityMatrix::new(m).expect("convex mixtures of states are states")
}

fn centered_singular_values(points: &[ProbabilityPoint]) -> Vec<f64> {
    let count = points.len();
    let width = points[0].len();
    let mut mean = vec![0.0; width];
    for p in points {
        for (m, &v) in mean.iter_mut().zip(p.values()) {
            *m += v;
        }
    }
    for m in &mut mean {
        *m /= count as f64;
    }
    let rows = points
        .iter()
        .map(|p| p.values().iter().zip(&mean).map(|(&v, &m)| v - m).collect())
        .collect();
    svd(&RealMatrix::from_rows(rows).unwrap())
        .unwrap()
        .singular_values
}

// Exact probabilities scaled to integer counts by largest remainder.
fn exact_counts(p: &ProbabilityPoint, n: u64) -> CountRecord {
    let raw: Vec<f64> = p.values().iter().map(|&v| v * n as f64).collect();
    let mut counts: Vec<u64> = raw.iter().map(|&v| v.floor() as u64).collect();
    let assigned: u64 = counts.iter().sum();
    let mut order: Vec<usize> = (0..raw.len()).collect();
    order.sort_by(|&a, &b| {
        let fa = raw[a] - raw[a].floor();
        let fb = raw[b] - raw[b].floor();
        fb.partial_cmp(&fa).unwrap().then(a.cmp(&b))
    });
    for &mu in order.iter().take((n - assigned) as usize) {
        counts[mu] += 1;
    }
    CountRecord::from_parts(n, counts).unwrap()
}

#[test]
fn acceptance_01_sphere_law() {
    let povm = tetrahedral_povm();
    let mut rng = SplitMix64::new(101);
    let mut worst_pure = 0.0f64;
    for _ in 0..1000 {
        let angles = PureStateAngles::sample(2, &mut rng);
        let q = probabilities(&pure_state(&angles), &povm).unwrap();
        worst_pure = worst_pure.max((quadrance(&q) - SPHERE_RADIUS_SQ).abs());
    }
    let mut worst_mixed = 0.0f64;
    for seed in 0..1000 {
        let rho = random_density(2, 2, 2000 + seed).unwrap();
        let q = probabilities(&rho, &povm).unwrap();
        worst_mixed = worst_mixed.max(quadrance(&q));
    }
    let ok = worst_pure <= SPHERE_TOL && worst_mixed <= SPHERE_RADIUS_SQ;
    report(
        1,
        "pure-state images sit on the radius-1/sqrt(12) sphere, mixed inside",
        ok,
        &format!("max pure deviation {worst_pure:.2e}, max mixed quadrance {worst_mixed:.6}"),
    );
}

#[test]
fn acceptance_02_coordinate_sphere() {
    let povm = tetrahedral_povm();
    let mut rng = SplitMix64::new(101);
    let mut worst_pure = 0.0f64;
    let mut worst_any = f64::NEG_INFINITY;
    for _ in 0..1000 {
        let angles = PureStateAngles::sample(2, &mut rng);
        let q = probabilities(&pure_state(&angles), &povm).unwrap();
        let (x, y, z) = tetrahedron_coordinates(&q).unwrap();
        let r2 = x * x + y * y + z * z;
        worst_pure = worst_pure.max((r2 - COORD_RADIUS_SQ).abs());
        worst_any = worst_any.max(r2);
    }
    for seed in 0..1000 {
        let rho = random_density(2, 2, 2000 + seed).unwrap();
        let q = probabilities(&rho, &povm).unwrap();
        let (x, y, z) = tetrahedron_coordinates(&q).unwrap();
        worst_any = worst_any.max(x * x + y * y + z * z);
    }
    let ok = worst_pure <= COORD_TOL && worst_any <= COORD_RADIUS_SQ + COORD_TOL;
    report(
        2,
        "coordinate images stay in the 1/3-ball, pure states on its surface",
        ok,
        &format!("max pure |r^2 - 1/3| {worst_pure:.2e}, max r^2 {worst_any:.12}"),
    );
}

#[test]
fn acceptance_03_subspace_confinement() {
    let mut ok = true;
    let mut worst_ratio = 0.0f64;
    let mut run = |povm: &Povm, bound: usize, sample_seed: u64| {
        let points = extreme_point_sample(povm, 200, sample_seed);
        let dim = subspace_dimension(&points, RANK_REL_TOL).unwrap();
        let eff = effective_dimension(povm, RANK_REL_TOL);
        let sv = centered_singular_values(&points);
        let ratio = sv[bound] / sv[0];
        ok &= dim <= bound && dim == eff && ratio < RANK_REL_TOL;
        worst_ratio = worst_ratio.max(ratio);
    };
    for i in 0..20u64 {
        let povm = random_povm(2, 5 + (i as usize % 6), 300 + i);
        run(&povm, 3, 400 + i);
    }
    for i in 0..20u64 {
        let povm = random_povm(3, if i % 2 == 0 { 10 } else { 12 }, 340 + i);
        run(&povm, 8, 440 + i);
    }
    report(
        3,
        "sampled affine dimension is confined and matches the map rank",
        ok,
        &format!("worst excess singular-value ratio {worst_ratio:.2e}"),
    );
}

#[test]
fn acceptance_04_convexity() {
    let povms = [
        random_povm(2, 6, 501),
        random_povm(3, 9, 502),
        random_povm(4, 17, 503),
    ];
    let mut rng = SplitMix64::new(550);
    let mut worst = 0.0f64;
    for i in 0..1000u64 {
        let povm = &povms[(i % 3) as usize];
        let d = povm.dim();
        let rho1 = random_density(d, d, 3000 + 2 * i).unwrap();
        let rho2 = random_density(d, d, 3001 + 2 * i).unwrap();
        let x = rng.next_f64();
        let blend = probabilities(&mix(&rho1, &rho2, x), povm).unwrap();
        let p1 = probabilities(&rho1, povm).unwrap();
        let p2 = probabilities(&rho2, povm).unwrap();
        for ((&b, &a1), &a2) in blend.values().iter().zip(p1.values()).zip(p2.values()) {
            worst = worst.max((b - (x * a1 + (1.0 - x) * a2)).abs());
        }
    }
    report(
        4,
        "probability images mix affinely with the states",
        worst <= MIXTURE_TOL,
        &format!("max entrywise mixture defect {worst:.2e}"),
    );
}

#[test]
fn acceptance_05_affine_map_correctness() {
    let mut worst_prob = 0.0f64;
    let mut worst_col = 0.0f64;
    let mut worst_offset = 0.0f64;
    for i in 0..100u64 {
        let d = 2 + (i as usize % 3);
        let n = d * d + (i as usize % 3);
        let povm = random_povm(d, n, 600 + i);
        let rho = random_density(d, d, 700 + i).unwrap();
        let map = build_affine_map(&povm);
        let predicted = map.apply(to_parameters(&rho).values());
        let actual = probabilities(&rho, &povm).unwrap();
        for (&lhs, &rhs) in predicted.iter().zip(actual.values()) {
            worst_prob = worst_prob.max((lhs - rhs).abs());
        }
        for j in 0..map.n_params() {
            let col: f64 = (0..map.n_outcomes()).map(|mu| map.matrix()[(mu, j)]).sum();
            worst_col = worst_col.max(col.abs());
        }
        let offset_sum: f64 = map.offset().iter().sum();
        worst_offset = worst_offset.max((offset_sum - 1.0).abs());
    }
    let ok = worst_prob <= MAP_TOL && worst_col <= MAP_TOL && worst_offset <= MAP_TOL;
    report(
        5,
        "affine map reproduces trace pairing with zero column sums",
        ok,
        &format!(
            "max probability defect {worst_prob:.2e}, column sum {worst_col:.2e}, offset sum defect {worst_offset:.2e}"
        ),
    );
}

#[test]
fn acceptance_06_tomographic_round_trip() {
    let povm = tetrahedral_povm();
    let mut worst_err = 0.0f64;
    let mut worst_witness = 0.0f64;
    let mut all_inside = true;
    for seed in 0..100 {
        let rank = 1 + (seed as usize % 2);
        let rho = random_density(2, rank, 800 + seed).unwrap();
        let q = probabilities(&rho, &povm).unwrap();
        let (recovered, _) = linear_inversion(&q, &povm).unwrap();
        worst_err = worst_err.max(recovered.sub(rho.matrix()).frobenius_norm());
        let verdict = membership(&q, &povm, 1e-10);
        all_inside &= verdict.inside;
        match verdict.witness_state {
            Some(w) => worst_witness = worst_witness.max(w.matrix().max_abs_diff(&recovered)),
            None => all_inside = false,
        }
    }
    let ok = worst_err <= ROUND_TRIP_TOL && all_inside && worst_witness <= ROUND_TRIP_TOL;
    report(
        6,
        "exact probabilities invert to the state and certify membership",
        ok,
        &format!(
            "max Frobenius error {worst_err:.2e}, max witness gap {worst_witness:.2e}, all inside: {all_inside}"
        ),
    );
}

#[test]
fn acceptance_07_count_dispersion() {
    let povm = tetrahedral_povm();
    let rho = DensityMatrix::maximally_mixed(2);
    let n = 10_000u64;
    let runs = 1000usize;
    let mut sums = [0.0f64; 4];
    let mut squares = [0.0f64; 4];
    for seed in 0..runs as u64 {
        let rec = simulate_counts(&rho, &povm, n, seed).unwrap();
        for (mu, &count) in rec.counts().iter().enumerate() {
            sums[mu] += count as f64;
            squares[mu] += (count as f64) * (count as f64);
        }
    }
    let expected = (n as f64 * 0.25 * 0.75).sqrt();
    let mut worst = 0.0f64;
    for mu in 0..4 {
        let mean = sums[mu] / runs as f64;
        let std = (squares[mu] / runs as f64 - mean * mean).sqrt();
        worst = worst.max((std / expected - 1.0).abs());
    }
    report(
        7,
        "empirical count dispersion matches the binomial law",
        worst <= STD_REL_TOL,
        &format!("worst relative deviation {worst:.3} from sqrt(1875) = {expected:.4}"),
    );
}

#[test]
fn acceptance_08_extreme_point_decomposition() {
    let povm = random_povm(3, 9, 801);
    let mut ok = true;
    let mut worst = 0.0f64;
    for seed in 0..100 {
        let rho = random_density(3, 3, 900 + seed).unwrap();
        let q = probabilities(&rho, &povm).unwrap();
        let parts = spectral_decompose(&rho, 1e-12).unwrap();
        ok &= parts.len() <= 3;
        let mut recombined = vec![0.0; q.len()];
        for (weight, pure) in &parts {
            let image = probabilities(pure, &povm).unwrap();
            for (acc, &p) in recombined.iter_mut().zip(image.values()) {
                *acc += weight * p;
            }
        }
        for (&acc, &p) in recombined.iter().zip(q.values()) {
            worst = worst.max((acc - p).abs());
        }
    }
    report(
        8,
        "states split into at most d pure pieces whose images recombine",
        ok && worst <= RECOMBINE_TOL,
        &format!("max recombination defect {worst:.2e}"),
    );
}

#[test]
fn acceptance_09_facet_tangency() {
    let povm = tetrahedral_povm();
    let scale = 1.0 / 3.0f64.sqrt();
    let mut worst = 0.0f64;
    for (mu, v) in TETRAHEDRON_VERTICES.iter().enumerate() {
        let n = BlochVector::new(-v[0] * scale, -v[1] * scale, -v[2] * scale);
        let q = probabilities(&bloch_state(&n).unwrap(), &povm).unwrap();
        for (nu, &p) in q.values().iter().enumerate() {
            let target = if nu == mu { 0.0 } else { 1.0 / 3.0 };
            worst = worst.max((p - target).abs());
        }
    }
    report(
        9,
        "antipodes of the vertices touch the four simplex facets",
        worst <= TANGENCY_TOL,
        &format!("max deviation from (1/3, 1/3, 1/3, 0) patterns {worst:.2e}"),
    );
}

#[test]
fn acceptance_10_classifier_sanity() {
    let povm = tetrahedral_povm();
    let skewed = CountRecord::new(vec![70, 10, 10, 10]).unwrap();
    let verdict = classify(&skewed, &povm, 1.0, 10_000, 0, 1e-10).unwrap();
    let skew_ok = matches!(verdict, FeasibilityVerdict::Insufficient);

    let n = 10_000u64;
    let half = DensityMatrix::maximally_mixed(2);
    let mut feasible = 0usize;
    for seed in 0..100 {
        let rho = mix(&random_density(2, 2, 1000 + seed).unwrap(), &half, 0.8);
        let eigen = hermitian_eigen(rho.matrix(), 1e-10).unwrap();
        assert!(eigen.eigenvalues[0] >= 0.05, "state not mixed enough");
        let q = probabilities(&rho, &povm).unwrap();
        let rec = exact_counts(&q, n);
        if let FeasibilityVerdict::Feasible { .. } =
            classify(&rec, &povm, 1.0, 10_000, seed, 1e-10).unwrap()
        {
            feasible += 1;
        }
    }
    report(
        10,
        "far-off counts are rejected, well-mixed exact counts accepted",
        skew_ok && feasible >= 95,
        &format!("skewed verdict insufficient: {skew_ok}, feasible {feasible}/100"),
    );
}
