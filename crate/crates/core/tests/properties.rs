//! Property suites for the matrix kernels and the validated quantum objects.
//!
//! Kernel properties draw raw entries straight from proptest; object
//! properties drive the seeded generators with proptest-chosen seeds so
//! every failure is replayable from its seed alone.

use causalview::{
    ensemble_decompose, random_cptp, random_density, random_povm, BipartiteShape, ComplexMatrix,
    DensityMatrix, KrausChannel, RngSpec, Subsystem, C64,
};
use proptest::prelude::*;

fn complex_entries(n: usize) -> impl Strategy<Value = Vec<C64>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n)
        .prop_map(|v| v.into_iter().map(|(re, im)| C64::new(re, im)).collect())
}

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = ComplexMatrix> {
    complex_entries(rows * cols).prop_map(move |data| ComplexMatrix::new(rows, cols, data).unwrap())
}

/// Random PSD matrix GG† of the given dimension.
fn psd(dim: usize) -> impl Strategy<Value = ComplexMatrix> {
    matrix(dim, dim).prop_map(|g| &g * &g.adjoint())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kron_is_associative(
        a in matrix(2, 2),
        b in matrix(3, 2),
        c in matrix(2, 3),
    ) {
        let left = a.kron(&b).kron(&c);
        let right = a.kron(&b.kron(&c));
        prop_assert!(left.frob_dist(&right).unwrap() < 1e-12);
    }

    #[test]
    fn trace_of_kron_factorizes(a in matrix(3, 3), b in matrix(2, 2)) {
        let lhs = a.kron(&b).trace();
        let rhs = a.trace() * b.trace();
        prop_assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn partial_ops_interchange(m in matrix(6, 6)) {
        // tracing out B after transposing A equals transposing the B-traced matrix
        let shape = BipartiteShape::new(2, 3);
        let lhs = m
            .partial_transpose(shape, Subsystem::A)
            .unwrap()
            .partial_trace(shape, Subsystem::B)
            .unwrap();
        let rhs = m.partial_trace(shape, Subsystem::B).unwrap().transpose();
        prop_assert!(lhs.frob_dist(&rhs).unwrap() < 1e-12);
    }

    #[test]
    fn partial_trace_preserves_trace(m in matrix(6, 6)) {
        let shape = BipartiteShape::new(3, 2);
        for side in [Subsystem::A, Subsystem::B] {
            let reduced = m.partial_trace(shape, side).unwrap();
            prop_assert!((reduced.trace() - m.trace()).norm() < 1e-12);
        }
    }

    #[test]
    fn sqrtm_squares_back(m in psd(5)) {
        let root = m.sqrtm_psd(1e-9).unwrap();
        let rebuilt = &root * &root;
        prop_assert!(rebuilt.frob_dist(&m).unwrap() < 1e-10);
    }

    #[test]
    fn eig_reconstructs_and_is_unitary(m in psd(6)) {
        let (vals, vecs) = m.eig_hermitian().unwrap();
        prop_assert!(vals.windows(2).all(|w| w[0] >= w[1]));
        let diag = ComplexMatrix::diag_real(&vals);
        let rebuilt = &(&vecs * &diag) * &vecs.adjoint();
        prop_assert!(rebuilt.frob_dist(&m).unwrap() < 1e-10);
        let gram = &vecs.adjoint() * &vecs;
        prop_assert!(gram.frob_dist(&ComplexMatrix::identity(6)).unwrap() < 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn ensemble_reconstructs_source(seed in any::<u64>(), dim in 2usize..=4, n in 2usize..=5) {
        let mut rng = RngSpec::new(seed, 0).rng();
        let rho = random_density(dim, 1e-3, &mut rng).unwrap();
        let povm = random_povm(dim, n, &mut rng).unwrap();
        let ensemble = ensemble_decompose(&rho, &povm).unwrap();
        let gap = ensemble.reconstruct().frob_dist(rho.mat()).unwrap();
        prop_assert!(gap < 1e-12, "reconstruction gap {gap}");
    }

    #[test]
    fn channels_preserve_trace_and_positivity(seed in any::<u64>(), d_in in 2usize..=4, d_out in 2usize..=4, k in 1usize..=4) {
        let mut rng = RngSpec::new(seed, 1).rng();
        let k = k.max(d_in.div_ceil(d_out));
        let ch = random_cptp(d_in, d_out, k, &mut rng).unwrap();
        let rho = random_density(d_in, 1e-3, &mut rng).unwrap();
        let out = ch.apply(&rho).unwrap();
        prop_assert!((out.mat().trace().re - 1.0).abs() < 1e-12);
        prop_assert!(out.min_eigenvalue() > -1e-12);
    }

    #[test]
    fn choi_round_trip_is_exact_at_choi_level(seed in any::<u64>(), d_in in 2usize..=3, d_out in 2usize..=3, k in 1usize..=4) {
        let mut rng = RngSpec::new(seed, 2).rng();
        let k = k.max(d_in.div_ceil(d_out));
        let ch = random_cptp(d_in, d_out, k, &mut rng).unwrap();
        let choi = ch.choi();
        let rebuilt = KrausChannel::from_choi(&choi, d_in, d_out, 1e-10).unwrap();
        let gap = rebuilt.choi().frob_dist(&choi).unwrap();
        prop_assert!(gap < 1e-10, "Choi gap {gap}");
    }

    #[test]
    fn povm_validation_rejects_perturbed_sums(seed in any::<u64>()) {
        let mut rng = RngSpec::new(seed, 3).rng();
        let povm = random_povm(3, 3, &mut rng).unwrap();
        let mut effects: Vec<ComplexMatrix> = povm.effects().to_vec();
        let bumped = &effects[0] + &ComplexMatrix::identity(3).scale_re(1e-6);
        effects[0] = bumped;
        let labels = povm.labels().to_vec();
        prop_assert!(causalview::Povm::new(labels, effects).is_err());
    }
}

#[test]
fn density_matrix_validation_catches_each_invariant() {
    // not square
    assert!(DensityMatrix::new(ComplexMatrix::zeros(2, 3)).is_err());
    // trace off by more than the tolerance
    let off = ComplexMatrix::diag_real(&[0.5, 0.5 + 1e-6]);
    assert!(DensityMatrix::new(off).is_err());
    // borderline trace inside the tolerance passes
    let nearly = ComplexMatrix::diag_real(&[0.5, 0.5 + 1e-10]);
    assert!(DensityMatrix::new(nearly).is_ok());
}
