//! Randomized verification that the two observer views always agree, at
//! bipartite and tripartite level, plus the derived no-signalling and
//! round-trip properties.

use causalview::{
    check_nosignalling, random_cptp, random_density, random_povm, CausalScenario, RngSpec,
    Subsystem, TripartiteCausalScenario,
};
use rand::Rng;

/// One reproducible random scenario per stream: dims in 2..=4, 1-4 Kraus
/// operators, 2-5 outcomes per side.
fn random_scenario(seed: u64, stream: u64) -> CausalScenario {
    let mut rng = RngSpec::new(seed, stream).rng();
    let d_a = rng.gen_range(2..=4);
    let d_b = rng.gen_range(2..=4);
    let rho = random_density(d_a, 1e-3, &mut rng).unwrap();
    // a channel into a smaller space needs enough Kraus operators to fit
    // an isometry, so draw from the feasible part of 1..=4
    let k_min = d_a.div_ceil(d_b).max(1);
    let channel = random_cptp(d_a, d_b, rng.gen_range(k_min..=4), &mut rng).unwrap();
    let povm_a = random_povm(d_a, rng.gen_range(2..=5), &mut rng).unwrap();
    let povm_b = random_povm(d_b, rng.gen_range(2..=5), &mut rng).unwrap();
    CausalScenario::new(rho, channel, povm_a, povm_b).unwrap()
}

fn random_tripartite(seed: u64, stream: u64, d_c: usize) -> TripartiteCausalScenario {
    let mut rng = RngSpec::new(seed, stream).rng();
    let (d_a, d_b) = (2, 2);
    let rho_c = random_density(d_c, 1e-3, &mut rng).unwrap();
    let channel = random_cptp(d_c, d_a * d_b, rng.gen_range(1..=3), &mut rng).unwrap();
    let povm_a = random_povm(d_a, rng.gen_range(2..=3), &mut rng).unwrap();
    let povm_b = random_povm(d_b, rng.gen_range(2..=3), &mut rng).unwrap();
    let povm_c = random_povm(d_c, rng.gen_range(2..=3), &mut rng).unwrap();
    TripartiteCausalScenario::new(rho_c, channel, d_a, d_b, povm_a, povm_b, povm_c).unwrap()
}

#[test]
fn observer_views_agree_on_random_scenarios() {
    let mut worst = 0.0f64;
    for trial in 0..120 {
        let report = random_scenario(0xC0FFEE, trial).equivalence_report();
        worst = worst.max(report.max_abs_gap);
    }
    assert!(worst < 1e-10, "worst observer gap {worst:.3e}");
}

#[test]
fn ensemble_route_agrees_with_process_operator_route() {
    let mut worst = 0.0f64;
    for trial in 0..120 {
        let s = random_scenario(0xBEEF, trial);
        let gap = s
            .joint_distribution()
            .max_abs_gap(&s.joint_distribution_ensemble())
            .unwrap();
        worst = worst.max(gap);
    }
    assert!(worst < 1e-10, "worst oracle gap {worst:.3e}");
}

#[test]
fn process_operator_marginals_match_endpoints() {
    for trial in 0..40 {
        let s = random_scenario(0xFACADE, trial);
        let op = s.process_operator();
        let over_b = op.partial_trace(s.shape(), Subsystem::B).unwrap();
        assert!(over_b.frob_dist(s.rho().mat()).unwrap() < 1e-10);
        let over_a = op.partial_trace(s.shape(), Subsystem::A).unwrap();
        let evolved = s.channel().apply(s.rho()).unwrap();
        assert!(over_a.frob_dist(evolved.mat()).unwrap() < 1e-10);
    }
}

#[test]
fn shared_state_is_valid_with_transposed_preparation_marginal() {
    for trial in 0..40 {
        let s = random_scenario(0xDADA, trial);
        let sp = s.to_spacelike();
        assert!(sp.tau().min_eigenvalue() >= -1e-10);
        assert!((sp.tau().mat().trace().re - 1.0).abs() < 1e-10);
        let marginal = sp
            .tau()
            .mat()
            .partial_trace(sp.shape(), Subsystem::B)
            .unwrap();
        assert!(marginal.frob_dist(&s.rho().mat().transpose()).unwrap() < 1e-10);
    }
}

#[test]
fn a_marginal_is_preparation_distribution() {
    for trial in 0..40 {
        let s = random_scenario(0xAB, trial);
        let marginals = s.joint_distribution().row_marginals();
        for (i, a) in s.povm_a().effects().iter().enumerate() {
            let expected = (a * s.rho().mat()).trace().re;
            assert!((marginals[i] - expected).abs() < 1e-12);
        }
    }
}

#[test]
fn view_round_trip_preserves_distributions() {
    let mut worst = 0.0f64;
    for trial in 0..40 {
        let s = random_scenario(0x5EED, trial);
        let back = s.to_spacelike().to_causal().unwrap();
        let gap = s
            .joint_distribution()
            .max_abs_gap(&back.joint_distribution())
            .unwrap();
        worst = worst.max(gap);

        // and the shared state itself comes back
        let tau = s.to_spacelike();
        let tau_again = back.to_spacelike();
        let state_gap = tau.tau().mat().frob_dist(tau_again.tau().mat()).unwrap();
        assert!(
            state_gap < 1e-9,
            "shared-state round trip gap {state_gap:.3e}"
        );
    }
    assert!(worst < 1e-9, "worst round-trip gap {worst:.3e}");
}

#[test]
fn derived_shared_states_never_signal() {
    for trial in 0..25 {
        let s = random_scenario(0x9A11, trial);
        let sp = s.to_spacelike();
        let mut rng = RngSpec::new(0x9A12, trial).rng();
        let alts_a: Vec<_> = (0..4)
            .map(|_| random_povm(sp.shape().dim_a, rng.gen_range(2..=4), &mut rng).unwrap())
            .collect();
        let alts_b: Vec<_> = (0..4)
            .map(|_| random_povm(sp.shape().dim_b, rng.gen_range(2..=4), &mut rng).unwrap())
            .collect();
        let mut povms_a = vec![sp.povm_a().clone()];
        povms_a.extend(alts_a);
        let mut povms_b = vec![sp.povm_b().clone()];
        povms_b.extend(alts_b);
        let report = check_nosignalling(sp.tau(), sp.shape(), &povms_a, &povms_b, 1e-10).unwrap();
        assert!(report.pass, "trial {trial}: {report:?}");
    }
}

#[test]
fn causal_a_marginal_ignores_b_povm_choice() {
    // the mirror statement of no-signalling inside the causal view: the
    // preparation distribution cannot depend on what B measures
    for trial in 0..25 {
        let s = random_scenario(0x717, trial);
        let mut rng = RngSpec::new(0x718, trial).rng();
        let alt_b = random_povm(s.dim_b(), rng.gen_range(2..=4), &mut rng).unwrap();
        let alt = CausalScenario::new(
            s.rho().clone(),
            s.channel().clone(),
            s.povm_a().clone(),
            alt_b,
        )
        .unwrap();
        let m1 = s.joint_distribution().row_marginals();
        let m2 = alt.joint_distribution().row_marginals();
        for (x, y) in m1.iter().zip(&m2) {
            assert!((x - y).abs() < 1e-12);
        }
    }
}

#[test]
fn tripartite_views_agree_on_random_scenarios() {
    let mut worst = 0.0f64;
    for trial in 0..40 {
        let report = random_tripartite(0x3A, trial, 2).equivalence_report();
        worst = worst.max(report.max_abs_gap);
    }
    for trial in 0..10 {
        let report = random_tripartite(0x3B, trial, 3).equivalence_report();
        worst = worst.max(report.max_abs_gap);
    }
    assert!(worst < 1e-10, "worst tripartite gap {worst:.3e}");
}

#[test]
fn tripartite_ab_marginal_consistent_between_views() {
    for trial in 0..15 {
        let s = random_tripartite(0x3C, trial, 2);
        let report = s.equivalence_report();
        let gap = report
            .causal
            .marginal_ab()
            .max_abs_gap(&report.spacelike.marginal_ab())
            .unwrap();
        assert!(gap < 1e-10);
        assert!(report.spacelike.total() - 1.0 < 1e-10);
    }
}

#[test]
fn tripartite_shared_state_is_valid() {
    for trial in 0..15 {
        let s = random_tripartite(0x3D, trial, 3);
        let sp = s.to_spacelike();
        assert!(sp.tau().min_eigenvalue() >= -1e-10);
        assert!((sp.tau().mat().trace().re - 1.0).abs() < 1e-10);
    }
}
