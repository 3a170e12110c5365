//! No-signalling checks on shared bipartite states, and the demonstration
//! that an apparent marginal change under a swapped preparation is a change
//! of shared state rather than an influence between the regions.

use crate::error::{Error, Result};
use crate::mat::{trace_product_re, BipartiteShape, ComplexMatrix, Subsystem};
use crate::povm::Povm;
use crate::scenario::CausalScenario;
use crate::state::DensityMatrix;

/// Worst marginal deviations found while swapping measurement choices.
///
/// `direction_a_to_b` is the largest change any B-outcome marginal shows
/// when the A-side POVM is exchanged for an alternative; `direction_b_to_a`
/// mirrors it. Raw maxima are kept so thresholds can move without re-running.
#[derive(Debug, Clone)]
pub struct NoSignallingReport {
    pub direction_a_to_b: f64,
    pub direction_b_to_a: f64,
    pub povm_pairs_tested: usize,
    pub tolerance: f64,
    pub pass: bool,
}

/// Checks both bullets of the no-signalling condition on a shared state:
/// each side's outcome marginals must not move when the other side swaps
/// among the supplied measurement alternatives.
pub fn check_nosignalling(
    tau: &DensityMatrix,
    shape: BipartiteShape,
    povms_a: &[Povm],
    povms_b: &[Povm],
    tolerance: f64,
) -> Result<NoSignallingReport> {
    if povms_a.len() < 2 || povms_b.len() < 2 {
        return Err(Error::InvalidArgument(
            "need at least two POVM alternatives per side to compare marginals".into(),
        ));
    }
    if tau.dim() != shape.total() {
        return Err(Error::ShapeMismatch(format!(
            "state dimension {} does not match shape ({}, {})",
            tau.dim(),
            shape.dim_a,
            shape.dim_b
        )));
    }
    for p in povms_a {
        if p.dim() != shape.dim_a {
            return Err(Error::ShapeMismatch(format!(
                "A-side POVM dimension {} vs subsystem dimension {}",
                p.dim(),
                shape.dim_a
            )));
        }
    }
    for p in povms_b {
        if p.dim() != shape.dim_b {
            return Err(Error::ShapeMismatch(format!(
                "B-side POVM dimension {} vs subsystem dimension {}",
                p.dim(),
                shape.dim_b
            )));
        }
    }

    let direction_a_to_b = marginal_spread(tau, shape, povms_a, povms_b, Subsystem::B)?;
    let direction_b_to_a = marginal_spread(tau, shape, povms_b, povms_a, Subsystem::A)?;
    let pairs = |n: usize| n * (n - 1) / 2;
    Ok(NoSignallingReport {
        direction_a_to_b,
        direction_b_to_a,
        povm_pairs_tested: pairs(povms_a.len()) + pairs(povms_b.len()),
        tolerance,
        pass: direction_a_to_b < tolerance && direction_b_to_a < tolerance,
    })
}

/// Largest spread, over every effect on the `kept` side, of the summed
/// joint probabilities as the other side runs through its alternatives.
/// The sums are accumulated term by term so the check exercises the same
/// arithmetic an experiment would tabulate.
fn marginal_spread(
    tau: &DensityMatrix,
    shape: BipartiteShape,
    swapped: &[Povm],
    kept: &[Povm],
    kept_side: Subsystem,
) -> Result<f64> {
    let mut worst = 0.0f64;
    for kept_povm in kept {
        for effect in kept_povm.effects() {
            // conditional operator on the swapped side for this outcome
            let embedded = match kept_side {
                Subsystem::B => ComplexMatrix::identity(shape.dim_a).kron(effect),
                Subsystem::A => effect.kron(&ComplexMatrix::identity(shape.dim_b)),
            };
            // absorbing the kept effect and tracing out its subsystem
            // leaves the conditional operator on the swapped side
            let conditional = (tau.mat() * &embedded).partial_trace(shape, kept_side)?;
            let marginals: Vec<f64> = swapped
                .iter()
                .map(|p| {
                    p.effects()
                        .iter()
                        .map(|a| trace_product_re(a, &conditional))
                        .sum()
                })
                .collect();
            let max = marginals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let min = marginals.iter().cloned().fold(f64::INFINITY, f64::min);
            worst = worst.max(max - min);
        }
    }
    Ok(worst)
}

/// Side-by-side marginal bookkeeping for a preparation swap ρ → ρ'.
#[derive(Debug, Clone)]
pub struct SignallingDemoReport {
    /// B-outcome labels the marginals refer to.
    pub b_labels: Vec<String>,
    /// B marginals of the original scenario, causal route.
    pub causal: Vec<f64>,
    /// B marginals after the preparation swap, causal route.
    pub causal_swapped: Vec<f64>,
    /// Same two marginal sets computed through the shared-state view.
    pub spacelike: Vec<f64>,
    pub spacelike_swapped: Vec<f64>,
    /// Largest marginal movement caused by the swap. Nonzero is fine: it
    /// signals through the channel, not across a spacelike cut.
    pub marginal_shift: f64,
    /// Largest disagreement between the two routes over both scenarios.
    pub view_gap: f64,
    /// Set when ρ' coincides with ρ and the demo shows nothing.
    pub degenerate: bool,
}

/// Swaps the preparation of a causal scenario and compares B marginals.
///
/// The causal observer sees the B statistics move (the channel carries the
/// change). The spacelike observer reproduces exactly the same numbers from
/// the two shared states built from ρ and ρ', so nothing travels between
/// the regions: only the shared state differs.
pub fn signalling_demo(
    scenario: &CausalScenario,
    rho_prime: &DensityMatrix,
) -> Result<SignallingDemoReport> {
    if rho_prime.dim() != scenario.dim_a() {
        return Err(Error::ShapeMismatch(format!(
            "replacement preparation has dimension {}, scenario uses {}",
            rho_prime.dim(),
            scenario.dim_a()
        )));
    }
    rho_prime.require_full_rank()?;
    let degenerate = scenario
        .rho()
        .mat()
        .frob_dist(rho_prime.mat())
        .expect("same dimension")
        < crate::DEFAULT_TOL;

    let swapped = CausalScenario::new(
        rho_prime.clone(),
        scenario.channel().clone(),
        scenario.povm_a().clone(),
        scenario.povm_b().clone(),
    )?;

    let causal_table = scenario.joint_distribution();
    let causal_table_swapped = swapped.joint_distribution();
    let spacelike_table = scenario.to_spacelike().joint_distribution();
    let spacelike_table_swapped = swapped.to_spacelike().joint_distribution();

    let causal = causal_table.col_marginals();
    let causal_swapped = causal_table_swapped.col_marginals();
    let spacelike = spacelike_table.col_marginals();
    let spacelike_swapped = spacelike_table_swapped.col_marginals();

    let marginal_shift = causal
        .iter()
        .zip(&causal_swapped)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    let view_gap = causal_table
        .max_abs_gap(&spacelike_table)
        .expect("same labels")
        .max(
            causal_table_swapped
                .max_abs_gap(&spacelike_table_swapped)
                .expect("same labels"),
        );

    Ok(SignallingDemoReport {
        b_labels: causal_table.col_labels().to_vec(),
        causal,
        causal_swapped,
        spacelike,
        spacelike_swapped,
        marginal_shift,
        view_gap,
        degenerate,
    })
}
