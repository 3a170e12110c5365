//! Two observer views of one quantum experiment.
//!
//! A *causal* view prepares an ensemble, sends it through a channel and
//! measures at the far end; a *spacelike* view measures two halves of a
//! shared bipartite state. This crate builds both views, maps between them
//! by partial transposition and verifies numerically that they predict the
//! same joint outcome distributions.

pub mod channel;
pub mod error;
pub mod mat;
pub mod nosignal;
pub mod povm;
pub mod random;
pub mod scenario;
pub mod state;
pub mod tripartite;

pub use channel::KrausChannel;
pub use error::{Error, Result};
pub use mat::{BipartiteShape, ComplexMatrix, Subsystem, C64};
pub use nosignal::{check_nosignalling, signalling_demo, NoSignallingReport, SignallingDemoReport};
pub use povm::Povm;
pub use random::{
    random_cptp, random_density, random_povm, random_projective_povm, random_unitary, RngSpec,
};
pub use scenario::{
    polarizer_scenario, CausalScenario, EquivalenceReport, JointDistribution, SpacelikeScenario,
};
pub use state::{ensemble_decompose, DensityMatrix, EnsembleMember, WeightedEnsemble};
pub use tripartite::{
    permute_systems, JointDistribution3, TripartiteCausalScenario, TripartiteEquivalenceReport,
    TripartiteSpacelikeScenario,
};

/// Default tolerance for structural predicates: Hermiticity, positivity,
/// unit trace, POVM completeness, trace preservation.
pub const DEFAULT_TOL: f64 = 1e-9;

/// A state counts as full rank when its minimum eigenvalue reaches this.
pub const FULL_RANK_THRESHOLD: f64 = 1e-8;

/// Probability entries in `[-NEG_PROB_TOL, 0)` are clamped to zero;
/// anything below is an invariant breach.
pub const NEG_PROB_TOL: f64 = 1e-12;

/// Joint distributions must sum to one within this.
pub const DIST_SUM_TOL: f64 = 1e-10;
