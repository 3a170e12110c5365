//! The two observer views of one bipartite experiment.
//!
//! The causal view prepares an ensemble ρ on A, evolves it through a channel
//! into B and measures both ends. The spacelike view shares a bipartite
//! state τ between A and B and measures the two halves in parallel. The two
//! are related by transposing every operator on the system whose input/output
//! role flips: τ is the partial transpose on A of the process operator, and
//! the A-side effects get transposed. Both views produce the same joint
//! probability table, which is the whole point.

use crate::channel::KrausChannel;
use crate::error::{Error, Result};
use crate::mat::{trace_product_re, BipartiteShape, ComplexMatrix, Subsystem, C64};
use crate::povm::Povm;
use crate::state::DensityMatrix;
use crate::{DIST_SUM_TOL, NEG_PROB_TOL};

/// Preparation → channel → measurement view of the experiment.
#[derive(Debug, Clone)]
pub struct CausalScenario {
    rho: DensityMatrix,
    channel: KrausChannel,
    povm_a: Povm,
    povm_b: Povm,
}

/// Shared-state view: two measurements on the halves of one bipartite state.
#[derive(Debug, Clone)]
pub struct SpacelikeScenario {
    tau: DensityMatrix,
    shape: BipartiteShape,
    povm_a: Povm,
    povm_b: Povm,
}

/// Labeled joint probability table; rows are A outcomes, columns B outcomes.
///
/// Entries in `[-NEG_PROB_TOL, 0)` are rounding noise and get clamped to
/// zero; anything more negative, or a total away from one by more than
/// `DIST_SUM_TOL`, breaks the construction.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDistribution {
    row_labels: Vec<String>,
    col_labels: Vec<String>,
    probs: Vec<f64>,
}

impl JointDistribution {
    pub fn new(
        row_labels: Vec<String>,
        col_labels: Vec<String>,
        mut probs: Vec<f64>,
    ) -> Result<Self> {
        if probs.len() != row_labels.len() * col_labels.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} probabilities for a {}x{} table",
                probs.len(),
                row_labels.len(),
                col_labels.len()
            )));
        }
        let mut total = 0.0;
        for p in probs.iter_mut() {
            if *p < -NEG_PROB_TOL {
                return Err(Error::InvalidArgument(format!(
                    "negative probability {p:.3e} below -{NEG_PROB_TOL:.0e}"
                )));
            }
            if *p < 0.0 {
                *p = 0.0;
            }
            total += *p;
        }
        if (total - 1.0).abs() > DIST_SUM_TOL {
            return Err(Error::InvalidArgument(format!(
                "probabilities sum to {total:.12}, expected 1 within {DIST_SUM_TOL:.0e}"
            )));
        }
        Ok(Self {
            row_labels,
            col_labels,
            probs,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.row_labels.len()
    }

    pub fn n_cols(&self) -> usize {
        self.col_labels.len()
    }

    pub fn row_labels(&self) -> &[String] {
        &self.row_labels
    }

    pub fn col_labels(&self) -> &[String] {
        &self.col_labels
    }

    pub fn p(&self, i: usize, j: usize) -> f64 {
        self.probs[i * self.col_labels.len() + j]
    }

    /// Probability looked up by outcome labels.
    pub fn p_by_label(&self, row: &str, col: &str) -> Option<f64> {
        let i = self.row_labels.iter().position(|l| l == row)?;
        let j = self.col_labels.iter().position(|l| l == col)?;
        Some(self.p(i, j))
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    /// Marginal over columns: the A-side outcome distribution.
    pub fn row_marginals(&self) -> Vec<f64> {
        (0..self.n_rows())
            .map(|i| (0..self.n_cols()).map(|j| self.p(i, j)).sum())
            .collect()
    }

    /// Marginal over rows: the B-side outcome distribution.
    pub fn col_marginals(&self) -> Vec<f64> {
        (0..self.n_cols())
            .map(|j| (0..self.n_rows()).map(|i| self.p(i, j)).sum())
            .collect()
    }

    /// Largest entrywise difference against a table with the same labels.
    pub fn max_abs_gap(&self, other: &Self) -> Result<f64> {
        if self.row_labels != other.row_labels || self.col_labels != other.col_labels {
            return Err(Error::ShapeMismatch(
                "distributions have different outcome labels".into(),
            ));
        }
        Ok(self
            .probs
            .iter()
            .zip(&other.probs)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max))
    }
}

/// Both views' tables for one experiment plus their largest disagreement.
#[derive(Debug, Clone)]
pub struct EquivalenceReport {
    pub causal: JointDistribution,
    pub spacelike: JointDistribution,
    pub max_abs_gap: f64,
}

/// (𝕀 ⊗ channel) applied to |Φ⟩⟨Φ| with |Φ⟩ = (√ρᵀ ⊗ I) Σ|jj⟩.
///
/// This is the bipartite state the spacelike observer assigns; it is PSD
/// with unit trace by construction, its A marginal is ρᵀ and its B marginal
/// is the channel output on ρ. Component-wise, (I ⊗ K)|Φ⟩ stacks the matrix
/// K√ρ in column-major order, so each Kraus operator contributes one outer
/// product.
pub(crate) fn evolve_purification(rho: &DensityMatrix, channel: &KrausChannel) -> ComplexMatrix {
    let d_in = channel.d_in();
    let d_out = channel.d_out();
    let root = rho.sqrt();
    let mut tau = ComplexMatrix::zeros(d_in * d_out, d_in * d_out);
    for k in channel.kraus_ops() {
        let kr = k * &root;
        let mut w = vec![C64::new(0.0, 0.0); d_in * d_out];
        for j in 0..d_in {
            for e in 0..d_out {
                w[j * d_out + e] = kr[(e, j)];
            }
        }
        tau = &tau + &ComplexMatrix::outer(&w, &w);
    }
    tau
}

impl CausalScenario {
    pub fn new(
        rho: DensityMatrix,
        channel: KrausChannel,
        povm_a: Povm,
        povm_b: Povm,
    ) -> Result<Self> {
        if rho.dim() != channel.d_in() || rho.dim() != povm_a.dim() {
            return Err(Error::ShapeMismatch(format!(
                "preparation side disagrees: state dim {}, channel input {}, POVM dim {}",
                rho.dim(),
                channel.d_in(),
                povm_a.dim()
            )));
        }
        if channel.d_out() != povm_b.dim() {
            return Err(Error::ShapeMismatch(format!(
                "measurement side disagrees: channel output {}, POVM dim {}",
                channel.d_out(),
                povm_b.dim()
            )));
        }
        rho.require_full_rank()?;
        Ok(Self {
            rho,
            channel,
            povm_a,
            povm_b,
        })
    }

    pub fn rho(&self) -> &DensityMatrix {
        &self.rho
    }

    pub fn channel(&self) -> &KrausChannel {
        &self.channel
    }

    pub fn povm_a(&self) -> &Povm {
        &self.povm_a
    }

    pub fn povm_b(&self) -> &Povm {
        &self.povm_b
    }

    pub fn dim_a(&self) -> usize {
        self.rho.dim()
    }

    pub fn dim_b(&self) -> usize {
        self.channel.d_out()
    }

    pub fn shape(&self) -> BipartiteShape {
        BipartiteShape::new(self.dim_a(), self.dim_b())
    }

    /// The joint operator on A⊗B that the causal observer contracts POVM
    /// elements against: the partial transpose on A of the evolved
    /// purification. Hermitian with unit trace; its B marginal is ρ and its
    /// A marginal is the channel output on ρ.
    pub fn process_operator(&self) -> ComplexMatrix {
        evolve_purification(&self.rho, &self.channel)
            .partial_transpose(self.shape(), Subsystem::A)
            .expect("shape fixed by construction")
    }

    /// p(aᵢ, bⱼ) = Tr_B[ bⱼ · Tr_A[ process_operator · (aᵢ ⊗ I_B) ] ].
    pub fn joint_distribution(&self) -> JointDistribution {
        let op = self.process_operator();
        let shape = self.shape();
        let id_b = ComplexMatrix::identity(self.dim_b());
        let mut probs = Vec::with_capacity(self.povm_a.len() * self.povm_b.len());
        for a in self.povm_a.effects() {
            let conditional = (&op * &a.kron(&id_b))
                .partial_trace(shape, Subsystem::A)
                .expect("shape fixed by construction");
            for b in self.povm_b.effects() {
                probs.push(trace_product_re(b, &conditional));
            }
        }
        JointDistribution::new(
            self.povm_a.labels().to_vec(),
            self.povm_b.labels().to_vec(),
            probs,
        )
        .expect("a valid scenario yields a normalized table")
    }

    /// Independent route to the same table: prepare each unnormalized
    /// ensemble member √ρ aᵢ √ρ, push it through the channel, apply the
    /// Born rule. Never touches the process operator.
    pub fn joint_distribution_ensemble(&self) -> JointDistribution {
        let root = self.rho.sqrt();
        let mut probs = Vec::with_capacity(self.povm_a.len() * self.povm_b.len());
        for a in self.povm_a.effects() {
            let member = &(&root * a) * &root;
            let evolved = self
                .channel
                .apply_matrix(&member)
                .expect("dimensions checked at construction");
            for b in self.povm_b.effects() {
                probs.push(trace_product_re(b, &evolved));
            }
        }
        JointDistribution::new(
            self.povm_a.labels().to_vec(),
            self.povm_b.labels().to_vec(),
            probs,
        )
        .expect("a valid scenario yields a normalized table")
    }

    /// Reinterprets the experiment for the observer who takes A and B to be
    /// spacelike separated: the shared state is the evolved purification
    /// (equal to the process operator partially transposed back on A) and
    /// the A-side effects get transposed. B-side operators are untouched.
    pub fn to_spacelike(&self) -> SpacelikeScenario {
        let tau = evolve_purification(&self.rho, &self.channel);
        SpacelikeScenario {
            tau: DensityMatrix::new(tau).expect("the evolved purification is a valid state"),
            shape: self.shape(),
            povm_a: self.povm_a.transposed(),
            povm_b: self.povm_b.clone(),
        }
    }

    /// Runs both views of this experiment and reports the largest
    /// entrywise disagreement between their tables.
    pub fn equivalence_report(&self) -> EquivalenceReport {
        let causal = self.joint_distribution();
        let spacelike = self.to_spacelike().joint_distribution();
        let max_abs_gap = causal
            .max_abs_gap(&spacelike)
            .expect("both views share outcome labels");
        EquivalenceReport {
            causal,
            spacelike,
            max_abs_gap,
        }
    }
}

impl SpacelikeScenario {
    pub fn new(
        tau: DensityMatrix,
        shape: BipartiteShape,
        povm_a: Povm,
        povm_b: Povm,
    ) -> Result<Self> {
        if tau.dim() != shape.total() {
            return Err(Error::ShapeMismatch(format!(
                "state dimension {} does not match shape ({}, {})",
                tau.dim(),
                shape.dim_a,
                shape.dim_b
            )));
        }
        if povm_a.dim() != shape.dim_a || povm_b.dim() != shape.dim_b {
            return Err(Error::ShapeMismatch(format!(
                "POVM dimensions ({}, {}) do not match shape ({}, {})",
                povm_a.dim(),
                povm_b.dim(),
                shape.dim_a,
                shape.dim_b
            )));
        }
        Ok(Self {
            tau,
            shape,
            povm_a,
            povm_b,
        })
    }

    pub fn tau(&self) -> &DensityMatrix {
        &self.tau
    }

    pub fn shape(&self) -> BipartiteShape {
        self.shape
    }

    pub fn povm_a(&self) -> &Povm {
        &self.povm_a
    }

    pub fn povm_b(&self) -> &Povm {
        &self.povm_b
    }

    /// p(aᵢ, bⱼ) = Tr[ (aᵢ ⊗ bⱼ) τ ].
    pub fn joint_distribution(&self) -> JointDistribution {
        let mut probs = Vec::with_capacity(self.povm_a.len() * self.povm_b.len());
        for a in self.povm_a.effects() {
            for b in self.povm_b.effects() {
                probs.push(trace_product_re(&a.kron(b), self.tau.mat()));
            }
        }
        JointDistribution::new(
            self.povm_a.labels().to_vec(),
            self.povm_b.labels().to_vec(),
            probs,
        )
        .expect("a valid scenario yields a normalized table")
    }

    /// Reinterprets the shared state as a preparation followed by a channel.
    ///
    /// The A marginal of τ must be full rank: the preparation is its
    /// transpose, and the channel's Choi matrix is τ with the inverse square
    /// root of that marginal applied on A. Inverting the marginal amplifies
    /// whatever noise τ carries by roughly one over its smallest eigenvalue,
    /// so the recovered Choi matrix is validated at a correspondingly loose
    /// tolerance.
    pub fn to_causal(&self) -> Result<CausalScenario> {
        let marginal = self
            .tau
            .mat()
            .partial_trace(self.shape, Subsystem::B)
            .expect("shape validated at construction");
        let rho_t = DensityMatrix::new(marginal.clone())?;
        if !rho_t.full_rank() {
            return Err(Error::RankDeficient {
                min_eigenvalue: rho_t.min_eigenvalue(),
                threshold: crate::FULL_RANK_THRESHOLD,
            });
        }
        let rho = DensityMatrix::new(marginal.transpose())?;
        let inv_root = marginal.hermitian_map(|v| 1.0 / v.max(f64::MIN_POSITIVE).sqrt())?;
        let id_b = ComplexMatrix::identity(self.shape.dim_b);
        let deflate = inv_root.kron(&id_b);
        let choi = &(&deflate * self.tau.mat()) * &deflate;
        let channel =
            KrausChannel::from_choi(&choi, self.shape.dim_a, self.shape.dim_b, CHOI_RECOVERY_TOL)?;
        CausalScenario::new(rho, channel, self.povm_a.transposed(), self.povm_b.clone())
    }
}

/// Validation tolerance for a Choi matrix recovered from a shared state:
/// the marginal inversion scales errors by up to 1/FULL_RANK_THRESHOLD, so
/// the structural checks cannot be held at the default 1e-9.
const CHOI_RECOVERY_TOL: f64 = 1e-6;

/// The polarizer pair at angles `alpha` (A side) and `beta` (B side).
///
/// Transmission projects onto (cos θ, sin θ), reflection onto its
/// complement, so p(a_r, b_t) = p·sin²(β−α). The element between the
/// polarizers preserves the polarization state, i.e. the channel is the
/// identity, and the preparation mixes reflection with weight `p` and
/// transmission with weight `1−p`. Both weights must be strictly positive
/// to keep the preparation full rank.
pub fn polarizer_scenario(alpha: f64, beta: f64, p: f64) -> Result<CausalScenario> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "mixing weight p must lie strictly between 0 and 1, got {p}"
        )));
    }
    let axis = |theta: f64| vec![C64::new(theta.cos(), 0.0), C64::new(theta.sin(), 0.0)];
    let ortho = |theta: f64| vec![C64::new(-theta.sin(), 0.0), C64::new(theta.cos(), 0.0)];

    let a_t = axis(alpha);
    let a_r = ortho(alpha);
    let rho = &ComplexMatrix::outer(&a_r, &a_r).scale_re(p)
        + &ComplexMatrix::outer(&a_t, &a_t).scale_re(1.0 - p);
    let povm_a = Povm::projective(vec!["r".into(), "t".into()], &[a_r, a_t])?;
    let povm_b = Povm::projective(vec!["r".into(), "t".into()], &[ortho(beta), axis(beta)])?;
    CausalScenario::new(
        DensityMatrix::new(rho)?,
        KrausChannel::identity(2),
        povm_a,
        povm_b,
    )
}
