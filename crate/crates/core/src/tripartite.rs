//! Three-party generalization: one observer sees region C prepare an
//! ensemble that a channel carries into the composite A⊗B; the other sees
//! three spacelike regions sharing a tripartite state.
//!
//! Internally everything runs on the C⊗(A⊗B) ordering, where the bipartite
//! machinery applies verbatim with C in the preparation role. The public
//! tripartite state is reordered to A⊗B⊗C.

use crate::channel::KrausChannel;
use crate::error::{Error, Result};
use crate::mat::{trace_product_re, BipartiteShape, ComplexMatrix, Subsystem};
use crate::povm::Povm;
use crate::scenario::evolve_purification;
use crate::state::DensityMatrix;
use crate::{DIST_SUM_TOL, NEG_PROB_TOL};

/// Rearranges the tensor factors of a multipartite operator.
///
/// `dims` are the current factor dimensions, slow to fast; `perm[k]` names
/// the current factor that ends up in position `k` of the result. Applying
/// the inverse permutation afterwards restores the operand.
pub fn permute_systems(m: &ComplexMatrix, dims: &[usize], perm: &[usize]) -> Result<ComplexMatrix> {
    let total: usize = dims.iter().product();
    if !m.is_square() || m.rows() != total {
        return Err(Error::ShapeMismatch(format!(
            "operator is {}x{}, factor dimensions multiply to {total}",
            m.rows(),
            m.cols()
        )));
    }
    let n = dims.len();
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n || seen[p] {
            return Err(Error::InvalidArgument(format!(
                "{perm:?} is not a permutation of 0..{n}"
            )));
        }
        seen[p] = true;
    }
    if perm.len() != n {
        return Err(Error::InvalidArgument(format!(
            "permutation length {} for {} factors",
            perm.len(),
            n
        )));
    }

    // index -> multi-index over dims, slow factor first
    let decompose = |mut idx: usize| -> Vec<usize> {
        let mut multi = vec![0; n];
        for k in (0..n).rev() {
            multi[k] = idx % dims[k];
            idx /= dims[k];
        }
        multi
    };
    let new_dims: Vec<usize> = perm.iter().map(|&p| dims[p]).collect();
    let compose = |multi: &[usize]| -> usize {
        let mut idx = 0;
        for k in 0..n {
            idx = idx * new_dims[k] + multi[perm[k]];
        }
        idx
    };

    let mut out = ComplexMatrix::zeros(total, total);
    for r in 0..total {
        let mr = decompose(r);
        let nr = compose(&mr);
        for c in 0..total {
            let mc = decompose(c);
            out[(nr, compose(&mc))] = m[(r, c)];
        }
    }
    Ok(out)
}

/// Causal view: C prepares, a channel maps C into A⊗B, all three regions
/// measure.
#[derive(Debug, Clone)]
pub struct TripartiteCausalScenario {
    rho_c: DensityMatrix,
    channel: KrausChannel,
    out_shape: BipartiteShape,
    povm_a: Povm,
    povm_b: Povm,
    povm_c: Povm,
}

/// Spacelike view: three regions measure one shared state on A⊗B⊗C.
#[derive(Debug, Clone)]
pub struct TripartiteSpacelikeScenario {
    tau: DensityMatrix,
    dims: [usize; 3],
    povm_a: Povm,
    povm_b: Povm,
    povm_c: Povm,
}

/// Probability table over three outcome sets, stored with C fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDistribution3 {
    labels_a: Vec<String>,
    labels_b: Vec<String>,
    labels_c: Vec<String>,
    probs: Vec<f64>,
}

/// Both tripartite views' tables plus their largest disagreement.
#[derive(Debug, Clone)]
pub struct TripartiteEquivalenceReport {
    pub causal: JointDistribution3,
    pub spacelike: JointDistribution3,
    pub max_abs_gap: f64,
}

impl JointDistribution3 {
    pub fn new(
        labels_a: Vec<String>,
        labels_b: Vec<String>,
        labels_c: Vec<String>,
        mut probs: Vec<f64>,
    ) -> Result<Self> {
        if probs.len() != labels_a.len() * labels_b.len() * labels_c.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} probabilities for a {}x{}x{} table",
                probs.len(),
                labels_a.len(),
                labels_b.len(),
                labels_c.len()
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
            labels_a,
            labels_b,
            labels_c,
            probs,
        })
    }

    pub fn labels_a(&self) -> &[String] {
        &self.labels_a
    }

    pub fn labels_b(&self) -> &[String] {
        &self.labels_b
    }

    pub fn labels_c(&self) -> &[String] {
        &self.labels_c
    }

    pub fn p(&self, i: usize, j: usize, k: usize) -> f64 {
        self.probs[(i * self.labels_b.len() + j) * self.labels_c.len() + k]
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    /// Sums out the C outcomes, leaving a bipartite table on A and B.
    pub fn marginal_ab(&self) -> crate::scenario::JointDistribution {
        let mut probs = Vec::with_capacity(self.labels_a.len() * self.labels_b.len());
        for i in 0..self.labels_a.len() {
            for j in 0..self.labels_b.len() {
                probs.push((0..self.labels_c.len()).map(|k| self.p(i, j, k)).sum());
            }
        }
        crate::scenario::JointDistribution::new(self.labels_a.clone(), self.labels_b.clone(), probs)
            .expect("marginalizing a valid table keeps it valid")
    }

    pub fn max_abs_gap(&self, other: &Self) -> Result<f64> {
        if self.labels_a != other.labels_a
            || self.labels_b != other.labels_b
            || self.labels_c != other.labels_c
        {
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

impl TripartiteCausalScenario {
    pub fn new(
        rho_c: DensityMatrix,
        channel: KrausChannel,
        dim_a: usize,
        dim_b: usize,
        povm_a: Povm,
        povm_b: Povm,
        povm_c: Povm,
    ) -> Result<Self> {
        if channel.d_out() != dim_a * dim_b {
            return Err(Error::ShapeMismatch(format!(
                "channel output {} does not split as {dim_a}x{dim_b}",
                channel.d_out()
            )));
        }
        if rho_c.dim() != channel.d_in() || rho_c.dim() != povm_c.dim() {
            return Err(Error::ShapeMismatch(format!(
                "preparation side disagrees: state dim {}, channel input {}, POVM dim {}",
                rho_c.dim(),
                channel.d_in(),
                povm_c.dim()
            )));
        }
        if povm_a.dim() != dim_a || povm_b.dim() != dim_b {
            return Err(Error::ShapeMismatch(format!(
                "POVM dimensions ({}, {}) do not match declared split ({dim_a}, {dim_b})",
                povm_a.dim(),
                povm_b.dim()
            )));
        }
        rho_c.require_full_rank()?;
        Ok(Self {
            rho_c,
            channel,
            out_shape: BipartiteShape::new(dim_a, dim_b),
            povm_a,
            povm_b,
            povm_c,
        })
    }

    pub fn rho_c(&self) -> &DensityMatrix {
        &self.rho_c
    }

    pub fn channel(&self) -> &KrausChannel {
        &self.channel
    }

    pub fn dim_a(&self) -> usize {
        self.out_shape.dim_a
    }

    pub fn dim_b(&self) -> usize {
        self.out_shape.dim_b
    }

    pub fn dim_c(&self) -> usize {
        self.rho_c.dim()
    }

    pub fn povm_a(&self) -> &Povm {
        &self.povm_a
    }

    pub fn povm_b(&self) -> &Povm {
        &self.povm_b
    }

    pub fn povm_c(&self) -> &Povm {
        &self.povm_c
    }

    /// Shape of the internal C⊗(A⊗B) carrier.
    fn carrier_shape(&self) -> BipartiteShape {
        BipartiteShape::new(self.dim_c(), self.dim_a() * self.dim_b())
    }

    /// Joint operator on C⊗(A⊗B), the exact analogue of the bipartite
    /// process operator with the composite output in the B role. Its
    /// AB marginal is ρ_C and its C marginal is the channel output.
    pub fn process_operator(&self) -> ComplexMatrix {
        evolve_purification(&self.rho_c, &self.channel)
            .partial_transpose(self.carrier_shape(), Subsystem::A)
            .expect("shape fixed by construction")
    }

    /// p(aᵢ, bⱼ, cₖ) = Tr_AB[ (aᵢ ⊗ bⱼ) · Tr_C[ process_operator (cₖ ⊗ I_AB) ] ].
    pub fn joint_distribution(&self) -> JointDistribution3 {
        let op = self.process_operator();
        let shape = self.carrier_shape();
        let id_ab = ComplexMatrix::identity(self.dim_a() * self.dim_b());
        let n = self.povm_a.len() * self.povm_b.len() * self.povm_c.len();
        let mut probs = vec![0.0; n];
        for (k, c) in self.povm_c.effects().iter().enumerate() {
            let conditional = (&op * &c.kron(&id_ab))
                .partial_trace(shape, Subsystem::A)
                .expect("shape fixed by construction");
            for (i, a) in self.povm_a.effects().iter().enumerate() {
                for (j, b) in self.povm_b.effects().iter().enumerate() {
                    let idx = (i * self.povm_b.len() + j) * self.povm_c.len() + k;
                    probs[idx] = trace_product_re(&a.kron(b), &conditional);
                }
            }
        }
        JointDistribution3::new(
            self.povm_a.labels().to_vec(),
            self.povm_b.labels().to_vec(),
            self.povm_c.labels().to_vec(),
            probs,
        )
        .expect("a valid scenario yields a normalized table")
    }

    /// Independent route to the same table, never touching the process
    /// operator: evolve each unnormalized ensemble member √ρ cₖ √ρ through
    /// the channel and apply the Born rule on A⊗B.
    pub fn joint_distribution_ensemble(&self) -> JointDistribution3 {
        let root = self.rho_c.sqrt();
        let n = self.povm_a.len() * self.povm_b.len() * self.povm_c.len();
        let mut probs = vec![0.0; n];
        for (k, c) in self.povm_c.effects().iter().enumerate() {
            let member = &(&root * c) * &root;
            let evolved = self
                .channel
                .apply_matrix(&member)
                .expect("dimensions checked at construction");
            for (i, a) in self.povm_a.effects().iter().enumerate() {
                for (j, b) in self.povm_b.effects().iter().enumerate() {
                    let idx = (i * self.povm_b.len() + j) * self.povm_c.len() + k;
                    probs[idx] = trace_product_re(&a.kron(b), &evolved);
                }
            }
        }
        JointDistribution3::new(
            self.povm_a.labels().to_vec(),
            self.povm_b.labels().to_vec(),
            self.povm_c.labels().to_vec(),
            probs,
        )
        .expect("a valid scenario yields a normalized table")
    }

    /// The spacelike reinterpretation: the shared A⊗B⊗C state is the evolved
    /// purification of ρ_C reordered from C⊗(A⊗B), and the C-side effects
    /// get transposed. A and B effects are untouched.
    pub fn to_spacelike(&self) -> TripartiteSpacelikeScenario {
        let tau_c_ab = evolve_purification(&self.rho_c, &self.channel);
        let dims = [self.dim_c(), self.dim_a(), self.dim_b()];
        let tau = permute_systems(&tau_c_ab, &dims, &[1, 2, 0])
            .expect("carrier shape fixed by construction");
        TripartiteSpacelikeScenario {
            tau: DensityMatrix::new(tau).expect("reordering preserves state validity"),
            dims: [self.dim_a(), self.dim_b(), self.dim_c()],
            povm_a: self.povm_a.clone(),
            povm_b: self.povm_b.clone(),
            povm_c: self.povm_c.transposed(),
        }
    }

    /// Runs both tripartite views and reports the largest disagreement.
    pub fn equivalence_report(&self) -> TripartiteEquivalenceReport {
        let causal = self.joint_distribution();
        let spacelike = self.to_spacelike().joint_distribution();
        let max_abs_gap = causal
            .max_abs_gap(&spacelike)
            .expect("both views share outcome labels");
        TripartiteEquivalenceReport {
            causal,
            spacelike,
            max_abs_gap,
        }
    }
}

impl TripartiteSpacelikeScenario {
    pub fn new(
        tau: DensityMatrix,
        dims: [usize; 3],
        povm_a: Povm,
        povm_b: Povm,
        povm_c: Povm,
    ) -> Result<Self> {
        let total: usize = dims.iter().product();
        if tau.dim() != total {
            return Err(Error::ShapeMismatch(format!(
                "state dimension {} does not match factors {dims:?}",
                tau.dim()
            )));
        }
        if povm_a.dim() != dims[0] || povm_b.dim() != dims[1] || povm_c.dim() != dims[2] {
            return Err(Error::ShapeMismatch(format!(
                "POVM dimensions ({}, {}, {}) do not match factors {dims:?}",
                povm_a.dim(),
                povm_b.dim(),
                povm_c.dim()
            )));
        }
        Ok(Self {
            tau,
            dims,
            povm_a,
            povm_b,
            povm_c,
        })
    }

    pub fn tau(&self) -> &DensityMatrix {
        &self.tau
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn povm_a(&self) -> &Povm {
        &self.povm_a
    }

    pub fn povm_b(&self) -> &Povm {
        &self.povm_b
    }

    pub fn povm_c(&self) -> &Povm {
        &self.povm_c
    }

    /// p(aᵢ, bⱼ, cₖ) = Tr[ (aᵢ ⊗ bⱼ ⊗ cₖ) τ ].
    pub fn joint_distribution(&self) -> JointDistribution3 {
        let mut probs =
            Vec::with_capacity(self.povm_a.len() * self.povm_b.len() * self.povm_c.len());
        for a in self.povm_a.effects() {
            for b in self.povm_b.effects() {
                let ab = a.kron(b);
                for c in self.povm_c.effects() {
                    probs.push(trace_product_re(&ab.kron(c), self.tau.mat()));
                }
            }
        }
        JointDistribution3::new(
            self.povm_a.labels().to_vec(),
            self.povm_b.labels().to_vec(),
            self.povm_c.labels().to_vec(),
            probs,
        )
        .expect("a valid scenario yields a normalized table")
    }
}
