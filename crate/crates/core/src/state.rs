//! Density matrices and the steering decomposition of a state by a POVM.

use crate::error::{Error, Result};
use crate::mat::{ComplexMatrix, C64};
use crate::povm::Povm;
use crate::{DEFAULT_TOL, FULL_RANK_THRESHOLD};

/// Hermitian, positive semidefinite, unit-trace matrix. The minimum
/// eigenvalue is computed once at construction and cached so full-rank
/// checks are free afterwards.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    mat: ComplexMatrix,
    dim: usize,
    min_eigenvalue: f64,
}

impl DensityMatrix {
    pub fn new(mat: ComplexMatrix) -> Result<Self> {
        Self::with_tol(mat, DEFAULT_TOL)
    }

    pub fn with_tol(mat: ComplexMatrix, tol: f64) -> Result<Self> {
        if !mat.is_square() {
            return Err(Error::ShapeMismatch(format!(
                "a state must be square, got {}x{}",
                mat.rows(),
                mat.cols()
            )));
        }
        let gap = mat.hermiticity_gap();
        if gap > tol {
            return Err(Error::NotHermitian { gap, tol });
        }
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > tol || tr.im.abs() > tol {
            return Err(Error::NotUnitTrace { trace: tr.re, tol });
        }
        let (vals, _) = mat.eig_hermitian()?;
        let min_eigenvalue = vals.last().copied().unwrap_or(0.0);
        if min_eigenvalue < -tol {
            return Err(Error::NotPositive {
                eigenvalue: min_eigenvalue,
                tol,
            });
        }
        let dim = mat.dim();
        Ok(Self {
            mat,
            dim,
            min_eigenvalue,
        })
    }

    /// I/d.
    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            mat: ComplexMatrix::identity(dim).scale_re(1.0 / dim as f64),
            dim,
            min_eigenvalue: 1.0 / dim as f64,
        }
    }

    /// |ψ⟩⟨ψ| from a normalized vector.
    pub fn from_pure(psi: &[C64]) -> Result<Self> {
        let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        if (norm - 1.0).abs() > DEFAULT_TOL {
            return Err(Error::InvalidArgument(format!(
                "pure-state vector has squared norm {norm:.12}, expected 1"
            )));
        }
        Self::new(ComplexMatrix::outer(psi, psi))
    }

    pub fn mat(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.min_eigenvalue
    }

    /// Full rank under the default threshold on the minimum eigenvalue.
    pub fn full_rank(&self) -> bool {
        self.full_rank_within(FULL_RANK_THRESHOLD)
    }

    pub fn full_rank_within(&self, threshold: f64) -> bool {
        self.min_eigenvalue >= threshold
    }

    pub fn require_full_rank(&self) -> Result<()> {
        if self.full_rank() {
            Ok(())
        } else {
            Err(Error::RankDeficient {
                min_eigenvalue: self.min_eigenvalue,
                threshold: FULL_RANK_THRESHOLD,
            })
        }
    }

    /// PSD square root. Construction already guaranteed positivity, so
    /// this cannot fail for a validated state.
    pub fn sqrt(&self) -> ComplexMatrix {
        self.mat
            .sqrtm_psd(DEFAULT_TOL)
            .expect("a validated state is PSD within tolerance")
    }
}

/// One entry of a steering ensemble. A conditional state only exists when
/// the outcome has nonzero weight; zero-weight outcomes stay in the table
/// as placeholders so both observer views keep the same outcome sets.
#[derive(Debug, Clone)]
pub struct EnsembleMember {
    pub label: String,
    pub weight: f64,
    pub state: Option<DensityMatrix>,
}

/// Convex decomposition of a state induced by a POVM.
#[derive(Debug, Clone)]
pub struct WeightedEnsemble {
    dim: usize,
    members: Vec<EnsembleMember>,
}

impl WeightedEnsemble {
    pub fn members(&self) -> &[EnsembleMember] {
        &self.members
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Σ weight · state over the defined members.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let mut acc = ComplexMatrix::zeros(self.dim, self.dim);
        for m in &self.members {
            if let Some(state) = &m.state {
                acc = &acc + &state.mat().scale_re(m.weight);
            }
        }
        acc
    }
}

/// Weight below which an outcome is kept with an undefined conditional state
/// instead of dividing by (numerical) zero.
const ZERO_WEIGHT: f64 = 1e-12;

/// Splits a full-rank state into the preparation ensemble selected by a
/// POVM: outcome `i` occurs with weight Tr[aᵢ ρ] and prepares
/// √ρ aᵢ √ρ / Tr[aᵢ ρ]. The weighted members sum back to ρ because the
/// effects sum to the identity.
pub fn ensemble_decompose(rho: &DensityMatrix, povm: &Povm) -> Result<WeightedEnsemble> {
    if rho.dim() != povm.dim() {
        return Err(Error::ShapeMismatch(format!(
            "state dimension {} vs POVM dimension {}",
            rho.dim(),
            povm.dim()
        )));
    }
    rho.require_full_rank()?;
    let root = rho.sqrt();
    let mut members = Vec::with_capacity(povm.len());
    for (label, effect) in povm.iter() {
        let steered = &(&root * effect) * &root;
        let weight = steered.trace().re;
        let state = if weight > ZERO_WEIGHT {
            Some(DensityMatrix::new(steered.scale_re(1.0 / weight))?)
        } else {
            None
        };
        members.push(EnsembleMember {
            label: label.to_string(),
            weight: weight.max(0.0),
            state,
        });
    }
    Ok(WeightedEnsemble {
        dim: rho.dim(),
        members,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::povm::z_basis_povm;

    #[test]
    fn validation_rejects_bad_states() {
        let not_unit = ComplexMatrix::diag_real(&[0.7, 0.7]);
        assert!(matches!(
            DensityMatrix::new(not_unit),
            Err(Error::NotUnitTrace { .. })
        ));

        let negative = ComplexMatrix::diag_real(&[1.5, -0.5]);
        assert!(matches!(
            DensityMatrix::new(negative),
            Err(Error::NotPositive { .. })
        ));

        let skew = ComplexMatrix::new(
            2,
            2,
            vec![
                C64::new(0.5, 0.0),
                C64::new(0.1, 0.0),
                C64::new(0.3, 0.0),
                C64::new(0.5, 0.0),
            ],
        )
        .unwrap();
        assert!(matches!(
            DensityMatrix::new(skew),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn full_rank_distinguishes_pure_from_mixed() {
        let pure = DensityMatrix::from_pure(&[C64::new(1.0, 0.0), C64::new(0.0, 0.0)]).unwrap();
        assert!(!pure.full_rank());
        assert!(pure.require_full_rank().is_err());
        assert!(DensityMatrix::maximally_mixed(2).full_rank());
    }

    #[test]
    fn decompose_diagonal_commuting_case() {
        let rho = DensityMatrix::maximally_mixed(2);
        let ens = ensemble_decompose(&rho, &z_basis_povm(2)).unwrap();
        assert_eq!(ens.members().len(), 2);
        for (k, m) in ens.members().iter().enumerate() {
            assert!((m.weight - 0.5).abs() < 1e-14);
            let mut e = ComplexMatrix::zeros(2, 2);
            e[(k, k)] = C64::new(1.0, 0.0);
            assert!(m.state.as_ref().unwrap().mat().frob_dist(&e).unwrap() < 1e-13);
        }
    }

    #[test]
    fn decompose_identity_povm_returns_source() {
        let rho = DensityMatrix::new(ComplexMatrix::diag_real(&[0.6, 0.4])).unwrap();
        let ens = ensemble_decompose(&rho, &Povm::trivial(2)).unwrap();
        assert_eq!(ens.members().len(), 1);
        assert!((ens.members()[0].weight - 1.0).abs() < 1e-12);
        let got = ens.members()[0].state.as_ref().unwrap();
        assert!(got.mat().frob_dist(rho.mat()).unwrap() < 1e-12);
    }

    #[test]
    fn decompose_plus_minus_on_diagonal_state() {
        // ρ = diag(3/4, 1/4) against the |±⟩ basis: weights 1/2 each and
        // members 2·√ρ|±⟩⟨±|√ρ
        let rho = DensityMatrix::new(ComplexMatrix::diag_real(&[0.75, 0.25])).unwrap();
        let h = 1.0 / 2f64.sqrt();
        let povm = Povm::projective(
            vec!["+".into(), "-".into()],
            &[
                vec![C64::new(h, 0.0), C64::new(h, 0.0)],
                vec![C64::new(h, 0.0), C64::new(-h, 0.0)],
            ],
        )
        .unwrap();
        let ens = ensemble_decompose(&rho, &povm).unwrap();
        let root = rho.sqrt();
        for (m, effect) in ens.members().iter().zip(povm.effects()) {
            assert!((m.weight - 0.5).abs() < 1e-12);
            let expected = (&(&root * effect) * &root).scale_re(2.0);
            assert!(
                m.state
                    .as_ref()
                    .unwrap()
                    .mat()
                    .frob_dist(&expected)
                    .unwrap()
                    < 1e-12
            );
        }
        assert!(ens.reconstruct().frob_dist(rho.mat()).unwrap() < 1e-13);
    }

    #[test]
    fn decompose_requires_full_rank() {
        let pure = DensityMatrix::from_pure(&[C64::new(1.0, 0.0), C64::new(0.0, 0.0)]).unwrap();
        assert!(matches!(
            ensemble_decompose(&pure, &z_basis_povm(2)),
            Err(Error::RankDeficient { .. })
        ));
    }

    #[test]
    fn decompose_rejects_dim_mismatch() {
        let rho = DensityMatrix::maximally_mixed(3);
        assert!(matches!(
            ensemble_decompose(&rho, &z_basis_povm(2)),
            Err(Error::ShapeMismatch(_))
        ));
    }
}
