//! Positive operator-valued measures: labeled effects summing to the identity.

use crate::error::{Error, Result};
use crate::mat::{ComplexMatrix, C64};
use crate::DEFAULT_TOL;

/// An ordered, labeled list of PSD effects that sum to the identity on a
/// declared Hilbert dimension. Outcome labels are plain strings and travel
/// with every probability table derived from the measure.
#[derive(Debug, Clone)]
pub struct Povm {
    dim: usize,
    labels: Vec<String>,
    effects: Vec<ComplexMatrix>,
}

impl Povm {
    pub fn new(labels: Vec<String>, effects: Vec<ComplexMatrix>) -> Result<Self> {
        Self::with_tol(labels, effects, DEFAULT_TOL)
    }

    pub fn with_tol(labels: Vec<String>, effects: Vec<ComplexMatrix>, tol: f64) -> Result<Self> {
        if effects.is_empty() {
            return Err(Error::InvalidArgument(
                "a POVM needs at least one effect".into(),
            ));
        }
        if labels.len() != effects.len() {
            return Err(Error::InvalidArgument(format!(
                "{} labels for {} effects",
                labels.len(),
                effects.len()
            )));
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(Error::InvalidArgument(format!(
                    "duplicate outcome label {l:?}"
                )));
            }
        }
        let dim = effects[0].rows();
        let mut sum = ComplexMatrix::zeros(dim, dim);
        for (label, e) in labels.iter().zip(&effects) {
            if !e.is_square() || e.rows() != dim {
                return Err(Error::ShapeMismatch(format!(
                    "effect {label:?} is {}x{}, expected {dim}x{dim}",
                    e.rows(),
                    e.cols()
                )));
            }
            let gap = e.hermiticity_gap();
            if gap > tol {
                return Err(Error::NotHermitian { gap, tol });
            }
            let (vals, _) = e.eig_hermitian()?;
            if let Some(&min) = vals.last() {
                if min < -tol {
                    return Err(Error::NotPositive {
                        eigenvalue: min,
                        tol,
                    });
                }
            }
            sum = &sum + e;
        }
        let gap = sum
            .max_abs_diff(&ComplexMatrix::identity(dim))
            .expect("same shape");
        if gap > tol {
            return Err(Error::PovmIncomplete { gap, tol });
        }
        Ok(Self {
            dim,
            labels,
            effects,
        })
    }

    /// Rank-one projective measure onto an orthonormal basis.
    pub fn projective(labels: Vec<String>, basis: &[Vec<C64>]) -> Result<Self> {
        let effects = basis.iter().map(|v| ComplexMatrix::outer(v, v)).collect();
        Self::new(labels, effects)
    }

    /// The coarsest measure: a single identity effect.
    pub fn trivial(dim: usize) -> Self {
        Self {
            dim,
            labels: vec!["all".into()],
            effects: vec![ComplexMatrix::identity(dim)],
        }
    }

    /// The measure with every effect transposed. This is how a measurement
    /// looks to an observer who swaps the input/output role of its system;
    /// transposition preserves positivity and completeness exactly.
    pub fn transposed(&self) -> Self {
        Self {
            dim: self.dim,
            labels: self.labels.clone(),
            effects: self.effects.iter().map(|e| e.transpose()).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.effects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.effects.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn effects(&self) -> &[ComplexMatrix] {
        &self.effects
    }

    pub fn effect(&self, i: usize) -> &ComplexMatrix {
        &self.effects[i]
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &ComplexMatrix)> {
        self.labels
            .iter()
            .map(String::as_str)
            .zip(self.effects.iter())
    }
}

/// Z-basis projective measure, handy in tests and fixtures.
#[cfg(test)]
pub(crate) fn z_basis_povm(dim: usize) -> Povm {
    let basis: Vec<Vec<C64>> = (0..dim)
        .map(|k| {
            (0..dim)
                .map(|j| C64::new(if j == k { 1.0 } else { 0.0 }, 0.0))
                .collect()
        })
        .collect();
    let labels = (0..dim).map(|k| k.to_string()).collect();
    Povm::projective(labels, &basis).expect("basis vectors are orthonormal")
}
