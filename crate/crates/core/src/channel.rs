//! Trace-preserving channels in Kraus form and the Choi correspondence.

use crate::error::{Error, Result};
use crate::mat::{BipartiteShape, ComplexMatrix, Subsystem, C64};
use crate::state::DensityMatrix;
use crate::DEFAULT_TOL;

/// A CPTP map from dimension `d_in` to `d_out`, held as Kraus operators
/// with Σ K†K = I.
#[derive(Debug, Clone)]
pub struct KrausChannel {
    d_in: usize,
    d_out: usize,
    kraus_ops: Vec<ComplexMatrix>,
}

impl KrausChannel {
    pub fn new(kraus_ops: Vec<ComplexMatrix>) -> Result<Self> {
        Self::with_tol(kraus_ops, DEFAULT_TOL)
    }

    pub fn with_tol(kraus_ops: Vec<ComplexMatrix>, tol: f64) -> Result<Self> {
        if kraus_ops.is_empty() {
            return Err(Error::InvalidArgument(
                "a channel needs at least one Kraus operator".into(),
            ));
        }
        let d_out = kraus_ops[0].rows();
        let d_in = kraus_ops[0].cols();
        let mut sum = ComplexMatrix::zeros(d_in, d_in);
        for (m, k) in kraus_ops.iter().enumerate() {
            if k.rows() != d_out || k.cols() != d_in {
                return Err(Error::ShapeMismatch(format!(
                    "Kraus operator {m} is {}x{}, expected {d_out}x{d_in}",
                    k.rows(),
                    k.cols()
                )));
            }
            sum = &sum + &(&k.adjoint() * k);
        }
        let gap = sum
            .max_abs_diff(&ComplexMatrix::identity(d_in))
            .expect("same shape");
        if gap > tol {
            return Err(Error::NotTracePreserving { gap, tol });
        }
        Ok(Self {
            d_in,
            d_out,
            kraus_ops,
        })
    }

    /// The identity channel on dimension `d`.
    pub fn identity(d: usize) -> Self {
        Self {
            d_in: d,
            d_out: d,
            kraus_ops: vec![ComplexMatrix::identity(d)],
        }
    }

    /// The channel with a single unitary Kraus operator.
    pub fn from_unitary(u: ComplexMatrix) -> Result<Self> {
        if !u.is_square() {
            return Err(Error::ShapeMismatch("unitary must be square".into()));
        }
        Self::new(vec![u])
    }

    /// Fully depolarizing channel X ↦ Tr(X) I/d_out, via the Kraus family
    /// {|i⟩_out⟨j|_in / √d_out}. Input and output dimensions may differ.
    pub fn depolarizing(d_in: usize, d_out: usize) -> Self {
        let scale = 1.0 / (d_out as f64).sqrt();
        let mut ops = Vec::with_capacity(d_in * d_out);
        for i in 0..d_out {
            for j in 0..d_in {
                let mut k = ComplexMatrix::zeros(d_out, d_in);
                k[(i, j)] = C64::new(scale, 0.0);
                ops.push(k);
            }
        }
        Self {
            d_in,
            d_out,
            kraus_ops: ops,
        }
    }

    pub fn d_in(&self) -> usize {
        self.d_in
    }

    pub fn d_out(&self) -> usize {
        self.d_out
    }

    pub fn kraus_ops(&self) -> &[ComplexMatrix] {
        &self.kraus_ops
    }

    /// Operator-sum action Σ K X K† on an arbitrary matrix.
    pub fn apply_matrix(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        if !x.is_square() || x.rows() != self.d_in {
            return Err(Error::ShapeMismatch(format!(
                "channel input must be {0}x{0}, got {1}x{2}",
                self.d_in,
                x.rows(),
                x.cols()
            )));
        }
        let mut out = ComplexMatrix::zeros(self.d_out, self.d_out);
        for k in &self.kraus_ops {
            out = &out + &(&(k * x) * &k.adjoint());
        }
        Ok(out)
    }

    /// Evolves a state; the output is validated as a state again.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        DensityMatrix::new(self.apply_matrix(rho.mat())?)
    }

    /// Choi matrix on in⊗out: (𝕀 ⊗ channel) applied to the unnormalized
    /// maximally entangled projector Σ|jj⟩⟨kk|. Its trace is `d_in` and the
    /// partial trace over the output factor is the identity on the input.
    pub fn choi(&self) -> ComplexMatrix {
        let (din, dout) = (self.d_in, self.d_out);
        let mut c = ComplexMatrix::zeros(din * dout, din * dout);
        for k in &self.kraus_ops {
            // (I ⊗ K) Σ|jj⟩ has component K_{ej} at index j·d_out + e
            let mut w = vec![C64::new(0.0, 0.0); din * dout];
            for j in 0..din {
                for e in 0..dout {
                    w[j * dout + e] = k[(e, j)];
                }
            }
            c = &c + &ComplexMatrix::outer(&w, &w);
        }
        c
    }

    /// Rebuilds Kraus operators from a Choi matrix.
    ///
    /// `c` must be PSD within `tol` with output marginal equal to the
    /// input identity within `tol`; eigenpairs above `tol` each become one
    /// Kraus operator. The result reproduces `c` exactly at the Choi level;
    /// the individual operators are only fixed up to isometric remixing.
    pub fn from_choi(c: &ComplexMatrix, d_in: usize, d_out: usize, tol: f64) -> Result<Self> {
        let d = d_in * d_out;
        if !c.is_square() || c.rows() != d {
            return Err(Error::ShapeMismatch(format!(
                "Choi matrix for {d_in}->{d_out} must be {d}x{d}, got {}x{}",
                c.rows(),
                c.cols()
            )));
        }
        let gap = c.hermiticity_gap();
        if gap > tol {
            return Err(Error::NotHermitian { gap, tol });
        }
        let marginal = c
            .partial_trace(BipartiteShape::new(d_in, d_out), Subsystem::B)?
            .max_abs_diff(&ComplexMatrix::identity(d_in))
            .expect("same shape");
        if marginal > tol {
            return Err(Error::NotTracePreserving { gap: marginal, tol });
        }
        let (vals, vecs) = c.eig_hermitian()?;
        let mut ops = Vec::new();
        for (idx, &lambda) in vals.iter().enumerate() {
            if lambda < -tol {
                return Err(Error::NotPositive {
                    eigenvalue: lambda,
                    tol,
                });
            }
            if lambda <= tol {
                continue;
            }
            let scale = lambda.sqrt();
            let mut k = ComplexMatrix::zeros(d_out, d_in);
            for j in 0..d_in {
                for e in 0..d_out {
                    k[(e, j)] = vecs[(j * d_out + e, idx)] * C64::new(scale, 0.0);
                }
            }
            ops.push(k);
        }
        if ops.is_empty() {
            return Err(Error::InvalidArgument(
                "Choi matrix has no eigenvalue above tolerance".into(),
            ));
        }
        // discarding eigenvalues ≤ tol moves the completeness sum by up to
        // d·tol, so the reconstruction is validated at that scale
        Self::with_tol(ops, tol * (d as f64 + 1.0))
    }
}
