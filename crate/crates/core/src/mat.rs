//! Dense complex matrix kernels: tensor products, partial trace and
//! transpose, Hermitian eigendecomposition, PSD square roots.
//!
//! Everything is stored row-major at desk scale (total dimensions well under
//! a hundred), so no attempt is made at blocking or sparsity.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use nalgebra::{Complex, DMatrix};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::DEFAULT_TOL;

/// Complex scalar used throughout.
pub type C64 = Complex64;

/// Dense complex matrix with explicit dimensions, row-major storage.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

/// Which tensor factor of a bipartite operator an operation acts on.
///
/// `A` is always the left (slow) factor, `B` the right (fast) one: the row
/// index of a bipartite matrix decomposes as `a * dim_b + b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

/// Dimensions of the two tensor factors of a bipartite operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BipartiteShape {
    pub dim_a: usize,
    pub dim_b: usize,
}

impl BipartiteShape {
    pub fn new(dim_a: usize, dim_b: usize) -> Self {
        assert!(
            dim_a > 0 && dim_b > 0,
            "subsystem dimensions must be positive"
        );
        Self { dim_a, dim_b }
    }

    /// Dimension of the composite space.
    pub fn total(&self) -> usize {
        self.dim_a * self.dim_b
    }

    fn check(&self, m: &ComplexMatrix) -> Result<()> {
        if m.rows != self.total() || m.cols != self.total() {
            return Err(Error::ShapeMismatch(format!(
                "expected a square {t}x{t} matrix for shape ({a}, {b}), got {r}x{c}",
                t = self.total(),
                a = self.dim_a,
                b = self.dim_b,
                r = m.rows,
                c = m.cols
            )));
        }
        Ok(())
    }
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries, rejecting NaN/Inf.
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 || data.len() != rows * cols {
            return Err(Error::ShapeMismatch(format!(
                "{} entries cannot fill a {}x{} matrix",
                data.len(),
                rows,
                cols
            )));
        }
        for (k, z) in data.iter().enumerate() {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::NonFinite {
                    row: k / cols,
                    col: k % cols,
                });
            }
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    /// Square matrix with the given diagonal.
    pub fn diag(entries: &[C64]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, z) in entries.iter().enumerate() {
            m[(i, i)] = *z;
        }
        m
    }

    pub fn diag_real(entries: &[f64]) -> Self {
        Self::diag(
            &entries
                .iter()
                .map(|&x| C64::new(x, 0.0))
                .collect::<Vec<_>>(),
        )
    }

    /// Builds a matrix from real row-major entries.
    pub fn from_real(rows: usize, cols: usize, entries: &[f64]) -> Result<Self> {
        Self::new(
            rows,
            cols,
            entries.iter().map(|&x| C64::new(x, 0.0)).collect(),
        )
    }

    /// Outer product |u⟩⟨v|.
    pub fn outer(u: &[C64], v: &[C64]) -> Self {
        let mut m = Self::zeros(u.len(), v.len());
        for (i, &ui) in u.iter().enumerate() {
            for (j, &vj) in v.iter().enumerate() {
                m[(i, j)] = ui * vj.conj();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Dimension of a square matrix.
    pub fn dim(&self) -> usize {
        debug_assert!(self.is_square());
        self.rows
    }

    pub fn entries(&self) -> &[C64] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        let mut m = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(j, i)] = self[(i, j)];
            }
        }
        m
    }

    pub fn conj(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(j, i)] = self[(i, j)].conj();
            }
        }
        m
    }

    pub fn trace(&self) -> C64 {
        debug_assert!(self.is_square());
        (0..self.rows).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn scale_re(&self, factor: f64) -> Self {
        self.scale(C64::new(factor, 0.0))
    }

    /// Frobenius norm.
    pub fn frob_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Frobenius distance to another matrix of the same shape.
    pub fn frob_dist(&self, other: &Self) -> Result<f64> {
        self.same_shape(other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(x, y)| (x - y).norm_sqr())
            .sum::<f64>()
            .sqrt())
    }

    /// Largest entrywise absolute difference.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.same_shape(other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max))
    }

    fn same_shape(&self, other: &Self) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, other.rows, self.cols, other.cols
            )));
        }
        Ok(())
    }

    /// Largest deviation |m_ij - conj(m_ji)| from Hermiticity.
    pub fn hermiticity_gap(&self) -> f64 {
        debug_assert!(self.is_square());
        let mut gap = 0.0f64;
        for i in 0..self.rows {
            for j in i..self.cols {
                gap = gap.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        gap
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.is_square() && self.hermiticity_gap() <= tol
    }

    /// Kronecker product, `self` as the slow (left) factor.
    pub fn kron(&self, other: &Self) -> Self {
        let mut m = Self::zeros(self.rows * other.rows, self.cols * other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let z = self[(i, j)];
                if z == C64::new(0.0, 0.0) {
                    continue;
                }
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        m[(i * other.rows + k, j * other.cols + l)] = z * other[(k, l)];
                    }
                }
            }
        }
        m
    }

    /// Traces out one tensor factor; the trace of the whole is preserved.
    pub fn partial_trace(&self, shape: BipartiteShape, over: Subsystem) -> Result<Self> {
        shape.check(self)?;
        let (da, db) = (shape.dim_a, shape.dim_b);
        match over {
            Subsystem::A => {
                let mut m = Self::zeros(db, db);
                for b in 0..db {
                    for bp in 0..db {
                        let mut acc = C64::new(0.0, 0.0);
                        for a in 0..da {
                            acc += self[(a * db + b, a * db + bp)];
                        }
                        m[(b, bp)] = acc;
                    }
                }
                Ok(m)
            }
            Subsystem::B => {
                let mut m = Self::zeros(da, da);
                for a in 0..da {
                    for ap in 0..da {
                        let mut acc = C64::new(0.0, 0.0);
                        for b in 0..db {
                            acc += self[(a * db + b, ap * db + b)];
                        }
                        m[(a, ap)] = acc;
                    }
                }
                Ok(m)
            }
        }
    }

    /// Transposes one tensor factor in place of the whole matrix.
    pub fn partial_transpose(&self, shape: BipartiteShape, on: Subsystem) -> Result<Self> {
        shape.check(self)?;
        let (da, db) = (shape.dim_a, shape.dim_b);
        let mut m = Self::zeros(self.rows, self.cols);
        for a in 0..da {
            for b in 0..db {
                for ap in 0..da {
                    for bp in 0..db {
                        let src = match on {
                            Subsystem::A => (ap * db + b, a * db + bp),
                            Subsystem::B => (a * db + bp, ap * db + b),
                        };
                        m[(a * db + b, ap * db + bp)] = self[src];
                    }
                }
            }
        }
        Ok(m)
    }

    /// Eigendecomposition of a Hermitian matrix.
    ///
    /// Returns eigenvalues sorted descending and the matching unitary of
    /// column eigenvectors, so `m = V diag(λ) V†`. Degenerate eigenvalues
    /// may come with any orthonormal basis of their eigenspace. Hermiticity
    /// is checked against [`DEFAULT_TOL`]; the decomposition itself runs on
    /// the symmetrized matrix `(m + m†)/2`.
    pub fn eig_hermitian(&self) -> Result<(Vec<f64>, ComplexMatrix)> {
        if !self.is_square() {
            return Err(Error::ShapeMismatch(format!(
                "eigendecomposition needs a square matrix, got {}x{}",
                self.rows, self.cols
            )));
        }
        let gap = self.hermiticity_gap();
        if gap > DEFAULT_TOL {
            return Err(Error::NotHermitian {
                gap,
                tol: DEFAULT_TOL,
            });
        }
        let d = self.rows;
        let na = DMatrix::from_fn(d, d, |i, j| {
            // symmetrize so the decomposition sees an exactly Hermitian input
            (self[(i, j)] + self[(j, i)].conj()) * Complex::new(0.5, 0.0)
        });
        let eig = na.symmetric_eigen();
        let mut order: Vec<usize> = (0..d).collect();
        order.sort_by(|&i, &j| eig.eigenvalues[j].partial_cmp(&eig.eigenvalues[i]).unwrap());
        let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let mut vectors = ComplexMatrix::zeros(d, d);
        for (new_col, &old_col) in order.iter().enumerate() {
            for row in 0..d {
                vectors[(row, new_col)] = eig.eigenvectors[(row, old_col)];
            }
        }
        Ok((values, vectors))
    }

    /// Unique PSD square root of a PSD Hermitian matrix.
    ///
    /// Eigenvalues in `[-tol, 0)` are treated as rounding noise and clamped
    /// to zero; anything below `-tol` is rejected. The result reconstructs
    /// the input to eigensolver accuracy (about 1e-13 at desk scale).
    pub fn sqrtm_psd(&self, tol: f64) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::ShapeMismatch(format!(
                "matrix square root needs a square matrix, got {}x{}",
                self.rows, self.cols
            )));
        }
        let gap = self.hermiticity_gap();
        if gap > tol {
            return Err(Error::NotHermitian { gap, tol });
        }
        let (values, vectors) = self.eig_hermitian()?;
        let mut roots = Vec::with_capacity(values.len());
        for &v in &values {
            if v < -tol {
                return Err(Error::NotPositive { eigenvalue: v, tol });
            }
            roots.push(v.max(0.0).sqrt());
        }
        Ok(rebuild_hermitian(&roots, &vectors))
    }

    /// V diag(f(λ)) V† for a full-rank Hermitian matrix; used for inverse
    /// square roots when undoing the view transformation.
    pub(crate) fn hermitian_map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        let (values, vectors) = self.eig_hermitian()?;
        let mapped: Vec<f64> = values.iter().map(|&v| f(v)).collect();
        Ok(rebuild_hermitian(&mapped, &vectors))
    }
}

/// V diag(λ) V† from real eigenvalues and unitary columns.
fn rebuild_hermitian(values: &[f64], vectors: &ComplexMatrix) -> ComplexMatrix {
    let d = vectors.rows();
    let mut m = ComplexMatrix::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            let mut acc = C64::new(0.0, 0.0);
            for (k, &v) in values.iter().enumerate() {
                acc += vectors[(i, k)] * C64::new(v, 0.0) * vectors[(j, k)].conj();
            }
            m[(i, j)] = acc;
        }
    }
    m
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, other: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(
            (self.rows, self.cols),
            (other.rows, other.cols),
            "shape mismatch in +"
        );
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(x, y)| x + y)
                .collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, other: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(
            (self.rows, self.cols),
            (other.rows, other.cols),
            "shape mismatch in -"
        );
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(x, y)| x - y)
                .collect(),
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, other: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, other.rows, "shape mismatch in *");
        let mut m = ComplexMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let z = self[(i, k)];
                if z == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..other.cols {
                    m[(i, j)] += z * other[(k, j)];
                }
            }
        }
        m
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Re(Tr[x · y]) without forming the product; the workhorse behind every
/// probability in this crate.
pub fn trace_product_re(x: &ComplexMatrix, y: &ComplexMatrix) -> f64 {
    debug_assert_eq!(x.cols, y.rows);
    debug_assert_eq!(x.rows, y.cols);
    let mut acc = 0.0;
    for i in 0..x.rows {
        for j in 0..x.cols {
            let a = x[(i, j)];
            let b = y[(j, i)];
            acc += a.re * b.re - a.im * b.im;
        }
    }
    acc
}
