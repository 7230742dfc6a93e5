//! Dense complex-matrix kernel.
//!
//! Everything above this module works with [`ComplexMatrix`] (a dynamically
//! sized `nalgebra` matrix of `Complex64`) and with the validated
//! [`HermitianOperator`] wrapper. Eigendecompositions are returned with the
//! spectrum sorted in descending order and with near-degenerate eigenvalues
//! grouped into clusters, so that spectral projections are available directly.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type ComplexMatrix = DMatrix<Complex64>;
pub type ComplexVector = DVector<Complex64>;

/// Entrywise tolerance on `A - A†` for a matrix to count as Hermitian.
pub const TOL_HERM: f64 = 1e-10;
/// Eigenvalues in `[-TOL_PSD, 0)` are treated as roundoff and clipped.
pub const TOL_PSD: f64 = 1e-10;
/// Relative tolerance (against `max(1, ‖A‖)`) for grouping degenerate eigenvalues.
pub const TOL_DEGEN: f64 = 1e-8;

#[inline]
pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(d: usize) -> ComplexMatrix {
    ComplexMatrix::identity(d, d)
}

pub fn zeros(rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::zeros(rows, cols)
}

/// Builds a complex matrix from real row-major data.
pub fn from_real_rows(rows: usize, cols: usize, data: &[f64]) -> ComplexMatrix {
    assert_eq!(rows * cols, data.len(), "rows·cols must equal entry count");
    ComplexMatrix::from_fn(rows, cols, |i, j| c64(data[i * cols + j], 0.0))
}

pub fn diag_real(values: &[f64]) -> ComplexMatrix {
    let n = values.len();
    ComplexMatrix::from_fn(n, n, |i, j| if i == j { c64(values[i], 0.0) } else { c64(0.0, 0.0) })
}

pub fn pauli_x() -> ComplexMatrix {
    from_real_rows(2, 2, &[0.0, 1.0, 1.0, 0.0])
}

pub fn pauli_y() -> ComplexMatrix {
    let mut m = zeros(2, 2);
    m[(0, 1)] = c64(0.0, -1.0);
    m[(1, 0)] = c64(0.0, 1.0);
    m
}

pub fn pauli_z() -> ComplexMatrix {
    diag_real(&[1.0, -1.0])
}

/// `|u⟩⟨v|`
pub fn outer(u: &ComplexVector, v: &ComplexVector) -> ComplexMatrix {
    u * v.adjoint()
}

pub fn trace(a: &ComplexMatrix) -> Complex64 {
    a.diagonal().iter().sum()
}

/// Real part of `tr(A B)` without forming the product.
pub fn trace_product_re(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    let n = a.nrows();
    let mut acc = 0.0;
    for i in 0..n {
        for k in 0..a.ncols() {
            let x = a[(i, k)] * b[(k, i)];
            acc += x.re;
        }
    }
    acc
}

pub fn commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a * b - b * a
}

pub fn max_abs(a: &ComplexMatrix) -> f64 {
    a.iter().fold(0.0, |m, z| m.max(z.norm()))
}

/// `max_ij |A_ij - conj(A_ji)|`, or infinity for non-square input.
pub fn max_asymmetry(a: &ComplexMatrix) -> f64 {
    if !a.is_square() {
        return f64::INFINITY;
    }
    let n = a.nrows();
    let mut m: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            m = m.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    m
}

/// `(A + A†) / 2`
pub fn hermitian_part(a: &ComplexMatrix) -> ComplexMatrix {
    (a + a.adjoint()).scale(0.5)
}

/// A square complex matrix equal to its conjugate transpose.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator {
    matrix: ComplexMatrix,
}

impl HermitianOperator {
    /// Validates Hermiticity within [`TOL_HERM`] and stores the exactly
    /// symmetrized matrix.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "Hermitian operator must be square, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if matrix.nrows() == 0 {
            return Err(Error::DimensionMismatch("empty matrix".into()));
        }
        let asym = max_asymmetry(&matrix);
        if !(asym <= TOL_HERM * max_abs(&matrix).max(1.0)) {
            return Err(Error::NotHermitian { max_asymmetry: asym });
        }
        Ok(Self { matrix: hermitian_part(&matrix) })
    }

    /// Symmetrizes without checking. For matrices Hermitian by construction.
    pub(crate) fn new_unchecked(matrix: ComplexMatrix) -> Self {
        Self { matrix: hermitian_part(&matrix) }
    }

    pub fn from_real_diagonal(values: &[f64]) -> Self {
        Self { matrix: diag_real(values) }
    }

    pub fn identity(d: usize) -> Self {
        Self { matrix: identity(d) }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn trace(&self) -> f64 {
        trace(&self.matrix).re
    }

    /// Expectation value `tr(ρ A)` for a Hermitian `ρ`.
    pub fn expectation(&self, rho: &ComplexMatrix) -> f64 {
        trace_product_re(rho, &self.matrix)
    }
}

/// Eigendecomposition of a Hermitian operator.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    /// Descending.
    pub eigenvalues: Vec<f64>,
    /// Columns are the eigenvectors, in the order of `eigenvalues`.
    pub eigenvectors: ComplexMatrix,
    /// Partition of eigenvalue indices into degenerate clusters.
    pub groups: Vec<Vec<usize>>,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Σ_k f(λ_k) v_k v_k†
    pub fn map<F: Fn(f64) -> f64>(&self, f: F) -> ComplexMatrix {
        let vals: Vec<f64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        spectral_sum(&self.eigenvectors, &vals)
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        spectral_sum(&self.eigenvectors, &self.eigenvalues)
    }

    /// Projection onto the span of the eigenvectors in cluster `group`.
    pub fn projector(&self, group: usize) -> ComplexMatrix {
        let d = self.dim();
        let mut p = zeros(d, d);
        for &k in &self.groups[group] {
            let v = self.eigenvectors.column(k);
            p += v * v.adjoint();
        }
        p
    }

    /// Mean eigenvalue of a cluster.
    pub fn group_value(&self, group: usize) -> f64 {
        let g = &self.groups[group];
        g.iter().map(|&k| self.eigenvalues[k]).sum::<f64>() / g.len() as f64
    }
}

/// `V diag(vals) V†`
pub(crate) fn spectral_sum(vecs: &ComplexMatrix, vals: &[f64]) -> ComplexMatrix {
    let mut scaled = vecs.clone();
    for (j, &l) in vals.iter().enumerate() {
        scaled.column_mut(j).scale_mut(l);
    }
    scaled * vecs.adjoint()
}

/// Raw Hermitian eigensolve of the symmetrized input; descending eigenvalues.
pub(crate) fn eigh_raw(m: &ComplexMatrix) -> (Vec<f64>, ComplexMatrix) {
    let n = m.nrows();
    if n == 1 {
        return (vec![m[(0, 0)].re], identity(1));
    }
    let eig = SymmetricEigen::new(hermitian_part(m));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let vals = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vecs = ComplexMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    (vals, vecs)
}

fn group_degenerate(vals: &[f64], tol: f64) -> Vec<Vec<usize>> {
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for (k, &l) in vals.iter().enumerate() {
        match groups.last_mut() {
            Some(g) if (vals[g[0]] - l).abs() <= tol => g.push(k),
            _ => groups.push(vec![k]),
        }
    }
    groups
}

/// Hermitian eigendecomposition with degenerate clusters grouped under
/// `TOL_DEGEN · max(1, ‖A‖_∞)`.
pub fn eigh(a: &HermitianOperator) -> SpectralDecomposition {
    let (vals, vecs) = eigh_raw(a.matrix());
    let scale = vals.iter().fold(1.0_f64, |m, l| m.max(l.abs()));
    let groups = group_degenerate(&vals, TOL_DEGEN * scale);
    SpectralDecomposition { eigenvalues: vals, eigenvectors: vecs, groups }
}

/// Validating variant of [`eigh`] for a raw matrix.
pub fn eigh_matrix(a: &ComplexMatrix) -> Result<SpectralDecomposition> {
    Ok(eigh(&HermitianOperator::new(a.clone())?))
}

/// Scalar functions applied eigenvalue-wise by [`matrix_function`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MatrixFunction {
    Sqrt,
    Power(f64),
    /// Natural logarithm on the support.
    Log,
}

impl MatrixFunction {
    fn needs_positivity(self) -> bool {
        match self {
            MatrixFunction::Sqrt | MatrixFunction::Log => true,
            MatrixFunction::Power(p) => p.fract() != 0.0,
        }
    }
}

/// Applies `f` in the eigenbasis of `a`.
///
/// Functions that need a positive argument clip eigenvalues in
/// `[-TOL_PSD, 0)` to zero and reject anything more negative. Logarithms and
/// negative powers act on the support only: a zero eigenvalue maps to zero.
pub fn matrix_function(a: &HermitianOperator, f: MatrixFunction) -> Result<HermitianOperator> {
    let spec = eigh(a);
    let scale = spec.eigenvalues.iter().fold(1.0_f64, |m, l| m.max(l.abs()));
    let support_tol = TOL_PSD * scale;
    if f.needs_positivity() {
        if let Some(&min) = spec.eigenvalues.last() {
            if min < -support_tol {
                return Err(Error::Domain(format!(
                    "{f:?} requires a positive semidefinite argument; smallest eigenvalue {min:e}"
                )));
            }
        }
    }
    let g = |l: f64| -> f64 {
        match f {
            MatrixFunction::Sqrt => l.max(0.0).sqrt(),
            MatrixFunction::Log => {
                if l > support_tol {
                    l.ln()
                } else {
                    0.0
                }
            }
            MatrixFunction::Power(p) => {
                if p.fract() == 0.0 && p > 0.0 {
                    l.powi(p as i32)
                } else if l.abs() <= support_tol {
                    0.0
                } else if p.fract() == 0.0 {
                    l.powi(p as i32)
                } else {
                    l.max(0.0).powf(p)
                }
            }
        }
    };
    Ok(HermitianOperator::new_unchecked(spec.map(g)))
}

/// Kronecker product `A ⊗ B`.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

/// Which tensor factor [`partial_trace`] keeps.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Keep {
    First,
    Second,
}

/// Partial trace of an operator on `C^{d1} ⊗ C^{d2}`.
pub fn partial_trace(a: &ComplexMatrix, dims: (usize, usize), keep: Keep) -> Result<ComplexMatrix> {
    let (d1, d2) = dims;
    if a.nrows() != d1 * d2 || a.ncols() != d1 * d2 {
        return Err(Error::DimensionMismatch(format!(
            "partial trace over {d1}x{d2} needs a {0}x{0} matrix, got {1}x{2}",
            d1 * d2,
            a.nrows(),
            a.ncols()
        )));
    }
    Ok(match keep {
        Keep::First => ComplexMatrix::from_fn(d1, d1, |i, j| {
            (0..d2).map(|k| a[(i * d2 + k, j * d2 + k)]).sum()
        }),
        Keep::Second => ComplexMatrix::from_fn(d2, d2, |i, j| {
            (0..d1).map(|k| a[(k * d2 + i, k * d2 + j)]).sum()
        }),
    })
}

/// Largest singular value.
pub fn operator_norm(a: &ComplexMatrix) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    a.clone().singular_values().iter().fold(0.0, |m: f64, &s| m.max(s))
}

/// Largest eigenvalue of a Hermitian matrix.
pub(crate) fn lambda_max(a: &ComplexMatrix) -> f64 {
    eigh_raw(a).0[0]
}

/// Principal square root of a positive semidefinite matrix (clipped).
pub(crate) fn psd_sqrt(a: &ComplexMatrix) -> ComplexMatrix {
    let (vals, vecs) = eigh_raw(a);
    let roots: Vec<f64> = vals.iter().map(|l| l.max(0.0).sqrt()).collect();
    spectral_sum(&vecs, &roots)
}

/// Orthonormal basis (columns) of the range of a positive semidefinite matrix.
pub(crate) fn range_basis(a: &ComplexMatrix, tol: f64) -> ComplexMatrix {
    let (vals, vecs) = eigh_raw(a);
    let keep: Vec<usize> = (0..vals.len()).filter(|&k| vals[k] > tol).collect();
    ComplexMatrix::from_fn(a.nrows(), keep.len(), |i, j| vecs[(i, keep[j])])
}

/// Column-major vectorization.
pub(crate) fn vec_of(a: &ComplexMatrix) -> ComplexVector {
    ComplexVector::from_column_slice(a.as_slice())
}

pub(crate) fn unvec(v: &ComplexVector, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_column_slice(rows, cols, v.as_slice())
}
