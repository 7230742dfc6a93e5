use crate::error::{Error, Result};
use crate::matops::{
    self, c64, eigh, outer, ComplexMatrix, ComplexVector, HermitianOperator, SpectralDecomposition,
    TOL_PSD,
};

/// Allowed deviation of `tr ρ` from one.
pub const TOL_TRACE: f64 = 1e-10;

/// A unit-trace positive semidefinite operator with its spectrum cached.
#[derive(Clone, Debug)]
pub struct DensityOperator {
    matrix: HermitianOperator,
    spectrum: SpectralDecomposition,
}

impl DensityOperator {
    /// Validates a density matrix.
    ///
    /// Eigenvalues in `[-1e-10, 0)` are clipped to zero and the result is
    /// renormalized; more negative eigenvalues or a trace off by more than
    /// `1e-10` are rejected.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let h = HermitianOperator::new(matrix).map_err(|e| match e {
            Error::NotHermitian { max_asymmetry } => {
                Error::InvalidState(format!("not Hermitian (max asymmetry {max_asymmetry:e})"))
            }
            other => other,
        })?;
        let tr = h.trace();
        if (tr - 1.0).abs() > TOL_TRACE {
            return Err(Error::InvalidState(format!("trace is {tr}, expected 1")));
        }
        Self::from_hermitian_psd(h)
    }

    /// Normalizes a positive semidefinite matrix by its trace.
    pub fn from_unnormalized(matrix: ComplexMatrix) -> Result<Self> {
        let h = HermitianOperator::new(matrix)?;
        let tr = h.trace();
        if !(tr > 0.0) || !tr.is_finite() {
            return Err(Error::InvalidState(format!("trace must be positive, got {tr}")));
        }
        Self::from_hermitian_psd(HermitianOperator::new_unchecked(h.matrix().unscale(tr)))
    }

    fn from_hermitian_psd(h: HermitianOperator) -> Result<Self> {
        let spectrum = eigh(&h);
        let min = *spectrum.eigenvalues.last().expect("nonempty");
        if min < -TOL_PSD {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:e}")));
        }
        if min >= -1e-14 {
            // roundoff-level negativity: keep the matrix bits, clip the cached spectrum
            let mut spectrum = spectrum;
            for l in spectrum.eigenvalues.iter_mut() {
                *l = l.max(0.0);
            }
            return Ok(Self { matrix: h, spectrum });
        }
        let clipped: Vec<f64> = spectrum.eigenvalues.iter().map(|l| l.max(0.0)).collect();
        let total: f64 = clipped.iter().sum();
        let vals: Vec<f64> = clipped.iter().map(|l| l / total).collect();
        let m = matops::spectral_sum(&spectrum.eigenvectors, &vals);
        let spectrum = SpectralDecomposition { eigenvalues: vals, ..spectrum };
        Ok(Self { matrix: HermitianOperator::new_unchecked(m), spectrum })
    }

    /// Used internally where the matrix is a state by construction up to roundoff.
    pub(crate) fn from_matrix_lenient(matrix: ComplexMatrix) -> Result<Self> {
        let h = HermitianOperator::new_unchecked(matrix);
        let tr = h.trace();
        Self::from_hermitian_psd(HermitianOperator::new_unchecked(h.matrix().unscale(tr)))
    }

    /// `|ψ⟩⟨ψ|` for a nonzero vector, normalized.
    pub fn pure(psi: &ComplexVector) -> Result<Self> {
        let n = psi.norm();
        if !(n > 0.0) {
            return Err(Error::InvalidState("zero vector".into()));
        }
        let v = psi.unscale(n);
        Self::from_matrix_lenient(outer(&v, &v))
    }

    /// Computational basis state `|k⟩⟨k|`.
    pub fn basis(dim: usize, k: usize) -> Result<Self> {
        if k >= dim {
            return Err(Error::InvalidState(format!("basis index {k} out of range for dim {dim}")));
        }
        let mut v = ComplexVector::zeros(dim);
        v[k] = c64(1.0, 0.0);
        Self::pure(&v)
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        let h = HermitianOperator::new_unchecked(matops::identity(dim).unscale(dim as f64));
        let spectrum = eigh(&h);
        Self { matrix: h, spectrum }
    }

    /// Qubit state `(𝟙 + r·σ)/2`; requires `|r| ≤ 1`.
    pub fn from_bloch(r: [f64; 3]) -> Result<Self> {
        let m = (matops::identity(2)
            + matops::pauli_x().scale(r[0])
            + matops::pauli_y().scale(r[1])
            + matops::pauli_z().scale(r[2]))
        .scale(0.5);
        Self::new(m)
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        self.matrix.matrix()
    }

    pub fn hermitian(&self) -> &HermitianOperator {
        &self.matrix
    }

    pub fn spectrum(&self) -> &SpectralDecomposition {
        &self.spectrum
    }

    /// Descending.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.spectrum.eigenvalues
    }

    /// Number of eigenvalues above `tol`.
    pub fn rank(&self, tol: f64) -> usize {
        self.eigenvalues().iter().filter(|&&l| l > tol).count()
    }

    pub fn is_pure(&self) -> bool {
        self.eigenvalues()[0] > 1.0 - 1e-9
    }

    pub fn purity(&self) -> f64 {
        self.eigenvalues().iter().map(|l| l * l).sum()
    }

    /// `√ρ`, with eigenvalues below `1e-14` treated as zero so roundoff in
    /// the spectrum does not surface at the `1e-7` level.
    pub fn sqrt(&self) -> ComplexMatrix {
        self.spectrum.map(|l| if l > 1e-14 { l.sqrt() } else { 0.0 })
    }

    /// `ρ^p` on the support.
    pub fn power(&self, p: f64) -> ComplexMatrix {
        self.spectrum.map(|l| if l > TOL_PSD { l.powf(p) } else { 0.0 })
    }

    /// `tr(ρ A)`
    pub fn expectation(&self, a: &ComplexMatrix) -> f64 {
        matops::trace_product_re(self.matrix(), a)
    }

    /// `U ρ U†`
    pub fn conjugate(&self, u: &ComplexMatrix) -> Result<Self> {
        if u.nrows() != self.dim() || u.ncols() != self.dim() {
            return Err(Error::DimensionMismatch("unitary and state dimensions differ".into()));
        }
        Self::from_matrix_lenient(u * self.matrix() * u.adjoint())
    }

    /// `ρ ⊗ σ`
    pub fn tensor(&self, other: &Self) -> Self {
        Self::from_matrix_lenient(matops::tensor(self.matrix(), other.matrix()))
            .expect("tensor product of states is a state")
    }
}

/// Canonical purification vector `Σ_j √e_j |v_j⟩ ⊗ |j⟩` on `C^d ⊗ C^d`.
pub fn purification_vector(rho: &DensityOperator) -> ComplexVector {
    let d = rho.dim();
    let spec = rho.spectrum();
    let mut psi = ComplexVector::zeros(d * d);
    for (j, &e) in spec.eigenvalues.iter().enumerate() {
        let w = e.max(0.0).sqrt();
        if w == 0.0 {
            continue;
        }
        for i in 0..d {
            psi[i * d + j] += spec.eigenvectors[(i, j)] * w;
        }
    }
    psi
}

/// Pure state on `C^d ⊗ C^d` whose first-factor marginal is `ρ`.
pub fn purify(rho: &DensityOperator) -> DensityOperator {
    DensityOperator::pure(&purification_vector(rho)).expect("purification vector is nonzero")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matops::{diag_real, max_abs, partial_trace, Keep};

    #[test]
    fn validation() {
        assert!(DensityOperator::new(diag_real(&[0.5, 0.5])).is_ok());
        assert!(matches!(DensityOperator::new(diag_real(&[0.6, 0.5])), Err(Error::InvalidState(_))));
        assert!(matches!(DensityOperator::new(diag_real(&[1.1, -0.1])), Err(Error::InvalidState(_))));
        let clipped = DensityOperator::new(diag_real(&[1.0 + 5e-11, -5e-11])).unwrap();
        assert!(clipped.eigenvalues().iter().all(|&l| l >= 0.0));
        assert!((clipped.eigenvalues().iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn purify_pure_state() {
        let rho = DensityOperator::from_bloch([0.0, 0.6, 0.8]).unwrap();
        let psi = purify(&rho);
        assert!(psi.is_pure());
        let red = partial_trace(psi.matrix(), (2, 2), Keep::First).unwrap();
        assert!(max_abs(&(red - rho.matrix())) < 1e-12);
    }

    #[test]
    fn purify_maximally_mixed_is_maximally_entangled() {
        let psi = purify(&DensityOperator::maximally_mixed(2));
        let red2 = partial_trace(psi.matrix(), (2, 2), Keep::Second).unwrap();
        assert!(max_abs(&(red2 - matops::identity(2).scale(0.5))) < 1e-12);
        let red1 = partial_trace(psi.matrix(), (2, 2), Keep::First).unwrap();
        assert!(max_abs(&(red1 - matops::identity(2).scale(0.5))) < 1e-12);
    }

    #[test]
    fn purify_schmidt_coefficients() {
        let rho = DensityOperator::new(diag_real(&[0.9, 0.1])).unwrap();
        let v = purification_vector(&rho);
        let mut mags: Vec<f64> = v.iter().map(|z| z.norm()).filter(|m| *m > 1e-12).collect();
        mags.sort_by(|a, b| b.total_cmp(a));
        assert!((mags[0] - 0.9_f64.sqrt()).abs() < 1e-12);
        assert!((mags[1] - 0.1_f64.sqrt()).abs() < 1e-12);
    }
}
