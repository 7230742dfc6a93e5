use crate::error::{Error, Result};
use crate::matops::{self, c64, eigh_raw, max_abs, ComplexMatrix};

use super::observable::Observable;
use super::state::DensityOperator;

/// Tolerance for trace preservation and channel identities.
pub const TOL_CHANNEL: f64 = 1e-9;
/// Tolerance for group closure of a unitary set.
pub const TOL_GROUP: f64 = 1e-8;

/// Completely positive trace-preserving map `ρ ↦ Σ K ρ K†`.
#[derive(Clone, Debug)]
pub struct KrausChannel {
    kraus: Vec<ComplexMatrix>,
    input_dim: usize,
    output_dim: usize,
}

impl KrausChannel {
    pub fn new(kraus: Vec<ComplexMatrix>) -> Result<Self> {
        let first = kraus.first().ok_or_else(|| Error::InvalidChannel("no Kraus operators".into()))?;
        let (dout, din) = first.shape();
        let mut sum = matops::zeros(din, din);
        for (k, op) in kraus.iter().enumerate() {
            if op.shape() != (dout, din) {
                return Err(Error::DimensionMismatch(format!("Kraus operator {k} has inconsistent shape")));
            }
            sum += op.adjoint() * op;
        }
        let dev = max_abs(&(sum - matops::identity(din)));
        if dev > TOL_CHANNEL {
            return Err(Error::InvalidChannel(format!("not trace preserving (deviation {dev:e})")));
        }
        Ok(Self { kraus, input_dim: din, output_dim: dout })
    }

    pub fn identity(d: usize) -> Self {
        Self { kraus: vec![matops::identity(d)], input_dim: d, output_dim: d }
    }

    pub fn kraus_ops(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn output_dim(&self) -> usize {
        self.output_dim
    }

    pub fn apply(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let mut out = matops::zeros(self.output_dim, self.output_dim);
        for k in &self.kraus {
            out += k * rho * k.adjoint();
        }
        out
    }

    pub fn apply_state(&self, rho: &DensityOperator) -> Result<DensityOperator> {
        if rho.dim() != self.input_dim {
            return Err(Error::DimensionMismatch(format!(
                "channel input dim {} but state dim {}",
                self.input_dim,
                rho.dim()
            )));
        }
        DensityOperator::from_matrix_lenient(self.apply(rho.matrix()))
    }

    /// Heisenberg picture `A ↦ Σ K† A K`.
    pub fn apply_adjoint(&self, a: &ComplexMatrix) -> ComplexMatrix {
        let mut out = matops::zeros(self.input_dim, self.input_dim);
        for k in &self.kraus {
            out += k.adjoint() * a * k;
        }
        out
    }

    /// Matrix of the map on column-major vectorizations:
    /// `vec(KρK†) = (conj(K) ⊗ K) vec(ρ)`.
    pub fn superoperator(&self) -> ComplexMatrix {
        let mut s = matops::zeros(self.output_dim * self.output_dim, self.input_dim * self.input_dim);
        for k in &self.kraus {
            s += matops::tensor(&k.conjugate(), k);
        }
        s
    }

    /// `self ∘ other`
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if other.output_dim != self.input_dim {
            return Err(Error::DimensionMismatch("cannot compose channels of mismatched dimension".into()));
        }
        let s = self.superoperator() * other.superoperator();
        Ok(Self::from_superoperator(&s, other.input_dim, self.output_dim))
    }

    pub fn is_idempotent(&self, tol: f64) -> bool {
        if self.input_dim != self.output_dim {
            return false;
        }
        let s = self.superoperator();
        max_abs(&(&s * &s - &s)) <= tol
    }

    /// Self-adjoint in the Hilbert–Schmidt inner product.
    pub fn is_self_adjoint(&self, tol: f64) -> bool {
        if self.input_dim != self.output_dim {
            return false;
        }
        let s = self.superoperator();
        max_abs(&(s.adjoint() - &s)) <= tol
    }

    pub fn commutes_with(&self, other: &Self, tol: f64) -> bool {
        if self.input_dim != other.input_dim || self.output_dim != other.output_dim {
            return false;
        }
        let a = self.superoperator();
        let b = other.superoperator();
        max_abs(&(&a * &b - &b * &a)) <= tol
    }

    /// Kraus form of a completely positive map given by its superoperator,
    /// read off from the eigendecomposition of the Choi matrix.
    pub(crate) fn from_superoperator(s: &ComplexMatrix, din: usize, dout: usize) -> Self {
        // Choi = Σ_ij |i⟩⟨j| ⊗ Φ(|i⟩⟨j|), index (i, a) ↦ i·dout + a
        let mut choi = matops::zeros(din * dout, din * dout);
        for i in 0..din {
            for j in 0..din {
                let col = s.column(j * din + i);
                for a in 0..dout {
                    for b in 0..dout {
                        choi[(i * dout + a, j * dout + b)] = col[b * dout + a];
                    }
                }
            }
        }
        let (vals, vecs) = eigh_raw(&choi);
        let scale = vals.iter().fold(1.0_f64, |m, l| m.max(l.abs()));
        let mut kraus = Vec::new();
        for (k, &l) in vals.iter().enumerate() {
            if l <= 1e-12 * scale {
                continue;
            }
            let w = l.sqrt();
            let op = ComplexMatrix::from_fn(dout, din, |a, i| vecs[(i * dout + a, k)] * w);
            kraus.push(op);
        }
        if kraus.is_empty() {
            kraus.push(matops::zeros(dout, din));
        }
        Self { kraus, input_dim: din, output_dim: dout }
    }

    /// Largest eigenvalue of the Choi matrix below zero, as a positivity witness.
    pub(crate) fn min_choi_eigenvalue_of(s: &ComplexMatrix, d: usize) -> f64 {
        let mut choi = matops::zeros(d * d, d * d);
        for i in 0..d {
            for j in 0..d {
                let col = s.column(j * d + i);
                for a in 0..d {
                    for b in 0..d {
                        choi[(i * d + a, j * d + b)] = col[b * d + a];
                    }
                }
            }
        }
        *eigh_raw(&choi).0.last().unwrap()
    }
}

/// `σ ↦ Σ X_x σ X_x` for projective `X`.
pub fn dephasing_channel(x: &Observable) -> Result<KrausChannel> {
    if !x.is_projective() {
        return Err(Error::Precondition("dephasing channel needs a projective observable".into()));
    }
    KrausChannel::new(x.effects().iter().map(|e| e.matrix().clone()).collect())
}

/// Uniform average `σ ↦ |G|⁻¹ Σ U σ U†` over a finite unitary group.
///
/// Closure under products and inverses is checked up to global phases, since
/// phases cancel in `U σ U†`.
pub fn twirl(group: &[ComplexMatrix]) -> Result<KrausChannel> {
    verify_group(group)?;
    let w = 1.0 / (group.len() as f64).sqrt();
    KrausChannel::new(group.iter().map(|u| u.scale(w)).collect())
}

fn equal_up_to_phase(a: &ComplexMatrix, b: &ComplexMatrix) -> bool {
    let d = a.nrows() as f64;
    let overlap = (b.adjoint() * a).trace();
    // |tr(B†A)| = d iff A = e^{iθ} B for unitaries
    let n = overlap.norm();
    if (n - d).abs() > TOL_GROUP * d {
        return false;
    }
    let phase = overlap / n;
    max_abs(&(a - b * phase)) <= TOL_GROUP
}

fn verify_group(group: &[ComplexMatrix]) -> Result<()> {
    let first = group.first().ok_or_else(|| Error::NotAGroup("empty set".into()))?;
    let d = first.nrows();
    for (k, u) in group.iter().enumerate() {
        if u.shape() != (d, d) {
            return Err(Error::DimensionMismatch(format!("group element {k} has wrong shape")));
        }
        let dev = max_abs(&(u.adjoint() * u - matops::identity(d)));
        if dev > TOL_GROUP {
            return Err(Error::NotAGroup(format!("element {k} is not unitary (deviation {dev:e})")));
        }
    }
    let member = |m: &ComplexMatrix| group.iter().any(|g| equal_up_to_phase(m, g));
    for (i, a) in group.iter().enumerate() {
        if !member(&a.adjoint()) {
            return Err(Error::NotAGroup(format!("inverse of element {i} is missing")));
        }
        for (j, b) in group.iter().enumerate() {
            if !member(&(a * b)) {
                return Err(Error::NotAGroup(format!("product of elements {i} and {j} is missing")));
            }
        }
    }
    Ok(())
}

/// `{𝟙, σ_x, σ_y, σ_z}`, closed up to phase.
pub fn pauli_group() -> Vec<ComplexMatrix> {
    vec![matops::identity(2), matops::pauli_x(), matops::pauli_y(), matops::pauli_z()]
}

/// `{ω^{jk}}`: the cyclic group generated by the clock matrix `diag(1, ω, …, ω^{d−1})`.
pub fn clock_group(d: usize) -> Vec<ComplexMatrix> {
    (0..d)
        .map(|j| {
            ComplexMatrix::from_fn(d, d, |a, b| {
                if a == b {
                    let t = 2.0 * std::f64::consts::PI * (j * a) as f64 / d as f64;
                    c64(t.cos(), t.sin())
                } else {
                    c64(0.0, 0.0)
                }
            })
        })
        .collect()
}
