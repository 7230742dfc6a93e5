use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::matops::{
    self, eigh, max_abs, ComplexMatrix, HermitianOperator, TOL_PSD,
};

use super::state::DensityOperator;

/// Tolerance for `Σ X_x = 𝟙` and for the projector test `X_x X_y = δ_xy X_x`.
pub const TOL_POVM: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ObservableKind {
    Projective,
    Nonprojective,
}

/// A discrete observable given by its POVM effects and optional outcome values.
#[derive(Clone, Debug)]
pub struct Observable {
    label: String,
    effects: Vec<HermitianOperator>,
    values: Option<Vec<f64>>,
    kind: ObservableKind,
}

impl Observable {
    pub fn new(label: impl Into<String>, effects: Vec<ComplexMatrix>, values: Option<Vec<f64>>) -> Result<Self> {
        let label = label.into();
        let first = effects
            .first()
            .ok_or_else(|| Error::InvalidObservable("no effects".into()))?;
        let d = first.nrows();
        let mut herm = Vec::with_capacity(effects.len());
        let mut sum = matops::zeros(d, d);
        for (x, e) in effects.into_iter().enumerate() {
            if e.nrows() != d || e.ncols() != d {
                return Err(Error::DimensionMismatch(format!(
                    "effect {x} is {}x{}, expected {d}x{d}",
                    e.nrows(),
                    e.ncols()
                )));
            }
            let h = HermitianOperator::new(e).map_err(|err| match err {
                Error::NotHermitian { max_asymmetry } => Error::InvalidObservable(format!(
                    "effect {x} is not Hermitian (max asymmetry {max_asymmetry:e})"
                )),
                other => other,
            })?;
            let min = *eigh(&h).eigenvalues.last().unwrap();
            if min < -TOL_PSD {
                return Err(Error::InvalidObservable(format!("effect {x} has negative eigenvalue {min:e}")));
            }
            sum += h.matrix();
            herm.push(h);
        }
        let dev = max_abs(&(sum - matops::identity(d)));
        if dev > TOL_POVM {
            return Err(Error::InvalidObservable(format!("effects sum to identity only within {dev:e}")));
        }
        if let Some(v) = &values {
            if v.len() != herm.len() {
                return Err(Error::InvalidObservable(format!(
                    "{} outcome values for {} effects",
                    v.len(),
                    herm.len()
                )));
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidObservable("outcome values must be finite".into()));
            }
        }
        let kind = classify(&herm);
        Ok(Self { label, effects: herm, values, kind })
    }

    /// Spectral measure of a Hermitian operator, one effect per distinct
    /// eigenvalue (descending), with the eigenvalues as outcome values.
    pub fn from_hermitian(label: impl Into<String>, a: &HermitianOperator) -> Result<Self> {
        let spec = eigh(a);
        let effects = (0..spec.groups.len()).map(|g| spec.projector(g)).collect();
        let values = (0..spec.groups.len()).map(|g| spec.group_value(g)).collect();
        Self::new(label, effects, Some(values))
    }

    /// Rank-1 projective measurement onto the columns of a unitary.
    pub fn from_basis(label: impl Into<String>, u: &ComplexMatrix) -> Result<Self> {
        let effects = (0..u.ncols())
            .map(|k| {
                let v = u.column(k);
                v * v.adjoint()
            })
            .collect();
        Self::new(label, effects, None)
    }

    pub fn pauli_x() -> Self {
        Self::from_hermitian("sigma_x", &HermitianOperator::new_unchecked(matops::pauli_x())).unwrap()
    }

    pub fn pauli_y() -> Self {
        Self::from_hermitian("sigma_y", &HermitianOperator::new_unchecked(matops::pauli_y())).unwrap()
    }

    pub fn pauli_z() -> Self {
        Self::from_hermitian("sigma_z", &HermitianOperator::new_unchecked(matops::pauli_z())).unwrap()
    }

    /// Qubit spin measurement along the unit vector `n`, values `±1`.
    pub fn spin(n: [f64; 3]) -> Result<Self> {
        let len = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
        if !(len > 0.0) {
            return Err(Error::InvalidObservable("zero direction".into()));
        }
        let a = (matops::pauli_x().scale(n[0]) + matops::pauli_y().scale(n[1]) + matops::pauli_z().scale(n[2]))
            .unscale(len);
        Self::from_hermitian("spin", &HermitianOperator::new_unchecked(a))
    }

    /// Qubit trine: `T_j = (𝟙 + σ·m_j)/3` with `m_j` at angles `2πj/3` in the x–z plane.
    pub fn trine() -> Self {
        let effects = (0..3)
            .map(|j| {
                let t = 2.0 * PI * j as f64 / 3.0;
                (matops::identity(2) + matops::pauli_z().scale(t.cos()) + matops::pauli_x().scale(t.sin()))
                    .unscale(3.0)
            })
            .collect();
        Self::new("trine", effects, None).unwrap()
    }

    /// The single-outcome observable `{𝟙}`.
    pub fn trivial(dim: usize) -> Self {
        Self::new("trivial", vec![matops::identity(dim)], None).unwrap()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dim(&self) -> usize {
        self.effects[0].dim()
    }

    pub fn num_outcomes(&self) -> usize {
        self.effects.len()
    }

    pub fn effects(&self) -> &[HermitianOperator] {
        &self.effects
    }

    pub fn effect(&self, x: usize) -> &ComplexMatrix {
        self.effects[x].matrix()
    }

    pub fn values(&self) -> Option<&[f64]> {
        self.values.as_deref()
    }

    pub fn kind(&self) -> ObservableKind {
        self.kind
    }

    pub fn is_projective(&self) -> bool {
        self.kind == ObservableKind::Projective
    }

    /// Every effect has at most one eigenvalue above `1e-9`.
    pub fn is_rank_one(&self) -> bool {
        self.effects.iter().all(|e| {
            let ev = eigh(e).eigenvalues;
            ev.len() < 2 || ev[1] <= TOL_POVM
        })
    }

    pub fn with_values(mut self, values: Vec<f64>) -> Result<Self> {
        if values.len() != self.effects.len() {
            return Err(Error::InvalidObservable(format!(
                "{} outcome values for {} effects",
                values.len(),
                self.effects.len()
            )));
        }
        self.values = Some(values);
        Ok(self)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Moment operator `Σ_x x^m X_x`.
    pub fn moment(&self, m: i32) -> Result<ComplexMatrix> {
        let values = self
            .values
            .as_ref()
            .ok_or_else(|| Error::Precondition(format!("observable '{}' has no outcome values", self.label)))?;
        let d = self.dim();
        let mut acc = matops::zeros(d, d);
        for (e, &x) in self.effects.iter().zip(values) {
            acc += e.matrix().scale(x.powi(m));
        }
        Ok(acc)
    }

    /// `X ⊗ 𝟙_a`
    pub fn tensor_identity(&self, ancilla_dim: usize) -> Self {
        let id = matops::identity(ancilla_dim);
        let effects = self.effects.iter().map(|e| matops::tensor(e.matrix(), &id)).collect();
        Self::new(format!("{}⊗1", self.label), effects, self.values.clone())
            .expect("tensor extension of a POVM is a POVM")
    }

    /// `{U X_x U†}`
    pub fn conjugate(&self, u: &ComplexMatrix) -> Result<Self> {
        if u.nrows() != self.dim() || u.ncols() != self.dim() {
            return Err(Error::DimensionMismatch("unitary and observable dimensions differ".into()));
        }
        let effects = self.effects.iter().map(|e| u * e.matrix() * u.adjoint()).collect();
        Self::new(self.label.clone(), effects, self.values.clone())
    }
}

fn classify(effects: &[HermitianOperator]) -> ObservableKind {
    for (i, a) in effects.iter().enumerate() {
        for (j, b) in effects.iter().enumerate().skip(i) {
            let prod = a.matrix() * b.matrix();
            let target = if i == j { a.matrix().clone() } else { matops::zeros(a.dim(), a.dim()) };
            if max_abs(&(prod - target)) > TOL_POVM {
                return ObservableKind::Nonprojective;
            }
        }
    }
    ObservableKind::Projective
}

/// Outcome distribution `p(x) = tr(ρ X_x)`.
pub fn measure_probabilities(rho: &DensityOperator, x: &Observable) -> Result<crate::entropy::ProbabilityVector> {
    if rho.dim() != x.dim() {
        return Err(Error::DimensionMismatch(format!(
            "state has dim {}, observable has dim {}",
            rho.dim(),
            x.dim()
        )));
    }
    let p = x.effects().iter().map(|e| e.expectation(rho.matrix())).collect();
    crate::entropy::ProbabilityVector::new(p)
}

/// `σ_X = Σ X_x σ X_x` for projective `X`.
pub fn post_measurement(sigma: &DensityOperator, x: &Observable) -> Result<DensityOperator> {
    if !x.is_projective() {
        return Err(Error::Precondition(
            "post-measurement map needs a projective observable; dilate first".into(),
        ));
    }
    if sigma.dim() != x.dim() {
        return Err(Error::DimensionMismatch("state and observable dimensions differ".into()));
    }
    let d = sigma.dim();
    let mut out = matops::zeros(d, d);
    for e in x.effects() {
        out += e.matrix() * sigma.matrix() * e.matrix();
    }
    DensityOperator::from_matrix_lenient(out)
}
