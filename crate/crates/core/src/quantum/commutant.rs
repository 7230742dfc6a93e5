use crate::error::{Error, Result};
use crate::matops::{self, c64, max_abs, unvec, vec_of, ComplexMatrix, ComplexVector};

use super::channel::KrausChannel;
use super::random;

/// Singular values below this (relative to `max(1, σ_max)`) span the nullspace.
pub const TOL_NULL: f64 = 1e-9;

/// A finite set of square operators, not necessarily Hermitian.
#[derive(Clone, Debug)]
pub struct OperatorSet {
    members: Vec<ComplexMatrix>,
    dim: usize,
    adjoint_closed: bool,
}

impl OperatorSet {
    pub fn new(members: Vec<ComplexMatrix>) -> Result<Self> {
        let first = members.first().ok_or_else(|| Error::Invalid("operator set is empty".into()))?;
        let dim = first.nrows();
        for (k, m) in members.iter().enumerate() {
            if m.shape() != (dim, dim) {
                return Err(Error::DimensionMismatch(format!("member {k} is not {dim}x{dim}")));
            }
        }
        let adjoint_closed = members.iter().all(|m| {
            let a = m.adjoint();
            members.iter().any(|n| max_abs(&(n - &a)) <= 1e-12)
        });
        Ok(Self { members, dim, adjoint_closed })
    }

    pub fn members(&self) -> &[ComplexMatrix] {
        &self.members
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn adjoint_closed(&self) -> bool {
        self.adjoint_closed
    }

    /// `S ∪ T`
    pub fn union(&self, other: &Self) -> Result<Self> {
        let mut m = self.members.clone();
        m.extend(other.members.iter().cloned());
        Self::new(m)
    }

    fn with_adjoints(&self) -> Vec<ComplexMatrix> {
        let mut out = self.members.clone();
        if !self.adjoint_closed {
            out.extend(self.members.iter().map(|m| m.adjoint()));
        }
        out
    }
}

/// Hermitian basis, orthonormal in `⟨A, B⟩ = tr(A B)`, of the commutant of
/// `S ∪ S†`.
pub fn commutant_basis(s: &OperatorSet) -> Vec<ComplexMatrix> {
    let null = commutant_nullspace(&s.with_adjoints(), s.dim());
    hermitian_orthonormal(&null, s.dim())
}

fn commutant_nullspace(members: &[ComplexMatrix], d: usize) -> Vec<ComplexMatrix> {
    let n = d * d;
    let id = matops::identity(d);
    let mut stacked = matops::zeros(members.len() * n, n);
    for (k, x) in members.iter().enumerate() {
        // vec(XY − YX) = (𝟙 ⊗ X − Xᵀ ⊗ 𝟙) vec(Y)
        let block = matops::tensor(&id, x) - matops::tensor(&x.transpose(), &id);
        stacked.view_mut((k * n, 0), (n, n)).copy_from(&block);
    }
    let svd = stacked.svd(false, true);
    let v_t = svd.v_t.expect("requested V");
    let smax = svd.singular_values.iter().fold(0.0_f64, |m, &s| m.max(s));
    let tol = TOL_NULL * smax.max(1.0);
    let mut out = Vec::new();
    for (k, &sv) in svd.singular_values.iter().enumerate() {
        if sv <= tol {
            let row = v_t.row(k).adjoint();
            out.push(unvec(&ComplexVector::from_iterator(n, row.iter().cloned()), d, d));
        }
    }
    // rows of V† beyond the singular values (only when the stack is short)
    for k in svd.singular_values.len()..v_t.nrows() {
        let row = v_t.row(k).adjoint();
        out.push(unvec(&ComplexVector::from_iterator(n, row.iter().cloned()), d, d));
    }
    out
}

/// Orthonormal Hermitian basis of the complex span of a *-closed set of matrices.
fn hermitian_orthonormal(span: &[ComplexMatrix], d: usize) -> Vec<ComplexMatrix> {
    let mut candidates = Vec::with_capacity(2 * span.len());
    for y in span {
        candidates.push(matops::hermitian_part(y));
        candidates.push((y - y.adjoint()) * c64(0.0, -0.5));
    }
    // identity first so that it is always a basis direction when present
    candidates.insert(0, matops::identity(d));
    let mut basis: Vec<ComplexMatrix> = Vec::new();
    for c in candidates {
        let mut v = c;
        for _ in 0..2 {
            for b in &basis {
                let coeff = matops::trace_product_re(b, &v);
                v -= b.scale(coeff);
            }
        }
        let norm = matops::trace_product_re(&v, &v).max(0.0).sqrt();
        if norm > 1e-7 {
            basis.push(v.unscale(norm));
        }
        if basis.len() == span.len() {
            break;
        }
    }
    basis
}

fn span_projector(basis: &[ComplexMatrix], d: usize) -> ComplexMatrix {
    let mut p = matops::zeros(d * d, d * d);
    for b in basis {
        let v = vec_of(b);
        p += &v * v.adjoint();
    }
    p
}

/// Dimensions of `S′` and `(S″)′` and whether the two spans coincide.
#[derive(Clone, Debug, serde::Serialize)]
pub struct DoubleCommutantReport {
    pub commutant_dim: usize,
    pub double_commutant_dim: usize,
    pub triple_commutant_dim: usize,
    pub max_span_deviation: f64,
    pub spans_equal: bool,
}

pub fn double_commutant_check(s: &OperatorSet) -> DoubleCommutantReport {
    let d = s.dim();
    let c1 = commutant_basis(s);
    let c2 = commutant_basis(&OperatorSet::new(c1.clone()).expect("commutant contains the identity"));
    let c3 = commutant_basis(&OperatorSet::new(c2.clone()).expect("commutant contains the identity"));
    let dev = max_abs(&(span_projector(&c1, d) - span_projector(&c3, d)));
    DoubleCommutantReport {
        commutant_dim: c1.len(),
        double_commutant_dim: c2.len(),
        triple_commutant_dim: c3.len(),
        max_span_deviation: dev,
        spans_equal: c1.len() == c3.len() && dev <= 1e-8,
    }
}

/// Trace-preserving projection onto the commutant of `S ∪ S†`,
/// `E(Y) = Σ_i tr(B_i Y) B_i`, returned in Kraus form.
///
/// Trace preservation and idempotence are checked exactly; positivity is
/// checked on 100 seeded random states.
pub fn conditional_expectation(s: &OperatorSet) -> Result<KrausChannel> {
    let d = s.dim();
    let basis = commutant_basis(s);
    let sup = span_projector(&basis, d);
    if KrausChannel::min_choi_eigenvalue_of(&sup, d) < -1e-9 {
        return Err(Error::Inconsistent("conditional expectation is not completely positive".into()));
    }
    let ch = KrausChannel::from_superoperator(&sup, d, d);
    let tp = {
        let mut acc = matops::zeros(d, d);
        for k in ch.kraus_ops() {
            acc += k.adjoint() * k;
        }
        max_abs(&(acc - matops::identity(d)))
    };
    if tp > 1e-9 {
        return Err(Error::Inconsistent(format!("conditional expectation is not trace preserving ({tp:e})")));
    }
    if max_abs(&(ch.superoperator() - &sup)) > 1e-9 || !ch.is_idempotent(1e-9) {
        return Err(Error::Inconsistent("conditional expectation is not idempotent".into()));
    }
    let mut rng = random::rng_from_seed(0x5eed_cafe);
    for _ in 0..100 {
        let rank = 1 + (rand::Rng::random::<u32>(&mut rng) as usize) % d;
        let rho = random::random_state_with(&mut rng, d, rank)?;
        let out = ch.apply(rho.matrix());
        let min = *matops::eigh_raw(&out).0.last().unwrap();
        if min < -1e-9 {
            return Err(Error::Inconsistent(format!("conditional expectation output has eigenvalue {min:e}")));
        }
    }
    KrausChannel::new(ch.kraus_ops().to_vec())
}
