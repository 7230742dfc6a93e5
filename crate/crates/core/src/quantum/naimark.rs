use crate::error::{Error, Result};
use crate::matops::{self, c64, eigh, max_abs, psd_sqrt, range_basis, ComplexMatrix};

use super::observable::Observable;
use super::state::DensityOperator;

const TOL_DILATION: f64 = 1e-9;

/// Which isometry a dilation uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DilationKind {
    /// `V|ψ⟩ = Σ_x X_x^{1/2}|ψ⟩ ⊗ |x⟩` on `C^d ⊗ C^n`, with `X̃_x = 𝟙 ⊗ |x⟩⟨x|`.
    Canonical,
    /// `V = Σ_x |x⟩⟨v_x|` on `C^n` for effects `X_x = |v_x⟩⟨v_x|`, with `X̃_x = |x⟩⟨x|`.
    RankOne,
}

/// A projective observable on a larger space that compresses to a given POVM.
#[derive(Clone, Debug)]
pub struct NaimarkDilation {
    original: Observable,
    kind: DilationKind,
    isometry: ComplexMatrix,
    extended_effects: Vec<ComplexMatrix>,
    projector: ComplexMatrix,
}

/// Dilation of `x`: the rank-one form when every effect has rank at most
/// one, the canonical form otherwise.
pub fn naimark_extend(x: &Observable) -> NaimarkDilation {
    if x.is_rank_one() {
        naimark_rank_one(x)
    } else {
        naimark_canonical(x)
    }
}

pub fn naimark_canonical(x: &Observable) -> NaimarkDilation {
    let d = x.dim();
    let n = x.num_outcomes();
    let mut v = matops::zeros(d * n, d);
    for (k, e) in x.effects().iter().enumerate() {
        let root = psd_sqrt(e.matrix());
        for i in 0..d {
            for j in 0..d {
                v[(i * n + k, j)] = root[(i, j)];
            }
        }
    }
    let extended_effects = (0..n)
        .map(|k| {
            let mut pk = matops::zeros(n, n);
            pk[(k, k)] = c64(1.0, 0.0);
            matops::tensor(&matops::identity(d), &pk)
        })
        .collect();
    NaimarkDilation::assemble(x.clone(), DilationKind::Canonical, v, extended_effects)
}

fn naimark_rank_one(x: &Observable) -> NaimarkDilation {
    let d = x.dim();
    let n = x.num_outcomes();
    let mut v = matops::zeros(n, d);
    for (k, e) in x.effects().iter().enumerate() {
        let spec = eigh(e);
        let w = spec.eigenvalues[0].max(0.0).sqrt();
        for j in 0..d {
            v[(k, j)] = spec.eigenvectors[(j, 0)].conj() * w;
        }
    }
    let extended_effects = (0..n)
        .map(|k| {
            let mut pk = matops::zeros(n, n);
            pk[(k, k)] = c64(1.0, 0.0);
            pk
        })
        .collect();
    NaimarkDilation::assemble(x.clone(), DilationKind::RankOne, v, extended_effects)
}

impl NaimarkDilation {
    fn assemble(original: Observable, kind: DilationKind, isometry: ComplexMatrix, extended_effects: Vec<ComplexMatrix>) -> Self {
        let projector = &isometry * isometry.adjoint();
        Self { original, kind, isometry, extended_effects, projector }
    }

    pub fn original(&self) -> &Observable {
        &self.original
    }

    pub fn kind(&self) -> DilationKind {
        self.kind
    }

    pub fn extended_dim(&self) -> usize {
        self.isometry.nrows()
    }

    /// `V`, of shape `extended_dim × dim`.
    pub fn isometry(&self) -> &ComplexMatrix {
        &self.isometry
    }

    pub fn extended_effects(&self) -> &[ComplexMatrix] {
        &self.extended_effects
    }

    /// `P = V V†`
    pub fn projector(&self) -> &ComplexMatrix {
        &self.projector
    }

    pub fn extended_observable(&self) -> Observable {
        Observable::new(
            format!("{}~", self.original.label()),
            self.extended_effects.clone(),
            self.original.values().map(|v| v.to_vec()),
        )
        .expect("extended effects form a projective measurement")
    }

    /// `V ρ V†`
    pub fn embed(&self, rho: &DensityOperator) -> Result<DensityOperator> {
        if rho.dim() != self.original.dim() {
            return Err(Error::DimensionMismatch("state and dilation dimensions differ".into()));
        }
        DensityOperator::from_matrix_lenient(&self.isometry * rho.matrix() * self.isometry.adjoint())
    }

    /// `Σ_x X̃_x ω X̃_x` for an operator on the extended space.
    pub fn dephase(&self, omega: &ComplexMatrix) -> ComplexMatrix {
        let n = self.extended_dim();
        let mut out = matops::zeros(n, n);
        for p in &self.extended_effects {
            out += p * omega * p;
        }
        out
    }

    /// Operators `K_x = Q_x† V`, where the columns of `Q_x` are an
    /// orthonormal basis of the range of `X̃_x V`. They satisfy
    /// `K_x† K_x = X_x`, so `Σ_x K_x† K_x = 𝟙`.
    pub fn support_operators(&self) -> Vec<ComplexMatrix> {
        self.support_blocks().into_iter().map(|(_, k)| k).collect()
    }

    /// Pairs `(Q_x, K_x)` as in [`support_operators`](Self::support_operators).
    pub fn support_blocks(&self) -> Vec<(ComplexMatrix, ComplexMatrix)> {
        self.extended_effects
            .iter()
            .map(|p| {
                let pv = p * &self.isometry;
                let q = range_basis(&(&pv * pv.adjoint()), 1e-12);
                let k = q.adjoint() * pv;
                (q, k)
            })
            .collect()
    }

    /// Checks `V†V = 𝟙`, `P = VV†`, `V X_x V† = P X̃_x P` and that the
    /// extended effects are orthogonal projections summing to `𝟙`.
    pub fn verify(&self) -> Result<()> {
        let d = self.original.dim();
        let n = self.extended_dim();
        let v = &self.isometry;
        let fail = |what: &str, err: f64| {
            Err(Error::Inconsistent(format!("dilation check '{what}' failed with error {err:e}")))
        };
        let e = max_abs(&(v.adjoint() * v - matops::identity(d)));
        if e > TOL_DILATION {
            return fail("isometry", e);
        }
        let e = max_abs(&(&self.projector - v * v.adjoint()));
        if e > TOL_DILATION {
            return fail("projector", e);
        }
        let mut sum = matops::zeros(n, n);
        for (x, px) in self.extended_effects.iter().enumerate() {
            let lhs = v * self.original.effect(x) * v.adjoint();
            let rhs = &self.projector * px * &self.projector;
            let e = max_abs(&(lhs - rhs));
            if e > TOL_DILATION {
                return fail("compression", e);
            }
            for (y, py) in self.extended_effects.iter().enumerate() {
                let target = if x == y { px.clone() } else { matops::zeros(n, n) };
                let e = max_abs(&(px * py - target));
                if e > TOL_DILATION {
                    return fail("orthogonality", e);
                }
            }
            sum += px;
        }
        let e = max_abs(&(sum - matops::identity(n)));
        if e > TOL_DILATION {
            return fail("completeness", e);
        }
        Ok(())
    }
}
