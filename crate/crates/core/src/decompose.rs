//! Quantum–classical splittings `M = Q + C` of variance, covariance and
//! entropy.
//!
//! Entropic reports are in nats; [`DecompositionReport::in_base`] converts.

use serde::Serialize;

use crate::asymmetry::{explicit_c1, renyi_asymmetry, standard_asymmetry, AsymmetryTarget, OptimizerConfig};
use crate::entropy::{self, shannon_entropy, subentropy, LogBase, ProbabilityVector, RenyiOrder};
use crate::error::{Error, Result};
use crate::matops::{self, eigh_raw, trace_product_re, ComplexMatrix};
use crate::quantum::{measure_probabilities, DensityOperator, Observable};

/// Tolerance for decompositions evaluated in closed form.
pub const TOL_EXACT: f64 = 1e-8;
/// Tolerance for decompositions whose `Q` comes from the optimizer.
pub const TOL_OPTIMIZED: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DecompositionKind {
    SkewVariance,
    Shannon,
    Renyi { alpha: f64 },
    SelfDual,
    VarianceRoof,
}

impl DecompositionKind {
    pub fn is_entropic(self) -> bool {
        !matches!(self, DecompositionKind::SkewVariance | DecompositionKind::VarianceRoof)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DecompositionReport {
    #[serde(flatten)]
    pub kind: DecompositionKind,
    pub m: f64,
    pub q: f64,
    pub c: f64,
    /// `|M − Q − C|`
    pub residual: f64,
}

impl DecompositionReport {
    fn new(kind: DecompositionKind, m: f64, q: f64, c: f64) -> Self {
        Self { kind, m, q, c, residual: (m - q - c).abs() }
    }

    /// Errors unless `M = Q + C`, `Q ≥ 0` and `C ≥ 0` within `tol`
    /// (the residual is scaled by `max(1, |M|)`).
    pub fn check(&self, tol: f64) -> Result<()> {
        if self.residual > tol * self.m.abs().max(1.0) {
            return Err(Error::Inconsistent(format!("residual {:e} exceeds tolerance", self.residual)));
        }
        if self.q < -tol {
            return Err(Error::Inconsistent(format!("quantum component {} is negative", self.q)));
        }
        if self.c < -tol {
            return Err(Error::Inconsistent(format!("classical component {} is negative", self.c)));
        }
        Ok(())
    }

    /// Entropic components rescaled to `base`; variances are returned unchanged.
    pub fn in_base(&self, base: LogBase) -> Self {
        if !self.kind.is_entropic() {
            return self.clone();
        }
        Self {
            m: base.from_nats(self.m),
            q: base.from_nats(self.q),
            c: base.from_nats(self.c),
            residual: base.from_nats(self.residual),
            ..self.clone()
        }
    }
}

fn require_values(x: &Observable) -> Result<()> {
    if x.values().is_none() {
        return Err(Error::Precondition(format!("observable '{}' has no outcome values", x.label())));
    }
    Ok(())
}

fn require_projective(x: &Observable) -> Result<()> {
    if !x.is_projective() {
        return Err(Error::Precondition(format!("observable '{}' is not projective", x.label())));
    }
    Ok(())
}

fn check_dims(x: &Observable, rho: &DensityOperator) -> Result<()> {
    if x.dim() != rho.dim() {
        return Err(Error::DimensionMismatch(format!("observable dim {}, state dim {}", x.dim(), rho.dim())));
    }
    Ok(())
}

/// `tr(√ρ A √ρ B)`
fn sandwiched_product(sqrt_rho: &ComplexMatrix, a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    trace_product_re(&(sqrt_rho * a * sqrt_rho), b)
}

/// Variance split into skew information and the remainder.
///
/// For projective `X` this is `Q = −½ tr[X, √ρ]²` and
/// `C = tr[(ρ^{1/4}(X − ⟨X⟩)ρ^{1/4})²]`. Otherwise `X̄ = Σ x X_x` and
/// `X²‾ = Σ x² X_x` enter as `Q = −½ tr[X̄, √ρ]² + tr ρ(X²‾ − X̄²)`.
///
/// ```
/// use qdecomp::decompose::decompose_variance_skew;
/// use qdecomp::quantum::{DensityOperator, Observable};
///
/// let r: f64 = 0.6;
/// let rho = DensityOperator::from_bloch([r, 0.0, 0.0]).unwrap();
/// let rep = decompose_variance_skew(&Observable::pauli_z(), &rho).unwrap();
/// assert!((rep.q - (1.0 - (1.0 - r * r).sqrt())).abs() < 1e-12);
/// assert!((rep.c - (1.0 - r * r).sqrt()).abs() < 1e-12);
/// ```
pub fn decompose_variance_skew(x: &Observable, rho: &DensityOperator) -> Result<DecompositionReport> {
    require_values(x)?;
    check_dims(x, rho)?;
    let s = rho.sqrt();
    let x1 = x.moment(1)?;
    let x2 = x.moment(2)?;
    let mean = rho.expectation(&x1);
    let m = rho.expectation(&x2) - mean * mean;
    let overlap = sandwiched_product(&s, &x1, &x1);
    // −½ tr[A, √ρ]² = tr(ρA²) − tr(√ρA√ρA)
    let skew = rho.expectation(&(&x1 * &x1)) - overlap;
    let rep = if x.is_projective() {
        let d = x.dim();
        let centred = &x1 - matops::identity(d).scale(mean);
        let c = sandwiched_product(&s, &centred, &centred);
        DecompositionReport::new(DecompositionKind::SkewVariance, m, skew, c)
    } else {
        let q = skew + rho.expectation(&(&x2 - &x1 * &x1));
        DecompositionReport::new(DecompositionKind::SkewVariance, m, q, m - q)
    };
    rep.check(TOL_EXACT)?;
    Ok(rep)
}

/// Symmetrized covariance matrix split with the SLD quantum Fisher form.
#[derive(Clone, Debug, Serialize)]
pub struct CovarianceReport {
    pub m: Vec<Vec<f64>>,
    pub q: Vec<Vec<f64>>,
    pub c: Vec<Vec<f64>>,
    /// Smallest eigenvalue of `C`.
    pub c_min_eigenvalue: f64,
    pub residual: f64,
}

/// Denominators `λ_m + λ_n` at or below this are treated as zero.
const TOL_DENOMINATOR: f64 = 1e-14;

/// `Q_jk = ½ Σ_{m,n} Re(⟨m|[X_j,ρ]|n⟩⟨n|[X_k,ρ]†|m⟩)/(λ_m + λ_n)` in the
/// eigenbasis of `ρ`; pairs with vanishing denominator are skipped.
fn sld_matrix(ops: &[ComplexMatrix], rho: &DensityOperator) -> Vec<Vec<f64>> {
    let spec = rho.spectrum();
    let u = &spec.eigenvectors;
    let lam = &spec.eigenvalues;
    let comms: Vec<ComplexMatrix> =
        ops.iter().map(|a| u.adjoint() * matops::commutator(a, rho.matrix()) * u).collect();
    let d = rho.dim();
    let n = ops.len();
    let mut q = vec![vec![0.0; n]; n];
    for j in 0..n {
        for k in j..n {
            let mut acc = 0.0;
            for a in 0..d {
                for b in 0..d {
                    let den = lam[a] + lam[b];
                    if den <= TOL_DENOMINATOR {
                        continue;
                    }
                    acc += (comms[j][(a, b)] * comms[k][(a, b)].conj()).re / den;
                }
            }
            q[j][k] = 0.5 * acc;
            q[k][j] = 0.5 * acc;
        }
    }
    q
}

/// `Q_V(X|ρ)`, the minimal quantum Fisher information up to a factor 1/4.
pub fn q_variance_roof(x: &Observable, rho: &DensityOperator) -> Result<f64> {
    require_values(x)?;
    require_projective(x)?;
    check_dims(x, rho)?;
    Ok(sld_matrix(&[x.moment(1)?], rho)[0][0])
}

pub fn decompose_covariance_sld(xs: &[Observable], rho: &DensityOperator) -> Result<CovarianceReport> {
    let mut ops = Vec::with_capacity(xs.len());
    for x in xs {
        require_values(x)?;
        require_projective(x)?;
        check_dims(x, rho)?;
        ops.push(x.moment(1)?);
    }
    let n = ops.len();
    let means: Vec<f64> = ops.iter().map(|a| rho.expectation(a)).collect();
    let mut m = vec![vec![0.0; n]; n];
    for j in 0..n {
        for k in 0..n {
            let sym = (&ops[j] * &ops[k] + &ops[k] * &ops[j]).scale(0.5);
            m[j][k] = rho.expectation(&sym) - means[j] * means[k];
        }
    }
    let q = sld_matrix(&ops, rho);
    let c: Vec<Vec<f64>> = (0..n).map(|j| (0..n).map(|k| m[j][k] - q[j][k]).collect()).collect();
    let cm = ComplexMatrix::from_fn(n, n, |j, k| matops::c64(c[j][k], 0.0));
    let c_min_eigenvalue = if n == 0 { 0.0 } else { *eigh_raw(&cm).0.last().expect("nonempty") };
    if c_min_eigenvalue < -TOL_EXACT {
        return Err(Error::Inconsistent(format!(
            "classical covariance has negative eigenvalue {c_min_eigenvalue:e}"
        )));
    }
    Ok(CovarianceReport { m, q, c, c_min_eigenvalue, residual: 0.0 })
}

/// `M = H(X|ρ)`, `Q = H(Σ_x K_x ρ K_x†) − H(ρ)` and
/// `C = H(ρ) − Σ_x p_x H(K_x ρ K_x†/p_x)` on the dilation.
pub fn decompose_shannon(x: &Observable, rho: &DensityOperator) -> Result<DecompositionReport> {
    check_dims(x, rho)?;
    let m = shannon_entropy(&measure_probabilities(rho, x)?);
    let q = standard_asymmetry(&AsymmetryTarget::Observable(x.clone()), rho)?.value;
    let c = explicit_c1(x, rho)?;
    let rep = DecompositionReport::new(DecompositionKind::Shannon, m, q, c);
    rep.check(TOL_EXACT)?;
    Ok(rep)
}

/// `M = H_β(X|ρ)`, `Q = Q_α(X|ρ)` from the optimizer and `C = M − Q`.
pub fn decompose_renyi(
    x: &Observable,
    rho: &DensityOperator,
    alpha: RenyiOrder,
    cfg: &OptimizerConfig,
) -> Result<DecompositionReport> {
    let m = crate::asymmetry::conjugate_entropy(x, rho, alpha)?;
    let q = renyi_asymmetry(x, rho, alpha, cfg)?.value;
    let rep = DecompositionReport::new(DecompositionKind::Renyi { alpha: alpha.value() }, m, q, m - q);
    rep.check(TOL_OPTIMIZED)?;
    Ok(rep)
}

/// Channel whose signal ensemble is `p_x`, `√ρ X_x √ρ / p_x`, read out by `X`.
#[derive(Clone, Debug, Serialize)]
pub struct SelfDualChannelReport {
    /// `p(x, x′) = tr(√ρ X_{x′} √ρ X_x)`, indexed `[x][x′]`.
    pub joint: Vec<Vec<f64>>,
    pub signal_probs: Vec<f64>,
    pub mutual_information: f64,
    pub conditional_entropy: f64,
}

const TOL_JOINT: f64 = 1e-9;

/// `M = H(X|ρ)`, `C = 2H(X) − H(X, X′)`, `Q = H(X, X′) − H(X)`.
pub fn decompose_selfdual(x: &Observable, rho: &DensityOperator) -> Result<(DecompositionReport, SelfDualChannelReport)> {
    check_dims(x, rho)?;
    let s = rho.sqrt();
    let n = x.num_outcomes();
    let mut joint = vec![vec![0.0; n]; n];
    for (a, ea) in x.effects().iter().enumerate() {
        for (b, eb) in x.effects().iter().enumerate() {
            joint[a][b] = sandwiched_product(&s, eb.matrix(), ea.matrix()).max(0.0);
        }
    }
    let p = measure_probabilities(rho, x)?;
    for (a, (ra, &pa)) in joint.iter().zip(p.probs()).enumerate() {
        let row: f64 = ra.iter().sum();
        if (row - pa).abs() > TOL_JOINT {
            return Err(Error::Inconsistent(format!("joint marginal {row} differs from p_x {pa}")));
        }
        for (b, rb) in joint.iter().enumerate().take(a) {
            if (ra[b] - rb[a]).abs() > TOL_JOINT {
                return Err(Error::Inconsistent("joint distribution is not symmetric".into()));
            }
        }
    }
    let flat = ProbabilityVector::new(joint.iter().flatten().copied().collect())?;
    let hx = shannon_entropy(&p);
    let hxx = shannon_entropy(&flat);
    let c = 2.0 * hx - hxx;
    let q = hxx - hx;
    let rep = DecompositionReport::new(DecompositionKind::SelfDual, hx, q, c);
    rep.check(TOL_EXACT)?;
    let channel = SelfDualChannelReport {
        joint,
        signal_probs: p.probs().to_vec(),
        mutual_information: c,
        conditional_entropy: q,
    };
    Ok((rep, channel))
}

/// `M = Var_ρ X`, `Q = Q_V(X|ρ)`, `C = M − Q`.
///
/// ```
/// use qdecomp::decompose::variance_convex_roof;
/// use qdecomp::quantum::{DensityOperator, Observable};
///
/// let rho = DensityOperator::from_bloch([0.0, 0.0, 0.7]).unwrap();
/// let rep = variance_convex_roof(&Observable::pauli_x(), &rho).unwrap();
/// assert!((rep.q - 0.49).abs() < 1e-12);
/// ```
pub fn variance_convex_roof(x: &Observable, rho: &DensityOperator) -> Result<DecompositionReport> {
    let q = q_variance_roof(x, rho)?;
    let x1 = x.moment(1)?;
    let mean = rho.expectation(&x1);
    let m = rho.expectation(&(&x1 * &x1)) - mean * mean;
    let rep = DecompositionReport::new(DecompositionKind::VarianceRoof, m, q, m - q);
    rep.check(TOL_EXACT)?;
    Ok(rep)
}

/// Bounds on the roof decomposition of Shannon entropy for rank-one `X`,
/// in nats.
#[derive(Clone, Debug, Serialize)]
pub struct ShannonRoofBounds {
    /// `H(X|ρ) − H(ρ)`
    pub q_lower: f64,
    /// Conditional entropy of the self-dual channel.
    pub q_upper: f64,
    /// Self-dual mutual information minus the subentropy `q(ρ)`.
    pub c_lower: f64,
    /// `H(ρ)`
    pub c_upper: f64,
    pub subentropy: f64,
    /// The exact roofs need a global search over ensembles and are not computed.
    pub exact_roofs_computed: bool,
}

impl ShannonRoofBounds {
    pub fn in_base(&self, base: LogBase) -> Self {
        Self {
            q_lower: base.from_nats(self.q_lower),
            q_upper: base.from_nats(self.q_upper),
            c_lower: base.from_nats(self.c_lower),
            c_upper: base.from_nats(self.c_upper),
            subentropy: base.from_nats(self.subentropy),
            exact_roofs_computed: self.exact_roofs_computed,
        }
    }
}

pub fn shannon_roof_bounds(x: &Observable, rho: &DensityOperator) -> Result<ShannonRoofBounds> {
    if !x.is_rank_one() {
        return Err(Error::Precondition(format!("observable '{}' has effects of rank above one", x.label())));
    }
    let (sd, _) = decompose_selfdual(x, rho)?;
    let h_rho = entropy::von_neumann_entropy(rho);
    let q_rho = subentropy(rho);
    let b = ShannonRoofBounds {
        q_lower: sd.m - h_rho,
        q_upper: sd.q,
        c_lower: sd.c - q_rho,
        c_upper: h_rho,
        subentropy: q_rho,
        exact_roofs_computed: false,
    };
    if b.q_lower > b.q_upper + TOL_EXACT || b.c_lower > b.c_upper + TOL_EXACT {
        return Err(Error::Inconsistent(format!("roof bounds out of order: {b:?}")));
    }
    Ok(b)
}
