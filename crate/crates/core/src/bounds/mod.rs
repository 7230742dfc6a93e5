//! Uncertainty and tradeoff inequalities evaluated on concrete instances.
//!
//! Every check returns a [`BoundReport`] with `margin = lhs − rhs`. Wherever
//! an asymmetry enters, it comes from the optimizer and is therefore an
//! upper bound on the infimum. That can only raise a left-hand side or
//! lower a right-hand side, so a negative margin still points to a bug.

mod campaign;

use std::collections::BTreeMap;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::asymmetry::{self, renyi_asymmetry, standard_asymmetry, AsymmetryTarget, OptimizerConfig};
use crate::entropy::{self, min_entropy, renyi_entropy, LogBase, RenyiOrder};
use crate::error::{Error, Result};
use crate::matops::{self, lambda_max, operator_norm, psd_sqrt};
use crate::quantum::io::{Instance, OperatorSetJson};
use crate::quantum::{conditional_expectation, measure_probabilities, DensityOperator, Observable, OperatorSet};

pub use campaign::{
    fuzz_campaign, run_instance, CampaignSpec, CampaignSummary, Check, ObservableDist, Violation, CAMPAIGN_MAX_Q_DIM,
};

/// Allowed gap between the eigenvalue and operator-norm forms of `μ_XY`.
pub const TOL_MU_FORMS: f64 = 1e-9;
/// Margins below `−TOL_MARGIN` count as violations.
pub const TOL_MARGIN: f64 = 1e-6;
/// Eigenvalues of `ρ` above this enter the spectral maximum.
pub const TOL_EIGEN_SUPPORT: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    Tradeoff,
    StrongUncertainty,
    SpectralLower,
    MixednessLower,
    Subadditivity,
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundReport {
    pub kind: BoundKind,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    /// Entropic intermediate values, in the report's log base.
    pub witnesses: BTreeMap<String, f64>,
    /// Unitless intermediate values (overlaps, eigenvalues, orders).
    pub parameters: BTreeMap<String, f64>,
    /// Witness names summing to `lhs`, and to `rhs`.
    pub lhs_terms: Vec<String>,
    pub rhs_terms: Vec<String>,
    pub notes: Vec<String>,
    /// SHA-256 of the compact JSON of the inputs.
    pub instance_digest: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl BoundReport {
    fn build(kind: BoundKind, witnesses: Vec<(&str, f64)>, lhs_terms: &[&str], rhs_terms: &[&str], instance: &Instance) -> Self {
        let witnesses: BTreeMap<String, f64> = witnesses.into_iter().map(|(k, v)| (k.to_string(), v)).collect();
        let sum = |names: &[&str]| names.iter().map(|n| witnesses[*n]).sum::<f64>();
        let lhs = sum(lhs_terms);
        let rhs = sum(rhs_terms);
        Self {
            kind,
            lhs,
            rhs,
            margin: lhs - rhs,
            lhs_terms: lhs_terms.iter().map(|s| s.to_string()).collect(),
            rhs_terms: rhs_terms.iter().map(|s| s.to_string()).collect(),
            witnesses,
            parameters: BTreeMap::new(),
            notes: Vec::new(),
            instance_digest: digest(kind, instance),
            seed: None,
        }
    }

    fn with_parameter(mut self, name: &str, value: f64) -> Self {
        self.parameters.insert(name.to_string(), value);
        self
    }

    fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    /// `Σ lhs_terms − Σ rhs_terms` from the witnesses.
    pub fn recompute_margin(&self) -> f64 {
        let sum = |names: &[String]| names.iter().map(|n| self.witnesses[n]).sum::<f64>();
        sum(&self.lhs_terms) - sum(&self.rhs_terms)
    }

    pub fn in_base(&self, base: LogBase) -> Self {
        let mut out = self.clone();
        out.lhs = base.from_nats(self.lhs);
        out.rhs = base.from_nats(self.rhs);
        out.margin = base.from_nats(self.margin);
        for v in out.witnesses.values_mut() {
            *v = base.from_nats(*v);
        }
        out
    }
}

pub(crate) fn digest(kind: BoundKind, instance: &Instance) -> String {
    let body = serde_json::to_string(&(kind, instance)).expect("instances serialize");
    hex::encode(Sha256::digest(body.as_bytes()))
}

fn instance_xy(x: &Observable, y: Option<&Observable>, rho: &DensityOperator, alpha: Option<RenyiOrder>) -> Instance {
    Instance {
        state: Some(rho.clone()),
        observable: Some(x.clone()),
        observable_y: y.cloned(),
        alpha: alpha.map(|a| a.value()),
        ..Default::default()
    }
}

fn same_dim(x: &Observable, y: &Observable) -> Result<()> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch(format!("observables of dim {} and {}", x.dim(), y.dim())));
    }
    Ok(())
}

/// `μ_XY = max_{x,y} λ_max(X_x^{1/2} Y_y X_x^{1/2})`.
///
/// The operator-norm form `max ‖X_x^{1/2} Y_y^{1/2}‖²` is evaluated too and
/// must agree within [`TOL_MU_FORMS`].
///
/// ```
/// use qdecomp::bounds::mu_overlap;
/// use qdecomp::quantum::Observable;
///
/// let mu = mu_overlap(&Observable::pauli_z(), &Observable::pauli_x()).unwrap();
/// assert!((mu - 0.5).abs() < 1e-12);
/// ```
pub fn mu_overlap(x: &Observable, y: &Observable) -> Result<f64> {
    same_dim(x, y)?;
    let xs: Vec<_> = x.effects().iter().map(|e| psd_sqrt(e.matrix())).collect();
    let ys: Vec<_> = y.effects().iter().map(|e| psd_sqrt(e.matrix())).collect();
    let mut eig = 0.0_f64;
    let mut norm = 0.0_f64;
    for (sx, ex) in xs.iter().zip(x.effects()) {
        let _ = ex;
        for (sy, ey) in ys.iter().zip(y.effects()) {
            eig = eig.max(lambda_max(&matops::hermitian_part(&(sx * ey.matrix() * sx))));
            norm = norm.max(operator_norm(&(sx * sy)).powi(2));
        }
    }
    if (eig - norm).abs() > TOL_MU_FORMS {
        return Err(Error::Inconsistent(format!("overlap forms disagree: {eig} vs {norm}")));
    }
    Ok(eig)
}

/// `Q_α(X|ρ) + H_α(Y|ρ) ≥ −ln μ_XY`.
pub fn check_tradeoff(x: &Observable, y: &Observable, rho: &DensityOperator, alpha: RenyiOrder, cfg: &OptimizerConfig) -> Result<BoundReport> {
    alpha.require_finite_half_line()?;
    same_dim(x, y)?;
    let mu = mu_overlap(x, y)?;
    let q = renyi_asymmetry(x, rho, alpha, cfg)?;
    let h = renyi_entropy(&measure_probabilities(rho, y)?, alpha);
    let inst = instance_xy(x, Some(y), rho, Some(alpha));
    let mut rep = BoundReport::build(
        BoundKind::Tradeoff,
        vec![("asymmetry_x", q.value), ("entropy_y", h), ("neg_log_mu", -mu.ln())],
        &["asymmetry_x", "entropy_y"],
        &["neg_log_mu"],
        &inst,
    )
    .with_parameter("mu", mu)
    .with_parameter("alpha", alpha.value());
    if !q.converged {
        rep = rep.with_note("optimizer did not converge; asymmetry is an upper bound");
    }
    Ok(rep)
}

/// `H_α(X|ρ) + H_β(Y|ρ) ≥ −ln μ_XY + max{C_α(Y|ρ), C_β(X|ρ)}` with
/// `1/α + 1/β = 2`.
///
/// The witness `weak_rhs` is `−ln μ_XY` alone; the strong right-hand side
/// must not fall below it by more than `1e-8`. At `α = 1/2` the conjugate
/// order is infinite and `C_β(X|ρ)` is left out, which only weakens the check.
pub fn check_strong_uncertainty(
    x: &Observable,
    y: &Observable,
    rho: &DensityOperator,
    alpha: RenyiOrder,
    cfg: &OptimizerConfig,
) -> Result<BoundReport> {
    alpha.require_finite_half_line()?;
    same_dim(x, y)?;
    let beta = alpha.conjugate().expect("alpha is at least 1/2");
    let mu = mu_overlap(x, y)?;
    let px = measure_probabilities(rho, x)?;
    let py = measure_probabilities(rho, y)?;
    let hx = renyi_entropy(&px, alpha);
    let hy = renyi_entropy(&py, beta);
    // C_α(Y) = H_β(Y) − Q_α(Y)
    let c_y = hy - renyi_asymmetry(y, rho, alpha, cfg)?.value;
    // C_β(X) = H_α(X) − Q_β(X), undefined for β = ∞
    let c_x = if beta.is_infinite() { None } else { Some(hx - renyi_asymmetry(x, rho, beta, cfg)?.value) };
    // both terms are nonnegative, so clamping at zero keeps the bound sound
    let c_max = c_x.map_or(c_y, |c| c.max(c_y)).max(0.0);
    let neg_log_mu = -mu.ln();
    let mut witnesses = vec![
        ("entropy_alpha_x", hx),
        ("entropy_beta_y", hy),
        ("neg_log_mu", neg_log_mu),
        ("classical_alpha_y", c_y),
        ("classical_max", c_max),
        ("weak_rhs", neg_log_mu),
    ];
    if let Some(c) = c_x {
        witnesses.push(("classical_beta_x", c));
    }
    let inst = instance_xy(x, Some(y), rho, Some(alpha));
    let mut rep = BoundReport::build(
        BoundKind::StrongUncertainty,
        witnesses,
        &["entropy_alpha_x", "entropy_beta_y"],
        &["neg_log_mu", "classical_max"],
        &inst,
    )
    .with_parameter("mu", mu)
    .with_parameter("alpha", alpha.value())
    .with_parameter("beta", beta.value());
    if c_x.is_none() {
        rep = rep.with_note("conjugate order is infinite: classical_beta_x omitted");
    }
    if rep.rhs < neg_log_mu - 1e-8 {
        return Err(Error::Inconsistent(format!(
            "strong right-hand side {} is below the weak one {neg_log_mu}",
            rep.rhs
        )));
    }
    Ok(rep)
}

/// `H_α(X|ρ) ≥ −ln max_{x, j: e_j > 0} λ_max(E_j X_x E_j)` over the
/// eigenprojections `E_j` of `ρ`.
///
/// The witness `min_entropy_x` is `H_∞(X|ρ)`; the spectral bound may not
/// exceed it by more than `1e-8`.
pub fn corollary1_bound(x: &Observable, rho: &DensityOperator, alpha: RenyiOrder) -> Result<BoundReport> {
    let p = measure_probabilities(rho, x)?;
    let spec = rho.spectrum();
    let mut top = 0.0_f64;
    for g in 0..spec.groups.len() {
        if spec.group_value(g) <= TOL_EIGEN_SUPPORT {
            continue;
        }
        let e = spec.projector(g);
        for xe in x.effects() {
            top = top.max(lambda_max(&matops::hermitian_part(&(&e * xe.matrix() * &e))));
        }
    }
    let rhs = -top.ln();
    let h_inf = min_entropy(&p);
    let inst = instance_xy(x, None, rho, Some(alpha));
    let rep = BoundReport::build(
        BoundKind::SpectralLower,
        vec![("entropy_alpha_x", renyi_entropy(&p, alpha)), ("spectral_rhs", rhs), ("min_entropy_x", h_inf)],
        &["entropy_alpha_x"],
        &["spectral_rhs"],
        &inst,
    )
    .with_parameter("max_overlap", top)
    .with_parameter("alpha", alpha.value());
    if rhs > h_inf + 1e-8 {
        return Err(Error::Inconsistent(format!("spectral bound {rhs} exceeds H_inf {h_inf}")));
    }
    Ok(rep)
}

/// `H_α(X|ρ) ≥ −ln max_x λ_max(X_x) + C_β(X|ρ)`, `β = α/(2α − 1)`.
///
/// For rank-one `X` at `α = 1` the classical term is `H(ρ)` and the bound
/// is evaluated in that closed form.
pub fn corollary4_bound(x: &Observable, rho: &DensityOperator, alpha: RenyiOrder, cfg: &OptimizerConfig) -> Result<BoundReport> {
    alpha.require_finite_half_line()?;
    let beta = alpha.conjugate().expect("alpha is at least 1/2");
    let lower = asymmetry::asymmetry_lower_bound(x);
    let hx = renyi_entropy(&measure_probabilities(rho, x)?, alpha);
    let (c, note) = if x.is_rank_one() && alpha.is_one() {
        (entropy::von_neumann_entropy(rho), Some("rank-one observable: classical term is H(rho)"))
    } else if beta.is_infinite() {
        return Err(Error::Unsupported("classical term needs a finite conjugate order (alpha > 1/2)".into()));
    } else {
        // C_β(X) = H_α(X) − Q_β(X)
        (hx - renyi_asymmetry(x, rho, beta, cfg)?.value, None)
    };
    let inst = instance_xy(x, None, rho, Some(alpha));
    let mut rep = BoundReport::build(
        BoundKind::MixednessLower,
        vec![("entropy_alpha_x", hx), ("neg_log_lambda_max", lower), ("classical_beta_x", c)],
        &["entropy_alpha_x"],
        &["neg_log_lambda_max", "classical_beta_x"],
        &inst,
    )
    .with_parameter("alpha", alpha.value())
    .with_parameter("beta", beta.value());
    if let Some(n) = note {
        rep = rep.with_note(n);
    }
    Ok(rep)
}

/// `Q₁(S|ρ) + Q₁(T|ρ) ≥ Q₁(S ∪ T|ρ)` for sets whose conditional
/// expectations commute.
pub fn check_gao_subadditivity(s: &OperatorSet, t: &OperatorSet, rho: &DensityOperator) -> Result<BoundReport> {
    let phi_s = conditional_expectation(s)?;
    let phi_t = conditional_expectation(t)?;
    if !phi_s.commutes_with(&phi_t, 1e-8) {
        return Err(Error::Precondition("conditional expectations of the two sets do not commute".into()));
    }
    let u = s.union(t)?;
    let qs = standard_asymmetry(&AsymmetryTarget::Channel(phi_s), rho)?.value;
    let qt = standard_asymmetry(&AsymmetryTarget::Channel(phi_t), rho)?.value;
    let qu = standard_asymmetry(&AsymmetryTarget::Set(u), rho)?.value;
    let inst = Instance {
        state: Some(rho.clone()),
        set: Some(OperatorSetJson::from_set(s)),
        set_t: Some(OperatorSetJson::from_set(t)),
        ..Default::default()
    };
    Ok(BoundReport::build(
        BoundKind::Subadditivity,
        vec![("asymmetry_s", qs), ("asymmetry_t", qt), ("asymmetry_union", qu)],
        &["asymmetry_s", "asymmetry_t"],
        &["asymmetry_union"],
        &inst,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matops::{c64, diag_real};
    use crate::quantum::random::{random_povm, random_state};

    fn cfg() -> OptimizerConfig {
        OptimizerConfig { restarts: 4, ..Default::default() }
    }

    #[test]
    fn mu_examples() {
        let t = Observable::trine();
        assert!((mu_overlap(&t, &t).unwrap() - 4.0 / 9.0).abs() < 1e-12);
        let x = random_povm(3, 3, 1).unwrap();
        let one = Observable::trivial(3);
        let top = x.effects().iter().map(|e| lambda_max(e.matrix())).fold(0.0, f64::max);
        assert!((mu_overlap(&x, &one).unwrap() - top).abs() < 1e-12);
        let y = random_povm(3, 2, 2).unwrap();
        assert!((mu_overlap(&x, &y).unwrap() - mu_overlap(&y, &x).unwrap()).abs() < 1e-10);
        // brute force over the nine trine pairs
        let mut best = 0.0_f64;
        for a in t.effects() {
            let s = psd_sqrt(a.matrix());
            for b in t.effects() {
                best = best.max(crate::matops::eigh_matrix(&(&s * b.matrix() * &s)).unwrap().eigenvalues[0]);
            }
        }
        assert!((best - 4.0 / 9.0).abs() < 1e-12);
    }

    #[test]
    fn conjugate_bases_saturate_at_maximally_mixed() {
        let rho = DensityOperator::maximally_mixed(2);
        let rep = check_tradeoff(&Observable::pauli_z(), &Observable::pauli_x(), &rho, RenyiOrder::ONE, &cfg()).unwrap();
        assert!(rep.margin.abs() < 1e-8);
        assert!((rep.recompute_margin() - rep.margin).abs() < 1e-10);
        let rep =
            check_strong_uncertainty(&Observable::pauli_z(), &Observable::pauli_x(), &rho, RenyiOrder::ONE, &cfg()).unwrap();
        assert!((rep.lhs - 2.0 * 2f64.ln()).abs() < 1e-12);
        assert!(rep.margin.abs() < 1e-6);
    }

    #[test]
    fn trivial_y_reduces_to_asymmetry_lower_bound() {
        let rho = random_state(2, 2, 3).unwrap();
        let rep = check_tradeoff(&Observable::trine(), &Observable::trivial(2), &rho, RenyiOrder::new(2.0).unwrap(), &cfg()).unwrap();
        assert!((rep.rhs - 1.5f64.ln()).abs() < 1e-12);
        assert!(rep.margin >= -1e-9);
    }

    #[test]
    fn strong_uncertainty_pure_state_matches_weak() {
        let psi = random_state(3, 1, 4).unwrap();
        let x = random_povm(3, 3, 5).unwrap();
        let y = random_povm(3, 2, 6).unwrap();
        let rep = check_strong_uncertainty(&x, &y, &psi, RenyiOrder::new(0.7).unwrap(), &cfg()).unwrap();
        assert!((rep.rhs - rep.witnesses["weak_rhs"]).abs() < 1e-6);
        let half = check_strong_uncertainty(&x, &y, &psi, RenyiOrder::HALF, &cfg()).unwrap();
        assert!(!half.witnesses.contains_key("classical_beta_x"));
        assert!(!half.notes.is_empty());
    }

    #[test]
    fn spectral_bound_examples() {
        let psi = random_state(2, 1, 7).unwrap();
        let rep = corollary1_bound(&Observable::trine(), &psi, RenyiOrder::ONE).unwrap();
        assert!((rep.rhs - rep.witnesses["min_entropy_x"]).abs() < 1e-8);
        let mixed = DensityOperator::maximally_mixed(2);
        let rep = corollary1_bound(&Observable::trine(), &mixed, RenyiOrder::ONE).unwrap();
        assert!((rep.rhs - 1.5f64.ln()).abs() < 1e-12);
        // σ_z basis on ½(I + 0.6σ_x): eigenprojections of ρ are |±⟩⟨±|
        let rho = DensityOperator::from_bloch([0.6, 0.0, 0.0]).unwrap();
        let rep = corollary1_bound(&Observable::pauli_z(), &rho, RenyiOrder::ONE).unwrap();
        assert!((rep.rhs - 2f64.ln()).abs() < 1e-12);
        assert!((rep.witnesses["min_entropy_x"] - 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn mixedness_bound_examples() {
        let rho = random_state(2, 2, 8).unwrap();
        let rep = corollary4_bound(&Observable::pauli_x(), &rho, RenyiOrder::ONE, &cfg()).unwrap();
        assert!((rep.rhs - entropy::von_neumann_entropy(&rho)).abs() < 1e-12);
        let rep = corollary4_bound(&Observable::trine(), &rho, RenyiOrder::ONE, &cfg()).unwrap();
        assert!((rep.rhs - 1.5f64.ln() - entropy::von_neumann_entropy(&rho)).abs() < 1e-12);
        assert!(rep.margin >= 0.0);
        let psi = random_state(2, 1, 9).unwrap();
        let rep = corollary4_bound(&Observable::pauli_z(), &psi, RenyiOrder::ONE, &cfg()).unwrap();
        assert!(rep.rhs.abs() < 1e-12);
        let rep = corollary4_bound(&random_povm(2, 3, 10).unwrap(), &rho, RenyiOrder::new(2.0).unwrap(), &cfg()).unwrap();
        assert!(rep.margin >= -1e-6);
    }

    #[test]
    fn subadditivity_examples() {
        let rho = random_state(2, 2, 11).unwrap();
        let s = OperatorSet::new(vec![matops::pauli_z()]).unwrap();
        let t = OperatorSet::new(vec![matops::pauli_x()]).unwrap();
        let rep = check_gao_subadditivity(&s, &t, &rho).unwrap();
        assert!((rep.rhs - (2f64.ln() - entropy::von_neumann_entropy(&rho))).abs() < 1e-10);
        assert!(rep.margin >= -1e-10);
        let rep = check_gao_subadditivity(&s, &s, &rho).unwrap();
        assert!((rep.margin - rep.witnesses["asymmetry_s"]).abs() < 1e-10);

        let rho4 = random_state(4, 4, 12).unwrap();
        let a = OperatorSet::new(vec![matops::tensor(&matops::pauli_z(), &matops::identity(2))]).unwrap();
        let b = OperatorSet::new(vec![matops::tensor(&matops::identity(2), &matops::pauli_z())]).unwrap();
        assert!(check_gao_subadditivity(&a, &b, &rho4).unwrap().margin >= -1e-10);

        // σ_z and a non-orthogonal tilt do not give commuting projections
        let tilt = OperatorSet::new(vec![diag_real(&[1.0, 0.0]) + matops::pauli_x().scale(0.3)]).unwrap();
        let _ = c64(0.0, 0.0);
        assert!(matches!(check_gao_subadditivity(&s, &tilt, &rho), Err(Error::Precondition(_))));
    }
}
