//! Rényi asymmetry of a state with respect to an observable, operator set,
//! group or channel.
//!
//! For an observable `X` the infimum of `D_α(ρ‖σ)` runs over states `σ`
//! that commute with every effect. A nonprojective `X` is handled on the
//! space of a Naimark dilation `(V, X̃)`: the state is `VρV†` and `σ`
//! ranges over all states commuting with the extended effects. At `α = 1`
//! this agrees with the closed form `H(Σ_x K_x ρ K_x†) − H(ρ)`. The
//! narrower feasible set `σ = Σ_x X̃_x V τ V† X̃_x` is available through
//! [`Constraint::SystemRestricted`].
//!
//! Each block is further restricted to the support of `P_x ρ P_x`. This
//! loses nothing: pinching onto that support never increases the divergence
//! and renormalizing only lowers it.

mod chart;
mod lbfgs;
mod objective;
mod oracle;

use rayon::prelude::*;
use serde::Serialize;

use crate::entropy::{self, renyi_entropy, RenyiOrder};
use crate::error::{Error, Result};
use crate::matops::{self, range_basis, ComplexMatrix};
use crate::quantum::{
    self, conditional_expectation, measure_probabilities, naimark_extend, random, twirl, DensityOperator,
    DilationKind, KrausChannel, NaimarkDilation, Observable, OperatorSet,
};

use chart::{BlockChart, Chart, MapChart};
use objective::Objective;

pub use oracle::{oracle_asymmetry, ORACLE_MAX_PARAMS};

/// Feasible set used for nonprojective observables.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Constraint {
    /// All states on the dilation space commuting with the extended effects.
    #[default]
    Extended,
    /// Dephased images `Σ_x X̃_x V τ V† X̃_x` of system states `τ`.
    SystemRestricted,
}

#[derive(Clone, Debug, Serialize, serde::Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizerConfig {
    pub restarts: usize,
    pub max_iters: usize,
    /// Per-iteration decrease below which descent counts as stalled.
    pub tolerance: f64,
    pub seed: u64,
    pub constraint: Constraint,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self { restarts: 16, max_iters: 2000, tolerance: 1e-9, seed: 0x9d2c_5680, constraint: Constraint::Extended }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    Optimizer,
    Oracle,
}

/// Where a minimizer lives.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "space", rename_all = "snake_case")]
pub enum Space {
    System { dim: usize },
    Extended { dim: usize, dilation: DilationKind },
}

#[derive(Clone, Debug, Serialize)]
pub struct AsymmetryResult {
    /// In nats.
    pub value: f64,
    pub minimizer: DensityOperator,
    #[serde(flatten)]
    pub space: Space,
    pub method: Method,
    pub restarts_used: usize,
    pub converged: bool,
    /// Second-best minus best restart value; zero with fewer than two restarts.
    pub gap_estimate: f64,
}

/// Anything that resolves to a constrained set of states.
#[derive(Clone, Debug)]
pub enum AsymmetryTarget {
    Observable(Observable),
    Set(OperatorSet),
    /// Unitaries forming a finite group up to phases.
    Group(Vec<ComplexMatrix>),
    /// Must be an idempotent, self-adjoint channel.
    Channel(KrausChannel),
}

impl AsymmetryTarget {
    /// The projection `φ` whose range is the feasible set, on the space
    /// where the asymmetry is evaluated. Observables use the dilation when
    /// nonprojective.
    fn projection(&self) -> Result<KrausChannel> {
        match self {
            AsymmetryTarget::Observable(x) => {
                if x.is_projective() {
                    quantum::dephasing_channel(x)
                } else {
                    KrausChannel::new(naimark_extend(x).extended_effects().to_vec())
                }
            }
            AsymmetryTarget::Set(s) => conditional_expectation(s),
            AsymmetryTarget::Group(g) => twirl(g),
            AsymmetryTarget::Channel(c) => {
                if c.input_dim() != c.output_dim() || !c.is_idempotent(1e-8) || !c.is_self_adjoint(1e-8) {
                    return Err(Error::Unsupported(
                        "channel is not a conditional expectation (needs idempotent and self-adjoint)".into(),
                    ));
                }
                Ok(c.clone())
            }
        }
    }
}

fn check_dims(x: &Observable, rho: &DensityOperator) -> Result<()> {
    if x.dim() != rho.dim() {
        return Err(Error::DimensionMismatch(format!(
            "observable acts on dimension {}, state on {}",
            x.dim(),
            rho.dim()
        )));
    }
    Ok(())
}

/// Reduced problem: `ρ_r = W† ρ_t W` and feasible `σ_r` block diagonal
/// with the given sizes, mapped back by `σ_t = W σ_r W†`.
struct BlockProblem {
    w: ComplexMatrix,
    sizes: Vec<usize>,
    rho_r: ComplexMatrix,
    space: Space,
}

fn block_problem(rho_t: &ComplexMatrix, projectors: &[ComplexMatrix], space: Space) -> BlockProblem {
    let n = rho_t.nrows();
    let scale = matops::trace(rho_t).re.max(1e-300);
    let mut cols = Vec::new();
    let mut sizes = Vec::new();
    for p in projectors {
        let q = range_basis(&(p * rho_t * p), 1e-13 * scale);
        if q.ncols() > 0 {
            sizes.push(q.ncols());
            cols.push(q);
        }
    }
    let m: usize = sizes.iter().sum();
    let mut w = matops::zeros(n, m);
    let mut at = 0;
    for q in &cols {
        w.view_mut((0, at), (n, q.ncols())).copy_from(q);
        at += q.ncols();
    }
    let rho_r = matops::hermitian_part(&(w.adjoint() * rho_t * &w));
    let tr = matops::trace(&rho_r).re;
    BlockProblem { w, sizes, rho_r: rho_r.unscale(tr), space }
}

/// Best restart found by multi-start L-BFGS over a chart.
struct Search {
    value: f64,
    sigma: ComplexMatrix,
    restarts_used: usize,
    converged: bool,
    gap: f64,
}

fn search<C: Chart + Sync>(chart: &C, rho: &ComplexMatrix, alpha: f64, cfg: &OptimizerConfig) -> Search {
    let obj = Objective::new(rho.clone(), alpha);
    let m = chart.dim();
    let restarts = cfg.restarts.max(1);
    let np = chart.num_params();
    let run = |k: usize| {
        let x0 = if k == 0 {
            let hint = if rho.nrows() == m { rho.clone() } else { matops::identity(m).unscale(m as f64) };
            let mixed = (hint + matops::identity(m).unscale(m as f64)).scale(0.5);
            chart.params_near(&mixed)
        } else {
            let mut rng = random::rng_from_seed(cfg.seed ^ (k as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
            let g = random::ginibre(&mut rng, np, 1);
            g.iter().map(|z| z.re).collect()
        };
        let out = lbfgs::minimize(
            |x| {
                let s = chart.sigma(x);
                let (v, h) = obj.eval(&s, true);
                (v, chart.pullback(x, &h.expect("gradient requested")))
            },
            x0,
            cfg.max_iters,
            cfg.tolerance,
            true,
        );
        (k, out)
    };
    let mut outs: Vec<(usize, lbfgs::Outcome)> = (0..restarts).into_par_iter().map(run).collect();
    outs.sort_by(|a, b| a.1.f.total_cmp(&b.1.f).then(a.0.cmp(&b.0)));
    let best = &outs[0].1;
    let gap = outs.get(1).map_or(0.0, |o| o.1.f - best.f);
    Search {
        value: best.f,
        sigma: chart.sigma(&best.x),
        restarts_used: restarts,
        converged: best.converged,
        gap,
    }
}

/// `Q_α(X|ρ)` by multi-start descent, in nats.
///
/// ```
/// use qdecomp::asymmetry::{renyi_asymmetry, OptimizerConfig};
/// use qdecomp::entropy::RenyiOrder;
/// use qdecomp::quantum::{DensityOperator, Observable};
///
/// let plus = DensityOperator::from_bloch([1.0, 0.0, 0.0]).unwrap();
/// let cfg = OptimizerConfig { restarts: 4, ..Default::default() };
/// let q = renyi_asymmetry(&Observable::pauli_z(), &plus, RenyiOrder::new(2.0).unwrap(), &cfg).unwrap();
/// assert!((q.value - 2f64.ln()).abs() < 1e-6);
/// ```
pub fn renyi_asymmetry(
    x: &Observable,
    rho: &DensityOperator,
    alpha: RenyiOrder,
    cfg: &OptimizerConfig,
) -> Result<AsymmetryResult> {
    alpha.require_finite_half_line()?;
    check_dims(x, rho)?;
    let a = alpha.value();
    if x.is_projective() {
        let projs: Vec<ComplexMatrix> = x.effects().iter().map(|e| e.matrix().clone()).collect();
        let bp = block_problem(rho.matrix(), &projs, Space::System { dim: x.dim() });
        return Ok(solve_blocks(&bp, a, cfg));
    }
    let dil = naimark_extend(x);
    let space = Space::Extended { dim: dil.extended_dim(), dilation: dil.kind() };
    let rho_t = dil.embed(rho)?;
    match cfg.constraint {
        Constraint::Extended => {
            let bp = block_problem(rho_t.matrix(), dil.extended_effects(), space);
            Ok(solve_blocks(&bp, a, cfg))
        }
        Constraint::SystemRestricted => Ok(solve_restricted(&dil, &rho_t, a, cfg)),
    }
}

fn solve_blocks(bp: &BlockProblem, alpha: f64, cfg: &OptimizerConfig) -> AsymmetryResult {
    let chart = BlockChart::new(bp.sizes.clone());
    let s = search(&chart, &bp.rho_r, alpha, cfg);
    let sigma_t = &bp.w * &s.sigma * bp.w.adjoint();
    finish(s, sigma_t, bp.space)
}

fn solve_restricted(dil: &NaimarkDilation, rho_t: &DensityOperator, alpha: f64, cfg: &OptimizerConfig) -> AsymmetryResult {
    let ops: Vec<ComplexMatrix> = dil.extended_effects().iter().map(|p| p * dil.isometry()).collect();
    let chart = MapChart::new(ops);
    let s = search(&chart, rho_t.matrix(), alpha, cfg);
    let sigma = s.sigma.clone();
    finish(s, sigma, Space::Extended { dim: dil.extended_dim(), dilation: dil.kind() })
}

fn finish(s: Search, sigma: ComplexMatrix, space: Space) -> AsymmetryResult {
    let minimizer = DensityOperator::from_matrix_lenient(matops::hermitian_part(&sigma))
        .expect("chart output is a state");
    AsymmetryResult {
        value: s.value,
        minimizer,
        space,
        method: Method::Optimizer,
        restarts_used: s.restarts_used,
        converged: s.converged,
        gap_estimate: s.gap,
    }
}

/// `inf D_α(ρ‖σ)` over states in the range of a conditional expectation.
pub fn renyi_asymmetry_channel(
    phi: &KrausChannel,
    rho: &DensityOperator,
    alpha: RenyiOrder,
    cfg: &OptimizerConfig,
) -> Result<AsymmetryResult> {
    alpha.require_finite_half_line()?;
    let phi = AsymmetryTarget::Channel(phi.clone()).projection()?;
    if phi.input_dim() != rho.dim() {
        return Err(Error::DimensionMismatch("channel and state dimensions differ".into()));
    }
    let chart = MapChart::new(phi.kraus_ops().to_vec());
    let s = search(&chart, rho.matrix(), alpha.value(), cfg);
    let sigma = s.sigma.clone();
    Ok(finish(s, sigma, Space::System { dim: rho.dim() }))
}

/// Dispatches on the target kind.
pub fn renyi_asymmetry_target(
    target: &AsymmetryTarget,
    rho: &DensityOperator,
    alpha: RenyiOrder,
    cfg: &OptimizerConfig,
) -> Result<AsymmetryResult> {
    match target {
        AsymmetryTarget::Observable(x) => renyi_asymmetry(x, rho, alpha, cfg),
        other => renyi_asymmetry_channel(&other.projection()?, rho, alpha, cfg),
    }
}

/// `Q₁ = H(φ(ρ)) − H(ρ)` with minimizer `φ(ρ)`, in nats.
///
/// ```
/// use qdecomp::asymmetry::{standard_asymmetry, AsymmetryTarget};
/// use qdecomp::quantum::{DensityOperator, Observable};
///
/// let plus = DensityOperator::from_bloch([1.0, 0.0, 0.0]).unwrap();
/// let q = standard_asymmetry(&AsymmetryTarget::Observable(Observable::pauli_z()), &plus).unwrap();
/// assert!((q.value - 2f64.ln()).abs() < 1e-12);
/// ```
pub fn standard_asymmetry(target: &AsymmetryTarget, rho: &DensityOperator) -> Result<AsymmetryResult> {
    let (rho_t, space) = match target {
        AsymmetryTarget::Observable(x) if !x.is_projective() => {
            check_dims(x, rho)?;
            let dil = naimark_extend(x);
            (dil.embed(rho)?, Space::Extended { dim: dil.extended_dim(), dilation: dil.kind() })
        }
        AsymmetryTarget::Observable(x) => {
            check_dims(x, rho)?;
            (rho.clone(), Space::System { dim: rho.dim() })
        }
        _ => (rho.clone(), Space::System { dim: rho.dim() }),
    };
    let phi = target.projection()?;
    if phi.input_dim() != rho_t.dim() {
        return Err(Error::DimensionMismatch("target and state dimensions differ".into()));
    }
    let image = DensityOperator::from_matrix_lenient(matops::hermitian_part(&phi.apply(rho_t.matrix())))?;
    let value = entropy::von_neumann_entropy(&image) - entropy::von_neumann_entropy(&rho_t);
    Ok(AsymmetryResult {
        value,
        minimizer: image,
        space,
        method: Method::ClosedForm,
        restarts_used: 0,
        converged: true,
        gap_estimate: 0.0,
    })
}

/// `H_β(X|ρ)` in nats with `β = α/(2α − 1)`.
pub fn conjugate_entropy(x: &Observable, rho: &DensityOperator, alpha: RenyiOrder) -> Result<f64> {
    let beta = alpha
        .conjugate()
        .ok_or_else(|| Error::InvalidOrder(format!("order {alpha} has no conjugate")))?;
    Ok(renyi_entropy(&measure_probabilities(rho, x)?, beta))
}

/// Agreement required between the optimizer and the explicit `C₁`.
pub const TOL_C1_AGREEMENT: f64 = 2e-4;

/// `C_α = H_β(X|ρ) − Q_α(X|ρ)`, in nats.
///
/// At `α = 1` the explicit form `H(ρ) − Σ_x p_x H(K_x ρ K_x†/p_x)` is
/// evaluated as well and must agree within [`TOL_C1_AGREEMENT`].
pub fn classical_component(x: &Observable, rho: &DensityOperator, alpha: RenyiOrder, cfg: &OptimizerConfig) -> Result<f64> {
    let h = conjugate_entropy(x, rho, alpha)?;
    let q = renyi_asymmetry(x, rho, alpha, cfg)?;
    let c = h - q.value;
    if alpha.is_one() {
        let explicit = explicit_c1(x, rho)?;
        if (explicit - c).abs() > TOL_C1_AGREEMENT {
            return Err(Error::Inconsistent(format!(
                "classical component {c} disagrees with the explicit form {explicit}"
            )));
        }
    }
    Ok(c)
}

/// `H(ρ) − Σ_x p_x H(ρ_x)` with `ρ_x = K_x ρ K_x†/p_x` from the dilation.
pub fn explicit_c1(x: &Observable, rho: &DensityOperator) -> Result<f64> {
    check_dims(x, rho)?;
    let dil = naimark_extend(x);
    let mut avg = 0.0;
    for k in dil.support_operators() {
        let block = matops::hermitian_part(&(&k * rho.matrix() * k.adjoint()));
        avg += matops::trace(&block).re * entropy::entropy_of_psd(&block);
    }
    Ok(entropy::von_neumann_entropy(rho) - avg)
}

#[derive(Clone, Debug, Serialize)]
pub struct MaxPotential {
    /// `Q_α(X ⊗ 𝟙 | ψ)` on the canonical purification.
    pub optimized: AsymmetryResult,
    /// `H_β(X|ρ)`
    pub closed_form: f64,
}

/// Largest system dimension accepted by [`max_potential`].
pub const MAX_POTENTIAL_DIM: usize = 4;

/// Asymmetry on a purification, alongside the closed form `H_β(X|ρ)`.
/// Agreement within `5e-4` is enforced for dimensions up to three.
pub fn max_potential(x: &Observable, rho: &DensityOperator, alpha: RenyiOrder, cfg: &OptimizerConfig) -> Result<MaxPotential> {
    check_dims(x, rho)?;
    let d = rho.dim();
    if d > MAX_POTENTIAL_DIM {
        return Err(Error::Unsupported(format!(
            "purified optimization is limited to dimension {MAX_POTENTIAL_DIM}, got {d}"
        )));
    }
    let psi = quantum::purify(rho);
    let optimized = renyi_asymmetry(&x.tensor_identity(d), &psi, alpha, cfg)?;
    let closed_form = conjugate_entropy(x, rho, alpha)?;
    if d <= 3 && (optimized.value - closed_form).abs() > 5e-4 {
        return Err(Error::Inconsistent(format!(
            "purified asymmetry {} differs from H_beta {closed_form}",
            optimized.value
        )));
    }
    Ok(MaxPotential { optimized, closed_form })
}

/// `−ln max_x λ_max(X_x)`, in nats.
///
/// ```
/// use qdecomp::asymmetry::asymmetry_lower_bound;
/// use qdecomp::quantum::Observable;
///
/// assert!((asymmetry_lower_bound(&Observable::trine()) - 1.5f64.ln()).abs() < 1e-12);
/// assert!(asymmetry_lower_bound(&Observable::pauli_x()).abs() < 1e-12);
/// ```
pub fn asymmetry_lower_bound(x: &Observable) -> f64 {
    let top = x.effects().iter().map(|e| matops::lambda_max(e.matrix())).fold(0.0_f64, f64::max);
    -top.min(1.0).ln()
}
