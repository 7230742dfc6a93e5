//! Randomized falsification runs over the inequality checks.

use std::time::Duration;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::asymmetry::OptimizerConfig;
use crate::entropy::RenyiOrder;
use crate::error::{Error, Result};
use crate::matops::{self, c64, ComplexMatrix};
use crate::quantum::io::{Instance, OperatorSetJson};
use crate::quantum::random::{
    random_basis_observable_with, random_povm_with, random_projective_with, random_rank_one_povm_with,
    random_state_with, random_unitary_with, rng_from_seed, InstanceRng,
};
use crate::quantum::{DensityOperator, Observable, OperatorSet};

use super::{
    check_gao_subadditivity, check_strong_uncertainty, check_tradeoff, corollary1_bound, corollary4_bound, BoundReport,
    TOL_MARGIN,
};

/// Largest dimension accepted by checks that need an asymmetry.
pub const CAMPAIGN_MAX_Q_DIM: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    Tradeoff,
    StrongUncertainty,
    SpectralLower,
    MixednessLower,
    Subadditivity,
}

impl Check {
    fn needs_asymmetry(self) -> bool {
        !matches!(self, Check::SpectralLower)
    }
}

/// How random observables are drawn.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObservableDist {
    /// Haar basis.
    Basis,
    /// Haar basis grouped into random blocks.
    Projective,
    /// Gaussian POVM with 2 to `dim + 1` outcomes.
    Povm,
    /// Rank-one POVM with `dim` to `dim + 2` outcomes.
    RankOnePovm,
    /// Each of the above with equal probability.
    #[default]
    Mixed,
}

impl ObservableDist {
    fn draw(self, rng: &mut InstanceRng, dim: usize) -> Result<Observable> {
        let pick = match self {
            ObservableDist::Mixed => [Self::Basis, Self::Projective, Self::Povm, Self::RankOnePovm][rng.random_range(0..4)],
            other => other,
        };
        match pick {
            ObservableDist::Basis => random_basis_observable_with(rng, dim),
            ObservableDist::Projective => {
                let blocks = rng.random_range(1..=dim);
                random_projective_with(rng, dim, blocks)
            }
            ObservableDist::Povm => {
                let n = rng.random_range(2..=dim + 1);
                random_povm_with(rng, dim, n)
            }
            ObservableDist::RankOnePovm => {
                let n = rng.random_range(dim..=dim + 2);
                random_rank_one_povm_with(rng, dim, n)
            }
            ObservableDist::Mixed => unreachable!(),
        }
    }
}

/// Campaign description, read from JSON.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignSpec {
    pub check: Check,
    pub count: usize,
    #[serde(default = "default_dims")]
    pub dims: Vec<usize>,
    #[serde(default = "default_alphas")]
    pub alphas: Vec<f64>,
    /// Draw rank-one states only.
    #[serde(default)]
    pub pure_only: bool,
    #[serde(default)]
    pub observable: ObservableDist,
    #[serde(default)]
    pub observable_y: ObservableDist,
    /// Replace `Y` by the single-outcome observable.
    #[serde(default)]
    pub y_trivial: bool,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub optimizer: OptimizerConfig,
}

fn default_dims() -> Vec<usize> {
    vec![2, 3, 4]
}

fn default_alphas() -> Vec<f64> {
    vec![0.5, 0.7, 1.0, 2.0, 4.0]
}

impl CampaignSpec {
    pub fn new(check: Check, count: usize, seed: u64) -> Self {
        Self {
            check,
            count,
            dims: default_dims(),
            alphas: default_alphas(),
            pure_only: false,
            observable: ObservableDist::Mixed,
            observable_y: ObservableDist::Mixed,
            y_trivial: false,
            seed,
            optimizer: OptimizerConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.count > 0 && (self.dims.is_empty() || self.alphas.is_empty()) {
            return Err(Error::Invalid("campaign needs at least one dim and one alpha".into()));
        }
        if let Some(&d) = self.dims.iter().find(|&&d| d < 2) {
            return Err(Error::Invalid(format!("campaign dims must be at least 2, got {d}")));
        }
        for &a in &self.alphas {
            RenyiOrder::new(a)?.require_finite_half_line()?;
        }
        if self.check == Check::MixednessLower && self.alphas.iter().any(|&a| a <= 0.5) {
            return Err(Error::Unsupported("mixedness bound needs alpha > 1/2".into()));
        }
        if self.check.needs_asymmetry() {
            if let Some(&d) = self.dims.iter().find(|&&d| d > CAMPAIGN_MAX_Q_DIM) {
                return Err(Error::Unsupported(format!(
                    "asymmetry checks are limited to dim ≤ {CAMPAIGN_MAX_Q_DIM}, spec asks for {d}"
                )));
            }
        }
        Ok(())
    }

    /// Seed of instance `i`, a SplitMix64 step from the campaign seed.
    pub fn instance_seed(&self, i: usize) -> u64 {
        let mut z = self.seed.wrapping_add((i as u64 + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15));
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    /// The instance drawn for index `i`.
    pub fn instance(&self, i: usize) -> Result<Instance> {
        let mut rng = rng_from_seed(self.instance_seed(i));
        let dim = self.dims[i % self.dims.len()];
        let alpha = self.alphas[(i / self.dims.len()) % self.alphas.len()];
        let rank = if self.pure_only { 1 } else { rng.random_range(1..=dim) };
        let state = random_state_with(&mut rng, dim, rank)?;
        let mut inst = Instance { state: Some(state), alpha: Some(alpha), ..Default::default() };
        if self.check == Check::Subadditivity {
            let (s, t) = commuting_sets(&mut rng, dim)?;
            inst.set = Some(OperatorSetJson::from_set(&s));
            inst.set_t = Some(OperatorSetJson::from_set(&t));
            return Ok(inst);
        }
        inst.observable = Some(self.observable.draw(&mut rng, dim)?);
        if matches!(self.check, Check::Tradeoff | Check::StrongUncertainty) {
            inst.observable_y =
                Some(if self.y_trivial { Observable::trivial(dim) } else { self.observable_y.draw(&mut rng, dim)? });
        }
        Ok(inst)
    }
}

/// Two sets with commuting conditional expectations. On `d = 4` these are
/// local Hermitians on each qubit; otherwise nondegenerate Hermitians
/// diagonal in a random basis and in its Fourier transform.
fn commuting_sets(rng: &mut InstanceRng, dim: usize) -> Result<(OperatorSet, OperatorSet)> {
    let herm = |rng: &mut InstanceRng, d: usize| {
        let g = crate::quantum::random::ginibre(rng, d, d);
        matops::hermitian_part(&g)
    };
    if dim == 4 {
        let a = matops::tensor(&herm(rng, 2), &matops::identity(2));
        let b = matops::tensor(&matops::identity(2), &herm(rng, 2));
        return Ok((OperatorSet::new(vec![a])?, OperatorSet::new(vec![b])?));
    }
    let u = random_unitary_with(rng, dim);
    let f = ComplexMatrix::from_fn(dim, dim, |j, k| {
        let ph = 2.0 * std::f64::consts::PI * (j * k) as f64 / dim as f64;
        c64(ph.cos(), ph.sin()) / (dim as f64).sqrt()
    });
    let diag = |rng: &mut InstanceRng| {
        let v: Vec<f64> = (0..dim).map(|k| k as f64 + rng.random::<f64>() * 0.5).collect();
        matops::diag_real(&v)
    };
    let uf = &u * &f;
    let a = &u * diag(rng) * u.adjoint();
    let b = &uf * diag(rng) * uf.adjoint();
    Ok((OperatorSet::new(vec![matops::hermitian_part(&a)])?, OperatorSet::new(vec![matops::hermitian_part(&b)])?))
}

/// A failing instance with everything needed to rerun it.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Violation {
    pub index: usize,
    pub digest: String,
    pub seed: u64,
    /// Absent when the check itself reported an inconsistency.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub margin: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub instance: Instance,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct CampaignSummary {
    pub instances_run: usize,
    /// `None` when no instance ran.
    pub min_margin: Option<f64>,
    pub violating_instances: Vec<Violation>,
    /// Wall time; left out of serialized output so runs compare byte for byte.
    #[serde(skip)]
    pub runtime: Duration,
}

impl CampaignSummary {
    /// Combines two partial summaries. Associative; violations stay sorted
    /// by instance index.
    pub fn merge(mut self, other: Self) -> Self {
        self.instances_run += other.instances_run;
        self.min_margin = match (self.min_margin, other.min_margin) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        self.violating_instances.extend(other.violating_instances);
        self.violating_instances.sort_by_key(|v| v.index);
        self.runtime += other.runtime;
        self
    }

    pub fn is_clean(&self) -> bool {
        self.violating_instances.is_empty()
    }
}

/// Runs `check` on one instance, as used by the campaign and for replay.
pub fn run_instance(check: Check, inst: &Instance, cfg: &OptimizerConfig) -> Result<BoundReport> {
    let rho: &DensityOperator = inst.state()?;
    let alpha = RenyiOrder::new(inst.alpha.unwrap_or(1.0))?;
    match check {
        Check::Tradeoff => {
            check_tradeoff(inst.observable()?, y_of(inst)?, rho, alpha, cfg)
        }
        Check::StrongUncertainty => check_strong_uncertainty(inst.observable()?, y_of(inst)?, rho, alpha, cfg),
        Check::SpectralLower => corollary1_bound(inst.observable()?, rho, alpha),
        Check::MixednessLower => corollary4_bound(inst.observable()?, rho, alpha, cfg),
        Check::Subadditivity => {
            let s = inst.set.as_ref().ok_or_else(|| Error::Invalid("instance has no 'set'".into()))?.to_set()?;
            let t = inst.set_t.as_ref().ok_or_else(|| Error::Invalid("instance has no 'set_t'".into()))?.to_set()?;
            check_gao_subadditivity(&s, &t, rho)
        }
    }
}

fn y_of(inst: &Instance) -> Result<&Observable> {
    inst.observable_y.as_ref().ok_or_else(|| Error::Invalid("instance has no 'observable_y'".into()))
}

/// Draws `spec.count` instances and runs the selected check on each in
/// parallel. Deterministic under `spec.seed`.
///
/// Margins below `−1e-6` and internal inconsistencies are recorded as
/// violations. Setup problems (bad spec, asymmetry checks above dimension
/// four) are returned as errors before anything runs.
pub fn fuzz_campaign(spec: &CampaignSpec) -> Result<CampaignSummary> {
    spec.validate()?;
    let start = std::time::Instant::now();
    let parts: Vec<Result<CampaignSummary>> = (0..spec.count)
        .into_par_iter()
        .map(|i| {
            let inst = spec.instance(i)?;
            let seed = spec.instance_seed(i);
            let mut part = CampaignSummary { instances_run: 1, ..Default::default() };
            match run_instance(spec.check, &inst, &spec.optimizer) {
                Ok(rep) => {
                    part.min_margin = Some(rep.margin);
                    if rep.margin < -TOL_MARGIN {
                        part.violating_instances.push(Violation {
                            index: i,
                            digest: rep.instance_digest,
                            seed,
                            margin: Some(rep.margin),
                            error: None,
                            instance: inst,
                        });
                    }
                }
                Err(Error::Inconsistent(msg)) => {
                    let digest = super::digest(kind_of(spec.check), &inst);
                    part.violating_instances.push(Violation { index: i, digest, seed, margin: None, error: Some(msg), instance: inst });
                }
                Err(e) => return Err(e),
            }
            Ok(part)
        })
        .collect();
    let mut out = CampaignSummary::default();
    for p in parts {
        out = out.merge(p?);
    }
    out.runtime = start.elapsed();
    Ok(out)
}

fn kind_of(check: Check) -> super::BoundKind {
    use super::BoundKind as K;
    match check {
        Check::Tradeoff => K::Tradeoff,
        Check::StrongUncertainty => K::StrongUncertainty,
        Check::SpectralLower => K::SpectralLower,
        Check::MixednessLower => K::MixednessLower,
        Check::Subadditivity => K::Subadditivity,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick(check: Check, count: usize) -> CampaignSpec {
        let mut s = CampaignSpec::new(check, count, 17);
        s.optimizer.restarts = 4;
        s
    }

    #[test]
    fn deterministic_and_clean() {
        let spec = quick(Check::Tradeoff, 12);
        let a = fuzz_campaign(&spec).unwrap();
        let b = fuzz_campaign(&spec).unwrap();
        assert!(a.is_clean(), "{:?}", a.violating_instances);
        assert_eq!(a.instances_run, 12);
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }

    #[test]
    fn pure_state_strong_matches_weak() {
        let mut spec = quick(Check::StrongUncertainty, 6);
        spec.pure_only = true;
        for i in 0..spec.count {
            let inst = spec.instance(i).unwrap();
            let rep = run_instance(spec.check, &inst, &spec.optimizer).unwrap();
            assert!((rep.rhs - rep.witnesses["weak_rhs"]).abs() < 1e-6, "{}", rep.rhs - rep.witnesses["weak_rhs"]);
        }
    }

    #[test]
    fn other_checks_run_clean() {
        for check in [Check::SpectralLower, Check::MixednessLower, Check::Subadditivity] {
            let mut spec = quick(check, 9);
            spec.alphas = vec![0.7, 1.0, 2.0];
            let s = fuzz_campaign(&spec).unwrap();
            assert!(s.is_clean(), "{check:?}: {:?}", s.violating_instances);
        }
    }

    #[test]
    fn guards_and_empty_specs() {
        let mut spec = quick(Check::Tradeoff, 3);
        spec.dims = vec![5];
        assert!(matches!(fuzz_campaign(&spec), Err(Error::Unsupported(_))));
        spec.check = Check::SpectralLower;
        assert!(fuzz_campaign(&spec).unwrap().is_clean());
        let empty = quick(Check::Tradeoff, 0);
        let s = fuzz_campaign(&empty).unwrap();
        assert_eq!(s.instances_run, 0);
        assert!(s.min_margin.is_none());
    }

    #[test]
    fn merge_is_associative() {
        let spec = quick(Check::SpectralLower, 6);
        let parts: Vec<_> = (0..3)
            .map(|k| {
                let mut s = spec.clone();
                s.count = 2;
                s.seed = k;
                fuzz_campaign(&s).unwrap()
            })
            .collect();
        let left = parts[0].clone().merge(parts[1].clone()).merge(parts[2].clone());
        let right = parts[0].clone().merge(parts[1].clone().merge(parts[2].clone()));
        assert_eq!(serde_json::to_string(&left).unwrap(), serde_json::to_string(&right).unwrap());
    }
}
