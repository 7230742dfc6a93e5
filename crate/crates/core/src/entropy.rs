//! Classical and quantum entropies and divergences.
//!
//! All functions return values in nats. [`LogBase`] converts to other units
//! at the edges (reports, CLI), so the base is an explicit argument rather
//! than shared state.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matops::{eigh_raw, ComplexMatrix};
use crate::quantum::DensityOperator;

/// `|α − 1|` below this is treated as the Shannon / von Neumann limit.
pub const ALPHA_ONE_TOL: f64 = 1e-6;
/// Eigenvalues above this belong to the support of a state.
pub const TOL_SUPPORT: f64 = 1e-10;
/// Eigenvalues at or below this fraction of the largest are roundoff.
const TOL_ROUNDOFF: f64 = 1e-14;

/// Logarithm base used when presenting entropies.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct LogBase(f64);

impl LogBase {
    pub const BITS: LogBase = LogBase(2.0);
    pub const NATS: LogBase = LogBase(std::f64::consts::E);

    pub fn new(base: f64) -> Result<Self> {
        if !(base > 1.0) || !base.is_finite() {
            return Err(Error::Invalid(format!("log base must be a finite number > 1, got {base}")));
        }
        Ok(LogBase(base))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// Converts a quantity in nats to this base. Infinities pass through.
    pub fn from_nats(self, nats: f64) -> f64 {
        if self.0 == std::f64::consts::E {
            nats
        } else {
            nats / self.0.ln()
        }
    }

    pub fn log(self, x: f64) -> f64 {
        self.from_nats(x.ln())
    }
}

impl Default for LogBase {
    fn default() -> Self {
        LogBase::BITS
    }
}

impl TryFrom<f64> for LogBase {
    type Error = Error;
    fn try_from(b: f64) -> Result<Self> {
        LogBase::new(b)
    }
}

impl From<LogBase> for f64 {
    fn from(b: LogBase) -> f64 {
        b.0
    }
}

/// A probability distribution on a finite set.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProbabilityVector {
    probs: Vec<f64>,
}

impl ProbabilityVector {
    /// Entries in `[-1e-12, 0)` are clipped to zero; the sum must be one
    /// within `1e-9`.
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::Invalid("empty probability vector".into()));
        }
        let mut out = Vec::with_capacity(probs.len());
        for (i, &p) in probs.iter().enumerate() {
            if !p.is_finite() || p < -1e-12 {
                return Err(Error::Invalid(format!("probability {i} is {p}")));
            }
            out.push(p.max(0.0));
        }
        let s: f64 = out.iter().sum();
        if (s - 1.0).abs() > 1e-9 {
            return Err(Error::Invalid(format!("probabilities sum to {s}")));
        }
        Ok(Self { probs: out })
    }

    pub fn uniform(n: usize) -> Self {
        Self { probs: vec![1.0 / n as f64; n] }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn max(&self) -> f64 {
        self.probs.iter().fold(0.0, |m: f64, &p| m.max(p))
    }
}

impl<'de> Deserialize<'de> for ProbabilityVector {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            probs: Vec<f64>,
        }
        let raw = Raw::deserialize(de)?;
        ProbabilityVector::new(raw.probs).map_err(serde::de::Error::custom)
    }
}

/// A Rényi order `α ∈ [0, ∞]`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize)]
pub struct RenyiOrder(f64);

impl RenyiOrder {
    pub const ONE: RenyiOrder = RenyiOrder(1.0);
    pub const HALF: RenyiOrder = RenyiOrder(0.5);
    pub const INFINITY: RenyiOrder = RenyiOrder(f64::INFINITY);

    pub fn new(alpha: f64) -> Result<Self> {
        if alpha.is_nan() || alpha < 0.0 {
            return Err(Error::InvalidOrder(format!("Renyi order must be ≥ 0, got {alpha}")));
        }
        Ok(RenyiOrder(alpha))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }

    pub fn is_one(self) -> bool {
        (self.0 - 1.0).abs() < ALPHA_ONE_TOL
    }

    /// `β` with `1/α + 1/β = 2`, defined for `α ≥ 1/2`.
    pub fn conjugate(self) -> Option<RenyiOrder> {
        let a = self.0;
        if a < 0.5 {
            None
        } else if a.is_infinite() {
            Some(RenyiOrder(0.5))
        } else if a == 0.5 {
            Some(RenyiOrder::INFINITY)
        } else {
            Some(RenyiOrder(a / (2.0 * a - 1.0)))
        }
    }

    /// Errors unless `α ∈ [1/2, ∞)`.
    pub fn require_finite_half_line(self) -> Result<()> {
        if self.0 < 0.5 || self.0.is_infinite() {
            return Err(Error::InvalidOrder(format!("order must lie in [1/2, ∞), got {}", self.0)));
        }
        Ok(())
    }
}

impl std::fmt::Display for RenyiOrder {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.0.is_infinite() {
            write!(f, "inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

pub fn shannon_entropy(p: &ProbabilityVector) -> f64 {
    -p.probs().iter().filter(|&&q| q > 0.0).map(|&q| q * q.ln()).sum::<f64>()
}

pub fn min_entropy(p: &ProbabilityVector) -> f64 {
    -p.max().ln()
}

/// `H_α(p) = ln(Σ p^α)/(1 − α)` in nats, with the Shannon limit near one,
/// the min-entropy at infinity and `ln |supp p|` at zero.
pub fn renyi_entropy(p: &ProbabilityVector, alpha: RenyiOrder) -> f64 {
    let a = alpha.value();
    if alpha.is_infinite() {
        min_entropy(p)
    } else if alpha.is_one() {
        shannon_entropy(p)
    } else if a == 0.0 {
        (p.probs().iter().filter(|&&q| q > 0.0).count() as f64).ln()
    } else {
        let s: f64 = p.probs().iter().filter(|&&q| q > 0.0).map(|&q| q.powf(a)).sum();
        s.ln() / (1.0 - a)
    }
}

fn spectrum_distribution(rho: &DensityOperator) -> ProbabilityVector {
    let vals: Vec<f64> = rho.eigenvalues().iter().map(|l| l.max(0.0)).collect();
    let s: f64 = vals.iter().sum();
    ProbabilityVector { probs: vals.iter().map(|l| l / s).collect() }
}

pub fn von_neumann_entropy(rho: &DensityOperator) -> f64 {
    shannon_entropy(&spectrum_distribution(rho))
}

/// Rényi entropy of the spectrum.
pub fn renyi_entropy_state(rho: &DensityOperator, alpha: RenyiOrder) -> f64 {
    renyi_entropy(&spectrum_distribution(rho), alpha)
}

fn support_projector(rho: &DensityOperator) -> ComplexMatrix {
    let spec = rho.spectrum();
    spec.map(|l| if l > TOL_SUPPORT { 1.0 } else { 0.0 })
}

/// Weight of `ρ` outside the support of `σ`.
fn weight_outside(rho: &DensityOperator, sigma: &DensityOperator) -> f64 {
    let p = support_projector(sigma);
    1.0 - rho.expectation(&p)
}

fn weight_inside(rho: &DensityOperator, sigma: &DensityOperator) -> f64 {
    rho.expectation(&support_projector(sigma))
}

fn check_dims(rho: &DensityOperator, sigma: &DensityOperator) -> Result<()> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch(format!("states of dim {} and {}", rho.dim(), sigma.dim())));
    }
    Ok(())
}

fn log_on_support(rho: &DensityOperator) -> ComplexMatrix {
    rho.spectrum().map(|l| if l > TOL_SUPPORT { l.ln() } else { 0.0 })
}

/// `D(ρ‖σ) = tr ρ(ln ρ − ln σ)`, infinite unless `supp ρ ⊆ supp σ`.
pub fn relative_entropy(rho: &DensityOperator, sigma: &DensityOperator) -> Result<f64> {
    check_dims(rho, sigma)?;
    if weight_outside(rho, sigma) > TOL_SUPPORT {
        return Ok(f64::INFINITY);
    }
    let neg_h = -von_neumann_entropy(rho);
    let cross = rho.expectation(&log_on_support(sigma));
    Ok((neg_h - cross).max(0.0))
}

/// Sandwiched Rényi divergence
/// `D_α(ρ‖σ) = ln tr[(σ^γ ρ σ^γ)^α]/(α − 1)`, `γ = (1 − α)/(2α)`,
/// for `α ∈ [1/2, ∞)`.
///
/// For `α > 1` the value is infinite unless `supp ρ ⊆ supp σ`; for `α < 1`
/// it is infinite only when the supports are orthogonal. Negative powers
/// of `σ` act on its support.
pub fn sandwiched_divergence(rho: &DensityOperator, sigma: &DensityOperator, alpha: RenyiOrder) -> Result<f64> {
    alpha.require_finite_half_line()?;
    check_dims(rho, sigma)?;
    if alpha.is_one() {
        return relative_entropy(rho, sigma);
    }
    let a = alpha.value();
    if a > 1.0 && weight_outside(rho, sigma) > TOL_SUPPORT {
        return Ok(f64::INFINITY);
    }
    if a < 1.0 && weight_inside(rho, sigma) <= TOL_SUPPORT {
        return Ok(f64::INFINITY);
    }
    let gamma = (1.0 - a) / (2.0 * a);
    let sg = sigma.spectrum().map(|l| if l > TOL_SUPPORT { l.powf(gamma) } else { 0.0 });
    let m = &sg * rho.matrix() * &sg;
    let (vals, _) = eigh_raw(&m);
    // roundoff eigenvalues would contribute ε^α, which is large for α < 1
    let floor = TOL_ROUNDOFF * vals.iter().fold(0.0_f64, |acc, &l| acc.max(l));
    let q: f64 = vals.iter().filter(|&&l| l > floor).map(|&l| l.powf(a)).sum();
    Ok(q.ln() / (a - 1.0))
}

/// `f^{(m)}(c)/m!` for `f(x) = x^n ln x`, `m < n`.
fn xnlogx_taylor(n: usize, m: usize, c: f64) -> f64 {
    if c <= 0.0 {
        return 0.0;
    }
    let harmonic = |k: usize| (1..=k).map(|i| 1.0 / i as f64).sum::<f64>();
    let binom = (0..m).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64);
    binom * c.powi((n - m) as i32) * (c.ln() + harmonic(n) - harmonic(n - m))
}

/// Subentropy `q(ρ) = −Σ_j λ_j^d ln λ_j / Π_{k≠j}(λ_j − λ_k)` in nats.
///
/// Evaluated as the divided difference of `x^d ln x` over the spectrum.
/// Eigenvalues closer than `1e-3` are merged to their cluster mean and
/// handled with derivatives (confluent divided differences); since the
/// divided difference is symmetric in its nodes, merging at the mean only
/// costs second order in the cluster spread.
pub fn subentropy(rho: &DensityOperator) -> f64 {
    let mut nodes: Vec<f64> = rho.eigenvalues().iter().map(|l| l.max(0.0)).collect();
    nodes.sort_by(|a, b| a.total_cmp(b));
    let d = nodes.len();
    // cluster consecutive nodes and replace by the cluster mean
    let mut start = 0;
    while start < d {
        let mut end = start + 1;
        while end < d && nodes[end] - nodes[end - 1] <= 1e-3 {
            end += 1;
        }
        let mean = nodes[start..end].iter().sum::<f64>() / (end - start) as f64;
        let mean = if nodes[start] == 0.0 && end - start > 1 && mean < 1e-3 { 0.0 } else { mean };
        for v in &mut nodes[start..end] {
            *v = mean;
        }
        start = end;
    }
    -confluent_divided_difference(&nodes, |m, c| xnlogx_taylor(d, m, c))
}

/// Divided difference over sorted nodes where equal nodes are adjacent;
/// `taylor(m, c)` supplies `f^{(m)}(c)/m!`.
fn confluent_divided_difference<F: Fn(usize, f64) -> f64>(nodes: &[f64], taylor: F) -> f64 {
    let n = nodes.len();
    let mut table: Vec<f64> = nodes.iter().map(|&c| taylor(0, c)).collect();
    for order in 1..n {
        for i in 0..n - order {
            let j = i + order;
            table[i] = if nodes[j] == nodes[i] {
                taylor(order, nodes[i])
            } else {
                (table[i + 1] - table[i]) / (nodes[j] - nodes[i])
            };
        }
    }
    table[0]
}

/// Von Neumann entropy of a positive semidefinite matrix normalized by its trace.
pub(crate) fn entropy_of_psd(m: &ComplexMatrix) -> f64 {
    let (vals, _) = eigh_raw(m);
    let t: f64 = vals.iter().map(|l| l.max(0.0)).sum();
    if t <= 0.0 {
        return 0.0;
    }
    -vals.iter().map(|l| l.max(0.0) / t).filter(|&p| p > 0.0).map(|p| p * p.ln()).sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matops::diag_real;
    use std::f64::consts::LN_2;

    fn pv(v: &[f64]) -> ProbabilityVector {
        ProbabilityVector::new(v.to_vec()).unwrap()
    }

    #[test]
    fn renyi_examples() {
        let u = ProbabilityVector::uniform(5);
        for a in [0.0, 0.5, 1.0, 2.0, 7.0, f64::INFINITY] {
            assert!((renyi_entropy(&u, RenyiOrder::new(a).unwrap()) - 5f64.ln()).abs() < 1e-12);
            assert!(renyi_entropy(&pv(&[0.0, 1.0, 0.0]), RenyiOrder::new(a).unwrap()).abs() < 1e-12);
        }
        let h2 = renyi_entropy(&pv(&[0.75, 0.25]), RenyiOrder::new(2.0).unwrap());
        assert!((h2 + (5.0f64 / 8.0).ln()).abs() < 1e-12);
        assert!(RenyiOrder::new(-1.0).is_err());
    }

    #[test]
    fn conjugate_orders() {
        assert_eq!(RenyiOrder::ONE.conjugate(), Some(RenyiOrder::ONE));
        assert_eq!(RenyiOrder::HALF.conjugate(), Some(RenyiOrder::INFINITY));
        assert_eq!(RenyiOrder::new(2.0).unwrap().conjugate().unwrap().value(), 2.0 / 3.0);
        assert_eq!(RenyiOrder::new(0.3).unwrap().conjugate(), None);
    }

    #[test]
    fn probability_vector_validation() {
        assert!(ProbabilityVector::new(vec![0.5, 0.5 + 1e-6]).is_err());
        assert!(ProbabilityVector::new(vec![1.0 + 1e-13, -1e-13]).is_ok());
        assert!(ProbabilityVector::new(vec![1.1, -0.1]).is_err());
    }

    #[test]
    fn von_neumann_examples() {
        assert!(von_neumann_entropy(&DensityOperator::basis(3, 1).unwrap()).abs() < 1e-12);
        assert!((von_neumann_entropy(&DensityOperator::maximally_mixed(2)) - LN_2).abs() < 1e-12);
    }

    #[test]
    fn relative_entropy_examples() {
        let rho = DensityOperator::from_bloch([0.3, -0.2, 0.5]).unwrap();
        assert!(relative_entropy(&rho, &rho).unwrap().abs() < 1e-12);
        let p = DensityOperator::new(diag_real(&[1.0, 0.0])).unwrap();
        let half = DensityOperator::maximally_mixed(2);
        assert!((relative_entropy(&p, &half).unwrap() - LN_2).abs() < 1e-12);
        let q = DensityOperator::new(diag_real(&[0.0, 1.0])).unwrap();
        assert_eq!(relative_entropy(&p, &q).unwrap(), f64::INFINITY);
    }

    #[test]
    fn sandwiched_examples() {
        let rho = DensityOperator::from_bloch([0.3, -0.2, 0.5]).unwrap();
        for a in [0.5, 0.7, 1.0, 2.0, 5.0] {
            assert!(sandwiched_divergence(&rho, &rho, RenyiOrder::new(a).unwrap()).unwrap().abs() < 1e-10);
        }
        let p = DensityOperator::new(diag_real(&[1.0, 0.0])).unwrap();
        let half = DensityOperator::maximally_mixed(2);
        let d2 = sandwiched_divergence(&p, &half, RenyiOrder::new(2.0).unwrap()).unwrap();
        assert!((d2 - LN_2).abs() < 1e-12);
        let x = DensityOperator::from_bloch([0.5, 0.0, 0.0]).unwrap();
        let d = sandwiched_divergence(&x, &half, RenyiOrder::new(2.0).unwrap()).unwrap();
        assert!((d - 1.25f64.ln()).abs() < 1e-12);
        assert!(sandwiched_divergence(&x, &half, RenyiOrder::new(0.4).unwrap()).is_err());
        assert!(sandwiched_divergence(&x, &half, RenyiOrder::INFINITY).is_err());
    }

    #[test]
    fn sandwiched_support_conventions() {
        let p = DensityOperator::new(diag_real(&[1.0, 0.0])).unwrap();
        let q = DensityOperator::new(diag_real(&[0.0, 1.0])).unwrap();
        let plus = DensityOperator::from_bloch([1.0, 0.0, 0.0]).unwrap();
        let a2 = RenyiOrder::new(2.0).unwrap();
        let a07 = RenyiOrder::new(0.7).unwrap();
        assert_eq!(sandwiched_divergence(&plus, &p, a2).unwrap(), f64::INFINITY);
        assert!(sandwiched_divergence(&plus, &p, a07).unwrap().is_finite());
        assert_eq!(sandwiched_divergence(&q, &p, a07).unwrap(), f64::INFINITY);
    }

    #[test]
    fn subentropy_examples() {
        assert!(subentropy(&DensityOperator::basis(2, 0).unwrap()).abs() < 1e-12);
        let q = subentropy(&DensityOperator::maximally_mixed(2));
        assert!((q - (LN_2 - 0.5)).abs() < 1e-9);
        // ln d − Σ_{k=2}^d 1/k
        for d in 2..=5usize {
            let q = subentropy(&DensityOperator::maximally_mixed(d));
            let closed = (d as f64).ln() - (2..=d).map(|k| 1.0 / k as f64).sum::<f64>();
            assert!((q - closed).abs() < 1e-9, "d={d}: {q} vs {closed}");
        }
        let r = DensityOperator::new(diag_real(&[0.7, 0.3])).unwrap();
        let direct = -(0.49 * 0.7f64.ln() - 0.09 * 0.3f64.ln()) / 0.4;
        assert!((subentropy(&r) - direct).abs() < 1e-12);
    }
}
