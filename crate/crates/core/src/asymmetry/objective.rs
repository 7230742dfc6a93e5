//! `σ ↦ D_α(ρ‖σ)` with its gradient, for a fixed `ρ`.
//!
//! For `α ≠ 1`, with `s = (1 − α)/α` and `R = ρ^{1/2}`, the trace term is
//! `Q = tr C^α` where `C = R σ^s R`. Its differential is `α tr[M dσ^s]` with
//! `M = R C^{α−1} R`, and `dσ^s` follows from the Daleckii–Krein formula in
//! the eigenbasis of `σ`.

use crate::matops::{eigh_raw, psd_sqrt, spectral_sum, ComplexMatrix};

/// Eigenvalues of `σ` are floored here before powers and logs.
pub(crate) const SIGMA_FLOOR: f64 = 1e-15;

pub(crate) struct Objective {
    alpha: f64,
    rho: ComplexMatrix,
    rho_sqrt: ComplexMatrix,
    /// `tr ρ ln ρ`
    neg_entropy: f64,
}

impl Objective {
    pub(crate) fn new(rho: ComplexMatrix, alpha: f64) -> Self {
        let rho_sqrt = psd_sqrt(&rho);
        let (vals, _) = eigh_raw(&rho);
        let neg_entropy = vals.iter().filter(|&&l| l > 0.0).map(|&l| l * l.ln()).sum();
        Self { alpha, rho, rho_sqrt, neg_entropy }
    }

    fn is_one(&self) -> bool {
        (self.alpha - 1.0).abs() < crate::entropy::ALPHA_ONE_TOL
    }

    /// Value, and the Hermitian gradient `H` with `dD = tr(H dσ)` if requested.
    pub(crate) fn eval(&self, sigma: &ComplexMatrix, want_grad: bool) -> (f64, Option<ComplexMatrix>) {
        let (mut lam, u) = eigh_raw(sigma);
        for l in lam.iter_mut() {
            *l = l.max(SIGMA_FLOOR);
        }
        if self.is_one() {
            self.eval_relative(&lam, &u, want_grad)
        } else {
            self.eval_sandwiched(&lam, &u, want_grad)
        }
    }

    fn eval_relative(&self, lam: &[f64], u: &ComplexMatrix, want_grad: bool) -> (f64, Option<ComplexMatrix>) {
        let rho_u = u.adjoint() * &self.rho * u;
        let cross: f64 = lam.iter().enumerate().map(|(i, l)| rho_u[(i, i)].re * l.ln()).sum();
        let value = self.neg_entropy - cross;
        if !want_grad {
            return (value, None);
        }
        let n = lam.len();
        let g = ComplexMatrix::from_fn(n, n, |i, j| rho_u[(i, j)] * (-dd_log(lam[i], lam[j])));
        (value, Some(u * g * u.adjoint()))
    }

    fn eval_sandwiched(&self, lam: &[f64], u: &ComplexMatrix, want_grad: bool) -> (f64, Option<ComplexMatrix>) {
        let a = self.alpha;
        let s = (1.0 - a) / a;
        let pw: Vec<f64> = lam.iter().map(|l| l.powf(s)).collect();
        let sigma_s = spectral_sum(u, &pw);
        let c = &self.rho_sqrt * sigma_s * &self.rho_sqrt;
        let (mu, w) = eigh_raw(&c);
        let mu_max = mu.iter().fold(0.0_f64, |m, &x| m.max(x));
        let cut = 1e-14 * mu_max.max(1e-300);
        let q: f64 = mu.iter().filter(|&&x| x > cut).map(|&x| x.powf(a)).sum();
        let value = q.ln() / (a - 1.0);
        if !want_grad {
            return (value, None);
        }
        let cp: Vec<f64> = mu.iter().map(|&x| if x > cut { x.powf(a - 1.0) } else { 0.0 }).collect();
        let m = &self.rho_sqrt * spectral_sum(&w, &cp) * &self.rho_sqrt;
        let mu_ = u.adjoint() * m * u;
        let n = lam.len();
        let scale = a / ((a - 1.0) * q);
        let g = ComplexMatrix::from_fn(n, n, |i, j| mu_[(i, j)] * (scale * dd_pow(lam[i], lam[j], s)));
        (value, Some(u * g * u.adjoint()))
    }
}

/// Divided difference of `x^s` at `a`, `b > 0`.
pub(crate) fn dd_pow(a: f64, b: f64, s: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    let r = (hi - lo) / lo;
    if r < 1e-12 {
        return s * lo.powf(s - 1.0);
    }
    lo.powf(s - 1.0) * (s * r.ln_1p()).exp_m1() / r
}

/// Divided difference of `ln x` at `a`, `b > 0`.
pub(crate) fn dd_log(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    let r = (hi - lo) / lo;
    if r < 1e-12 {
        return 1.0 / lo;
    }
    r.ln_1p() / (r * lo)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::{sandwiched_divergence, RenyiOrder};
    use crate::matops::{self, c64};
    use crate::quantum::random;

    #[test]
    fn divided_differences() {
        assert!((dd_pow(4.0, 1.0, 0.5) - 1.0 / 3.0).abs() < 1e-14);
        assert!((dd_pow(2.0, 2.0, 3.0) - 12.0).abs() < 1e-12);
        assert!((dd_pow(2.0, 2.0 + 1e-13, -0.5) - (-0.5 * 2f64.powf(-1.5))).abs() < 1e-12);
        assert!((dd_log(3.0, 1.0) - 3f64.ln() / 2.0).abs() < 1e-14);
    }

    #[test]
    fn value_matches_entropy_module() {
        let rho = random::random_state(3, 3, 1).unwrap();
        let sigma = random::random_state(3, 3, 2).unwrap();
        for a in [0.5, 0.8, 1.0, 1.7, 4.0] {
            let obj = Objective::new(rho.matrix().clone(), a);
            let (v, _) = obj.eval(sigma.matrix(), false);
            let direct = sandwiched_divergence(&rho, &sigma, RenyiOrder::new(a).unwrap()).unwrap();
            assert!((v - direct).abs() < 1e-10, "alpha {a}: {v} vs {direct}");
        }
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let rho = random::random_state(3, 2, 5).unwrap();
        let sigma = random::random_state(3, 3, 6).unwrap();
        let dir = {
            let g = random::ginibre(&mut random::rng_from_seed(7), 3, 3);
            let h = matops::hermitian_part(&g);
            let t = matops::trace(&h) / c64(3.0, 0.0);
            h - matops::identity(3) * t
        };
        for a in [0.5, 0.9, 1.0, 2.0, 3.5] {
            let obj = Objective::new(rho.matrix().clone(), a);
            let (_, g) = obj.eval(sigma.matrix(), true);
            let g = g.unwrap();
            assert!(matops::max_asymmetry(&g) < 1e-10);
            let eps = 1e-6;
            let fp = obj.eval(&(sigma.matrix() + dir.scale(eps)), false).0;
            let fm = obj.eval(&(sigma.matrix() - dir.scale(eps)), false).0;
            let fd = (fp - fm) / (2.0 * eps);
            let an = matops::trace_product_re(&g, &dir);
            assert!((fd - an).abs() < 1e-6 * (1.0 + an.abs()), "alpha {a}: fd {fd} vs analytic {an}");
        }
    }
}
