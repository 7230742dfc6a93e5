//! Brute-force reference for small instances: a full grid over a cube
//! chart of the reduced feasible set, then Nelder–Mead from the best node.
//!
//! The chart maps `u ∈ [0,1]^P` to `⊕_x w_x τ_x` with stick-breaking
//! weights `w` and, for each two-dimensional block, a Bloch-ball state
//! `τ_x`. Larger blocks are not charted. Values are computed with
//! [`sandwiched_divergence`](crate::entropy::sandwiched_divergence), not
//! the optimizer's objective.

use std::f64::consts::PI;

use crate::entropy::{sandwiched_divergence, RenyiOrder};
use crate::error::{Error, Result};
use crate::matops::{self, c64, ComplexMatrix};
use crate::quantum::{naimark_extend, DensityOperator, Observable};

use super::{block_problem, check_dims, Space};

/// Largest number of chart parameters the oracle accepts.
pub const ORACLE_MAX_PARAMS: usize = 6;
const MAX_GRID_POINTS: f64 = 4e6;

struct CubeChart {
    sizes: Vec<usize>,
}

impl CubeChart {
    fn num_params(&self) -> usize {
        self.sizes.len() - 1 + 3 * self.sizes.iter().filter(|&&r| r == 2).count()
    }

    fn sigma(&self, u: &[f64]) -> ComplexMatrix {
        let n = self.sizes.len();
        let mut weights = Vec::with_capacity(n);
        let mut rest = 1.0;
        for &ui in &u[..n - 1] {
            weights.push(rest * ui);
            rest *= 1.0 - ui;
        }
        weights.push(rest);
        let m: usize = self.sizes.iter().sum();
        let mut s = matops::zeros(m, m);
        let mut at = 0;
        let mut k = n - 1;
        for (&r, &w) in self.sizes.iter().zip(&weights) {
            if r == 1 {
                s[(at, at)] = c64(w, 0.0);
            } else {
                let (rad, ct, ph) = (u[k], 2.0 * u[k + 1] - 1.0, 2.0 * PI * u[k + 2]);
                k += 3;
                let st = (1.0 - ct * ct).max(0.0).sqrt();
                let (bx, by, bz) = (rad * st * ph.cos(), rad * st * ph.sin(), rad * ct);
                s[(at, at)] = c64(w * (1.0 + bz) / 2.0, 0.0);
                s[(at + 1, at + 1)] = c64(w * (1.0 - bz) / 2.0, 0.0);
                s[(at, at + 1)] = c64(w * bx / 2.0, -w * by / 2.0);
                s[(at + 1, at)] = c64(w * bx / 2.0, w * by / 2.0);
            }
            at += r;
        }
        s
    }
}

/// Grid-plus-refinement estimate of `Q_α(X|ρ)` in nats, with `steps`
/// grid intervals per chart axis.
///
/// Works on the same reduced problem as the optimizer (extended space for
/// nonprojective `X`) and fails with [`Error::Unsupported`] when a block
/// exceeds two dimensions or the chart needs more than
/// [`ORACLE_MAX_PARAMS`] parameters.
pub fn oracle_asymmetry(x: &Observable, rho: &DensityOperator, alpha: RenyiOrder, steps: usize) -> Result<f64> {
    alpha.require_finite_half_line()?;
    check_dims(x, rho)?;
    if steps < 1 {
        return Err(Error::Invalid("oracle needs at least one grid step".into()));
    }
    let bp = if x.is_projective() {
        let projs: Vec<ComplexMatrix> = x.effects().iter().map(|e| e.matrix().clone()).collect();
        block_problem(rho.matrix(), &projs, Space::System { dim: x.dim() })
    } else {
        let dil = naimark_extend(x);
        let rho_t = dil.embed(rho)?;
        let space = Space::Extended { dim: dil.extended_dim(), dilation: dil.kind() };
        block_problem(rho_t.matrix(), dil.extended_effects(), space)
    };
    if let Some(&r) = bp.sizes.iter().find(|&&r| r > 2) {
        return Err(Error::Unsupported(format!("oracle chart covers blocks up to dimension 2, found {r}")));
    }
    let chart = CubeChart { sizes: bp.sizes.clone() };
    let np = chart.num_params();
    if np > ORACLE_MAX_PARAMS {
        return Err(Error::Unsupported(format!(
            "oracle chart needs {np} parameters, limit is {ORACLE_MAX_PARAMS}"
        )));
    }
    let rho_r = DensityOperator::from_matrix_lenient(bp.rho_r.clone())?;
    let eval = |u: &[f64]| -> f64 {
        let clamped: Vec<f64> = u.iter().map(|v| v.clamp(0.0, 1.0)).collect();
        match DensityOperator::from_matrix_lenient(chart.sigma(&clamped)) {
            Ok(s) => sandwiched_divergence(&rho_r, &s, alpha).unwrap_or(f64::INFINITY),
            Err(_) => f64::INFINITY,
        }
    };
    if np == 0 {
        return Ok(eval(&[]));
    }
    let nodes = (steps + 1) as f64;
    if nodes.powi(np as i32) > MAX_GRID_POINTS {
        return Err(Error::Unsupported(format!("grid of {}^{np} points is too large", steps + 1)));
    }

    let mut best_u = vec![0.0; np];
    let mut best = f64::INFINITY;
    let mut idx = vec![0usize; np];
    loop {
        let u: Vec<f64> = idx.iter().map(|&i| i as f64 / steps as f64).collect();
        let v = eval(&u);
        if v < best {
            best = v;
            best_u = u;
        }
        let mut k = 0;
        while k < np {
            idx[k] += 1;
            if idx[k] <= steps {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
        if k == np {
            break;
        }
    }

    let h = 1.0 / steps as f64;
    for _ in 0..4 {
        let (u, v) = nelder_mead(&eval, &best_u, h, 20_000);
        if v < best {
            best = v;
            best_u = u;
        }
    }
    Ok(best)
}

/// Minimizes `f` from `start` with an initial simplex of edge `h`.
fn nelder_mead<F: Fn(&[f64]) -> f64>(f: &F, start: &[f64], h: f64, max_evals: usize) -> (Vec<f64>, f64) {
    let n = start.len();
    let mut pts: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    pts.push((start.to_vec(), f(start)));
    for k in 0..n {
        let mut p = start.to_vec();
        p[k] = if p[k] + h <= 1.0 { p[k] + h } else { p[k] - h };
        let v = f(&p);
        pts.push((p, v));
    }
    let mut evals = n + 1;
    let lerp = |a: &[f64], b: &[f64], t: f64| -> Vec<f64> { a.iter().zip(b).map(|(x, y)| x + t * (y - x)).collect() };
    while evals < max_evals {
        pts.sort_by(|a, b| a.1.total_cmp(&b.1));
        let spread = pts[n].1 - pts[0].1;
        let size = pts[1..].iter().map(|(p, _)| p.iter().zip(&pts[0].0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)).fold(0.0, f64::max);
        if (spread.is_finite() && spread < 1e-14) && size < 1e-10 {
            break;
        }
        let centroid: Vec<f64> = (0..n).map(|i| pts[..n].iter().map(|(p, _)| p[i]).sum::<f64>() / n as f64).collect();
        let worst = pts[n].clone();
        let refl = lerp(&centroid, &worst.0, -1.0);
        let fr = f(&refl);
        evals += 1;
        if fr < pts[0].1 {
            let exp = lerp(&centroid, &worst.0, -2.0);
            let fe = f(&exp);
            evals += 1;
            pts[n] = if fe < fr { (exp, fe) } else { (refl, fr) };
        } else if fr < pts[n - 1].1 {
            pts[n] = (refl, fr);
        } else {
            let (target, ft) = if fr < worst.1 { (refl, fr) } else { (worst.0.clone(), worst.1) };
            let con = lerp(&centroid, &target, 0.5);
            let fc = f(&con);
            evals += 1;
            if fc < ft {
                pts[n] = (con, fc);
            } else {
                let best = pts[0].0.clone();
                for p in pts.iter_mut().skip(1) {
                    let q = lerp(&best, &p.0, 0.5);
                    p.1 = f(&q);
                    p.0 = q;
                    evals += 1;
                }
            }
        }
    }
    pts.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (mut u, v) = pts.swap_remove(0);
    u.iter_mut().for_each(|x| *x = x.clamp(0.0, 1.0));
    (u, v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::renyi_entropy;
    use crate::matops::diag_real;
    use crate::quantum::measure_probabilities;

    #[test]
    fn commuting_case_is_zero() {
        let rho = DensityOperator::new(diag_real(&[0.3, 0.7])).unwrap();
        let v = oracle_asymmetry(&Observable::pauli_z(), &rho, RenyiOrder::new(2.0).unwrap(), 50).unwrap();
        assert!(v.abs() < 1e-9);
    }

    #[test]
    fn pure_state_gives_conjugate_entropy() {
        let psi = DensityOperator::from_bloch([0.6, 0.0, 0.8]).unwrap();
        let t = Observable::trine();
        let a = RenyiOrder::new(2.0).unwrap();
        let v = oracle_asymmetry(&t, &psi, a, 40).unwrap();
        let h = renyi_entropy(&measure_probabilities(&psi, &t).unwrap(), a.conjugate().unwrap());
        assert!((v - h).abs() < 1e-7, "{v} vs {h}");
    }

    #[test]
    fn two_resolutions_agree() {
        let rho = DensityOperator::from_bloch([0.6, 0.0, 0.2]).unwrap();
        let a = RenyiOrder::new(2.0).unwrap();
        let coarse = oracle_asymmetry(&Observable::pauli_z(), &rho, a, 10).unwrap();
        let fine = oracle_asymmetry(&Observable::pauli_z(), &rho, a, 200).unwrap();
        assert!((coarse - fine).abs() < 1e-8);
    }

    #[test]
    fn large_charts_are_unsupported() {
        let rho = crate::quantum::random::random_state(3, 3, 1).unwrap();
        let x = Observable::from_basis("b", &matops::identity(3)).unwrap();
        // three 1-d blocks: two weights only
        assert!(oracle_asymmetry(&x, &rho, RenyiOrder::ONE, 30).is_ok());
        let z = Observable::trivial(3);
        assert!(matches!(oracle_asymmetry(&z, &rho, RenyiOrder::ONE, 5), Err(Error::Unsupported(_))));
    }
}
