//! Limited-memory BFGS with Armijo backtracking.
//!
//! The charts are scale invariant (`σ(cx) = σ(x)`), so the iterate is
//! rescaled to unit norm whenever it drifts far from it; the curvature
//! memory is dropped at that point since gradients scale as `1/|x|`.

use std::collections::VecDeque;

const MEMORY: usize = 10;
const ARMIJO: f64 = 1e-4;
/// Consecutive small decreases needed to declare convergence.
const STALL: usize = 3;

pub(crate) struct Outcome {
    pub x: Vec<f64>,
    pub f: f64,
    pub converged: bool,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// With `scale_invariant` the iterate is kept near the unit sphere.
pub(crate) fn minimize<F>(mut f: F, x0: Vec<f64>, max_iters: usize, tol: f64, scale_invariant: bool) -> Outcome
where
    F: FnMut(&[f64]) -> (f64, Vec<f64>),
{
    let mut x = x0;
    let nx = norm(&x);
    if scale_invariant && nx > 0.0 {
        x.iter_mut().for_each(|v| *v /= nx);
    }
    let (mut fx, mut g) = f(&x);
    let mut mem: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::with_capacity(MEMORY);
    let mut stall = 0;
    let mut just_reset = true;
    for _ in 0..max_iters {
        if !fx.is_finite() {
            return Outcome { x, f: fx, converged: false };
        }
        if norm(&g) * norm(&x) < 1e-13 {
            return Outcome { x, f: fx, converged: true };
        }

        // two-loop recursion
        let mut q = g.clone();
        let mut alphas = Vec::with_capacity(mem.len());
        for (s, y, rho) in mem.iter().rev() {
            let a = rho * dot(s, &q);
            q.iter_mut().zip(y).for_each(|(qi, yi)| *qi -= a * yi);
            alphas.push(a);
        }
        let gamma = match mem.back() {
            Some((s, y, _)) => dot(s, y) / dot(y, y),
            None => 1.0 / (norm(&g) * norm(&x).max(1.0)).max(1e-300) * 0.1,
        };
        q.iter_mut().for_each(|v| *v *= gamma);
        for ((s, y, rho), a) in mem.iter().zip(alphas.iter().rev()) {
            let b = rho * dot(y, &q);
            q.iter_mut().zip(s).for_each(|(qi, si)| *qi += (a - b) * si);
        }
        let mut d: Vec<f64> = q.iter().map(|v| -v).collect();
        let mut slope = dot(&g, &d);
        if !(slope < 0.0) {
            mem.clear();
            d = g.iter().map(|v| -v * 0.1 / norm(&g)).collect();
            slope = dot(&g, &d);
        }

        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..60 {
            let xn: Vec<f64> = x.iter().zip(&d).map(|(a, b)| a + step * b).collect();
            let (fn_, gn) = f(&xn);
            if fn_.is_finite() && fn_ <= fx + ARMIJO * step * slope {
                accepted = Some((xn, fn_, gn));
                break;
            }
            step *= 0.5;
        }
        let Some((xn, fn_, gn)) = accepted else {
            if just_reset {
                // no descent even along the scaled gradient: numerically stationary
                return Outcome { x, f: fx, converged: true };
            }
            mem.clear();
            just_reset = true;
            continue;
        };
        just_reset = false;

        let s: Vec<f64> = xn.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = gn.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-12 * norm(&s) * norm(&y) {
            if mem.len() == MEMORY {
                mem.pop_front();
            }
            mem.push_back((s, y, 1.0 / sy));
        }
        let decrease = fx - fn_;
        x = xn;
        fx = fn_;
        g = gn;

        if decrease <= tol * (1.0 + fx.abs()) {
            stall += 1;
            if stall >= STALL {
                return Outcome { x, f: fx, converged: true };
            }
        } else {
            stall = 0;
        }

        let nx = norm(&x);
        if scale_invariant && !(0.1..=10.0).contains(&nx) {
            x.iter_mut().for_each(|v| *v /= nx);
            g.iter_mut().for_each(|v| *v *= nx);
            mem.clear();
            just_reset = true;
        }
    }
    Outcome { x, f: fx, converged: false }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rosenbrock() {
        let f = |x: &[f64]| {
            let (a, b) = (x[0], x[1]);
            let v = (1.0 - a).powi(2) + 100.0 * (b - a * a).powi(2);
            let g = vec![-2.0 * (1.0 - a) - 400.0 * a * (b - a * a), 200.0 * (b - a * a)];
            (v, g)
        };
        let out = minimize(f, vec![-1.2, 1.0], 5000, 1e-15, false);
        assert!(out.converged);
        assert!((out.x[0] - 1.0).abs() < 1e-5 && (out.x[1] - 1.0).abs() < 1e-5, "{:?}", out.x);
    }
}
