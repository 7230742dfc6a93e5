//! Oracles shared by the integration suites. Everything here is computed
//! independently of the library's own routines for the same quantity.

#![allow(dead_code)]

use std::io::Write;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use qdecomp::matops::ComplexMatrix;
use qdecomp::quantum::random::{ginibre, InstanceRng};
use qdecomp::quantum::{DensityOperator, KrausChannel};

/// Prints past the test harness's capture so the line shows up in logs.
pub fn report(line: &str) {
    let mut e = std::io::stderr().lock();
    let _ = writeln!(e, "{line}");
}

fn herm_eig(m: &ComplexMatrix) -> (Vec<f64>, ComplexMatrix) {
    let h = (m + m.adjoint()).scale(0.5);
    let e = h.symmetric_eigen();
    (e.eigenvalues.iter().copied().collect(), e.eigenvectors)
}

fn herm_fn(m: &ComplexMatrix, f: impl Fn(f64) -> f64) -> ComplexMatrix {
    let (vals, vecs) = herm_eig(m);
    let floor = 1e-14 * vals.iter().fold(0.0_f64, |a, &l| a.max(l));
    let d = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        vals.len(),
        vals.iter().map(|&l| Complex64::new(if l > floor { f(l) } else { 0.0 }, 0.0)),
    ));
    &vecs * d * vecs.adjoint()
}

/// `tr √(√ρ σ √ρ)`
pub fn root_fidelity(rho: &ComplexMatrix, sigma: &ComplexMatrix) -> f64 {
    let s = herm_fn(rho, f64::sqrt);
    let vals = herm_eig(&(&s * sigma * &s)).0;
    let floor = 1e-14 * vals.iter().fold(0.0_f64, |a, &l| a.max(l));
    vals.iter().filter(|&&l| l > floor).map(|l| l.sqrt()).sum()
}

/// `e^{−iθA}` for Hermitian `A`.
pub fn unitary(a: &ComplexMatrix, theta: f64) -> ComplexMatrix {
    let (vals, vecs) = herm_eig(a);
    let d = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        vals.len(),
        vals.iter().map(|&l| Complex64::from_polar(1.0, -theta * l)),
    ));
    &vecs * d * vecs.adjoint()
}

/// SLD Fisher information along `e^{−iθA}ρe^{iθA}` from the fidelity:
/// `F_Q ≈ 8(1 − f(θ))/θ²`.
pub fn fd_qfi(a: &ComplexMatrix, rho: &ComplexMatrix, theta: f64) -> f64 {
    let u = unitary(a, theta);
    let moved = &u * rho * u.adjoint();
    8.0 * (1.0 - root_fidelity(rho, &moved)) / (theta * theta)
}

/// `⟨ψ|A²|ψ⟩ − ⟨ψ|A|ψ⟩²` for a normalized column.
fn variance(a: &ComplexMatrix, psi: &ComplexMatrix) -> f64 {
    let m1 = (psi.adjoint() * a * psi)[(0, 0)].re;
    let m2 = (psi.adjoint() * a * a * psi)[(0, 0)].re;
    m2 - m1 * m1
}

/// Average variance of `A` over a random pure-state decomposition of `ρ`.
///
/// With `ρ = Σ λ_j |e_j⟩⟨e_j|`, the unnormalized members are
/// `|ψ̃_k⟩ = Σ_j U_kj √λ_j |e_j⟩` for a `K × r` isometry `U`; every
/// decomposition of size `K` arises this way.
pub fn sample_decomposition_average(a: &ComplexMatrix, rho: &ComplexMatrix, rng: &mut InstanceRng) -> f64 {
    let (vals, vecs) = herm_eig(rho);
    let support: Vec<usize> = (0..vals.len()).filter(|&j| vals[j] > 1e-12).collect();
    let r = support.len();
    let k = rng.random_range(r..=2 * rho.nrows());
    let g = ginibre(rng, k, r);
    let q = g.qr().q();
    let mut avg = 0.0;
    for row in 0..k {
        let mut v = ComplexMatrix::zeros(rho.nrows(), 1);
        for (c, &j) in support.iter().enumerate() {
            let coef = q[(row, c)] * vals[j].sqrt();
            for i in 0..rho.nrows() {
                v[(i, 0)] += coef * vecs[(i, j)];
            }
        }
        let w = v.norm_squared();
        if w > 1e-15 {
            avg += w * variance(a, &v.unscale(w.sqrt()));
        }
    }
    avg
}

/// Channel `d_in → d_out` with `k` Kraus operators from a random isometry.
pub fn random_channel(rng: &mut InstanceRng, d_in: usize, d_out: usize, k: usize) -> KrausChannel {
    let g = ginibre(rng, k * d_out, d_in);
    let gram = g.adjoint() * &g;
    let v = &g * herm_fn(&gram, |l| 1.0 / l.sqrt());
    let kraus = (0..k).map(|i| v.rows(i * d_out, d_out).into_owned()).collect();
    KrausChannel::new(kraus).expect("isometry blocks form a channel")
}

/// Full-rank random state, mixed with the identity so it stays well
/// conditioned.
pub fn full_rank_state(rng: &mut InstanceRng, d: usize) -> DensityOperator {
    let g = ginibre(rng, d, d);
    let mut m = &g * g.adjoint();
    let t = m.trace().re;
    m.unscale_mut(t);
    let eps: f64 = 0.05 + 0.1 * rng.sample::<f64, _>(StandardNormal).abs().min(1.0);
    let id = ComplexMatrix::identity(d, d).unscale(d as f64);
    DensityOperator::new(m.scale(1.0 - eps) + id.scale(eps)).unwrap()
}

/// Binary entropy in nats.
pub fn h2(p: f64) -> f64 {
    [p, 1.0 - p].iter().filter(|&&q| q > 0.0).map(|q| -q * q.ln()).sum()
}

pub mod props;
