//! Library quantities against independent numerical oracles.

mod common;

use qdecomp::decompose::{decompose_covariance_sld, decompose_variance_skew, q_variance_roof};
use qdecomp::entropy::{sandwiched_divergence, von_neumann_entropy, RenyiOrder};
use qdecomp::quantum::random::{random_basis_observable_with, random_projective_with, random_state_with, rng_from_seed};
use qdecomp::quantum::{DensityOperator, Observable};

#[test]
fn sld_roof_matches_finite_difference_fisher_information() {
    let rho = DensityOperator::from_bloch([0.0, 0.0, 0.5]).unwrap();
    let xs = [Observable::pauli_x(), Observable::pauli_z()];
    let rep = decompose_covariance_sld(&xs, &rho).unwrap();
    for (j, x) in xs.iter().enumerate() {
        let fq = common::fd_qfi(&x.moment(1).unwrap(), rho.matrix(), 1e-4);
        assert!((rep.q[j][j] - fq / 4.0).abs() < 1e-6, "{} vs {}", rep.q[j][j], fq / 4.0);
    }
    // σ_x generates rotations off the Bloch axis: F_Q = r² = 1/4
    assert!((rep.q[0][0] - 0.25).abs() < 1e-12);
    assert!(rep.q[1][1].abs() < 1e-12);

    for seed in 0..20 {
        let mut rng = rng_from_seed(seed);
        let d = 2 + seed as usize % 3;
        let rank = 1 + seed as usize % d;
        let rho = random_state_with(&mut rng, d, rank).unwrap();
        let b = 1 + seed as usize % d;
        let x = random_projective_with(&mut rng, d, b).unwrap();
        let q = q_variance_roof(&x, &rho).unwrap();
        let fq = common::fd_qfi(&x.moment(1).unwrap(), rho.matrix(), 1e-4);
        assert!((q - fq / 4.0).abs() < 1e-5 * (1.0 + q), "seed {seed}: {q} vs {}", fq / 4.0);
    }
}

#[test]
fn qubit_closed_forms() {
    for r in [0.0, 0.25, 0.6, 0.95] {
        let rho = DensityOperator::from_bloch([0.0, 0.0, r]).unwrap();
        assert!((von_neumann_entropy(&rho) - common::h2((1.0 + r) / 2.0)).abs() < 1e-12);
        // skew information of σ_x on a z-polarized state: 1 − √(1 − r²)
        let rep = decompose_variance_skew(&Observable::pauli_x(), &rho).unwrap();
        assert!((rep.q - (1.0 - (1.0 - r * r).sqrt())).abs() < 1e-12);
    }
    // D_α(ρ‖𝟙/2) = ln 2 − H_α(ρ) for commuting inputs
    let rho = DensityOperator::from_bloch([0.0, 0.0, 0.6]).unwrap();
    let mixed = DensityOperator::maximally_mixed(2);
    for a in [0.5, 0.8, 2.0, 3.0] {
        let p: [f64; 2] = [0.8, 0.2];
        let h_a = (p[0].powf(a) + p[1].powf(a)).ln() / (1.0 - a);
        let d = sandwiched_divergence(&rho, &mixed, RenyiOrder::new(a).unwrap()).unwrap();
        assert!((d - (2f64.ln() - h_a)).abs() < 1e-12);
    }
}

#[test]
fn roof_never_exceeds_sampled_decompositions() {
    let mut rng = rng_from_seed(99);
    for d in [2, 3] {
        let rho = random_state_with(&mut rng, d, d).unwrap();
        let x = random_basis_observable_with(&mut rng, d).unwrap();
        let qv = q_variance_roof(&x, &rho).unwrap();
        let a = x.moment(1).unwrap();
        for _ in 0..2000 {
            assert!(common::sample_decomposition_average(&a, rho.matrix(), &mut rng) >= qv - 1e-10);
        }
    }
}
