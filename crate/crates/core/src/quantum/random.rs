//! Seeded random instances.
//!
//! States are `GG†/tr(GG†)` with `G` a `dim × rank` matrix of independent
//! standard complex Gaussians. POVM effects are `S^{-1/2} A_i A_i† S^{-1/2}`
//! with `S = Σ A_i A_i†` and Gaussian `A_i`. Every generator draws from a
//! ChaCha8 stream so results are reproducible across platforms.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::matops::{self, c64, eigh_raw, spectral_sum, ComplexMatrix, ComplexVector};

use super::observable::Observable;
use super::state::DensityOperator;

pub type InstanceRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> InstanceRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn ginibre<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        c64(re * s, im * s)
    })
}

pub fn random_state_with<R: Rng + ?Sized>(rng: &mut R, dim: usize, rank: usize) -> Result<DensityOperator> {
    if dim == 0 || rank == 0 || rank > dim {
        return Err(Error::Invalid(format!("need 1 ≤ rank ≤ dim, got rank {rank}, dim {dim}")));
    }
    let g = ginibre(rng, dim, rank);
    DensityOperator::from_unnormalized(&g * g.adjoint())
}

pub fn random_state(dim: usize, rank: usize, seed: u64) -> Result<DensityOperator> {
    random_state_with(&mut rng_from_seed(seed), dim, rank)
}

pub fn random_pure_vector<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexVector {
    let g = ginibre(rng, dim, 1);
    let v = ComplexVector::from_iterator(dim, g.iter().cloned());
    let n = v.norm();
    v.unscale(n)
}

/// Haar unitary: QR of a Ginibre matrix with the phases of `diag(R)` removed.
pub fn random_unitary_with<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix {
    let qr = ginibre(rng, dim, dim).qr();
    let (mut q, r) = qr.unpack();
    for j in 0..dim {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 { rjj / rjj.norm() } else { c64(1.0, 0.0) };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    q
}

pub fn random_unitary(dim: usize, seed: u64) -> ComplexMatrix {
    random_unitary_with(&mut rng_from_seed(seed), dim)
}

fn normalize_effects(raw: Vec<ComplexMatrix>, dim: usize) -> Vec<ComplexMatrix> {
    let mut sum = matops::zeros(dim, dim);
    for a in &raw {
        sum += a;
    }
    let (vals, vecs) = eigh_raw(&sum);
    let inv_root: Vec<f64> = vals.iter().map(|l| 1.0 / l.sqrt()).collect();
    let s = spectral_sum(&vecs, &inv_root);
    raw.iter().map(|a| matops::hermitian_part(&(&s * a * &s))).collect()
}

pub fn random_povm_with<R: Rng + ?Sized>(rng: &mut R, dim: usize, outcomes: usize) -> Result<Observable> {
    if dim == 0 || outcomes == 0 {
        return Err(Error::Invalid("POVM needs dim ≥ 1 and at least one outcome".into()));
    }
    if outcomes == 1 {
        return Ok(Observable::trivial(dim).with_label("random_povm"));
    }
    let raw = (0..outcomes)
        .map(|_| {
            let a = ginibre(rng, dim, dim);
            &a * a.adjoint()
        })
        .collect();
    Observable::new("random_povm", normalize_effects(raw, dim), None)
}

pub fn random_povm(dim: usize, outcomes: usize, seed: u64) -> Result<Observable> {
    random_povm_with(&mut rng_from_seed(seed), dim, outcomes)
}

/// POVM with rank-one effects; needs `outcomes ≥ dim`.
pub fn random_rank_one_povm_with<R: Rng + ?Sized>(rng: &mut R, dim: usize, outcomes: usize) -> Result<Observable> {
    if outcomes < dim {
        return Err(Error::Invalid(format!("{outcomes} rank-one effects cannot resolve dim {dim}")));
    }
    let raw = (0..outcomes)
        .map(|_| {
            let g = ginibre(rng, dim, 1);
            &g * g.adjoint()
        })
        .collect();
    Observable::new("random_rank_one_povm", normalize_effects(raw, dim), None)
}

/// Projective observable: a Haar basis grouped into `blocks` consecutive
/// clusters, with Gaussian outcome values.
pub fn random_projective_with<R: Rng + ?Sized>(rng: &mut R, dim: usize, blocks: usize) -> Result<Observable> {
    if blocks == 0 || blocks > dim {
        return Err(Error::Invalid(format!("need 1 ≤ blocks ≤ dim, got {blocks}")));
    }
    let u = random_unitary_with(rng, dim);
    // block sizes: one vector each, remainder assigned at random
    let mut sizes = vec![1usize; blocks];
    for _ in blocks..dim {
        let k = rng.random_range(0..blocks);
        sizes[k] += 1;
    }
    let mut effects = Vec::with_capacity(blocks);
    let mut col = 0;
    for &s in &sizes {
        let mut p = matops::zeros(dim, dim);
        for c in col..col + s {
            let v = u.column(c);
            p += v * v.adjoint();
        }
        col += s;
        effects.push(p);
    }
    let values = (0..blocks).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
    Observable::new("random_projective", effects, Some(values))
}

pub fn random_basis_observable_with<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Result<Observable> {
    random_projective_with(rng, dim, dim)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matops::max_abs;

    #[test]
    fn rank_one_state_is_pure() {
        let s = random_state(3, 1, 7).unwrap();
        assert!(s.is_pure());
        assert_eq!(s.rank(1e-9), 1);
    }

    #[test]
    fn reproducible_under_seed() {
        let a = random_state(4, 4, 42).unwrap();
        let b = random_state(4, 4, 42).unwrap();
        assert_eq!(a.matrix(), b.matrix());
        let c = random_state(4, 4, 43).unwrap();
        assert!(max_abs(&(a.matrix() - c.matrix())) > 1e-6);
    }

    #[test]
    fn single_outcome_povm_is_identity() {
        let x = random_povm(3, 1, 1).unwrap();
        assert_eq!(x.num_outcomes(), 1);
        assert!(max_abs(&(x.effect(0) - matops::identity(3))) == 0.0);
        assert!(random_state(2, 3, 0).is_err());
    }

    #[test]
    fn unitary_and_povm_validity() {
        let u = random_unitary(4, 3);
        assert!(max_abs(&(u.adjoint() * &u - matops::identity(4))) < 1e-12);
        let x = random_povm(3, 4, 9).unwrap();
        assert!(!x.is_projective());
        let r = random_rank_one_povm_with(&mut rng_from_seed(2), 2, 3).unwrap();
        assert!(r.is_rank_one());
        let p = random_projective_with(&mut rng_from_seed(5), 4, 2).unwrap();
        assert!(p.is_projective());
        assert_eq!(p.num_outcomes(), 2);
    }
}
