//! Property bodies, driven by proptest in `properties.rs` and by a fixed
//! seed sweep in the acceptance run. Each returns a description of the
//! first failure.

use qdecomp::asymmetry::{asymmetry_lower_bound, renyi_asymmetry, OptimizerConfig};
use qdecomp::bounds::{check_tradeoff, mu_overlap};
use qdecomp::entropy::{renyi_entropy, sandwiched_divergence, RenyiOrder};
use qdecomp::quantum::measure_probabilities;
use qdecomp::quantum::random::{random_povm_with, random_rank_one_povm_with, random_state_with, rng_from_seed};
use rand::Rng;

use super::{full_rank_state, random_channel};

pub type Check = Result<(), String>;

/// `D_α(Φ(ρ)‖Φ(σ)) ≤ D_α(ρ‖σ)` for a random channel `Φ`.
pub fn data_processing(seed: u64, alpha: f64) -> Check {
    let mut rng = rng_from_seed(seed);
    let d_in: usize = rng.random_range(2..=4);
    let d_out = rng.random_range(2..=4);
    let k = rng.random_range(1..=3).max(d_in.div_ceil(d_out));
    let a = RenyiOrder::new(alpha).map_err(|e| e.to_string())?;
    let rank = rng.random_range(1..=d_in);
    let rho = random_state_with(&mut rng, d_in, rank).unwrap();
    let sigma = full_rank_state(&mut rng, d_in);
    let phi = random_channel(&mut rng, d_in, d_out, k);
    let before = sandwiched_divergence(&rho, &sigma, a).unwrap();
    let after = sandwiched_divergence(&phi.apply_state(&rho).unwrap(), &phi.apply_state(&sigma).unwrap(), a).unwrap();
    if after > before + 1e-9 * (1.0 + before.abs()) {
        return Err(format!("seed {seed}, alpha {alpha}: {after} > {before}"));
    }
    Ok(())
}

/// `μ_XY = μ_YX`, and `μ` lies in `(0, 1]`.
pub fn mu_symmetry(seed: u64) -> Check {
    let mut rng = rng_from_seed(seed);
    let d = rng.random_range(2..=4);
    let nx = rng.random_range(1..=d + 1);
    let x = random_povm_with(&mut rng, d, nx).unwrap();
    let y = if rng.random::<bool>() {
        random_rank_one_povm_with(&mut rng, d, d + 1).unwrap()
    } else {
        let ny = rng.random_range(1..=d + 1);
        random_povm_with(&mut rng, d, ny).unwrap()
    };
    let xy = mu_overlap(&x, &y).map_err(|e| e.to_string())?;
    let yx = mu_overlap(&y, &x).map_err(|e| e.to_string())?;
    if (xy - yx).abs() > 1e-10 || !(xy > 0.0 && xy <= 1.0 + 1e-12) {
        return Err(format!("seed {seed}: mu {xy} vs {yx}"));
    }
    Ok(())
}

/// `asymmetry_lower_bound(X) − 1e-6 ≤ Q_α(X|ρ) ≤ H_β(X|ρ) + 1e-6`, and
/// the tradeoff margin recomputes from its witnesses.
pub fn asymmetry_bracket(seed: u64, alpha: f64, cfg: &OptimizerConfig) -> Check {
    let mut rng = rng_from_seed(seed);
    let d = rng.random_range(2..=3);
    let rank = rng.random_range(1..=d);
    let rho = random_state_with(&mut rng, d, rank).unwrap();
    let n = rng.random_range(2..=d + 1);
    let x = random_povm_with(&mut rng, d, n).unwrap();
    let a = RenyiOrder::new(alpha).unwrap();
    let q = renyi_asymmetry(&x, &rho, a, cfg).map_err(|e| e.to_string())?.value;
    let h = renyi_entropy(&measure_probabilities(&rho, &x).unwrap(), a.conjugate().unwrap());
    let low = asymmetry_lower_bound(&x);
    if q < -1e-6 || q > h + 1e-6 || q < low - 1e-6 {
        return Err(format!("seed {seed}, alpha {alpha}: Q {q}, H_beta {h}, lower {low}"));
    }
    let rep = check_tradeoff(&x, &qdecomp::quantum::Observable::trivial(d), &rho, a, cfg).map_err(|e| e.to_string())?;
    if (rep.recompute_margin() - rep.margin).abs() > 1e-10 {
        return Err(format!("seed {seed}: margin does not recompute"));
    }
    Ok(())
}
