//! Qubit lower bounds on the Shannon entropy of a spin measurement, swept
//! over the Bloch length `r`.
//!
//! For `ρ = ½(I + r σ_z)` and `X = σ·n` at angle `θ` from `z` the mixedness
//! bound is `H(ρ)` and the classical one is `H_∞(X|ρ) = log 2/(1 + r|cos θ|)`.
//! The table uses `θ = 0` and `θ = π/3`. The trine rows add `log 3/2` to
//! every column.

use serde::Serialize;

use crate::entropy::{min_entropy, von_neumann_entropy, LogBase};
use crate::error::{Error, Result};
use crate::quantum::{measure_probabilities, DensityOperator, Observable};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Block {
    Qubit,
    Trine,
    Crossing,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct Fig1Row {
    pub block: Block,
    pub r: f64,
    pub h_rho: f64,
    pub classical_aligned: f64,
    pub classical_tilted: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Fig1Table {
    pub rows: Vec<Fig1Row>,
    /// Bloch length where `H(ρ)` meets the `θ = π/3` classical curve.
    pub crossing: f64,
}

pub const FIG1_COLUMNS: [&str; 5] = ["block", "r", "h_rho", "classical_aligned", "classical_tilted"];

fn state(r: f64) -> Result<DensityOperator> {
    DensityOperator::from_bloch([0.0, 0.0, r])
}

fn classical(r: f64, theta: f64) -> Result<f64> {
    let x = Observable::spin([theta.sin(), 0.0, theta.cos()])?;
    Ok(min_entropy(&measure_probabilities(&state(r)?, &x)?))
}

/// Values in nats at Bloch length `r`.
fn point(r: f64) -> Result<(f64, f64, f64)> {
    Ok((von_neumann_entropy(&state(r)?), classical(r, 0.0)?, classical(r, std::f64::consts::FRAC_PI_3)?))
}

fn crossing() -> Result<f64> {
    let gap = |r: f64| point(r).map(|(h, _, t)| h - t);
    // H(ρ) starts above the tilted curve and ends below it
    let (mut lo, mut hi) = (0.05, 1.0);
    if !(gap(lo)? > 0.0 && gap(hi)? < 0.0) {
        return Err(Error::Inconsistent("no sign change between the bound curves".into()));
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if gap(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `steps + 1` evenly spaced values of `r` in `[0, 1]`, the trine block,
/// and the crossing as a final row.
pub fn fig1_table(steps: usize, base: LogBase) -> Result<Fig1Table> {
    if steps < 2 {
        return Err(Error::Invalid(format!("fig1 needs at least 2 steps, got {steps}")));
    }
    let shift = 1.5f64.ln();
    let mut rows = Vec::with_capacity(2 * steps + 3);
    let mut pts = Vec::with_capacity(steps + 1);
    for k in 0..=steps {
        let r = k as f64 / steps as f64;
        pts.push((r, point(r)?));
    }
    for (block, add) in [(Block::Qubit, 0.0), (Block::Trine, shift)] {
        for &(r, (h, a, t)) in &pts {
            rows.push(Fig1Row {
                block,
                r,
                h_rho: base.from_nats(h + add),
                classical_aligned: base.from_nats(a + add),
                classical_tilted: base.from_nats(t + add),
            });
        }
    }
    let rc = crossing()?;
    let (h, a, t) = point(rc)?;
    rows.push(Fig1Row {
        block: Block::Crossing,
        r: rc,
        h_rho: base.from_nats(h),
        classical_aligned: base.from_nats(a),
        classical_tilted: base.from_nats(t),
    });
    Ok(Fig1Table { rows, crossing: rc })
}
