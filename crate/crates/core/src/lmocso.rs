//! Competitive swarm offspring operator.
//!
//! Particles are scored by the shift-based fitness, paired at random, and
//! in every pair the lower-fitness particle learns from the other:
//!
//! ```text
//! v' = r0 * v + r1 * (x_w - x)
//! x' = x + v' + r0 * (v' - v)
//! ```
//!
//! with `r0, r1 ~ U[0, 1)` drawn once per pair. Updated particles are then
//! perturbed by polynomial mutation.

use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::types::{Bounds, Individual, Population};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MutationParams {
    /// Per-variable mutation probability.
    pub pm: f64,
    /// Distribution index.
    pub eta_m: f64,
}

impl MutationParams {
    pub fn new(pm: f64, eta_m: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&pm) || !(eta_m > 0.0) {
            return Err(Error::config(format!(
                "mutation needs 0 <= pm <= 1 and eta_m > 0, got pm={pm}, eta_m={eta_m}"
            )));
        }
        Ok(Self { pm, eta_m })
    }

    /// `pm = 1/D`, `eta_m = 20`.
    pub fn for_dimension(d: usize) -> Self {
        Self {
            pm: 1.0 / d.max(1) as f64,
            eta_m: 20.0,
        }
    }
}

/// Shift-based fitness of every member: the distance to the nearest other
/// member measured only along objectives where that member is worse.
/// Zero exactly when the member is weakly dominated by another.
pub fn shift_fitness(objectives: &[Vec<f64>]) -> Result<Vec<f64>> {
    let n = objectives.len();
    if n < 2 {
        return Err(Error::contract(format!(
            "shift-based fitness needs at least 2 members, got {n}"
        )));
    }
    Ok((0..n)
        .map(|p| {
            (0..n)
                .filter(|&q| q != p)
                .map(|q| {
                    objectives[q]
                        .iter()
                        .zip(&objectives[p])
                        .map(|(fq, fp)| (fq - fp).max(0.0).powi(2))
                        .sum::<f64>()
                        .sqrt()
                })
                .fold(f64::INFINITY, f64::min)
        })
        .collect())
}

/// Move `loser` towards `winner` with the given coefficients. The returned
/// individual carries the new velocity and is unevaluated.
pub fn learn_from(loser: &Individual, winner: &Individual, r0: f64, r1: f64, bounds: &Bounds) -> Individual {
    let v: Vec<f64> = loser
        .v
        .iter()
        .zip(loser.x.iter().zip(&winner.x))
        .map(|(&vi, (&xi, &wi))| r0 * vi + r1 * (wi - xi))
        .collect();
    let mut x: Vec<f64> = loser
        .x
        .iter()
        .zip(v.iter().zip(&loser.v))
        .map(|(&xi, (&vn, &vo))| xi + vn + r0 * (vn - vo))
        .collect();
    bounds.clip(&mut x);
    Individual::with_velocity(x, v)
}

/// Record of one pairwise competition.
#[derive(Debug, Clone, PartialEq)]
pub struct CsoUpdate {
    pub loser: usize,
    pub winner: usize,
    pub r0: f64,
    pub r1: f64,
    pub updated: Individual,
}

/// Shuffle, pair, and update every pair's loser. An odd member out is left alone.
pub fn compete_and_update(pop: &Population, bounds: &Bounds, rng: &mut RngStream) -> Result<Vec<CsoUpdate>> {
    let fitness = shift_fitness(&pop.objectives())?;
    let order = rng.permutation(pop.len());
    Ok(order
        .chunks_exact(2)
        .map(|pair| {
            let (a, b) = (pair[0], pair[1]);
            // equal fitness: first of the pair wins
            let (winner, loser) = if fitness[b] > fitness[a] { (b, a) } else { (a, b) };
            let r0 = rng.uniform();
            let r1 = rng.uniform();
            let updated = learn_from(&pop.members[loser], &pop.members[winner], r0, r1, bounds);
            CsoUpdate {
                loser,
                winner,
                r0,
                r1,
                updated,
            }
        })
        .collect())
}

/// Polynomial perturbation of one variable for a given uniform draw `u`.
pub fn mutate_value(x: f64, lower: f64, upper: f64, eta_m: f64, u: f64) -> f64 {
    let e = 1.0 / (eta_m + 1.0);
    let delta = if u < 0.5 {
        (2.0 * u).powf(e) - 1.0
    } else {
        1.0 - (2.0 * (1.0 - u)).powf(e)
    };
    (x + delta * (upper - lower)).clamp(lower, upper)
}

pub fn polynomial_mutation(
    x: &[f64],
    bounds: &Bounds,
    params: &MutationParams,
    rng: &mut RngStream,
) -> Vec<f64> {
    x.iter()
        .enumerate()
        .map(|(i, &xi)| {
            if rng.uniform() < params.pm {
                let u = rng.uniform();
                mutate_value(xi, bounds.lower()[i], bounds.upper()[i], params.eta_m, u)
            } else {
                xi
            }
        })
        .collect()
}
