//! Reference-vector-guided environmental selection.
//!
//! Objectives are translated so the ideal point sits at the origin, every
//! individual joins the reference vector with the largest cosine, and each
//! non-empty subpopulation keeps the member with the smallest
//! angle-penalized distance (APD). Ties go to the lowest index.

use crate::error::{Error, Result};
use crate::refvec::ReferenceVectorSet;
use crate::types::Population;

/// Lower bound applied to reference-vector minimum angles inside selection,
/// so coincident adapted vectors cannot divide by zero.
pub const GAMMA_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct TranslatedObjectives {
    pub values: Vec<Vec<f64>>,
    pub zmin: Vec<f64>,
}

/// Parameters of the APD penalty `M * (t / t_max)^alpha * theta / gamma`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApdParams {
    pub m: usize,
    pub t: usize,
    pub t_max: usize,
    pub alpha: f64,
}

impl ApdParams {
    pub fn new(m: usize, t: usize, t_max: usize, alpha: f64) -> Result<Self> {
        if t > t_max {
            return Err(Error::contract(format!("generation {t} exceeds t_max {t_max}")));
        }
        if !(alpha > 0.0) {
            return Err(Error::contract(format!("alpha must be positive, got {alpha}")));
        }
        Ok(Self { m, t, t_max, alpha })
    }

    /// `M * (t / t_max)^alpha`, the angle coefficient of the penalty.
    pub fn scale(&self) -> f64 {
        if self.t_max == 0 {
            return 0.0;
        }
        self.m as f64 * (self.t as f64 / self.t_max as f64).powf(self.alpha)
    }
}

/// Subtract the componentwise minimum from every objective vector.
pub fn translate(objectives: &[Vec<f64>]) -> Result<TranslatedObjectives> {
    let first = objectives
        .first()
        .ok_or_else(|| Error::contract("cannot translate an empty objective set"))?;
    let m = first.len();
    if objectives.iter().any(|f| f.len() != m) {
        return Err(Error::contract("objective vectors differ in length"));
    }
    let mut zmin = first.clone();
    for f in &objectives[1..] {
        for (z, &v) in zmin.iter_mut().zip(f) {
            *z = z.min(v);
        }
    }
    let values = objectives
        .iter()
        .map(|f| f.iter().zip(&zmin).map(|(v, z)| v - z).collect())
        .collect();
    Ok(TranslatedObjectives { values, zmin })
}

pub(crate) fn norm(v: &[f64]) -> f64 {
    v.iter().map(|c| c * c).sum::<f64>().sqrt()
}

/// Cosine between a translated objective vector and a unit reference vector.
/// The origin is treated as collinear with every vector.
pub fn cosine(f: &[f64], unit: &[f64]) -> f64 {
    let n = norm(f);
    if n == 0.0 {
        return 1.0;
    }
    let dot: f64 = f.iter().zip(unit).map(|(a, b)| a * b).sum();
    (dot / n).clamp(-1.0, 1.0)
}

/// Assign every individual to the reference vector with the largest cosine.
/// Returns one (possibly empty) index list per vector.
pub fn partition(translated: &TranslatedObjectives, vectors: &[Vec<f64>]) -> Vec<Vec<usize>> {
    let mut parts = vec![Vec::new(); vectors.len()];
    if vectors.is_empty() {
        return parts;
    }
    for (i, f) in translated.values.iter().enumerate() {
        let mut best = 0;
        let mut best_cos = f64::NEG_INFINITY;
        for (j, v) in vectors.iter().enumerate() {
            let c = cosine(f, v);
            if c > best_cos {
                best_cos = c;
                best = j;
            }
        }
        parts[best].push(i);
    }
    parts
}

/// Angle-penalized distance `(1 + P(theta)) * |f|`.
pub fn apd(f: &[f64], theta: f64, gamma: f64, params: &ApdParams) -> Result<f64> {
    if !(gamma > 0.0) {
        return Err(Error::contract(format!("gamma must be positive, got {gamma}")));
    }
    if theta < 0.0 {
        return Err(Error::contract(format!("theta must be nonnegative, got {theta}")));
    }
    Ok((1.0 + params.scale() * theta / gamma) * norm(f))
}

/// Indices of the survivors, ordered by reference vector.
pub fn select_indices(
    objectives: &[Vec<f64>],
    vectors: &ReferenceVectorSet,
    params: &ApdParams,
) -> Result<Vec<usize>> {
    let translated = translate(objectives)?;
    let parts = partition(&translated, vectors.current());
    let mut survivors = Vec::new();
    for (j, members) in parts.iter().enumerate() {
        let v = &vectors.current()[j];
        let gamma = vectors.min_angle()[j].max(GAMMA_FLOOR);
        let mut best: Option<(usize, f64)> = None;
        for &i in members {
            let f = &translated.values[i];
            let theta = cosine(f, v).acos();
            let d = apd(f, theta, gamma, params)?;
            if best.is_none_or(|(_, bd)| d < bd) {
                best = Some((i, d));
            }
        }
        if let Some((i, _)) = best {
            survivors.push(i);
        }
    }
    Ok(survivors)
}

/// Keep the minimum-APD member of every non-empty subpopulation.
pub fn elitist_select(
    pop: &Population,
    vectors: &ReferenceVectorSet,
    params: &ApdParams,
) -> Result<Population> {
    let idx = select_indices(&pop.objectives(), vectors, params)?;
    Ok(Population::new(
        idx.into_iter().map(|i| pop.members[i].clone()).collect(),
        pop.generation,
    ))
}
