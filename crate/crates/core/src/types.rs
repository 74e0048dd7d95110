//! Individuals, populations, box bounds and the problem interface.

use crate::error::{Error, Result};
use crate::rng::RngStream;

/// One candidate solution: decision vector, objective vector and the
/// velocity carried by the swarm operator.
///
/// An empty `f` marks an individual that still needs evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct Individual {
    pub x: Vec<f64>,
    pub f: Vec<f64>,
    pub v: Vec<f64>,
}

impl Individual {
    /// Unevaluated individual at rest (zero velocity).
    pub fn new(x: Vec<f64>) -> Self {
        let v = vec![0.0; x.len()];
        Self { x, f: Vec::new(), v }
    }

    pub fn with_velocity(x: Vec<f64>, v: Vec<f64>) -> Self {
        Self { x, f: Vec::new(), v }
    }

    pub fn is_evaluated(&self) -> bool {
        !self.f.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Population {
    pub members: Vec<Individual>,
    pub generation: usize,
}

impl Population {
    pub fn new(members: Vec<Individual>, generation: usize) -> Self {
        Self {
            members,
            generation,
        }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Objective vectors in member order.
    pub fn objectives(&self) -> Vec<Vec<f64>> {
        self.members.iter().map(|m| m.f.clone()).collect()
    }

    /// Componentwise (min, max) over the members' objective vectors.
    pub fn objective_range(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        let first = self.members.first()?;
        let mut lo = first.f.clone();
        let mut hi = first.f.clone();
        for m in &self.members[1..] {
            for (k, &fk) in m.f.iter().enumerate() {
                lo[k] = lo[k].min(fk);
                hi[k] = hi[k].max(fk);
            }
        }
        Some((lo, hi))
    }
}

/// Box constraints `lower[i] <= x[i] <= upper[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Bounds {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl Bounds {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::config(format!(
                "bounds length mismatch: {} lower vs {} upper",
                lower.len(),
                upper.len()
            )));
        }
        if let Some(i) = (0..lower.len()).find(|&i| !(lower[i] < upper[i])) {
            return Err(Error::config(format!(
                "bounds require lower < upper, violated at index {i}"
            )));
        }
        Ok(Self { lower, upper })
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn width(&self, i: usize) -> f64 {
        self.upper[i] - self.lower[i]
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x
                .iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(&xi, (&l, &u))| l <= xi && xi <= u)
    }

    pub fn clip(&self, x: &mut [f64]) {
        for (xi, (&l, &u)) in x.iter_mut().zip(self.lower.iter().zip(&self.upper)) {
            *xi = xi.clamp(l, u);
        }
    }

    pub fn sample(&self, rng: &mut RngStream) -> Vec<f64> {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(&l, &u)| rng.uniform_range(l, u))
            .collect()
    }

    /// Affine map from the box onto [0, 1]^D.
    pub fn normalize(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .enumerate()
            .map(|(i, &xi)| (xi - self.lower[i]) / self.width(i))
            .collect()
    }

    /// Inverse of [`Bounds::normalize`], clipped to the box.
    pub fn denormalize(&self, z: &[f64]) -> Vec<f64> {
        let mut x: Vec<f64> = z
            .iter()
            .enumerate()
            .map(|(i, &zi)| self.lower[i] + zi * self.width(i))
            .collect();
        self.clip(&mut x);
        x
    }
}

/// A box-constrained minimization problem with `M` objectives.
pub trait Problem: Sync {
    fn num_objectives(&self) -> usize;
    fn num_variables(&self) -> usize;
    fn bounds(&self) -> &Bounds;
    fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>>;
}

/// Draw `n` individuals uniformly inside the problem's bounds and evaluate them.
pub fn init_population<P: Problem + ?Sized>(
    problem: &P,
    n: usize,
    rng: &mut RngStream,
) -> Result<Population> {
    if n < 2 {
        return Err(Error::config(format!(
            "population size must be at least 2, got {n}"
        )));
    }
    let members = (0..n)
        .map(|_| Individual::new(problem.bounds().sample(rng)))
        .collect();
    evaluate_population(problem, Population::new(members, 0))
}

/// Evaluate every member, preserving order.
pub fn evaluate_population<P: Problem + ?Sized>(
    problem: &P,
    mut pop: Population,
) -> Result<Population> {
    evaluate_members(problem, &mut pop.members)?;
    Ok(pop)
}

pub(crate) fn evaluate_members<P: Problem + ?Sized>(
    problem: &P,
    members: &mut [Individual],
) -> Result<()> {
    let d = problem.num_variables();
    for (i, m) in members.iter_mut().enumerate() {
        if m.x.len() != d {
            return Err(Error::contract(format!(
                "member {i} has {} variables, problem expects {d}",
                m.x.len()
            )));
        }
        m.f = problem.evaluate(&m.x)?;
    }
    Ok(())
}
