//! Comparison algorithms run under the same protocol: NSGA-II and uniform
//! random search.

use std::cmp::Ordering;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::lmocso::{polynomial_mutation, MutationParams};
use crate::lsmop::{LsmopInstance, DEFAULT_PF_POINTS};
use crate::metrics::{igd, IgdArchive};
use crate::moea_csod::RunResult;
use crate::refvec::Layout;
use crate::rng::RngStream;
use crate::types::{evaluate_members, init_population, Bounds, Individual, Population, Problem};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Nsga2Params {
    /// Crossover probability.
    pub pc: f64,
    /// SBX distribution index.
    pub eta_c: f64,
    /// Defaults to `pm = 1/D`, `eta_m = 20`.
    pub mutation: Option<MutationParams>,
}

impl Default for Nsga2Params {
    fn default() -> Self {
        Self {
            pc: 1.0,
            eta_c: 20.0,
            mutation: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BaselineConfig {
    pub generations: usize,
    /// Defaults to the reference-vector count for the instance's objective count.
    pub population_size: Option<usize>,
    pub nsga2: Nsga2Params,
    pub pf_points: usize,
}

impl Default for BaselineConfig {
    fn default() -> Self {
        Self {
            generations: 50,
            population_size: None,
            nsga2: Nsga2Params::default(),
            pf_points: DEFAULT_PF_POINTS,
        }
    }
}

impl BaselineConfig {
    fn population_for(&self, m: usize) -> usize {
        self.population_size
            .unwrap_or_else(|| Layout::default_for(m).vectors(m).len())
    }
}

/// `a` Pareto-dominates `b` (minimization).
pub fn dominates(a: &[f64], b: &[f64]) -> bool {
    let mut strictly = false;
    for (x, y) in a.iter().zip(b) {
        if x > y {
            return false;
        }
        if x < y {
            strictly = true;
        }
    }
    strictly
}

/// Fast non-dominated sorting. Fronts hold indices in increasing order.
pub fn non_dominated_sort(objectives: &[Vec<f64>]) -> Vec<Vec<usize>> {
    let n = objectives.len();
    let mut dominated_by = vec![0usize; n];
    let mut dominates_list = vec![Vec::new(); n];
    for i in 0..n {
        for j in i + 1..n {
            if dominates(&objectives[i], &objectives[j]) {
                dominates_list[i].push(j);
                dominated_by[j] += 1;
            } else if dominates(&objectives[j], &objectives[i]) {
                dominates_list[j].push(i);
                dominated_by[i] += 1;
            }
        }
    }
    let mut fronts = Vec::new();
    let mut current: Vec<usize> = (0..n).filter(|&i| dominated_by[i] == 0).collect();
    while !current.is_empty() {
        let mut next = Vec::new();
        for &i in &current {
            for &j in &dominates_list[i] {
                dominated_by[j] -= 1;
                if dominated_by[j] == 0 {
                    next.push(j);
                }
            }
        }
        next.sort_unstable();
        fronts.push(current);
        current = next;
    }
    fronts
}

/// Crowding distance of every member of one front.
pub fn crowding_distance(front: &[Vec<f64>]) -> Vec<f64> {
    let n = front.len();
    if n <= 2 {
        return vec![f64::INFINITY; n];
    }
    let m = front[0].len();
    let mut dist = vec![0.0; n];
    let mut order: Vec<usize> = (0..n).collect();
    for k in 0..m {
        order.sort_by(|&a, &b| front[a][k].total_cmp(&front[b][k]));
        let lo = front[order[0]][k];
        let hi = front[order[n - 1]][k];
        dist[order[0]] = f64::INFINITY;
        dist[order[n - 1]] = f64::INFINITY;
        let span = hi - lo;
        if span <= 0.0 {
            continue;
        }
        for w in order.windows(3) {
            dist[w[1]] += (front[w[2]][k] - front[w[0]][k]) / span;
        }
    }
    dist
}

/// Rank (front index) and crowding distance of every member.
fn rank_and_crowding(objectives: &[Vec<f64>]) -> (Vec<usize>, Vec<f64>) {
    let n = objectives.len();
    let mut rank = vec![0; n];
    let mut crowd = vec![0.0; n];
    for (r, front) in non_dominated_sort(objectives).iter().enumerate() {
        let pts: Vec<Vec<f64>> = front.iter().map(|&i| objectives[i].clone()).collect();
        for (&i, d) in front.iter().zip(crowding_distance(&pts)) {
            rank[i] = r;
            crowd[i] = d;
        }
    }
    (rank, crowd)
}

/// Crowded comparison: lower rank first, then larger crowding distance.
fn crowded_cmp(rank: &[usize], crowd: &[f64], a: usize, b: usize) -> Ordering {
    rank[a]
        .cmp(&rank[b])
        .then_with(|| crowd[b].total_cmp(&crowd[a]))
}

/// Binary tournament under the crowded comparison; ties go to the first pick.
pub fn tournament(rank: &[usize], crowd: &[f64], rng: &mut RngStream) -> usize {
    let a = rng.index(rank.len());
    let b = rng.index(rank.len());
    if crowded_cmp(rank, crowd, b, a) == Ordering::Less {
        b
    } else {
        a
    }
}

/// Simulated binary crossover, clipped to the bounds.
pub fn sbx(
    p1: &[f64],
    p2: &[f64],
    bounds: &Bounds,
    params: &Nsga2Params,
    rng: &mut RngStream,
) -> (Vec<f64>, Vec<f64>) {
    let mut c1 = p1.to_vec();
    let mut c2 = p2.to_vec();
    if rng.uniform() >= params.pc {
        return (c1, c2);
    }
    let e = 1.0 / (params.eta_c + 1.0);
    for i in 0..p1.len() {
        if rng.uniform() >= 0.5 || (p1[i] - p2[i]).abs() < 1e-14 {
            continue;
        }
        let u = rng.uniform();
        let beta = if u <= 0.5 {
            (2.0 * u).powf(e)
        } else {
            (1.0 / (2.0 * (1.0 - u))).powf(e)
        };
        c1[i] = 0.5 * ((1.0 + beta) * p1[i] + (1.0 - beta) * p2[i]);
        c2[i] = 0.5 * ((1.0 - beta) * p1[i] + (1.0 + beta) * p2[i]);
    }
    bounds.clip(&mut c1);
    bounds.clip(&mut c2);
    (c1, c2)
}

/// Keep `n` members by rank, breaking the last front by crowding distance.
fn truncate_by_rank(candidates: Vec<Individual>, n: usize) -> Vec<Individual> {
    let objectives: Vec<Vec<f64>> = candidates.iter().map(|c| c.f.clone()).collect();
    let mut keep = Vec::with_capacity(n);
    for front in non_dominated_sort(&objectives) {
        if keep.len() + front.len() <= n {
            keep.extend(front);
        } else {
            let pts: Vec<Vec<f64>> = front.iter().map(|&i| objectives[i].clone()).collect();
            let crowd = crowding_distance(&pts);
            let mut order: Vec<usize> = (0..front.len()).collect();
            order.sort_by(|&a, &b| crowd[b].total_cmp(&crowd[a]).then(a.cmp(&b)));
            keep.extend(order.into_iter().take(n - keep.len()).map(|k| front[k]));
        }
        if keep.len() == n {
            break;
        }
    }
    let mut slots: Vec<Option<Individual>> = candidates.into_iter().map(Some).collect();
    keep.into_iter().map(|i| slots[i].take().unwrap()).collect()
}

/// Classic NSGA-II: tournament, SBX, polynomial mutation, elitist truncation.
pub fn nsga2_run(instance: &LsmopInstance, config: &BaselineConfig, rng: &mut RngStream) -> Result<RunResult> {
    let start = Instant::now();
    let seed = rng.seed();
    let params = config.nsga2;
    if !(0.0..=1.0).contains(&params.pc) || !(params.eta_c > 0.0) {
        return Err(Error::config(format!("invalid NSGA-II parameters {params:?}")));
    }
    let bounds = instance.bounds();
    let mutation = params
        .mutation
        .unwrap_or_else(|| MutationParams::for_dimension(instance.num_variables()));
    let reference = instance.sample_pf(config.pf_points);
    let n = config.population_for(instance.num_objectives());
    let mut pop = init_population(instance, n, rng)?;
    let mut igd_trace = vec![igd(&pop.objectives(), &reference)?];
    let mut population_sizes = vec![pop.len()];

    while pop.generation < config.generations {
        let (rank, crowd) = rank_and_crowding(&pop.objectives());
        let mut offspring = Vec::with_capacity(n + 1);
        while offspring.len() < n {
            let a = &pop.members[tournament(&rank, &crowd, rng)];
            let b = &pop.members[tournament(&rank, &crowd, rng)];
            let (c1, c2) = sbx(&a.x, &b.x, bounds, &params, rng);
            offspring.push(Individual::new(polynomial_mutation(&c1, bounds, &mutation, rng)));
            offspring.push(Individual::new(polynomial_mutation(&c2, bounds, &mutation, rng)));
        }
        offspring.truncate(n);
        evaluate_members(instance, &mut offspring)?;
        let mut union = std::mem::take(&mut pop.members);
        union.extend(offspring);
        pop = Population::new(truncate_by_rank(union, n), pop.generation + 1);
        igd_trace.push(igd(&pop.objectives(), &reference)?);
        population_sizes.push(pop.len());
    }
    Ok(RunResult {
        final_population: pop,
        igd_trace,
        population_sizes,
        seed,
        wall_time: start.elapsed(),
    })
}

/// Uniform random search keeping the non-dominated union, truncated by
/// crowding distance.
pub fn random_search(instance: &LsmopInstance, config: &BaselineConfig, rng: &mut RngStream) -> Result<RunResult> {
    random_search_with_archive(instance, config, rng).map(|(r, _)| r)
}

/// [`random_search`] plus the IGD trace of the untruncated archive of every
/// point ever sampled.
pub fn random_search_with_archive(
    instance: &LsmopInstance,
    config: &BaselineConfig,
    rng: &mut RngStream,
) -> Result<(RunResult, Vec<f64>)> {
    let start = Instant::now();
    let seed = rng.seed();
    let reference = instance.sample_pf(config.pf_points);
    let n = config.population_for(instance.num_objectives());
    let mut archive = IgdArchive::new(reference.clone());

    let mut pop = init_population(instance, n, rng)?;
    pop.members.iter().for_each(|m| archive.insert(&m.f));
    let mut igd_trace = vec![igd(&pop.objectives(), &reference)?];
    let mut archive_trace = vec![archive.value()];
    let mut population_sizes = vec![pop.len()];

    while pop.generation < config.generations {
        let mut fresh: Vec<Individual> = (0..n)
            .map(|_| Individual::new(instance.bounds().sample(rng)))
            .collect();
        evaluate_members(instance, &mut fresh)?;
        fresh.iter().for_each(|m| archive.insert(&m.f));
        let mut union = std::mem::take(&mut pop.members);
        union.extend(fresh);
        let objectives: Vec<Vec<f64>> = union.iter().map(|c| c.f.clone()).collect();
        let first = non_dominated_sort(&objectives).swap_remove(0);
        let mut slots: Vec<Option<Individual>> = union.into_iter().map(Some).collect();
        let front: Vec<Individual> = first.iter().map(|&i| slots[i].take().unwrap()).collect();
        let members = if front.len() > n {
            truncate_by_rank(front, n)
        } else {
            front
        };
        pop = Population::new(members, pop.generation + 1);
        igd_trace.push(igd(&pop.objectives(), &reference)?);
        archive_trace.push(archive.value());
        population_sizes.push(pop.len());
    }
    let result = RunResult {
        final_population: pop,
        igd_trace,
        population_sizes,
        seed,
        wall_time: start.elapsed(),
    };
    Ok((result, archive_trace))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sort_examples() {
        assert_eq!(
            non_dominated_sort(&[vec![1.0, 1.0], vec![2.0, 2.0]]),
            vec![vec![0], vec![1]]
        );
        assert_eq!(
            non_dominated_sort(&[vec![0.0, 1.0], vec![1.0, 0.0]]),
            vec![vec![0, 1]]
        );
        // duplicates do not dominate each other
        assert_eq!(
            non_dominated_sort(&[vec![1.0, 1.0], vec![1.0, 1.0]]),
            vec![vec![0, 1]]
        );
    }

    #[test]
    fn crowding_examples() {
        assert_eq!(crowding_distance(&[vec![0.0, 1.0], vec![1.0, 0.0]]), vec![f64::INFINITY; 2]);
        let d = crowding_distance(&[vec![0.0, 2.0], vec![1.0, 1.0], vec![2.0, 0.0]]);
        assert_eq!(d[1], 2.0);
        assert!(d[0].is_infinite() && d[2].is_infinite());
        let dup = crowding_distance(&[vec![0.0, 2.0], vec![1.0, 1.0], vec![1.0, 1.0], vec![2.0, 0.0]]);
        assert!(dup.iter().filter(|d| d.is_finite()).count() == 2);
        assert!(dup[1].is_finite() && dup[2].is_finite());
    }

    #[test]
    fn sbx_without_crossover_copies_parents() {
        let b = Bounds::new(vec![0.0; 3], vec![1.0; 3]).unwrap();
        let params = Nsga2Params {
            pc: 0.0,
            ..Nsga2Params::default()
        };
        let mut rng = RngStream::new(2);
        let (c1, c2) = sbx(&[0.1, 0.2, 0.3], &[0.9, 0.8, 0.7], &b, &params, &mut rng);
        assert_eq!(c1, vec![0.1, 0.2, 0.3]);
        assert_eq!(c2, vec![0.9, 0.8, 0.7]);
        let full = Nsga2Params::default();
        for _ in 0..1000 {
            let (c1, c2) = sbx(&[0.0, 0.5, 1.0], &[1.0, 0.5, 0.0], &b, &full, &mut rng);
            assert!(b.contains(&c1) && b.contains(&c2));
        }
    }

    #[test]
    fn tournament_prefers_lower_rank() {
        let rank = vec![0, 1];
        let crowd = vec![0.0, f64::INFINITY];
        let mut rng = RngStream::new(3);
        for _ in 0..200 {
            let a = tournament(&rank, &crowd, &mut rng);
            // index 1 can only win when drawn twice
            if a == 1 {
                continue;
            }
            assert_eq!(a, 0);
        }
    }

    #[test]
    fn zero_generation_baselines() {
        let inst = LsmopInstance::new(1, 2, 6).unwrap();
        let cfg = BaselineConfig {
            generations: 0,
            population_size: Some(10),
            pf_points: 50,
            ..BaselineConfig::default()
        };
        let a = nsga2_run(&inst, &cfg, &mut RngStream::new(1)).unwrap();
        assert_eq!((a.igd_trace.len(), a.final_population.len()), (1, 10));
        let b = random_search(&inst, &cfg, &mut RngStream::new(1)).unwrap();
        assert_eq!(b.igd_trace.len(), 1);
    }
}
