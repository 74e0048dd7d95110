//! The main algorithm loop.
//!
//! Each generation draws a mixing ratio `lambda` in `[0.2, 0.8]`, creates
//! `ceil(lambda * N)` offspring with the adversarial generator and the rest
//! with the competitive swarm operator, selects survivors from parents and
//! offspring with reference-vector-guided selection, and finally adapts the
//! reference vectors to the survivors' objective ranges.

use std::time::{Duration, Instant};

use crate::dan::{DanConfig, DanModel};
use crate::error::{Error, Result};
use crate::lmocso::{compete_and_update, polynomial_mutation, MutationParams};
use crate::lsmop::{LsmopInstance, DEFAULT_PF_POINTS};
use crate::metrics::igd;
use crate::refvec::{Layout, ReferenceVectorSet};
use crate::rng::RngStream;
use crate::selection::{select_indices, ApdParams};
use crate::types::{evaluate_members, init_population, Individual, Population, Problem};

pub const LAMBDA_LOW: f64 = 0.2;
pub const LAMBDA_HIGH: f64 = 0.8;

/// How the share of generator-made offspring is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixingPolicy {
    /// Draw a new ratio every generation (otherwise once per run).
    pub redraw_each_generation: bool,
    /// Use this ratio instead of drawing one.
    pub fixed: Option<f64>,
}

impl Default for MixingPolicy {
    fn default() -> Self {
        Self {
            redraw_each_generation: true,
            fixed: None,
        }
    }
}

impl MixingPolicy {
    pub fn draw(&self, rng: &mut RngStream) -> f64 {
        self.fixed
            .unwrap_or_else(|| rng.uniform_range(LAMBDA_LOW, LAMBDA_HIGH))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CsodConfig {
    /// Number of generations, `t_max`.
    pub generations: usize,
    /// APD penalty rate.
    pub alpha: f64,
    /// Expected population size; must equal the reference-vector count when set.
    pub population_size: Option<usize>,
    /// Reference-vector layout; defaults to [`Layout::default_for`].
    pub layout: Option<Layout>,
    pub dan: DanConfig,
    /// Defaults to `pm = 1/D`, `eta_m = 20`.
    pub mutation: Option<MutationParams>,
    pub mixing: MixingPolicy,
    pub pf_points: usize,
}

impl Default for CsodConfig {
    fn default() -> Self {
        Self {
            generations: 50,
            alpha: 2.0,
            population_size: None,
            layout: None,
            dan: DanConfig::default(),
            mutation: None,
            mixing: MixingPolicy::default(),
            pf_points: DEFAULT_PF_POINTS,
        }
    }
}

impl CsodConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0) {
            return Err(Error::config(format!("alpha must be positive, got {}", self.alpha)));
        }
        if let Some(l) = self.mixing.fixed {
            if !(LAMBDA_LOW..=LAMBDA_HIGH).contains(&l) {
                return Err(Error::config(format!(
                    "fixed mixing ratio {l} outside [{LAMBDA_LOW}, {LAMBDA_HIGH}]"
                )));
            }
        }
        self.dan.validate()
    }
}

/// Outcome of one run of any algorithm.
#[derive(Debug, Clone)]
pub struct RunResult {
    pub final_population: Population,
    /// IGD after initialization and after every generation.
    pub igd_trace: Vec<f64>,
    pub population_sizes: Vec<usize>,
    pub seed: u64,
    pub wall_time: Duration,
}

impl RunResult {
    pub fn final_igd(&self) -> f64 {
        *self.igd_trace.last().expect("trace always holds the initial IGD")
    }
}

/// Split `n` offspring into `(from generator, from swarm)` for ratio `lambda`.
pub fn mix_counts(lambda: f64, n: usize) -> Result<(usize, usize)> {
    if !(LAMBDA_LOW..=LAMBDA_HIGH).contains(&lambda) {
        return Err(Error::contract(format!(
            "mixing ratio {lambda} outside [{LAMBDA_LOW}, {LAMBDA_HIGH}]"
        )));
    }
    if n == 0 {
        return Err(Error::contract("offspring count must be positive"));
    }
    // the small offset keeps exact products such as 0.2 * 10 from rounding up
    let n_dan = ((lambda * n as f64) - 1e-9).ceil().max(0.0) as usize;
    let n_dan = n_dan.min(n);
    Ok((n_dan, n - n_dan))
}

/// Everything carried from one generation to the next.
#[derive(Debug, Clone)]
pub struct CsodState {
    pub population: Population,
    pub vectors: ReferenceVectorSet,
    pub dan: DanModel,
    /// Ratio drawn once per run when the policy does not redraw.
    pub run_lambda: Option<f64>,
}

/// Diagnostics of one generation.
#[derive(Debug, Clone)]
pub struct StepReport {
    pub lambda: f64,
    pub n_dan: usize,
    pub n_cso: usize,
    /// Parents followed by evaluated offspring, the pool selection drew from.
    pub candidates: Vec<Individual>,
    /// Indices into `candidates` of the survivors.
    pub survivors: Vec<usize>,
}

fn reference_vectors(m: usize, config: &CsodConfig) -> Result<ReferenceVectorSet> {
    let layout = config.layout.unwrap_or_else(|| Layout::default_for(m));
    let vectors = ReferenceVectorSet::new(layout.vectors(m))?;
    if let Some(n) = config.population_size {
        if n != vectors.len() {
            return Err(Error::config(format!(
                "population size {n} does not match the {} reference vectors for M={m}",
                vectors.len()
            )));
        }
    }
    Ok(vectors)
}

/// Initial population, reference vectors and an untrained generator.
pub fn initialize(instance: &LsmopInstance, config: &CsodConfig, rng: &mut RngStream) -> Result<CsodState> {
    config.validate()?;
    let vectors = reference_vectors(instance.num_objectives(), config)?;
    let population = init_population(instance, vectors.len(), rng)?;
    let dan = DanModel::new(instance.num_variables(), &config.dan, rng)?;
    let run_lambda = (!config.mixing.redraw_each_generation).then(|| config.mixing.draw(rng));
    Ok(CsodState {
        population,
        vectors,
        dan,
        run_lambda,
    })
}

/// `n` swarm offspring: repeated competition rounds over the population,
/// each updated loser polynomially mutated.
fn swarm_offspring(
    pop: &Population,
    n: usize,
    instance: &LsmopInstance,
    mutation: &MutationParams,
    rng: &mut RngStream,
) -> Result<Vec<Individual>> {
    let bounds = instance.bounds();
    let mut out = Vec::with_capacity(n);
    if pop.len() < 2 {
        // nothing to compete against: mutate copies of the lone survivor
        if let Some(only) = pop.members.first() {
            while out.len() < n {
                let x = polynomial_mutation(&only.x, bounds, mutation, rng);
                out.push(Individual::with_velocity(x, only.v.clone()));
            }
        }
        return Ok(out);
    }
    while out.len() < n {
        for up in compete_and_update(pop, bounds, rng)? {
            if out.len() == n {
                break;
            }
            let x = polynomial_mutation(&up.updated.x, bounds, mutation, rng);
            out.push(Individual::with_velocity(x, up.updated.v));
        }
    }
    Ok(out)
}

/// Advance one generation.
pub fn step(
    state: &mut CsodState,
    instance: &LsmopInstance,
    config: &CsodConfig,
    rng: &mut RngStream,
) -> Result<StepReport> {
    let t = state.population.generation;
    if t >= config.generations {
        return Err(Error::contract(format!(
            "generation {t} already reached t_max {}",
            config.generations
        )));
    }
    let bounds = instance.bounds();
    let lambda = match state.run_lambda {
        Some(l) => l,
        None => config.mixing.draw(rng),
    };
    let (n_dan, n_cso) = mix_counts(lambda, state.vectors.len())?;

    let real: Vec<Vec<f64>> = state
        .population
        .members
        .iter()
        .map(|m| bounds.normalize(&m.x))
        .collect();
    if real.len() >= 4 {
        for _ in 0..config.dan.steps_per_generation {
            state.dan.train_step(&real, &config.dan, rng)?;
        }
    }
    let mut offspring = state.dan.sample_offspring(n_dan, bounds, rng);

    let mutation = config
        .mutation
        .unwrap_or_else(|| MutationParams::for_dimension(instance.num_variables()));
    offspring.extend(swarm_offspring(&state.population, n_cso, instance, &mutation, rng)?);
    evaluate_members(instance, &mut offspring)?;

    let mut candidates = state.population.members.clone();
    candidates.extend(offspring);
    let objectives: Vec<Vec<f64>> = candidates.iter().map(|c| c.f.clone()).collect();
    let params = ApdParams::new(instance.num_objectives(), t + 1, config.generations, config.alpha)?;
    let survivors = select_indices(&objectives, &state.vectors, &params)?;

    let selected = Population::new(survivors.iter().map(|&i| candidates[i].clone()).collect(), t + 1);
    if let Some((zmin, zmax)) = selected.objective_range() {
        // a single survivor (or identical survivors) gives no range to adapt to
        if zmax.iter().zip(&zmin).any(|(hi, lo)| hi > lo) {
            state.vectors = state.vectors.adapt(&zmax, &zmin)?;
        }
    }
    state.population = selected;
    Ok(StepReport {
        lambda,
        n_dan,
        n_cso,
        candidates,
        survivors,
    })
}

/// Run to `config.generations`, recording IGD against the sampled true front.
pub fn run(instance: &LsmopInstance, config: &CsodConfig, rng: &mut RngStream) -> Result<RunResult> {
    let start = Instant::now();
    let seed = rng.seed();
    let reference = instance.sample_pf(config.pf_points);
    let mut state = initialize(instance, config, rng)?;
    let mut igd_trace = vec![igd(&state.population.objectives(), &reference)?];
    let mut population_sizes = vec![state.population.len()];
    while state.population.generation < config.generations {
        step(&mut state, instance, config, rng)?;
        igd_trace.push(igd(&state.population.objectives(), &reference)?);
        population_sizes.push(state.population.len());
    }
    Ok(RunResult {
        final_population: state.population,
        igd_trace,
        population_sizes,
        seed,
        wall_time: start.elapsed(),
    })
}
