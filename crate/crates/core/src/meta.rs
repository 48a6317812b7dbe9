//! Genetic-algorithm tuning of the swarm's behavioral parameters.
//!
//! A chromosome is a [`ParameterSet`]. Its fitness is the mean best makespan
//! of `k` independent swarm runs on each training instance (lower is better).
//! Each generation evaluates the whole population, records the best-known
//! chromosome, and breeds the next population with binary tournaments,
//! one-point crossover and per-gene uniform resampling. The generation's best
//! chromosome is copied unchanged into the next population.
//!
//! Random streams are keyed by `(seed, generation, chromosome, instance, run)`
//! so fitness evaluations can run in any order or in parallel.

use std::sync::atomic::{AtomicUsize, Ordering};

use rand::{Rng as _, RngCore};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{ConfigError, PsoError};
use crate::jobshop::{jssp_objective_with, JsspInstance, ScheduleBuilder};
use crate::orlib::InstanceRecord;
use crate::pso::{self, ParameterSet, PsoConfig, BETA_MAX, BETA_MIN};
use crate::seed::{self, Rng};

/// Closed sampling interval for each gene, in `(alpha1, alpha2, omega, beta)`
/// order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneBounds {
    pub intervals: [(f64, f64); 4],
}

impl Default for GeneBounds {
    fn default() -> Self {
        Self {
            intervals: [(-1.0, 5.0), (-1.0, 5.0), (-1.0, 1.0), (BETA_MIN, BETA_MAX)],
        }
    }
}

impl GeneBounds {
    pub fn validate(&self) -> Result<(), ConfigError> {
        for (gene, &(lo, hi)) in ParameterSet::GENE_NAMES.iter().zip(&self.intervals) {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(ConfigError::GeneBounds { gene, lo, hi });
            }
        }
        let (lo, hi) = self.intervals[3];
        if lo < BETA_MIN || hi > BETA_MAX {
            return Err(ConfigError::GeneBounds {
                gene: "beta",
                lo,
                hi,
            });
        }
        Ok(())
    }

    pub fn contains(&self, params: &ParameterSet) -> bool {
        params
            .genes()
            .iter()
            .zip(&self.intervals)
            .all(|(g, &(lo, hi))| lo <= *g && *g <= hi)
    }

    pub fn sample(&self, rng: &mut Rng) -> ParameterSet {
        ParameterSet::from_genes(self.intervals.map(|(lo, hi)| rng.gen_range(lo..=hi)))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaConfig {
    pub population_size: usize,
    pub n_generations: usize,
    /// Swarm runs per training instance behind one fitness value.
    pub k_runs: usize,
    /// Per-gene mutation probability.
    pub mutation_prob: f64,
    pub seed: u64,
    pub training_instances: Vec<String>,
    pub bounds: GeneBounds,
    /// Put the Kennedy set into the initial population.
    pub seed_kennedy: bool,
    pub builder: ScheduleBuilder,
}

impl Default for GaConfig {
    fn default() -> Self {
        Self {
            population_size: 50,
            n_generations: 100,
            k_runs: 10,
            mutation_prob: 0.10,
            seed: 0,
            training_instances: vec!["LA02".into(), "LA18".into(), "LA20".into()],
            bounds: GeneBounds::default(),
            seed_kennedy: true,
            builder: ScheduleBuilder::default(),
        }
    }
}

impl GaConfig {
    /// Desk-scale run: 10 chromosomes, 10 generations, k = 3, LA02 only.
    pub fn quick() -> Self {
        Self {
            population_size: 10,
            n_generations: 10,
            k_runs: 3,
            training_instances: vec!["LA02".into()],
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.population_size == 0 || !self.population_size.is_multiple_of(2) {
            return Err(ConfigError::PopulationSize(self.population_size));
        }
        if self.n_generations == 0 {
            return Err(ConfigError::ZeroCount("n_generations"));
        }
        if self.k_runs == 0 {
            return Err(ConfigError::ZeroCount("k_runs"));
        }
        if !(0.0..=1.0).contains(&self.mutation_prob) {
            return Err(ConfigError::MutationProbability(self.mutation_prob));
        }
        if self.training_instances.is_empty() {
            return Err(ConfigError::NoTraining);
        }
        self.bounds.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetaResult {
    pub best_params: ParameterSet,
    pub best_fitness: f64,
    /// Best-known fitness after each generation.
    pub history: Vec<f64>,
    /// Chromosome fitness evaluations.
    pub fitness_evaluations: usize,
    /// Individual swarm runs behind those evaluations.
    pub pso_runs: usize,
}

#[allow(clippy::too_many_arguments)]
fn fitness_counted(
    params: &ParameterSet,
    training: &[&JsspInstance],
    k: usize,
    pso: &PsoConfig,
    builder: ScheduleBuilder,
    rng: &mut Rng,
    runs: &AtomicUsize,
) -> Result<f64, PsoError> {
    if k == 0 {
        return Err(PsoError::ZeroCount("k"));
    }
    if training.is_empty() {
        return Err(PsoError::ZeroCount("training instances"));
    }
    let base = rng.next_u64();
    let mut total = 0.0;
    for (i, inst) in training.iter().enumerate() {
        let (mut objective, space) = jssp_objective_with(inst, builder);
        for r in 0..k {
            let config = pso.with_seed(seed::derive(base, &[i as u64, r as u64]));
            let result = pso::run_pso(&mut objective, &space, &config, params)?;
            runs.fetch_add(1, Ordering::Relaxed);
            total += result.best_value;
        }
    }
    Ok(total / (k * training.len()) as f64)
}

/// Mean best makespan of `k` runs on each training instance. Run seeds come
/// from one draw of `rng`.
pub fn fitness(
    params: &ParameterSet,
    training: &[&JsspInstance],
    k: usize,
    pso: &PsoConfig,
    builder: ScheduleBuilder,
    rng: &mut Rng,
) -> Result<f64, PsoError> {
    fitness_counted(params, training, k, pso, builder, rng, &AtomicUsize::new(0))
}

fn tournament(fitness: &[f64], rng: &mut Rng) -> usize {
    let a = rng.gen_range(0..fitness.len());
    let b = rng.gen_range(0..fitness.len());
    binary_winner(fitness, a, b)
}

/// Lower fitness wins; ties go to the lower index.
pub fn binary_winner(fitness: &[f64], a: usize, b: usize) -> usize {
    match fitness[a].total_cmp(&fitness[b]) {
        std::cmp::Ordering::Less => a,
        std::cmp::Ordering::Greater => b,
        std::cmp::Ordering::Equal => a.min(b),
    }
}

/// `population.len() / 2` parent pairs, each parent chosen by a binary
/// tournament. Pairs hold population indices.
pub fn select_parents(population: &[(ParameterSet, f64)], rng: &mut Rng) -> Vec<(usize, usize)> {
    let fitness: Vec<f64> = population.iter().map(|(_, f)| *f).collect();
    (0..population.len() / 2)
        .map(|_| (tournament(&fitness, rng), tournament(&fitness, rng)))
        .collect()
}

/// Swaps gene suffixes after `cut` (1..=3).
pub fn crossover_at(
    a: &ParameterSet,
    b: &ParameterSet,
    cut: usize,
) -> (ParameterSet, ParameterSet) {
    let (mut x, mut y) = (a.genes(), b.genes());
    for i in cut..ParameterSet::GENES {
        std::mem::swap(&mut x[i], &mut y[i]);
    }
    (ParameterSet::from_genes(x), ParameterSet::from_genes(y))
}

/// One-point crossover with the cut drawn uniformly from {1, 2, 3}.
pub fn crossover_one_point(
    a: &ParameterSet,
    b: &ParameterSet,
    rng: &mut Rng,
) -> (ParameterSet, ParameterSet) {
    let cut = rng.gen_range(1..ParameterSet::GENES);
    crossover_at(a, b, cut)
}

/// Resamples each gene uniformly within its interval with probability `prob`.
pub fn mutate(c: &ParameterSet, prob: f64, bounds: &GeneBounds, rng: &mut Rng) -> ParameterSet {
    let mut genes = c.genes();
    for (g, &(lo, hi)) in genes.iter_mut().zip(&bounds.intervals) {
        if rng.gen_bool(prob) {
            *g = rng.gen_range(lo..=hi);
        }
    }
    ParameterSet::from_genes(genes)
}

pub fn run_meta(
    ga: &GaConfig,
    pso: &PsoConfig,
    suite: &[InstanceRecord],
) -> Result<MetaResult, ConfigError> {
    run_meta_with(ga, pso, suite, |_, _, _| {})
}

/// [`run_meta`] with a callback invoked after each generation with the
/// generation index, the best-known fitness and parameters.
pub fn run_meta_with(
    ga: &GaConfig,
    pso: &PsoConfig,
    suite: &[InstanceRecord],
    mut on_generation: impl FnMut(usize, f64, &ParameterSet),
) -> Result<MetaResult, ConfigError> {
    ga.validate()?;
    pso.validate()?;
    let training = ga
        .training_instances
        .iter()
        .map(|name| {
            suite
                .iter()
                .find(|r| r.name.eq_ignore_ascii_case(name))
                .map(|r| &r.instance)
                .ok_or_else(|| ConfigError::UnknownInstance(name.clone()))
        })
        .collect::<Result<Vec<_>, _>>()?;

    let mut rng = seed::rng_from(seed::derive(ga.seed, &[u64::MAX]));
    let mut population: Vec<ParameterSet> = (0..ga.population_size)
        .map(|_| ga.bounds.sample(&mut rng))
        .collect();
    if ga.seed_kennedy && ga.bounds.contains(&ParameterSet::KENNEDY) {
        population[0] = ParameterSet::KENNEDY;
    }

    let runs = AtomicUsize::new(0);
    let mut best: Option<(ParameterSet, f64)> = None;
    let mut history = Vec::with_capacity(ga.n_generations);
    let mut fitness_evaluations = 0;

    for generation in 0..ga.n_generations {
        let scores = population
            .par_iter()
            .enumerate()
            .map(|(idx, params)| {
                let mut stream =
                    seed::rng_from(seed::derive(ga.seed, &[generation as u64, idx as u64]));
                fitness_counted(
                    params,
                    &training,
                    ga.k_runs,
                    pso,
                    ga.builder,
                    &mut stream,
                    &runs,
                )
            })
            .collect::<Result<Vec<f64>, PsoError>>()?;
        fitness_evaluations += scores.len();

        let elite = (0..scores.len())
            .reduce(|a, b| binary_winner(&scores, a, b))
            .expect("population is non-empty");
        if best.is_none_or(|(_, f)| scores[elite] < f) {
            best = Some((population[elite], scores[elite]));
        }
        let (best_params, best_fitness) = best.expect("set above");
        history.push(best_fitness);
        on_generation(generation, best_fitness, &best_params);

        if generation + 1 == ga.n_generations {
            break;
        }
        let scored: Vec<(ParameterSet, f64)> = population
            .iter()
            .copied()
            .zip(scores.iter().copied())
            .collect();
        let mut next = Vec::with_capacity(ga.population_size);
        for (a, b) in select_parents(&scored, &mut rng) {
            let (x, y) = crossover_one_point(&population[a], &population[b], &mut rng);
            next.push(mutate(&x, ga.mutation_prob, &ga.bounds, &mut rng));
            next.push(mutate(&y, ga.mutation_prob, &ga.bounds, &mut rng));
        }
        next[0] = population[elite];
        population = next;
    }

    let (best_params, best_fitness) = best.expect("at least one generation");
    Ok(MetaResult {
        best_params,
        best_fitness,
        history,
        fitness_evaluations,
        pso_runs: runs.load(Ordering::Relaxed),
    })
}
