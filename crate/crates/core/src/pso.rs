//! Continuous particle swarm optimizer with a fixed velocity restriction.
//!
//! Each particle moves by
//!
//! ```text
//! V <- omega*V + alpha1*(P - X)*R1 + alpha2*(G - X)*R2
//! V <- clamp(V, -vmax, vmax)
//! X <- X + V
//! ```
//!
//! where products are component-wise and `R1`, `R2` are drawn fresh from the
//! open interval (0, 1) for every component of every update. The bound is
//! `vmax = beta * (upper - lower)`, computed once when the swarm is created and
//! never changed afterwards.
//!
//! Positions are clamped back into the search box after each move (the
//! velocity keeps its value). Personal and global bests are replaced only on
//! strict improvement, and the global best is refreshed right after each
//! particle's evaluation, so later particles in the same iteration already see
//! it.

use rand::distributions::Open01;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::PsoError;
use crate::seed::{self, Rng};

/// Lowest admissible velocity-restriction fraction.
pub const BETA_MIN: f64 = 0.01;
pub const BETA_MAX: f64 = 1.0;

/// Something the swarm can minimize. Implemented for any `FnMut(&[f64]) -> f64`.
pub trait Objective {
    fn evaluate(&mut self, x: &[f64]) -> f64;
}

impl<F> Objective for F
where
    F: FnMut(&[f64]) -> f64,
{
    fn evaluate(&mut self, x: &[f64]) -> f64 {
        self(x)
    }
}

/// Axis-aligned box `[lower[i], upper[i]]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchSpace {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl SearchSpace {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self, PsoError> {
        if lower.len() != upper.len() {
            return Err(PsoError::BoundsLengthMismatch {
                lower: lower.len(),
                upper: upper.len(),
            });
        }
        if lower.is_empty() {
            return Err(PsoError::EmptySpace);
        }
        for (dim, (&lo, &hi)) in lower.iter().zip(&upper).enumerate() {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(PsoError::DegenerateBounds {
                    dim,
                    lower: lo,
                    upper: hi,
                });
            }
        }
        Ok(Self { lower, upper })
    }

    /// The unit cube `[0, 1]^dim`.
    pub fn unit(dim: usize) -> Result<Self, PsoError> {
        Self::new(vec![0.0; dim], vec![1.0; dim])
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

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x.iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(&v, (&lo, &hi))| lo <= v && v <= hi)
    }
}

/// The four behavioral parameters of the swarm. Doubles as a GA chromosome
/// with genes in the order `(alpha1, alpha2, omega, beta)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParameterSet {
    /// Attraction towards the particle's own best position.
    pub alpha1: f64,
    /// Attraction towards the swarm's best position.
    pub alpha2: f64,
    /// Inertia.
    pub omega: f64,
    /// Velocity restriction as a fraction of each dimension's range.
    pub beta: f64,
}

impl ParameterSet {
    pub const GENES: usize = 4;
    pub const GENE_NAMES: [&'static str; 4] = ["alpha1", "alpha2", "omega", "beta"];

    /// General-purpose setting of Eberhart and Shi with the full-range bound.
    pub const KENNEDY: Self = Self {
        alpha1: 1.49445,
        alpha2: 1.49445,
        omega: 0.729,
        beta: 1.0,
    };

    /// Pedersen's tabulated set for a comparable continuous problem size.
    pub const PEDERSEN: Self = Self {
        alpha1: -0.2746,
        alpha2: 4.8976,
        omega: -0.3488,
        beta: 1.0,
    };

    /// Set learned by GA tuning on LA02, LA18 and LA20.
    pub const APSO: Self = Self {
        alpha1: 1.76428,
        alpha2: 1.38203,
        omega: 0.730135,
        beta: 0.280868,
    };

    pub fn new(alpha1: f64, alpha2: f64, omega: f64, beta: f64) -> Result<Self, PsoError> {
        let params = Self {
            alpha1,
            alpha2,
            omega,
            beta,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<(), PsoError> {
        for (name, value) in Self::GENE_NAMES.iter().zip(self.genes()) {
            if !value.is_finite() {
                return Err(PsoError::NonFiniteParameter { name, value });
            }
        }
        check_beta(self.beta)
    }

    pub fn genes(&self) -> [f64; 4] {
        [self.alpha1, self.alpha2, self.omega, self.beta]
    }

    pub fn from_genes(genes: [f64; 4]) -> Self {
        let [alpha1, alpha2, omega, beta] = genes;
        Self {
            alpha1,
            alpha2,
            omega,
            beta,
        }
    }

    /// Built-in sets by label: `kennedy`, `pedersen`, `apso`.
    pub fn preset(label: &str) -> Option<Self> {
        match label.to_ascii_lowercase().as_str() {
            "kennedy" => Some(Self::KENNEDY),
            "pedersen" => Some(Self::PEDERSEN),
            "apso" => Some(Self::APSO),
            _ => None,
        }
    }

    pub const PRESET_LABELS: [&'static str; 3] = ["kennedy", "pedersen", "apso"];
}

fn check_beta(beta: f64) -> Result<(), PsoError> {
    if (BETA_MIN..=BETA_MAX).contains(&beta) {
        Ok(())
    } else {
        Err(PsoError::BetaOutOfRange(beta))
    }
}

/// Swarm size, iteration budget and seed of one run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PsoConfig {
    pub n_particles: usize,
    pub n_iterations: usize,
    pub seed: u64,
    /// Clamp positions into the search box after each move. Turning this off
    /// gives the unmodified update, in which particles may leave the box.
    pub clamp_position: bool,
}

impl Default for PsoConfig {
    fn default() -> Self {
        Self {
            n_particles: 50,
            n_iterations: 100,
            seed: 0,
            clamp_position: true,
        }
    }
}

impl PsoConfig {
    pub fn with_seed(self, seed: u64) -> Self {
        Self { seed, ..self }
    }

    pub fn validate(&self) -> Result<(), PsoError> {
        if self.n_particles == 0 {
            return Err(PsoError::ZeroCount("n_particles"));
        }
        if self.n_iterations == 0 {
            return Err(PsoError::ZeroCount("n_iterations"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParticleState {
    pub position: Vec<f64>,
    pub velocity: Vec<f64>,
    pub best_position: Vec<f64>,
    pub best_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SwarmState {
    pub particles: Vec<ParticleState>,
    pub global_best_position: Vec<f64>,
    pub global_best_value: f64,
    /// Velocity bound fixed at creation.
    pub vmax: Vec<f64>,
    pub iteration: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub best_position: Vec<f64>,
    pub best_value: f64,
    /// Global best after initialization, then after each iteration.
    pub history: Vec<f64>,
    pub evaluations: usize,
}

/// `vmax[i] = beta * (upper[i] - lower[i])`.
pub fn compute_vmax(space: &SearchSpace, beta: f64) -> Result<Vec<f64>, PsoError> {
    check_beta(beta)?;
    Ok(space
        .lower
        .iter()
        .zip(&space.upper)
        .map(|(lo, hi)| beta * (hi - lo))
        .collect())
}

/// Component-wise `min(vmax, max(-vmax, v))`.
pub fn clamp_velocity(v: &[f64], vmax: &[f64]) -> Result<Vec<f64>, PsoError> {
    if v.len() != vmax.len() {
        return Err(PsoError::LengthMismatch {
            expected: vmax.len(),
            found: v.len(),
        });
    }
    Ok(v.iter()
        .zip(vmax)
        .map(|(&v, &m)| clamp_component(v, m))
        .collect())
}

#[inline]
fn clamp_component(v: f64, m: f64) -> f64 {
    v.max(-m).min(m)
}

fn evaluate<O: Objective + ?Sized>(objective: &mut O, x: &[f64]) -> Result<f64, PsoError> {
    let value = objective.evaluate(x);
    if value.is_finite() {
        Ok(value)
    } else {
        Err(PsoError::NumericalFault("objective"))
    }
}

/// Random positions inside the box, random velocities inside `[-vmax, vmax]`,
/// personal bests at the starting points and the global best among them.
pub fn init_swarm<O: Objective + ?Sized>(
    space: &SearchSpace,
    config: &PsoConfig,
    params: &ParameterSet,
    rng: &mut Rng,
    objective: &mut O,
) -> Result<SwarmState, PsoError> {
    params.validate()?;
    config.validate()?;
    let vmax = compute_vmax(space, params.beta)?;
    let dim = space.dim();

    let mut particles = Vec::with_capacity(config.n_particles);
    let mut best: Option<(usize, f64)> = None;
    for idx in 0..config.n_particles {
        let mut position = Vec::with_capacity(dim);
        let mut velocity = Vec::with_capacity(dim);
        for ((&lo, &hi), &m) in space.lower.iter().zip(&space.upper).zip(&vmax) {
            position.push(rng.gen_range(lo..=hi));
            velocity.push(rng.gen_range(-m..=m));
        }
        let value = evaluate(objective, &position)?;
        if best.is_none_or(|(_, b)| value < b) {
            best = Some((idx, value));
        }
        particles.push(ParticleState {
            best_position: position.clone(),
            position,
            velocity,
            best_value: value,
        });
    }

    let (best_idx, global_best_value) = best.expect("n_particles >= 1");
    Ok(SwarmState {
        global_best_position: particles[best_idx].position.clone(),
        global_best_value,
        particles,
        vmax,
        iteration: 0,
    })
}

/// Moves one particle and updates its personal best. Returns the objective
/// value at the new position.
#[allow(clippy::too_many_arguments)]
pub fn update_particle<O: Objective + ?Sized>(
    particle: &mut ParticleState,
    global_best: &[f64],
    params: &ParameterSet,
    vmax: &[f64],
    space: &SearchSpace,
    clamp_position: bool,
    rng: &mut Rng,
    objective: &mut O,
) -> Result<f64, PsoError> {
    let dim = space.dim();
    for len in [
        particle.position.len(),
        particle.velocity.len(),
        particle.best_position.len(),
        global_best.len(),
        vmax.len(),
    ] {
        if len != dim {
            return Err(PsoError::LengthMismatch {
                expected: dim,
                found: len,
            });
        }
    }

    for i in 0..dim {
        let r1: f64 = rng.sample(Open01);
        let r2: f64 = rng.sample(Open01);
        let x = particle.position[i];
        let v = params.omega * particle.velocity[i]
            + params.alpha1 * (particle.best_position[i] - x) * r1
            + params.alpha2 * (global_best[i] - x) * r2;
        if !v.is_finite() {
            return Err(PsoError::NumericalFault("velocity"));
        }
        let v = clamp_component(v, vmax[i]);
        let mut x = x + v;
        if clamp_position {
            x = x.clamp(space.lower[i], space.upper[i]);
        }
        particle.velocity[i] = v;
        particle.position[i] = x;
    }

    let value = evaluate(objective, &particle.position)?;
    if value < particle.best_value {
        particle.best_value = value;
        particle.best_position.clone_from(&particle.position);
    }
    Ok(value)
}

/// One synchronous iteration: every particle in index order, with the global
/// best refreshed after each particle.
pub fn step_swarm<O: Objective + ?Sized>(
    swarm: &mut SwarmState,
    params: &ParameterSet,
    space: &SearchSpace,
    clamp_position: bool,
    rng: &mut Rng,
    objective: &mut O,
) -> Result<(), PsoError> {
    let SwarmState {
        particles,
        global_best_position,
        global_best_value,
        vmax,
        ..
    } = swarm;
    for particle in particles.iter_mut() {
        update_particle(
            particle,
            global_best_position,
            params,
            vmax,
            space,
            clamp_position,
            rng,
            objective,
        )?;
        if particle.best_value < *global_best_value {
            *global_best_value = particle.best_value;
            global_best_position.clone_from(&particle.best_position);
        }
    }
    swarm.iteration += 1;
    Ok(())
}

/// Runs exactly `config.n_iterations` iterations from a swarm seeded by
/// `config.seed`.
pub fn run_pso<O: Objective + ?Sized>(
    objective: &mut O,
    space: &SearchSpace,
    config: &PsoConfig,
    params: &ParameterSet,
) -> Result<RunResult, PsoError> {
    let mut rng = seed::rng_from(config.seed);
    let mut swarm = init_swarm(space, config, params, &mut rng, objective)?;
    let mut history = Vec::with_capacity(config.n_iterations + 1);
    history.push(swarm.global_best_value);
    for _ in 0..config.n_iterations {
        step_swarm(
            &mut swarm,
            params,
            space,
            config.clamp_position,
            &mut rng,
            objective,
        )?;
        history.push(swarm.global_best_value);
    }
    Ok(RunResult {
        best_position: swarm.global_best_position,
        best_value: swarm.global_best_value,
        history,
        evaluations: config.n_particles * (config.n_iterations + 1),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sphere(x: &[f64]) -> f64 {
        x.iter().map(|v| v * v).sum()
    }

    #[test]
    fn vmax_examples() {
        let unit = SearchSpace::unit(3).unwrap();
        assert_eq!(compute_vmax(&unit, 1.0).unwrap(), vec![1.0; 3]);
        assert_eq!(compute_vmax(&unit, 0.280868).unwrap(), vec![0.280868; 3]);
        let space = SearchSpace::new(vec![-2.0, 0.0], vec![3.0, 10.0]).unwrap();
        assert_eq!(compute_vmax(&space, 0.5).unwrap(), vec![2.5, 5.0]);
    }

    #[test]
    fn vmax_rejects_beta_outside_range() {
        let unit = SearchSpace::unit(2).unwrap();
        for beta in [0.0, 0.009, 1.01, -0.5, f64::NAN] {
            assert!(matches!(
                compute_vmax(&unit, beta),
                Err(PsoError::BetaOutOfRange(_))
            ));
        }
        assert!(compute_vmax(&unit, BETA_MIN).is_ok());
    }

    #[test]
    fn clamp_examples() {
        assert_eq!(clamp_velocity(&[0.5], &[1.0]).unwrap(), vec![0.5]);
        assert_eq!(
            clamp_velocity(&[2.0, -3.0], &[1.0, 1.0]).unwrap(),
            vec![1.0, -1.0]
        );
        assert_eq!(
            clamp_velocity(&[-0.28, 0.29], &[0.280868, 0.280868]).unwrap(),
            vec![-0.28, 0.280868]
        );
        assert!(matches!(
            clamp_velocity(&[1.0, 2.0], &[1.0]),
            Err(PsoError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn space_validation() {
        assert!(SearchSpace::new(vec![], vec![]).is_err());
        assert!(SearchSpace::new(vec![0.0], vec![0.0]).is_err());
        assert!(SearchSpace::new(vec![0.0, 1.0], vec![1.0]).is_err());
        assert!(SearchSpace::new(vec![1.0], vec![0.0]).is_err());
    }

    #[test]
    fn parameter_validation_allows_negative_weights() {
        assert!(ParameterSet::PEDERSEN.validate().is_ok());
        assert!(ParameterSet::new(1.0, 1.0, f64::INFINITY, 0.5).is_err());
        assert!(ParameterSet::new(1.0, 1.0, 0.5, 0.005).is_err());
    }

    #[test]
    fn init_swarm_respects_bounds() {
        let space = SearchSpace::new(vec![-1.0, 0.0, 5.0], vec![1.0, 2.0, 6.0]).unwrap();
        let params = ParameterSet {
            beta: BETA_MIN,
            ..ParameterSet::KENNEDY
        };
        let config = PsoConfig::default();
        let mut rng = seed::rng_from(3);
        let swarm = init_swarm(&space, &config, &params, &mut rng, &mut sphere).unwrap();
        assert_eq!(swarm.particles.len(), 50);
        for p in &swarm.particles {
            assert!(space.contains(&p.position));
            for (v, m) in p.velocity.iter().zip(&swarm.vmax) {
                assert!(v.abs() <= *m);
            }
            assert_eq!(p.best_position, p.position);
        }
        let min = swarm
            .particles
            .iter()
            .map(|p| p.best_value)
            .fold(f64::INFINITY, f64::min);
        assert_eq!(swarm.global_best_value, min);
    }

    #[test]
    fn init_swarm_is_deterministic() {
        let space = SearchSpace::unit(4).unwrap();
        let config = PsoConfig::default();
        let a = init_swarm(
            &space,
            &config,
            &ParameterSet::KENNEDY,
            &mut seed::rng_from(9),
            &mut sphere,
        )
        .unwrap();
        let b = init_swarm(
            &space,
            &config,
            &ParameterSet::KENNEDY,
            &mut seed::rng_from(9),
            &mut sphere,
        )
        .unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn fixed_point_when_everything_coincides() {
        let space = SearchSpace::unit(2).unwrap();
        let mut p = ParticleState {
            position: vec![0.4, 0.6],
            velocity: vec![0.0, 0.0],
            best_position: vec![0.4, 0.6],
            best_value: sphere(&[0.4, 0.6]),
        };
        let params = ParameterSet {
            alpha1: 0.0,
            alpha2: 0.0,
            omega: 0.9,
            beta: 1.0,
        };
        let g = p.position.clone();
        let mut rng = seed::rng_from(1);
        for _ in 0..5 {
            update_particle(
                &mut p,
                &g,
                &params,
                &[1.0, 1.0],
                &space,
                true,
                &mut rng,
                &mut sphere,
            )
            .unwrap();
        }
        assert_eq!(p.position, vec![0.4, 0.6]);
        assert_eq!(p.velocity, vec![0.0, 0.0]);
    }

    #[test]
    fn pure_inertia_moves_by_velocity() {
        let space = SearchSpace::new(vec![-10.0], vec![10.0]).unwrap();
        let mut p = ParticleState {
            position: vec![0.0],
            velocity: vec![0.25],
            best_position: vec![0.0],
            best_value: 0.0,
        };
        let params = ParameterSet {
            alpha1: 0.0,
            alpha2: 0.0,
            omega: 1.0,
            beta: 1.0,
        };
        let mut rng = seed::rng_from(2);
        for step in 1..=4 {
            update_particle(
                &mut p,
                &[0.0],
                &params,
                &[20.0],
                &space,
                true,
                &mut rng,
                &mut sphere,
            )
            .unwrap();
            assert_eq!(p.position[0], 0.25 * step as f64);
            assert_eq!(p.velocity[0], 0.25);
        }
    }

    #[test]
    fn constant_objective_keeps_initial_best() {
        let space = SearchSpace::unit(3).unwrap();
        let result = run_pso(
            &mut |_: &[f64]| 5.0,
            &space,
            &PsoConfig::default(),
            &ParameterSet::KENNEDY,
        )
        .unwrap();
        assert_eq!(result.best_value, 5.0);
        assert_eq!(result.history, vec![5.0; 101]);
    }

    #[test]
    fn one_dimensional_quadratic_converges() {
        let space = SearchSpace::unit(1).unwrap();
        let result = run_pso(
            &mut |x: &[f64]| (x[0] - 0.3).powi(2),
            &space,
            &PsoConfig::default(),
            &ParameterSet::KENNEDY,
        )
        .unwrap();
        assert!(result.best_value < 1e-6, "{}", result.best_value);
        assert!((result.best_position[0] - 0.3).abs() < 1e-3);
    }

    #[test]
    fn sphere_smoke_test() {
        let space = SearchSpace::new(vec![-5.0; 2], vec![5.0; 2]).unwrap();
        let result = run_pso(
            &mut sphere,
            &space,
            &PsoConfig::default(),
            &ParameterSet::KENNEDY,
        )
        .unwrap();
        assert!(result.best_value < 1e-3, "{}", result.best_value);
    }

    #[test]
    fn non_finite_objective_is_reported() {
        let space = SearchSpace::unit(1).unwrap();
        let err = run_pso(
            &mut |_: &[f64]| f64::NAN,
            &space,
            &PsoConfig::default(),
            &ParameterSet::KENNEDY,
        )
        .unwrap_err();
        assert_eq!(err, PsoError::NumericalFault("objective"));
    }

    #[test]
    fn zero_counts_rejected() {
        let space = SearchSpace::unit(1).unwrap();
        let config = PsoConfig {
            n_particles: 0,
            ..PsoConfig::default()
        };
        assert!(run_pso(&mut sphere, &space, &config, &ParameterSet::KENNEDY).is_err());
    }
}
