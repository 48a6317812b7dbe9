//! Job-shop scheduling with particle swarm optimization.
//!
//! The crate is split along the lines of the solver pipeline:
//!
//! * [`pso`] is a problem-agnostic continuous PSO engine whose velocity bound
//!   `vmax = beta * (upper - lower)` is fixed once per run.
//! * [`jobshop`] holds the job-shop model, the random-key decoder that turns a
//!   point of `[0, 1]^(n*m)` into a semi-active schedule, and feasibility checks.
//! * [`orlib`] reads OR-Library instance files and carries the registry of
//!   best-known makespans for LA01..LA21.
//! * [`meta`] is a genetic algorithm that tunes the four PSO behavioral
//!   parameters against averaged makespans on training instances.
//! * [`bench`] runs seeded benchmark sweeps and renders reports.

pub mod bench;
pub mod error;
pub mod jobshop;
pub mod meta;
pub mod orlib;
pub mod pso;
pub mod seed;

pub use error::{ConfigError, InstanceError, ParseError, PsoError};
pub use jobshop::{JsspInstance, Operation, Schedule, ScheduleBuilder, Violation};
pub use meta::{GaConfig, GeneBounds, MetaResult};
pub use orlib::InstanceRecord;
pub use pso::{ParameterSet, PsoConfig, RunResult, SearchSpace};
