//! Job-shop model, random-key decoding and schedule checks.
//!
//! A position `x` in `[0, 1]^(n*m)` is decoded in three steps:
//!
//! 1. coordinates are sorted ascending by `(x[i], i)`;
//! 2. coordinate `i` stands for job `i mod n`, and the k-th time a job shows up
//!    in the sorted order it contributes its k-th operation;
//! 3. operations are placed in that order by a [`ScheduleBuilder`].
//!
//! [`decode_position`] uses the semi-active builder: each operation is appended
//! to its machine and starts as soon as both machine and job are free. The
//! swarm objective defaults to the gap-filling builder, which instead puts an
//! operation into the earliest idle interval of its machine that opens after
//! the job is ready and is long enough to hold it. Both produce feasible
//! schedules from every point of the cube; gap filling gives the swarm a much
//! smoother landscape on the LA instances. Time is integral throughout.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::InstanceError;
use crate::pso::{Objective, SearchSpace};

/// Largest instance, in operations, that [`brute_force_optimum`] will accept.
pub const BRUTE_FORCE_LIMIT: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Operation {
    pub machine: usize,
    pub duration: u64,
}

impl Operation {
    pub fn new(machine: usize, duration: u64) -> Self {
        Self { machine, duration }
    }
}

/// `n_jobs` jobs, each visiting all `n_machines` machines exactly once in its
/// own route order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsspInstance {
    n_jobs: usize,
    n_machines: usize,
    jobs: Vec<Vec<Operation>>,
}

impl JsspInstance {
    pub fn new(jobs: Vec<Vec<Operation>>) -> Result<Self, InstanceError> {
        let n_jobs = jobs.len();
        let n_machines = jobs.first().map_or(0, Vec::len);
        if n_jobs == 0 || n_machines == 0 {
            return Err(InstanceError::Empty);
        }
        for (job, route) in jobs.iter().enumerate() {
            if route.len() != n_machines {
                return Err(InstanceError::RouteLength {
                    job,
                    expected: n_machines,
                    found: route.len(),
                });
            }
            let mut seen = vec![false; n_machines];
            for op in route {
                if op.machine >= n_machines {
                    return Err(InstanceError::MachineOutOfRange {
                        job,
                        machine: op.machine,
                    });
                }
                if std::mem::replace(&mut seen[op.machine], true) {
                    return Err(InstanceError::DuplicateMachine {
                        job,
                        machine: op.machine,
                    });
                }
            }
        }
        Ok(Self {
            n_jobs,
            n_machines,
            jobs,
        })
    }

    pub fn n_jobs(&self) -> usize {
        self.n_jobs
    }

    pub fn n_machines(&self) -> usize {
        self.n_machines
    }

    pub fn n_ops(&self) -> usize {
        self.n_jobs * self.n_machines
    }

    pub fn jobs(&self) -> &[Vec<Operation>] {
        &self.jobs
    }

    pub fn op(&self, job: usize, index: usize) -> Operation {
        self.jobs[job][index]
    }

    pub fn job_durations(&self) -> Vec<u64> {
        self.jobs
            .iter()
            .map(|route| route.iter().map(|op| op.duration).sum())
            .collect()
    }

    pub fn machine_loads(&self) -> Vec<u64> {
        let mut loads = vec![0; self.n_machines];
        for op in self.jobs.iter().flatten() {
            loads[op.machine] += op.duration;
        }
        loads
    }

    /// Longest job chain or busiest machine, whichever is larger.
    pub fn lower_bound(&self) -> u64 {
        let chain = self.job_durations().into_iter().max().unwrap_or(0);
        let load = self.machine_loads().into_iter().max().unwrap_or(0);
        chain.max(load)
    }

    /// Makespan of running every operation back to back.
    pub fn total_duration(&self) -> u64 {
        self.jobs.iter().flatten().map(|op| op.duration).sum()
    }
}

/// Start time of every operation, indexed `[job][route position]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schedule {
    pub start: Vec<Vec<u64>>,
    pub makespan: u64,
}

/// One scheduled operation as seen from its machine.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Slot {
    pub job: usize,
    pub index: usize,
    pub start: u64,
    pub end: u64,
}

impl Schedule {
    /// Operations of each machine ordered by start time.
    pub fn machine_sequences(&self, inst: &JsspInstance) -> Vec<Vec<Slot>> {
        let mut machines = vec![Vec::new(); inst.n_machines()];
        for (job, starts) in self.start.iter().enumerate() {
            for (index, &start) in starts.iter().enumerate() {
                let op = inst.op(job, index);
                machines[op.machine].push(Slot {
                    job,
                    index,
                    start,
                    end: start + op.duration,
                });
            }
        }
        for slots in &mut machines {
            slots.sort_by_key(|s| (s.start, s.end, s.job));
        }
        machines
    }
}

pub fn makespan(schedule: &Schedule) -> u64 {
    schedule.makespan
}

/// A broken constraint found by [`validate_schedule`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Violation {
    JobCount {
        expected: usize,
        found: usize,
    },
    OperationCount {
        job: usize,
        expected: usize,
        found: usize,
    },
    /// Operation `index` of `job` starts before its predecessor finishes.
    Precedence {
        job: usize,
        index: usize,
        start: u64,
        ready: u64,
    },
    /// Two operations share `machine` during overlapping intervals.
    MachineOverlap {
        machine: usize,
        first: (usize, usize),
        second: (usize, usize),
    },
    MakespanMismatch {
        recorded: u64,
        actual: u64,
    },
}

/// Checks job precedence, machine exclusivity, coverage and the recorded
/// makespan. An empty result means the schedule is feasible.
pub fn validate_schedule(schedule: &Schedule, inst: &JsspInstance) -> Vec<Violation> {
    let mut violations = Vec::new();
    if schedule.start.len() != inst.n_jobs() {
        violations.push(Violation::JobCount {
            expected: inst.n_jobs(),
            found: schedule.start.len(),
        });
        return violations;
    }
    let mut covered = true;
    for (job, starts) in schedule.start.iter().enumerate() {
        if starts.len() != inst.n_machines() {
            violations.push(Violation::OperationCount {
                job,
                expected: inst.n_machines(),
                found: starts.len(),
            });
            covered = false;
        }
    }
    if !covered {
        return violations;
    }

    for (job, starts) in schedule.start.iter().enumerate() {
        for index in 1..starts.len() {
            let ready = starts[index - 1] + inst.op(job, index - 1).duration;
            if starts[index] < ready {
                violations.push(Violation::Precedence {
                    job,
                    index,
                    start: starts[index],
                    ready,
                });
            }
        }
    }

    for (machine, slots) in schedule.machine_sequences(inst).iter().enumerate() {
        for (i, a) in slots.iter().enumerate() {
            for b in &slots[i + 1..] {
                if b.start >= a.end {
                    break;
                }
                if a.start < b.end && a.end > a.start && b.end > b.start {
                    violations.push(Violation::MachineOverlap {
                        machine,
                        first: (a.job, a.index),
                        second: (b.job, b.index),
                    });
                }
            }
        }
    }

    let actual = schedule
        .start
        .iter()
        .enumerate()
        .flat_map(|(job, starts)| {
            starts
                .iter()
                .enumerate()
                .map(move |(index, &s)| s + inst.op(job, index).duration)
        })
        .max()
        .unwrap_or(0);
    if actual != schedule.makespan {
        violations.push(Violation::MakespanMismatch {
            recorded: schedule.makespan,
            actual,
        });
    }
    violations
}

fn check_position(x: &[f64], inst: &JsspInstance) -> Result<(), InstanceError> {
    if x.len() != inst.n_ops() {
        return Err(InstanceError::PositionLength {
            expected: inst.n_ops(),
            found: x.len(),
        });
    }
    Ok(())
}

// -0.0 and 0.0 must tie so that decoding depends on numeric order only.
#[inline]
fn key_order(a: &(f64, u32), b: &(f64, u32)) -> Ordering {
    (a.0 + 0.0)
        .total_cmp(&(b.0 + 0.0))
        .then_with(|| a.1.cmp(&b.1))
}

/// Job sequence (operation-based permutation with repetition) encoded by `x`.
pub fn operation_sequence(x: &[f64], inst: &JsspInstance) -> Result<Vec<usize>, InstanceError> {
    check_position(x, inst)?;
    let mut keys: Vec<(f64, u32)> = x.iter().enumerate().map(|(i, &v)| (v, i as u32)).collect();
    keys.sort_unstable_by(key_order);
    Ok(keys
        .into_iter()
        .map(|(_, i)| i as usize % inst.n_jobs())
        .collect())
}

/// How a job sequence is turned into start times.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScheduleBuilder {
    /// Append each operation after everything already on its machine.
    SemiActive,
    /// Insert each operation into the earliest machine gap that fits it.
    #[default]
    GapFilling,
}

impl ScheduleBuilder {
    pub fn parse(text: &str) -> Option<Self> {
        match text.to_ascii_lowercase().replace('_', "-").as_str() {
            "semi-active" | "semiactive" => Some(Self::SemiActive),
            "gap-filling" | "gapfilling" | "active" => Some(Self::GapFilling),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::SemiActive => "semi-active",
            Self::GapFilling => "gap-filling",
        }
    }
}

/// Earliest start `>= ready` for an operation of length `duration` on a
/// machine whose busy intervals are `busy` (sorted, disjoint). Returns the
/// start and the insertion index.
#[inline]
fn earliest_gap(busy: &[(u64, u64)], ready: u64, duration: u64) -> (u64, usize) {
    let mut free_from = 0;
    for (k, &(s, e)) in busy.iter().enumerate() {
        let t = ready.max(free_from);
        if t + duration <= s {
            return (t, k);
        }
        free_from = e;
    }
    (ready.max(free_from), busy.len())
}

/// Schedule for a job sequence under `builder`. Each entry names a job; the
/// k-th occurrence of a job places its k-th operation.
///
/// # Panics
/// If a job occurs more often than it has operations.
pub fn build_schedule(
    sequence: &[usize],
    inst: &JsspInstance,
    builder: ScheduleBuilder,
) -> Schedule {
    match builder {
        ScheduleBuilder::SemiActive => build_semi_active(sequence, inst),
        ScheduleBuilder::GapFilling => build_gap_filling(sequence, inst),
    }
}

fn build_gap_filling(sequence: &[usize], inst: &JsspInstance) -> Schedule {
    let mut job_ready = vec![0u64; inst.n_jobs()];
    let mut busy = vec![Vec::with_capacity(inst.n_jobs()); inst.n_machines()];
    let mut start = vec![Vec::with_capacity(inst.n_machines()); inst.n_jobs()];
    let mut span = 0;
    for &job in sequence {
        let op = inst.op(job, start[job].len());
        let (t, k) = earliest_gap(&busy[op.machine], job_ready[job], op.duration);
        let end = t + op.duration;
        busy[op.machine].insert(k, (t, end));
        start[job].push(t);
        job_ready[job] = end;
        span = span.max(end);
    }
    Schedule {
        start,
        makespan: span,
    }
}

/// Semi-active schedule for a job sequence. Each entry names a job; the k-th
/// occurrence of a job schedules its k-th operation.
///
/// # Panics
/// If a job occurs more often than it has operations.
pub fn build_semi_active(sequence: &[usize], inst: &JsspInstance) -> Schedule {
    let mut next = vec![0usize; inst.n_jobs()];
    let mut job_ready = vec![0u64; inst.n_jobs()];
    let mut machine_free = vec![0u64; inst.n_machines()];
    let mut start = vec![Vec::with_capacity(inst.n_machines()); inst.n_jobs()];
    let mut span = 0;
    for &job in sequence {
        let op = inst.op(job, next[job]);
        let t = job_ready[job].max(machine_free[op.machine]);
        let end = t + op.duration;
        start[job].push(t);
        job_ready[job] = end;
        machine_free[op.machine] = end;
        next[job] += 1;
        span = span.max(end);
    }
    Schedule {
        start,
        makespan: span,
    }
}

/// Decodes a random-key position into a semi-active schedule.
pub fn decode_position(x: &[f64], inst: &JsspInstance) -> Result<Schedule, InstanceError> {
    decode_position_with(x, inst, ScheduleBuilder::SemiActive)
}

pub fn decode_position_with(
    x: &[f64],
    inst: &JsspInstance,
    builder: ScheduleBuilder,
) -> Result<Schedule, InstanceError> {
    let sequence = operation_sequence(x, inst)?;
    Ok(build_schedule(&sequence, inst, builder))
}

/// A position whose decoding yields `sequence`: the k-th occurrence of job `j`
/// is placed on coordinate `j + k*n_jobs` with a key equal to its rank.
pub fn sequence_to_position(sequence: &[usize], inst: &JsspInstance) -> Vec<f64> {
    let n = inst.n_jobs();
    let len = sequence.len().max(1) as f64;
    let mut seen = vec![0usize; n];
    let mut x = vec![0.0; inst.n_ops()];
    for (rank, &job) in sequence.iter().enumerate() {
        x[job + seen[job] * n] = rank as f64 / len;
        seen[job] += 1;
    }
    x
}

/// Reusable makespan evaluator that keeps its scratch buffers between calls.
#[derive(Debug, Clone)]
pub struct Decoder<'a> {
    inst: &'a JsspInstance,
    builder: ScheduleBuilder,
    keys: Vec<(f64, u32)>,
    busy: Vec<Vec<(u64, u64)>>,
    next: Vec<usize>,
    job_ready: Vec<u64>,
    machine_free: Vec<u64>,
}

impl<'a> Decoder<'a> {
    pub fn new(inst: &'a JsspInstance, builder: ScheduleBuilder) -> Self {
        Self {
            inst,
            builder,
            keys: Vec::with_capacity(inst.n_ops()),
            busy: vec![Vec::with_capacity(inst.n_jobs()); inst.n_machines()],
            next: vec![0; inst.n_jobs()],
            job_ready: vec![0; inst.n_jobs()],
            machine_free: vec![0; inst.n_machines()],
        }
    }

    pub fn instance(&self) -> &'a JsspInstance {
        self.inst
    }

    pub fn builder(&self) -> ScheduleBuilder {
        self.builder
    }

    /// Makespan of `decode_position_with(x, builder)` without materializing
    /// the schedule.
    pub fn makespan(&mut self, x: &[f64]) -> Result<u64, InstanceError> {
        check_position(x, self.inst)?;
        let n = self.inst.n_jobs();
        self.keys.clear();
        self.keys
            .extend(x.iter().enumerate().map(|(i, &v)| (v, i as u32)));
        self.keys.sort_unstable_by(key_order);
        self.next.fill(0);
        self.job_ready.fill(0);
        self.machine_free.fill(0);
        let jobs = self.inst.jobs();
        let mut span = 0;
        if self.builder == ScheduleBuilder::GapFilling {
            self.busy.iter_mut().for_each(Vec::clear);
            for &(_, i) in &self.keys {
                let job = i as usize % n;
                let op = jobs[job][self.next[job]];
                let busy = &mut self.busy[op.machine];
                let (t, k) = earliest_gap(busy, self.job_ready[job], op.duration);
                let end = t + op.duration;
                busy.insert(k, (t, end));
                self.job_ready[job] = end;
                self.next[job] += 1;
                span = span.max(end);
            }
            return Ok(span);
        }
        for &(_, i) in &self.keys {
            let job = i as usize % n;
            let op = jobs[job][self.next[job]];
            let end = self.job_ready[job].max(self.machine_free[op.machine]) + op.duration;
            self.job_ready[job] = end;
            self.machine_free[op.machine] = end;
            self.next[job] += 1;
            span = span.max(end);
        }
        Ok(span)
    }
}

/// PSO objective: makespan of the decoded position.
#[derive(Debug, Clone)]
pub struct JsspObjective<'a> {
    decoder: Decoder<'a>,
}

impl Objective for JsspObjective<'_> {
    fn evaluate(&mut self, x: &[f64]) -> f64 {
        // Positions handed out by the swarm always have the right length.
        self.decoder.makespan(x).map_or(f64::NAN, |m| m as f64)
    }
}

/// Objective and unit-cube search space for an instance, using the default
/// (gap-filling) builder.
pub fn jssp_objective(inst: &JsspInstance) -> (JsspObjective<'_>, SearchSpace) {
    jssp_objective_with(inst, ScheduleBuilder::default())
}

pub fn jssp_objective_with(
    inst: &JsspInstance,
    builder: ScheduleBuilder,
) -> (JsspObjective<'_>, SearchSpace) {
    let space = SearchSpace::unit(inst.n_ops()).expect("instances have at least one operation");
    (
        JsspObjective {
            decoder: Decoder::new(inst, builder),
        },
        space,
    )
}

/// Exact minimum makespan over all job sequences, each decoded semi-actively.
/// Every feasible schedule can be left-shifted into one of these, so this is
/// the instance's optimum. Only for instances with at most
/// [`BRUTE_FORCE_LIMIT`] operations.
pub fn brute_force_optimum(inst: &JsspInstance) -> Result<u64, InstanceError> {
    if inst.n_ops() > BRUTE_FORCE_LIMIT {
        return Err(InstanceError::TooLarge {
            ops: inst.n_ops(),
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    let mut search = Exhaustive {
        inst,
        next: vec![0; inst.n_jobs()],
        job_ready: vec![0; inst.n_jobs()],
        machine_free: vec![0; inst.n_machines()],
        best: u64::MAX,
    };
    search.descend(0, 0);
    Ok(search.best)
}

struct Exhaustive<'a> {
    inst: &'a JsspInstance,
    next: Vec<usize>,
    job_ready: Vec<u64>,
    machine_free: Vec<u64>,
    best: u64,
}

impl Exhaustive<'_> {
    fn descend(&mut self, placed: usize, span: u64) {
        if placed == self.inst.n_ops() {
            self.best = self.best.min(span);
            return;
        }
        for job in 0..self.inst.n_jobs() {
            let index = self.next[job];
            if index == self.inst.n_machines() {
                continue;
            }
            let op = self.inst.op(job, index);
            let saved = (self.job_ready[job], self.machine_free[op.machine]);
            let end = saved.0.max(saved.1) + op.duration;
            self.job_ready[job] = end;
            self.machine_free[op.machine] = end;
            self.next[job] += 1;
            self.descend(placed + 1, span.max(end));
            self.next[job] -= 1;
            self.job_ready[job] = saved.0;
            self.machine_free[op.machine] = saved.1;
        }
    }
}
