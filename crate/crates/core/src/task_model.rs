//! Sporadic task sets: representation, the `.tasks` text format,
//! utilization, and random instance generation with Uunifast.
//!
//! A task set file looks like
//!
//! ```text
//! # running example
//! cpus 2
//! task 1 1 2
//! task 2 2 2
//! task 1 4 2
//! ```
//!
//! where each `task` line lists `C D T` (WCET, relative deadline, minimal
//! inter-arrival time) in ticks. Line order is task identity.

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use rand::distributions::Open01;
use rand::Rng;

use crate::error::{Error, Result};

/// Upper bound on the number of tasks; task subsets are `u64` masks.
pub const MAX_TASKS: usize = 64;

/// A sporadic task `(C, D, T)`.
///
/// Constructed through [`SporadicTask::new`], which enforces
/// `C, D, T >= 1` and `C <= D`. `D` may exceed `T`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SporadicTask {
    wcet: i32,
    deadline: i32,
    min_interarrival: i32,
}

impl SporadicTask {
    pub fn new(wcet: u32, deadline: u32, min_interarrival: u32) -> Result<Self> {
        if wcet == 0 || deadline == 0 || min_interarrival == 0 {
            return Err(Error::InvalidArgument(format!(
                "task parameters must be positive, got C={wcet} D={deadline} T={min_interarrival}"
            )));
        }
        if wcet > deadline {
            return Err(Error::InvalidArgument(format!(
                "C={wcet} exceeds D={deadline}"
            )));
        }
        let limit = i32::MAX as u32 / 4;
        if deadline > limit || min_interarrival > limit {
            return Err(Error::InvalidArgument("task parameter too large".into()));
        }
        Ok(SporadicTask {
            wcet: wcet as i32,
            deadline: deadline as i32,
            min_interarrival: min_interarrival as i32,
        })
    }

    /// Worst-case execution time `C`.
    pub fn wcet(&self) -> i32 {
        self.wcet
    }

    /// Relative deadline `D`.
    pub fn deadline(&self) -> i32 {
        self.deadline
    }

    /// Minimal inter-arrival time `T`.
    pub fn min_interarrival(&self) -> i32 {
        self.min_interarrival
    }

    /// `T - D`, the offset between `nat` and the time to the deadline.
    pub fn slack_offset(&self) -> i32 {
        self.min_interarrival - self.deadline
    }
}

/// An ordered list of tasks on a platform of `cpus` identical processors.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TaskSet {
    tasks: Vec<SporadicTask>,
    cpus: u32,
}

impl TaskSet {
    pub fn new(tasks: Vec<SporadicTask>, cpus: u32) -> Result<Self> {
        if tasks.is_empty() {
            return Err(Error::InvalidArgument("task set is empty".into()));
        }
        if tasks.len() > MAX_TASKS {
            return Err(Error::InvalidArgument(format!(
                "at most {MAX_TASKS} tasks are supported, got {}",
                tasks.len()
            )));
        }
        if cpus == 0 {
            return Err(Error::InvalidArgument("cpus must be at least 1".into()));
        }
        Ok(TaskSet { tasks, cpus })
    }

    /// Builds a task set from `(C, D, T)` triples.
    pub fn from_triples(triples: &[(u32, u32, u32)], cpus: u32) -> Result<Self> {
        let tasks = triples
            .iter()
            .map(|&(c, d, t)| SporadicTask::new(c, d, t))
            .collect::<Result<Vec<_>>>()?;
        TaskSet::new(tasks, cpus)
    }

    pub fn tasks(&self) -> &[SporadicTask] {
        &self.tasks
    }

    pub fn task(&self, i: usize) -> &SporadicTask {
        &self.tasks[i]
    }

    pub fn len(&self) -> usize {
        self.tasks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tasks.is_empty()
    }

    pub fn cpus(&self) -> u32 {
        self.cpus
    }

    /// Same tasks on a different number of processors.
    pub fn with_cpus(&self, cpus: u32) -> Result<Self> {
        TaskSet::new(self.tasks.clone(), cpus)
    }

    /// Exact `Σ C_i / T_i`.
    pub fn utilization(&self) -> Ratio<u64> {
        self.tasks
            .iter()
            .map(|t| Ratio::new(t.wcet as u64, t.min_interarrival as u64))
            .fold(Ratio::from_integer(0), |acc, u| acc + u)
    }
}

/// Free-function form of [`TaskSet::utilization`].
pub fn utilization(ts: &TaskSet) -> Ratio<u64> {
    ts.utilization()
}

impl fmt::Display for TaskSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "cpus {}", self.cpus)?;
        for t in &self.tasks {
            writeln!(f, "task {} {} {}", t.wcet, t.deadline, t.min_interarrival)?;
        }
        Ok(())
    }
}

impl FromStr for TaskSet {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        parse_task_set(text)
    }
}

/// Parses the line-oriented task set format. Errors carry 1-based line
/// numbers.
pub fn parse_task_set(text: &str) -> Result<TaskSet> {
    let mut lines = significant_lines(text);
    let (first_no, first) = lines
        .next()
        .ok_or_else(|| Error::parse(1, "missing `cpus <m>` header"))?;
    let cpus = parse_cpus_line(first_no, first)?;
    let mut tasks = Vec::new();
    for (no, line) in lines {
        tasks.push(parse_task_line(no, line)?);
    }
    if tasks.is_empty() {
        return Err(Error::parse(first_no, "no `task` lines"));
    }
    TaskSet::new(tasks, cpus).map_err(|e| Error::parse(first_no, e.to_string()))
}

/// Non-empty, non-comment lines with their 1-based line numbers.
pub(crate) fn significant_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

pub(crate) fn parse_cpus_line(no: usize, line: &str) -> Result<u32> {
    let fields: Vec<&str> = line.split_whitespace().collect();
    match fields.as_slice() {
        ["cpus", m] => {
            let m = parse_positive(no, m, "cpus")?;
            Ok(m)
        }
        _ => Err(Error::parse(no, format!("expected `cpus <m>`, got `{line}`"))),
    }
}

pub(crate) fn parse_task_line(no: usize, line: &str) -> Result<SporadicTask> {
    let fields: Vec<&str> = line.split_whitespace().collect();
    match fields.as_slice() {
        ["task", c, d, t] => {
            let c = parse_positive(no, c, "C")?;
            let d = parse_positive(no, d, "D")?;
            let t = parse_positive(no, t, "T")?;
            SporadicTask::new(c, d, t).map_err(|e| Error::parse(no, e.to_string()))
        }
        _ => Err(Error::parse(
            no,
            format!("expected `task <C> <D> <T>`, got `{line}`"),
        )),
    }
}

fn parse_positive(no: usize, field: &str, what: &str) -> Result<u32> {
    let value: u32 = field
        .parse()
        .map_err(|_| Error::parse(no, format!("{what} is not a non-negative integer: `{field}`")))?;
    if value == 0 {
        return Err(Error::parse(no, format!("{what} must be positive")));
    }
    Ok(value)
}

/// How relative deadlines are drawn by [`generate_instance`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum DeadlineMode {
    /// `D = T`.
    Implicit,
    /// `D` uniform in `[C, T]`.
    #[default]
    Constrained,
    /// `D` uniform in `[C, 2T]`.
    Arbitrary,
}

impl fmt::Display for DeadlineMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DeadlineMode::Implicit => "implicit",
            DeadlineMode::Constrained => "constrained",
            DeadlineMode::Arbitrary => "arbitrary",
        })
    }
}

impl FromStr for DeadlineMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "implicit" => Ok(DeadlineMode::Implicit),
            "constrained" => Ok(DeadlineMode::Constrained),
            "arbitrary" => Ok(DeadlineMode::Arbitrary),
            other => Err(Error::InvalidArgument(format!(
                "unknown deadline mode `{other}`"
            ))),
        }
    }
}

/// Uunifast: `n` utilizations, each positive, summing to `u_total`.
pub fn uunifast<R: Rng + ?Sized>(n: usize, u_total: f64, rng: &mut R) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::InvalidArgument("uunifast needs n >= 1".into()));
    }
    if !(u_total > 0.0) || !u_total.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "total utilization must be positive, got {u_total}"
        )));
    }
    let mut out = Vec::with_capacity(n);
    let mut remaining = u_total;
    for i in 1..n {
        let r: f64 = rng.sample(Open01);
        let next = remaining * r.powf(1.0 / (n - i) as f64);
        out.push(remaining - next);
        remaining = next;
    }
    out.push(remaining);
    Ok(out)
}

/// Parameters of [`generate_instance`].
#[derive(Debug, Clone, PartialEq)]
pub struct InstanceParams {
    pub tasks: usize,
    pub cpus: u32,
    pub utilization: f64,
    pub t_min: u32,
    pub t_max: u32,
    pub deadline_mode: DeadlineMode,
}

/// Draws a random task set.
///
/// Utilizations come from Uunifast; any share above 1 is clipped to 1 and
/// its excess handed to the other tasks in proportion to their headroom, so
/// `C <= T` always holds. Then `T` is uniform in `[t_min, t_max]`,
/// `C = max(1, round(u * T))` and `D` follows `deadline_mode`.
pub fn generate_instance<R: Rng + ?Sized>(params: &InstanceParams, rng: &mut R) -> Result<TaskSet> {
    let InstanceParams {
        tasks: n,
        cpus,
        utilization: u_total,
        t_min,
        t_max,
        deadline_mode,
    } = *params;
    if t_min < 2 || t_min > t_max {
        return Err(Error::InvalidArgument(format!(
            "period range [{t_min}, {t_max}] must satisfy 2 <= t_min <= t_max"
        )));
    }
    if u_total > n as f64 + 1e-9 {
        return Err(Error::InvalidArgument(format!(
            "utilization {u_total} cannot be split over {n} tasks of utilization <= 1"
        )));
    }
    let mut shares = uunifast(n, u_total, rng)?;
    clip_shares(&mut shares);
    let mut out = Vec::with_capacity(n);
    for u in shares {
        let t = rng.gen_range(t_min..=t_max);
        let c = ((u * t as f64).round() as u32).clamp(1, t);
        let d = match deadline_mode {
            DeadlineMode::Implicit => t,
            DeadlineMode::Constrained => rng.gen_range(c..=t),
            DeadlineMode::Arbitrary => rng.gen_range(c..=2 * t),
        };
        out.push(SporadicTask::new(c, d, t)?);
    }
    TaskSet::new(out, cpus)
}

fn clip_shares(shares: &mut [f64]) {
    let excess: f64 = shares.iter().map(|u| (u - 1.0).max(0.0)).sum();
    if excess <= 0.0 {
        return;
    }
    let headroom: f64 = shares.iter().map(|u| (1.0 - u).max(0.0)).sum();
    for u in shares.iter_mut() {
        if *u >= 1.0 {
            *u = 1.0;
        } else if headroom > 0.0 {
            *u += excess * (1.0 - *u) / headroom;
            *u = u.min(1.0);
        }
    }
}
