//! Scheduling game semantics.
//!
//! A node pairs a [`SystemState`] (per-task remaining computation `rct` and
//! ticks until the next allowed release `nat`) with the player about to
//! move. Task nodes release jobs, scheduler nodes pick at most `m` active
//! tasks to run for one tick.
//!
//! The bounded space holds every state with `0 <= rct <= C`, `nat <= T`,
//! `nat >= 0` for idle tasks (idle `nat` is floored at zero when time
//! advances) and laxity `>= -1` for active tasks.

use std::fmt;
use std::str::FromStr;

use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::task_model::{SporadicTask, TaskSet};

pub type Values = SmallVec<[i32; 8]>;

/// Which player moves at a node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Owner {
    /// The coalition of tasks (releases jobs). Rendered `P`.
    Tasks,
    /// The scheduler (assigns CPUs). Rendered `S`.
    Scheduler,
}

impl Owner {
    pub fn other(self) -> Owner {
        match self {
            Owner::Tasks => Owner::Scheduler,
            Owner::Scheduler => Owner::Tasks,
        }
    }

    fn symbol(self) -> char {
        match self {
            Owner::Tasks => 'P',
            Owner::Scheduler => 'S',
        }
    }
}

impl fmt::Display for Owner {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Owner::Tasks => "tasks",
            Owner::Scheduler => "scheduler",
        })
    }
}

/// A set of task indices stored as a bit mask. Used both for
/// `Active`/`Eligible` sets and for moves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct TaskMask(pub u64);

/// A move: the tasks scheduled (scheduler) or released (tasks).
pub type Move = TaskMask;

impl TaskMask {
    pub const EMPTY: TaskMask = TaskMask(0);

    pub fn from_indices(indices: &[usize]) -> TaskMask {
        TaskMask(indices.iter().fold(0, |m, &i| m | (1u64 << i)))
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_subset_of(self, other: TaskMask) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn indices(self) -> impl Iterator<Item = usize> {
        let mask = self.0;
        (0..64).filter(move |i| mask >> i & 1 == 1)
    }

    /// All subsets of `self`, by mask value ascending.
    pub fn subsets(self) -> Vec<TaskMask> {
        let mut out = Vec::with_capacity(1 << self.len());
        let mut sub = 0u64;
        loop {
            out.push(TaskMask(sub));
            if sub == self.0 {
                break;
            }
            sub = (sub.wrapping_sub(self.0)) & self.0;
        }
        out.sort_unstable();
        out
    }
}

impl fmt::Display for TaskMask {
    /// Renders 1-based task numbers, e.g. `{1,2}`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, i) in self.indices().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", i + 1)?;
        }
        f.write_str("}")
    }
}

/// Per-task `(rct, nat)` vectors.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SystemState {
    pub rct: Values,
    pub nat: Values,
}

impl SystemState {
    /// All tasks idle with `nat = 0`.
    pub fn zero(n: usize) -> Self {
        SystemState {
            rct: SmallVec::from_elem(0, n),
            nat: SmallVec::from_elem(0, n),
        }
    }

    /// Builds a state from `(rct, nat)` pairs, the notation used in worked
    /// examples.
    pub fn from_pairs(pairs: &[(i32, i32)]) -> Self {
        SystemState {
            rct: pairs.iter().map(|p| p.0).collect(),
            nat: pairs.iter().map(|p| p.1).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.rct.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rct.is_empty()
    }

    pub fn laxity(&self, i: usize, ts: &TaskSet) -> i32 {
        self.nat[i] - ts.task(i).slack_offset() - self.rct[i]
    }

    pub fn active_set(&self) -> TaskMask {
        TaskMask(
            self.rct
                .iter()
                .enumerate()
                .filter(|(_, &r)| r > 0)
                .fold(0, |m, (i, _)| m | 1 << i),
        )
    }

    /// Idle tasks whose next release is allowed now.
    pub fn eligible_set(&self) -> TaskMask {
        TaskMask(
            self.rct
                .iter()
                .zip(&self.nat)
                .enumerate()
                .filter(|(_, (&r, &n))| r == 0 && n <= 0)
                .fold(0, |m, (i, _)| m | 1 << i),
        )
    }

    pub fn idle_mask(&self) -> u64 {
        !self.active_set().0 & low_bits(self.len())
    }

    /// True when the state lies in the bounded game space.
    pub fn is_valid(&self, ts: &TaskSet) -> bool {
        self.len() == ts.len()
            && ts.tasks().iter().enumerate().all(|(i, t)| {
                local_is_valid(t, self.rct[i], self.nat[i])
            })
    }
}

fn low_bits(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Lowest in-space `nat` for an active task with the given `rct`
/// (laxity exactly -1).
pub(crate) fn min_active_nat(task: &SporadicTask, rct: i32) -> i32 {
    task.slack_offset() + rct - 1
}

pub(crate) fn local_is_valid(task: &SporadicTask, rct: i32, nat: i32) -> bool {
    if rct < 0 || rct > task.wcet() || nat > task.min_interarrival() {
        return false;
    }
    if rct == 0 {
        nat >= 0
    } else {
        nat >= min_active_nat(task, rct)
    }
}

/// Every in-space `(rct, nat)` pair of one task, idle pairs first.
pub(crate) fn local_states(task: &SporadicTask) -> Vec<(i32, i32)> {
    let mut out = Vec::new();
    for nat in 0..=task.min_interarrival() {
        out.push((0, nat));
    }
    for rct in 1..=task.wcet() {
        for nat in min_active_nat(task, rct)..=task.min_interarrival() {
            out.push((rct, nat));
        }
    }
    out
}

/// A vertex of the game graph.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GameNode {
    pub owner: Owner,
    pub state: SystemState,
}

impl GameNode {
    pub fn new(state: SystemState, owner: Owner) -> Self {
        GameNode { owner, state }
    }

    pub fn tasks(pairs: &[(i32, i32)]) -> Self {
        GameNode::new(SystemState::from_pairs(pairs), Owner::Tasks)
    }

    pub fn scheduler(pairs: &[(i32, i32)]) -> Self {
        GameNode::new(SystemState::from_pairs(pairs), Owner::Scheduler)
    }

    pub fn rct(&self) -> &[i32] {
        &self.state.rct
    }

    pub fn nat(&self) -> &[i32] {
        &self.state.nat
    }

    pub fn idle_mask(&self) -> u64 {
        self.state.idle_mask()
    }

    pub fn is_valid(&self, ts: &TaskSet) -> bool {
        self.state.is_valid(ts)
    }

    /// The same state with the other player to move.
    pub fn flipped(&self) -> GameNode {
        GameNode::new(self.state.clone(), self.owner.other())
    }
}

impl fmt::Display for GameNode {
    /// Canonical rendering `P | rct: 1 2 1 | nat: 2 2 2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} | rct:", self.owner.symbol())?;
        for r in &self.state.rct {
            write!(f, " {r}")?;
        }
        f.write_str(" | nat:")?;
        for n in &self.state.nat {
            write!(f, " {n}")?;
        }
        Ok(())
    }
}

impl FromStr for GameNode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let parts: Vec<&str> = s.split('|').map(str::trim).collect();
        let [owner, rct, nat] = parts.as_slice() else {
            return Err(format!("expected `O | rct: .. | nat: ..`, got `{s}`"));
        };
        let owner = match *owner {
            "P" => Owner::Tasks,
            "S" => Owner::Scheduler,
            other => return Err(format!("unknown owner `{other}`")),
        };
        let values = |field: &str, label: &str| -> std::result::Result<Values, String> {
            let rest = field
                .strip_prefix(label)
                .ok_or_else(|| format!("expected `{label}` in `{field}`"))?;
            rest.split_whitespace()
                .map(|v| v.parse::<i32>().map_err(|_| format!("bad integer `{v}`")))
                .collect()
        };
        let rct = values(rct, "rct:")?;
        let nat = values(nat, "nat:")?;
        if rct.len() != nat.len() || rct.is_empty() {
            return Err(format!("rct and nat lengths differ in `{s}`"));
        }
        Ok(GameNode::new(SystemState { rct, nat }, owner))
    }
}

pub fn laxity(s: &SystemState, i: usize, ts: &TaskSet) -> i32 {
    s.laxity(i, ts)
}

pub fn active_set(s: &SystemState) -> TaskMask {
    s.active_set()
}

pub fn eligible_set(s: &SystemState) -> TaskMask {
    s.eligible_set()
}

/// A task node where some active task has negative laxity.
pub fn is_bad(v: &GameNode, ts: &TaskSet) -> bool {
    v.owner == Owner::Tasks && has_negative_laxity(&v.state, ts)
}

fn has_negative_laxity(s: &SystemState, ts: &TaskSet) -> bool {
    (0..s.len()).any(|i| s.rct[i] > 0 && s.laxity(i, ts) < 0)
}

pub fn initial_node(ts: &TaskSet) -> GameNode {
    GameNode::new(SystemState::zero(ts.len()), Owner::Tasks)
}

fn expect_owner(v: &GameNode, expected: Owner) -> Result<()> {
    if v.owner == expected {
        Ok(())
    } else {
        Err(Error::OwnerMismatch {
            expected,
            found: v.owner,
        })
    }
}

/// Subsets of the active tasks with at most `m` elements, ascending by mask.
pub fn scheduler_moves(v: &GameNode, ts: &TaskSet) -> Result<Vec<Move>> {
    expect_owner(v, Owner::Scheduler)?;
    Ok(scheduler_moves_of(&v.state, ts))
}

pub(crate) fn scheduler_moves_of(s: &SystemState, ts: &TaskSet) -> Vec<Move> {
    let m = ts.cpus() as usize;
    s.active_set()
        .subsets()
        .into_iter()
        .filter(|x| x.len() <= m)
        .collect()
}

/// Subsets of the eligible tasks, ascending by mask.
pub fn task_moves(v: &GameNode, _ts: &TaskSet) -> Result<Vec<Move>> {
    expect_owner(v, Owner::Tasks)?;
    Ok(v.state.eligible_set().subsets())
}

/// One tick with the tasks in `x` running.
pub fn succ_scheduler(s: &SystemState, x: Move, ts: &TaskSet) -> Result<SystemState> {
    if !x.is_subset_of(s.active_set()) {
        return Err(Error::IllegalMove(format!("{x} schedules an inactive task")));
    }
    if x.len() > ts.cpus() as usize {
        return Err(Error::IllegalMove(format!(
            "{x} needs {} CPUs, only {} available",
            x.len(),
            ts.cpus()
        )));
    }
    Ok(tick(s, x))
}

/// Unchecked [`succ_scheduler`].
pub(crate) fn tick(s: &SystemState, x: Move) -> SystemState {
    let mut next = s.clone();
    for i in 0..s.len() {
        if x.contains(i) {
            next.rct[i] -= 1;
        }
        next.nat[i] -= 1;
        if next.rct[i] == 0 && next.nat[i] < 0 {
            next.nat[i] = 0;
        }
    }
    next
}

/// Releases a fresh job of every task in `r`.
pub fn succ_tasks(s: &SystemState, r: Move, ts: &TaskSet) -> Result<SystemState> {
    if !r.is_subset_of(s.eligible_set()) {
        return Err(Error::IllegalMove(format!("{r} releases a non-eligible task")));
    }
    Ok(release(s, r, ts))
}

/// Unchecked [`succ_tasks`].
pub(crate) fn release(s: &SystemState, r: Move, ts: &TaskSet) -> SystemState {
    let mut next = s.clone();
    for i in r.indices() {
        let t = ts.task(i);
        next.rct[i] = t.wcet();
        next.nat[i] = t.min_interarrival();
    }
    next
}

/// Every outgoing edge of `v` as `(label, successor)`. Scheduler
/// successors may fall outside the bounded space (laxity -2); they are
/// returned as plain values.
pub fn successors(v: &GameNode, ts: &TaskSet) -> Vec<(Move, GameNode)> {
    match v.owner {
        Owner::Scheduler => scheduler_moves_of(&v.state, ts)
            .into_iter()
            .map(|x| (x, GameNode::new(tick(&v.state, x), Owner::Tasks)))
            .collect(),
        Owner::Tasks => v
            .state
            .eligible_set()
            .subsets()
            .into_iter()
            .map(|r| (r, GameNode::new(release(&v.state, r, ts), Owner::Scheduler)))
            .collect(),
    }
}

/// Number of nodes of the bounded space (both owners).
pub fn space_size(ts: &TaskSet) -> u128 {
    2 * ts
        .tasks()
        .iter()
        .map(|t| local_states(t).len() as u128)
        .product::<u128>()
}

/// Default node cap for [`enumerate_space`].
pub const DEFAULT_SPACE_CAP: u64 = 5_000_000;

/// Iterates over every node of the bounded space: all task nodes, then all
/// scheduler nodes.
pub fn enumerate_space(ts: &TaskSet, cap: u64) -> Result<impl Iterator<Item = GameNode>> {
    let size = space_size(ts);
    if size > cap as u128 {
        return Err(Error::SpaceCapExceeded { size, cap });
    }
    let lists: Vec<Vec<(i32, i32)>> = ts.tasks().iter().map(local_states).collect();
    let tasks = StateProduct::new(lists.clone()).map(|s| GameNode::new(s, Owner::Tasks));
    let sched = StateProduct::new(lists).map(|s| GameNode::new(s, Owner::Scheduler));
    Ok(tasks.chain(sched))
}

/// Cartesian product of per-task `(rct, nat)` option lists.
pub(crate) struct StateProduct {
    lists: Vec<Vec<(i32, i32)>>,
    cursor: Vec<usize>,
    done: bool,
}

impl StateProduct {
    pub(crate) fn new(lists: Vec<Vec<(i32, i32)>>) -> Self {
        let done = lists.iter().any(Vec::is_empty);
        let cursor = vec![0; lists.len()];
        StateProduct {
            lists,
            cursor,
            done,
        }
    }
}

impl Iterator for StateProduct {
    type Item = SystemState;

    fn next(&mut self) -> Option<SystemState> {
        if self.done {
            return None;
        }
        let state = SystemState {
            rct: self
                .cursor
                .iter()
                .zip(&self.lists)
                .map(|(&c, l)| l[c].0)
                .collect(),
            nat: self
                .cursor
                .iter()
                .zip(&self.lists)
                .map(|(&c, l)| l[c].1)
                .collect(),
        };
        let mut k = self.lists.len();
        loop {
            if k == 0 {
                self.done = true;
                break;
            }
            k -= 1;
            self.cursor[k] += 1;
            if self.cursor[k] < self.lists[k].len() {
                break;
            }
            self.cursor[k] = 0;
        }
        Some(state)
    }
}

/// Minimal representatives of the task-node predecessors of `↑{v}` for a
/// scheduler node `v`.
///
/// Each task either kept its state through the tasks' move, or (when its
/// job looks fresh: active with `nat = T`) was released from `(0, 0)`.
pub fn preds_of_scheduler_node(v: &GameNode, ts: &TaskSet) -> Result<Vec<GameNode>> {
    expect_owner(v, Owner::Scheduler)?;
    let lists = ts
        .tasks()
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let (rct, nat) = (v.state.rct[i], v.state.nat[i]);
            let mut options = vec![(rct, nat)];
            if rct > 0 && nat == t.min_interarrival() {
                options.push((0, 0));
            }
            options
        })
        .collect();
    Ok(StateProduct::new(lists)
        .filter(|s| s.is_valid(ts))
        .map(|s| GameNode::new(s, Owner::Tasks))
        .collect())
}

/// Scheduler-node predecessors of `↑{v}` for a task node `v`: one per
/// scheduled set `x` over tasks with `rct < C`, `|x| <= m`. A predecessor
/// has `nat' = min(nat + 1, T)` and `rct' = rct + 1` on `x`.
pub fn preds_of_tasks_node(v: &GameNode, ts: &TaskSet) -> Result<Vec<GameNode>> {
    expect_owner(v, Owner::Tasks)?;
    let s = &v.state;
    let n = s.len();
    let can_run = TaskMask(
        (0..n)
            .filter(|&i| s.rct[i] < ts.task(i).wcet())
            .fold(0, |m, i| m | 1 << i),
    );
    let base_nat: Values = (0..n)
        .map(|i| (s.nat[i] + 1).min(ts.task(i).min_interarrival()))
        .collect();
    let m = ts.cpus() as usize;
    let mut out: Vec<GameNode> = can_run
        .subsets()
        .into_iter()
        .filter(|x| x.len() <= m)
        .map(|x| {
            let rct = (0..n)
                .map(|i| s.rct[i] + i32::from(x.contains(i)))
                .collect();
            GameNode::new(
                SystemState {
                    rct,
                    nat: base_nat.clone(),
                },
                Owner::Scheduler,
            )
        })
        .filter(|w| w.is_valid(ts))
        .collect();
    out.sort_unstable();
    out.dedup();
    Ok(out)
}
