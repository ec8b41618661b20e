//! Online schedulers derived from losing antichains, and the EDF baseline.
//!
//! A certificate stores the task set and the minimal losing nodes. The
//! scheduler it induces plays, at every scheduler node, a move whose
//! successor is not covered by the antichain.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use crate::antichain::Antichain;
use crate::error::{Error, Result};
use crate::game::{
    initial_node, is_bad, release, scheduler_moves_of, tick, GameNode, Move, Owner, TaskMask,
};
use crate::solver::{Budget, ExplorationMetrics, Meter, SolveOutcome};
use crate::task_model::{parse_cpus_line, parse_task_line, significant_lines, TaskSet};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub task_set: TaskSet,
    pub feasible: bool,
    pub losing: Antichain,
}

impl Certificate {
    pub fn new(task_set: TaskSet, losing: Antichain) -> Self {
        let feasible = !losing.covers(&initial_node(&task_set));
        Certificate {
            task_set,
            feasible,
            losing,
        }
    }

    pub fn from_outcome(task_set: &TaskSet, outcome: &SolveOutcome) -> Self {
        Certificate {
            task_set: task_set.clone(),
            feasible: outcome.feasible,
            losing: outcome.losing.clone(),
        }
    }
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "certificate v1")?;
        writeln!(f, "feasible {}", self.feasible)?;
        writeln!(f, "cpus {}", self.task_set.cpus())?;
        writeln!(f, "tasks {}", self.task_set.len())?;
        for t in self.task_set.tasks() {
            writeln!(f, "task {} {} {}", t.wcet(), t.deadline(), t.min_interarrival())?;
        }
        write!(f, "{}", self.losing)
    }
}

impl FromStr for Certificate {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut lines = significant_lines(text);
        let mut next = |what: &str| {
            lines
                .next()
                .ok_or_else(|| Error::parse(0, format!("unexpected end of file, expected {what}")))
        };
        let (no, header) = next("`certificate v1`")?;
        if header != "certificate v1" {
            return Err(Error::parse(no, format!("expected `certificate v1`, got `{header}`")));
        }
        let (no, line) = next("`feasible`")?;
        let feasible = match line {
            "feasible true" => true,
            "feasible false" => false,
            _ => return Err(Error::parse(no, format!("expected `feasible true|false`, got `{line}`"))),
        };
        let (no, line) = next("`cpus <m>`")?;
        let cpus = parse_cpus_line(no, line)?;
        let (no, line) = next("`tasks <n>`")?;
        let n: usize = line
            .strip_prefix("tasks ")
            .and_then(|c| c.trim().parse().ok())
            .ok_or_else(|| Error::parse(no, format!("expected `tasks <n>`, got `{line}`")))?;
        let mut tasks = Vec::with_capacity(n);
        for _ in 0..n {
            let (no, line) = next("a task line")?;
            tasks.push(parse_task_line(no, line)?);
        }
        let task_set = TaskSet::new(tasks, cpus).map_err(|e| Error::parse(no, e.to_string()))?;
        let losing = Antichain::parse_lines(&mut lines)?;
        if let Some(v) = losing.iter().find(|v| v.state.len() != n) {
            return Err(Error::parse(no, format!("node `{v}` does not have {n} tasks")));
        }
        if let Some((no, line)) = lines.next() {
            return Err(Error::parse(no, format!("trailing content `{line}`")));
        }
        Ok(Certificate {
            task_set,
            feasible,
            losing,
        })
    }
}

/// Scheduler moves at `v` whose successor is not covered by the losing set.
pub fn safe_moves(v: &GameNode, cert: &Certificate) -> Vec<Move> {
    scheduler_moves_of(&v.state, &cert.task_set)
        .into_iter()
        .filter(|&x| !cert.losing.covers(&GameNode::new(tick(&v.state, x), Owner::Tasks)))
        .collect()
}

/// How a scheduler picks among safe moves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MovePolicy {
    /// Smallest sorted index sequence; the empty move comes first.
    #[default]
    Lexicographic,
    /// Largest safe move, ties broken lexicographically.
    MostWork,
}

fn lex_key(x: Move) -> Vec<usize> {
    x.indices().collect()
}

pub fn pick_move(v: &GameNode, cert: &Certificate) -> Result<Move> {
    pick_move_with(v, cert, MovePolicy::Lexicographic)
}

pub fn pick_move_with(v: &GameNode, cert: &Certificate, policy: MovePolicy) -> Result<Move> {
    let moves = safe_moves(v, cert);
    let best = match policy {
        MovePolicy::Lexicographic => moves.into_iter().min_by_key(|&x| lex_key(x)),
        MovePolicy::MostWork => moves
            .into_iter()
            .min_by_key(|&x| (std::cmp::Reverse(x.len()), lex_key(x))),
    };
    best.ok_or_else(|| Error::NoSafeMove(v.to_string()))
}

/// A play prefix: nodes with the move taken from each to the next.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Play {
    pub nodes: Vec<GameNode>,
    pub moves: Vec<Move>,
}

impl fmt::Display for Play {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in self.nodes.iter().enumerate() {
            if k > 0 {
                writeln!(f, "--{}-->", self.moves[k - 1])?;
            }
            writeln!(f, "{v}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerificationReport {
    pub ok: bool,
    pub visited: usize,
    /// Ends in a bad node or a scheduler node without safe moves.
    pub counterexample: Option<Play>,
}

fn play_to(target: &GameNode, parents: &HashMap<GameNode, (GameNode, Move)>) -> Play {
    let mut nodes = vec![target.clone()];
    let mut moves = Vec::new();
    let mut cur = target;
    while let Some((p, x)) = parents.get(cur) {
        nodes.push(p.clone());
        moves.push(*x);
        cur = p;
    }
    nodes.reverse();
    moves.reverse();
    Play { nodes, moves }
}

/// Explores every play of the certificate's scheduler against all release
/// patterns.
pub fn verify_certificate(cert: &Certificate) -> VerificationReport {
    let ts = &cert.task_set;
    let root = initial_node(ts);
    let mut parents: HashMap<GameNode, (GameNode, Move)> = HashMap::new();
    let mut seen: HashSet<GameNode> = HashSet::from([root.clone()]);
    let mut queue = VecDeque::from([root]);
    let fail = |v: &GameNode, parents: &HashMap<_, _>, seen: &HashSet<_>| VerificationReport {
        ok: false,
        visited: seen.len(),
        counterexample: Some(play_to(v, parents)),
    };
    while let Some(v) = queue.pop_front() {
        let next: Vec<(Move, GameNode)> = match v.owner {
            Owner::Tasks => {
                if is_bad(&v, ts) {
                    return fail(&v, &parents, &seen);
                }
                v.state
                    .eligible_set()
                    .subsets()
                    .into_iter()
                    .map(|r| (r, GameNode::new(release(&v.state, r, ts), Owner::Scheduler)))
                    .collect()
            }
            Owner::Scheduler => match pick_move(&v, cert) {
                Ok(x) => vec![(x, GameNode::new(tick(&v.state, x), Owner::Tasks))],
                Err(_) => return fail(&v, &parents, &seen),
            },
        };
        for (x, u) in next {
            if seen.insert(u.clone()) {
                parents.insert(u.clone(), (v.clone(), x));
                queue.push_back(u);
            }
        }
    }
    VerificationReport {
        ok: true,
        visited: seen.len(),
        counterexample: None,
    }
}

/// Earliest-deadline-first: the `min(m, |Active|)` active tasks closest to
/// their absolute deadline, ties by task index.
pub fn edf_move(v: &GameNode, ts: &TaskSet) -> Move {
    let mut active: Vec<usize> = v.state.active_set().indices().collect();
    active.sort_by_key(|&i| (v.state.nat[i] - ts.task(i).slack_offset(), i));
    active.truncate(ts.cpus() as usize);
    TaskMask::from_indices(&active)
}

#[derive(Debug, Clone)]
pub struct EdfReport {
    pub schedulable: bool,
    pub metrics: ExplorationMetrics,
    /// A play reaching a deadline miss.
    pub counterexample: Option<Play>,
}

/// Exhaustive exploration with the scheduler fixed to [`edf_move`].
pub fn edf_schedulable(ts: &TaskSet, budget: Budget) -> Result<EdfReport> {
    let mut meter = Meter::new(budget);
    let root = initial_node(ts);
    let mut parents: HashMap<GameNode, (GameNode, Move)> = HashMap::new();
    let mut seen: HashSet<GameNode> = HashSet::from([root.clone()]);
    let mut queue = VecDeque::from([root]);
    while let Some(v) = queue.pop_front() {
        meter.touch(&v)?;
        let next: Vec<(Move, GameNode)> = match v.owner {
            Owner::Tasks => {
                if is_bad(&v, ts) {
                    return Ok(EdfReport {
                        schedulable: false,
                        metrics: meter.metrics(seen.len()),
                        counterexample: Some(play_to(&v, &parents)),
                    });
                }
                v.state
                    .eligible_set()
                    .subsets()
                    .into_iter()
                    .map(|r| (r, GameNode::new(release(&v.state, r, ts), Owner::Scheduler)))
                    .collect()
            }
            Owner::Scheduler => {
                let x = edf_move(&v, ts);
                vec![(x, GameNode::new(tick(&v.state, x), Owner::Tasks))]
            }
        };
        for (x, u) in next {
            if seen.insert(u.clone()) {
                parents.insert(u.clone(), (v.clone(), x));
                queue.push_back(u);
            }
        }
    }
    Ok(EdfReport {
        schedulable: true,
        metrics: meter.metrics(seen.len()),
        counterexample: None,
    })
}
