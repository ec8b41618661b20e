use std::cmp::Reverse;
use std::collections::{BTreeSet, HashMap};

use rustc_hash::FxHashSet;

use crate::antichain::Antichain;
use crate::error::{Error, Result};
use crate::game::{
    initial_node, min_active_nat, preds_of_scheduler_node, preds_of_tasks_node, scheduler_moves_of, tick,
    GameNode, Owner, SystemState,
};
use crate::solver::{Algorithm, Budget, Meter, SolveOutcome};
use crate::task_model::TaskSet;

/// Minimal elements of the deadline-miss nodes.
///
/// A task node is bad when some active task has laxity -1, which in the
/// bounded space means `nat = T - D + rct - 1`. For each task `i` and each
/// `r` in `1..=C_i`, task `i` sits at `(r, T_i - D_i + r - 1)` while every
/// other task takes one of its two lowest components `(0, T_j)` or
/// `(1, T_j)`.
pub fn bad_antichain(ts: &TaskSet) -> Antichain {
    let n = ts.len();
    let mut out = Antichain::new();
    for (i, t) in ts.tasks().iter().enumerate() {
        for r in 1..=t.wcet() {
            let others: Vec<usize> = (0..n).filter(|&j| j != i).collect();
            for combo in 0u64..(1 << others.len()) {
                let mut state = SystemState::zero(n);
                state.rct[i] = r;
                state.nat[i] = t.slack_offset() + r - 1;
                for (k, &j) in others.iter().enumerate() {
                    state.rct[j] = (combo >> k & 1) as i32;
                    state.nat[j] = ts.task(j).min_interarrival();
                }
                out.insert_minimal(GameNode::new(state, Owner::Tasks));
            }
        }
    }
    out
}

/// `⌊∃Pre(↑A)⌋` for an antichain of scheduler nodes.
pub fn pre_exists_sharp(a: &Antichain, ts: &TaskSet) -> Result<Antichain> {
    let tasks = a.iter_owner(Owner::Tasks).count();
    if tasks > 0 {
        return Err(if tasks == a.len() {
            Error::OwnerMismatch {
                expected: Owner::Scheduler,
                found: Owner::Tasks,
            }
        } else {
            Error::MixedOwners
        });
    }
    let mut out = Antichain::new();
    for v in a.iter() {
        for p in preds_of_scheduler_node(v, ts)? {
            out.insert_minimal(p);
        }
    }
    Ok(out)
}

/// Scheduler nodes of `↑∃Pre(C ∩ V_P)` all of whose successors lie in
/// `↑A`, minimized and with `↑A` removed.
pub fn pre_forall_sharp(a: &Antichain, c: &Antichain, ts: &TaskSet) -> Antichain {
    pre_forall_sharp_with(a, c, ts, true)
}

/// [`pre_forall_sharp`] with the dominated-failure pruning switchable.
pub fn pre_forall_sharp_with(a: &Antichain, c: &Antichain, ts: &TaskSet, pruning: bool) -> Antichain {
    let targets: Vec<&GameNode> = c.iter_owner(Owner::Tasks).collect();
    let mut meter = Meter::new(Budget::unlimited());
    compute_forall(a, &targets, ts, pruning, &mut meter).expect("unlimited budget")
}

fn all_successors_covered(v: &GameNode, a: &Antichain, ts: &TaskSet) -> bool {
    scheduler_moves_of(&v.state, ts)
        .into_iter()
        .all(|x| a.covers(&GameNode::new(tick(&v.state, x), Owner::Tasks)))
}

/// Maximal nodes known to fail the all-successors test. Anything below one
/// of them fails too.
#[derive(Default)]
struct FailedSet {
    buckets: HashMap<u64, Vec<GameNode>>,
}

impl FailedSet {
    fn dominates(&self, v: &GameNode) -> bool {
        self.buckets
            .get(&v.idle_mask())
            .is_some_and(|b| b.iter().any(|f| above(f, v)))
    }

    fn insert(&mut self, v: GameNode) {
        let bucket = self.buckets.entry(v.idle_mask()).or_default();
        bucket.retain(|f| !above(&v, f));
        bucket.push(v);
    }
}

// `a ⊒ b` for scheduler nodes with the same idle set.
fn above(a: &GameNode, b: &GameNode) -> bool {
    a.rct().iter().zip(b.rct()).all(|(x, y)| x >= y) && a.nat().iter().zip(b.nat()).all(|(x, y)| x <= y)
}

/// Nodes directly below `v` with the same idle set: one rct lowered or one
/// nat raised. Validity is left to the caller.
fn lower_neighbours(v: &GameNode) -> Vec<GameNode> {
    let mut out = Vec::new();
    for i in 0..v.state.len() {
        if v.state.rct[i] >= 2 {
            let mut w = v.clone();
            w.state.rct[i] -= 1;
            out.push(w);
        }
        let mut w = v.clone();
        w.state.nat[i] += 1;
        out.push(w);
    }
    out
}

fn weight(v: &GameNode) -> i64 {
    v.rct().iter().map(|&r| r as i64).sum::<i64>() - v.nat().iter().map(|&n| n as i64).sum::<i64>()
}

/// Nodes directly above `v` with the same idle set: one rct raised or one
/// nat lowered, staying in the bounded space.
fn upper_neighbours(v: &GameNode, ts: &TaskSet) -> Vec<GameNode> {
    let mut out = Vec::new();
    for (i, t) in ts.tasks().iter().enumerate() {
        let (rct, nat) = (v.state.rct[i], v.state.nat[i]);
        if rct > 0 && rct < t.wcet() && nat >= min_active_nat(t, rct + 1) {
            let mut w = v.clone();
            w.state.rct[i] += 1;
            out.push(w);
        }
        let floor = if rct == 0 { 0 } else { min_active_nat(t, rct) };
        if nat > floor {
            let mut w = v.clone();
            w.state.nat[i] -= 1;
            out.push(w);
        }
    }
    out
}

/// Candidate search for `∀Pre#`: seeds are the minimal predecessors of the
/// targets; failing seeds open their upward closure (minus `↑A`) as
/// candidates, visited from the top down so that one failing node discards
/// all candidates below it.
///
/// `↑v \ ↑A` is downward closed inside `↑v`, so it is collected by walking
/// up from `v` and stopping at `↑A`, never enumerating the covered part.
fn compute_forall(
    a: &Antichain,
    targets: &[&GameNode],
    ts: &TaskSet,
    pruning: bool,
    meter: &mut Meter,
) -> Result<Antichain> {
    let mut seeds = Antichain::new();
    for t in targets {
        meter.touch(t)?;
        for w in preds_of_tasks_node(t, ts)? {
            seeds.insert_minimal(w);
        }
    }

    let mut result = Antichain::new();
    let mut failed = FailedSet::default();
    let mut queue: BTreeSet<(Reverse<i64>, GameNode)> = BTreeSet::new();
    // Every node reached by the upward walks, candidate or not.
    let mut reached: FxHashSet<GameNode> = FxHashSet::default();

    for v in seeds.sorted() {
        if a.covers(&v) {
            continue;
        }
        meter.touch(&v)?;
        if all_successors_covered(&v, a, ts) {
            result.insert_minimal(v);
            continue;
        }
        let mut walk = vec![v.clone()];
        reached.insert(v.clone());
        while let Some(x) = walk.pop() {
            for y in upper_neighbours(&x, ts) {
                if reached.insert(y.clone()) && !a.covers(&y) {
                    queue.insert((Reverse(weight(&y)), y.clone()));
                    walk.push(y);
                }
            }
        }
        meter.check(queue.len())?;
        if pruning {
            failed.insert(v);
        }
    }

    // After a pass, the candidates just below it are picked next so that a
    // minimal passing node is reached quickly and covers the rest above.
    let mut descent: Vec<GameNode> = Vec::new();
    loop {
        let w = match descent.pop() {
            Some(w) => w,
            None => match queue.pop_first() {
                Some((_, w)) => w,
                None => break,
            },
        };
        if result.covers(&w) || (pruning && failed.dominates(&w)) {
            continue;
        }
        meter.touch(&w)?;
        if all_successors_covered(&w, a, ts) {
            for c in lower_neighbours(&w) {
                if queue.remove(&(Reverse(weight(&c)), c.clone())) {
                    descent.push(c);
                }
            }
            result.insert_minimal(w);
        } else if pruning {
            failed.insert(w);
        }
    }
    Ok(result)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BwOptions {
    /// Restrict predecessor computation to elements added in the last round.
    pub use_frontier: bool,
    /// Discard candidates below a node that already failed.
    pub pruning: bool,
    pub budget: Budget,
}

impl Default for BwOptions {
    fn default() -> Self {
        BwOptions {
            use_frontier: true,
            pruning: true,
            budget: Budget::default(),
        }
    }
}

pub fn bw_tba_solve(ts: &TaskSet, use_frontier: bool) -> Result<SolveOutcome> {
    bw_tba_solve_with(
        ts,
        &BwOptions {
            use_frontier,
            ..BwOptions::default()
        },
    )
}

pub fn bw_tba_solve_with(ts: &TaskSet, opts: &BwOptions) -> Result<SolveOutcome> {
    run(ts, opts, false).map(|(outcome, _)| outcome)
}

/// Like [`bw_tba_solve_with`], also returning the antichain after every
/// round, starting with the minimal bad nodes.
pub fn bw_tba_trace(ts: &TaskSet, opts: &BwOptions) -> Result<(SolveOutcome, Vec<Antichain>)> {
    run(ts, opts, true)
}

fn run(ts: &TaskSet, opts: &BwOptions, keep_trace: bool) -> Result<(SolveOutcome, Vec<Antichain>)> {
    let mut meter = Meter::new(opts.budget);
    let mut losing = bad_antichain(ts);
    let mut frontier: Vec<GameNode> = losing.iter().cloned().collect();
    let mut peak = losing.len();
    let mut trace = Vec::new();
    if keep_trace {
        trace.push(losing.clone());
    }
    let mut iterations = 0;
    loop {
        iterations += 1;
        let sources: Vec<&GameNode> = if opts.use_frontier {
            frontier.iter().collect()
        } else {
            losing.iter().collect()
        };
        let mut next = losing.clone();
        for v in sources.iter().filter(|v| v.owner == Owner::Scheduler) {
            meter.touch(v)?;
            for p in preds_of_scheduler_node(v, ts)? {
                next.insert_minimal(p);
            }
        }
        let targets: Vec<&GameNode> = sources
            .iter()
            .copied()
            .filter(|v| v.owner == Owner::Tasks)
            .collect();
        for v in compute_forall(&losing, &targets, ts, opts.pruning, &mut meter)?.sorted() {
            next.insert_minimal(v);
        }
        let added: Vec<GameNode> = next.iter().filter(|v| !losing.contains(v)).cloned().collect();
        if added.is_empty() {
            break;
        }
        frontier = added;
        losing = next;
        peak = peak.max(losing.len());
        if keep_trace {
            trace.push(losing.clone());
        }
    }
    let feasible = !losing.covers(&initial_node(ts));
    let outcome = SolveOutcome {
        algorithm: if opts.use_frontier {
            Algorithm::BwTba
        } else {
            Algorithm::BwTbaNoFrontier
        },
        feasible,
        losing,
        explicit_losing: None,
        metrics: meter.metrics(peak),
        iterations,
    };
    Ok((outcome, trace))
}
