use std::collections::{HashMap, HashSet, VecDeque};

use crate::antichain::Antichain;
use crate::error::Result;
use crate::game::{enumerate_space, initial_node, is_bad, successors, GameNode, Owner};
use crate::solver::{Algorithm, Budget, Meter, SolveOutcome};
use crate::task_model::TaskSet;

/// An explicit game graph over indexed nodes.
#[derive(Debug, Clone, Default)]
pub struct ExplicitGame {
    pub nodes: Vec<GameNode>,
    /// Deduplicated successor indices per node.
    pub succ: Vec<Vec<u32>>,
    index: HashMap<GameNode, u32>,
}

impl ExplicitGame {
    pub fn new() -> Self {
        Self::default()
    }

    /// Index of `v`, inserting it if new.
    pub fn add_node(&mut self, v: GameNode) -> u32 {
        if let Some(&k) = self.index.get(&v) {
            return k;
        }
        let k = self.nodes.len() as u32;
        self.index.insert(v.clone(), k);
        self.nodes.push(v);
        self.succ.push(Vec::new());
        k
    }

    pub fn add_edge(&mut self, from: u32, to: u32) {
        let list = &mut self.succ[from as usize];
        if !list.contains(&to) {
            list.push(to);
        }
    }

    pub fn index_of(&self, v: &GameNode) -> Option<u32> {
        self.index.get(v).copied()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Forward exploration from the initial node; bad nodes are not expanded.
    pub(crate) fn reachable(ts: &TaskSet, meter: &mut Meter) -> Result<Self> {
        let mut g = ExplicitGame::new();
        let root = g.add_node(initial_node(ts));
        let mut queue = VecDeque::from([root]);
        while let Some(k) = queue.pop_front() {
            let v = g.nodes[k as usize].clone();
            meter.touch(&v)?;
            if is_bad(&v, ts) {
                continue;
            }
            for (_, u) in successors(&v, ts) {
                let fresh = g.index_of(&u).is_none();
                let j = g.add_node(u);
                g.add_edge(k, j);
                if fresh {
                    queue.push_back(j);
                }
            }
            meter.check(queue.len())?;
        }
        Ok(g)
    }

    /// Layered attractor of `seeds`: task nodes join when one successor is
    /// in, scheduler nodes when all successors are in.
    pub fn attractor(&self, seeds: &[u32]) -> Attractor {
        let n = self.nodes.len();
        let mut preds: Vec<Vec<u32>> = vec![Vec::new(); n];
        for (k, list) in self.succ.iter().enumerate() {
            for &j in list {
                preds[j as usize].push(k as u32);
            }
        }
        let mut pending: Vec<usize> = self.succ.iter().map(Vec::len).collect();
        let mut round: Vec<Option<u32>> = vec![None; n];
        let mut layer: Vec<u32> = Vec::new();
        for &s in seeds {
            if round[s as usize].is_none() {
                round[s as usize] = Some(0);
                layer.push(s);
            }
        }
        let mut rounds = 0u32;
        loop {
            rounds += 1;
            let mut next = Vec::new();
            if rounds == 1 {
                for k in 0..n {
                    let v = &self.nodes[k];
                    if round[k].is_none() && v.owner == Owner::Scheduler && pending[k] == 0 {
                        round[k] = Some(rounds);
                        next.push(k as u32);
                    }
                }
            }
            for &u in &layer {
                for &p in &preds[u as usize] {
                    let p = p as usize;
                    if round[p].is_some() {
                        continue;
                    }
                    let joins = match self.nodes[p].owner {
                        Owner::Tasks => true,
                        Owner::Scheduler => {
                            pending[p] -= 1;
                            pending[p] == 0
                        }
                    };
                    if joins {
                        round[p] = Some(rounds);
                        next.push(p as u32);
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            layer = next;
        }
        Attractor { round, rounds }
    }
}

/// Attractor membership with the round each node joined.
#[derive(Debug, Clone)]
pub struct Attractor {
    /// `Some(i)` when the node joined at round `i` (seeds at 0).
    pub round: Vec<Option<u32>>,
    /// Rounds computed, counting the final one that added nothing.
    pub rounds: u32,
}

impl Attractor {
    pub fn contains(&self, k: u32) -> bool {
        self.round[k as usize].is_some()
    }

    pub fn members(&self) -> impl Iterator<Item = u32> + '_ {
        self.round
            .iter()
            .enumerate()
            .filter(|(_, r)| r.is_some())
            .map(|(k, _)| k as u32)
    }

    pub fn len(&self) -> usize {
        self.round.iter().filter(|r| r.is_some()).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Explicit attractor over the graph reachable from the initial node.
pub fn es_solve(ts: &TaskSet, budget: Budget) -> Result<SolveOutcome> {
    let mut meter = Meter::new(budget);
    let g = ExplicitGame::reachable(ts, &mut meter)?;
    let seeds: Vec<u32> = (0..g.len() as u32)
        .filter(|&k| is_bad(&g.nodes[k as usize], ts))
        .collect();
    let attr = g.attractor(&seeds);
    let mut members: Vec<GameNode> = attr.members().map(|k| g.nodes[k as usize].clone()).collect();
    members.sort_unstable();
    let root = g.index_of(&initial_node(ts)).expect("root is indexed");
    Ok(SolveOutcome {
        algorithm: Algorithm::Es,
        feasible: !attr.contains(root),
        losing: Antichain::minimize(members.iter().cloned()),
        metrics: meter.metrics(members.len()),
        explicit_losing: Some(members),
        iterations: attr.rounds,
    })
}

/// Attractor of all bad nodes over the entire bounded space, computed
/// round by round without any of the solvers' machinery.
#[derive(Debug, Clone)]
pub struct OracleResult {
    /// Round at which each losing node joined (bad nodes at 0).
    pub round: HashMap<GameNode, u32>,
    pub rounds: u32,
}

impl OracleResult {
    pub fn is_losing(&self, v: &GameNode) -> bool {
        self.round.contains_key(v)
    }

    /// Members of round `i` or earlier.
    pub fn attr_at(&self, i: u32) -> HashSet<GameNode> {
        self.round
            .iter()
            .filter(|(_, &r)| r <= i)
            .map(|(v, _)| v.clone())
            .collect()
    }
}

/// Successor edges leaving the bounded space are dropped.
pub fn full_space_attractor_oracle(ts: &TaskSet, cap: u64) -> Result<OracleResult> {
    let space: Vec<GameNode> = enumerate_space(ts, cap)?.collect();
    let succ: Vec<Vec<GameNode>> = space
        .iter()
        .map(|v| {
            successors(v, ts)
                .into_iter()
                .map(|(_, u)| u)
                .filter(|u| u.is_valid(ts))
                .collect()
        })
        .collect();
    let mut round: HashMap<GameNode, u32> = space
        .iter()
        .filter(|v| is_bad(v, ts))
        .map(|v| (v.clone(), 0))
        .collect();
    let mut rounds = 0;
    loop {
        rounds += 1;
        let fresh: Vec<&GameNode> = space
            .iter()
            .zip(&succ)
            .filter(|(v, _)| !round.contains_key(*v))
            .filter(|(v, s)| match v.owner {
                Owner::Tasks => s.iter().any(|u| round.contains_key(u)),
                Owner::Scheduler => s.iter().all(|u| round.contains_key(u)),
            })
            .map(|(v, _)| v)
            .collect();
        if fresh.is_empty() {
            break;
        }
        for v in fresh {
            round.insert(v.clone(), rounds);
        }
    }
    Ok(OracleResult { round, rounds })
}
