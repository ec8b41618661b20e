//! The idle-ext order on game nodes and antichains of minimal elements.
//!
//! `v1 ⊒ v2` holds when both nodes have the same owner and, for every task,
//! `rct1 >= rct2`, `rct2 == 0` implies `rct1 == 0`, and `nat1 <= nat2`.
//! The first two conditions force `v1` and `v2` to have the same idle set,
//! so comparable nodes always share an `(owner, idle mask)` signature and
//! the antichain stores its elements bucketed by that signature.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::game::{local_is_valid, min_active_nat, GameNode, Owner, StateProduct};
use crate::task_model::TaskSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrderResult {
    Equal,
    /// The first node is strictly above the second.
    Above,
    /// The first node is strictly below the second.
    Below,
    Incomparable,
}

/// `v1 ⊒ v2`.
pub fn dominates(v1: &GameNode, v2: &GameNode) -> bool {
    v1.owner == v2.owner
        && v1.state.len() == v2.state.len()
        && (0..v1.state.len()).all(|i| {
            let (r1, r2) = (v1.state.rct[i], v2.state.rct[i]);
            r1 >= r2 && (r2 != 0 || r1 == 0) && v1.state.nat[i] <= v2.state.nat[i]
        })
}

/// `v1 ⊒ v2` for nodes already known to share owner and idle set.
#[inline]
fn dominates_same_signature(v1: &GameNode, v2: &GameNode) -> bool {
    let (a, b) = (&v1.state, &v2.state);
    a.rct.iter().zip(&b.rct).all(|(x, y)| x >= y) && a.nat.iter().zip(&b.nat).all(|(x, y)| x <= y)
}

pub fn compare(v1: &GameNode, v2: &GameNode) -> OrderResult {
    match (dominates(v1, v2), dominates(v2, v1)) {
        (true, true) => OrderResult::Equal,
        (true, false) => OrderResult::Above,
        (false, true) => OrderResult::Below,
        (false, false) => OrderResult::Incomparable,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InsertOutcome {
    Inserted { removed: usize },
    /// The node was already covered; nothing changed.
    Redundant,
}

type Signature = (Owner, u64);

/// A set of pairwise incomparable nodes, standing for its upward closure.
#[derive(Debug, Clone, Default)]
pub struct Antichain {
    buckets: HashMap<Signature, Vec<GameNode>>,
    len: usize,
}

fn signature(v: &GameNode) -> Signature {
    (v.owner, v.idle_mask())
}

impl Antichain {
    pub fn new() -> Self {
        Self::default()
    }

    /// The minimal antichain with the same upward closure as `nodes`.
    pub fn minimize<I: IntoIterator<Item = GameNode>>(nodes: I) -> Self {
        let mut a = Antichain::new();
        for v in nodes {
            a.insert_minimal(v);
        }
        a
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = &GameNode> {
        self.buckets.values().flatten()
    }

    pub fn iter_owner(&self, owner: Owner) -> impl Iterator<Item = &GameNode> {
        self.buckets
            .iter()
            .filter(move |(sig, _)| sig.0 == owner)
            .flat_map(|(_, b)| b)
    }

    /// True iff `v ∈ ↑self`.
    pub fn covers(&self, v: &GameNode) -> bool {
        self.buckets
            .get(&signature(v))
            .is_some_and(|b| b.iter().any(|e| dominates_same_signature(v, e)))
    }

    /// The stored element below `v`, if any.
    pub fn covering_element(&self, v: &GameNode) -> Option<&GameNode> {
        self.buckets
            .get(&signature(v))
            .and_then(|b| b.iter().find(|e| dominates_same_signature(v, e)))
    }

    pub fn contains(&self, v: &GameNode) -> bool {
        self.buckets
            .get(&signature(v))
            .is_some_and(|b| b.contains(v))
    }

    pub fn insert_minimal(&mut self, v: GameNode) -> InsertOutcome {
        let bucket = self.buckets.entry(signature(&v)).or_default();
        if bucket.iter().any(|e| dominates_same_signature(&v, e)) {
            return InsertOutcome::Redundant;
        }
        let before = bucket.len();
        bucket.retain(|e| !dominates_same_signature(e, &v));
        let removed = before - bucket.len();
        bucket.push(v);
        self.len = self.len + 1 - removed;
        InsertOutcome::Inserted { removed }
    }

    /// Removes an element by exact value.
    pub fn remove(&mut self, v: &GameNode) -> bool {
        let Some(bucket) = self.buckets.get_mut(&signature(v)) else {
            return false;
        };
        let Some(pos) = bucket.iter().position(|e| e == v) else {
            return false;
        };
        bucket.swap_remove(pos);
        self.len -= 1;
        true
    }

    /// Elements in canonical order: owner (tasks first), then rct, then nat.
    pub fn sorted(&self) -> Vec<GameNode> {
        let mut out: Vec<GameNode> = self.iter().cloned().collect();
        out.sort_unstable();
        out
    }

    /// Pairwise incomparability; used as a test-time validator.
    pub fn is_antichain(&self) -> bool {
        let all = self.sorted();
        all.iter().enumerate().all(|(k, a)| {
            all[k + 1..]
                .iter()
                .all(|b| compare(a, b) == OrderResult::Incomparable)
        })
    }

    /// Parses the body produced by `Display`: a header `antichain <count>`
    /// followed by `count` node lines. `lines` carries 1-based line numbers.
    pub(crate) fn parse_lines<'a, I>(lines: &mut I) -> Result<Antichain>
    where
        I: Iterator<Item = (usize, &'a str)>,
    {
        let (lineno, header) = lines
            .next()
            .ok_or_else(|| Error::parse(0, "missing `antichain <count>` header"))?;
        let count: usize = header
            .strip_prefix("antichain ")
            .and_then(|c| c.trim().parse().ok())
            .ok_or_else(|| Error::parse(lineno, format!("expected `antichain <count>`, got `{header}`")))?;
        let mut a = Antichain::new();
        for k in 0..count {
            let (lineno, text) = lines
                .next()
                .ok_or_else(|| Error::parse(lineno + k, format!("expected {count} nodes")))?;
            let v: GameNode = text.parse().map_err(|e| Error::parse(lineno, e))?;
            a.insert_minimal(v);
        }
        Ok(a)
    }
}

impl PartialEq for Antichain {
    fn eq(&self, other: &Self) -> bool {
        self.len == other.len && self.iter().all(|v| other.contains(v))
    }
}

impl Eq for Antichain {}

impl FromIterator<GameNode> for Antichain {
    fn from_iter<I: IntoIterator<Item = GameNode>>(iter: I) -> Self {
        Antichain::minimize(iter)
    }
}

impl fmt::Display for Antichain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "antichain {}", self.len)?;
        for v in self.sorted() {
            writeln!(f, "{v}")?;
        }
        Ok(())
    }
}

fn closure_weight(v: &GameNode) -> i64 {
    v.state.rct.iter().map(|&r| r as i64).sum::<i64>()
        - v.state.nat.iter().map(|&n| n as i64).sum::<i64>()
}

/// Every in-space node `w ⊒ v`, in no particular order.
pub(crate) fn upward_closure_iter(v: &GameNode, ts: &TaskSet) -> impl Iterator<Item = GameNode> {
    let lists = ts
        .tasks()
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let (rct, nat) = (v.state.rct[i], v.state.nat[i]);
            let mut options = Vec::new();
            if rct == 0 {
                for n in 0..=nat.min(t.min_interarrival()) {
                    options.push((0, n));
                }
            } else {
                for r in rct.max(1)..=t.wcet() {
                    for n in min_active_nat(t, r)..=nat.min(t.min_interarrival()) {
                        options.push((r, n));
                    }
                }
            }
            debug_assert!(options.iter().all(|&(r, n)| local_is_valid(t, r, n)));
            options
        })
        .collect();
    let owner = v.owner;
    StateProduct::new(lists).map(move |s| GameNode::new(s, owner))
}

/// Every in-space node `w ⊒ v`, sorted by `Σrct - Σnat` descending (ties in
/// canonical order).
pub fn upward_closure_enum(v: &GameNode, ts: &TaskSet) -> Vec<GameNode> {
    let mut out: Vec<GameNode> = upward_closure_iter(v, ts).collect();
    out.sort_by(|a, b| closure_weight(b).cmp(&closure_weight(a)).then_with(|| a.cmp(b)));
    out
}
