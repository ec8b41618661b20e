//! Exact online feasibility analysis for sporadic task sets on `m`
//! identical processors.
//!
//! The analysis treats scheduling as a two-player safety game between the
//! scheduler and the coalition of tasks. The losing region of the scheduler
//! is computed backwards from the deadline-miss states, either explicitly
//! over the reachable graph ([`solver::es_solve`]) or symbolically with
//! antichains of minimal losing nodes ([`solver::bw_tba_solve`]). When the
//! initial node is not losing, the final antichain doubles as a certificate
//! from which an online scheduler is derived ([`strategy`]).
//!
//! Module map:
//!
//! - [`task_model`]: task sets, file format, utilization, Uunifast generation.
//! - [`game`]: states, moves, successors and predecessor inversion.
//! - [`antichain`]: the idle-ext order and antichain containers.
//! - [`solver`]: minimal bad states, `∃Pre#`/`∀Pre#`, the three deciders.
//! - [`strategy`]: certificates, strategy extraction, verification, EDF.
//! - [`bench`]: experiment campaigns and CSV records.
//! - [`cli`]: command implementations behind the `schedgame` binary.

pub mod antichain;
pub mod bench;
pub mod cli;
mod error;
pub mod game;
pub mod solver;
pub mod strategy;
pub mod task_model;

pub use antichain::{compare, Antichain, InsertOutcome, OrderResult};
pub use error::{Error, Result};
pub use game::{GameNode, Move, Owner, SystemState};
pub use solver::{bw_tba_solve, es_solve, Budget, SolveOutcome};
pub use strategy::{verify_certificate, Certificate, VerificationReport};
pub use task_model::{DeadlineMode, SporadicTask, TaskSet};
