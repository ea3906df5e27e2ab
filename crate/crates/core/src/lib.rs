//! Solvers for noncooperative strategic games.
//!
//! - [`game`]: action spaces, profiles, utilities.
//! - [`dynamics`]: best/better response rules, scheduling rules, iteration.
//! - [`equilibrium`]: ε-Nash verification and brute-force enumeration.
//! - [`supermodular`]: lattice, supermodularity and best-response diagnostics.
//! - [`stackelberg`]: leader-follower equilibria by backward induction.
//! - [`builtin`]: the built-in game library.
//! - [`trace`]: CSV trajectory output.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod builtin;
pub mod dynamics;
pub mod equilibrium;
pub mod error;
pub mod game;
pub mod rng;
pub mod stackelberg;
pub mod supermodular;
pub mod trace;

pub use builtin::GameSpec;
pub use dynamics::{
    best_response, better_response, run_dynamics, select_movers, step, BrSolverConfig, DecisionRule, Schedule,
    StopCriteria, StopReason, Trajectory, TrajectoryStep,
};
pub use equilibrium::{enumerate_pure_nash_finite, grid_nash_candidates, is_epsilon_nash, Deviation, NashVerdict};
pub use error::{Error, Result};
pub use game::{Action, ActionSpace, Game, StrategyProfile, ValidationReport, DEFAULT_ACTION_TOL};
pub use rng::GameRng;
pub use stackelberg::{
    follower_br_analytic, follower_br_numeric, solve_spne_analytic, solve_spne_numeric, LinearDuopolyParams,
    SpneMethod, SpneSolution, TwoPlayerGame,
};
pub use supermodular::{
    check_br_properties, check_cross_partials, check_lattice, check_supermodular_utility, diagnose_supermodularity,
    SupermodularReport, SupermodularVerdict,
};
pub use trace::{format_real, write_trace};
