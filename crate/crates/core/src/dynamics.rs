//! Decision rules, scheduling rules and the iteration that drives them.
//!
//! A step picks a mover set from the [`Schedule`], lets every mover apply
//! the [`DecisionRule`] against the same incoming profile, then applies all
//! updates at once. [`run_dynamics`] repeats this until the profile stops
//! moving, a cycle is seen, or the iteration cap is hit.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{Action, ActionSpace, Game, StrategyProfile, DEFAULT_ACTION_TOL};
use crate::rng::GameRng;

/// Number of past profiles kept for cycle detection.
pub const CYCLE_WINDOW: usize = 100;

/// Upper bound on local polishing steps after the grid search.
const POLISH_STEPS: usize = 16;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type")]
pub enum DecisionRule {
    /// Move to an exact (finite) or grid-refined (interval) argmax.
    #[default]
    BestResponse,
    /// Move to the first of up to `max_draws` random candidates that beats
    /// the incumbent by more than `improvement_eps`.
    BetterResponse { improvement_eps: f64, max_draws: usize },
}

impl DecisionRule {
    pub fn validate(&self) -> Result<()> {
        match *self {
            DecisionRule::BestResponse => Ok(()),
            DecisionRule::BetterResponse {
                improvement_eps,
                max_draws,
            } => {
                if !(improvement_eps > 0.0 && improvement_eps.is_finite()) {
                    return Err(Error::InvalidParameter(
                        "better-response improvement_eps must be positive".into(),
                    ));
                }
                if max_draws == 0 {
                    return Err(Error::InvalidParameter(
                        "better-response max_draws must be positive".into(),
                    ));
                }
                Ok(())
            }
        }
    }

    pub fn uses_rng(&self) -> bool {
        matches!(self, DecisionRule::BetterResponse { .. })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type")]
pub enum Schedule {
    /// Everyone moves every step.
    #[default]
    Synchronous,
    /// Player `t mod N` moves at step `t`.
    RoundRobin,
    /// One uniformly drawn player moves.
    Random,
    /// Each player moves independently with `inclusion_prob`; empty draws are redrawn.
    Asynchronous { inclusion_prob: f64 },
}

impl Schedule {
    pub fn validate(&self) -> Result<()> {
        if let Schedule::Asynchronous { inclusion_prob } = *self {
            if !(inclusion_prob > 0.0 && inclusion_prob <= 1.0) {
                return Err(Error::InvalidParameter(format!(
                    "inclusion_prob must lie in (0, 1], got {inclusion_prob}"
                )));
            }
        }
        Ok(())
    }

    pub fn uses_rng(&self) -> bool {
        matches!(self, Schedule::Random | Schedule::Asynchronous { .. })
    }
}

/// Settings of the continuous argmax: a uniform grid over the interval,
/// followed by `refine_rounds` re-grids of a window shrunk by
/// `refine_shrink` around the incumbent, then an optional local polish
/// (neighbour climbing and three-point parabolic steps, each kept only if
/// it improves the incumbent).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BrSolverConfig {
    pub grid_points: usize,
    pub refine_rounds: usize,
    pub refine_shrink: f64,
    pub polish: bool,
}

impl Default for BrSolverConfig {
    fn default() -> Self {
        BrSolverConfig {
            grid_points: 201,
            refine_rounds: 3,
            refine_shrink: 0.1,
            polish: true,
        }
    }
}

impl BrSolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.grid_points < 3 {
            return Err(Error::InvalidParameter(format!(
                "grid_points must be at least 3, got {}",
                self.grid_points
            )));
        }
        if !(self.refine_shrink > 0.0 && self.refine_shrink < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "refine_shrink must lie in (0, 1), got {}",
                self.refine_shrink
            )));
        }
        Ok(())
    }

    /// Grid spacing after the last refinement round on an interval of `width`.
    pub fn final_spacing(&self, width: f64) -> f64 {
        width * self.refine_shrink.powi(self.refine_rounds as i32) / (self.grid_points - 1) as f64
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct StopCriteria {
    pub max_iters: usize,
    /// A step whose largest action change is at most this is "quiet".
    pub fix_tol: f64,
    /// Profiles this close are the same profile for cycle detection.
    pub action_tol: f64,
}

impl Default for StopCriteria {
    fn default() -> Self {
        StopCriteria {
            max_iters: 10_000,
            fix_tol: 1e-6,
            action_tol: DEFAULT_ACTION_TOL,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum StopReason {
    FixedPoint,
    MaxIterations,
    Cycle,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryStep {
    pub iteration: usize,
    pub movers: Vec<usize>,
    pub profile: StrategyProfile,
    pub utilities: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub steps: Vec<TrajectoryStep>,
    pub converged: bool,
    pub stop_reason: StopReason,
}

impl Trajectory {
    pub fn final_step(&self) -> &TrajectoryStep {
        self.steps.last().expect("trajectory always holds the initial profile")
    }

    pub fn final_profile(&self) -> &StrategyProfile {
        &self.final_step().profile
    }

    /// Number of steps after the initial profile.
    pub fn iterations(&self) -> usize {
        self.steps.len() - 1
    }
}

/// Grid-and-refine argmax of `f` over `[lo, hi]`.
///
/// Ties keep the earliest (lowest) point; later rounds only replace the
/// incumbent on strict improvement, so the result is at least as good as
/// every point probed.
pub(crate) fn grid_argmax<F>(lo: f64, hi: f64, cfg: &BrSolverConfig, mut f: F) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let n = cfg.grid_points.max(3);
    let mut best_x = lo;
    let mut best_u = f(lo)?;

    let mut scan = |wlo: f64, whi: f64, best_x: &mut f64, best_u: &mut f64| -> Result<()> {
        for k in 0..n {
            let x = grid_point(wlo, whi, k, n);
            let u = f(x)?;
            if u > *best_u {
                *best_x = x;
                *best_u = u;
            }
        }
        Ok(())
    };

    scan(lo, hi, &mut best_x, &mut best_u)?;
    let mut width = hi - lo;
    let mut spacing = width / (n - 1) as f64;
    for _ in 0..cfg.refine_rounds {
        width *= cfg.refine_shrink;
        let wlo = (best_x - 0.5 * width).max(lo);
        let whi = (best_x + 0.5 * width).min(hi);
        if whi <= wlo {
            break;
        }
        scan(wlo, whi, &mut best_x, &mut best_u)?;
        spacing = (whi - wlo) / (n - 1) as f64;
    }

    if cfg.polish && spacing > 0.0 {
        // Parabolic steps through best_x +- h, starting from the coarse grid
        // spacing: wide brackets are exact for quadratics and keep rounding
        // noise in the utilities from moving the vertex. The bracket shrinks
        // only when the vertex lands far away without improving.
        let mut h = (hi - lo) / (n - 1) as f64;
        for _ in 0..POLISH_STEPS {
            if h < spacing * (1.0 - 1e-9) {
                break;
            }
            let xl = (best_x - h).max(lo);
            let xr = (best_x + h).min(hi);
            let fl = if xl < best_x { Some(f(xl)?) } else { None };
            let fr = if xr > best_x { Some(f(xr)?) } else { None };
            let mut climbed = false;
            for (x, u) in [(xl, fl), (xr, fr)] {
                if let Some(u) = u.filter(|&u| u > best_u) {
                    best_x = x;
                    best_u = u;
                    climbed = true;
                }
            }
            if climbed {
                continue;
            }
            let (Some(fl), Some(fr)) = (fl, fr) else { break };
            let den = (best_x - xl) * (best_u - fr) - (best_x - xr) * (best_u - fl);
            if den == 0.0 {
                break;
            }
            let num = (best_x - xl).powi(2) * (best_u - fr) - (best_x - xr).powi(2) * (best_u - fl);
            let xv = (best_x - 0.5 * num / den).clamp(xl, xr);
            if !xv.is_finite() || xv == best_x {
                break;
            }
            let fv = f(xv)?;
            if fv > best_u {
                best_x = xv;
                best_u = fv;
            } else if (xv - best_x).abs() <= 1e-3 * h {
                break;
            } else {
                h *= cfg.refine_shrink;
            }
        }
    }
    Ok((best_x, best_u))
}

pub(crate) fn grid_point(lo: f64, hi: f64, k: usize, n: usize) -> f64 {
    if k + 1 == n {
        hi
    } else {
        lo + (hi - lo) * (k as f64) / ((n - 1) as f64)
    }
}

/// Best response of `player` to the other actions in `profile`.
///
/// Finite spaces are scanned exhaustively (ties go to the lowest index);
/// intervals use the grid-and-refine search of [`BrSolverConfig`].
pub fn best_response(game: &Game, player: usize, profile: &StrategyProfile, cfg: &BrSolverConfig) -> Result<Action> {
    best_response_with_value(game, player, profile, cfg).map(|(a, _)| a)
}

/// [`best_response`] together with the utility it attains.
pub fn best_response_with_value(
    game: &Game,
    player: usize,
    profile: &StrategyProfile,
    cfg: &BrSolverConfig,
) -> Result<(Action, f64)> {
    if player >= game.n_players() || profile.len() != game.n_players() {
        return Err(Error::InvalidProfile(format!(
            "player {player} is not in a {}-player profile",
            profile.len()
        )));
    }
    let mut probe = profile.clone();
    match game.space(player) {
        ActionSpace::Finite(actions) => {
            let mut best: Option<(usize, f64)> = None;
            for (k, action) in actions.iter().enumerate() {
                probe.set(player, action.clone());
                let u = game.utility_unchecked(player, &probe)?;
                if best.is_none_or(|(_, bu)| u > bu) {
                    best = Some((k, u));
                }
            }
            let (k, u) = best.ok_or_else(|| Error::InvalidGame(format!("player {player} has an empty action set")))?;
            Ok((actions[k].clone(), u))
        }
        &ActionSpace::Interval { lo, hi } => {
            let (x, u) = grid_argmax(lo, hi, cfg, |x| {
                probe.set_scalar(player, x);
                game.utility_unchecked(player, &probe)
            })?;
            Ok((Action::scalar(x), u))
        }
    }
}

/// Draws up to `max_draws` uniform candidates for `player` and returns the
/// first that beats the current utility by more than `eps`.
pub fn better_response(
    game: &Game,
    player: usize,
    profile: &StrategyProfile,
    eps: f64,
    rng: &mut GameRng,
    max_draws: usize,
) -> Result<Option<Action>> {
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter("better-response eps must be positive".into()));
    }
    let current = game.utility_unchecked(player, profile)?;
    let mut probe = profile.clone();
    for _ in 0..max_draws {
        let candidate = match game.space(player) {
            ActionSpace::Finite(actions) => actions[rng.index(actions.len())].clone(),
            &ActionSpace::Interval { lo, hi } => Action::scalar(rng.uniform(lo, hi)),
        };
        probe.set(player, candidate.clone());
        if game.utility_unchecked(player, &probe)? > current + eps {
            return Ok(Some(candidate));
        }
    }
    Ok(None)
}

/// Players that move at step `t`, in ascending order.
pub fn select_movers(schedule: &Schedule, n_players: usize, t: usize, rng: &mut GameRng) -> Vec<usize> {
    assert!(n_players > 0, "select_movers needs at least one player");
    match *schedule {
        Schedule::Synchronous => (0..n_players).collect(),
        Schedule::RoundRobin => vec![t % n_players],
        Schedule::Random => vec![rng.index(n_players)],
        Schedule::Asynchronous { inclusion_prob } => loop {
            let movers: Vec<usize> = (0..n_players).filter(|_| rng.chance(inclusion_prob)).collect();
            if !movers.is_empty() {
                break movers;
            }
        },
    }
}

/// One simultaneous update: every mover responds to the incoming profile.
/// Better-response movers that find no improving draw keep their action.
pub fn step(
    game: &Game,
    profile: &StrategyProfile,
    rule: &DecisionRule,
    movers: &[usize],
    cfg: &BrSolverConfig,
    rng: &mut GameRng,
) -> Result<StrategyProfile> {
    if movers.is_empty() {
        return Err(Error::InvalidParameter("a step needs at least one mover".into()));
    }
    let mut ordered = movers.to_vec();
    ordered.sort_unstable();
    ordered.dedup();

    let mut updates = Vec::with_capacity(ordered.len());
    for &player in &ordered {
        if player >= game.n_players() {
            return Err(Error::InvalidParameter(format!("no player {player}")));
        }
        let next = match *rule {
            DecisionRule::BestResponse => Some(best_response(game, player, profile, cfg)?),
            DecisionRule::BetterResponse {
                improvement_eps,
                max_draws,
            } => better_response(game, player, profile, improvement_eps, rng, max_draws)?,
        };
        updates.push((player, next));
    }

    let mut next_profile = profile.clone();
    for (player, action) in updates {
        if let Some(action) = action {
            next_profile.set(player, action);
        }
    }
    Ok(next_profile)
}

/// Iterates [`step`] from `init`.
///
/// Stops with `FixedPoint` once every player has moved without any action
/// changing by more than `fix_tol` since the last larger change, with
/// `Cycle` when a changing step lands within `action_tol` of one of the last
/// [`CYCLE_WINDOW`] profiles, and with `MaxIterations` at the cap.
pub fn run_dynamics(
    game: &Game,
    init: &StrategyProfile,
    rule: &DecisionRule,
    schedule: &Schedule,
    cfg: &BrSolverConfig,
    stop: &StopCriteria,
    rng: &mut GameRng,
) -> Result<Trajectory> {
    game.check_profile(init)?;
    rule.validate()?;
    schedule.validate()?;
    cfg.validate()?;
    if stop.max_iters == 0 {
        return Err(Error::InvalidParameter("max_iters must be positive".into()));
    }

    let n = game.n_players();
    let mut steps = vec![TrajectoryStep {
        iteration: 0,
        movers: Vec::new(),
        profile: init.clone(),
        utilities: game.utilities_unchecked(init)?,
    }];
    let mut history: VecDeque<StrategyProfile> = VecDeque::with_capacity(CYCLE_WINDOW);
    history.push_back(init.clone());
    let mut settled = vec![false; n];
    let mut current = init.clone();

    for t in 1..=stop.max_iters {
        let movers = select_movers(schedule, n, t - 1, rng);
        let next = step(game, &current, rule, &movers, cfg, rng)?;
        let change = next.distance(&current);
        let utilities = game.utilities_unchecked(&next)?;

        let quiet = change <= stop.fix_tol;
        let mut cycled = false;
        if quiet {
            for &m in &movers {
                settled[m] = true;
            }
        } else {
            settled.iter_mut().for_each(|s| *s = false);
            cycled = history.iter().any(|p| p.approx_eq(&next, stop.action_tol));
        }

        steps.push(TrajectoryStep {
            iteration: t,
            movers,
            profile: next.clone(),
            utilities,
        });

        if quiet && settled.iter().all(|&s| s) {
            return Ok(Trajectory {
                steps,
                converged: true,
                stop_reason: StopReason::FixedPoint,
            });
        }
        if cycled {
            return Ok(Trajectory {
                steps,
                converged: false,
                stop_reason: StopReason::Cycle,
            });
        }

        if history.len() == CYCLE_WINDOW {
            history.pop_front();
        }
        history.push_back(next.clone());
        current = next;
    }

    Ok(Trajectory {
        steps,
        converged: false,
        stop_reason: StopReason::MaxIterations,
    })
}
