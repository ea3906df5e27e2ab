//! Leader-follower equilibria by backward induction.
//!
//! The follower's best response is solved first as a function of the
//! leader's action; the leader then maximises its own utility along that
//! response. [`solve_spne_analytic`] covers the linear-demand duopoly with
//! constant marginal costs in closed form; [`solve_spne_numeric`] handles
//! any two-player game through nested grid-and-refine searches.

use serde::{Deserialize, Serialize};

use crate::dynamics::{best_response, grid_argmax, BrSolverConfig};
use crate::error::{Error, Result};
use crate::game::{Action, ActionSpace, Game, StrategyProfile};

pub const LEADER: usize = 0;
pub const FOLLOWER: usize = 1;

/// Inverse demand `p = a - b (q1 + q2)` with constant marginal costs `c1`, `c2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearDuopolyParams {
    pub a: f64,
    pub b: f64,
    pub c1: f64,
    pub c2: f64,
}

impl LinearDuopolyParams {
    pub fn new(a: f64, b: f64, c1: f64, c2: f64) -> Result<Self> {
        let p = LinearDuopolyParams { a, b, c1, c2 };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if ![self.a, self.b, self.c1, self.c2].iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidParameter("duopoly parameters must be finite".into()));
        }
        if self.b <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "demand slope b must be positive, got {}",
                self.b
            )));
        }
        if self.c1 < 0.0 || self.c2 < 0.0 {
            return Err(Error::InvalidParameter("marginal costs must be non-negative".into()));
        }
        Ok(())
    }

    pub fn price(&self, q1: f64, q2: f64) -> f64 {
        self.a - self.b * (q1 + q2)
    }

    /// `Π_i = p q_i - c_i q_i`. The price is not clamped at zero.
    pub fn profits(&self, q1: f64, q2: f64) -> (f64, f64) {
        let p = self.price(q1, q2);
        (p * q1 - self.c1 * q1, p * q2 - self.c2 * q2)
    }

    /// Unclamped closed-form leader quantity `(a + c2 - 2 c1) / (2b)`.
    pub fn leader_quantity(&self) -> f64 {
        (self.a + self.c2 - 2.0 * self.c1) / (2.0 * self.b)
    }

    /// Unclamped closed-form follower quantity `(a - 3 c2 + 2 c1) / (4b)`.
    pub fn follower_quantity(&self) -> f64 {
        (self.a - 3.0 * self.c2 + 2.0 * self.c1) / (4.0 * self.b)
    }

    /// True when both equilibrium quantities are strictly positive and the
    /// follower's cost is below the demand intercept.
    pub fn is_interior(&self) -> bool {
        self.a > self.c2 && self.leader_quantity() > 0.0 && self.follower_quantity() > 0.0
    }

    /// Simultaneous-move (Cournot) equilibrium from the two linear
    /// best-response equations.
    pub fn cournot_nash(&self) -> (f64, f64) {
        let q1 = (self.a - 2.0 * self.c1 + self.c2) / (3.0 * self.b);
        let q2 = (self.a - 2.0 * self.c2 + self.c1) / (3.0 * self.b);
        (q1, q2)
    }

    /// Demand-exhausting quantity `a / b`, the default upper bound of both spaces.
    pub fn quantity_cap(&self) -> f64 {
        self.a / self.b
    }

    /// Two-player game over `[0, a/b]^2` with the duopoly profits as utilities.
    pub fn game(&self) -> Result<TwoPlayerGame> {
        if self.a <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "demand intercept must be positive to bound the quantity space, got {}",
                self.a
            )));
        }
        let p = *self;
        let hi = self.quantity_cap();
        let game = Game::new(vec![ActionSpace::interval(0.0, hi); 2], move |i, profile| {
            let (u1, u2) = p.profits(profile.scalar(0), profile.scalar(1));
            if i == LEADER {
                u1
            } else {
                u2
            }
        })?;
        TwoPlayerGame::new(game)
    }
}

/// A game with exactly two players: player 0 leads, player 1 follows.
#[derive(Clone, Debug)]
pub struct TwoPlayerGame(Game);

impl TwoPlayerGame {
    pub fn new(game: Game) -> Result<Self> {
        if game.n_players() != 2 {
            return Err(Error::InvalidGame(format!(
                "a leader-follower game needs exactly 2 players, got {}",
                game.n_players()
            )));
        }
        Ok(TwoPlayerGame(game))
    }

    pub fn game(&self) -> &Game {
        &self.0
    }

    pub fn into_game(self) -> Game {
        self.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpneMethod {
    Analytic,
    NumericBilevel,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpneSolution {
    pub leader_action: Action,
    pub follower_action: Action,
    pub leader_utility: f64,
    pub follower_utility: f64,
    pub method: SpneMethod,
    /// False when the analytic quantities had to be clamped, or the numeric
    /// follower action sits on a bound of its space.
    pub interior: bool,
    /// Central-difference `|∂u_follower/∂q2|` at the solution, for interior
    /// scalar follower actions.
    pub foc_residual: Option<f64>,
}

impl SpneSolution {
    pub fn q1(&self) -> f64 {
        self.leader_action.as_scalar().expect("scalar leader action")
    }

    pub fn q2(&self) -> f64 {
        self.follower_action.as_scalar().expect("scalar follower action")
    }

    pub fn profile(&self) -> StrategyProfile {
        StrategyProfile::new(vec![self.leader_action.clone(), self.follower_action.clone()])
    }
}

/// Follower reaction `max(0, (a - b q1 - c2) / (2b))`.
pub fn follower_br_analytic(p: &LinearDuopolyParams, q1: f64) -> f64 {
    ((p.a - p.b * q1 - p.c2) / (2.0 * p.b)).max(0.0)
}

/// Closed-form leader-follower equilibrium of the linear duopoly.
///
/// Outside the interior region the leader quantity is clamped at zero and
/// the follower plays its clamped reaction; `interior` is then false.
pub fn solve_spne_analytic(p: &LinearDuopolyParams) -> Result<SpneSolution> {
    p.validate()?;
    let interior = p.is_interior();
    let (q1, q2) = if interior {
        (p.leader_quantity(), p.follower_quantity())
    } else {
        let q1 = p.leader_quantity().max(0.0);
        (q1, follower_br_analytic(p, q1))
    };
    let (u1, u2) = p.profits(q1, q2);
    Ok(SpneSolution {
        leader_action: Action::scalar(q1),
        follower_action: Action::scalar(q2),
        leader_utility: u1,
        follower_utility: u2,
        method: SpneMethod::Analytic,
        interior,
        foc_residual: interior.then(|| (p.a - p.b * q1 - 2.0 * p.b * q2 - p.c2).abs()),
    })
}

/// The follower's best response to leader action `leader`.
pub fn follower_br_numeric(g: &TwoPlayerGame, leader: &Action, cfg: &BrSolverConfig) -> Result<Action> {
    let game = g.game();
    let mut profile = game.lowest_profile();
    profile.set(LEADER, leader.clone());
    game.check_profile(&profile)?;
    best_response(game, FOLLOWER, &profile, cfg)
}

fn leader_value(game: &Game, leader: Action, cfg: &BrSolverConfig) -> Result<(f64, StrategyProfile)> {
    let mut profile = game.lowest_profile();
    profile.set(LEADER, leader);
    let reply = best_response(game, FOLLOWER, &profile, cfg)?;
    profile.set(FOLLOWER, reply);
    Ok((game.utility_unchecked(LEADER, &profile)?, profile))
}

/// Backward induction with the follower's reaction computed numerically at
/// every leader candidate. The leader optimises once and never revisits its
/// choice after the reply.
pub fn solve_spne_numeric(g: &TwoPlayerGame, cfg: &BrSolverConfig) -> Result<SpneSolution> {
    cfg.validate()?;
    let game = g.game();
    let leader_action = match game.space(LEADER) {
        ActionSpace::Finite(actions) => {
            let mut best: Option<(f64, &Action)> = None;
            for action in actions {
                let (value, _) = leader_value(game, action.clone(), cfg)?;
                if best.is_none_or(|(bv, _)| value > bv) {
                    best = Some((value, action));
                }
            }
            best.ok_or_else(|| Error::InvalidGame("leader has an empty action set".into()))?
                .1
                .clone()
        }
        &ActionSpace::Interval { lo, hi } => {
            let (x, _) = grid_argmax(lo, hi, cfg, |x| {
                leader_value(game, Action::scalar(x), cfg).map(|(v, _)| v)
            })?;
            Action::scalar(x)
        }
    };

    let (_, profile) = leader_value(game, leader_action, cfg)?;
    let utilities = game.utilities_unchecked(&profile)?;
    let (interior, foc_residual) = follower_foc_residual(game, &profile)?;
    Ok(SpneSolution {
        leader_action: profile.action(LEADER).clone(),
        follower_action: profile.action(FOLLOWER).clone(),
        leader_utility: utilities[LEADER],
        follower_utility: utilities[FOLLOWER],
        method: SpneMethod::NumericBilevel,
        interior,
        foc_residual,
    })
}

/// Central-difference derivative of the follower's utility in its own
/// action, when that action is a scalar strictly inside its interval.
pub fn follower_foc_residual(game: &Game, profile: &StrategyProfile) -> Result<(bool, Option<f64>)> {
    let (lo, hi) = match game.space(FOLLOWER).bounds() {
        Some(bounds) => bounds,
        None => return Ok((true, None)),
    };
    let q2 = profile.scalar(FOLLOWER);
    let h = 1e-5 * (hi - lo);
    if q2 - h < lo || q2 + h > hi {
        return Ok((false, None));
    }
    let mut probe = profile.clone();
    probe.set_scalar(FOLLOWER, q2 + h);
    let up = game.utility_unchecked(FOLLOWER, &probe)?;
    probe.set_scalar(FOLLOWER, q2 - h);
    let down = game.utility_unchecked(FOLLOWER, &probe)?;
    Ok((true, Some(((up - down) / (2.0 * h)).abs())))
}
