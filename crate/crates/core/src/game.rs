//! Strategic-form games: players, action spaces, profiles and utilities.
//!
//! A [`Game`] is a list of per-player [`ActionSpace`]s together with an
//! opaque utility evaluator `u(i, profile)`. All calculus done by other
//! modules goes through that evaluator (grid search, finite differences),
//! so any deterministic function of the joint profile can be plugged in.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance used for action equality and membership tests.
pub const DEFAULT_ACTION_TOL: f64 = 1e-9;

/// A single player's action. Continuous actions are one-dimensional;
/// finite action sets may hold vectors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Action(Vec<f64>);

impl Action {
    pub fn scalar(x: f64) -> Self {
        Action(vec![x])
    }

    pub fn vector(values: Vec<f64>) -> Self {
        Action(values)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// The value of a one-dimensional action.
    pub fn as_scalar(&self) -> Option<f64> {
        match self.0.as_slice() {
            [x] => Some(*x),
            _ => None,
        }
    }

    /// Largest componentwise absolute difference; infinite on dimension mismatch.
    pub fn distance(&self, other: &Action) -> f64 {
        if self.dim() != other.dim() {
            return f64::INFINITY;
        }
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &Action, tol: f64) -> bool {
        self.distance(other) <= tol
    }

    pub(crate) fn set_scalar(&mut self, x: f64) {
        self.0.clear();
        self.0.push(x);
    }
}

impl From<f64> for Action {
    fn from(x: f64) -> Self {
        Action::scalar(x)
    }
}

impl From<Vec<f64>> for Action {
    fn from(values: Vec<f64>) -> Self {
        Action(values)
    }
}

/// The set of actions available to one player.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum ActionSpace {
    /// Ordered list of distinct actions sharing one dimension.
    Finite(Vec<Action>),
    /// Closed interval `[lo, hi]` of scalar actions.
    Interval { lo: f64, hi: f64 },
}

impl ActionSpace {
    pub fn interval(lo: f64, hi: f64) -> Self {
        ActionSpace::Interval { lo, hi }
    }

    /// Finite space of scalar actions.
    pub fn finite_scalars<I: IntoIterator<Item = f64>>(values: I) -> Self {
        ActionSpace::Finite(values.into_iter().map(Action::scalar).collect())
    }

    /// Finite space `{0, 1, ..., n - 1}`, the usual encoding for labelled moves.
    pub fn indexed(n: usize) -> Self {
        Self::finite_scalars((0..n).map(|k| k as f64))
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, ActionSpace::Finite(_))
    }

    pub fn bounds(&self) -> Option<(f64, f64)> {
        match *self {
            ActionSpace::Interval { lo, hi } => Some((lo, hi)),
            ActionSpace::Finite(_) => None,
        }
    }

    pub fn finite_actions(&self) -> Option<&[Action]> {
        match self {
            ActionSpace::Finite(actions) => Some(actions),
            ActionSpace::Interval { .. } => None,
        }
    }

    pub fn index_of(&self, action: &Action, tol: f64) -> Option<usize> {
        self.finite_actions()?.iter().position(|a| a.approx_eq(action, tol))
    }

    pub fn contains(&self, action: &Action, tol: f64) -> bool {
        match *self {
            ActionSpace::Finite(_) => self.index_of(action, tol).is_some(),
            ActionSpace::Interval { lo, hi } => match action.as_scalar() {
                Some(x) => x.is_finite() && x >= lo && x <= hi,
                None => false,
            },
        }
    }

    /// Problems that break the space's invariants; empty when the space is usable.
    pub fn issues(&self) -> Vec<String> {
        let mut issues = Vec::new();
        match self {
            ActionSpace::Finite(actions) => {
                if actions.is_empty() {
                    issues.push("empty action set".to_string());
                    return issues;
                }
                let dim = actions[0].dim();
                if dim == 0 {
                    issues.push("zero-dimensional action".to_string());
                }
                if actions.iter().any(|a| a.dim() != dim) {
                    issues.push("actions do not share one dimension".to_string());
                }
                if actions.iter().any(|a| a.as_slice().iter().any(|x| !x.is_finite())) {
                    issues.push("non-finite action component".to_string());
                }
                for (k, a) in actions.iter().enumerate() {
                    if actions[..k].iter().any(|b| b.approx_eq(a, DEFAULT_ACTION_TOL)) {
                        issues.push(format!("duplicate action at index {k}"));
                    }
                }
            }
            ActionSpace::Interval { lo, hi } => {
                if !lo.is_finite() || !hi.is_finite() {
                    issues.push("interval bounds must be finite".to_string());
                } else if lo >= hi {
                    issues.push(format!("interval requires lo < hi, got [{lo}, {hi}]"));
                }
            }
        }
        issues
    }
}

/// One action per player.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct StrategyProfile {
    actions: Vec<Action>,
}

impl StrategyProfile {
    pub fn new(actions: Vec<Action>) -> Self {
        StrategyProfile { actions }
    }

    pub fn from_scalars(values: &[f64]) -> Self {
        StrategyProfile {
            actions: values.iter().copied().map(Action::scalar).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    pub fn actions(&self) -> &[Action] {
        &self.actions
    }

    pub fn action(&self, player: usize) -> &Action {
        &self.actions[player]
    }

    /// Scalar action of `player`.
    ///
    /// Panics if the action is not one-dimensional.
    pub fn scalar(&self, player: usize) -> f64 {
        self.actions[player].as_scalar().expect("scalar action expected")
    }

    /// Scalar actions of all players, or `None` if any action is a vector.
    pub fn scalars(&self) -> Option<Vec<f64>> {
        self.actions.iter().map(Action::as_scalar).collect()
    }

    /// Largest per-player action distance.
    pub fn distance(&self, other: &StrategyProfile) -> f64 {
        if self.len() != other.len() {
            return f64::INFINITY;
        }
        self.actions
            .iter()
            .zip(&other.actions)
            .map(|(a, b)| a.distance(b))
            .fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &StrategyProfile, tol: f64) -> bool {
        self.distance(other) <= tol
    }

    /// Copy with player `player`'s action replaced; no membership check.
    pub(crate) fn replaced(&self, player: usize, action: Action) -> StrategyProfile {
        let mut out = self.clone();
        out.actions[player] = action;
        out
    }

    pub(crate) fn set(&mut self, player: usize, action: Action) {
        self.actions[player] = action;
    }

    pub(crate) fn set_scalar(&mut self, player: usize, x: f64) {
        self.actions[player].set_scalar(x);
    }
}

/// Payoff evaluator `u(player, profile)`. Must be pure.
pub type UtilityFn = dyn Fn(usize, &StrategyProfile) -> f64 + Send + Sync;

/// A strategic game: per-player action spaces and a shared utility evaluator.
#[derive(Clone)]
pub struct Game {
    spaces: Vec<ActionSpace>,
    utility: Arc<UtilityFn>,
}

impl fmt::Debug for Game {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Game")
            .field("spaces", &self.spaces)
            .finish_non_exhaustive()
    }
}

impl Game {
    /// Builds a game. Fails only if there are no players; space validity is
    /// reported separately by [`Game::validate`].
    pub fn new<F>(spaces: Vec<ActionSpace>, utility: F) -> Result<Self>
    where
        F: Fn(usize, &StrategyProfile) -> f64 + Send + Sync + 'static,
    {
        Self::from_arc(spaces, Arc::new(utility))
    }

    pub fn from_arc(spaces: Vec<ActionSpace>, utility: Arc<UtilityFn>) -> Result<Self> {
        if spaces.is_empty() {
            return Err(Error::InvalidGame("a game needs at least one player".into()));
        }
        Ok(Game { spaces, utility })
    }

    pub fn n_players(&self) -> usize {
        self.spaces.len()
    }

    pub fn spaces(&self) -> &[ActionSpace] {
        &self.spaces
    }

    pub fn space(&self, player: usize) -> &ActionSpace {
        &self.spaces[player]
    }

    pub fn utility_fn(&self) -> Arc<UtilityFn> {
        Arc::clone(&self.utility)
    }

    /// Same spaces, different utilities.
    pub fn with_utility<F>(&self, utility: F) -> Game
    where
        F: Fn(usize, &StrategyProfile) -> f64 + Send + Sync + 'static,
    {
        Game {
            spaces: self.spaces.clone(),
            utility: Arc::new(utility),
        }
    }

    /// Game with every utility replaced by `alpha * u + beta`.
    pub fn affine_rescaled(&self, alpha: f64, beta: f64) -> Game {
        let inner = self.utility_fn();
        self.with_utility(move |i, p| alpha * inner(i, p) + beta)
    }

    /// Same utilities over different spaces (e.g. a discretisation).
    pub fn with_spaces(&self, spaces: Vec<ActionSpace>) -> Result<Game> {
        if spaces.len() != self.spaces.len() {
            return Err(Error::InvalidGame(format!(
                "expected {} spaces, got {}",
                self.spaces.len(),
                spaces.len()
            )));
        }
        Ok(Game {
            spaces,
            utility: self.utility_fn(),
        })
    }

    /// Evaluates one utility without checking profile membership.
    pub(crate) fn utility_unchecked(&self, player: usize, profile: &StrategyProfile) -> Result<f64> {
        let value = (self.utility)(player, profile);
        if value.is_finite() {
            Ok(value)
        } else {
            Err(Error::NonFiniteUtility { player, value })
        }
    }

    pub fn check_profile(&self, profile: &StrategyProfile) -> Result<()> {
        if profile.len() != self.n_players() {
            return Err(Error::InvalidProfile(format!(
                "profile has {} actions for {} players",
                profile.len(),
                self.n_players()
            )));
        }
        for (player, (space, action)) in self.spaces.iter().zip(profile.actions()).enumerate() {
            if !space.contains(action, DEFAULT_ACTION_TOL) {
                return Err(Error::ActionOutOfSpace {
                    player,
                    action: action.as_slice().to_vec(),
                });
            }
        }
        Ok(())
    }

    pub fn utility(&self, player: usize, profile: &StrategyProfile) -> Result<f64> {
        self.check_profile(profile)?;
        if player >= self.n_players() {
            return Err(Error::InvalidParameter(format!("no player {player}")));
        }
        self.utility_unchecked(player, profile)
    }

    pub fn evaluate_utilities(&self, profile: &StrategyProfile) -> Result<Vec<f64>> {
        self.check_profile(profile)?;
        self.utilities_unchecked(profile)
    }

    pub(crate) fn utilities_unchecked(&self, profile: &StrategyProfile) -> Result<Vec<f64>> {
        (0..self.n_players())
            .map(|i| self.utility_unchecked(i, profile))
            .collect()
    }

    /// `profile` with player `player` switched to `action`.
    pub fn with_action(&self, profile: &StrategyProfile, player: usize, action: Action) -> Result<StrategyProfile> {
        if player >= self.n_players() || profile.len() != self.n_players() {
            return Err(Error::InvalidProfile(format!(
                "player {player} is not in a {}-player profile",
                profile.len()
            )));
        }
        if !self.spaces[player].contains(&action, DEFAULT_ACTION_TOL) {
            return Err(Error::ActionOutOfSpace {
                player,
                action: action.as_slice().to_vec(),
            });
        }
        Ok(profile.replaced(player, action))
    }

    /// Checks the hypotheses that can be checked structurally: non-empty
    /// spaces and closed bounded intervals.
    pub fn validate(&self) -> ValidationReport {
        let players: Vec<SpaceCheck> = self
            .spaces
            .iter()
            .enumerate()
            .map(|(player, space)| {
                let issues = space.issues();
                let non_empty = match space {
                    ActionSpace::Finite(actions) => !actions.is_empty(),
                    ActionSpace::Interval { lo, hi } => lo <= hi,
                };
                SpaceCheck {
                    player,
                    non_empty,
                    compact: issues.is_empty(),
                    issues,
                }
            })
            .collect();
        let ok = players.iter().all(|p| p.non_empty && p.compact);
        ValidationReport { players, ok }
    }

    /// The lowest point of every interval / the first action of every finite set.
    pub fn lowest_profile(&self) -> StrategyProfile {
        StrategyProfile::new(
            self.spaces
                .iter()
                .map(|s| match s {
                    ActionSpace::Finite(actions) => actions[0].clone(),
                    ActionSpace::Interval { lo, .. } => Action::scalar(*lo),
                })
                .collect(),
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpaceCheck {
    pub player: usize,
    pub non_empty: bool,
    /// Bounded and closed as represented (finite set or `lo < hi` interval).
    pub compact: bool,
    pub issues: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub players: Vec<SpaceCheck>,
    pub ok: bool,
}
