//! Nash verification and brute-force enumeration of pure equilibria.

use serde::{Deserialize, Serialize};

use crate::dynamics::{best_response_with_value, grid_point, BrSolverConfig};
use crate::error::{Error, Result};
use crate::game::{Action, ActionSpace, Game, StrategyProfile, DEFAULT_ACTION_TOL};

/// Default cap on the number of joint profiles an enumeration may visit.
pub const DEFAULT_PRODUCT_CAP: u128 = 10_000_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Deviation {
    pub action: Action,
    /// Utility gained by switching; never negative.
    pub gain: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NashVerdict {
    pub is_nash: bool,
    /// Player with the most profitable unilateral deviation (lowest index on ties).
    pub worst_player: Option<usize>,
    pub worst_deviation: Option<Deviation>,
}

impl NashVerdict {
    pub fn worst_gain(&self) -> f64 {
        self.worst_deviation.as_ref().map_or(0.0, |d| d.gain)
    }
}

/// Best unilateral deviation of `player`; staying put counts as a deviation
/// with zero gain.
pub fn best_deviation(
    game: &Game,
    player: usize,
    profile: &StrategyProfile,
    cfg: &BrSolverConfig,
) -> Result<Deviation> {
    let current = game.utility(player, profile)?;
    let (action, value) = best_response_with_value(game, player, profile, cfg)?;
    if value > current {
        Ok(Deviation {
            action,
            gain: value - current,
        })
    } else {
        Ok(Deviation {
            action: profile.action(player).clone(),
            gain: 0.0,
        })
    }
}

/// Checks `u_i(profile) + eps >= u_i(a_i, profile_{-i})` for every player,
/// with the best deviation found by the best-response search.
pub fn is_epsilon_nash(game: &Game, profile: &StrategyProfile, eps: f64, cfg: &BrSolverConfig) -> Result<NashVerdict> {
    if !(eps >= 0.0) {
        return Err(Error::InvalidParameter(format!("eps must be non-negative, got {eps}")));
    }
    game.check_profile(profile)?;
    let mut worst: Option<(usize, Deviation)> = None;
    for player in 0..game.n_players() {
        let dev = best_deviation(game, player, profile, cfg)?;
        if worst.as_ref().is_none_or(|(_, w)| dev.gain > w.gain) {
            worst = Some((player, dev));
        }
    }
    let (player, dev) = worst.expect("games have at least one player");
    Ok(NashVerdict {
        is_nash: dev.gain <= eps,
        worst_player: Some(player),
        worst_deviation: Some(dev),
    })
}

fn finite_sizes(game: &Game) -> Result<Vec<usize>> {
    game.spaces()
        .iter()
        .enumerate()
        .map(|(player, space)| match space {
            ActionSpace::Finite(actions) if actions.is_empty() => {
                Err(Error::InvalidGame(format!("player {player} has an empty action set")))
            }
            ActionSpace::Finite(actions) => Ok(actions.len()),
            ActionSpace::Interval { .. } => Err(Error::NotFiniteGame { player }),
        })
        .collect()
}

pub(crate) fn checked_product(sizes: &[usize], cap: u128) -> Result<usize> {
    let size = sizes.iter().fold(1u128, |acc, &s| acc.saturating_mul(s as u128));
    if size > cap {
        return Err(Error::ProductTooLarge { size, cap });
    }
    Ok(size as usize)
}

/// Mixed-radix decoding with player 0 as the most significant digit, so
/// increasing indices walk profiles in lexicographic order.
pub(crate) fn decode_index(mut index: usize, sizes: &[usize], digits: &mut [usize]) {
    for (d, &s) in digits.iter_mut().zip(sizes).rev() {
        *d = index % s;
        index /= s;
    }
}

pub(crate) fn profile_from_digits(game: &Game, digits: &[usize]) -> StrategyProfile {
    StrategyProfile::new(
        digits
            .iter()
            .enumerate()
            .map(|(player, &k)| game.space(player).finite_actions().expect("finite space")[k].clone())
            .collect(),
    )
}

/// All pure ε-equilibria of a finite game, in lexicographic profile order.
pub fn enumerate_pure_nash_finite(game: &Game, eps: f64) -> Result<Vec<StrategyProfile>> {
    enumerate_pure_nash_finite_capped(game, eps, DEFAULT_PRODUCT_CAP)
}

pub fn enumerate_pure_nash_finite_capped(game: &Game, eps: f64, cap: u128) -> Result<Vec<StrategyProfile>> {
    if !(eps >= 0.0) {
        return Err(Error::InvalidParameter(format!("eps must be non-negative, got {eps}")));
    }
    let sizes = finite_sizes(game)?;
    let total = checked_product(&sizes, cap)?;
    let n = game.n_players();

    let mut is_equilibrium = vec![true; total];
    let mut utilities = vec![0.0f64; total];
    let mut digits = vec![0usize; n];

    for player in 0..n {
        for (index, slot) in utilities.iter_mut().enumerate() {
            decode_index(index, &sizes, &mut digits);
            *slot = game.utility_unchecked(player, &profile_from_digits(game, &digits))?;
        }
        // Profiles sharing everyone else's actions differ only in this player's
        // digit, which has stride `stride` in the flat index.
        let stride: usize = sizes[player + 1..].iter().product();
        let block = stride * sizes[player];
        for base in (0..total).step_by(block) {
            for offset in 0..stride {
                let start = base + offset;
                let best = (0..sizes[player])
                    .map(|k| utilities[start + k * stride])
                    .fold(f64::NEG_INFINITY, f64::max);
                for k in 0..sizes[player] {
                    let idx = start + k * stride;
                    if best - utilities[idx] > eps {
                        is_equilibrium[idx] = false;
                    }
                }
            }
        }
    }

    Ok(is_equilibrium
        .iter()
        .enumerate()
        .filter(|(_, &ok)| ok)
        .map(|(index, _)| {
            decode_index(index, &sizes, &mut digits);
            profile_from_digits(game, &digits)
        })
        .collect())
}

/// ε-equilibria of the game restricted to a `resolution`-point grid per
/// interval, each polished by best-response iteration on the continuous
/// game and merged with candidates within `10 * action_tol`.
pub fn grid_nash_candidates(
    game: &Game,
    resolution: usize,
    eps: f64,
    cfg: &BrSolverConfig,
) -> Result<Vec<StrategyProfile>> {
    grid_nash_candidates_capped(game, resolution, eps, cfg, DEFAULT_PRODUCT_CAP)
}

pub fn grid_nash_candidates_capped(
    game: &Game,
    resolution: usize,
    eps: f64,
    cfg: &BrSolverConfig,
    cap: u128,
) -> Result<Vec<StrategyProfile>> {
    if resolution < 2 {
        return Err(Error::InvalidParameter("grid resolution must be at least 2".into()));
    }
    let mut spacing = Vec::with_capacity(game.n_players());
    let mut grid_spaces = Vec::with_capacity(game.n_players());
    for (player, space) in game.spaces().iter().enumerate() {
        let (lo, hi) = space.bounds().ok_or(Error::NotIntervalSpace { player })?;
        spacing.push((hi - lo) / (resolution - 1) as f64);
        grid_spaces.push(ActionSpace::finite_scalars(
            (0..resolution).map(|k| grid_point(lo, hi, k, resolution)),
        ));
    }
    let sizes = vec![resolution; game.n_players()];
    checked_product(&sizes, cap)?;
    let grid_game = game.with_spaces(grid_spaces)?;
    let raw = enumerate_pure_nash_finite_capped(&grid_game, eps, cap)?;

    let merge_tol = 10.0 * DEFAULT_ACTION_TOL;
    let mut clusters: Vec<(StrategyProfile, f64)> = Vec::new();
    for candidate in raw {
        let gain = is_epsilon_nash(game, &candidate, f64::INFINITY, cfg)?.worst_gain();
        let polished = polish_candidate(game, &candidate, cfg)?;
        let polished_gain = is_epsilon_nash(game, &polished, f64::INFINITY, cfg)?.worst_gain();
        let (profile, gain) = if polished_gain < gain {
            (polished, polished_gain)
        } else {
            (candidate, gain)
        };
        match clusters.iter_mut().find(|(p, _)| p.approx_eq(&profile, merge_tol)) {
            Some(existing) => {
                if gain < existing.1 {
                    *existing = (profile, gain);
                }
            }
            None => clusters.push((profile, gain)),
        }
    }
    Ok(clusters.into_iter().map(|(p, _)| p).collect())
}

const POLISH_ITERS: usize = 200;

fn polish_candidate(game: &Game, start: &StrategyProfile, cfg: &BrSolverConfig) -> Result<StrategyProfile> {
    let mut current = start.clone();
    for _ in 0..POLISH_ITERS {
        let mut next = current.clone();
        for player in 0..game.n_players() {
            let (action, _) = best_response_with_value(game, player, &current, cfg)?;
            next.set(player, action);
        }
        let change = next.distance(&current);
        current = next;
        if change <= 1e-13 {
            break;
        }
    }
    Ok(current)
}
