//! Supermodularity diagnostics.
//!
//! A game is supermodular when its joint action space is a lattice under
//! componentwise min/max and every utility satisfies
//! `f(a) + f(b) <= f(a ∧ b) + f(a ∨ b)`. On box spaces with smooth utilities
//! non-negative cross-partials `∂²u_i/∂a_i∂a_j` are sufficient. Finite games
//! are checked exhaustively; continuous ones are sampled, so a clean sample
//! is reported as "no violation found" rather than a proof.

use serde::{Deserialize, Serialize};

use crate::dynamics::{best_response, grid_point, BrSolverConfig};
use crate::equilibrium::{checked_product, decode_index, profile_from_digits, DEFAULT_PRODUCT_CAP};
use crate::error::{Error, Result};
use crate::game::{Action, ActionSpace, Game, StrategyProfile, DEFAULT_ACTION_TOL};
use crate::rng::GameRng;

/// Slack allowed in the supermodular inequality before it counts as violated.
pub const SUPERMODULAR_TOL: f64 = 1e-9;

pub fn meet(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x.min(*y)).collect()
}

pub fn join(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x.max(*y)).collect()
}

fn meet_profiles(a: &StrategyProfile, b: &StrategyProfile) -> StrategyProfile {
    StrategyProfile::new(
        a.actions()
            .iter()
            .zip(b.actions())
            .map(|(x, y)| Action::vector(meet(x.as_slice(), y.as_slice())))
            .collect(),
    )
}

fn join_profiles(a: &StrategyProfile, b: &StrategyProfile) -> StrategyProfile {
    StrategyProfile::new(
        a.actions()
            .iter()
            .zip(b.actions())
            .map(|(x, y)| Action::vector(join(x.as_slice(), y.as_slice())))
            .collect(),
    )
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum LatticeWitness {
    /// Every space is an interval; a product of chains is a lattice.
    BoxSpace,
    /// Every pair of every finite set was checked.
    Exhaustive { pairs_checked: usize },
    /// `a` and `b` whose meet or join is missing from the set.
    Violation {
        player: Option<usize>,
        a: Action,
        b: Action,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticeCheck {
    pub is_lattice: bool,
    pub witness: LatticeWitness,
}

/// Is a finite set of action vectors closed under componentwise min and max?
pub fn check_lattice_set(points: &[Action]) -> Result<LatticeCheck> {
    check_lattice_set_for(points, None, DEFAULT_PRODUCT_CAP)
}

fn check_lattice_set_for(points: &[Action], player: Option<usize>, cap: u128) -> Result<LatticeCheck> {
    let n = points.len();
    checked_product(&[n, n], cap)?;
    let member = |v: Vec<f64>| {
        let v = Action::vector(v);
        points.iter().any(|p| p.approx_eq(&v, DEFAULT_ACTION_TOL))
    };
    let mut pairs = 0;
    for (k, a) in points.iter().enumerate() {
        for b in &points[k + 1..] {
            pairs += 1;
            if !member(meet(a.as_slice(), b.as_slice())) || !member(join(a.as_slice(), b.as_slice())) {
                return Ok(LatticeCheck {
                    is_lattice: false,
                    witness: LatticeWitness::Violation {
                        player,
                        a: a.clone(),
                        b: b.clone(),
                    },
                });
            }
        }
    }
    Ok(LatticeCheck {
        is_lattice: true,
        witness: LatticeWitness::Exhaustive { pairs_checked: pairs },
    })
}

/// Lattice check of the joint space. A product of sets is a lattice under
/// the componentwise order exactly when every factor is, so each finite
/// space is checked on its own and intervals pass as chains.
pub fn check_lattice(game: &Game) -> Result<LatticeCheck> {
    let mut pairs = 0;
    let mut any_finite = false;
    for (player, space) in game.spaces().iter().enumerate() {
        if let ActionSpace::Finite(actions) = space {
            any_finite = true;
            let check = check_lattice_set_for(actions, Some(player), DEFAULT_PRODUCT_CAP)?;
            match check.witness {
                LatticeWitness::Exhaustive { pairs_checked } => pairs += pairs_checked,
                _ => return Ok(check),
            }
        }
    }
    Ok(LatticeCheck {
        is_lattice: true,
        witness: if any_finite {
            LatticeWitness::Exhaustive { pairs_checked: pairs }
        } else {
            LatticeWitness::BoxSpace
        },
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupermodularViolation {
    pub a: StrategyProfile,
    pub b: StrategyProfile,
    /// `f(a) + f(b) - f(a ∧ b) - f(a ∨ b)`, positive for a violation.
    pub excess: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupermodularCheck {
    pub player: usize,
    pub holds: bool,
    /// True when every pair was checked; false for a random sample.
    pub exhaustive: bool,
    pub pairs_checked: usize,
    pub counterexample: Option<SupermodularViolation>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum PairSampling {
    Exhaustive,
    Sampled { pairs: usize },
}

/// `f(a) + f(b) - f(a ∧ b) - f(a ∨ b)` for player `player`'s utility.
pub fn supermodular_excess(game: &Game, player: usize, a: &StrategyProfile, b: &StrategyProfile) -> Result<f64> {
    let lo = snap_to_space(game, meet_profiles(a, b))?;
    let hi = snap_to_space(game, join_profiles(a, b))?;
    Ok(game.utility_unchecked(player, a)? + game.utility_unchecked(player, b)?
        - game.utility_unchecked(player, &lo)?
        - game.utility_unchecked(player, &hi)?)
}

/// Replaces finite-space actions with the matching list entry.
fn snap_to_space(game: &Game, profile: StrategyProfile) -> Result<StrategyProfile> {
    let mut out = profile.clone();
    for (player, space) in game.spaces().iter().enumerate() {
        if let ActionSpace::Finite(actions) = space {
            let k = space
                .index_of(profile.action(player), DEFAULT_ACTION_TOL)
                .ok_or_else(|| Error::NotALattice {
                    player,
                    a: profile.action(player).as_slice().to_vec(),
                    b: profile.action(player).as_slice().to_vec(),
                })?;
            out.set(player, actions[k].clone());
        }
    }
    Ok(out)
}

fn random_profile(game: &Game, rng: &mut GameRng) -> StrategyProfile {
    StrategyProfile::new(
        game.spaces()
            .iter()
            .map(|space| match space {
                ActionSpace::Finite(actions) => actions[rng.index(actions.len())].clone(),
                &ActionSpace::Interval { lo, hi } => Action::scalar(rng.uniform(lo, hi)),
            })
            .collect(),
    )
}

/// Tests the supermodular inequality for `player`, over every pair of joint
/// profiles (finite games) or over random pairs.
pub fn check_supermodular_utility(
    game: &Game,
    player: usize,
    sampling: PairSampling,
    rng: &mut GameRng,
) -> Result<SupermodularCheck> {
    let mut check = SupermodularCheck {
        player,
        holds: true,
        exhaustive: false,
        pairs_checked: 0,
        counterexample: None,
    };
    let test = |a: StrategyProfile, b: StrategyProfile, check: &mut SupermodularCheck| -> Result<bool> {
        check.pairs_checked += 1;
        let excess = supermodular_excess(game, player, &a, &b)?;
        if excess > SUPERMODULAR_TOL {
            check.holds = false;
            check.counterexample = Some(SupermodularViolation { a, b, excess });
            return Ok(true);
        }
        Ok(false)
    };

    match sampling {
        PairSampling::Exhaustive => {
            let sizes: Vec<usize> = game
                .spaces()
                .iter()
                .enumerate()
                .map(|(p, s)| {
                    s.finite_actions()
                        .map(<[Action]>::len)
                        .ok_or(Error::NotFiniteGame { player: p })
                })
                .collect::<Result<_>>()?;
            let total = checked_product(&sizes, DEFAULT_PRODUCT_CAP)?;
            checked_product(&[total, total], DEFAULT_PRODUCT_CAP.saturating_mul(DEFAULT_PRODUCT_CAP))?;
            check.exhaustive = true;
            let mut da = vec![0; sizes.len()];
            let mut db = vec![0; sizes.len()];
            for x in 0..total {
                decode_index(x, &sizes, &mut da);
                let a = profile_from_digits(game, &da);
                for y in x + 1..total {
                    decode_index(y, &sizes, &mut db);
                    if test(a.clone(), profile_from_digits(game, &db), &mut check)? {
                        return Ok(check);
                    }
                }
            }
        }
        PairSampling::Sampled { pairs } => {
            for _ in 0..pairs {
                let a = random_profile(game, rng);
                let b = random_profile(game, rng);
                if test(a, b, &mut check)? {
                    return Ok(check);
                }
            }
        }
    }
    Ok(check)
}

/// Default tolerance below zero still accepted as a non-negative cross-partial.
pub const CROSS_PARTIAL_TOL: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossPartialCheck {
    pub player: usize,
    pub other: usize,
    pub min: f64,
    pub max: f64,
    /// Profile at which the minimum was estimated.
    pub argmin: StrategyProfile,
    pub samples: usize,
    /// Draws rejected because the stencil left the space.
    pub resampled: usize,
    pub step_player: f64,
    pub step_other: f64,
    pub nonnegative: bool,
}

/// Four-point central estimate of `∂²u_player/∂a_player∂a_other` at `at`.
pub fn cross_partial_at(
    game: &Game,
    player: usize,
    other: usize,
    at: &StrategyProfile,
    h_player: f64,
    h_other: f64,
) -> Result<f64> {
    let (x, y) = (at.scalar(player), at.scalar(other));
    let (xp, xm, yp, ym) = (x + h_player, x - h_player, y + h_other, y - h_other);
    let mut probe = at.clone();
    let mut eval = |xi: f64, yj: f64| {
        probe.set_scalar(player, xi);
        probe.set_scalar(other, yj);
        game.utility_unchecked(player, &probe)
    };
    let numerator = eval(xp, yp)? - eval(xp, ym)? - eval(xm, yp)? + eval(xm, ym)?;
    Ok(numerator / ((xp - xm) * (yp - ym)))
}

/// Minimum of the mixed second partial over `points` random interior points.
///
/// `step` defaults to `1e-4` of each interval's width. Points whose stencil
/// would leave the space are redrawn and counted in `resampled`.
pub fn check_cross_partials(
    game: &Game,
    player: usize,
    other: usize,
    points: usize,
    step: Option<f64>,
    rng: &mut GameRng,
) -> Result<CrossPartialCheck> {
    if player == other {
        return Err(Error::InvalidParameter(
            "cross-partials need two distinct players".into(),
        ));
    }
    if points == 0 {
        return Err(Error::InvalidParameter("need at least one sample point".into()));
    }
    let (lo_i, hi_i) = game.space(player).bounds().ok_or(Error::NotIntervalSpace { player })?;
    let (lo_j, hi_j) = game
        .space(other)
        .bounds()
        .ok_or(Error::NotIntervalSpace { player: other })?;
    let h_i = step.unwrap_or(1e-4 * (hi_i - lo_i));
    let h_j = step.unwrap_or(1e-4 * (hi_j - lo_j));
    if !(h_i > 0.0 && h_j > 0.0) {
        return Err(Error::InvalidParameter(
            "finite-difference step must be positive".into(),
        ));
    }

    let max_attempts = points.saturating_mul(1000);
    let mut attempts = 0;
    let mut resampled = 0;
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    let mut argmin = None;
    let mut samples = 0;
    while samples < points {
        attempts += 1;
        if attempts > max_attempts {
            return Err(Error::DegenerateStep { attempts: max_attempts });
        }
        let at = random_profile(game, rng);
        let (x, y) = (at.scalar(player), at.scalar(other));
        if x - h_i < lo_i || x + h_i > hi_i || y - h_j < lo_j || y + h_j > hi_j {
            resampled += 1;
            continue;
        }
        let value = cross_partial_at(game, player, other, &at, h_i, h_j)?;
        samples += 1;
        max = max.max(value);
        if value < min {
            min = value;
            argmin = Some(at);
        }
    }
    Ok(CrossPartialCheck {
        player,
        other,
        min,
        max,
        argmin: argmin.expect("at least one sample"),
        samples,
        resampled,
        step_player: h_i,
        step_other: h_j,
        nonnegative: min >= -CROSS_PARTIAL_TOL,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BrSampling {
    pub profiles: usize,
    /// Scaling factors for the scalability check; each must exceed 1.
    pub alphas: Vec<f64>,
    /// Optional per-player sampling box, intersected with the spaces.
    pub region: Option<Vec<(f64, f64)>>,
}

impl Default for BrSampling {
    fn default() -> Self {
        BrSampling {
            profiles: 100,
            alphas: vec![1.5, 2.0],
            region: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BrTolerances {
    /// Grid utilities within this of the maximum count as optimal.
    pub utility_tie_tol: f64,
    /// Required slack in `alpha * BR(a) > BR(alpha * a) + margin`.
    pub scal_margin: f64,
}

impl Default for BrTolerances {
    fn default() -> Self {
        BrTolerances {
            utility_tie_tol: 1e-9,
            scal_margin: 0.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PropertyStatus {
    Holds,
    Violated,
    NotApplicable,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BrViolation {
    pub player: usize,
    pub profile: StrategyProfile,
    pub alpha: Option<f64>,
    pub detail: String,
}

/// Number of violations stored per property; the rest are only counted.
pub const MAX_STORED_VIOLATIONS: usize = 16;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropertyOutcome {
    pub status: PropertyStatus,
    pub checks: usize,
    pub violation_count: usize,
    pub violations: Vec<BrViolation>,
}

impl PropertyOutcome {
    fn new() -> Self {
        PropertyOutcome {
            status: PropertyStatus::Holds,
            checks: 0,
            violation_count: 0,
            violations: Vec::new(),
        }
    }

    fn not_applicable() -> Self {
        PropertyOutcome {
            status: PropertyStatus::NotApplicable,
            ..Self::new()
        }
    }

    fn record(&mut self, ok: bool, violation: impl FnOnce() -> BrViolation) {
        self.checks += 1;
        if !ok {
            self.status = PropertyStatus::Violated;
            self.violation_count += 1;
            if self.violations.len() < MAX_STORED_VIOLATIONS {
                self.violations.push(violation());
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BrPropertyReport {
    /// Grid resolution used for the uniqueness count.
    pub grid_points: usize,
    pub profiles_sampled: usize,
    pub uniqueness: PropertyOutcome,
    pub positivity: PropertyOutcome,
    pub scalability: PropertyOutcome,
}

/// Number of separate runs of grid points whose utility is within `tol` of
/// the grid maximum.
fn count_optima(game: &Game, player: usize, profile: &StrategyProfile, grid_points: usize, tol: f64) -> Result<usize> {
    let (lo, hi) = game.space(player).bounds().ok_or(Error::NotIntervalSpace { player })?;
    let mut probe = profile.clone();
    let values: Vec<f64> = (0..grid_points)
        .map(|k| {
            probe.set_scalar(player, grid_point(lo, hi, k, grid_points));
            game.utility_unchecked(player, &probe)
        })
        .collect::<Result<_>>()?;
    let best = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut runs = 0;
    let mut inside = false;
    for v in values {
        let near = v >= best - tol;
        if near && !inside {
            runs += 1;
        }
        inside = near;
    }
    Ok(runs)
}

fn sample_box(game: &Game, region: &Option<Vec<(f64, f64)>>) -> Result<Vec<(f64, f64)>> {
    let mut boxes = Vec::with_capacity(game.n_players());
    for (player, space) in game.spaces().iter().enumerate() {
        let (lo, hi) = space.bounds().ok_or(Error::NotIntervalSpace { player })?;
        let (lo, hi) = match region.as_ref().and_then(|r| r.get(player)) {
            Some(&(rlo, rhi)) => (lo.max(rlo), hi.min(rhi)),
            None => (lo, hi),
        };
        if lo > hi {
            return Err(Error::InvalidParameter(format!(
                "empty sampling region for player {player}"
            )));
        }
        boxes.push((lo, hi));
    }
    Ok(boxes)
}

fn draw_in(boxes: &[(f64, f64)], rng: &mut GameRng) -> StrategyProfile {
    StrategyProfile::new(
        boxes
            .iter()
            .map(|&(lo, hi)| Action::scalar(rng.uniform(lo, hi)))
            .collect(),
    )
}

/// Samples the uniqueness, positivity and scalability properties of every
/// player's best response. All spaces must be intervals.
pub fn check_br_properties(
    game: &Game,
    sample: &BrSampling,
    tolerances: &BrTolerances,
    cfg: &BrSolverConfig,
    rng: &mut GameRng,
) -> Result<BrPropertyReport> {
    cfg.validate()?;
    if let Some(&alpha) = sample.alphas.iter().find(|&&a| !(a > 1.0)) {
        return Err(Error::InvalidParameter(format!(
            "scalability needs alpha > 1, got {alpha}"
        )));
    }
    let boxes = sample_box(game, &sample.region)?;
    let n = game.n_players();

    let mut uniqueness = PropertyOutcome::new();
    let positivity_applies = game
        .spaces()
        .iter()
        .all(|s| s.bounds().is_some_and(|(lo, _)| lo >= 0.0));
    let mut positivity = if positivity_applies {
        PropertyOutcome::new()
    } else {
        PropertyOutcome::not_applicable()
    };

    for _ in 0..sample.profiles {
        let profile = draw_in(&boxes, rng);
        for player in 0..n {
            let runs = count_optima(game, player, &profile, cfg.grid_points, tolerances.utility_tie_tol)?;
            uniqueness.record(runs == 1, || BrViolation {
                player,
                profile: profile.clone(),
                alpha: None,
                detail: format!("{runs} separate optima on the grid"),
            });
            if positivity_applies {
                let br = best_response(game, player, &profile, cfg)?.as_scalar().expect("scalar");
                positivity.record(br > 0.0, || BrViolation {
                    player,
                    profile: profile.clone(),
                    alpha: None,
                    detail: format!("best response {br} is not positive"),
                });
            }
        }
    }

    let mut scalability = if sample.alphas.is_empty() {
        PropertyOutcome::not_applicable()
    } else {
        PropertyOutcome::new()
    };
    for &alpha in &sample.alphas {
        let mut scaled_boxes = Vec::with_capacity(n);
        for (player, (&(blo, bhi), space)) in boxes.iter().zip(game.spaces()).enumerate() {
            let (lo, hi) = space.bounds().expect("interval");
            let (slo, shi) = (blo.max(lo / alpha), bhi.min(hi / alpha));
            if slo > shi {
                return Err(Error::ScalabilityDomain { player, alpha });
            }
            scaled_boxes.push((slo, shi));
        }
        for _ in 0..sample.profiles {
            let profile = draw_in(&scaled_boxes, rng);
            let scaled = StrategyProfile::from_scalars(
                &profile
                    .scalars()
                    .expect("scalar")
                    .iter()
                    .map(|x| alpha * x)
                    .collect::<Vec<_>>(),
            );
            for player in 0..n {
                let br = best_response(game, player, &profile, cfg)?.as_scalar().expect("scalar");
                let br_scaled = best_response(game, player, &scaled, cfg)?.as_scalar().expect("scalar");
                scalability.record(alpha * br > br_scaled + tolerances.scal_margin, || BrViolation {
                    player,
                    profile: profile.clone(),
                    alpha: Some(alpha),
                    detail: format!("{alpha} * {br} is not above BR(alpha a) = {br_scaled}"),
                });
            }
        }
    }

    Ok(BrPropertyReport {
        grid_points: cfg.grid_points,
        profiles_sampled: sample.profiles,
        uniqueness,
        positivity,
        scalability,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SupermodularVerdict {
    Supermodular,
    NotSupermodular,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SupermodularOptions {
    /// Random pairs per player on non-finite games.
    pub pairs: usize,
    /// Sample points per ordered pair of interval players.
    pub cross_points: usize,
    pub cross_step: Option<f64>,
    /// Best-response property sampling; skipped when `None` or when some
    /// space is finite.
    pub br: Option<BrSampling>,
    pub br_tolerances: BrTolerances,
}

impl Default for SupermodularOptions {
    fn default() -> Self {
        SupermodularOptions {
            pairs: 1000,
            cross_points: 200,
            cross_step: None,
            br: Some(BrSampling::default()),
            br_tolerances: BrTolerances::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupermodularReport {
    pub lattice: LatticeCheck,
    pub utilities: Vec<SupermodularCheck>,
    pub cross_partials: Vec<CrossPartialCheck>,
    pub br_properties: Option<BrPropertyReport>,
    pub verdict: SupermodularVerdict,
}

impl SupermodularReport {
    pub fn min_cross_partial(&self) -> Option<f64> {
        self.cross_partials.iter().map(|c| c.min).reduce(f64::min)
    }
}

/// Runs every supermodularity diagnostic and combines them into a verdict.
///
/// `NotSupermodular` is only returned with a stored counterexample: either a
/// missing meet/join or a pair violating the inequality. A negative
/// cross-partial is turned into such a pair from its stencil points.
pub fn diagnose_supermodularity(
    game: &Game,
    opts: &SupermodularOptions,
    cfg: &BrSolverConfig,
    rng: &mut GameRng,
) -> Result<SupermodularReport> {
    let n = game.n_players();
    let lattice = check_lattice(game)?;
    let all_finite = game.spaces().iter().all(ActionSpace::is_finite);
    let all_interval = game.spaces().iter().all(|s| !s.is_finite());

    let mut utilities = Vec::with_capacity(n);
    if lattice.is_lattice {
        let sampling = if all_finite {
            PairSampling::Exhaustive
        } else {
            PairSampling::Sampled { pairs: opts.pairs }
        };
        for player in 0..n {
            utilities.push(check_supermodular_utility(game, player, sampling, rng)?);
        }
    }

    let mut cross_partials = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j && !game.space(i).is_finite() && !game.space(j).is_finite() {
                cross_partials.push(check_cross_partials(
                    game,
                    i,
                    j,
                    opts.cross_points,
                    opts.cross_step,
                    rng,
                )?);
            }
        }
    }

    if lattice.is_lattice {
        for cp in cross_partials.iter().filter(|c| !c.nonnegative) {
            let check = &mut utilities[cp.player];
            if check.counterexample.is_some() {
                continue;
            }
            let at = &cp.argmin;
            let (x, y) = (at.scalar(cp.player), at.scalar(cp.other));
            let mut a = at.clone();
            a.set_scalar(cp.player, x + cp.step_player);
            a.set_scalar(cp.other, y - cp.step_other);
            let mut b = at.clone();
            b.set_scalar(cp.player, x - cp.step_player);
            b.set_scalar(cp.other, y + cp.step_other);
            let excess = supermodular_excess(game, cp.player, &a, &b)?;
            if excess > SUPERMODULAR_TOL {
                check.holds = false;
                check.counterexample = Some(SupermodularViolation { a, b, excess });
            }
        }
    }

    let br_properties = match &opts.br {
        Some(sample) if all_interval => Some(check_br_properties(game, sample, &opts.br_tolerances, cfg, rng)?),
        _ => None,
    };

    let verdict = if !lattice.is_lattice || utilities.iter().any(|u| u.counterexample.is_some()) {
        SupermodularVerdict::NotSupermodular
    } else if all_finite || (all_interval && cross_partials.iter().all(|c| c.nonnegative)) {
        SupermodularVerdict::Supermodular
    } else {
        SupermodularVerdict::Inconclusive
    };

    Ok(SupermodularReport {
        lattice,
        utilities,
        cross_partials,
        br_properties,
        verdict,
    })
}
