//! JSON run configuration.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use gamesolve::supermodular::SupermodularOptions;
use gamesolve::{
    Action, ActionSpace, BrSolverConfig, DecisionRule, Game, GameSpec, Schedule, StopCriteria, StrategyProfile,
    DEFAULT_ACTION_TOL,
};
use serde::{Deserialize, Serialize};

/// One run: a game, a command and its options, and where output goes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub game: GameSpec,
    #[serde(flatten)]
    pub command: Command,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default)]
    pub solver: BrSolverConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", content = "options")]
pub enum Command {
    Dynamics(DynamicsOptions),
    NashCheck(NashCheckOptions),
    EnumerateNash(EnumerateOptions),
    Supermodular(SupermodularOptions),
    Spne(SpneOptions),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Dynamics(_) => "Dynamics",
            Command::NashCheck(_) => "NashCheck",
            Command::EnumerateNash(_) => "EnumerateNash",
            Command::Supermodular(_) => "Supermodular",
            Command::Spne(_) => "Spne",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DynamicsOptions {
    pub rule: DecisionRule,
    pub schedule: Schedule,
    /// Starting profile; the lowest action of every player when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub init: Option<Vec<ActionValue>>,
    pub stop: StopCriteria,
    /// Tolerance of the ε-Nash check on the final profile.
    pub nash_eps: f64,
}

impl Default for DynamicsOptions {
    fn default() -> Self {
        DynamicsOptions {
            rule: DecisionRule::BestResponse,
            schedule: Schedule::Synchronous,
            init: None,
            stop: StopCriteria::default(),
            nash_eps: 1e-6,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NashCheckOptions {
    pub profile: Vec<ActionValue>,
    #[serde(default)]
    pub eps: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnumerateOptions {
    pub eps: f64,
    /// Grid points per interval space when the game is continuous.
    pub resolution: usize,
}

impl Default for EnumerateOptions {
    fn default() -> Self {
        EnumerateOptions {
            eps: 0.0,
            resolution: 101,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpneOptions {
    /// Skip the numeric bilevel solve (linear duopolies only).
    pub analytic_only: bool,
}

/// An action as written in a config: a scalar, a `"#k"` list index, or a vector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ActionValue {
    Scalar(f64),
    Index(String),
    Vector(Vec<f64>),
}

impl ActionValue {
    pub fn resolve(&self, space: &ActionSpace, player: usize) -> anyhow::Result<Action> {
        let action = match self {
            ActionValue::Scalar(x) => Action::scalar(*x),
            ActionValue::Vector(v) => Action::vector(v.clone()),
            ActionValue::Index(s) => {
                let k: usize = s
                    .strip_prefix('#')
                    .and_then(|k| k.parse().ok())
                    .with_context(|| format!("player {player}: action `{s}` is not of the form #<index>"))?;
                let Some(actions) = space.finite_actions() else {
                    bail!("player {player}: index `{s}` given for an interval space");
                };
                match actions.get(k) {
                    Some(a) => a.clone(),
                    None => bail!("player {player}: index {k} out of range (0..{})", actions.len()),
                }
            }
        };
        if !space.contains(&action, DEFAULT_ACTION_TOL) {
            bail!(
                "player {player}: action {:?} is outside its action space",
                action.as_slice()
            );
        }
        Ok(action)
    }
}

pub fn resolve_profile(game: &Game, values: &[ActionValue]) -> anyhow::Result<StrategyProfile> {
    if values.len() != game.n_players() {
        bail!(
            "profile has {} actions, game has {} players",
            values.len(),
            game.n_players()
        );
    }
    let actions = values
        .iter()
        .enumerate()
        .map(|(i, v)| v.resolve(game.space(i), i))
        .collect::<anyhow::Result<Vec<_>>>()?;
    Ok(StrategyProfile::new(actions))
}

impl RunConfig {
    pub fn from_json(text: &str) -> anyhow::Result<Self> {
        serde_json::from_str(text).context("config does not parse")
    }

    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::from_json(&text).with_context(|| format!("in {}", path.display()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialises")
    }

    /// Whether running this config draws random numbers.
    pub fn uses_rng(&self, game: &Game) -> bool {
        match &self.command {
            Command::Dynamics(d) => d.rule.uses_rng() || d.schedule.uses_rng(),
            Command::Supermodular(_) => game.spaces().iter().any(|s| !s.is_finite()),
            Command::NashCheck(_) | Command::EnumerateNash(_) | Command::Spne(_) => false,
        }
    }

    /// Checks everything that can be checked without running; returns the built game.
    pub fn validate(&self) -> anyhow::Result<Game> {
        let game = self.game.build()?;
        let report = game.validate();
        if !report.ok {
            let issues: Vec<String> = report
                .players
                .iter()
                .flat_map(|p| p.issues.iter().map(move |m| format!("player {}: {m}", p.player)))
                .collect();
            bail!("game failed validation: {}", issues.join("; "));
        }
        self.solver.validate()?;
        match &self.command {
            Command::Dynamics(d) => {
                d.rule.validate()?;
                d.schedule.validate()?;
                check_tol("stop.fix_tol", d.stop.fix_tol)?;
                check_tol("stop.action_tol", d.stop.action_tol)?;
                check_tol("nash_eps", d.nash_eps)?;
                if let Some(init) = &d.init {
                    resolve_profile(&game, init).context("init")?;
                }
            }
            Command::NashCheck(n) => {
                check_tol("eps", n.eps)?;
                resolve_profile(&game, &n.profile).context("profile")?;
            }
            Command::EnumerateNash(e) => {
                check_tol("eps", e.eps)?;
                if e.resolution < 2 && game.spaces().iter().any(|s| !s.is_finite()) {
                    bail!("resolution must be at least 2");
                }
            }
            Command::Supermodular(_) => {}
            Command::Spne(_) => {
                if game.n_players() != 2 {
                    bail!("Spne needs a two-player game, got {} players", game.n_players());
                }
            }
        }
        if self.seed.is_none() && self.uses_rng(&game) {
            bail!("this command draws random numbers; a seed is required");
        }
        Ok(game)
    }
}

fn check_tol(name: &str, value: f64) -> anyhow::Result<()> {
    if !(value.is_finite() && value >= 0.0) {
        bail!("{name} must be a finite non-negative number, got {value}");
    }
    Ok(())
}
