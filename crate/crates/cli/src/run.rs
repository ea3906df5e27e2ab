//! Command execution and JSON reports.

use std::fs;
use std::path::Path;

use anyhow::Context;
use gamesolve::equilibrium::grid_nash_candidates;
use gamesolve::stackelberg::follower_foc_residual;
use gamesolve::{
    diagnose_supermodularity, enumerate_pure_nash_finite, is_epsilon_nash, run_dynamics, solve_spne_analytic,
    solve_spne_numeric, trace, ActionSpace, Game, GameRng, GameSpec, SpneSolution, StrategyProfile,
    SupermodularVerdict, DEFAULT_ACTION_TOL,
};
use serde_json::{json, Value};

use crate::config::{resolve_profile, Command, RunConfig};

pub const REPORT_VERSION: &str = "1";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    /// Converged, is Nash, equilibria found, or diagnostics complete.
    Success,
    /// Ran to completion with a negative answer.
    Negative,
}

impl Outcome {
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Success => 0,
            Outcome::Negative => 2,
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunOutput {
    pub outcome: Outcome,
    pub summary: String,
    pub report: Value,
    /// CSV trace, for commands that produce a trajectory.
    pub trace: Option<String>,
}

impl RunOutput {
    pub fn report_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.report).expect("report serialises");
        s.push('\n');
        s
    }
}

/// Executes `config` without touching the file system.
pub fn execute(config: &RunConfig) -> anyhow::Result<RunOutput> {
    let game = config.validate()?;
    let mut rng = GameRng::seed_from(config.seed.unwrap_or(0));
    let mut trace_text = None;

    let (outcome, summary, result, diagnostics) = match &config.command {
        Command::Dynamics(opts) => {
            let init = match &opts.init {
                Some(values) => resolve_profile(&game, values)?,
                None => game.lowest_profile(),
            };
            let traj = run_dynamics(
                &game,
                &init,
                &opts.rule,
                &opts.schedule,
                &config.solver,
                &opts.stop,
                &mut rng,
            )?;
            let last = traj.final_step();
            let verdict = is_epsilon_nash(&game, &last.profile, opts.nash_eps, &config.solver)?;
            trace_text = Some(trace::trace_to_string(&game, &traj));
            let outcome = if traj.converged {
                Outcome::Success
            } else {
                Outcome::Negative
            };
            let summary = format!(
                "dynamics {:?} after {} iterations; final profile {}",
                traj.stop_reason,
                traj.iterations(),
                profile_text(&game, &last.profile)
            );
            let result = json!({
                "converged": traj.converged,
                "stop_reason": traj.stop_reason,
                "iterations": traj.iterations(),
                "final_profile": profile_json(&game, &config.game, &last.profile),
                "final_utilities": last.utilities,
                "final_nash_check": {
                    "eps": opts.nash_eps,
                    "is_nash": verdict.is_nash,
                    "worst_player": verdict.worst_player,
                    "worst_gain": verdict.worst_gain(),
                },
            });
            let diagnostics = json!({
                "rule": opts.rule,
                "schedule": opts.schedule,
                "stop": opts.stop,
                "solver": config.solver,
                "initial_profile": profile_json(&game, &config.game, &init),
                "trace_rows": traj.steps.len(),
            });
            (outcome, summary, result, diagnostics)
        }
        Command::NashCheck(opts) => {
            let profile = resolve_profile(&game, &opts.profile)?;
            let verdict = is_epsilon_nash(&game, &profile, opts.eps, &config.solver)?;
            let outcome = if verdict.is_nash {
                Outcome::Success
            } else {
                Outcome::Negative
            };
            let summary = format!(
                "profile {} is {}a Nash equilibrium at eps {} (worst gain {})",
                profile_text(&game, &profile),
                if verdict.is_nash { "" } else { "not " },
                trace::format_real(opts.eps),
                trace::format_real(verdict.worst_gain())
            );
            let deviation = verdict.worst_deviation.as_ref().map(|d| {
                let player = verdict.worst_player.expect("deviation has a player");
                json!({
                    "player": player,
                    "action": action_json(game.space(player), &d.action),
                    "gain": d.gain,
                })
            });
            let result = json!({
                "profile": profile_json(&game, &config.game, &profile),
                "utilities": game.evaluate_utilities(&profile)?,
                "is_nash": verdict.is_nash,
                "eps": opts.eps,
                "worst_deviation": deviation,
            });
            let diagnostics = json!({ "solver": config.solver });
            (outcome, summary, result, diagnostics)
        }
        Command::EnumerateNash(opts) => {
            let all_finite = game.spaces().iter().all(ActionSpace::is_finite);
            let (method, equilibria) = if all_finite {
                ("exhaustive", enumerate_pure_nash_finite(&game, opts.eps)?)
            } else {
                (
                    "grid",
                    grid_nash_candidates(&game, opts.resolution, opts.eps, &config.solver)?,
                )
            };
            let outcome = if equilibria.is_empty() {
                Outcome::Negative
            } else {
                Outcome::Success
            };
            let listed: Vec<String> = equilibria.iter().map(|p| profile_text(&game, p)).collect();
            let summary = format!(
                "{} pure equilibria found ({method}): [{}]",
                equilibria.len(),
                listed.join(", ")
            );
            let entries = equilibria
                .iter()
                .map(|p| {
                    Ok(json!({
                        "profile": profile_json(&game, &config.game, p),
                        "utilities": game.evaluate_utilities(p)?,
                    }))
                })
                .collect::<anyhow::Result<Vec<Value>>>()?;
            let result = json!({
                "equilibria": entries,
                "count": equilibria.len(),
                "eps": opts.eps,
            });
            let mut diagnostics = json!({ "method": method });
            if !all_finite {
                diagnostics["resolution"] = json!(opts.resolution);
                diagnostics["solver"] = json!(config.solver);
            }
            (outcome, summary, result, diagnostics)
        }
        Command::Supermodular(opts) => {
            let report = diagnose_supermodularity(&game, opts, &config.solver, &mut rng)?;
            let min_cp = report.min_cross_partial();
            let summary = format!(
                "supermodularity verdict {:?}{}",
                report.verdict,
                min_cp
                    .map(|m| format!("; min cross-partial {}", trace::format_real(m)))
                    .unwrap_or_default()
            );
            let result = json!({
                "verdict": report.verdict,
                "supermodular": report.verdict == SupermodularVerdict::Supermodular,
                "min_cross_partial": min_cp,
                "lattice": report.lattice,
                "utilities": report.utilities,
                "cross_partials": report.cross_partials,
                "br_properties": report.br_properties,
            });
            let diagnostics = json!({ "options": opts, "solver": config.solver });
            (Outcome::Success, summary, result, diagnostics)
        }
        Command::Spne(opts) => {
            let two = config.game.two_player()?.context("Spne needs a two-player game")?;
            let analytic = config
                .game
                .linear_params()
                .map(|p| solve_spne_analytic(&p))
                .transpose()?;
            let numeric = if opts.analytic_only && analytic.is_some() {
                None
            } else {
                Some(solve_spne_numeric(&two, &config.solver)?)
            };
            let primary = numeric.as_ref().or(analytic.as_ref()).expect("at least one method ran");
            let (interior, foc_residual) = follower_foc_residual(two.game(), &primary.profile())?;
            let max_difference = match (&analytic, &numeric) {
                (Some(a), Some(n)) => Some(
                    a.leader_action
                        .distance(&n.leader_action)
                        .max(a.follower_action.distance(&n.follower_action)),
                ),
                _ => None,
            };
            let summary = [analytic.as_ref(), numeric.as_ref()]
                .into_iter()
                .flatten()
                .map(|s| {
                    format!(
                        "{:?} ({}, {})",
                        s.method,
                        action_text(&s.leader_action),
                        action_text(&s.follower_action)
                    )
                })
                .collect::<Vec<_>>()
                .join("; ");
            let result = json!({
                "analytic": analytic.as_ref().map(|s| spne_json(&game, s)),
                "numeric": numeric.as_ref().map(|s| spne_json(&game, s)),
                "max_abs_difference": max_difference,
            });
            let diagnostics = json!({
                "foc_residual": foc_residual,
                "interior": interior,
                "solver": config.solver,
            });
            (
                Outcome::Success,
                format!("leader-follower equilibrium: {summary}"),
                result,
                diagnostics,
            )
        }
    };

    let mut game_json = json!({
        "kind": config.game.kind(),
        "definition": config.game,
        "players": game.n_players(),
    });
    if config.game.is_illustrative() {
        game_json["model"] = json!("illustrative");
    }
    let report = json!({
        "command": config.command.name(),
        "game": game_json,
        "seed": config.seed,
        "result": result,
        "diagnostics": diagnostics,
        "spec_version": REPORT_VERSION,
    });
    Ok(RunOutput {
        outcome,
        summary,
        report,
        trace: trace_text,
    })
}

/// Executes `config` and writes its trace and report, report last.
pub fn run(config: &RunConfig) -> anyhow::Result<RunOutput> {
    let output = execute(config)?;
    if let (Some(path), Some(text)) = (&config.trace, &output.trace) {
        write_file(path, text)?;
    }
    if let Some(path) = &config.report {
        write_file(path, &output.report_json())?;
    }
    Ok(output)
}

fn write_file(path: &Path, text: &str) -> anyhow::Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn action_json(space: &ActionSpace, action: &gamesolve::Action) -> Value {
    match space {
        ActionSpace::Finite(_) => match space.index_of(action, DEFAULT_ACTION_TOL) {
            Some(k) => json!(format!("#{k}")),
            None => json!(action.as_slice()),
        },
        ActionSpace::Interval { .. } => json!(action.as_scalar()),
    }
}

fn profile_json(game: &Game, spec: &GameSpec, profile: &StrategyProfile) -> Value {
    let actions: Vec<Value> = profile
        .actions()
        .iter()
        .enumerate()
        .map(|(i, a)| action_json(game.space(i), a))
        .collect();
    match spec.action_labels() {
        Some(labels) => {
            let names: Vec<Option<&String>> = profile
                .actions()
                .iter()
                .enumerate()
                .map(|(i, a)| {
                    game.space(i)
                        .index_of(a, DEFAULT_ACTION_TOL)
                        .and_then(|k| labels.get(i).and_then(|l| l.get(k)))
                })
                .collect();
            json!({ "actions": actions, "labels": names })
        }
        None => json!({ "actions": actions }),
    }
}

fn spne_json(game: &Game, s: &SpneSolution) -> Value {
    json!({
        "method": s.method,
        "leader_action": action_json(game.space(0), &s.leader_action),
        "follower_action": action_json(game.space(1), &s.follower_action),
        "leader_utility": s.leader_utility,
        "follower_utility": s.follower_utility,
        "interior": s.interior,
        "foc_residual": s.foc_residual,
    })
}

fn action_text(a: &gamesolve::Action) -> String {
    let parts: Vec<String> = a.as_slice().iter().copied().map(trace::format_real).collect();
    if parts.len() == 1 {
        parts[0].clone()
    } else {
        format!("[{}]", parts.join(" "))
    }
}

fn profile_text(game: &Game, profile: &StrategyProfile) -> String {
    let parts: Vec<String> = profile
        .actions()
        .iter()
        .enumerate()
        .map(|(i, a)| match game.space(i).index_of(a, DEFAULT_ACTION_TOL) {
            Some(k) if game.space(i).is_finite() => format!("#{k}"),
            _ => action_text(a),
        })
        .collect();
    format!("({})", parts.join(", "))
}
