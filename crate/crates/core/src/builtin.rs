//! Built-in game library.
//!
//! A [`GameSpec`] is the serialisable description used by configuration
//! files; [`GameSpec::build`] turns it into a [`Game`]. Finite moves are
//! encoded as the scalars `0, 1, ...`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{ActionSpace, Game};
use crate::stackelberg::{LinearDuopolyParams, TwoPlayerGame};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixGameParams {
    /// `row_payoffs[r][c]` is the row player's payoff.
    pub row_payoffs: Vec<Vec<f64>>,
    pub col_payoffs: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoordinationParams {
    #[serde(default = "two")]
    pub players: usize,
    #[serde(default = "two")]
    pub actions: usize,
}

fn two() -> usize {
    2
}

/// One price-setter (player 0) facing `consumers` buyers (players 1..=K).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DemandResponseParams {
    /// Consumer valuation scale in `v ln(1 + d)`.
    pub v: f64,
    /// Supply-cost curvature in `kappa (Σd)^2`.
    pub kappa: f64,
    pub price_max: f64,
    pub demand_max: f64,
    pub consumers: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "parameters")]
pub enum GameSpec {
    /// Simultaneous quantity competition under `p = a - b (q1 + q2)`.
    CournotLinear(LinearDuopolyParams),
    /// Same utilities; player 0 leads, player 1 follows.
    StackelbergLinear(LinearDuopolyParams),
    PrisonersDilemma,
    MatrixGame(MatrixGameParams),
    CoordinationGame(CoordinationParams),
    DemandResponseToy(DemandResponseParams),
}

/// Row-player payoffs of the prisoner's dilemma; index 0 = Cooperate, 1 = Defect.
pub const PRISONERS_DILEMMA: [[(f64, f64); 2]; 2] = [[(3.0, 3.0), (0.0, 5.0)], [(5.0, 0.0), (1.0, 1.0)]];

fn spec_error(field: &str, message: impl Into<String>) -> Error {
    Error::InvalidSpec {
        field: field.to_string(),
        message: message.into(),
    }
}

impl GameSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            GameSpec::CournotLinear(_) => "CournotLinear",
            GameSpec::StackelbergLinear(_) => "StackelbergLinear",
            GameSpec::PrisonersDilemma => "PrisonersDilemma",
            GameSpec::MatrixGame(_) => "MatrixGame",
            GameSpec::CoordinationGame(_) => "CoordinationGame",
            GameSpec::DemandResponseToy(_) => "DemandResponseToy",
        }
    }

    /// `(kind, description)` for every built-in.
    pub fn catalogue() -> Vec<(&'static str, &'static str)> {
        vec![
            (
                "CournotLinear",
                "2-player quantity duopoly, p = a - b(q1+q2), costs c1, c2; spaces [0, a/b]",
            ),
            (
                "StackelbergLinear",
                "CournotLinear with player 0 as leader and player 1 as follower",
            ),
            (
                "PrisonersDilemma",
                "2x2 Cooperate/Defect, payoffs (3,3) (0,5) (5,0) (1,1)",
            ),
            ("MatrixGame", "2-player bimatrix game from row_payoffs and col_payoffs"),
            (
                "CoordinationGame",
                "n players, m actions; utility 1 when all actions match, else 0",
            ),
            (
                "DemandResponseToy",
                "illustrative: 1 price-setter, K consumers with v ln(1+d) - pi d; setter pi*sum(d) - kappa*sum(d)^2",
            ),
        ]
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            GameSpec::CournotLinear(p) | GameSpec::StackelbergLinear(p) => {
                for (field, v) in [("a", p.a), ("b", p.b), ("c1", p.c1), ("c2", p.c2)] {
                    if !v.is_finite() {
                        return Err(spec_error(field, "must be finite"));
                    }
                }
                if p.a <= 0.0 {
                    return Err(spec_error("a", "demand intercept must be positive"));
                }
                if p.b <= 0.0 {
                    return Err(spec_error("b", "demand slope must be positive"));
                }
                if p.c1 < 0.0 {
                    return Err(spec_error("c1", "marginal cost must be non-negative"));
                }
                if p.c2 < 0.0 {
                    return Err(spec_error("c2", "marginal cost must be non-negative"));
                }
            }
            GameSpec::PrisonersDilemma => {}
            GameSpec::MatrixGame(m) => {
                let rows = m.row_payoffs.len();
                if rows == 0 {
                    return Err(spec_error("row_payoffs", "needs at least one row"));
                }
                let cols = m.row_payoffs[0].len();
                if cols == 0 {
                    return Err(spec_error("row_payoffs", "needs at least one column"));
                }
                for (field, table) in [("row_payoffs", &m.row_payoffs), ("col_payoffs", &m.col_payoffs)] {
                    if table.len() != rows || table.iter().any(|r| r.len() != cols) {
                        return Err(spec_error(field, format!("must be a {rows}x{cols} matrix")));
                    }
                    if table.iter().flatten().any(|v| !v.is_finite()) {
                        return Err(spec_error(field, "payoffs must be finite"));
                    }
                }
            }
            GameSpec::CoordinationGame(c) => {
                if c.players == 0 {
                    return Err(spec_error("players", "needs at least one player"));
                }
                if c.actions == 0 {
                    return Err(spec_error("actions", "needs at least one action"));
                }
            }
            GameSpec::DemandResponseToy(d) => {
                if !(d.v > 0.0 && d.v.is_finite()) {
                    return Err(spec_error("v", "must be positive"));
                }
                if !(d.kappa >= 0.0 && d.kappa.is_finite()) {
                    return Err(spec_error("kappa", "must be non-negative"));
                }
                if !(d.price_max > 0.0 && d.price_max.is_finite()) {
                    return Err(spec_error("price_max", "must be positive"));
                }
                if !(d.demand_max > 0.0 && d.demand_max.is_finite()) {
                    return Err(spec_error("demand_max", "must be positive"));
                }
                if d.consumers == 0 {
                    return Err(spec_error("consumers", "needs at least one consumer"));
                }
            }
        }
        Ok(())
    }

    pub fn build(&self) -> Result<Game> {
        self.validate()?;
        match self {
            GameSpec::CournotLinear(p) | GameSpec::StackelbergLinear(p) => Ok(p.game()?.into_game()),
            GameSpec::PrisonersDilemma => bimatrix(
                PRISONERS_DILEMMA
                    .iter()
                    .map(|r| r.iter().map(|c| c.0).collect())
                    .collect(),
                PRISONERS_DILEMMA
                    .iter()
                    .map(|r| r.iter().map(|c| c.1).collect())
                    .collect(),
            ),
            GameSpec::MatrixGame(m) => bimatrix(m.row_payoffs.clone(), m.col_payoffs.clone()),
            GameSpec::CoordinationGame(c) => Game::new(vec![ActionSpace::indexed(c.actions); c.players], |_, p| {
                let first = p.action(0);
                if p.actions().iter().all(|a| a == first) {
                    1.0
                } else {
                    0.0
                }
            }),
            GameSpec::DemandResponseToy(d) => {
                let mut spaces = vec![ActionSpace::interval(0.0, d.price_max)];
                spaces.extend(std::iter::repeat_n(
                    ActionSpace::interval(0.0, d.demand_max),
                    d.consumers,
                ));
                let (v, kappa) = (d.v, d.kappa);
                Game::new(spaces, move |i, p| {
                    let price = p.scalar(0);
                    if i == 0 {
                        let total: f64 = (1..p.len()).map(|k| p.scalar(k)).sum();
                        price * total - kappa * total * total
                    } else {
                        let d = p.scalar(i);
                        v * d.ln_1p() - price * d
                    }
                })
            }
        }
    }

    /// The game as a leader-follower pair, when it has two players.
    pub fn two_player(&self) -> Result<Option<TwoPlayerGame>> {
        let game = self.build()?;
        if game.n_players() == 2 {
            TwoPlayerGame::new(game).map(Some)
        } else {
            Ok(None)
        }
    }

    pub fn linear_params(&self) -> Option<LinearDuopolyParams> {
        match self {
            GameSpec::CournotLinear(p) | GameSpec::StackelbergLinear(p) => Some(*p),
            _ => None,
        }
    }

    /// Move names for finite games that have them.
    pub fn action_labels(&self) -> Option<Vec<Vec<String>>> {
        match self {
            GameSpec::PrisonersDilemma => {
                let names = vec!["Cooperate".to_string(), "Defect".to_string()];
                Some(vec![names.clone(), names])
            }
            _ => None,
        }
    }

    /// Demonstration games whose functional forms carry no modelling claim.
    pub fn is_illustrative(&self) -> bool {
        matches!(self, GameSpec::DemandResponseToy(_))
    }
}

fn bimatrix(row: Vec<Vec<f64>>, col: Vec<Vec<f64>>) -> Result<Game> {
    let (rows, cols) = (row.len(), row[0].len());
    Game::new(
        vec![ActionSpace::indexed(rows), ActionSpace::indexed(cols)],
        move |i, p| {
            let (r, c) = (p.scalar(0) as usize, p.scalar(1) as usize);
            if i == 0 {
                row[r][c]
            } else {
                col[r][c]
            }
        },
    )
}
