use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid profile: {0}")]
    InvalidProfile(String),

    #[error("action {action:?} is outside the action space of player {player}")]
    ActionOutOfSpace { player: usize, action: Vec<f64> },

    #[error("utility of player {player} evaluated to non-finite value {value}")]
    NonFiniteUtility { player: usize, value: f64 },

    #[error("invalid game: {0}")]
    InvalidGame(String),

    #[error("invalid game spec field `{field}`: {message}")]
    InvalidSpec { field: String, message: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("operation requires finite action spaces (player {player} has an interval)")]
    NotFiniteGame { player: usize },

    #[error("operation requires interval action spaces (player {player} is finite)")]
    NotIntervalSpace { player: usize },

    #[error("joint space has {size} elements, above the cap of {cap}")]
    ProductTooLarge { size: u128, cap: u128 },

    #[error("space of player {player} is not a lattice: meet or join of {a:?} and {b:?} is missing")]
    NotALattice { player: usize, a: Vec<f64>, b: Vec<f64> },

    #[error("scalability sampling region is empty for player {player} at alpha = {alpha}")]
    ScalabilityDomain { player: usize, alpha: f64 },

    #[error("could not place a finite-difference stencil inside the space after {attempts} draws")]
    DegenerateStep { attempts: usize },
}
