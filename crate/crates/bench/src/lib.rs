//! Fixtures shared by the solver benchmarks.

use gamesolve::builtin::MatrixGameParams;
use gamesolve::{Game, GameRng, GameSpec, LinearDuopolyParams};

pub fn duopoly() -> LinearDuopolyParams {
    LinearDuopolyParams::new(10.0, 1.0, 2.0, 2.0).expect("valid parameters")
}

pub fn cournot() -> Game {
    GameSpec::CournotLinear(duopoly()).build().expect("valid game")
}

/// Two-player bimatrix game with `n` actions each and integer payoffs in `[0, 9]`.
pub fn random_bimatrix(n: usize, seed: u64) -> Game {
    let mut rng = GameRng::seed_from(seed);
    let mut table = || -> Vec<Vec<f64>> {
        (0..n)
            .map(|_| (0..n).map(|_| rng.int_inclusive(0, 9) as f64).collect())
            .collect()
    };
    let row_payoffs = table();
    let col_payoffs = table();
    GameSpec::MatrixGame(MatrixGameParams {
        row_payoffs,
        col_payoffs,
    })
    .build()
    .expect("valid game")
}
