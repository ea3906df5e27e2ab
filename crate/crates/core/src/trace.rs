//! CSV output of trajectories.
//!
//! Header `step,movers,action_0..action_{N-1},utility_0..utility_{N-1}`.
//! Movers are `;`-joined player indices (empty for step 0), finite actions
//! are written as `#<list index>` and reals with 12 significant digits.

use std::io::{self, Write};

use crate::dynamics::Trajectory;
use crate::game::{ActionSpace, Game, DEFAULT_ACTION_TOL};

/// Formats a real like C's `%.12g`: 12 significant digits, no locale,
/// trailing zeros trimmed, exponent form outside `[1e-5, 1e12)`.
pub fn format_real(x: f64) -> String {
    const SIG: usize = 12;
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.*e}", SIG - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..SIG as i32).contains(&exp) {
        let decimals = (SIG as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_string()
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", trim_zeros(mantissa), sign, exp.abs())
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn trace_header(n_players: usize) -> String {
    let mut cols = vec!["step".to_string(), "movers".to_string()];
    cols.extend((0..n_players).map(|i| format!("action_{i}")));
    cols.extend((0..n_players).map(|i| format!("utility_{i}")));
    cols.join(",")
}

pub fn write_trace<W: Write>(game: &Game, trajectory: &Trajectory, mut out: W) -> io::Result<()> {
    writeln!(out, "{}", trace_header(game.n_players()))?;
    for step in &trajectory.steps {
        let mut cols = Vec::with_capacity(2 + 2 * game.n_players());
        cols.push(step.iteration.to_string());
        cols.push(step.movers.iter().map(usize::to_string).collect::<Vec<_>>().join(";"));
        for (player, action) in step.profile.actions().iter().enumerate() {
            let cell = match game.space(player) {
                space @ ActionSpace::Finite(_) => match space.index_of(action, DEFAULT_ACTION_TOL) {
                    Some(k) => format!("#{k}"),
                    None => {
                        return Err(io::Error::new(
                            io::ErrorKind::InvalidData,
                            format!("action of player {player} is not in its action list"),
                        ))
                    }
                },
                ActionSpace::Interval { .. } => format_real(action.as_scalar().unwrap_or(f64::NAN)),
            };
            cols.push(cell);
        }
        cols.extend(step.utilities.iter().copied().map(format_real));
        writeln!(out, "{}", cols.join(","))?;
    }
    Ok(())
}

/// Trace as an in-memory string.
pub fn trace_to_string(game: &Game, trajectory: &Trajectory) -> String {
    let mut buf = Vec::new();
    write_trace(game, trajectory, &mut buf).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("trace is ASCII")
}
