// Solves ε-Ehrenfeucht–Fraïssé games and replays an extracted strategy.

use metric_zero_one::efgame::{extract_strategy, solve_game, GameLimits, Move};
use metric_zero_one::metric_core::FiniteMetricSpace;
use metric_zero_one::Result;

pub fn run_example() -> Result<()> {
    let x = FiniteMetricSpace::from_matrix(&[
        vec![0.0, 0.5, 0.7],
        vec![0.5, 0.0, 0.9],
        vec![0.7, 0.9, 0.0],
    ])?;
    let y = FiniteMetricSpace::from_matrix(&[
        vec![0.0, 0.55, 0.7],
        vec![0.55, 0.0, 0.85],
        vec![0.7, 0.85, 0.0],
    ])?;

    for eps in [0.04, 0.1] {
        let outcome = solve_game(&x, &y, 3, eps, GameLimits::default())?;
        println!(
            "3 rounds at eps = {eps}: player {} wins ({} states)",
            if outcome.player_ii_wins { "II" } else { "I" },
            outcome.explored_states
        );
    }

    let strategy = extract_strategy(&x, &y, 3, 0.1)?;
    let end = strategy.replay(&[Move::X(0), Move::Y(2), Move::X(1)]).expect("winning table");
    println!("replayed line ends at a = {:?}, b = {:?}", end.a, end.b);

    let point = FiniteMetricSpace::singleton();
    let outcome = solve_game(&point, &x, 2, 0.1, GameLimits::default())?;
    println!("singleton vs triangle, 2 rounds: player II wins = {}", outcome.player_ii_wins);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
