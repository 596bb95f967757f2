// Tabulates the bad-event bound, checks the ratio inequality exactly, and
// estimates the configuration probability it depends on.

use metric_zero_one::analysis::{
    bound_table, bound_table_csv, check_ratio_inequality, estimate_lambda_a, lambda_a_upper_bound,
    ratio_gap, BadEventSpec,
};
use metric_zero_one::metric_core::FiniteMetricSpace;
use metric_zero_one::sampling::substream;
use metric_zero_one::Result;
use num_traits::ToPrimitive;

pub fn run_example() -> Result<()> {
    let spec = BadEventSpec { k: 1, epsilon: 0.2, delta: 0.0, m: 1, lambda_a: 1.0 };
    print!("{}", bound_table_csv(&bound_table(&spec, 10..=14)?));

    for (k, delta) in [(1, 0.0), (1, 0.125), (3, 0.05)] {
        println!(
            "k = {k}, delta = {delta}: inequality holds {}, gap {:.6}",
            check_ratio_inequality(k, delta, 0.2)?,
            ratio_gap(k, delta, 0.2)?.to_f64().unwrap_or(f64::NAN)
        );
    }

    let x = FiniteMetricSpace::from_matrix(&[vec![0.0, 0.6], vec![0.6, 0.0]])?;
    let est = estimate_lambda_a(&x, 0.1, 100_000, &mut substream(3, 0, 0))?;
    println!(
        "lambda_A for a pair at 0.6, eps = 0.1: {:.4} [{:.4}, {:.4}] (bound {:.4})",
        est.value,
        est.ci_low,
        est.ci_high,
        lambda_a_upper_bound(2, 0.1)
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
