// Builds finite spaces, checks grid extension axioms on them, round-trips
// them through JSON, and tracks a sentence's value across sizes.

use metric_zero_one::logic::parse;
use metric_zero_one::model_builder::{
    build_circulant, enumerate_grid_tasks, estimate_sigma_as, verify_axioms, GridSpec, SpaceBuilder,
};
use metric_zero_one::space_io::{parse_space, space_to_json};
use metric_zero_one::Result;

pub fn run_example() -> Result<()> {
    let grid = GridSpec::new(0.25)?;
    let singletons = enumerate_grid_tasks(&grid, 1, 0.1)?;

    let circ = build_circulant(7, &[0.5, 0.75, 1.0])?;
    let report = verify_axioms(&circ, &singletons)?;
    println!("circulant N = 7: {} tasks, max value {}", singletons.len(), report.max_value);

    let pairs = enumerate_grid_tasks(&grid, 2, 0.2)?;
    for n in [32, 128] {
        let m = SpaceBuilder::Random.build(n, 1)?;
        let report = verify_axioms(&m, &pairs)?;
        println!("random N = {n}: max axiom value {:.3}, satisfied {}", report.max_value, report.satisfied());
    }

    let text = space_to_json(&circ)?;
    assert_eq!(parse_space(&text)?, circ);
    println!("circulant JSON: {text}");

    let sigma = parse("inf x . sup y . d(x, y)")?;
    let est = estimate_sigma_as(&sigma, &[8, 32, 64], &[0, 1, 2], &SpaceBuilder::Random)?;
    for row in &est.rows {
        println!("N = {}: mean {:.3}, spread {:.3}", row.n, row.mean, row.spread());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
