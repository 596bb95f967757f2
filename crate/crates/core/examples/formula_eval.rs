// Parses, prints and evaluates continuous-logic formulas, including the
// configuration formula and a one-point extension axiom.

use metric_zero_one::logic::{
    build_conf, build_extension_axiom, build_phi_geq_half, eval, parse, print, AxiomTask,
};
use metric_zero_one::metric_core::{conf, FiniteMetricSpace};
use metric_zero_one::Result;

pub fn run_example() -> Result<()> {
    let triangle = FiniteMetricSpace::from_matrix(&[
        vec![0.0, 0.3, 0.6],
        vec![0.3, 0.0, 0.5],
        vec![0.6, 0.5, 0.0],
    ])?;

    let diameter = parse("sup x . sup y . d(x, y)")?;
    println!("{} = {}", print(&diameter), eval(&diameter, &triangle, &[])?);

    let phi = build_phi_geq_half();
    println!("phi_>=1/2 = {}", eval(&phi, &triangle, &[])?);

    let pair = FiniteMetricSpace::from_matrix(&[vec![0.0, 0.5], vec![0.5, 0.0]])?;
    let vars = vec!["u".to_string(), "v".to_string()];
    let conf_formula = build_conf(&pair, &vars)?;
    let by_formula = eval(&conf_formula, &triangle, &[("u", 1), ("v", 2)])?;
    println!("Conf_pair(1, 2) = {by_formula} (direct: {})", conf(&pair, &triangle, &[1, 2])?);

    let task = AxiomTask::singleton(0.6, 0.1)?;
    let axiom = build_extension_axiom(&task);
    println!("singleton axiom at 0.6: {}", eval(&axiom, &triangle, &[])?);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
