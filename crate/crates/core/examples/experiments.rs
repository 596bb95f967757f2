// Runs small versions of the four Monte Carlo experiments and prints their
// CSV reports.

use metric_zero_one::analysis::{
    experiment_cor_2_3, experiment_fact_cs, experiment_theorem_2_2, experiment_zero_one,
    DeltaChoice, ExperimentConfig,
};
use metric_zero_one::logic::{build_phi_geq_half, AxiomTask};
use metric_zero_one::model_builder::AxiomFamily;
use metric_zero_one::sampling::DeltaSchedule;
use metric_zero_one::Result;

pub fn run_example() -> Result<()> {
    let mut cfg = ExperimentConfig::new(vec![3, 4, 5], 1000, 11);
    println!("concentration:\n{}", experiment_fact_cs(&cfg)?.to_csv());

    let family = AxiomFamily {
        tasks: vec![AxiomTask::singleton(0.6, 0.2)?],
        description: "singleton at 0.6".into(),
    };
    cfg.n_list = vec![6, 10, 14];
    cfg.delta = DeltaChoice::Schedule(DeltaSchedule::new(0.1, 1.0 / 3.0, 0.49)?);
    println!("axioms on D_n:\n{}", experiment_theorem_2_2(&family, &cfg)?.to_csv());

    cfg.n_list = vec![4, 6];
    println!("axioms on M_n:\n{}", experiment_cor_2_3(&family, &cfg)?.to_csv());

    cfg.n_list = vec![3, 5];
    let report = experiment_zero_one(&build_phi_geq_half(), 0.0, 0.25, &cfg)?;
    println!("zero-one for phi_>=1/2:\n{}", report.to_csv());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
