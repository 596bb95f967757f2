mod polytope_sampling {
    include!("../examples/polytope_sampling.rs");
}
mod formula_eval {
    include!("../examples/formula_eval.rs");
}
mod ef_game {
    include!("../examples/ef_game.rs");
}
mod finite_models {
    include!("../examples/finite_models.rs");
}
mod bounds {
    include!("../examples/bounds.rs");
}
mod experiments {
    include!("../examples/experiments.rs");
}

#[test]
fn polytope_sampling_runs() {
    polytope_sampling::run_example().unwrap();
}

#[test]
fn formula_eval_runs() {
    formula_eval::run_example().unwrap();
}

#[test]
fn ef_game_runs() {
    ef_game::run_example().unwrap();
}

#[test]
fn finite_models_runs() {
    finite_models::run_example().unwrap();
}

#[test]
fn bounds_runs() {
    bounds::run_example().unwrap();
}

#[test]
fn experiments_run() {
    experiments::run_example().unwrap();
}
