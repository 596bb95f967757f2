// Draws from the metric polytope `M_n`, its concentrated part `D_n`, and the
// product region used by the bad-event bound.

use metric_zero_one::metric_core::in_d_n;
use metric_zero_one::sampling::{
    sample_cube, sample_d_n, sample_mn_hitandrun, sample_mn_rejection, sample_s_like, substream,
    DeltaSchedule, SamplerConfig, SamplerMethod,
};
use metric_zero_one::Result;

pub fn run_example() -> Result<()> {
    let mut rng = substream(7, 0, 0);

    let cube = sample_cube(4, &mut rng);
    println!("cube draw at n = 4: {:?} (metric: {})", cube.coords(), cube.is_metric(0.0));

    let (m, attempts) = sample_mn_rejection(4, &mut rng, 10_000)?;
    println!("M_4 by rejection after {attempts} attempts: {:?}", m.coords());

    let schedule = DeltaSchedule::new(0.1, 1.0 / 3.0, 0.49)?;
    let delta = schedule.delta_at(12);
    let (d, attempts) = sample_d_n(12, delta, &mut rng, 100_000)?;
    println!("D_12 at delta = {delta:.4} after {attempts} attempts, min coord {:.4}", d.min_coord());
    assert!(in_d_n(&d, delta)?);

    let (s, _) = sample_s_like(2, 8, 0.05, &mut rng, 100_000)?;
    println!("S-like draw (k = 2, n = 8) lies in D_8: {}", in_d_n(&s, 0.05)?);

    let cfg = SamplerConfig { seed: 7, method: SamplerMethod::HitAndRun, ..SamplerConfig::default() };
    let h = sample_mn_hitandrun(10, &cfg, &mut rng)?;
    println!("hit-and-run draw from M_10 is metric: {}", h.is_metric(1e-12));
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
