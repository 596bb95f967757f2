//! Finite class-C spaces that satisfy families of extension axioms, and
//! sequence estimates of a sentence's almost-sure value.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::logic::{AxiomTask, Compiled, Formula};
use crate::metric_core::{pair_count, FiniteMetricSpace, OnePointExtension};
use crate::sampling::substream;

/// The grid `{1/2, 1/2 + step, ..., 1}`; the last value is always exactly 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    step: f64,
    values: Vec<f64>,
}

impl GridSpec {
    pub fn new(step: f64) -> Result<Self> {
        if !(step > 0.0 && step <= 0.5) {
            return Err(Error::Argument(format!("grid step {step} must lie in (0, 1/2]")));
        }
        let mut values = Vec::new();
        let mut i = 0usize;
        loop {
            let v = 0.5 + i as f64 * step;
            if v >= 1.0 - 1e-12 {
                break;
            }
            values.push(v);
            i += 1;
        }
        values.push(1.0);
        Ok(GridSpec { step, values })
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// A finite list of extension axioms (a finite piece of the almost-sure theory).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxiomFamily {
    pub tasks: Vec<AxiomTask>,
    pub description: String,
}

impl AxiomFamily {
    pub fn len(&self) -> usize {
        self.tasks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tasks.is_empty()
    }
}

/// Upper limit on the number of tasks [`enumerate_grid_tasks`] will emit.
pub const MAX_GRID_TASKS: usize = 1_000_000;

/// Circulant space on `n` points: `d(i, j) = ring_values[r - 1]` where
/// `r = min(|i - j|, n - |i - j|)`.
pub fn build_circulant(n: usize, ring_values: &[f64]) -> Result<FiniteMetricSpace> {
    if n == 0 {
        return Err(Error::Argument("a circulant space needs at least one point".into()));
    }
    if ring_values.len() != n / 2 {
        return Err(Error::Argument(format!(
            "a circulant space on {n} points needs {} ring values, got {}",
            n / 2,
            ring_values.len()
        )));
    }
    if let Some(v) = ring_values.iter().find(|v| !(0.5..=1.0).contains(*v)) {
        return Err(Error::Argument(format!("ring value {v} is outside [1/2, 1]")));
    }
    FiniteMetricSpace::from_fn(n, |i, j| {
        let gap = j - i;
        ring_values[gap.min(n - gap) - 1]
    })
}

/// Distances i.i.d. uniform on `[1/2, 1]`.
pub fn build_random_class_c<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<FiniteMetricSpace> {
    if n == 0 {
        return Err(Error::Argument("a space needs at least one point".into()));
    }
    let coords: Vec<f64> = (0..pair_count(n))
        .map(|_| 0.5 + 0.5 * rng.random::<f64>())
        .collect();
    let mut it = coords.into_iter();
    FiniteMetricSpace::from_fn(n, |_, _| it.next().expect("one value per pair"))
}

fn grid_assignments(grid: &[f64], len: usize) -> Vec<Vec<f64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                grid.iter().map(move |&g| {
                    let mut next = prefix.clone();
                    next.push(g);
                    next
                })
            })
            .collect();
    }
    out
}

/// Every `X ⊏ Y` with `|X| <= k_max` and all distances on the grid, at the
/// given tolerance. Base spaces are listed by their distance vectors, so for
/// `|X| >= 3` relabelings of the same space may appear more than once.
pub fn enumerate_grid_tasks(grid: &GridSpec, k_max: usize, epsilon: f64) -> Result<AxiomFamily> {
    if k_max == 0 {
        return Err(Error::Argument("k_max must be at least 1".into()));
    }
    let g = grid.values().len() as f64;
    let total: f64 = (1..=k_max)
        .map(|k| g.powi(pair_count(k) as i32) * g.powi(k as i32))
        .sum();
    if total > MAX_GRID_TASKS as f64 {
        return Err(Error::Resource(format!(
            "grid family with k_max = {k_max} and {} grid values has {total:.0} tasks \
             (limit {MAX_GRID_TASKS})",
            grid.values().len()
        )));
    }
    let mut tasks = Vec::with_capacity(total as usize);
    for k in 1..=k_max {
        for base_coords in grid_assignments(grid.values(), pair_count(k)) {
            let mut it = base_coords.into_iter();
            let base = FiniteMetricSpace::from_fn(k, |_, _| it.next().expect("one value per pair"))?;
            for new_point in grid_assignments(grid.values(), k) {
                let ext = OnePointExtension::from_base(base.clone(), &new_point)?;
                tasks.push(AxiomTask::new(ext, epsilon)?);
            }
        }
    }
    Ok(AxiomFamily {
        description: format!(
            "grid step {}, |X| <= {k_max}, epsilon {epsilon}",
            grid.step()
        ),
        tasks,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub max_value: f64,
    pub values: Vec<f64>,
}

impl VerifyReport {
    /// True when every axiom evaluates to exactly 0.
    pub fn satisfied(&self) -> bool {
        self.max_value == 0.0
    }
}

/// Evaluates every task's sentence on `space`.
pub fn verify_axioms(space: &FiniteMetricSpace, family: &AxiomFamily) -> Result<VerifyReport> {
    let mut values = Vec::with_capacity(family.len());
    for task in &family.tasks {
        values.push(Compiled::sentence(&task.sentence())?.eval(space, &[])?);
    }
    let max_value = values.iter().copied().fold(0.0, f64::max);
    Ok(VerifyReport { max_value, values })
}

/// How [`estimate_sigma_as`] builds spaces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SpaceBuilder {
    /// i.i.d. class-C distances; each `(N, seed)` pair gives one space.
    Random,
    /// Circulant spaces whose ring values cycle through the grid; seeds are ignored.
    Circulant { grid_step: f64 },
}

impl SpaceBuilder {
    pub fn build(&self, n: usize, seed: u64) -> Result<FiniteMetricSpace> {
        match self {
            SpaceBuilder::Random => build_random_class_c(n, &mut substream(seed, n as u64, 0)),
            SpaceBuilder::Circulant { grid_step } => {
                let grid = GridSpec::new(*grid_step)?;
                let ring: Vec<f64> = (0..n / 2)
                    .map(|i| grid.values()[i % grid.values().len()])
                    .collect();
                build_circulant(n, &ring)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SigmaRow {
    pub n: usize,
    pub values: Vec<f64>,
    pub mean: f64,
    pub min: f64,
    pub max: f64,
}

impl SigmaRow {
    pub fn spread(&self) -> f64 {
        self.max - self.min
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SigmaEstimate {
    pub rows: Vec<SigmaRow>,
    /// Mean at the largest size: a reporting convention, not a certified limit.
    pub estimate: f64,
}

/// Values of a sentence on built spaces across sizes and seeds.
pub fn estimate_sigma_as(
    sigma: &Formula,
    sizes: &[usize],
    seeds: &[u64],
    builder: &SpaceBuilder,
) -> Result<SigmaEstimate> {
    if sizes.is_empty() || seeds.is_empty() {
        return Err(Error::Argument("need at least one size and one seed".into()));
    }
    let compiled = Compiled::sentence(sigma)?;
    let mut rows = Vec::with_capacity(sizes.len());
    for &n in sizes {
        let values = seeds
            .iter()
            .map(|&seed| compiled.eval(&builder.build(n, seed)?, &[]))
            .collect::<Result<Vec<f64>>>()?;
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        rows.push(SigmaRow { n, values, mean, min, max });
    }
    let estimate = rows.last().expect("sizes is nonempty").mean;
    Ok(SigmaEstimate { rows, estimate })
}
