//! Explicit probability bounds for failures of extension axioms on random
//! concentrated spaces, and seeded Monte Carlo experiments that set empirical
//! frequencies beside those bounds.
//!
//! Every experiment is a pure function of its [`ExperimentConfig`]: trial `t`
//! of row `n` draws from [`substream`]`(seed, n, t)` (or, for hit-and-run, the
//! chain of the block containing `t`), so the CSV output is byte-identical
//! across reruns and thread counts.

use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::logic::{Compiled, Formula};
use crate::metric_core::{conf_unchecked, is_concentrated, pair_count, DistanceVector, FiniteMetricSpace};
use crate::model_builder::AxiomFamily;
use crate::sampling::{
    sample_concentrated, sample_cube, sample_mn_rejection, substream, DeltaSchedule, HitAndRun,
    SamplerConfig, SamplerMethod, DEFAULT_MAX_REJECTIONS,
};

/// Two-sided 95% normal quantile.
const Z_95: f64 = 1.959_963_984_540_054;

/// 95% Wilson score interval for `successes` out of `trials`.
pub fn wilson_interval(successes: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = Z_95 * Z_95;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = Z_95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let low = if successes == 0 { 0.0 } else { (centre - half).max(0.0) };
    let high = if successes == trials { 1.0 } else { (centre + half).min(1.0) };
    (low, high)
}

/// Parameters of one family of bad events: `m` axioms whose base spaces have
/// `k` points, tolerance `epsilon`, concentration `delta`, and `lambda_a`
/// bounding the cube measure of `{d' : Conf_X(d') <= epsilon}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BadEventSpec {
    pub k: usize,
    pub epsilon: f64,
    pub delta: f64,
    pub m: usize,
    pub lambda_a: f64,
}

impl BadEventSpec {
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::Argument("k must be at least 1".into()));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::Argument(format!("epsilon = {} must lie in (0, 1)", self.epsilon)));
        }
        if !(self.delta >= 0.0 && self.delta < 0.5) {
            return Err(Error::Argument(format!("delta = {} must lie in [0, 1/2)", self.delta)));
        }
        if !(0.0..=1.0).contains(&self.lambda_a) {
            return Err(Error::Argument(format!("lambda_A = {} must lie in [0, 1]", self.lambda_a)));
        }
        Ok(())
    }
}

/// `2^(k choose 2) * lambda_A * (((1/2+δ)^k - ε^k) / (1/2-δ)^k)^(n-k)`, or 0
/// when `ε >= 1/2 + δ`.
pub fn per_subset_bound(spec: &BadEventSpec, n: usize) -> Result<f64> {
    spec.validate()?;
    if n <= spec.k {
        return Err(Error::Argument(format!("need n > k, got n = {n}, k = {}", spec.k)));
    }
    let k = spec.k as i32;
    let numerator = (0.5 + spec.delta).powi(k) - spec.epsilon.powi(k);
    if numerator <= 0.0 {
        return Ok(0.0);
    }
    let ratio = numerator / (0.5 - spec.delta).powi(k);
    let prefactor = 2f64.powi(pair_count(spec.k) as i32) * spec.lambda_a;
    Ok((prefactor * ratio.powi((n - spec.k) as i32)).max(0.0))
}

/// `min(1, sum over specs of m * n^k * per_subset_bound)`.
pub fn union_bound(specs: &[BadEventSpec], n: usize) -> Result<f64> {
    let mut total = 0.0;
    for spec in specs {
        total += spec.m as f64 * (n as f64).powi(spec.k as i32) * per_subset_bound(spec, n)?;
    }
    Ok(total.min(1.0))
}

/// Analytic upper bound `min(1, (2ε)^(k choose 2))` on `lambda_A`.
pub fn lambda_a_upper_bound(k: usize, epsilon: f64) -> f64 {
    (2.0 * epsilon).powi(pair_count(k) as i32).min(1.0)
}

fn exact(x: f64) -> Result<BigRational> {
    BigRational::from_float(x).ok_or_else(|| Error::Argument(format!("{x} is not finite")))
}

/// Both sides of the ratio inequality, computed exactly from the binary
/// values of `delta` and `epsilon`:
/// `((1/2+δ)^k - ε^k) / (1/2-δ)^k` and `((1/2+δ)/(1/2-δ))^k - (2ε)^k`.
pub fn ratio_sides(k: usize, delta: f64, epsilon: f64) -> Result<(BigRational, BigRational)> {
    if k == 0 {
        return Err(Error::Argument("k must be at least 1".into()));
    }
    if !(0.0..0.5).contains(&delta) {
        return Err(Error::Argument(format!("delta = {delta} must lie in [0, 1/2)")));
    }
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let d = exact(delta)?;
    let e = exact(epsilon)?;
    let up = &half + &d;
    let down = &half - &d;
    let k = k as i32;
    let lhs = (up.pow(k) - e.pow(k)) / down.pow(k);
    let two_e = &e * BigRational::from_integer(BigInt::from(2));
    let rhs = (up / down).pow(k) - two_e.pow(k);
    Ok((lhs, rhs))
}

/// Whether `((1/2+δ)^k - ε^k)/(1/2-δ)^k <= ((1/2+δ)/(1/2-δ))^k - (2ε)^k`.
pub fn check_ratio_inequality(k: usize, delta: f64, epsilon: f64) -> Result<bool> {
    let (lhs, rhs) = ratio_sides(k, delta, epsilon)?;
    Ok(lhs <= rhs)
}

/// Exact value of `rhs - lhs` in [`ratio_sides`].
pub fn ratio_gap(k: usize, delta: f64, epsilon: f64) -> Result<BigRational> {
    let (lhs, rhs) = ratio_sides(k, delta, epsilon)?;
    Ok(rhs - lhs)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub successes: u64,
    pub trials: u64,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl Estimate {
    fn from_counts(successes: u64, trials: u64) -> Self {
        let (ci_low, ci_high) = wilson_interval(successes, trials);
        Estimate {
            value: successes as f64 / trials.max(1) as f64,
            successes,
            trials,
            ci_low,
            ci_high,
        }
    }
}

/// Monte Carlo estimate of the cube measure of
/// `A = {d' in M_k : Conf_X(d') <= epsilon}`. One-point spaces give 1 exactly.
pub fn estimate_lambda_a<R: Rng + ?Sized>(
    x: &FiniteMetricSpace,
    epsilon: f64,
    trials: u64,
    rng: &mut R,
) -> Result<Estimate> {
    if epsilon.is_nan() || epsilon <= 0.0 {
        return Err(Error::Argument(format!("epsilon = {epsilon} must be positive")));
    }
    let k = x.n();
    if k <= 1 {
        return Ok(Estimate {
            value: 1.0,
            successes: trials,
            trials,
            ci_low: 1.0,
            ci_high: 1.0,
        });
    }
    if trials == 0 {
        return Err(Error::Argument("need at least one trial".into()));
    }
    let identity: Vec<usize> = (0..k).collect();
    let mut hits = 0;
    for _ in 0..trials {
        let d = sample_cube(k, rng);
        if conf_unchecked(x, &d, &identity) <= epsilon && d.is_metric(0.0) {
            hits += 1;
        }
    }
    Ok(Estimate::from_counts(hits, trials))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    FactCs,
    Thm22,
    Cor23,
    ZeroOne,
}

impl ExperimentKind {
    pub fn name(&self) -> &'static str {
        match self {
            ExperimentKind::FactCs => "fact-cs",
            ExperimentKind::Thm22 => "thm22",
            ExperimentKind::Cor23 => "cor23",
            ExperimentKind::ZeroOne => "zero-one",
        }
    }
}

/// Concentration parameter per size.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DeltaChoice {
    Schedule(DeltaSchedule),
    /// A constant in `[0, 1/2]`; 0 reads "all distances at least 1/2" and
    /// 1/2 makes `D_n = M_n`.
    Fixed { delta: f64 },
}

impl Default for DeltaChoice {
    fn default() -> Self {
        DeltaChoice::Schedule(DeltaSchedule::default())
    }
}

impl DeltaChoice {
    pub fn at(&self, n: usize) -> f64 {
        match self {
            DeltaChoice::Schedule(s) => s.delta_at(n),
            DeltaChoice::Fixed { delta } => *delta,
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            DeltaChoice::Fixed { delta } if !(0.0..=0.5).contains(delta) => {
                Err(Error::Argument(format!("fixed delta {delta} must lie in [0, 1/2]")))
            }
            _ => Ok(()),
        }
    }
}

/// How uniform draws from `M_n` are produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum MnMethod {
    Rejection,
    HitAndRun,
    /// Rejection up to [`AUTO_REJECTION_MAX_N`] points, hit-and-run above.
    #[default]
    Auto,
}

pub const AUTO_REJECTION_MAX_N: usize = 5;

/// Trials per hit-and-run chain.
pub const HIT_AND_RUN_BLOCK: usize = 500;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub n_list: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    #[serde(default)]
    pub delta: DeltaChoice,
    #[serde(default)]
    pub mn_method: MnMethod,
    #[serde(default)]
    pub burn_in: Option<usize>,
    #[serde(default)]
    pub thinning: Option<usize>,
    #[serde(default = "default_max_rejections")]
    pub max_rejections: u64,
    /// Worker threads; `None` uses the global rayon pool.
    #[serde(default)]
    pub threads: Option<usize>,
}

fn default_max_rejections() -> u64 {
    DEFAULT_MAX_REJECTIONS
}

impl ExperimentConfig {
    pub fn new(n_list: Vec<usize>, trials: usize, seed: u64) -> Self {
        ExperimentConfig {
            n_list,
            trials,
            seed,
            delta: DeltaChoice::default(),
            mn_method: MnMethod::Auto,
            burn_in: None,
            thinning: None,
            max_rejections: DEFAULT_MAX_REJECTIONS,
            threads: None,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n_list.is_empty() {
            return Err(Error::Argument("n list is empty".into()));
        }
        if let Some(&n) = self.n_list.iter().find(|&&n| n < 2) {
            return Err(Error::Argument(format!("n = {n} is too small (need n >= 2)")));
        }
        if self.trials == 0 {
            return Err(Error::Argument("trials must be positive".into()));
        }
        self.delta.validate()
    }

    fn sampler(&self) -> SamplerConfig {
        SamplerConfig {
            seed: self.seed,
            method: SamplerMethod::HitAndRun,
            burn_in: self.burn_in,
            thinning: self.thinning,
            max_rejections: self.max_rejections,
        }
    }

    fn uses_hit_and_run(&self, n: usize) -> bool {
        match self.mn_method {
            MnMethod::Rejection => false,
            MnMethod::HitAndRun => true,
            MnMethod::Auto => n > AUTO_REJECTION_MAX_N,
        }
    }
}

/// Counts behind the decomposition `#A = #(A ∩ D) + #(A \ D)` over one row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    pub in_d: u64,
    pub a_and_d: u64,
    pub a_minus_d: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRow {
    pub n: usize,
    pub trials: u64,
    pub successes: u64,
    pub fraction: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub analytic_bound: Option<f64>,
    pub delta: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub partition: Option<Partition>,
}

impl ExperimentRow {
    fn new(n: usize, successes: u64, trials: u64, delta: f64) -> Self {
        let (ci_low, ci_high) = wilson_interval(successes, trials);
        ExperimentRow {
            n,
            trials,
            successes,
            fraction: successes as f64 / trials as f64,
            ci_low,
            ci_high,
            analytic_bound: None,
            delta,
            partition: None,
        }
    }

    pub fn failure_fraction(&self) -> f64 {
        1.0 - self.fraction
    }

    pub fn ci_half_width(&self) -> f64 {
        (self.ci_high - self.ci_low) / 2.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub kind: ExperimentKind,
    pub seed: u64,
    /// The configuration that produced the report.
    pub config: serde_json::Value,
    pub rows: Vec<ExperimentRow>,
    pub wall_time_ms: u64,
}

pub const CSV_HEADER: &str = "n,trials,successes,fraction,ci_low,ci_high,analytic_bound";

impl ExperimentReport {
    /// Plot-ready CSV; depends only on the rows, so reruns are byte-identical.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let bound = r.analytic_bound.map(|b| b.to_string()).unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                r.n, r.trials, r.successes, r.fraction, r.ci_low, r.ci_high, bound
            ));
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// True when no row's fraction drops significantly below its predecessor's:
    /// each row's upper confidence limit reaches the previous row's lower one.
    pub fn nondecreasing_within_ci(&self) -> bool {
        nondecreasing_within_ci(&self.rows)
    }
}

pub fn nondecreasing_within_ci(rows: &[ExperimentRow]) -> bool {
    rows.windows(2).all(|w| w[1].ci_high >= w[0].ci_low)
}

/// Where a row's samples come from.
#[derive(Clone, Copy)]
enum Source {
    Mn,
    Dn(f64),
}

fn with_pool<T: Send>(threads: Option<usize>, job: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(job()),
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t.max(1))
                .build()
                .map_err(|e| Error::Argument(format!("cannot build thread pool: {e}")))?;
            Ok(pool.install(job))
        }
    }
}

/// Draws `cfg.trials` samples for one row and maps each through `judge`,
/// preserving trial order.
fn run_row<T, F>(cfg: &ExperimentConfig, n: usize, source: Source, judge: &F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&DistanceVector) -> T + Sync,
{
    let seed = cfg.seed;
    let row = n as u64;
    match source {
        Source::Dn(delta) => (0..cfg.trials)
            .into_par_iter()
            .map(|t| {
                let mut rng = substream(seed, row, t as u64);
                let (d, _) = sample_concentrated(n, delta, &mut rng, cfg.max_rejections)?;
                Ok(judge(&d))
            })
            .collect(),
        Source::Mn if !cfg.uses_hit_and_run(n) => (0..cfg.trials)
            .into_par_iter()
            .map(|t| {
                let mut rng = substream(seed, row, t as u64);
                let (d, _) = sample_mn_rejection(n, &mut rng, cfg.max_rejections)?;
                Ok(judge(&d))
            })
            .collect(),
        Source::Mn => {
            let sampler = cfg.sampler();
            let blocks = cfg.trials.div_ceil(HIT_AND_RUN_BLOCK);
            let per_block: Vec<Vec<T>> = (0..blocks)
                .into_par_iter()
                .map(|b| {
                    let len = HIT_AND_RUN_BLOCK.min(cfg.trials - b * HIT_AND_RUN_BLOCK);
                    let mut rng = substream(seed, row | (1 << 32), b as u64);
                    let mut chain = HitAndRun::new(n, &sampler);
                    (0..len)
                        .map(|_| chain.next_sample(&mut rng).map(|d| judge(&d)))
                        .collect::<Result<Vec<T>>>()
                })
                .collect::<Result<_>>()?;
            Ok(per_block.into_iter().flatten().collect())
        }
    }
}

fn row_error(n: usize, e: Error) -> Error {
    match e {
        Error::Resource(msg) => Error::Resource(format!("row n = {n}: {msg}")),
        other => other,
    }
}

fn report(
    kind: ExperimentKind,
    cfg: &ExperimentConfig,
    rows: Vec<ExperimentRow>,
    started: Instant,
) -> Result<ExperimentReport> {
    Ok(ExperimentReport {
        kind,
        seed: cfg.seed,
        config: serde_json::to_value(cfg)?,
        rows,
        wall_time_ms: started.elapsed().as_millis() as u64,
    })
}

fn count(outcomes: &[bool]) -> u64 {
    outcomes.iter().filter(|&&s| s).count() as u64
}

/// Frequency of `D_n` under uniform sampling of `M_n`.
pub fn experiment_fact_cs(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let started = Instant::now();
    let rows = with_pool(cfg.threads, || {
        cfg.n_list
            .iter()
            .map(|&n| {
                let delta = cfg.delta.at(n);
                let outcomes = run_row(cfg, n, Source::Mn, &|d: &DistanceVector| {
                    is_concentrated(d, delta)
                })
                .map_err(|e| row_error(n, e))?;
                Ok(ExperimentRow::new(n, count(&outcomes), cfg.trials as u64, delta))
            })
            .collect::<Result<Vec<_>>>()
    })??;
    report(ExperimentKind::FactCs, cfg, rows, started)
}

fn compile_family(family: &AxiomFamily) -> Result<Vec<Compiled>> {
    family
        .tasks
        .iter()
        .map(|t| Compiled::sentence(&t.sentence()))
        .collect()
}

fn all_zero(sentences: &[Compiled], d: &DistanceVector) -> bool {
    sentences
        .iter()
        .all(|s| s.eval(d, &[]).expect("sentences compile without free variables") == 0.0)
}

/// One spec per task with the analytic `lambda_A` bound.
pub fn family_bad_event_specs(family: &AxiomFamily, delta: f64) -> Vec<BadEventSpec> {
    family
        .tasks
        .iter()
        .map(|t| BadEventSpec {
            k: t.k(),
            epsilon: t.epsilon(),
            delta,
            m: 1,
            lambda_a: lambda_a_upper_bound(t.k(), t.epsilon()),
        })
        .collect()
}

/// Frequency with which every axiom of `family` holds exactly on samples of
/// `D_n`, beside the union bound on the failure probability.
pub fn experiment_theorem_2_2(
    family: &AxiomFamily,
    cfg: &ExperimentConfig,
) -> Result<ExperimentReport> {
    cfg.validate()?;
    let sentences = compile_family(family)?;
    let started = Instant::now();
    let rows = with_pool(cfg.threads, || {
        cfg.n_list
            .iter()
            .map(|&n| {
                let delta = cfg.delta.at(n);
                let outcomes = run_row(cfg, n, Source::Dn(delta), &|d: &DistanceVector| {
                    all_zero(&sentences, d)
                })
                .map_err(|e| row_error(n, e))?;
                let mut row = ExperimentRow::new(n, count(&outcomes), cfg.trials as u64, delta);
                row.analytic_bound = union_bound(&family_bad_event_specs(family, delta), n).ok();
                Ok(row)
            })
            .collect::<Result<Vec<_>>>()
    })??;
    report(ExperimentKind::Thm22, cfg, rows, started)
}

/// As [`experiment_theorem_2_2`] but sampling all of `M_n`; each row also
/// records how the successes split between `D_n` and its complement.
pub fn experiment_cor_2_3(family: &AxiomFamily, cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let sentences = compile_family(family)?;
    let started = Instant::now();
    let rows = with_pool(cfg.threads, || {
        cfg.n_list
            .iter()
            .map(|&n| {
                let delta = cfg.delta.at(n);
                let outcomes = run_row(cfg, n, Source::Mn, &|d: &DistanceVector| {
                    (all_zero(&sentences, d), is_concentrated(d, delta))
                })
                .map_err(|e| row_error(n, e))?;
                let successes = outcomes.iter().filter(|o| o.0).count() as u64;
                let partition = Partition {
                    in_d: outcomes.iter().filter(|o| o.1).count() as u64,
                    a_and_d: outcomes.iter().filter(|o| o.0 && o.1).count() as u64,
                    a_minus_d: outcomes.iter().filter(|o| o.0 && !o.1).count() as u64,
                };
                let mut row = ExperimentRow::new(n, successes, cfg.trials as u64, delta);
                row.partition = Some(partition);
                Ok(row)
            })
            .collect::<Result<Vec<_>>>()
    })??;
    report(ExperimentKind::Cor23, cfg, rows, started)
}

/// Frequency of `|sigma^X - sigma_as| < epsilon` over uniform samples of `M_n`.
pub fn experiment_zero_one(
    sigma: &Formula,
    sigma_as: f64,
    epsilon: f64,
    cfg: &ExperimentConfig,
) -> Result<ExperimentReport> {
    cfg.validate()?;
    if epsilon.is_nan() || epsilon <= 0.0 {
        return Err(Error::Argument(format!("epsilon = {epsilon} must be positive")));
    }
    let compiled = Compiled::sentence(sigma)?;
    let started = Instant::now();
    let rows = with_pool(cfg.threads, || {
        cfg.n_list
            .iter()
            .map(|&n| {
                let outcomes = run_row(cfg, n, Source::Mn, &|d: &DistanceVector| {
                    let v = compiled.eval(d, &[]).expect("sentence has no free variables");
                    (v - sigma_as).abs() < epsilon
                })
                .map_err(|e| row_error(n, e))?;
                Ok(ExperimentRow::new(n, count(&outcomes), cfg.trials as u64, cfg.delta.at(n)))
            })
            .collect::<Result<Vec<_>>>()
    })??;
    report(ExperimentKind::ZeroOne, cfg, rows, started)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundRow {
    pub n: usize,
    pub per_subset: f64,
    pub union: f64,
}

/// Bounds for every `n` in `n_range` (inclusive) with `n > k`.
pub fn bound_table(spec: &BadEventSpec, n_range: std::ops::RangeInclusive<usize>) -> Result<Vec<BoundRow>> {
    spec.validate()?;
    n_range
        .filter(|&n| n > spec.k)
        .map(|n| {
            Ok(BoundRow {
                n,
                per_subset: per_subset_bound(spec, n)?,
                union: union_bound(std::slice::from_ref(spec), n)?,
            })
        })
        .collect()
}

pub fn bound_table_csv(rows: &[BoundRow]) -> String {
    let mut out = String::from("n,per_subset_bound,union_bound\n");
    for r in rows {
        out.push_str(&format!("{},{},{}\n", r.n, r.per_subset, r.union));
    }
    out
}
