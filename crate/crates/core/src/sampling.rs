//! Seeded samplers for the cube `[0,1]^(n choose 2)`, the metric polytope
//! `M_n`, its concentrated part `D_n`, and the product region used to bound
//! bad events.
//!
//! All randomness comes from [`substream`]: a ChaCha8 generator keyed by the
//! run seed and a row label, with the trial index selecting the stream. A trial
//! therefore sees the same random numbers no matter which worker runs it.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric_core::{flat_index, pair_count, DistanceVector};

pub type TrialRng = ChaCha8Rng;

/// Default rejection budget per draw.
pub const DEFAULT_MAX_REJECTIONS: u64 = 10_000_000;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Independent generator for `(seed, row, index)`.
///
/// `row` separates unrelated uses of one seed (e.g. different `n` in an
/// experiment); `index` is the trial or block number.
pub fn substream(seed: u64, row: u64, index: u64) -> TrialRng {
    let mut rng = ChaCha8Rng::seed_from_u64(splitmix64(seed ^ splitmix64(row)));
    rng.set_stream(index);
    rng
}

/// `delta(n) = min(cap, scale * n^(-exponent))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeltaSchedule {
    pub scale: f64,
    pub exponent: f64,
    pub cap: f64,
}

impl Default for DeltaSchedule {
    fn default() -> Self {
        DeltaSchedule {
            scale: 1.0,
            exponent: 1.0 / 3.0,
            cap: 0.49,
        }
    }
}

impl DeltaSchedule {
    pub fn new(scale: f64, exponent: f64, cap: f64) -> Result<Self> {
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::Argument(format!("delta scale {scale} must be positive")));
        }
        if !(exponent > 0.0 && exponent <= 1.0) {
            return Err(Error::Argument(format!("delta exponent {exponent} must lie in (0, 1]")));
        }
        if !(cap > 0.0 && cap < 0.5) {
            return Err(Error::Argument(format!("delta cap {cap} must lie in (0, 1/2)")));
        }
        Ok(DeltaSchedule { scale, exponent, cap })
    }

    pub fn delta_at(&self, n: usize) -> f64 {
        let n = n.max(1) as f64;
        self.cap.min(self.scale * n.powf(-self.exponent))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SamplerMethod {
    CubeRejection,
    BoxRejection,
    HitAndRun,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub seed: u64,
    pub method: SamplerMethod,
    /// Hit-and-run only; `None` means `50 * (n choose 2)`.
    pub burn_in: Option<usize>,
    /// Hit-and-run only; `None` means `n choose 2`.
    pub thinning: Option<usize>,
    pub max_rejections: u64,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig {
            seed: 0,
            method: SamplerMethod::CubeRejection,
            burn_in: None,
            thinning: None,
            max_rejections: DEFAULT_MAX_REJECTIONS,
        }
    }
}

impl SamplerConfig {
    pub fn burn_in_for(&self, n: usize) -> usize {
        self.burn_in.unwrap_or(50 * pair_count(n))
    }

    pub fn thinning_for(&self, n: usize) -> usize {
        self.thinning.unwrap_or(pair_count(n)).max(1)
    }
}

/// i.i.d. uniform coordinates on `[0, 1]`.
pub fn sample_cube<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DistanceVector {
    let coords = (0..pair_count(n)).map(|_| rng.random::<f64>()).collect();
    DistanceVector::from_raw(n, coords)
}

fn sample_box<R: Rng + ?Sized>(n: usize, low: f64, rng: &mut R) -> DistanceVector {
    let width = 1.0 - low;
    let coords = (0..pair_count(n))
        .map(|_| (low + width * rng.random::<f64>()).min(1.0))
        .collect();
    DistanceVector::from_raw(n, coords)
}

/// Exact uniform draw from `M_n` by rejection from the cube.
/// Returns the accepted vector and the number of attempts used.
pub fn sample_mn_rejection<R: Rng + ?Sized>(
    n: usize,
    rng: &mut R,
    max_rejections: u64,
) -> Result<(DistanceVector, u64)> {
    for attempt in 1..=max_rejections.max(1) {
        let d = sample_cube(n, rng);
        if d.is_metric(0.0) {
            return Ok((d, attempt));
        }
    }
    Err(Error::Resource(format!(
        "no metric found on {n} points within {max_rejections} cube draws"
    )))
}

fn check_delta(delta: f64) -> Result<()> {
    if delta > 0.0 && delta <= 0.5 {
        Ok(())
    } else {
        Err(Error::Argument(format!("delta = {delta} must lie in (0, 1/2]")))
    }
}

/// Exact uniform draw from `D_n`: uniform on the box `[1/2 - delta, 1]^(n choose 2)`
/// conditioned on the triangle inequality.
pub fn sample_d_n<R: Rng + ?Sized>(
    n: usize,
    delta: f64,
    rng: &mut R,
    max_rejections: u64,
) -> Result<(DistanceVector, u64)> {
    check_delta(delta)?;
    sample_concentrated(n, delta, rng, max_rejections)
}

/// As [`sample_d_n`], also admitting `delta = 0` (the class-C box).
pub(crate) fn sample_concentrated<R: Rng + ?Sized>(
    n: usize,
    delta: f64,
    rng: &mut R,
    max_rejections: u64,
) -> Result<(DistanceVector, u64)> {
    let low = 0.5 - delta;
    for attempt in 1..=max_rejections.max(1) {
        let d = sample_box(n, low, rng);
        // low >= 1/2 makes every triangle automatic.
        if low >= 0.5 || d.is_metric(0.0) {
            return Ok((d, attempt));
        }
    }
    Err(Error::Resource(format!(
        "no point of D_{n} (delta = {delta}) found within {max_rejections} box draws"
    )))
}

/// Draw from the product region used in the bad-event bound: pairs inside the
/// first `k` points uniform on `[1/2, 1]`, pairs between the first `k` and the
/// rest uniform on `[1/2 + delta, 1]`, and pairs among the last `n - k` points
/// drawn from `D_(n-k)`. The result always lies in `D_n`.
pub fn sample_s_like<R: Rng + ?Sized>(
    k: usize,
    n: usize,
    delta: f64,
    rng: &mut R,
    max_rejections: u64,
) -> Result<(DistanceVector, u64)> {
    if k == 0 || k >= n {
        return Err(Error::Argument(format!("need 1 <= k < n, got k = {k}, n = {n}")));
    }
    if !(delta > 0.0 && delta < 0.5) {
        return Err(Error::Argument(format!("delta = {delta} must lie in (0, 1/2)")));
    }
    let (tail, attempts) = sample_concentrated(n - k, delta, rng, max_rejections)?;
    let mut coords = vec![0.0; pair_count(n)];
    for i in 0..k {
        for j in (i + 1)..k {
            coords[flat_index(i, j, n)] = 0.5 + 0.5 * rng.random::<f64>();
        }
    }
    let cross_low = 0.5 + delta;
    for i in 0..k {
        for t in k..n {
            coords[flat_index(i, t, n)] = (cross_low + (1.0 - cross_low) * rng.random::<f64>()).min(1.0);
        }
    }
    let m = n - k;
    for a in 0..m {
        for b in (a + 1)..m {
            coords[flat_index(k + a, k + b, n)] = tail.coords()[flat_index(a, b, m)];
        }
    }
    Ok((DistanceVector::from_raw(n, coords), attempts))
}

/// Hit-and-run Markov chain on `M_n`, described by the cube constraints and
/// the `3 * (n choose 3)` triangle half-spaces `d_e <= d_f + d_g`.
#[derive(Debug, Clone)]
pub struct HitAndRun {
    n: usize,
    state: Vec<f64>,
    triangles: Vec<[usize; 3]>,
    direction: Vec<f64>,
    burn_in: usize,
    thinning: usize,
    burned: bool,
    degenerate: u64,
    max_degenerate: u64,
}

/// Starting point used by every chain; strictly interior since 0.6 + 0.6 > 1.
pub const HIT_AND_RUN_START: f64 = 0.6;
const _: () = assert!(HIT_AND_RUN_START > 0.5 && HIT_AND_RUN_START < 1.0);

impl HitAndRun {
    pub fn new(n: usize, cfg: &SamplerConfig) -> Self {
        let mut triangles = Vec::with_capacity(3 * n * n * n / 6);
        for a in 0..n {
            for b in (a + 1)..n {
                for c in (b + 1)..n {
                    let ab = flat_index(a, b, n);
                    let ac = flat_index(a, c, n);
                    let bc = flat_index(b, c, n);
                    triangles.push([ab, ac, bc]);
                    triangles.push([ac, ab, bc]);
                    triangles.push([bc, ab, ac]);
                }
            }
        }
        let m = pair_count(n);
        HitAndRun {
            n,
            state: vec![HIT_AND_RUN_START; m],
            triangles,
            direction: vec![0.0; m],
            burn_in: cfg.burn_in_for(n),
            thinning: cfg.thinning_for(n),
            burned: false,
            degenerate: 0,
            max_degenerate: cfg.max_rejections,
        }
    }

    /// Number of degenerate chords redrawn so far.
    pub fn degenerate_chords(&self) -> u64 {
        self.degenerate
    }

    pub fn state(&self) -> DistanceVector {
        DistanceVector::from_raw(self.n, self.state.clone())
    }

    /// One hit-and-run move.
    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<()> {
        loop {
            let mut norm = 0.0;
            for u in self.direction.iter_mut() {
                *u = rng.sample(StandardNormal);
                norm += *u * *u;
            }
            if norm == 0.0 {
                continue;
            }
            let (lo, hi) = self.chord();
            if hi - lo > 1e-14 {
                let t = lo + (hi - lo) * rng.random::<f64>();
                for (x, u) in self.state.iter_mut().zip(&self.direction) {
                    *x = (*x + t * u).clamp(0.0, 1.0);
                }
                return Ok(());
            }
            self.degenerate += 1;
            if self.degenerate > self.max_degenerate {
                return Err(Error::Resource(format!(
                    "hit-and-run on {} points hit {} degenerate chords",
                    self.n, self.degenerate
                )));
            }
        }
    }

    /// Feasible parameter interval `[lo, hi]` along the current direction.
    fn chord(&self) -> (f64, f64) {
        let mut lo = f64::NEG_INFINITY;
        let mut hi = f64::INFINITY;
        for (&x, &u) in self.state.iter().zip(&self.direction) {
            if u > 0.0 {
                hi = hi.min((1.0 - x) / u);
                lo = lo.max(-x / u);
            } else if u < 0.0 {
                hi = hi.min(-x / u);
                lo = lo.max((1.0 - x) / u);
            }
        }
        let x = &self.state;
        let u = &self.direction;
        for &[e, f, g] in &self.triangles {
            let rate = u[e] - u[f] - u[g];
            let slack = (x[f] + x[g] - x[e]).max(0.0);
            if rate > 0.0 {
                hi = hi.min(slack / rate);
            } else if rate < 0.0 {
                lo = lo.max(slack / rate);
            }
        }
        (lo.min(0.0), hi.max(0.0))
    }

    /// Next emitted state: burn-in on first use, then `thinning` moves per draw.
    pub fn next_sample<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<DistanceVector> {
        if !self.burned {
            for _ in 0..self.burn_in {
                self.step(rng)?;
            }
            self.burned = true;
        }
        for _ in 0..self.thinning {
            self.step(rng)?;
        }
        Ok(self.state())
    }
}

/// One approximately uniform draw from `M_n` using a fresh hit-and-run chain.
pub fn sample_mn_hitandrun<R: Rng + ?Sized>(
    n: usize,
    cfg: &SamplerConfig,
    rng: &mut R,
) -> Result<DistanceVector> {
    HitAndRun::new(n, cfg).next_sample(rng)
}
