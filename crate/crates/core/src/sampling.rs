//! Deterministic sharded sampling.
//!
//! Work is cut into a fixed number of shards that depends only on the
//! request, never on the machine. Shard `k` draws from its own ChaCha8
//! stream (`seed`, stream `k`), and partial sums are reduced in shard order
//! with compensated addition. Any [`ShardExecutor`] therefore produces
//! bit-identical results.

use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
pub use rand_core::RngCore;
use rand_core::SeedableRng;

use crate::math::{self, CompensatedSum};

/// Samples evaluated per Monte Carlo shard.
pub const MC_SHARD: u64 = 1 << 15;

/// Runs `f(0), …, f(count − 1)` and returns the results in index order.
pub trait ShardExecutor: Sync {
    fn map_shards<T, F>(&self, count: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync;
}

/// Runs shards one after another on the calling thread.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl ShardExecutor for Sequential {
    fn map_shards<T, F>(&self, count: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync,
    {
        (0..count).map(f).collect()
    }
}

/// The random stream for shard `shard` of a run seeded with `seed`.
pub fn shard_rng(seed: u64, shard: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(shard);
    rng
}

/// Uniform draw from `[0, 1)` with 53 random bits.
#[inline]
pub fn unit(rng: &mut impl RngCore) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Uniform draw from `[lo, hi)`.
#[inline]
pub fn uniform(rng: &mut impl RngCore, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * unit(rng)
}

/// Axis-aligned box in up to three coordinates. Planar integrals read the
/// first two axes only.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisBox {
    pub lo: [f64; 3],
    pub hi: [f64; 3],
}

impl AxisBox {
    pub const fn new(lo: [f64; 3], hi: [f64; 3]) -> Self {
        AxisBox { lo, hi }
    }

    pub fn is_empty(&self) -> bool {
        (0..3).any(|k| !(self.lo[k] < self.hi[k]))
    }

    pub fn volume(&self) -> f64 {
        if self.is_empty() {
            return 0.0;
        }
        (0..3).map(|k| self.hi[k] - self.lo[k]).product()
    }

    pub fn area(&self) -> f64 {
        if !(self.lo[0] < self.hi[0] && self.lo[1] < self.hi[1]) {
            return 0.0;
        }
        (self.hi[0] - self.lo[0]) * (self.hi[1] - self.lo[1])
    }

    pub fn intersect(&self, other: &AxisBox) -> AxisBox {
        let mut out = *self;
        for k in 0..3 {
            out.lo[k] = out.lo[k].max(other.lo[k]);
            out.hi[k] = out.hi[k].min(other.hi[k]);
        }
        out
    }

    pub fn union(&self, other: &AxisBox) -> AxisBox {
        let mut out = *self;
        for k in 0..3 {
            out.lo[k] = out.lo[k].min(other.lo[k]);
            out.hi[k] = out.hi[k].max(other.hi[k]);
        }
        out
    }

    pub fn contains(&self, p: [f64; 3]) -> bool {
        (0..3).all(|k| self.lo[k] <= p[k] && p[k] <= self.hi[k])
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SampleMode {
    /// Midpoint rule on a lattice with the given spacing.
    Grid { resolution: f64 },
    MonteCarlo { samples: u64 },
}

/// How an integral is discretized. `region` overrides the default
/// integration domain of the estimator it is passed to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleSpec {
    pub mode: SampleMode,
    pub seed: u64,
    pub region: Option<AxisBox>,
}

impl SampleSpec {
    pub fn monte_carlo(samples: u64, seed: u64) -> Self {
        SampleSpec { mode: SampleMode::MonteCarlo { samples }, seed, region: None }
    }

    pub fn grid(resolution: f64) -> Self {
        SampleSpec { mode: SampleMode::Grid { resolution }, seed: 0, region: None }
    }

    pub fn with_region(mut self, region: AxisBox) -> Self {
        self.region = Some(region);
        self
    }
}

/// An integral estimate. `stderr` is zero for grid quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
    pub evaluations: u64,
}

impl Estimate {
    pub const ZERO: Estimate = Estimate { value: 0.0, stderr: 0.0, evaluations: 0 };

    /// True when `self` and `other` differ by at most `k` combined standard
    /// errors.
    pub fn agrees_with(&self, other: &Estimate, k: f64) -> bool {
        let combined = math::sqrt(self.stderr * self.stderr + other.stderr * other.stderr);
        math::abs(self.value - other.value) <= k * combined
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    sum: CompensatedSum,
    sum_sq: CompensatedSum,
    n: u64,
}

/// Monte Carlo mean of `f` over `region` (3-D) times its volume.
pub fn mc_integrate_3d<E, F>(exec: &E, region: &AxisBox, samples: u64, seed: u64, f: F) -> Estimate
where
    E: ShardExecutor,
    F: Fn([f64; 3]) -> f64 + Sync,
{
    mc_integrate(exec, region, 3, samples, seed, f)
}

/// Monte Carlo mean of `f` over the first two axes of `region` times its area.
pub fn mc_integrate_2d<E, F>(exec: &E, region: &AxisBox, samples: u64, seed: u64, f: F) -> Estimate
where
    E: ShardExecutor,
    F: Fn([f64; 3]) -> f64 + Sync,
{
    mc_integrate(exec, region, 2, samples, seed, f)
}

fn mc_integrate<E, F>(exec: &E, region: &AxisBox, dims: usize, samples: u64, seed: u64, f: F) -> Estimate
where
    E: ShardExecutor,
    F: Fn([f64; 3]) -> f64 + Sync,
{
    let measure = if dims == 3 { region.volume() } else { region.area() };
    if samples == 0 || measure == 0.0 {
        return Estimate::ZERO;
    }
    let shards = samples.div_ceil(MC_SHARD);
    let parts = exec.map_shards(shards as usize, |k| {
        let mut rng = shard_rng(seed, k as u64);
        let n = MC_SHARD.min(samples - k as u64 * MC_SHARD);
        let mut m = Moments::default();
        for _ in 0..n {
            let mut p = [0.0; 3];
            for (d, coord) in p.iter_mut().enumerate().take(dims) {
                *coord = uniform(&mut rng, region.lo[d], region.hi[d]);
            }
            let v = f(p);
            m.sum.add(v);
            m.sum_sq.add(v * v);
        }
        m.n = n;
        m
    });
    let mut sum = CompensatedSum::default();
    let mut sum_sq = CompensatedSum::default();
    let mut n = 0u64;
    for part in &parts {
        sum.add(part.sum.value());
        sum_sq.add(part.sum_sq.value());
        n += part.n;
    }
    let nf = n as f64;
    let mean = sum.value() / nf;
    let var = (sum_sq.value() / nf - mean * mean).max(0.0);
    let stderr = if n > 1 { math::sqrt(var / (nf - 1.0)) } else { 0.0 };
    Estimate { value: measure * mean, stderr: measure * stderr, evaluations: n }
}

/// Midpoint-rule integral of `f` over a 3-D box. The spacing is adjusted
/// down so cells tile the box exactly; shards are slabs along the first axis.
pub fn grid_integrate_3d<E, F>(exec: &E, region: &AxisBox, resolution: f64, f: F) -> Estimate
where
    E: ShardExecutor,
    F: Fn([f64; 3]) -> f64 + Sync,
{
    if region.is_empty() || !(resolution > 0.0) {
        return Estimate::ZERO;
    }
    let cells: [usize; 3] = core::array::from_fn(|k| {
        (math::ceil((region.hi[k] - region.lo[k]) / resolution) as usize).max(1)
    });
    let step: [f64; 3] = core::array::from_fn(|k| (region.hi[k] - region.lo[k]) / cells[k] as f64);
    let parts = exec.map_shards(cells[0], |i| {
        let x = region.lo[0] + (i as f64 + 0.5) * step[0];
        let mut acc = CompensatedSum::default();
        for j in 0..cells[1] {
            let y = region.lo[1] + (j as f64 + 0.5) * step[1];
            for k in 0..cells[2] {
                let t = region.lo[2] + (k as f64 + 0.5) * step[2];
                acc.add(f([x, y, t]));
            }
        }
        acc.value()
    });
    let mut total = CompensatedSum::default();
    for v in parts {
        total.add(v);
    }
    Estimate {
        value: total.value() * step[0] * step[1] * step[2],
        stderr: 0.0,
        evaluations: (cells[0] * cells[1] * cells[2]) as u64,
    }
}
