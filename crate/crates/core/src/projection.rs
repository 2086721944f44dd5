//! The projection `π(x, y, t) = ((x + y)/2, t + ¼(x² − y²))` onto the vertical
//! plane over the diagonal, and the parabola it turns a tube into.
//!
//! The core of `T_e^δ(p)` maps onto the graph of
//! `θ ↦ κ(θ − θ₀)² + m(θ − θ₀) + v` with `κ = (a − b)/(a + b)`, `m = x − y`,
//! `v = t + ¼(x² − y²)` and `θ₀ = (x + y)/2`; the core parameter `s` sits at
//! `θ = θ₀ + s(a + b)/2`.

use crate::curves::{Interval, Quadratic};
use crate::heis::HPoint;
use crate::math;
use crate::sampling::{self, shard_rng};
use crate::tube::HTube;
use crate::{Error, Result};

/// A point `(X, T)` of the vertical plane, identified with `(X, X, T)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanePoint {
    pub theta: f64,
    pub height: f64,
}

impl PlanePoint {
    pub fn embed(&self) -> HPoint {
        HPoint::new(self.theta, self.theta, self.height)
    }
}

pub fn project_w(p: &HPoint) -> PlanePoint {
    PlanePoint { theta: 0.5 * (p.x + p.y), height: p.t + 0.25 * (p.x * p.x - p.y * p.y) }
}

/// The parabola attached to a tube.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectedCurve {
    pub kappa: f64,
    pub slope: f64,
    pub offset: f64,
    pub theta0: f64,
    pub domain: Interval,
}

impl ProjectedCurve {
    pub fn eval(&self, theta: f64) -> f64 {
        let u = theta - self.theta0;
        (self.kappa * u + self.slope) * u + self.offset
    }

    /// The same function in `(a/2)θ² + bθ + c` form.
    pub fn to_quadratic(&self) -> Quadratic {
        let (k, m, v, th) = (self.kappa, self.slope, self.offset, self.theta0);
        Quadratic::new(2.0 * k, m - 2.0 * k * th, k * th * th - m * th + v)
    }
}

/// Minimal `|a + b|` accepted by [`tube_to_curve`].
pub const MIN_DIAGONAL_COMPONENT: f64 = 0.5;

pub fn tube_to_curve(tube: &HTube) -> Result<ProjectedCurve> {
    let (a, b) = (tube.dir.a(), tube.dir.b());
    let sum = a + b;
    if math::abs(sum) < MIN_DIAGONAL_COMPONENT {
        return Err(Error::DirectionNearL { a, b, dist: math::abs(sum) });
    }
    let p = tube.center;
    Ok(ProjectedCurve {
        kappa: (a - b) / sum,
        slope: p.x - p.y,
        offset: p.t + 0.25 * (p.x * p.x - p.y * p.y),
        theta0: 0.5 * (p.x + p.y),
        domain: Interval::PROJECTED,
    })
}

/// Samples `samples` points of `T ∩ B(0, 1)` and returns the largest vertical
/// distance from their projections to the tube's parabola, divided by δ².
/// Returns 0 when no sample lands in the unit ball.
pub fn projection_containment_ratio(tube: &HTube, samples: usize, seed: u64) -> Result<f64> {
    let curve = tube_to_curve(tube)?;
    let mut rng = shard_rng(seed, 0);
    let mut worst: f64 = 0.0;
    let mut kept = 0;
    let mut attempts = 0usize;
    while kept < samples && attempts < 64 * samples.max(1) {
        attempts += 1;
        let p = tube.sample_point(&mut rng);
        if p.norm4() > 1.0 {
            continue;
        }
        kept += 1;
        let w = project_w(&p);
        if curve.domain.contains(w.theta) {
            worst = worst.max(math::abs(w.height - curve.eval(w.theta)));
        }
    }
    Ok(worst / (tube.delta * tube.delta))
}

/// Length of `{s : w·(s, −s, 0) ∈ T}`, measured by counting `resolution`-spaced
/// samples. The fiber parametrization is taken at unit speed.
pub fn fiber_length(tube: &HTube, w: &PlanePoint, resolution: f64) -> f64 {
    let x0 = w.theta;
    // w·(s,−s,0) = (X + s, X − s, T − Xs); clip s to the tube's horizontal box.
    let bb = tube.bbox();
    let lo = (bb.lo[0] - x0).max(x0 - bb.hi[1]);
    let hi = (bb.hi[0] - x0).min(x0 - bb.lo[1]);
    if !(lo <= hi) || !(resolution > 0.0) {
        return 0.0;
    }
    let first = math::ceil(lo / resolution) as i64;
    let last = math::floor(hi / resolution) as i64;
    let inside = (first..=last)
        .filter(|&k| {
            let s = k as f64 * resolution;
            tube.contains(&HPoint::new(x0 + s, x0 - s, w.height - x0 * s))
        })
        .count();
    inside as f64 * resolution
}

/// Draws a point of `π(T)` by projecting a random tube point.
pub fn sample_projected_point(tube: &HTube, rng: &mut impl rand_core::RngCore) -> PlanePoint {
    project_w(&tube.sample_point(rng))
}

/// Uniform draw from the Korányi ball `B(0, r)` by rejection from its box.
pub fn sample_koranyi_ball(rng: &mut impl rand_core::RngCore, r: f64) -> HPoint {
    loop {
        let p = HPoint::new(
            sampling::uniform(rng, -r, r),
            sampling::uniform(rng, -r, r),
            sampling::uniform(rng, -0.25 * r * r, 0.25 * r * r),
        );
        if p.norm4() <= r * r * r * r {
            return p;
        }
    }
}
