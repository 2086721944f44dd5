//! Heisenberg δ-tubes `T_e^δ(x) = {x·(se)·z : |s| ≤ ½, ‖z‖ ≤ δ}`.
//!
//! With `q = x⁻¹·p` the fourth power of the distance from `p` to the core
//! point `x·(se)` is
//!
//! `(|q_h|² − 2s⟨e, q_h⟩ + s²)² + 16(q_t + s(b·q_x − a·q_y)/2)²`,
//!
//! a convex quartic in `s`. Membership minimizes it over the part of
//! `[−½, ½]` where the horizontal gap alone does not already exceed δ.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::heis::{HDirection, HPoint};
use crate::math;
use crate::sampling::{self, AxisBox, Estimate, SampleMode, SampleSpec, ShardExecutor};
use crate::{Error, Result};

const SEEDS: usize = 64;

// Minimizes a convex `f` on `[lo, hi]`: 64 uniform seeds, then ternary search
// in the bracket around the best seed. Returns early once a value is at most
// `accept`.
fn minimize_convex(lo: f64, hi: f64, tol: f64, accept: f64, f: impl Fn(f64) -> f64) -> f64 {
    if hi - lo <= tol {
        return f(lo).min(f(hi)).min(f(0.5 * (lo + hi)));
    }
    let step = (hi - lo) / (SEEDS - 1) as f64;
    let mut best = f64::INFINITY;
    let mut best_i = 0;
    for i in 0..SEEDS {
        let v = f(if i + 1 == SEEDS { hi } else { lo + i as f64 * step });
        if v <= accept {
            return v;
        }
        if v < best {
            best = v;
            best_i = i;
        }
    }
    let mut a = lo + best_i.saturating_sub(1) as f64 * step;
    let mut b = (lo + (best_i + 1) as f64 * step).min(hi);
    while b - a > tol {
        let m1 = a + (b - a) / 3.0;
        let m2 = b - (b - a) / 3.0;
        let (v1, v2) = (f(m1), f(m2));
        best = best.min(v1).min(v2);
        if best <= accept {
            return best;
        }
        if v1 <= v2 {
            b = m2;
        } else {
            a = m1;
        }
    }
    best.min(f(0.5 * (a + b)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HTube {
    pub center: HPoint,
    pub dir: HDirection,
    pub delta: f64,
}

impl HTube {
    pub fn new(center: HPoint, dir: HDirection, delta: f64) -> Result<Self> {
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::BadThickness(delta));
        }
        Ok(HTube { center, dir, delta })
    }

    /// The core point `center·(s·e)`.
    #[inline]
    pub fn core_point(&self, s: f64) -> HPoint {
        self.center.mul(&self.dir.scaled(s))
    }

    /// The same tube with a different thickness.
    pub fn with_delta(&self, delta: f64) -> Result<HTube> {
        HTube::new(self.center, self.dir, delta)
    }

    /// The left translate `g·T`.
    pub fn left_translate(&self, g: &HPoint) -> HTube {
        HTube { center: g.mul(&self.center), ..*self }
    }

    // d⁴(core(s), p) given q = center⁻¹·p.
    #[inline]
    fn dist4_along(&self, q: &HPoint, s: f64) -> f64 {
        let (a, b) = (self.dir.a(), self.dir.b());
        let hx = q.x - s * a;
        let hy = q.y - s * b;
        let h = hx * hx + hy * hy;
        let v = q.t + 0.5 * s * (b * q.x - a * q.y);
        h * h + 16.0 * v * v
    }

    /// `min_{|s| ≤ ½} d(core(s), p)`.
    pub fn dist_to_core(&self, p: &HPoint) -> f64 {
        let q = self.center.inv().mul(p);
        let tol = self.delta * 1e-3;
        let d4 = minimize_convex(-0.5, 0.5, tol, -1.0, |s| self.dist4_along(&q, s));
        math::sqrt(math::sqrt(d4))
    }

    pub fn contains(&self, p: &HPoint) -> bool {
        let q = self.center.inv().mul(p);
        let (a, b) = (self.dir.a(), self.dir.b());
        let delta = self.delta;
        if math::abs(a * q.y - b * q.x) > delta {
            return false;
        }
        let along = a * q.x + b * q.y;
        let lo = (along - delta).max(-0.5);
        let hi = (along + delta).min(0.5);
        if lo > hi {
            return false;
        }
        let delta4 = delta * delta * delta * delta;
        minimize_convex(lo, hi, delta * 1e-3, delta4, |s| self.dist4_along(&q, s)) <= delta4
    }

    /// A Euclidean box containing the tube.
    pub fn bbox(&self) -> AxisBox {
        let c = self.center;
        let (a, b) = (self.dir.a(), self.dir.b());
        let d = self.delta;
        let hx = 0.5 * math::abs(a) + d;
        let hy = 0.5 * math::abs(b) + d;
        let ch = math::sqrt(c.x * c.x + c.y * c.y);
        let ht = 0.25 * math::abs(c.x * b - c.y * a) + 0.25 * d + 0.5 * ch * d + 0.25 * d * d;
        AxisBox::new([c.x - hx, c.y - hy, c.t - ht], [c.x + hx, c.y + hy, c.t + ht])
    }

    /// A uniform-in-parameters point `center·(se)·z` with `‖z‖ ≤ δ`.
    pub fn sample_point(&self, rng: &mut impl rand_core::RngCore) -> HPoint {
        let d = self.delta;
        let s = sampling::uniform(rng, -0.5, 0.5);
        loop {
            let z = HPoint::new(
                sampling::uniform(rng, -d, d),
                sampling::uniform(rng, -d, d),
                sampling::uniform(rng, -0.25 * d * d, 0.25 * d * d),
            );
            if z.norm4() <= d * d * d * d {
                return self.core_point(s).mul(&z);
            }
        }
    }
}

pub fn tube_contains(tube: &HTube, p: &HPoint) -> bool {
    tube.contains(p)
}

/// A finite family of tubes that can report pointwise multiplicity.
pub trait TubeFamily: Sync {
    fn count(&self) -> usize;
    /// `Σ_T χ_T(p)`.
    fn multiplicity(&self, p: &HPoint) -> u32;
    /// A box containing every tube, `None` for the empty family.
    fn bbox(&self) -> Option<AxisBox>;
}

impl TubeFamily for [HTube] {
    fn count(&self) -> usize {
        self.len()
    }

    fn multiplicity(&self, p: &HPoint) -> u32 {
        let xyz = [p.x, p.y, p.t];
        self.iter().filter(|t| t.bbox().contains(xyz) && t.contains(p)).count() as u32
    }

    fn bbox(&self) -> Option<AxisBox> {
        self.iter().map(HTube::bbox).reduce(|a, b| a.union(&b))
    }
}

impl TubeFamily for Vec<HTube> {
    fn count(&self) -> usize {
        self.len()
    }

    fn multiplicity(&self, p: &HPoint) -> u32 {
        self.as_slice().multiplicity(p)
    }

    fn bbox(&self) -> Option<AxisBox> {
        self.as_slice().bbox()
    }
}

/// Volume of `T1 ∩ T2`, sampled over the intersection of the two bounding
/// boxes (further clipped to `spec.region` when given).
pub fn tube_intersection_volume<E: ShardExecutor>(t1: &HTube, t2: &HTube, spec: &SampleSpec, exec: &E) -> Estimate {
    let mut region = t1.bbox().intersect(&t2.bbox());
    if let Some(r) = spec.region {
        region = region.intersect(&r);
    }
    if region.is_empty() {
        return Estimate::ZERO;
    }
    let f = |p: [f64; 3]| {
        let q = HPoint::new(p[0], p[1], p[2]);
        if t1.contains(&q) && t2.contains(&q) { 1.0 } else { 0.0 }
    };
    match spec.mode {
        SampleMode::MonteCarlo { samples } => sampling::mc_integrate_3d(exec, &region, samples, spec.seed, f),
        SampleMode::Grid { resolution } => sampling::grid_integrate_3d(exec, &region, resolution, f),
    }
}

/// Every tube of `f1` is within `c` of `e1` and every tube of `f2` within `c`
/// of `e2`.
pub fn is_transversal_pair(f1: &[HTube], f2: &[HTube], c: f64) -> bool {
    f1.iter().all(|t| t.dir.euclid_dist(&HDirection::E1) <= c)
        && f2.iter().all(|t| t.dir.euclid_dist(&HDirection::E2) <= c)
}

/// A unit horizontal segment `{point·(se) : |s| ≤ ½}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Line {
    pub point: HPoint,
    pub dir: HDirection,
}

impl Line {
    pub fn tube(&self, sigma: f64) -> HTube {
        HTube { center: self.point, dir: self.dir, delta: sigma }
    }
}

impl From<&HTube> for Line {
    fn from(t: &HTube) -> Self {
        Line { point: t.center, dir: t.dir }
    }
}

/// An arc of the unit circle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Arc {
    pub center_dir: HDirection,
    pub half_length: f64,
}

fn angular_gap(x: f64, y: f64) -> f64 {
    let two_pi = 2.0 * core::f64::consts::PI;
    let d = math::abs(x - y) % two_pi;
    d.min(two_pi - d)
}

impl Arc {
    pub fn contains(&self, dir: &HDirection) -> bool {
        angular_gap(self.center_dir.angle(), dir.angle()) <= self.half_length
    }

    /// Arc length `|Ω|`.
    pub fn measure(&self) -> f64 {
        2.0 * self.half_length
    }
}

/// Finite probe families used by the broadness reports.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeSpec {
    /// `C` in the ball `B(z, Cσ)`.
    pub ball_constant: f64,
    /// Cap on ball centers (line broadness).
    pub max_centers: usize,
    /// Cap on arc centers (line broadness).
    pub max_arc_centers: usize,
    /// Cap on anchor curves (quadratic broadness).
    pub max_anchors: usize,
    /// Cap on base midpoints per anchor and scale (quadratic broadness).
    pub max_midpoints: usize,
    /// Where rectangle midpoints may sit.
    pub window: crate::curves::Interval,
    /// Jet constant for tangency of a curve to a probe rectangle.
    pub tangency_constant: f64,
}

impl Default for ProbeSpec {
    fn default() -> Self {
        ProbeSpec {
            ball_constant: 4.0,
            max_centers: 64,
            max_arc_centers: 64,
            max_anchors: 64,
            max_midpoints: 16,
            window: crate::curves::Interval::PLANAR.quarter(),
            tangency_constant: 4.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BroadnessReport {
    pub alpha: f64,
    /// Max over probes of `count / (1 + |Ω|^α · total)` (or `t^α` for
    /// rectangles).
    pub worst_ratio: f64,
    pub witness: String,
    pub probes: u64,
}

/// Dyadic scales `δ·2^k ≤ 1`.
pub fn dyadic_scales(delta: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let mut s = delta;
    while s <= 1.0 * (1.0 + 1e-12) {
        out.push(s);
        s *= 2.0;
    }
    out
}

// Up to `cap` items spread evenly through `items`, in order.
pub(crate) fn spread<T: Copy>(items: &[T], cap: usize) -> Vec<T> {
    if items.len() <= cap {
        return items.to_vec();
    }
    (0..cap).map(|i| items[i * items.len() / cap]).collect()
}

/// Directional concentration of a line family at every probed scale,
/// ball and arc.
pub fn line_broadness(lines: &[Line], delta: f64, alpha: f64, probes: &ProbeSpec) -> Result<BroadnessReport> {
    if lines.is_empty() {
        return Err(Error::EmptyFamily);
    }
    let scales = dyadic_scales(delta);

    let mut centers: Vec<HPoint> = Vec::new();
    for l in lines {
        if !centers.contains(&l.point) {
            centers.push(l.point);
        }
    }
    let centers = spread(&centers, probes.max_centers);

    let mut angles: Vec<f64> = lines.iter().map(|l| l.dir.angle()).collect();
    angles.sort_by(f64::total_cmp);
    angles.dedup();
    let arc_centers = spread(&angles, probes.max_arc_centers);

    let mut half_lengths = Vec::new();
    let mut h = core::f64::consts::PI;
    while h >= 0.25 * delta * delta {
        half_lengths.push(h);
        h *= 0.5;
    }
    if scales.is_empty() || centers.is_empty() || arc_centers.is_empty() || half_lengths.is_empty() {
        return Err(Error::EmptyProbes);
    }

    let c = probes.ball_constant;
    let mut worst = f64::NEG_INFINITY;
    let mut witness = String::new();
    let mut count = 0u64;
    let mut hit_angles: Vec<f64> = Vec::with_capacity(lines.len());
    for z in &centers {
        let dists: Vec<f64> = lines.iter().map(|l| l.tube(delta.min(0.5)).dist_to_core(z)).collect();
        for &sigma in &scales {
            hit_angles.clear();
            for (l, &d) in lines.iter().zip(&dists) {
                if d <= c * sigma + sigma {
                    hit_angles.push(l.dir.angle());
                }
            }
            hit_angles.sort_by(f64::total_cmp);
            let total = hit_angles.len() as f64;
            for &phi in &arc_centers {
                for &h in &half_lengths {
                    count += 1;
                    let hits = count_within(&hit_angles, phi, h) as f64;
                    let ratio = hits / (1.0 + math::powf(2.0 * h, alpha) * total);
                    if ratio > worst {
                        worst = ratio;
                        witness = format!(
                            "z=({}, {}, {}) sigma={} arc_center={} half_length={} hits={} total={}",
                            z.x, z.y, z.t, sigma, phi, h, hits, total
                        );
                    }
                }
            }
        }
    }
    Ok(BroadnessReport { alpha, worst_ratio: worst.max(0.0), witness, probes: count })
}

// Number of sorted angles (in (−π, π]) within `h` of `phi` on the circle.
fn count_within(sorted: &[f64], phi: f64, h: f64) -> usize {
    use core::f64::consts::PI;
    if h >= PI {
        return sorted.len();
    }
    let in_range = |lo: f64, hi: f64| {
        let a = sorted.partition_point(|&x| x < lo);
        let b = sorted.partition_point(|&x| x <= hi);
        b.saturating_sub(a)
    };
    let (lo, hi) = (phi - h, phi + h);
    let mut n = in_range(lo.max(-PI), hi.min(PI));
    if lo < -PI {
        n += in_range(lo + 2.0 * PI, PI);
    }
    if hi > PI {
        n += in_range(-PI, hi - 2.0 * PI);
    }
    n
}
