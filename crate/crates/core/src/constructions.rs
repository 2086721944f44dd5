//! Explicit families: the bush, the opposed parabolas, bipartite coefficient
//! balls, the clamshell, and the tube lattices that foliate the unit ball.
//!
//! Every generator is deterministic; output order is part of the contract.

use alloc::format;
use alloc::vec::Vec;

use crate::curves::{self, BipartitePair, CurviRect, Interval, Quadratic};
use crate::heis::{HDirection, HPoint};
use crate::incidence;
use crate::math;
use crate::sampling::AxisBox;
use crate::tube::{HTube, TubeFamily};
use crate::{Error, Result};

fn infeasible(msg: alloc::string::String) -> Error {
    Error::Infeasible(msg)
}

/// Angular step between directions whose chord is `chord`.
fn angle_for_chord(chord: f64) -> f64 {
    2.0 * math::asin(0.5 * chord)
}

/// Tubes through the origin with directions packed in an arc of length
/// `δ^{3/2}` around `e1` (chords `δ²` apart), and `e2`-tubes centred at
/// `2δ`-spaced points of the segment `{s·e1 : |s| ≤ δ^{3/4}}`.
pub fn build_bush(delta: f64) -> Result<(Vec<HTube>, Vec<HTube>)> {
    if !(delta > 0.0 && delta <= 1.0 / 16.0) {
        return Err(infeasible(format!("bush needs 0 < delta <= 1/16, got {delta}")));
    }
    let step = angle_for_chord(delta * delta);
    let half_arc = 0.5 * math::powf(delta, 1.5);
    let k_max = math::floor(half_arc / step + 1e-9) as i64;
    let mut t1 = Vec::with_capacity((2 * k_max + 1) as usize);
    for k in -k_max..=k_max {
        t1.push(HTube::new(HPoint::IDENTITY, HDirection::from_angle(k as f64 * step), delta)?);
    }

    let reach = math::powf(delta, 0.75);
    let count = math::floor(2.0 * reach / (2.0 * delta) + 1e-9) as usize + 1;
    let mut t2 = Vec::with_capacity(count);
    for k in 0..count {
        let s = -reach + 2.0 * delta * k as f64;
        t2.push(HTube::new(HPoint::new(s, 0.0, 0.0), HDirection::E2, delta)?);
    }
    if t1.len() < 2 || t2.len() < 2 {
        return Err(infeasible(format!("bush at delta = {delta} has fewer than 2 tubes per family")));
    }
    Ok((t1, t2))
}

/// `f = (ρ/2)s²` against `g = −(ρ/2)s²`.
pub fn build_opposed_pair(delta: f64, rho: f64) -> Result<BipartitePair> {
    if !(delta > 0.0 && delta <= rho && rho <= 1.0) {
        return Err(infeasible(format!("opposed pair needs 0 < delta <= rho <= 1, got delta = {delta}, rho = {rho}")));
    }
    Ok(BipartitePair {
        f: alloc::vec![Quadratic::new(rho, 0.0, 0.0)],
        g: alloc::vec![Quadratic::new(-rho, 0.0, 0.0)],
        rho,
    })
}

/// Lattice points `center + spacing·(i, j, k)` within Euclidean coefficient
/// distance `radius` of `center`, in lexicographic order. Coefficient
/// distance never exceeds τ on an interval containing 0, so the points are
/// `spacing`-separated in τ.
pub fn coefficient_ball_lattice(center: &Quadratic, radius: f64, spacing: f64) -> Vec<Quadratic> {
    let n = math::floor(radius / spacing + 1e-9) as i64;
    let mut out = Vec::new();
    for i in -n..=n {
        for j in -n..=n {
            for k in -n..=n {
                let (x, y, z) = (i as f64 * spacing, j as f64 * spacing, k as f64 * spacing);
                if x * x + y * y + z * z <= radius * radius * (1.0 + 1e-12) {
                    out.push(Quadratic::new(center.a + x, center.b + y, center.c + z));
                }
            }
        }
    }
    out
}

/// Lattice points of spacing `delta` inside the τ-ball `B_τ(center, radius)`.
pub fn tau_ball_net(center: &Quadratic, radius: f64, delta: f64, domain: &Interval) -> Vec<Quadratic> {
    let n = math::floor(radius / delta + 1e-9) as i64;
    let mut out = Vec::new();
    for i in -n..=n {
        for j in -n..=n {
            for k in -n..=n {
                let q = Quadratic::new(center.a + i as f64 * delta, center.b + j as f64 * delta, center.c + k as f64 * delta);
                if curves::tau(&q, center, domain) <= radius {
                    out.push(q);
                }
            }
        }
    }
    out
}

/// Centre of the first coefficient ball of [`build_bipartite_balls`].
pub fn bipartite_ball_center(rho: f64, sign: f64) -> Quadratic {
    Quadratic::new(sign * 4.0 * rho, 0.0, 0.5)
}

/// Two coefficient balls of radius ρ centred at `(±4ρ, 0, ½)`, each filled
/// with the δ-lattice. The constant term ½ puts the curves through the
/// middle of the unit square.
pub fn build_bipartite_balls(delta: f64, rho: f64) -> Result<BipartitePair> {
    if !(delta > 0.0 && rho > 0.0 && delta <= rho / 8.0) {
        return Err(infeasible(format!("bipartite balls need 0 < delta <= rho/8, got delta = {delta}, rho = {rho}")));
    }
    let f = coefficient_ball_lattice(&bipartite_ball_center(rho, 1.0), rho, delta);
    let g = coefficient_ball_lattice(&bipartite_ball_center(rho, -1.0), rho, delta);
    if f.is_empty() || g.is_empty() {
        return Err(infeasible(format!("bipartite balls at delta = {delta}, rho = {rho} are empty")));
    }
    Ok(BipartitePair { f, g, rho })
}

/// Output of [`build_clamshell`].
#[derive(Debug, Clone, PartialEq)]
pub struct Clamshell {
    pub f: Vec<Quadratic>,
    pub g: Vec<Quadratic>,
    /// The `N/μ` stacked (δ, t)-rectangles.
    pub stacks: Vec<CurviRect>,
    /// The `t^{−1/2}` (δ, 1)-rectangles subdividing each stack, stack-major.
    pub rects: Vec<CurviRect>,
    pub delta: f64,
    pub t: f64,
    pub mu: usize,
    pub nu: usize,
}

impl Clamshell {
    pub fn pieces_per_stack(&self) -> usize {
        self.rects.len() / self.stacks.len()
    }
}

/// Value of each short-tangent curve above its stack at its contact point,
/// in units of δ.
const CONTACT_HEIGHT: f64 = 3.0;
/// Curvature range of the short-tangent curves.
const CONTACT_CURVATURE: (f64, f64) = (3.2, 3.8);

/// `N/μ` vertically stacked (δ, t)-rectangles over a common base of length
/// `√(δ/t)`; `μ` curves per stack inside the quarter jet box at the base
/// midpoint; each stack cut into `t^{−1/2}` (δ, 1)-rectangles, and `ν`
/// strongly curved curves touching each piece at its midpoint and no other
/// piece. Richness `(μ, ν)` of every piece is checked before returning.
pub fn build_clamshell(delta: f64, t: f64, mu: usize, nu: usize, n: usize) -> Result<Clamshell> {
    if !(delta > 0.0 && delta <= t && t <= 1.0) {
        return Err(infeasible(format!("clamshell needs 0 < delta <= t <= 1, got delta = {delta}, t = {t}")));
    }
    let ratio = t / delta;
    if !(mu as f64 >= 0.5 * ratio && mu as f64 <= 2.0 * ratio) {
        return Err(infeasible(format!("mu must be within a factor 2 of t/delta = {ratio}, got mu = {mu}")));
    }
    if !(mu <= n && n as f64 <= 1.0 / delta * (1.0 + 1e-9)) {
        return Err(infeasible(format!("need mu <= N <= 1/delta, got mu = {mu}, N = {n}")));
    }
    if nu == 0 || nu as f64 > 1.0 / delta * (1.0 + 1e-9) {
        return Err(infeasible(format!("need 1 <= nu <= 1/delta, got nu = {nu}")));
    }
    if n % mu != 0 {
        return Err(infeasible(format!("mu must divide N, got mu = {mu}, N = {n}")));
    }
    let pieces = math::round(1.0 / math::sqrt(t)) as usize;
    if pieces == 0 || math::abs(pieces as f64 - 1.0 / math::sqrt(t)) > 1e-6 * pieces as f64 {
        return Err(infeasible(format!("t^(-1/2) must be an integer, got t = {t}")));
    }
    let stacks_n = n / mu;
    let len = math::sqrt(delta / t);
    let piece = math::sqrt(delta);
    let base = Interval::centered(0.0, 0.5 * len);

    // Short-tangent curves rise by CONTACT_HEIGHT + c m²/2 (in δ) at the
    // m-th neighbouring piece; stacks sit far enough apart that no such
    // curve comes within 4δ of another stack.
    let far = (pieces - 1) as f64;
    let gap = math::ceil(CONTACT_HEIGHT + 0.5 * CONTACT_CURVATURE.1 * far * far + 8.0);

    let side = math::ceil(math::sqrt(mu as f64)) as usize;
    let grid = |i: usize| if side == 1 { 0.0 } else { -1.0 + 2.0 * i as f64 / (side - 1) as f64 };
    let slope_unit = 0.25 * math::sqrt(delta * t);
    let curv_unit = 0.25 * t;

    let mut f = Vec::with_capacity(n);
    let mut g = Vec::with_capacity(nu * pieces * stacks_n);
    let mut stacks = Vec::with_capacity(stacks_n);
    let mut rects = Vec::with_capacity(pieces * stacks_n);
    for j in 0..stacks_n {
        let center = Quadratic::new(0.0, 0.0, j as f64 * gap * delta);
        stacks.push(CurviRect::new(center, base, delta));
        for k in 0..mu {
            let (y, z) = (grid(k / side), grid(k % side));
            f.push(center.add(&Quadratic::from_jet(0.0, [0.0, y * slope_unit, z * curv_unit])));
        }
        for l in 0..pieces {
            let mid = base.lo + (l as f64 + 0.5) * piece;
            rects.push(CurviRect::new(center, Interval::centered(mid, 0.5 * piece), delta));
            for m in 0..nu {
                let frac = if nu == 1 { 0.5 } else { m as f64 / (nu - 1) as f64 };
                let curvature = CONTACT_CURVATURE.0 + frac * (CONTACT_CURVATURE.1 - CONTACT_CURVATURE.0);
                g.push(center.add(&Quadratic::from_jet(mid, [CONTACT_HEIGHT * delta, 0.0, curvature])));
            }
        }
    }

    for (idx, r) in rects.iter().enumerate() {
        let rich = incidence::richness_of(r, &f, &g)?;
        if rich.mu != mu || rich.nu != nu {
            return Err(infeasible(format!(
                "piece {idx} has richness ({}, {}) instead of ({mu}, {nu})",
                rich.mu, rich.nu
            )));
        }
    }
    Ok(Clamshell { f, g, stacks, rects, delta, t, mu, nu })
}

/// Which horizontal axis a [`TubeLattice`] runs along.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

/// A lattice of unit tubes along one axis, foliating `B(0, 1)`.
///
/// For tubes along `x` the coordinate `w = t + ½xy` is constant on every
/// core, so cores are indexed by `(y, w)`: rows `y ∈ δℤ`, and in row `i` the
/// values `w ∈ (δ²/2)(ℤ + i/2)` (alternate rows staggered by `δ²/4`). Two
/// tubes per core line, centred at `x = ±½`. Tubes along `y` use
/// `w = t − ½xy` and rows in `x`. Multiplicity queries touch O(1) tubes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TubeLattice {
    pub axis: Axis,
    pub delta: f64,
    rows: i64,
    w_cells: i64,
}

/// Extent of the transverse coordinate and of `w` covered by the lattice.
const LATTICE_REACH: f64 = 1.0;
const LATTICE_W_REACH: f64 = 0.5;
const ALONG_CENTERS: [f64; 2] = [-0.5, 0.5];

impl TubeLattice {
    pub fn new(axis: Axis, delta: f64) -> Result<Self> {
        if !(delta > 0.0 && delta <= 0.125) {
            return Err(infeasible(format!("parabolic net needs 0 < delta <= 1/8, got {delta}")));
        }
        let rows = math::ceil((LATTICE_REACH + delta) / delta) as i64;
        let w_cells = math::ceil((LATTICE_W_REACH + delta * delta) / (0.5 * delta * delta)) as i64;
        Ok(TubeLattice { axis, delta, rows, w_cells })
    }

    fn w_step(&self) -> f64 {
        0.5 * self.delta * self.delta
    }

    fn w_value(&self, row: i64, k: i64) -> f64 {
        let stagger = if row.rem_euclid(2) == 1 { 0.5 } else { 0.0 };
        (k as f64 + stagger) * self.w_step()
    }

    fn dir(&self) -> HDirection {
        match self.axis {
            Axis::X => HDirection::E1,
            Axis::Y => HDirection::E2,
        }
    }

    /// The tube with transverse row `row`, `w`-index `k` and along-centre
    /// `along`.
    fn tube_at(&self, row: i64, k: i64, along: f64) -> HTube {
        let u = row as f64 * self.delta;
        let w = self.w_value(row, k);
        let center = match self.axis {
            Axis::X => HPoint::new(along, u, w - 0.5 * along * u),
            Axis::Y => HPoint::new(u, along, w + 0.5 * u * along),
        };
        HTube { center, dir: self.dir(), delta: self.delta }
    }

    /// All tubes, row-major, then `w`, then along-centre.
    pub fn to_tubes(&self) -> Vec<HTube> {
        let mut out = Vec::with_capacity(self.count());
        for row in -self.rows..=self.rows {
            for k in -self.w_cells..=self.w_cells {
                for &along in &ALONG_CENTERS {
                    out.push(self.tube_at(row, k, along));
                }
            }
        }
        out
    }
}

impl TubeFamily for TubeLattice {
    fn count(&self) -> usize {
        ((2 * self.rows + 1) * (2 * self.w_cells + 1)) as usize * ALONG_CENTERS.len()
    }

    fn multiplicity(&self, p: &HPoint) -> u32 {
        let d = self.delta;
        // Along-coordinate, transverse coordinate, and the sheared w offset:
        // a tube in row u with value w0 can contain p only if
        // |w(p) − along·(u(p) − u) − w0| ≤ δ|u(p) − u|/2 + δ²/4.
        let (along, trans, w) = match self.axis {
            Axis::X => (p.x, p.y, p.t + 0.5 * p.x * p.y),
            Axis::Y => (p.y, p.x, p.t - 0.5 * p.x * p.y),
        };
        let sign = match self.axis {
            Axis::X => 1.0,
            Axis::Y => -1.0,
        };
        let row_lo = (math::ceil((trans - d) / d) as i64).max(-self.rows);
        let row_hi = (math::floor((trans + d) / d) as i64).min(self.rows);
        let slack = 0.75 * d * d * (1.0 + 1e-9);
        let mut total = 0;
        for row in row_lo..=row_hi {
            let du = trans - row as f64 * d;
            let target = w - sign * along * du;
            let stagger = if row.rem_euclid(2) == 1 { 0.5 } else { 0.0 };
            let k_lo = (math::ceil((target - slack) / self.w_step() - stagger) as i64).max(-self.w_cells);
            let k_hi = (math::floor((target + slack) / self.w_step() - stagger) as i64).min(self.w_cells);
            for k in k_lo..=k_hi {
                for &c in &ALONG_CENTERS {
                    if math::abs(along - c) > 0.5 + d {
                        continue;
                    }
                    if self.tube_at(row, k, c).contains(p) {
                        total += 1;
                    }
                }
            }
        }
        total
    }

    fn bbox(&self) -> Option<AxisBox> {
        let d = self.delta;
        let along = 1.0 + d;
        let reach = LATTICE_REACH + 2.0 * d;
        let t = LATTICE_W_REACH + 2.0 * d * d + 0.5 * along * reach + d;
        Some(match self.axis {
            Axis::X => AxisBox::new([-along, -reach, -t], [along, reach, t]),
            Axis::Y => AxisBox::new([-reach, -along, -t], [reach, along, t]),
        })
    }
}

/// Tubes along `e1` and along `e2` that each foliate `B(0, 1)` with bounded
/// overlap; `~8δ⁻³` tubes per family, kept implicit.
pub fn build_parabolic_net(delta: f64) -> Result<(TubeLattice, TubeLattice)> {
    Ok((TubeLattice::new(Axis::X, delta)?, TubeLattice::new(Axis::Y, delta)?))
}
