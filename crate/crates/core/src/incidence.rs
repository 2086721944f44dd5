//! Rich rectangles and their incidences with two families of quadratics.
//!
//! Tangency here is always the jet test at a rectangle's base midpoint, and
//! comparability the jet test of [`crate::curves::comparable`].

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::curves::{self, CurviRect, Interval, Quadratic};
use crate::math;
use crate::tube::{dyadic_scales, spread, BroadnessReport, ProbeSpec};
use crate::{Error, Result};

/// Tangent counts from the two families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Richness {
    pub mu: usize,
    pub nu: usize,
}

impl Richness {
    pub fn at_least(&self, mu: usize, nu: usize) -> bool {
        self.mu >= mu && self.nu >= nu
    }
}

/// The window of a K-transverse pair at scale `(σ, t)`: `σt/K ≤ Δ ≤ σt`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TangencyScale {
    pub k: f64,
    pub sigma: f64,
    pub t: f64,
}

impl TangencyScale {
    pub fn admits(&self, gap: f64) -> bool {
        let top = self.sigma * self.t;
        top / self.k <= gap && gap <= top
    }
}

/// Constants shared by the incidence routines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IncidenceParams {
    pub tangency_constant: f64,
    pub comparability_constant: f64,
    /// Where candidate base midpoints may sit.
    pub window: Interval,
    /// Domain of the τ and Δ gauges.
    pub domain: Interval,
}

impl Default for IncidenceParams {
    fn default() -> Self {
        IncidenceParams {
            tangency_constant: 4.0,
            comparability_constant: 10.0,
            window: Interval::PLANAR.quarter(),
            domain: Interval::PLANAR,
        }
    }
}

fn count_tangent(rect: &CurviRect, t: f64, family: &[Quadratic], c: f64) -> usize {
    family.iter().filter(|f| curves::jet_within(f, rect, t, c)).count()
}

/// Curves of `f` and of `g` jet-tangent to `rect` with constant `c`.
pub fn richness_with(rect: &CurviRect, f: &[Quadratic], g: &[Quadratic], c: f64) -> Result<Richness> {
    let t = rect.checked_t()?;
    Ok(Richness { mu: count_tangent(rect, t, f, c), nu: count_tangent(rect, t, g, c) })
}

/// [`richness_with`] at the default tangency constant 4.
pub fn richness_of(rect: &CurviRect, f: &[Quadratic], g: &[Quadratic]) -> Result<Richness> {
    richness_with(rect, f, g, IncidenceParams::default().tangency_constant)
}

/// Base midpoints `k·step` inside `window`.
pub fn midpoint_grid(window: &Interval, step: f64) -> Vec<f64> {
    let first = math::ceil(window.lo / step - 1e-9) as i64;
    let last = math::floor(window.hi / step + 1e-9) as i64;
    (first..=last).map(|k| k as f64 * step).collect()
}

/// (δ, t)-rectangles anchored on curves of `f` with midpoints on the
/// half-length grid, in scan order (anchor-major).
pub fn anchored_candidates(f: &[Quadratic], delta: f64, t: f64, window: &Interval) -> Vec<CurviRect> {
    let half = 0.5 * math::sqrt(delta / t);
    let mids = midpoint_grid(window, half);
    let mut out = Vec::with_capacity(f.len() * mids.len());
    for anchor in f {
        for &m in &mids {
            out.push(CurviRect::scaled(*anchor, m, delta, t));
        }
    }
    out
}

/// Greedy first-fit selection of pairwise incomparable `(μ, ν)`-rich
/// (δ, t)-rectangles among the anchored candidates.
pub fn max_incomparable_rich(
    f: &[Quadratic],
    g: &[Quadratic],
    delta: f64,
    t: f64,
    mu: usize,
    nu: usize,
    params: &IncidenceParams,
) -> Result<Vec<CurviRect>> {
    if !(t >= delta * (1.0 - 1e-9) && t <= 1.0 + 1e-9) {
        return Err(Error::InconsistentBase { len: math::sqrt(delta / t), delta });
    }
    let c_tan = params.tangency_constant;
    let c_cmp = params.comparability_constant;
    let mut chosen: Vec<CurviRect> = Vec::new();
    for rect in anchored_candidates(f, delta, t, &params.window) {
        if chosen.iter().any(|r| curves::comparable_at(r, &rect, delta, t, c_cmp)) {
            continue;
        }
        if count_tangent(&rect, t, f, c_tan) >= mu && count_tangent(&rect, t, g, c_tan) >= nu {
            chosen.push(rect);
        }
    }
    Ok(chosen)
}

/// Outcome of [`wolff_bound_check`].
#[derive(Debug, Clone, PartialEq)]
pub struct WolffCheck {
    pub count: usize,
    pub bound: f64,
    pub constant: f64,
    pub ok: bool,
    /// The largest ρ for which the families form a ρ-bipartite pair.
    pub measured_rho: f64,
}

/// `(#C·#D)^ε [(#C·#D/(μν))^{3/4} + #C/μ + #D/ν]`.
pub fn wolff_bound(n_c: usize, n_d: usize, mu: usize, nu: usize, eps: f64) -> f64 {
    let (c, d) = (n_c as f64, n_d as f64);
    let (m, n) = (mu.max(1) as f64, nu.max(1) as f64);
    math::powf(c * d, eps) * (math::powf(c * d / (m * n), 0.75) + c / m + d / n)
}

/// Counts greedy incomparable rich rectangles and compares with
/// `constant · wolff_bound`. The families must admit some bipartite ρ.
#[allow(clippy::too_many_arguments)]
pub fn wolff_bound_check(
    f: &[Quadratic],
    g: &[Quadratic],
    delta: f64,
    t: f64,
    mu: usize,
    nu: usize,
    eps: f64,
    constant: f64,
    params: &IncidenceParams,
) -> Result<WolffCheck> {
    let pair = curves::BipartitePair { f: f.to_vec(), g: g.to_vec(), rho: 0.0 };
    let measured_rho = pair.measured_rho(&params.domain)?;
    let count = max_incomparable_rich(f, g, delta, t, mu, nu, params)?.len();
    let bound = wolff_bound(f.len(), g.len(), mu, nu, eps);
    Ok(WolffCheck { count, bound, constant, ok: count as f64 <= constant * bound, measured_rho })
}

/// Concentration of `q` in probe rectangles: the max over dyadic
/// `δ ≤ σ ≤ t ≤ 1` and (σ, t)-rectangles anchored on curves of `q` of
/// `#{f ∈ q : f ∼ R} / (1 + t^α #q)`.
pub fn quad_broadness(q: &[Quadratic], delta: f64, alpha: f64, probes: &ProbeSpec) -> Result<BroadnessReport> {
    if q.is_empty() {
        return Err(Error::EmptyFamily);
    }
    let anchors = spread(q, probes.max_anchors);
    let total = q.len() as f64;
    let mut worst = f64::NEG_INFINITY;
    let mut witness = String::new();
    let mut count = 0u64;
    for &sigma in &dyadic_scales(delta) {
        for &t in &dyadic_scales(sigma) {
            let half = 0.5 * math::sqrt(sigma / t);
            let mids = spread(&midpoint_grid(&probes.window, half), probes.max_midpoints);
            let denom = 1.0 + math::powf(t, alpha) * total;
            for anchor in &anchors {
                for &m in &mids {
                    count += 1;
                    let rect = CurviRect::scaled(*anchor, m, sigma, t);
                    let hits = count_tangent(&rect, t, q, probes.tangency_constant);
                    let ratio = hits as f64 / denom;
                    if ratio > worst {
                        worst = ratio;
                        witness = format!(
                            "anchor=({}, {}, {}) mid={} sigma={} t={} hits={} total={}",
                            anchor.a, anchor.b, anchor.c, m, sigma, t, hits, total
                        );
                    }
                }
            }
        }
    }
    if count == 0 {
        return Err(Error::EmptyProbes);
    }
    Ok(BroadnessReport { alpha, worst_ratio: worst.max(0.0), witness, probes: count })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BroadNarrow {
    pub is_broad: bool,
    pub transverse_pairs: usize,
    pub total_pairs: usize,
}

/// Splits `S` by how many ordered pairs of its tangent `g`-curves are
/// K-transverse at the scale of `S`.
pub fn classify_broad_narrow(s: &CurviRect, g: &[Quadratic], k: f64, params: &IncidenceParams) -> Result<BroadNarrow> {
    let t = s.checked_t()?;
    let scale = TangencyScale { k, sigma: s.thickness, t };
    let tangent: Vec<&Quadratic> = g.iter().filter(|q| curves::jet_within(q, s, t, params.tangency_constant)).collect();
    let mut transverse = 0;
    let mut total = 0;
    for (i, g1) in tangent.iter().enumerate() {
        for (j, g2) in tangent.iter().enumerate() {
            if i == j {
                continue;
            }
            total += 1;
            if scale.admits(curves::delta_gauge(g1, g2, &params.domain)) {
                transverse += 1;
            }
        }
    }
    Ok(BroadNarrow { is_broad: total > 0 && 2 * transverse >= total, transverse_pairs: transverse, total_pairs: total })
}

/// Pairwise incomparable (σ, t)-rectangles tangent to both `g1` and `g2`,
/// anchored on `g1` and selected first-fit.
pub fn common_tangent_rectangles(
    g1: &Quadratic,
    g2: &Quadratic,
    sigma: f64,
    t: f64,
    params: &IncidenceParams,
) -> Vec<CurviRect> {
    let mut chosen: Vec<CurviRect> = Vec::new();
    for rect in anchored_candidates(core::slice::from_ref(g1), sigma, t, &params.window) {
        if !curves::jet_within(g2, &rect, t, params.tangency_constant) {
            continue;
        }
        if chosen.iter().all(|r| !curves::comparable_at(r, &rect, sigma, t, params.comparability_constant)) {
            chosen.push(rect);
        }
    }
    chosen
}
