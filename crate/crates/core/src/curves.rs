//! Planar quadratics `s ↦ (a/2)s² + bs + c`, the τ and Δ gauges, curvilinear
//! rectangles and the two tangency tests.
//!
//! Suprema and infima over intervals are computed exactly by evaluating on a
//! finite candidate set: for `h = f − g` the functions `|h| ± |h'|` are
//! quadratic on each piece where the signs of `h` and `h'` are constant, so
//! their extrema sit at the interval ends, the zeros of `h` and `h'`, or the
//! vertices of `h ± h'` (zeros of `h' ± h''`).

use alloc::vec::Vec;

use crate::math;
use crate::{Error, Result};

/// A closed interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    /// Domain of purely planar experiments.
    pub const PLANAR: Interval = Interval { lo: -5.0, hi: 5.0 };
    /// Domain of curves obtained by projecting tubes.
    pub const PROJECTED: Interval = Interval { lo: -10.0, hi: 10.0 };

    pub fn new(lo: f64, hi: f64) -> Self {
        assert!(lo <= hi, "interval endpoints out of order: [{lo}, {hi}]");
        Interval { lo, hi }
    }

    pub fn centered(mid: f64, half: f64) -> Self {
        Interval::new(mid - half, mid + half)
    }

    #[inline]
    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    #[inline]
    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    #[inline]
    pub fn contains(&self, s: f64) -> bool {
        self.lo <= s && s <= self.hi
    }

    /// The concentric interval a quarter as long.
    pub fn quarter(&self) -> Interval {
        Interval::centered(self.mid(), self.len() / 8.0)
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        (lo <= hi).then_some(Interval { lo, hi })
    }
}

/// The quadratic `s ↦ (a/2)s² + bs + c`, identified with `(a, b, c)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Quadratic {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl Quadratic {
    pub const ZERO: Quadratic = Quadratic { a: 0.0, b: 0.0, c: 0.0 };

    pub const fn new(a: f64, b: f64, c: f64) -> Self {
        Quadratic { a, b, c }
    }

    /// The quadratic with value, slope and second derivative `jet` at `s0`.
    pub fn from_jet(s0: f64, jet: [f64; 3]) -> Self {
        let [v, d, k] = jet;
        Quadratic { a: k, b: d - k * s0, c: v - d * s0 + 0.5 * k * s0 * s0 }
    }

    #[inline]
    pub fn eval(&self, s: f64) -> f64 {
        (0.5 * self.a * s + self.b) * s + self.c
    }

    #[inline]
    pub fn deriv(&self, s: f64) -> f64 {
        self.a * s + self.b
    }

    #[inline]
    pub fn second(&self) -> f64 {
        self.a
    }

    /// `(h(s), h'(s), h'')`.
    #[inline]
    pub fn jet(&self, s: f64) -> [f64; 3] {
        [self.eval(s), self.deriv(s), self.a]
    }

    #[inline]
    pub fn sub(&self, other: &Quadratic) -> Quadratic {
        Quadratic { a: self.a - other.a, b: self.b - other.b, c: self.c - other.c }
    }

    #[inline]
    pub fn add(&self, other: &Quadratic) -> Quadratic {
        Quadratic { a: self.a + other.a, b: self.b + other.b, c: self.c + other.c }
    }

    pub fn coefficients(&self) -> [f64; 3] {
        [self.a, self.b, self.c]
    }

    pub fn is_finite(&self) -> bool {
        self.a.is_finite() && self.b.is_finite() && self.c.is_finite()
    }
}

// Points of `domain` where |h| + |h'| can attain its extrema.
fn gauge_candidates(h: &Quadratic, domain: &Interval) -> ([f64; 9], usize) {
    let mut out = [0.0; 9];
    let mut n = 0;
    let mut push = |s: f64, out: &mut [f64; 9]| {
        if domain.contains(s) {
            out[n] = s;
            n += 1;
        }
    };
    push(domain.lo, &mut out);
    push(domain.hi, &mut out);
    let (roots, k) = math::quadratic_roots(0.5 * h.a, h.b, h.c);
    for &r in &roots[..k] {
        push(r, &mut out);
    }
    if h.a != 0.0 {
        push(-h.b / h.a, &mut out);
        push((-h.a - h.b) / h.a, &mut out);
        push((h.a - h.b) / h.a, &mut out);
    }
    (out, n)
}

#[inline]
fn value_plus_slope(h: &Quadratic, s: f64) -> f64 {
    math::abs(h.eval(s)) + math::abs(h.deriv(s))
}

/// `sup_I |h| + |h'| + |h''|` for `h = f − g`.
pub fn tau(f: &Quadratic, g: &Quadratic, domain: &Interval) -> f64 {
    let h = f.sub(g);
    let (cand, n) = gauge_candidates(&h, domain);
    let best = cand[..n].iter().map(|&s| value_plus_slope(&h, s)).fold(0.0, f64::max);
    best + math::abs(h.a)
}

/// `inf_I |h| + |h'|` for `h = f − g`.
pub fn delta_gauge(f: &Quadratic, g: &Quadratic, domain: &Interval) -> f64 {
    let h = f.sub(g);
    let (cand, n) = gauge_candidates(&h, domain);
    cand[..n].iter().map(|&s| value_plus_slope(&h, s)).fold(f64::INFINITY, f64::min)
}

/// `sup_J |f − g|`, from the endpoints and the vertex of `f − g`.
pub fn sup_abs_diff(f: &Quadratic, g: &Quadratic, domain: &Interval) -> f64 {
    let h = f.sub(g);
    let mut best = math::abs(h.eval(domain.lo)).max(math::abs(h.eval(domain.hi)));
    if h.a != 0.0 {
        let v = -h.b / h.a;
        if domain.contains(v) {
            best = best.max(math::abs(h.eval(v)));
        }
    }
    best
}

/// The set `{s ∈ window : |f(s) − g(s)| ≤ delta}` as disjoint closed
/// intervals in increasing order. Isolated touching points come back as
/// degenerate intervals.
pub fn near_intersection_intervals(f: &Quadratic, g: &Quadratic, delta: f64, window: &Interval) -> Vec<Interval> {
    let h = f.sub(g);
    let inside = |s: f64| math::abs(h.eval(s)) <= delta;
    let mut cuts: Vec<f64> = Vec::with_capacity(6);
    cuts.push(window.lo);
    for shift in [-delta, delta] {
        let (roots, k) = math::quadratic_roots(0.5 * h.a, h.b, h.c + shift);
        cuts.extend(roots[..k].iter().copied().filter(|&r| window.lo < r && r < window.hi));
    }
    cuts.push(window.hi);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();

    let mut out: Vec<Interval> = Vec::new();
    let extend = |lo: f64, hi: f64, out: &mut Vec<Interval>| match out.last_mut() {
        Some(last) if last.hi >= lo => last.hi = last.hi.max(hi),
        _ => out.push(Interval { lo, hi }),
    };
    if cuts.len() == 1 {
        if inside(cuts[0]) {
            extend(cuts[0], cuts[0], &mut out);
        }
        return out;
    }
    for w in cuts.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        if inside(0.5 * (lo + hi)) {
            extend(lo, hi, &mut out);
        } else {
            // A root of h ∓ δ can be a tangential touch of the band.
            if inside(lo) {
                extend(lo, lo, &mut out);
            }
            if inside(hi) {
                extend(hi, hi, &mut out);
            }
        }
    }
    out
}

/// The δ-neighbourhood of the graph of `center` over `base`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurviRect {
    pub center: Quadratic,
    pub base: Interval,
    pub thickness: f64,
}

impl CurviRect {
    pub fn new(center: Quadratic, base: Interval, thickness: f64) -> Self {
        assert!(thickness > 0.0, "rectangle thickness must be positive");
        CurviRect { center, base, thickness }
    }

    /// The (δ, t)-rectangle of `center` with base of length `√(δ/t)` centred
    /// at `mid`.
    pub fn scaled(center: Quadratic, mid: f64, delta: f64, t: f64) -> Self {
        CurviRect::new(center, Interval::centered(mid, 0.5 * math::sqrt(delta / t)), delta)
    }

    /// `t = δ / |J|²`.
    #[inline]
    pub fn t(&self) -> f64 {
        let len = self.base.len();
        self.thickness / (len * len)
    }

    /// `t`, or an error when it falls outside `[δ, 1]`.
    pub fn checked_t(&self) -> Result<f64> {
        let t = self.t();
        let delta = self.thickness;
        if !(t.is_finite() && t >= delta * (1.0 - 1e-9) && t <= 1.0 + 1e-9) {
            return Err(Error::InconsistentBase { len: self.base.len(), delta });
        }
        Ok(t)
    }

    pub fn contains_point(&self, s: f64, y: f64) -> bool {
        self.base.contains(s) && math::abs(self.center.eval(s) - y) <= self.thickness
    }
}

/// Jet tangency at the base midpoint: `|h| ≤ Cδ`, `|h'| ≤ C√(δt)`,
/// `|h''| ≤ Ct` for `h = f − center`.
pub fn is_tangent_jet(f: &Quadratic, rect: &CurviRect, c: f64) -> Result<bool> {
    let t = rect.checked_t()?;
    Ok(jet_within(f, rect, t, c))
}

#[inline]
pub(crate) fn jet_within(f: &Quadratic, rect: &CurviRect, t: f64, c: f64) -> bool {
    let delta = rect.thickness;
    let [v, d, k] = f.sub(&rect.center).jet(rect.base.mid());
    math::abs(v) <= c * delta && math::abs(d) <= c * math::sqrt(delta * t) && math::abs(k) <= c * t
}

/// `rect ⊆ f^{Cδ}(J)`, i.e. `sup_J |f − center| ≤ (C − 1)δ`.
pub fn is_tangent_containment(f: &Quadratic, rect: &CurviRect, c: f64) -> bool {
    sup_abs_diff(f, &rect.center, &rect.base) <= (c - 1.0) * rect.thickness
}

/// Two (δ, t)-rectangles at the same scale are comparable when their base
/// midpoints are within `C√(δ/t)` and their centres' 2-jets at the joint
/// midpoint agree to `(Cδ, C√(δt), Ct)`.
pub fn comparable(r1: &CurviRect, r2: &CurviRect, c: f64) -> Result<bool> {
    let (t1, t2) = (r1.t(), r2.t());
    let (d1, d2) = (r1.thickness, r2.thickness);
    let close = |x: f64, y: f64| math::abs(x - y) <= 1e-9 * x.abs().max(y.abs());
    if !close(d1, d2) || !close(t1, t2) {
        return Err(Error::ScaleMismatch { d1, t1, d2, t2 });
    }
    Ok(comparable_at(r1, r2, d1, t1, c))
}

#[inline]
pub(crate) fn comparable_at(r1: &CurviRect, r2: &CurviRect, delta: f64, t: f64, c: f64) -> bool {
    let (m1, m2) = (r1.base.mid(), r2.base.mid());
    if math::abs(m1 - m2) > c * math::sqrt(delta / t) {
        return false;
    }
    let [v, d, k] = r1.center.sub(&r2.center).jet(0.5 * (m1 + m2));
    math::abs(v) <= c * delta && math::abs(d) <= c * math::sqrt(delta * t) && math::abs(k) <= c * t
}

/// Two families of quadratics meant to be ρ-bipartite: cross distances in
/// `[ρ, 100ρ]`, distances within each family at most `ρ`.
#[derive(Debug, Clone, PartialEq)]
pub struct BipartitePair {
    pub f: Vec<Quadratic>,
    pub g: Vec<Quadratic>,
    pub rho: f64,
}

/// Extremes of τ within and across two families.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BipartiteStats {
    pub max_within: f64,
    pub min_cross: f64,
    pub max_cross: f64,
}

impl BipartiteStats {
    /// Whether some ρ makes the pair ρ-bipartite.
    pub fn admits_some_rho(&self) -> bool {
        self.max_within.max(self.max_cross / 100.0) <= self.min_cross
    }

    pub fn admits(&self, rho: f64) -> bool {
        self.max_within <= rho && rho <= self.min_cross && self.max_cross <= 100.0 * rho
    }
}

/// Exhaustive τ statistics; quadratic in the family sizes.
pub fn bipartite_stats(f: &[Quadratic], g: &[Quadratic], domain: &Interval) -> BipartiteStats {
    let mut max_within: f64 = 0.0;
    for fam in [f, g] {
        for (i, p) in fam.iter().enumerate() {
            for q in &fam[i + 1..] {
                max_within = max_within.max(tau(p, q, domain));
            }
        }
    }
    let mut min_cross = f64::INFINITY;
    let mut max_cross: f64 = 0.0;
    for p in f {
        for q in g {
            let d = tau(p, q, domain);
            min_cross = min_cross.min(d);
            max_cross = max_cross.max(d);
        }
    }
    BipartiteStats { max_within, min_cross, max_cross }
}

impl BipartitePair {
    pub fn stats(&self, domain: &Interval) -> BipartiteStats {
        bipartite_stats(&self.f, &self.g, domain)
    }

    /// Checks the definition at the declared ρ.
    pub fn validate(&self, domain: &Interval) -> Result<()> {
        if self.f.is_empty() || self.g.is_empty() {
            return Err(Error::EmptyFamily);
        }
        let s = self.stats(domain);
        if s.min_cross < self.rho {
            return Err(Error::NotBipartite("a cross pair is closer than rho"));
        }
        if s.max_cross > 100.0 * self.rho {
            return Err(Error::NotBipartite("a cross pair is farther than 100 rho"));
        }
        if s.max_within > self.rho {
            return Err(Error::NotBipartite("a family has diameter above rho"));
        }
        Ok(())
    }

    /// The largest ρ for which the pair is ρ-bipartite.
    pub fn measured_rho(&self, domain: &Interval) -> Result<f64> {
        if self.f.is_empty() || self.g.is_empty() {
            return Err(Error::EmptyFamily);
        }
        let s = self.stats(domain);
        if !s.admits_some_rho() {
            return Err(Error::NotBipartite("no rho fits both the cross and within-family distances"));
        }
        Ok(s.min_cross)
    }
}
