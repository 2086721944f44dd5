//! Both sides of the bilinear estimates, and log-log fits across δ-ladders.

use alloc::vec;
use alloc::vec::Vec;

use crate::curves::Quadratic;
use crate::heis::HPoint;
use crate::math::{self, CompensatedSum};
use crate::sampling::{self, AxisBox, Estimate, SampleMode, SampleSpec, ShardExecutor};
use crate::tube::TubeFamily;
use crate::{Error, Result};

/// Korányi radius the default tube-integral region is clipped to.
pub const DEFAULT_BALL: f64 = 2.0;

fn koranyi_ball_box(r: f64) -> AxisBox {
    AxisBox::new([-r, -r, -0.25 * r * r], [r, r, 0.25 * r * r])
}

/// `∫ (Σχ_{T1})^p (Σχ_{T2})^p` over `B(0, 2)`.
pub fn bilinear_tube_integral<A, B, E>(t1: &A, t2: &B, p: f64, spec: &SampleSpec, exec: &E) -> Result<Estimate>
where
    A: TubeFamily + ?Sized,
    B: TubeFamily + ?Sized,
    E: ShardExecutor,
{
    bilinear_tube_integral_in(t1, t2, p, DEFAULT_BALL, spec, exec)
}

/// As [`bilinear_tube_integral`], over `B(0, ball)`. The sampled box is the
/// intersection of the two families' boxes with the ball's box (and with
/// `spec.region` when set); outside both supports the integrand vanishes.
pub fn bilinear_tube_integral_in<A, B, E>(
    t1: &A,
    t2: &B,
    p: f64,
    ball: f64,
    spec: &SampleSpec,
    exec: &E,
) -> Result<Estimate>
where
    A: TubeFamily + ?Sized,
    B: TubeFamily + ?Sized,
    E: ShardExecutor,
{
    if !(p > 0.0) {
        return Err(Error::Infeasible(alloc::format!("exponent p must be positive, got {p}")));
    }
    let (Some(b1), Some(b2)) = (t1.bbox(), t2.bbox()) else {
        return Err(Error::EmptyFamily);
    };
    let mut region = b1.intersect(&b2).intersect(&koranyi_ball_box(ball));
    if let Some(r) = spec.region {
        region = region.intersect(&r);
    }
    if region.is_empty() {
        return Ok(Estimate::ZERO);
    }
    let ball4 = ball * ball * ball * ball;
    let f = |x: [f64; 3]| {
        let q = HPoint::new(x[0], x[1], x[2]);
        if q.norm4() > ball4 {
            return 0.0;
        }
        let m1 = t1.multiplicity(&q);
        if m1 == 0 {
            return 0.0;
        }
        let m2 = t2.multiplicity(&q);
        if m2 == 0 {
            return 0.0;
        }
        math::powf(m1 as f64 * m2 as f64, p)
    };
    Ok(match spec.mode {
        SampleMode::MonteCarlo { samples } => sampling::mc_integrate_3d(exec, &region, samples, spec.seed, f),
        SampleMode::Grid { resolution } => sampling::grid_integrate_3d(exec, &region, resolution, f),
    })
}

/// `#{f : |f(s) − y| ≤ δ}`.
pub fn curve_multiplicity(family: &[Quadratic], delta: f64, s: f64, y: f64) -> u32 {
    family.iter().filter(|f| math::abs(f.eval(s) - y) <= delta).count() as u32
}

const UNIT_SQUARE: AxisBox = AxisBox::new([0.0, 0.0, 0.0], [1.0, 1.0, 0.0]);

/// `∫ (Σχ_{f^δ})^p (Σχ_{g^δ})^p` over `[0, 1]²` (or the first two axes of
/// `spec.region`). Grid mode sweeps columns and fills per-row multiplicities
/// with difference arrays, so its cost is `columns × (#F + #G + rows)`.
pub fn bilinear_curve_integral<E: ShardExecutor>(
    f: &[Quadratic],
    g: &[Quadratic],
    delta: f64,
    p: f64,
    spec: &SampleSpec,
    exec: &E,
) -> Result<Estimate> {
    if !(p > 0.0) {
        return Err(Error::Infeasible(alloc::format!("exponent p must be positive, got {p}")));
    }
    if f.is_empty() || g.is_empty() {
        return Ok(Estimate::ZERO);
    }
    let region = spec.region.unwrap_or(UNIT_SQUARE);
    if region.area() == 0.0 {
        return Ok(Estimate::ZERO);
    }
    Ok(match spec.mode {
        SampleMode::MonteCarlo { samples } => sampling::mc_integrate_2d(exec, &region, samples, spec.seed, |x| {
            let m1 = curve_multiplicity(f, delta, x[0], x[1]);
            if m1 == 0 {
                return 0.0;
            }
            let m2 = curve_multiplicity(g, delta, x[0], x[1]);
            math::powf(m1 as f64 * m2 as f64, p)
        }),
        SampleMode::Grid { resolution } => grid_curve_integral(f, g, delta, p, &region, resolution, exec),
    })
}

fn grid_curve_integral<E: ShardExecutor>(
    f: &[Quadratic],
    g: &[Quadratic],
    delta: f64,
    p: f64,
    region: &AxisBox,
    resolution: f64,
    exec: &E,
) -> Estimate {
    let cols = (math::ceil((region.hi[0] - region.lo[0]) / resolution) as usize).max(1);
    let rows = (math::ceil((region.hi[1] - region.lo[1]) / resolution) as usize).max(1);
    let hx = (region.hi[0] - region.lo[0]) / cols as f64;
    let hy = (region.hi[1] - region.lo[1]) / rows as f64;
    let y0 = region.lo[1] + 0.5 * hy;

    // Adds +1 on rows whose centre lies within δ of the curve value.
    let fill = |family: &[Quadratic], s: f64, diff: &mut [i32]| {
        for q in family {
            let v = q.eval(s);
            let lo = math::ceil((v - delta - y0) / hy);
            let hi = math::floor((v + delta - y0) / hy);
            if hi < 0.0 || lo > (rows - 1) as f64 || lo > hi {
                continue;
            }
            let mut lo = lo.max(0.0) as usize;
            let mut hi = hi.min((rows - 1) as f64) as usize;
            // Guard the rounding at the band edges with an exact test.
            while lo <= hi && math::abs(v - (y0 + lo as f64 * hy)) > delta {
                lo += 1;
            }
            while hi >= lo && math::abs(v - (y0 + hi as f64 * hy)) > delta {
                if hi == 0 {
                    break;
                }
                hi -= 1;
            }
            if lo <= hi && math::abs(v - (y0 + hi as f64 * hy)) <= delta {
                diff[lo] += 1;
                diff[hi + 1] -= 1;
            }
        }
    };

    let parts = exec.map_shards(cols, |i| {
        let s = region.lo[0] + (i as f64 + 0.5) * hx;
        let mut df = vec![0i32; rows + 1];
        let mut dg = vec![0i32; rows + 1];
        fill(f, s, &mut df);
        fill(g, s, &mut dg);
        let (mut mf, mut mg) = (0i32, 0i32);
        let mut acc = CompensatedSum::default();
        for r in 0..rows {
            mf += df[r];
            mg += dg[r];
            if mf > 0 && mg > 0 {
                acc.add(math::powf(mf as f64 * mg as f64, p));
            }
        }
        acc.value()
    });
    let mut total = CompensatedSum::default();
    for v in parts {
        total.add(v);
    }
    Estimate { value: total.value() * hx * hy, stderr: 0.0, evaluations: (cols * rows) as u64 }
}

/// Which right-hand side [`rhs_bilinear`] evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RhsForm {
    /// `δ⁴ (n1^p n2^p + n1 + n2)`.
    Tube,
    /// `ρ^{−1/2} δ^{3/2} (n1^p n2^p + n1 + n2)`.
    Curve,
    /// `δ⁴ n1^{3/4} n2^{3/4}`.
    Naive,
}

pub fn rhs_bilinear(n1: usize, n2: usize, delta: f64, p: f64, form: RhsForm, rho: f64) -> f64 {
    let (a, b) = (n1 as f64, n2 as f64);
    let mixed = math::powf(a, p) * math::powf(b, p) + a + b;
    match form {
        RhsForm::Tube => math::powf(delta, 4.0) * mixed,
        RhsForm::Curve => math::powf(rho, -0.5) * math::powf(delta, 1.5) * mixed,
        RhsForm::Naive => math::powf(delta, 4.0) * math::powf(a, 0.75) * math::powf(b, 0.75),
    }
}

/// Least-squares line through `(ln δ, ln value)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExponentFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub points: Vec<(f64, f64)>,
}

pub fn fit_exponent(points: &[(f64, f64)]) -> Result<ExponentFit> {
    if points.len() < 3 {
        return Err(Error::TooFewPoints(points.len()));
    }
    let mut logs = Vec::with_capacity(points.len());
    for &(delta, value) in points {
        if !(value > 0.0) || !(delta > 0.0) {
            return Err(Error::NonPositiveValue { delta, value });
        }
        logs.push((math::ln(delta), math::ln(value)));
    }
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = logs.iter().map(|p| (p.1 - my) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::Infeasible(alloc::string::String::from("all deltas coincide")));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy == 0.0 { 1.0 } else { (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0) };
    Ok(ExponentFit { slope, intercept, r_squared, points: logs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions;
    use crate::curves::Interval;
    use crate::heis::HDirection;
    use crate::sampling::{shard_rng, Sequential};
    use crate::tube::HTube;

    /// Runs shards back to front, then restores index order.
    struct Reversed;

    impl ShardExecutor for Reversed {
        fn map_shards<T, F>(&self, count: usize, f: F) -> Vec<T>
        where
            T: Send,
            F: Fn(usize) -> T + Sync,
        {
            let mut out: Vec<T> = (0..count).rev().map(f).collect();
            out.reverse();
            out
        }
    }

    fn cross(delta: f64) -> (Vec<HTube>, Vec<HTube>) {
        (
            vec![HTube::new(HPoint::IDENTITY, HDirection::E1, delta).unwrap()],
            vec![HTube::new(HPoint::IDENTITY, HDirection::E2, delta).unwrap()],
        )
    }

    #[test]
    fn fit_examples() {
        let pts: Vec<(f64, f64)> = (3..8).map(|k| 0.5f64.powi(k)).map(|d| (d, d * d)).collect();
        let fit = fit_exponent(&pts).unwrap();
        assert!((fit.slope - 2.0).abs() < 1e-12 && (fit.r_squared - 1.0).abs() < 1e-12);
        let pts: Vec<(f64, f64)> = (3..8).map(|k| (0.5f64.powi(k), 7.0)).collect();
        assert!(fit_exponent(&pts).unwrap().slope.abs() < 1e-12);
        assert!(matches!(fit_exponent(&pts[..2]), Err(Error::TooFewPoints(2))));
        let bad = [(0.5, 1.0), (0.25, 0.0), (0.125, 1.0)];
        assert!(matches!(fit_exponent(&bad), Err(Error::NonPositiveValue { delta, .. }) if delta == 0.25));
    }

    #[test]
    fn rhs_examples() {
        let d = 0.1f64;
        assert!((rhs_bilinear(1, 1, d, 0.75, RhsForm::Tube, 1.0) - 3.0 * d.powi(4)).abs() < 1e-18);
        let (rho, delta) = (0.25f64, 1.0 / 64.0);
        let n = (rho / delta).powi(3).round() as usize;
        let v = rhs_bilinear(n, n, delta, 0.75, RhsForm::Curve, rho);
        let lead = rho.powf(-0.5) * delta.powf(1.5) * (rho / delta).powf(4.5);
        assert!(v >= lead && v <= 1.05 * lead);
        assert!(rhs_bilinear(10, 20, d, 0.75, RhsForm::Tube, 1.0) < rhs_bilinear(11, 20, d, 0.75, RhsForm::Tube, 1.0));
        for (a, b) in [(1, 1), (5, 90), (1000, 3)] {
            assert!(rhs_bilinear(a, b, d, 0.75, RhsForm::Naive, 1.0) <= rhs_bilinear(a, b, d, 0.75, RhsForm::Tube, 1.0));
        }
    }

    #[test]
    fn disjoint_supports_integrate_to_zero() {
        let t1 = vec![HTube::new(HPoint::IDENTITY, HDirection::E1, 0.1).unwrap()];
        let t2 = vec![HTube::new(HPoint::new(1.5, 1.5, 0.0), HDirection::E2, 0.1).unwrap()];
        let v = bilinear_tube_integral(&t1, &t2, 0.75, &SampleSpec::monte_carlo(10_000, 1), &Sequential).unwrap();
        assert_eq!(v.value, 0.0);
    }

    #[test]
    fn singleton_integral_is_the_intersection_volume() {
        let delta = 1.0 / 16.0;
        let (t1, t2) = cross(delta);
        let spec = SampleSpec::monte_carlo(200_000, 9);
        let a = bilinear_tube_integral(&t1, &t2, 0.75, &spec, &Sequential).unwrap();
        let b = crate::tube::tube_intersection_volume(&t1[0], &t2[0], &spec, &Sequential);
        assert_eq!(a.value, b.value);
        let ratio = a.value / delta.powi(4);
        assert!(ratio > 0.1 && ratio < 10.0, "{ratio}");
    }

    #[test]
    fn results_do_not_depend_on_shard_order() {
        let (t1, t2) = constructions::build_bush(1.0 / 16.0).unwrap();
        let spec = SampleSpec::monte_carlo(100_000, 3);
        let a = bilinear_tube_integral(&t1, &t2, 0.75, &spec, &Sequential).unwrap();
        let b = bilinear_tube_integral(&t1, &t2, 0.75, &spec, &Reversed).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert_eq!(a.stderr.to_bits(), b.stderr.to_bits());
        let pair = constructions::build_opposed_pair(1.0 / 64.0, 1.0).unwrap();
        let g1 = bilinear_curve_integral(&pair.f, &pair.g, 1.0 / 64.0, 0.75, &SampleSpec::grid(1.0 / 256.0), &Sequential).unwrap();
        let g2 = bilinear_curve_integral(&pair.f, &pair.g, 1.0 / 64.0, 0.75, &SampleSpec::grid(1.0 / 256.0), &Reversed).unwrap();
        assert_eq!(g1.value.to_bits(), g2.value.to_bits());
    }

    #[test]
    fn identical_curve_gives_strip_area() {
        // f(s) = s/2 + 1/4 stays inside the square; the band {|y − f| ≤ δ}
        // has area 2δ over s ∈ [0, 1].
        let f = [Quadratic::new(0.0, 0.5, 0.25)];
        let delta = 1.0 / 32.0;
        let v = bilinear_curve_integral(&f, &f, delta, 1.0, &SampleSpec::grid(delta / 16.0), &Sequential).unwrap();
        assert!((v.value - 2.0 * delta).abs() < 1e-3 * delta, "{}", v.value);
        // Curved: arclength-free vertical band area is still 2δ per unit s.
        let f = [Quadratic::new(0.6, -0.2, 0.4)];
        let v = bilinear_curve_integral(&f, &f, delta, 1.0, &SampleSpec::grid(delta / 16.0), &Sequential).unwrap();
        assert!((v.value - 2.0 * delta).abs() < 2e-3 * delta, "{}", v.value);
    }

    #[test]
    fn grid_and_monte_carlo_agree() {
        let mut rng = shard_rng(30, 0);
        for i in 0..10 {
            let mut fam = |center: f64| -> Vec<Quadratic> {
                (0..5)
                    .map(|_| {
                        Quadratic::new(
                            center + sampling::uniform(&mut rng, -0.3, 0.3),
                            sampling::uniform(&mut rng, -0.3, 0.3),
                            0.5 + sampling::uniform(&mut rng, -0.2, 0.2),
                        )
                    })
                    .collect()
            };
            let f = fam(1.0);
            let g = fam(-1.0);
            let delta = 0.05;
            let grid = bilinear_curve_integral(&f, &g, delta, 0.75, &SampleSpec::grid(delta / 32.0), &Sequential).unwrap();
            let mc = bilinear_curve_integral(&f, &g, delta, 0.75, &SampleSpec::monte_carlo(400_000, i), &Sequential).unwrap();
            assert!(
                (grid.value - mc.value).abs() <= 3.0 * mc.stderr + 1e-3 * grid.value,
                "config {i}: grid {} mc {} ± {}",
                grid.value,
                mc.value,
                mc.stderr
            );
        }
    }

    #[test]
    fn larger_exponent_dominates_when_multiplicity_is_at_least_one() {
        let pair = constructions::build_bipartite_balls(1.0 / 32.0, 0.25).unwrap();
        let spec = SampleSpec::grid(1.0 / 128.0);
        let lo = bilinear_curve_integral(&pair.f, &pair.g, 1.0 / 32.0, 0.5, &spec, &Sequential).unwrap();
        let hi = bilinear_curve_integral(&pair.f, &pair.g, 1.0 / 32.0, 1.0, &spec, &Sequential).unwrap();
        assert!(lo.value <= hi.value);
    }

    #[test]
    fn opposed_pair_area_scales() {
        let mut pts = Vec::new();
        for k in 4..=8 {
            let delta = 0.5f64.powi(k);
            let pair = constructions::build_opposed_pair(delta, 1.0).unwrap();
            let v = bilinear_curve_integral(&pair.f, &pair.g, delta, 0.75, &SampleSpec::grid(delta / 4.0), &Sequential).unwrap();
            pts.push((delta, v.value));
        }
        let fit = fit_exponent(&pts).unwrap();
        assert!((fit.slope - 1.5).abs() < 0.1, "{}", fit.slope);
    }

    #[test]
    fn planar_window_constant() {
        assert_eq!(Interval::PLANAR.quarter(), Interval::new(-1.25, 1.25));
    }
}
