use hkakeya::curves::{self, comparable, is_tangent_containment, is_tangent_jet, tau, CurviRect, Interval, Quadratic};
use hkakeya::heis::{HDirection, HPoint};
use hkakeya::incidence::quad_broadness;
use hkakeya::projection::{sample_koranyi_ball, tube_to_curve};
use hkakeya::sampling::{shard_rng, uniform, RngCore};
use hkakeya::tube::{line_broadness, Line, ProbeSpec};
use hkakeya::HTube;
use proptest::prelude::*;

fn pt() -> impl Strategy<Value = HPoint> {
    (-3.0f64..3.0, -3.0f64..3.0, -3.0f64..3.0).prop_map(|(x, y, t)| HPoint::new(x, y, t))
}

proptest! {
    #[test]
    fn identity_and_inverse(p in pt()) {
        prop_assert_eq!(p * HPoint::IDENTITY, p);
        prop_assert_eq!(HPoint::IDENTITY * p, p);
        let e = p * p.inv();
        prop_assert!(e.x.abs() < 1e-12 && e.y.abs() < 1e-12 && e.t.abs() < 1e-12);
    }

    #[test]
    fn distance_is_left_invariant(p in pt(), q in pt(), g in pt()) {
        let d = p.koranyi_dist(&q);
        let dg = (g * p).koranyi_dist(&(g * q));
        prop_assert!((d - dg).abs() <= 1e-9 * (1.0 + d));
    }

    #[test]
    fn triangle_inequality(p in pt(), q in pt(), r in pt()) {
        let lhs = p.koranyi_dist(&r);
        let rhs = p.koranyi_dist(&q) + q.koranyi_dist(&r);
        prop_assert!(lhs <= rhs + 1e-9 * (1.0 + rhs));
    }
}

/// Normalised jet box around `center` at `s`: value, slope and curvature
/// offsets of at most `c` units `(δ, √(δt), t)`.
fn jet_offset(rng: &mut impl RngCore, c: f64, delta: f64, t: f64) -> [f64; 3] {
    [
        uniform(rng, -c, c) * delta,
        uniform(rng, -c, c) * (delta * t).sqrt(),
        uniform(rng, -c, c) * t,
    ]
}

#[test]
fn comparability_is_transitive_with_the_jet_constant() {
    let c = 10.0;
    let wide = 2.0 * (c + c * c / 2.0 + c * c * c / 8.0);
    let mut rng = shard_rng(11, 0);
    for _ in 0..10_000 {
        let delta = 2f64.powf(uniform(&mut rng, -10.0, -4.0));
        let t = 2f64.powf(uniform(&mut rng, delta.log2(), 0.0));
        let len = (delta / t).sqrt();
        let g2 = Quadratic::new(uniform(&mut rng, -2.0, 2.0), uniform(&mut rng, -2.0, 2.0), uniform(&mut rng, -2.0, 2.0));
        let m2 = uniform(&mut rng, -1.0, 1.0);
        let m1 = m2 + uniform(&mut rng, -c, c) * len;
        let m3 = m2 + uniform(&mut rng, -c, c) * len;
        let g1 = g2.add(&Quadratic::from_jet(0.5 * (m1 + m2), jet_offset(&mut rng, c, delta, t)));
        let g3 = g2.add(&Quadratic::from_jet(0.5 * (m2 + m3), jet_offset(&mut rng, c, delta, t)));
        let r1 = CurviRect::scaled(g1, m1, delta, t);
        let r2 = CurviRect::scaled(g2, m2, delta, t);
        let r3 = CurviRect::scaled(g3, m3, delta, t);
        if comparable(&r1, &r2, c).unwrap() && comparable(&r2, &r3, c).unwrap() {
            assert!(comparable(&r1, &r3, wide).unwrap());
        }
    }
}

#[test]
fn four_c_transitivity_fails_for_far_midpoints() {
    // Midpoints almost C units either side of R2, slopes at the limit: at
    // the joint midpoint the value gap is about C²δ, beyond 4Cδ.
    let (c, delta, t): (f64, f64, f64) = (10.0, 1.0 / 256.0, 1.0 / 16.0);
    let len = (delta / t).sqrt();
    let slope = 0.99 * c * (delta * t).sqrt();
    let g2 = Quadratic::ZERO;
    let (m1, m3) = (-0.99 * c * len, 0.99 * c * len);
    let g1 = Quadratic::from_jet(0.5 * m1, [0.0, slope, 0.0]);
    let g3 = Quadratic::from_jet(0.5 * m3, [0.0, slope, 0.0]);
    let r1 = CurviRect::scaled(g1, m1, delta, t);
    let r2 = CurviRect::scaled(g2, 0.0, delta, t);
    let r3 = CurviRect::scaled(g3, m3, delta, t);
    assert!(comparable(&r1, &r2, c).unwrap() && comparable(&r2, &r3, c).unwrap());
    assert!(!comparable(&r1, &r3, 4.0 * c).unwrap());
}

#[test]
fn tangency_propagates_to_coarser_rectangles() {
    let mut rng = shard_rng(12, 0);
    for _ in 0..10_000 {
        let delta = 2f64.powf(uniform(&mut rng, -10.0, -3.0));
        let sigma = 2f64.powf(uniform(&mut rng, delta.log2(), -1.0));
        let t = 2f64.powf(uniform(&mut rng, sigma.log2(), 0.0));
        let g = Quadratic::new(uniform(&mut rng, -2.0, 2.0), uniform(&mut rng, -2.0, 2.0), 0.0);
        let mid = uniform(&mut rng, -1.0, 1.0);
        let f = g.add(&Quadratic::from_jet(mid, jet_offset(&mut rng, 4.0, delta, t)));
        let fine = CurviRect::scaled(g, mid, delta, t);
        let coarse = CurviRect::scaled(g, mid, sigma, t);
        if is_tangent_jet(&f, &fine, 4.0).unwrap() {
            assert!(is_tangent_jet(&f, &coarse, 4.0).unwrap());
        }
    }
}

#[test]
fn unit_jet_tangency_implies_containment() {
    let mut rng = shard_rng(13, 0);
    for _ in 0..10_000 {
        let delta = 2f64.powf(uniform(&mut rng, -10.0, -3.0));
        let t = 2f64.powf(uniform(&mut rng, delta.log2(), 0.0));
        let g = Quadratic::new(uniform(&mut rng, -2.0, 2.0), uniform(&mut rng, -2.0, 2.0), uniform(&mut rng, -1.0, 1.0));
        let mid = uniform(&mut rng, -1.0, 1.0);
        let f = g.add(&Quadratic::from_jet(mid, jet_offset(&mut rng, 1.0, delta, t)));
        let r = CurviRect::scaled(g, mid, delta, t);
        assert!(is_tangent_jet(&f, &r, 1.0).unwrap());
        assert!(is_tangent_containment(&f, &r, 4.0));
    }
}

#[test]
fn opposed_curvatures_are_two_apart() {
    let mut rng = shard_rng(14, 0);
    for _ in 0..10_000 {
        let f = Quadratic::new(uniform(&mut rng, 1.0, 3.0), uniform(&mut rng, -3.0, 3.0), uniform(&mut rng, -3.0, 3.0));
        let g = Quadratic::new(uniform(&mut rng, -3.0, -1.0), uniform(&mut rng, -3.0, 3.0), uniform(&mut rng, -3.0, 3.0));
        let d = tau(&f, &g, &Interval::PLANAR);
        assert!(d >= (f.a - g.a).abs() && d >= 2.0);
    }
}

#[test]
fn near_intersection_sets_have_at_most_two_pieces() {
    let mut rng = shard_rng(15, 0);
    let window = Interval::PLANAR.quarter();
    for _ in 0..10_000 {
        let q = |rng: &mut _| Quadratic::new(uniform(rng, -3.0, 3.0), uniform(rng, -3.0, 3.0), uniform(rng, -1.0, 1.0));
        let (f, g) = (q(&mut rng), q(&mut rng));
        let delta = 2f64.powf(uniform(&mut rng, -10.0, 0.0));
        assert!(curves::near_intersection_intervals(&f, &g, delta, &window).len() <= 2);
    }
}

fn near_axis_tube(rng: &mut impl RngCore, axis_angle: f64, dev: f64) -> HTube {
    let center = sample_koranyi_ball(rng, 0.5);
    HTube::new(center, HDirection::from_angle(axis_angle + uniform(rng, -dev, dev)), 1.0 / 64.0).unwrap()
}

#[test]
fn projected_transversal_tubes_are_bipartite() {
    let mut rng = shard_rng(16, 0);
    for _ in 0..10_000 {
        let f1 = tube_to_curve(&near_axis_tube(&mut rng, 0.0, 0.05)).unwrap().to_quadratic();
        let f2 = tube_to_curve(&near_axis_tube(&mut rng, std::f64::consts::FRAC_PI_2, 0.05)).unwrap().to_quadratic();
        let planar = tau(&f1, &f2, &Interval::PLANAR);
        assert!((1.0..=100.0).contains(&planar), "{planar}");
        assert!(tau(&f1, &f2, &Interval::PROJECTED) >= 1.0);
    }
}

#[test]
fn broadness_survives_projection() {
    let delta = 1.0 / 16.0;
    let n = (std::f64::consts::FRAC_PI_2 / (delta * delta)) as usize;
    let fan: Vec<Line> =
        (0..=n).map(|i| Line { point: HPoint::IDENTITY, dir: HDirection::from_angle(i as f64 * delta * delta) }).collect();
    let projected: Vec<Quadratic> =
        fan.iter().map(|l| tube_to_curve(&l.tube(delta)).unwrap().to_quadratic()).collect();
    let probes = ProbeSpec::default();
    for alpha in [0.25, 0.5, 1.0] {
        let lines = line_broadness(&fan, delta, alpha, &probes).unwrap();
        let quads = quad_broadness(&projected, delta * delta, alpha, &probes).unwrap();
        assert!(quads.worst_ratio <= 16.0 * lines.worst_ratio.max(1.0), "alpha {alpha}: {} vs {}", quads.worst_ratio, lines.worst_ratio);
    }
}
