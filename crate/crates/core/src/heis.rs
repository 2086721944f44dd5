//! The first Heisenberg group: `R³` with the twisted product
//! `(x, y, t)·(x', y', t') = (x + x', y + y', t + t' + ½(xy' − x'y))`,
//! the Korányi gauge `((x² + y²)² + 16t²)^{1/4}` and its left-invariant
//! metric `d(p, q) = ‖q⁻¹·p‖`.

use core::ops::Mul;

use crate::math;
use crate::{Error, Result};

/// A point of the Heisenberg group.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct HPoint {
    pub x: f64,
    pub y: f64,
    pub t: f64,
}

impl HPoint {
    pub const IDENTITY: HPoint = HPoint { x: 0.0, y: 0.0, t: 0.0 };

    pub const fn new(x: f64, y: f64, t: f64) -> Self {
        HPoint { x, y, t }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.t.is_finite()
    }

    /// Group product `self · other`.
    #[inline]
    pub fn mul(&self, other: &HPoint) -> HPoint {
        HPoint {
            x: self.x + other.x,
            y: self.y + other.y,
            t: self.t + other.t + 0.5 * (self.x * other.y - other.x * self.y),
        }
    }

    #[inline]
    pub fn inv(&self) -> HPoint {
        HPoint { x: -self.x, y: -self.y, t: -self.t }
    }

    /// Fourth power of the Korányi gauge. Comparing `norm4` values avoids the
    /// fourth root in hot membership loops.
    #[inline]
    pub fn norm4(&self) -> f64 {
        let h = self.x * self.x + self.y * self.y;
        h * h + 16.0 * self.t * self.t
    }

    #[inline]
    pub fn koranyi_norm(&self) -> f64 {
        math::sqrt(math::sqrt(self.norm4()))
    }

    /// `d(self, other) = ‖other⁻¹ · self‖`, evaluated in closed form.
    #[inline]
    pub fn koranyi_dist(&self, other: &HPoint) -> f64 {
        math::sqrt(math::sqrt(self.dist4(other)))
    }

    /// Fourth power of [`HPoint::koranyi_dist`].
    #[inline]
    pub fn dist4(&self, other: &HPoint) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        let dt = self.t - other.t + 0.5 * (self.x * other.y - other.x * self.y);
        let h = dx * dx + dy * dy;
        h * h + 16.0 * dt * dt
    }

    /// Homogeneous dilation `(λx, λy, λ²t)`.
    pub fn dilate(&self, lambda: f64) -> Result<HPoint> {
        if !(lambda > 0.0) {
            return Err(Error::NonPositiveDilation(lambda));
        }
        Ok(HPoint { x: lambda * self.x, y: lambda * self.y, t: lambda * lambda * self.t })
    }

    /// Horizontal coordinates as a pair.
    #[inline]
    pub fn horizontal(&self) -> (f64, f64) {
        (self.x, self.y)
    }
}

impl Mul for HPoint {
    type Output = HPoint;
    fn mul(self, rhs: HPoint) -> HPoint {
        HPoint::mul(&self, &rhs)
    }
}

pub fn group_mul(p: &HPoint, q: &HPoint) -> HPoint {
    p.mul(q)
}

pub fn group_inv(p: &HPoint) -> HPoint {
    p.inv()
}

pub fn koranyi_norm(p: &HPoint) -> f64 {
    p.koranyi_norm()
}

pub fn koranyi_dist(p: &HPoint, q: &HPoint) -> f64 {
    p.koranyi_dist(q)
}

pub fn dilate(lambda: f64, p: &HPoint) -> Result<HPoint> {
    p.dilate(lambda)
}

/// A horizontal unit direction `(a, b, 0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HDirection {
    a: f64,
    b: f64,
}

impl HDirection {
    pub const E1: HDirection = HDirection { a: 1.0, b: 0.0 };
    pub const E2: HDirection = HDirection { a: 0.0, b: 1.0 };

    /// Checked constructor; `a² + b²` must be 1 within `1e-12`.
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) || math::abs(a * a + b * b - 1.0) > 1e-12 {
            return Err(Error::NotUnit { a, b });
        }
        Ok(HDirection { a, b })
    }

    /// Normalizes `(a, b)`; fails on the zero vector.
    pub fn normalized(a: f64, b: f64) -> Result<Self> {
        let n = math::sqrt(a * a + b * b);
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::NotUnit { a, b });
        }
        Ok(HDirection { a: a / n, b: b / n })
    }

    /// Direction at angle `theta` (radians) from `e1`.
    pub fn from_angle(theta: f64) -> Self {
        HDirection { a: math::cos(theta), b: math::sin(theta) }
    }

    #[inline]
    pub fn a(&self) -> f64 {
        self.a
    }

    #[inline]
    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn angle(&self) -> f64 {
        math::atan2(self.b, self.a)
    }

    /// The group element `s·e = (sa, sb, 0)`.
    #[inline]
    pub fn scaled(&self, s: f64) -> HPoint {
        HPoint { x: s * self.a, y: s * self.b, t: 0.0 }
    }

    /// Euclidean distance `|e − e'|` between unit vectors.
    pub fn euclid_dist(&self, other: &HDirection) -> f64 {
        let da = self.a - other.a;
        let db = self.b - other.b;
        math::sqrt(da * da + db * db)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pt() -> impl Strategy<Value = HPoint> {
        (-3.0f64..3.0, -3.0f64..3.0, -3.0f64..3.0).prop_map(|(x, y, t)| HPoint::new(x, y, t))
    }

    #[test]
    fn group_law_examples() {
        let p = HPoint::new(3.0, 4.0, 5.0);
        assert_eq!(HPoint::IDENTITY * p, p);
        assert_eq!(HPoint::new(1.0, 0.0, 0.0) * HPoint::new(0.0, 1.0, 0.0), HPoint::new(1.0, 1.0, 0.5));
        assert_eq!(HPoint::new(1.0, 2.0, 3.0) * HPoint::new(-1.0, -2.0, -3.0), HPoint::IDENTITY);
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(group_inv(&HPoint::IDENTITY), HPoint::new(-0.0, -0.0, -0.0));
        assert_eq!(group_inv(&HPoint::new(1.0, 2.0, 3.0)), HPoint::new(-1.0, -2.0, -3.0));
        assert_eq!(group_inv(&HPoint::new(0.5, -0.25, 7.0)), HPoint::new(-0.5, 0.25, -7.0));
    }

    #[test]
    fn norm_examples() {
        assert_eq!(koranyi_norm(&HPoint::IDENTITY), 0.0);
        assert_eq!(koranyi_norm(&HPoint::new(1.0, 0.0, 0.0)), 1.0);
        assert_eq!(koranyi_norm(&HPoint::new(0.0, 0.0, 1.0)), 2.0);
    }

    #[test]
    fn dist_examples() {
        let p = HPoint::new(0.3, -1.0, 2.0);
        assert_eq!(koranyi_dist(&p, &p), 0.0);
        assert_eq!(koranyi_dist(&HPoint::IDENTITY, &HPoint::new(1.0, 0.0, 0.0)), 1.0);
        let a = HPoint::new(1.0, 0.0, 0.0);
        let b = HPoint::new(1.0, 1.0, 0.0);
        let composed = (b.inv() * a).koranyi_norm();
        assert!((koranyi_dist(&a, &b) - composed).abs() < 1e-12);
    }

    #[test]
    fn dilation_examples() {
        let p = HPoint::new(0.2, 0.7, -0.4);
        assert_eq!(dilate(1.0, &p).unwrap(), p);
        assert_eq!(dilate(2.0, &HPoint::new(1.0, 0.0, 1.0)).unwrap(), HPoint::new(2.0, 0.0, 4.0));
        assert!(matches!(dilate(0.0, &p), Err(Error::NonPositiveDilation(_))));
        assert!(dilate(-1.0, &p).is_err());
    }

    #[test]
    fn direction_validation() {
        assert!(HDirection::new(0.6, 0.8).is_ok());
        assert!(HDirection::new(0.6, 0.81).is_err());
        let d = HDirection::normalized(3.0, 4.0).unwrap();
        assert!((d.a() - 0.6).abs() < 1e-15);
        assert!(HDirection::normalized(0.0, 0.0).is_err());
    }

    proptest! {
        #[test]
        fn associativity(p in pt(), q in pt(), r in pt()) {
            let l = (p * q) * r;
            let rr = p * (q * r);
            prop_assert!((l.x - rr.x).abs() < 1e-10 && (l.y - rr.y).abs() < 1e-10 && (l.t - rr.t).abs() < 1e-10);
        }

        #[test]
        fn closed_form_distance_matches_composition(p in pt(), q in pt()) {
            let direct = p.koranyi_dist(&q);
            let composed = (q.inv() * p).koranyi_norm();
            prop_assert!((direct - composed).abs() <= 1e-12 * (1.0 + direct));
        }

        #[test]
        fn dilation_homogeneity(p in pt(), lambda in 0.01f64..50.0) {
            let lhs = p.dilate(lambda).unwrap().koranyi_norm();
            let rhs = lambda * p.koranyi_norm();
            prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.max(1e-300));
        }
    }
}
