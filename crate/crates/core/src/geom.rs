//! Planar vectors and similarity maps.
//!
//! Points are treated as complex numbers where convenient: a similarity of
//! the plane is `z ↦ p + q·z` (orientation preserving) or `z ↦ p + q·z̄`
//! (mirrored), with `q` carrying both scale and rotation.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };
    pub const ONE: Vec2 = Vec2 { x: 1.0, y: 0.0 };

    #[inline]
    pub const fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    #[inline]
    pub fn from_polar(radius: f64, angle: f64) -> Self {
        Vec2::new(radius * angle.cos(), radius * angle.sin())
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    #[inline]
    pub fn norm_sq(self) -> f64 {
        self.x * self.x + self.y * self.y
    }

    #[inline]
    pub fn dist(self, other: Vec2) -> f64 {
        (self - other).norm()
    }

    #[inline]
    pub fn dot(self, other: Vec2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    #[inline]
    pub fn angle(self) -> f64 {
        self.y.atan2(self.x)
    }

    #[inline]
    pub fn conj(self) -> Self {
        Vec2::new(self.x, -self.y)
    }

    /// Complex product.
    #[inline]
    pub fn cmul(self, o: Vec2) -> Self {
        Vec2::new(self.x * o.x - self.y * o.y, self.x * o.y + self.y * o.x)
    }

    /// Complex quotient. The divisor must be nonzero.
    #[inline]
    pub fn cdiv(self, o: Vec2) -> Self {
        let d = o.norm_sq();
        Vec2::new(
            (self.x * o.x + self.y * o.y) / d,
            (self.y * o.x - self.x * o.y) / d,
        )
    }

    #[inline]
    pub fn lerp(self, other: Vec2, s: f64) -> Self {
        self + (other - self) * s
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    #[inline]
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl AddAssign for Vec2 {
    #[inline]
    fn add_assign(&mut self, o: Vec2) {
        self.x += o.x;
        self.y += o.y;
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    #[inline]
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    #[inline]
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    #[inline]
    fn mul(self, s: f64) -> Vec2 {
        Vec2::new(self.x * s, self.y * s)
    }
}

impl fmt::Display for Vec2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// A similarity transform of the plane.
///
/// `linear` is the complex multiplier (its modulus is the scale, its argument
/// the rotation); when `mirrored` is set the input is conjugated first.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Similarity {
    pub linear: Vec2,
    pub mirrored: bool,
    pub translation: Vec2,
}

impl Similarity {
    pub const IDENTITY: Similarity = Similarity {
        linear: Vec2::ONE,
        mirrored: false,
        translation: Vec2::ZERO,
    };

    /// The similarity taking `(0,0)` to `start` and `(1,0)` to `end`.
    pub fn from_segment(start: Vec2, end: Vec2, mirrored: bool) -> Self {
        Similarity {
            linear: end - start,
            mirrored,
            translation: start,
        }
    }

    #[inline]
    pub fn apply(&self, z: Vec2) -> Vec2 {
        let z = if self.mirrored { z.conj() } else { z };
        self.translation + self.linear.cmul(z)
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Similarity) -> Similarity {
        let inner_linear = if self.mirrored {
            other.linear.conj()
        } else {
            other.linear
        };
        Similarity {
            linear: self.linear.cmul(inner_linear),
            mirrored: self.mirrored ^ other.mirrored,
            translation: self.apply(other.translation),
        }
    }

    pub fn inverse(&self) -> Similarity {
        if self.mirrored {
            let lc = self.linear.conj();
            Similarity {
                linear: Vec2::ONE.cdiv(lc),
                mirrored: true,
                translation: -self.translation.conj().cdiv(lc),
            }
        } else {
            Similarity {
                linear: Vec2::ONE.cdiv(self.linear),
                mirrored: false,
                translation: -self.translation.cdiv(self.linear),
            }
        }
    }

    #[inline]
    pub fn scale(&self) -> f64 {
        self.linear.norm()
    }

    /// Rotation angle in radians, in `(-π, π]`.
    #[inline]
    pub fn rotation(&self) -> f64 {
        self.linear.angle()
    }

    /// The linear part as a row-major 2×2 matrix.
    pub fn matrix(&self) -> [[f64; 2]; 2] {
        let Vec2 { x: a, y: b } = self.linear;
        if self.mirrored {
            [[a, b], [b, -a]]
        } else {
            [[a, -b], [b, a]]
        }
    }

    pub fn determinant(&self) -> f64 {
        let m = self.matrix();
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }
}

/// Axis-aligned bounding box.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bounds {
    pub min: Vec2,
    pub max: Vec2,
}

impl Bounds {
    /// The empty box; the first `include` makes it a point.
    pub const EMPTY: Bounds = Bounds {
        min: Vec2::new(f64::INFINITY, f64::INFINITY),
        max: Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY),
    };

    pub fn from_points(points: impl IntoIterator<Item = Vec2>) -> Self {
        let mut b = Bounds::EMPTY;
        for p in points {
            b.include(p);
        }
        b
    }

    pub fn include(&mut self, p: Vec2) {
        self.min = Vec2::new(self.min.x.min(p.x), self.min.y.min(p.y));
        self.max = Vec2::new(self.max.x.max(p.x), self.max.y.max(p.y));
    }

    pub fn is_empty(&self) -> bool {
        !(self.min.x <= self.max.x && self.min.y <= self.max.y)
    }

    pub fn width(&self) -> f64 {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> f64 {
        self.max.y - self.min.y
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn diagonal(&self) -> f64 {
        self.min.dist(self.max)
    }

    pub fn center(&self) -> Vec2 {
        self.min.lerp(self.max, 0.5)
    }

    /// Grow every side by `margin`.
    pub fn pad(&self, margin: f64) -> Self {
        let m = Vec2::new(margin, margin);
        Bounds {
            min: self.min - m,
            max: self.max + m,
        }
    }

    /// Scale about the centre by `factor` in both directions.
    pub fn inflate(&self, factor: f64) -> Self {
        let c = self.center();
        let h = (self.max - c) * factor;
        Bounds {
            min: c - h,
            max: c + h,
        }
    }

    pub fn contains(&self, p: Vec2) -> bool {
        p.x >= self.min.x && p.x <= self.max.x && p.y >= self.min.y && p.y <= self.max.y
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Vec2, b: Vec2) -> bool {
        a.dist(b) < 1e-12
    }

    #[test]
    fn segment_map_hits_endpoints() {
        for &m in &[false, true] {
            let s = Similarity::from_segment(Vec2::new(0.5, 0.5), Vec2::new(1.0, 0.0), m);
            assert!(close(s.apply(Vec2::ZERO), Vec2::new(0.5, 0.5)));
            assert!(close(s.apply(Vec2::ONE), Vec2::new(1.0, 0.0)));
        }
    }

    #[test]
    fn compose_and_inverse() {
        let a = Similarity::from_segment(Vec2::new(0.2, -0.1), Vec2::new(0.7, 0.4), true);
        let b = Similarity::from_segment(Vec2::new(-1.0, 2.0), Vec2::new(0.3, 0.9), false);
        let p = Vec2::new(0.37, -0.81);
        assert!(close(a.compose(&b).apply(p), a.apply(b.apply(p))));
        assert!(close(b.compose(&a).apply(p), b.apply(a.apply(p))));
        for s in [a, b] {
            assert!(close(s.inverse().apply(s.apply(p)), p));
            assert!(close(s.compose(&s.inverse()).apply(p), p));
        }
    }

    #[test]
    fn matrix_columns_orthogonal_equal_norm() {
        for &m in &[false, true] {
            let s = Similarity::from_segment(Vec2::new(0.0, 0.0), Vec2::new(0.3, 0.4), m);
            let mat = s.matrix();
            let c0 = Vec2::new(mat[0][0], mat[1][0]);
            let c1 = Vec2::new(mat[0][1], mat[1][1]);
            assert!(c0.dot(c1).abs() < 1e-12);
            assert!((c0.norm() - 0.5).abs() < 1e-12);
            assert!((c1.norm() - 0.5).abs() < 1e-12);
            assert_eq!(s.determinant() < 0.0, m);
        }
    }
}
