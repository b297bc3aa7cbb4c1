//! Planar vectors and 2×2 operators.

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Determinant magnitude below which a matrix is treated as singular.
pub const SINGULAR_DET_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn from_polar(r: f64, angle: f64) -> Self {
        Self::new(r * angle.cos(), r * angle.sin())
    }

    pub fn dot(self, other: Vec2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 3d cross product.
    pub fn cross(self, other: Vec2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn norm_squared(self) -> f64 {
        self.dot(self)
    }

    pub fn angle(self) -> f64 {
        self.y.atan2(self.x)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// Unit vector in the same direction, or `None` for the zero vector.
    pub fn normalized(self) -> Option<Vec2> {
        let n = self.norm();
        (n > 0.0).then(|| self * (1.0 / n))
    }

    pub fn lerp(self, other: Vec2, s: f64) -> Vec2 {
        self + (other - self) * s
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl AddAssign for Vec2 {
    fn add_assign(&mut self, rhs: Vec2) {
        self.x += rhs.x;
        self.y += rhs.y;
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, s: f64) -> Vec2 {
        Vec2::new(self.x * s, self.y * s)
    }
}

impl Mul<Vec2> for f64 {
    type Output = Vec2;
    fn mul(self, v: Vec2) -> Vec2 {
        v * self
    }
}

/// Positive (counter-clockwise) quarter turn.
pub fn rot90(v: Vec2) -> Vec2 {
    Vec2::new(-v.y, v.x)
}

/// Row-major 2×2 matrix `[a11 a12; a21 a22]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2 {
    pub a11: f64,
    pub a12: f64,
    pub a21: f64,
    pub a22: f64,
}

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2::new(1.0, 0.0, 0.0, 1.0);
    /// The quarter-turn rotation.
    pub const J: Mat2 = Mat2::new(0.0, -1.0, 1.0, 0.0);

    pub const fn new(a11: f64, a12: f64, a21: f64, a22: f64) -> Self {
        Self { a11, a12, a21, a22 }
    }

    pub fn det(&self) -> f64 {
        self.a11 * self.a22 - self.a12 * self.a21
    }

    pub fn apply(&self, v: Vec2) -> Vec2 {
        Vec2::new(
            self.a11 * v.x + self.a12 * v.y,
            self.a21 * v.x + self.a22 * v.y,
        )
    }

    pub fn mul_mat(&self, o: &Mat2) -> Mat2 {
        Mat2::new(
            self.a11 * o.a11 + self.a12 * o.a21,
            self.a11 * o.a12 + self.a12 * o.a22,
            self.a21 * o.a11 + self.a22 * o.a21,
            self.a21 * o.a12 + self.a22 * o.a22,
        )
    }

    pub fn sub_mat(&self, o: &Mat2) -> Mat2 {
        Mat2::new(
            self.a11 - o.a11,
            self.a12 - o.a12,
            self.a21 - o.a21,
            self.a22 - o.a22,
        )
    }

    pub fn is_conformal(&self) -> bool {
        self.a11 == self.a22 && self.a12 == -self.a21
    }

    pub fn is_finite(&self) -> bool {
        [self.a11, self.a12, self.a21, self.a22]
            .iter()
            .all(|v| v.is_finite())
    }

    /// Both singular values, largest first.
    ///
    /// Closed form: with `p = |(a11+a22, a21-a12)|` and `q = |(a11-a22, a21+a12)|`
    /// the singular values are `(p+q)/2` and `|p-q|/2`.
    pub fn singular_values(&self) -> (f64, f64) {
        let p = (self.a11 + self.a22).hypot(self.a21 - self.a12);
        let q = (self.a11 - self.a22).hypot(self.a21 + self.a12);
        (0.5 * (p + q), 0.5 * (p - q).abs())
    }

    pub fn inverse(&self) -> Result<Mat2> {
        inverse(self)
    }
}

/// `αI + βJ = [α −β; β α]`.
pub fn conformal(alpha: f64, beta: f64) -> Mat2 {
    Mat2::new(alpha, -beta, beta, alpha)
}

/// Largest singular value.
pub fn operator_norm(m: &Mat2) -> f64 {
    m.singular_values().0
}

pub fn inverse(m: &Mat2) -> Result<Mat2> {
    let det = m.det();
    if !(det.abs() > SINGULAR_DET_TOL) {
        return Err(Error::SingularMatrix { det });
    }
    let inv = 1.0 / det;
    Ok(Mat2::new(
        m.a22 * inv,
        -m.a12 * inv,
        -m.a21 * inv,
        m.a11 * inv,
    ))
}
