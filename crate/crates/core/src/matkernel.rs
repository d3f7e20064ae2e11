//! Closed-form numerics for the 2×2 symmetric matrices that every
//! observability measure reduces to.
//!
//! An N×2 matrix `O` is never decomposed directly. Its singular values are
//! the square roots of the eigenvalues of the Gram matrix `OᵀO`, which is a
//! 2×2 symmetric positive semi-definite matrix with a closed-form spectrum.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

/// Relative threshold under which a negative eigenvalue is treated as rounding
/// noise and clamped to zero.
pub const NEG_EIG_CLAMP: f64 = 1e-12;

/// Absolute floor used when classifying the all-zero matrix.
pub const ABS_FLOOR: f64 = 1e-12;

/// A point or displacement in the plane, in meters.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    pub fn dot(self, other: Vec2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn is_zero(self) -> bool {
        self.x == 0.0 && self.y == 0.0
    }

    /// Rescales the vector so its norm does not exceed `limit`.
    pub fn clamp_norm(self, limit: f64) -> Vec2 {
        let n = self.norm();
        if n > limit && n > 0.0 {
            self * (limit / n)
        } else {
            self
        }
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, k: f64) -> Vec2 {
        Vec2::new(self.x * k, self.y * k)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

/// Symmetric 2×2 matrix `[a11 a12; a12 a22]`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Sym2 {
    pub a11: f64,
    pub a12: f64,
    pub a22: f64,
}

impl Sym2 {
    pub const ZERO: Sym2 = Sym2 { a11: 0.0, a12: 0.0, a22: 0.0 };
    pub const IDENTITY: Sym2 = Sym2 { a11: 1.0, a12: 0.0, a22: 1.0 };

    pub const fn new(a11: f64, a12: f64, a22: f64) -> Self {
        Sym2 { a11, a12, a22 }
    }

    pub fn scaled_identity(k: f64) -> Self {
        Sym2::new(k, 0.0, k)
    }

    /// Outer product `vᵀv` of a row vector.
    pub fn outer(v: Vec2) -> Self {
        Sym2::new(v.x * v.x, v.x * v.y, v.y * v.y)
    }

    pub fn trace(&self) -> f64 {
        self.a11 + self.a22
    }

    pub fn det(&self) -> f64 {
        self.a11 * self.a22 - self.a12 * self.a12
    }

    pub fn is_finite(&self) -> bool {
        self.a11.is_finite() && self.a12.is_finite() && self.a22.is_finite()
    }

    pub fn mul_vec(&self, v: Vec2) -> Vec2 {
        Vec2::new(self.a11 * v.x + self.a12 * v.y, self.a12 * v.x + self.a22 * v.y)
    }

    /// Quadratic form `vᵀ M v`.
    pub fn quad(&self, v: Vec2) -> f64 {
        v.dot(self.mul_vec(v))
    }
}

impl Add for Sym2 {
    type Output = Sym2;
    fn add(self, rhs: Sym2) -> Sym2 {
        Sym2::new(self.a11 + rhs.a11, self.a12 + rhs.a12, self.a22 + rhs.a22)
    }
}

impl Sub for Sym2 {
    type Output = Sym2;
    fn sub(self, rhs: Sym2) -> Sym2 {
        Sym2::new(self.a11 - rhs.a11, self.a12 - rhs.a12, self.a22 - rhs.a22)
    }
}

/// An N×2 matrix stored row by row.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TallMatrix {
    rows: Vec<Vec2>,
}

impl TallMatrix {
    pub fn new(rows: Vec<Vec2>) -> Self {
        TallMatrix { rows }
    }

    pub fn rows(&self) -> &[Vec2] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn push(&mut self, row: Vec2) {
        self.rows.push(row);
    }

    /// True when every entry is exactly zero (or there are no rows).
    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(|r| r.is_zero())
    }
}

impl From<Vec<Vec2>> for TallMatrix {
    fn from(rows: Vec<Vec2>) -> Self {
        TallMatrix::new(rows)
    }
}

/// Eigenvalues `(lambda_min, lambda_max)` of a symmetric 2×2 matrix.
///
/// Uses `mean ± hypot(half_gap, a12)`, which never loses the larger root to
/// cancellation. A slightly negative `lambda_min` within
/// `NEG_EIG_CLAMP · |tr|` is rounding noise from a PSD matrix and is clamped
/// to zero.
pub fn eig_sym2(m: Sym2) -> (f64, f64) {
    let mean = 0.5 * (m.a11 + m.a22);
    let half_gap = 0.5 * (m.a11 - m.a22);
    let radius = half_gap.hypot(m.a12);
    let lambda_max = mean + radius;
    let mut lambda_min = mean - radius;
    if lambda_min < 0.0 && lambda_min >= -NEG_EIG_CLAMP * m.trace().abs() {
        lambda_min = 0.0;
    }
    (lambda_min, lambda_max)
}

/// Gram matrix `MᵀM`, the sum of the rows' outer products.
pub fn gram(m: &TallMatrix) -> Sym2 {
    m.rows().iter().fold(Sym2::ZERO, |acc, &r| acc + Sym2::outer(r))
}

/// `det(MᵀM)` by the Cauchy–Binet formula: the sum of squared 2×2 minors.
///
/// Exactly zero for a single row or for exactly parallel rows, and free of the
/// cancellation in `a11·a22 − a12²`.
pub fn gram_det(m: &TallMatrix) -> f64 {
    let rows = m.rows();
    let mut det = 0.0;
    for (i, a) in rows.iter().enumerate() {
        for b in &rows[i + 1..] {
            let minor = a.x * b.y - a.y * b.x;
            det += minor * minor;
        }
    }
    det
}

/// Eigenvalues of `MᵀM`.
///
/// `lambda_max` comes from [`eig_sym2`]; `lambda_min` is recovered as
/// `det / lambda_max` with the Cauchy–Binet determinant, so it is an exact
/// root of the same characteristic polynomial without the subtraction.
pub fn gram_eigenvalues(m: &TallMatrix) -> (f64, f64) {
    let g = gram(m);
    let (_, hi) = eig_sym2(g);
    if hi <= 0.0 {
        return (0.0, 0.0);
    }
    ((gram_det(m) / hi).min(hi), hi)
}

/// `(sigma_min, sigma_max)` of an N×2 matrix.
pub fn singular_values(m: &TallMatrix) -> (f64, f64) {
    let (lo, hi) = gram_eigenvalues(m);
    (lo.sqrt(), hi.sqrt())
}

/// Number of eigenvalues above `rel_tol · max(lambda_max, ABS_FLOOR)`.
pub fn numerical_rank(m: Sym2, rel_tol: f64) -> usize {
    let (lo, hi) = eig_sym2(m);
    let threshold = rel_tol * hi.max(ABS_FLOOR);
    [lo, hi].iter().filter(|&&l| l > threshold).count()
}
