//! Minimal 2-vector / 2x2 matrix arithmetic for the motion math.

use crate::Scalar;

/// Column 2-vector in `(row, col)` order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Vec2<T> {
    pub row: T,
    pub col: T,
}

impl<T: Scalar> Vec2<T> {
    pub fn new(row: T, col: T) -> Self {
        Vec2 { row, col }
    }

    pub fn zero() -> Self {
        Vec2::new(T::zero(), T::zero())
    }

    // Inherent rather than `std::ops` impls so call sites under the
    // generic scalar bound don't need trait imports.
    #[allow(clippy::should_implement_trait)]
    pub fn add(self, other: Vec2<T>) -> Vec2<T> {
        Vec2::new(self.row + other.row, self.col + other.col)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn sub(self, other: Vec2<T>) -> Vec2<T> {
        Vec2::new(self.row - other.row, self.col - other.col)
    }

    pub fn scale(self, s: T) -> Vec2<T> {
        Vec2::new(self.row * s, self.col * s)
    }

    pub fn dot(self, other: Vec2<T>) -> T {
        self.row * other.row + self.col * other.col
    }

    pub fn norm(self) -> T {
        self.dot(self).sqrt()
    }

    pub fn is_finite(self) -> bool {
        self.row.is_finite() && self.col.is_finite()
    }
}

/// Row-major 2x2 matrix acting on [`Vec2`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2<T> {
    /// Entries `[[a, b], [c, d]]` stored as `[a, b, c, d]`.
    pub m: [T; 4],
}

impl<T: Scalar> Mat2<T> {
    pub fn new(a: T, b: T, c: T, d: T) -> Self {
        Mat2 { m: [a, b, c, d] }
    }

    pub fn identity() -> Self {
        Mat2::new(T::one(), T::zero(), T::zero(), T::one())
    }

    pub fn zero() -> Self {
        Mat2::new(T::zero(), T::zero(), T::zero(), T::zero())
    }

    /// Diagonal matrix `diag(d0, d1)`.
    pub fn diag(d0: T, d1: T) -> Self {
        Mat2::new(d0, T::zero(), T::zero(), d1)
    }

    /// Matrix with the given columns.
    pub fn from_columns(c0: Vec2<T>, c1: Vec2<T>) -> Self {
        Mat2::new(c0.row, c1.row, c0.col, c1.col)
    }

    pub fn column(&self, i: usize) -> Vec2<T> {
        match i {
            0 => Vec2::new(self.m[0], self.m[2]),
            1 => Vec2::new(self.m[1], self.m[3]),
            _ => panic!("column index out of range"),
        }
    }

    pub fn det(&self) -> T {
        self.m[0] * self.m[3] - self.m[1] * self.m[2]
    }

    pub fn transpose(&self) -> Mat2<T> {
        Mat2::new(self.m[0], self.m[2], self.m[1], self.m[3])
    }

    pub fn mul_vec(&self, v: Vec2<T>) -> Vec2<T> {
        Vec2::new(
            self.m[0] * v.row + self.m[1] * v.col,
            self.m[2] * v.row + self.m[3] * v.col,
        )
    }

    pub fn mul_mat(&self, o: &Mat2<T>) -> Mat2<T> {
        Mat2::new(
            self.m[0] * o.m[0] + self.m[1] * o.m[2],
            self.m[0] * o.m[1] + self.m[1] * o.m[3],
            self.m[2] * o.m[0] + self.m[3] * o.m[2],
            self.m[2] * o.m[1] + self.m[3] * o.m[3],
        )
    }

    /// Inverse, or `None` when the determinant is zero relative to the
    /// matrix scale (`|det| <= 1e-12 * max(1, max|entry|)^2`).
    pub fn inverse(&self) -> Option<Mat2<T>> {
        let det = self.det();
        let scale = self
            .m
            .iter()
            .fold(T::one(), |acc, &v| acc.max(v.abs()));
        let floor = T::from_f64_lossy(1e-12) * scale * scale;
        if det.abs() <= floor {
            return None;
        }
        let inv = T::one() / det;
        Some(Mat2::new(
            self.m[3] * inv,
            -self.m[1] * inv,
            -self.m[2] * inv,
            self.m[0] * inv,
        ))
    }

    pub fn max_abs(&self) -> T {
        self.m.iter().fold(T::zero(), |acc, &v| acc.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.m.iter().all(|v| v.is_finite())
    }

    /// Largest absolute entry of `self - other`.
    pub fn max_abs_diff(&self, other: &Mat2<T>) -> T {
        self.m
            .iter()
            .zip(other.m.iter())
            .fold(T::zero(), |acc, (&a, &b)| acc.max((a - b).abs()))
    }
}

/// Eigendecomposition of a symmetric 2x2 matrix, eigenvalues sorted
/// descending. Eigenvectors follow a deterministic sign convention: the
/// largest-magnitude component of each is positive, ties broken toward a
/// positive row component.
#[derive(Debug, Clone, Copy)]
pub struct SymEigen2<T> {
    pub values: [T; 2],
    pub vectors: [Vec2<T>; 2],
}

impl<T: Scalar> SymEigen2<T> {
    /// Decompose `[[a, b], [b, c]]` given by its upper triangle.
    pub fn decompose(a: T, b: T, c: T) -> Self {
        let two = T::one() + T::one();
        let half_trace = (a + c) / two;
        let half_diff = (a - c) / two;
        let radius = (half_diff * half_diff + b * b).sqrt();
        let l0 = half_trace + radius;
        let l1 = half_trace - radius;

        let v0 = eigenvector(a, b, c, l0);
        // Orthogonal complement keeps the pair consistent near degeneracy.
        let v1 = apply_sign_convention(Vec2::new(-v0.col, v0.row));

        SymEigen2 {
            values: [l0, l1],
            vectors: [v0, v1],
        }
    }
}

fn eigenvector<T: Scalar>(a: T, b: T, c: T, lambda: T) -> Vec2<T> {
    // (lambda - c, b) and (b, lambda - a) both solve (M - lambda I) v = 0;
    // pick the larger for stability.
    let u = Vec2::new(lambda - c, b);
    let w = Vec2::new(b, lambda - a);
    let candidate = if u.dot(u) >= w.dot(w) { u } else { w };
    let n = candidate.norm();
    if n == T::zero() {
        // Isotropic matrix: any direction is an eigenvector.
        return Vec2::new(T::one(), T::zero());
    }
    apply_sign_convention(candidate.scale(T::one() / n))
}

fn apply_sign_convention<T: Scalar>(v: Vec2<T>) -> Vec2<T> {
    let flip = if v.row.abs() > v.col.abs() {
        v.row < T::zero()
    } else if v.col.abs() > v.row.abs() {
        v.col < T::zero()
    } else {
        v.row < T::zero()
    };
    if flip {
        v.scale(-T::one())
    } else {
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn identity_decomposition() {
        let e = SymEigen2::decompose(1.0f64, 0.0, 1.0);
        assert_eq!(e.values, [1.0, 1.0]);
        assert_eq!(e.vectors[0], Vec2::new(1.0, 0.0));
        assert_eq!(e.vectors[1], Vec2::new(0.0, 1.0));
    }

    #[test]
    fn diagonal_sorted_descending() {
        let e = SymEigen2::decompose(1.0f64, 0.0, 4.0);
        assert_eq!(e.values, [4.0, 1.0]);
        // Leading eigenvector points along the column axis.
        assert_eq!(e.vectors[0], Vec2::new(0.0, 1.0));
    }

    #[test]
    fn rotated_spectrum_recovered() {
        let theta = 0.7f64;
        let (s, c) = theta.sin_cos();
        // R diag(9, 1) R^T
        let a = 9.0 * c * c + 1.0 * s * s;
        let b = (9.0 - 1.0) * s * c;
        let d = 9.0 * s * s + 1.0 * c * c;
        let e = SymEigen2::decompose(a, b, d);
        assert_relative_eq!(e.values[0], 9.0, max_relative = 1e-12);
        assert_relative_eq!(e.values[1], 1.0, max_relative = 1e-12);
        let v = e.vectors[0];
        let align = (v.row * c + v.col * s).abs();
        assert_relative_eq!(align, 1.0, max_relative = 1e-12);
        // Orthonormal pair.
        assert_relative_eq!(v.dot(e.vectors[1]), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn sign_convention_positive_dominant() {
        let e = SymEigen2::decompose(4.0f64, -1.5, 1.0);
        for v in e.vectors {
            let dominant = if v.row.abs() >= v.col.abs() { v.row } else { v.col };
            assert!(dominant > 0.0);
        }
    }

    #[test]
    fn inverse_round_trip() {
        let m = Mat2::new(2.0f64, 0.5, -1.0, 3.0);
        let inv = m.inverse().unwrap();
        let prod = m.mul_mat(&inv);
        assert!(prod.max_abs_diff(&Mat2::identity()) < 1e-14);
    }

    #[test]
    fn singular_inverse_is_none() {
        let m = Mat2::new(1.0f64, 2.0, 2.0, 4.0);
        assert!(m.inverse().is_none());
    }
}
