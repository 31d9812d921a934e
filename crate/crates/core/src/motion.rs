//! Per-region motion statistics: soft argmax translation, weighted
//! covariance, covariance-derived affine transforms, and the backward
//! pixel map through a common reference frame.

use crate::heatmap::Heatmap;
use crate::linalg::{Mat2, SymEigen2, Vec2};
use crate::{CoreError, Result, Scalar};

/// Eigenvalue floor (pixels^2) below which a region covariance is treated
/// as rank deficient. Backward maps invert the driving affine, so
/// near-singular factors are rejected up front.
pub const COVARIANCE_RANK_FLOOR: f64 = 1e-8;

/// How heatmap values are turned into per-pixel weights.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum ArgmaxMode {
    /// Treat the map as an unnormalized distribution: `w = h / sum(h)`.
    /// This is the default for maps that are already softmax outputs.
    #[default]
    Distribution,
    /// Apply a softmax over the whole map: `w = softmax(temperature * h)`,
    /// for raw score maps.
    Softmax { temperature: f64 },
}

/// Weighted centroid of a heatmap in `(row, col)` pixel coordinates.
///
/// The result always lies inside the grid's convex hull. Errors on an
/// all-zero map ("degenerate heatmap") or a non-positive temperature.
pub fn soft_argmax<T: Scalar>(h: &Heatmap<T>, mode: ArgmaxMode) -> Result<Vec2<T>> {
    let weights = pixel_weights(h, mode)?;
    let grid = h.grid();
    let mut acc = Vec2::zero();
    let mut i = 0;
    for r in 0..grid.height {
        for c in 0..grid.width {
            let x = Vec2::new(T::from_f64_lossy(r as f64), T::from_f64_lossy(c as f64));
            acc = acc.add(x.scale(weights[i]));
            i += 1;
        }
    }
    Ok(acc)
}

/// Weighted second central moment of a heatmap about `mean`:
/// `sum_i w_i (x_i - mean)(x_i - mean)^T` with `w = h / sum(h)`.
pub fn region_covariance<T: Scalar>(h: &Heatmap<T>, mean: Vec2<T>) -> Result<Mat2<T>> {
    let weights = pixel_weights(h, ArgmaxMode::Distribution)?;
    let grid = h.grid();
    let mut a = T::zero();
    let mut b = T::zero();
    let mut d = T::zero();
    let mut i = 0;
    for r in 0..grid.height {
        for c in 0..grid.width {
            let dr = T::from_f64_lossy(r as f64) - mean.row;
            let dc = T::from_f64_lossy(c as f64) - mean.col;
            let w = weights[i];
            a = a + w * dr * dr;
            b = b + w * dr * dc;
            d = d + w * dc * dc;
            i += 1;
        }
    }
    Ok(Mat2::new(a, b, b, d))
}

/// Factor a symmetric PSD covariance into `A = U diag(sqrt(l0), sqrt(l1))`
/// so that `A A^T` reconstructs the covariance. Eigenvalues are sorted
/// descending and eigenvector signs follow the deterministic convention of
/// [`SymEigen2`]. Errors with "rank-deficient region" when an eigenvalue
/// falls below [`COVARIANCE_RANK_FLOOR`].
pub fn affine_from_covariance<T: Scalar>(cov: &Mat2<T>) -> Result<Mat2<T>> {
    validate_symmetric(cov)?;
    let eig = SymEigen2::decompose(cov.m[0], cov.m[1], cov.m[3]);
    let floor = T::from_f64_lossy(COVARIANCE_RANK_FLOOR);
    for &l in &eig.values {
        if l < -floor {
            return Err(CoreError::NotPsd {
                eigenvalue: l.to_f64().unwrap_or(f64::NAN),
            });
        }
        if l < floor {
            return Err(CoreError::RankDeficient {
                eigenvalue: l.to_f64().unwrap_or(f64::NAN),
                floor: COVARIANCE_RANK_FLOOR,
            });
        }
    }
    let u = Mat2::from_columns(eig.vectors[0], eig.vectors[1]);
    Ok(u.mul_mat(&Mat2::diag(eig.values[0].sqrt(), eig.values[1].sqrt())))
}

fn validate_symmetric<T: Scalar>(cov: &Mat2<T>) -> Result<()> {
    if !cov.is_finite() {
        return Err(CoreError::NonFinite { index: 0 });
    }
    let skew = (cov.m[1] - cov.m[2]).abs();
    let tol = T::from_f64_lossy(1e-9) * T::one().max(cov.max_abs());
    if skew > tol {
        return Err(CoreError::AsymmetricCovariance {
            skew: skew.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(())
}

fn pixel_weights<T: Scalar>(h: &Heatmap<T>, mode: ArgmaxMode) -> Result<Vec<T>> {
    match mode {
        ArgmaxMode::Distribution => {
            let total = h.sum();
            if total <= T::zero() {
                return Err(CoreError::DegenerateHeatmap);
            }
            Ok(h.data().iter().map(|&v| v / total).collect())
        }
        ArgmaxMode::Softmax { temperature } => {
            if temperature <= 0.0 || temperature.is_nan() {
                return Err(CoreError::InvalidParameter {
                    detail: format!("temperature must be positive, got {temperature}"),
                });
            }
            let tau = T::from_f64_lossy(temperature);
            let hi = h
                .data()
                .iter()
                .fold(T::neg_infinity(), |acc, &v| acc.max(v * tau));
            let exps: Vec<T> = h.data().iter().map(|&v| (v * tau - hi).exp()).collect();
            let total = exps.iter().fold(T::zero(), |acc, &v| acc + v);
            Ok(exps.into_iter().map(|v| v / total).collect())
        }
    }
}

/// Mean, covariance, and covariance-derived affine of one motion region.
///
/// Invariants: the covariance is symmetric PSD and `affine * affine^T`
/// reconstructs it within `1e-6` relative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionParams<T> {
    pub mean: Vec2<T>,
    pub covariance: Mat2<T>,
    pub affine: Mat2<T>,
}

impl<T: Scalar> RegionParams<T> {
    /// Build from explicit fields, checking the type invariants.
    pub fn new(mean: Vec2<T>, covariance: Mat2<T>, affine: Mat2<T>) -> Result<Self> {
        if !mean.is_finite() || !affine.is_finite() {
            return Err(CoreError::NonFinite { index: 0 });
        }
        validate_symmetric(&covariance)?;
        let reconstructed = affine.mul_mat(&affine.transpose());
        let scale = T::one().max(covariance.max_abs());
        let err = reconstructed.max_abs_diff(&covariance) / scale;
        if err > T::from_f64_lossy(1e-6) {
            return Err(CoreError::AffineCovarianceMismatch {
                error: err.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(RegionParams {
            mean,
            covariance,
            affine,
        })
    }

    /// Estimate all three fields from a heatmap: soft-argmax mean, weighted
    /// covariance, and the eigen factor of that covariance.
    pub fn from_heatmap(h: &Heatmap<T>, mode: ArgmaxMode) -> Result<Self> {
        let mean = soft_argmax(h, mode)?;
        let covariance = region_covariance(h, mean)?;
        let affine = affine_from_covariance(&covariance)?;
        Ok(RegionParams {
            mean,
            covariance,
            affine,
        })
    }

    /// Synthetic constructor: derives the covariance as `affine * affine^T`.
    pub fn from_mean_affine(mean: Vec2<T>, affine: Mat2<T>) -> Result<Self> {
        if !mean.is_finite() || !affine.is_finite() {
            return Err(CoreError::NonFinite { index: 0 });
        }
        let covariance = affine.mul_mat(&affine.transpose());
        Ok(RegionParams {
            mean,
            covariance,
            affine,
        })
    }
}

/// Source/driving parameter pair describing one region's motion. The
/// driving affine must be invertible since backward maps go through it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionMotion<T> {
    pub source: RegionParams<T>,
    pub driving: RegionParams<T>,
}

impl<T: Scalar> RegionMotion<T> {
    pub fn new(source: RegionParams<T>, driving: RegionParams<T>) -> Result<Self> {
        for p in [&source, &driving] {
            if p.affine.inverse().is_none() {
                return Err(CoreError::SingularAffine {
                    det: p.affine.det().to_f64().unwrap_or(f64::NAN),
                });
            }
        }
        Ok(RegionMotion { source, driving })
    }

    /// The motion with source and driving roles swapped.
    pub fn reversed(&self) -> RegionMotion<T> {
        RegionMotion {
            source: self.driving,
            driving: self.source,
        }
    }
}

/// Source-frame location sampled when generating driving pixel `z`:
/// `mean_s + A_s A_d^-1 (z - mean_d)`.
pub fn region_backward_map<T: Scalar>(m: &RegionMotion<T>, z: Vec2<T>) -> Result<Vec2<T>> {
    let inv = m
        .driving
        .affine
        .inverse()
        .ok_or_else(|| CoreError::SingularAffine {
            det: m.driving.affine.det().to_f64().unwrap_or(f64::NAN),
        })?;
    let composed = m.source.affine.mul_mat(&inv);
    Ok(m.source.mean.add(composed.mul_vec(z.sub(m.driving.mean))))
}
