//! Reconstruction penalties: L1, L2, and the smooth Charbonnier penalty
//! with its analytic gradient and a multi-scale combinator.

use crate::image_buf::ImageBuf;
use crate::{CoreError, Result, Scalar};

/// How elementwise penalties are collapsed to a scalar.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Reduction {
    /// Average over every element (pixels times channels).
    #[default]
    Mean,
    /// Plain sum over every element.
    Sum,
}

/// Parameters shared by the Charbonnier entry points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossParams<T> {
    /// Smoothing constant; the penalty approaches |d| as epsilon goes to 0.
    pub epsilon: T,
    pub reduction: Reduction,
}

impl<T: Scalar> Default for LossParams<T> {
    fn default() -> Self {
        LossParams {
            epsilon: T::from_f64_lossy(1e-3),
            reduction: Reduction::Mean,
        }
    }
}

impl<T: Scalar> LossParams<T> {
    fn validate(&self) -> Result<()> {
        let valid = self.epsilon > T::zero() && self.epsilon.is_finite();
        if !valid {
            return Err(CoreError::InvalidParameter {
                detail: format!("epsilon must be positive and finite, got {}", self.epsilon),
            });
        }
        Ok(())
    }
}

/// Pointwise Charbonnier penalty `sqrt(d^2 + eps^2) - eps`; zero at `d = 0`.
pub fn charbonnier_penalty<T: Scalar>(d: T, epsilon: T) -> T {
    (d * d + epsilon * epsilon).sqrt() - epsilon
}

/// Derivative of [`charbonnier_penalty`] in `d`: `d / sqrt(d^2 + eps^2)`.
/// Smooth everywhere and bounded in (-1, 1).
pub fn charbonnier_penalty_grad<T: Scalar>(d: T, epsilon: T) -> T {
    d / (d * d + epsilon * epsilon).sqrt()
}

fn reduce<T: Scalar>(total: T, count: usize, reduction: Reduction) -> T {
    match reduction {
        Reduction::Mean => total / T::from_f64_lossy(count as f64),
        Reduction::Sum => total,
    }
}

/// Mean (or sum) absolute difference between two equal-shape images.
pub fn l1_loss<T: Scalar>(a: &ImageBuf<T>, b: &ImageBuf<T>, reduction: Reduction) -> Result<T> {
    a.expect_same_shape(b)?;
    let total = a
        .data()
        .iter()
        .zip(b.data())
        .fold(T::zero(), |acc, (&x, &y)| acc + (x - y).abs());
    Ok(reduce(total, a.data().len(), reduction))
}

/// Mean (or sum) squared difference between two equal-shape images.
pub fn l2_loss<T: Scalar>(a: &ImageBuf<T>, b: &ImageBuf<T>, reduction: Reduction) -> Result<T> {
    a.expect_same_shape(b)?;
    let total = a
        .data()
        .iter()
        .zip(b.data())
        .fold(T::zero(), |acc, (&x, &y)| {
            let d = x - y;
            acc + d * d
        });
    Ok(reduce(total, a.data().len(), reduction))
}

/// Charbonnier loss between a prediction and a target.
pub fn charbonnier_loss<T: Scalar>(
    prediction: &ImageBuf<T>,
    target: &ImageBuf<T>,
    params: LossParams<T>,
) -> Result<T> {
    params.validate()?;
    prediction.expect_same_shape(target)?;
    let total = prediction
        .data()
        .iter()
        .zip(target.data())
        .fold(T::zero(), |acc, (&x, &y)| {
            acc + charbonnier_penalty(x - y, params.epsilon)
        });
    Ok(reduce(total, prediction.data().len(), params.reduction))
}

/// Exact gradient of [`charbonnier_loss`] with respect to `prediction`,
/// including the reduction scaling, so finite differences of the loss
/// reproduce it elementwise.
pub fn charbonnier_grad<T: Scalar>(
    prediction: &ImageBuf<T>,
    target: &ImageBuf<T>,
    params: LossParams<T>,
) -> Result<ImageBuf<T>> {
    params.validate()?;
    prediction.expect_same_shape(target)?;
    let scale = match params.reduction {
        Reduction::Mean => T::one() / T::from_f64_lossy(prediction.data().len() as f64),
        Reduction::Sum => T::one(),
    };
    let data = prediction
        .data()
        .iter()
        .zip(target.data())
        .map(|(&x, &y)| scale * charbonnier_penalty_grad(x - y, params.epsilon))
        .collect();
    ImageBuf::new(prediction.grid(), prediction.channels(), data)
}

/// Weighted sum of Charbonnier losses over a pyramid of
/// (prediction, target) pairs, one weight per scale.
pub fn charbonnier_pyramid<T: Scalar>(
    levels: &[(&ImageBuf<T>, &ImageBuf<T>)],
    weights: &[T],
    params: LossParams<T>,
) -> Result<T> {
    if levels.is_empty() || levels.len() != weights.len() {
        return Err(CoreError::InvalidParameter {
            detail: format!(
                "pyramid needs matching non-empty levels and weights, got {} and {}",
                levels.len(),
                weights.len()
            ),
        });
    }
    for (i, &w) in weights.iter().enumerate() {
        if !w.is_finite() || w < T::zero() {
            return Err(CoreError::InvalidParameter {
                detail: format!("pyramid weight {i} must be finite and nonnegative"),
            });
        }
    }
    let mut total = T::zero();
    for ((pred, tgt), &w) in levels.iter().zip(weights) {
        total = total + w * charbonnier_loss(pred, tgt, params)?;
    }
    Ok(total)
}
