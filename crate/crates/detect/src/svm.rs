//! From-scratch linear SVM trained with the Pegasos stochastic
//! subgradient method on standardized features.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use smf_data::Label;

use crate::error::{DetectError, Result};
use crate::features::{FrameFeatures, FEATURE_DIM};
use crate::forest::check_two_classes;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SvmConfig {
    /// Passes over the training set (default 50).
    pub epochs: usize,
    /// Regularization strength λ (default 1e-4).
    pub lambda: f64,
}

impl Default for SvmConfig {
    fn default() -> Self {
        SvmConfig {
            epochs: 50,
            lambda: 1e-4,
        }
    }
}

impl SvmConfig {
    fn validate(&self) -> Result<()> {
        if self.epochs == 0 || !self.lambda.is_finite() || self.lambda <= 0.0 {
            return Err(DetectError::InvalidParameter {
                detail: format!(
                    "svm needs epochs >= 1 and finite lambda > 0, got epochs={} lambda={}",
                    self.epochs, self.lambda
                ),
            });
        }
        Ok(())
    }
}

/// Linear decision function `w·x̂ + b` over standardized features
/// `x̂ = (x − mean) / std`; positive scores vote real.
#[derive(Debug, Clone, PartialEq)]
pub struct SvmModel {
    pub(crate) weights: Vec<f64>,
    pub(crate) bias: f64,
    pub(crate) means: Vec<f64>,
    pub(crate) stds: Vec<f64>,
}

impl SvmModel {
    /// Signed margin; positive favors real.
    pub fn real_score(&self, features: &FrameFeatures) -> f64 {
        let mut score = self.bias;
        for (i, &v) in features.values().iter().enumerate() {
            score += self.weights[i] * (v - self.means[i]) / self.stds[i];
        }
        score
    }
}

/// Predicts a frame label: real iff the margin strictly exceeds
/// `threshold` (default 0.0); the tie goes to fake.
pub fn classify_frame_svm(model: &SvmModel, features: &FrameFeatures, threshold: f64) -> Label {
    if model.real_score(features) > threshold {
        Label::Real
    } else {
        Label::Fake
    }
}

fn standardization(data: &[(FrameFeatures, Label)]) -> (Vec<f64>, Vec<f64>) {
    let n = data.len() as f64;
    let mut means = vec![0.0; FEATURE_DIM];
    let mut stds = vec![0.0; FEATURE_DIM];
    for (f, _) in data {
        for (i, &v) in f.values().iter().enumerate() {
            means[i] += v;
        }
    }
    for m in &mut means {
        *m /= n;
    }
    for (f, _) in data {
        for (i, &v) in f.values().iter().enumerate() {
            stds[i] += (v - means[i]).powi(2);
        }
    }
    for s in &mut stds {
        *s = (*s / n).sqrt();
        if *s < 1e-12 {
            *s = 1.0; // constant feature: standardized value is 0 either way
        }
    }
    (means, stds)
}

/// Trains a linear SVM with Pegasos: at step `t` (learning rate
/// `1/(λt)`) one random sample is checked and the weights take a
/// hinge-loss subgradient step; the bias is unregularized.
/// Bit-identical for a given (data, cfg, seed).
pub fn train_svm(data: &[(FrameFeatures, Label)], cfg: &SvmConfig, seed: u64) -> Result<SvmModel> {
    cfg.validate()?;
    let labels: Vec<Label> = data.iter().map(|(_, l)| *l).collect();
    check_two_classes(&labels)?;
    let (means, stds) = standardization(data);
    let standardized: Vec<Vec<f64>> = data
        .iter()
        .map(|(f, _)| {
            f.values()
                .iter()
                .enumerate()
                .map(|(i, &v)| (v - means[i]) / stds[i])
                .collect()
        })
        .collect();
    let y: Vec<f64> = labels
        .iter()
        .map(|&l| if l == Label::Real { 1.0 } else { -1.0 })
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut w = vec![0.0; FEATURE_DIM];
    let mut b = 0.0;
    let mut t = 1u64;
    for _ in 0..cfg.epochs {
        for _ in 0..data.len() {
            let i = rng.random_range(0..data.len());
            let eta = 1.0 / (cfg.lambda * t as f64);
            let x = &standardized[i];
            let margin = y[i] * (dot(&w, x) + b);
            let shrink = 1.0 - eta * cfg.lambda;
            if margin < 1.0 {
                for (wj, &xj) in w.iter_mut().zip(x) {
                    *wj = shrink * *wj + eta * y[i] * xj;
                }
                b += eta * y[i];
            } else {
                for wj in &mut w {
                    *wj *= shrink;
                }
            }
            t += 1;
        }
    }
    Ok(SvmModel {
        weights: w,
        bias: b,
        means,
        stds,
    })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
