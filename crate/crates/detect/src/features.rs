//! Frame feature extraction: 8×8 block means + 32-bin intensity
//! histogram + 16-bin gradient-magnitude histogram = 112 dimensions, all
//! in [0, 1].

use std::path::Path;

use smf_core::{list_frame_files, read_image, Image};

use crate::error::{DetectError, Result};

/// Side length frames must have.
pub const FRAME_SIDE: usize = 96;
/// Block grid per axis (96 / 8 = 12-pixel blocks).
const BLOCK_GRID: usize = 8;
const BLOCK_SIDE: usize = FRAME_SIDE / BLOCK_GRID;
const INTENSITY_BINS: usize = 32;
const GRADIENT_BINS: usize = 16;

/// Total feature dimension: 64 block means + 32 + 16 histogram bins.
pub const FEATURE_DIM: usize = BLOCK_GRID * BLOCK_GRID + INTENSITY_BINS + GRADIENT_BINS;

/// One frame's feature vector: exactly [`FEATURE_DIM`] finite values in
/// [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct FrameFeatures {
    values: Vec<f64>,
}

impl FrameFeatures {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() != FEATURE_DIM {
            return Err(DetectError::InvalidParameter {
                detail: format!(
                    "feature vector must have {FEATURE_DIM} entries, got {}",
                    values.len()
                ),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(DetectError::InvalidParameter {
                detail: "feature vector contains non-finite values".into(),
            });
        }
        Ok(FrameFeatures { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Extracts the 112-dimensional descriptor from a 96×96 single-channel
/// unit-range frame.
pub fn extract_features(frame: &Image) -> Result<FrameFeatures> {
    if frame.height() != FRAME_SIDE || frame.width() != FRAME_SIDE || frame.channels() != 1 {
        return Err(DetectError::WrongFrameSize {
            got: format!("{}x{} ({} channel(s))", frame.height(), frame.width(), frame.channels()),
        });
    }
    if !frame.in_unit_range() {
        return Err(DetectError::InvalidParameter {
            detail: "frame values must lie in [0, 1]".into(),
        });
    }
    let mut values = Vec::with_capacity(FEATURE_DIM);

    // 64 block means over the 8×8 grid of 12×12 blocks.
    for br in 0..BLOCK_GRID {
        for bc in 0..BLOCK_GRID {
            let mut sum = 0.0;
            for r in br * BLOCK_SIDE..(br + 1) * BLOCK_SIDE {
                for c in bc * BLOCK_SIDE..(bc + 1) * BLOCK_SIDE {
                    sum += frame.value(r, c);
                }
            }
            values.push(sum / (BLOCK_SIDE * BLOCK_SIDE) as f64);
        }
    }

    // 32-bin intensity histogram, as mass so entries stay in [0, 1].
    let total = (FRAME_SIDE * FRAME_SIDE) as f64;
    let mut intensity = [0usize; INTENSITY_BINS];
    for &v in frame.data() {
        let idx = ((v * INTENSITY_BINS as f64).floor() as usize).min(INTENSITY_BINS - 1);
        intensity[idx] += 1;
    }
    values.extend(intensity.iter().map(|&c| c as f64 / total));

    // 16-bin histogram of gradient magnitudes from central differences
    // with replicated edges; the largest possible magnitude is √0.5, so
    // dividing by it normalizes magnitudes into [0, 1].
    let max_magnitude = 0.5f64.sqrt();
    let mut gradient = [0usize; GRADIENT_BINS];
    for r in 0..FRAME_SIDE {
        for c in 0..FRAME_SIDE {
            let up = frame.value(r.saturating_sub(1), c);
            let down = frame.value((r + 1).min(FRAME_SIDE - 1), c);
            let left = frame.value(r, c.saturating_sub(1));
            let right = frame.value(r, (c + 1).min(FRAME_SIDE - 1));
            let gr = (down - up) / 2.0;
            let gc = (right - left) / 2.0;
            let mag = (gr * gr + gc * gc).sqrt() / max_magnitude;
            let idx = ((mag * GRADIENT_BINS as f64).floor() as usize).min(GRADIENT_BINS - 1);
            gradient[idx] += 1;
        }
    }
    values.extend(gradient.iter().map(|&c| c as f64 / total));

    FrameFeatures::new(values)
}

/// Loads up to `n` frames from a directory with deterministic uniform
/// striding: frame `j` of the selection is file `⌊j·available/take⌋` of
/// the sorted listing, `take = min(n, available)`. Multi-channel frames
/// are converted to grayscale.
pub fn sample_frames(dir: impl AsRef<Path>, n: usize) -> Result<Vec<Image>> {
    let dir = dir.as_ref();
    if n == 0 {
        return Err(DetectError::InvalidParameter {
            detail: "must sample at least one frame".into(),
        });
    }
    let files = list_frame_files(dir)?;
    if files.is_empty() {
        return Err(DetectError::EmptyFrameDir {
            dir: dir.display().to_string(),
        });
    }
    let take = n.min(files.len());
    let mut frames = Vec::with_capacity(take);
    for j in 0..take {
        let idx = j * files.len() / take;
        let img: Image = read_image(&files[idx])?;
        frames.push(if img.channels() == 1 {
            img
        } else {
            img.to_grayscale()?
        });
    }
    Ok(frames)
}
