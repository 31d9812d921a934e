//! Face-anchored dynamic cropping: a square window sized from the face
//! box, shifted inside the frame, and resized to a standard side.

use serde::{Deserialize, Serialize};

use crate::image_buf::ImageBuf;
use crate::warp::sample_into;
use crate::{CoreError, Grid2D, Result, Scalar};

/// Face bounding box within a source frame, in pixels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FaceBox {
    pub top: f64,
    pub left: f64,
    pub height: f64,
    pub width: f64,
}

impl FaceBox {
    fn validate(&self, frame: Grid2D) -> Result<()> {
        let finite = [self.top, self.left, self.height, self.width]
            .iter()
            .all(|v| v.is_finite());
        if !finite || self.height <= 0.0 || self.width <= 0.0 {
            return Err(CoreError::BoxOutsideFrame {
                detail: format!("{self:?}"),
            });
        }
        let intersects = self.left + self.width > 0.0
            && self.left < frame.width as f64
            && self.top + self.height > 0.0
            && self.top < frame.height as f64;
        if !intersects {
            return Err(CoreError::BoxOutsideFrame {
                detail: format!("{self:?} vs frame {frame}"),
            });
        }
        Ok(())
    }
}

/// Crop geometry knobs; kept per subject so individual recordings can be
/// adjusted without touching the pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CropConfig {
    /// Window side as a multiple of the face height.
    pub scale: f64,
    /// Extra margin above the face, as a multiple of the face height.
    pub top_margin: f64,
    /// Output resolution (square).
    pub output_side: usize,
}

impl Default for CropConfig {
    fn default() -> Self {
        CropConfig {
            scale: 4.0,
            top_margin: 0.5,
            output_side: 384,
        }
    }
}

impl CropConfig {
    fn validate(&self) -> Result<()> {
        let valid = self.scale > 0.0 && self.scale.is_finite() && self.top_margin.is_finite();
        if !valid {
            return Err(CoreError::InvalidParameter {
                detail: format!(
                    "crop scale must be positive and margins finite, got scale={} top_margin={}",
                    self.scale, self.top_margin
                ),
            });
        }
        if self.output_side < 16 {
            return Err(CoreError::InvalidParameter {
                detail: format!("output_side must be at least 16, got {}", self.output_side),
            });
        }
        Ok(())
    }
}

/// Integer window actually cut from a frame by [`dynamic_crop`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CropWindow {
    pub top: usize,
    pub left: usize,
    pub side: usize,
}

/// The window [`dynamic_crop`] would cut, before resizing — exposed so the
/// geometry is testable and reportable on its own.
pub fn crop_window(frame: Grid2D, face: &FaceBox, cfg: &CropConfig) -> Result<CropWindow> {
    cfg.validate()?;
    face.validate(frame)?;
    let min_dim = frame.height.min(frame.width);
    let side = (cfg.scale * face.height).round() as usize;
    if side >= min_dim {
        // The request saturates the frame: largest centered square.
        return Ok(CropWindow {
            top: (frame.height - min_dim) / 2,
            left: (frame.width - min_dim) / 2,
            side: min_dim,
        });
    }
    let side_f = side as f64;
    let top = (face.top - cfg.top_margin * face.height).round();
    let left = (face.left + face.width / 2.0 - side_f / 2.0).round();
    let top = top.clamp(0.0, (frame.height - side) as f64) as usize;
    let left = left.clamp(0.0, (frame.width - side) as f64) as usize;
    Ok(CropWindow { top, left, side })
}

/// Cut a square window anchored on the face box — side `scale·face.height`,
/// horizontally centered on the face, top edge `top_margin·face.height`
/// above the box — clamp it inside the frame (keeping it square), and
/// resize the result to `output_side²`.
pub fn dynamic_crop<T: Scalar>(
    frame: &ImageBuf<T>,
    face: &FaceBox,
    cfg: &CropConfig,
) -> Result<ImageBuf<T>> {
    if frame.grid().height < 16 || frame.grid().width < 16 {
        return Err(CoreError::ImageTooSmall {
            grid: frame.grid(),
            min_side: 16,
        });
    }
    if !frame.in_unit_range() {
        return Err(CoreError::InvalidParameter {
            detail: "dynamic_crop requires frame values in [0, 1]".into(),
        });
    }
    let w = crop_window(frame.grid(), face, cfg)?;
    let window_grid = Grid2D::new(w.side, w.side)?;
    let channels = frame.channels();
    let mut data = Vec::with_capacity(window_grid.len() * channels);
    for r in 0..w.side {
        for c in 0..w.side {
            for ch in 0..channels {
                data.push(frame.get(w.top + r, w.left + c, ch));
            }
        }
    }
    let window = ImageBuf::new(window_grid, channels, data)?;
    resize_bilinear(&window, cfg.output_side, cfg.output_side)
}

/// Bilinear resize with the half-pixel-center convention
/// `src = (dst + 0.5)·(in/out) − 0.5`, border-clamped. Resizing to the
/// same dimensions returns the input bit-exactly.
pub fn resize_bilinear<T: Scalar>(
    img: &ImageBuf<T>,
    height: usize,
    width: usize,
) -> Result<ImageBuf<T>> {
    let out_grid = Grid2D::new(height, width)?;
    let sr = img.height() as f64 / height as f64;
    let sc = img.width() as f64 / width as f64;
    let channels = img.channels();
    let mut data = Vec::with_capacity(out_grid.len() * channels);
    for r in 0..height {
        let src_r = T::from_f64_lossy((r as f64 + 0.5) * sr - 0.5);
        for c in 0..width {
            let src_c = T::from_f64_lossy((c as f64 + 0.5) * sc - 0.5);
            sample_into(img, src_r, src_c, &mut data);
        }
    }
    ImageBuf::new(out_grid, channels, data)
}
