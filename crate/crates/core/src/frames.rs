//! Frame io: reading and writing 8-bit PNG/PGM/PPM frames as unit-range
//! images, enumerating frame directories deterministically, and parsing
//! per-frame face boxes from JSON-lines sidecars.

use std::fs;
use std::path::{Path, PathBuf};

use image::{DynamicImage, ImageBuffer, Luma, Rgb};
use serde::{Deserialize, Serialize};

use crate::crop::FaceBox;
use crate::image_buf::ImageBuf;
use crate::{CoreError, Grid2D, Result, Scalar};

/// Extensions recognised as frame files, matched case-insensitively.
const FRAME_EXTENSIONS: [&str; 3] = ["png", "pgm", "ppm"];

/// One detected face box, tied to a frame by index.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FaceBoxRecord {
    pub frame_index: usize,
    pub top: f64,
    pub left: f64,
    pub height: f64,
    pub width: f64,
}

impl FaceBoxRecord {
    pub fn face_box(&self) -> FaceBox {
        FaceBox {
            top: self.top,
            left: self.left,
            height: self.height,
            width: self.width,
        }
    }
}

/// Reads an 8-bit image file into a unit-range buffer: grayscale inputs
/// become one channel, everything else three (RGB). Values map as v/255.
pub fn read_image<T: Scalar>(path: impl AsRef<Path>) -> Result<ImageBuf<T>> {
    let path = path.as_ref();
    let decoded = image::open(path).map_err(|e| CoreError::Codec {
        path: path.display().to_string(),
        source: e,
    })?;
    let from_u8 = |v: u8| T::from_f64_lossy(f64::from(v) / 255.0);
    match decoded {
        DynamicImage::ImageLuma8(_) | DynamicImage::ImageLuma16(_) => {
            let gray = decoded.to_luma8();
            let grid = Grid2D::new(gray.height() as usize, gray.width() as usize)?;
            ImageBuf::new(grid, 1, gray.as_raw().iter().map(|&v| from_u8(v)).collect())
        }
        _ => {
            let rgb = decoded.to_rgb8();
            let grid = Grid2D::new(rgb.height() as usize, rgb.width() as usize)?;
            ImageBuf::new(grid, 3, rgb.as_raw().iter().map(|&v| from_u8(v)).collect())
        }
    }
}

/// Writes a 1- or 3-channel unit-range image as an 8-bit file; the format
/// follows the extension (png, pgm, ppm). Values quantize as
/// round(clamp(v, 0, 1)·255).
pub fn write_image<T: Scalar>(path: impl AsRef<Path>, img: &ImageBuf<T>) -> Result<()> {
    let path = path.as_ref();
    let to_u8 = |v: &T| {
        let v = v.to_f64().unwrap_or(0.0).clamp(0.0, 1.0);
        (v * 255.0).round() as u8
    };
    let raw: Vec<u8> = img.data().iter().map(to_u8).collect();
    let (w, h) = (img.width() as u32, img.height() as u32);
    let save_err = |e: image::ImageError| CoreError::Codec {
        path: path.display().to_string(),
        source: e,
    };
    match img.channels() {
        1 => ImageBuffer::<Luma<u8>, _>::from_raw(w, h, raw)
            .expect("buffer length checked by ImageBuf")
            .save(path)
            .map_err(save_err),
        3 => ImageBuffer::<Rgb<u8>, _>::from_raw(w, h, raw)
            .expect("buffer length checked by ImageBuf")
            .save(path)
            .map_err(save_err),
        c => Err(CoreError::ShapeMismatch {
            detail: format!("image files support 1 or 3 channels, got {c}"),
        }),
    }
}

/// Lists the frame files in a directory, sorted by file name so the order
/// is reproducible across platforms and runs.
pub fn list_frame_files(dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    let entries = fs::read_dir(dir).map_err(|e| CoreError::io(dir.display().to_string(), e))?;
    let mut frames = Vec::new();
    for entry in entries {
        let entry = entry.map_err(|e| CoreError::io(dir.display().to_string(), e))?;
        let path = entry.path();
        let is_frame = path
            .extension()
            .and_then(|e| e.to_str())
            .map(|e| FRAME_EXTENSIONS.iter().any(|f| e.eq_ignore_ascii_case(f)))
            .unwrap_or(false);
        if path.is_file() && is_frame {
            frames.push(path);
        }
    }
    frames.sort_by(|a, b| a.file_name().cmp(&b.file_name()));
    Ok(frames)
}

/// Parses a JSON-lines face-box sidecar. Blank lines are skipped; any
/// malformed line fails with its 1-based line number.
pub fn read_face_boxes(path: impl AsRef<Path>) -> Result<Vec<FaceBoxRecord>> {
    let path = path.as_ref();
    let text =
        fs::read_to_string(path).map_err(|e| CoreError::io(path.display().to_string(), e))?;
    let mut records = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let rec: FaceBoxRecord =
            serde_json::from_str(line).map_err(|e| CoreError::BadFormat {
                detail: format!("{}:{}: {e}", path.display(), i + 1),
            })?;
        records.push(rec);
    }
    Ok(records)
}
