//! Portable float-map container for heatmaps, flow fields, confidence
//! maps, and images.
//!
//! Binary layout (`SMF1`): 4 magic bytes `SMF1`, then height, width, and
//! channel count as little-endian u32, then `h·w·c` little-endian f32
//! values, row-major with channels fastest. The text twin (`SMFT`) is a
//! header line `SMFT <h> <w> <c>` followed by one line of ASCII floats per
//! row; it round-trips exactly and diffs cleanly, for small test fixtures.

use std::fs;
use std::path::Path;

use crate::flow::{ConfidenceMap, FlowField};
use crate::heatmap::Heatmap;
use crate::image_buf::ImageBuf;
use crate::linalg::Vec2;
use crate::{CoreError, Grid2D, Result, Scalar};

/// Magic bytes opening the binary container.
pub const BINARY_MAGIC: [u8; 4] = *b"SMF1";
/// Token opening the text container.
pub const TEXT_MAGIC: &str = "SMFT";

/// A finite f32 grid with one or more channels — the on-disk currency all
/// grid-shaped domain types convert through.
#[derive(Debug, Clone, PartialEq)]
pub struct FloatMap {
    grid: Grid2D,
    channels: usize,
    data: Vec<f32>,
}

impl FloatMap {
    pub fn new(grid: Grid2D, channels: usize, data: Vec<f32>) -> Result<Self> {
        if channels == 0 {
            return Err(CoreError::InvalidParameter {
                detail: "float map needs at least one channel".into(),
            });
        }
        if data.len() != grid.len() * channels {
            return Err(CoreError::BadBufferLength {
                grid,
                channels,
                actual: data.len(),
            });
        }
        if let Some(index) = data.iter().position(|v| !v.is_finite()) {
            return Err(CoreError::NonFinite { index });
        }
        Ok(FloatMap {
            grid,
            channels,
            data,
        })
    }

    pub fn grid(&self) -> Grid2D {
        self.grid
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize, ch: usize) -> f32 {
        self.data[self.grid.index(row, col) * self.channels + ch]
    }

    // ---- conversions to and from the domain types ----

    pub fn from_image<T: Scalar>(img: &ImageBuf<T>) -> Self {
        FloatMap {
            grid: img.grid(),
            channels: img.channels(),
            data: img
                .data()
                .iter()
                .map(|v| v.to_f64().unwrap_or(f64::NAN) as f32)
                .collect(),
        }
    }

    pub fn to_image<T: Scalar>(&self) -> Result<ImageBuf<T>> {
        ImageBuf::new(
            self.grid,
            self.channels,
            self.data
                .iter()
                .map(|&v| T::from_f64_lossy(v as f64))
                .collect(),
        )
    }

    pub fn from_heatmap<T: Scalar>(h: &Heatmap<T>) -> Self {
        FloatMap {
            grid: h.grid(),
            channels: 1,
            data: h
                .data()
                .iter()
                .map(|v| v.to_f64().unwrap_or(f64::NAN) as f32)
                .collect(),
        }
    }

    pub fn to_heatmap<T: Scalar>(&self) -> Result<Heatmap<T>> {
        self.expect_channels(1, "heatmap")?;
        Heatmap::new(
            self.grid,
            self.data
                .iter()
                .map(|&v| T::from_f64_lossy(v as f64))
                .collect(),
        )
    }

    /// Flow fields store the sampled source coordinate per pixel:
    /// channel 0 = row, channel 1 = col.
    pub fn from_flow<T: Scalar>(f: &FlowField<T>) -> Self {
        let mut data = Vec::with_capacity(f.grid().len() * 2);
        for v in f.data() {
            data.push(v.row.to_f64().unwrap_or(f64::NAN) as f32);
            data.push(v.col.to_f64().unwrap_or(f64::NAN) as f32);
        }
        FloatMap {
            grid: f.grid(),
            channels: 2,
            data,
        }
    }

    pub fn to_flow<T: Scalar>(&self) -> Result<FlowField<T>> {
        self.expect_channels(2, "flow field")?;
        let data = self
            .data
            .chunks_exact(2)
            .map(|p| {
                Vec2::new(
                    T::from_f64_lossy(p[0] as f64),
                    T::from_f64_lossy(p[1] as f64),
                )
            })
            .collect();
        FlowField::new(self.grid, data)
    }

    pub fn from_confidence<T: Scalar>(c: &ConfidenceMap<T>) -> Self {
        FloatMap {
            grid: c.grid(),
            channels: 1,
            data: c
                .data()
                .iter()
                .map(|v| v.to_f64().unwrap_or(f64::NAN) as f32)
                .collect(),
        }
    }

    pub fn to_confidence<T: Scalar>(&self) -> Result<ConfidenceMap<T>> {
        self.expect_channels(1, "confidence map")?;
        ConfidenceMap::new(
            self.grid,
            self.data
                .iter()
                .map(|&v| T::from_f64_lossy(v as f64))
                .collect(),
        )
    }

    fn expect_channels(&self, expected: usize, what: &str) -> Result<()> {
        if self.channels != expected {
            return Err(CoreError::ShapeMismatch {
                detail: format!(
                    "{what} needs {expected} channel(s), container has {}",
                    self.channels
                ),
            });
        }
        Ok(())
    }

    // ---- binary format ----

    pub fn to_binary_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(16 + self.data.len() * 4);
        out.extend_from_slice(&BINARY_MAGIC);
        out.extend_from_slice(&(self.grid.height as u32).to_le_bytes());
        out.extend_from_slice(&(self.grid.width as u32).to_le_bytes());
        out.extend_from_slice(&(self.channels as u32).to_le_bytes());
        for v in &self.data {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    pub fn from_binary_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < 16 {
            return Err(CoreError::BadFormat {
                detail: format!("container too short: {} bytes", bytes.len()),
            });
        }
        if bytes[0..4] != BINARY_MAGIC {
            return Err(CoreError::BadFormat {
                detail: "bad magic: expected SMF1".into(),
            });
        }
        let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().unwrap()) as usize;
        let (height, width, channels) = (u32_at(4), u32_at(8), u32_at(12));
        if channels == 0 {
            return Err(CoreError::BadFormat {
                detail: "zero channels".into(),
            });
        }
        let grid = Grid2D::new(height, width).map_err(|_| CoreError::BadFormat {
            detail: format!("bad dimensions {height}x{width}"),
        })?;
        let n = grid.len() * channels;
        let expected = 16 + n * 4;
        if bytes.len() != expected {
            return Err(CoreError::BadFormat {
                detail: format!("payload is {} bytes, expected {expected}", bytes.len()),
            });
        }
        let data = bytes[16..]
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
            .collect();
        FloatMap::new(grid, channels, data)
    }

    pub fn write_binary(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_binary_bytes())
            .map_err(|e| CoreError::io(path.display().to_string(), e))
    }

    pub fn read_binary(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let bytes =
            fs::read(path).map_err(|e| CoreError::io(path.display().to_string(), e))?;
        FloatMap::from_binary_bytes(&bytes)
    }

    // ---- text format ----

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "{TEXT_MAGIC} {} {} {}\n",
            self.grid.height, self.grid.width, self.channels
        );
        let per_row = self.grid.width * self.channels;
        for row in self.data.chunks_exact(per_row) {
            let line: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut tokens = text.split_whitespace();
        if tokens.next() != Some(TEXT_MAGIC) {
            return Err(CoreError::BadFormat {
                detail: format!("bad header: expected {TEXT_MAGIC}"),
            });
        }
        let mut dim = |name: &str| -> Result<usize> {
            tokens
                .next()
                .and_then(|t| t.parse::<usize>().ok())
                .ok_or_else(|| CoreError::BadFormat {
                    detail: format!("bad or missing {name}"),
                })
        };
        let height = dim("height")?;
        let width = dim("width")?;
        let channels = dim("channels")?;
        if channels == 0 {
            return Err(CoreError::BadFormat {
                detail: "zero channels".into(),
            });
        }
        let grid = Grid2D::new(height, width).map_err(|_| CoreError::BadFormat {
            detail: format!("bad dimensions {height}x{width}"),
        })?;
        let n = grid.len() * channels;
        let mut data = Vec::with_capacity(n);
        for (i, tok) in tokens.by_ref().take(n).enumerate() {
            let v: f32 = tok.parse().map_err(|_| CoreError::BadFormat {
                detail: format!("bad float {tok:?} at value {i}"),
            })?;
            data.push(v);
        }
        if data.len() != n {
            return Err(CoreError::BadFormat {
                detail: format!("expected {n} values, found {}", data.len()),
            });
        }
        if let Some(extra) = tokens.next() {
            return Err(CoreError::BadFormat {
                detail: format!("trailing token {extra:?} after {n} values"),
            });
        }
        FloatMap::new(grid, channels, data)
    }

    pub fn write_text(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_text()).map_err(|e| CoreError::io(path.display().to_string(), e))
    }

    pub fn read_text(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text =
            fs::read_to_string(path).map_err(|e| CoreError::io(path.display().to_string(), e))?;
        FloatMap::from_text(&text)
    }
}
