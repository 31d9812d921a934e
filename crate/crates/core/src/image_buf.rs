use crate::{CoreError, Grid2D, Result, Scalar};

/// Dense `H x W x C` value container, row-major with the channel index
/// fastest. Entries must be finite; pixel-valued images carry values in
/// `[0, 1]`, while loss inputs and feature maps may hold any finite value
/// (range is enforced at the image-file and filter boundaries, not here).
#[derive(Debug, Clone, PartialEq)]
pub struct ImageBuf<T> {
    grid: Grid2D,
    channels: usize,
    data: Vec<T>,
}

impl<T: Scalar> ImageBuf<T> {
    /// Wrap an existing buffer, validating length and finiteness.
    pub fn new(grid: Grid2D, channels: usize, data: Vec<T>) -> Result<Self> {
        if channels == 0 {
            return Err(CoreError::InvalidParameter {
                detail: "channel count must be at least 1".into(),
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
        Ok(ImageBuf {
            grid,
            channels,
            data,
        })
    }

    /// Single-channel image from a closure over `(row, col)`.
    pub fn from_fn(grid: Grid2D, f: impl Fn(usize, usize) -> T) -> Result<Self> {
        let mut data = Vec::with_capacity(grid.len());
        for r in 0..grid.height {
            for c in 0..grid.width {
                data.push(f(r, c));
            }
        }
        ImageBuf::new(grid, 1, data)
    }

    /// Multi-channel image from a closure over `(row, col, channel)`.
    pub fn from_fn_channels(
        grid: Grid2D,
        channels: usize,
        f: impl Fn(usize, usize, usize) -> T,
    ) -> Result<Self> {
        let mut data = Vec::with_capacity(grid.len() * channels);
        for r in 0..grid.height {
            for c in 0..grid.width {
                for ch in 0..channels {
                    data.push(f(r, c, ch));
                }
            }
        }
        ImageBuf::new(grid, channels, data)
    }

    /// Constant-valued image.
    pub fn constant(grid: Grid2D, channels: usize, value: T) -> Result<Self> {
        ImageBuf::new(grid, channels, vec![value; grid.len() * channels])
    }

    pub fn grid(&self) -> Grid2D {
        self.grid
    }

    pub fn height(&self) -> usize {
        self.grid.height
    }

    pub fn width(&self) -> usize {
        self.grid.width
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize, ch: usize) -> T {
        self.data[(self.grid.index(row, col)) * self.channels + ch]
    }

    /// Single-channel accessor.
    #[inline]
    pub fn value(&self, row: usize, col: usize) -> T {
        debug_assert_eq!(self.channels, 1);
        self.data[self.grid.index(row, col)]
    }

    pub fn set(&mut self, row: usize, col: usize, ch: usize, v: T) {
        self.data[(self.grid.index(row, col)) * self.channels + ch] = v;
    }

    /// True when every entry lies in `[0, 1]`.
    pub fn in_unit_range(&self) -> bool {
        self.data
            .iter()
            .all(|&v| v >= T::zero() && v <= T::one())
    }

    /// Elementwise map; the result is re-validated for finiteness.
    pub fn map(&self, f: impl Fn(T) -> T) -> Result<Self> {
        ImageBuf::new(
            self.grid,
            self.channels,
            self.data.iter().map(|&v| f(v)).collect(),
        )
    }

    /// Luma reduction of an RGB image (BT.601 weights); single-channel
    /// images pass through unchanged.
    pub fn to_grayscale(&self) -> Result<Self> {
        match self.channels {
            1 => Ok(self.clone()),
            3 => {
                let wr = T::from_f64_lossy(0.299);
                let wg = T::from_f64_lossy(0.587);
                let wb = T::from_f64_lossy(0.114);
                let mut data = Vec::with_capacity(self.grid.len());
                for px in self.data.chunks_exact(3) {
                    data.push(wr * px[0] + wg * px[1] + wb * px[2]);
                }
                ImageBuf::new(self.grid, 1, data)
            }
            n => Err(CoreError::ShapeMismatch {
                detail: format!("cannot convert {n}-channel image to grayscale"),
            }),
        }
    }

    pub(crate) fn expect_same_shape(&self, other: &ImageBuf<T>) -> Result<()> {
        if self.grid != other.grid || self.channels != other.channels {
            return Err(CoreError::ShapeMismatch {
                detail: format!(
                    "{}x{} vs {}x{}",
                    self.grid, self.channels, other.grid, other.channels
                ),
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(h: usize, w: usize) -> Grid2D {
        Grid2D::new(h, w).unwrap()
    }

    #[test]
    fn rejects_wrong_length_and_nan() {
        assert!(ImageBuf::new(grid(2, 2), 1, vec![0.0f64; 3]).is_err());
        let e = ImageBuf::new(grid(2, 2), 1, vec![0.0f64, f64::NAN, 0.0, 0.0]);
        assert!(matches!(e, Err(CoreError::NonFinite { index: 1 })));
    }

    #[test]
    fn channel_fastest_layout() {
        let img = ImageBuf::new(grid(1, 2), 2, vec![1.0f64, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(img.get(0, 0, 0), 1.0);
        assert_eq!(img.get(0, 0, 1), 2.0);
        assert_eq!(img.get(0, 1, 0), 3.0);
        assert_eq!(img.get(0, 1, 1), 4.0);
    }

    #[test]
    fn grayscale_weights() {
        let img = ImageBuf::new(grid(1, 1), 3, vec![1.0f64, 0.0, 0.0]).unwrap();
        assert_eq!(img.to_grayscale().unwrap().value(0, 0), 0.299);
    }
}
