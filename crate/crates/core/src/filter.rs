//! The fixed 3×3 enhancement filters (sharpen, Gaussian smooth), a generic
//! 3×3 convolution, and area-average resolution changes.

use crate::image_buf::ImageBuf;
use crate::{CoreError, Grid2D, Result, Scalar};

/// 3×3 sharpening kernel (entries sum to 1).
pub const SHARPEN_KERNEL: [[f64; 3]; 3] = [
    [-1.0, -1.0, -1.0],
    [-1.0, 9.0, -1.0],
    [-1.0, -1.0, -1.0],
];

/// 3×3 binomial smoothing kernel, normalized to sum to 1.
pub const GAUSSIAN_KERNEL: [[f64; 3]; 3] = [
    [1.0 / 16.0, 2.0 / 16.0, 1.0 / 16.0],
    [2.0 / 16.0, 4.0 / 16.0, 2.0 / 16.0],
    [1.0 / 16.0, 2.0 / 16.0, 1.0 / 16.0],
];

fn expect_min_side<T: Scalar>(img: &ImageBuf<T>, min_side: usize) -> Result<()> {
    let g = img.grid();
    if g.height < min_side || g.width < min_side {
        return Err(CoreError::ImageTooSmall { grid: g, min_side });
    }
    Ok(())
}

fn expect_unit_range<T: Scalar>(img: &ImageBuf<T>, op: &str) -> Result<()> {
    if !img.in_unit_range() {
        return Err(CoreError::InvalidParameter {
            detail: format!("{op} requires image values in [0, 1]"),
        });
    }
    Ok(())
}

#[inline]
fn clamp_index(i: usize, offset: isize, len: usize) -> usize {
    (i as isize + offset).clamp(0, len as isize - 1) as usize
}

/// Raw 3×3 convolution with edge replication; no clamping of the output.
///
/// Each output element is accumulated in a fixed order — the three kernel
/// columns left to right within a row, then the three row sums top to
/// bottom — so results are reproducible bit for bit.
pub fn convolve3x3<T: Scalar>(img: &ImageBuf<T>, kernel: &[[f64; 3]; 3]) -> Result<ImageBuf<T>> {
    expect_min_side(img, 3)?;
    let mut k = [[T::zero(); 3]; 3];
    for (i, row) in kernel.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            k[i][j] = T::from_f64_lossy(v);
        }
    }
    let g = img.grid();
    let channels = img.channels();
    let mut data = Vec::with_capacity(g.len() * channels);
    for r in 0..g.height {
        for c in 0..g.width {
            for ch in 0..channels {
                let mut total = T::zero();
                for (i, krow) in k.iter().enumerate() {
                    let rr = clamp_index(r, i as isize - 1, g.height);
                    let p0 = img.get(rr, clamp_index(c, -1, g.width), ch);
                    let p1 = img.get(rr, c, ch);
                    let p2 = img.get(rr, clamp_index(c, 1, g.width), ch);
                    let row_sum = (krow[0] * p0 + krow[1] * p1) + krow[2] * p2;
                    total = total + row_sum;
                }
                data.push(total);
            }
        }
    }
    ImageBuf::new(g, channels, data)
}

/// Sharpen with the fixed 3×3 kernel (9× center, −1 neighbors), edge
/// replication, output clamped to `[0, 1]`.
///
/// The convolution is evaluated as `p + (8p − Σ neighbors)` with a pairwise
/// neighbor sum — algebraically identical to the kernel, and exact on
/// constant images because the two 8p terms cancel without rounding.
pub fn sharpen<T: Scalar>(img: &ImageBuf<T>) -> Result<ImageBuf<T>> {
    expect_min_side(img, 3)?;
    expect_unit_range(img, "sharpen")?;
    let g = img.grid();
    let channels = img.channels();
    let eight = T::from_f64_lossy(8.0);
    let mut data = Vec::with_capacity(g.len() * channels);
    for r in 0..g.height {
        for c in 0..g.width {
            for ch in 0..channels {
                let mut n = [T::zero(); 8];
                let mut idx = 0;
                for dr in -1isize..=1 {
                    for dc in -1isize..=1 {
                        if dr == 0 && dc == 0 {
                            continue;
                        }
                        n[idx] = img.get(
                            clamp_index(r, dr, g.height),
                            clamp_index(c, dc, g.width),
                            ch,
                        );
                        idx += 1;
                    }
                }
                let s = ((n[0] + n[1]) + (n[2] + n[3])) + ((n[4] + n[5]) + (n[6] + n[7]));
                let p = img.get(r, c, ch);
                let v = p + (eight * p - s);
                data.push(v.max(T::zero()).min(T::one()));
            }
        }
    }
    ImageBuf::new(g, channels, data)
}

/// Smooth with the normalized 3×3 binomial kernel, edge replication. The
/// output is clamped to `[0, 1]`, which only absorbs last-ulp rounding.
pub fn gaussian_smooth<T: Scalar>(img: &ImageBuf<T>) -> Result<ImageBuf<T>> {
    expect_unit_range(img, "gaussian_smooth")?;
    let out = convolve3x3(img, &GAUSSIAN_KERNEL)?;
    out.map(|v| v.max(T::zero()).min(T::one()))
}

/// Sharpen, then Gaussian-smooth. Identities: `enhance(img)` equals
/// `gaussian_smooth(sharpen(img))` bit for bit, and outputs stay in `[0, 1]`.
pub fn enhance<T: Scalar>(img: &ImageBuf<T>) -> Result<ImageBuf<T>> {
    gaussian_smooth(&sharpen(img)?)
}

/// Area-average (box filter) resample to `side × side`. Each output cell
/// averages the source pixels it covers, with fractional edge coverage
/// when `side` does not divide the input.
pub fn downsample<T: Scalar>(img: &ImageBuf<T>, side: usize) -> Result<ImageBuf<T>> {
    let g = img.grid();
    if side < 1 || side > g.height || side > g.width {
        return Err(CoreError::InvalidParameter {
            detail: format!("downsample side {side} must be in 1..={}", g.height.min(g.width)),
        });
    }
    expect_unit_range(img, "downsample")?;
    let out_grid = Grid2D::new(side, side)?;
    let channels = img.channels();
    let row_spans = axis_spans(g.height, side);
    let col_spans = axis_spans(g.width, side);
    let mut data = Vec::with_capacity(out_grid.len() * channels);
    for &(r0, r1) in &row_spans {
        for &(c0, c1) in &col_spans {
            for ch in 0..channels {
                let mut acc = T::zero();
                let mut area = T::zero();
                let mut i = r0.floor() as usize;
                while (i as f64) < r1 {
                    let wr = (r1.min((i + 1) as f64) - r0.max(i as f64)).max(0.0);
                    let mut j = c0.floor() as usize;
                    while (j as f64) < c1 {
                        let wc = (c1.min((j + 1) as f64) - c0.max(j as f64)).max(0.0);
                        let w = T::from_f64_lossy(wr * wc);
                        acc = acc + w * img.get(i, j, ch);
                        area = area + w;
                        j += 1;
                    }
                    i += 1;
                }
                data.push((acc / area).max(T::zero()).min(T::one()));
            }
        }
    }
    ImageBuf::new(out_grid, channels, data)
}

/// Fractional source span `[lo, hi)` covered by each of `side` output cells.
fn axis_spans(input: usize, side: usize) -> Vec<(f64, f64)> {
    let step = input as f64 / side as f64;
    (0..side)
        .map(|i| (i as f64 * step, (i + 1) as f64 * step))
        .collect()
}

/// Nearest-neighbor resample to `side × side` (used to undo a downsample
/// for visual inspection; exact replication when `side` is a multiple of
/// the input side).
pub fn upsample_nearest<T: Scalar>(img: &ImageBuf<T>, side: usize) -> Result<ImageBuf<T>> {
    if side < 1 {
        return Err(CoreError::InvalidParameter {
            detail: "upsample side must be at least 1".into(),
        });
    }
    let g = img.grid();
    let out_grid = Grid2D::new(side, side)?;
    let channels = img.channels();
    let mut data = Vec::with_capacity(out_grid.len() * channels);
    for r in 0..side {
        let sr = (r * g.height) / side;
        for c in 0..side {
            let sc = (c * g.width) / side;
            for ch in 0..channels {
                data.push(img.get(sr, sc, ch));
            }
        }
    }
    ImageBuf::new(out_grid, channels, data)
}
