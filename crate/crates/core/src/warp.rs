//! Backward bilinear warping of images through dense flow fields.

use rayon::prelude::*;

use crate::flow::FlowField;
use crate::image_buf::ImageBuf;
use crate::{CoreError, Result, Scalar};

/// Sample `src` at each coordinate of the backward `flow`, bilinearly
/// interpolating between the four surrounding pixel centers. Coordinates
/// outside the image clamp to the nearest edge pixel, and outputs stay in
/// `[0, 1]`. The image and flow must share one grid.
///
/// Integer-coordinate samples (an identity flow in particular) return the
/// stored pixel values bit-exactly.
pub fn warp_bilinear<T: Scalar>(src: &ImageBuf<T>, flow: &FlowField<T>) -> Result<ImageBuf<T>> {
    src.grid().expect_matches(&flow.grid())?;
    if !src.in_unit_range() {
        return Err(CoreError::InvalidParameter {
            detail: "warp source values must lie in [0, 1]".into(),
        });
    }
    let grid = src.grid();
    let channels = src.channels();
    let data: Vec<T> = (0..grid.height)
        .into_par_iter()
        .flat_map_iter(|r| {
            let mut row = Vec::with_capacity(grid.width * channels);
            for c in 0..grid.width {
                let coord = flow.get(r, c);
                sample_into(src, coord.row, coord.col, &mut row);
            }
            row
        })
        .collect();
    ImageBuf::new(grid, channels, data)
}

/// Push one bilinear sample (all channels) into `out`. Coordinates clamp
/// to the image borders; outputs clamp to `[0, 1]`.
pub(crate) fn sample_into<T: Scalar>(image: &ImageBuf<T>, row: T, col: T, out: &mut Vec<T>) {
    let h = image.height();
    let w = image.width();
    let max_r = T::from_f64_lossy((h - 1) as f64);
    let max_c = T::from_f64_lossy((w - 1) as f64);
    let r = row.max(T::zero()).min(max_r);
    let c = col.max(T::zero()).min(max_c);

    let r0f = r.floor();
    let c0f = c.floor();
    let fr = r - r0f;
    let fc = c - c0f;
    let r0 = r0f.to_f64().unwrap_or(0.0) as usize;
    let c0 = c0f.to_f64().unwrap_or(0.0) as usize;

    if fr == T::zero() && fc == T::zero() {
        for ch in 0..image.channels() {
            out.push(image.get(r0, c0, ch));
        }
        return;
    }

    let r1 = (r0 + 1).min(h - 1);
    let c1 = (c0 + 1).min(w - 1);
    let one = T::one();
    let w00 = (one - fr) * (one - fc);
    let w01 = (one - fr) * fc;
    let w10 = fr * (one - fc);
    let w11 = fr * fc;
    for ch in 0..image.channels() {
        let p00 = image.get(r0, c0, ch);
        let p01 = image.get(r0, c1, ch);
        let p10 = image.get(r1, c0, ch);
        let p11 = image.get(r1, c1, ch);
        let v = w00 * p00 + w01 * p01 + w10 * p10 + w11 * p11;
        // Convex combination of unit-range values; the clamp only absorbs
        // last-ulp rounding above 1.
        out.push(v.max(T::zero()).min(one));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Vec2;
    use crate::Grid2D;
    use approx::assert_relative_eq;

    fn grid(h: usize, w: usize) -> Grid2D {
        Grid2D::new(h, w).unwrap()
    }

    #[test]
    fn identity_flow_is_bit_exact() {
        let g = grid(9, 13);
        let image = ImageBuf::from_fn(g, |r, c| ((r * 31 + c * 17) % 97) as f64 / 96.0).unwrap();
        let out = warp_bilinear(&image, &FlowField::identity(g)).unwrap();
        assert_eq!(out.data(), image.data());
    }

    #[test]
    fn integer_shift_matches_index_oracle() {
        let g = grid(3, 8);
        let image = ImageBuf::from_fn(g, |_, c| c as f64 / 7.0).unwrap();
        let flow = FlowField::from_fn(g, |r, c| Vec2::new(r as f64, c as f64 + 1.0)).unwrap();
        let out = warp_bilinear(&image, &flow).unwrap();
        for r in 0..3 {
            for c in 0..7 {
                assert_eq!(out.value(r, c), image.value(r, c + 1));
            }
            // Past the last column the sample clamps to the edge pixel.
            assert_eq!(out.value(r, 7), image.value(r, 7));
        }
    }

    #[test]
    fn half_pixel_shift_of_linear_ramp_is_exact_in_interior() {
        // Power-of-two ramp: the interpolated midpoints are exact floats.
        let g = grid(4, 8);
        let image = ImageBuf::from_fn(g, |_, c| c as f64 * 0.125).unwrap();
        let flow = FlowField::from_fn(g, |r, c| Vec2::new(r as f64, c as f64 + 0.5)).unwrap();
        let out = warp_bilinear(&image, &flow).unwrap();
        for r in 0..4 {
            for c in 0..7 {
                assert_eq!(out.value(r, c), c as f64 * 0.125 + 0.0625);
            }
            assert_eq!(out.value(r, 7), 7.0 * 0.125);
        }

        // General ramp v = c/(W-1): same shift agrees with the closed form
        // to rounding error.
        let image = ImageBuf::from_fn(g, |_, c| c as f64 / 7.0).unwrap();
        let out = warp_bilinear(&image, &flow).unwrap();
        for r in 0..4 {
            for c in 0..7 {
                assert_relative_eq!(out.value(r, c), (c as f64 + 0.5) / 7.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn out_of_range_coordinates_clamp_to_edges() {
        let g = grid(3, 3);
        let image = ImageBuf::from_fn(g, |r, c| (r * 3 + c) as f64 / 8.0).unwrap();
        let flow = FlowField::from_fn(g, |_, _| Vec2::new(-10.0, 100.0)).unwrap();
        let out = warp_bilinear(&image, &flow).unwrap();
        for &v in out.data() {
            assert_eq!(v, image.value(0, 2));
        }
    }

    #[test]
    fn multi_channel_samples_independently() {
        let g = grid(2, 2);
        let image =
            ImageBuf::new(g, 2, vec![0.0, 1.0, 0.5, 0.25, 0.75, 0.125, 1.0, 0.0]).unwrap();
        let flow = FlowField::from_fn(g, |_, _| Vec2::new(0.0, 1.0)).unwrap();
        let out = warp_bilinear(&image, &flow).unwrap();
        for r in 0..2 {
            for c in 0..2 {
                assert_eq!(out.get(r, c, 0), image.get(0, 1, 0));
                assert_eq!(out.get(r, c, 1), image.get(0, 1, 1));
            }
        }
    }

    #[test]
    fn sub_pixel_round_trip_has_small_error() {
        let g = grid(32, 32);
        let image = ImageBuf::from_fn(g, |r, c| {
            let x = r as f64 / 31.0;
            let y = c as f64 / 31.0;
            0.5 + 0.4 * (std::f64::consts::PI * x).cos() * (std::f64::consts::PI * y).sin()
        })
        .unwrap();
        let (dr, dc) = (0.3, -0.2);
        let fwd = FlowField::from_fn(g, |r, c| Vec2::new(r as f64 + dr, c as f64 + dc)).unwrap();
        let bwd = FlowField::from_fn(g, |r, c| Vec2::new(r as f64 - dr, c as f64 - dc)).unwrap();
        let round = warp_bilinear(&warp_bilinear(&image, &fwd).unwrap(), &bwd).unwrap();
        let mae: f64 = round
            .data()
            .iter()
            .zip(image.data())
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>()
            / round.data().len() as f64;
        assert!(mae < 1e-2, "round-trip MAE too large: {mae}");
    }

    #[test]
    fn grid_mismatch_and_range_rejected() {
        let image = ImageBuf::from_fn(grid(4, 4), |r, c| (r + c) as f64 / 6.0).unwrap();
        let flow = FlowField::<f64>::identity(grid(2, 6));
        assert!(matches!(
            warp_bilinear(&image, &flow),
            Err(CoreError::GridMismatch { .. })
        ));
        let loud = ImageBuf::from_fn(grid(2, 2), |r, c| (r + c) as f64 * 3.0).unwrap();
        assert!(warp_bilinear(&loud, &FlowField::identity(grid(2, 2))).is_err());
    }
}
