//! Dense backward flow fields: per-pixel convex combination of region
//! backward maps plus a background map, and confidence masking of
//! generated frames.

use rayon::prelude::*;

use crate::heatmap::RegionSet;
use crate::image_buf::ImageBuf;
use crate::linalg::{Mat2, Vec2};
use crate::motion::{region_backward_map, RegionMotion};
use crate::{CoreError, Grid2D, Result, Scalar};

/// Dense backward map: for each destination pixel `(r, c)` the field holds
/// the absolute source coordinate to sample, in `(row, col)` pixels.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowField<T> {
    grid: Grid2D,
    data: Vec<Vec2<T>>,
}

impl<T: Scalar> FlowField<T> {
    pub fn new(grid: Grid2D, data: Vec<Vec2<T>>) -> Result<Self> {
        if data.len() != grid.len() {
            return Err(CoreError::BadBufferLength {
                grid,
                channels: 2,
                actual: data.len() * 2,
            });
        }
        if let Some(i) = data.iter().position(|v| !v.is_finite()) {
            return Err(CoreError::NonFinite { index: i });
        }
        Ok(FlowField { grid, data })
    }

    pub fn from_fn(grid: Grid2D, f: impl Fn(usize, usize) -> Vec2<T>) -> Result<Self> {
        let mut data = Vec::with_capacity(grid.len());
        for r in 0..grid.height {
            for c in 0..grid.width {
                data.push(f(r, c));
            }
        }
        FlowField::new(grid, data)
    }

    /// The flow that samples every pixel from itself.
    pub fn identity(grid: Grid2D) -> Self {
        let mut data = Vec::with_capacity(grid.len());
        for r in 0..grid.height {
            for c in 0..grid.width {
                data.push(Vec2::new(
                    T::from_f64_lossy(r as f64),
                    T::from_f64_lossy(c as f64),
                ));
            }
        }
        FlowField { grid, data }
    }

    pub fn grid(&self) -> Grid2D {
        self.grid
    }

    pub fn data(&self) -> &[Vec2<T>] {
        &self.data
    }

    pub fn get(&self, row: usize, col: usize) -> Vec2<T> {
        self.data[self.grid.index(row, col)]
    }
}

/// Per-pixel confidence in `[0, 1]`, multiplied into generated frames to
/// down-weight regions the motion model cannot explain.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfidenceMap<T> {
    grid: Grid2D,
    data: Vec<T>,
}

impl<T: Scalar> ConfidenceMap<T> {
    pub fn new(grid: Grid2D, data: Vec<T>) -> Result<Self> {
        if data.len() != grid.len() {
            return Err(CoreError::BadBufferLength {
                grid,
                channels: 1,
                actual: data.len(),
            });
        }
        for (i, &v) in data.iter().enumerate() {
            if !v.is_finite() {
                return Err(CoreError::NonFinite { index: i });
            }
            if v < T::zero() || v > T::one() {
                return Err(CoreError::ConfidenceRange {
                    value: v.to_f64().unwrap_or(f64::NAN),
                    index: i,
                });
            }
        }
        Ok(ConfidenceMap { grid, data })
    }

    pub fn from_fn(grid: Grid2D, f: impl Fn(usize, usize) -> T) -> Result<Self> {
        let mut data = Vec::with_capacity(grid.len());
        for r in 0..grid.height {
            for c in 0..grid.width {
                data.push(f(r, c));
            }
        }
        ConfidenceMap::new(grid, data)
    }

    pub fn grid(&self) -> Grid2D {
        self.grid
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn value(&self, row: usize, col: usize) -> T {
        self.data[self.grid.index(row, col)]
    }
}

/// How per-pixel region weights are normalized before mixing maps.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum WeightMode {
    /// Divide each map's value by the sum over all maps. Errors at pixels
    /// where every map (regions and background) is zero.
    #[default]
    Distribution,
    /// Softmax over map values with the given temperature; always defined.
    Softmax { temperature: f64 },
}

/// A composed flow plus the normalized per-map weights that produced it,
/// for inspection and debugging. `weights[k]` matches `regions()[k]`; the
/// final entry is the background weight. At every pixel the weights are
/// nonnegative and sum to one.
#[derive(Debug, Clone, PartialEq)]
pub struct ComposedFlow<T> {
    pub flow: FlowField<T>,
    pub weights: Vec<crate::heatmap::Heatmap<T>>,
}

/// Mix the K region backward maps and the background map into one dense
/// flow, weighting each map at each pixel by the (normalized) weight
/// heatmaps. The background map is the identity unless an explicit
/// `background` motion is supplied for the whole frame.
pub fn compose_flow<T: Scalar>(
    motions: &[RegionMotion<T>],
    weights: &RegionSet<T>,
    background: Option<&RegionMotion<T>>,
    mode: WeightMode,
) -> Result<FlowField<T>> {
    Ok(compose_flow_detailed(motions, weights, background, mode)?.flow)
}

/// [`compose_flow`] variant that also returns the normalized weights.
pub fn compose_flow_detailed<T: Scalar>(
    motions: &[RegionMotion<T>],
    regions: &RegionSet<T>,
    background: Option<&RegionMotion<T>>,
    mode: WeightMode,
) -> Result<ComposedFlow<T>> {
    let k = regions.region_count();
    if motions.len() != k {
        return Err(CoreError::RegionCountMismatch {
            motions: motions.len(),
            weights: k,
        });
    }
    if let WeightMode::Softmax { temperature } = mode {
        if temperature <= 0.0 || temperature.is_nan() {
            return Err(CoreError::InvalidParameter {
                detail: format!("temperature must be positive, got {temperature}"),
            });
        }
    }
    let grid = regions.grid();

    // Hoist the per-region linear part A_s A_d^-1 out of the pixel loop.
    let mut linear = Vec::with_capacity(k);
    for m in motions {
        let inv = m
            .driving
            .affine
            .inverse()
            .ok_or_else(|| CoreError::SingularAffine {
                det: m.driving.affine.det().to_f64().unwrap_or(f64::NAN),
            })?;
        linear.push(m.source.affine.mul_mat(&inv));
    }
    if let Some(bg) = background {
        if bg.driving.affine.inverse().is_none() {
            return Err(CoreError::SingularAffine {
                det: bg.driving.affine.det().to_f64().unwrap_or(f64::NAN),
            });
        }
    }

    let rows: Vec<Result<ComposedRow<T>>> = (0..grid.height)
        .into_par_iter()
        .map(|r| compose_row(regions, motions, &linear, background, mode, grid, r))
        .collect();

    let mut flow_data = Vec::with_capacity(grid.len());
    let mut weight_data: Vec<Vec<T>> = (0..=k).map(|_| Vec::with_capacity(grid.len())).collect();
    for row in rows {
        let (flow_row, weight_row) = row?;
        flow_data.extend(flow_row);
        for (plane, values) in weight_data.iter_mut().zip(weight_row) {
            plane.extend(values);
        }
    }

    let flow = FlowField::new(grid, flow_data)?;
    let weights = weight_data
        .into_iter()
        .map(|plane| crate::heatmap::Heatmap::new(grid, plane))
        .collect::<Result<Vec<_>>>()?;
    Ok(ComposedFlow { flow, weights })
}

/// One composed row: flow samples plus the K+1 per-map weight values.
type ComposedRow<T> = (Vec<Vec2<T>>, Vec<Vec<T>>);

#[allow(clippy::too_many_arguments)]
fn compose_row<T: Scalar>(
    regions: &RegionSet<T>,
    motions: &[RegionMotion<T>],
    linear: &[Mat2<T>],
    background: Option<&RegionMotion<T>>,
    mode: WeightMode,
    grid: Grid2D,
    r: usize,
) -> Result<ComposedRow<T>> {
    let k = regions.region_count();
    let mut flow_row = Vec::with_capacity(grid.width);
    let mut weight_row: Vec<Vec<T>> = (0..=k).map(|_| Vec::with_capacity(grid.width)).collect();
    let mut raw = vec![T::zero(); k + 1];
    for c in 0..grid.width {
        for (k_i, region) in regions.regions().iter().enumerate() {
            raw[k_i] = region.value(r, c);
        }
        raw[k] = regions.background().value(r, c);
        let weights = normalize_weights(&raw, mode).map_err(|e| match e {
            CoreError::ZeroWeights { .. } => CoreError::ZeroWeights { row: r, col: c },
            other => other,
        })?;

        let z = Vec2::new(T::from_f64_lossy(r as f64), T::from_f64_lossy(c as f64));
        let mut out = Vec2::zero();
        for k_i in 0..k {
            let cand = motions[k_i]
                .source
                .mean
                .add(linear[k_i].mul_vec(z.sub(motions[k_i].driving.mean)));
            out = out.add(cand.scale(weights[k_i]));
        }
        let bg_cand = match background {
            None => z,
            Some(m) => region_backward_map(m, z)?,
        };
        out = out.add(bg_cand.scale(weights[k]));

        flow_row.push(out);
        for (plane, &w) in weight_row.iter_mut().zip(&weights) {
            plane.push(w);
        }
    }
    Ok((flow_row, weight_row))
}

fn normalize_weights<T: Scalar>(raw: &[T], mode: WeightMode) -> Result<Vec<T>> {
    match mode {
        WeightMode::Distribution => {
            let total = raw.iter().fold(T::zero(), |acc, &v| acc + v);
            if total <= T::zero() {
                return Err(CoreError::ZeroWeights { row: 0, col: 0 });
            }
            Ok(raw.iter().map(|&v| v / total).collect())
        }
        WeightMode::Softmax { temperature } => {
            let tau = T::from_f64_lossy(temperature);
            let hi = raw
                .iter()
                .fold(T::neg_infinity(), |acc, &v| acc.max(v * tau));
            let exps: Vec<T> = raw.iter().map(|&v| (v * tau - hi).exp()).collect();
            let total = exps.iter().fold(T::zero(), |acc, &v| acc + v);
            Ok(exps.into_iter().map(|v| v / total).collect())
        }
    }
}

/// Multiply every channel of `image` by the per-pixel confidence value.
pub fn apply_confidence<T: Scalar>(
    image: &ImageBuf<T>,
    confidence: &ConfidenceMap<T>,
) -> Result<ImageBuf<T>> {
    image.grid().expect_matches(&confidence.grid())?;
    let grid = image.grid();
    let channels = image.channels();
    let mut data = Vec::with_capacity(grid.len() * channels);
    for r in 0..grid.height {
        for c in 0..grid.width {
            let w = confidence.value(r, c);
            for ch in 0..channels {
                data.push(image.get(r, c, ch) * w);
            }
        }
    }
    ImageBuf::new(grid, channels, data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heatmap::Heatmap;
    use crate::motion::RegionParams;
    use approx::assert_relative_eq;

    fn grid(h: usize, w: usize) -> Grid2D {
        Grid2D::new(h, w).unwrap()
    }

    fn translation_motion(dr: f64, dc: f64) -> RegionMotion<f64> {
        // Backward map for this motion sends z to z + (dr, dc).
        RegionMotion::new(
            RegionParams::from_mean_affine(Vec2::new(dr, dc), Mat2::identity()).unwrap(),
            RegionParams::from_mean_affine(Vec2::zero(), Mat2::identity()).unwrap(),
        )
        .unwrap()
    }

    fn corner_region_set(g: Grid2D) -> RegionSet<f64> {
        // One region concentrated at (0, 0); background covers the rest.
        let region = Heatmap::from_fn(g, |r, c| if r == 0 && c == 0 { 1.0 } else { 0.0 }).unwrap();
        let background =
            Heatmap::from_fn(g, |r, c| if r == 0 && c == 0 { 0.0 } else { 1.0 }).unwrap();
        RegionSet::new(vec![region], background).unwrap()
    }

    #[test]
    fn background_only_pixels_are_identity_bit_exact() {
        let g = grid(6, 7);
        let set = corner_region_set(g);
        let motions = [translation_motion(2.5, -1.0)];
        let flow = compose_flow(&motions, &set, None, WeightMode::Distribution).unwrap();
        for r in 0..6 {
            for c in 0..7 {
                if r == 0 && c == 0 {
                    assert_eq!(flow.get(r, c), Vec2::new(2.5, -1.0));
                } else {
                    // Bit-exact identity where only the background weight fires.
                    assert_eq!(flow.get(r, c), Vec2::new(r as f64, c as f64));
                }
            }
        }
    }

    #[test]
    fn weights_are_normalized_and_exposed() {
        let g = grid(2, 2);
        let region = Heatmap::new(g, vec![3.0, 1.0, 0.5, 2.0]).unwrap();
        let background = Heatmap::new(g, vec![1.0, 1.0, 0.5, 0.0]).unwrap();
        let set = RegionSet::new(vec![region], background).unwrap();
        let motions = [translation_motion(1.0, 0.0)];
        let detail =
            compose_flow_detailed(&motions, &set, None, WeightMode::Distribution).unwrap();
        assert_eq!(detail.weights.len(), 2);
        for r in 0..2 {
            for c in 0..2 {
                let total: f64 = detail.weights.iter().map(|w| w.value(r, c)).sum();
                assert_relative_eq!(total, 1.0, epsilon = 1e-12);
            }
        }
        assert_relative_eq!(detail.weights[0].value(0, 0), 0.75, epsilon = 1e-12);
        // Pixel (1, 1): region weight 1 => pure region map.
        assert_eq!(detail.flow.get(1, 1), Vec2::new(2.0, 1.0));
        // Pixel (0, 0): 0.75 * translated + 0.25 * identity.
        assert_relative_eq!(detail.flow.get(0, 0).row, 0.75, epsilon = 1e-12);
        assert_relative_eq!(detail.flow.get(0, 0).col, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn zero_weight_pixel_errors_in_distribution_mode() {
        let g = grid(2, 2);
        let region = Heatmap::new(g, vec![1.0, 0.0, 0.0, 0.0]).unwrap();
        let background = Heatmap::new(g, vec![0.0, 1.0, 1.0, 0.0]).unwrap();
        let set = RegionSet::new(vec![region], background).unwrap();
        let motions = [translation_motion(0.0, 1.0)];
        let err = compose_flow(&motions, &set, None, WeightMode::Distribution).unwrap_err();
        match err {
            CoreError::ZeroWeights { row, col } => assert_eq!((row, col), (1, 1)),
            other => panic!("unexpected error: {other}"),
        }
        // Softmax mode stays defined at the same pixel.
        let flow = compose_flow(&motions, &set, None, WeightMode::Softmax { temperature: 1.0 })
            .unwrap();
        let half = flow.get(1, 1);
        assert_relative_eq!(half.row, 1.0, epsilon = 1e-12);
        assert_relative_eq!(half.col, 1.5, epsilon = 1e-12);
    }

    #[test]
    fn background_motion_replaces_identity() {
        let g = grid(3, 3);
        let set = corner_region_set(g);
        let motions = [translation_motion(0.0, 0.0)];
        let bg = translation_motion(-1.0, 4.0);
        let flow = compose_flow(&motions, &set, Some(&bg), WeightMode::Distribution).unwrap();
        assert_eq!(flow.get(2, 2), Vec2::new(1.0, 6.0));
    }

    #[test]
    fn region_count_mismatch_rejected() {
        let g = grid(2, 2);
        let set = corner_region_set(g);
        let err = compose_flow(&[], &set, None, WeightMode::Distribution).unwrap_err();
        assert!(matches!(err, CoreError::RegionCountMismatch { .. }));
    }

    #[test]
    fn confidence_map_validates_range() {
        let g = grid(1, 2);
        assert!(ConfidenceMap::new(g, vec![0.0, 1.0]).is_ok());
        let err = ConfidenceMap::new(g, vec![0.5, 1.5]).unwrap_err();
        assert!(matches!(err, CoreError::ConfidenceRange { index: 1, .. }));
    }

    #[test]
    fn apply_confidence_scales_channels() {
        let g = grid(1, 2);
        let image = ImageBuf::new(g, 2, vec![0.5, 1.0, 0.25, 0.75]).unwrap();
        let conf = ConfidenceMap::new(g, vec![1.0, 0.5]).unwrap();
        let out = apply_confidence(&image, &conf).unwrap();
        assert_eq!(out.get(0, 0, 0), 0.5);
        assert_eq!(out.get(0, 0, 1), 1.0);
        assert_eq!(out.get(0, 1, 0), 0.125);
        assert_eq!(out.get(0, 1, 1), 0.375);
    }

    #[test]
    fn identity_flow_constructor() {
        let f = FlowField::<f64>::identity(grid(2, 3));
        assert_eq!(f.get(1, 2), Vec2::new(1.0, 2.0));
        assert_eq!(f.data().len(), 6);
    }
}
