//! File adapters between CLI inputs and the core domain types: SMF1
//! float-map payloads and the JSON region-motion description.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use smf_core::{
    ConfidenceMap, FloatMap, FlowField, Grid2D, HeatmapOf, Mat2, RegionMotion, RegionParams,
    RegionSet, Vec2,
};

use crate::envelope::CliError;

pub fn load_flow(path: &Path) -> Result<FlowField, CliError> {
    Ok(FloatMap::read_binary(path)?.to_flow::<f64>()?)
}

pub fn save_flow(path: &Path, flow: &FlowField) -> Result<(), CliError> {
    Ok(FloatMap::from_flow(flow).write_binary(path)?)
}

pub fn load_confidence(path: &Path) -> Result<ConfidenceMap, CliError> {
    Ok(FloatMap::read_binary(path)?.to_confidence::<f64>()?)
}

/// Reads a K+1-channel SMF1 map as K region weight maps plus the
/// background map in the last channel.
pub fn load_region_set(path: &Path) -> Result<RegionSet, CliError> {
    let map = FloatMap::read_binary(path)?;
    let channels = map.channels();
    let grid = map.grid();
    let mut heatmaps = Vec::with_capacity(channels);
    for ch in 0..channels {
        heatmaps.push(channel_heatmap(&map, grid, ch)?);
    }
    let background = heatmaps.pop().ok_or_else(|| {
        CliError::invalid("region map needs at least the background channel")
    })?;
    Ok(RegionSet::new(heatmaps, background)?)
}

fn channel_heatmap(map: &FloatMap, grid: Grid2D, ch: usize) -> Result<HeatmapOf<f64>, CliError> {
    let mut data = Vec::with_capacity(grid.len());
    for r in 0..grid.height {
        for c in 0..grid.width {
            data.push(map.get(r, c, ch) as f64);
        }
    }
    Ok(HeatmapOf::new(grid, data)?)
}

/// JSON shape of the per-region motion description: row-major 2×2
/// matrices and (row, col) means.
#[derive(Debug, Serialize, Deserialize)]
pub struct ParamsDto {
    pub mean: [f64; 2],
    pub covariance: [f64; 4],
    pub affine: [f64; 4],
}

impl ParamsDto {
    fn build(&self) -> Result<RegionParams<f64>, CliError> {
        let [a, b, c, d] = self.covariance;
        let [e, f, g, h] = self.affine;
        Ok(RegionParams::new(
            Vec2::new(self.mean[0], self.mean[1]),
            Mat2::new(a, b, c, d),
            Mat2::new(e, f, g, h),
        )?)
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct MotionDto {
    pub source: ParamsDto,
    pub driving: ParamsDto,
}

impl MotionDto {
    fn build(&self) -> Result<RegionMotion, CliError> {
        Ok(RegionMotion::new(self.source.build()?, self.driving.build()?)?)
    }
}

/// Top-level motions file: one entry per region, plus an optional
/// whole-frame background motion.
#[derive(Debug, Serialize, Deserialize)]
pub struct MotionsFile {
    pub motions: Vec<MotionDto>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub background: Option<MotionDto>,
}

pub fn load_motions(path: &Path) -> Result<(Vec<RegionMotion>, Option<RegionMotion>), CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let file: MotionsFile = serde_json::from_str(&text).map_err(|e| {
        CliError::invalid(format!("{}: invalid motions JSON: {e}", path.display()))
    })?;
    let motions = file
        .motions
        .iter()
        .map(MotionDto::build)
        .collect::<Result<Vec<_>, _>>()?;
    let background = file.background.as_ref().map(MotionDto::build).transpose()?;
    Ok((motions, background))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn motions_json_round_trips_into_domain_types() {
        let text = r#"{
            "motions": [{
                "source": {"mean": [10.0, 12.0], "covariance": [2.0, 0.0, 0.0, 2.0],
                            "affine": [1.0, 0.0, 0.0, 1.0]},
                "driving": {"mean": [11.0, 12.5], "covariance": [2.0, 0.0, 0.0, 2.0],
                             "affine": [1.0, 0.0, 0.0, 1.0]}
            }]
        }"#;
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("motions.json");
        std::fs::write(&path, text).unwrap();
        let (motions, background) = load_motions(&path).unwrap();
        assert_eq!(motions.len(), 1);
        assert!(background.is_none());
        assert_eq!(motions[0].source.mean.row, 10.0);
    }

    #[test]
    fn singular_affine_is_rejected() {
        let text = r#"{
            "motions": [{
                "source": {"mean": [0.0, 0.0], "covariance": [1.0, 0.0, 0.0, 1.0],
                            "affine": [0.0, 0.0, 0.0, 0.0]},
                "driving": {"mean": [0.0, 0.0], "covariance": [1.0, 0.0, 0.0, 1.0],
                             "affine": [1.0, 0.0, 0.0, 1.0]}
            }]
        }"#;
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("motions.json");
        std::fs::write(&path, text).unwrap();
        assert!(load_motions(&path).is_err());
    }
}
