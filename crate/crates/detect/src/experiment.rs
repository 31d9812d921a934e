//! End-to-end evaluation: load frame features per video, train one model
//! per fold, classify test videos by frame-majority vote, and report
//! per-fold confusion matrices with cross-fold means.

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use smf_data::{ConfusionMatrix, DataError, Label, Manifest, MetricTriple};

use crate::error::{DetectError, Result};
use crate::features::{extract_features, sample_frames, FrameFeatures};
use crate::forest::{train_forest, ForestConfig};
use crate::model_io::Model;
use crate::split::{make_splits, ScenarioKind, SplitScenario, SplitSizes, FOLD_COUNT};
use crate::svm::{train_svm, SvmConfig};

/// Default number of frames scored per video.
pub const DEFAULT_FRAMES_PER_VIDEO: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Forest,
    Svm,
}

impl ModelKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::Forest => "forest",
            ModelKind::Svm => "svm",
        }
    }
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One video's sampled frame features plus its label.
#[derive(Debug, Clone, PartialEq)]
pub struct VideoSample {
    pub video_id: String,
    pub label: Label,
    pub frames: Vec<FrameFeatures>,
}

impl VideoSample {
    pub fn new(video_id: String, label: Label, frames: Vec<FrameFeatures>) -> Result<Self> {
        if frames.is_empty() {
            return Err(DetectError::InvalidParameter {
                detail: format!("video {video_id} has no frames"),
            });
        }
        Ok(VideoSample {
            video_id,
            label,
            frames,
        })
    }
}

/// Reads and featurizes up to `frames_per_video` frames for each listed
/// video. `root` anchors the manifest's relative `frames_path` entries.
/// Videos are processed in parallel; the output order matches `ids`.
pub fn load_video_samples(
    manifest: &Manifest,
    ids: &[String],
    root: &Path,
    frames_per_video: usize,
) -> Result<Vec<VideoSample>> {
    ids.par_iter()
        .map(|id| {
            let record = manifest
                .record(id)
                .ok_or_else(|| DataError::UnknownVideo {
                    video_id: id.clone(),
                })?;
            let dir = root.join(&record.frames_path);
            let images = sample_frames(&dir, frames_per_video)?;
            let frames = images
                .iter()
                .map(extract_features)
                .collect::<Result<Vec<_>>>()?;
            VideoSample::new(record.video_id.clone(), record.label, frames)
        })
        .collect()
}

/// Majority-vote video label: real iff strictly more than half of the
/// frame predictions are real, so an exact 50/50 split is fake.
pub fn classify_video(model: &Model, sample: &VideoSample, threshold: f64) -> Label {
    let real_frames = sample
        .frames
        .iter()
        .filter(|f| model.classify_frame(f, threshold) == Label::Real)
        .count();
    if real_frames * 2 > sample.frames.len() {
        Label::Real
    } else {
        Label::Fake
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExperimentConfig {
    pub scenario: ScenarioKind,
    pub model: ModelKind,
    pub sizes: SplitSizes,
    pub frames_per_video: usize,
    pub forest: ForestConfig,
    pub svm: SvmConfig,
    /// Frame decision threshold; `None` uses the model's default
    /// (0.5 vote fraction for forests, 0.0 margin for SVMs).
    pub threshold: Option<f64>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            scenario: ScenarioKind::Independent,
            model: ModelKind::Forest,
            sizes: SplitSizes::default(),
            frames_per_video: DEFAULT_FRAMES_PER_VIDEO,
            forest: ForestConfig::default(),
            svm: SvmConfig::default(),
            threshold: None,
        }
    }
}

/// One fold's result with fake as the positive class.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FoldOutcome {
    pub fold_index: usize,
    pub confusion: ConfusionMatrix,
    pub metrics: MetricTriple,
}

/// All folds of one scenario/model run plus cross-fold mean metrics.
/// `model` is a plain name field so externally computed baselines can be
/// merged into the same report shape.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub model: String,
    pub scenario: String,
    pub seed: u64,
    pub threshold: f64,
    pub folds: Vec<FoldOutcome>,
    pub mean: MetricTriple,
}

impl ExperimentReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| DetectError::BadModelFormat {
            detail: format!("experiment report: {e}"),
        })
    }

    /// CSV rows per fold plus a `mean` row carrying only the metric
    /// columns.
    pub fn to_csv(&self) -> String {
        let mut out =
            String::from("model,scenario,fold,tp,fn,tn,fp,accuracy,sensitivity,specificity\n");
        for fold in &self.folds {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{}\n",
                self.model,
                self.scenario,
                fold.fold_index,
                fold.confusion.tp,
                fold.confusion.fn_,
                fold.confusion.tn,
                fold.confusion.fp,
                fold.metrics.accuracy,
                fold.metrics.sensitivity,
                fold.metrics.specificity,
            ));
        }
        out.push_str(&format!(
            "{},{},mean,,,,,{},{},{}\n",
            self.model, self.scenario, self.mean.accuracy, self.mean.sensitivity,
            self.mean.specificity,
        ));
        out
    }
}

fn train_fold_model(
    cfg: &ExperimentConfig,
    train: &[VideoSample],
    seed: u64,
) -> Result<Model> {
    let data: Vec<(FrameFeatures, Label)> = train
        .iter()
        .flat_map(|s| s.frames.iter().cloned().map(move |f| (f, s.label)))
        .collect();
    Ok(match cfg.model {
        ModelKind::Forest => Model::Forest(train_forest(&data, &cfg.forest, seed)?),
        ModelKind::Svm => Model::Svm(train_svm(&data, &cfg.svm, seed)?),
    })
}

/// Runs all three folds of one scenario: split, train, majority-vote the
/// test videos, and aggregate. Deterministic for a given
/// (manifest, cfg, seed); folds reuse the seed on distinct rng streams.
pub fn run_experiment(
    manifest: &Manifest,
    root: &Path,
    cfg: &ExperimentConfig,
    seed: u64,
) -> Result<ExperimentReport> {
    let mut folds = Vec::with_capacity(FOLD_COUNT);
    let mut sums = (0.0f64, 0.0f64, 0.0f64);
    for fold_index in 0..FOLD_COUNT {
        let scenario = SplitScenario {
            kind: cfg.scenario,
            fold_index,
        };
        let split = make_splits(manifest, scenario, &cfg.sizes, seed)?;
        let train = load_video_samples(manifest, &split.train, root, cfg.frames_per_video)?;
        let test = load_video_samples(manifest, &split.test, root, cfg.frames_per_video)?;
        let model = train_fold_model(cfg, &train, seed)?;
        let threshold = cfg.threshold.unwrap_or_else(|| model.default_threshold());
        let predictions: Vec<(Label, Label)> = test
            .par_iter()
            .map(|sample| (sample.label, classify_video(&model, sample, threshold)))
            .collect();
        let count = |truth: Label, predicted: Label| {
            predictions
                .iter()
                .filter(|&&(t, p)| t == truth && p == predicted)
                .count() as u64
        };
        let confusion = ConfusionMatrix::new(
            count(Label::Fake, Label::Fake),
            count(Label::Fake, Label::Real),
            count(Label::Real, Label::Real),
            count(Label::Real, Label::Fake),
        );
        let metrics = confusion.metrics()?;
        sums.0 += metrics.accuracy;
        sums.1 += metrics.sensitivity;
        sums.2 += metrics.specificity;
        folds.push(FoldOutcome {
            fold_index,
            confusion,
            metrics,
        });
    }
    let n = folds.len() as f64;
    let threshold = cfg.threshold.unwrap_or(match cfg.model {
        ModelKind::Forest => 0.5,
        ModelKind::Svm => 0.0,
    });
    Ok(ExperimentReport {
        model: cfg.model.as_str().to_string(),
        scenario: cfg.scenario.as_str().to_string(),
        seed,
        threshold,
        folds,
        mean: MetricTriple {
            accuracy: sums.0 / n,
            sensitivity: sums.1 / n,
            specificity: sums.2 / n,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::FEATURE_DIM;
    use crate::forest::{DecisionTree, ForestModel, TreeNode};

    /// Single-stump forest: feature 0 ≤ 0.5 votes real, else fake.
    fn stump_model() -> Model {
        Model::Forest(ForestModel {
            trees: vec![DecisionTree {
                nodes: vec![
                    TreeNode::Split {
                        feature: 0,
                        threshold: 0.5,
                        left: 1,
                        right: 2,
                    },
                    TreeNode::Leaf { fake_fraction: 0.0 },
                    TreeNode::Leaf { fake_fraction: 1.0 },
                ],
            }],
        })
    }

    fn frame(first: f64) -> FrameFeatures {
        let mut v = vec![0.5; FEATURE_DIM];
        v[0] = first;
        FrameFeatures::new(v).unwrap()
    }

    fn sample(real_frames: usize, fake_frames: usize) -> VideoSample {
        let mut frames = Vec::new();
        frames.extend((0..real_frames).map(|_| frame(0.2)));
        frames.extend((0..fake_frames).map(|_| frame(0.8)));
        VideoSample::new("v".into(), Label::Real, frames).unwrap()
    }

    #[test]
    fn majority_vote_is_strict() {
        let model = stump_model();
        // 60 of 100 real → real.
        assert_eq!(classify_video(&model, &sample(60, 40), 0.5), Label::Real);
        // Exactly half real → fake: the rule needs strictly more than 50%.
        assert_eq!(classify_video(&model, &sample(50, 50), 0.5), Label::Fake);
        assert_eq!(classify_video(&model, &sample(100, 0), 0.5), Label::Real);
        assert_eq!(classify_video(&model, &sample(0, 100), 0.5), Label::Fake);
    }

    #[test]
    fn unanimous_frames_match_the_frame_label() {
        let model = stump_model();
        for (n, first, expected) in [(1, 0.2, Label::Real), (7, 0.8, Label::Fake)] {
            let frames: Vec<FrameFeatures> = (0..n).map(|_| frame(first)).collect();
            let frame_label = model.classify_frame(&frames[0], 0.5);
            assert_eq!(frame_label, expected);
            let sample = VideoSample::new("v".into(), expected, frames).unwrap();
            assert_eq!(classify_video(&model, &sample, 0.5), frame_label);
        }
    }

    #[test]
    fn empty_videos_rejected() {
        assert!(matches!(
            VideoSample::new("v".into(), Label::Real, Vec::new()),
            Err(DetectError::InvalidParameter { .. })
        ));
    }

    #[test]
    fn report_round_trips_and_csv_shape_holds() {
        let report = ExperimentReport {
            model: "forest".into(),
            scenario: "independent".into(),
            seed: 7,
            threshold: 0.5,
            folds: vec![FoldOutcome {
                fold_index: 0,
                confusion: ConfusionMatrix::new(53, 13, 30, 3),
                metrics: MetricTriple {
                    accuracy: 0.8383838383838383,
                    sensitivity: 0.803030303030303,
                    specificity: 0.9090909090909091,
                },
            }],
            mean: MetricTriple {
                accuracy: 0.8383838383838383,
                sensitivity: 0.803030303030303,
                specificity: 0.9090909090909091,
            },
        };
        let back = ExperimentReport::from_json(&report.to_json()).unwrap();
        assert_eq!(report, back);
        let csv = report.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(
            lines[0],
            "model,scenario,fold,tp,fn,tn,fp,accuracy,sensitivity,specificity"
        );
        assert!(lines[1].starts_with("forest,independent,0,53,13,30,3,"));
        assert!(lines[2].starts_with("forest,independent,mean,,,,,"));
        assert_eq!(lines.len(), 3);
    }
}
