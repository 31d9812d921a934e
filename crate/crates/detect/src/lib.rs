//! Classical deepfake-detection baselines.
//!
//! Frames become fixed 112-dimensional feature vectors (block means plus
//! intensity and gradient-magnitude histograms); a from-scratch random
//! forest and linear SVM classify frames; videos are labeled by strict
//! majority voting over sampled frames. Fold generation produces
//! subject-independent and sub-independent train/validation/test splits,
//! and the experiment runner ties it together into per-fold confusion
//! reports.
//!
//! Every operation is a pure function of its inputs and seed: the same
//! seed gives bit-identical models, splits, and reports.

mod error;
mod experiment;
mod features;
mod forest;
mod model_io;
mod split;
mod svm;
pub mod synth;

pub use error::{DetectError, Result};
pub use experiment::{
    classify_video, load_video_samples, run_experiment, ExperimentConfig, ExperimentReport,
    FoldOutcome, ModelKind, VideoSample, DEFAULT_FRAMES_PER_VIDEO,
};
pub use features::{extract_features, sample_frames, FrameFeatures, FEATURE_DIM};
pub use forest::{classify_frame_forest, train_forest, ForestConfig, ForestModel, TreeNode};
pub use model_io::{load_model, save_model, Model, MODEL_MAGIC};
pub use split::{make_splits, FoldSplit, ScenarioKind, SplitScenario, SplitSizes, FOLD_COUNT};
pub use svm::{classify_frame_svm, train_svm, SvmConfig, SvmModel};
