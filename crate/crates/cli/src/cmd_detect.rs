//! Detector subcommands: split, detect-train, detect-eval.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use smf_data::{load_manifest, ConfusionMatrix, Label, Manifest};
use smf_detect::{
    classify_video, load_model, load_video_samples, make_splits, run_experiment, save_model,
    train_forest, train_svm, ExperimentConfig, ForestConfig, Model, ModelKind, ScenarioKind,
    SplitScenario, SplitSizes, SvmConfig, VideoSample, DEFAULT_FRAMES_PER_VIDEO,
};

use crate::envelope::{write_sidecar, write_text_file, CliError};

// ------------------------------------------------------- shared pieces --

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioArg {
    /// Train and test subjects fully disjoint
    Independent,
    /// Only apparent subjects disjoint
    #[value(alias = "sub_independent")]
    SubIndependent,
}

impl ScenarioArg {
    fn kind(self) -> ScenarioKind {
        match self {
            ScenarioArg::Independent => ScenarioKind::Independent,
            ScenarioArg::SubIndependent => ScenarioKind::SubIndependent,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelArg {
    /// Random forest over frame features
    #[value(alias = "forest")]
    Rf,
    /// Linear SVM over standardized frame features
    Svm,
}

impl ModelArg {
    fn kind(self) -> ModelKind {
        match self {
            ModelArg::Rf => ModelKind::Forest,
            ModelArg::Svm => ModelKind::Svm,
        }
    }
}

/// Per-class train/test quota flags shared by the detector subcommands.
#[derive(Debug, Args, Serialize)]
pub struct SizeArgs {
    /// Real training videos per fold
    #[arg(long, default_value_t = SplitSizes::default().train_real)]
    pub train_real: usize,
    /// Fake training videos per fold
    #[arg(long, default_value_t = SplitSizes::default().train_fake)]
    pub train_fake: usize,
    /// Real test videos per fold
    #[arg(long, default_value_t = SplitSizes::default().test_real)]
    pub test_real: usize,
    /// Fake test videos per fold
    #[arg(long, default_value_t = SplitSizes::default().test_fake)]
    pub test_fake: usize,
}

impl SizeArgs {
    fn sizes(&self) -> SplitSizes {
        SplitSizes {
            train_real: self.train_real,
            train_fake: self.train_fake,
            test_real: self.test_real,
            test_fake: self.test_fake,
        }
    }
}

/// Model hyperparameter flags shared by detect-train and detect-eval.
#[derive(Debug, Args, Serialize)]
pub struct ModelParamArgs {
    /// Trees in the forest
    #[arg(long, default_value_t = ForestConfig::default().trees)]
    pub trees: usize,
    /// Maximum tree depth
    #[arg(long, default_value_t = ForestConfig::default().max_depth)]
    pub depth: usize,
    /// Features tried per split (default: floor(sqrt(feature count)))
    #[arg(long)]
    pub mtry: Option<usize>,
    /// SVM training epochs
    #[arg(long, default_value_t = SvmConfig::default().epochs)]
    pub epochs: usize,
    /// SVM regularization strength
    #[arg(long, default_value_t = SvmConfig::default().lambda)]
    pub lambda: f64,
}

impl ModelParamArgs {
    fn forest(&self) -> ForestConfig {
        ForestConfig {
            trees: self.trees,
            max_depth: self.depth,
            mtry: self.mtry,
        }
    }

    fn svm(&self) -> SvmConfig {
        SvmConfig {
            epochs: self.epochs,
            lambda: self.lambda,
        }
    }
}

fn resolve_root(manifest_path: &Path, root: &Option<PathBuf>) -> PathBuf {
    match root {
        Some(r) => r.clone(),
        None => manifest_path
            .parent()
            .map(Path::to_path_buf)
            .unwrap_or_else(|| PathBuf::from(".")),
    }
}

fn confusion_from_predictions(outcomes: &[(Label, Label)]) -> ConfusionMatrix {
    let count = |actual: Label, predicted: Label| {
        outcomes
            .iter()
            .filter(|(a, p)| *a == actual && *p == predicted)
            .count() as u64
    };
    ConfusionMatrix::new(
        count(Label::Fake, Label::Fake),
        count(Label::Fake, Label::Real),
        count(Label::Real, Label::Real),
        count(Label::Real, Label::Fake),
    )
}

// --------------------------------------------------------------- split --

#[derive(Debug, Args, Serialize)]
pub struct SplitArgs {
    /// JSON-lines video manifest
    #[arg(long)]
    pub manifest: PathBuf,
    #[arg(long, value_enum)]
    pub scenario: ScenarioArg,
    /// Fold index, 0..3
    #[arg(long)]
    pub fold: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    #[serde(flatten)]
    pub sizes: SizeArgs,
    /// Optional JSON output path for the split
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run_split(args: &SplitArgs, params: &Value) -> Result<Value, CliError> {
    let manifest = load_manifest(&args.manifest)?;
    let scenario = SplitScenario {
        kind: args.scenario.kind(),
        fold_index: args.fold,
    };
    let split = make_splits(&manifest, scenario, &args.sizes.sizes(), args.seed)?;
    let mut result = serde_json::to_value(&split).expect("split serializes");
    result["counts"] = json!({
        "train": split.train.len(),
        "validation": split.validation.len(),
        "test": split.test.len(),
    });
    if let Some(out) = &args.out {
        let text = serde_json::to_string_pretty(&split).expect("split serializes") + "\n";
        write_text_file(out, &text)?;
        write_sidecar(out, "split", params)?;
    }
    Ok(result)
}

// -------------------------------------------------------- detect-train --

#[derive(Debug, Args, Serialize)]
pub struct DetectTrainArgs {
    /// JSON-lines video manifest
    #[arg(long)]
    pub manifest: PathBuf,
    /// Directory that frames_path entries are relative to
    /// (default: the manifest's directory)
    #[arg(long)]
    pub root: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub scenario: ScenarioArg,
    /// Fold index, 0..3
    #[arg(long)]
    pub fold: usize,
    #[arg(long, value_enum)]
    pub model: ModelArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Frames sampled per video
    #[arg(long, default_value_t = DEFAULT_FRAMES_PER_VIDEO)]
    pub frames: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub model_params: ModelParamArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub sizes: SizeArgs,
    /// Output model file
    #[arg(long)]
    pub out: PathBuf,
}

fn flatten_samples(samples: &[VideoSample]) -> Vec<(smf_detect::FrameFeatures, Label)> {
    samples
        .iter()
        .flat_map(|s| s.frames.iter().cloned().map(move |f| (f, s.label)))
        .collect()
}

pub fn run_detect_train(args: &DetectTrainArgs, params: &Value) -> Result<Value, CliError> {
    let manifest = load_manifest(&args.manifest)?;
    let root = resolve_root(&args.manifest, &args.root);
    let scenario = SplitScenario {
        kind: args.scenario.kind(),
        fold_index: args.fold,
    };
    let split = make_splits(&manifest, scenario, &args.sizes.sizes(), args.seed)?;
    let train = load_video_samples(&manifest, &split.train, &root, args.frames)?;
    let data = flatten_samples(&train);
    let model = match args.model.kind() {
        ModelKind::Forest => {
            Model::Forest(train_forest(&data, &args.model_params.forest(), args.seed)?)
        }
        ModelKind::Svm => Model::Svm(train_svm(&data, &args.model_params.svm(), args.seed)?),
    };
    save_model(&args.out, &model)?;
    write_sidecar(&args.out, "detect-train", params)?;
    Ok(json!({
        "model": model.kind_name(),
        "trained_videos": train.len(),
        "trained_frames": data.len(),
        "default_threshold": model.default_threshold(),
        "out": args.out,
    }))
}

// --------------------------------------------------------- detect-eval --

#[derive(Debug, Args, Serialize)]
pub struct DetectEvalArgs {
    /// JSON-lines video manifest
    #[arg(long)]
    pub manifest: PathBuf,
    /// Directory that frames_path entries are relative to
    /// (default: the manifest's directory)
    #[arg(long)]
    pub root: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub scenario: ScenarioArg,
    /// Evaluate a single fold with a saved model file
    #[arg(long, requires = "fold")]
    pub model_file: Option<PathBuf>,
    /// Fold index for --model-file mode, 0..3
    #[arg(long, requires = "model_file")]
    pub fold: Option<usize>,
    /// Model kind to train and evaluate across all folds
    #[arg(long, value_enum, conflicts_with = "model_file")]
    pub model: Option<ModelArg>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Frames sampled per video
    #[arg(long, default_value_t = DEFAULT_FRAMES_PER_VIDEO)]
    pub frames: usize,
    /// Frame decision threshold (default: the model kind's own)
    #[arg(long)]
    pub threshold: Option<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub model_params: ModelParamArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub sizes: SizeArgs,
    /// Optional JSON output path for the report
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Optional CSV output path for the report (full-experiment mode)
    #[arg(long)]
    pub csv_out: Option<PathBuf>,
}

fn eval_saved_model(
    args: &DetectEvalArgs,
    manifest: &Manifest,
    root: &Path,
    model_file: &Path,
    fold: usize,
) -> Result<Value, CliError> {
    let model = load_model(model_file)?;
    let scenario = SplitScenario {
        kind: args.scenario.kind(),
        fold_index: fold,
    };
    let split = make_splits(manifest, scenario, &args.sizes.sizes(), args.seed)?;
    let test = load_video_samples(manifest, &split.test, root, args.frames)?;
    let threshold = args.threshold.unwrap_or_else(|| model.default_threshold());
    let outcomes: Vec<(Label, Label)> = test
        .iter()
        .map(|s| (s.label, classify_video(&model, s, threshold)))
        .collect();
    let confusion = confusion_from_predictions(&outcomes);
    let metrics = confusion.metrics()?;
    Ok(json!({
        "model": model.kind_name(),
        "scenario": args.scenario,
        "fold": fold,
        "threshold": threshold,
        "test_videos": test.len(),
        "confusion": confusion,
        "metrics": metrics,
    }))
}

pub fn run_detect_eval(args: &DetectEvalArgs, params: &Value) -> Result<Value, CliError> {
    let manifest = load_manifest(&args.manifest)?;
    let root = resolve_root(&args.manifest, &args.root);
    let result = match (&args.model_file, args.model) {
        (Some(model_file), None) => {
            let fold = args.fold.expect("clap enforces --fold with --model-file");
            if args.csv_out.is_some() {
                return Err(CliError::invalid(
                    "--csv-out applies to full-experiment mode only",
                ));
            }
            eval_saved_model(args, &manifest, &root, model_file, fold)?
        }
        (None, Some(model)) => {
            let cfg = ExperimentConfig {
                scenario: args.scenario.kind(),
                model: model.kind(),
                sizes: args.sizes.sizes(),
                frames_per_video: args.frames,
                forest: args.model_params.forest(),
                svm: args.model_params.svm(),
                threshold: args.threshold,
            };
            let report = run_experiment(&manifest, &root, &cfg, args.seed)?;
            if let Some(csv_out) = &args.csv_out {
                write_text_file(csv_out, &report.to_csv())?;
                write_sidecar(csv_out, "detect-eval", params)?;
            }
            serde_json::to_value(&report).expect("report serializes")
        }
        _ => {
            return Err(CliError::invalid(
                "pass either --model-file with --fold, or --model",
            ))
        }
    };
    if let Some(out) = &args.out {
        let text = serde_json::to_string_pretty(&result).expect("result serializes") + "\n";
        write_text_file(out, &text)?;
        write_sidecar(out, "detect-eval", params)?;
    }
    Ok(result)
}
