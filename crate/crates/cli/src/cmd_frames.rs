//! Frame-level subcommands: crop, enhance, flow, warp, loss-check.

use std::fs;
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use smf_core::{
    apply_confidence, charbonnier_grad, charbonnier_loss, compose_flow, downsample, dynamic_crop,
    enhance, gaussian_smooth, l1_loss, l2_loss, read_face_boxes, read_image, sharpen,
    upsample_nearest, warp_bilinear, write_image, CropConfig, FaceBox, Image, LossParams,
    Reduction, WeightMode,
};

use crate::envelope::{write_sidecar, CliError};
use crate::maps;

// ---------------------------------------------------------------- crop --

#[derive(Debug, Args, Serialize)]
pub struct CropArgs {
    /// Directory of input frames (png/pgm/ppm)
    #[arg(long)]
    pub frames: PathBuf,
    /// JSONL face boxes; `frame_index` matches the sorted frame order
    #[arg(long)]
    pub boxes: PathBuf,
    /// Output directory for cropped frames
    #[arg(long)]
    pub out: PathBuf,
    /// Window side as a multiple of the face height
    #[arg(long, default_value_t = 4.0)]
    pub scale: f64,
    /// Extra margin above the face, as a multiple of the face height
    #[arg(long, default_value_t = 0.5)]
    pub top_margin: f64,
    /// Output resolution (square)
    #[arg(long, default_value_t = 384)]
    pub output_side: usize,
}

pub fn run_crop(args: &CropArgs, params: &Value) -> Result<Value, CliError> {
    let cfg = CropConfig {
        scale: args.scale,
        top_margin: args.top_margin,
        output_side: args.output_side,
    };
    let files = smf_core::list_frame_files(&args.frames)?;
    if files.is_empty() {
        return Err(CliError::invalid(format!(
            "{}: no frame files found",
            args.frames.display()
        )));
    }
    let records = read_face_boxes(&args.boxes)?;
    let box_for = |index: usize| -> Result<FaceBox, CliError> {
        records
            .iter()
            .find(|r| r.frame_index == index)
            .map(|r| r.face_box())
            .ok_or_else(|| {
                CliError::invalid(format!("no face box for frame index {index}"))
            })
    };
    fs::create_dir_all(&args.out).map_err(|e| CliError::io(&args.out, e))?;
    for (index, path) in files.iter().enumerate() {
        let face = box_for(index)?;
        let frame: Image = read_image(path)?;
        let cropped = dynamic_crop(&frame, &face, &cfg)?;
        let name = path
            .file_name()
            .ok_or_else(|| CliError::invalid(format!("{}: no file name", path.display())))?;
        write_image(args.out.join(name), &cropped)?;
    }
    write_sidecar(&args.out, "crop", params)?;
    Ok(json!({
        "frames": files.len(),
        "output_side": args.output_side,
        "out": args.out,
    }))
}

// ------------------------------------------------------------- enhance --

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EnhanceOp {
    /// Sharpen then Gaussian-smooth
    Enhance,
    Sharpen,
    /// 3×3 Gaussian smoothing
    Smooth,
    /// Area-average downsample to --side
    Downsample,
    /// Nearest-neighbor upsample to --side
    Upsample,
}

#[derive(Debug, Args, Serialize)]
pub struct EnhanceArgs {
    /// Input image (png/pgm/ppm)
    #[arg(long)]
    pub input: PathBuf,
    /// Output image path
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = EnhanceOp::Enhance)]
    pub op: EnhanceOp,
    /// Target square side for the resampling ops
    #[arg(long)]
    pub side: Option<usize>,
}

pub fn run_enhance(args: &EnhanceArgs, params: &Value) -> Result<Value, CliError> {
    let img: Image = read_image(&args.input)?;
    let needs_side = matches!(args.op, EnhanceOp::Downsample | EnhanceOp::Upsample);
    if needs_side && args.side.is_none() {
        return Err(CliError::invalid("--side is required for resampling ops"));
    }
    let out = match args.op {
        EnhanceOp::Enhance => enhance(&img)?,
        EnhanceOp::Sharpen => sharpen(&img)?,
        EnhanceOp::Smooth => gaussian_smooth(&img)?,
        EnhanceOp::Downsample => downsample(&img, args.side.unwrap())?,
        EnhanceOp::Upsample => upsample_nearest(&img, args.side.unwrap())?,
    };
    write_image(&args.out, &out)?;
    write_sidecar(&args.out, "enhance", params)?;
    Ok(json!({
        "input_shape": [img.height(), img.width(), img.channels()],
        "output_shape": [out.height(), out.width(), out.channels()],
        "out": args.out,
    }))
}

// ---------------------------------------------------------------- flow --

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightModeArg {
    /// Normalize weight maps by their per-pixel sum
    Distribution,
    /// Softmax over the weight maps
    Softmax,
}

#[derive(Debug, Args, Serialize)]
pub struct FlowArgs {
    /// SMF1 map with K region weight channels plus background last
    #[arg(long)]
    pub regions: PathBuf,
    /// JSON region motions (see docs: mean/covariance/affine per region)
    #[arg(long)]
    pub motions: PathBuf,
    /// Output SMF1 flow field (2 channels: row, col)
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = WeightModeArg::Distribution)]
    pub weight_mode: WeightModeArg,
    /// Softmax temperature (softmax mode only)
    #[arg(long, default_value_t = 1.0)]
    pub temperature: f64,
}

pub fn run_flow(args: &FlowArgs, params: &Value) -> Result<Value, CliError> {
    let regions = maps::load_region_set(&args.regions)?;
    let (motions, background) = maps::load_motions(&args.motions)?;
    let mode = match args.weight_mode {
        WeightModeArg::Distribution => WeightMode::Distribution,
        WeightModeArg::Softmax => WeightMode::Softmax {
            temperature: args.temperature,
        },
    };
    let flow = compose_flow(&motions, &regions, background.as_ref(), mode)?;
    maps::save_flow(&args.out, &flow)?;
    write_sidecar(&args.out, "flow", params)?;
    Ok(json!({
        "regions": regions.region_count(),
        "grid": [flow.grid().height, flow.grid().width],
        "out": args.out,
    }))
}

// ---------------------------------------------------------------- warp --

#[derive(Debug, Args, Serialize)]
pub struct WarpArgs {
    /// Source image to sample from
    #[arg(long)]
    pub input: PathBuf,
    /// SMF1 backward flow field matching the image grid
    #[arg(long)]
    pub flow: PathBuf,
    /// Optional SMF1 confidence map multiplied into the warped image
    #[arg(long)]
    pub confidence: Option<PathBuf>,
    /// Output image path
    #[arg(long)]
    pub out: PathBuf,
}

pub fn run_warp(args: &WarpArgs, params: &Value) -> Result<Value, CliError> {
    let img: Image = read_image(&args.input)?;
    let flow = maps::load_flow(&args.flow)?;
    let mut out = warp_bilinear(&img, &flow)?;
    let mut masked = false;
    if let Some(conf_path) = &args.confidence {
        let confidence = maps::load_confidence(conf_path)?;
        out = apply_confidence(&out, &confidence)?;
        masked = true;
    }
    write_image(&args.out, &out)?;
    write_sidecar(&args.out, "warp", params)?;
    Ok(json!({
        "grid": [out.height(), out.width()],
        "confidence_applied": masked,
        "out": args.out,
    }))
}

// ----------------------------------------------------------- loss-check --

#[derive(Debug, Args, Serialize)]
pub struct LossCheckArgs {
    /// Prediction image
    #[arg(long)]
    pub a: PathBuf,
    /// Target image
    #[arg(long)]
    pub b: PathBuf,
    /// Charbonnier smoothing constant
    #[arg(long, default_value_t = 1e-3)]
    pub epsilon: f64,
    /// Verify the analytic gradient against central finite differences
    #[arg(long, default_value_t = false)]
    pub fd_check: bool,
    /// Pixels sampled for the finite-difference check
    #[arg(long, default_value_t = 64)]
    pub fd_samples: usize,
    /// Optional JSON output path for the loss report
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run_loss_check(args: &LossCheckArgs, params: &Value) -> Result<Value, CliError> {
    let a: Image = read_image(&args.a)?;
    let b: Image = read_image(&args.b)?;
    let loss_params = LossParams {
        epsilon: args.epsilon,
        reduction: Reduction::Mean,
    };
    let l1 = l1_loss(&a, &b, Reduction::Mean)?;
    let l2 = l2_loss(&a, &b, Reduction::Mean)?;
    let charbonnier = charbonnier_loss(&a, &b, loss_params)?;
    let mut result = json!({
        "l1": l1,
        "l2": l2,
        "charbonnier": charbonnier,
        "epsilon": args.epsilon,
    });
    if args.fd_check {
        let fd = fd_gradient_check(&a, &b, loss_params, args.fd_samples)?;
        result["fd"] = fd;
    }
    if let Some(out) = &args.out {
        let text = serde_json::to_string_pretty(&json!({
            "params": params,
            "result": result,
        }))
        .expect("report serializes");
        crate::envelope::write_text_file(out, &(text + "\n"))?;
        write_sidecar(out, "loss-check", params)?;
    }
    Ok(result)
}

/// Central finite differences of the full reduced loss at a deterministic
/// stride of sample pixels, compared relatively against the analytic
/// gradient.
fn fd_gradient_check(
    a: &Image,
    b: &Image,
    params: LossParams<f64>,
    samples: usize,
) -> Result<Value, CliError> {
    if samples == 0 {
        return Err(CliError::invalid("--fd-samples must be at least 1"));
    }
    let grad = charbonnier_grad(a, b, params)?;
    let len = a.data().len();
    let take = samples.min(len);
    let step = 1e-6;
    let mut max_rel = 0.0f64;
    for j in 0..take {
        let idx = j * len / take;
        let mut plus = a.data().to_vec();
        plus[idx] += step;
        let mut minus = a.data().to_vec();
        minus[idx] -= step;
        let grid = a.grid();
        let plus_img = Image::new(grid, a.channels(), plus)?;
        let minus_img = Image::new(grid, a.channels(), minus)?;
        let fd = (charbonnier_loss(&plus_img, b, params)?
            - charbonnier_loss(&minus_img, b, params)?)
            / (2.0 * step);
        let analytic = grad.data()[idx];
        let rel = (fd - analytic).abs() / analytic.abs().max(1e-12);
        max_rel = max_rel.max(rel);
    }
    Ok(json!({
        "samples": take,
        "step": step,
        "max_rel_err": max_rel,
    }))
}
