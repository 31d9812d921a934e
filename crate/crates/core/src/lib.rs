//! Deterministic numerics for region-based motion transfer and frame enhancement.
//!
//! This crate implements the analyzable math of a heatmap-driven animation
//! pipeline: per-region statistics (soft argmax, weighted covariance), affine
//! motion estimation, dense backward-flow composition, bilinear warping with
//! confidence masking, robust penalty functions (L1 / L2 / Charbonnier), and
//! the pre/post-processing filter chain (dynamic face crop, sharpening,
//! Gaussian smoothing, area downsampling).
//!
//! All operations are pure functions of their inputs: identical inputs give
//! bit-identical outputs, and everything is `Send + Sync`. Math is generic
//! over the scalar type via [`Scalar`] (`f32` or `f64`); the crate root
//! exports `f64`-backed aliases used by the rest of the toolkit.
//!
//! Coordinate convention: `(row, col)` with the origin at pixel `(0, 0)` and
//! pixel centers at integer coordinates.

use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive, ToPrimitive};

mod container;
mod crop;
mod error;
mod filter;
mod flow;
mod frames;
mod grid;
mod heatmap;
mod image_buf;
mod linalg;
mod loss;
mod motion;
mod warp;

pub use container::{FloatMap, BINARY_MAGIC, TEXT_MAGIC};
pub use crop::{crop_window, dynamic_crop, resize_bilinear, CropConfig, CropWindow, FaceBox};
pub use error::{CoreError, Result};
pub use filter::{
    convolve3x3, downsample, enhance, gaussian_smooth, sharpen, upsample_nearest,
    GAUSSIAN_KERNEL, SHARPEN_KERNEL,
};
pub use flow::{apply_confidence, compose_flow, compose_flow_detailed, ComposedFlow, WeightMode};
pub use frames::{list_frame_files, read_face_boxes, read_image, write_image, FaceBoxRecord};
pub use grid::Grid2D;
pub use image_buf::ImageBuf;
pub use linalg::{Mat2, SymEigen2, Vec2};
pub use loss::{
    charbonnier_grad, charbonnier_loss, charbonnier_penalty, charbonnier_penalty_grad,
    charbonnier_pyramid, l1_loss, l2_loss, LossParams, Reduction,
};
pub use motion::{
    affine_from_covariance, region_backward_map, region_covariance, soft_argmax, ArgmaxMode,
    RegionParams, COVARIANCE_RANK_FLOOR,
};
pub use warp::warp_bilinear;

/// Floating-point scalar the image and motion math is generic over.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Lossy conversion from `f64`, used for constants and file payloads.
    fn from_f64_lossy(v: f64) -> Self {
        Self::from_f64(v).unwrap_or_else(Self::nan)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Default pixel container used by the toolkit.
pub type Image = ImageBuf<f64>;
/// Default nonnegative region/weight map.
pub type Heatmap = heatmap::Heatmap<f64>;
/// Default region + background weight stack.
pub type RegionSet = heatmap::RegionSet<f64>;
/// Default per-pixel backward map.
pub type FlowField = flow::FlowField<f64>;
/// Default per-pixel `[0, 1]` reliability mask.
pub type ConfidenceMap = flow::ConfidenceMap<f64>;
/// Default source/driving affine pair.
pub type RegionMotion = motion::RegionMotion<f64>;

pub use flow::{ConfidenceMap as ConfidenceMapOf, FlowField as FlowFieldOf};
pub use heatmap::{Heatmap as HeatmapOf, RegionSet as RegionSetOf};
pub use motion::RegionMotion as RegionMotionOf;
