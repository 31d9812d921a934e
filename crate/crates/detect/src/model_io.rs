//! Versioned binary serialization for trained models.
//!
//! Layout (all integers little-endian):
//! `"SMDL1"` magic, `u32` format version (currently 1), `u8` model kind
//! (0 = forest, 1 = svm), then the kind-specific payload.
//!
//! Forest payload: `u32` tree count, then per tree a `u32` node count and
//! the nodes in index order — tag `u8` 0 (leaf: `f64` fake fraction) or
//! 1 (split: `u32` feature, `f64` threshold, `u32` left, `u32` right).
//! Children always come after their parent, so index order is also a
//! valid topological order.
//!
//! SVM payload: `u32` dimension, weights, bias, means, stds (all `f64`).

use std::fs;
use std::path::Path;

use smf_data::Label;

use crate::error::{DetectError, Result};
use crate::features::{FrameFeatures, FEATURE_DIM};
use crate::forest::{DecisionTree, ForestModel, TreeNode};
use crate::svm::SvmModel;

pub const MODEL_MAGIC: &[u8; 5] = b"SMDL1";
const FORMAT_VERSION: u32 = 1;

/// A trained frame classifier of either kind, with its conventional
/// decision threshold: 0.5 on the forest's vote fraction, 0.0 on the
/// SVM's signed margin.
#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    Forest(ForestModel),
    Svm(SvmModel),
}

impl Model {
    pub fn kind_name(&self) -> &'static str {
        match self {
            Model::Forest(_) => "forest",
            Model::Svm(_) => "svm",
        }
    }

    pub fn default_threshold(&self) -> f64 {
        match self {
            Model::Forest(_) => 0.5,
            Model::Svm(_) => 0.0,
        }
    }

    /// Higher favors real: vote fraction for forests, margin for SVMs.
    pub fn real_score(&self, features: &FrameFeatures) -> f64 {
        match self {
            Model::Forest(m) => m.real_score(features),
            Model::Svm(m) => m.real_score(features),
        }
    }

    /// Real iff the score strictly exceeds the threshold; tie goes to fake.
    pub fn classify_frame(&self, features: &FrameFeatures, threshold: f64) -> Label {
        if self.real_score(features) > threshold {
            Label::Real
        } else {
            Label::Fake
        }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(MODEL_MAGIC);
        out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
        match self {
            Model::Forest(m) => {
                out.push(0u8);
                write_u32(&mut out, m.trees.len());
                for tree in &m.trees {
                    write_u32(&mut out, tree.nodes.len());
                    for node in &tree.nodes {
                        match *node {
                            TreeNode::Leaf { fake_fraction } => {
                                out.push(0u8);
                                out.extend_from_slice(&fake_fraction.to_le_bytes());
                            }
                            TreeNode::Split {
                                feature,
                                threshold,
                                left,
                                right,
                            } => {
                                out.push(1u8);
                                write_u32(&mut out, feature);
                                out.extend_from_slice(&threshold.to_le_bytes());
                                write_u32(&mut out, left);
                                write_u32(&mut out, right);
                            }
                        }
                    }
                }
            }
            Model::Svm(m) => {
                out.push(1u8);
                write_u32(&mut out, m.weights.len());
                for &w in &m.weights {
                    out.extend_from_slice(&w.to_le_bytes());
                }
                out.extend_from_slice(&m.bias.to_le_bytes());
                for &v in &m.means {
                    out.extend_from_slice(&v.to_le_bytes());
                }
                for &v in &m.stds {
                    out.extend_from_slice(&v.to_le_bytes());
                }
            }
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Model> {
        let mut r = Reader { bytes, pos: 0 };
        let magic = r.take(MODEL_MAGIC.len())?;
        if magic != MODEL_MAGIC {
            return Err(bad("wrong magic; expected SMDL1"));
        }
        let version = r.take_u32()?;
        if version != FORMAT_VERSION {
            return Err(bad(&format!(
                "unsupported format version {version}; this build reads {FORMAT_VERSION}"
            )));
        }
        let kind = r.take_u8()?;
        let model = match kind {
            0 => Model::Forest(read_forest(&mut r)?),
            1 => Model::Svm(read_svm(&mut r)?),
            other => return Err(bad(&format!("unknown model kind byte {other}"))),
        };
        if r.pos != r.bytes.len() {
            return Err(bad(&format!(
                "{} trailing bytes after the payload",
                r.bytes.len() - r.pos
            )));
        }
        Ok(model)
    }
}

fn bad(detail: &str) -> DetectError {
    DetectError::BadModelFormat {
        detail: detail.into(),
    }
}

fn write_u32(out: &mut Vec<u8>, value: usize) {
    out.extend_from_slice(&u32::try_from(value).expect("sizes fit u32").to_le_bytes());
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.pos + n > self.bytes.len() {
            return Err(bad("truncated model file"));
        }
        let slice = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(slice)
    }

    fn take_u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn take_u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn take_f64(&mut self) -> Result<f64> {
        let v = f64::from_le_bytes(self.take(8)?.try_into().unwrap());
        if !v.is_finite() {
            return Err(bad("non-finite value in model payload"));
        }
        Ok(v)
    }
}

fn read_forest(r: &mut Reader<'_>) -> Result<ForestModel> {
    let tree_count = r.take_u32()? as usize;
    if tree_count == 0 {
        return Err(bad("forest with zero trees"));
    }
    let mut trees = Vec::with_capacity(tree_count);
    for _ in 0..tree_count {
        let node_count = r.take_u32()? as usize;
        if node_count == 0 {
            return Err(bad("tree with zero nodes"));
        }
        let mut nodes = Vec::with_capacity(node_count);
        for idx in 0..node_count {
            let tag = r.take_u8()?;
            let node = match tag {
                0 => {
                    let fake_fraction = r.take_f64()?;
                    if !(0.0..=1.0).contains(&fake_fraction) {
                        return Err(bad("leaf fraction outside [0, 1]"));
                    }
                    TreeNode::Leaf { fake_fraction }
                }
                1 => {
                    let feature = r.take_u32()? as usize;
                    let threshold = r.take_f64()?;
                    let left = r.take_u32()? as usize;
                    let right = r.take_u32()? as usize;
                    if feature >= FEATURE_DIM {
                        return Err(bad(&format!("split feature {feature} out of range")));
                    }
                    // Children after parents rules out cycles.
                    if left <= idx || right <= idx || left >= node_count || right >= node_count {
                        return Err(bad("split child index out of order"));
                    }
                    TreeNode::Split {
                        feature,
                        threshold,
                        left,
                        right,
                    }
                }
                other => return Err(bad(&format!("unknown node tag {other}"))),
            };
            nodes.push(node);
        }
        trees.push(DecisionTree { nodes });
    }
    Ok(ForestModel { trees })
}

fn read_svm(r: &mut Reader<'_>) -> Result<SvmModel> {
    let dim = r.take_u32()? as usize;
    if dim != FEATURE_DIM {
        return Err(bad(&format!(
            "svm dimension {dim} does not match feature dimension {FEATURE_DIM}"
        )));
    }
    let mut weights = Vec::with_capacity(dim);
    for _ in 0..dim {
        weights.push(r.take_f64()?);
    }
    let bias = r.take_f64()?;
    let mut means = Vec::with_capacity(dim);
    for _ in 0..dim {
        means.push(r.take_f64()?);
    }
    let mut stds = Vec::with_capacity(dim);
    for _ in 0..dim {
        let s = r.take_f64()?;
        if s <= 0.0 {
            return Err(bad("svm std must be positive"));
        }
        stds.push(s);
    }
    Ok(SvmModel {
        weights,
        bias,
        means,
        stds,
    })
}

/// Writes a model in the SMDL1 format; byte-identical for equal models.
pub fn save_model(path: &Path, model: &Model) -> Result<()> {
    fs::write(path, model.to_bytes()).map_err(|e| DetectError::io(path.display().to_string(), e))
}

pub fn load_model(path: &Path) -> Result<Model> {
    let bytes =
        fs::read(path).map_err(|e| DetectError::io(path.display().to_string(), e))?;
    Model::from_bytes(&bytes)
}
