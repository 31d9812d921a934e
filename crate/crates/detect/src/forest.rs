//! From-scratch random forest: CART trees on Gini impurity with bootstrap
//! resampling and per-split feature subsampling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use smf_data::Label;

use crate::error::{DetectError, Result};
use crate::features::{FrameFeatures, FEATURE_DIM};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForestConfig {
    /// Number of trees (default 100).
    pub trees: usize,
    /// Maximum tree depth (default 12).
    pub max_depth: usize,
    /// Features tried per split; `None` means ⌊√D⌋ = 10.
    pub mtry: Option<usize>,
}

impl Default for ForestConfig {
    fn default() -> Self {
        ForestConfig {
            trees: 100,
            max_depth: 12,
            mtry: None,
        }
    }
}

impl ForestConfig {
    fn validate(&self) -> Result<usize> {
        if self.trees == 0 || self.max_depth == 0 {
            return Err(DetectError::InvalidParameter {
                detail: "forest needs at least one tree and depth >= 1".into(),
            });
        }
        let mtry = self
            .mtry
            .unwrap_or_else(|| (FEATURE_DIM as f64).sqrt().floor() as usize);
        if mtry == 0 || mtry > FEATURE_DIM {
            return Err(DetectError::InvalidParameter {
                detail: format!("mtry must be in 1..={FEATURE_DIM}, got {mtry}"),
            });
        }
        Ok(mtry)
    }
}

/// One tree node: an internal split (`value ≤ threshold` goes left) or a
/// leaf holding the training fake-fraction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TreeNode {
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf {
        fake_fraction: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecisionTree {
    pub(crate) nodes: Vec<TreeNode>,
}

impl DecisionTree {
    /// Fraction of training fakes at the leaf this sample lands in.
    pub fn fake_fraction(&self, features: &FrameFeatures) -> f64 {
        let mut idx = 0;
        loop {
            match self.nodes[idx] {
                TreeNode::Leaf { fake_fraction } => return fake_fraction,
                TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    idx = if features.values()[feature] <= threshold {
                        left
                    } else {
                        right
                    };
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ForestModel {
    pub(crate) trees: Vec<DecisionTree>,
}

impl ForestModel {
    pub fn tree_count(&self) -> usize {
        self.trees.len()
    }

    /// Mean real-fraction vote across trees, in [0, 1].
    pub fn real_score(&self, features: &FrameFeatures) -> f64 {
        let fake: f64 = self
            .trees
            .iter()
            .map(|t| t.fake_fraction(features))
            .sum::<f64>()
            / self.trees.len() as f64;
        1.0 - fake
    }
}

/// Predicts a frame label: real iff the forest's real-fraction vote
/// strictly exceeds `threshold` (default 0.5); the tie goes to fake.
pub fn classify_frame_forest(
    model: &ForestModel,
    features: &FrameFeatures,
    threshold: f64,
) -> Label {
    if model.real_score(features) > threshold {
        Label::Real
    } else {
        Label::Fake
    }
}

pub(crate) fn check_two_classes(labels: &[Label]) -> Result<()> {
    if labels.is_empty() {
        return Err(DetectError::EmptyTrainingData);
    }
    let fakes = labels.iter().filter(|&&l| l == Label::Fake).count();
    if fakes == 0 || fakes == labels.len() {
        return Err(DetectError::SingleClass {
            detail: format!("{fakes} fake of {} samples", labels.len()),
        });
    }
    Ok(())
}

/// Picks `count` distinct indices in `0..n`, deterministically from the
/// rng (partial Fisher-Yates).
fn sample_distinct(rng: &mut ChaCha8Rng, n: usize, count: usize) -> Vec<usize> {
    let mut pool: Vec<usize> = (0..n).collect();
    for i in 0..count {
        let j = rng.random_range(i..n);
        pool.swap(i, j);
    }
    pool.truncate(count);
    pool
}

fn gini(fakes: usize, total: usize) -> f64 {
    if total == 0 {
        return 0.0;
    }
    let p = fakes as f64 / total as f64;
    2.0 * p * (1.0 - p)
}

struct TreeBuilder<'a> {
    data: &'a [(FrameFeatures, Label)],
    max_depth: usize,
    mtry: usize,
    nodes: Vec<TreeNode>,
}

impl TreeBuilder<'_> {
    fn leaf(&mut self, fakes: usize, total: usize) -> usize {
        self.nodes.push(TreeNode::Leaf {
            fake_fraction: fakes as f64 / total as f64,
        });
        self.nodes.len() - 1
    }

    fn grow(&mut self, samples: &[usize], depth: usize, rng: &mut ChaCha8Rng) -> usize {
        let fakes = samples
            .iter()
            .filter(|&&i| self.data[i].1 == Label::Fake)
            .count();
        if depth >= self.max_depth || fakes == 0 || fakes == samples.len() {
            return self.leaf(fakes, samples.len());
        }

        // Best split over a fresh feature subsample: sort by value and
        // sweep midpoints between distinct neighbors; first strict
        // improvement wins ties, so the choice is deterministic.
        let features = sample_distinct(rng, FEATURE_DIM, self.mtry);
        let mut best: Option<(f64, usize, f64)> = None;
        let mut column: Vec<(f64, bool)> = Vec::with_capacity(samples.len());
        for &f in &features {
            column.clear();
            column.extend(samples.iter().map(|&i| {
                (
                    self.data[i].0.values()[f],
                    self.data[i].1 == Label::Fake,
                )
            }));
            column.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite features"));
            let mut left_fakes = 0usize;
            for i in 1..column.len() {
                left_fakes += usize::from(column[i - 1].1);
                if column[i].0 <= column[i - 1].0 {
                    continue;
                }
                let (nl, nr) = (i, column.len() - i);
                let score = (nl as f64 * gini(left_fakes, nl)
                    + nr as f64 * gini(fakes - left_fakes, nr))
                    / samples.len() as f64;
                if best.map_or(true, |(s, _, _)| score < s) {
                    best = Some((score, f, (column[i - 1].0 + column[i].0) / 2.0));
                }
            }
        }

        let Some((_, feature, threshold)) = best else {
            // Every sampled feature is constant here: nothing to split on.
            return self.leaf(fakes, samples.len());
        };
        let (left_samples, right_samples): (Vec<usize>, Vec<usize>) = samples
            .iter()
            .partition(|&&i| self.data[i].0.values()[feature] <= threshold);
        let slot = self.nodes.len();
        self.nodes.push(TreeNode::Leaf { fake_fraction: 0.0 }); // placeholder
        let left = self.grow(&left_samples, depth + 1, rng);
        let right = self.grow(&right_samples, depth + 1, rng);
        self.nodes[slot] = TreeNode::Split {
            feature,
            threshold,
            left,
            right,
        };
        slot
    }
}

/// Trains a random forest: `cfg.trees` CART trees, each on a bootstrap
/// resample, choosing among `mtry` random features per split by Gini
/// impurity. Bit-identical for a given (data, cfg, seed).
pub fn train_forest(
    data: &[(FrameFeatures, Label)],
    cfg: &ForestConfig,
    seed: u64,
) -> Result<ForestModel> {
    let mtry = cfg.validate()?;
    let labels: Vec<Label> = data.iter().map(|(_, l)| *l).collect();
    check_two_classes(&labels)?;
    let mut trees = Vec::with_capacity(cfg.trees);
    for t in 0..cfg.trees {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(t as u64 + 1);
        let bootstrap: Vec<usize> = (0..data.len())
            .map(|_| rng.random_range(0..data.len()))
            .collect();
        let mut builder = TreeBuilder {
            data,
            max_depth: cfg.max_depth,
            mtry,
            nodes: Vec::new(),
        };
        let root = builder.grow(&bootstrap, 0, &mut rng);
        debug_assert_eq!(root, 0);
        trees.push(DecisionTree {
            nodes: builder.nodes,
        });
    }
    Ok(ForestModel { trees })
}
