//! Fold generation for the two evaluation scenarios.
//!
//! Both scenarios keep apparent subjects fully disjoint between train and
//! test. The independent scenario additionally treats a fake and the
//! subject of its driving video as inseparable, which keeps driving-video
//! ids disjoint as well; the sub-independent scenario lets driving videos
//! repeat across the boundary.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use smf_data::{Label, Manifest, VideoRecord};

use crate::error::{DetectError, Result};

pub const FOLD_COUNT: usize = 3;
const PACKING_ATTEMPTS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    Independent,
    SubIndependent,
}

impl ScenarioKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ScenarioKind::Independent => "independent",
            ScenarioKind::SubIndependent => "sub_independent",
        }
    }
}

impl std::fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitScenario {
    pub kind: ScenarioKind,
    /// One of the three folds, 0..3.
    pub fold_index: usize,
}

/// Exact per-class video counts for the train and test sides.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitSizes {
    pub train_real: usize,
    pub train_fake: usize,
    pub test_real: usize,
    pub test_fake: usize,
}

impl Default for SplitSizes {
    fn default() -> Self {
        SplitSizes {
            train_real: 150,
            train_fake: 150,
            test_real: 50,
            test_fake: 50,
        }
    }
}

/// Video ids of one fold. `validation` is carved from the train quota
/// (10% per class) and shares its subject pool with `train`, never with
/// `test`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldSplit {
    pub train: Vec<String>,
    pub validation: Vec<String>,
    pub test: Vec<String>,
}

struct DisjointSet {
    parent: Vec<usize>,
}

impl DisjointSet {
    fn new(n: usize) -> Self {
        DisjointSet {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            let root = self.find(self.parent[x]);
            self.parent[x] = root;
        }
        self.parent[x]
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[rb] = ra;
        }
    }
}

#[derive(Debug, Clone)]
struct Component {
    /// Record indices into the manifest, in manifest order.
    records: Vec<usize>,
    real: usize,
    fake: usize,
}

/// Groups manifest records into units that must stay on one side of the
/// train/test boundary.
fn build_components(manifest: &Manifest, kind: ScenarioKind) -> Vec<Component> {
    let records = &manifest.records;
    let mut subject_names: Vec<&str> = Vec::new();
    let subject_ids: Vec<usize> = records
        .iter()
        .map(|r| {
            match subject_names.iter().position(|s| *s == r.subject_id) {
                Some(i) => i,
                None => {
                    subject_names.push(r.subject_id.as_str());
                    subject_names.len() - 1
                }
            }
        })
        .collect();
    let mut sets = DisjointSet::new(subject_names.len());
    if kind == ScenarioKind::Independent {
        for (i, rec) in records.iter().enumerate() {
            if let Some(driving_id) = &rec.driving_video_id {
                let driving = manifest
                    .record(driving_id)
                    .expect("manifest validation resolves driving refs");
                let j = records
                    .iter()
                    .position(|r| r.video_id == driving.video_id)
                    .expect("driving record present");
                sets.union(subject_ids[i], subject_ids[j]);
            }
        }
    }
    // Collect components keyed by root, ordered by first appearance.
    let mut order: Vec<usize> = Vec::new();
    let mut components: Vec<Component> = Vec::new();
    for (i, rec) in records.iter().enumerate() {
        let root = sets.find(subject_ids[i]);
        let slot = match order.iter().position(|&r| r == root) {
            Some(s) => s,
            None => {
                order.push(root);
                components.push(Component {
                    records: Vec::new(),
                    real: 0,
                    fake: 0,
                });
                components.len() - 1
            }
        };
        components[slot].records.push(i);
        match rec.label {
            Label::Real => components[slot].real += 1,
            Label::Fake => components[slot].fake += 1,
        }
    }
    components
}

fn class_counts(records: &[&VideoRecord]) -> (usize, usize) {
    let real = records.iter().filter(|r| r.label == Label::Real).count();
    (real, records.len() - real)
}

fn subjects_of<'a>(manifest: &'a Manifest, ids: &[String]) -> HashSet<&'a str> {
    ids.iter()
        .map(|id| {
            manifest
                .record(id)
                .expect("split ids come from the manifest")
                .subject_id
                .as_str()
        })
        .collect()
}

fn driving_ids_of<'a>(manifest: &'a Manifest, ids: &[String]) -> HashSet<&'a str> {
    ids.iter()
        .filter_map(|id| {
            manifest
                .record(id)
                .expect("split ids come from the manifest")
                .driving_video_id
                .as_deref()
        })
        .collect()
}

fn verify_fold(manifest: &Manifest, split: &FoldSplit, kind: ScenarioKind) -> Result<()> {
    let mut train_side: Vec<String> = split.train.clone();
    train_side.extend(split.validation.iter().cloned());
    let train_subjects = subjects_of(manifest, &train_side);
    let test_subjects = subjects_of(manifest, &split.test);
    if let Some(shared) = train_subjects.intersection(&test_subjects).next() {
        return Err(DetectError::InfeasibleSplit {
            detail: format!("fold verification failed: subject {shared} appears on both sides"),
        });
    }
    if kind == ScenarioKind::Independent {
        let train_driving = driving_ids_of(manifest, &train_side);
        let test_driving = driving_ids_of(manifest, &split.test);
        if let Some(shared) = train_driving.intersection(&test_driving).next() {
            return Err(DetectError::InfeasibleSplit {
                detail: format!(
                    "fold verification failed: driving video {shared} appears on both sides"
                ),
            });
        }
    }
    Ok(())
}

/// Builds one deterministic fold. All folds of a scenario come from the
/// same seed on distinct rng streams, so the three folds differ while the
/// whole set is reproducible. Subject-disjointness (and, for the
/// independent scenario, driving-video disjointness) is re-verified on
/// the produced fold before it is returned.
pub fn make_splits(
    manifest: &Manifest,
    scenario: SplitScenario,
    sizes: &SplitSizes,
    seed: u64,
) -> Result<FoldSplit> {
    if scenario.fold_index >= FOLD_COUNT {
        return Err(DetectError::InvalidParameter {
            detail: format!(
                "fold_index must be in 0..{FOLD_COUNT}, got {}",
                scenario.fold_index
            ),
        });
    }
    if sizes.train_real == 0 || sizes.train_fake == 0 || sizes.test_real == 0 || sizes.test_fake == 0
    {
        return Err(DetectError::InvalidParameter {
            detail: "every split quota must be at least 1".into(),
        });
    }
    let records = &manifest.records;
    let all: Vec<&VideoRecord> = records.iter().collect();
    let (total_real, total_fake) = class_counts(&all);
    let need_real = sizes.train_real + sizes.test_real;
    let need_fake = sizes.train_fake + sizes.test_fake;
    if total_real < need_real || total_fake < need_fake {
        return Err(DetectError::InfeasibleSplit {
            detail: format!(
                "manifest has {total_real} real and {total_fake} fake videos; \
                 the requested sizes need {need_real} real and {need_fake} fake"
            ),
        });
    }

    let mut components = build_components(manifest, scenario.kind);
    let stream = match scenario.kind {
        ScenarioKind::Independent => 1u64 << 32,
        ScenarioKind::SubIndependent => 2u64 << 32,
    } | scenario.fold_index as u64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);

    let mut last_shortfall = String::new();
    for _ in 0..PACKING_ATTEMPTS {
        components.shuffle(&mut rng);
        let mut need_test_real = sizes.test_real;
        let mut need_test_fake = sizes.test_fake;
        let mut test_pool: Vec<&Component> = Vec::new();
        let mut train_pool: Vec<&Component> = Vec::new();
        for comp in &components {
            let helps_test = (comp.real > 0 && need_test_real > 0)
                || (comp.fake > 0 && need_test_fake > 0);
            if helps_test {
                need_test_real = need_test_real.saturating_sub(comp.real);
                need_test_fake = need_test_fake.saturating_sub(comp.fake);
                test_pool.push(comp);
            } else {
                train_pool.push(comp);
            }
        }
        let pool_counts = |pool: &[&Component]| {
            pool.iter().fold((0usize, 0usize), |(r, f), c| {
                (r + c.real, f + c.fake)
            })
        };
        let (test_real_avail, test_fake_avail) = pool_counts(&test_pool);
        let (train_real_avail, train_fake_avail) = pool_counts(&train_pool);
        if test_real_avail < sizes.test_real
            || test_fake_avail < sizes.test_fake
            || train_real_avail < sizes.train_real
            || train_fake_avail < sizes.train_fake
        {
            last_shortfall = format!(
                "packing left test with {test_real_avail} real / {test_fake_avail} fake \
                 (need {} / {}) and train with {train_real_avail} real / {train_fake_avail} \
                 fake (need {} / {})",
                sizes.test_real, sizes.test_fake, sizes.train_real, sizes.train_fake
            );
            continue;
        }

        // Flatten each pool per class, shuffle, and take the exact quota.
        let mut pick = |pool: &[&Component], label: Label, count: usize| -> Vec<String> {
            let mut ids: Vec<String> = pool
                .iter()
                .flat_map(|c| c.records.iter())
                .filter(|&&i| records[i].label == label)
                .map(|&i| records[i].video_id.clone())
                .collect();
            ids.shuffle(&mut rng);
            ids.truncate(count);
            ids
        };
        let test_ids: Vec<String> = pick(&test_pool, Label::Real, sizes.test_real)
            .into_iter()
            .chain(pick(&test_pool, Label::Fake, sizes.test_fake))
            .collect();
        let mut train_real = pick(&train_pool, Label::Real, sizes.train_real);
        let mut train_fake = pick(&train_pool, Label::Fake, sizes.train_fake);
        // Validation holdout: 10% of each train class, carved off the front.
        let val_real: Vec<String> = train_real.drain(..sizes.train_real / 10).collect();
        let val_fake: Vec<String> = train_fake.drain(..sizes.train_fake / 10).collect();
        let split = FoldSplit {
            train: train_real.into_iter().chain(train_fake).collect(),
            validation: val_real.into_iter().chain(val_fake).collect(),
            test: test_ids,
        };
        verify_fold(manifest, &split, scenario.kind)?;
        return Ok(split);
    }
    Err(DetectError::InfeasibleSplit {
        detail: format!(
            "no component packing satisfied the quotas after {PACKING_ATTEMPTS} attempts; \
             {last_shortfall}"
        ),
    })
}


#[cfg(test)]
mod tests {
    use super::test_support::{fake, paired_manifest, real};
    use super::*;

    fn count_labels(manifest: &Manifest, ids: &[String]) -> (usize, usize) {
        let real = ids
            .iter()
            .filter(|id| manifest.record(id).unwrap().label == Label::Real)
            .count();
        (real, ids.len() - real)
    }

    #[test]
    fn independent_folds_have_disjoint_subjects_and_driving_ids() {
        let manifest = paired_manifest(8);
        let sizes = SplitSizes {
            train_real: 3,
            train_fake: 3,
            test_real: 2,
            test_fake: 2,
        };
        let mut folds = Vec::new();
        for fold_index in 0..FOLD_COUNT {
            let scenario = SplitScenario {
                kind: ScenarioKind::Independent,
                fold_index,
            };
            let split = make_splits(&manifest, scenario, &sizes, 17).unwrap();
            let train_subjects = subjects_of(&manifest, &split.train);
            let test_subjects = subjects_of(&manifest, &split.test);
            assert_eq!(train_subjects.intersection(&test_subjects).count(), 0);
            let train_driving = driving_ids_of(&manifest, &split.train);
            let test_driving = driving_ids_of(&manifest, &split.test);
            assert_eq!(train_driving.intersection(&test_driving).count(), 0);
            assert_eq!(count_labels(&manifest, &split.train), (3, 3));
            assert_eq!(count_labels(&manifest, &split.test), (2, 2));
            assert!(split.validation.is_empty()); // 3 / 10 == 0
            folds.push(split);
        }
        assert!(
            folds.iter().any(|f| f != &folds[0]),
            "three folds from one seed should not all coincide"
        );
    }

    #[test]
    fn sub_independent_allows_shared_driving_video() {
        // Both fakes are driven by r1, so any 1/1/1/1 split must place
        // the same driving id on both sides.
        let manifest = Manifest::new(vec![
            real("r1", "s1"),
            real("r2", "s2"),
            fake("f1", "a1", "r1"),
            fake("f2", "a2", "r1"),
        ])
        .unwrap();
        let sizes = SplitSizes {
            train_real: 1,
            train_fake: 1,
            test_real: 1,
            test_fake: 1,
        };
        let scenario = SplitScenario {
            kind: ScenarioKind::SubIndependent,
            fold_index: 0,
        };
        let split = make_splits(&manifest, scenario, &sizes, 5).unwrap();
        let train_driving = driving_ids_of(&manifest, &split.train);
        let test_driving = driving_ids_of(&manifest, &split.test);
        assert_eq!(train_driving.intersection(&test_driving).count(), 1);
        // Subjects stay disjoint even though the driving video repeats.
        let train_subjects = subjects_of(&manifest, &split.train);
        let test_subjects = subjects_of(&manifest, &split.test);
        assert_eq!(train_subjects.intersection(&test_subjects).count(), 0);
    }

    #[test]
    fn independent_rejects_manifest_that_forces_driving_overlap() {
        // Same manifest as above: under the independent scenario both
        // fakes fuse with subject s1 into one component, leaving no fake
        // for the other side.
        let manifest = Manifest::new(vec![
            real("r1", "s1"),
            real("r2", "s2"),
            fake("f1", "a1", "r1"),
            fake("f2", "a2", "r1"),
        ])
        .unwrap();
        let sizes = SplitSizes {
            train_real: 1,
            train_fake: 1,
            test_real: 1,
            test_fake: 1,
        };
        let scenario = SplitScenario {
            kind: ScenarioKind::Independent,
            fold_index: 0,
        };
        assert!(matches!(
            make_splits(&manifest, scenario, &sizes, 5),
            Err(DetectError::InfeasibleSplit { .. })
        ));
    }

    #[test]
    fn default_sizes_on_small_manifest_are_infeasible() {
        let manifest = paired_manifest(50); // 100 videos
        let scenario = SplitScenario {
            kind: ScenarioKind::Independent,
            fold_index: 0,
        };
        let err = make_splits(&manifest, scenario, &SplitSizes::default(), 1).unwrap_err();
        match err {
            DetectError::InfeasibleSplit { detail } => {
                assert!(detail.contains("50 real"), "detail was: {detail}");
                assert!(detail.contains("200 real"), "detail was: {detail}");
            }
            other => panic!("expected InfeasibleSplit, got {other:?}"),
        }
    }

    #[test]
    fn splits_are_deterministic_and_folds_differ() {
        let manifest = paired_manifest(12);
        let sizes = SplitSizes {
            train_real: 5,
            train_fake: 5,
            test_real: 3,
            test_fake: 3,
        };
        let fold0 = SplitScenario {
            kind: ScenarioKind::SubIndependent,
            fold_index: 0,
        };
        let fold1 = SplitScenario {
            kind: ScenarioKind::SubIndependent,
            fold_index: 1,
        };
        let a = make_splits(&manifest, fold0, &sizes, 99).unwrap();
        let b = make_splits(&manifest, fold0, &sizes, 99).unwrap();
        assert_eq!(a, b);
        let c = make_splits(&manifest, fold1, &sizes, 99).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn validation_is_carved_from_train_and_never_meets_test() {
        let manifest = paired_manifest(40);
        let sizes = SplitSizes {
            train_real: 20,
            train_fake: 20,
            test_real: 5,
            test_fake: 5,
        };
        let scenario = SplitScenario {
            kind: ScenarioKind::Independent,
            fold_index: 2,
        };
        let split = make_splits(&manifest, scenario, &sizes, 7).unwrap();
        assert_eq!(count_labels(&manifest, &split.validation), (2, 2));
        assert_eq!(count_labels(&manifest, &split.train), (18, 18));
        assert_eq!(split.test.len(), 10);
        let as_set = |v: &[String]| v.iter().cloned().collect::<HashSet<_>>();
        let train = as_set(&split.train);
        let val = as_set(&split.validation);
        let test = as_set(&split.test);
        assert!(train.is_disjoint(&val));
        assert!(train.is_disjoint(&test));
        assert!(val.is_disjoint(&test));
        let val_subjects = subjects_of(&manifest, &split.validation);
        let test_subjects = subjects_of(&manifest, &split.test);
        assert_eq!(val_subjects.intersection(&test_subjects).count(), 0);
    }

    #[test]
    fn bad_parameters_rejected() {
        let manifest = paired_manifest(10);
        let scenario = SplitScenario {
            kind: ScenarioKind::Independent,
            fold_index: 3,
        };
        let sizes = SplitSizes {
            train_real: 1,
            train_fake: 1,
            test_real: 1,
            test_fake: 1,
        };
        assert!(matches!(
            make_splits(&manifest, scenario, &sizes, 1),
            Err(DetectError::InvalidParameter { .. })
        ));
        let zero = SplitSizes {
            train_real: 0,
            ..sizes
        };
        let scenario = SplitScenario {
            kind: ScenarioKind::Independent,
            fold_index: 0,
        };
        assert!(matches!(
            make_splits(&manifest, scenario, &zero, 1),
            Err(DetectError::InvalidParameter { .. })
        ));
    }
}
