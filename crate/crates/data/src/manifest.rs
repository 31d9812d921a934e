//! Video records, the validated manifest, and transfer-type
//! classification.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{DataError, Result};

/// Manifest schema version this toolkit reads and writes.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Label {
    Real,
    Fake,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Gender {
    Female,
    Male,
    Unspecified,
}

/// One video: a real recording or a generated fake.
///
/// `subject_id` is the apparent identity (whose face/appearance is seen).
/// Fakes additionally carry `source_subject_id` (the identity donor) and
/// `driving_video_id` (the real video whose motion was transferred); real
/// records carry neither. `appearance_group` buckets visually similar
/// looks — a human judgment recorded in the data, used to classify
/// transfer types. `unseen_subject` marks subjects absent from the
/// original training corpus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VideoRecord {
    pub video_id: String,
    pub label: Label,
    pub subject_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source_subject_id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub driving_video_id: Option<String>,
    pub gender: Gender,
    pub duration_s: f64,
    pub frames_path: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transcript: Option<String>,
    pub unseen_subject: bool,
    pub appearance_group: String,
}

impl VideoRecord {
    fn validate(&self) -> Result<()> {
        let violation = |detail: &str| {
            Err(DataError::SchemaViolation {
                video_id: self.video_id.clone(),
                detail: detail.into(),
            })
        };
        if self.video_id.is_empty() {
            return violation("video_id must be nonempty");
        }
        if !(self.duration_s > 0.0 && self.duration_s.is_finite()) {
            return violation("duration_s must be a positive finite number of seconds");
        }
        match self.label {
            Label::Fake => {
                if self.driving_video_id.is_none() {
                    return violation("fake records must carry driving_video_id");
                }
            }
            Label::Real => {
                if self.driving_video_id.is_some() {
                    return violation("real records must not carry driving_video_id");
                }
                if self.source_subject_id.is_some() {
                    return violation("real records must not carry source_subject_id");
                }
            }
        }
        Ok(())
    }
}

/// A validated collection of video records.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub schema_version: u32,
    pub records: Vec<VideoRecord>,
}

impl Manifest {
    /// Validates and wraps records: ids unique, per-record schema rules
    /// hold, and every driving reference resolves to a real record.
    pub fn new(records: Vec<VideoRecord>) -> Result<Self> {
        let mut seen: HashMap<&str, usize> = HashMap::new();
        for (i, rec) in records.iter().enumerate() {
            rec.validate()?;
            if let Some(&first) = seen.get(rec.video_id.as_str()) {
                return Err(DataError::DuplicateId {
                    video_id: rec.video_id.clone(),
                    first_line: first + 1,
                    second_line: i + 1,
                });
            }
            seen.insert(&rec.video_id, i);
        }
        for rec in &records {
            if let Some(driving_id) = &rec.driving_video_id {
                match seen.get(driving_id.as_str()) {
                    None => {
                        return Err(DataError::DanglingDrivingRef {
                            video_id: rec.video_id.clone(),
                            driving_video_id: driving_id.clone(),
                        })
                    }
                    Some(&idx) if records[idx].label != Label::Real => {
                        return Err(DataError::DrivingRefNotReal {
                            video_id: rec.video_id.clone(),
                            driving_video_id: driving_id.clone(),
                        })
                    }
                    Some(_) => {}
                }
            }
        }
        Ok(Manifest {
            schema_version: SCHEMA_VERSION,
            records,
        })
    }

    pub fn record(&self, video_id: &str) -> Option<&VideoRecord> {
        self.records.iter().find(|r| r.video_id == video_id)
    }

    /// Id → record index for batch lookups.
    pub fn by_id(&self) -> HashMap<&str, &VideoRecord> {
        self.records
            .iter()
            .map(|r| (r.video_id.as_str(), r))
            .collect()
    }
}

/// Loads a JSON-lines manifest: one record per line, blank lines skipped.
/// Parse failures, duplicate ids, schema violations, and dangling driving
/// references each surface as distinct errors; parse errors carry the
/// 1-based line number.
pub fn load_manifest(path: impl AsRef<Path>) -> Result<Manifest> {
    let path = path.as_ref();
    let text =
        fs::read_to_string(path).map_err(|e| DataError::io(path.display().to_string(), e))?;
    let mut records = Vec::new();
    let mut lines_of: HashMap<String, usize> = HashMap::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let rec: VideoRecord = serde_json::from_str(line).map_err(|e| DataError::Parse {
            path: path.display().to_string(),
            line: i + 1,
            detail: e.to_string(),
        })?;
        // Duplicate detection here, so the error can name file lines
        // rather than record positions.
        if let Some(&first) = lines_of.get(&rec.video_id) {
            return Err(DataError::DuplicateId {
                video_id: rec.video_id,
                first_line: first,
                second_line: i + 1,
            });
        }
        lines_of.insert(rec.video_id.clone(), i + 1);
        records.push(rec);
    }
    Manifest::new(records)
}

/// Writes a manifest as JSON-lines, one record per line, in record order.
pub fn save_manifest(path: impl AsRef<Path>, manifest: &Manifest) -> Result<()> {
    let path = path.as_ref();
    let mut out = String::new();
    for rec in &manifest.records {
        out.push_str(&serde_json::to_string(rec).expect("record serializes"));
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| DataError::io(path.display().to_string(), e))
}

/// The three pose/style transfer categories a fake can realize.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransferType {
    SamePersonDiffAppearance,
    DiffPersonSimilarAppearance,
    DiffPersonDiffAppearance,
}

/// Classifies how a fake was produced by comparing its apparent subject
/// and appearance group with those of its driving video. Same subject →
/// same-person transfer (self-reenactment folds into this category);
/// different subjects split on whether the appearance groups match.
pub fn classify_transfer_type(rec: &VideoRecord, manifest: &Manifest) -> Result<TransferType> {
    if rec.label != Label::Fake {
        return Err(DataError::NotFake {
            video_id: rec.video_id.clone(),
        });
    }
    let driving_id = rec
        .driving_video_id
        .as_ref()
        .ok_or_else(|| DataError::SchemaViolation {
            video_id: rec.video_id.clone(),
            detail: "fake records must carry driving_video_id".into(),
        })?;
    let driving = manifest
        .record(driving_id)
        .ok_or_else(|| DataError::DanglingDrivingRef {
            video_id: rec.video_id.clone(),
            driving_video_id: driving_id.clone(),
        })?;
    Ok(if rec.subject_id == driving.subject_id {
        TransferType::SamePersonDiffAppearance
    } else if rec.appearance_group == driving.appearance_group {
        TransferType::DiffPersonSimilarAppearance
    } else {
        TransferType::DiffPersonDiffAppearance
    })
}
