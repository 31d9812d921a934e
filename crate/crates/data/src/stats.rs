//! Dataset statistics: the dataset-summary row set (totals, gender
//! counts, mean duration, subject counts split original vs unseen).

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{DataError, Result};
use crate::manifest::{Gender, Manifest};
use crate::round2;

/// Summary of one manifest. Counts cover every record; a subject counts
/// as unseen when any of its videos flags `unseen_subject` (the flag is
/// expected to be consistent per subject). `mean_duration_s` is kept at
/// full precision; the text table displays it to 2 decimal places.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsReport {
    pub total_videos: usize,
    pub female: usize,
    pub male: usize,
    pub unspecified: usize,
    pub mean_duration_s: f64,
    pub distinct_subjects: usize,
    pub original_subjects: usize,
    pub unseen_subjects: usize,
}

impl StatsReport {
    pub fn mean_duration_rounded(&self) -> f64 {
        round2(self.mean_duration_s)
    }

    /// Aligned-text table, one row per statistic. The `Unspecified` row
    /// appears only when the bucket is nonempty, keeping the default
    /// female/male partition at the published row set.
    pub fn to_text(&self) -> String {
        let mut rows: Vec<(&str, String)> = vec![
            ("Total videos", self.total_videos.to_string()),
            ("Female", self.female.to_string()),
            ("Male", self.male.to_string()),
        ];
        if self.unspecified > 0 {
            rows.push(("Unspecified", self.unspecified.to_string()));
        }
        rows.extend([
            (
                "Mean duration (s)",
                format!("{:.2}", self.mean_duration_s),
            ),
            ("Subjects", self.distinct_subjects.to_string()),
            ("Original subjects", self.original_subjects.to_string()),
            ("Unseen subjects", self.unseen_subjects.to_string()),
        ]);
        let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        rows.iter()
            .map(|(k, v)| format!("{k:<width$}  {v}\n"))
            .collect()
    }
}

/// Computes the summary over every record of a manifest.
pub fn dataset_stats(manifest: &Manifest) -> Result<StatsReport> {
    if manifest.records.is_empty() {
        return Err(DataError::EmptyManifest);
    }
    let mut female = 0;
    let mut male = 0;
    let mut unspecified = 0;
    let mut duration_sum = 0.0;
    let mut subject_unseen: HashMap<&str, bool> = HashMap::new();
    for rec in &manifest.records {
        match rec.gender {
            Gender::Female => female += 1,
            Gender::Male => male += 1,
            Gender::Unspecified => unspecified += 1,
        }
        duration_sum += rec.duration_s;
        let unseen = subject_unseen.entry(&rec.subject_id).or_insert(false);
        *unseen |= rec.unseen_subject;
    }
    let distinct_subjects = subject_unseen.len();
    let unseen_subjects = subject_unseen.values().filter(|&&u| u).count();
    Ok(StatsReport {
        total_videos: manifest.records.len(),
        female,
        male,
        unspecified,
        mean_duration_s: duration_sum / manifest.records.len() as f64,
        distinct_subjects,
        original_subjects: distinct_subjects - unseen_subjects,
        unseen_subjects,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifest::test_support::{fake, real};
    use crate::manifest::VideoRecord;

    fn manifest(records: Vec<VideoRecord>) -> Manifest {
        Manifest::new(records).unwrap()
    }

    #[test]
    fn single_video_totals() {
        let mut r = real("r1", "alice");
        r.duration_s = 7.25;
        let report = dataset_stats(&manifest(vec![r])).unwrap();
        assert_eq!(report.total_videos, 1);
        assert_eq!(report.female, 1);
        assert_eq!(report.mean_duration_s, 7.25);
        assert_eq!(report.distinct_subjects, 1);
        assert_eq!(report.original_subjects, 1);
        assert_eq!(report.unseen_subjects, 0);
    }

    #[test]
    fn mean_duration_rounds_half_up() {
        let mut a = real("r1", "alice");
        a.duration_s = 8.0;
        let mut b = real("r2", "bob");
        b.duration_s = 9.0;
        let report = dataset_stats(&manifest(vec![a, b])).unwrap();
        assert_eq!(report.mean_duration_rounded(), 8.50);
        assert!(report.to_text().contains("8.50"));
    }

    #[test]
    fn gender_buckets_sum_to_total() {
        let mut a = real("r1", "alice");
        a.gender = Gender::Female;
        let mut b = real("r2", "bob");
        b.gender = Gender::Male;
        let mut c = real("r3", "chris");
        c.gender = Gender::Unspecified;
        let report = dataset_stats(&manifest(vec![a, b, c])).unwrap();
        assert_eq!(
            report.female + report.male + report.unspecified,
            report.total_videos
        );
        assert!(report.to_text().contains("Unspecified"));
    }

    #[test]
    fn unspecified_row_hidden_when_empty() {
        let report = dataset_stats(&manifest(vec![real("r1", "alice")])).unwrap();
        assert!(!report.to_text().contains("Unspecified"));
    }

    #[test]
    fn subjects_split_original_vs_unseen() {
        // alice: two real videos (original); carol: fake flagged unseen.
        let records = vec![
            real("r1", "alice"),
            real("r2", "alice"),
            fake("f1", "carol", "r1"),
        ];
        let report = dataset_stats(&manifest(records)).unwrap();
        assert_eq!(report.total_videos, 3);
        assert_eq!(report.distinct_subjects, 2);
        assert_eq!(report.original_subjects, 1);
        assert_eq!(report.unseen_subjects, 1);
    }

    #[test]
    fn stats_are_permutation_invariant() {
        let records = vec![
            real("r1", "alice"),
            real("r2", "bob"),
            fake("f1", "carol", "r1"),
            fake("f2", "dora", "r2"),
        ];
        let forward = dataset_stats(&manifest(records.clone())).unwrap();
        let mut reversed_records = records;
        reversed_records.reverse();
        let reversed = dataset_stats(&manifest(reversed_records)).unwrap();
        assert_eq!(forward, reversed);
    }

    #[test]
    fn empty_manifest_rejected() {
        let m = Manifest {
            schema_version: crate::manifest::SCHEMA_VERSION,
            records: vec![],
        };
        assert!(matches!(
            dataset_stats(&m),
            Err(DataError::EmptyManifest)
        ));
    }

    #[test]
    fn json_round_trip() {
        let report = dataset_stats(&manifest(vec![real("r1", "alice")])).unwrap();
        let json = serde_json::to_string(&report).unwrap();
        let back: StatsReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, report);
    }
}
