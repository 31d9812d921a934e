//! Deterministic synthetic dataset generator for end-to-end exercises.
//!
//! Produces a manifest plus on-disk PGM frames. Each real subject gets
//! smooth-ramp videos; each fake video pairs with one real video (its
//! driving reference) and is stamped with a high-frequency checkerboard
//! artifact. With `artifact_matches_label` off, the artifact lands on a
//! per-video coin flip instead of on fakes, so frame features carry no
//! label signal and classifiers should score at chance.

use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use smf_core::{write_image, Grid2D, Image};
use smf_data::{save_manifest, Gender, Label, Manifest, VideoRecord};

use crate::error::{DetectError, Result};

pub const SYNTH_FRAME_SIDE: usize = 96;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthConfig {
    /// Real subjects; an equal number of apparent fake subjects pair up
    /// with them one-to-one.
    pub subjects: usize,
    pub videos_per_subject: usize,
    pub frames_per_video: usize,
    /// True: fakes (and only fakes) carry the checkerboard artifact.
    /// False: a per-video coin flip places the artifact independently of
    /// the label, making the classes statistically indistinguishable.
    pub artifact_matches_label: bool,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            subjects: 10,
            videos_per_subject: 10,
            frames_per_video: 8,
            artifact_matches_label: true,
            seed: 2024,
        }
    }
}

const NOUNS: [&str; 8] = [
    "river", "window", "market", "garden", "teacher", "mirror", "bridge", "signal",
];
const VERBS: [&str; 6] = ["points", "waves", "turns", "signs", "nods", "gestures"];

fn real_transcript(s: usize, v: usize) -> String {
    format!(
        "the signer {} at the {} and then spells the {} slowly",
        VERBS[(s + v) % VERBS.len()],
        NOUNS[s % NOUNS.len()],
        NOUNS[(s + v) % NOUNS.len()],
    )
}

/// A degraded copy of the paired real transcript: one verb swapped, the
/// trailing adverb dropped.
fn fake_transcript(s: usize, v: usize) -> String {
    format!(
        "the signer {} at the {} and then spells the {}",
        VERBS[(s + v + 1) % VERBS.len()],
        NOUNS[s % NOUNS.len()],
        NOUNS[(s + v) % NOUNS.len()],
    )
}

struct FrameParams {
    /// Ramp orientation mix in [0.2, 0.8].
    mix: f64,
    /// Sinusoid phase offset per video.
    phase: f64,
    artifact: bool,
}

fn render_frame(params: &FrameParams, frame_index: usize) -> Image {
    let grid = Grid2D::new(SYNTH_FRAME_SIDE, SYNTH_FRAME_SIDE).unwrap();
    let side = (SYNTH_FRAME_SIDE - 1) as f64;
    let phase = params.phase + frame_index as f64 * 0.35;
    let mut data = Vec::with_capacity(SYNTH_FRAME_SIDE * SYNTH_FRAME_SIDE);
    for r in 0..SYNTH_FRAME_SIDE {
        for c in 0..SYNTH_FRAME_SIDE {
            let ramp = (params.mix * r as f64 + (1.0 - params.mix) * c as f64) / side;
            let wave = 0.08 * (std::f64::consts::TAU * c as f64 / 32.0 + phase).sin();
            let mut v = 0.3 + 0.35 * ramp + wave;
            if params.artifact {
                v += if ((r / 2) + (c / 2)) % 2 == 0 { 0.1 } else { -0.1 };
            }
            data.push(v.clamp(0.0, 1.0));
        }
    }
    Image::new(grid, 1, data).unwrap()
}

fn write_video(dir: &Path, params: &FrameParams, frames: usize) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| DetectError::io(dir.display().to_string(), e))?;
    for i in 0..frames {
        let frame = render_frame(params, i);
        write_image(dir.join(format!("{i:03}.pgm")), &frame)?;
    }
    Ok(())
}

/// Generates the dataset under `root`: frames in `frames/<video_id>/`,
/// the manifest at `manifest.jsonl`. Returns the manifest. Byte-identical
/// output for a given config.
pub fn generate_synthetic_dataset(root: &Path, cfg: &SynthConfig) -> Result<Manifest> {
    if cfg.subjects == 0 || cfg.videos_per_subject == 0 || cfg.frames_per_video == 0 {
        return Err(DetectError::InvalidParameter {
            detail: "synthetic dataset needs at least one subject, video, and frame".into(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut records = Vec::new();
    for s in 0..cfg.subjects {
        for v in 0..cfg.videos_per_subject {
            let real_id = format!("r{s:02}v{v:02}");
            let fake_id = format!("f{s:02}v{v:02}");
            let real_params = FrameParams {
                mix: rng.random_range(0.2..0.8),
                phase: rng.random_range(0.0..std::f64::consts::TAU),
                artifact: if cfg.artifact_matches_label {
                    false
                } else {
                    rng.random_bool(0.5)
                },
            };
            let fake_params = FrameParams {
                mix: rng.random_range(0.2..0.8),
                phase: rng.random_range(0.0..std::f64::consts::TAU),
                artifact: if cfg.artifact_matches_label {
                    true
                } else {
                    rng.random_bool(0.5)
                },
            };
            write_video(
                &root.join("frames").join(&real_id),
                &real_params,
                cfg.frames_per_video,
            )?;
            write_video(
                &root.join("frames").join(&fake_id),
                &fake_params,
                cfg.frames_per_video,
            )?;
            records.push(VideoRecord {
                video_id: real_id.clone(),
                label: Label::Real,
                subject_id: format!("subj{s:02}"),
                source_subject_id: None,
                driving_video_id: None,
                gender: if s % 2 == 0 {
                    Gender::Female
                } else {
                    Gender::Male
                },
                duration_s: 8.0 + v as f64 * 0.25,
                frames_path: format!("frames/{real_id}"),
                transcript: Some(real_transcript(s, v)),
                unseen_subject: false,
                appearance_group: format!("grp{s:02}"),
            });
            records.push(VideoRecord {
                video_id: fake_id.clone(),
                label: Label::Fake,
                subject_id: format!("appr{s:02}"),
                source_subject_id: Some(format!("appr{s:02}")),
                driving_video_id: Some(real_id),
                gender: if s % 2 == 0 {
                    Gender::Male
                } else {
                    Gender::Female
                },
                duration_s: 6.5 + v as f64 * 0.25,
                frames_path: format!("frames/{fake_id}"),
                transcript: Some(fake_transcript(s, v)),
                unseen_subject: s % 3 == 0,
                appearance_group: if s % 2 == 0 {
                    format!("grp{s:02}")
                } else {
                    format!("grp-f{s:02}")
                },
            });
        }
    }
    let manifest = Manifest::new(records)?;
    save_manifest(root.join("manifest.jsonl"), &manifest)?;
    Ok(manifest)
}
