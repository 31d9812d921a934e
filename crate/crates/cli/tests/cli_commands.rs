//! End-to-end runs of every subcommand through the installed binary:
//! envelope shape, file outputs with their sidecars, cross-command
//! consistency, and the error/exit-code contract.

use std::fs;
use std::path::Path;
use std::process::Command;

use serde_json::Value;
use smf_core::{FloatMap, FlowField, Grid2D, Image};
use smf_detect::synth::{generate_synthetic_dataset, SynthConfig};
use smf_text::DistributionReport;

struct CliRun {
    stdout: String,
    stderr: String,
    code: Option<i32>,
}

fn smf(args: &[&str]) -> CliRun {
    smf_with_env(args, &[])
}

fn smf_with_env(args: &[&str], env: &[(&str, &str)]) -> CliRun {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_smf"));
    cmd.args(args);
    for (k, v) in env {
        cmd.env(k, v);
    }
    let output = cmd.output().expect("smf binary runs");
    CliRun {
        stdout: String::from_utf8_lossy(&output.stdout).into_owned(),
        stderr: String::from_utf8_lossy(&output.stderr).into_owned(),
        code: output.status.code(),
    }
}

fn envelope(run: &CliRun) -> Value {
    assert_eq!(run.code, Some(0), "stderr: {}", run.stderr);
    serde_json::from_str(&run.stdout).expect("stdout is the JSON envelope")
}

fn error_detail(run: &CliRun, expect_code: i32) -> String {
    assert_eq!(run.code, Some(expect_code), "stdout: {}", run.stdout);
    let err: Value = serde_json::from_str(&run.stderr).expect("stderr is a JSON error");
    format!(
        "{}: {}",
        err["error"]["kind"].as_str().unwrap_or_default(),
        err["error"]["detail"].as_str().unwrap_or_default()
    )
}

fn assert_envelope_shape(env: &Value, command: &str) {
    let obj = env.as_object().expect("envelope is an object");
    let mut keys: Vec<_> = obj.keys().map(String::as_str).collect();
    keys.sort_unstable();
    assert_eq!(keys, ["command", "params", "result", "tool", "version"]);
    assert_eq!(env["tool"], "smf");
    assert_eq!(env["command"], command);
    assert!(env["version"].as_str().is_some_and(|v| !v.is_empty()));
}

fn assert_sidecar(payload: &Path, command: &str) {
    let meta_path = if payload.is_dir() {
        payload.join("meta.json")
    } else {
        let name = payload.file_name().unwrap().to_str().unwrap();
        payload.with_file_name(format!("{name}.meta.json"))
    };
    let meta: Value =
        serde_json::from_str(&fs::read_to_string(&meta_path).expect("sidecar exists"))
            .expect("sidecar parses");
    assert_eq!(meta["tool"], "smf");
    assert_eq!(meta["command"], command);
    assert!(meta["params"].is_object());
}

fn gradient_image(side: usize) -> Image {
    let g = Grid2D::new(side, side).unwrap();
    Image::from_fn(g, |r, c| {
        ((r * 31 + c * 17) % 256) as f64 / 255.0
    })
    .unwrap()
}

#[test]
fn crop_writes_frames_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let frames = dir.path().join("frames");
    fs::create_dir(&frames).unwrap();
    let img = gradient_image(64);
    for i in 0..3 {
        smf_core::write_image(frames.join(format!("{i:03}.png")), &img).unwrap();
    }
    let boxes = dir.path().join("boxes.jsonl");
    let lines: String = (0..3)
        .map(|i| {
            format!(
                "{{\"frame_index\":{i},\"top\":20.0,\"left\":24.0,\"height\":16.0,\"width\":12.0}}\n"
            )
        })
        .collect();
    fs::write(&boxes, lines).unwrap();
    let out = dir.path().join("cropped");

    let run = smf(&[
        "crop",
        "--frames",
        frames.to_str().unwrap(),
        "--boxes",
        boxes.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--output-side",
        "32",
    ]);
    let env = envelope(&run);
    assert_envelope_shape(&env, "crop");
    assert_eq!(env["result"]["frames"], 3);
    assert_eq!(env["params"]["scale"], 4.0);
    assert_eq!(env["params"]["top_margin"], 0.5);
    assert_sidecar(&out, "crop");
    for i in 0..3 {
        let cropped: Image = smf_core::read_image(out.join(format!("{i:03}.png"))).unwrap();
        assert_eq!((cropped.height(), cropped.width()), (32, 32));
    }
}

#[test]
fn enhance_ops_write_images() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.png");
    smf_core::write_image(&input, &gradient_image(24)).unwrap();

    for (op, side, want) in [
        ("enhance", None, 24),
        ("sharpen", None, 24),
        ("smooth", None, 24),
        ("downsample", Some("8"), 8),
        ("upsample", Some("48"), 48),
    ] {
        let out = dir.path().join(format!("{op}.png"));
        let mut args = vec![
            "enhance",
            "--input",
            input.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
            "--op",
            op,
        ];
        if let Some(side) = side {
            args.extend(["--side", side]);
        }
        let env = envelope(&smf(&args));
        assert_envelope_shape(&env, "enhance");
        assert_eq!(env["result"]["output_shape"][0], want);
        let written: Image = smf_core::read_image(&out).unwrap();
        assert_eq!(written.height(), want);
        assert_sidecar(&out, "enhance");
    }
}

/// Identity motion setup: all region weight on the background with no
/// background motion, so the composed flow must be the identity and the
/// warped image must reproduce the input file byte for byte.
#[test]
fn flow_then_warp_is_identity_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    let g = Grid2D::new(20, 20).unwrap();

    // Two region channels of zeros plus an all-ones background channel.
    let mut channels = vec![0.0f32; g.len() * 3];
    for px in 0..g.len() {
        channels[px * 3 + 2] = 1.0;
    }
    let regions_path = dir.path().join("regions.smf1");
    FloatMap::new(g, 3, channels)
        .unwrap()
        .write_binary(&regions_path)
        .unwrap();

    let motions_path = dir.path().join("motions.json");
    let motion = serde_json::json!({
        "source": {
            "mean": [4.0, 5.0],
            "covariance": [1.45, 0.08, 0.08, 0.64],
            "affine": [1.2, 0.1, 0.0, 0.8],
        },
        "driving": {
            "mean": [9.0, 3.0],
            "covariance": [1.0, 0.0, 0.0, 1.0],
            "affine": [1.0, 0.0, 0.0, 1.0],
        },
    });
    fs::write(
        &motions_path,
        serde_json::to_string_pretty(&serde_json::json!({
            "motions": [motion, motion],
        }))
        .unwrap(),
    )
    .unwrap();

    let flow_path = dir.path().join("flow.smf1");
    let env = envelope(&smf(&[
        "flow",
        "--regions",
        regions_path.to_str().unwrap(),
        "--motions",
        motions_path.to_str().unwrap(),
        "--out",
        flow_path.to_str().unwrap(),
    ]));
    assert_envelope_shape(&env, "flow");
    assert_eq!(env["result"]["regions"], 2);
    assert_sidecar(&flow_path, "flow");

    let flow: FlowField = FloatMap::read_binary(&flow_path).unwrap().to_flow().unwrap();
    let identity = FlowField::identity(g);
    assert_eq!(flow.data(), identity.data());

    let input = dir.path().join("image.png");
    smf_core::write_image(&input, &gradient_image(20)).unwrap();
    let warped_path = dir.path().join("warped.png");
    let env = envelope(&smf(&[
        "warp",
        "--input",
        input.to_str().unwrap(),
        "--flow",
        flow_path.to_str().unwrap(),
        "--out",
        warped_path.to_str().unwrap(),
    ]));
    assert_envelope_shape(&env, "warp");
    assert_eq!(env["result"]["confidence_applied"], false);
    assert_eq!(fs::read(&input).unwrap(), fs::read(&warped_path).unwrap());
    assert_sidecar(&warped_path, "warp");
}

#[test]
fn warp_applies_confidence_mask() {
    let dir = tempfile::tempdir().unwrap();
    let g = Grid2D::new(10, 10).unwrap();
    let input = dir.path().join("in.png");
    let bright = Image::constant(g, 1, 1.0).unwrap();
    smf_core::write_image(&input, &bright).unwrap();

    let flow_path = dir.path().join("identity.smf1");
    FloatMap::from_flow(&FlowField::identity(g))
        .write_binary(&flow_path)
        .unwrap();
    let conf_path = dir.path().join("conf.smf1");
    FloatMap::new(g, 1, vec![0.0f32; g.len()])
        .unwrap()
        .write_binary(&conf_path)
        .unwrap();

    let out = dir.path().join("masked.png");
    let env = envelope(&smf(&[
        "warp",
        "--input",
        input.to_str().unwrap(),
        "--flow",
        flow_path.to_str().unwrap(),
        "--confidence",
        conf_path.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]));
    assert_eq!(env["result"]["confidence_applied"], true);
    let masked: Image = smf_core::read_image(&out).unwrap();
    assert!(masked.data().iter().all(|&v| v == 0.0));
}

#[test]
fn loss_check_reports_all_losses_and_gradient_check() {
    let dir = tempfile::tempdir().unwrap();
    let g = Grid2D::new(12, 12).unwrap();
    let a = dir.path().join("a.png");
    let b = dir.path().join("b.png");
    smf_core::write_image(&a, &gradient_image(12)).unwrap();
    smf_core::write_image(&b, &Image::constant(g, 1, 0.25).unwrap()).unwrap();

    let env = envelope(&smf(&[
        "loss-check",
        "--a",
        a.to_str().unwrap(),
        "--b",
        b.to_str().unwrap(),
        "--fd-check",
    ]));
    assert_envelope_shape(&env, "loss-check");
    let result = &env["result"];
    assert!(result["l1"].as_f64().unwrap() > 0.0);
    assert!(result["l2"].as_f64().unwrap() > 0.0);
    assert!(result["charbonnier"].as_f64().unwrap() > 0.0);
    // Charbonnier stays below L1 and approaches it from below.
    assert!(result["charbonnier"].as_f64().unwrap() <= result["l1"].as_f64().unwrap());
    assert!(result["fd"]["max_rel_err"].as_f64().unwrap() < 1e-6);

    // Identical inputs give zero loss everywhere.
    let env = envelope(&smf(&[
        "loss-check",
        "--a",
        a.to_str().unwrap(),
        "--b",
        a.to_str().unwrap(),
    ]));
    assert_eq!(env["result"]["l1"], 0.0);
    assert_eq!(env["result"]["l2"], 0.0);
    assert_eq!(env["result"]["charbonnier"], 0.0);
    assert!(env["result"].get("fd").is_none());
}

#[test]
fn compare_transcripts_three_input_modes_agree() {
    let dir = tempfile::tempdir().unwrap();

    // Direct text mode.
    let env = envelope(&smf(&[
        "compare-transcripts",
        "--real",
        "the house stands today",
        "--fake",
        "the house falls today",
        "--pair-id",
        "direct",
    ]));
    assert_envelope_shape(&env, "compare-transcripts");
    assert_eq!(env["result"]["pair_id"], "direct");
    assert_eq!(env["result"]["levenshtein"], 1);
    let direct_bleu = env["result"]["bleu"].as_f64().unwrap();

    // Pairs-file mode selects by id and scores identically.
    let pairs = dir.path().join("pairs.jsonl");
    fs::write(
        &pairs,
        concat!(
            "{\"pair_id\":\"direct\",\"real_text\":\"the house stands today\",\"fake_text\":\"the house falls today\"}\n",
            "{\"pair_id\":\"other\",\"real_text\":\"a b\",\"fake_text\":\"a b\"}\n",
        ),
    )
    .unwrap();
    let env = envelope(&smf(&[
        "compare-transcripts",
        "--pairs",
        pairs.to_str().unwrap(),
        "--pair-id",
        "direct",
    ]));
    assert_eq!(env["result"]["bleu"].as_f64().unwrap(), direct_bleu);

    // Manifest mode pulls the fake transcript and its driving real's.
    let data_dir = tempfile::tempdir().unwrap();
    generate_synthetic_dataset(data_dir.path(), &SynthConfig::default()).unwrap();
    let manifest = data_dir.path().join("manifest.jsonl");
    let env = envelope(&smf(&[
        "compare-transcripts",
        "--manifest",
        manifest.to_str().unwrap(),
        "--fake-id",
        "f00v00",
    ]));
    assert_eq!(env["result"]["pair_id"], "f00v00");
    assert!(env["result"]["levenshtein"].as_u64().unwrap() >= 1);
}

#[test]
fn report_linguistic_writes_round_trippable_reports() {
    let dir = tempfile::tempdir().unwrap();
    generate_synthetic_dataset(dir.path(), &SynthConfig::default()).unwrap();
    let manifest = dir.path().join("manifest.jsonl");

    for ext in ["csv", "json"] {
        let out = dir.path().join(format!("report.{ext}"));
        let env = envelope(&smf(&[
            "report-linguistic",
            "--manifest",
            manifest.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ]));
        assert_envelope_shape(&env, "report-linguistic");
        assert_eq!(env["result"]["pairs_scored"], 100);
        assert_eq!(env["result"]["records"], 100);
        assert_sidecar(&out, "report-linguistic");
        let text = fs::read_to_string(&out).unwrap();
        let report = if ext == "csv" {
            DistributionReport::from_csv(&text).unwrap()
        } else {
            DistributionReport::from_json(&text).unwrap()
        };
        assert_eq!(report.records, 100);
        assert_eq!(report.bins, 20);
    }
}

#[test]
fn split_train_eval_chain_is_consistent() {
    let dir = tempfile::tempdir().unwrap();
    generate_synthetic_dataset(dir.path(), &SynthConfig::default()).unwrap();
    let manifest = dir.path().join("manifest.jsonl");
    let manifest_arg = manifest.to_str().unwrap();
    let size_args = [
        "--train-real",
        "60",
        "--train-fake",
        "60",
        "--test-real",
        "30",
        "--test-fake",
        "30",
    ];

    // split: inline result plus the JSON file.
    let split_path = dir.path().join("split.json");
    let mut args = vec![
        "split",
        "--manifest",
        manifest_arg,
        "--scenario",
        "independent",
        "--fold",
        "0",
        "--seed",
        "7",
        "--out",
        split_path.to_str().unwrap(),
    ];
    args.extend(size_args);
    let env = envelope(&smf(&args));
    assert_envelope_shape(&env, "split");
    assert_eq!(env["result"]["counts"]["train"], 108);
    assert_eq!(env["result"]["counts"]["validation"], 12);
    assert_eq!(env["result"]["counts"]["test"], 60);
    assert_sidecar(&split_path, "split");
    let file_split: Value =
        serde_json::from_str(&fs::read_to_string(&split_path).unwrap()).unwrap();
    assert_eq!(file_split["train"], env["result"]["train"]);
    assert_eq!(file_split["test"], env["result"]["test"]);

    // detect-train writes a loadable model.
    let model_path = dir.path().join("model.bin");
    let mut args = vec![
        "detect-train",
        "--manifest",
        manifest_arg,
        "--scenario",
        "independent",
        "--fold",
        "0",
        "--model",
        "rf",
        "--seed",
        "7",
        "--frames",
        "6",
        "--trees",
        "20",
        "--depth",
        "8",
        "--out",
        model_path.to_str().unwrap(),
    ];
    args.extend(size_args);
    let env = envelope(&smf(&args));
    assert_envelope_shape(&env, "detect-train");
    assert_eq!(env["result"]["model"], "forest");
    assert_eq!(env["result"]["trained_videos"], 108);
    assert_eq!(env["result"]["trained_frames"], 108 * 6);
    assert_sidecar(&model_path, "detect-train");
    smf_detect::load_model(&model_path).unwrap();

    // detect-eval on the saved model reproduces the matching fold of the
    // full experiment run.
    let mut args = vec![
        "detect-eval",
        "--manifest",
        manifest_arg,
        "--scenario",
        "independent",
        "--model-file",
        model_path.to_str().unwrap(),
        "--fold",
        "0",
        "--seed",
        "7",
        "--frames",
        "6",
    ];
    args.extend(size_args);
    let env = envelope(&smf(&args));
    assert_envelope_shape(&env, "detect-eval");
    assert_eq!(env["result"]["test_videos"], 60);
    let saved_confusion = env["result"]["confusion"].clone();
    let saved_accuracy = env["result"]["metrics"]["accuracy"].as_f64().unwrap();
    assert!(saved_accuracy >= 0.9, "fold accuracy {saved_accuracy}");

    let report_path = dir.path().join("report.json");
    let csv_path = dir.path().join("report.csv");
    let mut args = vec![
        "detect-eval",
        "--manifest",
        manifest_arg,
        "--scenario",
        "independent",
        "--model",
        "rf",
        "--seed",
        "7",
        "--frames",
        "6",
        "--trees",
        "20",
        "--depth",
        "8",
        "--out",
        report_path.to_str().unwrap(),
        "--csv-out",
        csv_path.to_str().unwrap(),
    ];
    args.extend(size_args);
    let env = envelope(&smf(&args));
    assert_eq!(env["result"]["folds"].as_array().unwrap().len(), 3);
    assert_eq!(env["result"]["folds"][0]["confusion"], saved_confusion);
    assert_sidecar(&report_path, "detect-eval");
    assert_sidecar(&csv_path, "detect-eval");
    let csv = fs::read_to_string(&csv_path).unwrap();
    assert!(csv.starts_with("model,scenario,fold,tp,fn,tn,fp,accuracy,sensitivity,specificity\n"));
    assert!(csv.lines().count() == 5, "csv was:\n{csv}");
}

#[test]
fn stats_writes_text_table() {
    let dir = tempfile::tempdir().unwrap();
    generate_synthetic_dataset(dir.path(), &SynthConfig::default()).unwrap();
    let manifest = dir.path().join("manifest.jsonl");
    let out = dir.path().join("stats.txt");
    let env = envelope(&smf(&[
        "stats",
        "--manifest",
        manifest.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]));
    assert_envelope_shape(&env, "stats");
    assert_eq!(env["result"]["total_videos"], 200);
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("# smf "));
    assert!(text.contains("Total videos"));
    assert_sidecar(&out, "stats");
}

#[test]
fn reconstruct_interpreter_writes_report_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("matrix.json");
    let env = envelope(&smf(&[
        "reconstruct-interpreter",
        "--real",
        "33",
        "--fake",
        "66",
        "--sens",
        "0.8030",
        "--spec",
        "0.9091",
        "--acc",
        "0.8384",
        "--out",
        out.to_str().unwrap(),
    ]));
    assert_envelope_shape(&env, "reconstruct-interpreter");
    let file: Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(file["confusion"], env["result"]["confusion"]);
    assert_sidecar(&out, "reconstruct-interpreter");
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    generate_synthetic_dataset(dir.path(), &SynthConfig::default()).unwrap();
    let manifest = dir.path().join("manifest.jsonl");
    let args = [
        "stats",
        "--manifest",
        manifest.to_str().unwrap(),
    ];
    let first = smf(&args);
    let second = smf(&args);
    assert_eq!(first.code, Some(0));
    assert_eq!(first.stdout, second.stdout);

    // Thread cap does not change results either.
    let capped = smf_with_env(&args, &[("SMF_THREADS", "1")]);
    assert_eq!(capped.stdout, first.stdout);
}

#[test]
fn error_paths_use_exit_codes_and_json_stderr() {
    let dir = tempfile::tempdir().unwrap();

    // Unknown subcommand and bad enum values are usage errors: exit 2.
    assert_eq!(smf(&["no-such-command"]).code, Some(2));
    let g = Grid2D::new(8, 8).unwrap();
    let img_path = dir.path().join("img.png");
    smf_core::write_image(&img_path, &gradient_image(8)).unwrap();
    let run = smf(&[
        "enhance",
        "--input",
        img_path.to_str().unwrap(),
        "--out",
        dir.path().join("o.png").to_str().unwrap(),
        "--op",
        "explode",
    ]);
    assert_eq!(run.code, Some(2), "stderr: {}", run.stderr);

    // Validation failures exit 1 with a machine-readable error.
    let run = smf(&[
        "enhance",
        "--input",
        img_path.to_str().unwrap(),
        "--out",
        dir.path().join("o.png").to_str().unwrap(),
        "--op",
        "downsample",
    ]);
    let detail = error_detail(&run, 1);
    assert!(detail.contains("--side"), "detail: {detail}");

    let run = smf(&[
        "stats",
        "--manifest",
        dir.path().join("missing.jsonl").to_str().unwrap(),
    ]);
    let detail = error_detail(&run, 1);
    assert!(detail.starts_with("data"), "detail: {detail}");

    // Shape mismatches from the core bubble out as core errors.
    let small = dir.path().join("small.png");
    smf_core::write_image(&small, &Image::constant(g, 1, 0.5).unwrap()).unwrap();
    let big = dir.path().join("big.png");
    smf_core::write_image(&big, &gradient_image(12)).unwrap();
    let run = smf(&[
        "loss-check",
        "--a",
        small.to_str().unwrap(),
        "--b",
        big.to_str().unwrap(),
    ]);
    let detail = error_detail(&run, 1);
    assert!(detail.starts_with("core"), "detail: {detail}");

    // Disagreeing mode flags on compare-transcripts are usage errors.
    let run = smf(&[
        "compare-transcripts",
        "--real",
        "a",
        "--fake",
        "b",
        "--manifest",
        "m.jsonl",
    ]);
    assert_eq!(run.code, Some(2), "stderr: {}", run.stderr);
}
