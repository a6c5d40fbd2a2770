//! End-to-end tests against the built binary.

use std::path::Path;
use std::process::{Command, Output};

use la3d_core::raster::tight_bbox;
use la3d_core::segmentation::save_sidecar;
use la3d_core::{imgio, BBox, BinaryMask, Frame, InstanceMask};

fn la3d(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_la3d"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn deterministic_frame(seed: u32, w: u32, h: u32) -> Frame {
    let mut pixels = Vec::new();
    for i in 0..(w * h * 3) {
        pixels.push(((i * 31 + seed * 97) % 256) as u8);
    }
    Frame::from_rgb(w, h, pixels).unwrap()
}

fn rect_instance(w: u32, h: u32, b: BBox) -> InstanceMask {
    let mut m = BinaryMask::new(w, h);
    for y in b.y..b.y + b.h {
        for x in b.x..b.x + b.w {
            m.set(x, y, true);
        }
    }
    InstanceMask::from_mask(m, 0, 0.9).unwrap()
}

/// Three 40x30 frames with one masked rectangle each.
fn write_fixture(dir: &Path) -> Vec<(String, Frame, InstanceMask)> {
    let frames_dir = dir.join("frames");
    let masks_dir = dir.join("masks");
    std::fs::create_dir_all(&frames_dir).unwrap();
    std::fs::create_dir_all(&masks_dir).unwrap();
    let mut out = Vec::new();
    for i in 0..3u32 {
        let id = format!("frame_{i:03}");
        let f = deterministic_frame(i, 40, 30);
        let inst = rect_instance(40, 30, BBox::new(5 + i * 3, 4, 12, 10));
        imgio::save_frame(&frames_dir.join(format!("{id}.png")), &f).unwrap();
        save_sidecar(&masks_dir, &id, 40, 30, std::slice::from_ref(&inst)).unwrap();
        out.push((id, f, inst));
    }
    out
}

#[test]
fn anonymize_blackened_changes_only_masked_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let fixture = write_fixture(dir.path());
    let (frames, masks, output) = (
        dir.path().join("frames"),
        dir.path().join("masks"),
        dir.path().join("out"),
    );
    let out = la3d(&[
        "anonymize",
        "--input", frames.to_str().unwrap(),
        "--masks", masks.to_str().unwrap(),
        "--output", output.to_str().unwrap(),
        "--preset", "BLACKENED",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    for (id, original, inst) in &fixture {
        let got = imgio::load_frame(&output.join(format!("{id}.png"))).unwrap();
        for y in 0..30 {
            for x in 0..40 {
                if inst.mask.get(x, y) {
                    assert_eq!(got.pixel(x, y), [0, 0, 0], "{id} ({x},{y})");
                } else {
                    assert_eq!(got.pixel(x, y), original.pixel(x, y), "{id} ({x},{y})");
                }
            }
        }
    }
    assert!(output.join("summary.json").is_file());
    assert!(output.join("per-frame.csv").is_file());
}

#[test]
fn anonymize_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    write_fixture(dir.path());
    let run = |out_name: &str| {
        let output = dir.path().join(out_name);
        let st = la3d(&[
            "anonymize",
            "--input", dir.path().join("frames").to_str().unwrap(),
            "--masks", dir.path().join("masks").to_str().unwrap(),
            "--output", output.to_str().unwrap(),
            "--preset", "PIXELIZED_D4_A",
        ]);
        assert!(st.status.success());
        output
    };
    let a = run("out_a");
    let b = run("out_b");
    for i in 0..3 {
        let name = format!("frame_{i:03}.png");
        assert_eq!(
            std::fs::read(a.join(&name)).unwrap(),
            std::fs::read(b.join(&name)).unwrap(),
            "{name}"
        );
    }
}

#[test]
fn unknown_preset_exits_2_with_preset_list() {
    let dir = tempfile::tempdir().unwrap();
    write_fixture(dir.path());
    let out = la3d(&[
        "anonymize",
        "--input", dir.path().join("frames").to_str().unwrap(),
        "--output", dir.path().join("out").to_str().unwrap(),
        "--preset", "NOPE",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("NOPE") && stderr.contains("BLURRED_A"), "{stderr}");
}

#[test]
fn empty_input_dir_succeeds_with_empty_summary() {
    let dir = tempfile::tempdir().unwrap();
    let (input, output) = (dir.path().join("in"), dir.path().join("out"));
    std::fs::create_dir_all(&input).unwrap();
    let out = la3d(&[
        "anonymize",
        "--input", input.to_str().unwrap(),
        "--output", output.to_str().unwrap(),
        "--preset", "BLACKENED",
    ]);
    assert!(out.status.success());
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(output.join("summary.json")).unwrap())
            .unwrap();
    assert_eq!(summary["frames"], 0);
}

#[test]
fn missing_input_dir_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let out = la3d(&[
        "anonymize",
        "--input", dir.path().join("absent").to_str().unwrap(),
        "--output", dir.path().join("out").to_str().unwrap(),
        "--preset", "BLACKENED",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn detector_failure_abort_vs_quarantine() {
    let dir = tempfile::tempdir().unwrap();
    write_fixture(dir.path());
    // remove one sidecar so the provider fails for that frame
    std::fs::remove_file(dir.path().join("masks/frame_001.json")).unwrap();

    let base = |policy: &str, out_name: &str| {
        la3d(&[
            "anonymize",
            "--input", dir.path().join("frames").to_str().unwrap(),
            "--masks", dir.path().join("masks").to_str().unwrap(),
            "--output", dir.path().join(out_name).to_str().unwrap(),
            "--preset", "BLACKENED",
            "--on-detector-failure", policy,
        ])
    };
    let abort = base("abort", "out_abort");
    assert_eq!(abort.status.code(), Some(5), "{}", String::from_utf8_lossy(&abort.stderr));

    let quarantine = base("quarantine", "out_q");
    assert!(quarantine.status.success());
    // the quarantined frame is emitted raw
    let raw = imgio::load_frame(&dir.path().join("out_q/frame_001.png")).unwrap();
    assert_eq!(raw, deterministic_frame(1, 40, 30));
}

#[test]
fn config_file_fields_are_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let fixture = write_fixture(dir.path());
    let cfg_path = dir.path().join("run.json");
    std::fs::write(
        &cfg_path,
        serde_json::json!({
            "input": dir.path().join("frames"),
            "masks": dir.path().join("masks"),
            "output": dir.path().join("out"),
            "preset": "BLACKENED"
        })
        .to_string(),
    )
    .unwrap();
    // the flag overrides the preset: RAW_IMAGE must return inputs bit-exactly
    let out = la3d(&[
        "anonymize",
        "--config", cfg_path.to_str().unwrap(),
        "--preset", "RAW_IMAGE",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for (id, original, _) in &fixture {
        let got = imgio::load_frame(&dir.path().join(format!("out/{id}.png"))).unwrap();
        assert_eq!(&got, original, "{id}");
    }
}

#[test]
fn compare_grid_layout_and_first_panel() {
    let dir = tempfile::tempdir().unwrap();
    let fixture = write_fixture(dir.path());
    let output = dir.path().join("grids");
    let out = la3d(&[
        "compare",
        "--input", dir.path().join("frames").to_str().unwrap(),
        "--masks", dir.path().join("masks").to_str().unwrap(),
        "--output", output.to_str().unwrap(),
        "--presets", "RAW_IMAGE,BLACKENED",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let grid = imgio::load_frame(&output.join("frame_000.grid.png")).unwrap();
    // two 40-wide panels plus a 4-px gutter; 11-px label strip above
    assert_eq!(grid.width(), 2 * 40 + 4);
    assert_eq!(grid.height(), 30 + 11);
    let (_, original, inst) = &fixture[0];
    for y in 0..30 {
        for x in 0..40 {
            assert_eq!(grid.pixel(x, y + 11), original.pixel(x, y), "raw panel ({x},{y})");
        }
    }
    // second panel is blackened under the mask
    let b = tight_bbox(&inst.mask).unwrap();
    assert_eq!(grid.pixel(44 + b.x, 11 + b.y), [0, 0, 0]);
}

#[test]
fn compare_rejects_single_preset() {
    let dir = tempfile::tempdir().unwrap();
    write_fixture(dir.path());
    let out = la3d(&[
        "compare",
        "--input", dir.path().join("frames").to_str().unwrap(),
        "--output", dir.path().join("g").to_str().unwrap(),
        "--presets", "RAW_IMAGE",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bench_writes_overhead_table() {
    let dir = tempfile::tempdir().unwrap();
    write_fixture(dir.path());
    let reports = dir.path().join("reports");
    let out = la3d(&[
        "bench",
        "--input", dir.path().join("frames").to_str().unwrap(),
        "--masks", dir.path().join("masks").to_str().unwrap(),
        "--report-dir", reports.to_str().unwrap(),
        "--presets", "RAW_IMAGE,BLACKENED",
        "--repeats", "3",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(reports.join("bench.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 3); // header + two presets
    assert!(lines[0].starts_with("preset,frames,repeats"));
    let raw: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(raw[0], "RAW_IMAGE");
    assert_eq!(raw[11], "0.00"); // baseline overhead row
    // repeats below 3 are rejected
    let bad = la3d(&[
        "bench",
        "--input", dir.path().join("frames").to_str().unwrap(),
        "--report-dir", reports.to_str().unwrap(),
        "--presets", "RAW_IMAGE",
        "--repeats", "2",
    ]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn validate_masks_reports_violations() {
    let dir = tempfile::tempdir().unwrap();
    write_fixture(dir.path());
    let masks = dir.path().join("masks");
    let ok = la3d(&["validate-masks", "--masks", masks.to_str().unwrap()]);
    assert!(ok.status.success());
    let stdout = String::from_utf8_lossy(&ok.stdout);
    assert!(stdout.contains("3 sidecars checked, 0 violations"), "{stdout}");

    // truncate one metadata document: parse violation with a byte offset
    let victim = masks.join("frame_002.json");
    let text = std::fs::read_to_string(&victim).unwrap();
    std::fs::write(&victim, &text[..text.len() / 2]).unwrap();
    let bad = la3d(&["validate-masks", "--masks", masks.to_str().unwrap()]);
    assert!(bad.status.success());
    let stdout = String::from_utf8_lossy(&bad.stdout);
    assert!(stdout.contains("VIOLATION frame_002"), "{stdout}");
    assert!(stdout.contains("byte offset"), "{stdout}");
    assert!(stdout.contains("1 violations"), "{stdout}");
}
