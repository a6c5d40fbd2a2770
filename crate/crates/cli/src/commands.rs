//! The four subcommands, built on the core pipeline.

use std::path::{Path, PathBuf};
use std::time::Duration;

use la3d_core::pipeline::{
    process_frame, resolve_preset, write_per_frame_csv, AdaptiveOverrides, AnonymizerSpec,
    FailurePolicy, FrameReport, SequenceOptions, StageStats,
};
use la3d_core::pipeline::process_sequence;
use la3d_core::segmentation::{
    detect, validate_sidecar, DetectorConfig, ExternalProvider, MaskProvider, SidecarProvider,
};
use la3d_core::{imgio, Error as CoreError, Frame};

use crate::config::{parse_z_ref, FailurePolicyName, RunConfig};
use crate::error::CliError;
use crate::frames;
use crate::grid;

/// Seconds an external provider may spend per frame before being killed.
const PROVIDER_TIMEOUT_SECS: u64 = 30;

fn require<'a, T>(v: &'a Option<T>, what: &str) -> Result<&'a T, CliError> {
    v.as_ref()
        .ok_or_else(|| CliError::config(format!("{what} is required (flag or config file)")))
}

/// Resolves the preset plus adaptive overrides from the merged config.
pub fn resolve_spec(cfg: &RunConfig) -> Result<AnonymizerSpec, CliError> {
    let name = require(&cfg.preset, "--preset")?;
    let z_ref = cfg
        .z_ref
        .as_deref()
        .map(parse_z_ref)
        .transpose()
        .map_err(|e| CliError::config(format!("--z-ref: {e}")))?;
    let overrides = AdaptiveOverrides {
        alpha_r: cfg.alpha_r,
        alpha_b: cfg.alpha_b,
        ismax: cfg.ismax,
        isfullblur: cfg.isfullblur,
        z_ref,
    };
    Ok(resolve_preset(name)?.with_adaptive_overrides(&overrides)?)
}

/// An owned detector: provider plus configuration.
pub struct Detector {
    pub config: DetectorConfig,
    pub provider: Box<dyn MaskProvider>,
}

impl Detector {
    fn stage(&self) -> la3d_core::pipeline::DetectorStage<'_> {
        la3d_core::pipeline::DetectorStage {
            config: &self.config,
            provider: self.provider.as_ref(),
        }
    }
}

/// Builds the mask source, if any, from the merged config.
pub fn build_detector(cfg: &RunConfig) -> Result<Option<Detector>, CliError> {
    let mut config = DetectorConfig::default();
    if let Some(lambda) = cfg.lambda {
        config.confidence_threshold = lambda;
    }
    if let Some(items) = cfg.include_items {
        config.include_personal_items = items;
    }
    config.validate()?;

    let provider: Box<dyn MaskProvider> = match (&cfg.masks, &cfg.provider_cmd) {
        (Some(_), Some(_)) => {
            return Err(CliError::config(
                "--masks and --provider-cmd are mutually exclusive",
            ))
        }
        (Some(dir), None) => {
            if !dir.is_dir() {
                return Err(CliError::input(format!(
                    "mask dir {} is not a readable directory",
                    dir.display()
                )));
            }
            Box::new(SidecarProvider::new(dir))
        }
        (None, Some(cmd)) => {
            let argv: Vec<String> = cmd.split_whitespace().map(str::to_string).collect();
            Box::new(
                ExternalProvider::new(argv, Duration::from_secs(PROVIDER_TIMEOUT_SECS))
                    .map_err(|e| CliError::config(e.to_string()))?,
            )
        }
        (None, None) => {
            log::warn!("no mask source configured; frames pass through unmodified");
            return Ok(None);
        }
    };
    Ok(Some(Detector { config, provider }))
}

pub fn sequence_options(cfg: &RunConfig) -> SequenceOptions {
    SequenceOptions {
        workers: cfg.workers.unwrap_or(1),
        failure_policy: match cfg.on_detector_failure.unwrap_or_default() {
            FailurePolicyName::Abort => FailurePolicy::Abort,
            FailurePolicyName::Quarantine => FailurePolicy::Quarantine,
        },
        compute_metrics: false,
    }
}

fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir)
        .map_err(|e| CliError::output(format!("cannot create {}: {e}", dir.display())))
}

/// Reclassifies I/O failures under the input directory as input errors.
fn classify(e: CoreError, input_dir: &Path) -> CliError {
    if let CoreError::Io { path, source } = &e {
        if path.starts_with(input_dir) {
            return CliError::input(format!("{}: {source}", path.display()));
        }
    }
    e.into()
}

fn frame_iter<'a>(
    listed: Vec<(String, PathBuf)>,
) -> impl Iterator<Item = la3d_core::Result<(String, Frame)>> + 'a {
    listed.into_iter().map(|(id, path)| {
        imgio::load_frame(&path).map(|f| (id, f))
    })
}

pub fn cmd_anonymize(cfg: &RunConfig, compute_metrics: bool) -> Result<(), CliError> {
    let input = require(&cfg.input, "--input")?.clone();
    let output = require(&cfg.output, "--output")?.clone();
    let spec = resolve_spec(cfg)?;
    let detector = build_detector(cfg)?;
    let mut options = sequence_options(cfg);
    options.compute_metrics = compute_metrics;
    let report_dir = cfg.report_dir.clone().unwrap_or_else(|| output.clone());
    ensure_dir(&output)?;
    ensure_dir(&report_dir)?;

    let listed = frames::list_frames(&input)?;
    let stage = detector.as_ref().map(|d| d.stage());
    let out_dir = output.clone();
    let mut sink = move |frame_id: &str, frame: &Frame, _: &FrameReport| {
        imgio::save_frame(&out_dir.join(format!("{frame_id}.png")), frame)
    };
    let (summary, reports) = process_sequence(
        frame_iter(listed),
        stage.as_ref(),
        &spec,
        &options,
        &mut sink,
    )
    .map_err(|e| classify(e, &input))?;

    summary.write_json(&report_dir.join("summary.json"))?;
    write_per_frame_csv(&report_dir.join("per-frame.csv"), &reports)?;
    println!(
        "{} frames anonymized with {} ({} quarantined); reports in {}",
        summary.frames,
        spec.preset_name,
        summary.quarantined_frames,
        report_dir.display()
    );
    Ok(())
}

struct BenchRow {
    preset: String,
    detect: StageStats,
    transform: StageStats,
    compose: StageStats,
    total: StageStats,
}

fn stats_of(reports: &[FrameReport]) -> (StageStats, StageStats, StageStats, StageStats) {
    let collect = |f: fn(&FrameReport) -> u64| -> Vec<u64> { reports.iter().map(f).collect() };
    (
        StageStats::from_samples(&collect(|r| r.detect_us)),
        StageStats::from_samples(&collect(|r| r.transform_us)),
        StageStats::from_samples(&collect(|r| r.compose_us)),
        StageStats::from_samples(&collect(|r| r.detect_us + r.transform_us + r.compose_us)),
    )
}

/// Fixed counterpart of an adaptive preset name, if the mapping is known.
fn fixed_counterpart(preset: &str) -> Option<&'static str> {
    match preset {
        "BLURRED_A" | "BLURRED_A_MAX" => Some("BLURRED"),
        "PIXELIZED_D2_A" => Some("PIXELIZED_D2"),
        "PIXELIZED_D4_A" | "PIXELIZED_A_MAX" => Some("PIXELIZED_D4"),
        "PIXELIZED_D8_A" => Some("PIXELIZED_D8"),
        _ => None,
    }
}

pub fn cmd_bench(cfg: &RunConfig, presets: &[String], repeats: usize) -> Result<(), CliError> {
    if presets.is_empty() {
        return Err(CliError::config("bench needs at least one preset"));
    }
    if repeats < 3 {
        return Err(CliError::config(format!(
            "bench needs repeats >= 3, got {repeats}"
        )));
    }
    let input = require(&cfg.input, "--input")?.clone();
    let report_dir = cfg
        .report_dir
        .clone()
        .or_else(|| cfg.output.clone())
        .ok_or_else(|| CliError::config("--report-dir (or --output) is required"))?;
    ensure_dir(&report_dir)?;
    let detector = build_detector(cfg)?;
    let options = sequence_options(cfg);

    // the corpus is loaded once and reused across presets and repeats
    let listed = frames::list_frames(&input)?;
    let mut corpus = Vec::with_capacity(listed.len());
    for (id, path) in listed {
        corpus.push((id, frames::load(&path)?));
    }

    let mut rows = Vec::new();
    for name in presets {
        let spec = resolve_preset(name)?;
        let mut pooled: Vec<FrameReport> = Vec::new();
        // one extra pass up front as warm-up, excluded from statistics
        for repeat in 0..=repeats {
            let stage = detector.as_ref().map(|d| d.stage());
            let mut sink = |_: &str, _: &Frame, _: &FrameReport| Ok(());
            let frames_in = corpus
                .iter()
                .map(|(id, f)| Ok((id.clone(), f.clone())))
                .collect::<Vec<_>>();
            let (_, reports) = process_sequence(
                frames_in,
                stage.as_ref(),
                &spec,
                &options,
                &mut sink,
            )
            .map_err(|e| classify(e, &input))?;
            if repeat > 0 {
                pooled.extend(reports);
            }
        }
        let (detect, transform, compose, total) = stats_of(&pooled);
        rows.push(BenchRow {
            preset: name.clone(),
            detect,
            transform,
            compose,
            total,
        });
    }

    write_bench_csv(&report_dir.join("bench.csv"), &rows, corpus.len(), repeats)?;
    print_overhead_table(&rows);
    println!("bench report in {}", report_dir.display());
    Ok(())
}

fn overhead_pct(total: f64, baseline: f64) -> Option<f64> {
    (baseline > 0.0).then(|| (total - baseline) / baseline * 100.0)
}

fn write_bench_csv(
    path: &Path,
    rows: &[BenchRow],
    frames: usize,
    repeats: usize,
) -> Result<(), CliError> {
    let io_err = |e: csv::Error| CliError::output(format!("{}: {e}", path.display()));
    let baseline = rows
        .iter()
        .find(|r| r.preset == "RAW_IMAGE")
        .map(|r| r.total.median_us);
    let mut w = csv::Writer::from_path(path).map_err(io_err)?;
    w.write_record([
        "preset",
        "frames",
        "repeats",
        "detect_median_us",
        "detect_p95_us",
        "transform_median_us",
        "transform_p95_us",
        "compose_median_us",
        "compose_p95_us",
        "total_median_us",
        "total_p95_us",
        "overhead_vs_raw_pct",
        "overhead_vs_fixed_pct",
    ])
    .map_err(io_err)?;
    for row in rows {
        let vs_raw = if row.preset == "RAW_IMAGE" {
            Some(0.0)
        } else {
            baseline.and_then(|b| overhead_pct(row.total.median_us, b))
        };
        let vs_fixed = fixed_counterpart(&row.preset)
            .and_then(|c| rows.iter().find(|r| r.preset == c))
            .and_then(|c| overhead_pct(row.total.median_us, c.total.median_us));
        let fmt = |v: Option<f64>| v.map(|p| format!("{p:.2}")).unwrap_or_default();
        w.write_record([
            row.preset.as_str(),
            &frames.to_string(),
            &repeats.to_string(),
            &format!("{:.1}", row.detect.median_us),
            &format!("{:.1}", row.detect.p95_us),
            &format!("{:.1}", row.transform.median_us),
            &format!("{:.1}", row.transform.p95_us),
            &format!("{:.1}", row.compose.median_us),
            &format!("{:.1}", row.compose.p95_us),
            &format!("{:.1}", row.total.median_us),
            &format!("{:.1}", row.total.p95_us),
            &fmt(vs_raw),
            &fmt(vs_fixed),
        ])
        .map_err(io_err)?;
    }
    w.flush()
        .map_err(|e| CliError::output(format!("{}: {e}", path.display())))
}

fn print_overhead_table(rows: &[BenchRow]) {
    let baseline = rows
        .iter()
        .find(|r| r.preset == "RAW_IMAGE")
        .map(|r| r.total.median_us);
    println!("{:<18} {:>14} {:>12} {:>16}", "preset", "median_us", "p95_us", "vs_RAW_IMAGE");
    for row in rows {
        let vs_raw = if row.preset == "RAW_IMAGE" {
            Some(0.0)
        } else {
            baseline.and_then(|b| overhead_pct(row.total.median_us, b))
        };
        let pct = vs_raw
            .map(|p| format!("{p:+.1}%"))
            .unwrap_or_else(|| "-".into());
        println!(
            "{:<18} {:>14.1} {:>12.1} {:>16}",
            row.preset, row.total.median_us, row.total.p95_us, pct
        );
    }
}

pub fn cmd_compare(cfg: &RunConfig, presets: &[String]) -> Result<(), CliError> {
    if presets.len() < 2 {
        return Err(CliError::config("compare needs at least two presets"));
    }
    let input = require(&cfg.input, "--input")?.clone();
    let output = require(&cfg.output, "--output")?.clone();
    let specs = presets
        .iter()
        .map(|name| {
            Ok(resolve_preset(name)?.with_adaptive_overrides(&AdaptiveOverrides {
                alpha_r: cfg.alpha_r,
                alpha_b: cfg.alpha_b,
                ismax: cfg.ismax,
                isfullblur: cfg.isfullblur,
                z_ref: cfg
                    .z_ref
                    .as_deref()
                    .map(parse_z_ref)
                    .transpose()
                    .map_err(|e| CliError::config(format!("--z-ref: {e}")))?,
            })?)
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let detector = build_detector(cfg)?;
    ensure_dir(&output)?;

    let mut count = 0usize;
    for (frame_id, path) in frames::list_frames(&input)? {
        let frame = frames::load(&path)?;
        let instances = match &detector {
            Some(d) => detect(&frame, &frame_id, &d.config, d.provider.as_ref())
                .map_err(CliError::from)?,
            None => Vec::new(),
        };
        let mut panels = Vec::with_capacity(specs.len());
        for spec in &specs {
            let (out, _) = process_frame(&frame_id, &frame, &instances, spec, false)?;
            panels.push((spec.preset_name.clone(), out));
        }
        let grid_frame = grid::compose_grid(&panels);
        imgio::save_frame(&output.join(format!("{frame_id}.grid.png")), &grid_frame)?;
        count += 1;
    }
    println!("{count} comparison grids in {}", output.display());
    Ok(())
}

pub fn cmd_validate_masks(mask_dir: &Path) -> Result<(), CliError> {
    let entries = std::fs::read_dir(mask_dir).map_err(|e| {
        CliError::input(format!("cannot read mask dir {}: {e}", mask_dir.display()))
    })?;
    let mut ids: Vec<String> = entries
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .filter_map(|p| p.file_stem().map(|s| s.to_string_lossy().into_owned()))
        .collect();
    ids.sort();

    let mut violations = 0usize;
    for id in &ids {
        match validate_sidecar(mask_dir, id) {
            Ok(()) => println!("OK        {id}"),
            Err(e) => {
                violations += 1;
                println!("VIOLATION {id}: {e}");
            }
        }
    }
    println!("{} sidecars checked, {violations} violations", ids.len());
    Ok(())
}
