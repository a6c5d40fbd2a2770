//! Per-frame and aggregate report records.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pipeline::metrics::{ProxyMetrics, PROXY_METRICS_NOTE};

/// Per-frame latency and proxy-metric record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameReport {
    pub frame_id: String,
    pub detect_us: u64,
    pub transform_us: u64,
    pub compose_us: u64,
    pub instance_count: u32,
    /// Per-instance scaling factors; populated for adaptive methods only.
    pub r_values: Vec<f64>,
    /// Frame emitted raw because the detector failed under the
    /// quarantine policy.
    pub quarantined: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub metrics: Option<ProxyMetrics>,
}

/// Mean/median/p95 of one latency stage, microseconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StageStats {
    pub mean_us: f64,
    pub median_us: f64,
    pub p95_us: f64,
}

impl StageStats {
    /// Nearest-rank percentiles over the sample.
    pub fn from_samples(samples: &[u64]) -> Self {
        if samples.is_empty() {
            return Self {
                mean_us: 0.0,
                median_us: 0.0,
                p95_us: 0.0,
            };
        }
        let mut sorted = samples.to_vec();
        sorted.sort_unstable();
        let rank = |p: f64| {
            let idx = ((p * sorted.len() as f64).ceil() as usize).max(1) - 1;
            sorted[idx.min(sorted.len() - 1)] as f64
        };
        Self {
            mean_us: sorted.iter().sum::<u64>() as f64 / sorted.len() as f64,
            median_us: rank(0.50),
            p95_us: rank(0.95),
        }
    }
}

/// Aggregate over a processed sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryReport {
    pub preset_name: String,
    pub frames: usize,
    pub quarantined_frames: usize,
    pub detect: StageStats,
    pub transform: StageStats,
    pub compose: StageStats,
    pub throughput_fps: f64,
    pub note: String,
}

impl SummaryReport {
    pub fn from_reports(preset_name: &str, reports: &[FrameReport], wall_secs: f64) -> Self {
        let collect = |f: fn(&FrameReport) -> u64| -> Vec<u64> { reports.iter().map(f).collect() };
        Self {
            preset_name: preset_name.to_string(),
            frames: reports.len(),
            quarantined_frames: reports.iter().filter(|r| r.quarantined).count(),
            detect: StageStats::from_samples(&collect(|r| r.detect_us)),
            transform: StageStats::from_samples(&collect(|r| r.transform_us)),
            compose: StageStats::from_samples(&collect(|r| r.compose_us)),
            throughput_fps: if wall_secs > 0.0 {
                reports.len() as f64 / wall_secs
            } else {
                0.0
            },
            note: PROXY_METRICS_NOTE.to_string(),
        }
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self).expect("summary serializes");
        std::fs::write(path, text).map_err(|e| Error::Io {
            path: path.to_path_buf(),
            source: e,
        })
    }
}

/// Writes one CSV row per frame.
pub fn write_per_frame_csv(path: &Path, reports: &[FrameReport]) -> Result<()> {
    let io_err = |e: csv::Error| Error::Io {
        path: path.to_path_buf(),
        source: std::io::Error::other(e),
    };
    let mut w = csv::Writer::from_path(path).map_err(io_err)?;
    w.write_record([
        "frame_id",
        "detect_us",
        "transform_us",
        "compose_us",
        "instance_count",
        "quarantined",
        "r_values",
        "mse_avg",
        "psnr_db",
        "hf_energy_ratio",
        "outside_mask_diff",
    ])
    .map_err(io_err)?;
    for r in reports {
        let (mse_avg, psnr, hf, outside) = match &r.metrics {
            Some(m) => {
                let mse = (m.mse_per_channel[0] + m.mse_per_channel[1] + m.mse_per_channel[2]) / 3.0;
                (
                    format!("{mse:.4}"),
                    format!("{:.4}", m.psnr_db),
                    format!("{:.6}", m.hf_energy_ratio),
                    m.outside_mask_diff.to_string(),
                )
            }
            None => (String::new(), String::new(), String::new(), String::new()),
        };
        let r_values = r
            .r_values
            .iter()
            .map(|v| format!("{v:.6}"))
            .collect::<Vec<_>>()
            .join(";");
        w.write_record([
            r.frame_id.as_str(),
            &r.detect_us.to_string(),
            &r.transform_us.to_string(),
            &r.compose_us.to_string(),
            &r.instance_count.to_string(),
            &r.quarantined.to_string(),
            &r_values,
            &mse_avg,
            &psnr,
            &hf,
            &outside,
        ])
        .map_err(io_err)?;
    }
    w.flush().map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })
}
