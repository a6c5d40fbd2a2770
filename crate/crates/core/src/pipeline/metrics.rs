//! Model-free proxy metrics of anonymization strength, computed inside
//! the union of instance masks.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::raster::{BinaryMask, Frame, InstanceMask};

/// Disclaimer attached to every metric-bearing report.
pub const PROXY_METRICS_NOTE: &str = "proxy metrics only; not equivalent to \
privacy-attribute, re-identification, or anomaly-detection evaluations";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProxyMetrics {
    /// Mean squared error per channel inside the mask union.
    pub mse_per_channel: [f64; 3],
    /// PSNR in dB inside the mask union (infinite for identical content,
    /// serialized as null).
    pub psnr_db: f64,
    /// High-frequency energy of the anonymized frame relative to the
    /// original: Laplacian-response energy ratio inside the mask union.
    pub hf_energy_ratio: f64,
    /// Pixels outside the mask union that differ; must be zero.
    pub outside_mask_diff: u64,
    /// Pixel count of the mask union.
    pub mask_union_area: u64,
}

fn luma(frame: &Frame) -> Vec<f64> {
    let mut out = Vec::with_capacity(frame.area() as usize);
    for y in 0..frame.height() {
        for x in 0..frame.width() {
            let [r, g, b] = frame.pixel(x, y);
            out.push(0.299 * r as f64 + 0.587 * g as f64 + 0.114 * b as f64);
        }
    }
    out
}

/// Laplacian-response energy (4-neighbor 3x3 kernel, replicated borders)
/// summed over masked pixels.
fn hf_energy(frame: &Frame, mask: &BinaryMask) -> f64 {
    let (w, h) = (frame.width(), frame.height());
    let lum = luma(frame);
    let at = |x: i64, y: i64| {
        let xi = x.clamp(0, w as i64 - 1) as usize;
        let yi = y.clamp(0, h as i64 - 1) as usize;
        lum[yi * w as usize + xi]
    };
    let mut energy = 0.0;
    for y in 0..h {
        for x in 0..w {
            if !mask.get(x, y) {
                continue;
            }
            let (xi, yi) = (x as i64, y as i64);
            let lap = at(xi - 1, yi) + at(xi + 1, yi) + at(xi, yi - 1) + at(xi, yi + 1)
                - 4.0 * at(xi, yi);
            energy += lap * lap;
        }
    }
    energy
}

/// Computes proxy metrics inside the union of instance masks.
pub fn proxy_metrics(
    original: &Frame,
    anonymized: &Frame,
    instances: &[InstanceMask],
) -> Result<ProxyMetrics> {
    if !original.same_dims(anonymized) {
        return Err(Error::DimensionMismatch {
            expected_w: original.width(),
            expected_h: original.height(),
            got_w: anonymized.width(),
            got_h: anonymized.height(),
        });
    }
    let mut union = BinaryMask::new(original.width(), original.height());
    for inst in instances {
        if !inst.mask.same_dims_as_frame(original) {
            return Err(Error::DimensionMismatch {
                expected_w: original.width(),
                expected_h: original.height(),
                got_w: inst.mask.width(),
                got_h: inst.mask.height(),
            });
        }
        for y in 0..original.height() {
            for x in 0..original.width() {
                if inst.mask.get(x, y) {
                    union.set(x, y, true);
                }
            }
        }
    }

    let mut sq = [0.0f64; 3];
    let mut area = 0u64;
    let mut outside_diff = 0u64;
    for y in 0..original.height() {
        for x in 0..original.width() {
            let a = original.pixel(x, y);
            let b = anonymized.pixel(x, y);
            if union.get(x, y) {
                area += 1;
                for c in 0..3 {
                    let d = a[c] as f64 - b[c] as f64;
                    sq[c] += d * d;
                }
            } else if a != b {
                outside_diff += 1;
            }
        }
    }
    let mse = if area > 0 {
        [
            sq[0] / area as f64,
            sq[1] / area as f64,
            sq[2] / area as f64,
        ]
    } else {
        [0.0; 3]
    };
    let mse_avg = (mse[0] + mse[1] + mse[2]) / 3.0;
    let psnr_db = if mse_avg > 0.0 {
        10.0 * (255.0f64 * 255.0 / mse_avg).log10()
    } else {
        f64::INFINITY
    };

    let e_orig = hf_energy(original, &union);
    let e_anon = hf_energy(anonymized, &union);
    let hf_energy_ratio = if e_orig > 0.0 {
        e_anon / e_orig
    } else if e_anon > 0.0 {
        f64::INFINITY
    } else {
        1.0
    };

    Ok(ProxyMetrics {
        mse_per_channel: mse,
        psnr_db,
        hf_energy_ratio,
        outside_mask_diff: outside_diff,
        mask_union_area: area,
    })
}
