//! Classic Canny edge detection on the luma channel.
//!
//! Pinned behavior: luma weights 0.299/0.587/0.114, no pre-smoothing,
//! 3x3 Sobel with edge replication, L1 gradient magnitude, non-maximum
//! suppression with 4-way direction quantization, double threshold, and
//! hysteresis by flood fill from strong edges through weak ones with
//! 8-connectivity.

use crate::error::{Error, Result};
use crate::raster::{BinaryMask, Frame};

/// Hysteresis thresholds in L1 gradient units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CannyParams {
    pub low_threshold: f64,
    pub high_threshold: f64,
}

impl CannyParams {
    pub fn new(low_threshold: f64, high_threshold: f64) -> Result<Self> {
        if !(low_threshold > 0.0) || low_threshold > high_threshold {
            return Err(Error::InvalidParameter(format!(
                "canny thresholds must satisfy 0 < low <= high, got ({low_threshold}, {high_threshold})"
            )));
        }
        Ok(Self {
            low_threshold,
            high_threshold,
        })
    }
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

fn clamp(i: i64, len: u32) -> usize {
    i.clamp(0, len as i64 - 1) as usize
}

/// Edge pixels of the frame as a binary mask.
pub fn canny_edges(frame: &Frame, params: &CannyParams) -> Result<BinaryMask> {
    let (w, h) = (frame.width(), frame.height());
    let lum = luma(frame);
    let at = |x: i64, y: i64| lum[clamp(y, h) * w as usize + clamp(x, w)];

    // 3x3 Sobel gradients, replicated borders
    let n = w as usize * h as usize;
    let mut gx = vec![0.0f64; n];
    let mut gy = vec![0.0f64; n];
    let mut mag = vec![0.0f64; n];
    for y in 0..h as i64 {
        for x in 0..w as i64 {
            let sx = -at(x - 1, y - 1) + at(x + 1, y - 1) - 2.0 * at(x - 1, y)
                + 2.0 * at(x + 1, y)
                - at(x - 1, y + 1)
                + at(x + 1, y + 1);
            let sy = -at(x - 1, y - 1) - 2.0 * at(x, y - 1) - at(x + 1, y - 1)
                + at(x - 1, y + 1)
                + 2.0 * at(x, y + 1)
                + at(x + 1, y + 1);
            let i = y as usize * w as usize + x as usize;
            gx[i] = sx;
            gy[i] = sy;
            mag[i] = sx.abs() + sy.abs();
        }
    }

    // non-maximum suppression with 4-way direction quantization
    let mag_at = |x: i64, y: i64| mag[clamp(y, h) * w as usize + clamp(x, w)];
    let mut kept = vec![false; n];
    for y in 0..h as i64 {
        for x in 0..w as i64 {
            let i = y as usize * w as usize + x as usize;
            if mag[i] <= 0.0 {
                continue;
            }
            let mut angle = gy[i].atan2(gx[i]).to_degrees();
            if angle < 0.0 {
                angle += 180.0;
            }
            if angle >= 180.0 {
                angle -= 180.0;
            }
            let (a, b) = if !(22.5..157.5).contains(&angle) {
                (mag_at(x - 1, y), mag_at(x + 1, y)) // 0 deg
            } else if angle < 67.5 {
                (mag_at(x - 1, y - 1), mag_at(x + 1, y + 1)) // 45 deg
            } else if angle < 112.5 {
                (mag_at(x, y - 1), mag_at(x, y + 1)) // 90 deg
            } else {
                (mag_at(x + 1, y - 1), mag_at(x - 1, y + 1)) // 135 deg
            };
            kept[i] = mag[i] >= a && mag[i] >= b;
        }
    }

    // double threshold + hysteresis flood fill, 8-connected
    let mut out = BinaryMask::new(w, h);
    let mut stack = Vec::new();
    for y in 0..h {
        for x in 0..w {
            let i = y as usize * w as usize + x as usize;
            if kept[i] && mag[i] >= params.high_threshold && !out.get(x, y) {
                out.set(x, y, true);
                stack.push((x, y));
                while let Some((cx, cy)) = stack.pop() {
                    for dy in -1i64..=1 {
                        for dx in -1i64..=1 {
                            let nx = cx as i64 + dx;
                            let ny = cy as i64 + dy;
                            if nx < 0 || ny < 0 || nx >= w as i64 || ny >= h as i64 {
                                continue;
                            }
                            let (nx, ny) = (nx as u32, ny as u32);
                            let j = ny as usize * w as usize + nx as usize;
                            if !out.get(nx, ny) && kept[j] && mag[j] >= params.low_threshold {
                                out.set(nx, ny, true);
                                stack.push((nx, ny));
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}
