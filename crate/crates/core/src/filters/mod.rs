//! The conventional anonymizers and their building blocks: normalized
//! Gaussian kernels, separable blur, block pixelization, Canny edges,
//! and silhouettes.

mod canny;

pub use canny::{canny_edges, CannyParams};

use crate::error::{Error, Result};
use crate::raster::Frame;

/// Normalized separable 1-D Gaussian coefficient vector.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianKernel {
    size: u32,
    sigma: f64,
    coefficients: Vec<f64>,
}

impl GaussianKernel {
    pub fn size(&self) -> u32 {
        self.size
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }
}

/// Builds the kernel `g_i = beta * exp(-(i-(k-1)/2)^2 / (2 sigma^2))`
/// with `beta` chosen so the coefficients sum to 1.
pub fn build_gaussian_kernel(k: u32, sigma: f64) -> Result<GaussianKernel> {
    if k == 0 || k.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!(
            "kernel size must be odd and positive, got {k}"
        )));
    }
    if !(sigma > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "sigma must be positive, got {sigma}"
        )));
    }
    let center = (k - 1) as f64 / 2.0;
    let denom = 2.0 * sigma * sigma;
    let raw: Vec<f64> = (0..k)
        .map(|i| (-(i as f64 - center).powi(2) / denom).exp())
        .collect();
    let sum: f64 = raw.iter().sum();
    let coefficients = raw.into_iter().map(|g| g / sum).collect();
    Ok(GaussianKernel {
        size: k,
        sigma,
        coefficients,
    })
}

/// Rounds half away from zero, then clamps to the 8-bit range.
pub(crate) fn round_clamp_u8(v: f64) -> u8 {
    let r = if v >= 0.0 {
        (v + 0.5).floor()
    } else {
        (v - 0.5).ceil()
    };
    r.clamp(0.0, 255.0) as u8
}

/// Replicated-edge sample index for a signed coordinate.
fn clamp_index(i: i64, len: u32) -> u32 {
    i.clamp(0, len as i64 - 1) as u32
}

/// 2-D Gaussian smoothing as separable horizontal + vertical passes.
///
/// Accumulation is floating point throughout; the value is rounded and
/// clamped once, after the second pass. Borders replicate the edge pixel.
pub fn gaussian_blur(
    frame: &Frame,
    kernel_h: &GaussianKernel,
    kernel_v: &GaussianKernel,
) -> Result<Frame> {
    let (w, h) = (frame.width(), frame.height());
    let kh = kernel_h.coefficients();
    let kv = kernel_v.coefficients();
    let rh = (kernel_h.size() / 2) as i64;
    let rv = (kernel_v.size() / 2) as i64;

    // horizontal pass into a float buffer
    let mut mid = vec![0.0f64; w as usize * h as usize * 3];
    for y in 0..h {
        for x in 0..w {
            let mut acc = [0.0f64; 3];
            for (t, &g) in kh.iter().enumerate() {
                let sx = clamp_index(x as i64 + t as i64 - rh, w);
                let p = frame.pixel(sx, y);
                for c in 0..3 {
                    acc[c] += g * p[c] as f64;
                }
            }
            let i = (y as usize * w as usize + x as usize) * 3;
            mid[i..i + 3].copy_from_slice(&acc);
        }
    }

    // vertical pass, then a single round+clamp
    let mut pixels = vec![0u8; w as usize * h as usize * 3];
    for y in 0..h {
        for x in 0..w {
            let mut acc = [0.0f64; 3];
            for (t, &g) in kv.iter().enumerate() {
                let sy = clamp_index(y as i64 + t as i64 - rv, h);
                let i = (sy as usize * w as usize + x as usize) * 3;
                for c in 0..3 {
                    acc[c] += g * mid[i + c];
                }
            }
            let i = (y as usize * w as usize + x as usize) * 3;
            for c in 0..3 {
                pixels[i + c] = round_clamp_u8(acc[c]);
            }
        }
    }
    Frame::from_rgb(w, h, pixels)
}

/// Block pixelization: area-average downsample by `(d_x, d_y)` anchored at
/// the top-left corner, then nearest upsample back to the original size.
/// Partial edge blocks average only their in-bounds pixels.
pub fn pixelize(frame: &Frame, d_x: u32, d_y: u32) -> Result<Frame> {
    if d_x == 0 || d_y == 0 {
        return Err(Error::InvalidParameter(format!(
            "pixelization factors must be >= 1, got ({d_x}, {d_y})"
        )));
    }
    let (w, h) = (frame.width(), frame.height());
    let mut out = frame.clone();
    let mut by = 0;
    while by < h {
        let bh = d_y.min(h - by);
        let mut bx = 0;
        while bx < w {
            let bw = d_x.min(w - bx);
            let mut acc = [0.0f64; 3];
            for y in by..by + bh {
                for x in bx..bx + bw {
                    let p = frame.pixel(x, y);
                    for c in 0..3 {
                        acc[c] += p[c] as f64;
                    }
                }
            }
            let n = (bw as u64 * bh as u64) as f64;
            let mean = [
                round_clamp_u8(acc[0] / n),
                round_clamp_u8(acc[1] / n),
                round_clamp_u8(acc[2] / n),
            ];
            for y in by..by + bh {
                for x in bx..bx + bw {
                    out.set_pixel(x, y, mean);
                }
            }
            bx += d_x;
        }
        by += d_y;
    }
    Ok(out)
}

/// All pixels black; selective application happens via masked composition.
pub fn blacken(frame: &Frame) -> Frame {
    Frame::filled(frame.width(), frame.height(), [0, 0, 0]).expect("frame dims are valid")
}

/// Black silhouette with Canny edge pixels rendered white. Edges are
/// computed on the input crop, before blackening.
pub fn blacken_edged(frame: &Frame, params: &CannyParams) -> Result<Frame> {
    let edges = canny_edges(frame, params)?;
    let mut out = blacken(frame);
    for y in 0..frame.height() {
        for x in 0..frame.width() {
            if edges.get(x, y) {
                out.set_pixel(x, y, [255, 255, 255]);
            }
        }
    }
    Ok(out)
}
