//! The adaptive anonymization mechanism: the relative-area scaling
//! factor, adaptive blur and pixelization with their clamping rules,
//! and the per-instance anonymization loop.

use std::time::Instant;

use crate::error::{Error, Result};
use crate::filters::{
    blacken, blacken_edged, build_gaussian_kernel, gaussian_blur, pixelize, CannyParams,
};
use crate::raster::{crop, mask_area, Frame, InstanceMask};

/// Knobs of the adaptive mechanism.
///
/// `alpha_r` is a global gain aligning strength across input resolutions;
/// when `z_ref` is set, the effective gain becomes the area ratio of the
/// input frame to the reference resolution. `alpha_b` caps adaptive
/// kernel/downsize growth as a fraction of the bounding-box dimension.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdaptiveParams {
    pub alpha_r: f64,
    pub alpha_b: f64,
    pub ismax: bool,
    pub isfullblur: bool,
    pub z_ref: Option<(u32, u32)>,
}

impl Default for AdaptiveParams {
    fn default() -> Self {
        Self {
            alpha_r: 1.0,
            alpha_b: 0.5,
            ismax: false,
            isfullblur: false,
            z_ref: None,
        }
    }
}

impl AdaptiveParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha_r > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "alpha_r must be positive, got {}",
                self.alpha_r
            )));
        }
        if !(self.alpha_b > 0.0 && self.alpha_b <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "alpha_b must be in (0, 1], got {}",
                self.alpha_b
            )));
        }
        if let Some((w, h)) = self.z_ref {
            if w == 0 || h == 0 {
                return Err(Error::InvalidParameter(
                    "z_ref dimensions must be >= 1".into(),
                ));
            }
        }
        Ok(())
    }

    /// Effective gain for a frame: the `Z / Z_ref` area ratio when a
    /// reference resolution is set, otherwise `alpha_r` as given.
    pub fn effective_alpha_r(&self, frame: &Frame) -> f64 {
        match self.z_ref {
            Some((w, h)) => frame.area() as f64 / (w as u64 * h as u64) as f64,
            None => self.alpha_r,
        }
    }
}

/// Base blur parameters: kernel sizes as `[k_h, k_w]` plus sigma.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlurBase {
    pub k_base: [u32; 2],
    pub sigma_base: f64,
}

impl BlurBase {
    pub fn new(k_h: u32, k_w: u32, sigma: f64) -> Result<Self> {
        for k in [k_h, k_w] {
            if k == 0 || k % 2 == 0 {
                return Err(Error::InvalidParameter(format!(
                    "base kernel sizes must be odd and >= 1, got {k}"
                )));
            }
        }
        if !(sigma > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "base sigma must be positive, got {sigma}"
            )));
        }
        Ok(Self {
            k_base: [k_h, k_w],
            sigma_base: sigma,
        })
    }
}

/// Base pixelization downsizing factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PixelizeBase {
    pub d_base: u32,
}

impl PixelizeBase {
    pub fn new(d_base: u32) -> Result<Self> {
        if d_base == 0 {
            return Err(Error::InvalidParameter(
                "base downsizing factor must be >= 1".into(),
            ));
        }
        Ok(Self { d_base })
    }
}

/// A fully-resolved anonymization method.
#[derive(Debug, Clone, PartialEq)]
pub enum Method {
    Raw,
    Blackened,
    BlackenedEdged(CannyParams),
    Blurred(BlurBase),
    Pixelized(PixelizeBase),
    BlurredAdaptive(BlurBase, AdaptiveParams),
    PixelizedAdaptive(PixelizeBase, AdaptiveParams),
}

impl Method {
    pub fn is_adaptive(&self) -> bool {
        matches!(
            self,
            Method::BlurredAdaptive(..) | Method::PixelizedAdaptive(..)
        )
    }
}

/// Scaling factor from raw areas: `max(alpha_r * ln(100 * mask/frame), 1)`.
pub fn scale_factor_from_areas(mask_area: u64, frame_area: u64, alpha_r: f64) -> f64 {
    let rel = 100.0 * mask_area as f64 / frame_area as f64;
    (alpha_r * rel.ln()).max(1.0)
}

/// Per-instance scaling factor; `None` for an empty mask (the pipeline
/// skips such degenerate instances).
pub fn adaptive_scaler(
    frame: &Frame,
    mask: &crate::raster::BinaryMask,
    alpha_r: f64,
) -> Option<f64> {
    let area = mask_area(mask);
    if area == 0 {
        return None;
    }
    Some(scale_factor_from_areas(area, frame.area(), alpha_r))
}

/// The OpenCV sigma heuristic: `0.3 * (0.5 * (k - 1) - 1) + 0.8`.
pub fn sigma_from_kernel(k: u32) -> f64 {
    0.3 * (0.5 * (k as f64 - 1.0) - 1.0) + 0.8
}

/// Floor, decrement to odd, then lower-bound at `floor_k` (itself odd).
pub fn odd_floor(v: f64, floor_k: u32) -> u32 {
    debug_assert!(floor_k % 2 == 1);
    let mut t = v.floor() as i64;
    if t % 2 == 0 {
        t -= 1;
    }
    t.max(floor_k as i64) as u32
}

/// Kernel sizes `[k_h, k_w]` and sigma realized for a crop.
pub fn resolve_blur_params(
    crop_w: u32,
    crop_h: u32,
    base: &BlurBase,
    r: f64,
    params: &AdaptiveParams,
) -> ([u32; 2], f64) {
    if params.ismax {
        let k_h = odd_floor(crop_h as f64, 1);
        let k_w = odd_floor(crop_w as f64, 1);
        let sigma = sigma_from_kernel(k_h.max(k_w));
        return ([k_h, k_w], sigma);
    }
    let axis = |dim: u32, k_base: u32| -> u32 {
        let raw = odd_floor(r * k_base as f64, k_base);
        let cap = odd_floor((params.alpha_b * dim as f64).max(1.0), 1);
        raw.min(cap)
    };
    let k_h = axis(crop_h, base.k_base[0]);
    let k_w = axis(crop_w, base.k_base[1]);
    let sigma = if params.isfullblur {
        r * base.sigma_base
    } else {
        base.sigma_base
    };
    let sigma = sigma.min(k_h.max(k_w) as f64);
    ([k_h, k_w], sigma)
}

/// Blurs a crop with the adaptively resolved kernel sizes and sigma.
pub fn adaptive_blur(
    crop: &Frame,
    base: &BlurBase,
    r: f64,
    params: &AdaptiveParams,
) -> Result<Frame> {
    let ([k_h, k_w], sigma) = resolve_blur_params(crop.width(), crop.height(), base, r, params);
    let kernel_v = build_gaussian_kernel(k_h, sigma)?;
    let kernel_h = build_gaussian_kernel(k_w, sigma)?;
    gaussian_blur(crop, &kernel_h, &kernel_v)
}

/// Downsizing factors `(d_x, d_y)` realized for a crop.
pub fn resolve_pixelize_params(
    crop_w: u32,
    crop_h: u32,
    base: &PixelizeBase,
    r: f64,
    params: &AdaptiveParams,
) -> (u32, u32) {
    if params.ismax {
        return (crop_w, crop_h);
    }
    let d_raw = (r * base.d_base as f64).floor() as u32;
    let cap = |dim: u32| ((params.alpha_b * dim as f64).floor() as u32).max(1);
    (d_raw.min(cap(crop_w)), d_raw.min(cap(crop_h)))
}

/// Pixelizes a crop with the adaptively resolved factors.
pub fn adaptive_pixelize(
    crop: &Frame,
    base: &PixelizeBase,
    r: f64,
    params: &AdaptiveParams,
) -> Result<Frame> {
    let (d_x, d_y) = resolve_pixelize_params(crop.width(), crop.height(), base, r, params);
    pixelize(crop, d_x, d_y)
}

/// Bookkeeping from one anonymization pass over a frame.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ApplyStats {
    /// Scaling factors per processed instance, adaptive methods only.
    pub r_values: Vec<f64>,
    /// Instances actually applied (empty masks are skipped).
    pub instances_applied: u32,
    /// Wall time spent cropping and filtering, microseconds.
    pub transform_us: u64,
    /// Wall time spent compositing results back, microseconds.
    pub compose_us: u64,
}

/// Anonymizes each instance in provider order, mutating a private working
/// copy: crop at the box, apply the method, composite back only under the
/// mask. Later instances read already-anonymized pixels. Pixels never
/// covered by a mask are bit-identical to the input.
pub fn anonymize_instances(
    frame: &Frame,
    instances: &[InstanceMask],
    method: &Method,
) -> Result<(Frame, ApplyStats)> {
    let mut working = frame.clone();
    let mut stats = ApplyStats::default();
    if matches!(method, Method::Raw) {
        return Ok((working, stats));
    }
    for inst in instances {
        if !inst.mask.same_dims_as_frame(frame) {
            return Err(Error::DimensionMismatch {
                expected_w: frame.width(),
                expected_h: frame.height(),
                got_w: inst.mask.width(),
                got_h: inst.mask.height(),
            });
        }
        let area = mask_area(&inst.mask);
        if area == 0 {
            continue;
        }
        let box_ = inst.box_;
        if !box_.fits_in(frame.width(), frame.height()) {
            return Err(Error::BoxOutOfBounds {
                x: box_.x,
                y: box_.y,
                w: box_.w,
                h: box_.h,
                frame_w: frame.width(),
                frame_h: frame.height(),
            });
        }

        let t0 = Instant::now();
        let crop_img = crop(&working, &box_)?;
        let transformed = match method {
            Method::Raw => unreachable!(),
            Method::Blackened => blacken(&crop_img),
            Method::BlackenedEdged(p) => blacken_edged(&crop_img, p)?,
            Method::Blurred(base) => {
                let kv = build_gaussian_kernel(base.k_base[0], base.sigma_base)?;
                let kh = build_gaussian_kernel(base.k_base[1], base.sigma_base)?;
                gaussian_blur(&crop_img, &kh, &kv)?
            }
            Method::Pixelized(base) => pixelize(&crop_img, base.d_base, base.d_base)?,
            Method::BlurredAdaptive(base, params) => {
                let alpha_r = params.effective_alpha_r(frame);
                let r = scale_factor_from_areas(area, frame.area(), alpha_r);
                stats.r_values.push(r);
                adaptive_blur(&crop_img, base, r, params)?
            }
            Method::PixelizedAdaptive(base, params) => {
                let alpha_r = params.effective_alpha_r(frame);
                let r = scale_factor_from_areas(area, frame.area(), alpha_r);
                stats.r_values.push(r);
                adaptive_pixelize(&crop_img, base, r, params)?
            }
        };
        stats.transform_us += t0.elapsed().as_micros() as u64;

        let t1 = Instant::now();
        for y in 0..box_.h {
            for x in 0..box_.w {
                let (fx, fy) = (box_.x + x, box_.y + y);
                if inst.mask.get(fx, fy) {
                    working.set_pixel(fx, fy, transformed.pixel(x, y));
                }
            }
        }
        stats.compose_us += t1.elapsed().as_micros() as u64;
        stats.instances_applied += 1;
    }
    Ok((working, stats))
}
