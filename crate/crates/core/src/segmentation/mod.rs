//! The detector contract: obtain person instance masks for a frame via
//! pluggable providers, with the resize-to-inference-size and restore
//! steps and reversible padding for small inputs.

mod external;
mod sidecar;

pub use external::ExternalProvider;
pub use sidecar::{
    load_sidecar, save_sidecar, validate_sidecar, SidecarInstanceMeta, SidecarMeta,
    SidecarProvider,
};

use std::collections::BTreeSet;

use crate::error::{DetectorError, Result};
use crate::raster::{tight_bbox, BBox, BinaryMask, Frame, InstanceMask};

/// Default COCO category ids for carryable personal items:
/// backpack, umbrella, handbag, suitcase, laptop, cell phone.
pub const DEFAULT_ITEM_CLASS_IDS: [u32; 6] = [24, 25, 26, 28, 63, 67];

/// Detector configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectorConfig {
    /// Confidence threshold; instances scoring below it are dropped.
    pub confidence_threshold: f64,
    /// Inference resolution `(w, h)` the frame is resized to.
    pub inference_size: (u32, u32),
    /// Reversibly pad frames smaller than the inference size before resizing.
    pub pad_small_inputs: bool,
    pub person_class_ids: BTreeSet<u32>,
    pub include_personal_items: bool,
    pub item_class_ids: BTreeSet<u32>,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        Self {
            confidence_threshold: 0.25,
            inference_size: (320, 240),
            pad_small_inputs: true,
            person_class_ids: BTreeSet::from([0]),
            include_personal_items: false,
            item_class_ids: BTreeSet::from(DEFAULT_ITEM_CLASS_IDS),
        }
    }
}

impl DetectorConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.confidence_threshold) {
            return Err(crate::error::Error::InvalidParameter(format!(
                "confidence threshold must be in [0, 1], got {}",
                self.confidence_threshold
            )));
        }
        if self.inference_size.0 == 0 || self.inference_size.1 == 0 {
            return Err(crate::error::Error::InvalidParameter(
                "inference size components must be >= 1".into(),
            ));
        }
        Ok(())
    }

    fn accepts_class(&self, class_id: u32) -> bool {
        self.person_class_ids.contains(&class_id)
            || (self.include_personal_items && self.item_class_ids.contains(&class_id))
    }
}

/// A source of instance masks for a frame. Implementations receive the
/// frame already resized to the inference resolution; returned masks may
/// be at any resolution (each mask carries its own dimensions) and boxes
/// are in mask coordinates.
pub trait MaskProvider {
    fn detect(&self, frame: &Frame, frame_id: &str) -> Result<Vec<InstanceMask>, DetectorError>;
}

/// Edge-replication padding offsets, recorded so removal is exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PadOffsets {
    pub left: u32,
    pub top: u32,
    pub right: u32,
    pub bottom: u32,
}

/// Pads a frame by edge replication until it matches the `tw:th` aspect
/// ratio, splitting the deficit evenly. The original sits at
/// `(offsets.left, offsets.top)` and removal is bit-exact.
pub fn pad_to_aspect(frame: &Frame, tw: u32, th: u32) -> (Frame, PadOffsets) {
    let (w, h) = (frame.width() as u64, frame.height() as u64);
    let (tw, th) = (tw as u64, th as u64);
    let (new_w, new_h) = if w * th < tw * h {
        // width deficit: grow width to ceil(h * tw / th)
        (((h * tw).div_ceil(th)) as u32, frame.height())
    } else if w * th > tw * h {
        (frame.width(), ((w * th).div_ceil(tw)) as u32)
    } else {
        (frame.width(), frame.height())
    };
    let left = (new_w - frame.width()) / 2;
    let top = (new_h - frame.height()) / 2;
    let offsets = PadOffsets {
        left,
        top,
        right: new_w - frame.width() - left,
        bottom: new_h - frame.height() - top,
    };
    let mut out = Frame::filled(new_w, new_h, [0, 0, 0]).expect("padded dims are valid");
    for y in 0..new_h {
        let sy = y.saturating_sub(top).min(frame.height() - 1);
        for x in 0..new_w {
            let sx = x.saturating_sub(left).min(frame.width() - 1);
            out.set_pixel(x, y, frame.pixel(sx, sy));
        }
    }
    (out, offsets)
}

/// Removes padding: the exact sub-rectangle holding the original.
pub fn unpad_frame(padded: &Frame, offsets: &PadOffsets) -> Result<Frame> {
    let w = padded.width() - offsets.left - offsets.right;
    let h = padded.height() - offsets.top - offsets.bottom;
    crate::raster::crop(padded, &BBox::new(offsets.left, offsets.top, w, h))
}

fn unpad_mask(mask: &BinaryMask, offsets: &PadOffsets) -> BinaryMask {
    let w = mask.width() - offsets.left - offsets.right;
    let h = mask.height() - offsets.top - offsets.bottom;
    let mut out = BinaryMask::new(w, h);
    for y in 0..h {
        for x in 0..w {
            if mask.get(x + offsets.left, y + offsets.top) {
                out.set(x, y, true);
            }
        }
    }
    out
}

/// Conservative box rescale from `(sw, sh)` to `(dw, dh)`: floor on the
/// origin, ceil on the far edge, clamped in bounds.
fn rescale_box(b: &BBox, sw: u32, sh: u32, dw: u32, dh: u32) -> BBox {
    let (sw, sh, dw64, dh64) = (sw as u64, sh as u64, dw as u64, dh as u64);
    let x0 = b.x as u64 * dw64 / sw;
    let y0 = b.y as u64 * dh64 / sh;
    let x1 = ((b.x + b.w) as u64 * dw64).div_ceil(sw).min(dw64);
    let y1 = ((b.y + b.h) as u64 * dh64).div_ceil(sh).min(dh64);
    BBox::new(
        x0 as u32,
        y0 as u32,
        (x1 - x0).max(1) as u32,
        (y1 - y0).max(1) as u32,
    )
}

fn union_boxes(a: BBox, b: BBox) -> BBox {
    let x0 = a.x.min(b.x);
    let y0 = a.y.min(b.y);
    let x1 = (a.x + a.w).max(b.x + b.w);
    let y1 = (a.y + a.h).max(b.y + b.h);
    BBox::new(x0, y0, x1 - x0, y1 - y0)
}

fn clamp_box(b: BBox, w: u32, h: u32) -> BBox {
    let x0 = b.x.min(w - 1);
    let y0 = b.y.min(h - 1);
    let x1 = (b.x + b.w).min(w).max(x0 + 1);
    let y1 = (b.y + b.h).min(h).max(y0 + 1);
    BBox::new(x0, y0, x1 - x0, y1 - y0)
}

/// Runs a provider over the frame: resize (with reversible padding for
/// small inputs when enabled), detect at inference resolution, filter by
/// confidence and class, and restore masks and boxes to the original
/// frame dimensions. Zero detections yield an empty list, distinct from
/// provider failure.
pub fn detect(
    frame: &Frame,
    frame_id: &str,
    config: &DetectorConfig,
    provider: &dyn MaskProvider,
) -> Result<Vec<InstanceMask>> {
    config.validate()?;
    let (iw, ih) = config.inference_size;
    let needs_pad =
        config.pad_small_inputs && (frame.width() < iw || frame.height() < ih);
    let (work, offsets) = if needs_pad {
        let (padded, off) = pad_to_aspect(frame, iw, ih);
        (padded, Some(off))
    } else {
        (frame.clone(), None)
    };
    let resized = work.resize_nearest(iw, ih)?;
    let raw = provider.detect(&resized, frame_id)?;

    let mut out = Vec::new();
    for inst in raw {
        if inst.score < config.confidence_threshold || !config.accepts_class(inst.class_id) {
            continue;
        }
        let (mw, mh) = (inst.mask.width(), inst.mask.height());
        // restore to the working (possibly padded) dimensions
        let mut mask = inst.mask.resize_nearest(work.width(), work.height())?;
        let mut box_ = rescale_box(&inst.box_, mw, mh, work.width(), work.height());
        // strip padding
        if let Some(off) = &offsets {
            mask = unpad_mask(&mask, off);
            let x0 = box_.x.saturating_sub(off.left);
            let y0 = box_.y.saturating_sub(off.top);
            box_ = clamp_box(
                BBox::new(x0, y0, box_.w, box_.h),
                frame.width(),
                frame.height(),
            );
        }
        // a box always contains its restored mask
        match tight_bbox(&mask) {
            Some(tb) => {
                box_ = clamp_box(union_boxes(box_, tb), frame.width(), frame.height());
                out.push(InstanceMask {
                    mask,
                    box_,
                    class_id: inst.class_id,
                    score: inst.score,
                });
            }
            None => continue, // mask vanished in restore; degenerate, drop
        }
    }
    Ok(out)
}
