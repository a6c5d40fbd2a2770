//! Raster and mask primitives shared by every anonymizer.
//!
//! Convention: row-major storage, top-left origin, 8-bit RGB without alpha.
//! All types are immutable after construction; the operations are pure.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// An 8-bit-per-channel RGB raster, the unit of processing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    width: u32,
    height: u32,
    pixels: Vec<u8>,
}

impl Frame {
    /// Builds a frame from a row-major RGB buffer.
    pub fn from_rgb(width: u32, height: u32, pixels: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidParameter(format!(
                "frame dimensions must be >= 1, got {width}x{height}"
            )));
        }
        let expected = width as usize * height as usize * 3;
        if pixels.len() != expected {
            return Err(Error::InvalidParameter(format!(
                "pixel buffer length {} != {expected} for {width}x{height}",
                pixels.len()
            )));
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    /// A frame filled with one color.
    pub fn filled(width: u32, height: u32, rgb: [u8; 3]) -> Result<Self> {
        let n = width as usize * height as usize;
        let mut pixels = Vec::with_capacity(n * 3);
        for _ in 0..n {
            pixels.extend_from_slice(&rgb);
        }
        Self::from_rgb(width, height, pixels)
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    /// Total pixel count, the area function over the frame.
    pub fn area(&self) -> u64 {
        self.width as u64 * self.height as u64
    }

    pub fn as_rgb(&self) -> &[u8] {
        &self.pixels
    }

    pub fn pixel(&self, x: u32, y: u32) -> [u8; 3] {
        let i = self.offset(x, y);
        [self.pixels[i], self.pixels[i + 1], self.pixels[i + 2]]
    }

    pub(crate) fn set_pixel(&mut self, x: u32, y: u32, rgb: [u8; 3]) {
        let i = self.offset(x, y);
        self.pixels[i..i + 3].copy_from_slice(&rgb);
    }

    fn offset(&self, x: u32, y: u32) -> usize {
        debug_assert!(x < self.width && y < self.height);
        (y as usize * self.width as usize + x as usize) * 3
    }

    pub fn same_dims(&self, other: &Frame) -> bool {
        self.width == other.width && self.height == other.height
    }

    /// Nearest-neighbor resize; source index = dst * src_dim / dst_dim.
    pub fn resize_nearest(&self, new_w: u32, new_h: u32) -> Result<Frame> {
        if new_w == 0 || new_h == 0 {
            return Err(Error::InvalidParameter(
                "resize target must be >= 1 in both dimensions".into(),
            ));
        }
        let mut pixels = Vec::with_capacity(new_w as usize * new_h as usize * 3);
        for y in 0..new_h {
            let sy = (y as u64 * self.height as u64 / new_h as u64) as u32;
            for x in 0..new_w {
                let sx = (x as u64 * self.width as u64 / new_w as u64) as u32;
                pixels.extend_from_slice(&self.pixel(sx, sy));
            }
        }
        Frame::from_rgb(new_w, new_h, pixels)
    }
}

/// Row-major boolean occupancy raster.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryMask {
    width: u32,
    height: u32,
    bits: Vec<bool>,
}

impl BinaryMask {
    pub fn new(width: u32, height: u32) -> Self {
        Self {
            width,
            height,
            bits: vec![false; width as usize * height as usize],
        }
    }

    pub fn from_bits(width: u32, height: u32, bits: Vec<bool>) -> Result<Self> {
        if bits.len() != width as usize * height as usize {
            return Err(Error::InvalidParameter(format!(
                "mask bit buffer length {} != {} for {width}x{height}",
                bits.len(),
                width as usize * height as usize
            )));
        }
        Ok(Self {
            width,
            height,
            bits,
        })
    }

    pub fn filled(width: u32, height: u32) -> Self {
        Self {
            width,
            height,
            bits: vec![true; width as usize * height as usize],
        }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn get(&self, x: u32, y: u32) -> bool {
        self.bits[y as usize * self.width as usize + x as usize]
    }

    pub fn set(&mut self, x: u32, y: u32, v: bool) {
        self.bits[y as usize * self.width as usize + x as usize] = v;
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn same_dims_as_frame(&self, frame: &Frame) -> bool {
        self.width == frame.width() && self.height == frame.height()
    }

    /// Nearest-neighbor resize, preserving binarity.
    pub fn resize_nearest(&self, new_w: u32, new_h: u32) -> Result<BinaryMask> {
        if new_w == 0 || new_h == 0 {
            return Err(Error::InvalidParameter(
                "resize target must be >= 1 in both dimensions".into(),
            ));
        }
        let mut out = BinaryMask::new(new_w, new_h);
        for y in 0..new_h {
            let sy = (y as u64 * self.height as u64 / new_h as u64) as u32;
            for x in 0..new_w {
                let sx = (x as u64 * self.width as u64 / new_w as u64) as u32;
                if self.get(sx, sy) {
                    out.set(x, y, true);
                }
            }
        }
        Ok(out)
    }
}

/// Axis-aligned box; `x,y` is the top-left corner, inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BBox {
    pub x: u32,
    pub y: u32,
    pub w: u32,
    pub h: u32,
}

impl BBox {
    pub fn new(x: u32, y: u32, w: u32, h: u32) -> Self {
        Self { x, y, w, h }
    }

    pub fn fits_in(&self, width: u32, height: u32) -> bool {
        self.w >= 1
            && self.h >= 1
            && self.x.checked_add(self.w).is_some_and(|r| r <= width)
            && self.y.checked_add(self.h).is_some_and(|b| b <= height)
    }

    pub fn contains(&self, x: u32, y: u32) -> bool {
        x >= self.x && x < self.x + self.w && y >= self.y && y < self.y + self.h
    }
}

/// One detected person: mask, tight box, category, and confidence.
#[derive(Debug, Clone, PartialEq)]
pub struct InstanceMask {
    pub mask: BinaryMask,
    pub box_: BBox,
    pub class_id: u32,
    pub score: f64,
}

impl InstanceMask {
    /// Builds an instance deriving the tight box from the mask.
    /// Returns `None` for an all-false mask (a legal degenerate value).
    pub fn from_mask(mask: BinaryMask, class_id: u32, score: f64) -> Option<Self> {
        tight_bbox(&mask).map(|box_| Self {
            mask,
            box_,
            class_id,
            score,
        })
    }
}

/// Count of true bits, the area function over a mask.
pub fn mask_area(mask: &BinaryMask) -> u64 {
    mask.bits().iter().filter(|&&b| b).count() as u64
}

/// Minimal rectangle covering all true bits; `None` for an empty mask.
pub fn tight_bbox(mask: &BinaryMask) -> Option<BBox> {
    let (mut min_x, mut min_y) = (u32::MAX, u32::MAX);
    let (mut max_x, mut max_y) = (0u32, 0u32);
    let mut any = false;
    for y in 0..mask.height() {
        for x in 0..mask.width() {
            if mask.get(x, y) {
                any = true;
                min_x = min_x.min(x);
                min_y = min_y.min(y);
                max_x = max_x.max(x);
                max_y = max_y.max(y);
            }
        }
    }
    any.then(|| BBox::new(min_x, min_y, max_x - min_x + 1, max_y - min_y + 1))
}

/// Masked composition: output takes `transformed` where the mask is true
/// and `frame` elsewhere, bit-exactly.
pub fn compose_masked(frame: &Frame, mask: &BinaryMask, transformed: &Frame) -> Result<Frame> {
    if !frame.same_dims(transformed) || !mask.same_dims_as_frame(frame) {
        return Err(Error::DimensionMismatch {
            expected_w: frame.width(),
            expected_h: frame.height(),
            got_w: transformed.width(),
            got_h: transformed.height(),
        });
    }
    let mut out = frame.clone();
    for y in 0..frame.height() {
        for x in 0..frame.width() {
            if mask.get(x, y) {
                out.set_pixel(x, y, transformed.pixel(x, y));
            }
        }
    }
    Ok(out)
}

/// The exact sub-rectangle of `frame` covered by `box_`.
pub fn crop(frame: &Frame, box_: &BBox) -> Result<Frame> {
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
    let mut pixels = Vec::with_capacity(box_.w as usize * box_.h as usize * 3);
    for y in box_.y..box_.y + box_.h {
        for x in box_.x..box_.x + box_.w {
            pixels.extend_from_slice(&frame.pixel(x, y));
        }
    }
    Frame::from_rgb(box_.w, box_.h, pixels)
}

/// Writes `patch` back at `box_`; inverse of [`crop`] for an unchanged patch.
pub fn paste(frame: &Frame, box_: &BBox, patch: &Frame) -> Result<Frame> {
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
    if patch.width() != box_.w || patch.height() != box_.h {
        return Err(Error::DimensionMismatch {
            expected_w: box_.w,
            expected_h: box_.h,
            got_w: patch.width(),
            got_h: patch.height(),
        });
    }
    let mut out = frame.clone();
    for y in 0..box_.h {
        for x in 0..box_.w {
            out.set_pixel(box_.x + x, box_.y + y, patch.pixel(x, y));
        }
    }
    Ok(out)
}
