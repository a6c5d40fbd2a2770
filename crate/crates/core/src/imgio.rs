//! PNG load/save for frames and single-channel rasters.
//!
//! Grayscale inputs are promoted to RGB on load; alpha is dropped.

use std::path::Path;

use image::{DynamicImage, GrayImage, ImageReader, RgbImage};

use crate::error::{Error, Result};
use crate::raster::Frame;

fn io_err(path: &Path, e: impl Into<Box<dyn std::error::Error + Send + Sync>>) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source: std::io::Error::other(e),
    }
}

pub fn load_frame(path: &Path) -> Result<Frame> {
    let img = ImageReader::open(path)
        .map_err(|e| io_err(path, e))?
        .decode()
        .map_err(|e| io_err(path, e))?;
    let rgb = img.to_rgb8();
    Frame::from_rgb(rgb.width(), rgb.height(), rgb.into_raw())
}

pub fn save_frame(path: &Path, frame: &Frame) -> Result<()> {
    let img = RgbImage::from_raw(frame.width(), frame.height(), frame.as_rgb().to_vec())
        .expect("frame buffer matches dimensions");
    img.save(path).map_err(|e| io_err(path, e))
}

pub fn load_gray(path: &Path) -> Result<(u32, u32, Vec<u8>)> {
    let img = ImageReader::open(path)
        .map_err(|e| io_err(path, e))?
        .decode()
        .map_err(|e| io_err(path, e))?;
    let gray = match img {
        DynamicImage::ImageLuma8(g) => g,
        other => other.to_luma8(),
    };
    Ok((gray.width(), gray.height(), gray.into_raw()))
}

pub fn save_gray(path: &Path, width: u32, height: u32, data: &[u8]) -> Result<()> {
    let img = GrayImage::from_raw(width, height, data.to_vec())
        .ok_or_else(|| Error::InvalidParameter("gray buffer does not match dimensions".into()))?;
    img.save(path).map_err(|e| io_err(path, e))
}
