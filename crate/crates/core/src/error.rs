//! Error types shared across the engine.

use std::path::PathBuf;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Contract and parameter violations raised by the in-memory operations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected_w}x{expected_h}, got {got_w}x{got_h}")]
    DimensionMismatch {
        expected_w: u32,
        expected_h: u32,
        got_w: u32,
        got_h: u32,
    },
    #[error("box {x},{y} {w}x{h} out of bounds for {frame_w}x{frame_h} frame")]
    BoxOutOfBounds {
        x: u32,
        y: u32,
        w: u32,
        h: u32,
        frame_w: u32,
        frame_h: u32,
    },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("unknown preset {name:?}; available: {available}")]
    UnknownPreset { name: String, available: String },
    #[error(transparent)]
    Detector(#[from] DetectorError),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// Detector-unavailable conditions, distinct from "zero detections".
#[derive(Debug, Error)]
pub enum DetectorError {
    #[error("provider process {command:?} exited with {status}: {stderr}")]
    ProviderFailed {
        command: String,
        status: String,
        stderr: String,
    },
    #[error("provider process {command:?} timed out after {timeout_ms} ms")]
    ProviderTimeout { command: String, timeout_ms: u64 },
    #[error("provider output invalid: {0}")]
    ProviderOutput(#[from] SidecarError),
    #[error("failed to spawn provider {command:?}: {source}")]
    Spawn {
        command: String,
        #[source]
        source: std::io::Error,
    },
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// Sidecar file validation failures, naming the offending field.
#[derive(Debug, Error)]
pub enum SidecarError {
    #[error("sidecar not found for frame {frame_id:?} at {path}")]
    NotFound { frame_id: String, path: PathBuf },
    #[error("malformed metadata in {path}: {detail}")]
    Metadata { path: PathBuf, detail: String },
    #[error("mask raster {path}: {detail}")]
    Raster { path: PathBuf, detail: String },
    #[error(
        "instance {id} in {path}: metadata bbox [{meta_box}] disagrees with raster bbox [{raster_box}]"
    )]
    BBoxMismatch {
        id: u8,
        path: PathBuf,
        meta_box: String,
        raster_box: String,
    },
    #[error("instance id {id} out of range 1..=255 in {path}")]
    IdOutOfRange { id: i64, path: PathBuf },
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}
