//! Low-latency adaptive full-body anonymization for video frames.
//!
//! The engine obscures detected person regions in RGB frames with one of
//! four conventional anonymizers (black silhouette, edged silhouette,
//! Gaussian blur, pixelization) or their adaptive variants, which scale
//! anonymization strength per instance by the person's relative mask area.
//!
//! Modules:
//! - [`raster`]: frames, binary masks, boxes, and masked composition.
//! - [`filters`]: Gaussian kernels, separable blur, pixelization, Canny.
//! - [`adaptive`]: the relative-area scaling factor and adaptive filters.
//! - [`segmentation`]: pluggable mask providers, sidecar files, padding.
//! - [`pipeline`]: presets, per-frame/per-sequence orchestration, reports.

pub mod adaptive;
pub mod error;
pub mod filters;
pub mod imgio;
pub mod pipeline;
pub mod raster;
pub mod segmentation;

pub use error::{DetectorError, Error, Result, SidecarError};
pub use raster::{BBox, BinaryMask, Frame, InstanceMask};
