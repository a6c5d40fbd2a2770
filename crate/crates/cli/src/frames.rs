//! Frame-directory input: lexicographic filename order is the temporal
//! order.

use std::path::{Path, PathBuf};

use la3d_core::{imgio, Frame};

use crate::error::CliError;

/// PNG files of `dir` in lexicographic order, as `(frame_id, path)` where
/// the id is the file stem.
pub fn list_frames(dir: &Path) -> Result<Vec<(String, PathBuf)>, CliError> {
    let entries = std::fs::read_dir(dir)
        .map_err(|e| CliError::input(format!("cannot read input dir {}: {e}", dir.display())))?;
    let mut frames = Vec::new();
    for entry in entries {
        let entry =
            entry.map_err(|e| CliError::input(format!("reading {}: {e}", dir.display())))?;
        let path = entry.path();
        let is_png = path
            .extension()
            .is_some_and(|e| e.eq_ignore_ascii_case("png"));
        if !path.is_file() || !is_png {
            continue;
        }
        // mask rasters may share a directory with frames; never ingest them
        if path.to_string_lossy().ends_with(".mask.png") {
            continue;
        }
        let id = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .filter(|s| !s.is_empty())
            .ok_or_else(|| CliError::input(format!("unusable file name {}", path.display())))?;
        frames.push((id, path));
    }
    frames.sort_by(|a, b| a.1.file_name().cmp(&b.1.file_name()));
    Ok(frames)
}

pub fn load(path: &Path) -> Result<Frame, CliError> {
    imgio::load_frame(path)
        .map_err(|e| CliError::input(format!("cannot load frame {}: {e}", path.display())))
}
