//! Subprocess-backed mask provider.
//!
//! Protocol: the provider command receives an input manifest path as its
//! first argument and an output directory as its second, writes one
//! sidecar (JSON + mask PNG) per frame into the output directory, and
//! exits 0 on success.

use std::io::Read;
use std::path::Path;
use std::process::{Command, Stdio};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::error::DetectorError;
use crate::imgio;
use crate::raster::{Frame, InstanceMask};
use crate::segmentation::{sidecar, MaskProvider};

#[derive(Serialize)]
struct ManifestEntry<'a> {
    frame_id: &'a str,
    path: String,
    width: u32,
    height: u32,
}

#[derive(Serialize)]
struct Manifest<'a> {
    frames: Vec<ManifestEntry<'a>>,
}

/// Spawns an external segmentation process per batch of frames.
pub struct ExternalProvider {
    command: Vec<String>,
    per_frame_timeout: Duration,
    // a single provider instance serializes access to its process
    lock: Mutex<()>,
}

impl ExternalProvider {
    pub fn new(command: Vec<String>, per_frame_timeout: Duration) -> Result<Self, DetectorError> {
        if command.is_empty() {
            return Err(DetectorError::Spawn {
                command: String::new(),
                source: std::io::Error::other("empty provider command"),
            });
        }
        Ok(Self {
            command,
            per_frame_timeout,
            lock: Mutex::new(()),
        })
    }

    fn command_display(&self) -> String {
        self.command.join(" ")
    }

    /// Runs the provider over a batch, returning instances per frame in
    /// input order.
    pub fn run_batch(
        &self,
        frames: &[(&str, &Frame)],
    ) -> Result<Vec<Vec<InstanceMask>>, DetectorError> {
        let _guard = self.lock.lock().expect("provider lock");
        let work = tempfile::tempdir().map_err(|e| DetectorError::Io {
            path: std::env::temp_dir(),
            source: e,
        })?;
        let in_dir = work.path().join("frames");
        let out_dir = work.path().join("out");
        for d in [&in_dir, &out_dir] {
            std::fs::create_dir_all(d).map_err(|e| DetectorError::Io {
                path: d.clone(),
                source: e,
            })?;
        }

        let mut entries = Vec::new();
        for (frame_id, frame) in frames {
            let path = in_dir.join(format!("{frame_id}.png"));
            imgio::save_frame(&path, frame).map_err(|e| DetectorError::Io {
                path: path.clone(),
                source: std::io::Error::other(e.to_string()),
            })?;
            entries.push(ManifestEntry {
                frame_id,
                path: path.to_string_lossy().into_owned(),
                width: frame.width(),
                height: frame.height(),
            });
        }
        let manifest_path = work.path().join("manifest.json");
        let manifest = serde_json::to_string_pretty(&Manifest { frames: entries })
            .expect("manifest serializes");
        std::fs::write(&manifest_path, manifest).map_err(|e| DetectorError::Io {
            path: manifest_path.clone(),
            source: e,
        })?;

        let timeout = self
            .per_frame_timeout
            .checked_mul(frames.len().max(1) as u32)
            .unwrap_or(Duration::MAX);
        self.wait_for(&manifest_path, &out_dir, timeout)?;

        let mut out = Vec::new();
        for (frame_id, _) in frames {
            out.push(
                sidecar::load_sidecar(&out_dir, frame_id)
                    .map_err(DetectorError::ProviderOutput)?,
            );
        }
        Ok(out)
    }

    fn wait_for(
        &self,
        manifest_path: &Path,
        out_dir: &Path,
        timeout: Duration,
    ) -> Result<(), DetectorError> {
        let mut child = Command::new(&self.command[0])
            .args(&self.command[1..])
            .arg(manifest_path)
            .arg(out_dir)
            .stdin(Stdio::null())
            .stdout(Stdio::null())
            .stderr(Stdio::piped())
            .spawn()
            .map_err(|e| DetectorError::Spawn {
                command: self.command_display(),
                source: e,
            })?;

        let started = Instant::now();
        let status = loop {
            match child.try_wait() {
                Ok(Some(status)) => break status,
                Ok(None) => {
                    if started.elapsed() > timeout {
                        let _ = child.kill();
                        let _ = child.wait();
                        return Err(DetectorError::ProviderTimeout {
                            command: self.command_display(),
                            timeout_ms: timeout.as_millis() as u64,
                        });
                    }
                    std::thread::sleep(Duration::from_millis(5));
                }
                Err(e) => {
                    return Err(DetectorError::Spawn {
                        command: self.command_display(),
                        source: e,
                    })
                }
            }
        };
        if !status.success() {
            let mut stderr = String::new();
            if let Some(mut pipe) = child.stderr.take() {
                let _ = pipe.read_to_string(&mut stderr);
            }
            return Err(DetectorError::ProviderFailed {
                command: self.command_display(),
                status: status.to_string(),
                stderr: stderr.trim().to_string(),
            });
        }
        Ok(())
    }
}

impl MaskProvider for ExternalProvider {
    fn detect(&self, frame: &Frame, frame_id: &str) -> Result<Vec<InstanceMask>, DetectorError> {
        Ok(self.run_batch(&[(frame_id, frame)])?.pop().unwrap_or_default())
    }
}
