//! File-backed mask sidecars: one JSON metadata document plus one 8-bit
//! grayscale PNG per frame, where pixel value `v > 0` labels instance `v`.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{DetectorError, SidecarError};
use crate::imgio;
use crate::raster::{tight_bbox, BinaryMask, Frame, InstanceMask};
use crate::segmentation::MaskProvider;

/// One instance entry in the metadata document. The id is parsed wide so
/// out-of-range values are reported as such rather than as parse noise.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SidecarInstanceMeta {
    pub id: i64,
    pub class_id: u32,
    pub score: f64,
    /// `[x, y, w, h]`; `[0, 0, 0, 0]` marks a zero-area instance.
    pub bbox: [u32; 4],
}

/// Per-frame sidecar metadata.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SidecarMeta {
    pub frame_id: String,
    pub width: u32,
    pub height: u32,
    pub instances: Vec<SidecarInstanceMeta>,
}

fn json_path(dir: &Path, frame_id: &str) -> PathBuf {
    dir.join(format!("{frame_id}.json"))
}

fn raster_path(dir: &Path, frame_id: &str) -> PathBuf {
    dir.join(format!("{frame_id}.mask.png"))
}

/// Loads and validates a sidecar, returning instances in ascending id
/// order. Zero-area instances validate but are omitted from the result.
pub fn load_sidecar(dir: &Path, frame_id: &str) -> Result<Vec<InstanceMask>, SidecarError> {
    let jp = json_path(dir, frame_id);
    let text = match std::fs::read_to_string(&jp) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
            return Err(SidecarError::NotFound {
                frame_id: frame_id.to_string(),
                path: jp,
            })
        }
        Err(e) => return Err(SidecarError::Io { path: jp, source: e }),
    };
    let meta: SidecarMeta = serde_json::from_str(&text).map_err(|e| SidecarError::Metadata {
        path: jp.clone(),
        detail: format!("{e} (byte offset ~{})", byte_offset(&text, &e)),
    })?;
    if meta.frame_id != frame_id {
        return Err(SidecarError::Metadata {
            path: jp.clone(),
            detail: format!(
                "field frame_id: {:?} does not match file name stem {frame_id:?}",
                meta.frame_id
            ),
        });
    }
    if meta.width == 0 || meta.height == 0 {
        return Err(SidecarError::Metadata {
            path: jp.clone(),
            detail: "fields width/height must be >= 1".into(),
        });
    }

    let rp = raster_path(dir, frame_id);
    let (rw, rh, raster) = imgio::load_gray(&rp).map_err(|e| match e {
        crate::error::Error::Io { path, source } => {
            if source.kind() == std::io::ErrorKind::NotFound {
                SidecarError::NotFound {
                    frame_id: frame_id.to_string(),
                    path,
                }
            } else {
                SidecarError::Io { path, source }
            }
        }
        other => SidecarError::Raster {
            path: rp.clone(),
            detail: other.to_string(),
        },
    })?;
    if (rw, rh) != (meta.width, meta.height) {
        return Err(SidecarError::Raster {
            path: rp,
            detail: format!(
                "raster is {rw}x{rh} but metadata declares {}x{}",
                meta.width, meta.height
            ),
        });
    }

    let mut by_id: BTreeMap<u8, SidecarInstanceMeta> = BTreeMap::new();
    for inst in &meta.instances {
        if !(1..=255).contains(&inst.id) {
            return Err(SidecarError::IdOutOfRange {
                id: inst.id,
                path: jp.clone(),
            });
        }
        if !(0.0..=1.0).contains(&inst.score) {
            return Err(SidecarError::Metadata {
                path: jp.clone(),
                detail: format!("instance {}: field score {} outside [0, 1]", inst.id, inst.score),
            });
        }
        if by_id.insert(inst.id as u8, inst.clone()).is_some() {
            return Err(SidecarError::Metadata {
                path: jp.clone(),
                detail: format!("duplicate instance id {}", inst.id),
            });
        }
    }

    // split the label raster into per-id masks
    let mut masks: BTreeMap<u8, BinaryMask> = BTreeMap::new();
    for y in 0..rh {
        for x in 0..rw {
            let v = raster[y as usize * rw as usize + x as usize];
            if v == 0 {
                continue;
            }
            if !by_id.contains_key(&v) {
                return Err(SidecarError::Raster {
                    path: rp,
                    detail: format!("raster labels instance {v} absent from metadata"),
                });
            }
            masks
                .entry(v)
                .or_insert_with(|| BinaryMask::new(rw, rh))
                .set(x, y, true);
        }
    }

    let mut out = Vec::new();
    for (id, inst) in &by_id {
        let meta_box = inst.bbox;
        match masks.remove(id) {
            Some(mask) => {
                let tb = tight_bbox(&mask).expect("mask has at least one bit");
                if meta_box != [tb.x, tb.y, tb.w, tb.h] {
                    return Err(SidecarError::BBoxMismatch {
                        id: *id,
                        path: jp,
                        meta_box: format!("{:?}", meta_box),
                        raster_box: format!("{:?}", [tb.x, tb.y, tb.w, tb.h]),
                    });
                }
                out.push(InstanceMask {
                    mask,
                    box_: tb,
                    class_id: inst.class_id,
                    score: inst.score,
                });
            }
            None => {
                // zero-area instance: legal, must carry the zero box
                if meta_box != [0, 0, 0, 0] {
                    return Err(SidecarError::BBoxMismatch {
                        id: *id,
                        path: jp,
                        meta_box: format!("{:?}", meta_box),
                        raster_box: "[0, 0, 0, 0]".into(),
                    });
                }
            }
        }
    }
    Ok(out)
}

/// Validation without keeping the instances.
pub fn validate_sidecar(dir: &Path, frame_id: &str) -> Result<(), SidecarError> {
    load_sidecar(dir, frame_id).map(|_| ())
}

/// Writes a sidecar for instances at the given frame dimensions, assigning
/// ids 1..=n in input order. Overlapping masks cannot be encoded in the
/// single-channel label raster and are rejected.
pub fn save_sidecar(
    dir: &Path,
    frame_id: &str,
    width: u32,
    height: u32,
    instances: &[InstanceMask],
) -> Result<(), SidecarError> {
    let jp = json_path(dir, frame_id);
    if instances.len() > 255 {
        return Err(SidecarError::IdOutOfRange {
            id: instances.len() as i64,
            path: jp,
        });
    }
    let mut raster = vec![0u8; width as usize * height as usize];
    let mut metas = Vec::new();
    for (i, inst) in instances.iter().enumerate() {
        let id = (i + 1) as u8;
        if inst.mask.width() != width || inst.mask.height() != height {
            return Err(SidecarError::Raster {
                path: raster_path(dir, frame_id),
                detail: format!(
                    "instance {id} mask is {}x{}, frame is {width}x{height}",
                    inst.mask.width(),
                    inst.mask.height()
                ),
            });
        }
        for y in 0..height {
            for x in 0..width {
                if inst.mask.get(x, y) {
                    let cell = &mut raster[y as usize * width as usize + x as usize];
                    if *cell != 0 {
                        return Err(SidecarError::Raster {
                            path: raster_path(dir, frame_id),
                            detail: format!(
                                "instances {} and {id} overlap at ({x}, {y}); overlapping masks cannot be encoded",
                                *cell
                            ),
                        });
                    }
                    *cell = id;
                }
            }
        }
        let bbox = match tight_bbox(&inst.mask) {
            Some(tb) => [tb.x, tb.y, tb.w, tb.h],
            None => [0, 0, 0, 0],
        };
        metas.push(SidecarInstanceMeta {
            id: id as i64,
            class_id: inst.class_id,
            score: inst.score,
            bbox,
        });
    }
    let meta = SidecarMeta {
        frame_id: frame_id.to_string(),
        width,
        height,
        instances: metas,
    };
    let text = serde_json::to_string_pretty(&meta).expect("sidecar metadata serializes");
    std::fs::write(&jp, text).map_err(|e| SidecarError::Io {
        path: jp.clone(),
        source: e,
    })?;
    imgio::save_gray(&raster_path(dir, frame_id), width, height, &raster).map_err(|e| {
        SidecarError::Raster {
            path: raster_path(dir, frame_id),
            detail: e.to_string(),
        }
    })
}

fn byte_offset(text: &str, e: &serde_json::Error) -> usize {
    let line = e.line().max(1);
    let col = e.column().max(1);
    text.split_inclusive('\n')
        .take(line - 1)
        .map(str::len)
        .sum::<usize>()
        + (col - 1)
}

/// Provider backed by precomputed sidecar files.
#[derive(Debug, Clone)]
pub struct SidecarProvider {
    dir: PathBuf,
}

impl SidecarProvider {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }
}

impl MaskProvider for SidecarProvider {
    fn detect(&self, _frame: &Frame, frame_id: &str) -> Result<Vec<InstanceMask>, DetectorError> {
        load_sidecar(&self.dir, frame_id).map_err(DetectorError::ProviderOutput)
    }
}
