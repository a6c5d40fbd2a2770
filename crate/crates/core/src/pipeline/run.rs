//! Frame and sequence processing.

use std::time::Instant;

use crate::adaptive::{anonymize_instances, Method};
use crate::error::{Error, Result};
use crate::pipeline::metrics::proxy_metrics;
use crate::pipeline::presets::AnonymizerSpec;
use crate::pipeline::report::{FrameReport, SummaryReport};
use crate::raster::{Frame, InstanceMask};
use crate::segmentation::{detect, DetectorConfig, MaskProvider};

/// What to do when the detector fails for a frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FailurePolicy {
    /// Stop the run; emitting raw frames silently is a privacy hazard.
    #[default]
    Abort,
    /// Emit the frame unmodified, flagged as quarantined in its report.
    Quarantine,
}

#[derive(Debug, Clone)]
pub struct SequenceOptions {
    pub workers: usize,
    pub failure_policy: FailurePolicy,
    pub compute_metrics: bool,
}

impl Default for SequenceOptions {
    fn default() -> Self {
        Self {
            workers: 1,
            failure_policy: FailurePolicy::Abort,
            compute_metrics: false,
        }
    }
}

/// Receives processed frames, strictly in input order.
pub trait FrameSink {
    fn emit(&mut self, frame_id: &str, frame: &Frame, report: &FrameReport) -> Result<()>;
}

impl<F> FrameSink for F
where
    F: FnMut(&str, &Frame, &FrameReport) -> Result<()>,
{
    fn emit(&mut self, frame_id: &str, frame: &Frame, report: &FrameReport) -> Result<()> {
        self(frame_id, frame, report)
    }
}

/// Anonymizes one frame against pre-obtained instances and reports stage
/// timings. The raw preset returns the input bit-exactly with zero
/// transform time.
pub fn process_frame(
    frame_id: &str,
    frame: &Frame,
    instances: &[InstanceMask],
    spec: &AnonymizerSpec,
    compute_metrics: bool,
) -> Result<(Frame, FrameReport)> {
    let (out, stats) = if matches!(spec.method, Method::Raw) {
        (frame.clone(), Default::default())
    } else {
        anonymize_instances(frame, instances, &spec.method)?
    };
    let metrics = compute_metrics
        .then(|| proxy_metrics(frame, &out, instances))
        .transpose()?;
    let report = FrameReport {
        frame_id: frame_id.to_string(),
        detect_us: 0,
        transform_us: stats.transform_us,
        compose_us: stats.compose_us,
        instance_count: stats.instances_applied,
        r_values: stats.r_values,
        quarantined: false,
        metrics,
    };
    Ok((out, report))
}

/// A detector stage: configuration plus provider.
pub struct DetectorStage<'a> {
    pub config: &'a DetectorConfig,
    pub provider: &'a dyn MaskProvider,
}

/// Processes frames in input order: detect, anonymize, emit. Frames are
/// transformed in parallel over a bounded worker pool; detection is
/// sequential (providers serialize) and emission preserves input order.
pub fn process_sequence<I>(
    frames: I,
    detector: Option<&DetectorStage<'_>>,
    spec: &AnonymizerSpec,
    options: &SequenceOptions,
    sink: &mut dyn FrameSink,
) -> Result<(SummaryReport, Vec<FrameReport>)>
where
    I: IntoIterator<Item = Result<(String, Frame)>>,
{
    let started = Instant::now();
    let workers = options.workers.max(1);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidParameter(format!("worker pool: {e}")))?;

    let mut reports = Vec::new();
    let mut iter = frames.into_iter();
    let batch_size = (workers * 4).max(8);
    loop {
        // pull a batch
        let mut batch = Vec::with_capacity(batch_size);
        for item in iter.by_ref() {
            batch.push(item?);
            if batch.len() == batch_size {
                break;
            }
        }
        if batch.is_empty() {
            break;
        }

        // detect sequentially
        let mut detected: Vec<(String, Frame, Vec<InstanceMask>, bool, u64)> = Vec::new();
        for (frame_id, frame) in batch {
            let (instances, quarantined, detect_us) = match detector {
                Some(stage) => {
                    let t0 = Instant::now();
                    match detect(&frame, &frame_id, stage.config, stage.provider) {
                        Ok(instances) => (instances, false, t0.elapsed().as_micros() as u64),
                        Err(Error::Detector(e)) => match options.failure_policy {
                            FailurePolicy::Abort => return Err(Error::Detector(e)),
                            FailurePolicy::Quarantine => {
                                log::warn!("quarantining frame {frame_id}: {e}");
                                (Vec::new(), true, t0.elapsed().as_micros() as u64)
                            }
                        },
                        Err(e) => return Err(e),
                    }
                }
                None => (Vec::new(), false, 0),
            };
            detected.push((frame_id, frame, instances, quarantined, detect_us));
        }

        // transform in parallel, order preserved by collect
        let processed: Vec<Result<(String, Frame, FrameReport)>> = pool.install(|| {
            use rayon::prelude::*;
            detected
                .par_iter()
                .map(|(frame_id, frame, instances, quarantined, detect_us)| {
                    let (out, mut report) = if *quarantined {
                        process_frame(
                            frame_id,
                            frame,
                            &[],
                            &AnonymizerSpec {
                                preset_name: spec.preset_name.clone(),
                                method: Method::Raw,
                            },
                            false,
                        )?
                    } else {
                        process_frame(frame_id, frame, instances, spec, options.compute_metrics)?
                    };
                    report.quarantined = *quarantined;
                    report.detect_us = *detect_us;
                    Ok((frame_id.clone(), out, report))
                })
                .collect()
        });

        for item in processed {
            let (frame_id, frame, report) = item?;
            sink.emit(&frame_id, &frame, &report)?;
            reports.push(report);
        }
    }

    let summary =
        SummaryReport::from_reports(&spec.preset_name, &reports, started.elapsed().as_secs_f64());
    Ok((summary, reports))
}
