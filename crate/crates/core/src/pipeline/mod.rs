//! Per-frame and per-sequence orchestration: the method preset registry,
//! latency accounting, and model-free proxy metrics of anonymization
//! strength.

mod metrics;
mod presets;
mod report;
mod run;

pub use metrics::{proxy_metrics, ProxyMetrics, PROXY_METRICS_NOTE};
pub use presets::{resolve_preset, AdaptiveOverrides, AnonymizerSpec, PRESET_NAMES};
pub use report::{write_per_frame_csv, FrameReport, StageStats, SummaryReport};
pub use run::{
    process_frame, process_sequence, DetectorStage, FailurePolicy, FrameSink, SequenceOptions,
};
