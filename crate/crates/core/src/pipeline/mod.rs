//! Dataset ingestion, batch extraction, the two-stage CBID then ISD
//! recognizer, benchmarking and the invariance suite.

mod benchmark;
mod dataset;
mod features;
mod invariance;
mod synthetic;
mod transform;
mod two_stage;

pub use self::benchmark::{
    run_benchmark, run_benchmark_split, BenchTarget, BenchmarkParams, BenchmarkReport,
    ISD_WEIGHT_GRID, LATENCY_RUNS,
};
pub use self::dataset::{
    kfold, load_dataset, load_image, parse_file_name, split, DatasetEntry, DatasetIndex, SplitSpec,
};
pub use self::features::{
    descriptor_meta, extract_index, parse_descriptor_meta, DescriptorMeta, ExtractedSet,
};
pub use self::invariance::{
    invariance_suite, DriftRow, InvarianceParams, InvarianceReport, TRANSFORMS,
};
pub use self::synthetic::{
    render_polygon, shape_vertices, synthetic_shapes, write_synthetic_dataset, Placement,
    POLYGON_SET, SHAPE_NAMES,
};
pub use self::transform::{boundary_noise, pad, rotate, rotate90, scale, translate};
pub use self::two_stage::{
    read_two_stage, train_two_stage, write_two_stage, TwoStageModel, TwoStageOutcome,
};
