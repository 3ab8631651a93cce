//! Basin-of-attraction sampling, statistics, images and exports.

pub mod export;
pub mod rate;
pub mod render;
pub mod sample;
pub mod stats;

pub use export::{direction_field, field_csv, trajectory_comparison, FieldFlag, FieldKind, FieldSample, TrajectoryComparison};
pub use rate::{estimate_rate, RateError, ERROR_FLOOR};
pub use render::{render_basin, Palette, RenderOptions, RgbImage};
pub use sample::{sample_basin, sample_basins, sample_labels, BasinGrid, CellRecord, SamplingPlan};
pub use stats::{aggregate, format_table, PerformanceTable, STATS_CSV_HEADER};
