//! Training and evaluation pipeline, metrics and training-size sweeps.

mod metrics;
mod pipeline;
mod sweep;

pub use self::metrics::{
    confusion, format_percent, format_plain, metrics, round_half_up, ConfusionMatrix, EvalReport,
};
pub use self::pipeline::{run_pipeline, Channel, ChannelInput, Evaluation, PairInputs, TrainedPipeline};
pub use self::sweep::{combination_table, format_table, sweep, sweep_csv, SplitUnit, SweepRow, TableRow};
