//! Synthetic benchmark: planted disc sequences, scoring and parameter sweeps.

mod generate;
mod scoring;
mod sweep;

pub use generate::{
    generate_sequence, GroundTruth, SynthConfig, TrackProperties, TrueObject, VariationMode,
    MAX_DENSITY, MAX_PLACEMENT_ATTEMPTS, MIN_DENSITY, SUPERSAMPLING, VISIBILITY_MARGIN,
};
pub use scoring::{match_frame, match_objects, score_trajectories, ObjectMatch, TrajectoryScore};
pub use sweep::{
    evaluate, run_sweep, summarize, CellSummary, ReplicateRow, ReplicateScores, SweepGrid,
    SweepReport,
};
