//! Replicated benchmark runs over a grid of densities, steps and modes.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::generate::{generate_sequence, SynthConfig, VariationMode};
use super::scoring::{match_objects, score_trajectories};
use crate::detection::Point;
use crate::error::{Error, Result};
use crate::pipeline::{track_frames, TrackingParams};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    pub densities: Vec<f64>,
    pub step_multiples: Vec<f64>,
    pub modes: Vec<VariationMode>,
    pub replicates: usize,
    pub n_frames: usize,
    pub mean_diameter: f64,
    pub property_std_fraction: f64,
    /// Matching tolerance in pixels.
    pub match_tolerance: f64,
    /// Replicate `k` of every cell uses seed `seed + k`.
    pub seed: u64,
}

impl SweepGrid {
    pub fn validate(&self) -> Result<()> {
        if self.replicates == 0 {
            return Err(Error::Config("replicates must be at least 1".into()));
        }
        if self.densities.is_empty() || self.step_multiples.is_empty() || self.modes.is_empty() {
            return Err(Error::Config(
                "densities, step_multiples and modes must each list at least one value".into(),
            ));
        }
        if !(self.match_tolerance > 0.0) {
            return Err(Error::Config(format!(
                "match_tolerance must be > 0, got {}",
                self.match_tolerance
            )));
        }
        Ok(())
    }

    /// Cells in report order: density, then step multiple, then mode.
    pub fn cells(&self) -> Vec<(f64, f64, VariationMode)> {
        let mut cells = Vec::new();
        for &d in &self.densities {
            for &s in &self.step_multiples {
                for &m in &self.modes {
                    cells.push((d, s, m));
                }
            }
        }
        cells
    }

    pub fn config(
        &self,
        density: f64,
        step_multiple: f64,
        mode: VariationMode,
        replicate: usize,
    ) -> Result<SynthConfig> {
        let mut cfg = SynthConfig::for_density(
            density,
            self.mean_diameter,
            step_multiple,
            mode,
            self.seed.wrapping_add(replicate as u64),
        )?;
        cfg.n_frames = self.n_frames;
        cfg.property_std_fraction = self.property_std_fraction;
        Ok(cfg)
    }
}

/// Scores of one generated and tracked sequence.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ReplicateScores {
    pub object_recognition_ratio: f64,
    pub false_positive_ratio: f64,
    pub trajectory_recognition_ratio: f64,
    pub fragmentation_score: f64,
}

/// Generates, tracks and scores one sequence.
pub fn evaluate(
    cfg: &SynthConfig,
    params: &TrackingParams,
    tolerance: f64,
) -> Result<ReplicateScores> {
    let (frames, truth) = generate_sequence(cfg)?;
    let result = track_frames(&frames, params)?;
    let detected: Vec<Vec<Point>> = result
        .objects
        .iter()
        .map(|f| f.iter().map(|o| o.center).collect())
        .collect();
    let matches = match_objects(&detected, &truth, tolerance);
    let found: Vec<_> = result.link.tracks.iter().map(|t| t.refs.clone()).collect();
    let traj = score_trajectories(&found, &matches, &truth, params.weights.min_track_length);
    Ok(ReplicateScores {
        object_recognition_ratio: matches.object_recognition_ratio(),
        false_positive_ratio: matches.false_positive_ratio(),
        trajectory_recognition_ratio: traj.trajectory_recognition_ratio,
        fragmentation_score: traj.fragmentation_score,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReplicateRow {
    pub density: f64,
    pub step_multiple: f64,
    pub mode: VariationMode,
    pub replicate: usize,
    pub seed: u64,
    pub scores: ReplicateScores,
}

/// Mean and spread of one grid cell. Standard deviations are sample
/// standard deviations, zero for a single replicate.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CellSummary {
    pub density: f64,
    pub step_multiple: f64,
    pub mode: VariationMode,
    pub replicate_count: usize,
    pub obj_ratio_mean: f64,
    pub obj_ratio_std: f64,
    pub fp_ratio_mean: f64,
    pub traj_ratio_mean: f64,
    pub traj_ratio_std: f64,
    pub fragmentation_mean: f64,
}

pub fn summarize(
    density: f64,
    step_multiple: f64,
    mode: VariationMode,
    rows: &[ReplicateScores],
) -> CellSummary {
    let obj: Vec<f64> = rows.iter().map(|r| r.object_recognition_ratio).collect();
    let fp: Vec<f64> = rows.iter().map(|r| r.false_positive_ratio).collect();
    let traj: Vec<f64> = rows
        .iter()
        .map(|r| r.trajectory_recognition_ratio)
        .collect();
    let frag: Vec<f64> = rows.iter().map(|r| r.fragmentation_score).collect();
    CellSummary {
        density,
        step_multiple,
        mode,
        replicate_count: rows.len(),
        obj_ratio_mean: mean(&obj),
        obj_ratio_std: sample_std(&obj),
        fp_ratio_mean: mean(&fp),
        traj_ratio_mean: mean(&traj),
        traj_ratio_std: sample_std(&traj),
        fragmentation_mean: mean(&frag),
    }
}

pub(crate) fn mean(v: &[f64]) -> f64 {
    if v.is_empty() {
        0.0
    } else {
        v.iter().sum::<f64>() / v.len() as f64
    }
}

pub(crate) fn sample_std(v: &[f64]) -> f64 {
    if v.len() < 2 {
        return 0.0;
    }
    let m = mean(v);
    (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() - 1) as f64).sqrt()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepReport {
    pub rows: Vec<ReplicateRow>,
    pub cells: Vec<CellSummary>,
}

/// Runs every cell and replicate in parallel. Results do not depend on
/// scheduling.
pub fn run_sweep(grid: &SweepGrid, params: &TrackingParams) -> Result<SweepReport> {
    grid.validate()?;
    params.validate()?;
    let jobs: Vec<(f64, f64, VariationMode, usize)> = grid
        .cells()
        .into_iter()
        .flat_map(|(d, s, m)| (0..grid.replicates).map(move |k| (d, s, m, k)))
        .collect();
    let rows: Vec<ReplicateRow> = jobs
        .par_iter()
        .map(|&(density, step_multiple, mode, replicate)| {
            let cfg = grid.config(density, step_multiple, mode, replicate)?;
            let scores = evaluate(&cfg, params, grid.match_tolerance)?;
            Ok(ReplicateRow {
                density,
                step_multiple,
                mode,
                replicate,
                seed: cfg.seed,
                scores,
            })
        })
        .collect::<Result<_>>()?;
    let cells = rows
        .chunks(grid.replicates)
        .map(|chunk| {
            let scores: Vec<ReplicateScores> = chunk.iter().map(|r| r.scores).collect();
            summarize(
                chunk[0].density,
                chunk[0].step_multiple,
                chunk[0].mode,
                &scores,
            )
        })
        .collect();
    Ok(SweepReport { rows, cells })
}
