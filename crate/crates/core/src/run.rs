//! Track and bench workflows with their on-disk artifacts.

use std::path::PathBuf;

use serde::Serialize;

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::imaging::{load_frame, resolve_inputs};
use crate::output::{
    edges_csv, json_bytes, objects_csv, report_csv, trajectories_csv, truth_csv, write_atomic,
};
use crate::pipeline::{track_frames, TrackingResult};
use crate::synthbench::{generate_sequence, run_sweep, CellSummary, SweepReport, VariationMode};
use crate::trajectory::{estimate_mobility, kinematics, Trajectory};

/// Per-trajectory entry of `summary.json`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrackSummary {
    pub track_id: usize,
    pub first_frame: usize,
    pub length: usize,
    pub n_segments: usize,
    pub mean_velocity: f64,
    pub std_velocity: f64,
    pub mean_diameter: f64,
    pub std_diameter: f64,
    pub mu: f64,
    pub sigma_mu: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct TrackReport {
    pub config: RunConfig,
    pub n_frames: usize,
    pub n_objects: usize,
    pub dominant_angle_deg: Option<f64>,
    pub trajectories: Vec<TrackSummary>,
}

pub fn summarize_track(id: usize, t: &Trajectory, cfg: &RunConfig) -> Result<TrackSummary> {
    let tr = &cfg.trajectory;
    let k = kinematics(t, tr.frame_rate, tr.scale)?;
    let m = estimate_mobility(t, tr.c_constant, tr.pixel_sigma)?;
    Ok(TrackSummary {
        track_id: id,
        first_frame: t.first_frame(),
        length: t.len(),
        n_segments: m.n_segments,
        mean_velocity: k.mean_velocity,
        std_velocity: k.std_velocity,
        mean_diameter: k.mean_diameter,
        std_diameter: k.std_diameter,
        mu: m.mu,
        sigma_mu: m.sigma_mu,
    })
}

pub fn track_report(cfg: &RunConfig, result: &TrackingResult) -> Result<TrackReport> {
    let trajectories = result
        .link
        .tracks
        .iter()
        .enumerate()
        .map(|(id, t)| summarize_track(id, &t.trajectory, cfg))
        .collect::<Result<_>>()?;
    Ok(TrackReport {
        config: cfg.clone(),
        n_frames: result.objects.len(),
        n_objects: result.objects.iter().map(Vec::len).sum(),
        dominant_angle_deg: result.link.dominant_angle.as_ref().map(|d| d.phi_deg),
        trajectories,
    })
}

#[derive(Clone, Debug)]
pub struct TrackOutcome {
    pub n_trajectories: usize,
    pub written: Vec<PathBuf>,
}

/// Tracks the configured input frames and writes `objects.csv`,
/// `trajectories.csv`, `summary.json` and, if enabled, `edges.csv`.
pub fn run_track(cfg: &RunConfig) -> Result<TrackOutcome> {
    let input = cfg
        .run
        .input
        .as_deref()
        .ok_or_else(|| Error::Config("input is required in track mode".into()))?;
    let paths = resolve_inputs(input)?;
    let frames = paths.iter().map(load_frame).collect::<Result<Vec<_>>>()?;
    let result = track_frames(&frames, &cfg.tracking_params())?;
    let report = track_report(cfg, &result)?;
    let dir = &cfg.run.output_dir;
    let mut written = Vec::new();
    let mut emit = |name: &str, bytes: Vec<u8>| -> Result<()> {
        let p = dir.join(name);
        write_atomic(&p, &bytes)?;
        written.push(p);
        Ok(())
    };
    emit("objects.csv", objects_csv(&result.objects)?)?;
    emit(
        "trajectories.csv",
        trajectories_csv(result.link.tracks.iter().map(|t| &t.trajectory))?,
    )?;
    emit("summary.json", json_bytes(&report)?)?;
    if cfg.run.dump_edges {
        emit("edges.csv", edges_csv(&result.link.edges)?)?;
    }
    Ok(TrackOutcome {
        n_trajectories: report.trajectories.len(),
        written,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckItem {
    pub cell: String,
    pub metric: String,
    pub value: f64,
    pub threshold: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckReport {
    pub passed: bool,
    pub checks: Vec<CheckItem>,
}

impl CheckReport {
    pub fn failures(&self) -> impl Iterator<Item = &CheckItem> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

/// Highest density at which the recognition thresholds apply.
pub const CHECK_MAX_DENSITY: f64 = 0.01;

pub fn cell_name(c: &CellSummary) -> String {
    format!(
        "density={} step_multiple={} mode={}",
        c.density, c.step_multiple, c.mode
    )
}

/// Identical-object cells at low density must reach `min_object_ratio`;
/// those with steps up to one diameter must also reach
/// `min_trajectory_ratio`.
pub fn check_cells(cells: &[CellSummary], cfg: &RunConfig) -> CheckReport {
    let mut checks = Vec::new();
    for c in cells {
        if c.mode != VariationMode::Identical || c.density > CHECK_MAX_DENSITY + 1e-12 {
            continue;
        }
        let mut push = |metric: &str, value: f64, threshold: f64| {
            checks.push(CheckItem {
                cell: cell_name(c),
                metric: metric.to_string(),
                value,
                threshold,
                passed: value >= threshold,
            })
        };
        push(
            "obj_ratio_mean",
            c.obj_ratio_mean,
            cfg.bench.min_object_ratio,
        );
        if c.step_multiple <= 1.0 + 1e-12 {
            push(
                "traj_ratio_mean",
                c.traj_ratio_mean,
                cfg.bench.min_trajectory_ratio,
            );
        }
    }
    CheckReport {
        passed: checks.iter().all(|c| c.passed),
        checks,
    }
}

#[derive(Clone, Debug)]
pub struct BenchOutcome {
    pub report: SweepReport,
    pub check: Option<CheckReport>,
    pub written: Vec<PathBuf>,
}

/// Runs the configured sweep and writes `report.csv`, plus `check.json`
/// when `check` is set and one ground-truth file per cell when
/// `dump_truth` is enabled.
pub fn run_bench(cfg: &RunConfig, check: bool) -> Result<BenchOutcome> {
    let grid = cfg.sweep_grid();
    let report = run_sweep(&grid, &cfg.tracking_params())?;
    let dir = &cfg.run.output_dir;
    let mut written = Vec::new();
    let p = dir.join("report.csv");
    write_atomic(&p, &report_csv(&report.cells)?)?;
    written.push(p);
    let check = check.then(|| check_cells(&report.cells, cfg));
    if let Some(c) = &check {
        let p = dir.join("check.json");
        write_atomic(&p, &json_bytes(c)?)?;
        written.push(p);
    }
    if cfg.run.dump_truth {
        for (d, s, m) in grid.cells() {
            let (_, truth) = generate_sequence(&grid.config(d, s, m, 0)?)?;
            let p = dir.join(format!("truth_density{d}_step{s}_{m}.csv"));
            write_atomic(&p, &truth_csv(&truth)?)?;
            written.push(p);
        }
    }
    Ok(BenchOutcome {
        report,
        check,
        written,
    })
}
