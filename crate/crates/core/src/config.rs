//! Run configuration: TOML file, per-key overrides and derived defaults.
//!
//! Keys are grouped in the sections `[run]`, `[imaging]`, `[detection]`,
//! `[linking]`, `[trajectory]` and `[bench]`. Overrides given as
//! `key = value` strings replace file values. Values that depend on the
//! object size `W` (`R_min`, `R_max`, `max_distance`, `min_diameter`) are
//! filled in by [`RunConfig::resolve`] unless set explicitly.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::detection::{DetectionParams, Shape, ShapeFilterParams};
use crate::error::{Error, Result};
use crate::imaging::BandpassParams;
use crate::linking::{AngleEdges, GraphWeights};
use crate::pipeline::{LinkOptions, PathClaim, TrackingParams};
use crate::synthbench::{SweepGrid, VariationMode};
use crate::trajectory::PlausibilityLimits;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Track,
    Bench,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Track => "track",
            Mode::Bench => "bench",
        })
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "track" => Ok(Mode::Track),
            "bench" => Ok(Mode::Bench),
            _ => Err(Error::Config(format!(
                "unknown mode '{s}' (expected track or bench)"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunSection {
    pub mode: Mode,
    /// Directory, glob pattern or comma-separated file list.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<String>,
    pub output_dir: PathBuf,
    pub seed: u64,
    /// Track mode: also write `edges.csv`.
    pub dump_edges: bool,
    /// Bench mode: also write the ground truth of each cell's first replicate.
    pub dump_truth: bool,
}

impl Default for RunSection {
    fn default() -> Self {
        Self {
            mode: Mode::Track,
            input: None,
            output_dir: PathBuf::from("out"),
            seed: 1,
            dump_edges: false,
            dump_truth: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ImagingSection {
    #[serde(rename = "object_size_W", skip_serializing_if = "Option::is_none")]
    pub object_size_w: Option<usize>,
    #[serde(rename = "noise_level_N")]
    pub noise_level_n: f64,
    pub threshold: f64,
    pub invert: bool,
}

impl Default for ImagingSection {
    fn default() -> Self {
        Self {
            object_size_w: None,
            noise_level_n: 1.0,
            threshold: 0.1,
            invert: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DetectionSection {
    pub shape: Shape,
    #[serde(rename = "R_min", skip_serializing_if = "Option::is_none")]
    pub r_min: Option<f64>,
    #[serde(rename = "R_max", skip_serializing_if = "Option::is_none")]
    pub r_max: Option<f64>,
    #[serde(rename = "delta_A", skip_serializing_if = "Option::is_none")]
    pub delta_a: Option<f64>,
    #[serde(rename = "delta_C")]
    pub delta_c: f64,
    #[serde(rename = "delta_I")]
    pub delta_i: f64,
}

impl Default for DetectionSection {
    fn default() -> Self {
        Self {
            shape: Shape::Circle,
            r_min: None,
            r_max: None,
            delta_a: None,
            delta_c: 5.0,
            delta_i: 0.5,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LinkingSection {
    #[serde(rename = "G_s")]
    pub g_s: f64,
    #[serde(rename = "G_r")]
    pub g_r: f64,
    #[serde(rename = "G_phi")]
    pub g_phi: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_distance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_diameter: Option<f64>,
    pub min_track_length: usize,
    pub angle_edges: AngleEdges,
    pub path_claim: PathClaim,
}

impl Default for LinkingSection {
    fn default() -> Self {
        Self {
            g_s: 1.0,
            g_r: 1.0,
            g_phi: 2.0,
            max_distance: None,
            min_diameter: None,
            min_track_length: 5,
            angle_edges: AngleEdges::default(),
            path_claim: PathClaim::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrajectorySection {
    pub max_angle: f64,
    pub max_angle_std: f64,
    pub max_radius_std: f64,
    pub max_distance_std: f64,
    /// Frames per second.
    pub frame_rate: f64,
    /// Length units per pixel.
    pub scale: f64,
    #[serde(rename = "C_constant")]
    pub c_constant: f64,
    /// Position and radius uncertainty in pixels.
    pub pixel_sigma: f64,
}

impl Default for TrajectorySection {
    fn default() -> Self {
        let limits = PlausibilityLimits::default();
        Self {
            max_angle: limits.max_angle_dev,
            max_angle_std: limits.max_angle_std,
            max_radius_std: limits.max_radius_std,
            max_distance_std: limits.max_distance_std,
            frame_rate: 1.0,
            scale: 1.0,
            c_constant: 1.0,
            pixel_sigma: 1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchSection {
    pub densities: Vec<f64>,
    pub step_multiples: Vec<f64>,
    pub modes: Vec<VariationMode>,
    pub replicates: usize,
    pub n_frames: usize,
    pub mean_diameter: f64,
    pub property_std_fraction: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub match_tolerance: Option<f64>,
    /// `--check`: least mean object ratio for identical objects at <= 1 %.
    pub min_object_ratio: f64,
    /// `--check`: least mean trajectory ratio for identical objects at
    /// <= 1 % and steps of at most one diameter.
    pub min_trajectory_ratio: f64,
}

impl Default for BenchSection {
    fn default() -> Self {
        Self {
            densities: vec![0.001, 0.01, 0.05, 0.10],
            step_multiples: vec![0.5, 1.0, 2.0],
            modes: VariationMode::ALL.to_vec(),
            replicates: 20,
            n_frames: 20,
            mean_diameter: 5.0,
            property_std_fraction: 0.2,
            match_tolerance: None,
            min_object_ratio: 0.95,
            min_trajectory_ratio: 0.9,
        }
    }
}

/// Circularity tolerance used for the synthetic benchmark unless set.
/// Small rendered discs sit right at the edge of the tighter tracking
/// default, so half of them would fail the gate.
pub const BENCH_DELTA_A: f64 = 0.4;
pub const TRACK_DELTA_A: f64 = 0.3;
pub const DEFAULT_OBJECT_SIZE: usize = 5;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub run: RunSection,
    pub imaging: ImagingSection,
    pub detection: DetectionSection,
    pub linking: LinkingSection,
    pub trajectory: TrajectorySection,
    pub bench: BenchSection,
}

/// Every accepted key and its section.
pub const KEYS: &[(&str, &str)] = &[
    ("run", "mode"),
    ("run", "input"),
    ("run", "output_dir"),
    ("run", "seed"),
    ("run", "dump_edges"),
    ("run", "dump_truth"),
    ("imaging", "object_size_W"),
    ("imaging", "noise_level_N"),
    ("imaging", "threshold"),
    ("imaging", "invert"),
    ("detection", "shape"),
    ("detection", "R_min"),
    ("detection", "R_max"),
    ("detection", "delta_A"),
    ("detection", "delta_C"),
    ("detection", "delta_I"),
    ("linking", "G_s"),
    ("linking", "G_r"),
    ("linking", "G_phi"),
    ("linking", "max_distance"),
    ("linking", "min_diameter"),
    ("linking", "min_track_length"),
    ("linking", "angle_edges"),
    ("linking", "path_claim"),
    ("trajectory", "max_angle"),
    ("trajectory", "max_angle_std"),
    ("trajectory", "max_radius_std"),
    ("trajectory", "max_distance_std"),
    ("trajectory", "frame_rate"),
    ("trajectory", "scale"),
    ("trajectory", "C_constant"),
    ("trajectory", "pixel_sigma"),
    ("bench", "densities"),
    ("bench", "step_multiples"),
    ("bench", "modes"),
    ("bench", "replicates"),
    ("bench", "n_frames"),
    ("bench", "mean_diameter"),
    ("bench", "property_std_fraction"),
    ("bench", "match_tolerance"),
    ("bench", "min_object_ratio"),
    ("bench", "min_trajectory_ratio"),
];

const LIST_KEYS: &[&str] = &["densities", "step_multiples", "modes"];

pub fn section_of(key: &str) -> Option<&'static str> {
    KEYS.iter().find(|(_, k)| *k == key).map(|(s, _)| *s)
}

/// Parses a command-line value: TOML syntax when it parses, a bare string
/// otherwise. List keys also accept a comma-separated list or one scalar.
fn parse_value(key: &str, raw: &str) -> toml::Value {
    let parse = |s: &str| -> toml::Value {
        let s = s.trim();
        format!("v = {s}")
            .parse::<toml::Table>()
            .ok()
            .and_then(|mut t| t.remove("v"))
            .unwrap_or_else(|| toml::Value::String(s.to_string()))
    };
    let value = parse(raw);
    if !LIST_KEYS.contains(&key) {
        return value;
    }
    match value {
        toml::Value::Array(_) => value,
        toml::Value::String(s) => toml::Value::Array(
            s.split(',')
                .filter(|p| !p.trim().is_empty())
                .map(parse)
                .collect(),
        ),
        other => toml::Value::Array(vec![other]),
    }
}

impl RunConfig {
    /// Reads an optional config file and applies `overrides` on top.
    pub fn load(path: Option<&Path>, overrides: &[(String, String)]) -> Result<Self> {
        let mut table = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| Error::io(p, e))?;
                text.parse::<toml::Table>()
                    .map_err(|e| Error::Config(format!("{}: {e}", p.display())))?
            }
            None => toml::Table::new(),
        };
        for (key, raw) in overrides {
            let section =
                section_of(key).ok_or_else(|| Error::Config(format!("unknown key '{key}'")))?;
            let entry = table
                .entry(section)
                .or_insert_with(|| toml::Value::Table(toml::Table::new()));
            let sec = entry
                .as_table_mut()
                .ok_or_else(|| Error::Config(format!("[{section}] must be a table")))?;
            sec.insert(key.clone(), parse_value(key, raw));
        }
        // Deserializing from text makes errors quote the offending line.
        let text = toml::to_string(&table).map_err(|e| Error::Config(e.to_string()))?;
        let cfg: RunConfig = toml::from_str(&text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.resolve()
    }

    pub fn object_size(&self) -> usize {
        self.imaging.object_size_w.unwrap_or(match self.run.mode {
            Mode::Track => DEFAULT_OBJECT_SIZE,
            Mode::Bench => self.bench.mean_diameter.round().max(1.0) as usize,
        })
    }

    /// Fills every derived default and validates the result.
    pub fn resolve(mut self) -> Result<Self> {
        let w = self.object_size() as f64;
        self.imaging.object_size_w = Some(w as usize);
        let min_diameter = *self.linking.min_diameter.get_or_insert(0.5 * w);
        self.linking.max_distance.get_or_insert(10.0 * w);
        self.detection.r_min.get_or_insert(min_diameter / 2.0);
        self.detection.r_max.get_or_insert(w);
        self.detection.delta_a.get_or_insert(match self.run.mode {
            Mode::Track => TRACK_DELTA_A,
            Mode::Bench => BENCH_DELTA_A,
        });
        let tolerance = self.bench.mean_diameter / 2.0;
        self.bench.match_tolerance.get_or_insert(tolerance);
        self.validate()?;
        Ok(self)
    }

    fn validate(&self) -> Result<()> {
        self.tracking_params().validate().map_err(|e| match e {
            Error::InvalidInput(m) => Error::Config(m),
            other => other,
        })?;
        let t = &self.trajectory;
        for (name, v) in [
            ("frame_rate", t.frame_rate),
            ("scale", t.scale),
            ("pixel_sigma", t.pixel_sigma),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} must be > 0, got {v}")));
            }
        }
        if t.c_constant == 0.0 || !t.c_constant.is_finite() {
            return Err(Error::Config(format!(
                "C_constant must be finite and nonzero, got {}",
                t.c_constant
            )));
        }
        if self.run.mode == Mode::Bench {
            self.sweep_grid().validate()?;
        }
        Ok(())
    }

    /// Detection, linking and plausibility parameters. Call after
    /// [`RunConfig::resolve`].
    pub fn tracking_params(&self) -> TrackingParams {
        let w = self.object_size();
        TrackingParams {
            detection: DetectionParams {
                bandpass: BandpassParams {
                    object_size: w,
                    noise_level: self.imaging.noise_level_n,
                    threshold: self.imaging.threshold,
                    invert: self.imaging.invert,
                },
                shape: ShapeFilterParams {
                    shape: self.detection.shape,
                    r_min: self.detection.r_min.unwrap_or(0.25 * w as f64),
                    r_max: self.detection.r_max.unwrap_or(w as f64),
                    delta_a: self.detection.delta_a.unwrap_or(TRACK_DELTA_A),
                    delta_c: self.detection.delta_c,
                    delta_i: self.detection.delta_i,
                },
            },
            weights: GraphWeights {
                g_s: self.linking.g_s,
                g_r: self.linking.g_r,
                g_phi: self.linking.g_phi,
                max_distance: self.linking.max_distance.unwrap_or(10.0 * w as f64),
                min_diameter: self.linking.min_diameter.unwrap_or(0.5 * w as f64),
                min_track_length: self.linking.min_track_length,
            },
            limits: PlausibilityLimits {
                max_angle_dev: self.trajectory.max_angle,
                max_angle_std: self.trajectory.max_angle_std,
                max_radius_std: self.trajectory.max_radius_std,
                max_distance_std: self.trajectory.max_distance_std,
            },
            options: LinkOptions {
                angle_edges: self.linking.angle_edges,
                claim: self.linking.path_claim,
            },
        }
    }

    pub fn sweep_grid(&self) -> SweepGrid {
        let b = &self.bench;
        SweepGrid {
            densities: b.densities.clone(),
            step_multiples: b.step_multiples.clone(),
            modes: b.modes.clone(),
            replicates: b.replicates,
            n_frames: b.n_frames,
            mean_diameter: b.mean_diameter,
            property_std_fraction: b.property_std_fraction,
            match_tolerance: b.match_tolerance.unwrap_or(b.mean_diameter / 2.0),
            seed: self.run.seed,
        }
    }
}
