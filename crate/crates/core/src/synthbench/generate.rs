//! Synthetic sequences of bright discs moving in straight lines.
//!
//! Tracks start uniformly in a region that extends upstream of the frame by
//! the distance covered during the sequence, so the number of objects in
//! view stays roughly constant from first to last frame. Tracks that leave
//! the frame are not replaced. Placement is by rejection: a candidate track
//! is redrawn until it keeps clear of every accepted track in every frame.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::detection::Point;
use crate::error::{Error, Result};
use crate::imaging::GrayFrame;

/// Redraws allowed per track before generation gives up.
pub const MAX_PLACEMENT_ATTEMPTS: usize = 2000;

/// Supersampling factor per axis for anti-aliased rendering.
pub const SUPERSAMPLING: usize = 2;

/// Distance in pixels a disc edge must keep from the frame edge to count as
/// a ground-truth object.
pub const VISIBILITY_MARGIN: f64 = 2.0;

/// Direction spread, as a fraction of 90 degrees, in the varying modes.
const DIRECTION_SCALE_DEG: f64 = 90.0;

/// Smallest allowed draw, as a fraction of the mean, for diameters and speeds.
const MIN_DRAW_FRACTION: f64 = 0.1;

pub const MIN_DENSITY: f64 = 0.001;
pub const MAX_DENSITY: f64 = 0.10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VariationMode {
    /// All tracks share diameter, speed and direction.
    Identical,
    /// Each track draws its own diameter, speed and direction once.
    BetweenTracks,
    /// Every object draws diameter, speed and direction anew each frame.
    WithinTrack,
}

impl VariationMode {
    pub const ALL: [VariationMode; 3] = [
        VariationMode::Identical,
        VariationMode::BetweenTracks,
        VariationMode::WithinTrack,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            VariationMode::Identical => "identical",
            VariationMode::BetweenTracks => "between_tracks",
            VariationMode::WithinTrack => "within_track",
        }
    }
}

impl fmt::Display for VariationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for VariationMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        VariationMode::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| {
                Error::Config(format!(
                    "unknown variation mode '{s}' (expected identical, between_tracks or within_track)"
                ))
            })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    /// Side length of the square frame in pixels.
    pub frame_size: usize,
    /// Mean number of objects in view per frame.
    pub n_objects: usize,
    pub n_frames: usize,
    pub mean_diameter: f64,
    /// Mean step per frame in units of the mean diameter.
    pub step_multiple: f64,
    pub mode: VariationMode,
    pub property_std_fraction: f64,
    pub seed: u64,
}

impl SynthConfig {
    /// Frame geometry for a target object density: between 16 and 80
    /// objects, with the frame side chosen so that the covered fraction
    /// matches `density` as closely as whole pixels and objects allow.
    pub fn for_density(
        density: f64,
        mean_diameter: f64,
        step_multiple: f64,
        mode: VariationMode,
        seed: u64,
    ) -> Result<Self> {
        if !(MIN_DENSITY..=MAX_DENSITY).contains(&density) {
            return Err(Error::Config(format!(
                "density {density} outside [{MIN_DENSITY}, {MAX_DENSITY}]"
            )));
        }
        if !(mean_diameter > 0.0) {
            return Err(Error::Config(format!(
                "mean_diameter must be > 0, got {mean_diameter}"
            )));
        }
        let area = disc_area(mean_diameter);
        let n_target = (density * 400.0 * 400.0 / area).round().clamp(16.0, 80.0);
        let frame_size = (n_target * area / density).sqrt().round().max(1.0) as usize;
        let side2 = (frame_size * frame_size) as f64;
        let mut n_objects = (density * side2 / area).round().max(1.0) as usize;
        while n_objects > 1 && n_objects as f64 * area / side2 > MAX_DENSITY {
            n_objects -= 1;
        }
        while (n_objects as f64) * area / side2 < MIN_DENSITY {
            n_objects += 1;
        }
        Ok(Self {
            frame_size,
            n_objects,
            n_frames: 20,
            mean_diameter,
            step_multiple,
            mode,
            property_std_fraction: 0.2,
            seed,
        })
    }

    /// Covered fraction of the frame for `n_objects` mean-size discs.
    pub fn density(&self) -> f64 {
        self.n_objects as f64 * disc_area(self.mean_diameter)
            / (self.frame_size * self.frame_size) as f64
    }

    pub fn mean_step(&self) -> f64 {
        self.step_multiple * self.mean_diameter
    }

    pub fn validate(&self) -> Result<()> {
        if self.frame_size == 0 || self.n_frames == 0 || self.n_objects == 0 {
            return Err(Error::Config(
                "frame_size, n_frames and n_objects must be positive".into(),
            ));
        }
        if !(self.mean_diameter > 0.0) || !(self.step_multiple >= 0.0) {
            return Err(Error::Config(format!(
                "mean_diameter must be > 0 and step_multiple >= 0, got {} and {}",
                self.mean_diameter, self.step_multiple
            )));
        }
        if !(0.0..1.0).contains(&self.property_std_fraction) {
            return Err(Error::Config(format!(
                "property_std_fraction must be in [0, 1), got {}",
                self.property_std_fraction
            )));
        }
        let density = self.density();
        if !(MIN_DENSITY..=MAX_DENSITY).contains(&density) {
            return Err(Error::Config(format!(
                "density {density:.5} outside [{MIN_DENSITY}, {MAX_DENSITY}]"
            )));
        }
        Ok(())
    }
}

fn disc_area(diameter: f64) -> f64 {
    std::f64::consts::PI * (diameter / 2.0).powi(2)
}

/// One planted object in one frame.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrueObject {
    pub track_id: usize,
    pub center: Point,
    pub radius: f64,
    /// Far enough from the border to be expected in the detections.
    pub visible: bool,
}

/// Planted mean properties of one track.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrackProperties {
    pub track_id: usize,
    /// Pixels per frame.
    pub speed: f64,
    pub direction_deg: f64,
    pub diameter: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GroundTruth {
    /// Objects that overlap each frame, in track order.
    pub frames: Vec<Vec<TrueObject>>,
    pub tracks: Vec<TrackProperties>,
}

impl GroundTruth {
    /// Number of visible objects across all frames.
    pub fn visible_count(&self) -> usize {
        self.frames.iter().flatten().filter(|o| o.visible).count()
    }

    /// Visible object count per track id.
    pub fn visible_lengths(&self) -> Vec<usize> {
        let mut lengths = vec![0; self.tracks.len()];
        for o in self.frames.iter().flatten().filter(|o| o.visible) {
            lengths[o.track_id] += 1;
        }
        lengths
    }
}

/// Per-frame positions and radii of one candidate track.
struct PlannedTrack {
    props: TrackProperties,
    centers: Vec<Point>,
    radii: Vec<f64>,
    // Bounding box of all discs over the sequence.
    x_min: f64,
    x_max: f64,
    y_min: f64,
    y_max: f64,
}

impl PlannedTrack {
    fn new(props: TrackProperties, centers: Vec<Point>, radii: Vec<f64>) -> Self {
        let mut t = Self {
            props,
            x_min: f64::INFINITY,
            x_max: f64::NEG_INFINITY,
            y_min: f64::INFINITY,
            y_max: f64::NEG_INFINITY,
            centers,
            radii,
        };
        for (c, r) in t.centers.iter().zip(&t.radii) {
            t.x_min = t.x_min.min(c.x - r);
            t.x_max = t.x_max.max(c.x + r);
            t.y_min = t.y_min.min(c.y - r);
            t.y_max = t.y_max.max(c.y + r);
        }
        t
    }

    fn overlaps(&self, other: &PlannedTrack) -> bool {
        if self.x_max < other.x_min
            || other.x_max < self.x_min
            || self.y_max < other.y_min
            || other.y_max < self.y_min
        {
            return false;
        }
        self.centers
            .iter()
            .zip(&self.radii)
            .zip(other.centers.iter().zip(&other.radii))
            .any(|((a, ra), (b, rb))| a.distance(b) < ra + rb)
    }
}

struct Sampler {
    rng: ChaCha8Rng,
    std_fraction: f64,
}

impl Sampler {
    /// Normal draw around `mean` with the configured relative spread, kept
    /// above a small positive floor.
    fn positive(&mut self, mean: f64) -> f64 {
        let sd = self.std_fraction * mean;
        if sd == 0.0 {
            return mean;
        }
        let v = Normal::new(mean, sd)
            .expect("finite spread")
            .sample(&mut self.rng);
        v.max(MIN_DRAW_FRACTION * mean)
    }

    fn direction(&mut self) -> f64 {
        let sd = self.std_fraction * DIRECTION_SCALE_DEG;
        if sd == 0.0 {
            return 0.0;
        }
        Normal::new(0.0, sd)
            .expect("finite spread")
            .sample(&mut self.rng)
    }
}

/// Renders the configured sequence and returns it with its ground truth.
pub fn generate_sequence(cfg: &SynthConfig) -> Result<(Vec<GrayFrame>, GroundTruth)> {
    cfg.validate()?;
    let mut sampler = Sampler {
        rng: ChaCha8Rng::seed_from_u64(cfg.seed),
        std_fraction: cfg.property_std_fraction,
    };
    let side = cfg.frame_size as f64;
    let d = cfg.mean_diameter;
    let step = cfg.mean_step();
    let travel = (cfg.n_frames - 1) as f64 * step;
    let varying = cfg.mode != VariationMode::Identical;
    let y_margin = d + if varying { 0.5 * travel } else { 0.0 };
    let (x0, x1) = (-travel - d, side + d);
    let (y0, y1) = (-y_margin, side + y_margin);
    let spawn_ratio = (x1 - x0) * (y1 - y0) / (side * side);
    let n_tracks = (cfg.n_objects as f64 * spawn_ratio).round().max(1.0) as usize;

    let mut accepted: Vec<PlannedTrack> = Vec::with_capacity(n_tracks);
    for track_id in 0..n_tracks {
        let mut placed = None;
        for _ in 0..MAX_PLACEMENT_ATTEMPTS {
            let candidate = plan_track(&mut sampler, cfg, track_id, (x0, x1), (y0, y1));
            if !accepted.iter().any(|t| t.overlaps(&candidate)) {
                placed = Some(candidate);
                break;
            }
        }
        match placed {
            Some(t) => accepted.push(t),
            None => {
                return Err(Error::Placement {
                    attempts: MAX_PLACEMENT_ATTEMPTS,
                    achieved: cfg.density() * track_id as f64 / n_tracks as f64,
                    requested: cfg.density(),
                })
            }
        }
    }

    let mut frames = Vec::with_capacity(cfg.n_frames);
    let mut truth_frames = Vec::with_capacity(cfg.n_frames);
    for m in 0..cfg.n_frames {
        let mut frame = GrayFrame::zeros(cfg.frame_size, cfg.frame_size);
        let mut objects = Vec::new();
        for t in &accepted {
            let (c, r) = (t.centers[m], t.radii[m]);
            if c.x + r < -0.5 || c.x - r > side - 0.5 || c.y + r < -0.5 || c.y - r > side - 0.5 {
                continue;
            }
            render_disc(&mut frame, c, r);
            let lo = r + VISIBILITY_MARGIN;
            let hi = side - 1.0 - r - VISIBILITY_MARGIN;
            objects.push(TrueObject {
                track_id: t.props.track_id,
                center: c,
                radius: r,
                visible: c.x >= lo && c.x <= hi && c.y >= lo && c.y <= hi,
            });
        }
        frames.push(frame);
        truth_frames.push(objects);
    }
    let tracks = accepted.into_iter().map(|t| t.props).collect();
    Ok((
        frames,
        GroundTruth {
            frames: truth_frames,
            tracks,
        },
    ))
}

fn plan_track(
    sampler: &mut Sampler,
    cfg: &SynthConfig,
    track_id: usize,
    (x0, x1): (f64, f64),
    (y0, y1): (f64, f64),
) -> PlannedTrack {
    let d = cfg.mean_diameter;
    let step = cfg.mean_step();
    let start = Point::new(
        sampler.rng.random_range(x0..x1),
        sampler.rng.random_range(y0..y1),
    );
    let props = match cfg.mode {
        VariationMode::Identical | VariationMode::WithinTrack => TrackProperties {
            track_id,
            speed: step,
            direction_deg: 0.0,
            diameter: d,
        },
        VariationMode::BetweenTracks => TrackProperties {
            track_id,
            speed: sampler.positive(step),
            direction_deg: sampler.direction(),
            diameter: sampler.positive(d),
        },
    };
    let mut centers = Vec::with_capacity(cfg.n_frames);
    let mut radii = Vec::with_capacity(cfg.n_frames);
    let mut pos = start;
    for m in 0..cfg.n_frames {
        let within = cfg.mode == VariationMode::WithinTrack;
        let diameter = if within {
            sampler.positive(d)
        } else {
            props.diameter
        };
        centers.push(pos);
        radii.push(diameter / 2.0);
        if m + 1 < cfg.n_frames {
            let (speed, dir) = if within {
                (sampler.positive(step), sampler.direction())
            } else {
                (props.speed, props.direction_deg)
            };
            let a = dir.to_radians();
            pos = Point::new(pos.x + speed * a.cos(), pos.y + speed * a.sin());
        }
    }
    PlannedTrack::new(props, centers, radii)
}

/// Adds an anti-aliased disc of unit intensity, combining with existing
/// content by maximum.
fn render_disc(frame: &mut GrayFrame, c: Point, r: f64) {
    let (w, h) = (frame.width() as isize, frame.height() as isize);
    let xa = ((c.x - r - 1.0).floor() as isize).max(0);
    let xb = ((c.x + r + 1.0).ceil() as isize).min(w - 1);
    let ya = ((c.y - r - 1.0).floor() as isize).max(0);
    let yb = ((c.y + r + 1.0).ceil() as isize).min(h - 1);
    let n = SUPERSAMPLING;
    let weight = 1.0 / (n * n) as f64;
    let r2 = r * r;
    for y in ya..=yb {
        for x in xa..=xb {
            let mut cover = 0.0;
            for sy in 0..n {
                let py = y as f64 + (sy as f64 + 0.5) / n as f64 - 0.5;
                for sx in 0..n {
                    let px = x as f64 + (sx as f64 + 0.5) / n as f64 - 0.5;
                    if (px - c.x).powi(2) + (py - c.y).powi(2) <= r2 {
                        cover += weight;
                    }
                }
            }
            if cover > 0.0 {
                let (ux, uy) = (x as usize, y as usize);
                if cover > frame.get(ux, uy) {
                    frame.set(ux, uy, cover);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn density_geometry() {
        let c = SynthConfig::for_density(0.001, 5.0, 1.0, VariationMode::Identical, 1).unwrap();
        assert_eq!(c.n_objects, 16);
        assert!((c.density() - 0.001).abs() / 0.001 < 0.01);
        let c = SynthConfig::for_density(0.10, 5.0, 1.0, VariationMode::Identical, 1).unwrap();
        assert!(c.density() <= MAX_DENSITY);
        assert!((c.density() - 0.1).abs() / 0.1 < 0.01);
        assert!(SynthConfig::for_density(0.2, 5.0, 1.0, VariationMode::Identical, 1).is_err());
    }

    #[test]
    fn mode_names_round_trip() {
        for m in VariationMode::ALL {
            assert_eq!(m.as_str().parse::<VariationMode>().unwrap(), m);
        }
        assert!("sometimes".parse::<VariationMode>().is_err());
    }

    #[test]
    fn rendered_disc_has_expected_mass() {
        let mut f = GrayFrame::zeros(40, 40);
        render_disc(&mut f, Point::new(20.3, 19.6), 6.0);
        let mass: f64 = f.data().iter().sum();
        assert!((mass - std::f64::consts::PI * 36.0).abs() < 2.0);
        assert!(f.data().iter().all(|&v| (0.0..=1.0).contains(&v)));
    }

    #[test]
    fn identical_mode_plants_exact_diameters() {
        let c = SynthConfig::for_density(0.01, 5.0, 1.0, VariationMode::Identical, 3).unwrap();
        let (_, truth) = generate_sequence(&c).unwrap();
        assert!(truth
            .tracks
            .iter()
            .all(|t| t.diameter == 5.0 && t.speed == 5.0));
        assert!(truth.frames.iter().flatten().all(|o| o.radius == 2.5));
    }
}
