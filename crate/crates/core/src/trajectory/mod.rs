//! Trajectory validation, kinematics and mobility fitting.

mod mobility;
mod plausibility;

use serde::Serialize;

pub use mobility::{
    chi_squared, estimate_mobility, fit_mobility, observations, MobilityEstimate, Observation,
};
pub use plausibility::{
    leading_plausible_len, plausibility_split, plausible_fragments, PlausibilityLimits,
};

use crate::detection::DetectedObject;
use crate::error::{Error, Result};
use crate::linking::direction_deg;

/// Objects in consecutive frames.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    objects: Vec<DetectedObject>,
}

impl Trajectory {
    pub fn new(objects: Vec<DetectedObject>) -> Result<Self> {
        if objects.len() < 2 {
            return Err(Error::InvalidInput(format!(
                "a trajectory needs at least 2 objects, got {}",
                objects.len()
            )));
        }
        if let Some(w) = objects
            .windows(2)
            .find(|w| w[1].frame_index != w[0].frame_index + 1)
        {
            return Err(Error::InvalidInput(format!(
                "trajectory jumps from frame {} to frame {}",
                w[0].frame_index, w[1].frame_index
            )));
        }
        Ok(Self { objects })
    }

    pub fn objects(&self) -> &[DetectedObject] {
        &self.objects
    }

    pub fn len(&self) -> usize {
        self.objects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.objects.is_empty()
    }

    pub fn first_frame(&self) -> usize {
        self.objects[0].frame_index
    }

    /// `s_{t,m}` for every segment.
    pub fn segment_distances(&self) -> Vec<f64> {
        self.objects
            .windows(2)
            .map(|w| w[0].center.distance(&w[1].center))
            .collect()
    }

    /// Direction of motion of every segment, degrees in `[0, 360)`.
    pub fn segment_angles(&self) -> Vec<f64> {
        self.objects
            .windows(2)
            .map(|w| direction_deg(w[1].x() - w[0].x(), w[1].y() - w[0].y()))
            .collect()
    }

    pub fn stats(&self) -> FragmentStats {
        FragmentStats::measure(&self.objects)
    }
}

/// Summary statistics of a run of objects.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FragmentStats {
    pub mean_radius: f64,
    pub radius_rel_std: f64,
    pub mean_distance: f64,
    pub distance_rel_std: f64,
    /// Circular mean of the segment directions.
    pub mean_angle_deg: f64,
    /// RMS deviation of segment directions from the circular mean.
    pub angle_std_deg: f64,
    /// Largest absolute deviation from the circular mean.
    pub max_angle_dev_deg: f64,
}

impl FragmentStats {
    pub fn measure(objects: &[DetectedObject]) -> Self {
        let radii: Vec<f64> = objects.iter().map(|o| o.radius).collect();
        let (mean_radius, radius_std) = mean_std(&radii);
        let distances: Vec<f64> = objects
            .windows(2)
            .map(|w| w[0].center.distance(&w[1].center))
            .collect();
        let angles: Vec<f64> = objects
            .windows(2)
            .map(|w| direction_deg(w[1].x() - w[0].x(), w[1].y() - w[0].y()))
            .collect();
        let (mean_distance, distance_std) = mean_std(&distances);
        let mean_angle_deg = circular_mean_deg(&angles);
        let devs: Vec<f64> = angles
            .iter()
            .map(|a| wrap_deg(a - mean_angle_deg))
            .collect();
        let angle_std_deg = if devs.is_empty() {
            0.0
        } else {
            (devs.iter().map(|d| d * d).sum::<f64>() / devs.len() as f64).sqrt()
        };
        let max_angle_dev_deg = devs.iter().map(|d| d.abs()).fold(0.0, f64::max);
        Self {
            mean_radius,
            radius_rel_std: relative(radius_std, mean_radius),
            mean_distance,
            distance_rel_std: relative(distance_std, mean_distance),
            mean_angle_deg,
            angle_std_deg,
            max_angle_dev_deg,
        }
    }

    pub fn within(&self, limits: &PlausibilityLimits) -> bool {
        self.max_angle_dev_deg <= limits.max_angle_dev
            && self.angle_std_deg <= limits.max_angle_std
            && self.radius_rel_std <= limits.max_radius_std
            && self.distance_rel_std <= limits.max_distance_std
    }
}

/// Population mean and standard deviation; `(0, 0)` for an empty slice.
pub(crate) fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (0.0, 0.0);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// `spread / mean`, with a zero mean counting as zero spread only if the
/// spread is zero too.
pub(crate) fn relative(spread: f64, mean: f64) -> f64 {
    if mean > 0.0 {
        spread / mean
    } else if spread == 0.0 {
        0.0
    } else {
        f64::INFINITY
    }
}

pub(crate) fn circular_mean_deg(angles: &[f64]) -> f64 {
    let (s, c) = angles.iter().fold((0.0, 0.0), |(s, c), a| {
        let r = a.to_radians();
        (s + r.sin(), c + r.cos())
    });
    if s == 0.0 && c == 0.0 {
        0.0
    } else {
        direction_deg(c, s)
    }
}

/// Wraps an angle difference into `(-180, 180]`.
pub(crate) fn wrap_deg(d: f64) -> f64 {
    let w = d.rem_euclid(360.0);
    if w > 180.0 {
        w - 360.0
    } else {
        w
    }
}

/// Velocity and size summary in physical units.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Kinematics {
    /// Per-segment speed, `s * scale * frame_rate`.
    pub velocities: Vec<f64>,
    pub mean_velocity: f64,
    pub std_velocity: f64,
    pub mean_diameter: f64,
    pub std_diameter: f64,
}

/// `frame_rate` in 1/s, `scale` in length units per pixel.
pub fn kinematics(traj: &Trajectory, frame_rate: f64, scale: f64) -> Result<Kinematics> {
    if !(frame_rate > 0.0) || !(scale > 0.0) {
        return Err(Error::InvalidInput(format!(
            "frame rate and scale must be > 0, got {frame_rate} and {scale}"
        )));
    }
    let velocities: Vec<f64> = traj
        .segment_distances()
        .iter()
        .map(|s| s * scale * frame_rate)
        .collect();
    let diameters: Vec<f64> = traj
        .objects
        .iter()
        .map(|o| 2.0 * o.radius * scale)
        .collect();
    let (mean_velocity, std_velocity) = mean_std(&velocities);
    let (mean_diameter, std_diameter) = mean_std(&diameters);
    Ok(Kinematics {
        velocities,
        mean_velocity,
        std_velocity,
        mean_diameter,
        std_diameter,
    })
}
