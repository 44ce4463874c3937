//! Splitting raw linker paths into plausible fragments.
//!
//! A fragment grows one object at a time. The next object is accepted when
//! the grown fragment, measured as a whole, stays within every limit and the
//! new object is not itself an outlier against the fragment so far: its
//! segment direction must lie within `max_angle_dev` of the running circular
//! mean, and its radius and step length within the relative limits of the
//! running means. A rejected object starts a new fragment.

use std::ops::Range;

use serde::{Deserialize, Serialize};

use super::{circular_mean_deg, relative, wrap_deg, FragmentStats, Trajectory};
use crate::detection::DetectedObject;
use crate::error::{Error, Result};
use crate::linking::direction_deg;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlausibilityLimits {
    /// Degrees.
    pub max_angle_dev: f64,
    /// Degrees.
    pub max_angle_std: f64,
    /// Relative to the mean radius.
    pub max_radius_std: f64,
    /// Relative to the mean step length.
    pub max_distance_std: f64,
}

impl Default for PlausibilityLimits {
    fn default() -> Self {
        Self {
            max_angle_dev: 30.0,
            max_angle_std: 45.0,
            max_radius_std: 0.5,
            max_distance_std: 0.5,
        }
    }
}

impl PlausibilityLimits {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("max_angle", self.max_angle_dev),
            ("max_angle_std", self.max_angle_std),
            ("max_radius_std", self.max_radius_std),
            ("max_distance_std", self.max_distance_std),
        ];
        for (name, v) in fields {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

fn accepts(
    fragment: &[DetectedObject],
    next: &DetectedObject,
    limits: &PlausibilityLimits,
) -> bool {
    let n = fragment.len();
    let mean_r = fragment.iter().map(|o| o.radius).sum::<f64>() / n as f64;
    if relative((next.radius - mean_r).abs(), mean_r) > limits.max_radius_std {
        return false;
    }
    if n >= 2 {
        let last = &fragment[n - 1];
        let step = last.center.distance(&next.center);
        let steps: Vec<f64> = fragment
            .windows(2)
            .map(|w| w[0].center.distance(&w[1].center))
            .collect();
        let mean_s = steps.iter().sum::<f64>() / steps.len() as f64;
        if relative((step - mean_s).abs(), mean_s) > limits.max_distance_std {
            return false;
        }
        let angles: Vec<f64> = fragment
            .windows(2)
            .map(|w| direction_deg(w[1].x() - w[0].x(), w[1].y() - w[0].y()))
            .collect();
        let angle = direction_deg(next.x() - last.x(), next.y() - last.y());
        if wrap_deg(angle - circular_mean_deg(&angles)).abs() > limits.max_angle_dev {
            return false;
        }
    }
    let mut grown = fragment.to_vec();
    grown.push(next.clone());
    FragmentStats::measure(&grown).within(limits)
}

/// Splits `path` into maximal plausible runs, returned as `(start, end)`
/// index ranges (end exclusive) covering the whole path.
fn fragment_ranges(path: &[DetectedObject], limits: &PlausibilityLimits) -> Vec<(usize, usize)> {
    let mut ranges = Vec::new();
    if path.is_empty() {
        return ranges;
    }
    let mut start = 0;
    for i in 1..path.len() {
        let consecutive = path[i].frame_index == path[i - 1].frame_index + 1;
        if !consecutive || !accepts(&path[start..i], &path[i], limits) {
            ranges.push((start, i));
            start = i;
        }
    }
    ranges.push((start, path.len()));
    ranges
}

/// Index ranges of the plausible fragments of `path` with at least
/// `min_track_length` objects (and never fewer than 2).
pub fn plausible_fragments(
    path: &[DetectedObject],
    limits: &PlausibilityLimits,
    min_track_length: usize,
) -> Vec<Range<usize>> {
    let min_len = min_track_length.max(2);
    fragment_ranges(path, limits)
        .into_iter()
        .filter(|(a, b)| b - a >= min_len)
        .map(|(a, b)| a..b)
        .collect()
}

/// Splits a raw path wherever it stops being plausible and keeps fragments
/// of at least `min_track_length` objects (and never fewer than 2).
pub fn plausibility_split(
    path: &[DetectedObject],
    limits: &PlausibilityLimits,
    min_track_length: usize,
) -> Vec<Trajectory> {
    plausible_fragments(path, limits, min_track_length)
        .into_iter()
        .filter_map(|r| Trajectory::new(path[r].to_vec()).ok())
        .collect()
}

/// Length of the first plausible fragment of `path`.
pub fn leading_plausible_len(path: &[DetectedObject], limits: &PlausibilityLimits) -> usize {
    fragment_ranges(path, limits)
        .first()
        .map_or(0, |(a, b)| b - a)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(points: &[(f64, f64, f64)]) -> Vec<DetectedObject> {
        points
            .iter()
            .enumerate()
            .map(|(m, &(x, y, r))| DetectedObject::at(m, x, y, r))
            .collect()
    }

    #[test]
    fn straight_path_is_unchanged() {
        let p = path(
            &(0..20)
                .map(|m| (5.0 * m as f64, 50.0, 2.5))
                .collect::<Vec<_>>(),
        );
        let out = plausibility_split(&p, &PlausibilityLimits::default(), 5);
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].objects(), &p[..]);
    }

    #[test]
    fn kink_splits_path() {
        // Rightward for frames 0..=10, then downward.
        let mut pts: Vec<(f64, f64, f64)> = (0..=10).map(|m| (5.0 * m as f64, 10.0, 2.5)).collect();
        pts.extend((1..10).map(|k| (50.0, 10.0 + 5.0 * k as f64, 2.5)));
        let p = path(&pts);
        let out = plausibility_split(&p, &PlausibilityLimits::default(), 5);
        assert_eq!(out.len(), 2);
        assert_eq!(out[0].objects().last().unwrap().frame_index, 10);
        assert_eq!(out[1].first_frame(), 11);
    }

    #[test]
    fn radius_jump_splits_path() {
        let pts: Vec<(f64, f64, f64)> = (0..20)
            .map(|m| (5.0 * m as f64, 10.0, if m < 10 { 2.0 } else { 6.0 }))
            .collect();
        let out = plausibility_split(&path(&pts), &PlausibilityLimits::default(), 5);
        assert_eq!(out.len(), 2);
        assert_eq!(out[1].first_frame(), 10);
        assert!(out.iter().all(|t| t.stats().radius_rel_std < 1e-12));
    }

    #[test]
    fn implausible_path_yields_nothing() {
        // Zigzag: every segment reverses the previous direction.
        let pts: Vec<(f64, f64, f64)> = (0..10)
            .map(|m| (if m % 2 == 0 { 0.0 } else { 40.0 }, 3.0 * m as f64, 2.0))
            .collect();
        assert!(plausibility_split(&path(&pts), &PlausibilityLimits::default(), 3).is_empty());
    }

    #[test]
    fn leading_length_stops_at_first_split() {
        let pts: Vec<(f64, f64, f64)> = (0..12)
            .map(|m| (5.0 * m as f64, 10.0, if m < 7 { 2.0 } else { 8.0 }))
            .collect();
        assert_eq!(
            leading_plausible_len(&path(&pts), &PlausibilityLimits::default()),
            7
        );
    }

    #[test]
    fn limits_must_be_positive() {
        let mut l = PlausibilityLimits::default();
        assert!(l.validate().is_ok());
        l.max_radius_std = 0.0;
        assert!(l.validate().is_err());
    }
}
