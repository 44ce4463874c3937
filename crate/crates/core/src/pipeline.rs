//! Frame sequence to trajectories: detection, linking, plausibility split.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::detection::{detect_objects, DetectedObject, DetectionParams};
use crate::error::{Error, Result};
use crate::imaging::GrayFrame;
use crate::linking::{
    assign_costs, build_edges, link_dijkstra_with, AngleEdges, DominantAngle, GraphWeights,
    LinkEdge, ObjectRef,
};
use crate::trajectory::{
    leading_plausible_len, plausible_fragments, PlausibilityLimits, Trajectory,
};

/// How much of each extracted path is removed from the pool.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PathClaim {
    /// Only the leading plausible fragment. The rest of the path returns to
    /// the pool, so a path that jumps onto a neighbouring track after its
    /// own object left the frame does not take that track's tail.
    #[default]
    PlausiblePrefix,
    /// The whole path.
    WholePath,
}

impl PathClaim {
    pub fn as_str(&self) -> &'static str {
        match self {
            PathClaim::PlausiblePrefix => "plausible_prefix",
            PathClaim::WholePath => "whole_path",
        }
    }
}

impl fmt::Display for PathClaim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PathClaim {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plausible_prefix" => Ok(PathClaim::PlausiblePrefix),
            "whole_path" => Ok(PathClaim::WholePath),
            _ => Err(Error::Config(format!(
                "unknown path claim '{s}' (expected plausible_prefix or whole_path)"
            ))),
        }
    }
}

/// Linking choices beyond the cost weights.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkOptions {
    pub angle_edges: AngleEdges,
    pub claim: PathClaim,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrackingParams {
    pub detection: DetectionParams,
    pub weights: GraphWeights,
    pub limits: PlausibilityLimits,
    pub options: LinkOptions,
}

impl TrackingParams {
    pub fn validate(&self) -> Result<()> {
        self.detection.validate()?;
        self.weights.validate()?;
        self.limits.validate()
    }
}

/// A plausible trajectory together with the detections it was built from.
#[derive(Clone, Debug, PartialEq)]
pub struct TrackedPath {
    pub refs: Vec<ObjectRef>,
    pub trajectory: Trajectory,
}

#[derive(Clone, Debug)]
pub struct LinkResult {
    pub edges: Vec<LinkEdge>,
    pub dominant_angle: Option<DominantAngle>,
    pub tracks: Vec<TrackedPath>,
}

#[derive(Clone, Debug)]
pub struct TrackingResult {
    pub objects: Vec<Vec<DetectedObject>>,
    pub link: LinkResult,
}

/// Detects objects in every frame, in parallel, preserving frame order.
pub fn detect_all(
    frames: &[GrayFrame],
    params: &DetectionParams,
) -> Result<Vec<Vec<DetectedObject>>> {
    params.validate()?;
    frames
        .par_iter()
        .enumerate()
        .map(|(m, f)| detect_objects(f, m, params))
        .collect()
}

/// Builds the cost graph, extracts paths and splits them into plausible
/// trajectories.
pub fn link_objects(
    objects: &[Vec<DetectedObject>],
    weights: &GraphWeights,
    limits: &PlausibilityLimits,
    options: LinkOptions,
) -> Result<LinkResult> {
    weights.validate()?;
    limits.validate()?;
    let mut edges = build_edges(objects, weights);
    let dominant_angle = assign_costs(&mut edges, weights, options.angle_edges);
    let sizes: Vec<usize> = objects.iter().map(Vec::len).collect();
    let resolve = |refs: &[ObjectRef]| -> Vec<DetectedObject> {
        refs.iter()
            .map(|r| objects[r.frame][r.index].clone())
            .collect()
    };
    let paths = link_dijkstra_with(
        &sizes,
        &edges,
        weights.min_track_length,
        |raw| match options.claim {
            PathClaim::WholePath => raw.len(),
            PathClaim::PlausiblePrefix => leading_plausible_len(&resolve(raw), limits),
        },
    );
    let mut tracks = Vec::new();
    for refs in paths {
        let objs = resolve(&refs);
        for range in plausible_fragments(&objs, limits, weights.min_track_length) {
            let trajectory = Trajectory::new(objs[range.clone()].to_vec())?;
            tracks.push(TrackedPath {
                refs: refs[range].to_vec(),
                trajectory,
            });
        }
    }
    Ok(LinkResult {
        edges,
        dominant_angle,
        tracks,
    })
}

pub fn track_frames(frames: &[GrayFrame], params: &TrackingParams) -> Result<TrackingResult> {
    params.validate()?;
    let objects = detect_all(frames, &params.detection)?;
    let link = link_objects(&objects, &params.weights, &params.limits, params.options)?;
    Ok(TrackingResult { objects, link })
}
