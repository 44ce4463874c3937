use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::detection::DetectedObject;
use crate::error::{Error, Result};

/// Position of an object in `objects_by_frame`. Ordering is by frame, then
/// by index within the frame; this is the label order used for tie-breaks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct ObjectRef {
    pub frame: usize,
    pub index: usize,
}

impl ObjectRef {
    pub fn new(frame: usize, index: usize) -> Self {
        Self { frame, index }
    }
}

/// Cost multipliers and limits for graph construction and path extraction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphWeights {
    pub g_s: f64,
    pub g_r: f64,
    pub g_phi: f64,
    /// Largest step (px) an object may make between adjacent frames.
    pub max_distance: f64,
    pub min_diameter: f64,
    /// Shortest path (in objects) that is kept.
    pub min_track_length: usize,
}

impl GraphWeights {
    /// Typical values for an approximate object size `w` in pixels.
    pub fn typical(w: f64) -> Self {
        Self {
            g_s: 1.0,
            g_r: 1.0,
            g_phi: 2.0,
            max_distance: 10.0 * w,
            min_diameter: 0.5 * w,
            min_track_length: 5,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ws = [self.g_s, self.g_r, self.g_phi];
        if ws.iter().any(|g| !(g.is_finite() && *g >= 0.0)) || ws.iter().all(|g| *g == 0.0) {
            return Err(Error::InvalidInput(format!(
                "G_s, G_r and G_phi must be >= 0 with at least one > 0, got {}, {} and {}",
                self.g_s, self.g_r, self.g_phi
            )));
        }
        if !(self.max_distance > 0.0) {
            return Err(Error::InvalidInput(format!(
                "max_distance must be > 0, got {}",
                self.max_distance
            )));
        }
        if self.min_track_length < 2 {
            return Err(Error::InvalidInput("min_track_length must be >= 2".into()));
        }
        Ok(())
    }
}

/// Candidate connection between objects in adjacent frames.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LinkEdge {
    pub from: ObjectRef,
    pub to: ObjectRef,
    /// `s_np` in pixels.
    pub distance: f64,
    /// `|R_n / R_p - 1|`.
    pub radius_cost: f64,
    /// Direction of `p - n` in degrees, `[0, 360)`.
    pub angle_deg: f64,
    /// `|dphi - 1|`, zero until costs are assigned.
    pub angle_cost: f64,
    pub total_cost: f64,
}

/// Direction of the vector `(dx, dy)` in degrees, in `[0, 360)`.
pub fn direction_deg(dx: f64, dy: f64) -> f64 {
    let a = dy.atan2(dx).to_degrees();
    let a = if a < 0.0 { a + 360.0 } else { a };
    if a >= 360.0 {
        0.0
    } else {
        a
    }
}

/// All pairs between consecutive frames within `max_distance`, costs unset.
pub fn build_edges(
    objects_by_frame: &[Vec<DetectedObject>],
    weights: &GraphWeights,
) -> Vec<LinkEdge> {
    let mut edges = Vec::new();
    for (m, pair) in objects_by_frame.windows(2).enumerate() {
        let (current, next) = (&pair[0], &pair[1]);
        for (i, n) in current.iter().enumerate() {
            for (j, p) in next.iter().enumerate() {
                let (dx, dy) = (p.x() - n.x(), p.y() - n.y());
                let distance = dx.hypot(dy);
                if distance > weights.max_distance {
                    continue;
                }
                edges.push(LinkEdge {
                    from: ObjectRef::new(m, i),
                    to: ObjectRef::new(m + 1, j),
                    distance,
                    radius_cost: (n.radius / p.radius - 1.0).abs(),
                    angle_deg: direction_deg(dx, dy),
                    angle_cost: 0.0,
                    total_cost: 0.0,
                });
            }
        }
    }
    edges
}

pub const HISTOGRAM_BIN_DEG: f64 = 2.0;
const HISTOGRAM_BINS: usize = (360.0 / HISTOGRAM_BIN_DEG) as usize;

/// Below this (or above 180 minus this) the ratio form is evaluated in a
/// frame rotated by 90 degrees.
pub const SINGULAR_ANGLE_DEG: f64 = 5.0;

/// Most frequent edge direction, weighted by edge length.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DominantAngle {
    /// Center of the heaviest bin reduced modulo 180, in `[0, 180)`.
    pub phi_deg: f64,
    /// Accumulated length per bin; bin `k` is centered on `2k` degrees.
    pub histogram: Vec<f64>,
}

pub fn dominant_angle(edges: &[LinkEdge]) -> Result<DominantAngle> {
    if edges.is_empty() {
        return Err(Error::NoDominantAngle);
    }
    let mut histogram = vec![0.0; HISTOGRAM_BINS];
    for e in edges {
        let bin = (e.angle_deg / HISTOGRAM_BIN_DEG).round() as usize % HISTOGRAM_BINS;
        histogram[bin] += e.distance;
    }
    // Strict comparison keeps the first (smallest-angle) bin on ties.
    let mut best = 0;
    for (k, &mass) in histogram.iter().enumerate() {
        if mass > histogram[best] {
            best = k;
        }
    }
    let phi_deg = (best as f64 * HISTOGRAM_BIN_DEG) % 180.0;
    Ok(DominantAngle { phi_deg, histogram })
}

/// `|dphi - 1|` with `dphi = (phi mod 180) / Phi`.
///
/// When `Phi` is within [`SINGULAR_ANGLE_DEG`] of 0 or 180 both angles are
/// shifted by 90 degrees (mod 180) before the ratio is taken.
pub fn angle_deviation(angle_deg: f64, phi_deg: f64) -> f64 {
    let mut a = angle_deg.rem_euclid(180.0);
    let mut p = phi_deg.rem_euclid(180.0);
    if p < SINGULAR_ANGLE_DEG || p > 180.0 - SINGULAR_ANGLE_DEG {
        a = (a + 90.0).rem_euclid(180.0);
        p = (p + 90.0).rem_euclid(180.0);
    }
    (a / p - 1.0).abs()
}

/// `G_s s/max_distance + G_r dR + G_phi |dphi - 1|`. The angle term is
/// skipped when no dominant angle is given.
pub fn edge_cost(edge: &LinkEdge, phi: Option<&DominantAngle>, weights: &GraphWeights) -> f64 {
    let angle = phi.map_or(0.0, |p| angle_deviation(edge.angle_deg, p.phi_deg));
    weights.g_s * edge.distance / weights.max_distance
        + weights.g_r * edge.radius_cost
        + weights.g_phi * angle
}

/// Which edges feed the dominant-angle histogram.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AngleEdges {
    /// Only the shortest outgoing edge of every object. Long edges between
    /// unrelated neighbours cannot outweigh short true steps.
    #[default]
    Shortest,
    /// Every edge of the graph.
    All,
}

impl AngleEdges {
    pub fn as_str(&self) -> &'static str {
        match self {
            AngleEdges::Shortest => "shortest",
            AngleEdges::All => "all",
        }
    }
}

impl fmt::Display for AngleEdges {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AngleEdges {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "shortest" => Ok(AngleEdges::Shortest),
            "all" => Ok(AngleEdges::All),
            _ => Err(Error::Config(format!(
                "unknown angle edge set '{s}' (expected shortest or all)"
            ))),
        }
    }
}

/// The shortest outgoing edge of every source object, in source label
/// order. Equal lengths go to the smaller target label.
pub fn shortest_outgoing(edges: &[LinkEdge]) -> Vec<LinkEdge> {
    let mut best: BTreeMap<ObjectRef, &LinkEdge> = BTreeMap::new();
    for e in edges {
        best.entry(e.from)
            .and_modify(|b| {
                if e.distance
                    .total_cmp(&b.distance)
                    .then(e.to.cmp(&b.to))
                    .is_lt()
                {
                    *b = e;
                }
            })
            .or_insert(e);
    }
    best.into_values().cloned().collect()
}

/// Fills `angle_cost` and `total_cost` of every edge. The dominant angle is
/// computed when the angle weight is nonzero, from the edge set selected by
/// `angle_edges`.
pub fn assign_costs(
    edges: &mut [LinkEdge],
    weights: &GraphWeights,
    angle_edges: AngleEdges,
) -> Option<DominantAngle> {
    let phi = if weights.g_phi > 0.0 {
        match angle_edges {
            AngleEdges::Shortest => dominant_angle(&shortest_outgoing(edges)).ok(),
            AngleEdges::All => dominant_angle(edges).ok(),
        }
    } else {
        None
    };
    for e in edges.iter_mut() {
        e.angle_cost = phi
            .as_ref()
            .map_or(0.0, |p| angle_deviation(e.angle_deg, p.phi_deg));
        e.total_cost = edge_cost(e, phi.as_ref(), weights);
    }
    phi
}
