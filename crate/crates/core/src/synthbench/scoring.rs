//! Comparing detections and tracks against planted ground truth.

use serde::Serialize;

use super::generate::GroundTruth;
use crate::detection::Point;
use crate::linking::ObjectRef;

/// Object matching result for a whole sequence.
#[derive(Clone, Debug, PartialEq)]
pub struct ObjectMatch {
    /// For each frame and detection, the index into `truth.frames[m]` of the
    /// matched object.
    pub assignment: Vec<Vec<Option<usize>>>,
    /// Visible true objects with a matched detection.
    pub matched: usize,
    pub n_true: usize,
    /// Detections matched to nothing.
    pub unmatched_detections: usize,
}

impl ObjectMatch {
    pub fn object_recognition_ratio(&self) -> f64 {
        if self.n_true == 0 {
            1.0
        } else {
            self.matched as f64 / self.n_true as f64
        }
    }

    pub fn false_positive_ratio(&self) -> f64 {
        if self.n_true == 0 {
            if self.unmatched_detections == 0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            self.unmatched_detections as f64 / self.n_true as f64
        }
    }
}

/// Greedy one-to-one nearest-neighbour matching of one frame. Pairs within
/// `tolerance` are taken in order of increasing distance.
pub fn match_frame(detected: &[Point], truth: &[Point], tolerance: f64) -> Vec<Option<usize>> {
    let mut pairs = Vec::new();
    for (i, d) in detected.iter().enumerate() {
        for (j, t) in truth.iter().enumerate() {
            let dist = d.distance(t);
            if dist <= tolerance {
                pairs.push((dist, i, j));
            }
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut assignment = vec![None; detected.len()];
    let mut taken = vec![false; truth.len()];
    for (_, i, j) in pairs {
        if assignment[i].is_none() && !taken[j] {
            assignment[i] = Some(j);
            taken[j] = true;
        }
    }
    assignment
}

/// Matches detections against every planted object in view. Only visible
/// planted objects count toward the recognition ratio; a detection matched
/// to an object too close to the border is neither a hit nor a false
/// positive.
pub fn match_objects(detected: &[Vec<Point>], truth: &GroundTruth, tolerance: f64) -> ObjectMatch {
    let mut assignment = Vec::with_capacity(truth.frames.len());
    let mut matched = 0;
    let mut unmatched = 0;
    for (m, objects) in truth.frames.iter().enumerate() {
        let dets: &[Point] = detected.get(m).map_or(&[], |v| v.as_slice());
        let centers: Vec<Point> = objects.iter().map(|o| o.center).collect();
        let a = match_frame(dets, &centers, tolerance);
        for hit in &a {
            match hit {
                Some(j) if objects[*j].visible => matched += 1,
                Some(_) => {}
                None => unmatched += 1,
            }
        }
        assignment.push(a);
    }
    ObjectMatch {
        assignment,
        matched,
        n_true: truth.visible_count(),
        unmatched_detections: unmatched,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TrajectoryScore {
    /// Mean over eligible true tracks of the best single fragment coverage.
    pub trajectory_recognition_ratio: f64,
    /// Mean fragment count over true tracks found at least once.
    pub fragmentation_score: f64,
    pub eligible_tracks: usize,
}

/// Scores found tracks against the truth. Each found track is attributed
/// to the true track owning most of its matched objects (ties to the lower
/// id). A true track scores the fraction of its visible objects covered by
/// its best attributed fragment. True tracks with fewer than
/// `min_track_length` visible objects cannot be found by construction and
/// are left out.
pub fn score_trajectories(
    found: &[Vec<ObjectRef>],
    matches: &ObjectMatch,
    truth: &GroundTruth,
    min_track_length: usize,
) -> TrajectoryScore {
    let lengths = truth.visible_lengths();
    let n_tracks = lengths.len();
    let mut best = vec![0usize; n_tracks];
    let mut fragments = vec![0usize; n_tracks];
    for track in found {
        let mut counts = vec![0usize; n_tracks];
        for r in track {
            let hit = matches
                .assignment
                .get(r.frame)
                .and_then(|a| a.get(r.index))
                .copied()
                .flatten();
            if let Some(j) = hit {
                let o = &truth.frames[r.frame][j];
                if o.visible {
                    counts[o.track_id] += 1;
                }
            }
        }
        let owner = counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
            .map(|(id, _)| id);
        if let Some(id) = owner {
            fragments[id] += 1;
            best[id] = best[id].max(counts[id]);
        }
    }
    let eligible: Vec<usize> = (0..n_tracks)
        .filter(|&t| lengths[t] >= min_track_length.max(1))
        .collect();
    let ratio = if eligible.is_empty() {
        1.0
    } else {
        eligible
            .iter()
            .map(|&t| best[t] as f64 / lengths[t] as f64)
            .sum::<f64>()
            / eligible.len() as f64
    };
    let recovered: Vec<usize> = eligible
        .iter()
        .copied()
        .filter(|&t| fragments[t] > 0)
        .collect();
    let fragmentation = if recovered.is_empty() {
        0.0
    } else {
        recovered.iter().map(|&t| fragments[t] as f64).sum::<f64>() / recovered.len() as f64
    };
    TrajectoryScore {
        trajectory_recognition_ratio: ratio,
        fragmentation_score: fragmentation,
        eligible_tracks: eligible.len(),
    }
}
