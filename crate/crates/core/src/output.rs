//! CSV and JSON artifacts, written atomically.
//!
//! Floats in CSV files use six decimals; empty cells mark values that do
//! not exist (such as the incoming segment of a track's first object).

use std::io::Write;
use std::path::Path;

use serde::Serialize;
use tempfile::NamedTempFile;

use crate::detection::DetectedObject;
use crate::error::{Error, Result};
use crate::linking::LinkEdge;
use crate::synthbench::{CellSummary, GroundTruth};
use crate::trajectory::Trajectory;

pub const OBJECTS_HEADER: [&str; 6] =
    ["frame", "x", "y", "radius_px", "pixel_count", "match_index"];
pub const TRAJECTORIES_HEADER: [&str; 7] = [
    "track_id",
    "frame",
    "x",
    "y",
    "radius_px",
    "segment_distance_px",
    "segment_angle_deg",
];
pub const EDGES_HEADER: [&str; 7] = ["frame", "from_id", "to_id", "s", "dR", "phi", "cost"];
pub const REPORT_HEADER: [&str; 10] = [
    "density",
    "step_multiple",
    "mode",
    "replicate_count",
    "obj_ratio_mean",
    "obj_ratio_std",
    "fp_ratio_mean",
    "traj_ratio_mean",
    "traj_ratio_std",
    "fragmentation_mean",
];
pub const TRUTH_HEADER: [&str; 8] = [
    "track_id",
    "frame",
    "x",
    "y",
    "radius_px",
    "segment_distance_px",
    "segment_angle_deg",
    "track_id_true",
];

fn f(v: f64) -> String {
    format!("{v:.6}")
}

/// Writes `bytes` to a temporary file next to `path`, then renames it.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut tmp = NamedTempFile::new_in(dir).map_err(|e| Error::io(dir, e))?;
    tmp.write_all(bytes).map_err(|e| Error::io(path, e))?;
    tmp.as_file().sync_all().map_err(|e| Error::io(path, e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

fn csv_bytes<const N: usize>(
    header: [&str; N],
    rows: impl IntoIterator<Item = Vec<String>>,
) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.into_inner()
        .map_err(|e| Error::io("csv buffer", e.into_error()))
}

pub fn objects_csv(objects: &[Vec<DetectedObject>]) -> Result<Vec<u8>> {
    let rows = objects.iter().flatten().map(|o| {
        vec![
            o.frame_index.to_string(),
            f(o.x()),
            f(o.y()),
            f(o.radius),
            o.pixel_count.to_string(),
            f(o.match_index),
        ]
    });
    csv_bytes(OBJECTS_HEADER, rows)
}

fn track_rows(id: usize, t: &Trajectory) -> Vec<Vec<String>> {
    let distances = t.segment_distances();
    let angles = t.segment_angles();
    t.objects()
        .iter()
        .enumerate()
        .map(|(k, o)| {
            let (s, a) = if k == 0 {
                (String::new(), String::new())
            } else {
                (f(distances[k - 1]), f(angles[k - 1]))
            };
            vec![
                id.to_string(),
                o.frame_index.to_string(),
                f(o.x()),
                f(o.y()),
                f(o.radius),
                s,
                a,
            ]
        })
        .collect()
}

/// One row per object; the segment columns describe the step from the
/// previous object of the same track.
pub fn trajectories_csv<'a>(tracks: impl IntoIterator<Item = &'a Trajectory>) -> Result<Vec<u8>> {
    let rows = tracks
        .into_iter()
        .enumerate()
        .flat_map(|(id, t)| track_rows(id, t));
    csv_bytes(TRAJECTORIES_HEADER, rows)
}

/// Object ids are the positions within their frame.
pub fn edges_csv(edges: &[LinkEdge]) -> Result<Vec<u8>> {
    let rows = edges.iter().map(|e| {
        vec![
            e.from.frame.to_string(),
            e.from.index.to_string(),
            e.to.index.to_string(),
            f(e.distance),
            f(e.radius_cost),
            f(e.angle_deg),
            f(e.total_cost),
        ]
    });
    csv_bytes(EDGES_HEADER, rows)
}

pub fn report_csv(cells: &[CellSummary]) -> Result<Vec<u8>> {
    let rows = cells.iter().map(|c| {
        vec![
            f(c.density),
            f(c.step_multiple),
            c.mode.to_string(),
            c.replicate_count.to_string(),
            f(c.obj_ratio_mean),
            f(c.obj_ratio_std),
            f(c.fp_ratio_mean),
            f(c.traj_ratio_mean),
            f(c.traj_ratio_std),
            f(c.fragmentation_mean),
        ]
    });
    csv_bytes(REPORT_HEADER, rows)
}

/// Visible planted objects in the trajectory layout, with the true track
/// id in both id columns.
pub fn truth_csv(truth: &GroundTruth) -> Result<Vec<u8>> {
    let mut rows = Vec::new();
    for track in &truth.tracks {
        let mut prev: Option<(f64, f64)> = None;
        for (m, frame) in truth.frames.iter().enumerate() {
            let Some(o) = frame
                .iter()
                .find(|o| o.track_id == track.track_id && o.visible)
            else {
                prev = None;
                continue;
            };
            let (s, a) = match prev {
                Some((px, py)) => {
                    let (dx, dy) = (o.center.x - px, o.center.y - py);
                    (f(dx.hypot(dy)), f(crate::linking::direction_deg(dx, dy)))
                }
                None => (String::new(), String::new()),
            };
            rows.push(vec![
                track.track_id.to_string(),
                m.to_string(),
                f(o.center.x),
                f(o.center.y),
                f(o.radius),
                s,
                a,
                track.track_id.to_string(),
            ]);
            prev = Some((o.center.x, o.center.y));
        }
    }
    csv_bytes(TRUTH_HEADER, rows)
}

pub fn json_bytes<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(value)
        .map_err(|e| Error::InvalidInput(format!("cannot serialize JSON: {e}")))?;
    bytes.push(b'\n');
    Ok(bytes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trajectory_rows_have_leading_empty_segment() {
        let t = Trajectory::new(vec![
            DetectedObject::at(3, 0.0, 0.0, 2.0),
            DetectedObject::at(4, 3.0, 4.0, 2.0),
        ])
        .unwrap();
        let text = String::from_utf8(trajectories_csv([&t]).unwrap()).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(
            lines[0],
            "track_id,frame,x,y,radius_px,segment_distance_px,segment_angle_deg"
        );
        assert_eq!(lines[1], "0,3,0.000000,0.000000,2.000000,,");
        assert_eq!(
            lines[2],
            "0,4,3.000000,4.000000,2.000000,5.000000,53.130102"
        );
    }

    #[test]
    fn empty_outputs_keep_headers() {
        let text = String::from_utf8(trajectories_csv(std::iter::empty()).unwrap()).unwrap();
        assert_eq!(text.lines().count(), 1);
        let text = String::from_utf8(objects_csv(&[]).unwrap()).unwrap();
        assert_eq!(text, "frame,x,y,radius_px,pixel_count,match_index\n");
    }

    #[test]
    fn atomic_write_replaces_content() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("sub").join("a.txt");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(std::fs::read(&p).unwrap(), b"two");
        assert_eq!(std::fs::read_dir(p.parent().unwrap()).unwrap().count(), 1);
    }
}
