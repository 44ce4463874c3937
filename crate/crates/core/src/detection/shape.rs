//! Per-blob geometry: centroid, edge radius, match index and the shape gate.

use serde::{Deserialize, Serialize};

use super::components::{BoundingBox, PixelSet};
use super::sobel::SobelFrame;
use crate::error::{Error, Result};
use crate::imaging::GrayFrame;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Shape {
    Circle,
    Ring,
}

impl std::str::FromStr for Shape {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "circle" => Ok(Shape::Circle),
            "ring" => Ok(Shape::Ring),
            other => Err(Error::Config(format!(
                "unknown shape '{other}' (circle|ring)"
            ))),
        }
    }
}

impl std::fmt::Display for Shape {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Shape::Circle => "circle",
            Shape::Ring => "ring",
        })
    }
}

/// Thresholds of the shape gate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShapeFilterParams {
    pub shape: Shape,
    pub r_min: f64,
    pub r_max: f64,
    /// Circularity tolerance on `|R^2 pi / N_k - 1|`.
    pub delta_a: f64,
    /// Upper bound on mean/min pixel distance for rings.
    pub delta_c: f64,
    /// Lower bound on the match index.
    pub delta_i: f64,
}

impl ShapeFilterParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.r_min > 0.0 && self.r_min < self.r_max) {
            return Err(Error::InvalidInput(format!(
                "need 0 < R_min < R_max, got {} and {}",
                self.r_min, self.r_max
            )));
        }
        if !(self.delta_a > 0.0) || !(self.delta_c > 0.0) {
            return Err(Error::InvalidInput(format!(
                "delta_A and delta_C must be > 0, got {} and {}",
                self.delta_a, self.delta_c
            )));
        }
        if !(self.delta_i > -1.0 && self.delta_i < 1.0) {
            return Err(Error::InvalidInput(format!(
                "delta_I must lie in (-1, 1), got {}",
                self.delta_i
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Intensity-weighted centroid together with every pixel's distance to it.
#[derive(Clone, Debug, PartialEq)]
pub struct CentroidFit {
    pub center: Point,
    /// `r_k` in the pixel order of the source set.
    pub distances: Vec<f64>,
}

impl CentroidFit {
    pub fn mean_distance(&self) -> f64 {
        self.distances.iter().sum::<f64>() / self.distances.len() as f64
    }

    pub fn max_distance(&self) -> f64 {
        self.distances.iter().copied().fold(0.0, f64::max)
    }
}

pub fn compute_centroid(set: &PixelSet) -> Result<CentroidFit> {
    let total = set.total_intensity();
    if set.is_empty() || !(total > 0.0) {
        return Err(Error::DegenerateObject(format!(
            "component {} has zero total intensity",
            set.label
        )));
    }
    let (mut sx, mut sy) = (0.0, 0.0);
    for p in &set.pixels {
        sx += p.intensity * p.x as f64;
        sy += p.intensity * p.y as f64;
    }
    let center = Point::new(sx / total, sy / total);
    let distances = set
        .pixels
        .iter()
        .map(|p| center.distance(&Point::new(p.x as f64, p.y as f64)))
        .collect();
    Ok(CentroidFit { center, distances })
}

/// Gradient-weighted mean distance of the edge pixels around `center`.
///
/// Only Sobel pixels with `mean(r_k) < r < max(r_k)` contribute, which drops
/// the inner edge of rings and anything beyond the blob's own extent.
pub fn compute_radius(center: Point, distances: &[f64], sobel: &SobelFrame) -> Result<f64> {
    if distances.is_empty() {
        return Err(Error::RadiusUndefined("object has no pixels".into()));
    }
    let mean = distances.iter().sum::<f64>() / distances.len() as f64;
    let max = distances.iter().copied().fold(0.0, f64::max);
    let (x0, x1) = window(center.x, max, sobel.width());
    let (y0, y1) = window(center.y, max, sobel.height());
    let (mut weighted, mut mass) = (0.0, 0.0);
    for y in y0..=y1 {
        for x in x0..=x1 {
            let r = center.distance(&Point::new(x as f64, y as f64));
            if r > mean && r < max {
                let g = sobel.get(x, y);
                weighted += g * r;
                mass += g;
            }
        }
    }
    if mass > 0.0 {
        Ok(weighted / mass)
    } else {
        Err(Error::RadiusUndefined(format!(
            "no gradient between r = {mean:.3} and r = {max:.3} around ({:.2}, {:.2})",
            center.x, center.y
        )))
    }
}

fn window(c: f64, reach: f64, len: usize) -> (usize, usize) {
    let lo = (c - reach).floor().max(0.0) as usize;
    let hi = ((c + reach).ceil() as usize).min(len - 1);
    (lo.min(len - 1), hi)
}

/// Normalized interior/exterior contrast of a candidate circle or ring,
/// penalized by empty interior pixels. Lies in `[-1, 1]`.
///
/// Interior pixels are frame pixels with `r < R` (circle) or `R/4 < r < R`
/// (ring); exterior pixels have `r > R` and lie in the blob's bounding box
/// dilated by `R`. The penalty weight is the mean intensity of the blob.
pub fn match_index(
    frame: &GrayFrame,
    set: &PixelSet,
    center: Point,
    radius: f64,
    shape: Shape,
) -> f64 {
    let bb = set.bounding_box();
    let object_mean = set.total_intensity() / set.len() as f64;
    let inner = match shape {
        Shape::Circle => 0.0,
        Shape::Ring => radius / 4.0,
    };
    let (w, h) = (frame.width() as isize, frame.height() as isize);
    let grow = radius.ceil() as isize;
    let region = |lo: usize, hi: usize, limit: isize| {
        (
            (lo as isize - grow).max(0),
            (hi as isize + grow).min(limit - 1),
        )
    };
    let (x0, x1) = region(bb.x_min, bb.x_max, w);
    let (y0, y1) = region(bb.y_min, bb.y_max, h);
    let dilated = |x: f64, y: f64| {
        x >= bb.x_min as f64 - radius
            && x <= bb.x_max as f64 + radius
            && y >= bb.y_min as f64 - radius
            && y <= bb.y_max as f64 + radius
    };

    let (mut in_sum, mut in_n, mut empty_in) = (0.0, 0usize, 0usize);
    let (mut out_sum, mut out_n) = (0.0, 0usize);
    // The interior disc can reach past the dilated box only if R exceeds it,
    // so scanning the dilated box covers both regions.
    for y in y0..=y1 {
        for x in x0..=x1 {
            let (xf, yf) = (x as f64, y as f64);
            if !dilated(xf, yf) {
                continue;
            }
            let v = frame.get(x as usize, y as usize);
            let r = center.distance(&Point::new(xf, yf));
            if r < radius {
                if r > inner {
                    in_sum += v;
                    in_n += 1;
                    if v == 0.0 {
                        empty_in += 1;
                    }
                }
            } else if r > radius {
                out_sum += v;
                out_n += 1;
            }
        }
    }
    let mean_in = if in_n > 0 { in_sum / in_n as f64 } else { 0.0 };
    let mean_out = if out_n > 0 {
        out_sum / out_n as f64
    } else {
        0.0
    };
    let penalty = empty_in as f64 * object_mean;
    let denom = mean_in + mean_out + penalty;
    if denom > 0.0 {
        ((mean_in - mean_out - penalty) / denom).clamp(-1.0, 1.0)
    } else {
        -1.0
    }
}

/// First criterion an object failed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RejectReason {
    TooSmall,
    TooLarge,
    Circularity,
    RingCenter,
    MatchIndex,
}

impl std::fmt::Display for RejectReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            RejectReason::TooSmall => "radius below R_min",
            RejectReason::TooLarge => "radius above R_max",
            RejectReason::Circularity => "circularity outside delta_A",
            RejectReason::RingCenter => "ring center ratio not below delta_C",
            RejectReason::MatchIndex => "match index not above delta_I",
        })
    }
}

/// Quantities the shape gate looks at.
pub trait ShapeFeatures {
    fn radius(&self) -> f64;
    fn pixel_count(&self) -> usize;
    fn pixel_distances(&self) -> &[f64];
    fn match_index(&self) -> f64;

    fn circularity_error(&self) -> f64 {
        let r = self.radius();
        (r * r * std::f64::consts::PI / self.pixel_count() as f64 - 1.0).abs()
    }

    /// Mean over minimum pixel distance; infinite when a pixel sits on the centroid.
    fn ring_center_ratio(&self) -> f64 {
        let d = self.pixel_distances();
        let min = d.iter().copied().fold(f64::INFINITY, f64::min);
        let mean = d.iter().sum::<f64>() / d.len() as f64;
        if min > 0.0 {
            mean / min
        } else {
            f64::INFINITY
        }
    }
}

pub fn shape_filter<T: ShapeFeatures + ?Sized>(
    object: &T,
    params: &ShapeFilterParams,
) -> std::result::Result<(), RejectReason> {
    let r = object.radius();
    if r < params.r_min {
        return Err(RejectReason::TooSmall);
    }
    if r > params.r_max {
        return Err(RejectReason::TooLarge);
    }
    match params.shape {
        Shape::Circle => {
            if !(object.circularity_error() < params.delta_a) {
                return Err(RejectReason::Circularity);
            }
        }
        Shape::Ring => {
            if !(object.ring_center_ratio() < params.delta_c) {
                return Err(RejectReason::RingCenter);
            }
        }
    }
    if !(object.match_index() > params.delta_i) {
        return Err(RejectReason::MatchIndex);
    }
    Ok(())
}

pub(crate) fn touches_border(bb: &BoundingBox, width: usize, height: usize) -> bool {
    bb.x_min == 0 || bb.y_min == 0 || bb.x_max + 1 >= width || bb.y_max + 1 >= height
}

#[cfg(test)]
mod tests {
    use super::super::components::Pixel;
    use super::*;

    fn set(pixels: &[(usize, usize, f64)]) -> PixelSet {
        PixelSet {
            label: 1,
            pixels: pixels
                .iter()
                .map(|&(x, y, intensity)| Pixel { x, y, intensity })
                .collect(),
        }
    }

    fn near(a: Point, b: Point) -> bool {
        a.distance(&b) < 1e-12
    }

    #[test]
    fn centroid_examples() {
        let c = compute_centroid(&set(&[(3, 4, 0.2)])).unwrap();
        assert!(near(c.center, Point::new(3.0, 4.0)));
        assert!(c.distances[0] < 1e-12);

        let c = compute_centroid(&set(&[(0, 0, 0.5), (2, 0, 0.5)])).unwrap();
        assert!(near(c.center, Point::new(1.0, 0.0)));
        assert!(c.distances.iter().all(|d| (d - 1.0).abs() < 1e-12));

        let c = compute_centroid(&set(&[(0, 0, 1.0), (2, 0, 3.0)])).unwrap();
        assert!(near(c.center, Point::new(1.5, 0.0)));
    }

    #[test]
    fn zero_mass_centroid_is_degenerate() {
        assert!(matches!(
            compute_centroid(&set(&[(1, 1, 0.0)])),
            Err(Error::DegenerateObject(_))
        ));
    }

    #[test]
    fn flat_annulus_leaves_radius_undefined() {
        let frame = GrayFrame::from_fn(9, 9, |_, _| 1.0);
        let s = super::super::sobel::sobel(&frame).unwrap();
        let err = compute_radius(Point::new(4.0, 4.0), &[0.0, 1.0, 2.0], &s).unwrap_err();
        assert!(matches!(err, Error::RadiusUndefined(_)));
    }

    struct Fake {
        r: f64,
        n: usize,
        d: Vec<f64>,
        m: f64,
    }

    impl ShapeFeatures for Fake {
        fn radius(&self) -> f64 {
            self.r
        }
        fn pixel_count(&self) -> usize {
            self.n
        }
        fn pixel_distances(&self) -> &[f64] {
            &self.d
        }
        fn match_index(&self) -> f64 {
            self.m
        }
    }

    fn params(shape: Shape) -> ShapeFilterParams {
        ShapeFilterParams {
            shape,
            r_min: 2.0,
            r_max: 12.0,
            delta_a: 0.3,
            delta_c: 5.0,
            delta_i: 0.5,
        }
    }

    #[test]
    fn gate_reports_first_failure() {
        let ok = Fake {
            r: 5.0,
            n: 80,
            d: vec![1.0, 3.0],
            m: 0.9,
        };
        assert_eq!(shape_filter(&ok, &params(Shape::Circle)), Ok(()));
        let small = Fake { r: 1.0, ..ok };
        assert_eq!(
            shape_filter(&small, &params(Shape::Circle)),
            Err(RejectReason::TooSmall)
        );
        let big = Fake {
            r: 13.0,
            n: 530,
            d: vec![1.0],
            m: 0.9,
        };
        assert_eq!(
            shape_filter(&big, &params(Shape::Circle)),
            Err(RejectReason::TooLarge)
        );
        let blob = Fake {
            r: 5.0,
            n: 160,
            d: vec![1.0],
            m: 0.9,
        };
        assert_eq!(
            shape_filter(&blob, &params(Shape::Circle)),
            Err(RejectReason::Circularity)
        );
        let dull = Fake {
            r: 5.0,
            n: 80,
            d: vec![1.0],
            m: 0.4,
        };
        assert_eq!(
            shape_filter(&dull, &params(Shape::Circle)),
            Err(RejectReason::MatchIndex)
        );
    }

    #[test]
    fn ring_gate_needs_a_hole() {
        let filled = Fake {
            r: 6.0,
            n: 113,
            d: vec![0.0, 2.0, 4.0],
            m: 0.9,
        };
        assert_eq!(
            shape_filter(&filled, &params(Shape::Ring)),
            Err(RejectReason::RingCenter)
        );
        let ring = Fake {
            r: 6.0,
            n: 85,
            d: vec![2.0, 4.0, 5.0],
            m: 0.9,
        };
        assert_eq!(shape_filter(&ring, &params(Shape::Ring)), Ok(()));
    }

    #[test]
    fn shape_parses() {
        assert_eq!("Ring".parse::<Shape>().unwrap(), Shape::Ring);
        assert!("ellipse".parse::<Shape>().is_err());
    }
}
