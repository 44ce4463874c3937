//! Blob extraction and shape classification.
//!
//! A frame is preprocessed (optional inversion, band-pass, threshold), split
//! into 4-connected components, and each component gets an intensity-weighted
//! centroid. The radius comes from the Sobel gradient of the unfiltered
//! (possibly inverted) frame; the match index is measured on the thresholded
//! frame. Blobs touching the frame border or without a measurable edge are
//! dropped before the shape gate.

mod components;
mod shape;
mod sobel;

use serde::{Deserialize, Serialize};

pub use components::{label_components, BoundingBox, Pixel, PixelSet};
pub use shape::{
    compute_centroid, compute_radius, match_index, shape_filter, CentroidFit, Point, RejectReason,
    Shape, ShapeFeatures, ShapeFilterParams,
};
pub use sobel::{sobel, SobelFrame, SOBEL_X};

use crate::error::Result;
use crate::imaging::{preprocess, BandpassParams, GrayFrame};

/// A measured blob.
#[derive(Clone, Debug, PartialEq)]
pub struct DetectedObject {
    pub frame_index: usize,
    pub center: Point,
    pub radius: f64,
    pub pixel_count: usize,
    pub match_index: f64,
    /// `r_k` for every pixel of the blob.
    pub pixel_distances: Vec<f64>,
}

impl DetectedObject {
    /// An object with only position and radius, for linking and tests.
    pub fn at(frame_index: usize, x: f64, y: f64, radius: f64) -> Self {
        Self {
            frame_index,
            center: Point::new(x, y),
            radius,
            pixel_count: 1,
            match_index: 1.0,
            pixel_distances: Vec::new(),
        }
    }

    pub fn x(&self) -> f64 {
        self.center.x
    }

    pub fn y(&self) -> f64 {
        self.center.y
    }
}

impl ShapeFeatures for DetectedObject {
    fn radius(&self) -> f64 {
        self.radius
    }

    fn pixel_count(&self) -> usize {
        self.pixel_count
    }

    fn pixel_distances(&self) -> &[f64] {
        &self.pixel_distances
    }

    fn match_index(&self) -> f64 {
        self.match_index
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetectionParams {
    pub bandpass: BandpassParams,
    pub shape: ShapeFilterParams,
}

impl DetectionParams {
    pub fn validate(&self) -> Result<()> {
        self.bandpass.validate()?;
        self.shape.validate()
    }
}

/// Outcome for one connected component.
#[derive(Clone, Debug, PartialEq)]
pub enum Candidate {
    Accepted(DetectedObject),
    Rejected(DetectedObject, RejectReason),
    TouchesBorder(BoundingBox),
    Degenerate,
}

/// Measures a single component against the unfiltered and thresholded frames.
pub fn measure_component(
    set: &PixelSet,
    thresholded: &GrayFrame,
    sobel: &SobelFrame,
    frame_index: usize,
    shape: Shape,
) -> Result<DetectedObject> {
    let fit = compute_centroid(set)?;
    let radius = compute_radius(fit.center, &fit.distances, sobel)?;
    let match_index = match_index(thresholded, set, fit.center, radius, shape);
    Ok(DetectedObject {
        frame_index,
        center: fit.center,
        radius,
        pixel_count: set.len(),
        match_index,
        pixel_distances: fit.distances,
    })
}

/// Runs the full per-frame chain and reports every component's fate.
pub fn analyze_frame(
    frame: &GrayFrame,
    frame_index: usize,
    params: &DetectionParams,
) -> Result<Vec<Candidate>> {
    params.validate()?;
    let (base, thresholded) = preprocess(frame, &params.bandpass)?;
    let gradient = sobel(&base)?;
    let (w, h) = (frame.width(), frame.height());
    let candidates = label_components(&thresholded)
        .iter()
        .map(|set| {
            let bb = set.bounding_box();
            if shape::touches_border(&bb, w, h) {
                return Candidate::TouchesBorder(bb);
            }
            match measure_component(
                set,
                &thresholded,
                &gradient,
                frame_index,
                params.shape.shape,
            ) {
                Ok(obj) => match shape_filter(&obj, &params.shape) {
                    Ok(()) => Candidate::Accepted(obj),
                    Err(reason) => Candidate::Rejected(obj, reason),
                },
                Err(_) => Candidate::Degenerate,
            }
        })
        .collect();
    Ok(candidates)
}

/// Objects of one frame that pass every filter, in component scan order.
pub fn detect_objects(
    frame: &GrayFrame,
    frame_index: usize,
    params: &DetectionParams,
) -> Result<Vec<DetectedObject>> {
    Ok(analyze_frame(frame, frame_index, params)?
        .into_iter()
        .filter_map(|c| match c {
            Candidate::Accepted(obj) => Some(obj),
            _ => None,
        })
        .collect())
}
