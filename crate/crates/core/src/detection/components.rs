//! 4-connected component labeling on nonnegative rasters.

use std::collections::VecDeque;

use crate::imaging::GrayFrame;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Pixel {
    pub x: usize,
    pub y: usize,
    pub intensity: f64,
}

/// A connected set of nonzero pixels.
#[derive(Clone, Debug, PartialEq)]
pub struct PixelSet {
    /// Scan-order label, starting at 1.
    pub label: u32,
    pub pixels: Vec<Pixel>,
}

/// Inclusive pixel bounding box.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BoundingBox {
    pub x_min: usize,
    pub y_min: usize,
    pub x_max: usize,
    pub y_max: usize,
}

impl PixelSet {
    pub fn len(&self) -> usize {
        self.pixels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }

    pub fn total_intensity(&self) -> f64 {
        self.pixels.iter().map(|p| p.intensity).sum()
    }

    pub fn bounding_box(&self) -> BoundingBox {
        let mut bb = BoundingBox {
            x_min: usize::MAX,
            y_min: usize::MAX,
            x_max: 0,
            y_max: 0,
        };
        for p in &self.pixels {
            bb.x_min = bb.x_min.min(p.x);
            bb.y_min = bb.y_min.min(p.y);
            bb.x_max = bb.x_max.max(p.x);
            bb.y_max = bb.y_max.max(p.y);
        }
        bb
    }
}

/// Collects every maximal 4-connected set of nonzero pixels.
///
/// The frame is scanned row by row; each unvisited nonzero pixel seeds a
/// breadth-first fill over its left/right/up/down neighbours.
pub fn label_components(frame: &GrayFrame) -> Vec<PixelSet> {
    let (w, h) = (frame.width(), frame.height());
    let data = frame.data();
    let mut visited = vec![false; w * h];
    let mut queue = VecDeque::new();
    let mut sets = Vec::new();

    for start in 0..w * h {
        if visited[start] || data[start] <= 0.0 {
            continue;
        }
        let label = sets.len() as u32 + 1;
        let mut pixels = Vec::new();
        visited[start] = true;
        queue.push_back(start);
        while let Some(idx) = queue.pop_front() {
            let (x, y) = (idx % w, idx / w);
            pixels.push(Pixel {
                x,
                y,
                intensity: data[idx],
            });
            let mut visit = |n: usize| {
                if !visited[n] && data[n] > 0.0 {
                    visited[n] = true;
                    queue.push_back(n);
                }
            };
            if x > 0 {
                visit(idx - 1);
            }
            if x + 1 < w {
                visit(idx + 1);
            }
            if y > 0 {
                visit(idx - w);
            }
            if y + 1 < h {
                visit(idx + w);
            }
        }
        sets.push(PixelSet { label, pixels });
    }
    sets
}

#[cfg(test)]
mod tests {
    use super::*;

    fn frame_with(w: usize, h: usize, on: &[(usize, usize)]) -> GrayFrame {
        let mut f = GrayFrame::zeros(w, h);
        for &(x, y) in on {
            f.set(x, y, 1.0);
        }
        f
    }

    #[test]
    fn empty_frame_has_no_components() {
        assert!(label_components(&GrayFrame::zeros(5, 5)).is_empty());
    }

    #[test]
    fn single_pixel() {
        let sets = label_components(&frame_with(4, 4, &[(2, 1)]));
        assert_eq!(sets.len(), 1);
        assert_eq!(sets[0].len(), 1);
        assert_eq!((sets[0].pixels[0].x, sets[0].pixels[0].y), (2, 1));
    }

    #[test]
    fn diagonal_pixels_stay_separate() {
        let sets = label_components(&frame_with(4, 4, &[(1, 1), (2, 2)]));
        assert_eq!(sets.len(), 2);
        assert_eq!(sets[0].label, 1);
        assert_eq!(sets[1].label, 2);
    }

    #[test]
    fn touching_blobs_merge() {
        let sets = label_components(&frame_with(6, 3, &[(0, 1), (1, 1), (2, 1), (3, 1), (5, 1)]));
        assert_eq!(sets.len(), 2);
        assert_eq!(sets[0].len(), 4);
        assert_eq!(
            sets[0].bounding_box(),
            BoundingBox {
                x_min: 0,
                y_min: 1,
                x_max: 3,
                y_max: 1
            }
        );
    }

    #[test]
    fn large_blob_does_not_recurse() {
        let f = GrayFrame::from_fn(1000, 1000, |_, _| 1.0);
        let sets = label_components(&f);
        assert_eq!(sets.len(), 1);
        assert_eq!(sets[0].len(), 1_000_000);
    }
}
