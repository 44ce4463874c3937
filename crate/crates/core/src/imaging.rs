//! Frame ingestion and pixel preprocessing.
//!
//! Frames are held as row-major `f64` rasters with nonnegative values. Loaded
//! images are scaled to `[0, 1]`; color inputs are reduced to Rec. 709 luma
//! (`0.2126 R + 0.7152 G + 0.0722 B`, computed on the normalized channels,
//! no gamma handling).
//!
//! The band-pass filter is a difference of two normalized smoothings: a
//! Gaussian of standard deviation `N` (truncated at `±ceil(3N)` and
//! renormalized) minus a `(2W+1) x (2W+1)` boxcar. Both kernels are separable
//! and borders are padded by edge replication.

use std::path::{Path, PathBuf};

use image::DynamicImage;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Luma weights applied to normalized R, G, B channels.
pub const LUMA_WEIGHTS: [f64; 3] = [0.2126, 0.7152, 0.0722];

/// A single grayscale frame.
#[derive(Clone, Debug, PartialEq)]
pub struct GrayFrame {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl GrayFrame {
    /// Wraps a row-major buffer, checking dimensions and value range.
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidInput(format!(
                "frame dimensions must be nonzero, got {width}x{height}"
            )));
        }
        if data.len() != width * height {
            return Err(Error::InvalidInput(format!(
                "buffer length {} does not match {width}x{height}",
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidInput(format!(
                "intensity at index {pos} is {} (must be finite and >= 0)",
                data[pos]
            )));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn zeros(width: usize, height: usize) -> Self {
        assert!(width > 0 && height > 0, "frame dimensions must be nonzero");
        Self {
            width,
            height,
            data: vec![0.0; width * height],
        }
    }

    /// Builds a frame by evaluating `f(x, y)` at every pixel. Negative or
    /// non-finite values are replaced by zero.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut frame = Self::zeros(width, height);
        for y in 0..height {
            for x in 0..width {
                let v = f(x, y);
                frame.data[y * width + x] = if v.is_finite() && v > 0.0 { v } else { 0.0 };
            }
        }
        frame
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }

    #[inline]
    pub(crate) fn get_clamped(&self, x: isize, y: isize) -> f64 {
        let cx = x.clamp(0, self.width as isize - 1) as usize;
        let cy = y.clamp(0, self.height as isize - 1) as usize;
        self.data[cy * self.width + cx]
    }

    pub fn set(&mut self, x: usize, y: usize, value: f64) {
        debug_assert!(value.is_finite() && value >= 0.0);
        self.data[y * self.width + x] = value;
    }

    pub fn max(&self) -> f64 {
        self.data.iter().copied().fold(0.0, f64::max)
    }

    /// Multiplies every intensity by `factor` (must be nonnegative).
    pub fn scaled(&self, factor: f64) -> Self {
        assert!(factor.is_finite() && factor >= 0.0);
        Self {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|v| v * factor).collect(),
        }
    }

    pub(crate) fn from_raw(width: usize, height: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), width * height);
        Self {
            width,
            height,
            data,
        }
    }
}

/// Parameters of the band-pass filter and subsequent threshold.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BandpassParams {
    /// Approximate object size `W` in pixels; the boxcar spans `2W + 1`.
    pub object_size: usize,
    /// Gaussian standard deviation `N` in pixels.
    pub noise_level: f64,
    /// Cutoff as a fraction of the filtered frame's maximum, in `[0, 1)`.
    pub threshold: f64,
    /// Invert intensities before filtering (dark objects on bright ground).
    pub invert: bool,
}

impl BandpassParams {
    pub fn validate(&self) -> Result<()> {
        if self.object_size < 1 {
            return Err(Error::InvalidInput("object_size_W must be >= 1".into()));
        }
        if !(self.noise_level > 0.0 && self.noise_level.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "noise_level_N must be > 0, got {}",
                self.noise_level
            )));
        }
        if !(0.0..1.0).contains(&self.threshold) {
            return Err(Error::InvalidInput(format!(
                "threshold must lie in [0, 1), got {}",
                self.threshold
            )));
        }
        Ok(())
    }
}

/// Reads an image file and converts it to a `[0, 1]` grayscale frame.
pub fn load_frame(path: impl AsRef<Path>) -> Result<GrayFrame> {
    let path = path.as_ref();
    let img = image::open(path).map_err(|source| Error::Ingest {
        path: path.to_path_buf(),
        source,
    })?;
    frame_from_image(&img)
}

/// Converts a decoded image to a grayscale frame.
pub fn frame_from_image(img: &DynamicImage) -> Result<GrayFrame> {
    let (w, h) = (img.width() as usize, img.height() as usize);
    if w == 0 || h == 0 {
        return Err(Error::InvalidInput(format!(
            "image has zero dimension {w}x{h}"
        )));
    }
    let luma =
        |r: f64, g: f64, b: f64| LUMA_WEIGHTS[0] * r + LUMA_WEIGHTS[1] * g + LUMA_WEIGHTS[2] * b;
    let data: Vec<f64> = match img {
        DynamicImage::ImageLuma8(buf) => buf.pixels().map(|p| p.0[0] as f64 / 255.0).collect(),
        DynamicImage::ImageLumaA8(buf) => buf.pixels().map(|p| p.0[0] as f64 / 255.0).collect(),
        DynamicImage::ImageLuma16(buf) => buf.pixels().map(|p| p.0[0] as f64 / 65535.0).collect(),
        DynamicImage::ImageLumaA16(buf) => buf.pixels().map(|p| p.0[0] as f64 / 65535.0).collect(),
        DynamicImage::ImageRgb8(buf) => buf
            .pixels()
            .map(|p| {
                let [r, g, b] = p.0.map(|c| c as f64 / 255.0);
                luma(r, g, b)
            })
            .collect(),
        DynamicImage::ImageRgba8(buf) => buf
            .pixels()
            .map(|p| {
                luma(
                    p.0[0] as f64 / 255.0,
                    p.0[1] as f64 / 255.0,
                    p.0[2] as f64 / 255.0,
                )
            })
            .collect(),
        DynamicImage::ImageRgb16(buf) => buf
            .pixels()
            .map(|p| {
                let [r, g, b] = p.0.map(|c| c as f64 / 65535.0);
                luma(r, g, b)
            })
            .collect(),
        DynamicImage::ImageRgba16(buf) => buf
            .pixels()
            .map(|p| {
                luma(
                    p.0[0] as f64 / 65535.0,
                    p.0[1] as f64 / 65535.0,
                    p.0[2] as f64 / 65535.0,
                )
            })
            .collect(),
        other => other
            .to_rgb32f()
            .pixels()
            .map(|p| {
                let [r, g, b] = p.0.map(|c| (c as f64).clamp(0.0, 1.0));
                luma(r, g, b)
            })
            .collect(),
    };
    // Rounding in the weighted sum can overshoot 1.0 by an ulp.
    let data = data.into_iter().map(|v| v.clamp(0.0, 1.0)).collect();
    GrayFrame::new(w, h, data)
}

/// Expands an input specification into an ordered list of frame files.
///
/// Accepted forms: a directory (all `.png`/`.tif`/`.tiff` files inside), a
/// glob pattern, or a comma-separated list of explicit paths. Directory and
/// glob results are sorted lexicographically; explicit lists keep their order.
pub fn resolve_inputs(spec: &str) -> Result<Vec<PathBuf>> {
    let spec = spec.trim();
    if spec.is_empty() {
        return Err(Error::InvalidInput("input specification is empty".into()));
    }
    let path = Path::new(spec);
    let searched = if path.is_dir() {
        format!("{}", path.join("*.{png,tif,tiff}").display())
    } else {
        spec.to_string()
    };
    let mut files = if path.is_dir() {
        let entries = std::fs::read_dir(path).map_err(|e| Error::io(path, e))?;
        let mut files = Vec::new();
        for entry in entries {
            let entry = entry.map_err(|e| Error::io(path, e))?;
            let p = entry.path();
            if p.is_file() && is_frame_file(&p) {
                files.push(p);
            }
        }
        files.sort();
        files
    } else if spec.contains(['*', '?', '[']) {
        let paths =
            glob::glob(spec).map_err(|e| Error::InvalidInput(format!("bad glob '{spec}': {e}")))?;
        let mut files = Vec::new();
        for p in paths {
            let p = p.map_err(|e| Error::io(e.path().to_path_buf(), e.into()))?;
            if p.is_file() {
                files.push(p);
            }
        }
        files.sort();
        files
    } else {
        spec.split(',')
            .map(|s| PathBuf::from(s.trim()))
            .filter(|p| !p.as_os_str().is_empty())
            .collect()
    };
    files.dedup();
    if files.is_empty() {
        return Err(Error::InvalidInput(format!(
            "no frames match input '{searched}'"
        )));
    }
    Ok(files)
}

fn is_frame_file(p: &Path) -> bool {
    p.extension()
        .and_then(|e| e.to_str())
        .map(|e| matches!(e.to_ascii_lowercase().as_str(), "png" | "tif" | "tiff"))
        .unwrap_or(false)
}

/// Replaces each value `v` by `1 - v`. Values above 1 saturate at 0.
pub fn invert(frame: &GrayFrame) -> GrayFrame {
    GrayFrame::from_raw(
        frame.width,
        frame.height,
        frame.data.iter().map(|v| (1.0 - v).max(0.0)).collect(),
    )
}

/// Normalized Gaussian taps for standard deviation `sigma`, truncated at
/// `±ceil(3 sigma)`.
pub fn gaussian_kernel(sigma: f64) -> Vec<f64> {
    let half = (3.0 * sigma).ceil() as isize;
    let mut taps: Vec<f64> = (-half..=half)
        .map(|i| (-((i * i) as f64) / (2.0 * sigma * sigma)).exp())
        .collect();
    let sum: f64 = taps.iter().sum();
    taps.iter_mut().for_each(|t| *t /= sum);
    taps
}

/// Normalized boxcar taps of length `2W + 1`.
pub fn boxcar_kernel(object_size: usize) -> Vec<f64> {
    let len = 2 * object_size + 1;
    vec![1.0 / len as f64; len]
}

/// Convolves along rows (`horizontal = true`) or columns with an odd-length
/// kernel, replicating edge pixels. Taps are summed in kernel order.
pub(crate) fn convolve_1d(frame: &GrayFrame, kernel: &[f64], horizontal: bool) -> Vec<f64> {
    debug_assert!(kernel.len() % 2 == 1);
    let half = kernel.len() / 2;
    let (w, h) = (frame.width, frame.height);
    let mut out = vec![0.0; w * h];
    if horizontal {
        let mut padded = vec![0.0; w + 2 * half];
        for y in 0..h {
            let row = &frame.data[y * w..(y + 1) * w];
            padded[..half].fill(row[0]);
            padded[half..half + w].copy_from_slice(row);
            padded[half + w..].fill(row[w - 1]);
            for (x, o) in out[y * w..(y + 1) * w].iter_mut().enumerate() {
                let mut acc = 0.0;
                for (k, v) in kernel.iter().zip(&padded[x..x + kernel.len()]) {
                    acc += k * v;
                }
                *o = acc;
            }
        }
    } else {
        for y in 0..h {
            let dst = &mut out[y * w..(y + 1) * w];
            for (i, k) in kernel.iter().enumerate() {
                let src_y = (y + i).saturating_sub(half).min(h - 1);
                let src = &frame.data[src_y * w..(src_y + 1) * w];
                for (o, v) in dst.iter_mut().zip(src) {
                    *o += k * v;
                }
            }
        }
    }
    out
}

/// Applies a separable kernel (same taps along both axes) without clamping.
pub(crate) fn separable_smooth(frame: &GrayFrame, kernel: &[f64]) -> Vec<f64> {
    let rows = convolve_1d(frame, kernel, true);
    // Intermediate values are sums of nonnegative terms, so the raw wrapper is safe.
    let rows = GrayFrame::from_raw(frame.width, frame.height, rows);
    convolve_1d(&rows, kernel, false)
}

/// Gaussian smoothing minus boxcar smoothing, negative responses set to 0.
pub fn bandpass(frame: &GrayFrame, params: &BandpassParams) -> Result<GrayFrame> {
    params.validate()?;
    let support = 2 * params.object_size + 1;
    if support > frame.width.min(frame.height) {
        return Err(Error::InvalidInput(format!(
            "boxcar support {support} exceeds frame {}x{}",
            frame.width, frame.height
        )));
    }
    let smooth = separable_smooth(frame, &gaussian_kernel(params.noise_level));
    let background = separable_smooth(frame, &boxcar_kernel(params.object_size));
    let data = smooth
        .iter()
        .zip(&background)
        .map(|(s, b)| (s - b).max(0.0))
        .collect();
    Ok(GrayFrame::from_raw(frame.width, frame.height, data))
}

/// Zeroes every value below `threshold * max(frame)`; others are kept as is.
pub fn apply_threshold(frame: &GrayFrame, threshold: f64) -> GrayFrame {
    let cutoff = threshold * frame.max();
    GrayFrame::from_raw(
        frame.width,
        frame.height,
        frame
            .data
            .iter()
            .map(|&v| if v < cutoff { 0.0 } else { v })
            .collect(),
    )
}

/// Invert (if requested), band-pass and threshold. Returns the frame the
/// filters were applied to alongside the thresholded result.
pub fn preprocess(frame: &GrayFrame, params: &BandpassParams) -> Result<(GrayFrame, GrayFrame)> {
    let base = if params.invert {
        invert(frame)
    } else {
        frame.clone()
    };
    let filtered = bandpass(&base, params)?;
    let thresholded = apply_threshold(&filtered, params.threshold);
    Ok((base, thresholded))
}
