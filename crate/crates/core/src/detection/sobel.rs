use crate::error::{Error, Result};
use crate::imaging::GrayFrame;

/// Gradient magnitude of a frame.
#[derive(Clone, Debug, PartialEq)]
pub struct SobelFrame {
    width: usize,
    height: usize,
    magnitude: Vec<f64>,
}

impl SobelFrame {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.magnitude[y * self.width + x]
    }

    pub fn data(&self) -> &[f64] {
        &self.magnitude
    }
}

/// Horizontal Sobel kernel, row-major; the vertical kernel is its transpose.
pub const SOBEL_X: [[f64; 3]; 3] = [[-1.0, 0.0, 1.0], [-2.0, 0.0, 2.0], [-1.0, 0.0, 1.0]];

/// Gradient magnitude at one pixel; `p(dx, dy)` reads the 3x3 neighbourhood
/// with `(1, 1)` at the centre.
#[inline]
fn gradient(p: impl Fn(usize, usize) -> f64) -> f64 {
    let gx = (p(2, 0) + 2.0 * p(2, 1) + p(2, 2)) - (p(0, 0) + 2.0 * p(0, 1) + p(0, 2));
    let gy = (p(0, 2) + 2.0 * p(1, 2) + p(2, 2)) - (p(0, 0) + 2.0 * p(1, 0) + p(2, 0));
    gx.hypot(gy)
}

/// `sqrt(Gx^2 + Gy^2)` with the 3x3 Sobel pair and replicated borders.
pub fn sobel(frame: &GrayFrame) -> Result<SobelFrame> {
    let (w, h) = (frame.width(), frame.height());
    if w < 3 || h < 3 {
        return Err(Error::InvalidInput(format!(
            "sobel needs at least 3x3 pixels, got {w}x{h}"
        )));
    }
    let mut magnitude = vec![0.0; w * h];
    let data = frame.data();
    for y in 0..h {
        let interior_row = y > 0 && y + 1 < h;
        for x in 0..w {
            magnitude[y * w + x] = if interior_row && x > 0 && x + 1 < w {
                let p = |dx: usize, dy: usize| data[(y + dy - 1) * w + x + dx - 1];
                gradient(p)
            } else {
                let (xi, yi) = (x as isize, y as isize);
                gradient(|dx, dy| frame.get_clamped(xi + dx as isize - 1, yi + dy as isize - 1))
            };
        }
    }
    Ok(SobelFrame {
        width: w,
        height: h,
        magnitude,
    })
}
