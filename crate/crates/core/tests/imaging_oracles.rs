//! Band-pass and Sobel filters against direct two-dimensional convolution.

mod common;

use common::{gaussian_2d, naive_bandpass, naive_sobel, random_frame};
use graphtrack::detection::sobel;
use graphtrack::imaging::{bandpass, BandpassParams, GrayFrame};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn assert_close(got: &[f64], want: &[f64], rel: f64) {
    assert_eq!(got.len(), want.len());
    let scale = want
        .iter()
        .fold(0.0f64, |m, v| m.max(v.abs()))
        .max(f64::MIN_POSITIVE);
    for (k, (g, w)) in got.iter().zip(want).enumerate() {
        assert!(
            (g - w).abs() <= rel * w.abs().max(scale),
            "pixel {k}: {g} vs {w}"
        );
    }
}

fn params(w: usize, sigma: f64) -> BandpassParams {
    BandpassParams {
        object_size: w,
        noise_level: sigma,
        threshold: 0.0,
        invert: false,
    }
}

#[test]
fn bandpass_matches_direct_convolution() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let (w, h) = (rng.random_range(16..40), rng.random_range(16..40));
        let f = random_frame(&mut rng, w, h);
        let object_size = rng.random_range(1..=7);
        let sigma = rng.random_range(0.5..2.0);
        let got = bandpass(&f, &params(object_size, sigma)).unwrap();
        assert_close(got.data(), &naive_bandpass(&f, object_size, sigma), 1e-9);
    }
}

#[test]
fn sobel_matches_direct_convolution() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..20 {
        let (w, h) = (rng.random_range(3..40), rng.random_range(3..40));
        let f = random_frame(&mut rng, w, h);
        let got = sobel(&f).unwrap();
        assert_close(got.data(), &naive_sobel(&f), 1e-9);
    }
}

#[test]
fn impulse_response_is_gaussian_minus_box() {
    let (size, w, sigma) = (41usize, 4usize, 1.0);
    let c = size / 2;
    let f = GrayFrame::from_fn(size, size, |x, y| if (x, y) == (c, c) { 1.0 } else { 0.0 });
    let out = bandpass(&f, &params(w, sigma)).unwrap();
    let g = gaussian_2d(sigma);
    let gh = (g.len() / 2) as isize;
    let b = 1.0 / ((2 * w + 1) * (2 * w + 1)) as f64;
    for y in 0..size {
        for x in 0..size {
            let (dx, dy) = (x as isize - c as isize, y as isize - c as isize);
            let gv = if dx.abs() <= gh && dy.abs() <= gh {
                g[(dy + gh) as usize][(dx + gh) as usize]
            } else {
                0.0
            };
            let bv = if dx.unsigned_abs() <= w && dy.unsigned_abs() <= w {
                b
            } else {
                0.0
            };
            let want = (gv - bv).max(0.0);
            assert!((out.get(x, y) - want).abs() < 1e-12, "({dx}, {dy})");
        }
    }
    // Only the Gaussian core survives.
    assert!(out.get(c, c) > 0.0);
    assert_eq!(out.get(c + w + 1, c), 0.0);
}

fn frame_strategy() -> impl Strategy<Value = GrayFrame> {
    (12usize..30, 12usize..30).prop_flat_map(|(w, h)| {
        prop::collection::vec(0.0f64..1.0, w * h)
            .prop_map(move |data| GrayFrame::new(w, h, data).unwrap())
    })
}

proptest! {
    #[test]
    fn filters_are_positively_homogeneous(f in frame_strategy(), k in 0.1f64..10.0) {
        let p = params(3, 1.0);
        let base = bandpass(&f, &p).unwrap();
        let scaled = bandpass(&f.scaled(k), &p).unwrap();
        for (a, b) in base.data().iter().zip(scaled.data()) {
            prop_assert!((a * k - b).abs() <= 1e-12 * (1.0 + b.abs()));
        }
        let base = sobel(&f).unwrap();
        let scaled = sobel(&f.scaled(k)).unwrap();
        for (a, b) in base.data().iter().zip(scaled.data()) {
            prop_assert!((a * k - b).abs() <= 1e-12 * (1.0 + b.abs()));
        }
    }

    #[test]
    fn filters_commute_with_translation(f in frame_strategy(), dx in 0usize..4, dy in 0usize..4) {
        let (w, h) = (f.width(), f.height());
        let shifted = GrayFrame::from_fn(w, h, |x, y| f.get(x.saturating_sub(dx), y.saturating_sub(dy)));
        let p = params(2, 0.8);
        let reach = 3;
        let a = bandpass(&f, &p).unwrap();
        let b = bandpass(&shifted, &p).unwrap();
        let sa = sobel(&f).unwrap();
        let sb = sobel(&shifted).unwrap();
        // Away from the borders the clamped edges play no part.
        for y in reach..h.saturating_sub(reach + dy) {
            for x in reach..w.saturating_sub(reach + dx) {
                prop_assert!((a.get(x, y) - b.get(x + dx, y + dy)).abs() < 1e-12);
                prop_assert!((sa.get(x, y) - sb.get(x + dx, y + dy)).abs() < 1e-12);
            }
        }
    }
}
