//! Mobility fit optimality and coverage, plausibility split properties and
//! planted kinematics.

mod common;

use common::chi_squared_change;
use graphtrack::detection::DetectedObject;
use graphtrack::trajectory::{
    chi_squared, estimate_mobility, fit_mobility, kinematics, observations, plausible_fragments,
    FragmentStats, PlausibilityLimits, Trajectory,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

fn random_trajectory(rng: &mut impl Rng) -> Trajectory {
    let n = rng.random_range(2..30);
    let (mut x, mut y) = (rng.random_range(0.0..100.0), rng.random_range(0.0..100.0));
    let objects = (0..n)
        .map(|m| {
            let o = DetectedObject::at(m, x, y, rng.random_range(1.0..8.0));
            x += rng.random_range(-12.0..12.0);
            y += rng.random_range(-12.0..12.0);
            o
        })
        .collect();
    Trajectory::new(objects).unwrap()
}

#[test]
fn closed_form_mobility_minimizes_chi_squared() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for k in 0..50 {
        let t = random_trajectory(&mut rng);
        let c = rng.random_range(0.2..5.0) * if rng.random_bool(0.2) { -1.0 } else { 1.0 };
        let obs = observations(&t, rng.random_range(0.2..2.0)).unwrap();
        let fit = fit_mobility(&obs, c).unwrap();
        for delta in [1e-6, -1e-6] {
            let change = chi_squared_change(&obs, fit.mu, delta, c);
            assert!(
                change >= 0.0,
                "trajectory {k}: chi-squared drops by {}",
                -change
            );
        }
        // The difference form agrees with the direct sums where they resolve it.
        for delta in [0.5, -0.5] {
            let direct = chi_squared(&obs, fit.mu + delta, c) - chi_squared(&obs, fit.mu, c);
            let change = chi_squared_change(&obs, fit.mu, delta, c);
            assert!((direct - change).abs() <= 1e-9 * (1.0 + direct.abs()));
        }
    }
}

#[test]
fn planted_mobility_recovered_within_two_sigma() {
    // mu C = R s = 50 with R = 5 px and s = 10 px, 19 segments. Steps and
    // radii each carry independent N(0, 1 px) noise.
    let (r_true, s_true, c) = (5.0, 10.0, 1.0);
    let mu_true = r_true * s_true / c;
    let noise = Normal::new(0.0, 1.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let replicates = 100;
    let mut covered = 0;
    for _ in 0..replicates {
        let mut x = 0.0;
        let objects: Vec<_> = (0..20)
            .map(|m| {
                let o = DetectedObject::at(m, x, 0.0, r_true + noise.sample(&mut rng));
                x += s_true + noise.sample(&mut rng);
                o
            })
            .collect();
        let t = Trajectory::new(objects).unwrap();
        let e = estimate_mobility(&t, c, 1.0).unwrap();
        assert_eq!(e.n_segments, 19);
        if (e.mu - mu_true).abs() <= 2.0 * e.sigma_mu {
            covered += 1;
        }
    }
    assert!(covered >= 90, "{covered} of {replicates} within 2 sigma");
}

#[test]
fn planted_speed_and_diameter() {
    // 4 px per frame at 2 frames/s and 0.5 units/px gives 4 units/s.
    let objects = (0..10)
        .map(|m| {
            DetectedObject::at(
                m,
                3.0 + 4.0 * 0.6 * m as f64,
                7.0 + 4.0 * 0.8 * m as f64,
                3.0,
            )
        })
        .collect();
    let t = Trajectory::new(objects).unwrap();
    let k = kinematics(&t, 2.0, 0.5).unwrap();
    assert!((k.mean_velocity - 4.0).abs() < 1e-12);
    assert!(k.std_velocity < 1e-12);
    assert!((k.mean_diameter - 3.0).abs() < 1e-12);
}

fn wobbly_path() -> impl Strategy<Value = Vec<DetectedObject>> {
    (
        prop::collection::vec((2.0f64..15.0, -60.0f64..60.0, 1.0f64..6.0), 2..25),
        0.0f64..360.0,
    )
        .prop_map(|(steps, heading)| {
            let (mut x, mut y) = (0.0, 0.0);
            steps
                .into_iter()
                .enumerate()
                .map(|(m, (len, turn, r))| {
                    let o = DetectedObject::at(m, x, y, r);
                    let a = (heading + turn).to_radians();
                    x += len * a.cos();
                    y += len * a.sin();
                    o
                })
                .collect()
        })
}

proptest! {
    #[test]
    fn fragments_are_plausible_and_disjoint(path in wobbly_path(), min_len in 2usize..6) {
        let limits = PlausibilityLimits::default();
        let ranges = plausible_fragments(&path, &limits, min_len);
        let mut end = 0;
        for r in &ranges {
            prop_assert!(r.start >= end);
            prop_assert!(r.len() >= min_len);
            prop_assert!(FragmentStats::measure(&path[r.clone()]).within(&limits));
            end = r.end;
        }
        prop_assert!(end <= path.len());
    }

    #[test]
    fn fragments_are_stable_under_resplitting(path in wobbly_path()) {
        let limits = PlausibilityLimits::default();
        for r in plausible_fragments(&path, &limits, 2) {
            let piece = &path[r.clone()];
            prop_assert_eq!(plausible_fragments(piece, &limits, 2), vec![0..piece.len()]);
        }
    }

    #[test]
    fn turned_concatenation_splits_at_the_joint(
        n_a in 3usize..12,
        n_b in 3usize..12,
        heading in 0.0f64..360.0,
        turn in 60.0f64..120.0,
        step in 3.0f64..12.0,
    ) {
        // Leg A heads along `heading`, leg B continues from A's last object
        // after turning by `turn` degrees.
        let mut objects = Vec::new();
        let (mut x, mut y) = (0.0, 0.0);
        for m in 0..n_a + n_b {
            objects.push(DetectedObject::at(m, x, y, 3.0));
            let a = if m + 1 < n_a { heading } else { heading + turn }.to_radians();
            x += step * a.cos();
            y += step * a.sin();
        }
        let ranges = plausible_fragments(&objects, &PlausibilityLimits::default(), 2);
        prop_assert_eq!(ranges, vec![0..n_a, n_a..n_a + n_b]);
    }
}
