//! Weighted least-squares estimate of the mobility from `y = R * s`.
//!
//! Each segment contributes `y = R * s` with the radius of its first object.
//! Errors on `s` and `R` are taken as fully correlated with a common pixel
//! sigma, so `sigma_y = sigma * (s + R)`. The model `y = mu * C` then has
//! the closed-form minimizer of the chi-squared sum given by the weighted
//! mean of `y`, divided by `C`.

use serde::Serialize;

use super::Trajectory;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Observation {
    pub y: f64,
    pub sigma_y: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MobilityEstimate {
    pub mu: f64,
    pub sigma_mu: f64,
    #[serde(rename = "C_constant")]
    pub c_constant: f64,
    pub n_segments: usize,
}

/// One observation per segment of `traj`.
pub fn observations(traj: &Trajectory, pixel_sigma: f64) -> Result<Vec<Observation>> {
    if !(pixel_sigma > 0.0) || !pixel_sigma.is_finite() {
        return Err(Error::InvalidInput(format!(
            "pixel sigma must be > 0, got {pixel_sigma}"
        )));
    }
    traj.objects()
        .windows(2)
        .enumerate()
        .map(|(m, w)| {
            let r = w[0].radius;
            let s = w[0].center.distance(&w[1].center);
            let sigma_y = pixel_sigma * (s + r);
            if !(sigma_y > 0.0) {
                return Err(Error::DegenerateErrorModel { segment: m });
            }
            Ok(Observation { y: r * s, sigma_y })
        })
        .collect()
}

/// Closed-form fit of `y = mu * C`.
pub fn fit_mobility(obs: &[Observation], c: f64) -> Result<MobilityEstimate> {
    if obs.is_empty() {
        return Err(Error::InvalidInput(
            "mobility fit needs at least one segment".into(),
        ));
    }
    if c == 0.0 || !c.is_finite() {
        return Err(Error::InvalidInput(format!(
            "C must be finite and nonzero, got {c}"
        )));
    }
    let mut weighted = 0.0;
    let mut weights = 0.0;
    for (m, o) in obs.iter().enumerate() {
        if !(o.sigma_y > 0.0) {
            return Err(Error::DegenerateErrorModel { segment: m });
        }
        let w = o.sigma_y.powi(-2);
        weighted += o.y * w;
        weights += w;
    }
    Ok(MobilityEstimate {
        mu: weighted / weights / c,
        sigma_mu: 1.0 / (c.abs() * weights.sqrt()),
        c_constant: c,
        n_segments: obs.len(),
    })
}

/// `sum ((y - mu C) / sigma_y)^2`.
pub fn chi_squared(obs: &[Observation], mu: f64, c: f64) -> f64 {
    obs.iter()
        .map(|o| ((o.y - mu * c) / o.sigma_y).powi(2))
        .sum()
}

pub fn estimate_mobility(traj: &Trajectory, c: f64, pixel_sigma: f64) -> Result<MobilityEstimate> {
    fit_mobility(&observations(traj, pixel_sigma)?, c)
}
