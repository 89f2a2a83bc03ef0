use serde::Serialize;

use super::{estimate_spine_mean, estimate_window, Point, SpineSampling};
use crate::error::Result;
use crate::stats::{fit_power_law, ExponentFit};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExponentsConfig {
    /// Sizes for the window and critical-spine fits.
    pub n: Vec<u32>,
    /// Size and supercritical offsets `ε` for the order-parameter fit.
    pub beta_n: u32,
    pub beta_eps: Vec<f64>,
    pub trials: u64,
    pub delta: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Exponents {
    /// Slope of `E|S| / 2n` against `ε`.
    pub beta: ExponentFit,
    /// Slope of the window width against `n`.
    pub gamma_proxy: ExponentFit,
    /// Slope `s` of critical `E|S|` against `n`.
    pub critical_spine: ExponentFit,
    /// `s / (1 - s)`.
    pub delta: f64,
}

pub fn estimate_exponents(config: &ExponentsConfig) -> Result<Exponents> {
    let mut beta_pts = Vec::new();
    for &eps in &config.beta_eps {
        let n = config.beta_n;
        let m = ((1.0 + eps) * n as f64).round() as u64;
        let s = estimate_spine_mean(&Point::Fnm { n, m }, config.trials, SpineSampling::Exact, config.seed)?;
        beta_pts.push((eps, s.mean / (2.0 * n as f64)));
    }
    let mut window_pts = Vec::new();
    let mut spine_pts = Vec::new();
    for &n in &config.n {
        let w = estimate_window(n, config.delta, config.trials, config.seed, 1e-6)?;
        window_pts.push((n as f64, w.width));
        let s = estimate_spine_mean(&Point::Fnm { n, m: n as u64 }, config.trials, SpineSampling::Exact, config.seed)?;
        spine_pts.push((n as f64, s.mean));
    }
    let critical_spine = fit_power_law(&spine_pts)?;
    let s = critical_spine.slope;
    Ok(Exponents {
        beta: fit_power_law(&beta_pts)?,
        gamma_proxy: fit_power_law(&window_pts)?,
        delta: s / (1.0 - s),
        critical_spine,
    })
}
