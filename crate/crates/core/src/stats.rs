//! Proportions, log-log regression and Pearson's χ² test.

use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};

/// Two-sided normal quantile for 95% intervals.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Wilson score interval for `successes / trials` at normal quantile `z`.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let phat = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (phat + z2 / (2.0 * n)) / denom;
    let half = z * (phat * (1.0 - phat) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let lo = if successes == 0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if successes == trials { 1.0 } else { (center + half).min(1.0) };
    (lo, hi)
}

/// Plug-in standard error of a proportion.
pub fn proportion_se(successes: u64, trials: u64) -> f64 {
    if trials == 0 {
        return 0.0;
    }
    let p = successes as f64 / trials as f64;
    (p * (1.0 - p) / trials as f64).sqrt()
}

/// Sample mean and its standard error.
pub fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (0.0, 0.0);
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExponentFit {
    pub slope: f64,
    pub intercept: f64,
    pub stderr: f64,
    pub r_squared: f64,
    pub points: Vec<(f64, f64)>,
}

/// Least squares of `ln y` on `ln x`.
pub fn fit_power_law(points: &[(f64, f64)]) -> Result<ExponentFit> {
    if points.len() < 3 {
        return Err(Error::domain("a power-law fit needs at least 3 points"));
    }
    if points.iter().any(|&(x, y)| !(x > 0.0 && y > 0.0)) {
        return Err(Error::domain("power-law fit needs positive x and y"));
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = logs.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::domain("power-law fit needs distinct x values"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = logs
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum();
    let stderr = (sse.max(0.0) / (n - 2.0) / sxx).sqrt();
    let r_squared = if syy == 0.0 { 1.0 } else { 1.0 - sse / syy };
    Ok(ExponentFit {
        slope,
        intercept,
        stderr,
        r_squared,
        points: points.to_vec(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChiSquare {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

/// Pearson's test of a histogram against an exact pmf.
///
/// `observed[k]` counts outcome `k`; `pmf[k]` is its probability. Any mass
/// missing from `pmf` forms a tail bin that also collects observations at
/// `k >= pmf.len()`. Adjacent bins are merged left to right until each has
/// expected count at least `min_expected`; a short remainder joins the last
/// group.
pub fn chi_square_compare(observed: &[u64], pmf: &[f64], min_expected: f64) -> Result<ChiSquare> {
    let total: u64 = observed.iter().sum();
    if total == 0 {
        return Err(Error::domain("empty histogram"));
    }
    let mass: f64 = pmf.iter().sum();
    if pmf.iter().any(|&q| !(0.0..=1.0 + 1e-9).contains(&q)) || mass > 1.0 + 1e-9 {
        return Err(Error::domain("pmf entries must be probabilities summing to at most 1"));
    }
    let t = total as f64;
    let mut bins: Vec<(f64, f64)> = pmf
        .iter()
        .enumerate()
        .map(|(k, &q)| (observed.get(k).copied().unwrap_or(0) as f64, q * t))
        .collect();
    let tail_obs: u64 = observed.iter().skip(pmf.len()).sum();
    let tail_exp = (1.0 - mass).max(0.0) * t;
    if tail_obs > 0 || tail_exp > 1e-12 * t {
        bins.push((tail_obs as f64, tail_exp));
    }

    let mut groups: Vec<(f64, f64)> = Vec::new();
    let mut acc = (0.0, 0.0);
    for (o, e) in bins {
        acc.0 += o;
        acc.1 += e;
        if acc.1 >= min_expected {
            groups.push(acc);
            acc = (0.0, 0.0);
        }
    }
    if acc.0 > 0.0 || acc.1 > 0.0 {
        match groups.last_mut() {
            Some(last) => {
                last.0 += acc.0;
                last.1 += acc.1;
            }
            None => groups.push(acc),
        }
    }
    if groups.len() < 2 {
        return Err(Error::domain("chi-square needs at least two bins after merging"));
    }
    let mut statistic = 0.0;
    for &(o, e) in &groups {
        if e <= 0.0 {
            if o > 0.0 {
                return Ok(ChiSquare {
                    statistic: f64::INFINITY,
                    dof: groups.len() - 1,
                    p_value: 0.0,
                });
            }
            continue;
        }
        statistic += (o - e).powi(2) / e;
    }
    let dof = groups.len() - 1;
    let dist = ChiSquared::new(dof as f64).expect("positive degrees of freedom");
    Ok(ChiSquare {
        statistic,
        dof,
        p_value: dist.sf(statistic),
    })
}
