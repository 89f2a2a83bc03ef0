use std::collections::HashSet;

use rand::Rng;
use serde::Serialize;

use super::par_trials;
use crate::error::{Error, Result};
use crate::formula::{clause_universe_size, Clause};
use crate::seed::{mix, trial_rng};
use crate::spine::IncrementalSpine;
use crate::stats::{wilson_interval, Z95};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WindowEstimate {
    pub n: u32,
    pub delta: f64,
    pub trials: u64,
    /// Largest tested `α = m/n` whose lower Wilson bound on `Pr(SAT)` is at
    /// least `1 - δ`.
    pub alpha_minus: f64,
    /// Smallest tested `α` whose upper Wilson bound is at most `δ`.
    pub alpha_plus: f64,
    pub width: f64,
    /// Distance from each end to the point-estimate crossing, plus the
    /// unresolved bisection interval.
    pub radius_minus: f64,
    pub radius_plus: f64,
}

/// For each trial, the number of clauses of a uniformly random clause order
/// that can be taken before the formula turns UNSAT. `F(n,m)` is the first
/// `m` clauses, so `Pr(F(n,m) SAT)` is the fraction of thresholds `≥ m`.
pub fn clause_order_thresholds(n: u32, trials: u64, seed: u64) -> Result<Vec<u64>> {
    if n < 2 {
        return Err(Error::domain("window estimation needs n >= 2"));
    }
    let universe = clause_universe_size(n);
    let point = mix(&[3, n as u64]);
    par_trials(trials, |i| {
        let mut rng = trial_rng(seed, point, i);
        let mut spine = IncrementalSpine::new(n);
        let mut seen = HashSet::new();
        loop {
            let idx = rng.random_range(0..universe);
            if !seen.insert(idx) {
                continue;
            }
            let c = Clause::from_index(idx);
            if spine.would_break(c) {
                return Ok(spine.num_clauses() as u64);
            }
            spine.add_clause(c);
        }
    })
}

/// Bisection over integer `m` in `[lo, hi]`, where `pred` holds at `lo`,
/// fails at `hi`, and is monotone. Returns the final bracket.
fn bisect(mut lo: u64, mut hi: u64, stop: impl Fn(u64, u64) -> bool, pred: impl Fn(u64) -> bool) -> (u64, u64) {
    while hi - lo > 1 && !stop(lo, hi) {
        let mid = lo + (hi - lo) / 2;
        if pred(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo, hi)
}

/// Window ends from a sample of thresholds. `resolution` is the relative
/// precision in `α` at which bisection stops.
pub fn window_from_thresholds(
    n: u32,
    delta: f64,
    thresholds: &[u64],
    resolution: f64,
) -> Result<WindowEstimate> {
    if !(delta > 0.0 && delta < 0.5) {
        return Err(Error::domain(format!("delta must lie in (0, 1/2), got {delta}")));
    }
    let trials = thresholds.len() as u64;
    let mut sorted = thresholds.to_vec();
    sorted.sort_unstable();
    let sat_at = |m: u64| trials - sorted.partition_point(|&t| t < m) as u64;
    let lower = |m: u64| wilson_interval(sat_at(m), trials, Z95).0;
    let upper = |m: u64| wilson_interval(sat_at(m), trials, Z95).1;
    if trials == 0 || lower(0) < 1.0 - delta {
        return Err(Error::domain("too few trials to certify Pr(SAT) >= 1 - delta at m = 0"));
    }
    let top = sorted.last().copied().unwrap_or(0) + 1;
    if upper(top) > delta {
        return Err(Error::domain("too few trials to certify Pr(SAT) <= delta"));
    }
    let nf = n as f64;
    let stop = |lo: u64, hi: u64| (hi - lo) as f64 <= resolution * hi as f64;

    let (m_lo, m_gap) = bisect(0, top, stop, |m| lower(m) >= 1.0 - delta);
    let (p_gap, p_hi) = bisect(0, top, stop, |m| upper(m) > delta);
    let point_minus = bisect(0, top, |_, _| false, |m| sat_at(m) as f64 >= (1.0 - delta) * trials as f64).0;
    let point_plus = bisect(0, top, |_, _| false, |m| sat_at(m) as f64 > delta * trials as f64).1;

    let alpha_minus = m_lo as f64 / nf;
    let alpha_plus = p_hi as f64 / nf;
    Ok(WindowEstimate {
        n,
        delta,
        trials,
        alpha_minus,
        alpha_plus,
        width: alpha_plus - alpha_minus,
        radius_minus: (point_minus.abs_diff(m_lo) + (m_gap - m_lo - 1)) as f64 / nf,
        radius_plus: (point_plus.abs_diff(p_hi) + (p_hi - p_gap - 1)) as f64 / nf,
    })
}

/// Estimates the scaling window `W(n, δ)` from `trials` coupled clause
/// orders.
pub fn estimate_window(n: u32, delta: f64, trials: u64, seed: u64, resolution: f64) -> Result<WindowEstimate> {
    if !(delta > 0.0 && delta < 0.5) {
        return Err(Error::domain(format!("delta must lie in (0, 1/2), got {delta}")));
    }
    let thresholds = clause_order_thresholds(n, trials, seed)?;
    window_from_thresholds(n, delta, &thresholds, resolution)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::sample_fnm;
    use crate::is_satisfiable;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn ends_bracket_by_hand() {
        // Thresholds 10..=109: Pr(SAT at m) = (110 - m) / 100 for m in 10..=110.
        let t: Vec<u64> = (10..110).collect();
        let w = window_from_thresholds(100, 0.4, &t, 0.0).unwrap();
        let lo = |m: u64| wilson_interval(110 - m, 100, Z95).0;
        let hi = |m: u64| wilson_interval(110 - m, 100, Z95).1;
        let m_minus = (10..=110).filter(|&m| lo(m) >= 0.6).max().unwrap();
        let m_plus = (10..=110).filter(|&m| hi(m) <= 0.4).min().unwrap();
        assert_eq!(w.alpha_minus, m_minus as f64 / 100.0);
        assert_eq!(w.alpha_plus, m_plus as f64 / 100.0);
        assert!(w.alpha_minus < w.alpha_plus);
        // Point crossings are m = 50 and m = 70.
        assert!((w.radius_minus - (50 - m_minus) as f64 / 100.0).abs() < 1e-12);
        assert!((w.radius_plus - (m_plus - 70) as f64 / 100.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(window_from_thresholds(10, 0.5, &[3, 4], 0.0).is_err());
        assert!(window_from_thresholds(10, 0.4, &[3], 0.0).is_err());
        assert!(estimate_window(1, 0.4, 10, 1, 0.0).is_err());
    }

    #[test]
    fn thresholds_match_prefix_satisfiability() {
        // The same law as sampling F(n,m) directly.
        let n = 30;
        let t = clause_order_thresholds(n, 4000, 11).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for m in [25u64, 35, 45] {
            let emp = t.iter().filter(|&&x| x >= m).count() as f64 / 4000.0;
            let direct = (0..4000)
                .filter(|_| is_satisfiable(&sample_fnm(n, m, &mut rng).unwrap()))
                .count() as f64
                / 4000.0;
            let se = (emp * (1.0 - emp) / 2000.0).sqrt().max(1e-3);
            assert!((emp - direct).abs() < 4.0 * se, "m={m}: {emp} vs {direct}");
        }
    }

    #[test]
    fn window_is_ordered_and_order_one_in_rescaled_units() {
        let w = estimate_window(512, 0.4, 400, 2, 1e-4).unwrap();
        assert!(w.alpha_minus < w.alpha_plus);
        let scale = 512f64.cbrt();
        let center = ((w.alpha_minus + w.alpha_plus) / 2.0 - 1.0) * scale;
        assert!((0.5..3.0).contains(&center), "{w:?}");
        assert!((0.2..2.0).contains(&(w.width * scale)), "{w:?}");
        let coarse = estimate_window(512, 0.4, 400, 2, 0.05).unwrap();
        assert!(coarse.alpha_minus <= w.alpha_minus && coarse.alpha_plus >= w.alpha_plus);
        assert!(coarse.radius_minus >= w.radius_minus);
    }
}
