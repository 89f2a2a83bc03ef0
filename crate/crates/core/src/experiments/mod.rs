//! Monte Carlo estimators over the random 2-SAT ensembles.
//!
//! Trial `i` at a point draws its randomness from
//! `trial_seed(master, point.id(), i)`, and results are merged in trial
//! order, so every estimate is a pure function of its arguments whatever the
//! number of worker threads.

mod exponents;
mod reduced;
mod sweep;
mod window;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytics::{m_for_p, p_for_m};
use crate::digraph::{Bfs, Condensation, ImplicationDigraph};
use crate::error::{Error, Result};
use crate::formula::{sample_fnm, sample_fnp, BirthdayProcess, Formula, Literal};
use crate::seed::{mix, trial_rng};
use crate::spine::{spine_membership, spine_of, Membership};
use crate::stats::{mean_se, proportion_se, wilson_interval, Z95};

pub use crate::stats::{fit_power_law, ExponentFit};
pub use exponents::{estimate_exponents, Exponents, ExponentsConfig};
pub use reduced::{sat_probability_reduced, ReducedEstimate};
pub use sweep::{run_sweep, sweep_csv, sweep_json, write_sweep, Axis, Format, SweepConfig, SweepRow, CSV_HEADER};
pub use window::{clause_order_thresholds, estimate_window, window_from_thresholds, WindowEstimate};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Fnm,
    Fnp,
}

/// One point of an ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Point {
    Fnm { n: u32, m: u64 },
    Fnp { n: u32, p: f64 },
}

impl Point {
    pub fn n(&self) -> u32 {
        match *self {
            Point::Fnm { n, .. } | Point::Fnp { n, .. } => n,
        }
    }

    /// Clause count, or its nearest integer expectation for `F(n,p)`.
    pub fn m(&self) -> u64 {
        match *self {
            Point::Fnm { m, .. } => m,
            Point::Fnp { n, p } => m_for_p(n, p),
        }
    }

    /// Clause probability, or `m / N` for `F(n,m)`.
    pub fn p(&self) -> f64 {
        match *self {
            Point::Fnm { n, m } => p_for_m(n, m),
            Point::Fnp { p, .. } => p,
        }
    }

    /// `λ` with `m / n = 1 + λ n^(-1/3)` (or `2np` in place of `m / n`).
    pub fn lambda(&self) -> f64 {
        let n = self.n() as f64;
        let ratio = match *self {
            Point::Fnm { m, .. } => m as f64 / n,
            Point::Fnp { p, .. } => 2.0 * n * p,
        };
        (ratio - 1.0) * n.cbrt()
    }

    /// Stable identifier used for seeding.
    pub fn id(&self) -> u64 {
        match *self {
            Point::Fnm { n, m } => mix(&[1, n as u64, m]),
            Point::Fnp { n, p } => mix(&[2, n as u64, p.to_bits()]),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Formula> {
        match *self {
            Point::Fnm { n, m } => sample_fnm(n, m, rng),
            Point::Fnp { n, p } => sample_fnp(n, p, rng),
        }
    }

    /// The formula at this point of a birthday process.
    pub fn from_process(&self, process: &mut BirthdayProcess) -> Result<Formula> {
        match *self {
            Point::Fnm { m, .. } => process.first_clauses(m),
            Point::Fnp { p, .. } => Ok(process.formula_at(p)),
        }
    }
}

/// Runs `f` on `workers` threads, or on the global pool when `None`.
pub fn with_workers<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match workers {
        None => Ok(f()),
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w.max(1))
                .build()
                .map_err(|e| Error::Domain(e.to_string()))?;
            Ok(pool.install(f))
        }
    }
}

/// Maps trial indices `0..trials` in parallel, keeping index order.
pub(crate) fn par_trials<T, F>(trials: u64, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync + Send,
{
    (0..trials).into_par_iter().map(f).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SatEstimate {
    pub successes: u64,
    pub trials: u64,
    pub estimate: f64,
    pub se: f64,
    /// 95% Wilson interval.
    pub lo: f64,
    pub hi: f64,
}

impl SatEstimate {
    pub fn from_counts(successes: u64, trials: u64) -> Self {
        let (lo, hi) = wilson_interval(successes, trials, Z95);
        SatEstimate {
            successes,
            trials,
            estimate: if trials == 0 { 0.0 } else { successes as f64 / trials as f64 },
            se: proportion_se(successes, trials),
            lo,
            hi,
        }
    }
}

/// Fraction of `trials` independent formulas at `point` that are satisfiable.
pub fn estimate_sat_probability(point: &Point, trials: u64, seed: u64) -> Result<SatEstimate> {
    if trials == 0 {
        return Err(Error::domain("trials must be at least 1"));
    }
    let id = point.id();
    let sat = par_trials(trials, |i| {
        let f = point.sample(&mut trial_rng(seed, id, i))?;
        Ok(crate::digraph::is_satisfiable(&f))
    })?;
    Ok(SatEstimate::from_counts(sat.iter().filter(|&&s| s).count() as u64, trials))
}

/// How spine sizes are measured per trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpineSampling {
    /// The whole spine.
    Exact,
    /// `per_trial` uniform literals each tested for `x ⇝ x̄`, with the search
    /// capped at `cap` visited literals (default [`default_cap`]).
    Literals { per_trial: usize, cap: Option<usize> },
}

/// `50 n^(2/3)`.
pub fn default_cap(n: u32) -> usize {
    (50.0 * (n as f64).powf(2.0 / 3.0)).ceil() as usize
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpineEstimate {
    /// Estimate of `E|S|`.
    pub mean: f64,
    pub se: f64,
    pub trials: u64,
    /// Literal queries that ended in each outcome (zero for exact runs).
    pub members: u64,
    pub non_members: u64,
    pub undetermined: u64,
}

/// Per-trial spine measurement: exact size, or sampled member counts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum SpineTrial {
    Exact(usize),
    Sampled { members: u64, non_members: u64, undetermined: u64 },
}

pub(crate) fn spine_trial<R: Rng + ?Sized>(
    d: &ImplicationDigraph,
    cond: Option<&Condensation>,
    sampling: SpineSampling,
    rng: &mut R,
) -> SpineTrial {
    match sampling {
        SpineSampling::Exact => SpineTrial::Exact(match cond {
            Some(c) => spine_of(d, c).size(),
            None => spine_of(d, &d.condensation()).size(),
        }),
        SpineSampling::Literals { per_trial, cap } => {
            let v = d.num_vertices();
            let cap = cap.unwrap_or_else(|| default_cap(d.n()));
            let mut bfs = Bfs::new(v);
            let (mut members, mut non_members, mut undetermined) = (0, 0, 0);
            for _ in 0..per_trial {
                if v == 0 {
                    break;
                }
                let x = Literal::from_code(rng.random_range(0..v));
                match spine_membership(d, x, Some(cap), &mut bfs) {
                    Membership::Member => members += 1,
                    Membership::NonMember => non_members += 1,
                    Membership::Undetermined => undetermined += 1,
                }
            }
            SpineTrial::Sampled { members, non_members, undetermined }
        }
    }
}

/// Combines per-trial measurements into an estimate of `E|S|`. Sampled runs
/// use the ratio estimator `2n · members / (members + non_members)` with a
/// between-trial standard error; undetermined queries are left out of both
/// counts and reported.
pub(crate) fn combine_spine(n: u32, trials: &[SpineTrial]) -> SpineEstimate {
    let two_n = 2.0 * n as f64;
    let mut est = SpineEstimate {
        mean: 0.0,
        se: 0.0,
        trials: trials.len() as u64,
        members: 0,
        non_members: 0,
        undetermined: 0,
    };
    let exact: Vec<f64> = trials
        .iter()
        .filter_map(|t| match t {
            SpineTrial::Exact(s) => Some(*s as f64),
            _ => None,
        })
        .collect();
    if exact.len() == trials.len() {
        (est.mean, est.se) = mean_se(&exact);
        return est;
    }
    let mut pairs = Vec::with_capacity(trials.len());
    for t in trials {
        if let SpineTrial::Sampled { members, non_members, undetermined } = *t {
            est.members += members;
            est.non_members += non_members;
            est.undetermined += undetermined;
            pairs.push((members as f64, (members + non_members) as f64));
        }
    }
    let determined = (est.members + est.non_members) as f64;
    if determined == 0.0 {
        est.mean = f64::NAN;
        est.se = f64::NAN;
        return est;
    }
    let ratio = est.members as f64 / determined;
    est.mean = two_n * ratio;
    let k = pairs.len() as f64;
    if k > 1.0 {
        let dbar = determined / k;
        let ss: f64 = pairs.iter().map(|&(m, d)| (m - ratio * d).powi(2)).sum();
        est.se = two_n * (ss / (k * (k - 1.0))).sqrt() / dbar;
    }
    est
}

/// Estimates `E|S|` at `point` from `trials` independent formulas.
pub fn estimate_spine_mean(
    point: &Point,
    trials: u64,
    sampling: SpineSampling,
    seed: u64,
) -> Result<SpineEstimate> {
    if trials == 0 {
        return Err(Error::domain("trials must be at least 1"));
    }
    if let SpineSampling::Literals { per_trial: 0, .. } = sampling {
        return Err(Error::domain("literal samples must be at least 1"));
    }
    let id = point.id();
    let per = par_trials(trials, |i| {
        let mut rng = trial_rng(seed, id, i);
        let f = point.sample(&mut rng)?;
        let d = ImplicationDigraph::build(&f);
        Ok(spine_trial(&d, None, sampling, &mut rng))
    })?;
    Ok(combine_spine(point.n(), &per))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytics::theta;

    #[test]
    fn sat_probability_examples() {
        let empty = estimate_sat_probability(&Point::Fnm { n: 10, m: 0 }, 50, 1).unwrap();
        assert_eq!(empty.estimate, 1.0);
        assert_eq!(empty.hi, 1.0);
        let full = estimate_sat_probability(&Point::Fnm { n: 2, m: 4 }, 50, 1).unwrap();
        assert_eq!(full.successes, 0);
        let three = estimate_sat_probability(&Point::Fnm { n: 2, m: 3 }, 50, 1).unwrap();
        assert_eq!(three.successes, 50);
        assert!(estimate_sat_probability(&Point::Fnm { n: 2, m: 5 }, 5, 1).is_err());
        assert!(estimate_sat_probability(&Point::Fnm { n: 2, m: 1 }, 0, 1).is_err());
    }

    #[test]
    fn independent_of_worker_count() {
        let point = Point::Fnp { n: 60, p: 1.0 / 120.0 };
        let a = with_workers(Some(1), || estimate_sat_probability(&point, 300, 9)).unwrap();
        let b = with_workers(Some(4), || estimate_sat_probability(&point, 300, 9)).unwrap();
        assert_eq!(a.unwrap(), b.unwrap());
        let s = SpineSampling::Literals { per_trial: 5, cap: None };
        let a = with_workers(Some(1), || estimate_spine_mean(&point, 50, s, 2)).unwrap();
        let b = with_workers(Some(3), || estimate_spine_mean(&point, 50, s, 2)).unwrap();
        assert_eq!(a.unwrap(), b.unwrap());
    }

    #[test]
    fn point_parameters() {
        let a = Point::Fnm { n: 1000, m: 1100 };
        assert!((a.lambda() - 1.0).abs() < 1e-12);
        assert_eq!(a.m(), 1100);
        let b = Point::Fnp { n: 1000, p: a.p() };
        assert_eq!(b.m(), 1100);
        assert!((b.lambda() - (1100.0 / 999.0 - 1.0) * 10.0).abs() < 1e-9);
        assert_ne!(a.id(), b.id());
    }

    #[test]
    fn empty_point_has_empty_spine() {
        let point = Point::Fnm { n: 50, m: 0 };
        let e = estimate_spine_mean(&point, 5, SpineSampling::Exact, 1).unwrap();
        assert_eq!(e.mean, 0.0);
        let s = SpineSampling::Literals { per_trial: 10, cap: None };
        let e = estimate_spine_mean(&point, 5, s, 1).unwrap();
        assert_eq!((e.mean, e.members, e.non_members), (0.0, 0, 50));
        assert!(estimate_spine_mean(&point, 5, SpineSampling::Literals { per_trial: 0, cap: None }, 1).is_err());
    }

    #[test]
    fn sampled_and_exact_spine_agree() {
        let point = Point::Fnm { n: 400, m: 440 };
        let exact = estimate_spine_mean(&point, 200, SpineSampling::Exact, 5).unwrap();
        let s = SpineSampling::Literals { per_trial: 40, cap: None };
        let sampled = estimate_spine_mean(&point, 200, s, 5).unwrap();
        let se = (exact.se.powi(2) + sampled.se.powi(2)).sqrt();
        assert!((exact.mean - sampled.mean).abs() < 4.0 * se, "{exact:?} {sampled:?}");
        assert_eq!(sampled.undetermined, 0);
    }

    #[test]
    fn tiny_cap_reports_undetermined() {
        let point = Point::Fnm { n: 2000, m: 3000 };
        let s = SpineSampling::Literals { per_trial: 20, cap: Some(3) };
        let e = estimate_spine_mean(&point, 10, s, 1).unwrap();
        assert!(e.undetermined > 0);
        assert_eq!(e.members + e.non_members + e.undetermined, 200);
    }

    #[test]
    fn supercritical_density_is_near_theta() {
        let n = 20_000;
        let point = Point::Fnm { n, m: 24_000 };
        let e = estimate_spine_mean(&point, 4, SpineSampling::Exact, 3).unwrap();
        let ratio = e.mean / (2.0 * n as f64) / theta(0.2);
        assert!((0.85..1.15).contains(&ratio), "{ratio}");
    }
}
