use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize, Serializer};

use super::{combine_spine, par_trials, spine_trial, with_workers, Model, Point, SpineSampling, SpineTrial};
use crate::analytics::{m_at_lambda, m_for_p, p_at_lambda, p_for_m};
use crate::digraph::ImplicationDigraph;
use crate::error::{Error, Result};
use crate::formula::BirthdayProcess;
use crate::seed::{mix, trial_rng};
use crate::stats::proportion_se;

/// The second grid axis; one parameterization per sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    /// `m/n = 1 + λ n^(-1/3)`.
    Lambda(Vec<f64>),
    /// `m/n = 1 + ε`.
    Eps(Vec<f64>),
    M(Vec<u64>),
    P(Vec<f64>),
}

impl Axis {
    fn len(&self) -> usize {
        match self {
            Axis::Lambda(v) | Axis::Eps(v) | Axis::P(v) => v.len(),
            Axis::M(v) => v.len(),
        }
    }

    fn point(&self, n: u32, i: usize, model: Model) -> Point {
        let nf = n as f64;
        let (m, p) = match self {
            Axis::Lambda(v) => (m_at_lambda(n, v[i]), p_at_lambda(n, v[i])),
            Axis::Eps(v) => (((1.0 + v[i]) * nf).round() as u64, (1.0 + v[i]) / (2.0 * nf)),
            Axis::M(v) => (v[i], p_for_m(n, v[i])),
            Axis::P(v) => (m_for_p(n, v[i]), v[i]),
        };
        match model {
            Model::Fnm => Point::Fnm { n, m },
            Model::Fnp => Point::Fnp { n, p },
        }
    }

    fn lambda(&self, n: u32, i: usize, point: &Point) -> f64 {
        match self {
            Axis::Lambda(v) => v[i],
            Axis::Eps(v) => v[i] * (n as f64).cbrt(),
            _ => point.lambda(),
        }
    }
}

fn default_model() -> Model {
    Model::Fnm
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub n: Vec<u32>,
    pub axis: Axis,
    #[serde(default = "default_model")]
    pub ensemble: Model,
    pub trials: u64,
    /// Literals tested per trial for the spine estimate; the exact spine
    /// when absent.
    #[serde(default)]
    pub literal_samples: Option<usize>,
    /// Search cap for sampled membership.
    #[serde(default)]
    pub cap: Option<usize>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub workers: Option<usize>,
    #[serde(default)]
    pub out: Option<PathBuf>,
    /// Draw trial `i` at every point of one `n` from the same birthday
    /// process, so formulas are nested along the axis.
    #[serde(default)]
    pub coupled: bool,
    /// Fill the `seconds` column. Output is then no longer reproducible.
    #[serde(default)]
    pub timing: bool,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::domain("trials must be at least 1"));
        }
        if self.literal_samples == Some(0) {
            return Err(Error::domain("literal samples must be at least 1"));
        }
        if let Some(&n) = self.n.iter().find(|&&n| n == 0) {
            return Err(Error::domain(format!("n must be positive, got {n}")));
        }
        Ok(())
    }

    fn sampling(&self) -> SpineSampling {
        match self.literal_samples {
            None => SpineSampling::Exact,
            Some(k) => SpineSampling::Literals { per_trial: k, cap: self.cap },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub n: u32,
    pub m: u64,
    #[serde(serialize_with = "sig9")]
    pub p: f64,
    #[serde(serialize_with = "sig9")]
    pub lambda: f64,
    pub trials: u64,
    pub sat_count: u64,
    #[serde(serialize_with = "sig9")]
    pub sat_prob: f64,
    #[serde(serialize_with = "sig9")]
    pub sat_se: f64,
    #[serde(serialize_with = "sig9")]
    pub spine_mean: f64,
    #[serde(serialize_with = "sig9")]
    pub spine_se: f64,
    pub undetermined: u64,
    pub seconds: Option<f64>,
}

pub const CSV_HEADER: [&str; 12] = [
    "n",
    "m",
    "p",
    "lambda",
    "trials",
    "sat_count",
    "sat_prob",
    "sat_se",
    "spine_mean",
    "spine_se",
    "undetermined",
    "seconds",
];

/// Nine significant digits.
fn fmt9(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.8e}")
    } else {
        String::new()
    }
}

fn sig9<S: Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if x.is_finite() {
        s.serialize_f64(fmt9(*x).parse().expect("formatted float parses"))
    } else {
        s.serialize_none()
    }
}

/// Runs every grid point in `n`-major order.
pub fn run_sweep(config: &SweepConfig) -> Result<Vec<SweepRow>> {
    config.validate()?;
    with_workers(config.workers, || {
        let mut rows = Vec::new();
        for &n in &config.n {
            for i in 0..config.axis.len() {
                let point = config.axis.point(n, i, config.ensemble);
                let start = Instant::now();
                let sampling = config.sampling();
                let id = point.id();
                let per = par_trials(config.trials, |t| {
                    let mut rng = trial_rng(config.seed, id, t);
                    let f = if config.coupled {
                        let mut process = BirthdayProcess::new(n, mix(&[config.seed, n as u64, t]));
                        point.from_process(&mut process)?
                    } else {
                        point.sample(&mut rng)?
                    };
                    let d = ImplicationDigraph::build(&f);
                    let cond = d.condensation();
                    Ok((cond.is_satisfiable(), spine_trial(&d, Some(&cond), sampling, &mut rng)))
                })?;
                let sat_count = per.iter().filter(|r| r.0).count() as u64;
                let spines: Vec<SpineTrial> = per.into_iter().map(|r| r.1).collect();
                let spine = combine_spine(n, &spines);
                rows.push(SweepRow {
                    n,
                    m: point.m(),
                    p: point.p(),
                    lambda: config.axis.lambda(n, i, &point),
                    trials: config.trials,
                    sat_count,
                    sat_prob: sat_count as f64 / config.trials as f64,
                    sat_se: proportion_se(sat_count, config.trials),
                    spine_mean: spine.mean,
                    spine_se: spine.se,
                    undetermined: spine.undetermined,
                    seconds: config.timing.then(|| start.elapsed().as_secs_f64()),
                });
            }
        }
        Ok(rows)
    })?
}

pub fn sweep_csv(rows: &[SweepRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::Domain(e.to_string());
    w.write_record(CSV_HEADER).map_err(csv_err)?;
    for r in rows {
        w.write_record([
            r.n.to_string(),
            r.m.to_string(),
            fmt9(r.p),
            fmt9(r.lambda),
            r.trials.to_string(),
            r.sat_count.to_string(),
            fmt9(r.sat_prob),
            fmt9(r.sat_se),
            fmt9(r.spine_mean),
            fmt9(r.spine_se),
            r.undetermined.to_string(),
            r.seconds.map(|s| format!("{s:.3}")).unwrap_or_default(),
        ])
        .map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Domain(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("CSV of ASCII fields"))
}

pub fn sweep_json(rows: &[SweepRow]) -> Result<String> {
    serde_json::to_string_pretty(rows).map_err(|e| Error::Domain(e.to_string()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

pub fn write_sweep(path: &Path, rows: &[SweepRow], format: Format) -> Result<()> {
    let text = match format {
        Format::Csv => sweep_csv(rows)?,
        Format::Json => sweep_json(rows)? + "\n",
    };
    std::fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}
