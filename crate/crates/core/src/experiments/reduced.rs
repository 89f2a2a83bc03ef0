use std::collections::HashSet;

use rand::Rng;
use serde::Serialize;

use super::par_trials;
use crate::analytics::log_sum_exp;
use crate::error::{Error, Result};
use crate::formula::{clause_universe_size, Clause};
use crate::seed::{mix, trial_rng};
use crate::spine::IncrementalSpine;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReducedEstimate {
    pub n: u32,
    pub m: u64,
    pub trials: u64,
    /// `ln Pr(F(n,m) SAT)`.
    pub ln_prob: f64,
    /// Standard error of `ln_prob` (delta method).
    pub ln_prob_se: f64,
    /// `1 - Pr(F(n,m) SAT)`, averaged directly so that it keeps full relative
    /// precision when small.
    pub unsat_prob: f64,
    pub unsat_se: f64,
    /// Mean spine size of the final reduced formula.
    pub final_spine: f64,
}

/// One path of the reduced process: `m` clauses, each uniform among the
/// absent clauses that keep the formula satisfiable. Returns
/// `ln W = Σ_k ln(1 - U_k / (N - k))`, where `U_k = C(|S_k|, 2)` is the number
/// of clauses that would break the `k`-clause formula, and the final spine
/// size.
fn reduced_path<R: Rng + ?Sized>(n: u32, m: u64, rng: &mut R) -> (f64, usize) {
    let universe = clause_universe_size(n);
    let mut spine = IncrementalSpine::new(n);
    let mut seen = HashSet::new();
    let mut ln_w = 0.0;
    for k in 0..m {
        let unsafe_count = spine.unsafe_clause_count();
        let remaining = universe - k;
        if unsafe_count >= remaining {
            return (f64::NEG_INFINITY, spine.size());
        }
        ln_w += (-(unsafe_count as f64) / remaining as f64).ln_1p();
        loop {
            let idx = rng.random_range(0..universe);
            let c = Clause::from_index(idx);
            if seen.contains(&idx) || spine.would_break(c) {
                continue;
            }
            seen.insert(idx);
            spine.add_clause(c);
            break;
        }
    }
    (ln_w, spine.size())
}

/// Estimates `Pr(F(n,m) SAT)` by importance sampling: the reduced process
/// never turns UNSAT, and the product of its per-step survival probabilities
/// is an unbiased estimate of the probability. Relative precision stays
/// usable far below the reach of plain Monte Carlo.
pub fn sat_probability_reduced(n: u32, m: u64, trials: u64, seed: u64) -> Result<ReducedEstimate> {
    if trials == 0 {
        return Err(Error::domain("trials must be at least 1"));
    }
    let universe = clause_universe_size(n);
    if m > universe {
        return Err(Error::TooManyClauses { n, m, universe });
    }
    let point = mix(&[4, n as u64, m]);
    let paths = par_trials(trials, |i| Ok(reduced_path(n, m, &mut trial_rng(seed, point, i))))?;
    let t = trials as f64;
    let ln_w: Vec<f64> = paths.iter().map(|p| p.0).collect();
    let ln_prob = log_sum_exp(ln_w.iter().copied()) - t.ln();
    let ln_prob_se = if trials > 1 && ln_prob.is_finite() {
        // Var(W) / E[W]^2 with W scaled by the estimate.
        let rel: Vec<f64> = ln_w.iter().map(|&l| (l - ln_prob).exp()).collect();
        let var = rel.iter().map(|r| (r - 1.0).powi(2)).sum::<f64>() / (t - 1.0);
        (var / t).sqrt()
    } else {
        f64::NAN
    };
    let fail: Vec<f64> = ln_w.iter().map(|&l| -l.exp_m1()).collect();
    let (unsat_prob, unsat_se) = crate::stats::mean_se(&fail);
    let final_spine = paths.iter().map(|p| p.1 as f64).sum::<f64>() / t;
    Ok(ReducedEstimate {
        n,
        m,
        trials,
        ln_prob,
        ln_prob_se,
        unsat_prob,
        unsat_se,
        final_spine,
    })
}
