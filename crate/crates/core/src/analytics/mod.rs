//! Exact connected-graph counts and the distributions built from them,
//! `θ(ε)`, ensemble conversion and the component exploration walk.
//!
//! Counts are exact big integers; probabilities are assembled in `f64` in
//! the log domain from them.

mod counts;
mod distributions;
mod theta;
mod walk;

pub use counts::{
    connected_count, connectivity_probability, wright_coefficient, ConnectedCounts, DEFAULT_MAX_K,
};
pub use distributions::{
    component_pmf, coupled_edge_probability, ln_choose, ln_p_nk, ln_q_nk, ln_r_nk, ln_s_pk, p_nk,
    q_nk, r_nk, s_pk, s_pk_truncated,
    wright_asymptotic,
};
pub use theta::{theta, theta_residual, theta_series};
pub use walk::component_size_walk;
pub(crate) use counts::log_sum_exp;

use crate::formula::clause_universe_size;

/// Clause count matching `F(n,p)` in expectation, `round(2n(n-1)p)`.
pub fn m_for_p(n: u32, p: f64) -> u64 {
    (clause_universe_size(n) as f64 * p).round() as u64
}

pub fn p_for_m(n: u32, m: u64) -> f64 {
    let universe = clause_universe_size(n);
    if universe == 0 {
        0.0
    } else {
        m as f64 / universe as f64
    }
}

/// Chernoff bound `exp(-ρ² p N / 3)` on a relative deviation `ρ` of a
/// `Bin(N, p)` count from its mean.
pub fn binomial_tail_bound(universe: u64, p: f64, rho: f64) -> f64 {
    (-rho * rho * p * universe as f64 / 3.0).exp()
}

/// `p` at `ε = λ n^(-1/3)`: `(1 + ε) / (2n)`.
pub fn p_at_lambda(n: u32, lambda: f64) -> f64 {
    (1.0 + lambda * (n as f64).powf(-1.0 / 3.0)) / (2.0 * n as f64)
}

/// `m = (1 + ε) n` at `ε = λ n^(-1/3)`, rounded.
pub fn m_at_lambda(n: u32, lambda: f64) -> u64 {
    ((1.0 + lambda * (n as f64).powf(-1.0 / 3.0)) * n as f64).round() as u64
}
