use super::counts::{log_sum_exp, ConnectedCounts};
use crate::error::{Error, Result};

/// `ln C(n, k)` by a product of ratios; exact to rounding for small `k`.
pub fn ln_choose(n: u64, k: u64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    let k = k.min(n - k);
    (1..=k)
        .map(|i| ((n - k + i) as f64 / i as f64).ln())
        .sum()
}

fn check(n: u64, p: f64, k: usize) -> Result<()> {
    if k == 0 || k as u64 > n {
        return Err(Error::domain(format!("k = {k} outside 1..={n}")));
    }
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::domain(format!("p = {p} outside (0, 1)")));
    }
    Ok(())
}

fn ln_connectivity(t: &ConnectedCounts, k: usize, p: f64) -> Result<f64> {
    Ok(t.connectivity(k, p)?.ln())
}

/// Probability that the out-set of a fixed literal in `F(n,p)` is strictly
/// distinct of size exactly `k`:
///
/// ```text
/// P(k) = 2^(k-1) C(n-1, k-1) (1-p)^(2kn - 3k²/2 - k/2) Pr(G(k,p) connected)
/// ```
pub fn p_nk(n: u64, p: f64, k: usize) -> Result<f64> {
    Ok(ln_p_nk(n, p, k)?.exp())
}

pub fn ln_p_nk(n: u64, p: f64, k: usize) -> Result<f64> {
    check(n, p, k)?;
    let t = ConnectedCounts::shared();
    let kf = k as f64;
    let expo = 2.0 * kf * n as f64 - (3.0 * kf * kf + kf) / 2.0;
    let ln = (kf - 1.0) * std::f64::consts::LN_2
        + ln_choose(n - 1, k as u64 - 1)
        + expo * (-p).ln_1p()
        + ln_connectivity(t, k, p)?;
    Ok(ln)
}

/// Edge probability of the random graph coupled to the trimmed search.
#[inline]
pub fn coupled_edge_probability(p: f64) -> f64 {
    2.0 * p - p * p
}

/// Size distribution of the trimmed out-graph, which equals the law of the
/// component of a fixed vertex in `G(n, q)` with `q = 2p - p²`:
///
/// ```text
/// Q(k) = C(n-1, k-1) (1-q)^(k(n-k)) Pr(G(k,q) connected)
/// ```
pub fn q_nk(n: u64, p: f64, k: usize) -> Result<f64> {
    Ok(ln_q_nk(n, p, k)?.exp())
}

pub fn ln_q_nk(n: u64, p: f64, k: usize) -> Result<f64> {
    check(n, p, k)?;
    ln_component_pmf(n, coupled_edge_probability(p), k)
}

/// Law of the component size of a fixed vertex in `G(n, q)`.
pub fn component_pmf(n: u64, q: f64, k: usize) -> Result<f64> {
    Ok(ln_component_pmf(n, q, k)?.exp())
}

fn ln_component_pmf(n: u64, q: f64, k: usize) -> Result<f64> {
    check(n, q, k)?;
    let t = ConnectedCounts::shared();
    let kf = k as f64;
    let ln = ln_choose(n - 1, k as u64 - 1)
        + kf * (n as f64 - kf) * (-q).ln_1p()
        + ln_connectivity(t, k, q)?;
    Ok(ln)
}

/// Probability that the component is a tree of size `k`:
///
/// ```text
/// R(k) = C(n-1, k-1) (1-q)^(k(n-k)) k^(k-2) q^(k-1) (1-q)^(C(k,2)-k+1)
/// ```
pub fn r_nk(n: u64, p: f64, k: usize) -> Result<f64> {
    Ok(ln_r_nk(n, p, k)?.exp())
}

pub fn ln_r_nk(n: u64, p: f64, k: usize) -> Result<f64> {
    check(n, p, k)?;
    let q = coupled_edge_probability(p);
    let kf = k as f64;
    let excess = (k * (k - 1) / 2 + 1 - k) as f64;
    let ln = ln_choose(n - 1, k as u64 - 1)
        + kf * (n as f64 - kf) * (-q).ln_1p()
        + (kf - 2.0) * kf.ln()
        + (kf - 1.0) * q.ln()
        + excess * (-q).ln_1p();
    Ok(ln)
}

/// `S_p(k) = Σ_l c_{k,l} (k^(3/2) p / (1-p))^l`, summed exactly from the
/// count table.
pub fn s_pk(k: usize, p: f64) -> Result<f64> {
    Ok(ln_s_pk(k, p)?.exp())
}

pub fn ln_s_pk(k: usize, p: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&p) {
        return Err(Error::domain(format!("p = {p} outside [0, 1)")));
    }
    let t = ConnectedCounts::shared();
    t.ln_count(k, 0)?;
    if p == 0.0 || k <= 2 {
        return Ok(0.0);
    }
    let kf = k as f64;
    let lr = 1.5 * kf.ln() + p.ln() - (-p).ln_1p();
    let top = k * (k - 1) / 2 + 1 - k;
    let terms = (0..=top).map(|l| {
        let lc = t.ln_count(k, k - 1 + l).expect("tabulated")
            - (kf - 2.0 + 1.5 * l as f64) * kf.ln();
        lc + l as f64 * lr
    });
    Ok(log_sum_exp(terms))
}

/// Asymptotic Wright coefficient: `1` for `l = 0`, `sqrt(π/8)` for `l = 1`,
/// and `γ sqrt(3π) (e / (12(l-1)))^((l-1)/2)` with `γ = 1/(2π)` beyond.
pub fn wright_asymptotic(l: usize) -> f64 {
    use std::f64::consts::{E, PI};
    match l {
        0 => 1.0,
        1 => (PI / 8.0).sqrt(),
        _ => {
            let lm = (l - 1) as f64;
            (3.0 * PI).sqrt() / (2.0 * PI) * (E / (12.0 * lm)).powf(lm / 2.0)
        }
    }
}

/// `S_p(k)` from the first `l_max + 1` asymptotic terms, with the first
/// omitted term as an error indicator.
pub fn s_pk_truncated(k: usize, p: f64, l_max: usize) -> (f64, f64) {
    let r = (k as f64).powf(1.5) * p / (1.0 - p);
    let term = |l: usize| wright_asymptotic(l) * r.powi(l as i32);
    ((0..=l_max).map(term).sum(), term(l_max + 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn k_equals_one() {
        let (n, p) = (50u64, 0.013f64);
        let expect = (1.0 - p).powi(2 * (n as i32 - 1));
        assert!((p_nk(n, p, 1).unwrap() - expect).abs() < 1e-14);
        assert!((q_nk(n, p, 1).unwrap() - expect).abs() < 1e-14);
        let q = coupled_edge_probability(p);
        assert!((q_nk(n, p, 1).unwrap() - (1.0 - q).powi(n as i32 - 1)).abs() < 1e-14);
    }

    #[test]
    fn small_p_limit_of_s() {
        assert_eq!(s_pk(10, 0.0).unwrap(), 1.0);
        let (k, p) = (20usize, 1e-5);
        let r = (k as f64).powf(1.5) * p / (1.0 - p);
        let c1 = ConnectedCounts::shared().wright(k, 1).unwrap();
        let s = s_pk(k, p).unwrap();
        assert!(((s - 1.0) / r - c1).abs() < 1e-2);
    }

    #[test]
    fn s_matches_direct_graph_sum() {
        // S_p(k) (k^(k-2) p^(k-1) (1-p)^(C(k,2)-k+1)) = Pr(G(k,p) connected).
        let (k, p) = (10usize, 0.05f64);
        let kf = k as f64;
        let tree = kf.powf(kf - 2.0) * p.powf(kf - 1.0) * (1.0 - p).powf((k * (k - 1) / 2 + 1 - k) as f64);
        let conn = ConnectedCounts::shared().connectivity(k, p).unwrap();
        assert!((s_pk(k, p).unwrap() * tree / conn - 1.0).abs() < 1e-9);
    }

    #[test]
    fn truncated_s_tracks_exact_for_small_argument() {
        let (k, p) = (30usize, 1e-4);
        let (approx, err) = s_pk_truncated(k, p, 3);
        let exact = s_pk(k, p).unwrap();
        assert!(err < 1e-6);
        // The leading correction carries the limiting c_(k,1) instead of
        // the finite-k value, and that gap dominates.
        let c1 = ConnectedCounts::shared().wright(k, 1).unwrap();
        let ratio = (approx - 1.0) / (exact - 1.0);
        assert!((ratio - wright_asymptotic(1) / c1).abs() < 0.02, "{ratio}");
        let (_, err2) = s_pk_truncated(k, p, 5);
        assert!(err2 < err);
    }

    #[test]
    fn alternative_product_form_of_p() {
        // P(k) = (1/n) C(n,k) (2pk)^(k-1) (1-p)^(2kn-k²-2k+1) S_p(k)
        for &(n, p, k) in &[(40u64, 0.01, 5usize), (1000, 0.0005, 17), (25, 0.04, 25)] {
            let kf = k as f64;
            let ln = ln_choose(n, k as u64) - (n as f64).ln()
                + (kf - 1.0) * (2.0 * p * kf).ln()
                + (2.0 * kf * n as f64 - kf * kf - 2.0 * kf + 1.0) * (-p).ln_1p()
                + s_pk(k, p).unwrap().ln();
            assert!((ln.exp() / p_nk(n, p, k).unwrap() - 1.0).abs() < 1e-9);
        }
    }

    proptest! {
        #[test]
        fn p_below_q(n in 1u64..200, k in 1usize..31, p in 1e-4f64..0.5) {
            let k = k.min(n as usize);
            prop_assert!(p_nk(n, p, k).unwrap() <= q_nk(n, p, k).unwrap() * (1.0 + 1e-12));
        }

        #[test]
        fn q_is_r_times_s(n in 1u64..200, k in 1usize..31, p in 1e-4f64..0.4) {
            let k = k.min(n as usize);
            let q = coupled_edge_probability(p);
            let lhs = ln_q_nk(n, p, k).unwrap();
            let rhs = ln_r_nk(n, p, k).unwrap() + ln_s_pk(k, q).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-9);
            let direct = q_nk(n, p, k).unwrap();
            if direct > 1e-250 {
                let prod = r_nk(n, p, k).unwrap() * s_pk(k, q).unwrap();
                prop_assert!((direct - prod).abs() <= 1e-9 * direct);
            }
        }

        #[test]
        fn q_sums_to_one(n in 1u64..31, p in 1e-4f64..0.5) {
            let total: f64 = (1..=n as usize).map(|k| q_nk(n, p, k).unwrap()).sum();
            prop_assert!((total - 1.0).abs() < 1e-9);
        }

        #[test]
        fn p_sums_to_at_most_one(n in 1u64..31, p in 1e-4f64..0.5) {
            let total: f64 = (1..=n as usize).map(|k| p_nk(n, p, k).unwrap()).sum();
            prop_assert!(total <= 1.0 + 1e-12);
        }
    }
}
