/// `θ(ε)`, the positive root of `1 - θ = exp(-(1+ε)θ)`; zero for `ε <= 0`.
///
/// Bisection on `(0, 1)` followed by Newton polishing. The residual is
/// evaluated as `-θ - expm1(-(1+ε)θ)` to avoid cancellation for small `ε`.
pub fn theta(eps: f64) -> f64 {
    if eps <= 0.0 || eps.is_nan() {
        return 0.0;
    }
    let c = 1.0 + eps;
    let g = |t: f64| -t - (-c * t).exp_m1();
    let dg = |t: f64| -1.0 + c * (-c * t).exp();
    // g > 0 just right of 0 and g(1) < 0.
    let mut lo = (2.0 * eps / (c * c)).min(0.5) * 1e-3;
    let mut hi = 1.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 * hi {
            break;
        }
    }
    let mut t = 0.5 * (lo + hi);
    for _ in 0..4 {
        let d = dg(t);
        if d == 0.0 {
            break;
        }
        let next = t - g(t) / d;
        if !(next > 0.0 && next < 1.0) {
            break;
        }
        t = next;
    }
    t
}

/// `|1 - θ - exp(-(1+ε)θ)|` at the computed root.
pub fn theta_residual(eps: f64) -> f64 {
    let t = theta(eps);
    (-t - (-(1.0 + eps) * t).exp_m1()).abs()
}

/// `θ(ε)` from the extinction-probability series of a Poisson(1+ε)
/// branching process, `1 - Σ_k k^(k-1)/k! (1+ε)^(k-1) e^(-(1+ε)k)`, summed
/// to `terms` terms.
pub fn theta_series(eps: f64, terms: usize) -> f64 {
    let c = 1.0 + eps;
    let mut ln_fact = 0.0;
    let mut sum = 0.0;
    for k in 1..=terms {
        let kf = k as f64;
        ln_fact += kf.ln();
        let ln_term = (kf - 1.0) * kf.ln() - ln_fact + (kf - 1.0) * c.ln() - c * kf;
        sum += ln_term.exp();
    }
    1.0 - sum
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn residual_on_grid() {
        for i in 1..=400 {
            let eps = i as f64 * 0.01;
            assert!(theta_residual(eps) < 1e-12, "eps = {eps}");
            let t = theta(eps);
            assert!(t > 0.0 && t < 1.0);
        }
        for &eps in &[1e-6, 1e-4, 1e-3, 10.0, 50.0] {
            assert!(theta_residual(eps) < 1e-12);
        }
    }

    #[test]
    fn nonpositive_eps() {
        assert_eq!(theta(0.0), 0.0);
        assert_eq!(theta(-0.5), 0.0);
    }

    #[test]
    fn small_eps_slope() {
        let r = theta(0.01) / 0.01;
        assert!((1.9..=2.1).contains(&r), "{r}");
    }

    #[test]
    fn value_at_one_matches_series() {
        assert!((theta(1.0) - 0.796812).abs() < 1e-5);
        assert!((theta_series(1.0, 10_000) - theta(1.0)).abs() < 1e-9);
        assert!((theta_series(0.5, 10_000) - theta(0.5)).abs() < 1e-6);
    }
}
