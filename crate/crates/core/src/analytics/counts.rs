use std::sync::OnceLock;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Default largest tabulated graph order.
pub const DEFAULT_MAX_K: usize = 30;

/// Exact counts `f(k, m)` of connected labelled graphs with `k` vertices and
/// `m` edges, for `k <= max_k`.
///
/// Row `k` is the edge-generating polynomial `F_k(x) = Σ_m f(k,m) x^m`,
/// obtained by splitting the graphs on `k` labelled vertices according to
/// the component of vertex 1:
///
/// ```text
/// (1+x)^C(k,2) = Σ_{j=1..k} C(k-1, j-1) F_j(x) (1+x)^C(k-j,2)
/// ```
#[derive(Debug, Clone)]
pub struct ConnectedCounts {
    rows: Vec<Vec<BigUint>>,
    /// `ln f(k,m)`, `-inf` where the count is zero.
    ln_rows: Vec<Vec<f64>>,
}

fn pairs(k: usize) -> usize {
    k * k.saturating_sub(1) / 2
}

fn binomial_row(e: usize) -> Vec<BigUint> {
    let mut row = vec![BigUint::from(1u32)];
    for i in 0..e {
        let next = &row[i] * BigUint::from(e - i) / BigUint::from(i + 1);
        row.push(next);
    }
    row
}

fn ln_big(x: &BigUint) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    match x.to_f64() {
        Some(v) if v.is_finite() => v.ln(),
        _ => {
            let bits = x.bits();
            let shift = bits - 60;
            let top = (x >> shift).to_f64().expect("60-bit value");
            top.ln() + shift as f64 * std::f64::consts::LN_2
        }
    }
}

impl ConnectedCounts {
    pub fn new(max_k: usize) -> Self {
        let rows_pow: Vec<Vec<BigUint>> = (0..=pairs(max_k)).map(binomial_row).collect();
        let choose: Vec<Vec<BigUint>> = (0..=max_k).map(binomial_row).collect();
        let mut rows: Vec<Vec<BigUint>> = vec![Vec::new(); max_k + 1];
        for k in 1..=max_k {
            let mut poly = rows_pow[pairs(k)].clone();
            for j in 1..k {
                let coef = &choose[k - 1][j - 1];
                let fj = &rows[j];
                let g = &rows_pow[pairs(k - j)];
                for (a, fa) in fj.iter().enumerate() {
                    if fa.is_zero() {
                        continue;
                    }
                    let scaled = fa * coef;
                    for (b, gb) in g.iter().enumerate() {
                        poly[a + b] -= &scaled * gb;
                    }
                }
            }
            rows[k] = poly;
        }
        let ln_rows = rows
            .iter()
            .map(|r| r.iter().map(ln_big).collect())
            .collect();
        ConnectedCounts { rows, ln_rows }
    }

    /// The shared table with `k <= DEFAULT_MAX_K`.
    pub fn shared() -> &'static ConnectedCounts {
        static TABLE: OnceLock<ConnectedCounts> = OnceLock::new();
        TABLE.get_or_init(|| ConnectedCounts::new(DEFAULT_MAX_K))
    }

    pub fn max_k(&self) -> usize {
        self.rows.len() - 1
    }

    fn check(&self, k: usize) -> Result<()> {
        if k == 0 {
            return Err(Error::domain("graph order must be at least 1"));
        }
        if k > self.max_k() {
            return Err(Error::LimitExceeded {
                what: "graph order",
                value: k,
                limit: self.max_k(),
            });
        }
        Ok(())
    }

    /// `f(k, m)`; zero outside `k-1 <= m <= C(k,2)`.
    pub fn count(&self, k: usize, m: usize) -> Result<BigUint> {
        self.check(k)?;
        Ok(self.rows[k].get(m).cloned().unwrap_or_default())
    }

    pub fn ln_count(&self, k: usize, m: usize) -> Result<f64> {
        self.check(k)?;
        Ok(self.ln_rows[k].get(m).copied().unwrap_or(f64::NEG_INFINITY))
    }

    /// Wright coefficient `c_{k,l} = f(k, k-1+l) / k^(k-2+3l/2)`.
    pub fn wright(&self, k: usize, l: usize) -> Result<f64> {
        let lf = self.ln_count(k, k - 1 + l)?;
        let kf = k as f64;
        Ok((lf - (kf - 2.0 + 1.5 * l as f64) * kf.ln()).exp())
    }

    /// `Pr(G(k,p) is connected) = Σ_m f(k,m) p^m (1-p)^(C(k,2)-m)`.
    pub fn connectivity(&self, k: usize, p: f64) -> Result<f64> {
        self.check(k)?;
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::domain(format!("p = {p} is not a probability")));
        }
        if k == 1 {
            return Ok(1.0);
        }
        if p == 0.0 {
            return Ok(0.0);
        }
        if p == 1.0 {
            return Ok(1.0);
        }
        let e = pairs(k);
        let (lp, lq) = (p.ln(), (-p).ln_1p());
        let terms = (k - 1..=e).map(|m| self.ln_rows[k][m] + m as f64 * lp + (e - m) as f64 * lq);
        Ok(log_sum_exp(terms).exp())
    }
}

pub(crate) fn log_sum_exp<I: IntoIterator<Item = f64>>(terms: I) -> f64 {
    let v: Vec<f64> = terms.into_iter().filter(|t| *t > f64::NEG_INFINITY).collect();
    let Some(max) = v.iter().copied().reduce(f64::max) else {
        return f64::NEG_INFINITY;
    };
    max + v.iter().map(|t| (t - max).exp()).sum::<f64>().ln()
}

pub fn connected_count(k: usize, m: usize) -> Result<BigUint> {
    ConnectedCounts::shared().count(k, m)
}

pub fn wright_coefficient(k: usize, l: usize) -> Result<f64> {
    ConnectedCounts::shared().wright(k, l)
}

pub fn connectivity_probability(k: usize, p: f64) -> Result<f64> {
    ConnectedCounts::shared().connectivity(k, p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_counts() {
        assert_eq!(connected_count(4, 3).unwrap(), BigUint::from(16u32));
        assert_eq!(connected_count(3, 3).unwrap(), BigUint::from(1u32));
        assert_eq!(connected_count(4, 4).unwrap(), BigUint::from(15u32));
        assert_eq!(connected_count(4, 2).unwrap(), BigUint::from(0u32));
        assert_eq!(connected_count(4, 7).unwrap(), BigUint::from(0u32));
        assert!(connected_count(31, 40).is_err());
    }

    #[test]
    fn cayley_and_totals() {
        let t = ConnectedCounts::shared();
        for k in 1..=t.max_k() {
            let trees = BigUint::from(k).pow(k.saturating_sub(2) as u32);
            assert_eq!(t.count(k, k - 1).unwrap(), if k == 1 { BigUint::from(1u32) } else { trees });
        }
        // Closure: every graph on k vertices splits by the component of vertex 1.
        let choose: Vec<Vec<BigUint>> = (0..=12).map(binomial_row).collect();
        for k in 1..=12 {
            let mut total = BigUint::zero();
            for j in 1..=k {
                let fj: BigUint = t.rows[j].iter().sum();
                total += &choose[k - 1][j - 1] * fj * (BigUint::from(1u32) << pairs(k - j));
            }
            assert_eq!(total, BigUint::from(1u32) << pairs(k));
        }
    }

    #[test]
    fn wright_coefficients() {
        let t = ConnectedCounts::shared();
        for k in 2..=t.max_k() {
            assert!((t.wright(k, 0).unwrap() - 1.0).abs() < 1e-12);
            for l in 0..=pairs(k) + 1 - k {
                assert!(t.wright(k, l).unwrap() <= 1.0 + 1e-12);
            }
        }
        // c_(k,1) climbs towards sqrt(π/8) with a gap of order k^(-1/2).
        let limit = (std::f64::consts::PI / 8.0).sqrt();
        let mut prev = 0.0;
        for k in 3..=t.max_k() {
            let c = t.wright(k, 1).unwrap();
            assert!(c > prev && c < limit);
            let scaled_gap = (limit - c) * (k as f64).sqrt();
            assert!((0.5..2.5).contains(&scaled_gap), "k = {k}: {scaled_gap}");
            prev = c;
        }
        let c25 = t.wright(25, 1).unwrap();
        assert!((c25 - 0.399_298).abs() < 1e-6, "c_(25,1) = {c25}");
    }

    #[test]
    fn unicyclic_counts_match_cycle_plus_forest_formula() {
        // Pick the cycle (j vertices, (j-1)!/2 orientations), then a forest
        // of rooted trees hanging off it: j k^(k-j-1) ways.
        for k in 3..=20usize {
            let mut total = BigUint::zero();
            for j in 3..=k {
                let choose = binomial_row(k)[j].clone();
                let cycles: BigUint = (1..j).map(BigUint::from).product::<BigUint>() / 2u32;
                let forests = if j == k {
                    BigUint::from(1u32)
                } else {
                    BigUint::from(j) * BigUint::from(k).pow((k - j - 1) as u32)
                };
                total += choose * cycles * forests;
            }
            assert_eq!(connected_count(k, k).unwrap(), total, "k = {k}");
        }
    }

    #[test]
    fn connectivity_bounds_and_small_cases() {
        assert_eq!(connectivity_probability(1, 0.3).unwrap(), 1.0);
        assert!((connectivity_probability(2, 0.3).unwrap() - 0.3).abs() < 1e-15);
        for k in 1..=30 {
            for &p in &[0.0, 0.01, 0.2, 0.7, 1.0] {
                let c = connectivity_probability(k, p).unwrap();
                assert!((0.0..=1.0 + 1e-12).contains(&c));
            }
        }
    }

    #[test]
    fn connectivity_matches_enumeration() {
        // All 2^6 graphs on 4 vertices.
        let edges = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
        let p: f64 = 0.3;
        let mut total = 0.0;
        for mask in 0u32..64 {
            let mut comp = [0usize, 1, 2, 3];
            for (i, &(a, b)) in edges.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    let (ca, cb) = (comp[a], comp[b]);
                    for c in comp.iter_mut() {
                        if *c == cb {
                            *c = ca;
                        }
                    }
                }
            }
            if comp.iter().all(|&c| c == comp[0]) {
                let m = mask.count_ones() as i32;
                total += p.powi(m) * (1.0 - p).powi(6 - m);
            }
        }
        assert!((connectivity_probability(4, p).unwrap() - total).abs() < 1e-12);
    }
}
