use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Geometric};

use super::{clause_universe_size, Clause, Ensemble, Formula};
use crate::error::{Error, Result};

/// Uniform formula with exactly `m` distinct clauses, stored in a uniformly
/// random order.
///
/// Floyd's algorithm picks the index set in `O(m)` time and memory, then a
/// Fisher-Yates shuffle randomizes the order.
pub fn sample_fnm<R: Rng + ?Sized>(n: u32, m: u64, rng: &mut R) -> Result<Formula> {
    let universe = clause_universe_size(n);
    if m > universe {
        return Err(Error::TooManyClauses { n, m, universe });
    }
    let mut chosen = HashSet::with_capacity(m as usize);
    let mut order = Vec::with_capacity(m as usize);
    for j in (universe - m)..universe {
        let t = rng.random_range(0..=j);
        let pick = if chosen.contains(&t) { j } else { t };
        chosen.insert(pick);
        order.push(pick);
    }
    order.shuffle(rng);
    let clauses = order.into_iter().map(Clause::from_index).collect();
    Ok(Formula::from_parts_unchecked(n, clauses, Ensemble::Fnm { m }))
}

/// Each of the `2n(n-1)` clauses independently with probability `p`, by
/// geometric skipping over clause indices. Clauses come out in index order.
pub fn sample_fnp<R: Rng + ?Sized>(n: u32, p: f64, rng: &mut R) -> Result<Formula> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::domain(format!("p = {p} is not a probability")));
    }
    let universe = clause_universe_size(n);
    let clauses = skip_sample(universe, p, rng)
        .into_iter()
        .map(Clause::from_index)
        .collect();
    Ok(Formula::from_parts_unchecked(n, clauses, Ensemble::Fnp { p }))
}

/// Indices in `0..len` kept independently with probability `p`, ascending.
pub(crate) fn skip_sample<R: Rng + ?Sized>(len: u64, p: f64, rng: &mut R) -> Vec<u64> {
    if p <= 0.0 || len == 0 {
        return Vec::new();
    }
    if p >= 1.0 {
        return (0..len).collect();
    }
    let geo = Geometric::new(p).expect("0 < p < 1");
    let mut out = Vec::with_capacity(((len as f64) * p * 1.1) as usize + 8);
    let mut next: u64 = 0;
    loop {
        let skip = geo.sample(rng);
        next = match next.checked_add(skip) {
            Some(v) if v < len => v,
            _ => break,
        };
        out.push(next);
        next += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::HashMap;

    #[test]
    fn fnm_full_universe_and_empty() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let f = sample_fnm(2, 4, &mut rng).unwrap();
        let mut idx: Vec<u64> = f.clauses().iter().map(|c| c.index()).collect();
        idx.sort();
        assert_eq!(idx, vec![0, 1, 2, 3]);
        assert!(sample_fnm(2, 0, &mut rng).unwrap().is_empty());
        assert!(matches!(
            sample_fnm(2, 5, &mut rng),
            Err(Error::TooManyClauses { .. })
        ));
    }

    #[test]
    fn fnm_uniform_over_three_subsets() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let trials = 100_000;
        let mut counts: HashMap<Vec<u64>, usize> = HashMap::new();
        for _ in 0..trials {
            let f = sample_fnm(2, 3, &mut rng).unwrap();
            let mut idx: Vec<u64> = f.clauses().iter().map(|c| c.index()).collect();
            idx.sort();
            *counts.entry(idx).or_default() += 1;
        }
        assert_eq!(counts.len(), 4);
        for &c in counts.values() {
            let freq = c as f64 / trials as f64;
            assert!((freq - 0.25).abs() < 0.01, "frequency {freq}");
        }
    }

    #[test]
    fn fnm_distinct_clauses_at_high_density() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = sample_fnm(10, 170, &mut rng).unwrap();
        let set: HashSet<_> = f.clauses().iter().collect();
        assert_eq!(set.len(), 170);
    }

    #[test]
    fn fnp_extremes() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        assert!(sample_fnp(7, 0.0, &mut rng).unwrap().is_empty());
        assert_eq!(sample_fnp(7, 1.0, &mut rng).unwrap().len(), 84);
        assert!(sample_fnp(7, 1.5, &mut rng).is_err());
    }

    #[test]
    fn fnp_mean_clause_count() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 50;
        let p = 1.0 / 100.0;
        let trials = 10_000;
        let counts: Vec<f64> = (0..trials)
            .map(|_| sample_fnp(n, p, &mut rng).unwrap().len() as f64)
            .collect();
        let mean = counts.iter().sum::<f64>() / trials as f64;
        let var = counts.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (trials - 1) as f64;
        let se = (var / trials as f64).sqrt();
        assert!((mean - 49.0).abs() < 3.0 * se, "mean {mean} se {se}");
    }
}
