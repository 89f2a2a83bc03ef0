use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::sample::skip_sample;
use super::{clause_universe_size, Clause, Ensemble, Formula};
use crate::error::{Error, Result};
use crate::seed::mix;
use crate::spine::IncrementalSpine;

/// Number of dyadic layers splitting `[0, 1)`.
const LAYERS: usize = 41;

/// Lower edge of layer `k`: `0, 2^-40, 2^-39, ..., 2^-1`, and `1` for `k = 41`.
fn layer_edge(k: usize) -> f64 {
    if k == 0 {
        0.0
    } else {
        (2.0f64).powi(k as i32 - LAYERS as i32)
    }
}

/// Coupling of `F(n,p)` over all `p`: every clause `C` gets an independent
/// uniform birthday `U_C`, and the formula at `p` is `{C : U_C < p}`.
///
/// Birthdays are materialized lazily, one dyadic layer of `[0,1)` at a time.
/// Layer `[a, b)` receives each not-yet-born clause independently with
/// probability `(b - a) / (1 - a)` (by geometric skipping, from a stream keyed
/// on `(seed, n, layer)`), and each received clause gets a uniform birthday
/// inside the layer. This reproduces i.i.d. uniform birthdays exactly while
/// touching only the clauses born so far.
#[derive(Debug, Clone)]
pub struct BirthdayProcess {
    n: u32,
    seed: u64,
    layers_done: usize,
    born: Vec<(f64, u64)>,
    born_set: HashSet<u64>,
}

impl BirthdayProcess {
    pub fn new(n: u32, seed: u64) -> Self {
        BirthdayProcess {
            n,
            seed,
            layers_done: 0,
            born: Vec::new(),
            born_set: HashSet::new(),
        }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    fn materialize_below(&mut self, p: f64) {
        let universe = clause_universe_size(self.n);
        while self.layers_done < LAYERS && layer_edge(self.layers_done) < p {
            let k = self.layers_done;
            let (lo, hi) = (layer_edge(k), layer_edge(k + 1));
            let q = ((hi - lo) / (1.0 - lo)).min(1.0);
            let mut rng = ChaCha8Rng::seed_from_u64(mix(&[self.seed, self.n as u64, k as u64]));
            let mut fresh: Vec<(f64, u64)> = skip_sample(universe, q, &mut rng)
                .into_iter()
                .filter(|idx| !self.born_set.contains(idx))
                .map(|idx| (lo + (hi - lo) * rng.random::<f64>(), idx))
                .collect();
            fresh.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            self.born_set.extend(fresh.iter().map(|&(_, idx)| idx));
            self.born.extend(fresh);
            self.layers_done += 1;
        }
    }

    /// Clauses with birthday below `p`, in birthday order, with their
    /// birthdays.
    pub fn births_below(&mut self, p: f64) -> &[(f64, u64)] {
        let p = p.clamp(0.0, 1.0);
        self.materialize_below(p);
        let end = self.born.partition_point(|&(u, _)| u < p);
        &self.born[..end]
    }

    /// `F(n,p)` under this coupling, clauses in birthday order.
    pub fn formula_at(&mut self, p: f64) -> Formula {
        let clauses = self
            .births_below(p)
            .iter()
            .map(|&(_, idx)| Clause::from_index(idx))
            .collect();
        Formula::from_parts_unchecked(self.n, clauses, Ensemble::Process { p })
    }

    /// The first `m` clauses to be born: a uniform `F(n,m)`, nested in `m`.
    pub fn first_clauses(&mut self, m: u64) -> Result<Formula> {
        let universe = clause_universe_size(self.n);
        if m > universe {
            return Err(Error::TooManyClauses { n: self.n, m, universe });
        }
        while (self.born.len() as u64) < m && self.layers_done < LAYERS {
            self.materialize_below(layer_edge(self.layers_done + 1));
        }
        let clauses = self.born[..m as usize]
            .iter()
            .map(|&(_, idx)| Clause::from_index(idx))
            .collect();
        Ok(Formula::from_parts_unchecked(self.n, clauses, Ensemble::Fnm { m }))
    }

    /// The reduced formula `Φ_p`: clauses are taken in birthday order and each
    /// is kept only if it leaves the formula satisfiable. `Φ_p` equals
    /// `formula_at(p)` exactly up to the first time the latter turns UNSAT.
    pub fn reduced_formula_at(&mut self, p: f64) -> Formula {
        let n = self.n;
        let mut inc = IncrementalSpine::new(n);
        let mut kept = Vec::new();
        for &(_, idx) in self.births_below(p) {
            let c = Clause::from_index(idx);
            if inc.would_break(c) {
                continue;
            }
            inc.add_clause(c);
            kept.push(c);
        }
        Formula::from_parts_unchecked(n, kept, Ensemble::Process { p })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::digraph::is_satisfiable;

    #[test]
    fn zero_and_one() {
        let mut proc = BirthdayProcess::new(6, 5);
        assert!(proc.formula_at(0.0).is_empty());
        assert_eq!(proc.formula_at(1.0).len() as u64, clause_universe_size(6));
    }

    #[test]
    fn nested_and_deterministic() {
        let mut a = BirthdayProcess::new(40, 99);
        let mut b = BirthdayProcess::new(40, 99);
        let ps = [0.001, 0.01, 0.0125, 0.03, 0.2];
        let mut prev: Vec<Clause> = Vec::new();
        for &p in &ps {
            let f = a.formula_at(p);
            assert_eq!(&f.clauses()[..prev.len()], &prev[..]);
            prev = f.clauses().to_vec();
        }
        // Materialization order must not matter.
        assert_eq!(b.formula_at(0.2).clauses(), &prev[..]);
        assert_eq!(b.formula_at(0.01), a.formula_at(0.01));
    }

    #[test]
    fn first_clauses_are_nested_prefixes() {
        let mut a = BirthdayProcess::new(25, 3);
        let f = a.first_clauses(40).unwrap();
        assert_eq!(f.len(), 40);
        let g = a.first_clauses(300).unwrap();
        assert_eq!(&g.clauses()[..40], f.clauses());
        let mut b = BirthdayProcess::new(25, 3);
        assert_eq!(b.first_clauses(40).unwrap().clauses(), f.clauses());
        assert_eq!(b.first_clauses(1200).unwrap().len(), 1200);
        assert!(b.first_clauses(1201).is_err());
        // Birth order agrees with the p-indexed view.
        let p = a.births_below(1.0)[299].0;
        assert_eq!(a.formula_at(p).clauses(), &g.clauses()[..299]);
    }

    #[test]
    fn reduced_formula_is_sat_and_agrees_before_first_unsat() {
        let mut proc = BirthdayProcess::new(30, 4);
        let p = 0.06;
        let phi = proc.reduced_formula_at(p);
        assert!(is_satisfiable(&phi));
        let full = proc.formula_at(p);
        let first_unsat = (0..=full.len())
            .find(|&m| !is_satisfiable(&full.prefix(m)))
            .expect("dense enough to be UNSAT");
        assert_eq!(
            &phi.clauses()[..first_unsat - 1],
            &full.clauses()[..first_unsat - 1]
        );
    }
}
