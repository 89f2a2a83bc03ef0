//! Brute-force ground truth for small instances.
//!
//! Everything here works by exhaustive enumeration (truth tables, all
//! subformulas, all assignments) and shares no code with the production
//! algorithms it is used to check.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::formula::{Formula, Literal};

pub use crate::stats::{chi_square_compare, ChiSquare};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleLimits {
    /// Largest `n` for truth tables.
    pub max_vars: u32,
    /// Largest clause count for subformula enumeration.
    pub max_clauses: usize,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits {
            max_vars: 20,
            max_clauses: 16,
        }
    }
}

impl OracleLimits {
    fn check_vars(&self, f: &Formula) -> Result<()> {
        if f.n() > self.max_vars {
            return Err(Error::LimitExceeded {
                what: "oracle variables",
                value: f.n() as usize,
                limit: self.max_vars as usize,
            });
        }
        Ok(())
    }

    fn check_clauses(&self, f: &Formula) -> Result<()> {
        if f.len() > self.max_clauses {
            return Err(Error::LimitExceeded {
                what: "oracle clauses",
                value: f.len(),
                limit: self.max_clauses,
            });
        }
        Ok(())
    }
}

/// Truth value of `x` under the assignment whose bit `i` is variable `i`.
#[inline]
fn lit_true(x: Literal, bits: u64) -> bool {
    (bits >> x.var().0 & 1 == 1) != x.is_negated()
}

/// Bitset over all `2^n` assignments.
#[derive(Clone, PartialEq)]
struct Models(Vec<u64>);

impl Models {
    fn full(n: u32) -> Self {
        let count = 1usize << n;
        let mut words = vec![u64::MAX; count.div_ceil(64)];
        if count < 64 {
            words[0] = (1u64 << count) - 1;
        }
        Models(words)
    }

    fn of_literal(n: u32, x: Literal) -> Self {
        let mut m = Models(vec![0; (1usize << n).div_ceil(64)]);
        for a in 0..1u64 << n {
            if lit_true(x, a) {
                m.0[(a / 64) as usize] |= 1 << (a % 64);
            }
        }
        m
    }

    fn and(&mut self, other: &Models) {
        self.0.iter_mut().zip(&other.0).for_each(|(a, b)| *a &= b);
    }

    fn or(&mut self, other: &Models) {
        self.0.iter_mut().zip(&other.0).for_each(|(a, b)| *a |= b);
    }

    fn is_empty(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }

    fn intersects(&self, other: &Models) -> bool {
        self.0.iter().zip(&other.0).any(|(a, b)| a & b != 0)
    }
}

pub fn brute_sat(f: &Formula) -> Result<bool> {
    brute_sat_with(f, OracleLimits::default())
}

pub fn brute_sat_with(f: &Formula, limits: OracleLimits) -> Result<bool> {
    limits.check_vars(f)?;
    Ok((0..1u64 << f.n()).any(|a| {
        f.clauses().iter().all(|c| {
            let (x, y) = c.literals();
            lit_true(x, a) || lit_true(y, a)
        })
    }))
}

/// `{x : some satisfiable H ⊆ F has H ∧ x unsatisfiable}`, by enumerating
/// all `2^m` subformulas.
pub fn brute_spine(f: &Formula) -> Result<Vec<Literal>> {
    brute_spine_with(f, OracleLimits::default())
}

pub fn brute_spine_with(f: &Formula, limits: OracleLimits) -> Result<Vec<Literal>> {
    limits.check_vars(f)?;
    limits.check_clauses(f)?;
    let n = f.n();
    let lits: Vec<Literal> = (0..2 * n as usize).map(Literal::from_code).collect();
    let lit_models: Vec<Models> = lits.iter().map(|&x| Models::of_literal(n, x)).collect();
    let clause_models: Vec<Models> = f
        .clauses()
        .iter()
        .map(|c| {
            let (x, y) = c.literals();
            let mut m = lit_models[x.code()].clone();
            m.or(&lit_models[y.code()]);
            m
        })
        .collect();
    let mut in_spine = vec![false; lits.len()];
    for mask in 0u64..1 << f.len() {
        let mut h = Models::full(n);
        for (i, cm) in clause_models.iter().enumerate() {
            if mask >> i & 1 == 1 {
                h.and(cm);
            }
        }
        if h.is_empty() {
            continue;
        }
        for (code, lm) in lit_models.iter().enumerate() {
            if !h.intersects(lm) {
                in_spine[code] = true;
            }
        }
    }
    Ok(lits.into_iter().filter(|x| in_spine[x.code()]).collect())
}

/// Literals FALSE in every assignment that violates the fewest clauses.
pub fn brute_backbone(f: &Formula) -> Result<Vec<Literal>> {
    brute_backbone_with(f, OracleLimits::default())
}

pub fn brute_backbone_with(f: &Formula, limits: OracleLimits) -> Result<Vec<Literal>> {
    limits.check_vars(f)?;
    let n = f.n();
    let violated = |a: u64| {
        f.clauses()
            .iter()
            .filter(|c| {
                let (x, y) = c.literals();
                !lit_true(x, a) && !lit_true(y, a)
            })
            .count()
    };
    let best = (0..1u64 << n).map(violated).min().unwrap_or(0);
    let mut sometimes_true = vec![false; 2 * n as usize];
    for a in 0..1u64 << n {
        if violated(a) == best {
            for (code, seen) in sometimes_true.iter_mut().enumerate() {
                *seen |= lit_true(Literal::from_code(code), a);
            }
        }
    }
    Ok((0..2 * n as usize)
        .filter(|&c| !sometimes_true[c])
        .map(Literal::from_code)
        .collect())
}

/// Successes out of trials.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Proportion {
    pub successes: u64,
    pub trials: u64,
}

impl Proportion {
    pub fn estimate(&self) -> f64 {
        self.successes as f64 / self.trials as f64
    }

    pub fn se(&self) -> f64 {
        crate::stats::proportion_se(self.successes, self.trials)
    }
}

/// Monte Carlo frequency with which every vertex of a random digraph on `k`
/// vertices (each ordered pair an edge independently with probability `p`)
/// is reachable from vertex 0.
pub fn reach_all_probability_mc(k: usize, p: f64, samples: u64, seed: u64) -> Proportion {
    assert!((1..=64).contains(&k), "k must be in 1..=64");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let full = if k == 64 { u64::MAX } else { (1u64 << k) - 1 };
    let mut adj = vec![0u64; k];
    let mut successes = 0;
    for _ in 0..samples {
        for (u, row) in adj.iter_mut().enumerate() {
            *row = 0;
            for v in 0..k {
                if v != u && rng.random_bool(p) {
                    *row |= 1 << v;
                }
            }
        }
        let mut seen = 1u64;
        let mut todo = 1u64;
        while todo != 0 {
            let u = todo.trailing_zeros() as usize;
            todo &= todo - 1;
            let fresh = adj[u] & !seen;
            seen |= fresh;
            todo |= fresh;
        }
        if seen == full {
            successes += 1;
        }
    }
    Proportion {
        successes,
        trials: samples,
    }
}

/// Whether every literal of `set` has a path to `target` using only
/// vertices of `set ∪ {target}`, checked edge by edge against the clauses.
pub fn brute_paths_within(f: &Formula, set: &[Literal], target: Literal, inward: bool) -> bool {
    let edge = |u: Literal, v: Literal| {
        f.clauses().iter().any(|c| {
            let (x, y) = c.literals();
            (u == x.negate() && v == y) || (u == y.negate() && v == x)
        })
    };
    let mut reached = vec![target];
    let mut changed = true;
    while changed {
        changed = false;
        for &s in set {
            if reached.contains(&s) {
                continue;
            }
            let hit = reached
                .iter()
                .any(|&r| if inward { edge(s, r) } else { edge(r, s) });
            if hit {
                reached.push(s);
                changed = true;
            }
        }
    }
    set.iter().all(|s| reached.contains(s))
}
