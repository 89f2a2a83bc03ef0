//! Literals, clauses, formulas and the random 2-SAT ensembles.
//!
//! # Encoding
//!
//! Variables are 0-based internally (`Var(i)` is `x_{i+1}` in DIMACS). A
//! literal is stored as `code = 2*var + polarity`, polarity 0 for the
//! positive literal and 1 for its negation, so negation flips the low bit and
//! the code doubles as the implication-digraph vertex id.
//!
//! # Clause index bijection
//!
//! The `2n(n-1)` clauses on `n` variables are numbered
//!
//! ```text
//! index = 4 * pair_rank(i, j) + 2 * pol_i + pol_j,   i < j,
//! pair_rank(i, j) = j * (j - 1) / 2 + i               (colexicographic)
//! ```
//!
//! Colexicographic ranking makes the clauses on the first `n` variables a
//! prefix `0..2n(n-1)` of the index space for every `n`, so seeds reproduce
//! across formula sizes and versions.

mod birthday;
mod dimacs;
pub(crate) mod sample;

use std::fmt;

pub use birthday::BirthdayProcess;
pub use dimacs::{read_dimacs, write_dimacs, DimacsRead};
pub use sample::{sample_fnm, sample_fnp};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(pub u32);

impl Var {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn positive(self) -> Literal {
        Literal(self.0 << 1)
    }

    #[inline]
    pub fn negative(self) -> Literal {
        Literal((self.0 << 1) | 1)
    }
}

/// A literal `x_i` or `¬x_i`, encoded as `2*i + polarity`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal(pub u32);

impl Literal {
    #[inline]
    pub fn new(var: Var, negated: bool) -> Self {
        Literal((var.0 << 1) | negated as u32)
    }

    #[inline]
    pub fn from_code(code: usize) -> Self {
        Literal(code as u32)
    }

    #[inline]
    pub fn code(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn var(self) -> Var {
        Var(self.0 >> 1)
    }

    #[inline]
    pub fn is_negated(self) -> bool {
        self.0 & 1 == 1
    }

    #[inline]
    pub fn negate(self) -> Self {
        Literal(self.0 ^ 1)
    }

    /// Signed DIMACS form (`x_1` is `1`, `¬x_1` is `-1`).
    pub fn to_dimacs(self) -> i64 {
        let v = self.var().0 as i64 + 1;
        if self.is_negated() {
            -v
        } else {
            v
        }
    }

    pub fn from_dimacs(value: i64) -> Option<Self> {
        if value == 0 || value.unsigned_abs() > u32::MAX as u64 / 2 {
            return None;
        }
        Some(Literal::new(
            Var((value.unsigned_abs() - 1) as u32),
            value < 0,
        ))
    }

    /// Truth value under an assignment indexed by variable.
    #[inline]
    pub fn eval(self, assignment: &[bool]) -> bool {
        assignment[self.var().index()] != self.is_negated()
    }
}

impl serde::Serialize for Literal {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_i64(self.to_dimacs())
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

/// Number of distinct 2-clauses on `n` variables, `2n(n-1)`.
pub fn clause_universe_size(n: u32) -> u64 {
    let n = n as u64;
    2 * n * n.saturating_sub(1)
}

/// Unordered disjunction of two strictly distinct literals, stored with the
/// smaller code first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Clause {
    a: Literal,
    b: Literal,
}

impl Clause {
    /// `None` when the literals share a variable (`x ∨ x` or `x ∨ ¬x`).
    pub fn new(x: Literal, y: Literal) -> Option<Self> {
        if x.var() == y.var() {
            return None;
        }
        let (a, b) = if x < y { (x, y) } else { (y, x) };
        Some(Clause { a, b })
    }

    #[inline]
    pub fn literals(self) -> (Literal, Literal) {
        (self.a, self.b)
    }

    #[inline]
    pub fn max_var(self) -> Var {
        self.b.var()
    }

    pub fn eval(self, assignment: &[bool]) -> bool {
        self.a.eval(assignment) || self.b.eval(assignment)
    }

    pub fn index(self) -> u64 {
        let i = self.a.var().0 as u64;
        let j = self.b.var().0 as u64;
        let rank = j * (j - 1) / 2 + i;
        4 * rank + 2 * self.a.is_negated() as u64 + self.b.is_negated() as u64
    }

    pub fn from_index(index: u64) -> Self {
        let rank = index / 4;
        let pol_a = (index >> 1) & 1 == 1;
        let pol_b = index & 1 == 1;
        let j = colex_top(rank);
        let i = rank - j * (j - 1) / 2;
        Clause {
            a: Literal::new(Var(i as u32), pol_a),
            b: Literal::new(Var(j as u32), pol_b),
        }
    }
}

/// Largest `j` with `j(j-1)/2 <= rank`.
fn colex_top(rank: u64) -> u64 {
    let mut j = ((1.0 + (1.0 + 8.0 * rank as f64).sqrt()) / 2.0) as u64;
    while j * (j - 1) / 2 > rank {
        j -= 1;
    }
    while (j + 1) * j / 2 <= rank {
        j += 1;
    }
    j
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} ∨ {})", self.a, self.b)
    }
}

/// Where a formula came from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Ensemble {
    Fnm { m: u64 },
    Fnp { p: f64 },
    Process { p: f64 },
    File,
    /// Built by hand or by a test.
    Explicit,
}

/// A conjunction of distinct 2-clauses over `n` variables.
///
/// Clause order is meaningful: samplers store clauses in a uniformly random
/// insertion order and the birthday process stores them by birthday, so a
/// prefix of the clause list is the formula at an earlier time.
#[derive(Debug, Clone, PartialEq)]
pub struct Formula {
    n: u32,
    clauses: Vec<Clause>,
    ensemble: Ensemble,
}

impl Formula {
    pub fn empty(n: u32) -> Self {
        Formula {
            n,
            clauses: Vec::new(),
            ensemble: Ensemble::Explicit,
        }
    }

    /// Validates variable ranges and rejects repeated clauses.
    pub fn new(n: u32, clauses: Vec<Clause>) -> Result<Self> {
        let (f, dups) = Self::from_clauses_dedup(n, clauses)?;
        if dups > 0 {
            return Err(Error::domain(format!("{dups} repeated clause(s)")));
        }
        Ok(f)
    }

    /// Like [`Formula::new`] but keeps the first copy of a repeated clause and
    /// reports how many copies were dropped.
    pub fn from_clauses_dedup(n: u32, clauses: Vec<Clause>) -> Result<(Self, usize)> {
        if let Some(c) = clauses.iter().find(|c| c.max_var().0 >= n) {
            return Err(Error::domain(format!(
                "clause {c} uses a variable beyond n = {n}"
            )));
        }
        let mut seen = std::collections::HashSet::with_capacity(clauses.len());
        let before = clauses.len();
        let clauses: Vec<Clause> = clauses.into_iter().filter(|c| seen.insert(*c)).collect();
        let dups = before - clauses.len();
        Ok((
            Formula {
                n,
                clauses,
                ensemble: Ensemble::Explicit,
            },
            dups,
        ))
    }

    /// Builds from signed DIMACS-style pairs; panics on invalid input, for
    /// tests and examples.
    pub fn from_pairs(n: u32, pairs: &[(i64, i64)]) -> Self {
        let clauses = pairs
            .iter()
            .map(|&(x, y)| {
                let x = Literal::from_dimacs(x).expect("nonzero literal");
                let y = Literal::from_dimacs(y).expect("nonzero literal");
                Clause::new(x, y).expect("strictly distinct literals")
            })
            .collect();
        Formula::new(n, clauses).expect("valid formula")
    }

    pub(crate) fn from_parts_unchecked(n: u32, clauses: Vec<Clause>, ensemble: Ensemble) -> Self {
        Formula {
            n,
            clauses,
            ensemble,
        }
    }

    #[inline]
    pub fn n(&self) -> u32 {
        self.n
    }

    #[inline]
    pub fn num_literals(&self) -> usize {
        2 * self.n as usize
    }

    #[inline]
    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.clauses.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    #[inline]
    pub fn ensemble(&self) -> Ensemble {
        self.ensemble
    }

    pub fn with_ensemble(mut self, ensemble: Ensemble) -> Self {
        self.ensemble = ensemble;
        self
    }

    /// The first `m` clauses as a formula of their own.
    pub fn prefix(&self, m: usize) -> Formula {
        Formula {
            n: self.n,
            clauses: self.clauses[..m.min(self.clauses.len())].to_vec(),
            ensemble: self.ensemble,
        }
    }

    /// Appends a clause; returns `false` (and leaves the formula unchanged) if
    /// it is already present.
    pub fn push(&mut self, clause: Clause) -> bool {
        assert!(clause.max_var().0 < self.n, "clause {clause} out of range");
        if self.clauses.contains(&clause) {
            return false;
        }
        self.clauses.push(clause);
        true
    }

    pub fn eval(&self, assignment: &[bool]) -> bool {
        self.clauses.iter().all(|c| c.eval(assignment))
    }

    /// Clauses sorted by index, the canonical form used for round trips.
    pub fn canonical_clauses(&self) -> Vec<Clause> {
        let mut cs = self.clauses.clone();
        cs.sort_by_key(|c| c.index());
        cs
    }
}

/// True iff no variable occurs with both polarities.
pub fn is_strictly_distinct<I: IntoIterator<Item = Literal>>(literals: I) -> bool {
    let mut seen = std::collections::HashMap::new();
    for l in literals {
        if let Some(neg) = seen.insert(l.var(), l.is_negated()) {
            if neg != l.is_negated() {
                return false;
            }
        }
    }
    true
}
