use crate::formula::{Clause, Literal};

/// The spine of a satisfiable formula maintained under clause insertion.
///
/// Adding `(a ∨ b)` (with `a`, `b` not both in the spine) creates exactly the
/// new members `z` whose old-graph paths reach `ā` or `b̄` avoiding the old
/// spine, filtered as follows: `z` reaching both qualifies, `z` reaching `ā`
/// qualifies if `b` is already a member, and symmetrically for `b̄`.
#[derive(Debug, Clone)]
pub struct IncrementalSpine {
    n: u32,
    succ: Vec<Vec<u32>>,
    member: Vec<bool>,
    size: usize,
    clauses: usize,
    mark: Vec<u8>,
    touched: Vec<Literal>,
    stack: Vec<Literal>,
}

const FROM_A: u8 = 1;
const FROM_B: u8 = 2;

impl IncrementalSpine {
    pub fn new(n: u32) -> Self {
        let v = 2 * n as usize;
        IncrementalSpine {
            n,
            succ: vec![Vec::new(); v],
            member: vec![false; v],
            size: 0,
            clauses: 0,
            mark: vec![0; v],
            touched: Vec::new(),
            stack: Vec::new(),
        }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    #[inline]
    pub fn contains(&self, x: Literal) -> bool {
        self.member[x.code()]
    }

    #[inline]
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses
    }

    /// Number of absent clauses whose addition would make the formula
    /// unsatisfiable, `C(|S|, 2)`.
    pub fn unsafe_clause_count(&self) -> u64 {
        let s = self.size as u64;
        s * s.saturating_sub(1) / 2
    }

    /// Adding `c` would make the formula unsatisfiable.
    #[inline]
    pub fn would_break(&self, c: Clause) -> bool {
        let (a, b) = c.literals();
        self.contains(a) && self.contains(b)
    }

    pub fn members(&self) -> Vec<Literal> {
        (0..self.member.len())
            .filter(|&c| self.member[c])
            .map(Literal::from_code)
            .collect()
    }

    /// Reverse search from `start` over non-members, tagging with `bit`.
    fn collect_in(&mut self, start: Literal, bit: u8) {
        if self.member[start.code()] {
            return;
        }
        self.stack.clear();
        self.stack.push(start);
        if self.mark[start.code()] == 0 {
            self.touched.push(start);
        }
        self.mark[start.code()] |= bit;
        while let Some(u) = self.stack.pop() {
            for i in 0..self.succ[u.negate().code()].len() {
                let p = Literal(self.succ[u.negate().code()][i]).negate();
                let m = self.mark[p.code()];
                if self.member[p.code()] || m & bit != 0 {
                    continue;
                }
                if m == 0 {
                    self.touched.push(p);
                }
                self.mark[p.code()] = m | bit;
                self.stack.push(p);
            }
        }
    }

    /// Adds `c` and returns the number of new spine members.
    ///
    /// # Panics
    ///
    /// If `c` would make the formula unsatisfiable.
    pub fn add_clause(&mut self, c: Clause) -> usize {
        assert!(!self.would_break(c), "clause {c} makes the formula UNSAT");
        let (a, b) = c.literals();
        self.touched.clear();
        self.collect_in(a.negate(), FROM_A);
        self.collect_in(b.negate(), FROM_B);
        let a_in = self.member[a.code()];
        let b_in = self.member[b.code()];
        let mut added = 0;
        for i in 0..self.touched.len() {
            let z = self.touched[i];
            let m = self.mark[z.code()];
            self.mark[z.code()] = 0;
            let joins = m == FROM_A | FROM_B || (m == FROM_A && b_in) || (m == FROM_B && a_in);
            if joins {
                self.member[z.code()] = true;
                added += 1;
            }
        }
        self.size += added;
        self.succ[a.negate().code()].push(b.0);
        self.succ[b.negate().code()].push(a.0);
        self.clauses += 1;
        added
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::digraph::is_satisfiable;
    use crate::formula::sample_fnm;
    use crate::spine::spine;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    proptest! {
        #[test]
        fn tracks_full_recomputation(n in 2u32..40, seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = crate::formula::clause_universe_size(n).min(2 * n as u64);
            let f = sample_fnm(n, m, &mut rng).unwrap();
            let mut inc = IncrementalSpine::new(n);
            let mut kept = crate::formula::Formula::empty(n);
            for &c in f.clauses() {
                let mut trial = kept.clone();
                trial.push(c);
                prop_assert_eq!(inc.would_break(c), !is_satisfiable(&trial));
                if inc.would_break(c) {
                    continue;
                }
                inc.add_clause(c);
                kept = trial;
                prop_assert_eq!(inc.members(), spine(&kept).members);
                prop_assert_eq!(inc.size(), spine(&kept).size());
            }
        }
    }
}
