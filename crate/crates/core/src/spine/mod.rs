//! The spine `S(F) = {x : x ⇝ x̄}`, its incremental maintenance, backbones
//! and the trimmed out-graph search.
//!
//! A literal is in the spine iff its out-set is not strictly distinct, and
//! the spine is closed under predecessors: if `y ⇝ x` and `x ∈ S` then
//! `y ∈ S`. Both facts drive [`spine`], which decides most literals without
//! searching from them.

mod incremental;
mod trimmed;

pub use incremental::IncrementalSpine;
pub use trimmed::{
    trimmed_in_graph, trimmed_out_graph, EdgeSource, GenerativeSource, ReplaySource, Scope,
    TrimmedGraph,
};

use crate::digraph::{Bfs, Condensation, ImplicationDigraph};
use crate::error::{Error, Result};
use crate::formula::{Formula, Literal};

/// Outcome of a single membership query.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Membership {
    Member,
    NonMember,
    /// The search cap ran out before either answer was certain.
    Undetermined,
}

/// How [`spine`] settled a literal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decision {
    /// `x` and `x̄` share a strongly connected component.
    SccCycle,
    /// A search from `x` met both polarities of some variable.
    BfsAbort,
    /// A search from `x` exhausted a strictly distinct out-set.
    BfsExhausted,
    /// Membership followed from another literal's answer.
    Inferred,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpineReport {
    /// Members in increasing code order.
    pub members: Vec<Literal>,
    /// Per literal code.
    pub decisions: Vec<Decision>,
}

impl SpineReport {
    pub fn size(&self) -> usize {
        self.members.len()
    }

    pub fn contains(&self, x: Literal) -> bool {
        self.members.binary_search(&x).is_ok()
    }
}

/// Tests `x ∈ S` by breadth-first search from `x`, stopping as soon as the
/// visited set stops being strictly distinct. `cap` bounds the number of
/// visited literals.
pub fn spine_membership(
    d: &ImplicationDigraph,
    x: Literal,
    cap: Option<usize>,
    bfs: &mut Bfs,
) -> Membership {
    bfs.reset();
    bfs.visit(x);
    let mut head = 0;
    while head < bfs.order().len() {
        let u = bfs.order()[head];
        head += 1;
        for &w in d.successors(u) {
            let w = Literal(w);
            if bfs.visit(w) {
                if bfs.visited(w.negate()) {
                    return Membership::Member;
                }
                if cap.is_some_and(|c| bfs.order().len() > c) {
                    return Membership::Undetermined;
                }
            }
        }
    }
    Membership::NonMember
}

pub fn spine(f: &Formula) -> SpineReport {
    let d = ImplicationDigraph::build(f);
    let cond = d.condensation();
    spine_of(&d, &cond)
}

/// Exact spine from a prebuilt digraph and its condensation.
pub fn spine_of(d: &ImplicationDigraph, cond: &Condensation) -> SpineReport {
    const UNKNOWN: u8 = 0;
    const IN: u8 = 1;
    const OUT: u8 = 2;
    let v = d.num_vertices();
    let mut state = vec![UNKNOWN; v];
    let mut decisions = vec![Decision::Inferred; v];
    let mut bfs = Bfs::new(v);
    let mut back: Vec<Literal> = Vec::new();

    let absorb = |seed: Literal, state: &mut Vec<u8>, back: &mut Vec<Literal>| {
        back.clear();
        back.push(seed);
        while let Some(u) = back.pop() {
            for p in d.predecessors(u) {
                if state[p.code()] != IN {
                    state[p.code()] = IN;
                    back.push(p);
                }
            }
        }
    };

    for code in 0..v {
        let x = Literal::from_code(code);
        if cond.is_contradictory(x) {
            decisions[code] = Decision::SccCycle;
            if state[code] != IN {
                state[code] = IN;
                absorb(x, &mut state, &mut back);
            }
        }
    }

    for code in 0..v {
        if state[code] != UNKNOWN {
            continue;
        }
        let x = Literal::from_code(code);
        bfs.reset();
        bfs.visit(x);
        let mut head = 0;
        let mut member = false;
        'search: while head < bfs.order().len() {
            let u = bfs.order()[head];
            head += 1;
            for &w in d.successors(u) {
                let w = Literal(w);
                if bfs.visit(w) && (state[w.code()] == IN || bfs.visited(w.negate())) {
                    member = true;
                    break 'search;
                }
            }
        }
        if member {
            decisions[code] = Decision::BfsAbort;
            state[code] = IN;
            absorb(x, &mut state, &mut back);
        } else {
            decisions[code] = Decision::BfsExhausted;
            for &y in bfs.order() {
                state[y.code()] = OUT;
            }
        }
    }

    let members = (0..v)
        .filter(|&c| state[c] == IN)
        .map(Literal::from_code)
        .collect();
    SpineReport { members, decisions }
}

/// Largest `n` accepted by [`backbone`].
pub const BACKBONE_MAX_VARS: u32 = 24;

/// Literals FALSE in every assignment minimizing the number of violated
/// clauses, by Gray-code enumeration of all `2^n` assignments.
pub fn backbone(f: &Formula) -> Result<Vec<Literal>> {
    let n = f.n();
    if n > BACKBONE_MAX_VARS {
        return Err(Error::LimitExceeded {
            what: "backbone variables",
            value: n as usize,
            limit: BACKBONE_MAX_VARS as usize,
        });
    }
    let n = n as usize;
    let mut by_var: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, c) in f.clauses().iter().enumerate() {
        let (a, b) = c.literals();
        by_var[a.var().index()].push(i);
        by_var[b.var().index()].push(i);
    }
    let mut assignment = vec![false; n];
    let mut violated = f.clauses().iter().filter(|c| !c.eval(&assignment)).count();
    let mut best = violated;
    // Bit i of `ever_true` / `ever_false`: variable i took that value in
    // some optimal assignment.
    let mut ever_true = 0u32;
    let mut ever_false = (1u64 << n).wrapping_sub(1) as u32;
    for step in 1u64..(1u64 << n) {
        let flip = step.trailing_zeros() as usize;
        for &ci in &by_var[flip] {
            if !f.clauses()[ci].eval(&assignment) {
                violated -= 1;
            }
        }
        assignment[flip] = !assignment[flip];
        for &ci in &by_var[flip] {
            if !f.clauses()[ci].eval(&assignment) {
                violated += 1;
            }
        }
        let mask = assignment
            .iter()
            .enumerate()
            .fold(0u32, |m, (i, &b)| m | ((b as u32) << i));
        if violated < best {
            best = violated;
            ever_true = mask;
            ever_false = !mask;
        } else if violated == best {
            ever_true |= mask;
            ever_false |= !mask;
        }
    }
    let mut out = Vec::new();
    for i in 0..n as u32 {
        let var = crate::formula::Var(i);
        if ever_true >> i & 1 == 0 {
            out.push(var.positive());
        }
        if ever_false >> i & 1 == 0 {
            out.push(var.negative());
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::digraph::is_satisfiable;
    use crate::formula::{is_strictly_distinct, sample_fnm, BirthdayProcess};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn lit(v: i64) -> Literal {
        Literal::from_dimacs(v).unwrap()
    }

    #[test]
    fn small_examples() {
        assert_eq!(spine(&Formula::from_pairs(2, &[(1, 2)])).size(), 0);
        let chain = Formula::from_pairs(2, &[(-1, 2), (-2, -1)]);
        assert_eq!(spine(&chain).members, vec![lit(1)]);
        let full = Formula::from_pairs(2, &[(1, 2), (1, -2), (-1, 2), (-1, -2)]);
        assert_eq!(spine(&full).size(), 4);
        assert!(spine(&full)
            .decisions
            .iter()
            .all(|&d| d == Decision::SccCycle));
    }

    #[test]
    fn membership_examples() {
        let mut bfs = Bfs::new(4);
        let d = ImplicationDigraph::build(&Formula::empty(2));
        assert_eq!(spine_membership(&d, lit(1), None, &mut bfs), Membership::NonMember);
        let d = ImplicationDigraph::build(&Formula::from_pairs(2, &[(-1, 2), (-2, -1)]));
        assert_eq!(spine_membership(&d, lit(1), None, &mut bfs), Membership::Member);
        assert_eq!(spine_membership(&d, lit(1), Some(1), &mut bfs), Membership::Undetermined);
    }

    #[test]
    fn backbone_examples() {
        assert!(backbone(&Formula::empty(3)).unwrap().is_empty());
        let chain = Formula::from_pairs(2, &[(-1, 2), (-2, -1)]);
        assert_eq!(backbone(&chain).unwrap(), vec![lit(1)]);
        assert!(backbone(&Formula::empty(25)).is_err());
    }

    fn arb_formula(max_n: u32, max_alpha: f64) -> impl Strategy<Value = Formula> {
        (2u32..max_n, any::<u64>(), 0.0f64..max_alpha).prop_map(|(n, seed, alpha)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = ((alpha * n as f64) as u64).min(crate::formula::clause_universe_size(n));
            sample_fnm(n, m, &mut rng).unwrap()
        })
    }

    proptest! {
        #[test]
        fn matches_half_cycle_definition(f in arb_formula(16, 2.0)) {
            let d = ImplicationDigraph::build(&f);
            let s = spine(&f);
            for code in 0..d.num_vertices() {
                let x = Literal::from_code(code);
                prop_assert_eq!(s.contains(x), d.reaches(x, x.negate()));
            }
        }

        #[test]
        fn membership_agrees_with_reachability(f in arb_formula(30, 2.0), a in 0usize..60) {
            let d = ImplicationDigraph::build(&f);
            let x = Literal::from_code(a % d.num_vertices());
            let mut bfs = Bfs::new(d.num_vertices());
            let expect = if d.reaches(x, x.negate()) { Membership::Member } else { Membership::NonMember };
            prop_assert_eq!(spine_membership(&d, x, None, &mut bfs), expect);
        }

        #[test]
        fn sat_spine_is_strictly_distinct(f in arb_formula(30, 1.5)) {
            if is_satisfiable(&f) {
                prop_assert!(is_strictly_distinct(spine(&f).members));
            }
        }

        #[test]
        fn sat_backbone_equals_spine(f in arb_formula(11, 1.5)) {
            if is_satisfiable(&f) {
                prop_assert_eq!(backbone(&f).unwrap(), spine(&f).members);
            }
        }

        #[test]
        fn monotone_along_birthday_process(n in 5u32..60, seed in any::<u64>()) {
            let mut proc = BirthdayProcess::new(n, seed);
            let mut prev: Vec<Literal> = Vec::new();
            for step in 1..=12 {
                let p = step as f64 * 0.25 / n as f64;
                let s = spine(&proc.formula_at(p)).members;
                prop_assert!(prev.iter().all(|x| s.binary_search(x).is_ok()));
                prev = s;
            }
        }

        #[test]
        fn first_unsat_clause_joins_two_spine_literals(n in 3u32..50, seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = crate::formula::clause_universe_size(n).min(3 * n as u64);
            let f = sample_fnm(n, m, &mut rng).unwrap();
            for k in 0..f.len() {
                let before = f.prefix(k);
                if !is_satisfiable(&before) {
                    break;
                }
                let (a, b) = f.clauses()[k].literals();
                let s = spine(&before);
                let breaks = !is_satisfiable(&f.prefix(k + 1));
                prop_assert_eq!(breaks, s.contains(a) && s.contains(b));
            }
        }
    }
}
