//! The trimmed out-graph `L̃⁺(x)`: a strictly distinct subgraph of the
//! out-set grown by local search.
//!
//! Each round selects the smallest frontier literal `v`, tests `v → w` for
//! every literal `w` on a variable outside the current graph, adjoins the
//! literals that answer yes (only the unnegated one when both polarities of
//! a variable do), and then tests both orientations between every new
//! literal and every other frontier literal, keeping at most one edge per
//! pair (`w → f` preferred). One yes/no outcome is recorded per variable pair.

use std::collections::{BTreeSet, HashMap, HashSet};

use rand::Rng;

use crate::digraph::ImplicationDigraph;
use crate::formula::sample::skip_sample;
use crate::formula::{Clause, Ensemble, Formula, Literal, Var};

/// Variables a search may touch: index below `limit` and not marked in
/// `used`.
#[derive(Debug, Clone, Copy)]
pub struct Scope<'a> {
    pub limit: u32,
    pub used: Option<&'a [bool]>,
}

impl<'a> Scope<'a> {
    pub fn all(n: u32) -> Self {
        Scope {
            limit: n,
            used: None,
        }
    }

    #[inline]
    pub fn admits(&self, v: Var) -> bool {
        v.0 < self.limit && self.used.is_none_or(|u| !u[v.index()])
    }
}

/// Answers edge queries for the trimmed search.
pub trait EdgeSource {
    fn n(&self) -> u32;

    /// All `w` with `v → w` whose variable is below `limit` and admitted.
    fn out_hits(&mut self, v: Literal, limit: u32, admit: &dyn Fn(Var) -> bool) -> Vec<Literal>;

    /// Whether `u → w` is an edge.
    fn test(&mut self, u: Literal, w: Literal) -> bool;
}

/// Replays the search on a concrete formula.
#[derive(Debug, Clone, Copy)]
pub struct ReplaySource<'a> {
    d: &'a ImplicationDigraph,
}

impl<'a> ReplaySource<'a> {
    pub fn new(d: &'a ImplicationDigraph) -> Self {
        ReplaySource { d }
    }
}

impl EdgeSource for ReplaySource<'_> {
    fn n(&self) -> u32 {
        self.d.n()
    }

    fn out_hits(&mut self, v: Literal, limit: u32, admit: &dyn Fn(Var) -> bool) -> Vec<Literal> {
        self.d
            .successors(v)
            .iter()
            .map(|&w| Literal(w))
            .filter(|w| w.var().0 < limit && admit(w.var()))
            .collect()
    }

    fn test(&mut self, u: Literal, w: Literal) -> bool {
        self.d.has_edge(u, w)
    }
}

/// Reveals a random formula from `F(n,p)` lazily: every clause is decided
/// the first time a query touches it, and the answer is remembered.
///
/// Out-hit queries are answered by geometric skipping over the candidate
/// literals, so their cost is proportional to the number of yes answers.
/// Clauses skipped this way are not stored, which is sound as long as no
/// search re-asks an out-hit query about a clause it has already decided
/// negatively; searches confined to untouched variables never do.
#[derive(Debug, Clone)]
pub struct GenerativeSource<R> {
    n: u32,
    p: f64,
    rng: R,
    memo: HashMap<u64, bool>,
    revealed: Vec<Clause>,
}

impl<R: Rng> GenerativeSource<R> {
    pub fn new(n: u32, p: f64, rng: R) -> Self {
        GenerativeSource {
            n,
            p,
            rng,
            memo: HashMap::new(),
            revealed: Vec::new(),
        }
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn rng(&mut self) -> &mut R {
        &mut self.rng
    }

    /// The clauses answered yes so far, in order of discovery.
    pub fn revealed_formula(&self) -> Formula {
        Formula::from_parts_unchecked(self.n, self.revealed.clone(), Ensemble::Fnp { p: self.p })
    }

    fn decide(&mut self, c: Clause, forced: Option<bool>) -> bool {
        let idx = c.index();
        if let Some(&ans) = self.memo.get(&idx) {
            return ans;
        }
        let ans = forced.unwrap_or_else(|| self.rng.random_bool(self.p));
        self.memo.insert(idx, ans);
        if ans {
            self.revealed.push(c);
        }
        ans
    }
}

impl<R: Rng> EdgeSource for GenerativeSource<R> {
    fn n(&self) -> u32 {
        self.n
    }

    fn out_hits(&mut self, v: Literal, limit: u32, admit: &dyn Fn(Var) -> bool) -> Vec<Literal> {
        let codes = skip_sample(2 * limit.min(self.n) as u64, self.p, &mut self.rng);
        let mut out = Vec::new();
        for code in codes {
            let w = Literal::from_code(code as usize);
            if w.var() == v.var() || !admit(w.var()) {
                continue;
            }
            let c = Clause::new(v.negate(), w).expect("distinct variables");
            if self.decide(c, Some(true)) {
                out.push(w);
            }
        }
        out
    }

    fn test(&mut self, u: Literal, w: Literal) -> bool {
        match Clause::new(u.negate(), w) {
            Some(c) => self.decide(c, None),
            None => false,
        }
    }
}

/// Result of a trimmed search. Vertices are listed in discovery order with
/// the root first.
#[derive(Debug, Clone, PartialEq)]
pub struct TrimmedGraph {
    pub root: Literal,
    pub vertices: Vec<Literal>,
    pub edges: Vec<(Literal, Literal)>,
    /// Variable pairs whose test came out yes.
    pub yes_pairs: Vec<(Var, Var)>,
}

impl TrimmedGraph {
    pub fn size(&self) -> usize {
        self.vertices.len()
    }

    /// The unoriented test graph is a tree: exactly `k - 1` yes answers.
    pub fn is_tree(&self) -> bool {
        self.yes_pairs.len() + 1 == self.vertices.len()
    }

    pub fn vars(&self) -> impl Iterator<Item = Var> + '_ {
        self.vertices.iter().map(|l| l.var())
    }

    /// The graph with every literal negated and every edge reversed: turns
    /// an out-graph of `x̄` into an in-graph of `x`.
    pub fn negated(&self) -> TrimmedGraph {
        TrimmedGraph {
            root: self.root.negate(),
            vertices: self.vertices.iter().map(|l| l.negate()).collect(),
            edges: self
                .edges
                .iter()
                .map(|&(u, v)| (v.negate(), u.negate()))
                .collect(),
            yes_pairs: self.yes_pairs.clone(),
        }
    }
}

pub fn trimmed_out_graph<S: EdgeSource + ?Sized>(
    src: &mut S,
    x: Literal,
    scope: Scope<'_>,
) -> TrimmedGraph {
    let mut in_graph: HashSet<Var> = HashSet::new();
    in_graph.insert(x.var());
    let mut vertices = vec![x];
    let mut edges = Vec::new();
    let mut yes_pairs = Vec::new();
    let mut frontier: BTreeSet<Literal> = BTreeSet::new();
    frontier.insert(x);
    let limit = scope.limit.min(src.n());

    while let Some(v) = frontier.pop_first() {
        let mut hits = {
            let admit = |var: Var| scope.admits(var) && !in_graph.contains(&var);
            src.out_hits(v, limit, &admit)
        };
        hits.sort_unstable();
        hits.dedup_by_key(|w| w.var());
        for &w in &hits {
            in_graph.insert(w.var());
            vertices.push(w);
            edges.push((v, w));
            yes_pairs.push((v.var(), w.var()));
        }
        let old: Vec<Literal> = frontier.iter().copied().collect();
        for (i, &w) in hits.iter().enumerate() {
            for &f in old.iter().chain(&hits[i + 1..]) {
                let forward = src.test(w, f);
                let backward = src.test(f, w);
                if forward {
                    edges.push((w, f));
                } else if backward {
                    edges.push((f, w));
                }
                if forward || backward {
                    yes_pairs.push((w.var(), f.var()));
                }
            }
        }
        frontier.extend(hits);
    }
    TrimmedGraph {
        root: x,
        vertices,
        edges,
        yes_pairs,
    }
}

/// `L̃⁻(x)`, the mirror image of the trimmed out-graph of `x̄`.
pub fn trimmed_in_graph<S: EdgeSource + ?Sized>(
    src: &mut S,
    x: Literal,
    scope: Scope<'_>,
) -> TrimmedGraph {
    trimmed_out_graph(src, x.negate(), scope).negated()
}
