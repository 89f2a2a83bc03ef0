//! Hourglasses: a center literal `v` with an in-portion `I` whose literals
//! all reach `v` inside `I ∪ {v}` and an out-portion `O` reachable from `v`
//! inside `O ∪ {v}`, the whole triple strictly distinct.

use std::collections::{HashMap, HashSet};

use rand::seq::IndexedRandom;
use rand::Rng;
use serde::Serialize;

use crate::analytics::{ln_r_nk, p_at_lambda};
use crate::digraph::ImplicationDigraph;
use crate::formula::{Formula, Literal, Var};
use crate::spine::{trimmed_in_graph, trimmed_out_graph, EdgeSource, Scope, TrimmedGraph};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Hourglass {
    pub center: Literal,
    pub in_portion: Vec<Literal>,
    pub out_portion: Vec<Literal>,
}

impl Hourglass {
    pub fn trivial(center: Literal) -> Self {
        Hourglass {
            center,
            in_portion: Vec::new(),
            out_portion: Vec::new(),
        }
    }

    /// `min(|I|, |O|)`.
    pub fn girth(&self) -> usize {
        self.in_portion.len().min(self.out_portion.len())
    }

    pub fn vars(&self) -> impl Iterator<Item = Var> + '_ {
        std::iter::once(self.center)
            .chain(self.in_portion.iter().copied())
            .chain(self.out_portion.iter().copied())
            .map(|l| l.var())
    }
}

pub fn verify_hourglass(f: &Formula, h: &Hourglass) -> bool {
    verify_in(&ImplicationDigraph::build(f), h)
}

/// Checks the definition against a prebuilt digraph: one literal per
/// variable across `{v} ∪ I ∪ O` (which makes the parts disjoint and the
/// union strictly distinct), and the path conditions by searches confined
/// to each portion.
pub fn verify_in(d: &ImplicationDigraph, h: &Hourglass) -> bool {
    let mut vars = HashSet::new();
    if !h.vars().all(|v| v.0 < d.n() && vars.insert(v)) {
        return false;
    }
    let confined = |portion: &[Literal], forward: bool| {
        let allowed: HashSet<Literal> = portion.iter().copied().collect();
        let mut seen: HashSet<Literal> = HashSet::new();
        let mut stack = vec![h.center];
        while let Some(u) = stack.pop() {
            let next: Vec<Literal> = if forward {
                d.successors(u).iter().map(|&w| Literal(w)).collect()
            } else {
                d.predecessors(u).collect()
            };
            for w in next {
                if allowed.contains(&w) && seen.insert(w) {
                    stack.push(w);
                }
            }
        }
        seen.len() == allowed.len()
    };
    confined(&h.out_portion, true) && confined(&h.in_portion, false)
}

/// How [`extract_hourglass_with`] grows the two portions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Extraction {
    /// Breadth-first out-portion to exhaustion, then the in-portion.
    #[default]
    OutFirst,
    /// Alternate one admitted literal at a time between the two searches.
    Interleaved,
}

/// Greedy hourglass at `v`: out-portion by breadth-first search from `v`,
/// in-portion by reverse search into `v`, admitting a literal only if its
/// variable is still unused. Neighbors are scanned in code order.
pub fn extract_hourglass_at(d: &ImplicationDigraph, v: Literal) -> Hourglass {
    extract_hourglass_with(d, v, Extraction::OutFirst)
}

pub fn extract_hourglass_with(d: &ImplicationDigraph, v: Literal, order: Extraction) -> Hourglass {
    struct Side {
        found: Vec<Literal>,
        head: usize,
        pending: Vec<Literal>,
        forward: bool,
    }
    impl Side {
        /// Admits the next unused literal, if any remain reachable.
        fn step(&mut self, d: &ImplicationDigraph, center: Literal, used: &mut HashSet<Var>) -> bool {
            loop {
                if let Some(w) = self.pending.pop() {
                    if used.insert(w.var()) {
                        self.found.push(w);
                        return true;
                    }
                    continue;
                }
                let u = if self.head == 0 {
                    center
                } else if self.head <= self.found.len() {
                    self.found[self.head - 1]
                } else {
                    return false;
                };
                self.head += 1;
                let mut next: Vec<Literal> = if self.forward {
                    d.successors(u).iter().map(|&w| Literal(w)).collect()
                } else {
                    d.predecessors(u).collect()
                };
                next.sort_unstable();
                next.reverse();
                self.pending = next;
            }
        }
    }
    let mut used = HashSet::new();
    used.insert(v.var());
    let mut out = Side {
        found: Vec::new(),
        head: 0,
        pending: Vec::new(),
        forward: true,
    };
    let mut inn = Side {
        found: Vec::new(),
        head: 0,
        pending: Vec::new(),
        forward: false,
    };
    match order {
        Extraction::OutFirst => {
            while out.step(d, v, &mut used) {}
            while inn.step(d, v, &mut used) {}
        }
        Extraction::Interleaved => {
            let (mut o, mut i) = (true, true);
            while o || i {
                if o {
                    o = out.step(d, v, &mut used);
                }
                if i {
                    i = inn.step(d, v, &mut used);
                }
            }
        }
    }
    Hourglass {
        center: v,
        in_portion: inn.found,
        out_portion: out.found,
    }
}

/// Best hourglass over `centers` uniformly random literals plus one
/// representative (the smallest literal) of every strongly connected
/// component that contains a literal together with its negation. The score
/// is `min(|I|, |O|)`; each center is tried with both extraction orders.
pub fn find_giant_hourglass<R: Rng + ?Sized>(f: &Formula, centers: usize, rng: &mut R) -> Hourglass {
    let d = ImplicationDigraph::build(f);
    let v = d.num_vertices();
    if v == 0 {
        return Hourglass::trivial(Literal(0));
    }
    let cond = d.condensation();
    let mut candidates: Vec<Literal> = (0..centers)
        .map(|_| Literal::from_code(rng.random_range(0..v)))
        .collect();
    let mut reps: HashMap<u32, Literal> = HashMap::new();
    for code in 0..v {
        let x = Literal::from_code(code);
        if cond.is_contradictory(x) {
            reps.entry(cond.id(x)).or_insert(x);
        }
    }
    let mut reps: Vec<Literal> = reps.into_values().collect();
    reps.sort_unstable();
    candidates.extend(reps);
    if candidates.is_empty() {
        candidates.push(Literal(0));
    }
    let mut best: Option<Hourglass> = None;
    for &c in &candidates {
        for order in [Extraction::OutFirst, Extraction::Interleaved] {
            let h = extract_hourglass_with(&d, c, order);
            if best.as_ref().is_none_or(|b| h.girth() > b.girth()) {
                best = Some(h);
            }
        }
    }
    best.expect("at least one candidate")
}

/// Settings for [`find_disjoint_hourglasses`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DisjointConfig {
    /// Distance below the threshold: `p = (1 - t n^(-1/3)) / (2n)`.
    pub t: f64,
    /// Tree-hit constant; calibrated from the tree law `R` when `None`.
    pub c: Option<f64>,
    /// Variable budget factor; `3(1 + 2e/c) / (1 - e^(-c))` when `None`.
    pub b: Option<f64>,
}

impl DisjointConfig {
    pub fn new(t: f64) -> Self {
        DisjointConfig { t, c: None, b: None }
    }
}

/// Outcome and bookkeeping of [`find_disjoint_hourglasses`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DisjointSearch {
    pub hourglasses: Vec<Hourglass>,
    pub c: f64,
    pub b: f64,
    pub rounds: usize,
    pub looks: usize,
    pub trees_in_range: usize,
    pub promising: usize,
    pub vars_used: usize,
}

/// `c` such that a trimmed out-graph in `n'` variables is a tree with size
/// in `[2, 4] n^(2/3) / t²` with probability `c t / n^(1/3)`, from the exact
/// tree law `R`.
pub fn calibrate_c(n: u32, t: f64) -> f64 {
    let nf = n as f64;
    let n_prime = (nf - t * nf.powf(2.0 / 3.0)).floor();
    if n_prime < 1.0 {
        return 0.0;
    }
    let p = p_at_lambda(n, -t);
    let lo = (2.0 * nf.powf(2.0 / 3.0) / (t * t)).ceil().max(1.0) as usize;
    let hi = (4.0 * nf.powf(2.0 / 3.0) / (t * t)).floor() as usize;
    let hi = hi.min(n_prime as usize);
    let mass: f64 = (lo..=hi)
        .map(|k| ln_r_nk(n_prime as u64, p, k).map(f64::exp).unwrap_or(0.0))
        .sum();
    mass * nf.powf(1.0 / 3.0) / t
}

/// Unused variables available to the searches: the first
/// `reserve + retired` variables (capped at `n`) minus those retired.
struct Reservoir {
    n: u32,
    reserve: u32,
    used: Vec<bool>,
    pool: Vec<u32>,
    slot: Vec<u32>,
    grown_to: u32,
    retired: usize,
}

impl Reservoir {
    fn new(n: u32, reserve: u32) -> Self {
        let mut r = Reservoir {
            n,
            reserve,
            used: vec![false; n as usize],
            pool: Vec::new(),
            slot: vec![u32::MAX; n as usize],
            grown_to: 0,
            retired: 0,
        };
        r.grow();
        r
    }

    fn limit(&self) -> u32 {
        (self.reserve as usize + self.retired).min(self.n as usize) as u32
    }

    fn grow(&mut self) {
        let limit = self.limit();
        for v in self.grown_to..limit {
            if !self.used[v as usize] {
                self.slot[v as usize] = self.pool.len() as u32;
                self.pool.push(v);
            }
        }
        self.grown_to = self.grown_to.max(limit);
    }

    fn scope(&self) -> Scope<'_> {
        Scope {
            limit: self.limit(),
            used: Some(&self.used),
        }
    }

    /// Retires the variables of `g`; returns how many were fresh.
    fn retire(&mut self, g: &TrimmedGraph) -> usize {
        let mut fresh = 0;
        for v in g.vars() {
            let i = v.index();
            if self.used[i] {
                continue;
            }
            self.used[i] = true;
            fresh += 1;
            let s = self.slot[i];
            if s != u32::MAX {
                let last = *self.pool.last().expect("pool holds v");
                self.pool.swap_remove(s as usize);
                if last != v.0 {
                    self.slot[last as usize] = s;
                }
                self.slot[i] = u32::MAX;
            }
        }
        self.retired += fresh;
        self.grow();
        fresh
    }

    fn random_free<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<Var> {
        self.pool.choose(rng).map(|&v| Var(v))
    }
}

fn tree_parents(t: &TrimmedGraph) -> HashMap<Literal, Literal> {
    t.edges.iter().map(|&(u, w)| (w, u)).collect()
}

fn descendants(t: &TrimmedGraph, v: Literal) -> Vec<Literal> {
    let mut children: HashMap<Literal, Vec<Literal>> = HashMap::new();
    for &(u, w) in &t.edges {
        children.entry(u).or_default().push(w);
    }
    let mut out = Vec::new();
    let mut stack = vec![v];
    while let Some(u) = stack.pop() {
        if let Some(ch) = children.get(&u) {
            for &w in ch {
                out.push(w);
                stack.push(w);
            }
        }
    }
    out
}

enum Candidate {
    NotPromising,
    Failed,
    Found(Hourglass),
}

/// Second half of a look, given a tree `T` already retired and the chosen
/// non-root `w`: locate the middle vertex, test it, and probe the tail.
/// `spent` accumulates retired variables; probing stops once it exceeds
/// `budget`.
#[allow(clippy::too_many_arguments)]
fn probe_tail<S: EdgeSource + ?Sized>(
    src: &mut S,
    tree: &TrimmedGraph,
    w: Literal,
    reservoir: &mut Reservoir,
    tail_probes: usize,
    in_target: f64,
    spent: &mut usize,
    budget: f64,
) -> Candidate {
    let k = tree.size() as f64;
    let parents = tree_parents(tree);
    let mut path = vec![w];
    while let Some(&p) = parents.get(path.last().expect("nonempty")) {
        path.push(p);
    }
    path.reverse();
    // With L = path.len() - 1 edges, the middle nearer w is at ceil(L / 2).
    let mid = path.len() / 2;
    let v = path[mid];
    let below = descendants(tree, v);
    if (mid as f64) < (k / 2.0).sqrt() || (below.len() as f64) < k / 2.0 {
        return Candidate::NotPromising;
    }
    for (j, &x) in path[..mid].iter().take(tail_probes).enumerate() {
        if *spent as f64 > budget {
            break;
        }
        let ing = trimmed_in_graph(src, x, reservoir.scope());
        *spent += reservoir.retire(&ing);
        if ing.size() as f64 >= in_target {
            let mut in_portion = ing.vertices.clone();
            in_portion.extend_from_slice(&path[j + 1..mid]);
            return Candidate::Found(Hourglass {
                center: v,
                in_portion,
                out_portion: below,
            });
        }
    }
    Candidate::Failed
}

/// Grows variable-disjoint hourglasses one at a time in the regime
/// `p = (1 - t n^(-1/3)) / (2n)`.
///
/// Each look grows a trimmed out-graph `T` from a fresh literal inside a
/// reserve of `n' = n - t n^(2/3)` unused variables. If `T` is a tree of
/// size in `[2, 4] n^(2/3) / t²`, a random non-root `w` is drawn and `v` is
/// the middle of the path from the root to `w` (the vertex nearer `w` on
/// ties). `v` is promising if that tail is at least `sqrt(|T|/2)` long and
/// `v` has at least `|T|/2` descendants; then the trimmed in-graphs of the
/// first `ceil(n^(1/3)/t)` tail vertices are explored until one reaches
/// `n^(2/3)/t²` literals. Every explored variable is retired.
///
/// A round makes up to `ceil(4e / (c(1 - e^(-c))) n^(1/3) / t)` looks and
/// ends at the first hourglass or once it has used `b n^(2/3) / t²`
/// variables. There are `max(1, floor(t³ / b))` rounds.
pub fn find_disjoint_hourglasses<S, R>(
    src: &mut S,
    config: &DisjointConfig,
    rng: &mut R,
) -> DisjointSearch
where
    S: EdgeSource + ?Sized,
    R: Rng + ?Sized,
{
    use std::f64::consts::E;
    let n = src.n();
    let nf = n as f64;
    let t = config.t;
    let n13 = nf.powf(1.0 / 3.0);
    let n23 = nf.powf(2.0 / 3.0);
    let c = config.c.unwrap_or_else(|| calibrate_c(n, t));
    let b = config
        .b
        .unwrap_or_else(|| 3.0 * (1.0 + 2.0 * E / c) / (1.0 - (-c).exp()));
    let mut report = DisjointSearch {
        hourglasses: Vec::new(),
        c,
        b,
        rounds: 0,
        looks: 0,
        trees_in_range: 0,
        promising: 0,
        vars_used: 0,
    };
    let size_lo = 2.0 * n23 / (t * t);
    let size_hi = 4.0 * n23 / (t * t);
    let in_target = n23 / (t * t);
    let reserve = (nf - t * n23).floor();
    if c <= 0.0 || !c.is_finite() || size_lo > nf || reserve < size_lo {
        return report;
    }
    let rounds = ((t * t * t / b).floor() as usize).max(1);
    let looks_per_round = (4.0 * E / (c * (1.0 - (-c).exp())) * n13 / t).ceil();
    let looks_per_round = looks_per_round.min(usize::MAX as f64) as usize;
    let budget = b * n23 / (t * t);
    let tail_probes = (n13 / t).ceil() as usize;
    let mut reservoir = Reservoir::new(n, reserve as u32);

    for _ in 0..rounds {
        report.rounds += 1;
        let mut spent = 0usize;
        for _ in 0..looks_per_round {
            if spent as f64 > budget {
                break;
            }
            let Some(root_var) = reservoir.random_free(rng) else {
                break;
            };
            let root = Literal::new(root_var, rng.random_bool(0.5));
            report.looks += 1;
            let tree = trimmed_out_graph(src, root, reservoir.scope());
            spent += reservoir.retire(&tree);
            let k = tree.size() as f64;
            if !tree.is_tree() || k < size_lo || k > size_hi {
                continue;
            }
            report.trees_in_range += 1;
            let w = tree.vertices[rng.random_range(1..tree.size())];
            match probe_tail(
                src,
                &tree,
                w,
                &mut reservoir,
                tail_probes,
                in_target,
                &mut spent,
                budget,
            ) {
                Candidate::NotPromising => {}
                Candidate::Failed => report.promising += 1,
                Candidate::Found(h) => {
                    report.promising += 1;
                    report.hourglasses.push(h);
                    break;
                }
            }
        }
    }
    report.vars_used = reservoir.retired;
    report
}
