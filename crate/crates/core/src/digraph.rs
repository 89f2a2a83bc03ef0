//! The implication digraph, its strongly connected components and the
//! linear-time satisfiability test.
//!
//! A clause `(x ∨ y)` contributes the edges `x̄ → y` and `ȳ → x`. Vertices are
//! literal codes, so the graph has `2n` vertices and `2m` edges, and is
//! skew-symmetric: `u → v` is an edge iff `v̄ → ū` is.

use crate::formula::{Formula, Literal};

/// Compressed adjacency of the implication digraph, with each successor list
/// sorted by literal code.
#[derive(Debug, Clone)]
pub struct ImplicationDigraph {
    n: u32,
    offsets: Vec<u32>,
    targets: Vec<u32>,
}

impl ImplicationDigraph {
    pub fn build(f: &Formula) -> Self {
        let v = f.num_literals();
        let mut degree = vec![0u32; v + 1];
        for c in f.clauses() {
            let (x, y) = c.literals();
            degree[x.negate().code() + 1] += 1;
            degree[y.negate().code() + 1] += 1;
        }
        for i in 0..v {
            degree[i + 1] += degree[i];
        }
        let offsets = degree;
        let mut fill = offsets.clone();
        let mut targets = vec![0u32; 2 * f.len()];
        for c in f.clauses() {
            let (x, y) = c.literals();
            for (from, to) in [(x.negate(), y), (y.negate(), x)] {
                let slot = &mut fill[from.code()];
                targets[*slot as usize] = to.0;
                *slot += 1;
            }
        }
        for u in 0..v {
            targets[offsets[u] as usize..offsets[u + 1] as usize].sort_unstable();
        }
        ImplicationDigraph {
            n: f.n(),
            offsets,
            targets,
        }
    }

    #[inline]
    pub fn n(&self) -> u32 {
        self.n
    }

    #[inline]
    pub fn num_vertices(&self) -> usize {
        2 * self.n as usize
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.targets.len()
    }

    /// Successor codes of `u`, ascending.
    #[inline]
    pub fn successors(&self, u: Literal) -> &[u32] {
        let c = u.code();
        &self.targets[self.offsets[c] as usize..self.offsets[c + 1] as usize]
    }

    /// Predecessors of `u`, obtained through skew symmetry (negations of the
    /// successors of `ū`).
    #[inline]
    pub fn predecessors(&self, u: Literal) -> impl Iterator<Item = Literal> + '_ {
        self.successors(u.negate())
            .iter()
            .map(|&w| Literal(w).negate())
    }

    #[inline]
    pub fn has_edge(&self, u: Literal, v: Literal) -> bool {
        self.successors(u).binary_search(&v.0).is_ok()
    }

    pub fn edges(&self) -> impl Iterator<Item = (Literal, Literal)> + '_ {
        (0..self.num_vertices()).flat_map(move |u| {
            let u = Literal::from_code(u);
            self.successors(u).iter().map(move |&w| (u, Literal(w)))
        })
    }

    pub fn condensation(&self) -> Condensation {
        Condensation::new(self)
    }

    /// `x ⇝ y`; every literal reaches itself.
    pub fn reaches(&self, x: Literal, y: Literal) -> bool {
        let mut bfs = Bfs::new(self.num_vertices());
        bfs.reaches(self, x, y)
    }

    /// `L⁺(x)`, in BFS order starting with `x`.
    pub fn out_set(&self, x: Literal) -> Vec<Literal> {
        let mut bfs = Bfs::new(self.num_vertices());
        bfs.out_set(self, x).to_vec()
    }

    /// `L⁻(x)`, the literals that reach `x`.
    pub fn in_set(&self, x: Literal) -> Vec<Literal> {
        self.out_set(x.negate())
            .into_iter()
            .map(Literal::negate)
            .collect()
    }
}

/// Reusable BFS scratch space. Visited marks are epoch-stamped so a query
/// costs time proportional to what it explores, not to `n`.
#[derive(Debug, Clone)]
pub struct Bfs {
    stamp: Vec<u32>,
    epoch: u32,
    queue: Vec<Literal>,
}

impl Bfs {
    pub fn new(num_vertices: usize) -> Self {
        Bfs {
            stamp: vec![0; num_vertices],
            epoch: 0,
            queue: Vec::new(),
        }
    }

    /// Starts a fresh search; all vertices become unvisited.
    pub fn reset(&mut self) {
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.stamp.iter_mut().for_each(|s| *s = 0);
            self.epoch = 1;
        }
        self.queue.clear();
    }

    #[inline]
    pub fn visited(&self, x: Literal) -> bool {
        self.stamp[x.code()] == self.epoch
    }

    /// Marks `x` and queues it; `false` if it was already visited.
    #[inline]
    pub fn visit(&mut self, x: Literal) -> bool {
        let s = &mut self.stamp[x.code()];
        if *s == self.epoch {
            return false;
        }
        *s = self.epoch;
        self.queue.push(x);
        true
    }

    /// Everything visited since the last reset, in visit order.
    #[inline]
    pub fn order(&self) -> &[Literal] {
        &self.queue
    }

    pub fn out_set(&mut self, d: &ImplicationDigraph, x: Literal) -> &[Literal] {
        self.reset();
        self.visit(x);
        let mut head = 0;
        while head < self.queue.len() {
            let u = self.queue[head];
            head += 1;
            for &w in d.successors(u) {
                self.visit(Literal(w));
            }
        }
        &self.queue
    }

    pub fn reaches(&mut self, d: &ImplicationDigraph, x: Literal, y: Literal) -> bool {
        self.reset();
        self.visit(x);
        let mut head = 0;
        while head < self.queue.len() {
            let u = self.queue[head];
            head += 1;
            if u == y {
                return true;
            }
            for &w in d.successors(u) {
                self.visit(Literal(w));
            }
        }
        false
    }
}

/// Strongly connected components of an implication digraph.
///
/// Component ids are a topological order of the component DAG: for every
/// edge `u → v`, `id(u) <= id(v)`.
#[derive(Debug, Clone)]
pub struct Condensation {
    scc_id: Vec<u32>,
    count: usize,
}

impl Condensation {
    /// Iterative Tarjan. Components are completed sinks first; ids are then
    /// flipped so sources come first.
    pub fn new(d: &ImplicationDigraph) -> Self {
        const UNSEEN: u32 = u32::MAX;
        let v = d.num_vertices();
        let mut index = vec![UNSEEN; v];
        let mut low = vec![0u32; v];
        let mut on_stack = vec![false; v];
        let mut comp = vec![UNSEEN; v];
        let mut stack: Vec<u32> = Vec::new();
        let mut call: Vec<(u32, u32)> = Vec::new();
        let mut next_index = 0u32;
        let mut done = 0u32;

        // Roots in descending code order, so unconstrained variables come
        // out FALSE in the extracted assignment.
        for root in (0..v as u32).rev() {
            if index[root as usize] != UNSEEN {
                continue;
            }
            call.push((root, 0));
            index[root as usize] = next_index;
            low[root as usize] = next_index;
            next_index += 1;
            stack.push(root);
            on_stack[root as usize] = true;

            while let Some(&mut (u, ref mut pos)) = call.last_mut() {
                let succ = d.successors(Literal(u));
                if (*pos as usize) < succ.len() {
                    let w = succ[*pos as usize];
                    *pos += 1;
                    if index[w as usize] == UNSEEN {
                        index[w as usize] = next_index;
                        low[w as usize] = next_index;
                        next_index += 1;
                        stack.push(w);
                        on_stack[w as usize] = true;
                        call.push((w, 0));
                    } else if on_stack[w as usize] {
                        low[u as usize] = low[u as usize].min(index[w as usize]);
                    }
                    continue;
                }
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    low[parent as usize] = low[parent as usize].min(low[u as usize]);
                }
                if low[u as usize] == index[u as usize] {
                    loop {
                        let w = stack.pop().expect("tarjan stack");
                        on_stack[w as usize] = false;
                        comp[w as usize] = done;
                        if w == u {
                            break;
                        }
                    }
                    done += 1;
                }
            }
        }
        let count = done as usize;
        for c in comp.iter_mut() {
            *c = done - 1 - *c;
        }
        Condensation { scc_id: comp, count }
    }

    #[inline]
    pub fn id(&self, x: Literal) -> u32 {
        self.scc_id[x.code()]
    }

    #[inline]
    pub fn count(&self) -> usize {
        self.count
    }

    /// Literals grouped by component, in topological order.
    pub fn components(&self) -> Vec<Vec<Literal>> {
        let mut out = vec![Vec::new(); self.count];
        for (code, &c) in self.scc_id.iter().enumerate() {
            out[c as usize].push(Literal::from_code(code));
        }
        out
    }

    /// Distinct edges of the component DAG, sorted.
    pub fn dag_edges(&self, d: &ImplicationDigraph) -> Vec<(u32, u32)> {
        let mut e: Vec<(u32, u32)> = d
            .edges()
            .map(|(u, v)| (self.id(u), self.id(v)))
            .filter(|(a, b)| a != b)
            .collect();
        e.sort_unstable();
        e.dedup();
        e
    }

    /// `x` and `x̄` lie on a common cycle.
    #[inline]
    pub fn is_contradictory(&self, x: Literal) -> bool {
        self.id(x) == self.id(x.negate())
    }

    pub fn is_satisfiable(&self) -> bool {
        (0..self.scc_id.len() / 2).all(|i| self.scc_id[2 * i] != self.scc_id[2 * i + 1])
    }

    /// A literal is set TRUE iff its component comes after its complement's.
    pub fn assignment(&self) -> Option<Vec<bool>> {
        if !self.is_satisfiable() {
            return None;
        }
        Some(
            (0..self.scc_id.len() / 2)
                .map(|i| self.scc_id[2 * i] > self.scc_id[2 * i + 1])
                .collect(),
        )
    }
}

pub fn build_digraph(f: &Formula) -> ImplicationDigraph {
    ImplicationDigraph::build(f)
}

pub fn is_satisfiable(f: &Formula) -> bool {
    ImplicationDigraph::build(f).condensation().is_satisfiable()
}

pub fn satisfying_assignment(f: &Formula) -> Option<Vec<bool>> {
    ImplicationDigraph::build(f).condensation().assignment()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{sample_fnm, Var};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn lit(v: i64) -> Literal {
        Literal::from_dimacs(v).unwrap()
    }

    fn all_four() -> Formula {
        Formula::from_pairs(2, &[(1, 2), (1, -2), (-1, 2), (-1, -2)])
    }

    #[test]
    fn single_clause_edges() {
        let d = build_digraph(&Formula::from_pairs(2, &[(1, 2)]));
        assert_eq!(d.edge_count(), 2);
        assert!(d.has_edge(lit(-1), lit(2)));
        assert!(d.has_edge(lit(-2), lit(1)));
    }

    #[test]
    fn empty_digraph() {
        let d = build_digraph(&Formula::empty(2));
        assert_eq!(d.edge_count(), 0);
        let c = d.condensation();
        assert_eq!(c.count(), 4);
        assert!(c.is_satisfiable());
        assert_eq!(c.assignment(), Some(vec![false, false]));
        assert_eq!(d.out_set(lit(1)), vec![lit(1)]);
    }

    #[test]
    fn full_two_variable_formula() {
        let f = all_four();
        let d = build_digraph(&f);
        assert_eq!(d.edge_count(), 8);
        let c = d.condensation();
        assert_eq!(c.count(), 1);
        assert!(!is_satisfiable(&f));
        assert!(satisfying_assignment(&f).is_none());
    }

    #[test]
    fn chain_is_acyclic_and_forces_x_false() {
        let f = Formula::from_pairs(2, &[(-1, 2), (-2, -1)]);
        let c = build_digraph(&f).condensation();
        assert_eq!(c.count(), 4);
        let a = satisfying_assignment(&f).unwrap();
        assert!(!a[0]);
        assert!(f.eval(&a));
    }

    #[test]
    fn reachability_basics() {
        let d = build_digraph(&Formula::from_pairs(2, &[(1, 2)]));
        assert!(d.reaches(lit(-1), lit(2)));
        assert!(!d.reaches(lit(2), lit(-1)));
        assert!(d.reaches(lit(2), lit(2)));
        let mut out = d.out_set(lit(-1));
        out.sort();
        assert_eq!(out, vec![lit(-1), lit(2)]);
        assert_eq!(d.predecessors(lit(2)).collect::<Vec<_>>(), vec![lit(-1)]);
    }

    fn arb_formula() -> impl Strategy<Value = Formula> {
        (2u32..14, any::<u64>(), 0.0f64..1.6).prop_map(|(n, seed, alpha)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = ((alpha * n as f64) as u64).min(crate::formula::clause_universe_size(n));
            sample_fnm(n, m, &mut rng).unwrap()
        })
    }

    proptest! {
        #[test]
        fn skew_symmetry(f in arb_formula()) {
            let d = build_digraph(&f);
            prop_assert_eq!(d.edge_count(), 2 * f.len());
            for (u, v) in d.edges() {
                prop_assert!(d.has_edge(v.negate(), u.negate()));
            }
        }

        #[test]
        fn components_are_topologically_ordered(f in arb_formula()) {
            let d = build_digraph(&f);
            let c = d.condensation();
            for (u, v) in d.edges() {
                prop_assert!(c.id(u) <= c.id(v));
            }
            for x in 0..d.num_vertices() {
                for y in 0..d.num_vertices() {
                    let (x, y) = (Literal::from_code(x), Literal::from_code(y));
                    let same = d.reaches(x, y) && d.reaches(y, x);
                    prop_assert_eq!(same, c.id(x) == c.id(y));
                }
            }
        }

        #[test]
        fn contrapositive_reachability(f in arb_formula(), a in 0usize..28, b in 0usize..28) {
            let d = build_digraph(&f);
            let v = d.num_vertices();
            let (x, y) = (Literal::from_code(a % v), Literal::from_code(b % v));
            prop_assert_eq!(d.reaches(x, y), d.reaches(y.negate(), x.negate()));
        }

        #[test]
        fn in_set_mirrors_out_set(f in arb_formula(), a in 0usize..28) {
            let d = build_digraph(&f);
            let x = Literal::from_code(a % d.num_vertices());
            let mut inset = d.in_set(x);
            inset.sort();
            let mut direct: Vec<Literal> = (0..d.num_vertices())
                .map(Literal::from_code)
                .filter(|&y| d.reaches(y, x))
                .collect();
            direct.sort();
            prop_assert_eq!(inset, direct);
        }

        #[test]
        fn assignment_satisfies(f in arb_formula()) {
            if let Some(a) = satisfying_assignment(&f) {
                prop_assert!(f.eval(&a));
            }
        }

        #[test]
        fn sat_is_monotone_along_prefixes(f in arb_formula()) {
            let mut was_sat = true;
            for m in 0..=f.len() {
                let sat = is_satisfiable(&f.prefix(m));
                prop_assert!(was_sat || !sat);
                was_sat = sat;
            }
        }
    }

    #[test]
    fn deep_chain_does_not_overflow_the_stack() {
        let n = 200_000u32;
        let clauses = (0..n - 1)
            .map(|i| {
                crate::formula::Clause::new(Var(i).negative(), Var(i + 1).positive()).unwrap()
            })
            .collect();
        let f = Formula::new(n, clauses).unwrap();
        assert!(is_satisfiable(&f));
    }
}
