//! The oracle agreement suite behind `twosat verify`.

use rand::Rng;
use twosat::analytics::{connectivity_probability, coupled_edge_probability, p_nk, q_nk, r_nk, s_pk, theta_residual};
use twosat::formula::{clause_universe_size, sample_fnm, write_dimacs};
use twosat::oracle::{brute_backbone, brute_sat, brute_spine, reach_all_probability_mc};
use twosat::seed::trial_rng;
use twosat::{is_satisfiable, spine, Formula};

pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    /// Smallest failing formula, when the property is about formulas.
    pub counterexample: Option<Formula>,
}

fn random_small(seed: u64, point: u64, i: u64, max_n: u32, max_m: u64) -> Formula {
    let mut rng = trial_rng(seed, point, i);
    let n = rng.random_range(1..=max_n);
    let m = rng.random_range(0..=max_m.min(clause_universe_size(n)));
    sample_fnm(n, m, &mut rng).expect("m within the universe")
}

fn formula_check(
    name: &'static str,
    cases: u64,
    mut bad: impl FnMut(u64) -> Option<Formula>,
) -> Check {
    let mut failures = 0;
    let mut first: Option<Formula> = None;
    for i in 0..cases {
        if let Some(f) = bad(i) {
            failures += 1;
            if first.as_ref().is_none_or(|g| f.len() < g.len()) {
                first = Some(f);
            }
        }
    }
    Check {
        name,
        passed: failures == 0,
        detail: format!("{failures} of {cases} cases fail"),
        counterexample: first,
    }
}

pub fn run(cases: u64, seed: u64) -> Vec<Check> {
    let mut out = Vec::new();
    out.push(formula_check("sat agrees with truth table", cases, |i| {
        let f = random_small(seed, 1, i, 10, 25);
        (is_satisfiable(&f) != brute_sat(&f).expect("within limits")).then_some(f)
    }));
    let small = (cases / 10).max(1);
    out.push(formula_check("spine agrees with subformula definition", small, |i| {
        let f = random_small(seed, 2, i, 6, 10);
        (spine(&f).members != brute_spine(&f).expect("within limits")).then_some(f)
    }));
    out.push(formula_check("backbone inside spine, equal when satisfiable", small, |i| {
        let f = random_small(seed, 2, i, 6, 10);
        let s = brute_spine(&f).expect("within limits");
        let b = brute_backbone(&f).expect("within limits");
        let inside = b.iter().all(|x| s.contains(x));
        let equal = !brute_sat(&f).expect("within limits") || b == s;
        (!inside || !equal).then_some(f)
    }));

    let mut worst: f64 = 0.0;
    for (j, &(k, p)) in [(3, 0.2), (3, 0.5), (4, 0.2), (4, 0.5), (5, 0.2), (5, 0.5)].iter().enumerate() {
        let mc = reach_all_probability_mc(k, p, 20 * cases.max(1000), seed ^ j as u64);
        let exact = connectivity_probability(k, p).expect("small k");
        let z = (mc.estimate() - exact).abs() / mc.se().max(1e-12);
        worst = worst.max(z);
    }
    out.push(Check {
        name: "reach-all frequency matches connectivity probability",
        passed: worst <= 3.0,
        detail: format!("largest deviation {worst:.2} standard errors"),
        counterexample: None,
    });

    let mut violations = 0;
    let mut worst_sum: f64 = 0.0;
    for n in [2u64, 5, 12, 25] {
        for c in [0.3, 1.0, 2.5] {
            let p = c / (2.0 * n as f64);
            let mut total = 0.0;
            let q = coupled_edge_probability(p);
            for k in 1..=n as usize {
                let (pk, qk, rk, sk) = (
                    p_nk(n, p, k).expect("k <= n"),
                    q_nk(n, p, k).expect("k <= n"),
                    r_nk(n, p, k).expect("k <= n"),
                    s_pk(k, q).expect("k <= n"),
                );
                if pk > qk * (1.0 + 1e-12) || (qk - rk * sk).abs() > 1e-9 * qk.max(1e-300) {
                    violations += 1;
                }
                total += qk;
            }
            worst_sum = worst_sum.max((total - 1.0).abs());
        }
    }
    out.push(Check {
        name: "P <= Q, Q = R S and Q sums to one",
        passed: violations == 0 && worst_sum <= 1e-9,
        detail: format!("{violations} pointwise violations, largest |sum Q - 1| = {worst_sum:.2e}"),
        counterexample: None,
    });

    let worst_theta = (1..=100)
        .map(|i| theta_residual(i as f64 * 0.02).abs())
        .fold(0.0, f64::max);
    out.push(Check {
        name: "theta solves its fixed-point equation",
        passed: worst_theta < 1e-12,
        detail: format!("largest residual {worst_theta:.2e}"),
        counterexample: None,
    });
    out
}

pub fn report(checks: &[Check]) -> String {
    let mut s = String::new();
    for c in checks {
        let tag = if c.passed { "PASS" } else { "FAIL" };
        s.push_str(&format!("{tag} {}: {}\n", c.name, c.detail));
    }
    if let Some(f) = checks.iter().find_map(|c| c.counterexample.as_ref().filter(|_| !c.passed)) {
        s.push_str("c first counterexample\n");
        s.push_str(&write_dimacs(f));
    }
    s
}
