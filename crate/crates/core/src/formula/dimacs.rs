use std::fmt::Write as _;

use super::{Clause, Ensemble, Formula, Literal};
use crate::error::{Error, Result};

/// A parsed DIMACS file. Repeated clauses are kept once and counted.
#[derive(Debug, Clone, PartialEq)]
pub struct DimacsRead {
    pub formula: Formula,
    pub duplicates: usize,
}

fn err(line: usize, message: impl Into<String>) -> Error {
    Error::Dimacs {
        line,
        message: message.into(),
    }
}

/// Parses DIMACS CNF in which every clause has exactly two literals.
///
/// Comment lines (`c ...`) and a trailing `%` line are ignored. Clauses may
/// span lines; each is terminated by `0`.
pub fn read_dimacs(text: &str) -> Result<DimacsRead> {
    let mut header: Option<(u32, usize)> = None;
    let mut clauses = Vec::new();
    let mut pending: Vec<i64> = Vec::new();
    let mut last_line = 0;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        last_line = line_no;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if line.starts_with('%') {
            break;
        }
        if line.starts_with('p') {
            if header.is_some() {
                return Err(err(line_no, "second problem line"));
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() != 4 || parts[0] != "p" || parts[1] != "cnf" {
                return Err(err(line_no, "expected `p cnf <vars> <clauses>`"));
            }
            let n = parts[2]
                .parse::<u32>()
                .map_err(|_| err(line_no, format!("bad variable count `{}`", parts[2])))?;
            let m = parts[3]
                .parse::<usize>()
                .map_err(|_| err(line_no, format!("bad clause count `{}`", parts[3])))?;
            header = Some((n, m));
            continue;
        }
        let (n, _) = header.ok_or_else(|| err(line_no, "clause before problem line"))?;
        for tok in line.split_whitespace() {
            let v: i64 = tok
                .parse()
                .map_err(|_| err(line_no, format!("bad literal `{tok}`")))?;
            if v != 0 {
                if v.unsigned_abs() > n as u64 {
                    return Err(err(
                        line_no,
                        format!("variable {} out of range 1..={n}", v.unsigned_abs()),
                    ));
                }
                pending.push(v);
                continue;
            }
            if pending.len() != 2 {
                return Err(err(
                    line_no,
                    format!("clause has {} literals, expected 2", pending.len()),
                ));
            }
            let x = Literal::from_dimacs(pending[0]).expect("nonzero");
            let y = Literal::from_dimacs(pending[1]).expect("nonzero");
            let c = Clause::new(x, y).ok_or_else(|| {
                err(
                    line_no,
                    format!("clause `{} {}` repeats a variable", pending[0], pending[1]),
                )
            })?;
            clauses.push(c);
            pending.clear();
        }
    }
    let (n, _) = header.ok_or_else(|| err(last_line.max(1), "missing problem line"))?;
    if !pending.is_empty() {
        return Err(err(last_line, "unterminated clause"));
    }
    let (formula, duplicates) = Formula::from_clauses_dedup(n, clauses)?;
    Ok(DimacsRead {
        formula: formula.with_ensemble(Ensemble::File),
        duplicates,
    })
}

/// Writes the formula in canonical clause order.
pub fn write_dimacs(f: &Formula) -> String {
    let mut out = String::new();
    writeln!(out, "p cnf {} {}", f.n(), f.len()).unwrap();
    for c in f.canonical_clauses() {
        let (a, b) = c.literals();
        writeln!(out, "{} {} 0", a.to_dimacs(), b.to_dimacs()).unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::sample_fnm;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn single_clause() {
        let r = read_dimacs("p cnf 2 1\n1 2 0\n").unwrap();
        assert_eq!(r.formula.n(), 2);
        assert_eq!(r.formula.clauses(), Formula::from_pairs(2, &[(1, 2)]).clauses());
        assert_eq!(r.duplicates, 0);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(read_dimacs("p cnf 2 1\n1 -1 0\n").is_err());
        assert!(read_dimacs("p cnf 2 1\n1 2 -1 0\n").is_err());
        assert!(read_dimacs("p cnf 2 1\n1 3 0\n").is_err());
        assert!(read_dimacs("p dnf 2 1\n1 2 0\n").is_err());
        assert!(read_dimacs("1 2 0\n").is_err());
        assert!(read_dimacs("p cnf 2 1\n1 2\n").is_err());
    }

    #[test]
    fn duplicates_kept_once() {
        let r = read_dimacs("c hi\np cnf 3 3\n1 2 0\n2 1 0\n-3 1 0\n").unwrap();
        assert_eq!(r.formula.len(), 2);
        assert_eq!(r.duplicates, 1);
    }

    #[test]
    fn clause_across_lines() {
        let r = read_dimacs("p cnf 3 2\n1\n-2 0 2 3\n0\n").unwrap();
        assert_eq!(r.formula.len(), 2);
    }

    proptest! {
        #[test]
        fn round_trip(seed in any::<u64>(), n in 2u32..12, frac in 0.0f64..1.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = (frac * crate::formula::clause_universe_size(n) as f64) as u64;
            let f = sample_fnm(n, m, &mut rng).unwrap();
            let text = write_dimacs(&f);
            let back = read_dimacs(&text).unwrap();
            prop_assert_eq!(back.formula.canonical_clauses(), f.canonical_clauses());
            prop_assert_eq!(write_dimacs(&back.formula), text);
        }
    }
}
