//! DIMACS CNF reader/writer and a seeded random 3-SAT generator.
//!
//! The reader follows SATLIB conventions: `c` comment lines, a single
//! `p cnf <vars> <clauses>` header, clauses as whitespace separated signed
//! integers terminated by `0` (clauses may span lines), and the trailing
//! `%` line that SATLIB's uf* files carry, after which input is ignored.

use std::fmt::Write as _;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::ParseError;
use crate::csp::{labels, Constraint, Csp, Lit, ProblemKind, BOOL_DOMAIN, FALSE, TRUE};

pub fn parse_dimacs(text: &str) -> Result<Csp, ParseError> {
    let mut header: Option<(usize, usize, usize)> = None;
    let mut clauses: Vec<Vec<Lit>> = Vec::new();
    let mut current: Vec<Lit> = Vec::new();
    let mut current_start = 0;
    let mut last_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
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
                return Err(ParseError::new(line_no, "duplicate problem line"));
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() != 4 || parts[0] != "p" || parts[1] != "cnf" {
                return Err(ParseError::new(line_no, "expected `p cnf <nvars> <nclauses>`"));
            }
            let nvars = parts[2]
                .parse::<usize>()
                .map_err(|_| ParseError::new(line_no, format!("bad variable count `{}`", parts[2])))?;
            let ncl = parts[3]
                .parse::<usize>()
                .map_err(|_| ParseError::new(line_no, format!("bad clause count `{}`", parts[3])))?;
            header = Some((nvars, ncl, line_no));
            continue;
        }
        let Some((nvars, ncl, _)) = header else {
            return Err(ParseError::new(line_no, "clause data before `p cnf` header"));
        };
        for tok in line.split_whitespace() {
            let lit: i64 = tok
                .parse()
                .map_err(|_| ParseError::new(line_no, format!("bad literal `{tok}`")))?;
            if lit == 0 {
                if current.is_empty() {
                    return Err(ParseError::new(line_no, "empty clause"));
                }
                if clauses.len() == ncl {
                    return Err(ParseError::new(line_no, format!("more than {ncl} clauses")));
                }
                clauses.push(std::mem::take(&mut current));
                continue;
            }
            let var = lit.unsigned_abs() as usize;
            if var > nvars {
                return Err(ParseError::new(line_no, format!("literal {lit} out of range 1..={nvars}")));
            }
            if current.is_empty() {
                current_start = line_no;
            }
            let l = Lit::new(var - 1, if lit > 0 { TRUE } else { FALSE });
            // repeated literals inside a clause carry no meaning
            if !current.contains(&l) {
                current.push(l);
            }
        }
    }

    let Some((nvars, ncl, header_line)) = header else {
        return Err(ParseError::new(last_line.max(1), "missing `p cnf` header"));
    };
    if !current.is_empty() {
        return Err(ParseError::new(current_start, "clause not terminated by 0"));
    }
    if clauses.len() != ncl {
        return Err(ParseError::new(
            header_line,
            format!("header declares {ncl} clauses, found {}", clauses.len()),
        ));
    }
    if nvars == 0 {
        return Err(ParseError::new(header_line, "zero variables"));
    }
    let vars: Vec<String> = (1..=nvars).map(|i| format!("x{i}")).collect();
    let doms = vec![labels(BOOL_DOMAIN); nvars];
    let cons = clauses.into_iter().map(Constraint::Clause).collect();
    Csp::new(ProblemKind::Sat, vars, doms, cons).map_err(|e| ParseError::new(header_line, e.to_string()))
}

/// Serializes a SAT-kind CSP back to DIMACS. Panics if a literal is not over a
/// Boolean domain.
pub fn write_dimacs(csp: &Csp) -> String {
    let clauses: Vec<&Vec<Lit>> = csp
        .constraints()
        .iter()
        .filter_map(|c| match c {
            Constraint::Clause(l) => Some(l),
            Constraint::MutexPair(..) => None,
        })
        .collect();
    let mut out = format!("p cnf {} {}\n", csp.num_vars(), clauses.len());
    for cl in clauses {
        for l in cl {
            assert!(csp.domain_size(l.var) == 2, "write_dimacs needs Boolean domains");
            let v = l.var as i64 + 1;
            let _ = write!(out, "{} ", if l.val == TRUE { v } else { -v });
        }
        out.push_str("0\n");
    }
    out
}

/// Random 3-SAT with `n_vars` variables and `n_clauses` clauses over distinct
/// variables, satisfiable by construction: a hidden assignment is drawn first
/// and clauses it falsifies are rejected. Returns the CSP and the hidden
/// solution (value indices).
pub fn gen_planted_3sat(n_vars: usize, n_clauses: usize, seed: u64) -> (Csp, Vec<usize>) {
    assert!(n_vars >= 3, "3-SAT needs at least 3 variables");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let hidden: Vec<usize> = (0..n_vars).map(|_| if rng.random::<bool>() { TRUE } else { FALSE }).collect();
    let all: Vec<usize> = (0..n_vars).collect();
    let mut clauses = Vec::with_capacity(n_clauses);
    while clauses.len() < n_clauses {
        let vars: Vec<usize> = all.choose_multiple(&mut rng, 3).copied().collect();
        let lits: Vec<Lit> = vars
            .iter()
            .map(|&v| Lit::new(v, if rng.random::<bool>() { TRUE } else { FALSE }))
            .collect();
        if lits.iter().any(|l| hidden[l.var] == l.val) {
            clauses.push(Constraint::Clause(lits));
        }
    }
    let vars = (1..=n_vars).map(|i| format!("x{i}")).collect();
    let csp = Csp::new(ProblemKind::Sat, vars, vec![labels(BOOL_DOMAIN); n_vars], clauses)
        .expect("generated CNF is well formed");
    (csp, hidden)
}
