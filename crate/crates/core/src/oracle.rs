//! Ground truth: exhaustive backtracking, unique-solution instance mining,
//! and the exact Boltzmann distribution of small networks.

use thiserror::Error;

use crate::compiler::Network;
use crate::csp::{Assignment, Constraint, Csp};
use crate::problems::{gen_planar_graph, planar::coloring_csp, ProblemError};

pub const MAX_EXACT_NEURONS: usize = 20;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("exact distribution limited to {MAX_EXACT_NEURONS} neurons, network has {0}")]
    TooManyNeurons(usize),
    #[error("distributions differ in length: {0} vs {1}")]
    Dimension(usize, usize),
    #[error(transparent)]
    Problem(#[from] ProblemError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Exhaustive {
    pub solutions: Vec<Assignment>,
    /// The whole space was explored.
    pub complete: bool,
}

/// Depth-first search with forward checking on mutex pairs. Variables are
/// ordered by descending degree (ties: smaller domain, then index); values
/// are tried in domain order. A clause is checked once all its variables are set.
struct Search<'a> {
    csp: &'a Csp,
    order: Vec<usize>,
    /// Mutex partners of each `(var, val)`: `(other var, other val)`.
    partners: Vec<Vec<Vec<(usize, usize)>>>,
    /// Clauses to check at each search depth.
    clauses_at: Vec<Vec<usize>>,
    blocked: Vec<Vec<u32>>,
    open: Vec<usize>,
    assigned: Vec<bool>,
    values: Vec<usize>,
}

impl<'a> Search<'a> {
    fn new(csp: &'a Csp) -> Self {
        let n = csp.num_vars();
        let degrees = csp.constraint_graph().degrees();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&v| (std::cmp::Reverse(degrees[v]), csp.domain_size(v), v));
        let mut depth_of = vec![0; n];
        for (d, &v) in order.iter().enumerate() {
            depth_of[v] = d;
        }
        let mut partners: Vec<Vec<Vec<(usize, usize)>>> =
            (0..n).map(|v| vec![Vec::new(); csp.domain_size(v)]).collect();
        let mut clauses_at = vec![Vec::new(); n];
        for (ci, c) in csp.constraints().iter().enumerate() {
            match c {
                Constraint::MutexPair(a, b) => {
                    if a.var != b.var {
                        partners[a.var][a.val].push((b.var, b.val));
                        partners[b.var][b.val].push((a.var, a.val));
                    }
                }
                Constraint::Clause(lits) => {
                    let depth = lits.iter().map(|l| depth_of[l.var]).max().expect("non-empty clause");
                    clauses_at[depth].push(ci);
                }
            }
        }
        Search {
            csp,
            order,
            partners,
            clauses_at,
            blocked: (0..n).map(|v| vec![0; csp.domain_size(v)]).collect(),
            open: (0..n).map(|v| csp.domain_size(v)).collect(),
            assigned: vec![false; n],
            values: vec![0; n],
        }
    }

    /// Marks partners of `(var, val)` as blocked; returns false on a domain wipe-out.
    fn block(&mut self, var: usize, val: usize, delta: i32) -> bool {
        let mut ok = true;
        for k in 0..self.partners[var][val].len() {
            let (u, b) = self.partners[var][val][k];
            if self.assigned[u] {
                continue;
            }
            let cell = &mut self.blocked[u][b];
            if delta > 0 {
                *cell += 1;
                if *cell == 1 {
                    self.open[u] -= 1;
                    if self.open[u] == 0 {
                        ok = false;
                    }
                }
            } else {
                *cell -= 1;
                if *cell == 0 {
                    self.open[u] += 1;
                }
            }
        }
        ok
    }

    fn run(&mut self, depth: usize, visit: &mut dyn FnMut(&[usize]) -> bool) -> bool {
        if depth == self.order.len() {
            debug_assert!(self.csp.satisfied_by(&self.values));
            return visit(&self.values);
        }
        let var = self.order[depth];
        for val in 0..self.csp.domain_size(var) {
            if self.blocked[var][val] > 0 {
                continue;
            }
            self.values[var] = val;
            self.assigned[var] = true;
            let constraints = self.csp.constraints();
            let clauses_ok = self.clauses_at[depth].iter().all(|&ci| constraints[ci].holds(&self.values));
            if clauses_ok {
                let alive = self.block(var, val, 1);
                let keep_going = !alive || self.run(depth + 1, visit);
                self.block(var, val, -1);
                if !keep_going {
                    self.assigned[var] = false;
                    return false;
                }
            }
            self.assigned[var] = false;
        }
        true
    }
}

/// Calls `visit` for every solution until it returns false. Returns true iff
/// the search space was exhausted.
pub fn for_each_solution(csp: &Csp, mut visit: impl FnMut(&[usize]) -> bool) -> bool {
    if csp.num_vars() == 0 {
        return visit(&[]);
    }
    Search::new(csp).run(0, &mut visit)
}

pub fn solve_exhaustive(csp: &Csp, limit: usize) -> Exhaustive {
    let mut solutions = Vec::new();
    if limit == 0 {
        let mut any = false;
        for_each_solution(csp, |_| {
            any = true;
            false
        });
        return Exhaustive { solutions, complete: !any };
    }
    let mut complete = for_each_solution(csp, |v| {
        solutions.push(Assignment::complete(v.to_vec()));
        solutions.len() < limit
    });
    if !complete && solutions.len() == limit {
        // the limit was hit exactly at the last solution only if nothing remains
        let mut seen = 0;
        complete = for_each_solution(csp, |_| {
            seen += 1;
            seen <= limit
        });
    }
    Exhaustive { solutions, complete }
}

pub fn count_solutions(csp: &Csp) -> u64 {
    let mut n = 0u64;
    for_each_solution(csp, |_| {
        n += 1;
        true
    });
    n
}

/// Counts solutions, stopping once `limit + 1` have been seen.
pub fn count_solutions_up_to(csp: &Csp, limit: u64) -> u64 {
    let mut n = 0u64;
    for_each_solution(csp, |_| {
        n += 1;
        n <= limit
    });
    n
}

#[derive(Debug, Clone)]
pub struct MinedInstance {
    pub csp: Csp,
    pub edges: Vec<(usize, usize)>,
    pub graph_seed: u64,
}

#[derive(Debug, Clone)]
pub struct MiningReport {
    pub instances: Vec<MinedInstance>,
    pub attempts: usize,
    /// Fewer than the requested number were found within the attempt budget.
    pub short: bool,
}

fn factorial(k: usize) -> u64 {
    (1..=k as u64).product()
}

/// Generates planar graphs and keeps those whose k-colorings form exactly one
/// color-permutation class (`k!` colorings). Attempt `a` uses graph seed
/// `seed + a`.
pub fn mine_unique_solution_instances(
    n_nodes: usize,
    k_colors: usize,
    density: f64,
    seed: u64,
    n_wanted: usize,
    max_attempts: usize,
) -> Result<MiningReport, OracleError> {
    let target = factorial(k_colors);
    let mut instances = Vec::new();
    let mut attempts = 0;
    while instances.len() < n_wanted && attempts < max_attempts {
        let graph_seed = seed.wrapping_add(attempts as u64);
        attempts += 1;
        let g = gen_planar_graph(n_nodes, density, graph_seed)?;
        let csp = coloring_csp(n_nodes, &g.edges, k_colors)?;
        if count_solutions_up_to(&csp, target) == target {
            instances.push(MinedInstance { csp, edges: g.edges, graph_seed });
        }
    }
    Ok(MiningReport { short: instances.len() < n_wanted, instances, attempts })
}

/// `p(x) ∝ exp(-E(x))` over all `2^n` states; bit `i` of the index is neuron `i`.
pub fn exact_boltzmann(net: &Network) -> Result<Vec<f64>, OracleError> {
    let n = net.n_neurons();
    if n > MAX_EXACT_NEURONS {
        return Err(OracleError::TooManyNeurons(n));
    }
    let neg_e: Vec<f64> = (0..1usize << n)
        .map(|mask| -net.energy_unchecked(|i| mask >> i & 1 == 1))
        .collect();
    let max = neg_e.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut p: Vec<f64> = neg_e.iter().map(|e| (e - max).exp()).collect();
    let z: f64 = p.iter().sum();
    for v in &mut p {
        *v /= z;
    }
    Ok(p)
}

/// Marginal over the first `n_principal` neurons of a full-state table.
pub fn principal_marginal(table: &[f64], n_principal: usize) -> Vec<f64> {
    let mask = (1usize << n_principal) - 1;
    let mut out = vec![0.0; 1 << n_principal];
    for (s, &p) in table.iter().enumerate() {
        out[s & mask] += p;
    }
    out
}

/// `½ Σ |p - q|`.
pub fn tv_distance(p: &[f64], q: &[f64]) -> Result<f64, OracleError> {
    if p.len() != q.len() {
        return Err(OracleError::Dimension(p.len(), q.len()));
    }
    Ok(0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::csp::tests::triangle;
    use crate::problems::{parse_dimacs, ProblemSource};

    #[test]
    fn triangle_counts() {
        let r = solve_exhaustive(&triangle(3), 100);
        assert_eq!(r.solutions.len(), 6);
        assert!(r.complete);
        let r = solve_exhaustive(&triangle(2), 100);
        assert!(r.solutions.is_empty());
        assert!(r.complete);
    }

    #[test]
    fn limit_flags_incomplete() {
        let r = solve_exhaustive(&triangle(3), 6);
        assert!(r.complete);
        let r = solve_exhaustive(&triangle(3), 5);
        assert_eq!(r.solutions.len(), 5);
        assert!(!r.complete);
    }

    #[test]
    fn small_cnf() {
        let csp = parse_dimacs("p cnf 2 2\n1 2 0\n-1 0\n").unwrap();
        let r = solve_exhaustive(&csp, 10);
        assert_eq!(r.solutions, vec![Assignment::complete(vec![1, 0])]);
    }

    #[test]
    fn known_counts() {
        assert_eq!(count_solutions(&ProblemSource::parse("ring:10:antiferro").unwrap().load().unwrap()), 2);
        assert_eq!(count_solutions(&ProblemSource::parse("k4").unwrap().load().unwrap()), 24);
        assert_eq!(count_solutions(&ProblemSource::parse("cube:2x2x2:ferro").unwrap().load().unwrap()), 2);
    }

    #[test]
    fn boltzmann_small_cases() {
        let p = exact_boltzmann(&Network::from_parts(vec![0.0, 0.0], &[]).unwrap()).unwrap();
        assert!(p.iter().all(|&v| (v - 0.25).abs() < 1e-15));
        let p = exact_boltzmann(&Network::from_parts(vec![0.0], &[]).unwrap()).unwrap();
        assert_eq!(p, vec![0.5, 0.5]);
        let wta = Network::from_parts(vec![1.0; 3], &[(0, 1, -2.0), (0, 2, -2.0), (1, 2, -2.0)]).unwrap();
        let p = exact_boltzmann(&wta).unwrap();
        for one_hot in [1, 2, 4] {
            assert!(p[one_hot] > p[7]);
        }
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let big = Network::from_parts(vec![0.0; 21], &[]).unwrap();
        assert!(matches!(exact_boltzmann(&big), Err(OracleError::TooManyNeurons(21))));
    }

    #[test]
    fn tv_examples() {
        assert_eq!(tv_distance(&[0.3, 0.7], &[0.3, 0.7]).unwrap(), 0.0);
        assert_eq!(tv_distance(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 1.0);
        assert!((tv_distance(&[0.6, 0.4], &[0.5, 0.5]).unwrap() - 0.1).abs() < 1e-12);
        assert!(tv_distance(&[1.0], &[0.5, 0.5]).is_err());
    }

    #[test]
    fn marginal_sums_out_auxiliaries() {
        let table = vec![0.1, 0.2, 0.3, 0.4];
        let m = principal_marginal(&table, 1);
        assert!((m[0] - 0.4).abs() < 1e-12 && (m[1] - 0.6).abs() < 1e-12);
    }
}
