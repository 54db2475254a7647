//! Randomized invariants over small instances.

use std::collections::HashSet;

use neurocsp::compiler::{compile, heuristic_weight, CompilerParams};
use neurocsp::csp::{Assignment, Constraint, Csp, Lit, ProblemKind};
use neurocsp::oracle::{count_solutions, exact_boltzmann};
use neurocsp::problems::dimacs::{parse_dimacs, write_dimacs};
use neurocsp::problems::planar::{gen_planar_graph, target_edge_count};
use neurocsp::readout::{canonical_form, expand_solutions, MultiAssignment};
use neurocsp::sampler::{membrane_potential, run_until_first, Chain, SamplerParams};
use proptest::prelude::*;

/// Raw material for a CSP: domain sizes plus constraint sketches whose
/// indices are reduced modulo the actual sizes.
fn arb_csp() -> impl Strategy<Value = Csp> {
    (
        prop::collection::vec(1usize..4, 1..6),
        prop::collection::vec((any::<bool>(), prop::collection::vec((0usize..64, 0usize..64), 1..4)), 0..7),
    )
        .prop_filter_map("invalid sketch", |(doms, sketches)| {
            let n = doms.len();
            let lit = |(v, d): (usize, usize)| Lit::new(v % n, d % doms[v % n]);
            let mut cons = Vec::new();
            for (is_clause, raw) in sketches {
                let mut lits: Vec<Lit> = raw.into_iter().map(lit).collect();
                if is_clause {
                    lits.sort();
                    lits.dedup();
                    cons.push(Constraint::Clause(lits));
                } else if lits.len() >= 2 && lits[0] != lits[1] {
                    cons.push(Constraint::MutexPair(lits[0], lits[1]));
                }
            }
            let vars = (0..n).map(|i| format!("v{i}")).collect();
            let domains = doms.iter().map(|&d| (0..d).map(|k| format!("d{k}")).collect()).collect();
            Csp::new(ProblemKind::Generic, vars, domains, cons).ok()
        })
}

fn all_assignments(csp: &Csp) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for v in 0..csp.num_vars() {
        out = out
            .into_iter()
            .flat_map(|p| (0..csp.domain_size(v)).map(move |d| [p.clone(), vec![d]].concat()))
            .collect();
    }
    out
}

fn naive_ok(csp: &Csp, a: &[usize]) -> bool {
    csp.constraints().iter().all(|c| match c {
        Constraint::MutexPair(x, y) => !(a[x.var] == x.val && a[y.var] == y.val),
        Constraint::Clause(ls) => ls.iter().any(|l| a[l.var] == l.val),
    })
}

fn segments_cross(p: (f64, f64), q: (f64, f64), r: (f64, f64), s: (f64, f64)) -> bool {
    let orient = |a: (f64, f64), b: (f64, f64), c: (f64, f64)| (b.0 - a.0) * (c.1 - a.1) - (b.1 - a.1) * (c.0 - a.0);
    let (d1, d2) = (orient(p, q, r), orient(p, q, s));
    let (d3, d4) = (orient(r, s, p), orient(r, s, q));
    d1 * d2 < -1e-12 && d3 * d4 < -1e-12
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn check_assignment_matches_naive(csp in arb_csp()) {
        for a in all_assignments(&csp) {
            let verdict = csp.check_assignment(&Assignment::complete(a.clone())).unwrap();
            prop_assert_eq!(verdict.is_satisfied(), naive_ok(&csp, &a));
            for &k in verdict.violations() {
                prop_assert!(!csp.constraints()[k].holds(&a));
            }
        }
    }

    #[test]
    fn constraint_graph_is_simple_and_symmetric(csp in arb_csp()) {
        let g = csp.constraint_graph();
        let mut expected = HashSet::new();
        for c in csp.constraints() {
            let vars: Vec<usize> = c.lits().iter().map(|l| l.var).collect();
            for &a in &vars {
                for &b in &vars {
                    if a != b {
                        expected.insert((a, b));
                    }
                }
            }
        }
        for u in 0..csp.num_vars() {
            prop_assert!(!g.has_edge(u, u));
            prop_assert_eq!(g.degree(u), g.neighbors(u).len());
            for v in 0..csp.num_vars() {
                prop_assert_eq!(g.has_edge(u, v), g.has_edge(v, u));
                prop_assert_eq!(g.has_edge(u, v), expected.contains(&(u, v)));
            }
        }
    }

    #[test]
    fn oracle_counts_match_enumeration(csp in arb_csp()) {
        let naive = all_assignments(&csp).iter().filter(|a| naive_ok(&csp, a)).count() as u64;
        prop_assert_eq!(count_solutions(&csp), naive);
    }

    #[test]
    fn compiled_network_is_consistent(csp in arb_csp(), heuristic in any::<bool>(), bits in any::<u64>()) {
        let params = CompilerParams { heuristic_enabled: heuristic, ..Default::default() };
        let net = compile(&csp, &params).unwrap();
        let n = net.n_neurons();
        for i in 0..n {
            prop_assert_eq!(net.weight(i, i), 0.0);
            for j in 0..n {
                prop_assert_eq!(net.weight(i, j), net.weight(j, i));
            }
            if let Some(l) = net.lit_of(i) {
                prop_assert_eq!(net.neuron_of(l), Some(i));
                prop_assert!(i < net.n_principal());
            } else {
                prop_assert!(i >= net.n_principal());
            }
        }
        let x: Vec<bool> = (0..n).map(|i| bits >> (i % 64) & 1 == 1).collect();
        let mut dense = -(0..n).filter(|&i| x[i]).map(|i| net.bias(i)).sum::<f64>();
        for (i, j, w) in net.weight_triples() {
            if i < j && x[i] && x[j] {
                dense -= w;
            }
        }
        let e = net.energy(&x).unwrap();
        prop_assert!((e - dense).abs() < 1e-9);
        prop_assert!((net.energy_breakdown(&x).unwrap().total() - e).abs() < 1e-9);
    }

    #[test]
    fn heuristic_weight_is_monotone(domain in 2usize..10, w_max in 0.1f64..10.0) {
        let mut last = 0.0;
        for d in 0..2 * domain {
            let w = heuristic_weight(d, domain, w_max).unwrap();
            prop_assert!(w >= 0.0 && w <= w_max + 1e-12);
            prop_assert_eq!(w == 0.0, d == 0);
            prop_assert!(w >= last);
            if d + 1 >= domain {
                prop_assert_eq!(w, w_max);
            }
            last = w;
        }
    }

    #[test]
    fn wta_penalizes_multiple_values(domain in 2usize..6, b in 0.1f64..5.0, factor in 1.05f64..4.0) {
        let csp = Csp::new(
            ProblemKind::Generic,
            vec!["v".into()],
            vec![(0..domain).map(|k| k.to_string()).collect()],
            vec![],
        )
        .unwrap();
        let params = CompilerParams { w_max: b * factor, bias_default: b, heuristic_enabled: false, ..Default::default() };
        let net = compile(&csp, &params).unwrap();
        let one_hot = -b;
        for mask in 0u32..1 << domain {
            let x: Vec<bool> = (0..domain).map(|i| mask >> i & 1 == 1).collect();
            if mask.count_ones() >= 2 {
                prop_assert!(net.energy(&x).unwrap() > one_hot);
            }
        }
    }

    #[test]
    fn or_motif_penalty(k in 1usize..6, delta in 0.1f64..6.0) {
        let text = format!("p cnf {k} 1\n{} 0\n", (1..=k).map(|i| i.to_string()).collect::<Vec<_>>().join(" "));
        let csp = parse_dimacs(&text).unwrap();
        let net = compile(&csp, &CompilerParams { or_push_strength: delta, ..Default::default() }).unwrap();
        let (np, na) = (net.n_principal(), net.n_auxiliary());
        let lits: Vec<usize> = (0..k).map(|v| net.neuron_of(Lit::new(v, 0)).unwrap()).collect();
        for mask in 0usize..1 << k {
            let best = (0usize..1 << na)
                .map(|aux| {
                    let mut x = vec![false; np + na];
                    for (b, &i) in lits.iter().enumerate() {
                        x[i] = mask >> b & 1 == 1;
                    }
                    for a in 0..na {
                        x[np + a] = aux >> a & 1 == 1;
                    }
                    net.energy_breakdown(&x).unwrap().or
                })
                .fold(f64::INFINITY, f64::min);
            let expected = if mask == 0 { -delta } else { -2.0 * delta };
            prop_assert!((best - expected).abs() < 1e-9, "mask {mask:b}: {best} vs {expected}");
        }
    }

    #[test]
    fn expansion_matches_brute_force(csp in arb_csp(), picks in prop::collection::vec(any::<u8>(), 6)) {
        let sets: Vec<Vec<usize>> = (0..csp.num_vars())
            .map(|v| {
                let d = csp.domain_size(v);
                let s: Vec<usize> = (0..d).filter(|&k| picks[v] >> k & 1 == 1).collect();
                if s.is_empty() { vec![picks[v] as usize % d] } else { s }
            })
            .collect();
        let m = MultiAssignment::new(sets.clone());
        let got = expand_solutions(&m, &csp, usize::MAX).unwrap();
        let mut brute: Vec<Vec<usize>> = all_assignments(&csp)
            .into_iter()
            .filter(|a| a.iter().enumerate().all(|(v, x)| sets[v].contains(x)) && naive_ok(&csp, a))
            .collect();
        let mut found: Vec<Vec<usize>> =
            got.solutions.iter().map(|a| a.complete_values(&csp).unwrap()).collect();
        let distinct: HashSet<&Vec<usize>> = found.iter().collect();
        prop_assert_eq!(distinct.len(), found.len());
        found.sort();
        brute.sort();
        prop_assert_eq!(found, brute);
        prop_assert!(!got.truncated);
    }

    #[test]
    fn canonical_form_ignores_color_names(values in prop::collection::vec(0usize..5, 1..10), perm in Just([3usize, 0, 4, 1, 2]).prop_shuffle()) {
        let renamed: Vec<usize> = values.iter().map(|&c| perm[c]).collect();
        let c = canonical_form(&values);
        prop_assert_eq!(&canonical_form(&renamed), &c);
        prop_assert_eq!(&canonical_form(&c), &c);
    }

    #[test]
    fn dimacs_round_trip(seed in any::<u64>(), n in 3usize..12, m in 1usize..30) {
        let (csp, hidden) = neurocsp::problems::dimacs::gen_planted_3sat(n, m, seed);
        prop_assert!(csp.check_assignment(&Assignment::complete(hidden)).unwrap().is_satisfied());
        let back = parse_dimacs(&write_dimacs(&csp)).unwrap();
        prop_assert_eq!(back.constraints(), csp.constraints());
        prop_assert_eq!(back.num_vars(), csp.num_vars());
    }

    #[test]
    fn planar_graphs_are_planar(seed in any::<u64>(), n in 3usize..30, density in 0.2f64..=1.0) {
        let g = gen_planar_graph(n, density, seed).unwrap();
        prop_assert_eq!(g.edges.len(), target_edge_count(n, density));
        prop_assert_eq!(&g, &gen_planar_graph(n, density, seed).unwrap());
        for (a, &(p, q)) in g.edges.iter().enumerate() {
            prop_assert!(p < q && q < n);
            for &(r, s) in &g.edges[a + 1..] {
                let shared = p == r || p == s || q == r || q == s;
                prop_assert!(shared || !segments_cross(g.coords[p], g.coords[q], g.coords[r], g.coords[s]));
            }
        }
    }

    #[test]
    fn membrane_potential_matches_dense(seed in any::<u64>(), sweeps in 0usize..30) {
        let csp = neurocsp::problems::two_clause_example();
        let net = compile(&csp, &CompilerParams::default()).unwrap();
        let mut chain = Chain::new(&net, 20, seed);
        for _ in 0..sweeps {
            chain.sweep();
        }
        let s = chain.state();
        for i in 0..net.n_neurons() {
            let dense = net.bias(i) + (0..net.n_neurons()).filter(|&j| s.is_active(j)).map(|j| net.weight(i, j)).sum::<f64>();
            prop_assert!((membrane_potential(&net, s, i) - dense).abs() < 1e-9);
        }
    }

    #[test]
    fn sampler_is_deterministic(seed in any::<u64>()) {
        let csp = neurocsp::problems::ProblemSource::parse("k4").unwrap().load().unwrap();
        let net = compile(&csp, &CompilerParams::default()).unwrap();
        let p = SamplerParams { seed, max_sweeps: 3_000, ..Default::default() };
        let a = run_until_first(&net, &csp, &p);
        let b = run_until_first(&net, &csp, &p);
        prop_assert_eq!(&a, &b);
        for s in &a.solutions {
            prop_assert!(naive_ok(&csp, &s.values));
        }
    }
}

#[test]
fn boltzmann_table_is_normalized_with_energy_ratios() {
    let net = compile(&neurocsp::problems::two_clause_example(), &CompilerParams::default()).unwrap();
    let p = exact_boltzmann(&net).unwrap();
    assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    let state = |m: usize| (0..net.n_neurons()).map(|i| m >> i & 1 == 1).collect::<Vec<_>>();
    for (a, b) in [(0usize, 5usize), (17, 300), (1023, 4095)] {
        let de = net.energy(&state(b)).unwrap() - net.energy(&state(a)).unwrap();
        assert!((p[a] / p[b] - de.exp()).abs() < 1e-6 * de.exp().max(1.0));
    }
}
