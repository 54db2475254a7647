//! Bundled instances and generators checked against the exact oracle.

use neurocsp::compiler::{compile, CompilerParams};
use neurocsp::oracle::{count_solutions, count_solutions_up_to, for_each_solution};
use neurocsp::problems::sudoku::{assignment_to_grid, format_sudoku, parse_sudoku};
use neurocsp::problems::{ising, two_clause_example, ProblemSource};
use neurocsp::readout::canonical_form;
use neurocsp::Csp;

fn load(spec: &str) -> Csp {
    ProblemSource::parse(spec).unwrap().load().unwrap()
}

#[test]
fn bundled_sudokus_have_unique_solutions() {
    for name in ["easy", "hard", "escargot"] {
        let csp = load(&format!("sudoku:{name}"));
        assert_eq!(count_solutions_up_to(&csp, 2), 1, "sudoku {name}");
    }
}

#[test]
fn easy_sudoku_solution_keeps_givens() {
    let puzzle = parse_sudoku(neurocsp::problems::SUDOKU_EASY).unwrap();
    let csp = load("sudoku:easy");
    let mut sol = None;
    for_each_solution(&csp, |s| {
        sol = Some(s.to_vec());
        false
    });
    let grid = assignment_to_grid(&csp, &sol.unwrap());
    for r in 0..9 {
        for c in 0..9 {
            if puzzle[r][c] != 0 {
                assert_eq!(grid[r][c], puzzle[r][c]);
            }
        }
        let mut row: Vec<u8> = grid[r].to_vec();
        row.sort();
        assert_eq!(row, (1..=9).collect::<Vec<u8>>());
    }
    assert_eq!(format_sudoku(&grid).len(), 81);
}

#[test]
fn complete_graph_counts() {
    // k colors on K_k: k! proper colorings, one class.
    assert_eq!(count_solutions(&load("k3")), 6);
    assert_eq!(count_solutions(&load("k4")), 24);
}

#[test]
fn australia_map_counts() {
    // Seven regions, Tasmania isolated: 3 colorings of the mainland wheel
    // times free Tasmania. Known value: 18 with three colors.
    let csp = load("map:australia");
    assert_eq!(csp.num_vars(), 7);
    let mut classes = std::collections::HashSet::new();
    for_each_solution(&csp, |s| {
        classes.insert(canonical_form(s));
        true
    });
    assert_eq!(count_solutions(&csp), 18);
    assert_eq!(classes.len(), 3);
}

#[test]
fn ising_rings() {
    // Even antiferromagnetic ring: two ground states; odd ring is frustrated.
    assert_eq!(count_solutions(&load("ring:10:antiferro")), 2);
    assert_eq!(count_solutions(&load("ring:9:antiferro")), 0);
    assert_eq!(count_solutions(&load("ring:7:ferro")), 2);
    let (n, bonds) = ising::ising_bonds(ising::Topology::Cube(3, 3, 3)).unwrap();
    assert_eq!(n, 27);
    assert_eq!(bonds.len(), 3 * 2 * 3 * 3);
}

#[test]
fn two_clause_network_shape() {
    let net = compile(&two_clause_example(), &CompilerParams::default()).unwrap();
    assert_eq!(net.n_principal(), 8);
    assert_eq!(net.n_auxiliary(), 4);
    assert_eq!(net.motifs().len(), 10);
    assert_eq!(count_solutions(&two_clause_example()), 12);
}
