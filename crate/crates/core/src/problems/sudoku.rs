//! Sudoku grids as CSPs. Givens restrict the cell domain to a singleton;
//! every pair of peer cells gets one mutex pair per shared value.

use super::{ParseError, ProblemError};
use crate::csp::{Constraint, Csp, Lit, ProblemKind};

pub type Grid = [[u8; 9]; 9];

/// Parses the 81-character row-major form; `0` and `.` are blanks.
/// Whitespace is ignored so grids may be laid out over several lines.
pub fn parse_sudoku(text: &str) -> Result<Grid, ParseError> {
    let cells: Vec<char> = text.chars().filter(|c| !c.is_whitespace()).collect();
    if cells.len() != 81 {
        return Err(ParseError::new(1, format!("expected 81 cells, found {}", cells.len())));
    }
    let mut grid = [[0u8; 9]; 9];
    for (i, ch) in cells.into_iter().enumerate() {
        grid[i / 9][i % 9] = match ch {
            '.' | '0' => 0,
            '1'..='9' => ch as u8 - b'0',
            _ => return Err(ParseError::new(1, format!("bad cell `{ch}` at position {}", i + 1))),
        };
    }
    Ok(grid)
}

pub fn format_sudoku(grid: &Grid) -> String {
    grid.iter().flatten().map(|&v| char::from(b'0' + v)).collect()
}

fn peers(a: usize, b: usize) -> bool {
    let (ra, ca) = (a / 9, a % 9);
    let (rb, cb) = (b / 9, b % 9);
    ra == rb || ca == cb || (ra / 3 == rb / 3 && ca / 3 == cb / 3)
}

pub fn sudoku_to_csp(grid: &Grid) -> Result<Csp, ProblemError> {
    let cell = |i: usize| grid[i / 9][i % 9];
    for a in 0..81 {
        if cell(a) > 9 {
            return Err(ProblemError::BadSudoku(format!("cell r{}c{} holds {}", a / 9 + 1, a % 9 + 1, cell(a))));
        }
        for b in a + 1..81 {
            if cell(a) != 0 && cell(a) == cell(b) && peers(a, b) {
                return Err(ProblemError::BadSudoku(format!(
                    "r{}c{} and r{}c{} both hold {}",
                    a / 9 + 1,
                    a % 9 + 1,
                    b / 9 + 1,
                    b % 9 + 1,
                    cell(a)
                )));
            }
        }
    }
    let names: Vec<String> = (0..81).map(|i| format!("r{}c{}", i / 9 + 1, i % 9 + 1)).collect();
    let domains: Vec<Vec<u8>> = (0..81)
        .map(|i| if cell(i) == 0 { (1..=9).collect() } else { vec![cell(i)] })
        .collect();
    let mut cons = Vec::new();
    for a in 0..81 {
        for b in a + 1..81 {
            if !peers(a, b) {
                continue;
            }
            for (ia, va) in domains[a].iter().enumerate() {
                if let Some(ib) = domains[b].iter().position(|vb| vb == va) {
                    cons.push(Constraint::MutexPair(Lit::new(a, ia), Lit::new(b, ib)));
                }
            }
        }
    }
    let labels = domains.iter().map(|d| d.iter().map(|v| v.to_string()).collect()).collect();
    Ok(Csp::new(ProblemKind::Sudoku, names, labels, cons)?)
}

/// Decodes a complete assignment of a sudoku CSP back into a grid.
pub fn assignment_to_grid(csp: &Csp, values: &[usize]) -> Grid {
    let mut grid = [[0u8; 9]; 9];
    for (i, &v) in values.iter().enumerate() {
        grid[i / 9][i % 9] = csp.domain(i)[v].parse().expect("sudoku labels are digits");
    }
    grid
}
