//! Problem families: parsers, generators and the problem-spec strings the CLI accepts.

pub mod dimacs;
pub mod ising;
pub mod planar;
pub mod sudoku;

use std::fmt;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::csp::{CspError, Csp};

pub use dimacs::{gen_planted_3sat, parse_dimacs, write_dimacs};
pub use ising::{ising_to_csp, Coupling, Topology};
pub use planar::{coloring_csp, gen_planar_coloring, gen_planar_graph, PlanarGraph};
pub use sudoku::{parse_sudoku, sudoku_to_csp, Grid};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(line: usize, message: impl Into<String>) -> Self {
        ParseError { line, message: message.into() }
    }
}

#[derive(Debug, Error)]
pub enum ProblemError {
    #[error("{what} must be at least {min}, got {got}")]
    TooSmall { what: &'static str, min: usize, got: usize },
    #[error("density {0} is infeasible (need 0 < density <= 1)")]
    InfeasibleDensity(f64),
    #[error("node {node} out of range for {n} nodes")]
    NodeOutOfRange { node: usize, n: usize },
    #[error("self loop on node {0}")]
    SelfLoop(usize),
    #[error("inconsistent sudoku givens: {0}")]
    BadSudoku(String),
    #[error("unrecognized problem `{0}`")]
    UnknownProblem(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Csp(#[from] CspError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    File { path: PathBuf, source: Box<ProblemError> },
}

pub const AUSTRALIA: &str = include_str!("../../data/maps/australia.col");
pub const CANADA: &str = include_str!("../../data/maps/canada.col");
pub const SUDOKU_EASY: &str = include_str!("../../data/sudoku/easy.sdk");
pub const SUDOKU_HARD: &str = include_str!("../../data/sudoku/hard.sdk");
pub const SUDOKU_ESCARGOT: &str = include_str!("../../data/sudoku/escargot.sdk");
pub const TWO_CLAUSE: &str = include_str!("../../data/cnf/two_clause.cnf");

/// `(x1 ∨ x2 ∨ x3) ∧ (x2 ∨ ¬x3 ∨ ¬x4)`, the running four-variable SAT example.
pub fn two_clause_example() -> Csp {
    parse_dimacs(TWO_CLAUSE).expect("bundled CNF parses")
}

/// Coloring graph in the adjacency-list text format:
///
/// ```text
/// # comment
/// nodes 4 colors 3
/// 0 1
/// 1 2   # trailing comments are fine
/// ```
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColoringGraph {
    pub n: usize,
    pub k: usize,
    pub edges: Vec<(usize, usize)>,
}

impl ColoringGraph {
    pub fn to_csp(&self) -> Result<Csp, ProblemError> {
        coloring_csp(self.n, &self.edges, self.k)
    }
}

pub fn parse_adjacency(text: &str) -> Result<ColoringGraph, ParseError> {
    let mut header: Option<(usize, usize)> = None;
    let mut edges = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        if parts[0] == "nodes" {
            if header.is_some() {
                return Err(ParseError::new(line_no, "duplicate header"));
            }
            if parts.len() != 4 || parts[2] != "colors" {
                return Err(ParseError::new(line_no, "expected `nodes <n> colors <k>`"));
            }
            let n = parts[1].parse().map_err(|_| ParseError::new(line_no, "bad node count"))?;
            let k = parts[3].parse().map_err(|_| ParseError::new(line_no, "bad color count"))?;
            header = Some((n, k));
            continue;
        }
        let Some((n, _)) = header else {
            return Err(ParseError::new(line_no, "edge before `nodes <n> colors <k>` header"));
        };
        if parts.len() != 2 {
            return Err(ParseError::new(line_no, "expected `u v`"));
        }
        let u: usize = parts[0].parse().map_err(|_| ParseError::new(line_no, format!("bad node `{}`", parts[0])))?;
        let v: usize = parts[1].parse().map_err(|_| ParseError::new(line_no, format!("bad node `{}`", parts[1])))?;
        if u >= n || v >= n {
            return Err(ParseError::new(line_no, format!("node out of range 0..{n}")));
        }
        if u == v {
            return Err(ParseError::new(line_no, "self loop"));
        }
        edges.push((u.min(v), u.max(v)));
    }
    let Some((n, k)) = header else {
        return Err(ParseError::new(1, "missing `nodes <n> colors <k>` header"));
    };
    edges.sort_unstable();
    edges.dedup();
    Ok(ColoringGraph { n, k, edges })
}

pub fn write_adjacency(g: &ColoringGraph) -> String {
    let mut out = format!("nodes {} colors {}\n", g.n, g.k);
    for (u, v) in &g.edges {
        out.push_str(&format!("{u} {v}\n"));
    }
    out
}

/// A problem named either by file path or by an inline spec string.
///
/// Inline forms: `k<n>` (complete graph, n colors), `ring:<n>:<ferro|antiferro>`,
/// `cube:<x>x<y>x<z>:<ferro|antiferro>`, `planar:<n>:<density>:<k>:<seed>`,
/// `sat:<vars>:<clauses>:<seed>`, `sudoku:<81 cells|easy|hard|escargot>`,
/// `map:<australia|canada>`.
#[derive(Debug, Clone, PartialEq)]
pub enum ProblemSource {
    File(PathBuf),
    Complete(usize),
    Ising(Topology, Coupling),
    Planar { n: usize, density: f64, k: usize, seed: u64 },
    Sat { vars: usize, clauses: usize, seed: u64 },
    Sudoku(String),
    Map(String),
}

impl fmt::Display for ProblemSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let coupling = |c: &Coupling| if *c == Coupling::Ferro { "ferro" } else { "antiferro" };
        match self {
            ProblemSource::File(p) => write!(f, "{}", p.display()),
            ProblemSource::Complete(n) => write!(f, "k{n}"),
            ProblemSource::Ising(Topology::Ring(n), c) => write!(f, "ring:{n}:{}", coupling(c)),
            ProblemSource::Ising(Topology::Cube(x, y, z), c) => write!(f, "cube:{x}x{y}x{z}:{}", coupling(c)),
            ProblemSource::Planar { n, density, k, seed } => write!(f, "planar:{n}:{density}:{k}:{seed}"),
            ProblemSource::Sat { vars, clauses, seed } => write!(f, "sat:{vars}:{clauses}:{seed}"),
            ProblemSource::Sudoku(s) => write!(f, "sudoku:{s}"),
            ProblemSource::Map(m) => write!(f, "map:{m}"),
        }
    }
}

impl ProblemSource {
    pub fn parse(spec: &str) -> Result<Self, ProblemError> {
        let unknown = || ProblemError::UnknownProblem(spec.to_string());
        let num = |s: &str| s.parse::<usize>().map_err(|_| unknown());
        let seed = |s: &str| s.parse::<u64>().map_err(|_| unknown());
        let coupling = |s: &str| match s {
            "ferro" => Ok(Coupling::Ferro),
            "antiferro" => Ok(Coupling::Antiferro),
            _ => Err(unknown()),
        };
        let parts: Vec<&str> = spec.split(':').collect();
        match parts.as_slice() {
            [k] if k.len() > 1 && k.starts_with('k') && k[1..].chars().all(|c| c.is_ascii_digit()) => {
                Ok(ProblemSource::Complete(num(&k[1..])?))
            }
            ["ring", n, c] => Ok(ProblemSource::Ising(Topology::Ring(num(n)?), coupling(c)?)),
            ["cube", dims, c] => {
                let d: Vec<&str> = dims.split('x').collect();
                if d.len() != 3 {
                    return Err(unknown());
                }
                Ok(ProblemSource::Ising(Topology::Cube(num(d[0])?, num(d[1])?, num(d[2])?), coupling(c)?))
            }
            ["planar", n, dens, k, s] => Ok(ProblemSource::Planar {
                n: num(n)?,
                density: dens.parse().map_err(|_| unknown())?,
                k: num(k)?,
                seed: seed(s)?,
            }),
            ["sat", v, c, s] => Ok(ProblemSource::Sat { vars: num(v)?, clauses: num(c)?, seed: seed(s)? }),
            ["sudoku", g] => Ok(ProblemSource::Sudoku(g.to_string())),
            ["map", m] => Ok(ProblemSource::Map(m.to_string())),
            _ if Path::new(spec).exists() || spec.contains('/') || spec.contains('.') => {
                Ok(ProblemSource::File(PathBuf::from(spec)))
            }
            _ => Err(unknown()),
        }
    }

    pub fn load(&self) -> Result<Csp, ProblemError> {
        match self {
            ProblemSource::File(path) => load_file(path),
            ProblemSource::Complete(n) => {
                let edges: Vec<(usize, usize)> =
                    (0..*n).flat_map(|u| (u + 1..*n).map(move |v| (u, v))).collect();
                coloring_csp(*n, &edges, *n)
            }
            ProblemSource::Ising(t, c) => ising_to_csp(*t, *c),
            ProblemSource::Planar { n, density, k, seed } => gen_planar_coloring(*n, *density, *k, *seed),
            ProblemSource::Sat { vars, clauses, seed } => Ok(gen_planted_3sat(*vars, *clauses, *seed).0),
            ProblemSource::Sudoku(s) => {
                let text = match s.as_str() {
                    "easy" => SUDOKU_EASY,
                    "hard" => SUDOKU_HARD,
                    "escargot" => SUDOKU_ESCARGOT,
                    other => other,
                };
                sudoku_to_csp(&parse_sudoku(text)?)
            }
            ProblemSource::Map(m) => match m.as_str() {
                "australia" => parse_adjacency(AUSTRALIA)?.to_csp(),
                "canada" => parse_adjacency(CANADA)?.to_csp(),
                _ => Err(ProblemError::UnknownProblem(format!("map:{m}"))),
            },
        }
    }
}

/// Loads a problem file, dispatching on extension: `.cnf` (DIMACS), `.col`
/// (adjacency list), `.sdk`/`.sudoku` (81-cell grid), `.json` (serialized CSP).
pub fn load_file(path: &Path) -> Result<Csp, ProblemError> {
    let text = std::fs::read_to_string(path).map_err(|source| ProblemError::Io { path: path.to_path_buf(), source })?;
    let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("");
    let wrap = |e: ProblemError| ProblemError::File { path: path.to_path_buf(), source: Box::new(e) };
    match ext {
        "cnf" => parse_dimacs(&text).map_err(|e| wrap(e.into())),
        "col" => parse_adjacency(&text).map_err(|e| wrap(e.into()))?.to_csp().map_err(wrap),
        "sdk" | "sudoku" => sudoku_to_csp(&parse_sudoku(&text).map_err(|e| wrap(e.into()))?).map_err(wrap),
        "json" => serde_json::from_str::<Csp>(&text)
            .map_err(|e| wrap(ParseError::new(e.line(), e.to_string()).into()))
            .and_then(|c| revalidate(c).map_err(wrap)),
        _ => Err(ProblemError::UnknownProblem(path.display().to_string())),
    }
}

// Deserialization bypasses `Csp::new`, so rebuild through it.
fn revalidate(c: Csp) -> Result<Csp, ProblemError> {
    Ok(Csp::new(c.kind(), c.variables().to_vec(), c.domains().to_vec(), c.constraints().to_vec())?)
}
