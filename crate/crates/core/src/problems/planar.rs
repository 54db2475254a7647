//! Seeded planar graph generation for coloring benchmarks.
//!
//! Points are scattered inside a fixed outer triangle and Delaunay
//! triangulated (Bowyer-Watson). Because the hull is a triangle the result is
//! a maximal planar graph with exactly `3n - 6` edges. Edges are then removed
//! uniformly at random down to the density target. Coordinates are kept so the
//! straight-line embedding can be checked independently.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::ProblemError;
use crate::csp::{Constraint, Csp, Lit, ProblemKind};

#[derive(Debug, Clone, PartialEq)]
pub struct PlanarGraph {
    pub n: usize,
    /// `(u, v)` with `u < v`, sorted.
    pub edges: Vec<(usize, usize)>,
    /// Straight-line embedding witnessing planarity.
    pub coords: Vec<(f64, f64)>,
}

pub fn max_planar_edges(n: usize) -> usize {
    match n {
        0 | 1 => 0,
        2 => 1,
        _ => 3 * n - 6,
    }
}

/// Edge count for a density target: the fraction of `3n - 6`, rounded down.
pub fn target_edge_count(n: usize, density: f64) -> usize {
    (density * max_planar_edges(n) as f64 + 1e-9).floor() as usize
}

pub fn gen_planar_graph(n: usize, density: f64, seed: u64) -> Result<PlanarGraph, ProblemError> {
    if n < 3 {
        return Err(ProblemError::TooSmall { what: "planar graph", min: 3, got: n });
    }
    if !(density > 0.0 && density <= 1.0) {
        return Err(ProblemError::InfeasibleDensity(density));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let outer = [(0.0, 0.0), (1.0, 0.0), (0.5, 0.866_025_403_784_438_6)];
    let mut pts: Vec<(f64, f64)> = outer.to_vec();
    while pts.len() < n {
        // uniform in the triangle, kept away from its sides
        let (mut a, mut b): (f64, f64) = (rng.random(), rng.random());
        if a + b > 1.0 {
            a = 1.0 - a;
            b = 1.0 - b;
        }
        let c = 1.0 - a - b;
        if a.min(b).min(c) < 0.02 {
            continue;
        }
        let x = a * outer[0].0 + b * outer[1].0 + c * outer[2].0;
        let y = a * outer[0].1 + b * outer[1].1 + c * outer[2].1;
        pts.push((x, y));
    }

    let triangles = bowyer_watson(&pts);
    let mut edges: Vec<(usize, usize)> = triangles
        .iter()
        .flat_map(|t| [(t[0], t[1]), (t[1], t[2]), (t[0], t[2])])
        .map(|(a, b)| (a.min(b), a.max(b)))
        .collect();
    edges.sort_unstable();
    edges.dedup();
    debug_assert_eq!(edges.len(), max_planar_edges(n));

    // random relabeling so the outer triangle is not always nodes 0..3
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut rng);
    let mut coords = vec![(0.0, 0.0); n];
    for (old, &new) in perm.iter().enumerate() {
        coords[new] = pts[old];
    }
    let mut edges: Vec<(usize, usize)> = edges
        .into_iter()
        .map(|(a, b)| (perm[a].min(perm[b]), perm[a].max(perm[b])))
        .collect();
    edges.sort_unstable();

    let target = target_edge_count(n, density);
    edges.shuffle(&mut rng);
    edges.truncate(target);
    edges.sort_unstable();
    Ok(PlanarGraph { n, edges, coords })
}

pub fn gen_planar_coloring(n: usize, density: f64, k_colors: usize, seed: u64) -> Result<Csp, ProblemError> {
    let g = gen_planar_graph(n, density, seed)?;
    coloring_csp(g.n, &g.edges, k_colors)
}

/// Graph k-coloring: one variable per node, `k` same-color mutex pairs per edge.
pub fn coloring_csp(n: usize, edges: &[(usize, usize)], k_colors: usize) -> Result<Csp, ProblemError> {
    let names: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    coloring_csp_named(names, edges, k_colors)
}

pub fn coloring_csp_named(names: Vec<String>, edges: &[(usize, usize)], k_colors: usize) -> Result<Csp, ProblemError> {
    if k_colors == 0 {
        return Err(ProblemError::TooSmall { what: "color count", min: 1, got: 0 });
    }
    let n = names.len();
    let colors: Vec<String> = (1..=k_colors).map(|c| format!("c{c}")).collect();
    let mut cons = Vec::with_capacity(edges.len() * k_colors);
    for &(u, v) in edges {
        if u >= n || v >= n {
            return Err(ProblemError::NodeOutOfRange { node: u.max(v), n });
        }
        if u == v {
            return Err(ProblemError::SelfLoop(u));
        }
        for c in 0..k_colors {
            cons.push(Constraint::MutexPair(Lit::new(u, c), Lit::new(v, c)));
        }
    }
    Ok(Csp::new(ProblemKind::Coloring, names, vec![colors; n], cons)?)
}

type Tri = [usize; 3];

fn circumcircle_contains(pts: &[(f64, f64)], t: &Tri, p: (f64, f64)) -> bool {
    let (ax, ay) = pts[t[0]];
    let (bx, by) = pts[t[1]];
    let (cx, cy) = pts[t[2]];
    let (adx, ady) = (ax - p.0, ay - p.1);
    let (bdx, bdy) = (bx - p.0, by - p.1);
    let (cdx, cdy) = (cx - p.0, cy - p.1);
    let det = (adx * adx + ady * ady) * (bdx * cdy - cdx * bdy) - (bdx * bdx + bdy * bdy) * (adx * cdy - cdx * ady)
        + (cdx * cdx + cdy * cdy) * (adx * bdy - bdx * ady);
    let orient = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax);
    if orient > 0.0 {
        det > 0.0
    } else {
        det < 0.0
    }
}

/// Triangulates points whose first three entries form a triangle enclosing all others.
fn bowyer_watson(pts: &[(f64, f64)]) -> Vec<Tri> {
    let mut tris: Vec<Tri> = vec![[0, 1, 2]];
    for p in 3..pts.len() {
        let (bad, good): (Vec<Tri>, Vec<Tri>) =
            tris.into_iter().partition(|t| circumcircle_contains(pts, t, pts[p]));
        let mut boundary: Vec<(usize, usize)> = Vec::new();
        for t in &bad {
            for (a, b) in [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])] {
                let key = (a.min(b), a.max(b));
                if let Some(pos) = boundary.iter().position(|&e| e == key) {
                    boundary.swap_remove(pos);
                } else {
                    boundary.push(key);
                }
            }
        }
        tris = good;
        tris.extend(boundary.into_iter().map(|(a, b)| [a, b, p]));
    }
    tris
}
