//! Ising ground-state problems on rings and open-boundary cubic lattices.
//! Each bond becomes two mutex pairs forbidding the unfavourable alignments.

use std::collections::BTreeSet;

use super::ProblemError;
use crate::csp::{Constraint, Csp, Lit, ProblemKind};

pub const SPIN_UP: usize = 0;
pub const SPIN_DOWN: usize = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Topology {
    Ring(usize),
    Cube(usize, usize, usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coupling {
    Ferro,
    Antiferro,
}

pub fn ising_bonds(topology: Topology) -> Result<(usize, Vec<(usize, usize)>), ProblemError> {
    let mut bonds = BTreeSet::new();
    let n = match topology {
        Topology::Ring(n) => {
            if n < 2 {
                return Err(ProblemError::TooSmall { what: "ring", min: 2, got: n });
            }
            for i in 0..n {
                let j = (i + 1) % n;
                bonds.insert((i.min(j), i.max(j)));
            }
            n
        }
        Topology::Cube(nx, ny, nz) => {
            let m = nx.min(ny).min(nz);
            if m < 2 {
                return Err(ProblemError::TooSmall { what: "cube side", min: 2, got: m });
            }
            let idx = |x: usize, y: usize, z: usize| (z * ny + y) * nx + x;
            for z in 0..nz {
                for y in 0..ny {
                    for x in 0..nx {
                        let i = idx(x, y, z);
                        if x + 1 < nx {
                            bonds.insert((i, idx(x + 1, y, z)));
                        }
                        if y + 1 < ny {
                            bonds.insert((i, idx(x, y + 1, z)));
                        }
                        if z + 1 < nz {
                            bonds.insert((i, idx(x, y, z + 1)));
                        }
                    }
                }
            }
            nx * ny * nz
        }
    };
    Ok((n, bonds.into_iter().collect()))
}

pub fn ising_to_csp(topology: Topology, coupling: Coupling) -> Result<Csp, ProblemError> {
    let (n, bonds) = ising_bonds(topology)?;
    let names = (0..n).map(|i| format!("s{i}")).collect();
    let spins = vec!["+1".to_string(), "-1".to_string()];
    let mut cons = Vec::with_capacity(bonds.len() * 2);
    for (u, v) in bonds {
        let forbidden = match coupling {
            Coupling::Antiferro => [(SPIN_UP, SPIN_UP), (SPIN_DOWN, SPIN_DOWN)],
            Coupling::Ferro => [(SPIN_UP, SPIN_DOWN), (SPIN_DOWN, SPIN_UP)],
        };
        for (a, b) in forbidden {
            cons.push(Constraint::MutexPair(Lit::new(u, a), Lit::new(v, b)));
        }
    }
    Ok(Csp::new(ProblemKind::Ising, names, vec![spins; n], cons)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ring_and_cube_bond_counts() {
        assert_eq!(ising_bonds(Topology::Ring(10)).unwrap().1.len(), 10);
        assert_eq!(ising_bonds(Topology::Ring(2)).unwrap().1.len(), 1);
        assert_eq!(ising_bonds(Topology::Cube(2, 2, 2)).unwrap().1.len(), 12);
        assert_eq!(ising_bonds(Topology::Cube(10, 10, 10)).unwrap().1.len(), 2700);
        assert!(ising_bonds(Topology::Ring(1)).is_err());
        assert!(ising_bonds(Topology::Cube(1, 4, 4)).is_err());
    }

    #[test]
    fn ring_degrees() {
        let csp = ising_to_csp(Topology::Ring(10), Coupling::Antiferro).unwrap();
        assert!(csp.constraint_graph().degrees().iter().all(|&d| d == 2));
        assert_eq!(csp.constraints().len(), 20);
    }
}
