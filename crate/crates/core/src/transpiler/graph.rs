use std::collections::{BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Topology {
    AllToAll,
    SquareGrid,
    HeavyHex,
}

impl Topology {
    pub const ALL: [Topology; 3] = [Topology::AllToAll, Topology::SquareGrid, Topology::HeavyHex];

    pub fn name(self) -> &'static str {
        match self {
            Topology::AllToAll => "all_to_all",
            Topology::SquareGrid => "square_grid",
            Topology::HeavyHex => "heavy_hex",
        }
    }

    pub fn graph(self, n: usize) -> CouplingGraph {
        match self {
            Topology::AllToAll => CouplingGraph::all_to_all(n),
            Topology::SquareGrid => CouplingGraph::square_grid(n),
            Topology::HeavyHex => CouplingGraph::heavy_hex(n),
        }
    }
}

impl fmt::Display for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Topology {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Topology::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown topology `{s}`")))
    }
}

/// Undirected hardware connectivity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CouplingGraph {
    n_physical: usize,
    edges: BTreeSet<(usize, usize)>,
    kind: Topology,
}

impl CouplingGraph {
    /// Edges are normalised to `(min, max)`; self-loops and out-of-range
    /// endpoints are rejected.
    pub fn new(
        n_physical: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
        kind: Topology,
    ) -> Result<Self> {
        let mut set = BTreeSet::new();
        for (a, b) in edges {
            if a == b || a >= n_physical || b >= n_physical {
                return Err(Error::InvalidArgument(format!("bad edge ({a}, {b})")));
            }
            set.insert((a.min(b), a.max(b)));
        }
        Ok(Self {
            n_physical,
            edges: set,
            kind,
        })
    }

    pub fn all_to_all(n: usize) -> Self {
        let edges = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b)));
        Self::new(n, edges, Topology::AllToAll).expect("valid edges")
    }

    /// `n` nodes of a grid with `ceil(sqrt n)` columns, numbered boustrophedon
    /// so consecutive indices are always adjacent.
    pub fn square_grid(n: usize) -> Self {
        let cols = (1..).find(|c| c * c >= n).unwrap_or(1).max(1);
        let pos = |i: usize| {
            let (r, k) = (i / cols, i % cols);
            (r, if r % 2 == 0 { k } else { cols - 1 - k })
        };
        let mut index = std::collections::HashMap::new();
        for i in 0..n {
            index.insert(pos(i), i);
        }
        let mut edges = Vec::new();
        for i in 0..n {
            let (r, c) = pos(i);
            for (dr, dc) in [(0, 1), (1, 0)] {
                if let Some(&j) = index.get(&(r + dr, c + dc)) {
                    edges.push((i, j));
                }
            }
        }
        Self::new(n, edges, Topology::SquareGrid).expect("valid edges")
    }

    /// First `n` nodes of a heavy-hex lattice: rows of `4m + 3` qubits joined
    /// by bridge qubits every fourth column, alternating offsets 2 and 0.
    /// Rows are numbered boustrophedon, each followed by the bridges below
    /// it, so every prefix is connected.
    pub fn heavy_hex(n: usize) -> Self {
        // row length grows with n to keep the patch roughly square
        let mut len = 3;
        while len * len < 3 * n / 2 {
            len += 4;
        }
        let mut edges = Vec::new();
        let mut count = 0usize;
        let mut pending_bridges: Vec<(usize, usize)> = Vec::new(); // (column, bridge id)
        let mut row = 0usize;
        while count < n {
            let mut ids = vec![usize::MAX; len]; // node id per column of this row
            let cols: Vec<usize> = if row.is_multiple_of(2) {
                (0..len).collect()
            } else {
                (0..len).rev().collect()
            };
            let mut last: Option<usize> = None;
            for c in cols {
                if count == n {
                    break;
                }
                let id = count;
                count += 1;
                ids[c] = id;
                if let Some(p) = last {
                    edges.push((p, id));
                }
                if let Some(&(_, b)) = pending_bridges.iter().find(|(bc, _)| *bc == c) {
                    edges.push((b, id));
                }
                last = Some(id);
            }
            pending_bridges.clear();
            let offset = if row.is_multiple_of(2) { 2 } else { 0 };
            let bridge_cols: Vec<usize> = if row.is_multiple_of(2) {
                (offset..len).step_by(4).rev().collect()
            } else {
                (offset..len).step_by(4).collect()
            };
            for c in bridge_cols {
                if count == n {
                    break;
                }
                if ids[c] == usize::MAX {
                    continue;
                }
                let id = count;
                count += 1;
                edges.push((ids[c], id));
                pending_bridges.push((c, id));
            }
            row += 1;
        }
        Self::new(n, edges, Topology::HeavyHex).expect("valid edges")
    }

    pub fn n_physical(&self) -> usize {
        self.n_physical
    }

    pub fn edges(&self) -> &BTreeSet<(usize, usize)> {
        &self.edges
    }

    pub fn kind(&self) -> Topology {
        self.kind
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edges.contains(&(a.min(b), a.max(b)))
    }

    pub fn neighbours(&self, q: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .edges
            .iter()
            .filter_map(|&(a, b)| {
                if a == q {
                    Some(b)
                } else if b == q {
                    Some(a)
                } else {
                    None
                }
            })
            .collect();
        out.sort_unstable();
        out
    }

    pub fn degree(&self, q: usize) -> usize {
        self.neighbours(q).len()
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n_physical)
            .map(|q| self.degree(q))
            .max()
            .unwrap_or(0)
    }

    /// All-pairs hop counts; `usize::MAX` marks unreachable pairs.
    pub fn distances(&self) -> Vec<Vec<usize>> {
        let adj: Vec<Vec<usize>> = (0..self.n_physical).map(|q| self.neighbours(q)).collect();
        (0..self.n_physical)
            .map(|s| {
                let mut d = vec![usize::MAX; self.n_physical];
                d[s] = 0;
                let mut queue = VecDeque::from([s]);
                while let Some(u) = queue.pop_front() {
                    for &v in &adj[u] {
                        if d[v] == usize::MAX {
                            d[v] = d[u] + 1;
                            queue.push_back(v);
                        }
                    }
                }
                d
            })
            .collect()
    }

    pub fn is_connected(&self) -> bool {
        self.n_physical <= 1 || self.distances()[0].iter().all(|&d| d != usize::MAX)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generators_are_connected_with_bounded_degree() {
        for n in 1..=80 {
            let a = CouplingGraph::all_to_all(n);
            assert!(a.is_connected());
            assert_eq!(a.edges().len(), n * n.saturating_sub(1) / 2);

            let g = CouplingGraph::square_grid(n);
            assert!(g.is_connected(), "grid n={n}");
            assert!(g.max_degree() <= 4);

            let h = CouplingGraph::heavy_hex(n);
            assert!(h.is_connected(), "heavy-hex n={n}");
            assert!(h.max_degree() <= 3, "heavy-hex n={n}");
            assert_eq!(h.n_physical(), n);
        }
    }

    #[test]
    fn grid_shape() {
        let g = CouplingGraph::square_grid(4);
        // 2x2 snake: 0-1 / 3-2
        assert!(g.has_edge(0, 1) && g.has_edge(1, 2) && g.has_edge(2, 3) && g.has_edge(0, 3));
        assert!(!g.has_edge(0, 2));
        assert_eq!(g.distances()[0][2], 2);
        assert_eq!(CouplingGraph::square_grid(16).max_degree(), 4);
    }

    #[test]
    fn heavy_hex_has_degree_three_nodes_and_cycles() {
        let h = CouplingGraph::heavy_hex(40);
        assert_eq!(h.max_degree(), 3);
        let degree_two = (0..40).filter(|&q| h.degree(q) == 2).count();
        assert!(degree_two > 20);
        // a tree on 40 nodes has 39 edges; heavy-hex has cycles
        assert!(h.edges().len() > 39);
    }

    #[test]
    fn topology_names_round_trip() {
        for t in Topology::ALL {
            assert_eq!(t.name().parse::<Topology>().unwrap(), t);
        }
        assert!("ring".parse::<Topology>().is_err());
    }

    #[test]
    fn rejects_bad_edges() {
        assert!(CouplingGraph::new(2, [(0, 0)], Topology::AllToAll).is_err());
        assert!(CouplingGraph::new(2, [(0, 2)], Topology::AllToAll).is_err());
        let disconnected = CouplingGraph::new(4, [(0, 1), (2, 3)], Topology::SquareGrid).unwrap();
        assert!(!disconnected.is_connected());
    }
}
