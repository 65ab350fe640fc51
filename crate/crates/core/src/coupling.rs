//! Undirected device coupling graphs.

use std::collections::{BTreeSet, VecDeque};
use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CouplingError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("edge {u}-{v} outside a {n}-qubit device")]
    OutOfRange { u: usize, v: usize, n: usize },
    #[error("self-loop on qubit {0}")]
    SelfLoop(usize),
    #[error("coupling graph is disconnected: qubit {0} unreachable from 0")]
    Disconnected(usize),
    #[error("reading coupling map: {0}")]
    Io(#[from] std::io::Error),
}

/// Connected undirected graph over physical qubits `0..n`, with all-pairs
/// hop distances.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CouplingMap {
    n: usize,
    edges: BTreeSet<(usize, usize)>,
    adj: Vec<Vec<usize>>,
    dist: Vec<Vec<usize>>,
}

impl CouplingMap {
    /// Builds the map; duplicate edges (in either orientation) collapse.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self, CouplingError> {
        let mut set = BTreeSet::new();
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(CouplingError::OutOfRange { u, v, n });
            }
            if u == v {
                return Err(CouplingError::SelfLoop(u));
            }
            set.insert((u.min(v), u.max(v)));
        }
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in &set {
            adj[u].push(v);
            adj[v].push(u);
        }
        for a in &mut adj {
            a.sort_unstable();
        }
        let dist = distance_matrix(&adj)?;
        Ok(CouplingMap {
            n,
            edges: set,
            adj,
            dist,
        })
    }

    /// Line `0 - 1 - ... - (n-1)`.
    pub fn line(n: usize) -> Self {
        Self::new(n, (1..n).map(|i| (i - 1, i))).expect("a line is connected")
    }

    /// `rows x cols` grid, qubit `r * cols + c`.
    pub fn grid(rows: usize, cols: usize) -> Self {
        let mut e = Vec::new();
        for r in 0..rows {
            for c in 0..cols {
                let q = r * cols + c;
                if c + 1 < cols {
                    e.push((q, q + 1));
                }
                if r + 1 < rows {
                    e.push((q, q + cols));
                }
            }
        }
        Self::new(rows * cols, e).expect("a grid is connected")
    }

    /// Parses the text format: the qubit count on the first line, then one
    /// `u v` edge per line. Blank lines and `#` comments are ignored.
    pub fn parse(text: &str) -> Result<Self, CouplingError> {
        let mut n = None;
        let mut edges = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let nums: Result<Vec<usize>, _> = line.split_whitespace().map(str::parse).collect();
            let nums = nums.map_err(|e| CouplingError::Parse {
                line: i + 1,
                msg: e.to_string(),
            })?;
            match (n, nums.as_slice()) {
                (None, [count]) => n = Some(*count),
                (Some(_), [u, v]) => edges.push((*u, *v)),
                (None, _) => {
                    return Err(CouplingError::Parse {
                        line: i + 1,
                        msg: "expected the qubit count".into(),
                    })
                }
                (Some(_), _) => {
                    return Err(CouplingError::Parse {
                        line: i + 1,
                        msg: "expected two qubit indices".into(),
                    })
                }
            }
        }
        let n = n.ok_or(CouplingError::Parse {
            line: 0,
            msg: "empty coupling map".into(),
        })?;
        Self::new(n, edges)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self, CouplingError> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Edges as `(min, max)` pairs, ascending.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    /// Sorted neighbours of `q`.
    pub fn neighbors(&self, q: usize) -> &[usize] {
        &self.adj[q]
    }

    pub fn is_edge(&self, u: usize, v: usize) -> bool {
        self.edges.contains(&(u.min(v), u.max(v)))
    }

    pub fn dist(&self, u: usize, v: usize) -> usize {
        self.dist[u][v]
    }

    pub fn distances(&self) -> &[Vec<usize>] {
        &self.dist
    }

    /// One shortest path from `u` to `v`, both ends included. Ties go to
    /// the smallest neighbour.
    pub fn shortest_path(&self, u: usize, v: usize) -> Vec<usize> {
        let mut path = vec![u];
        let mut x = u;
        while x != v {
            x = *self.adj[x]
                .iter()
                .find(|&&y| self.dist[y][v] + 1 == self.dist[x][v])
                .expect("connected graph");
            path.push(x);
        }
        path
    }
}

/// BFS hop counts from every node.
fn distance_matrix(adj: &[Vec<usize>]) -> Result<Vec<Vec<usize>>, CouplingError> {
    let n = adj.len();
    let mut dist = vec![vec![usize::MAX; n]; n];
    for s in 0..n {
        let row = &mut dist[s];
        row[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(x) = queue.pop_front() {
            for &y in &adj[x] {
                if row[y] == usize::MAX {
                    row[y] = row[x] + 1;
                    queue.push_back(y);
                }
            }
        }
        if let Some(q) = row.iter().position(|&d| d == usize::MAX) {
            return Err(CouplingError::Disconnected(q));
        }
    }
    Ok(dist)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_distances() {
        let g = CouplingMap::line(3);
        assert_eq!(g.dist(0, 2), 2);
        assert_eq!(g.dist(2, 0), 2);
    }

    #[test]
    fn grid_diagonal_is_two_hops() {
        let g = CouplingMap::grid(2, 2);
        assert_eq!(g.dist(1, 2), 2);
        for (u, v) in g.edges() {
            assert_eq!(g.dist(u, v), 1);
        }
    }

    #[test]
    fn parse_ignores_duplicates_and_comments() {
        let g = CouplingMap::parse("# tiny\n3\n0 1\n1 0\n\n1 2 # tail\n").unwrap();
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 1), (1, 2)]);
        assert!(g.is_edge(2, 1));
        assert!(!g.is_edge(0, 2));
    }

    #[test]
    fn disconnected_graph_is_rejected() {
        assert!(matches!(
            CouplingMap::new(3, [(0, 1)]),
            Err(CouplingError::Disconnected(2))
        ));
    }

    #[test]
    fn parse_errors() {
        assert!(CouplingMap::parse("").is_err());
        assert!(CouplingMap::parse("2\n0 x\n").is_err());
        assert!(CouplingMap::parse("2\n0 1 1\n").is_err());
        assert!(matches!(
            CouplingMap::parse("2\n0 2\n"),
            Err(CouplingError::OutOfRange { .. })
        ));
        assert!(matches!(CouplingMap::parse("2\n1 1\n"), Err(CouplingError::SelfLoop(1))));
    }

    #[test]
    fn shortest_path_follows_distances() {
        let g = CouplingMap::grid(2, 3);
        assert_eq!(g.shortest_path(0, 5), vec![0, 1, 2, 5]);
        assert_eq!(g.shortest_path(4, 4), vec![4]);
    }
}
