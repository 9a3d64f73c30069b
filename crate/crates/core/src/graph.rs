//! Compressed sparse adjacency for simple undirected graphs.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

/// Sentinel distance for vertices not reached by a search.
pub const UNREACHED: u32 = u32::MAX;

/// An immutable simple undirected graph.
///
/// Neighbor lists are stored contiguously and sorted ascending; the
/// adjacency is symmetric with no self-loops and no repeated neighbors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    neighbors: Vec<u32>,
}

impl Graph {
    /// Builds a graph on `n` vertices from an undirected edge list.
    ///
    /// Each edge may be given in either orientation but only once.
    pub fn from_edges(n: usize, edges: &[(u32, u32)]) -> Result<Self> {
        let mut degree = vec![0usize; n];
        for &(u, v) in edges {
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            for w in [u, v] {
                if w as usize >= n {
                    return Err(Error::VertexOutOfRange { vertex: w as u64, n });
                }
            }
            degree[u as usize] += 1;
            degree[v as usize] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        let mut acc = 0;
        for d in &degree {
            acc += d;
            offsets.push(acc);
        }
        let mut fill = offsets.clone();
        let mut neighbors = vec![0u32; acc];
        for &(u, v) in edges {
            neighbors[fill[u as usize]] = v;
            fill[u as usize] += 1;
            neighbors[fill[v as usize]] = u;
            fill[v as usize] += 1;
        }
        for v in 0..n {
            let list = &mut neighbors[offsets[v]..offsets[v + 1]];
            list.sort_unstable();
            if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
                let (a, b) = (v as u32, w[0]);
                return Err(Error::DuplicateEdge(a.min(b), a.max(b)));
            }
        }
        Ok(Graph { offsets, neighbors })
    }

    /// Assembles a graph from prebuilt CSR arrays. Callers guarantee the
    /// simple-graph invariants; they are checked in debug builds.
    pub(crate) fn from_csr(offsets: Vec<usize>, neighbors: Vec<u32>) -> Self {
        let g = Graph { offsets, neighbors };
        debug_assert!(g.check_invariants().is_ok());
        g
    }

    /// Verifies sortedness, symmetry and the absence of loops or repeats.
    pub fn check_invariants(&self) -> Result<()> {
        for v in 0..self.vertex_count() {
            let list = self.neighbors(v);
            for (i, &u) in list.iter().enumerate() {
                if u as usize == v {
                    return Err(Error::SelfLoop(u));
                }
                if i > 0 && list[i - 1] >= u {
                    return Err(Error::DuplicateEdge(list[i - 1], u));
                }
                if !self.has_edge(u as usize, v) {
                    return Err(Error::Asymmetric(v as u32, u));
                }
            }
        }
        Ok(())
    }

    pub fn vertex_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.neighbors.len() / 2
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.neighbors[self.offsets[v]..self.offsets[v + 1]]
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.neighbors(u).binary_search(&(v as u32)).is_ok()
    }

    /// Edges as `(u, v)` with `u < v`, in ascending lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        (0..self.vertex_count())
            .flat_map(move |u| self.neighbors(u).iter().filter(move |&&v| v as usize > u).map(move |&v| (u as u32, v)))
    }

    pub fn max_degree(&self) -> usize {
        (0..self.vertex_count()).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    /// Breadth-first distances from `source`, written into `dist`
    /// (resized to `n`). Returns the eccentricity and the reached count.
    pub fn bfs_into(&self, source: usize, dist: &mut Vec<u32>, queue: &mut VecDeque<u32>) -> (u32, usize) {
        dist.clear();
        dist.resize(self.vertex_count(), UNREACHED);
        queue.clear();
        dist[source] = 0;
        queue.push_back(source as u32);
        let mut reached = 1;
        let mut ecc = 0;
        while let Some(v) = queue.pop_front() {
            let d = dist[v as usize];
            ecc = d;
            for &u in self.neighbors(v as usize) {
                if dist[u as usize] == UNREACHED {
                    dist[u as usize] = d + 1;
                    reached += 1;
                    queue.push_back(u);
                }
            }
        }
        (ecc, reached)
    }

    pub fn bfs(&self, source: usize) -> Vec<u32> {
        let mut dist = Vec::new();
        self.bfs_into(source, &mut dist, &mut VecDeque::new());
        dist
    }

    pub fn is_connected(&self) -> bool {
        let n = self.vertex_count();
        if n == 0 {
            return true;
        }
        let mut dist = Vec::new();
        self.bfs_into(0, &mut dist, &mut VecDeque::new()).1 == n
    }
}
