//! Finite graphs standing in for balls of infinite transitive graphs.
//!
//! A [`Graph`] is immutable once built. It carries a basepoint `o` and a
//! boundary frontier; anything touching the frontier is treated as
//! "reaching infinity" by the rest of the crate.

mod dsl;
mod expansion;
mod generators;
mod io;
mod radial;

pub use dsl::{FamilySpec, GraphSpec};
pub use expansion::{
    alpha_k, anchored_expansion_bruteforce, anchored_expansion_with_cap, edge_boundary, for_each_connected_set,
    growth_profile, iso_edge_bruteforce, iso_edge_with_cap, ExpansionProfile, GrowthProfile, IsoResult,
    DEFAULT_EXHAUSTIVE_CAP,
};
pub use generators::{
    gen_grid_ball, gen_gw_tree, gen_horocyclic_tree, gen_stretched, gen_torus, gen_tree_ball, gen_tree_cross_z_ball,
    GwTree, HorocyclicTree, LengthLaw, OffspringLaw, DEFAULT_VERTEX_CAP,
};
pub use io::{parse_edge_list, write_edge_list};
pub use radial::SphereProfile;

use crate::error::{Error, Result};
use std::collections::VecDeque;

/// Distance marker for vertices not reachable from the basepoint.
pub const UNREACHABLE: u32 = u32::MAX;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adjacency: Vec<Vec<usize>>,
    /// Edge ids parallel to `adjacency`.
    incident: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
    basepoint: usize,
    boundary: Vec<bool>,
    boundary_list: Vec<usize>,
    degree_bound: usize,
    family: String,
    transitive: bool,
    base_distance: Vec<u32>,
}

impl Graph {
    /// Builds a simple undirected graph. Edges keep the given order as their
    /// ids; self-loops and repeated edges are rejected.
    pub fn from_edges(
        vertex_count: usize,
        edges: Vec<(usize, usize)>,
        basepoint: usize,
        boundary: &[usize],
        family: impl Into<String>,
    ) -> Result<Graph> {
        if vertex_count == 0 {
            return Err(Error::InvalidGraph("graph has no vertices".into()));
        }
        if basepoint >= vertex_count {
            return Err(Error::InvalidGraph(format!("basepoint {basepoint} out of range")));
        }
        let mut pairs: Vec<(usize, usize, usize)> = Vec::with_capacity(2 * edges.len());
        let mut normalized = Vec::with_capacity(edges.len());
        for (id, &(u, v)) in edges.iter().enumerate() {
            if u >= vertex_count || v >= vertex_count {
                return Err(Error::InvalidGraph(format!("edge ({u}, {v}) out of range")));
            }
            if u == v {
                return Err(Error::InvalidGraph(format!("self-loop at {u}")));
            }
            pairs.push((u, v, id));
            pairs.push((v, u, id));
            normalized.push((u.min(v), u.max(v)));
        }
        pairs.sort_unstable();
        let mut adjacency = vec![Vec::new(); vertex_count];
        let mut incident = vec![Vec::new(); vertex_count];
        for w in pairs.windows(2) {
            if w[0].0 == w[1].0 && w[0].1 == w[1].1 {
                return Err(Error::InvalidGraph(format!("repeated edge ({}, {})", w[0].0, w[0].1)));
            }
        }
        for (u, v, id) in pairs {
            adjacency[u].push(v);
            incident[u].push(id);
        }
        let mut mask = vec![false; vertex_count];
        for &b in boundary {
            if b >= vertex_count {
                return Err(Error::InvalidGraph(format!("boundary vertex {b} out of range")));
            }
            mask[b] = true;
        }
        let boundary_list: Vec<usize> = (0..vertex_count).filter(|&v| mask[v]).collect();
        let degree_bound = adjacency.iter().map(Vec::len).max().unwrap_or(0);
        let base_distance = bfs_distances(&adjacency, basepoint);
        Ok(Graph {
            adjacency,
            incident,
            edges: normalized,
            basepoint,
            boundary: mask,
            boundary_list,
            degree_bound,
            family: family.into(),
            transitive: false,
            base_distance,
        })
    }

    pub(crate) fn with_degree_bound(mut self, bound: usize) -> Graph {
        debug_assert!(self.adjacency.iter().all(|a| a.len() <= bound));
        self.degree_bound = bound;
        self
    }

    pub(crate) fn mark_transitive(mut self) -> Graph {
        self.transitive = true;
        self
    }

    pub fn vertex_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    /// Edge ids incident to `v`, aligned with [`Graph::neighbors`].
    pub fn incident_edges(&self, v: usize) -> &[usize] {
        &self.incident[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> (usize, usize) {
        self.edges[e]
    }

    /// Id of the edge joining `u` and `v`, if any.
    pub fn edge_between(&self, u: usize, v: usize) -> Option<usize> {
        self.adjacency[u].binary_search(&v).ok().map(|i| self.incident[u][i])
    }

    pub fn basepoint(&self) -> usize {
        self.basepoint
    }

    pub fn is_boundary(&self, v: usize) -> bool {
        self.boundary[v]
    }

    pub fn boundary(&self) -> &[usize] {
        &self.boundary_list
    }

    pub fn degree_bound(&self) -> usize {
        self.degree_bound
    }

    pub fn family(&self) -> &str {
        &self.family
    }

    /// Set for generators whose output is vertex-transitive (tori).
    pub fn is_transitive(&self) -> bool {
        self.transitive
    }

    pub fn is_regular(&self) -> bool {
        let d = self.degree(0);
        self.adjacency.iter().all(|a| a.len() == d)
    }

    /// Graph distance from the basepoint, [`UNREACHABLE`] if disconnected.
    pub fn distance_from_base(&self, v: usize) -> u32 {
        self.base_distance[v]
    }

    pub fn base_distances(&self) -> &[u32] {
        &self.base_distance
    }

    /// Distance from the basepoint to the nearest boundary vertex; `None`
    /// for boundary-free graphs. Walks of fewer steps never feel the
    /// truncation.
    pub fn radius(&self) -> Option<usize> {
        self.boundary_list
            .iter()
            .map(|&b| self.base_distance[b])
            .filter(|&d| d != UNREACHABLE)
            .min()
            .map(|d| d as usize)
    }

    pub fn distances_from(&self, v: usize) -> Vec<u32> {
        bfs_distances(&self.adjacency, v)
    }

    pub fn is_connected(&self) -> bool {
        self.base_distance.iter().all(|&d| d != UNREACHABLE)
    }

    /// Checks the structural invariants: symmetric adjacency, sorted
    /// neighbor lists, degree bound, and a bijection between the edge list
    /// and adjacency entries.
    pub fn validate(&self) -> Result<()> {
        let mut seen = vec![0u8; self.edges.len()];
        for (u, nbrs) in self.adjacency.iter().enumerate() {
            if nbrs.len() > self.degree_bound {
                return Err(Error::InvalidGraph(format!("degree bound exceeded at {u}")));
            }
            if nbrs.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidGraph(format!("unsorted neighbors at {u}")));
            }
            for (i, &v) in nbrs.iter().enumerate() {
                if self.adjacency[v].binary_search(&u).is_err() {
                    return Err(Error::InvalidGraph(format!("asymmetric pair ({u}, {v})")));
                }
                let e = self.incident[u][i];
                if self.edges[e] != (u.min(v), u.max(v)) {
                    return Err(Error::InvalidGraph(format!("edge id mismatch at ({u}, {v})")));
                }
                seen[e] += 1;
            }
        }
        if seen.iter().any(|&c| c != 2) {
            return Err(Error::InvalidGraph("edge list and adjacency disagree".into()));
        }
        Ok(())
    }
}

pub(crate) fn bfs_distances(adjacency: &[Vec<usize>], source: usize) -> Vec<u32> {
    let mut dist = vec![UNREACHABLE; adjacency.len()];
    let mut queue = VecDeque::new();
    dist[source] = 0;
    queue.push_back(source);
    while let Some(u) = queue.pop_front() {
        for &v in &adjacency[u] {
            if dist[v] == UNREACHABLE {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
    }
    dist
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_loops_and_repeats() {
        assert!(Graph::from_edges(2, vec![(0, 0)], 0, &[], "x").is_err());
        assert!(Graph::from_edges(2, vec![(0, 1), (1, 0)], 0, &[], "x").is_err());
        assert!(Graph::from_edges(2, vec![(0, 2)], 0, &[], "x").is_err());
    }

    #[test]
    fn edge_lookup_and_radius() {
        let g = Graph::from_edges(4, vec![(0, 1), (1, 2), (2, 3)], 0, &[3], "path").unwrap();
        g.validate().unwrap();
        assert_eq!(g.edge_between(2, 1), Some(1));
        assert_eq!(g.edge_between(0, 3), None);
        assert_eq!(g.radius(), Some(3));
        assert_eq!(g.distances_from(3), vec![3, 2, 1, 0]);
    }
}
