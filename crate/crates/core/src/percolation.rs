//! Bernoulli bond/site percolation, cluster decomposition, and the
//! level-coupled horocyclic percolation on the 3-regular tree.

use crate::error::{invalid, Error, Result};
use crate::graph::{Graph, HorocyclicTree};
use crate::rng::{self, streams};
use crate::stats::Estimate;
use std::collections::VecDeque;
use std::fmt::Write;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Bond,
    Site,
    /// Vertex and edge masks both meaningful (results of trimming).
    Mixed,
}

/// Provenance of a sampled configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeedRecord {
    pub seed: u64,
    pub stream: u64,
    pub p: f64,
}

/// A percolation configuration on a host graph, stored as the associated
/// mixed configuration: a vertex mask plus an edge mask, where every
/// present edge has both endpoints present.
#[derive(Debug, Clone, PartialEq)]
pub struct Config<'g> {
    host: &'g Graph,
    mode: Mode,
    vertices: Vec<bool>,
    edges: Vec<bool>,
    pub seed_record: Option<SeedRecord>,
}

impl<'g> Config<'g> {
    /// Every vertex and edge present.
    pub fn full(host: &'g Graph) -> Config<'g> {
        Config {
            host,
            mode: Mode::Bond,
            vertices: vec![true; host.vertex_count()],
            edges: vec![true; host.edge_count()],
            seed_record: None,
        }
    }

    /// Bond configuration from an edge mask; all vertices present.
    pub fn from_bond_mask(host: &'g Graph, mask: Vec<bool>) -> Result<Config<'g>> {
        if mask.len() != host.edge_count() {
            return invalid(format!(
                "bond mask has {} entries for {} edges",
                mask.len(),
                host.edge_count()
            ));
        }
        Ok(Config {
            host,
            mode: Mode::Bond,
            vertices: vec![true; host.vertex_count()],
            edges: mask,
            seed_record: None,
        })
    }

    /// Site configuration; the edge set is induced by the occupied vertices.
    pub fn from_site_mask(host: &'g Graph, mask: Vec<bool>) -> Result<Config<'g>> {
        if mask.len() != host.vertex_count() {
            return invalid(format!(
                "site mask has {} entries for {} vertices",
                mask.len(),
                host.vertex_count()
            ));
        }
        let edges = host.edges().iter().map(|&(u, v)| mask[u] && mask[v]).collect();
        Ok(Config {
            host,
            mode: Mode::Site,
            vertices: mask,
            edges,
            seed_record: None,
        })
    }

    /// Mixed configuration; edges whose endpoints are absent are dropped.
    pub fn from_masks(host: &'g Graph, vertices: Vec<bool>, edges: Vec<bool>) -> Result<Config<'g>> {
        if vertices.len() != host.vertex_count() || edges.len() != host.edge_count() {
            return invalid("mask lengths do not match the host");
        }
        let edges = edges
            .into_iter()
            .enumerate()
            .map(|(e, on)| {
                let (u, v) = host.edge(e);
                on && vertices[u] && vertices[v]
            })
            .collect();
        Ok(Config {
            host,
            mode: Mode::Mixed,
            vertices,
            edges,
            seed_record: None,
        })
    }

    pub fn host(&self) -> &'g Graph {
        self.host
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn has_vertex(&self, v: usize) -> bool {
        self.vertices[v]
    }

    pub fn has_edge(&self, e: usize) -> bool {
        self.edges[e]
    }

    pub fn vertex_mask(&self) -> &[bool] {
        &self.vertices
    }

    pub fn edge_mask(&self) -> &[bool] {
        &self.edges
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.iter().filter(|&&b| b).count()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.iter().filter(|&&b| b).count()
    }

    /// Degree of `v` in the configuration (0 if `v` is absent).
    pub fn degree(&self, v: usize) -> usize {
        self.host.incident_edges(v).iter().filter(|&&e| self.edges[e]).count()
    }

    /// Open neighbours of `v`.
    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.host
            .neighbors(v)
            .iter()
            .zip(self.host.incident_edges(v))
            .filter(move |(_, &e)| self.edges[e])
            .map(|(&w, _)| w)
    }

    /// Removes the given vertices and their incident edges.
    pub fn remove_vertices(&mut self, set: &[usize]) {
        for &v in set {
            self.vertices[v] = false;
            for &e in self.host.incident_edges(v) {
                self.edges[e] = false;
            }
        }
        self.mode = Mode::Mixed;
    }

    /// The open edges as a graph on the host's vertex ids, keeping the
    /// basepoint and boundary. Absent vertices become isolated.
    pub fn subgraph(&self) -> Graph {
        let g = self.host;
        let edges = g
            .edges()
            .iter()
            .enumerate()
            .filter(|&(e, _)| self.edges[e])
            .map(|(_, &uv)| uv)
            .collect();
        Graph::from_edges(
            g.vertex_count(),
            edges,
            g.basepoint(),
            g.boundary(),
            format!("{}/open", g.family()),
        )
        .expect("subgraph of a valid graph")
    }

    /// True when the open edges form a forest.
    pub fn is_forest(&self) -> bool {
        let mut dsu = Dsu::new(self.host.vertex_count());
        self.host
            .edges()
            .iter()
            .enumerate()
            .filter(|&(e, _)| self.edges[e])
            .all(|(_, &(u, v))| dsu.union(u, v))
    }

    /// `mode bond|site|mixed` followed by hex masks, least significant bit
    /// first within each nibble.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        match self.mode {
            Mode::Bond => {
                writeln!(out, "mode bond").unwrap();
                writeln!(out, "{}", hex_mask(&self.edges)).unwrap();
            }
            Mode::Site => {
                writeln!(out, "mode site").unwrap();
                writeln!(out, "{}", hex_mask(&self.vertices)).unwrap();
            }
            Mode::Mixed => {
                writeln!(out, "mode mixed").unwrap();
                writeln!(out, "{}", hex_mask(&self.vertices)).unwrap();
                writeln!(out, "{}", hex_mask(&self.edges)).unwrap();
            }
        }
        out
    }

    pub fn from_text(host: &'g Graph, text: &str) -> Result<Config<'g>> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let mode = lines.next().unwrap_or("");
        let mut next_mask = |len: usize, line: usize| -> Result<Vec<bool>> {
            let hex = lines.next().ok_or(Error::Parse {
                line,
                column: 1,
                message: "missing mask".into(),
            })?;
            parse_hex_mask(hex, len, line)
        };
        match mode {
            "mode bond" => Config::from_bond_mask(host, next_mask(host.edge_count(), 2)?),
            "mode site" => Config::from_site_mask(host, next_mask(host.vertex_count(), 2)?),
            "mode mixed" => {
                let v = next_mask(host.vertex_count(), 2)?;
                let e = next_mask(host.edge_count(), 3)?;
                Config::from_masks(host, v, e)
            }
            other => Err(Error::Parse {
                line: 1,
                column: 1,
                message: format!("unknown mode line `{other}`"),
            }),
        }
    }
}

fn hex_mask(bits: &[bool]) -> String {
    bits.chunks(4)
        .map(|c| {
            let nib = c.iter().enumerate().fold(0u32, |acc, (i, &b)| acc | (b as u32) << i);
            char::from_digit(nib, 16).unwrap()
        })
        .collect()
}

fn parse_hex_mask(hex: &str, len: usize, line: usize) -> Result<Vec<bool>> {
    if hex.len() != len.div_ceil(4) {
        return Err(Error::Parse {
            line,
            column: 1,
            message: format!("mask has {} digits, expected {}", hex.len(), len.div_ceil(4)),
        });
    }
    let mut bits = Vec::with_capacity(len);
    for (i, c) in hex.chars().enumerate() {
        let nib = c.to_digit(16).ok_or(Error::Parse {
            line,
            column: i + 1,
            message: format!("invalid hex digit `{c}`"),
        })?;
        for b in 0..4 {
            if bits.len() < len {
                bits.push(nib >> b & 1 == 1);
            }
        }
    }
    Ok(bits)
}

/// Union–find with path halving and union by size.
#[derive(Debug, Clone)]
pub(crate) struct Dsu {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl Dsu {
    pub(crate) fn new(n: usize) -> Dsu {
        Dsu {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false when `a` and `b` were already joined.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
        true
    }
}

fn check_p(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        invalid(format!("probability {p} outside [0, 1]"))
    }
}

/// p-Bernoulli bond percolation. Edge `e` is open iff its counter-based
/// uniform for `(seed, stream, e)` is below `p`, so samples sharing a
/// stream are monotone in `p`.
pub fn sample_bond_stream<'g>(g: &'g Graph, p: f64, seed: u64, stream: u64) -> Result<Config<'g>> {
    check_p(p)?;
    let mask = (0..g.edge_count())
        .map(|e| rng::coin(seed, stream, e as u64, p))
        .collect();
    let mut c = Config::from_bond_mask(g, mask)?;
    c.seed_record = Some(SeedRecord { seed, stream, p });
    Ok(c)
}

pub fn sample_bond(g: &Graph, p: f64, seed: u64) -> Result<Config<'_>> {
    sample_bond_stream(g, p, seed, streams::BOND)
}

/// p-Bernoulli site percolation, coupled across `p` like [`sample_bond`].
pub fn sample_site_stream<'g>(g: &'g Graph, p: f64, seed: u64, stream: u64) -> Result<Config<'g>> {
    check_p(p)?;
    let mask = (0..g.vertex_count())
        .map(|v| rng::coin(seed, stream, v as u64, p))
        .collect();
    let mut c = Config::from_site_mask(g, mask)?;
    c.seed_record = Some(SeedRecord { seed, stream, p });
    Ok(c)
}

pub fn sample_site(g: &Graph, p: f64, seed: u64) -> Result<Config<'_>> {
    sample_site_stream(g, p, seed, streams::SITE)
}

/// Connected components of a configuration's present vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterDecomposition {
    /// Cluster id per vertex, `None` for absent vertices. Ids are assigned
    /// in order of each cluster's smallest vertex.
    pub label: Vec<Option<u32>>,
    pub sizes: Vec<usize>,
    pub touches_boundary: Vec<bool>,
    /// Host edges with exactly one endpoint in the cluster.
    pub cluster_edge_boundary: Vec<usize>,
}

impl ClusterDecomposition {
    pub fn cluster_count(&self) -> usize {
        self.sizes.len()
    }

    pub fn max_size(&self) -> usize {
        self.sizes.iter().copied().max().unwrap_or(0)
    }

    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.sizes.len()];
        for (v, l) in self.label.iter().enumerate() {
            if let Some(l) = l {
                out[*l as usize].push(v);
            }
        }
        out
    }
}

pub fn clusters(c: &Config) -> ClusterDecomposition {
    let g = c.host();
    let n = g.vertex_count();
    let mut dsu = Dsu::new(n);
    for (e, &(u, v)) in g.edges().iter().enumerate() {
        if c.has_edge(e) {
            dsu.union(u, v);
        }
    }
    let mut label = vec![None; n];
    let mut root_label = vec![u32::MAX; n];
    let mut sizes = Vec::new();
    let mut touches_boundary = Vec::new();
    for v in 0..n {
        if !c.has_vertex(v) {
            continue;
        }
        let r = dsu.find(v);
        if root_label[r] == u32::MAX {
            root_label[r] = sizes.len() as u32;
            sizes.push(0);
            touches_boundary.push(false);
        }
        let l = root_label[r];
        label[v] = Some(l);
        sizes[l as usize] += 1;
        touches_boundary[l as usize] |= g.is_boundary(v);
    }
    let mut cluster_edge_boundary = vec![0; sizes.len()];
    for &(u, v) in g.edges() {
        match (label[u], label[v]) {
            (Some(a), Some(b)) if a == b => {}
            (a, b) => {
                if let Some(a) = a {
                    cluster_edge_boundary[a as usize] += 1;
                }
                if let Some(b) = b {
                    cluster_edge_boundary[b as usize] += 1;
                }
            }
        }
    }
    ClusterDecomposition {
        label,
        sizes,
        touches_boundary,
        cluster_edge_boundary,
    }
}

/// Vertices of the open cluster of `v`, in BFS order.
pub fn cluster_of(c: &Config, v: usize) -> Vec<usize> {
    if !c.has_vertex(v) {
        return Vec::new();
    }
    let mut seen = vec![false; c.host().vertex_count()];
    let mut out = vec![v];
    let mut queue = VecDeque::from([v]);
    seen[v] = true;
    while let Some(u) = queue.pop_front() {
        for w in c.neighbors(u) {
            if !seen[w] {
                seen[w] = true;
                out.push(w);
                queue.push_back(w);
            }
        }
    }
    out
}

/// Whether the open cluster of the basepoint reaches the boundary.
pub fn basepoint_reaches_boundary(c: &Config) -> bool {
    let g = c.host();
    cluster_of(c, g.basepoint()).into_iter().any(|v| g.is_boundary(v))
}

/// Fraction of `trials` bond samples in which the basepoint cluster touches
/// the boundary. Trial `i` uses stream `BOND + i`.
pub fn boundary_reach_probability(g: &Graph, p: f64, trials: usize, seed: u64) -> Result<Estimate> {
    check_p(p)?;
    if g.boundary().is_empty() {
        return Err(Error::Precondition("graph has no boundary".into()));
    }
    if trials == 0 {
        return invalid("need at least one trial");
    }
    let hits = rng::par_map(trials, |i| {
        let c = sample_bond_stream(g, p, seed, streams::BOND + 1 + i as u64).unwrap();
        basepoint_reaches_boundary(&c)
    });
    Ok(Estimate::proportion(hits.into_iter().filter(|&h| h).count(), trials))
}

/// One trial record for CSV output.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub trial: usize,
    pub seed: u64,
    pub p: f64,
    pub cluster_count: usize,
    pub max_cluster: usize,
    pub reach_boundary: bool,
}

pub fn bond_trials(g: &Graph, p: f64, trials: usize, seed: u64) -> Result<Vec<TrialRecord>> {
    check_p(p)?;
    Ok(rng::par_map(trials, |i| {
        let c = sample_bond_stream(g, p, seed, streams::BOND + 1 + i as u64).unwrap();
        let d = clusters(&c);
        TrialRecord {
            trial: i,
            seed,
            p,
            cluster_count: d.cluster_count(),
            max_cluster: d.max_size(),
            reach_boundary: basepoint_reaches_boundary(&c),
        }
    }))
}

/// The horocyclic percolation ω = η ∪ η′ on a horocyclic window.
#[derive(Debug, Clone)]
pub struct HorocyclicSample<'g> {
    pub omega: Config<'g>,
    pub eta: Vec<bool>,
    pub eta_prime: Vec<bool>,
    /// Whether all edges from level `n` to `n + 1` are in η, indexed by
    /// `n + depth`.
    pub level_open: Vec<bool>,
    /// Number of η-components not touching the window boundary.
    pub interior_components: usize,
}

/// Samples η by one coin per pair of consecutive horocycles, then for every
/// η-component that avoids the window boundary adds one uniformly chosen
/// edge from its deepest horocycle to the next one.
pub fn horocyclic_percolation(h: &HorocyclicTree, p0: f64, seed: u64) -> Result<HorocyclicSample<'_>> {
    if !(p0 > 0.0 && p0 < 1.0) {
        return invalid(format!("p0 = {p0} must lie in (0, 1)"));
    }
    let g = &h.graph;
    let depth = h.depth as i64;
    let level_open: Vec<bool> = (-depth..depth)
        .map(|n| rng::coin(seed, streams::HOROCYCLE, (n + depth) as u64, p0))
        .collect();
    let eta: Vec<bool> = g
        .edges()
        .iter()
        .map(|&(u, v)| {
            let n = h.level[u].min(h.level[v]);
            level_open[(n + depth) as usize]
        })
        .collect();
    let eta_cfg = Config::from_bond_mask(g, eta.clone())?;
    let decomposition = clusters(&eta_cfg);
    let mut eta_prime = vec![false; g.edge_count()];
    let mut interior_components = 0;
    let mut pick_rng = rng::stream_rng(seed, streams::HOROCYCLE, 1);
    for (k, members) in decomposition.members().into_iter().enumerate() {
        if decomposition.touches_boundary[k] {
            continue;
        }
        interior_components += 1;
        let deepest = members.iter().map(|&v| h.level[v]).max().unwrap();
        let candidates: Vec<usize> = members
            .iter()
            .filter(|&&v| h.level[v] == deepest)
            .flat_map(|&v| h.children(v).map(move |c| g.edge_between(v, c).unwrap()))
            .collect();
        use rand::Rng;
        let e = candidates[pick_rng.gen_range(0..candidates.len())];
        eta_prime[e] = true;
    }
    let omega_mask = eta.iter().zip(&eta_prime).map(|(&a, &b)| a || b).collect();
    Ok(HorocyclicSample {
        omega: Config::from_bond_mask(g, omega_mask)?,
        eta,
        eta_prime,
        level_open,
        interior_components,
    })
}

/// Exact per-component audit of a horocyclic sample.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HorocyclicAudit {
    pub interior_components: usize,
    pub eta_prime_edges: usize,
    /// η-components avoiding the boundary carry exactly one η′ edge, the
    /// others none.
    pub one_edge_per_component: bool,
    /// Every ω-component avoiding the boundary has |E| = |V| − 1.
    pub interior_omega_acyclic: bool,
}

impl HorocyclicAudit {
    pub fn ok(&self) -> bool {
        self.one_edge_per_component && self.interior_omega_acyclic && self.eta_prime_edges == self.interior_components
    }
}

pub fn horocyclic_audit(h: &HorocyclicTree, s: &HorocyclicSample) -> Result<HorocyclicAudit> {
    let g = &h.graph;
    let eta = clusters(&Config::from_bond_mask(g, s.eta.clone())?);
    let mut carried = vec![0usize; eta.cluster_count()];
    for (e, _) in s.eta_prime.iter().enumerate().filter(|(_, &on)| on) {
        let (u, v) = g.edge(e);
        let upper = if h.level[u] < h.level[v] { u } else { v };
        carried[eta.label[upper].expect("full vertex set") as usize] += 1;
    }
    let one_edge_per_component = carried
        .iter()
        .zip(&eta.touches_boundary)
        .all(|(&c, &touch)| c == usize::from(!touch));
    let omega = clusters(&s.omega);
    let mut edge_counts = vec![0usize; omega.cluster_count()];
    for (e, &(u, _)) in g.edges().iter().enumerate() {
        if s.omega.has_edge(e) {
            edge_counts[omega.label[u].unwrap() as usize] += 1;
        }
    }
    let interior_omega_acyclic = (0..omega.cluster_count())
        .filter(|&k| !omega.touches_boundary[k])
        .all(|k| edge_counts[k] + 1 == omega.sizes[k]);
    Ok(HorocyclicAudit {
        interior_components: eta.touches_boundary.iter().filter(|&&t| !t).count(),
        eta_prime_edges: s.eta_prime.iter().filter(|&&b| b).count(),
        one_edge_per_component,
        interior_omega_acyclic,
    })
}
