//! Uniform spanning trees of balls with free and wired boundary, exact
//! edge probabilities, and the forest-degree diagnostics.

use crate::error::{invalid, Error, Result};
use crate::graph::{FamilySpec, Graph};
use crate::percolation::{Config, Dsu};
use crate::rng::{self, streams};
use crate::stats::Estimate;
use crate::walks::{effective_resistance, exact_resistance, Network};
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundaryCondition {
    Free,
    Wired,
}

impl std::str::FromStr for BoundaryCondition {
    type Err = Error;
    fn from_str(s: &str) -> Result<BoundaryCondition> {
        match s {
            "free" => Ok(BoundaryCondition::Free),
            "wired" => Ok(BoundaryCondition::Wired),
            _ => invalid(format!("unknown boundary condition `{s}`")),
        }
    }
}

impl fmt::Display for BoundaryCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoundaryCondition::Free => "free",
            BoundaryCondition::Wired => "wired",
        })
    }
}

/// A spanning tree of the host (free) or of the host with its boundary
/// collapsed to one root (wired), as a set of host edge ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ForestSample {
    pub bc: BoundaryCondition,
    /// Sorted host edge ids.
    pub edges: Vec<usize>,
    /// Outgoing host edge of each vertex toward the root; `None` at the
    /// root and, for wired samples, at every boundary vertex.
    pub orientation: Option<Vec<Option<usize>>>,
    /// Free: the root vertex. Wired: the boundary vertex standing for the
    /// collapsed supervertex.
    pub root: usize,
}

impl ForestSample {
    pub fn contains(&self, e: usize) -> bool {
        self.edges.binary_search(&e).is_ok()
    }

    /// Number of forest edges at `v`, counted at their host endpoints.
    pub fn degree(&self, g: &Graph, v: usize) -> usize {
        g.incident_edges(v).iter().filter(|&&e| self.contains(e)).count()
    }

    /// Acyclic and spanning, with the boundary counted as one vertex for
    /// wired samples; orientation, if present, has out-degree one off the
    /// root.
    pub fn validate(&self, g: &Graph) -> Result<()> {
        let view = View::new(g, self.bc)?;
        let mut dsu = Dsu::new(g.vertex_count());
        for &e in &self.edges {
            let (u, v) = g.edge(e);
            if !dsu.union(view.node[u], view.node[v]) {
                return Err(Error::InvalidGraph(format!("forest edge {e} closes a cycle")));
            }
        }
        if self.edges.len() + 1 != view.nodes.len() {
            return Err(Error::InvalidGraph(format!(
                "{} edges cannot span {} vertices",
                self.edges.len(),
                view.nodes.len()
            )));
        }
        if let Some(orient) = &self.orientation {
            for &v in &view.nodes {
                match (v == view.root, orient[v]) {
                    (true, None) => {}
                    (false, Some(e)) if self.contains(e) && touches(g, e, v) => {}
                    _ => {
                        return Err(Error::InvalidGraph(format!("bad orientation at vertex {v}")));
                    }
                }
            }
        }
        Ok(())
    }
}

fn touches(g: &Graph, e: usize, v: usize) -> bool {
    let (a, b) = g.edge(e);
    a == v || b == v
}

/// The host as Wilson sees it: wired hosts map every boundary vertex to
/// `root`, dropping boundary–boundary edges and keeping parallels.
struct View {
    node: Vec<usize>,
    nodes: Vec<usize>,
    root: usize,
    adj: Vec<Vec<(usize, usize)>>,
}

impl View {
    fn new(g: &Graph, bc: BoundaryCondition) -> Result<View> {
        let n = g.vertex_count();
        let (node, root): (Vec<usize>, usize) = match bc {
            BoundaryCondition::Free => ((0..n).collect(), g.basepoint()),
            BoundaryCondition::Wired => {
                let rep = *g
                    .boundary()
                    .first()
                    .ok_or_else(|| Error::Precondition("wired boundary condition needs a boundary".into()))?;
                ((0..n).map(|v| if g.is_boundary(v) { rep } else { v }).collect(), rep)
            }
        };
        let nodes: Vec<usize> = (0..n).filter(|&v| node[v] == v).collect();
        let mut adj = vec![Vec::new(); n];
        for (e, &(u, v)) in g.edges().iter().enumerate() {
            let (a, b) = (node[u], node[v]);
            if a != b {
                adj[a].push((b, e));
                adj[b].push((a, e));
            }
        }
        Ok(View { node, nodes, root, adj })
    }

    fn check_connected(&self) -> Result<()> {
        let mut seen = vec![false; self.node.len()];
        let mut stack = vec![self.root];
        seen[self.root] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &(w, _) in &self.adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        if count == self.nodes.len() {
            Ok(())
        } else {
            Err(Error::Disconnected(format!(
                "{} of {} vertices unreachable from the root",
                self.nodes.len() - count,
                self.nodes.len()
            )))
        }
    }
}

/// Loop-erased walks from each start in `order` until the tree is hit.
/// Returns each processed vertex's outgoing edge.
fn wilson_pass(view: &View, root: usize, order: impl Iterator<Item = usize>, rng: &mut impl Rng) -> Vec<Option<usize>> {
    let n = view.node.len();
    let mut in_tree = vec![false; n];
    in_tree[root] = true;
    let mut next: Vec<(usize, usize)> = vec![(usize::MAX, usize::MAX); n];
    let mut out = vec![None; n];
    for start in order {
        let start = view.node[start];
        let mut cur = start;
        while !in_tree[cur] {
            let step = view.adj[cur][rng.gen_range(0..view.adj[cur].len())];
            next[cur] = step;
            cur = step.0;
        }
        let mut cur = start;
        while !in_tree[cur] {
            in_tree[cur] = true;
            out[cur] = Some(next[cur].1);
            cur = next[cur].0;
        }
    }
    out
}

fn sample_on(view: &View, bc: BoundaryCondition, root: usize, seed: u64, trial: u64) -> ForestSample {
    let mut rng = rng::stream_rng(seed, streams::FOREST, trial);
    let orient = wilson_pass(view, root, view.nodes.iter().copied(), &mut rng);
    let mut edges: Vec<usize> = orient.iter().flatten().copied().collect();
    edges.sort_unstable();
    ForestSample {
        bc,
        edges,
        orientation: Some(orient),
        root,
    }
}

/// Uniform spanning tree of a connected graph by Wilson's algorithm,
/// oriented toward `root`; walks start from vertices in index order.
pub fn wilson_ust(g: &Graph, root: usize, seed: u64, trial: u64) -> Result<ForestSample> {
    if root >= g.vertex_count() {
        return invalid(format!("root {root} out of range"));
    }
    let mut view = View::new(g, BoundaryCondition::Free)?;
    view.root = root;
    view.check_connected()?;
    Ok(sample_on(&view, BoundaryCondition::Free, root, seed, trial))
}

/// Free spanning tree of the ball: [`wilson_ust`] rooted at the basepoint.
pub fn ust_free(g: &Graph, seed: u64, trial: u64) -> Result<ForestSample> {
    wilson_ust(g, g.basepoint(), seed, trial)
}

/// Wired spanning forest of the ball: uniform spanning tree with the
/// boundary collapsed to one root.
pub fn ust_wired(g: &Graph, seed: u64, trial: u64) -> Result<ForestSample> {
    let view = View::new(g, BoundaryCondition::Wired)?;
    view.check_connected()?;
    let root = view.root;
    Ok(sample_on(&view, BoundaryCondition::Wired, root, seed, trial))
}

/// deg_𝔉(o) of one sample. Only o and its neighbours need their
/// loop-erased paths: every edge at o is the outgoing edge of o or of a
/// neighbour, and Wilson's output law does not depend on the start order.
pub fn basepoint_degree(g: &Graph, bc: BoundaryCondition, seed: u64, trial: u64) -> Result<usize> {
    let view = View::new(g, bc)?;
    let o = g.basepoint();
    if bc == BoundaryCondition::Wired && g.is_boundary(o) {
        return Err(Error::Precondition("basepoint lies on the boundary".into()));
    }
    let mut rng = rng::stream_rng(seed, streams::FOREST, trial);
    let order = std::iter::once(o).chain(g.neighbors(o).iter().copied());
    let out = wilson_pass(&view, view.root, order, &mut rng);
    let mut deg = usize::from(out[o].is_some());
    for &w in g.neighbors(o) {
        if let Some(e) = out[view.node[w]] {
            if touches(g, e, o) && out[o] != Some(e) {
                deg += 1;
            }
        }
    }
    Ok(deg)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DegreeReport {
    pub bc: BoundaryCondition,
    pub estimate: Estimate,
    pub trials: usize,
    pub host: String,
}

/// Monte Carlo mean of deg_𝔉(o); trial i uses the same stream under both
/// boundary conditions.
pub fn degree_report(g: &Graph, bc: BoundaryCondition, trials: usize, seed: u64) -> Result<DegreeReport> {
    if trials == 0 {
        return invalid("need at least one trial");
    }
    View::new(g, bc)?.check_connected()?;
    let degs = rng::par_map(trials, |i| basepoint_degree(g, bc, seed, i as u64))
        .into_iter()
        .map(|d| d.map(|d| d as f64))
        .collect::<Result<Vec<f64>>>()?;
    Ok(DegreeReport {
        bc,
        estimate: Estimate::from_samples(&degs),
        trials,
        host: g.family().to_string(),
    })
}

fn view_network(view: &View) -> Network {
    let mut net = Network::new(view.node.len());
    for (u, row) in view.adj.iter().enumerate() {
        for &(v, _) in row.iter().filter(|&&(v, _)| u < v) {
            net.add_edge(u, v);
        }
    }
    net
}

/// P[e ∈ 𝔉] = R_eff across e, in the host (free) or with the boundary
/// collapsed (wired). Edges inside the boundary have probability 0 under
/// the wired measure.
pub fn edge_probability(g: &Graph, e: usize, bc: BoundaryCondition) -> Result<f64> {
    let view = View::new(g, bc)?;
    let (u, v) = g.edge(e);
    let (a, b) = (view.node[u], view.node[v]);
    if a == b {
        return Ok(0.0);
    }
    Ok(effective_resistance(&view_network(&view), a, &[b])?.value)
}

/// Exact P[e ∈ UST] for a connected graph.
pub fn edge_prob_exact(g: &Graph, e: usize) -> Result<BigRational> {
    if !g.is_connected() {
        return Err(Error::Disconnected("spanning trees need a connected host".into()));
    }
    let (u, v) = g.edge(e);
    Ok(exact_resistance(&Network::from_graph(g), u, &[v])?
        .exact
        .expect("exact solve"))
}

/// E[deg_𝔉(o)] as the sum of edge probabilities at o.
pub fn expected_degree_exact(g: &Graph, bc: BoundaryCondition) -> Result<f64> {
    g.incident_edges(g.basepoint())
        .iter()
        .map(|&e| edge_probability(g, e, bc))
        .sum()
}

#[derive(Debug, Clone, PartialEq)]
pub struct RayleighCheck {
    pub p_sub: BigRational,
    pub p_full: BigRational,
}

impl RayleighCheck {
    pub fn holds(&self) -> bool {
        self.p_sub >= self.p_full
    }
}

/// Exact P[e ∈ UST] on the component of e in `sub` and on the host.
pub fn rayleigh_monotonicity_check(g: &Graph, sub: &Config, e: usize) -> Result<RayleighCheck> {
    if !sub.has_edge(e) {
        return Err(Error::Precondition(format!("edge {e} is absent from the subgraph")));
    }
    let (u, v) = g.edge(e);
    let p_sub = exact_resistance(&Network::from_config(sub), u, &[v])?
        .exact
        .expect("exact solve");
    let p_full = edge_prob_exact(g, e)?;
    Ok(RayleighCheck { p_sub, p_full })
}

#[derive(Debug, Clone, PartialEq)]
pub struct P0Threshold {
    pub p0: f64,
    /// Set when the free degree is known exactly (tree hosts).
    pub exact: Option<BigRational>,
    pub free_degree: Estimate,
    /// p₀ ≥ 1: the free degree does not exceed 2 at this scale.
    pub vacuous: bool,
}

/// p₀ = 2 / E_FSF[deg_𝔉(o)]. On a tree host the free tree is the host, so
/// the degree is deg(o) exactly.
pub fn p0_threshold(g: &Graph, trials: usize, seed: u64) -> Result<P0Threshold> {
    let deg = g.degree(g.basepoint());
    if Network::from_graph(g).is_forest() && g.is_connected() {
        let exact = BigRational::new(BigInt::from(2), BigInt::from(deg));
        return Ok(P0Threshold {
            p0: 2.0 / deg as f64,
            vacuous: deg <= 2,
            exact: Some(exact),
            free_degree: Estimate {
                mean: deg as f64,
                std_err: 0.0,
                n: 1,
            },
        });
    }
    let est = degree_report(g, BoundaryCondition::Free, trials, seed)?.estimate;
    Ok(P0Threshold {
        p0: 2.0 / est.mean,
        exact: None,
        vacuous: est.mean <= 2.0,
        free_degree: est,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct OwsfAudit {
    /// Every non-root vertex has exactly one outgoing edge.
    pub out_degree_ok: bool,
    pub total_out: usize,
    pub total_in: usize,
    pub interior_mean_out: f64,
    pub interior_mean_in: f64,
    pub basepoint_in: usize,
}

/// Out/in-degree bookkeeping of an oriented sample.
pub fn owsf_degree_audit(g: &Graph, sample: &ForestSample) -> Result<OwsfAudit> {
    let orient = sample
        .orientation
        .as_ref()
        .ok_or_else(|| Error::Precondition("sample carries no orientation".into()))?;
    let view = View::new(g, sample.bc)?;
    let mut indeg = vec![0usize; g.vertex_count()];
    let mut out_ok = true;
    let mut total_out = 0;
    for &v in &view.nodes {
        match orient[v] {
            Some(e) => {
                total_out += 1;
                let (a, b) = g.edge(e);
                let head = if view.node[a] == v { view.node[b] } else { view.node[a] };
                indeg[head] += 1;
            }
            None => out_ok &= v == view.root,
        }
    }
    let interior: Vec<usize> = view
        .nodes
        .iter()
        .copied()
        .filter(|&v| !g.is_boundary(v) && v != view.root)
        .collect();
    let mean =
        |f: &dyn Fn(usize) -> usize| interior.iter().map(|&v| f(v) as f64).sum::<f64>() / interior.len().max(1) as f64;
    Ok(OwsfAudit {
        out_degree_ok: out_ok,
        total_out,
        total_in: indeg.iter().sum(),
        interior_mean_out: mean(&|v| usize::from(orient[v].is_some())),
        interior_mean_in: mean(&|v| indeg[v]),
        basepoint_in: indeg[g.basepoint()],
    })
}

/// Free and wired degree reports at one radius; `gap` = free − wired.
#[derive(Debug, Clone, PartialEq)]
pub struct GapPoint {
    pub radius: usize,
    pub free: Estimate,
    pub wired: Estimate,
    pub gap: Estimate,
}

pub fn ohd_gap(family: &FamilySpec, radii: &[usize], trials: usize, seed: u64, cap: usize) -> Result<Vec<GapPoint>> {
    radii
        .iter()
        .map(|&r| {
            let g = family.build(r, cap)?;
            let free = degree_report(&g, BoundaryCondition::Free, trials, seed)?.estimate;
            let wired = degree_report(&g, BoundaryCondition::Wired, trials, seed)?.estimate;
            let gap = Estimate {
                mean: free.mean - wired.mean,
                std_err: free.std_err.hypot(wired.std_err),
                n: trials,
            };
            Ok(GapPoint {
                radius: r,
                free,
                wired,
                gap,
            })
        })
        .collect()
}

/// Wired forests thinned by independent bond percolation: D(o) split by
/// whether o's thinned component reaches the boundary (the finite-volume
/// stand-in for an infinite component) or not.
#[derive(Debug, Clone, PartialEq)]
pub struct DichotomyReport {
    pub keep: f64,
    pub touching: Estimate,
    pub finite: Estimate,
}

pub fn degree_dichotomy(g: &Graph, keep: f64, trials: usize, seed: u64) -> Result<DichotomyReport> {
    if !(0.0..=1.0).contains(&keep) {
        return invalid(format!("keep probability {keep} outside [0, 1]"));
    }
    let view = View::new(g, BoundaryCondition::Wired)?;
    view.check_connected()?;
    let o = g.basepoint();
    let rows = rng::par_map(trials, |i| {
        let forest = sample_on(&view, BoundaryCondition::Wired, view.root, seed, i as u64);
        let mut rng = rng::stream_rng(seed, streams::FOREST + 1, i as u64);
        let kept: Vec<usize> = forest.edges.iter().copied().filter(|_| rng.gen_bool(keep)).collect();
        let mut dsu = Dsu::new(g.vertex_count());
        for &e in &kept {
            let (u, v) = g.edge(e);
            dsu.union(u, v);
        }
        let root = dsu.find(o);
        let touching = g.boundary().iter().any(|&b| dsu.find(b) == root);
        let deg = kept.iter().filter(|&&e| touches(g, e, o)).count();
        (touching, deg as f64)
    });
    let pick = |t: bool| -> Vec<f64> { rows.iter().filter(|r| r.0 == t).map(|r| r.1).collect() };
    Ok(DichotomyReport {
        keep,
        touching: Estimate::from_samples(&pick(true)),
        finite: Estimate::from_samples(&pick(false)),
    })
}

/// All spanning trees of a multigraph on `n` vertices, as sorted index
/// sets into `edges`. Brute force over (n−1)-subsets.
pub fn enumerate_spanning_trees(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
    fn rec(n: usize, edges: &[(usize, usize)], start: usize, chosen: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if chosen.len() + 1 == n {
            let mut dsu = Dsu::new(n);
            if chosen.iter().all(|&i| dsu.union(edges[i].0, edges[i].1)) {
                out.push(chosen.clone());
            }
            return;
        }
        for i in start..edges.len() {
            chosen.push(i);
            rec(n, edges, i + 1, chosen, out);
            chosen.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, edges, 0, &mut Vec::new(), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{gen_grid_ball, gen_torus, gen_tree_ball, DEFAULT_VERTEX_CAP as CAP};
    use crate::percolation::sample_bond;
    use std::collections::HashMap;

    fn k3() -> Graph {
        Graph::from_edges(3, vec![(0, 1), (1, 2), (0, 2)], 0, &[], "k3").unwrap()
    }

    fn rational(a: i64, b: i64) -> BigRational {
        BigRational::new(BigInt::from(a), BigInt::from(b))
    }

    fn frequencies_match_enumeration(g: &Graph, trials: usize) {
        let trees = enumerate_spanning_trees(g.vertex_count(), g.edges());
        let mut counts: HashMap<Vec<usize>, usize> = HashMap::new();
        for i in 0..trials {
            let s = ust_free(g, 11, i as u64).unwrap();
            s.validate(g).unwrap();
            *counts.entry(s.edges).or_default() += 1;
        }
        assert_eq!(counts.len(), trees.len());
        let p = 1.0 / trees.len() as f64;
        let sigma = (p * (1.0 - p) / trials as f64).sqrt();
        for t in &trees {
            let f = counts[t] as f64 / trials as f64;
            assert!((f - p).abs() < 4.0 * sigma, "{t:?}: {f} vs {p}");
        }
    }

    #[test]
    fn wilson_uniform_on_small_hosts() {
        frequencies_match_enumeration(&gen_torus(1, 4, CAP).unwrap(), 10_000);
        frequencies_match_enumeration(&k3(), 10_000);
        frequencies_match_enumeration(&gen_grid_ball(2, 1, CAP).unwrap(), 20_000);
    }

    #[test]
    fn tree_host_is_its_own_tree() {
        let g = gen_tree_ball(3, 4, CAP).unwrap();
        let s = ust_free(&g, 0, 0).unwrap();
        assert_eq!(s.edges, (0..g.edge_count()).collect::<Vec<_>>());
        assert_eq!(
            degree_report(&g, BoundaryCondition::Free, 50, 1).unwrap().estimate.mean,
            3.0
        );
        let p0 = p0_threshold(&g, 10, 0).unwrap();
        assert_eq!(p0.exact, Some(rational(2, 3)));
        assert!(!p0.vacuous);
    }

    #[test]
    fn disconnected_and_boundaryless_errors() {
        let g = Graph::from_edges(3, vec![(0, 1)], 0, &[], "two parts").unwrap();
        assert!(matches!(ust_free(&g, 0, 0), Err(Error::Disconnected(_))));
        let t = gen_torus(2, 3, CAP).unwrap();
        assert!(ust_wired(&t, 0, 0).is_err());
    }

    #[test]
    fn wired_samples_are_valid_and_oriented() {
        let g = gen_grid_ball(2, 4, CAP).unwrap();
        for i in 0..50 {
            let s = ust_wired(&g, 3, i).unwrap();
            s.validate(&g).unwrap();
            let audit = owsf_degree_audit(&g, &s).unwrap();
            assert!(audit.out_degree_ok);
            assert_eq!(audit.total_out, audit.total_in);
            assert_eq!(audit.total_out, s.edges.len());
            assert_eq!(audit.interior_mean_out, 1.0);
        }
    }

    #[test]
    fn star_wired_degree_is_one() {
        let g = gen_tree_ball(4, 1, CAP).unwrap();
        for i in 0..20 {
            assert_eq!(basepoint_degree(&g, BoundaryCondition::Wired, 0, i).unwrap(), 1);
        }
        // Four parallel edges into the supervertex, one tree each.
        let collapsed: Vec<(usize, usize)> = vec![(0, 1); 4];
        assert_eq!(enumerate_spanning_trees(2, &collapsed).len(), 4);
        assert_eq!(expected_degree_exact(&g, BoundaryCondition::Wired).unwrap(), 1.0);
    }

    #[test]
    fn partial_wilson_degree_law_matches_full_samples() {
        let g = gen_grid_ball(2, 3, CAP).unwrap();
        for bc in [BoundaryCondition::Free, BoundaryCondition::Wired] {
            let trials = 20_000;
            let full: Vec<f64> = (0..trials)
                .map(|i| {
                    let s = match bc {
                        BoundaryCondition::Free => ust_free(&g, 5, i).unwrap(),
                        BoundaryCondition::Wired => ust_wired(&g, 5, i).unwrap(),
                    };
                    s.degree(&g, g.basepoint()) as f64
                })
                .collect();
            let full = Estimate::from_samples(&full);
            let partial = degree_report(&g, bc, trials as usize, 6).unwrap().estimate;
            let exact = expected_degree_exact(&g, bc).unwrap();
            assert!(full.agrees_with(exact, 4.0, 0.0), "{bc}: {full:?} vs {exact}");
            assert!(partial.agrees_with(exact, 4.0, 0.0), "{bc}: {partial:?} vs {exact}");
        }
    }

    #[test]
    fn edge_probabilities_match_enumeration() {
        let hosts = [
            gen_torus(1, 4, CAP).unwrap(),
            k3(),
            gen_grid_ball(2, 1, CAP).unwrap(),
            Graph::from_edges(4, vec![(0, 1), (1, 2), (2, 0), (2, 3)], 0, &[], "bridge").unwrap(),
        ];
        for g in &hosts {
            let trees = enumerate_spanning_trees(g.vertex_count(), g.edges());
            for e in 0..g.edge_count() {
                let hits = trees.iter().filter(|t| t.contains(&e)).count();
                assert_eq!(
                    edge_prob_exact(g, e).unwrap(),
                    rational(hits as i64, trees.len() as i64)
                );
            }
        }
        assert_eq!(edge_prob_exact(&hosts[0], 0).unwrap(), rational(3, 4));
        assert_eq!(edge_prob_exact(&hosts[1], 0).unwrap(), rational(2, 3));
        assert_eq!(edge_prob_exact(&hosts[3], 3).unwrap(), rational(1, 1));
    }

    #[test]
    fn wired_edge_probability_matches_collapsed_enumeration() {
        let g = gen_grid_ball(2, 1, CAP).unwrap();
        let view = View::new(&g, BoundaryCondition::Wired).unwrap();
        let index: HashMap<usize, usize> = view.nodes.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let (ids, collapsed): (Vec<usize>, Vec<(usize, usize)>) = g
            .edges()
            .iter()
            .enumerate()
            .filter(|(_, &(u, v))| view.node[u] != view.node[v])
            .map(|(e, &(u, v))| (e, (index[&view.node[u]], index[&view.node[v]])))
            .unzip();
        let trees = enumerate_spanning_trees(view.nodes.len(), &collapsed);
        for (k, &e) in ids.iter().enumerate() {
            let hits = trees.iter().filter(|t| t.contains(&k)).count() as f64;
            let p = edge_probability(&g, e, BoundaryCondition::Wired).unwrap();
            assert!((p - hits / trees.len() as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn rayleigh_examples() {
        let c4 = gen_torus(1, 4, CAP).unwrap();
        let full = Config::full(&c4);
        let same = rayleigh_monotonicity_check(&c4, &full, 0).unwrap();
        assert_eq!(same.p_sub, same.p_full);
        let mut mask = vec![true; 4];
        mask[2] = false;
        let sub = Config::from_bond_mask(&c4, mask).unwrap();
        let c = rayleigh_monotonicity_check(&c4, &sub, 0).unwrap();
        assert_eq!((c.p_sub.clone(), c.p_full.clone()), (rational(1, 1), rational(3, 4)));
        assert!(c.holds());
        assert!(rayleigh_monotonicity_check(&c4, &sub, 2).is_err());
        let g = gen_grid_ball(2, 2, CAP).unwrap();
        for seed in 0..20 {
            let sub = sample_bond(&g, 0.7, seed).unwrap();
            for e in (0..g.edge_count()).filter(|&e| sub.has_edge(e)) {
                assert!(rayleigh_monotonicity_check(&g, &sub, e).unwrap().holds());
            }
        }
    }

    #[test]
    fn transitive_host_mean_degree() {
        let g = gen_torus(2, 4, CAP).unwrap();
        let n = g.vertex_count() as f64;
        assert!((expected_degree_exact(&g, BoundaryCondition::Free).unwrap() - 2.0 * (n - 1.0) / n).abs() < 1e-12);
        let r = degree_report(&g, BoundaryCondition::Free, 20_000, 2).unwrap();
        assert!(r.estimate.agrees_with(2.0 * (n - 1.0) / n, 4.0, 0.0));
    }

    #[test]
    fn dichotomy_orders_means() {
        let g = gen_tree_ball(3, 6, CAP).unwrap();
        let d = degree_dichotomy(&g, 0.7, 4000, 1).unwrap();
        assert!(d.finite.mean < 2.0);
        assert!(d.touching.mean > d.finite.mean);
    }
}
