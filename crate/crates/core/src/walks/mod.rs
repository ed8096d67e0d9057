//! Simple, delayed and induced random walks, and their speed.

mod exact;
mod resistance;

pub use exact::{
    carne_check, carne_check_radial, delayed_chain_matrix, distribution_exact, distribution_exact_rational,
    entropy_concavity_bound, entropy_concavity_bound_radial, entropy_estimate, entropy_exact, entropy_exact_radial,
    escape_entropy, induced_chain_matrix, is_doubly_stochastic, spectral_radius_profile,
    spectral_radius_profile_radial, ConcavityReport, DistributionVector, EntropyEstimate, EscapeEntropy,
};
pub use resistance::{
    effective_resistance, exact_resistance, iterative_resistance, transience_profile, ClusterSampler, Network,
    ResistanceResult, TransiencePoint, EXACT_VERTEX_LIMIT,
};

use crate::error::{invalid, Error, Result};
use crate::graph::Graph;
use crate::percolation::Config;
use crate::rng::{self, streams};
use crate::stats::Estimate;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WalkKind {
    Simple,
    Delayed,
    Induced,
}

impl std::str::FromStr for WalkKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<WalkKind> {
        match s {
            "simple" => Ok(WalkKind::Simple),
            "delayed" => Ok(WalkKind::Delayed),
            "induced" => Ok(WalkKind::Induced),
            _ => invalid(format!("unknown walk mode `{s}`")),
        }
    }
}

/// A sampled trajectory. `distances[i]` is the host distance from the
/// basepoint of the i-th recorded position; `vertices` is empty for walks
/// on implicit hosts.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkPath {
    pub kind: WalkKind,
    pub vertices: Vec<usize>,
    pub distances: Vec<u32>,
    /// Induced walks: the delayed-walk times t_k of the recorded visits.
    pub return_times: Vec<usize>,
    /// Step at which the walk hit the boundary and stopped.
    pub absorbed_at: Option<usize>,
    /// Induced walk stopped because an excursion exceeded its budget.
    pub truncated: bool,
}

impl WalkPath {
    pub fn len(&self) -> usize {
        self.distances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.distances.is_empty()
    }

    fn on_graph(kind: WalkKind, g: &Graph, start: usize) -> WalkPath {
        WalkPath {
            kind,
            vertices: vec![start],
            distances: vec![g.distance_from_base(start)],
            return_times: Vec::new(),
            absorbed_at: None,
            truncated: false,
        }
    }

    fn push(&mut self, g: &Graph, v: usize) {
        self.vertices.push(v);
        self.distances.push(g.distance_from_base(v));
    }
}

/// Simple random walk from the basepoint along the open edges of `cfg`,
/// stopped at the boundary.
pub fn walk_simple(cfg: &Config, steps: usize, seed: u64, trial: u64) -> Result<WalkPath> {
    let g = cfg.host();
    let o = g.basepoint();
    if !cfg.has_vertex(o) || cfg.degree(o) == 0 && steps > 0 {
        return Err(Error::Precondition("basepoint is isolated".into()));
    }
    let mut rng = rng::stream_rng(seed, streams::WALK, trial);
    let mut path = WalkPath::on_graph(WalkKind::Simple, g, o);
    let mut cur = o;
    let mut open = Vec::with_capacity(g.degree_bound());
    for step in 1..=steps {
        if g.is_boundary(cur) {
            path.absorbed_at = Some(step - 1);
            break;
        }
        open.clear();
        open.extend(cfg.neighbors(cur));
        cur = open[rng.gen_range(0..open.len())];
        path.push(g, cur);
    }
    Ok(path)
}

/// One delayed step: propose uniformly among `cur` and D host slots, D the
/// host degree bound; slots beyond a truncated vertex's degree hold.
fn delayed_step(cfg: &Config, cur: usize, rng: &mut ChaCha8Rng) -> usize {
    let g = cfg.host();
    let i = rng.gen_range(0..=g.degree_bound());
    if i == 0 || i > g.degree(cur) {
        return cur;
    }
    if cfg.has_edge(g.incident_edges(cur)[i - 1]) {
        g.neighbors(cur)[i - 1]
    } else {
        cur
    }
}

/// Delayed simple random walk: the proposal set is the current vertex and
/// its host neighbours, and the walk moves only along edges of `cfg`.
pub fn walk_delayed(cfg: &Config, steps: usize, seed: u64, trial: u64) -> Result<WalkPath> {
    let g = cfg.host();
    let o = g.basepoint();
    if !cfg.has_vertex(o) {
        return Err(Error::Precondition("basepoint is not in the configuration".into()));
    }
    let mut rng = rng::stream_rng(seed, streams::WALK + 1, trial);
    let mut path = WalkPath::on_graph(WalkKind::Delayed, g, o);
    let mut cur = o;
    for step in 1..=steps {
        if g.is_boundary(cur) {
            path.absorbed_at = Some(step - 1);
            break;
        }
        cur = delayed_step(cfg, cur, &mut rng);
        path.push(g, cur);
    }
    Ok(path)
}

/// Default limit on delayed steps between consecutive visits to V*.
pub const EXCURSION_BUDGET: usize = 1_000_000;

/// The delayed walk watched on `vstar`: records `steps` successive visits
/// Z(t_1), Z(t_2), ... after time 0.
pub fn walk_induced(
    cfg: &Config,
    vstar: &[usize],
    steps: usize,
    seed: u64,
    trial: u64,
    excursion_budget: usize,
) -> Result<WalkPath> {
    let g = cfg.host();
    let o = g.basepoint();
    let mut in_star = vec![false; g.vertex_count()];
    for &v in vstar {
        if v >= g.vertex_count() || !cfg.has_vertex(v) {
            return invalid(format!("vertex {v} of V* is not in the configuration"));
        }
        in_star[v] = true;
    }
    if !in_star[o] {
        return Err(Error::Precondition("basepoint must lie in V*".into()));
    }
    let cluster = crate::percolation::cluster_of(cfg, o);
    let mut in_cluster = vec![false; g.vertex_count()];
    cluster.iter().for_each(|&v| in_cluster[v] = true);
    if vstar.iter().any(|&v| !in_cluster[v]) {
        return Err(Error::Precondition("V* must lie in the basepoint's cluster".into()));
    }
    let mut rng = rng::stream_rng(seed, streams::WALK + 2, trial);
    let mut path = WalkPath::on_graph(WalkKind::Induced, g, o);
    path.return_times.push(0);
    let mut cur = o;
    let mut time = 0usize;
    'outer: for _ in 0..steps {
        let mut excursion = 0;
        loop {
            if g.is_boundary(cur) {
                path.absorbed_at = Some(time);
                break 'outer;
            }
            cur = delayed_step(cfg, cur, &mut rng);
            time += 1;
            excursion += 1;
            if in_star[cur] {
                break;
            }
            if excursion >= excursion_budget {
                if path.return_times.len() == 1 {
                    return Err(Error::RetryCap(format!(
                        "no visit to V* within {excursion_budget} steps"
                    )));
                }
                path.truncated = true;
                break 'outer;
            }
        }
        path.push(g, cur);
        path.return_times.push(time);
    }
    Ok(path)
}

/// Walks on the 3-regular tree realised as the Cayley graph of
/// Z/2 * Z/2 * Z/2: a vertex is a reduced word and its distance from the
/// identity is the word length. No ball is stored, so walks of any length
/// are exact.
pub fn walk_cayley_t3(kind: WalkKind, steps: usize, seed: u64, trial: u64) -> Result<WalkPath> {
    let lazy = match kind {
        WalkKind::Simple => false,
        WalkKind::Delayed => true,
        WalkKind::Induced => return invalid("induced walks need a finite configuration"),
    };
    let mut rng = rng::stream_rng(seed, streams::WALK + 3 + lazy as u64, trial);
    let mut word: Vec<u8> = Vec::with_capacity(steps);
    let mut distances = Vec::with_capacity(steps + 1);
    distances.push(0);
    for _ in 0..steps {
        let pick = rng.gen_range(0..if lazy { 4u8 } else { 3 });
        if pick < 3 {
            if word.last() == Some(&pick) {
                word.pop();
            } else {
                word.push(pick);
            }
        }
        distances.push(word.len() as u32);
    }
    Ok(WalkPath {
        kind,
        vertices: Vec::new(),
        distances,
        return_times: Vec::new(),
        absorbed_at: None,
        truncated: false,
    })
}

/// Λ̂ with its standard error, and the dyadic-grid liminf proxy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpeedEstimate {
    pub speed: Estimate,
    /// Mean over paths of min_{T/2^j} dist(o, X(s))/s over s = 1, 2, 4, ... ≤ T.
    pub liminf_proxy: f64,
    pub horizon: usize,
    pub used: usize,
    pub discarded: usize,
}

/// Speed from paths sharing a horizon T (the longest path's length).
/// Paths absorbed before T/2 are discarded; absorbed paths that made it
/// past T/2 are scored at their absorption time.
pub fn speed_estimate(paths: &[WalkPath]) -> Result<SpeedEstimate> {
    let horizon = paths.iter().map(|p| p.len().saturating_sub(1)).max().unwrap_or(0);
    if horizon == 0 {
        return invalid("speed needs paths of positive length");
    }
    let mut speeds = Vec::new();
    let mut liminf = 0.0;
    let mut discarded = 0;
    for p in paths {
        let last = p.len() - 1;
        if p.absorbed_at.is_some_and(|a| 2 * a < horizon) || 2 * last < horizon {
            discarded += 1;
            continue;
        }
        speeds.push(p.distances[last] as f64 / last as f64);
        let mut s = 1;
        let mut m = f64::INFINITY;
        while s <= last {
            m = m.min(p.distances[s] as f64 / s as f64);
            s *= 2;
        }
        liminf += m;
    }
    if speeds.is_empty() {
        return Err(Error::Precondition("every path was absorbed early".into()));
    }
    let used = speeds.len();
    Ok(SpeedEstimate {
        speed: Estimate::from_samples(&speeds),
        liminf_proxy: liminf / used as f64,
        horizon,
        used,
        discarded,
    })
}

/// Exact E[dist(o, X(T))]/T for the walk on the `degree`-regular tree,
/// holding with probability `hold` per step, by iterating the distance
/// chain.
pub fn tree_speed_exact(degree: u32, steps: usize, hold: f64) -> f64 {
    let mut m = vec![0.0; steps + 2];
    m[0] = 1.0;
    let d = degree as f64;
    for _ in 0..steps {
        let mut next = vec![0.0; steps + 2];
        for k in 0..=steps {
            if m[k] == 0.0 {
                continue;
            }
            next[k] += m[k] * hold;
            let move_mass = m[k] * (1.0 - hold);
            if k == 0 {
                next[1] += move_mass;
            } else {
                next[k + 1] += move_mass * (d - 1.0) / d;
                next[k - 1] += move_mass / d;
            }
        }
        m = next;
    }
    m.iter().enumerate().map(|(k, x)| k as f64 * x).sum::<f64>() / steps as f64
}

/// Runs `trials` walks of `kind` on `cfg` (or the full host) and returns
/// them in trial order. Induced walks use V* = the basepoint's cluster.
pub fn sample_paths(cfg: &Config, kind: WalkKind, steps: usize, trials: usize, seed: u64) -> Result<Vec<WalkPath>> {
    let vstar = match kind {
        WalkKind::Induced => crate::percolation::cluster_of(cfg, cfg.host().basepoint()),
        _ => Vec::new(),
    };
    rng::par_map(trials, |i| match kind {
        WalkKind::Simple => walk_simple(cfg, steps, seed, i as u64),
        WalkKind::Delayed => walk_delayed(cfg, steps, seed, i as u64),
        WalkKind::Induced => walk_induced(cfg, &vstar, steps, seed, i as u64, EXCURSION_BUDGET),
    })
    .into_iter()
    .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{gen_grid_ball, gen_torus, gen_tree_ball, DEFAULT_VERTEX_CAP as CAP};
    use crate::percolation::sample_bond;

    #[test]
    fn zero_steps() {
        let g = gen_tree_ball(3, 3, CAP).unwrap();
        let p = walk_simple(&Config::full(&g), 0, 1, 0).unwrap();
        assert_eq!(p.vertices, vec![0]);
    }

    #[test]
    fn isolated_basepoint_rejected() {
        let g = gen_tree_ball(3, 3, CAP).unwrap();
        let c = Config::from_bond_mask(&g, vec![false; g.edge_count()]).unwrap();
        assert!(walk_simple(&c, 3, 1, 0).is_err());
        // The delayed walk just holds.
        let d = walk_delayed(&c, 5, 1, 0).unwrap();
        assert!(d.vertices.iter().all(|&v| v == 0));
    }

    #[test]
    fn c4_two_step_return() {
        let g = gen_torus(1, 4, CAP).unwrap();
        let c = Config::full(&g);
        let n = 100_000;
        let back = (0..n)
            .filter(|&i| walk_simple(&c, 2, 3, i).unwrap().vertices[2] == 0)
            .count();
        let e = Estimate::proportion(back, n as usize);
        assert!(e.agrees_with(0.5, 4.0, 0.0), "{}", e.mean);
    }

    #[test]
    fn steps_are_adjacent_or_holds() {
        let g = gen_grid_ball(2, 5, CAP).unwrap();
        let c = sample_bond(&g, 0.7, 2).unwrap();
        for i in 0..50 {
            let p = walk_delayed(&c, 60, 1, i).unwrap();
            for w in p.vertices.windows(2) {
                assert!(w[0] == w[1] || g.edge_between(w[0], w[1]).is_some_and(|e| c.has_edge(e)));
            }
        }
    }

    #[test]
    fn tree_ball_speed_matches_distance_chain() {
        // A radius-40 ball does not fit in memory; the Cayley walk is the
        // same process. The stored ball is checked at radius 12.
        let exact = tree_speed_exact(3, 30, 0.0);
        let paths: Vec<WalkPath> = (0..4000)
            .map(|i| walk_cayley_t3(WalkKind::Simple, 30, 5, i).unwrap())
            .collect();
        let s = speed_estimate(&paths).unwrap();
        assert!(s.speed.agrees_with(exact, 4.0, 0.0), "{} vs {exact}", s.speed.mean);
        let ball = gen_tree_ball(3, 12, CAP).unwrap();
        let paths = sample_paths(&Config::full(&ball), WalkKind::Simple, 10, 4000, 5).unwrap();
        let s = speed_estimate(&paths).unwrap();
        assert!(s.speed.agrees_with(tree_speed_exact(3, 10, 0.0), 4.0, 0.0));
    }

    #[test]
    fn delayed_tree_speed_is_three_quarters() {
        let exact = tree_speed_exact(3, 200, 0.25);
        let paths: Vec<WalkPath> = (0..2000)
            .map(|i| walk_cayley_t3(WalkKind::Delayed, 200, 8, i).unwrap())
            .collect();
        let s = speed_estimate(&paths).unwrap();
        assert!(s.speed.agrees_with(exact, 4.0, 0.0));
        assert!((tree_speed_exact(3, 4000, 0.25) - 0.25).abs() < 2e-3);
    }

    #[test]
    fn induced_walk_on_whole_cluster_is_delayed_walk_subsequence() {
        let g = gen_grid_ball(2, 4, CAP).unwrap();
        let c = Config::full(&g);
        let all: Vec<usize> = (0..g.vertex_count()).collect();
        let p = walk_induced(&c, &all, 30, 4, 0, 100).unwrap();
        // Every delayed step lands in V*, so t_k = k.
        let k = p.return_times.len();
        assert_eq!(p.return_times, (0..k).collect::<Vec<_>>());
        let single = walk_induced(&c, &[g.basepoint()], 5, 4, 0, 1_000_000).unwrap();
        assert!(single.vertices.iter().all(|&v| v == g.basepoint()));
        assert!(single.return_times.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn speed_on_a_line_vanishes() {
        let g = gen_grid_ball(1, 400, CAP).unwrap();
        let paths = sample_paths(&Config::full(&g), WalkKind::Simple, 400, 500, 1).unwrap();
        let s = speed_estimate(&paths).unwrap();
        // E|S_T|/T ≈ sqrt(2/(πT)) ≈ 0.04.
        assert!(s.speed.mean < 0.06, "{}", s.speed.mean);
    }
}
