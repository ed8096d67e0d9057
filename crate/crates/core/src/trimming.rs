//! The trimming procedure Ξ(h, ω): repeatedly delete finite pieces of a
//! random half of the configuration whose edge boundary is small relative
//! to their size, plus the mass-transport audits of each sweep.

use crate::error::{invalid, Error, Result};
use crate::graph::{for_each_connected_set, Graph};
use crate::percolation::{Config, Dsu};
use crate::rng::{self, streams};
use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{ToPrimitive, Zero};

/// Parses a nonnegative decimal such as `0.1` or `3/10` into an exact ratio.
pub fn parse_ratio(text: &str) -> Result<Ratio<i64>> {
    let text = text.trim();
    if let Some((a, b)) = text.split_once('/') {
        let (a, b): (i64, i64) = match (a.trim().parse(), b.trim().parse()) {
            (Ok(a), Ok(b)) if b != 0 => (a, b),
            _ => return invalid(format!("bad ratio `{text}`")),
        };
        return Ok(Ratio::new(a, b));
    }
    let (int, frac) = text.split_once('.').unwrap_or((text, ""));
    if int.is_empty() && frac.is_empty()
        || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit())
        || frac.len() > 15
    {
        return invalid(format!("bad decimal `{text}`"));
    }
    let den = 10i64.pow(frac.len() as u32);
    let whole: i64 = if int.is_empty() {
        0
    } else {
        int.parse()
            .map_err(|_| Error::InvalidParameter(format!("bad decimal `{text}`")))?
    };
    let part: i64 = if frac.is_empty() { 0 } else { frac.parse().unwrap() };
    Ok(Ratio::new(whole * den + part, den))
}

/// A component of β_n ∩ ω_n removed at sweep `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RemovedComponent {
    /// Sorted vertex ids.
    pub vertices: Vec<usize>,
    /// Open edges leaving the component at removal time.
    pub boundary_edges: usize,
    pub ratio: Ratio<i64>,
}

/// State of ω_n before sweep `n` and what that sweep removed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepRecord {
    pub n: usize,
    pub present: usize,
    pub present_interior: usize,
    /// Σ_v deg_{ω_n} v, twice the open edge count.
    pub degree_sum: usize,
    pub removed: Vec<RemovedComponent>,
}

impl SweepRecord {
    pub fn removed_count(&self) -> usize {
        self.removed.iter().map(|k| k.vertices.len()).sum()
    }

    pub fn max_witness_ratio(&self) -> Option<Ratio<i64>> {
        self.removed.iter().map(|k| k.ratio).max()
    }
}

/// How the fixpoint search over removable sets ended.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchOutcome {
    /// No removable set up to the cap exists.
    Clear,
    /// A connected interior set that some β would remove.
    Candidate(Vec<usize>),
    /// The enumeration budget ran out.
    Incomplete,
    NotRun,
}

#[derive(Debug, Clone)]
pub struct TrimOptions {
    pub max_sweeps: usize,
    /// Largest set size the fixpoint search looks at.
    pub search_cap: usize,
    /// Connected-set budget for the enumeration route (non-forests).
    pub search_budget: u64,
}

impl TrimOptions {
    /// `10·log₂|V|` sweeps and a search cap of 12.
    pub fn for_host(g: &Graph) -> TrimOptions {
        let log = (g.vertex_count().max(2) as f64).log2().ceil() as usize;
        TrimOptions {
            max_sweeps: 10 * log,
            search_cap: 12,
            search_budget: 1_000_000,
        }
    }
}

/// Full history of a trimming run.
#[derive(Debug, Clone, PartialEq)]
pub struct TrimTrace<'g> {
    pub h: Ratio<i64>,
    pub seed: u64,
    pub initial: Config<'g>,
    pub iterations: Vec<SweepRecord>,
    pub final_config: Config<'g>,
    /// A sweep removed nothing and the search found no removable set up to
    /// `search_cap`.
    pub converged: bool,
    pub search: SearchOutcome,
    pub search_cap: usize,
}

impl TrimTrace<'_> {
    fn host_size(&self) -> f64 {
        self.initial.host().vertex_count() as f64
    }

    /// Fraction of host vertices present in ω_n.
    pub fn theta(&self, n: usize) -> f64 {
        self.iterations[n].present as f64 / self.host_size()
    }

    /// Host-average of deg_{ω_n}.
    pub fn degree_mean(&self, n: usize) -> f64 {
        self.iterations[n].degree_sum as f64 / self.host_size()
    }

    pub fn final_theta(&self) -> f64 {
        self.final_config.vertex_count() as f64 / self.host_size()
    }

    /// Fraction of non-boundary host vertices that survive.
    pub fn final_interior_fraction(&self) -> f64 {
        let g = self.initial.host();
        let interior = g.vertex_count() - g.boundary().len();
        let kept = (0..g.vertex_count())
            .filter(|&v| !g.is_boundary(v) && self.final_config.has_vertex(v))
            .count();
        kept as f64 / interior as f64
    }

    pub fn removals(&self) -> impl Iterator<Item = &RemovedComponent> {
        self.iterations.iter().flat_map(|s| s.removed.iter())
    }

    /// CSV rows `sweep, removed_count, theta_n, D_n, max_witness_ratio`.
    pub fn rows(&self) -> Vec<(usize, usize, f64, f64, Option<f64>)> {
        (0..self.iterations.len())
            .map(|n| {
                let s = &self.iterations[n];
                (
                    n,
                    s.removed_count(),
                    self.theta(n),
                    self.degree_mean(n),
                    s.max_witness_ratio().map(ratio_f64),
                )
            })
            .collect()
    }
}

fn ratio_f64(r: Ratio<i64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

fn check_h(h: Ratio<i64>) -> Result<()> {
    if h <= Ratio::zero() {
        invalid(format!("h = {h} must be positive"))
    } else {
        Ok(())
    }
}

fn below_h(boundary: usize, size: usize, h: Ratio<i64>) -> bool {
    (boundary as i128) * (*h.denom() as i128) < (*h.numer() as i128) * (size as i128)
}

/// One sweep: samples β_n, removes every component K of β_n ∩ ω_n that
/// avoids the boundary and has |∂_{E(ω_n)} K| < h|K|.
pub fn trim_step<'g>(
    cfg: &Config<'g>,
    h: Ratio<i64>,
    seed: u64,
    sweep: usize,
) -> Result<(Config<'g>, Vec<RemovedComponent>)> {
    check_h(h)?;
    let g = cfg.host();
    let n = g.vertex_count();
    let stream = streams::TRIM_BETA + sweep as u64;
    let beta: Vec<bool> = (0..n)
        .map(|v| cfg.has_vertex(v) && rng::coin(seed, stream, v as u64, 0.5))
        .collect();
    let mut dsu = Dsu::new(n);
    for (e, &(u, v)) in g.edges().iter().enumerate() {
        if cfg.has_edge(e) && beta[u] && beta[v] {
            dsu.union(u, v);
        }
    }
    let mut slot = vec![usize::MAX; n];
    let mut comps: Vec<(Vec<usize>, usize, bool)> = Vec::new();
    for v in 0..n {
        if !beta[v] {
            continue;
        }
        let r = dsu.find(v);
        if slot[r] == usize::MAX {
            slot[r] = comps.len();
            comps.push((Vec::new(), 0, false));
        }
        let c = &mut comps[slot[r]];
        c.0.push(v);
        c.2 |= g.is_boundary(v);
    }
    for (e, &(u, v)) in g.edges().iter().enumerate() {
        if !cfg.has_edge(e) {
            continue;
        }
        match (beta[u], beta[v]) {
            (true, false) => comps[slot[dsu.find(u)]].1 += 1,
            (false, true) => comps[slot[dsu.find(v)]].1 += 1,
            _ => {}
        }
    }
    let removed: Vec<RemovedComponent> = comps
        .into_iter()
        .filter(|(k, b, touches)| !touches && below_h(*b, k.len(), h))
        .map(|(k, b, _)| RemovedComponent {
            ratio: Ratio::new(b as i64, k.len() as i64),
            boundary_edges: b,
            vertices: k,
        })
        .collect();
    let mut next = cfg.clone();
    for k in &removed {
        next.remove_vertices(&k.vertices);
    }
    Ok((next, removed))
}

pub fn trim<'g>(cfg: &Config<'g>, h: Ratio<i64>, seed: u64, max_sweeps: usize) -> Result<TrimTrace<'g>> {
    let opts = TrimOptions {
        max_sweeps,
        ..TrimOptions::for_host(cfg.host())
    };
    trim_with(cfg, h, seed, &opts)
}

/// Sweeps until one removes nothing and no connected interior set of size
/// at most `search_cap` could be removed by a later β, or `max_sweeps`.
/// The search runs on quiet sweeps with doubling gaps between runs.
pub fn trim_with<'g>(cfg: &Config<'g>, h: Ratio<i64>, seed: u64, opts: &TrimOptions) -> Result<TrimTrace<'g>> {
    check_h(h)?;
    let g = cfg.host();
    let mut cur = cfg.clone();
    let mut iterations = Vec::new();
    let mut converged = false;
    let mut search = SearchOutcome::NotRun;
    let mut next_search = 0;
    let mut gap = 1;
    for n in 0..opts.max_sweeps {
        let present = cur.vertex_count();
        let present_interior = (0..g.vertex_count())
            .filter(|&v| cur.has_vertex(v) && !g.is_boundary(v))
            .count();
        let degree_sum = 2 * cur.edge_count();
        let (next, removed) = trim_step(&cur, h, seed, n)?;
        let quiet = removed.is_empty();
        iterations.push(SweepRecord {
            n,
            present,
            present_interior,
            degree_sum,
            removed,
        });
        cur = next;
        if quiet && n >= next_search {
            search = removable_candidate(&cur, h, opts.search_cap, opts.search_budget)?;
            if search == SearchOutcome::Clear {
                converged = true;
                break;
            }
            next_search = n + gap;
            gap *= 2;
        }
    }
    Ok(TrimTrace {
        h,
        seed,
        initial: cfg.clone(),
        iterations,
        final_config: cur,
        converged,
        search,
        search_cap: opts.search_cap,
    })
}

/// Minimal open-edge boundary of connected interior sets, per size.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryProfile {
    /// `best[k]` = (boundary, witness) for size `k`; index 0 unused.
    pub best: Vec<Option<(usize, Vec<usize>)>>,
    pub complete: bool,
}

impl BoundaryProfile {
    pub fn min_ratio(&self) -> Option<(Ratio<i64>, &[usize])> {
        let mut out: Option<(Ratio<i64>, &[usize])> = None;
        for (k, b) in self.best.iter().enumerate() {
            if let Some((b, w)) = b {
                let r = Ratio::new(*b as i64, k as i64);
                if out.as_ref().is_none_or(|(best, _)| r < *best) {
                    out = Some((r, w));
                }
            }
        }
        out
    }

    fn below(&self, h: Ratio<i64>) -> Option<&[usize]> {
        self.best.iter().enumerate().find_map(|(k, b)| match b {
            Some((b, w)) if below_h(*b, k, h) => Some(w.as_slice()),
            _ => None,
        })
    }
}

/// Interior present vertices of a configuration.
fn interior(cfg: &Config, v: usize) -> bool {
    cfg.has_vertex(v) && !cfg.host().is_boundary(v)
}

/// Minimal-boundary profile over connected sets of present interior
/// vertices (connected through open edges), sizes `1..=cap`. Forests use
/// an exact subtree knapsack; other configurations enumerate.
pub fn boundary_profile(cfg: &Config, cap: usize, budget: u64) -> BoundaryProfile {
    if cfg.is_forest() {
        forest_profile(cfg, cap)
    } else {
        enumerated_profile(cfg, cap, budget)
    }
}

/// Enumeration route, usable on any configuration.
pub fn enumerated_profile(cfg: &Config, cap: usize, budget: u64) -> BoundaryProfile {
    let sub = cfg.subgraph();
    let mut best: Vec<Option<(usize, Vec<usize>)>> = vec![None; cap + 1];
    let outcome = for_each_connected_set(
        &sub,
        |v| interior(cfg, v),
        None,
        cap,
        budget,
        |set, b| {
            let slot = &mut best[set.len()];
            let better = match slot {
                None => true,
                Some((cur, w)) => {
                    b < *cur
                        || b == *cur && {
                            let mut s = set.to_vec();
                            s.sort_unstable();
                            s < *w
                        }
                }
            };
            if better {
                let mut s = set.to_vec();
                s.sort_unstable();
                *slot = Some((b, s));
            }
        },
    );
    BoundaryProfile {
        best,
        complete: outcome.is_ok(),
    }
}

/// Subtree knapsack on the interior forest. Witnesses are minimisers but
/// not necessarily the lexicographically smallest ones. In a tree, a connected set W
/// with k vertices has |∂W| = Σ_{w∈W} deg(w) − 2(k − 1), so minimizing the
/// boundary is minimizing the degree sum.
pub fn forest_profile(cfg: &Config, cap: usize) -> BoundaryProfile {
    const INF: u32 = u32::MAX / 2;
    let g = cfg.host();
    let n = g.vertex_count();
    let mut visited = vec![false; n];
    let mut best: Vec<Option<(usize, Vec<usize>)>> = vec![None; cap + 1];
    let mut table: Vec<Vec<u32>> = vec![Vec::new(); n];
    // Per vertex: (child, split) pairs in merge order.
    let mut splits: Vec<Vec<(usize, Vec<u8>)>> = vec![Vec::new(); n];
    let mut parent = vec![usize::MAX; n];
    if cap == 0 {
        return BoundaryProfile { best, complete: true };
    }
    for root in 0..n {
        if visited[root] || !interior(cfg, root) {
            continue;
        }
        // Iterative DFS for a parent order.
        let mut order = Vec::new();
        let mut stack = vec![(root, usize::MAX)];
        visited[root] = true;
        while let Some((v, p)) = stack.pop() {
            order.push((v, p));
            parent[v] = p;
            for w in cfg.neighbors(v) {
                if !visited[w] && interior(cfg, w) {
                    visited[w] = true;
                    stack.push((w, v));
                }
            }
        }
        for &(v, _) in order.iter().rev() {
            let mut f = vec![INF; cap + 1];
            f[1] = cfg.degree(v) as u32;
            let children: Vec<usize> = cfg
                .neighbors(v)
                .filter(|&w| interior(cfg, w) && parent[w] == v)
                .collect();
            for c in children {
                let fc = std::mem::take(&mut table[c]);
                let mut merged = f.clone();
                let mut split = vec![0u8; cap + 1];
                for a in 1..=cap {
                    if f[a] >= INF {
                        continue;
                    }
                    for b in 1..=cap - a {
                        if fc[b] >= INF {
                            continue;
                        }
                        let cost = f[a] + fc[b];
                        if cost < merged[a + b] {
                            merged[a + b] = cost;
                            split[a + b] = b as u8;
                        }
                    }
                }
                f = merged;
                splits[v].push((c, split));
                table[c] = fc;
            }
            table[v] = f;
        }
        for &(v, _) in &order {
            for k in 1..=cap {
                let s = table[v][k];
                if s >= INF {
                    continue;
                }
                let b = s as usize + 2 - 2 * k;
                if best[k].as_ref().is_none_or(|(cur, _)| b < *cur) {
                    let mut w = Vec::with_capacity(k);
                    collect_subtree(&splits, v, k, &mut w);
                    w.sort_unstable();
                    best[k] = Some((b, w));
                } else if let Some((cur, w0)) = &best[k] {
                    if b == *cur {
                        let mut w = Vec::with_capacity(k);
                        collect_subtree(&splits, v, k, &mut w);
                        w.sort_unstable();
                        if w < *w0 {
                            best[k] = Some((b, w));
                        }
                    }
                }
            }
        }
    }
    BoundaryProfile { best, complete: true }
}

fn collect_subtree(splits: &[Vec<(usize, Vec<u8>)>], v: usize, k: usize, out: &mut Vec<usize>) {
    out.push(v);
    let mut rest = k;
    for (c, split) in splits[v].iter().rev() {
        let b = split[rest] as usize;
        if b > 0 {
            collect_subtree(splits, *c, b, out);
            rest -= b;
        }
    }
    debug_assert_eq!(rest, 1);
}

/// Looks for a connected interior set W ⊆ ω with |∂_{E(ω)} W| < h|W|.
pub fn removable_candidate(cfg: &Config, h: Ratio<i64>, cap: usize, budget: u64) -> Result<SearchOutcome> {
    check_h(h)?;
    let profile = boundary_profile(cfg, cap, budget);
    Ok(match profile.below(h) {
        Some(w) => SearchOutcome::Candidate(w.to_vec()),
        None if profile.complete => SearchOutcome::Clear,
        None => SearchOutcome::Incomplete,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct IsoperimetryReport {
    pub min_ratio: Option<Ratio<i64>>,
    pub witness: Vec<usize>,
    /// Some set of size at most `cap` has ratio below h.
    pub violation: bool,
    /// False when the enumeration budget ran out (partial report).
    pub complete: bool,
    pub cap: usize,
}

/// Checks ι_E(ω′) ≥ h over connected interior sets of ω′ with at most
/// `cap` vertices.
pub fn verify_isoperimetry(trace: &TrimTrace, cap: usize) -> IsoperimetryReport {
    let profile = boundary_profile(&trace.final_config, cap, 50_000_000);
    let (min_ratio, witness) = match profile.min_ratio() {
        Some((r, w)) => (Some(r), w.to_vec()),
        None => (None, Vec::new()),
    };
    IsoperimetryReport {
        violation: min_ratio.is_some_and(|r| r < trace.h),
        min_ratio,
        witness,
        complete: profile.complete,
        cap,
    }
}

/// θ_∞ ≥ P_in · (1 − (deg − E[deg | in]) / (ι − 2h)). May be negative.
pub fn density_lower_bound(deg_g: u32, e_deg_given_in: f64, p_in: f64, iso: f64, h: f64) -> Result<f64> {
    if iso - 2.0 * h <= 0.0 {
        return invalid(format!("iso - 2h = {} must be positive", iso - 2.0 * h));
    }
    if e_deg_given_in > deg_g as f64 + 1e-12 {
        return invalid("conditional degree above the host degree");
    }
    Ok(p_in * (1.0 - (deg_g as f64 - e_deg_given_in) / (iso - 2.0 * h)))
}

/// Exact bookkeeping of the transport m(v, u) at one sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepTransport {
    pub n: usize,
    /// Σ_v Σ_u m(v, u), summed by sender.
    pub sent: BigRational,
    /// The same mass summed by receiver in closed form, 2·|E(K)∪∂K|/|K|
    /// per removed vertex.
    pub received: BigRational,
    /// Every vertex sends exactly its degree loss.
    pub sent_matches_degree_loss: bool,
    /// Every removed vertex receives exactly the closed form.
    pub received_matches_closed_form: bool,
    /// Removed vertices whose received mass is not below α + 2h.
    pub alh_failures: usize,
    /// D_n − D_{n+1}.
    pub decrement: BigRational,
    /// (α + 2h)(θ_n − θ_{n+1}).
    pub bound_rhs: BigRational,
}

impl SweepTransport {
    pub fn balanced(&self) -> bool {
        self.sent == self.received
    }

    pub fn decrement_ok(&self) -> bool {
        self.decrement <= self.bound_rhs
    }

    pub fn ok(&self) -> bool {
        self.balanced() && self.sent_matches_degree_loss && self.received_matches_closed_form && self.decrement_ok()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MassTransportAudit {
    pub alpha: Ratio<i64>,
    pub h: Ratio<i64>,
    pub sweeps: Vec<SweepTransport>,
}

impl MassTransportAudit {
    pub fn all_balanced(&self) -> bool {
        self.sweeps.iter().all(SweepTransport::balanced)
    }

    pub fn all_ok(&self) -> bool {
        self.sweeps.iter().all(SweepTransport::ok)
    }

    pub fn alh_failures(&self) -> usize {
        self.sweeps.iter().map(|s| s.alh_failures).sum()
    }
}

fn big(r: Ratio<i64>) -> BigRational {
    BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
}

fn int(x: usize) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

/// Replays a trace and audits every sweep with constant `alpha` in place of
/// α(G). Works on any host; vertex averages are over all host vertices.
pub fn audit_trace(trace: &TrimTrace, alpha: Ratio<i64>) -> MassTransportAudit {
    let g = trace.initial.host();
    let nv = g.vertex_count();
    let total = int(nv);
    let rhs_const = big(alpha) + big(trace.h) * int(2);
    let mut cur = trace.initial.clone();
    let mut sweeps = Vec::with_capacity(trace.iterations.len());
    for rec in &trace.iterations {
        let deg_before: Vec<usize> = (0..nv).map(|v| cur.degree(v)).collect();
        let mut next = cur.clone();
        for k in &rec.removed {
            next.remove_vertices(&k.vertices);
        }
        let mut sent = vec![BigRational::zero(); nv];
        let mut received = vec![BigRational::zero(); nv];
        let mut received_ok = true;
        let mut alh_failures = 0;
        let mut removed_vertices = 0;
        for k in &rec.removed {
            let size = int(k.vertices.len());
            removed_vertices += k.vertices.len();
            let mut inside = std::collections::HashSet::with_capacity(k.vertices.len());
            inside.extend(k.vertices.iter().copied());
            // Outside vertices with their number of open edges into K.
            let mut outside: Vec<(usize, usize)> = Vec::new();
            let mut incident = 0usize;
            for &w in &k.vertices {
                for x in cur.neighbors(w) {
                    if inside.contains(&x) {
                        if w < x {
                            incident += 1;
                        }
                    } else {
                        incident += 1;
                        match outside.iter_mut().find(|(y, _)| *y == x) {
                            Some(entry) => entry.1 += 1,
                            None => outside.push((x, 1)),
                        }
                    }
                }
            }
            for &u in &k.vertices {
                for &v in &k.vertices {
                    let m = int(deg_before[v]) / size.clone();
                    sent[v] += m.clone();
                    received[u] += m;
                }
                for &(v, c) in &outside {
                    let m = int(c) / size.clone();
                    sent[v] += m.clone();
                    received[u] += m;
                }
            }
            let closed = int(2 * incident) / size.clone();
            for &u in &k.vertices {
                received_ok &= received[u] == closed;
                if received[u] >= rhs_const {
                    alh_failures += 1;
                }
            }
        }
        let sent_ok = (0..nv).all(|v| sent[v] == int(deg_before[v] - next.degree(v)));
        let sent_total: BigRational = sent.into_iter().sum();
        // Closed form: each removed K receives 2·(edges incident to K) in
        // total, and Σ_{w∈K} deg w + |∂K| counts those edges twice.
        let received_total: BigRational = rec
            .removed
            .iter()
            .map(|k| int(k.vertices.iter().map(|&w| deg_before[w]).sum::<usize>() + k.boundary_edges))
            .sum();
        let degree_drop: usize = deg_before.iter().sum::<usize>() - (0..nv).map(|v| next.degree(v)).sum::<usize>();
        sweeps.push(SweepTransport {
            n: rec.n,
            sent: sent_total,
            received: received_total,
            sent_matches_degree_loss: sent_ok,
            received_matches_closed_form: received_ok,
            alh_failures,
            decrement: int(degree_drop) / total.clone(),
            bound_rhs: rhs_const.clone() * int(removed_vertices) / total.clone(),
        });
        cur = next;
    }
    MassTransportAudit {
        alpha,
        h: trace.h,
        sweeps,
    }
}

/// α̂: the largest average induced degree over connected sets of at most
/// `cap` vertices. On transitive hosts only sets through vertex 0 are
/// enumerated.
pub fn alpha_hat(g: &Graph, cap: usize) -> Result<Ratio<i64>> {
    let anchor = if g.is_transitive() { Some(0) } else { None };
    let mut best = Ratio::new(0i64, 1);
    for_each_connected_set(
        g,
        |_| true,
        anchor,
        cap,
        2_000_000_000,
        |set, b| {
            let deg: usize = set.iter().map(|&v| g.degree(v)).sum();
            let a = Ratio::new((deg - b) as i64, set.len() as i64);
            if a > best {
                best = a;
            }
        },
    )?;
    Ok(best)
}

/// Default enumeration cap for α̂ on tori.
pub const ALPHA_HAT_CAP: usize = 10;

/// Runs Ξ(h, ω) on a torus and audits every sweep with α̂ from
/// [`alpha_hat`] at [`ALPHA_HAT_CAP`].
pub fn mass_transport_audit<'g>(
    host: &'g Graph,
    cfg: &Config<'g>,
    h: Ratio<i64>,
    seed: u64,
) -> Result<(TrimTrace<'g>, MassTransportAudit)> {
    if !host.is_transitive() || !host.boundary().is_empty() {
        return Err(Error::Precondition(
            "mass transport audit needs a boundary-free transitive host".into(),
        ));
    }
    if !std::ptr::eq(cfg.host(), host) {
        return invalid("configuration lives on a different host");
    }
    let alpha = alpha_hat(host, ALPHA_HAT_CAP)?;
    let trace = trim_with(cfg, h, seed, &TrimOptions::for_host(host))?;
    let audit = audit_trace(&trace, alpha);
    Ok((trace, audit))
}

/// Forest version: the audit with the constant 2, on any host.
pub fn forest_transport_audit<'g>(
    cfg: &Config<'g>,
    h: Ratio<i64>,
    seed: u64,
) -> Result<(TrimTrace<'g>, MassTransportAudit)> {
    if !cfg.is_forest() {
        return Err(Error::Precondition("configuration is not a forest".into()));
    }
    let trace = trim_with(cfg, h, seed, &TrimOptions::for_host(cfg.host()))?;
    let audit = audit_trace(&trace, Ratio::from_integer(2));
    Ok((trace, audit))
}

/// Converts an exact audit quantity for display.
pub fn big_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{gen_grid_ball, gen_torus, gen_tree_ball, DEFAULT_VERTEX_CAP as CAP};
    use crate::percolation::{sample_bond, sample_bond_stream};
    use proptest::prelude::*;

    fn h(s: &str) -> Ratio<i64> {
        parse_ratio(s).unwrap()
    }

    #[test]
    fn parses_ratios() {
        assert_eq!(h("0.1"), Ratio::new(1, 10));
        assert_eq!(h("3/10"), Ratio::new(3, 10));
        assert_eq!(h("2"), Ratio::from_integer(2));
        assert_eq!(h(".25"), Ratio::new(1, 4));
        assert!(parse_ratio("x").is_err());
        assert!(parse_ratio("1/0").is_err());
        assert!(parse_ratio("-0.1").is_err());
    }

    #[test]
    fn rejects_nonpositive_h() {
        let g = gen_tree_ball(3, 3, CAP).unwrap();
        let c = Config::full(&g);
        assert!(trim_step(&c, Ratio::zero(), 1, 0).is_err());
        assert!(trim(&c, Ratio::new(-1, 2), 1, 5).is_err());
    }

    #[test]
    fn isolated_vertex_removed_half_the_time() {
        // Path 0-1-2 with the middle vertex isolated by the configuration.
        let g = Graph::from_edges(3, vec![(0, 1), (1, 2)], 1, &[0, 2], "path").unwrap();
        let c = Config::from_bond_mask(&g, vec![false, false]).unwrap();
        let n = 20_000;
        let hits = (0..n)
            .filter(|&s| !trim_step(&c, h("0.1"), s, 0).unwrap().1.is_empty())
            .count();
        let frac = hits as f64 / n as f64;
        assert!((frac - 0.5).abs() < 3.0 * (0.25 / n as f64).sqrt() + 1e-9, "{frac}");
    }

    #[test]
    fn tiny_h_keeps_sets_with_boundary() {
        let g = gen_tree_ball(3, 6, CAP).unwrap();
        let c = Config::full(&g);
        let t = trim(&c, Ratio::new(1, 1_000_000), 3, 40).unwrap();
        assert_eq!(t.removals().count(), 0);
        assert!(t.converged);
    }

    #[test]
    fn full_tree_ball_is_fixed_below_one() {
        let g = gen_tree_ball(3, 8, CAP).unwrap();
        let c = Config::full(&g);
        let t = trim(&c, h("0.9"), 5, 50).unwrap();
        assert_eq!(t.final_config, c);
        assert!(t.converged);
        let report = verify_isoperimetry(&t, 12);
        assert!(!report.violation);
        // Smallest ratio is a single vertex adjacent to nothing removable: 3/1
        // for k = 1, decreasing to (k + 2)/k at k = 12.
        assert_eq!(report.min_ratio, Some(Ratio::new(14, 12)));
    }

    #[test]
    fn empty_configuration_converges_at_once() {
        let g = gen_tree_ball(3, 4, CAP).unwrap();
        let c = Config::from_masks(&g, vec![false; g.vertex_count()], vec![false; g.edge_count()]).unwrap();
        let t = trim(&c, h("0.1"), 1, 10).unwrap();
        assert!(t.converged);
        assert_eq!(t.iterations.len(), 1);
        assert_eq!(t.final_config.vertex_count(), 0);
        let r = verify_isoperimetry(&t, 12);
        assert!(!r.violation && r.min_ratio.is_none());
    }

    #[test]
    fn tree_removals_are_below_h_and_nested() {
        let g = gen_tree_ball(3, 10, CAP).unwrap();
        for seed in 0..5 {
            let c = sample_bond(&g, 0.95, seed).unwrap();
            let t = trim(&c, h("0.1"), seed, 400).unwrap();
            let mut cur = c.clone();
            for rec in &t.iterations {
                for k in &rec.removed {
                    assert!(k.ratio < h("0.1"));
                    assert!(k.vertices.iter().all(|&v| cur.has_vertex(v) && !g.is_boundary(v)));
                }
                let before = cur.clone();
                for k in &rec.removed {
                    cur.remove_vertices(&k.vertices);
                }
                assert!(cur
                    .vertex_mask()
                    .iter()
                    .zip(before.vertex_mask())
                    .all(|(&a, &b)| !a || b));
            }
            assert_eq!(cur, t.final_config);
        }
    }

    #[test]
    fn deterministic_traces() {
        let g = gen_grid_ball(2, 6, CAP).unwrap();
        let c = sample_bond(&g, 0.7, 4).unwrap();
        assert_eq!(trim(&c, h("0.5"), 9, 30).unwrap(), trim(&c, h("0.5"), 9, 30).unwrap());
    }

    #[test]
    fn density_bound_examples() {
        assert!((density_lower_bound(3, 2.85, 1.0, 1.0, 0.1).unwrap() - 0.8125).abs() < 1e-12);
        assert_eq!(density_lower_bound(4, 4.0, 0.7, 2.0, 0.3).unwrap(), 0.7);
        assert!(density_lower_bound(3, 2.2, 1.0, 1.0, 0.1).unwrap().abs() < 1e-12);
        assert!(density_lower_bound(3, 2.0, 1.0, 1.0, 0.5).is_err());
    }

    #[test]
    fn forest_knapsack_matches_enumeration() {
        let g = gen_tree_ball(3, 5, CAP).unwrap();
        for seed in 0..30 {
            let c = sample_bond(&g, 0.8, seed).unwrap();
            let dp = forest_profile(&c, 8);
            let brute = enumerated_profile(&c, 8, u64::MAX);
            assert!(brute.complete);
            for k in 1..=8 {
                let (a, b) = (&dp.best[k], &brute.best[k]);
                assert_eq!(a.as_ref().map(|x| x.0), b.as_ref().map(|x| x.0), "seed {seed} k {k}");
                if let Some((bd, w)) = a {
                    let sub = c.subgraph();
                    assert_eq!(w.len(), k);
                    assert_eq!(crate::graph::edge_boundary(&sub, w).len(), *bd);
                    assert!(crate::graph::alpha_k(&sub, w).is_ok());
                }
            }
        }
    }

    #[test]
    fn torus_transport_balances() {
        let g = gen_torus(2, 8, CAP).unwrap();
        for seed in 0..3 {
            let c = sample_bond(&g, 0.6, seed).unwrap();
            let (trace, audit) = mass_transport_audit(&g, &c, h("0.2"), seed).unwrap();
            assert!(trace.removals().count() > 0);
            assert!(audit.all_ok(), "{audit:?}");
        }
        let tree = gen_tree_ball(3, 3, CAP).unwrap();
        assert!(mass_transport_audit(&tree, &Config::full(&tree), h("0.2"), 0).is_err());
    }

    #[test]
    fn empty_removal_gives_zero_transport() {
        let g = gen_tree_ball(3, 4, CAP).unwrap();
        let t = trim(&Config::full(&g), h("0.5"), 0, 3).unwrap();
        let a = audit_trace(&t, Ratio::from_integer(2));
        for s in &a.sweeps {
            assert!(s.sent.is_zero() && s.received.is_zero() && s.decrement.is_zero());
            assert!(s.ok());
        }
    }

    // A removable set in Z² needs |∂K| < |K|/2, so more than 64 vertices of
    // a subcritical β in a near-square. Balls of these sizes lose nothing.
    #[test]
    fn dense_grid_balls_are_not_trimmed() {
        for r in [8, 16, 24] {
            let g = gen_grid_ball(2, r, CAP).unwrap();
            for seed in 0..2 {
                let t = trim(&sample_bond(&g, 0.99, seed).unwrap(), h("1/2"), seed, 10).unwrap();
                assert_eq!(t.removals().count(), 0);
                assert_eq!(t.final_interior_fraction(), 1.0);
            }
        }
    }

    #[test]
    fn alpha_hat_on_torus() {
        let g = gen_torus(2, 16, CAP).unwrap();
        // Best connected set with at most 6 vertices is the 2x3 block.
        assert_eq!(alpha_hat(&g, 6).unwrap(), Ratio::new(14, 6));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn forest_audit_with_two(seed in 0u64..10_000, p in 0.3f64..0.9) {
            let g = gen_tree_ball(3, 6, CAP).unwrap();
            let c = sample_bond_stream(&g, p, seed, 1).unwrap();
            let (_, audit) = forest_transport_audit(&c, h("0.3"), seed).unwrap();
            prop_assert!(audit.all_ok());
            prop_assert_eq!(audit.alh_failures(), 0);
        }
    }
}
