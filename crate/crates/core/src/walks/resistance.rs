//! Effective resistance with unit conductances.

use crate::error::{invalid, Error, Result};
use crate::graph::{FamilySpec, Graph};
use crate::percolation::{basepoint_reaches_boundary, sample_bond_stream, Config, Dsu};
use crate::rng::streams;
use crate::stats::Estimate;
use crate::trimming::big_to_f64;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap, HashMap, VecDeque};

/// Networks up to this size (and all forests) are solved exactly.
pub const EXACT_VERTEX_LIMIT: usize = 1000;

const CG_TOLERANCE: f64 = 1e-10;
const MAX_RESTARTS: usize = 8;

/// Unit-conductance multigraph; parallel edges add conductance, loops are
/// dropped.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Network {
    adj: Vec<BTreeMap<usize, u64>>,
}

impl Network {
    pub fn new(n: usize) -> Network {
        Network {
            adj: vec![BTreeMap::new(); n],
        }
    }

    pub fn from_graph(g: &Graph) -> Network {
        let mut net = Network::new(g.vertex_count());
        for &(u, v) in g.edges() {
            net.add_edge(u, v);
        }
        net
    }

    /// Open edges of a configuration.
    pub fn from_config(cfg: &Config) -> Network {
        let g = cfg.host();
        let mut net = Network::new(g.vertex_count());
        for (e, &(u, v)) in g.edges().iter().enumerate() {
            if cfg.has_edge(e) {
                net.add_edge(u, v);
            }
        }
        net
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn add_edge(&mut self, u: usize, v: usize) {
        if u != v {
            *self.adj[u].entry(v).or_default() += 1;
            *self.adj[v].entry(u).or_default() += 1;
        }
    }

    /// Total conductance between `u` and `v`.
    pub fn conductance(&self, u: usize, v: usize) -> u64 {
        self.adj[u].get(&v).copied().unwrap_or(0)
    }

    /// The component of `source` with `sinks` merged into one node: returns
    /// (adjacency, source index, sink index), or an error when no sink is
    /// reachable.
    fn reduce(&self, source: usize, sinks: &[usize]) -> Result<(Vec<BTreeMap<usize, u64>>, usize, usize)> {
        let n = self.vertex_count();
        if source >= n || sinks.iter().any(|&s| s >= n) {
            return invalid("vertex out of range");
        }
        if sinks.is_empty() {
            return invalid("sink set is empty");
        }
        let mut is_sink = vec![false; n];
        sinks.iter().for_each(|&s| is_sink[s] = true);
        if is_sink[source] {
            return invalid("source lies in the sink set");
        }
        // BFS that stops at sinks; the sink node gets the last index.
        let mut index = vec![usize::MAX; n];
        let mut order = vec![source];
        index[source] = 0;
        let mut queue = VecDeque::from([source]);
        let mut reached_sink = false;
        while let Some(v) = queue.pop_front() {
            for &w in self.adj[v].keys() {
                if is_sink[w] {
                    reached_sink = true;
                } else if index[w] == usize::MAX {
                    index[w] = order.len();
                    order.push(w);
                    queue.push_back(w);
                }
            }
        }
        if !reached_sink {
            return Err(Error::Disconnected(format!("no sink reachable from vertex {source}")));
        }
        let sink = order.len();
        let mut adj = vec![BTreeMap::new(); sink + 1];
        for (i, &v) in order.iter().enumerate() {
            for (&w, &c) in &self.adj[v] {
                let j = if is_sink[w] { sink } else { index[w] };
                *adj[i].entry(j).or_default() += c;
                if j == sink {
                    *adj[sink].entry(i).or_default() += c;
                }
            }
        }
        Ok((adj, 0, sink))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResistanceResult {
    pub value: f64,
    /// Set when the value came from exact elimination.
    pub exact: Option<BigRational>,
    pub source: usize,
    pub sink_set: Vec<usize>,
    /// ‖L x − b‖₂ of the iterative solve; 0 for exact results.
    pub residual_norm: f64,
}

impl Network {
    /// No parallel edges and no cycles.
    pub fn is_forest(&self) -> bool {
        let mut dsu = Dsu::new(self.vertex_count());
        for (u, row) in self.adj.iter().enumerate() {
            for (&v, &c) in row.range(u + 1..) {
                if c > 1 || !dsu.union(u, v) {
                    return false;
                }
            }
        }
        true
    }
}

/// R_eff(source, sink_set): exact when the relevant component has at most
/// [`EXACT_VERTEX_LIMIT`] vertices or the network is a forest, iterative
/// otherwise.
pub fn effective_resistance(net: &Network, source: usize, sinks: &[usize]) -> Result<ResistanceResult> {
    let (adj, _, _) = net.reduce(source, sinks)?;
    if adj.len() <= EXACT_VERTEX_LIMIT || net.is_forest() {
        exact_resistance(net, source, sinks)
    } else {
        iterative_resistance(net, source, sinks)
    }
}

/// Exact R_eff as a reduced fraction det(L_{−s,−t}) / det(L_{−t}), L the
/// Laplacian grounded at the merged sink t. Both determinants come out of
/// one sparse elimination (minimum-degree order, source last) modulo
/// 61-bit primes, and are rebuilt by Chinese remaindering past the
/// Hadamard bound Π L_ii.
pub fn exact_resistance(net: &Network, source: usize, sinks: &[usize]) -> Result<ResistanceResult> {
    let (adj, s, t) = net.reduce(source, sinks)?;
    let m = t;
    let diag: Vec<u64> = adj[..m].iter().map(|row| row.values().sum()).collect();
    let off: Vec<Vec<(usize, u64)>> = adj[..m]
        .iter()
        .map(|row| row.iter().filter(|(&j, _)| j < m).map(|(&j, &c)| (j, c)).collect())
        .collect();
    let order = min_degree_order(&off, s);
    let bound_bits: f64 = diag.iter().map(|&d| (d as f64).log2()).sum::<f64>() + 2.0;
    let mut num = Crt::default();
    let mut den = Crt::default();
    let mut p = (1u64 << 61) - 1;
    while num.bits() < bound_bits {
        p = prev_prime(p);
        if let Some((n, d)) = eliminate_mod(&diag, &off, &order, p) {
            num.push(n, p);
            den.push(d, p);
        }
    }
    if den.value.is_zero() {
        return Err(Error::Singular);
    }
    let r = BigRational::new(num.value, den.value);
    Ok(ResistanceResult {
        value: big_to_f64(&r),
        exact: Some(r),
        source,
        sink_set: sinks.to_vec(),
        residual_norm: 0.0,
    })
}

/// Symbolic minimum-degree elimination order with `last` forced to the end.
fn min_degree_order(off: &[Vec<(usize, u64)>], last: usize) -> Vec<usize> {
    let m = off.len();
    let mut g: Vec<BTreeSet<usize>> = off.iter().map(|row| row.iter().map(|&(j, _)| j).collect()).collect();
    let mut done = vec![false; m];
    let mut heap: BinaryHeap<Reverse<(usize, usize)>> = (0..m)
        .filter(|&v| v != last)
        .map(|v| Reverse((g[v].len(), v)))
        .collect();
    let mut order = Vec::with_capacity(m);
    while let Some(Reverse((deg, k))) = heap.pop() {
        if done[k] || deg != g[k].len() {
            continue;
        }
        done[k] = true;
        order.push(k);
        let nbrs: Vec<usize> = std::mem::take(&mut g[k]).into_iter().collect();
        for &i in &nbrs {
            g[i].remove(&k);
        }
        for (a, &i) in nbrs.iter().enumerate() {
            for &j in &nbrs[a + 1..] {
                g[i].insert(j);
                g[j].insert(i);
            }
        }
        for &i in &nbrs {
            if i != last {
                heap.push(Reverse((g[i].len(), i)));
            }
        }
    }
    order.push(last);
    order
}

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, p);
        }
        a = mul_mod(a, a, p);
        e >>= 1;
    }
    r
}

/// Deterministic Miller–Rabin for 64-bit integers.
fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &b in &BASES {
        if n.is_multiple_of(b) {
            return n == b;
        }
    }
    let (mut d, mut r) = (n - 1, 0);
    while d % 2 == 0 {
        d /= 2;
        r += 1;
    }
    'bases: for &b in &BASES {
        let mut x = pow_mod(b, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..r {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

fn prev_prime(mut n: u64) -> u64 {
    loop {
        n -= 1;
        if is_prime(n) {
            return n;
        }
    }
}

/// Product of the pivots before the last, and of all pivots, modulo `p`;
/// `None` when a pivot vanishes mod p.
fn eliminate_mod(diag: &[u64], off: &[Vec<(usize, u64)>], order: &[usize], p: u64) -> Option<(u64, u64)> {
    let m = diag.len();
    let mut d: Vec<u64> = diag.iter().map(|&x| x % p).collect();
    // Off-diagonal entries are stored negated-free: a_ij = −w_ij.
    let mut rows: Vec<HashMap<usize, u64>> = off
        .iter()
        .map(|row| row.iter().map(|&(j, c)| (j, (p - c % p) % p)).collect())
        .collect();
    let mut done = vec![false; m];
    let mut prefix = 1u64;
    for (step, &k) in order.iter().enumerate() {
        let pivot = d[k];
        if pivot == 0 {
            return None;
        }
        if step + 1 == order.len() {
            return Some((prefix, mul_mod(prefix, pivot, p)));
        }
        prefix = mul_mod(prefix, pivot, p);
        done[k] = true;
        let inv = pow_mod(pivot, p - 2, p);
        let nbrs: Vec<(usize, u64)> = rows[k].drain().filter(|&(j, _)| !done[j]).collect();
        for &(i, aik) in &nbrs {
            rows[i].remove(&k);
            let scaled = mul_mod(aik, inv, p);
            for &(j, akj) in &nbrs {
                let delta = mul_mod(scaled, akj, p);
                if i == j {
                    d[i] = (d[i] + p - delta) % p;
                } else {
                    let e = rows[i].entry(j).or_insert(0);
                    *e = (*e + p - delta) % p;
                }
            }
        }
    }
    None
}

/// Incremental Chinese remaindering of a nonnegative integer.
#[derive(Default)]
struct Crt {
    value: BigInt,
    modulus: Option<BigInt>,
}

impl Crt {
    fn bits(&self) -> f64 {
        self.modulus.as_ref().map_or(0.0, |m| m.bits() as f64 - 1.0)
    }

    fn push(&mut self, r: u64, p: u64) {
        let pb = BigInt::from(p);
        match self.modulus.take() {
            None => {
                self.value = BigInt::from(r);
                self.modulus = Some(pb);
            }
            Some(m) => {
                let m_mod = (&m % &pb).to_u64().unwrap();
                let x_mod = (&self.value % &pb).to_u64().unwrap();
                let k = mul_mod((r + p - x_mod) % p, pow_mod(m_mod, p - 2, p), p);
                self.value += &m * BigInt::from(k);
                self.modulus = Some(m * pb);
            }
        }
    }
}

/// Jacobi-preconditioned conjugate gradients on the grounded Laplacian,
/// run until ‖L x − e_source‖₂ ≤ 1e−10.
pub fn iterative_resistance(net: &Network, source: usize, sinks: &[usize]) -> Result<ResistanceResult> {
    let (adj, s, t) = net.reduce(source, sinks)?;
    // Unknowns are all nodes but the grounded sink, which is last.
    let m = t;
    debug_assert_eq!(t, adj.len() - 1);
    let diag: Vec<f64> = adj[..m].iter().map(|row| row.values().sum::<u64>() as f64).collect();
    let apply = |x: &[f64], out: &mut [f64]| {
        for i in 0..m {
            let mut acc = diag[i] * x[i];
            for (&j, &c) in &adj[i] {
                if j < m {
                    acc -= c as f64 * x[j];
                }
            }
            out[i] = acc;
        }
    };
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let mut x = vec![0.0; m];
    let mut r = vec![0.0; m];
    let mut z = vec![0.0; m];
    let mut p = vec![0.0; m];
    let mut ap = vec![0.0; m];
    let max_iter = 20 * m + 1000;
    let mut iterations = 0;
    let mut true_residual = 1.0;
    // The recurrence residual drifts from the true one in long runs, so CG
    // restarts from the true residual until that meets the tolerance.
    for _restart in 0..MAX_RESTARTS {
        apply(&x, &mut r);
        r.iter_mut().for_each(|v| *v = -*v);
        r[s] += 1.0;
        true_residual = dot(&r, &r).sqrt();
        if true_residual <= CG_TOLERANCE || iterations >= max_iter {
            break;
        }
        for i in 0..m {
            z[i] = r[i] / diag[i];
        }
        p.copy_from_slice(&z);
        let mut rz = dot(&r, &z);
        while iterations < max_iter {
            iterations += 1;
            apply(&p, &mut ap);
            let alpha = rz / dot(&p, &ap);
            for i in 0..m {
                x[i] += alpha * p[i];
                r[i] -= alpha * ap[i];
            }
            if dot(&r, &r).sqrt() <= CG_TOLERANCE / 10.0 {
                break;
            }
            for i in 0..m {
                z[i] = r[i] / diag[i];
            }
            let rz_next = dot(&r, &z);
            let beta = rz_next / rz;
            rz = rz_next;
            for i in 0..m {
                p[i] = z[i] + beta * p[i];
            }
        }
    }
    if !(true_residual <= CG_TOLERANCE) {
        return Err(Error::NoConvergence {
            residual: true_residual,
            iterations,
        });
    }
    Ok(ResistanceResult {
        value: x[s],
        exact: None,
        source,
        sink_set: sinks.to_vec(),
        residual_norm: true_residual,
    })
}

/// R_eff(o, ∂B_r) at one radius.
#[derive(Debug, Clone, PartialEq)]
pub struct TransiencePoint {
    pub radius: usize,
    /// Host value, or the mean over clusters that reach the boundary.
    pub value: Estimate,
    pub samples: usize,
    /// Sampled clusters that missed the boundary.
    pub discarded: usize,
}

/// Bond-percolation sampling for [`transience_profile`]: `samples` clusters
/// reaching the boundary, giving up after `retry_cap` misses per radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClusterSampler {
    pub p: f64,
    pub samples: usize,
    pub retry_cap: usize,
}

pub fn transience_profile(
    family: &FamilySpec,
    radii: &[usize],
    sampler: Option<ClusterSampler>,
    seed: u64,
    cap: usize,
) -> Result<Vec<TransiencePoint>> {
    if radii.windows(2).any(|w| w[0] >= w[1]) {
        return invalid("radii must be strictly increasing");
    }
    if radii.first() == Some(&0) {
        return invalid("radii must be positive");
    }
    let mut out = Vec::with_capacity(radii.len());
    for &r in radii {
        let g = family.build(r, cap)?;
        let o = g.basepoint();
        match sampler {
            None => {
                let res = effective_resistance(&Network::from_graph(&g), o, g.boundary())?;
                out.push(TransiencePoint {
                    radius: r,
                    value: Estimate {
                        mean: res.value,
                        std_err: 0.0,
                        n: 1,
                    },
                    samples: 1,
                    discarded: 0,
                });
            }
            Some(s) => {
                if s.samples == 0 {
                    return invalid("need at least one sample");
                }
                let mut values = Vec::with_capacity(s.samples);
                let mut discarded = 0;
                let mut trial = 0u64;
                while values.len() < s.samples {
                    let cfg = sample_bond_stream(&g, s.p, seed, streams::BOND + 1 + trial)?;
                    trial += 1;
                    if basepoint_reaches_boundary(&cfg) {
                        let res = effective_resistance(&Network::from_config(&cfg), o, g.boundary())?;
                        values.push(res.value);
                    } else {
                        discarded += 1;
                        if discarded > s.retry_cap {
                            return Err(Error::RetryCap(format!(
                                "{discarded} clusters missed the boundary at radius {r}"
                            )));
                        }
                    }
                }
                out.push(TransiencePoint {
                    radius: r,
                    value: Estimate::from_samples(&values),
                    samples: values.len(),
                    discarded,
                });
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{gen_grid_ball, gen_torus, gen_tree_ball, DEFAULT_VERTEX_CAP as CAP};
    use proptest::prelude::*;

    fn rational(a: i64, b: i64) -> BigRational {
        BigRational::new(BigInt::from(a), BigInt::from(b))
    }

    #[test]
    fn primes() {
        assert!(is_prime((1 << 61) - 1));
        assert!(!is_prime(561));
        assert_eq!(prev_prime(100), 97);
    }

    #[test]
    fn crt_rebuilds_large_integers() {
        let target = BigInt::from(3u8).pow(200);
        let mut c = Crt::default();
        let mut p = 1u64 << 61;
        while c.bits() < 330.0 {
            p = prev_prime(p);
            c.push((&target % BigInt::from(p)).to_u64().unwrap(), p);
        }
        assert_eq!(c.value, target);
    }

    #[test]
    fn small_examples() {
        let mut edge = Network::new(2);
        edge.add_edge(0, 1);
        assert_eq!(exact_resistance(&edge, 0, &[1]).unwrap().exact, Some(rational(1, 1)));
        let c4 = Network::from_graph(&gen_torus(1, 4, CAP).unwrap());
        assert_eq!(exact_resistance(&c4, 0, &[2]).unwrap().exact, Some(rational(1, 1)));
        assert_eq!(exact_resistance(&c4, 0, &[1]).unwrap().exact, Some(rational(3, 4)));
        let mut doubled = Network::new(2);
        doubled.add_edge(0, 1);
        doubled.add_edge(0, 1);
        assert_eq!(exact_resistance(&doubled, 0, &[1]).unwrap().value, 0.5);
    }

    #[test]
    fn errors() {
        let mut net = Network::new(3);
        net.add_edge(0, 1);
        assert!(matches!(
            effective_resistance(&net, 0, &[2]),
            Err(Error::Disconnected(_))
        ));
        assert!(effective_resistance(&net, 0, &[0]).is_err());
        assert!(effective_resistance(&net, 0, &[]).is_err());
    }

    #[test]
    fn line_ball_is_half_radius() {
        for r in [1usize, 5, 40, 700] {
            let g = gen_grid_ball(1, r, CAP).unwrap();
            let res = effective_resistance(&Network::from_graph(&g), g.basepoint(), g.boundary()).unwrap();
            assert_eq!(res.exact, Some(rational(r as i64, 2)));
        }
    }

    #[test]
    fn tree_ball_series_of_spheres() {
        for r in 1..=10usize {
            let g = gen_tree_ball(3, r, CAP).unwrap();
            let res = effective_resistance(&Network::from_graph(&g), 0, g.boundary()).unwrap();
            // Sphere k−1 to k: 3·2^{k−1} parallel unit edges.
            let series: BigRational = (1..=r).map(|k| rational(1, 3 << (k - 1))).sum();
            assert_eq!(res.exact, Some(series));
        }
    }

    #[test]
    fn iterative_matches_exact() {
        let g = gen_grid_ball(2, 6, CAP).unwrap();
        let net = Network::from_graph(&g);
        let a = exact_resistance(&net, g.basepoint(), g.boundary()).unwrap();
        let b = iterative_resistance(&net, g.basepoint(), g.boundary()).unwrap();
        assert!((a.value - b.value).abs() < 1e-9);
        assert!(b.residual_norm <= 1e-10);
        let t = gen_torus(2, 6, CAP).unwrap();
        let net = Network::from_graph(&t);
        let a = exact_resistance(&net, 0, &[21]).unwrap();
        let b = iterative_resistance(&net, 0, &[21]).unwrap();
        assert!((a.value - b.value).abs() < 1e-9);
    }

    #[test]
    fn host_profiles() {
        let z = transience_profile(&FamilySpec::Grid(1), &[4, 8], None, 0, CAP).unwrap();
        assert_eq!(z[1].value.mean, 4.0);
        let t = transience_profile(&FamilySpec::Tree(3), &[12], None, 0, CAP).unwrap();
        assert!((t[0].value.mean - 2.0 / 3.0).abs() < 1e-3);
        assert!(transience_profile(&FamilySpec::Grid(1), &[4, 4], None, 0, CAP).is_err());
    }

    #[test]
    fn cluster_profile_and_retry_cap() {
        let s = ClusterSampler {
            p: 0.9,
            samples: 5,
            retry_cap: 1000,
        };
        let pts = transience_profile(&FamilySpec::Tree(3), &[6, 8], Some(s), 1, CAP).unwrap();
        for pt in &pts {
            assert_eq!(pt.samples, 5);
            assert!(pt.value.mean >= 2.0 / 3.0 * 0.5);
        }
        let hopeless = ClusterSampler {
            p: 0.05,
            samples: 1,
            retry_cap: 10,
        };
        assert!(matches!(
            transience_profile(&FamilySpec::Grid(2), &[10], Some(hopeless), 1, CAP),
            Err(Error::RetryCap(_))
        ));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn rayleigh_monotone(extra in prop::collection::vec((0usize..25, 0usize..25), 1..6), sink in 1usize..25) {
            let g = gen_grid_ball(2, 2, CAP).unwrap();
            let o = g.basepoint();
            prop_assume!(sink != o);
            let mut net = Network::from_graph(&g);
            let mut prev = exact_resistance(&net, o, &[sink]).unwrap().exact.unwrap();
            for (u, v) in extra {
                net.add_edge(u, v);
                let now = exact_resistance(&net, o, &[sink]).unwrap().exact.unwrap();
                prop_assert!(now <= prev);
                prev = now;
            }
        }
    }
}
