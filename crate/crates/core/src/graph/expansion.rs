//! Edge boundaries, average induced degree, and exhaustive isoperimetric
//! and anchored-expansion profiles over connected vertex sets.

use super::Graph;
use crate::error::{Error, Result};
use num_rational::Ratio;

/// Subset enumerations refuse `max_size` above this unless overridden.
pub const DEFAULT_EXHAUSTIVE_CAP: usize = 20;

/// Edges with exactly one endpoint in `set`, sorted by id.
pub fn edge_boundary(g: &Graph, set: &[usize]) -> Vec<usize> {
    let mut inside = vec![false; g.vertex_count()];
    set.iter().for_each(|&v| inside[v] = true);
    let mut out: Vec<usize> = set
        .iter()
        .flat_map(|&v| {
            g.neighbors(v)
                .iter()
                .zip(g.incident_edges(v))
                .filter(|(w, _)| !inside[**w])
                .map(|(_, &e)| e)
                .collect::<Vec<_>>()
        })
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// Average degree of the subgraph induced by `k`, i.e. twice its edge count
/// over its size.
pub fn alpha_k(g: &Graph, k: &[usize]) -> Result<Ratio<u64>> {
    if k.is_empty() {
        return Err(Error::InvalidParameter("alpha_K of an empty set".into()));
    }
    let mut inside = vec![false; g.vertex_count()];
    k.iter().for_each(|&v| inside[v] = true);
    let degree_sum: usize = k
        .iter()
        .map(|&v| g.neighbors(v).iter().filter(|&&w| inside[w]).count())
        .sum();
    let mut distinct = k.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    if !induces_connected(g, &distinct, &inside) {
        return Err(Error::Disconnected("alpha_K needs a connected set".into()));
    }
    Ok(Ratio::new(degree_sum as u64, distinct.len() as u64))
}

fn induces_connected(g: &Graph, set: &[usize], inside: &[bool]) -> bool {
    let mut seen = vec![false; g.vertex_count()];
    let mut stack = vec![set[0]];
    seen[set[0]] = true;
    let mut count = 1;
    while let Some(u) = stack.pop() {
        for &w in g.neighbors(u) {
            if inside[w] && !seen[w] {
                seen[w] = true;
                count += 1;
                stack.push(w);
            }
        }
    }
    count == set.len()
}

/// Enumerates every connected vertex set of size at most `max_size` made of
/// `allowed` vertices exactly once (Wernicke's ESU scheme). With an
/// `anchor`, only sets containing it are produced. The visitor receives the
/// set (in insertion order) and its edge-boundary size in `g`.
///
/// Returns the number of sets visited, or [`Error::CapExceeded`] once more
/// than `budget` sets have been produced.
pub fn for_each_connected_set<A, F>(
    g: &Graph,
    allowed: A,
    anchor: Option<usize>,
    max_size: usize,
    budget: u64,
    mut visit: F,
) -> Result<u64>
where
    A: Fn(usize) -> bool,
    F: FnMut(&[usize], usize),
{
    let n = g.vertex_count();
    let mut state = Esu {
        g,
        in_set: vec![false; n],
        near: vec![0u32; n],
        set: Vec::with_capacity(max_size),
        boundary: 0,
        max_size,
        budget,
        visited: 0,
    };
    let roots: Vec<usize> = match anchor {
        Some(a) => vec![a],
        None => (0..n).collect(),
    };
    for root in roots {
        if !allowed(root) {
            continue;
        }
        let above = |u: usize| match anchor {
            Some(a) => u != a,
            None => u > root,
        };
        let ext: Vec<usize> = g
            .neighbors(root)
            .iter()
            .copied()
            .filter(|&u| above(u) && allowed(u))
            .collect();
        state.push(root);
        state.extend(ext, &above, &allowed, &mut visit)?;
        state.pop();
    }
    Ok(state.visited)
}

struct Esu<'g> {
    g: &'g Graph,
    in_set: Vec<bool>,
    /// Number of set members adjacent to each vertex.
    near: Vec<u32>,
    set: Vec<usize>,
    boundary: usize,
    max_size: usize,
    budget: u64,
    visited: u64,
}

impl Esu<'_> {
    fn push(&mut self, w: usize) {
        let inner = self.near[w] as usize;
        self.boundary = self.boundary + self.g.degree(w) - 2 * inner;
        self.in_set[w] = true;
        self.set.push(w);
        for &u in self.g.neighbors(w) {
            self.near[u] += 1;
        }
    }

    fn pop(&mut self) {
        let w = self.set.pop().unwrap();
        for &u in self.g.neighbors(w) {
            self.near[u] -= 1;
        }
        self.in_set[w] = false;
        let inner = self.near[w] as usize;
        self.boundary = self.boundary + 2 * inner - self.g.degree(w);
    }

    fn extend<B, A, F>(&mut self, mut ext: Vec<usize>, above: &B, allowed: &A, visit: &mut F) -> Result<()>
    where
        B: Fn(usize) -> bool,
        A: Fn(usize) -> bool,
        F: FnMut(&[usize], usize),
    {
        self.visited += 1;
        if self.visited > self.budget {
            return Err(Error::CapExceeded(format!("more than {} connected sets", self.budget)));
        }
        visit(&self.set, self.boundary);
        if self.set.len() == self.max_size {
            return Ok(());
        }
        while let Some(w) = ext.pop() {
            // Exclusive neighbours of w: outside the set and its neighbourhood.
            let mut next = ext.clone();
            for &u in self.g.neighbors(w) {
                if !self.in_set[u] && self.near[u] == 0 && above(u) && allowed(u) {
                    next.push(u);
                }
            }
            self.push(w);
            self.extend(next, above, allowed, visit)?;
            self.pop();
        }
        Ok(())
    }
}

/// Minimal edge-boundary ratio with its witness.
#[derive(Debug, Clone, PartialEq)]
pub struct IsoResult {
    pub value: Ratio<u64>,
    /// Sorted; lexicographically smallest among the minimisers.
    pub witness: Vec<usize>,
}

/// Tracks the best ratio with lexicographic tie-breaking on sorted sets.
struct Best {
    value: Option<Ratio<u64>>,
    witness: Vec<usize>,
}

impl Best {
    fn new() -> Best {
        Best {
            value: None,
            witness: Vec::new(),
        }
    }

    fn offer(&mut self, set: &[usize], boundary: usize) {
        let r = Ratio::new(boundary as u64, set.len() as u64);
        match self.value {
            Some(v) if r > v => {}
            Some(v) if r == v => {
                let mut s = set.to_vec();
                s.sort_unstable();
                if s < self.witness {
                    self.witness = s;
                }
            }
            _ => {
                self.value = Some(r);
                self.witness = set.to_vec();
                self.witness.sort_unstable();
            }
        }
    }
}

const ENUMERATION_BUDGET: u64 = 2_000_000_000;

fn admissible_size(g: &Graph) -> impl Fn(usize) -> bool {
    // Boundary-free finite graphs: only sets up to half the vertices count,
    // otherwise S = V gives ratio 0.
    let half = if g.boundary().is_empty() {
        g.vertex_count() / 2
    } else {
        usize::MAX
    };
    move |s| s <= half
}

/// Exhaustive edge-isoperimetric ratio over connected interior sets of size
/// at most `max_size` (refused above [`DEFAULT_EXHAUSTIVE_CAP`]).
pub fn iso_edge_bruteforce(g: &Graph, max_size: usize) -> Result<IsoResult> {
    iso_edge_with_cap(g, max_size, DEFAULT_EXHAUSTIVE_CAP)
}

pub fn iso_edge_with_cap(g: &Graph, max_size: usize, cap: usize) -> Result<IsoResult> {
    if max_size > cap {
        return Err(Error::CapExceeded(format!(
            "max_size {max_size} above exhaustive cap {cap}"
        )));
    }
    let size_ok = admissible_size(g);
    let mut best = Best::new();
    for_each_connected_set(
        g,
        |v| !g.is_boundary(v),
        None,
        max_size,
        ENUMERATION_BUDGET,
        |set, b| {
            if size_ok(set.len()) {
                best.offer(set, b)
            }
        },
    )?;
    match best.value {
        Some(value) => Ok(IsoResult {
            value,
            witness: best.witness,
        }),
        None => Err(Error::NoAdmissibleSet("no connected interior set fits".into())),
    }
}

/// Anchored expansion profile: for each `n`, the minimal ratio over
/// connected interior sets containing the basepoint with
/// `n <= |S| <= max_size`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpansionProfile {
    pub values: Vec<(usize, Ratio<u64>)>,
    pub witness_sets: Vec<Vec<usize>>,
}

impl ExpansionProfile {
    pub fn is_monotone(&self) -> bool {
        self.values.windows(2).all(|w| w[0].1 <= w[1].1)
    }
}

pub fn anchored_expansion_bruteforce(g: &Graph, max_size: usize) -> Result<ExpansionProfile> {
    anchored_expansion_with_cap(g, max_size, DEFAULT_EXHAUSTIVE_CAP)
}

pub fn anchored_expansion_with_cap(g: &Graph, max_size: usize, cap: usize) -> Result<ExpansionProfile> {
    if max_size > cap {
        return Err(Error::CapExceeded(format!(
            "max_size {max_size} above exhaustive cap {cap}"
        )));
    }
    let o = g.basepoint();
    if g.is_boundary(o) {
        return Err(Error::NoAdmissibleSet("basepoint lies on the boundary".into()));
    }
    let size_ok = admissible_size(g);
    let mut per_size: Vec<Best> = (0..=max_size).map(|_| Best::new()).collect();
    for_each_connected_set(
        g,
        |v| !g.is_boundary(v),
        Some(o),
        max_size,
        ENUMERATION_BUDGET,
        |set, b| {
            if size_ok(set.len()) {
                per_size[set.len()].offer(set, b)
            }
        },
    )?;
    // Suffix minima over sizes; ties keep the smaller size's witness order.
    let mut values = Vec::new();
    let mut witness_sets = Vec::new();
    let mut running: Option<(Ratio<u64>, Vec<usize>)> = None;
    let mut rev = Vec::new();
    for k in (1..=max_size).rev() {
        if let Some(v) = per_size[k].value {
            let replace = match &running {
                None => true,
                Some((r, w)) => v < *r || (v == *r && per_size[k].witness < *w),
            };
            if replace {
                running = Some((v, per_size[k].witness.clone()));
            }
        }
        if let Some((r, w)) = &running {
            rev.push((k, *r, w.clone()));
        }
    }
    if rev.is_empty() {
        return Err(Error::NoAdmissibleSet("no connected set around the basepoint".into()));
    }
    for (k, r, w) in rev.into_iter().rev() {
        values.push((k, r));
        witness_sets.push(w);
    }
    Ok(ExpansionProfile { values, witness_sets })
}

/// Sphere sizes around the basepoint and the growth-rate estimate
/// `min_n ζ_n^(1/n)` (spheres are submultiplicative in transitive graphs).
#[derive(Debug, Clone, PartialEq)]
pub struct GrowthProfile {
    /// `sphere_sizes[n - 1]` is the size of the sphere of radius `n`.
    pub sphere_sizes: Vec<u64>,
    pub gr_estimate: f64,
}

pub fn growth_profile<F>(family: F, r_max: usize) -> Result<GrowthProfile>
where
    F: Fn(usize) -> Result<Graph>,
{
    if r_max == 0 {
        return Err(Error::InvalidParameter("r_max must be positive".into()));
    }
    let g = family(r_max)?;
    let mut sphere_sizes = vec![0u64; r_max];
    for &d in g.base_distances() {
        let d = d as usize;
        if (1..=r_max).contains(&d) {
            sphere_sizes[d - 1] += 1;
        }
    }
    let gr_estimate = sphere_sizes
        .iter()
        .enumerate()
        .map(|(i, &z)| (z as f64).powf(1.0 / (i + 1) as f64))
        .fold(f64::INFINITY, f64::min);
    Ok(GrowthProfile {
        sphere_sizes,
        gr_estimate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{gen_grid_ball, gen_torus, gen_tree_ball, DEFAULT_VERTEX_CAP as CAP};

    fn path(n: usize) -> Graph {
        Graph::from_edges(n, (0..n - 1).map(|i| (i, i + 1)).collect(), 0, &[], "path").unwrap()
    }

    /// Brute-force connected-set enumeration over bitmasks.
    fn bitmask_connected_sets(g: &Graph, max_size: usize) -> Vec<Vec<usize>> {
        let n = g.vertex_count();
        let mut out = Vec::new();
        for mask in 1u32..(1 << n) {
            let set: Vec<usize> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
            if set.len() > max_size {
                continue;
            }
            let mut inside = vec![false; n];
            set.iter().for_each(|&v| inside[v] = true);
            if induces_connected(g, &set, &inside) {
                out.push(set);
            }
        }
        out.sort();
        out
    }

    #[test]
    fn boundary_edges() {
        let c4 = gen_torus(1, 4, CAP).unwrap();
        assert!(edge_boundary(&c4, &[]).is_empty());
        assert!(edge_boundary(&c4, &[0, 1, 2, 3]).is_empty());
        assert_eq!(edge_boundary(&c4, &[0, 1]).len(), 2);
    }

    #[test]
    fn alpha_values() {
        let p3 = path(3);
        assert_eq!(alpha_k(&p3, &[0, 1, 2]).unwrap(), Ratio::new(4, 3));
        let c4 = gen_torus(1, 4, CAP).unwrap();
        assert_eq!(alpha_k(&c4, &[0, 1, 2, 3]).unwrap(), Ratio::from_integer(2));
        assert!(alpha_k(&c4, &[]).is_err());
        assert!(alpha_k(&c4, &[0, 2]).is_err());
        let t = gen_tree_ball(3, 3, CAP).unwrap();
        let k = [0, 1, 4, 5, 2];
        assert_eq!(alpha_k(&t, &k).unwrap(), Ratio::new(2 * 4, 5));
    }

    #[test]
    fn esu_matches_bitmask_enumeration() {
        let g = gen_torus(2, 3, CAP).unwrap();
        let mut sets = Vec::new();
        for_each_connected_set(
            &g,
            |_| true,
            None,
            5,
            u64::MAX,
            |s, b| {
                let mut s = s.to_vec();
                s.sort_unstable();
                assert_eq!(b, edge_boundary(&g, &s).len());
                sets.push(s);
            },
        )
        .unwrap();
        sets.sort();
        assert_eq!(sets, bitmask_connected_sets(&g, 5));
    }

    #[test]
    fn anchored_esu_matches_filtered_bitmask() {
        let g = gen_grid_ball(2, 1, CAP).unwrap();
        let mut sets = Vec::new();
        for_each_connected_set(
            &g,
            |_| true,
            Some(4),
            6,
            u64::MAX,
            |s, _| {
                let mut s = s.to_vec();
                s.sort_unstable();
                sets.push(s);
            },
        )
        .unwrap();
        sets.sort();
        let expected: Vec<_> = bitmask_connected_sets(&g, 6)
            .into_iter()
            .filter(|s| s.contains(&4))
            .collect();
        assert_eq!(sets, expected);
    }

    #[test]
    fn budget_is_enforced() {
        let g = gen_torus(2, 4, CAP).unwrap();
        let r = for_each_connected_set(&g, |_| true, None, 6, 10, |_, _| {});
        assert!(matches!(r, Err(Error::CapExceeded(_))));
    }

    #[test]
    fn tree_iso_is_one_plus_two_over_k() {
        let g = gen_tree_ball(3, 5, CAP).unwrap();
        let r = iso_edge_bruteforce(&g, 8).unwrap();
        assert_eq!(r.value, Ratio::new(8 + 2, 8));
        let single = iso_edge_bruteforce(&g, 1).unwrap();
        assert_eq!(single.value, Ratio::from_integer(3));
        assert_eq!(single.witness, vec![0]);
    }

    #[test]
    fn iso_equals_degree_minus_max_alpha_on_regular_torus() {
        let g = gen_torus(2, 5, CAP).unwrap();
        let iso = iso_edge_bruteforce(&g, 6).unwrap();
        let mut best_alpha = Ratio::from_integer(0u64);
        let mut best_at_iso = Ratio::from_integer(0u64);
        for_each_connected_set(
            &g,
            |_| true,
            None,
            6,
            u64::MAX,
            |s, b| {
                let a = alpha_k(&g, s).unwrap();
                best_alpha = best_alpha.max(a);
                // Pointwise identity ∂S/|S| = d − α_S on d-regular graphs.
                assert_eq!(Ratio::new(b as u64, s.len() as u64) + a, Ratio::from_integer(4));
                if Ratio::new(b as u64, s.len() as u64) == iso.value {
                    best_at_iso = a;
                }
            },
        )
        .unwrap();
        assert_eq!(iso.value, Ratio::from_integer(4) - best_alpha);
        assert_eq!(best_at_iso, best_alpha);
    }

    #[test]
    fn grid_iso_decreases_with_size() {
        let g = gen_grid_ball(2, 4, CAP).unwrap();
        let small = iso_edge_bruteforce(&g, 4).unwrap().value;
        let large = iso_edge_bruteforce(&g, 9).unwrap().value;
        assert_eq!(small, Ratio::new(8, 4));
        assert_eq!(large, Ratio::new(12, 9));
        assert!(large < small);
    }

    #[test]
    fn cap_refusal_and_no_admissible() {
        let g = gen_tree_ball(3, 3, CAP).unwrap();
        assert!(matches!(iso_edge_bruteforce(&g, 21), Err(Error::CapExceeded(_))));
        let star = gen_tree_ball(3, 1, CAP).unwrap();
        assert_eq!(iso_edge_bruteforce(&star, 3).unwrap().witness, vec![0]);
        let g = Graph::from_edges(2, vec![(0, 1)], 0, &[0, 1], "edge").unwrap();
        assert!(matches!(iso_edge_bruteforce(&g, 2), Err(Error::NoAdmissibleSet(_))));
    }

    #[test]
    fn anchored_profile_on_path_and_tree() {
        let n = 21;
        let g = Graph::from_edges(n, (0..n - 1).map(|i| (i, i + 1)).collect(), 10, &[0, 20], "p").unwrap();
        let prof = anchored_expansion_bruteforce(&g, 8).unwrap();
        for &(k, v) in &prof.values {
            assert_eq!(v, Ratio::new(2, 8), "size floor {k}");
        }
        assert!(prof.is_monotone());
        let t = gen_tree_ball(3, 5, CAP).unwrap();
        let prof = anchored_expansion_bruteforce(&t, 7).unwrap();
        let iso = iso_edge_bruteforce(&t, 7).unwrap();
        assert!(prof.values.iter().all(|&(_, v)| v >= Ratio::from_integer(1)));
        assert!(prof.values[0].1 >= iso.value);
        assert!(prof.is_monotone());
    }

    #[test]
    fn anchored_profile_prefers_pendant_path() {
        // Binary tree of depth 3 under o = 0, plus a path of length 6 at o.
        let mut edges = Vec::new();
        for v in 1..15 {
            edges.push(((v - 1) / 2, v));
        }
        let mut boundary: Vec<usize> = (7..15).collect();
        let mut prev = 0;
        for v in 15..21 {
            edges.push((prev, v));
            prev = v;
        }
        boundary.push(20);
        let g = Graph::from_edges(21, edges, 0, &boundary, "pendant").unwrap();
        let prof = anchored_expansion_bruteforce(&g, 6).unwrap();
        // {o} plus path vertices 15..=19 has boundary 3 (two children of o, one path end).
        let best = &prof.witness_sets[0];
        assert_eq!(prof.values[0].1, Ratio::new(3, 6));
        assert!(best.contains(&19));
    }

    #[test]
    fn growth_of_tree_and_grid() {
        let prof = growth_profile(|r| gen_tree_ball(3, r, CAP), 10).unwrap();
        for (i, &z) in prof.sphere_sizes.iter().enumerate() {
            assert_eq!(z, 3 << i);
        }
        assert!((prof.gr_estimate - 2.0 * 1.5f64.powf(0.1)).abs() < 1e-12);
        let prof = growth_profile(|r| gen_grid_ball(2, r, CAP), 30).unwrap();
        assert_eq!(prof.sphere_sizes[4], 4 * 5);
        assert!(prof.gr_estimate < 1.2);
    }
}
