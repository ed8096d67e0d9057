use super::Graph;
use crate::error::{invalid, Error, Result};
use crate::rng::{self, streams};
use rand::Rng;

/// Default bound on generated vertex counts.
pub const DEFAULT_VERTEX_CAP: usize = 1 << 22;

fn check_cap(requested: u128, cap: usize) -> Result<()> {
    if requested > cap as u128 {
        Err(Error::SizeCap { requested, cap })
    } else {
        Ok(())
    }
}

/// The torus `(Z/side)^dim`: vertex-transitive, `2·dim`-regular, no boundary.
pub fn gen_torus(dim: usize, side: usize, cap: usize) -> Result<Graph> {
    if dim == 0 {
        return invalid("torus dimension must be at least 1");
    }
    if side < 3 {
        return invalid("torus side must be at least 3");
    }
    let n = (side as u128).checked_pow(dim as u32).ok_or(Error::SizeCap {
        requested: u128::MAX,
        cap,
    })?;
    check_cap(n, cap)?;
    let n = n as usize;
    let mut edges = Vec::with_capacity(n * dim);
    let mut stride = 1;
    for _ in 0..dim {
        for v in 0..n {
            let coord = (v / stride) % side;
            let w = if coord + 1 == side {
                v - coord * stride
            } else {
                v + stride
            };
            edges.push((v, w));
        }
        stride *= side;
    }
    Ok(Graph::from_edges(n, edges, 0, &[], format!("torus:{dim}:{side}"))?
        .with_degree_bound(2 * dim)
        .mark_transitive())
}

/// Ball of radius `radius` in the `degree`-regular tree, rooted at the
/// basepoint 0; the boundary is the sphere of radius `radius`.
pub fn gen_tree_ball(degree: usize, radius: usize, cap: usize) -> Result<Graph> {
    if degree < 2 {
        return invalid("tree degree must be at least 2");
    }
    let mut count: u128 = 1;
    let mut sphere: u128 = 1;
    for k in 1..=radius {
        sphere = sphere.saturating_mul(if k == 1 { degree } else { degree - 1 } as u128);
        count = count.saturating_add(sphere);
        check_cap(count, cap)?;
    }
    let n = count as usize;
    let mut edges = Vec::with_capacity(n.saturating_sub(1));
    let mut frontier = vec![0usize];
    let mut next_id = 1usize;
    for k in 1..=radius {
        let children = if k == 1 { degree } else { degree - 1 };
        let mut next = Vec::with_capacity(frontier.len() * children);
        for &p in &frontier {
            for _ in 0..children {
                edges.push((p, next_id));
                next.push(next_id);
                next_id += 1;
            }
        }
        frontier = next;
    }
    let boundary = if radius == 0 { Vec::new() } else { frontier };
    Ok(Graph::from_edges(n, edges, 0, &boundary, format!("tree:{degree}:r{radius}"))?.with_degree_bound(degree))
}

/// The ℓ∞ ball `[-radius, radius]^dim` of the lattice; the boundary is the
/// outer shell.
pub fn gen_grid_ball(dim: usize, radius: usize, cap: usize) -> Result<Graph> {
    if dim == 0 {
        return invalid("grid dimension must be at least 1");
    }
    let side = 2 * radius + 1;
    let n = (side as u128).checked_pow(dim as u32).ok_or(Error::SizeCap {
        requested: u128::MAX,
        cap,
    })?;
    check_cap(n, cap)?;
    let n = n as usize;
    let mut edges = Vec::with_capacity(n * dim);
    let mut boundary = Vec::new();
    for v in 0..n {
        let mut rest = v;
        let mut stride = 1;
        let mut on_shell = false;
        for _ in 0..dim {
            let c = rest % side;
            rest /= side;
            if c == 0 || c == side - 1 {
                on_shell = true;
            }
            if c + 1 < side {
                edges.push((v, v + stride));
            }
            stride *= side;
        }
        if on_shell && radius > 0 {
            boundary.push(v);
        }
    }
    let center = (0..dim)
        .fold((0usize, 1usize), |(acc, s), _| (acc + radius * s, s * side))
        .0;
    Ok(Graph::from_edges(n, edges, center, &boundary, format!("grid:{dim}:r{radius}"))?.with_degree_bound(2 * dim))
}

/// Graph-metric ball of radius `radius` in the product of the
/// `tree_degree`-regular tree with the integer line.
pub fn gen_tree_cross_z_ball(tree_degree: usize, radius: usize, cap: usize) -> Result<Graph> {
    if tree_degree < 2 {
        return invalid("tree degree must be at least 2");
    }
    // Tree vertices in BFS order with their depths and parents.
    let tree = gen_tree_ball(tree_degree, radius, cap)?;
    let depth: Vec<usize> = tree.base_distances().iter().map(|&d| d as usize).collect();
    let mut total: u128 = 0;
    for &a in &depth {
        total += (2 * (radius - a) + 1) as u128;
    }
    check_cap(total, cap)?;
    // offset[t] is the id of (t, -(radius - depth t)).
    let mut offset = Vec::with_capacity(depth.len());
    let mut next = 0usize;
    for &a in &depth {
        offset.push(next);
        next += 2 * (radius - a) + 1;
    }
    let id = |t: usize, z: i64| -> Option<usize> {
        let span = (radius - depth[t]) as i64;
        (z.abs() <= span).then(|| offset[t] + (z + span) as usize)
    };
    let mut edges = Vec::new();
    let mut boundary = Vec::new();
    for t in 0..depth.len() {
        let span = (radius - depth[t]) as i64;
        for z in -span..=span {
            let v = id(t, z).unwrap();
            if depth[t] + z.unsigned_abs() as usize == radius && radius > 0 {
                boundary.push(v);
            }
            if let Some(w) = id(t, z + 1) {
                edges.push((v, w));
            }
            for &c in tree.neighbors(t) {
                if depth[c] == depth[t] + 1 {
                    if let Some(w) = id(c, z) {
                        edges.push((v, w));
                    }
                }
            }
        }
    }
    let base = id(0, 0).unwrap();
    Ok(
        Graph::from_edges(next, edges, base, &boundary, format!("treez:{tree_degree}:r{radius}"))?
            .with_degree_bound(tree_degree + 2),
    )
}

/// Distribution of the edge lengths of a stretched graph.
#[derive(Debug, Clone, PartialEq)]
pub enum LengthLaw {
    Constant(usize),
    /// `P[L = k] = q (1 - q)^(k-1)` for `k >= 1`, mean `1/q`.
    Geometric(f64),
    /// Explicit finite support `(length, probability)`.
    Finite(Vec<(usize, f64)>),
}

impl LengthLaw {
    fn validate(&self) -> Result<()> {
        match self {
            LengthLaw::Constant(0) => invalid("edge length must be positive"),
            LengthLaw::Constant(_) => Ok(()),
            LengthLaw::Geometric(q) if !(*q > 0.0 && *q <= 1.0) => {
                invalid(format!("geometric parameter {q} outside (0, 1]"))
            }
            LengthLaw::Geometric(_) => Ok(()),
            LengthLaw::Finite(support) => {
                if support.is_empty() || support.iter().any(|&(k, p)| k == 0 || p < 0.0) {
                    return invalid("finite length law needs positive lengths and weights");
                }
                let total: f64 = support.iter().map(|&(_, p)| p).sum();
                if (total - 1.0).abs() > 1e-9 {
                    return invalid(format!("length law sums to {total}"));
                }
                Ok(())
            }
        }
    }

    fn sample(&self, u: f64) -> usize {
        match self {
            LengthLaw::Constant(k) => *k,
            LengthLaw::Geometric(q) if *q >= 1.0 => 1,
            LengthLaw::Geometric(q) => {
                // Inverse CDF; 1 - u lies in (0, 1].
                1 + ((1.0 - u).ln() / (1.0 - q).ln()).floor() as usize
            }
            LengthLaw::Finite(support) => {
                let mut acc = 0.0;
                for &(k, p) in support {
                    acc += p;
                    if u < acc {
                        return k;
                    }
                }
                support.last().unwrap().0
            }
        }
    }
}

/// Replaces every edge of `g` by a path of i.i.d. length drawn from `law`.
/// Original vertices keep their ids; subdivision vertices follow.
pub fn gen_stretched(g: &Graph, law: &LengthLaw, seed: u64, cap: usize) -> Result<Graph> {
    law.validate()?;
    let lengths: Vec<usize> = (0..g.edge_count())
        .map(|e| law.sample(rng::uniform(seed, streams::STRETCH, e as u64)))
        .collect();
    let extra: u128 = lengths.iter().map(|&l| (l - 1) as u128).sum();
    check_cap(g.vertex_count() as u128 + extra, cap)?;
    let mut next = g.vertex_count();
    let mut edges = Vec::with_capacity(g.edge_count() + extra as usize);
    for (e, &(u, v)) in g.edges().iter().enumerate() {
        let mut prev = u;
        for _ in 1..lengths[e] {
            edges.push((prev, next));
            prev = next;
            next += 1;
        }
        edges.push((prev, v));
    }
    let tag = match law {
        LengthLaw::Geometric(q) => format!("stretch({},geom:{q})", g.family()),
        LengthLaw::Constant(k) => format!("stretch({},const:{k})", g.family()),
        LengthLaw::Finite(_) => format!("stretch({},finite)", g.family()),
    };
    Ok(Graph::from_edges(next, edges, g.basepoint(), g.boundary(), tag)?.with_degree_bound(g.degree_bound().max(2)))
}

/// Offspring distribution with finite support `(children, probability)`.
#[derive(Debug, Clone, PartialEq)]
pub struct OffspringLaw(pub Vec<(usize, f64)>);

impl OffspringLaw {
    pub fn deterministic(k: usize) -> OffspringLaw {
        OffspringLaw(vec![(k, 1.0)])
    }

    pub fn mean(&self) -> f64 {
        self.0.iter().map(|&(k, p)| k as f64 * p).sum()
    }

    fn validate(&self) -> Result<()> {
        if self.0.is_empty() || self.0.iter().any(|&(_, p)| !(p >= 0.0)) {
            return invalid("offspring law needs nonnegative weights");
        }
        let total: f64 = self.0.iter().map(|&(_, p)| p).sum();
        if (total - 1.0).abs() > 1e-9 {
            return invalid(format!("offspring law sums to {total}"));
        }
        Ok(())
    }

    fn sample(&self, u: f64) -> usize {
        let mut acc = 0.0;
        for &(k, p) in &self.0 {
            acc += p;
            if u < acc {
                return k;
            }
        }
        self.0.last().unwrap().0
    }
}

/// A Galton–Watson tree conditioned to reach generation `depth`.
#[derive(Debug, Clone)]
pub struct GwTree {
    pub graph: Graph,
    /// Number of extinct attempts rejected before this sample.
    pub resamples: usize,
}

/// Samples a Galton–Watson tree truncated at `depth`, rejecting attempts
/// that die out before reaching it. The boundary is generation `depth`.
pub fn gen_gw_tree(law: &OffspringLaw, depth: usize, seed: u64, retry_cap: usize, cap: usize) -> Result<GwTree> {
    law.validate()?;
    let mut rng = rng::stream_rng(seed, streams::GALTON_WATSON, depth as u64);
    for attempt in 0..=retry_cap {
        let mut edges = Vec::new();
        let mut generation = vec![0usize];
        let mut next_id = 1usize;
        let mut survived = true;
        for _ in 0..depth {
            let mut children = Vec::new();
            for &p in &generation {
                let k = law.sample(rng.gen::<f64>());
                for _ in 0..k {
                    edges.push((p, next_id));
                    children.push(next_id);
                    next_id += 1;
                }
            }
            check_cap(next_id as u128, cap)?;
            if children.is_empty() {
                survived = false;
                break;
            }
            generation = children;
        }
        if survived {
            let boundary = if depth == 0 { Vec::new() } else { generation };
            let max_k = law.0.iter().filter(|e| e.1 > 0.0).map(|e| e.0).max().unwrap_or(0);
            let graph =
                Graph::from_edges(next_id, edges, 0, &boundary, format!("gw:d{depth}"))?.with_degree_bound(max_k + 1);
            return Ok(GwTree {
                graph,
                resamples: attempt,
            });
        }
    }
    Err(Error::RetryCap(format!(
        "no Galton–Watson sample survived to depth {depth} in {} attempts",
        retry_cap + 1
    )))
}

/// A finite window of the 3-regular tree organised by horocycles with
/// respect to a fixed end: every interior vertex has one parent one level
/// up (towards the end) and two children one level down.
#[derive(Debug, Clone)]
pub struct HorocyclicTree {
    pub graph: Graph,
    pub level: Vec<i64>,
    pub parent: Vec<Option<usize>>,
    pub depth: usize,
}

impl HorocyclicTree {
    /// Vertices of horocycle `n`, in id order.
    pub fn horocycle(&self, n: i64) -> Vec<usize> {
        (0..self.level.len()).filter(|&v| self.level[v] == n).collect()
    }

    pub fn children(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.graph
            .neighbors(v)
            .iter()
            .copied()
            .filter(move |&w| self.parent[w] == Some(v))
    }
}

/// Levels `-depth..=depth` below a single ancestor at level `-depth`; the
/// extreme levels form the boundary and the basepoint sits on level 0.
pub fn gen_horocyclic_tree(depth: usize, cap: usize) -> Result<HorocyclicTree> {
    if depth == 0 {
        return invalid("horocyclic window needs depth at least 1");
    }
    let levels = 2 * depth + 1;
    check_cap((1u128 << levels.min(127)) - 1, cap)?;
    let n = (1usize << levels) - 1;
    let mut edges = Vec::with_capacity(n - 1);
    let mut level = vec![0i64; n];
    let mut parent = vec![None; n];
    // Heap layout: children of v are 2v+1 and 2v+2.
    for v in 0..n {
        level[v] = (usize::BITS - (v + 1).leading_zeros()) as i64 - 1 - depth as i64;
        if v > 0 {
            let p = (v - 1) / 2;
            parent[v] = Some(p);
            edges.push((p, v));
        }
    }
    let boundary: Vec<usize> = (0..n).filter(|&v| level[v].unsigned_abs() as usize == depth).collect();
    let base = (1usize << depth) - 1;
    let graph = Graph::from_edges(n, edges, base, &boundary, format!("horo:d{depth}"))?.with_degree_bound(3);
    Ok(HorocyclicTree {
        graph,
        level,
        parent,
        depth,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    const CAP: usize = DEFAULT_VERTEX_CAP;

    fn check_shell(g: &Graph, r: u32) {
        g.validate().unwrap();
        for v in 0..g.vertex_count() {
            assert_eq!(g.is_boundary(v), g.distance_from_base(v) == r, "vertex {v}");
        }
    }

    #[test]
    fn torus_counts() {
        let c4 = gen_torus(1, 4, CAP).unwrap();
        assert_eq!((c4.vertex_count(), c4.edge_count()), (4, 4));
        assert!(c4.is_regular() && c4.degree(0) == 2);
        let t = gen_torus(2, 3, CAP).unwrap();
        assert_eq!((t.vertex_count(), t.edge_count()), (9, 18));
        assert!(t.is_regular() && t.degree(0) == 4);
        let big = gen_torus(2, 32, CAP).unwrap();
        assert_eq!((big.vertex_count(), big.edge_count()), (1024, 2048));
        big.validate().unwrap();
        assert!(big.boundary().is_empty() && big.is_transitive());
        assert!(gen_torus(2, 2, CAP).is_err());
        assert!(matches!(gen_torus(3, 100, 1000), Err(Error::SizeCap { .. })));
    }

    #[test]
    fn tree_ball_counts() {
        let g = gen_tree_ball(3, 2, CAP).unwrap();
        assert_eq!(g.vertex_count(), 10);
        assert_eq!(g.boundary().len(), 6);
        check_shell(&g, 2);
        let star = gen_tree_ball(3, 1, CAP).unwrap();
        assert_eq!(star.vertex_count(), 4);
        assert_eq!(star.boundary(), &[1, 2, 3]);
        let g = gen_tree_ball(4, 3, CAP).unwrap();
        assert_eq!(g.vertex_count(), 1 + 4 * (27 - 1) / 2);
        check_shell(&g, 3);
        assert!(!g.is_boundary(g.basepoint()));
    }

    #[test]
    fn grid_ball_counts() {
        let p = gen_grid_ball(1, 5, CAP).unwrap();
        assert_eq!(p.vertex_count(), 11);
        assert_eq!(p.boundary().len(), 2);
        assert_eq!(p.distance_from_base(0), 5);
        let g = gen_grid_ball(2, 1, CAP).unwrap();
        assert_eq!(g.vertex_count(), 9);
        assert_eq!(g.boundary().len(), 8);
        assert_eq!(g.basepoint(), 4);
        let g = gen_grid_ball(2, 20, CAP).unwrap();
        assert_eq!(g.vertex_count(), 41 * 41);
        g.validate().unwrap();
    }

    #[test]
    fn tree_cross_z() {
        let g = gen_tree_cross_z_ball(3, 0, CAP).unwrap();
        assert_eq!(g.vertex_count(), 1);
        let g = gen_tree_cross_z_ball(3, 1, CAP).unwrap();
        assert_eq!(g.vertex_count(), 6);
        assert_eq!(g.degree(g.basepoint()), 5);
        check_shell(&g, 1);
        let g = gen_tree_cross_z_ball(3, 2, CAP).unwrap();
        check_shell(&g, 2);
        // Sphere sizes of the product: sum over splits of tree and line spheres.
        let tree_sphere = |k: usize| if k == 0 { 1 } else { 3usize << (k - 1) };
        let line_sphere = |j: usize| if j == 0 { 1 } else { 2 };
        let expected: usize = (0..=2)
            .map(|n| (0..=n).map(|k| tree_sphere(k) * line_sphere(n - k)).sum::<usize>())
            .sum();
        assert_eq!(g.vertex_count(), expected);
        for v in 0..g.vertex_count() {
            if !g.is_boundary(v) {
                assert_eq!(g.degree(v), 5);
            }
        }
    }

    #[test]
    fn identity_and_double_stretch() {
        let c4 = gen_torus(1, 4, CAP).unwrap();
        let same = gen_stretched(&c4, &LengthLaw::Constant(1), 1, CAP).unwrap();
        assert_eq!(same.edges(), c4.edges());
        let c8 = gen_stretched(&c4, &LengthLaw::Constant(2), 1, CAP).unwrap();
        assert_eq!((c8.vertex_count(), c8.edge_count()), (8, 8));
        assert!(c8.is_regular() && c8.is_connected());
        assert!(gen_stretched(&c4, &LengthLaw::Geometric(0.0), 1, CAP).is_err());
    }

    #[test]
    fn gw_deterministic_binary() {
        let t = gen_gw_tree(&OffspringLaw::deterministic(2), 3, 9, 10, CAP).unwrap();
        assert_eq!(t.graph.vertex_count(), 15);
        assert_eq!(t.graph.boundary().len(), 8);
        assert_eq!(t.resamples, 0);
        let law = OffspringLaw(vec![(0, 0.5), (2, 0.5)]);
        for seed in 0..20 {
            let t = gen_gw_tree(&law, 1, seed, 1000, CAP).unwrap();
            assert_eq!(t.graph.degree(0), 2);
        }
        let dead = OffspringLaw::deterministic(0);
        assert!(matches!(gen_gw_tree(&dead, 2, 0, 5, CAP), Err(Error::RetryCap(_))));
    }

    #[test]
    fn horocyclic_window() {
        let h = gen_horocyclic_tree(1, CAP).unwrap();
        assert_eq!(h.graph.vertex_count(), 7);
        for v in h.horocycle(0) {
            assert_eq!(h.graph.degree(v), 3);
        }
        let h = gen_horocyclic_tree(3, CAP).unwrap();
        for n in -3..3 {
            assert_eq!(h.horocycle(n + 1).len(), 2 * h.horocycle(n).len());
        }
        for v in 0..h.graph.vertex_count() {
            if !h.graph.is_boundary(v) {
                let p = h.parent[v].unwrap();
                assert_eq!(h.level[p], h.level[v] - 1);
                assert_eq!(h.children(v).count(), 2);
            }
        }
        assert_eq!(h.level[h.graph.basepoint()], 0);
    }
}
