use super::{Graph, UNREACHABLE};
use crate::error::{Error, Result};

/// Sphere-by-sphere description of a graph that looks the same from every
/// vertex of a given sphere around the basepoint: each vertex at distance
/// `k` has `back[k]` neighbours at `k - 1`, `lateral[k]` at `k` and
/// `forward[k]` at `k + 1`.
///
/// Simple random walk from the basepoint is uniform on each sphere in such
/// a graph, so its law lumps exactly onto the distance process. This lets
/// exact heat-kernel computations reach radii whose balls cannot be stored
/// (the 3-regular tree at radius 80 has ~10^24 vertices).
#[derive(Debug, Clone, PartialEq)]
pub struct SphereProfile {
    pub sizes: Vec<f64>,
    pub back: Vec<u32>,
    pub lateral: Vec<u32>,
    pub forward: Vec<u32>,
}

impl SphereProfile {
    /// The ball of radius `radius` in the `degree`-regular tree.
    pub fn regular_tree(degree: u32, radius: usize) -> SphereProfile {
        let mut p = SphereProfile {
            sizes: Vec::with_capacity(radius + 1),
            back: Vec::new(),
            lateral: Vec::new(),
            forward: Vec::new(),
        };
        for k in 0..=radius {
            p.sizes.push(if k == 0 {
                1.0
            } else {
                degree as f64 * ((degree - 1) as f64).powi(k as i32 - 1)
            });
            p.back.push(if k == 0 { 0 } else { 1 });
            p.lateral.push(0);
            p.forward.push(match k {
                _ if k == radius => 0,
                0 => degree,
                _ => degree - 1,
            });
        }
        p
    }

    /// Reads the profile off a materialised graph, failing when some sphere
    /// mixes vertices with different back/lateral/forward counts.
    pub fn from_graph(g: &Graph) -> Result<SphereProfile> {
        let dist = g.base_distances();
        if dist.contains(&UNREACHABLE) {
            return Err(Error::Disconnected("sphere profile of a disconnected graph".into()));
        }
        let r = *dist.iter().max().unwrap() as usize;
        let mut counts: Vec<Option<(u32, u32, u32)>> = vec![None; r + 1];
        let mut sizes = vec![0.0; r + 1];
        for v in 0..g.vertex_count() {
            let k = dist[v];
            let mut c = (0u32, 0u32, 0u32);
            for &w in g.neighbors(v) {
                match dist[w] as i64 - k as i64 {
                    -1 => c.0 += 1,
                    0 => c.1 += 1,
                    _ => c.2 += 1,
                }
            }
            let k = k as usize;
            sizes[k] += 1.0;
            match counts[k] {
                None => counts[k] = Some(c),
                Some(prev) if prev != c => {
                    return Err(Error::Precondition(format!(
                        "sphere {k} is not uniform around the basepoint"
                    )))
                }
                _ => {}
            }
        }
        let counts: Vec<(u32, u32, u32)> = counts.into_iter().map(Option::unwrap).collect();
        Ok(SphereProfile {
            sizes,
            back: counts.iter().map(|c| c.0).collect(),
            lateral: counts.iter().map(|c| c.1).collect(),
            forward: counts.iter().map(|c| c.2).collect(),
        })
    }

    pub fn radius(&self) -> usize {
        self.sizes.len() - 1
    }

    pub fn degree(&self, k: usize) -> u32 {
        self.back[k] + self.lateral[k] + self.forward[k]
    }

    /// Mass of each sphere after `t` steps of simple random walk from the
    /// basepoint.
    pub fn sphere_masses(&self, t: usize) -> Vec<f64> {
        let r = self.radius();
        let mut m = vec![0.0; r + 1];
        m[0] = 1.0;
        for _ in 0..t {
            let mut next = vec![0.0; r + 1];
            for k in 0..=r {
                if m[k] == 0.0 {
                    continue;
                }
                let d = self.degree(k) as f64;
                if d == 0.0 {
                    next[k] += m[k];
                    continue;
                }
                if k > 0 {
                    next[k - 1] += m[k] * self.back[k] as f64 / d;
                }
                next[k] += m[k] * self.lateral[k] as f64 / d;
                if k < r {
                    next[k + 1] += m[k] * self.forward[k] as f64 / d;
                }
            }
            m = next;
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{gen_grid_ball, gen_tree_ball, DEFAULT_VERTEX_CAP};

    #[test]
    fn tree_profile_from_graph_matches_closed_form() {
        let g = gen_tree_ball(3, 6, DEFAULT_VERTEX_CAP).unwrap();
        assert_eq!(
            SphereProfile::from_graph(&g).unwrap(),
            SphereProfile::regular_tree(3, 6)
        );
    }

    #[test]
    fn grid_is_not_spherically_uniform() {
        let g = gen_grid_ball(2, 3, DEFAULT_VERTEX_CAP).unwrap();
        assert!(SphereProfile::from_graph(&g).is_err());
        let line = gen_grid_ball(1, 5, DEFAULT_VERTEX_CAP).unwrap();
        let p = SphereProfile::from_graph(&line).unwrap();
        assert_eq!(p.sizes[3], 2.0);
    }

    #[test]
    fn masses_sum_to_one() {
        let p = SphereProfile::regular_tree(3, 30);
        let m = p.sphere_masses(25);
        assert!((m.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert_eq!(m[0], 0.0);
    }
}
