//! wasm bindings for the browser demo. Every operation works on the square
//! grid ball of a given radius, whose vertex `x + (2r+1) y` sits at (x, y).

use percolab::forests::{ust_free, ust_wired};
use percolab::graph::gen_grid_ball;
use percolab::percolation::{clusters, sample_bond, Config};
use percolab::trimming::{parse_ratio, trim};
use percolab::Graph;
use wasm_bindgen::prelude::*;

/// Larger balls are slow to draw and to sample in a browser tab.
pub const MAX_RADIUS: u32 = 60;

/// What the page draws: open edges as flat `u, v` pairs, one colour label
/// per vertex, and a line of text.
#[wasm_bindgen]
pub struct Picture {
    side: u32,
    edges: Vec<u32>,
    labels: Vec<u32>,
    summary: String,
}

#[wasm_bindgen]
impl Picture {
    #[wasm_bindgen(getter)]
    pub fn side(&self) -> u32 {
        self.side
    }

    #[wasm_bindgen(getter)]
    pub fn edges(&self) -> Vec<u32> {
        self.edges.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn labels(&self) -> Vec<u32> {
        self.labels.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn summary(&self) -> String {
        self.summary.clone()
    }
}

fn grid(radius: u32) -> Result<Graph, String> {
    if radius == 0 || radius > MAX_RADIUS {
        return Err(format!("radius must be between 1 and {MAX_RADIUS}"));
    }
    gen_grid_ball(2, radius as usize, 1 << 16).map_err(|e| e.to_string())
}

fn open_edges(c: &Config) -> Vec<u32> {
    let g = c.host();
    (0..g.edge_count())
        .filter(|&e| c.has_edge(e))
        .flat_map(|e| {
            let (u, v) = g.edges()[e];
            [u as u32, v as u32]
        })
        .collect()
}

/// Cluster labels, with 0 reserved for the basepoint's cluster.
fn cluster_labels(c: &Config) -> (Vec<u32>, usize) {
    let d = clusters(c);
    let o = d.label[c.host().basepoint()].unwrap_or(u32::MAX);
    let labels = d
        .label
        .iter()
        .map(|l| match *l {
            Some(l) if l == o => 0,
            Some(l) if l < o => l + 1,
            Some(l) => l,
            None => u32::MAX,
        })
        .collect();
    (labels, d.sizes[o as usize])
}

pub fn percolation_picture(radius: u32, p: f64, seed: u64) -> Result<Picture, String> {
    let g = grid(radius)?;
    let c = sample_bond(&g, p, seed).map_err(|e| e.to_string())?;
    let (labels, origin) = cluster_labels(&c);
    let d = clusters(&c);
    Ok(Picture {
        side: 2 * radius + 1,
        edges: open_edges(&c),
        summary: format!(
            "{} clusters, largest {}, basepoint cluster {} vertices{}",
            d.cluster_count(),
            d.max_size(),
            origin,
            if percolab::percolation::basepoint_reaches_boundary(&c) {
                ", reaches the boundary"
            } else {
                ""
            }
        ),
        labels,
    })
}

/// Labels are 0 for vertices that survive and k + 1 for vertices removed
/// in sweep k.
pub fn trim_picture(radius: u32, p: f64, h: &str, seed: u64) -> Result<Picture, String> {
    let g = grid(radius)?;
    let h = parse_ratio(h).map_err(|e| e.to_string())?;
    let c = sample_bond(&g, p, seed).map_err(|e| e.to_string())?;
    let trace = trim(&c, h, seed, 500).map_err(|e| e.to_string())?;
    let mut labels = vec![0u32; g.vertex_count()];
    for (n, sweep) in trace.iterations.iter().enumerate() {
        for k in &sweep.removed {
            for &v in &k.vertices {
                labels[v] = n as u32 + 1;
            }
        }
    }
    let removed = labels.iter().filter(|&&l| l > 0).count();
    Ok(Picture {
        side: 2 * radius + 1,
        edges: open_edges(&c),
        labels,
        summary: format!(
            "{removed} vertices removed in {} components over {} sweeps{}; surviving interior fraction {:.4}",
            trace.removals().count(),
            trace.iterations.len(),
            if trace.converged { "" } else { " (sweep limit reached)" },
            trace.final_interior_fraction()
        ),
    })
}

pub fn forest_picture(radius: u32, wired: bool, seed: u64) -> Result<Picture, String> {
    let g = grid(radius)?;
    let f = if wired {
        ust_wired(&g, seed, 0)
    } else {
        ust_free(&g, seed, 0)
    }
    .map_err(|e| e.to_string())?;
    let mut mask = vec![false; g.edge_count()];
    f.edges.iter().for_each(|&e| mask[e] = true);
    let c = Config::from_bond_mask(&g, mask).map_err(|e| e.to_string())?;
    let (labels, _) = cluster_labels(&c);
    Ok(Picture {
        side: 2 * radius + 1,
        edges: open_edges(&c),
        labels,
        summary: format!(
            "{} spanning {}: {} edges, basepoint degree {}",
            if wired { "wired" } else { "free" },
            if wired { "forest" } else { "tree" },
            f.edges.len(),
            f.degree(&g, g.basepoint())
        ),
    })
}

#[wasm_bindgen]
pub fn percolate(radius: u32, p: f64, seed: u64) -> Result<Picture, JsError> {
    percolation_picture(radius, p, seed).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = trimClusters)]
pub fn trim_clusters(radius: u32, p: f64, h: &str, seed: u64) -> Result<Picture, JsError> {
    trim_picture(radius, p, h, seed).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = spanningForest)]
pub fn spanning_forest(radius: u32, wired: bool, seed: u64) -> Result<Picture, JsError> {
    forest_picture(radius, wired, seed).map_err(|e| JsError::new(&e))
}
