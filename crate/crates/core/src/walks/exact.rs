//! Exact walk laws μ_t and the inequalities evaluated on them.

use super::walk_simple;
use crate::error::{invalid, Error, Result};
use crate::graph::{Graph, SphereProfile};
use crate::percolation::{cluster_of, Config};
use crate::rng;
use crate::stats::{Estimate, KahanSum};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::collections::HashMap;

/// μ_t: the law of simple random walk from the basepoint at time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct DistributionVector {
    pub t: usize,
    pub probs: Vec<f64>,
}

fn check_uncontaminated(g: &Graph, t: usize) -> Result<()> {
    match g.radius() {
        Some(r) if t >= r => Err(Error::Precondition(format!(
            "t = {t} reaches the boundary at distance {r}"
        ))),
        _ => Ok(()),
    }
}

fn step_f64(g: &Graph, m: &[f64]) -> Vec<f64> {
    let mut next = vec![0.0; m.len()];
    for (v, &x) in m.iter().enumerate() {
        if x == 0.0 {
            continue;
        }
        let nb = g.neighbors(v);
        if nb.is_empty() {
            next[v] += x;
            continue;
        }
        let share = x / nb.len() as f64;
        for &w in nb {
            next[w] += share;
        }
    }
    next
}

/// Exact μ_t in floating point. Refuses `t ≥ radius`, where the truncation
/// would show.
pub fn distribution_exact(g: &Graph, t: usize) -> Result<DistributionVector> {
    check_uncontaminated(g, t)?;
    let mut m = vec![0.0; g.vertex_count()];
    m[g.basepoint()] = 1.0;
    for _ in 0..t {
        m = step_f64(g, &m);
    }
    Ok(DistributionVector { t, probs: m })
}

/// Exact μ_t in rational arithmetic.
pub fn distribution_exact_rational(g: &Graph, t: usize) -> Result<Vec<BigRational>> {
    check_uncontaminated(g, t)?;
    let mut m = vec![BigRational::zero(); g.vertex_count()];
    m[g.basepoint()] = BigRational::one();
    for _ in 0..t {
        let mut next = vec![BigRational::zero(); m.len()];
        for (v, x) in m.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            let nb = g.neighbors(v);
            if nb.is_empty() {
                next[v] += x;
                continue;
            }
            let share = x / BigRational::from_integer(BigInt::from(nb.len()));
            for &w in nb {
                next[w] += &share;
            }
        }
        m = next;
    }
    Ok(m)
}

/// p_{2t}(o,o)^{1/(2t)} for t = 1..=t_max. Return probabilities at time 2t
/// only see vertices within distance t, so t_max < radius suffices.
pub fn spectral_radius_profile(g: &Graph, t_max: usize) -> Result<Vec<f64>> {
    check_uncontaminated(g, t_max)?;
    let o = g.basepoint();
    let mut m = vec![0.0; g.vertex_count()];
    m[o] = 1.0;
    let mut out = Vec::with_capacity(t_max);
    for t in 1..=t_max {
        m = step_f64(g, &m);
        m = step_f64(g, &m);
        out.push(m[o].powf(1.0 / (2 * t) as f64));
    }
    Ok(out)
}

/// Radial version of [`spectral_radius_profile`].
pub fn spectral_radius_profile_radial(p: &SphereProfile, t_max: usize) -> Result<Vec<f64>> {
    if t_max >= p.radius() {
        return Err(Error::Precondition(format!(
            "t_max = {t_max} reaches the boundary at distance {}",
            p.radius()
        )));
    }
    Ok((1..=t_max)
        .map(|t| p.sphere_masses(2 * t)[0].powf(1.0 / (2 * t) as f64))
        .collect())
}

/// Vertices grouped by distance with equal mass: `count` vertices at
/// `distance` each carrying `mass`.
#[derive(Debug, Clone, Copy)]
struct Cell {
    count: f64,
    distance: usize,
    mass: f64,
}

fn graph_cells(g: &Graph, t: usize) -> Result<Vec<Cell>> {
    let mu = distribution_exact(g, t)?;
    Ok(mu
        .probs
        .iter()
        .enumerate()
        .map(|(v, &mass)| Cell {
            count: 1.0,
            distance: g.distance_from_base(v) as usize,
            mass,
        })
        .collect())
}

fn radial_cells(p: &SphereProfile, t: usize) -> Result<Vec<Cell>> {
    if t >= p.radius() {
        return Err(Error::Precondition(format!(
            "t = {t} reaches the boundary at distance {}",
            p.radius()
        )));
    }
    Ok(p.sphere_masses(t)
        .iter()
        .enumerate()
        .map(|(k, &m)| Cell {
            count: p.sizes[k],
            distance: k,
            mass: m / p.sizes[k],
        })
        .collect())
}

fn xlogx(x: f64) -> f64 {
    if x > 0.0 {
        x * x.ln()
    } else {
        0.0
    }
}

fn cell_entropy<'a>(cells: impl IntoIterator<Item = &'a Cell>) -> f64 {
    let mut s = KahanSum::default();
    for c in cells {
        s.add(-c.count * xlogx(c.mass));
    }
    s.value()
}

/// H(μ_t)/t, with H = Σ −μ log μ; 0 at t = 0.
pub fn entropy_exact(g: &Graph, t: usize) -> Result<f64> {
    let cells = graph_cells(g, t)?;
    Ok(if t == 0 { 0.0 } else { cell_entropy(&cells) / t as f64 })
}

pub fn entropy_exact_radial(p: &SphereProfile, t: usize) -> Result<f64> {
    let cells = radial_cells(p, t)?;
    Ok(if t == 0 { 0.0 } else { cell_entropy(&cells) / t as f64 })
}

fn check_regular_interior(g: &Graph, t: usize) -> Result<()> {
    let d = g.degree(g.basepoint());
    let irregular = (0..g.vertex_count()).any(|v| (g.distance_from_base(v) as usize) < t && g.degree(v) != d);
    if irregular {
        Err(Error::Precondition(
            "walk sees vertices of different degrees; the bound needs a regular graph".into(),
        ))
    } else {
        Ok(())
    }
}

fn carne_cells(cells: &[Cell], t: usize) -> f64 {
    cells
        .iter()
        .map(|c| {
            let d = c.distance as f64;
            c.mass - 2.0 * (-(d * d) / (2.0 * t as f64)).exp()
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

/// max_v μ_t(v) − 2·exp(−dist(o,v)²/(2t)); nonpositive when the bound
/// holds. Refuses graphs whose degrees vary within reach of the walk.
pub fn carne_check(g: &Graph, t: usize) -> Result<f64> {
    if t == 0 {
        return invalid("t must be positive");
    }
    check_regular_interior(g, t)?;
    Ok(carne_cells(&graph_cells(g, t)?, t))
}

pub fn carne_check_radial(p: &SphereProfile, t: usize) -> Result<f64> {
    if t == 0 {
        return invalid("t must be positive");
    }
    if (0..t.min(p.radius())).any(|k| p.degree(k) != p.degree(0)) {
        return Err(Error::Precondition("profile is not regular within reach".into()));
    }
    Ok(carne_cells(&radial_cells(p, t)?, t))
}

/// Both sides of the ball-splitting entropy bounds at (t, ε), with
/// B = B_{⌊tε⌋} and D = deg o:
///
/// * concavity: Σ_{x∈B} −μ log μ ≤ μ(B) log(|B|/μ(B));
/// * ball: μ(B) log(|B|/μ(B)) ≤ log(D^{tε}/(1−ε));
/// * tail: Σ_{x∉B} −μ log μ ≤ ε log(D^t/ε).
///
/// The last two rely on μ(B) ≥ 1 − ε, recorded as `applicable`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConcavityReport {
    pub t: usize,
    pub eps: f64,
    pub ball_radius: usize,
    pub ball_mass: f64,
    pub ball_size: f64,
    pub applicable: bool,
    pub concavity: (f64, f64),
    pub ball: (f64, f64),
    pub tail: (f64, f64),
}

/// Slack for rounding in the comparisons.
const ARITH_SLACK: f64 = 1e-12;

impl ConcavityReport {
    pub fn concavity_holds(&self) -> bool {
        self.concavity.0 <= self.concavity.1 + ARITH_SLACK
    }

    pub fn ball_holds(&self) -> bool {
        self.ball.0 <= self.ball.1 + ARITH_SLACK
    }

    pub fn tail_holds(&self) -> bool {
        self.tail.0 <= self.tail.1 + ARITH_SLACK
    }

    /// The unconditional inequality, plus the conditional ones when
    /// applicable.
    pub fn holds(&self) -> bool {
        self.concavity_holds() && (!self.applicable || self.ball_holds() && self.tail_holds())
    }
}

fn concavity_cells(cells: &[Cell], degree: f64, t: usize, eps: f64) -> Result<ConcavityReport> {
    if !(eps > 0.0 && eps <= 1.0) {
        return invalid(format!("eps = {eps} must lie in (0, 1]"));
    }
    let radius = (t as f64 * eps + 1e-12).floor() as usize;
    let inside: Vec<&Cell> = cells.iter().filter(|c| c.distance <= radius).collect();
    let outside: Vec<&Cell> = cells.iter().filter(|c| c.distance > radius).collect();
    let mut mass = KahanSum::default();
    let mut size = 0.0;
    for c in &inside {
        mass.add(c.count * c.mass);
        size += c.count;
    }
    let mass = mass.value();
    let lhs_in = cell_entropy(inside.iter().copied());
    let mid = if mass > 0.0 { mass * (size / mass).ln() } else { 0.0 };
    let te = t as f64 * eps;
    let ball_rhs = if eps >= 1.0 {
        f64::INFINITY
    } else {
        te * degree.ln() - (1.0 - eps).ln()
    };
    let tail_rhs = eps * (t as f64 * degree.ln() - eps.ln());
    Ok(ConcavityReport {
        t,
        eps,
        ball_radius: radius,
        ball_mass: mass,
        ball_size: size,
        applicable: mass >= 1.0 - eps - ARITH_SLACK,
        concavity: (lhs_in, mid),
        ball: (mid, ball_rhs),
        tail: (cell_entropy(outside.iter().copied()), tail_rhs),
    })
}

pub fn entropy_concavity_bound(g: &Graph, t: usize, eps: f64) -> Result<ConcavityReport> {
    concavity_cells(&graph_cells(g, t)?, g.degree(g.basepoint()) as f64, t, eps)
}

pub fn entropy_concavity_bound_radial(p: &SphereProfile, t: usize, eps: f64) -> Result<ConcavityReport> {
    concavity_cells(&radial_cells(p, t)?, p.degree(0) as f64, t, eps)
}

/// Escape-region entropy at speed level ℓ: the μ_t-average of
/// −t⁻¹ log μ_t(x) over {x : dist(o,x) ≥ ℓt}, next to the Carne–Varopoulos
/// floor ℓ²/2 − (log 2)/t that every such x satisfies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EscapeEntropy {
    pub escaped_mass: f64,
    pub mean_rate: f64,
    pub floor: f64,
}

pub fn escape_entropy(p: &SphereProfile, t: usize, ell: f64) -> Result<EscapeEntropy> {
    if t == 0 {
        return invalid("t must be positive");
    }
    let cells = radial_cells(p, t)?;
    let mut mass = 0.0;
    let mut acc = 0.0;
    for c in cells
        .iter()
        .filter(|c| c.distance as f64 >= ell * t as f64 && c.mass > 0.0)
    {
        mass += c.count * c.mass;
        acc += c.count * c.mass * (-c.mass.ln() / t as f64);
    }
    Ok(EscapeEntropy {
        escaped_mass: mass,
        mean_rate: if mass > 0.0 { acc / mass } else { f64::NAN },
        floor: ell * ell / 2.0 - 2f64.ln() / t as f64,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct EntropyEstimate {
    pub t: usize,
    /// H(μ_t)/t from the exact law on the basepoint's cluster.
    pub exact: Option<f64>,
    /// −t⁻¹ log μ̂_t(X(t)) averaged over walks, μ̂_t from an independent
    /// batch of walks.
    pub plugin: Option<Estimate>,
    /// Walk endpoints never seen by the independent batch.
    pub undersampled: usize,
}

/// Both entropy estimators for simple random walk on the basepoint's
/// cluster of `cfg`.
pub fn entropy_estimate(cfg: &Config, t: usize, trials: usize, seed: u64) -> Result<EntropyEstimate> {
    if t == 0 {
        return Ok(EntropyEstimate {
            t,
            exact: Some(0.0),
            plugin: Some(Estimate::from_samples(&vec![0.0; trials.max(1)])),
            undersampled: 0,
        });
    }
    let sub = cfg.subgraph();
    let exact = entropy_exact(&sub, t).ok();
    let ends = |offset: u64| -> Result<Vec<usize>> {
        rng::par_map(trials, |i| walk_simple(cfg, t, seed, offset + i as u64))
            .into_iter()
            .map(|p| {
                let p = p?;
                if p.absorbed_at.is_some() {
                    Err(Error::Precondition(format!("walk reached the boundary before t = {t}")))
                } else {
                    Ok(*p.vertices.last().unwrap())
                }
            })
            .collect()
    };
    let reference = ends(1 << 40)?;
    let mut hist: HashMap<usize, usize> = HashMap::new();
    for v in reference {
        *hist.entry(v).or_default() += 1;
    }
    let mut samples = Vec::with_capacity(trials);
    let mut undersampled = 0;
    for v in ends(0)? {
        match hist.get(&v) {
            Some(&c) => samples.push(-(c as f64 / trials as f64).ln() / t as f64),
            None => undersampled += 1,
        }
    }
    Ok(EntropyEstimate {
        t,
        exact,
        plugin: (!samples.is_empty()).then(|| Estimate::from_samples(&samples)),
        undersampled,
    })
}

type RatMatrix = Vec<Vec<BigRational>>;

/// Largest state space for the exact chain audits.
pub const CHAIN_STATE_LIMIT: usize = 200;

/// Transition matrix of the delayed walk on the basepoint's cluster, with
/// the cluster's vertices (BFS order) as states. Each neighbour gets
/// 1/(D+1) with D the host degree bound, so the matrix is symmetric.
pub fn delayed_chain_matrix(cfg: &Config) -> Result<(Vec<usize>, RatMatrix)> {
    let g = cfg.host();
    let states = cluster_of(cfg, g.basepoint());
    if states.is_empty() {
        return Err(Error::Precondition("basepoint is not in the configuration".into()));
    }
    if states.len() > CHAIN_STATE_LIMIT {
        return Err(Error::CapExceeded(format!(
            "{} states above the limit of {CHAIN_STATE_LIMIT}",
            states.len()
        )));
    }
    let index: HashMap<usize, usize> = states.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let n = states.len();
    let mut p = vec![vec![BigRational::zero(); n]; n];
    for (i, &v) in states.iter().enumerate() {
        let share = BigRational::new(BigInt::one(), BigInt::from(g.degree_bound() + 1));
        let mut stay = BigRational::one();
        for w in cfg.neighbors(v) {
            p[i][index[&w]] += &share;
            stay -= &share;
        }
        p[i][i] += stay;
    }
    Ok((states, p))
}

/// Solves A X = B exactly by Gauss–Jordan elimination.
fn solve_rational(mut a: RatMatrix, mut b: RatMatrix) -> Result<RatMatrix> {
    let n = a.len();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero()).ok_or(Error::Singular)?;
        a.swap(col, pivot);
        b.swap(col, pivot);
        let inv = a[col][col].recip();
        for x in a[col].iter_mut() {
            *x *= &inv;
        }
        for x in b[col].iter_mut() {
            *x *= &inv;
        }
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone();
            let (pivot_a, pivot_b) = (a[col].clone(), b[col].clone());
            for (x, y) in a[r].iter_mut().zip(&pivot_a) {
                *x -= &f * y;
            }
            for (x, y) in b[r].iter_mut().zip(&pivot_b) {
                *x -= &f * y;
            }
        }
    }
    Ok(b)
}

/// Transition matrix of the induced walk on `vstar`:
/// P* = P_SS + P_SU (I − P_UU)⁻¹ P_US with U the rest of the cluster.
pub fn induced_chain_matrix(cfg: &Config, vstar: &[usize]) -> Result<RatMatrix> {
    let (states, p) = delayed_chain_matrix(cfg)?;
    let pos: HashMap<usize, usize> = states.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut s_idx = Vec::with_capacity(vstar.len());
    for v in vstar {
        s_idx.push(
            *pos.get(v)
                .ok_or_else(|| Error::Precondition(format!("vertex {v} of V* is outside the basepoint's cluster")))?,
        );
    }
    let mut is_star = vec![false; states.len()];
    s_idx.iter().for_each(|&i| is_star[i] = true);
    let u_idx: Vec<usize> = (0..states.len()).filter(|&i| !is_star[i]).collect();
    let mut out: RatMatrix = s_idx
        .iter()
        .map(|&i| s_idx.iter().map(|&j| p[i][j].clone()).collect())
        .collect();
    if u_idx.is_empty() {
        return Ok(out);
    }
    let a: RatMatrix = u_idx
        .iter()
        .map(|&i| {
            u_idx
                .iter()
                .map(|&j| {
                    let id = if i == j {
                        BigRational::one()
                    } else {
                        BigRational::zero()
                    };
                    id - &p[i][j]
                })
                .collect()
        })
        .collect();
    let b: RatMatrix = u_idx
        .iter()
        .map(|&i| s_idx.iter().map(|&j| p[i][j].clone()).collect())
        .collect();
    let x = solve_rational(a, b)?;
    for (r, &i) in s_idx.iter().enumerate() {
        for (c, row) in out[r].iter_mut().enumerate() {
            for (k, &u) in u_idx.iter().enumerate() {
                if !p[i][u].is_zero() {
                    *row += &p[i][u] * &x[k][c];
                }
            }
        }
    }
    Ok(out)
}

/// Every row and every column sums to exactly one and all entries are
/// nonnegative.
pub fn is_doubly_stochastic(m: &[Vec<BigRational>]) -> bool {
    let n = m.len();
    let one = BigRational::one();
    m.iter().all(|row| {
        row.len() == n && row.iter().all(|x| !x.is_negative_like()) && row.iter().sum::<BigRational>() == one
    }) && (0..n).all(|j| m.iter().map(|row| &row[j]).sum::<BigRational>() == one)
}

trait NonNegative {
    fn is_negative_like(&self) -> bool;
}

impl NonNegative for BigRational {
    fn is_negative_like(&self) -> bool {
        self < &BigRational::zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{gen_grid_ball, gen_torus, gen_tree_ball, DEFAULT_VERTEX_CAP as CAP};
    use crate::percolation::sample_bond;
    use proptest::prelude::*;

    fn binomial(n: u64, k: u64) -> f64 {
        (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
    }

    #[test]
    fn point_mass_and_neighbours() {
        let g = gen_tree_ball(3, 4, CAP).unwrap();
        let m0 = distribution_exact(&g, 0).unwrap();
        assert_eq!(m0.probs[0], 1.0);
        let m1 = distribution_exact(&g, 1).unwrap();
        for &w in g.neighbors(0) {
            assert_eq!(m1.probs[w], 1.0 / 3.0);
        }
        assert!(distribution_exact(&g, 4).is_err());
    }

    #[test]
    fn line_endpoint_mass() {
        let g = gen_grid_ball(1, 64, CAP).unwrap();
        let m = distribution_exact(&g, 10).unwrap();
        let far = (0..g.vertex_count()).find(|&v| g.distance_from_base(v) == 10).unwrap();
        assert_eq!(m.probs[far], 2f64.powi(-10));
        let exact = distribution_exact_rational(&g, 10).unwrap();
        assert_eq!(exact.iter().sum::<BigRational>(), BigRational::one());
    }

    #[test]
    fn rational_and_float_laws_agree() {
        let g = gen_grid_ball(2, 8, CAP).unwrap();
        let f = distribution_exact(&g, 7).unwrap();
        let r = distribution_exact_rational(&g, 7).unwrap();
        for (a, b) in f.probs.iter().zip(&r) {
            assert!((a - crate::trimming::big_to_f64(b)).abs() < 1e-15);
        }
        assert!((f.probs.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn line_return_probability_profile() {
        let g = gen_grid_ball(1, 200, CAP).unwrap();
        let prof = spectral_radius_profile(&g, 150).unwrap();
        for (i, &v) in prof.iter().enumerate() {
            let t = (i + 1) as f64;
            let exact = (binomial(2 * (i as u64 + 1), i as u64 + 1) / 4f64.powf(t)).powf(1.0 / (2.0 * t));
            assert!((v - exact).abs() < 1e-9);
            assert!(v >= 1.0 - (2.0 * t).ln() / t);
        }
        assert!(spectral_radius_profile(&g, 200).is_err());
    }

    #[test]
    fn torus_profile_tends_to_one() {
        let g = gen_torus(1, 4, CAP).unwrap();
        let prof = spectral_radius_profile(&g, 200).unwrap();
        // p_{2t}(o,o) = 1/2 on C₄.
        assert!((prof[199] - 0.5f64.powf(1.0 / 400.0)).abs() < 1e-12);
        assert!(prof.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn radial_matches_stored_tree() {
        let g = gen_tree_ball(3, 11, CAP).unwrap();
        let p = SphereProfile::regular_tree(3, 11);
        let a = spectral_radius_profile(&g, 10).unwrap();
        let b = spectral_radius_profile_radial(&p, 10).unwrap();
        assert!(a.iter().zip(&b).all(|(x, y)| (x - y).abs() < 1e-12));
        for t in 1..=10 {
            assert!((entropy_exact(&g, t).unwrap() - entropy_exact_radial(&p, t).unwrap()).abs() < 1e-12);
            assert!((carne_check(&g, t).unwrap() - carne_check_radial(&p, t).unwrap()).abs() < 1e-12);
            for eps in [0.2, 0.5, 0.9, 1.0] {
                let a = entropy_concavity_bound(&g, t, eps).unwrap();
                let b = entropy_concavity_bound_radial(&p, t, eps).unwrap();
                assert!((a.concavity.0 - b.concavity.0).abs() < 1e-10);
                assert!((a.tail.0 - b.tail.0).abs() < 1e-10);
                assert_eq!(a.applicable, b.applicable);
            }
        }
    }

    #[test]
    fn line_entropy_is_binomial() {
        let g = gen_grid_ball(1, 30, CAP).unwrap();
        let t = 20u64;
        let h: f64 = (0..=t)
            .map(|k| binomial(t, k) / 2f64.powi(t as i32))
            .map(|p| -p * p.ln())
            .sum();
        assert!((entropy_exact(&g, 20).unwrap() - h / 20.0).abs() < 1e-12);
        assert_eq!(entropy_exact(&g, 0).unwrap(), 0.0);
    }

    #[test]
    fn carne_examples() {
        let g = gen_grid_ball(1, 64, CAP).unwrap();
        assert!(carne_check(&g, 10).unwrap() < 0.0);
        let t3 = SphereProfile::regular_tree(3, 30);
        for t in 1..=20 {
            assert!(carne_check_radial(&t3, t).unwrap() <= 0.0);
        }
        let grid = gen_grid_ball(2, 3, CAP).unwrap();
        assert!(carne_check(&grid, 3).is_err());
    }

    #[test]
    fn concavity_examples() {
        let z = gen_grid_ball(1, 40, CAP).unwrap();
        let r = entropy_concavity_bound(&z, 20, 0.3).unwrap();
        assert!(r.applicable && r.holds());
        let full = entropy_concavity_bound(&z, 20, 1.0).unwrap();
        assert_eq!(full.tail.0, 0.0);
        assert!(full.holds());
        let t3 = SphereProfile::regular_tree(3, 40);
        let r = entropy_concavity_bound_radial(&t3, 16, 0.5).unwrap();
        assert!(r.applicable && r.holds(), "{r:?}");
    }

    #[test]
    fn escape_entropy_above_floor() {
        let t3 = SphereProfile::regular_tree(3, 30);
        let e = escape_entropy(&t3, 20, 1.0 / 3.0).unwrap();
        assert!(e.escaped_mass > 0.3);
        assert!(e.mean_rate >= e.floor);
        let h = entropy_exact_radial(&t3, 20).unwrap();
        assert!(h >= (1.0f64 / 3.0).powi(2) / 2.0);
    }

    #[test]
    fn plugin_entropy_close_to_exact_on_small_host() {
        let g = gen_torus(1, 7, CAP).unwrap();
        let e = entropy_estimate(&Config::full(&g), 6, 20_000, 3).unwrap();
        let plug = e.plugin.unwrap();
        assert_eq!(e.undersampled, 0);
        // The plug-in is biased by the finite reference batch; a loose match.
        assert!((plug.mean - e.exact.unwrap()).abs() < 0.01, "{plug:?} {:?}", e.exact);
    }

    #[test]
    fn delayed_chain_on_full_graph_holds_with_one_over_deg_plus_one() {
        let g = gen_torus(2, 3, CAP).unwrap();
        let (_, p) = delayed_chain_matrix(&Config::full(&g)).unwrap();
        assert_eq!(p[0][0], BigRational::new(BigInt::one(), BigInt::from(5)));
        assert!(is_doubly_stochastic(&p));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn chains_are_doubly_stochastic(seed in 0u64..10_000, pick in 0usize..1000) {
            let g = gen_grid_ball(2, 3, CAP).unwrap();
            let c = sample_bond(&g, 0.6, seed).unwrap();
            let (states, p) = delayed_chain_matrix(&c).unwrap();
            prop_assert!(is_doubly_stochastic(&p));
            let mut vstar: Vec<usize> = states.iter().copied().filter(|v| (v + pick) % 3 == 0).collect();
            if !vstar.contains(&g.basepoint()) {
                vstar.push(g.basepoint());
            }
            let q = induced_chain_matrix(&c, &vstar).unwrap();
            prop_assert!(is_doubly_stochastic(&q));
        }
    }
}
