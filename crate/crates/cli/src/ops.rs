//! Dispatch from an [`ExperimentConfig`] to the library, producing the
//! output text.

use crate::config::{ExperimentConfig, Operation, Params, UsageError};
use percolab::forests::{degree_report, ohd_gap, BoundaryCondition};
use percolab::graph::{write_edge_list, FamilySpec, GraphSpec, DEFAULT_VERTEX_CAP};
use percolab::heatkernel::monotonicity_probe;
use percolab::percolation::{bond_trials, sample_bond_stream, sample_site_stream, Config, TrialRecord};
use percolab::rng::{self, streams};
use percolab::stats::Estimate;
use percolab::trimming::{parse_ratio, trim};
use percolab::walks::{sample_paths, speed_estimate, transience_profile, walk_cayley_t3, ClusterSampler, WalkKind};
use percolab::{Error, Graph};
use std::fmt::Write;

#[derive(Debug)]
pub enum RunError {
    Usage(UsageError),
    Failed(Error),
}

impl From<UsageError> for RunError {
    fn from(e: UsageError) -> RunError {
        RunError::Usage(e)
    }
}

impl From<Error> for RunError {
    fn from(e: Error) -> RunError {
        RunError::Failed(e)
    }
}

/// 12 significant digits, never in exponent notation.
pub fn num(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}").to_lowercase();
    }
    let rounded: f64 = format!("{x:.11e}").parse().unwrap();
    format!("{rounded}")
}

fn opt(x: Option<f64>) -> String {
    x.map_or(String::new(), num)
}

struct Csv {
    text: String,
}

impl Csv {
    fn new(config: &ExperimentConfig, resolved: &[(String, String)], seed: Option<u64>, columns: &str) -> Csv {
        let mut text = String::new();
        writeln!(text, "# percolab {}", env!("CARGO_PKG_VERSION")).unwrap();
        writeln!(text, "# operation = {}", config.operation).unwrap();
        for (k, v) in resolved {
            writeln!(text, "# {k} = {v}").unwrap();
        }
        if let Some(s) = seed {
            writeln!(text, "# seed = {s}").unwrap();
        }
        writeln!(text, "{columns}").unwrap();
        Csv { text }
    }

    fn row(&mut self, cells: &[String]) {
        self.text.push_str(&cells.join(","));
        self.text.push('\n');
    }
}

struct Ctx<'a> {
    config: &'a ExperimentConfig,
    params: Params<'a>,
    cap: usize,
}

impl<'a> Ctx<'a> {
    fn seed(&self) -> Result<u64, UsageError> {
        self.config.seed.ok_or_else(|| {
            UsageError(format!(
                "operation {} is stochastic and needs a seed",
                self.config.operation
            ))
        })
    }

    fn spec(&mut self) -> Result<GraphSpec, UsageError> {
        let text = self.params.required("graph")?;
        GraphSpec::parse(&text).map_err(|e| self.params.locate("graph", e))
    }

    fn family(&mut self) -> Result<FamilySpec, UsageError> {
        let text = self.params.required("graph")?;
        FamilySpec::parse(&text).map_err(|e| self.params.locate("graph", e))
    }

    /// Builds the graph; seeded specs require a seed.
    fn graph(&mut self, spec: &GraphSpec) -> Result<Graph, RunError> {
        let seed = if seeded(spec) {
            self.seed()?
        } else {
            self.config.seed.unwrap_or(0)
        };
        Ok(spec.build(seed, self.cap)?)
    }

    fn csv(&self, seed: Option<u64>, columns: &str) -> Csv {
        let resolved: Vec<(String, String)> = self
            .params
            .resolved
            .iter()
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect();
        let mut resolved = resolved;
        resolved.push(("cap".into(), self.cap.to_string()));
        resolved.sort();
        Csv::new(self.config, &resolved, seed, columns)
    }
}

fn seeded(spec: &GraphSpec) -> bool {
    matches!(spec, GraphSpec::Gw { .. } | GraphSpec::Stretch { .. })
}

fn radius_of(spec: &GraphSpec) -> Option<usize> {
    match *spec {
        GraphSpec::Tree { radius, .. } | GraphSpec::Grid { radius, .. } | GraphSpec::TreeZ { radius, .. } => {
            Some(radius)
        }
        _ => None,
    }
}

pub fn run(config: &ExperimentConfig) -> Result<String, RunError> {
    let mut ctx = Ctx {
        config,
        params: Params::new(config),
        cap: config.cap.unwrap_or(DEFAULT_VERTEX_CAP),
    };
    match config.operation {
        Operation::Gen => gen(&mut ctx),
        Operation::Percolate => percolate(&mut ctx),
        Operation::Trim => trim_op(&mut ctx),
        Operation::Walk => walk(&mut ctx),
        Operation::Resist => resist(&mut ctx),
        Operation::Forest => forest(&mut ctx),
        Operation::OhdGap => gap(&mut ctx),
        Operation::EntropyProbe => entropy(&mut ctx),
    }
}

fn gen(ctx: &mut Ctx) -> Result<String, RunError> {
    let spec = ctx.spec()?;
    let g = ctx.graph(&spec)?;
    let mut out = String::new();
    writeln!(out, "# percolab {}", env!("CARGO_PKG_VERSION")).unwrap();
    writeln!(out, "# graph = {spec}").unwrap();
    if seeded(&spec) {
        writeln!(out, "# seed = {}", ctx.seed()?).unwrap();
    }
    out.push_str(&write_edge_list(&g));
    Ok(out)
}

fn percolate(ctx: &mut Ctx) -> Result<String, RunError> {
    let spec = ctx.spec()?;
    let p: f64 = ctx.params.get("p", 0.5)?;
    let trials: usize = ctx.params.get("trials", 1)?;
    let mode = ctx.params.get("mode", "bond".to_string())?;
    let dump: bool = ctx.params.get("dump", false)?;
    let seed = ctx.seed()?;
    let g = ctx.graph(&spec)?;
    let sample = |i: usize| -> Result<Config, Error> {
        match mode.as_str() {
            "site" => sample_site_stream(&g, p, seed, streams::SITE + 1 + i as u64),
            _ => sample_bond_stream(&g, p, seed, streams::BOND + 1 + i as u64),
        }
    };
    if mode != "bond" && mode != "site" {
        return Err(UsageError(format!("mode must be bond or site, found `{mode}`")).into());
    }
    if dump {
        return Ok(sample(0)?.to_text());
    }
    let records: Vec<TrialRecord> = if mode == "bond" {
        bond_trials(&g, p, trials, seed)?
    } else {
        rng::par_map(trials, |i| {
            let c = sample(i)?;
            let d = percolab::percolation::clusters(&c);
            Ok(TrialRecord {
                trial: i,
                seed,
                p,
                cluster_count: d.cluster_count(),
                max_cluster: d.max_size(),
                reach_boundary: percolab::percolation::basepoint_reaches_boundary(&c),
            })
        })
        .into_iter()
        .collect::<Result<_, Error>>()?
    };
    let mut csv = ctx.csv(Some(seed), "trial,seed,p,cluster_count,max_cluster,reach_boundary");
    for r in records {
        csv.row(&[
            r.trial.to_string(),
            r.seed.to_string(),
            num(r.p),
            r.cluster_count.to_string(),
            r.max_cluster.to_string(),
            u8::from(r.reach_boundary).to_string(),
        ]);
    }
    Ok(csv.text)
}

fn trim_op(ctx: &mut Ctx) -> Result<String, RunError> {
    let spec = ctx.spec()?;
    let p: f64 = ctx.params.get("p", 0.95)?;
    let h_text = ctx.params.get("h", "1/10".to_string())?;
    let h = parse_ratio(&h_text).map_err(|e| ctx.params.locate("h", e))?;
    let sweeps: usize = ctx.params.get("sweeps", 50)?;
    let seed = ctx.seed()?;
    let g = ctx.graph(&spec)?;
    let cfg = sample_bond_stream(&g, p, seed, streams::BOND)?;
    let trace = trim(&cfg, h, seed, sweeps)?;
    let mut csv = ctx.csv(Some(seed), "sweep,removed_count,theta_n,D_n,max_witness_ratio");
    for (n, removed, theta, d, witness) in trace.rows() {
        csv.row(&[n.to_string(), removed.to_string(), num(theta), num(d), opt(witness)]);
    }
    writeln!(csv.text, "# converged = {}", trace.converged).unwrap();
    Ok(csv.text)
}

fn dyadic(horizon: usize) -> Vec<usize> {
    let mut ts: Vec<usize> = std::iter::successors(Some(1usize), |t| t.checked_mul(2))
        .take_while(|&t| t <= horizon)
        .collect();
    if ts.last() != Some(&horizon) && horizon > 0 {
        ts.push(horizon);
    }
    ts
}

fn walk(ctx: &mut Ctx) -> Result<String, RunError> {
    let spec = ctx.spec()?;
    let mode = ctx.params.get("mode", "simple".to_string())?;
    let kind: WalkKind = mode.parse().map_err(|e| ctx.params.locate("mode", e))?;
    let steps: usize = ctx.params.get("steps", 100)?;
    let trials: usize = ctx.params.get("trials", 100)?;
    let p: Option<f64> = ctx.params.optional("p")?;
    let seed = ctx.seed()?;
    // A 3-regular tree ball too large to store is walked implicitly; the
    // walk cannot reach the sphere when steps < radius, so nothing changes.
    let implicit = match spec {
        GraphSpec::Tree { degree: 3, radius } if p.is_none() && kind != WalkKind::Induced && steps < radius => {
            matches!(spec.build(0, ctx.cap), Err(Error::SizeCap { .. }))
        }
        _ => false,
    };
    let paths = if implicit {
        rng::par_map(trials, |i| walk_cayley_t3(kind, steps, seed, i as u64))
            .into_iter()
            .collect::<Result<Vec<_>, Error>>()?
    } else {
        let g = ctx.graph(&spec)?;
        let cfg = match p {
            Some(p) => sample_bond_stream(&g, p, seed, streams::BOND)?,
            None => Config::full(&g),
        };
        sample_paths(&cfg, kind, steps, trials, seed)?
    };
    let mut csv = ctx.csv(Some(seed), "t,estimator,value,ci_low,ci_high,trials,seed");
    if implicit {
        writeln!(csv.text, "# host = implicit 3-regular tree").unwrap();
    }
    for t in dyadic(steps) {
        let d: Vec<f64> = paths
            .iter()
            .filter_map(|p| p.distances.get(t))
            .map(|&d| d as f64)
            .collect();
        if d.is_empty() {
            continue;
        }
        let dist = Estimate::from_samples(&d);
        let speed = Estimate::from_samples(&d.iter().map(|x| x / t as f64).collect::<Vec<_>>());
        for (name, e) in [("distance", dist), ("speed", speed)] {
            let (lo, hi) = e.ci(1.96);
            csv.row(&[
                t.to_string(),
                name.into(),
                num(e.mean),
                num(lo),
                num(hi),
                e.n.to_string(),
                seed.to_string(),
            ]);
        }
    }
    if let Ok(s) = speed_estimate(&paths) {
        csv.row(&[
            s.horizon.to_string(),
            "liminf_proxy".into(),
            num(s.liminf_proxy),
            String::new(),
            String::new(),
            s.used.to_string(),
            seed.to_string(),
        ]);
    }
    Ok(csv.text)
}

fn resist(ctx: &mut Ctx) -> Result<String, RunError> {
    let family = ctx.family()?;
    let radii: Vec<usize> = ctx.params.list("radii", "4,8,16,32")?;
    let p: Option<f64> = ctx.params.optional("p")?;
    let sampler = match p {
        Some(p) => Some(ClusterSampler {
            p,
            samples: ctx.params.get("samples", 20)?,
            retry_cap: ctx.params.get("retry_cap", 1000)?,
        }),
        None => None,
    };
    let seed = if sampler.is_some() { Some(ctx.seed()?) } else { None };
    let points = transience_profile(&family, &radii, sampler, seed.unwrap_or(0), ctx.cap)?;
    let mut csv = ctx.csv(seed, "radius,resistance,ci_low,ci_high,samples,discarded");
    for pt in points {
        let (lo, hi) = pt.value.ci(1.96);
        csv.row(&[
            pt.radius.to_string(),
            num(pt.value.mean),
            num(lo),
            num(hi),
            pt.samples.to_string(),
            pt.discarded.to_string(),
        ]);
    }
    Ok(csv.text)
}

fn forest(ctx: &mut Ctx) -> Result<String, RunError> {
    let spec = ctx.spec()?;
    let bc_text = ctx.params.get("bc", "wired".to_string())?;
    let bc: BoundaryCondition = bc_text.parse().map_err(|e| ctx.params.locate("bc", e))?;
    let trials: usize = ctx.params.get("trials", 1000)?;
    let seed = ctx.seed()?;
    let g = ctx.graph(&spec)?;
    let r = degree_report(&g, bc, trials, seed)?;
    let mut csv = ctx.csv(Some(seed), "radius,bc,trials,mean_deg,ci,gap");
    csv.row(&[
        radius_of(&spec).map_or(String::new(), |r| r.to_string()),
        bc.to_string(),
        r.trials.to_string(),
        num(r.estimate.mean),
        num(1.96 * r.estimate.std_err),
        String::new(),
    ]);
    Ok(csv.text)
}

fn gap(ctx: &mut Ctx) -> Result<String, RunError> {
    let family = ctx.family()?;
    let radii: Vec<usize> = ctx.params.list("radii", "4,8,12")?;
    let trials: usize = ctx.params.get("trials", 10_000)?;
    let seed = ctx.seed()?;
    let points = ohd_gap(&family, &radii, trials, seed, ctx.cap)?;
    let mut csv = ctx.csv(Some(seed), "radius,bc,trials,mean_deg,ci,gap");
    for pt in points {
        for (bc, e) in [(BoundaryCondition::Free, pt.free), (BoundaryCondition::Wired, pt.wired)] {
            csv.row(&[
                pt.radius.to_string(),
                bc.to_string(),
                trials.to_string(),
                num(e.mean),
                num(1.96 * e.std_err),
                num(pt.gap.mean),
            ]);
        }
    }
    Ok(csv.text)
}

fn entropy(ctx: &mut Ctx) -> Result<String, RunError> {
    let n: usize = ctx.params.get("n", 5)?;
    let trials: usize = ctx.params.get("trials", 10_000)?;
    let t: Vec<f64> = ctx.params.list("t", "0.1,1,10")?;
    let step: f64 = ctx.params.get("step", 1e-3)?;
    let seed = ctx.seed()?;
    let report = monotonicity_probe(n, trials, &t, step, seed)?;
    let mut csv = ctx.csv(Some(seed), "trial,t,pair,dH");
    for r in &report.rows {
        csv.row(&[
            r.trial.to_string(),
            num(r.t),
            format!("{}-{}", r.pair.0, r.pair.1),
            num(r.dh),
        ]);
    }
    writeln!(csv.text, "# rejected_candidates = {}", report.rejected_candidates).unwrap();
    writeln!(csv.text, "# violations = {}", report.violations.len()).unwrap();
    writeln!(csv.text, "# time_decreases = {}", report.time_decreases).unwrap();
    for v in &report.violations {
        for line in v.certificate().lines() {
            writeln!(csv.text, "# {line}").unwrap();
        }
    }
    Ok(csv.text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(num(1.0 / 3.0), "0.333333333333");
        assert_eq!(num(2.0), "2");
        assert_eq!(num(-1.25e-9), "-0.00000000125");
        assert_eq!(num(123_456_789.123_456_79), "123456789.123");
        assert_eq!(num(f64::NAN), "nan");
    }

    #[test]
    fn dyadic_grid_ends_at_horizon() {
        assert_eq!(dyadic(10), vec![1, 2, 4, 8, 10]);
        assert_eq!(dyadic(8), vec![1, 2, 4, 8]);
        assert!(dyadic(0).is_empty());
    }
}
