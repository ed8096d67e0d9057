mod config;
mod ops;

use clap::{Args, Parser, Subcommand};
use config::{ExperimentConfig, Operation, UsageError};
use ops::RunError;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "percolab",
    version,
    about = "Percolation and random-walk experiments on finite graph exhaustions"
)]
struct Cli {
    /// Seed for every stochastic operation.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (output does not depend on this).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<String>,
    /// Refuse graphs with more vertices than this.
    #[arg(long, global = true)]
    cap: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GraphArg {
    /// Graph spec, e.g. tree:3:r12, grid:2:r8, torus:2:16.
    #[arg(long)]
    graph: String,
}

#[derive(Subcommand)]
enum Command {
    /// Write a graph in edge-list format.
    Gen {
        #[command(flatten)]
        graph: GraphArg,
    },
    /// Bernoulli percolation trials.
    Percolate {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long)]
        p: Option<String>,
        #[arg(long)]
        trials: Option<String>,
        /// bond or site.
        #[arg(long)]
        mode: Option<String>,
        /// Print trial 0 as a configuration dump instead of CSV.
        #[arg(long)]
        dump: bool,
    },
    /// Trim a bond percolation configuration sweep by sweep.
    Trim {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long)]
        p: Option<String>,
        /// Threshold as a decimal or a fraction such as 1/10.
        #[arg(long)]
        h: Option<String>,
        #[arg(long)]
        sweeps: Option<String>,
    },
    /// Random-walk distance and speed estimates.
    Walk {
        #[command(flatten)]
        graph: GraphArg,
        /// simple, delayed or induced.
        #[arg(long)]
        mode: Option<String>,
        #[arg(long)]
        steps: Option<String>,
        #[arg(long)]
        trials: Option<String>,
        /// Walk on a bond percolation cluster instead of the full graph.
        #[arg(long)]
        p: Option<String>,
    },
    /// Effective resistance from the basepoint to the sphere, by radius.
    Resist {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long)]
        radii: Option<String>,
        /// Average over bond percolation clusters that reach the sphere.
        #[arg(long)]
        p: Option<String>,
        #[arg(long)]
        samples: Option<String>,
        #[arg(long)]
        retry_cap: Option<String>,
    },
    /// Basepoint degree in the free or wired uniform spanning forest.
    Forest {
        #[command(flatten)]
        graph: GraphArg,
        /// free or wired.
        #[arg(long)]
        bc: Option<String>,
        #[arg(long)]
        trials: Option<String>,
    },
    /// Free minus wired expected basepoint degree, by radius.
    OhdGap {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long)]
        radii: Option<String>,
        #[arg(long)]
        trials: Option<String>,
    },
    /// Search for entropy decreases of exp(tA) under off-diagonal increases.
    EntropyProbe {
        #[arg(long)]
        n: Option<String>,
        #[arg(long)]
        trials: Option<String>,
        /// Comma-separated times.
        #[arg(long)]
        t: Option<String>,
        #[arg(long)]
        step: Option<String>,
    },
    /// Run acceptance checks: `all` or one suite name.
    Suite { name: String },
    /// Run an experiment described by a `key = value` config file.
    Run {
        #[arg(long)]
        config: String,
    },
}

fn experiment(op: Operation, graph: Option<GraphArg>, pairs: &[(&str, Option<String>)]) -> ExperimentConfig {
    let mut c = ExperimentConfig::new(op);
    c.set("graph", graph.map(|g| g.graph));
    for (k, v) in pairs {
        c.set(k, v.clone());
    }
    c
}

enum Failure {
    Usage(String),
    Runtime(String),
}

fn emit(out: Option<&str>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure::Runtime(format!("writing {path}: {e}"))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn suite(name: &str, seed: u64, cap: usize, out: Option<&str>) -> Result<(), Failure> {
    let names = percolab::suite::suite_names();
    if !names.contains(&name) {
        return Err(Failure::Usage(format!(
            "unknown suite `{name}`; available: {}",
            names.join(", ")
        )));
    }
    let mut text = String::new();
    let ids: Vec<usize> = if name == "all" {
        (1..=percolab::suite::SUITES.len()).collect()
    } else {
        vec![percolab::suite::SUITES.iter().position(|s| s.0 == name).unwrap() + 1]
    };
    for id in ids {
        let r = percolab::suite::run_criterion(id, seed, cap).map_err(|e| Failure::Runtime(e.to_string()))?;
        println!("{r}");
        text.push_str(&format!("{r}\n"));
    }
    if let Some(path) = out {
        emit(Some(path), &text)?;
    }
    Ok(())
}

fn real_main(cli: Cli) -> Result<(), Failure> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Runtime(e.to_string()))?;
    }
    use Command::*;
    let mut config = match cli.command {
        Suite { name } => {
            let cap = cli.cap.unwrap_or(percolab::graph::DEFAULT_VERTEX_CAP);
            return suite(&name, cli.seed.unwrap_or(1), cap, cli.out.as_deref());
        }
        Run { config } => {
            let text =
                std::fs::read_to_string(&config).map_err(|e| Failure::Usage(format!("reading {config}: {e}")))?;
            ExperimentConfig::parse(&text).map_err(|UsageError(m)| Failure::Usage(format!("{config}: {m}")))?
        }
        Gen { graph } => experiment(Operation::Gen, Some(graph), &[]),
        Percolate {
            graph,
            p,
            trials,
            mode,
            dump,
        } => experiment(
            Operation::Percolate,
            Some(graph),
            &[
                ("p", p),
                ("trials", trials),
                ("mode", mode),
                ("dump", dump.then(|| "true".into())),
            ],
        ),
        Trim { graph, p, h, sweeps } => {
            experiment(Operation::Trim, Some(graph), &[("p", p), ("h", h), ("sweeps", sweeps)])
        }
        Walk {
            graph,
            mode,
            steps,
            trials,
            p,
        } => experiment(
            Operation::Walk,
            Some(graph),
            &[("mode", mode), ("steps", steps), ("trials", trials), ("p", p)],
        ),
        Resist {
            graph,
            radii,
            p,
            samples,
            retry_cap,
        } => experiment(
            Operation::Resist,
            Some(graph),
            &[
                ("radii", radii),
                ("p", p),
                ("samples", samples),
                ("retry_cap", retry_cap),
            ],
        ),
        Forest { graph, bc, trials } => experiment(Operation::Forest, Some(graph), &[("bc", bc), ("trials", trials)]),
        OhdGap { graph, radii, trials } => {
            experiment(Operation::OhdGap, Some(graph), &[("radii", radii), ("trials", trials)])
        }
        EntropyProbe { n, trials, t, step } => experiment(
            Operation::EntropyProbe,
            None,
            &[("n", n), ("trials", trials), ("t", t), ("step", step)],
        ),
    };
    config.seed = cli.seed.or(config.seed);
    config.cap = cli.cap.or(config.cap);
    if cli.out.is_some() {
        config.output = cli.out;
    }
    let text = ops::run(&config).map_err(|e| match e {
        RunError::Usage(UsageError(m)) => Failure::Usage(m),
        RunError::Failed(percolab::Error::Parse { line, column, message }) => {
            Failure::Usage(format!("line {line}, column {column}: {message}"))
        }
        RunError::Failed(e) => Failure::Runtime(e.to_string()),
    })?;
    emit(config.output.as_deref(), &text)
}

fn main() -> ExitCode {
    match real_main(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}
