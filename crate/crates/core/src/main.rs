//! Command-line front end: single ensembles, sweeps, the analytical
//! independent-search baseline, and landscape/topology inspection.
//!
//! Exit codes: 0 success, 1 invalid parameters, 2 generation or numerical
//! failure, 3 I/O failure.

use std::error::Error as StdError;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use imsearch::harness::{
    csv_string, default_max_trials, run_ensemble, sweep, write_csv, EnsembleReport,
    ExperimentPoint, ExperimentSpec, TopologySpec,
};
use imsearch::{
    build_matrix, independent_cost, neighbor_fitness_correlation, second_largest_eigenvalue,
    Error, Landscape64, Result, Topology,
};

#[derive(Parser)]
#[command(
    name = "imsearch",
    version,
    about = "Imitative-learning search by agent groups on NK fitness landscapes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one replica ensemble and print its statistics
    Run(RunArgs),
    /// Run a parameter sweep described by a TOML spec file and write CSV
    Sweep(SweepArgs),
    /// Print the analytical cost of independent search
    Baseline(BaselineArgs),
    /// Generate a landscape and print or dump its properties
    Landscape(LandscapeArgs),
    /// Generate a network and print or dump its structure
    Topology(TopologyArgs),
}

#[derive(Args)]
struct TopologyParams {
    /// Topology kind: ring | complete | chain | star | barabasi_albert |
    /// watts_strogatz | community
    #[arg(long)]
    topology: String,
    /// Number of agents (network nodes)
    #[arg(long)]
    l: usize,
    /// Coordination number for ring / watts_strogatz
    #[arg(long)]
    m: Option<usize>,
    /// Rewiring probability for watts_strogatz
    #[arg(long)]
    beta: Option<f64>,
    /// Cluster count for community
    #[arg(long)]
    clusters: Option<usize>,
    /// Within-cluster edge probability for community
    #[arg(long)]
    p_in: Option<f64>,
    /// Between-cluster edge probability for community
    #[arg(long)]
    p_out: Option<f64>,
}

impl TopologyParams {
    fn spec(&self) -> Result<TopologySpec> {
        let need_m = || {
            self.m.ok_or_else(|| {
                Error::Parameter(format!("topology '{}' requires --m", self.topology))
            })
        };
        match self.topology.as_str() {
            "ring" => Ok(TopologySpec::Ring { m: need_m()? }),
            "complete" => Ok(TopologySpec::Complete),
            "chain" => Ok(TopologySpec::Chain),
            "star" => Ok(TopologySpec::Star),
            "barabasi_albert" => Ok(TopologySpec::BarabasiAlbert),
            "watts_strogatz" => {
                let beta = self.beta.ok_or_else(|| {
                    Error::Parameter("topology 'watts_strogatz' requires --beta".into())
                })?;
                Ok(TopologySpec::WattsStrogatz { m: need_m()?, beta })
            }
            "community" => {
                let (Some(clusters), Some(p_in), Some(p_out)) =
                    (self.clusters, self.p_in, self.p_out)
                else {
                    return Err(Error::Parameter(
                        "topology 'community' requires --clusters, --p-in and --p-out".into(),
                    ));
                };
                Ok(TopologySpec::Community { clusters, p_in, p_out })
            }
            other => Err(Error::Parameter(format!("unknown topology kind '{other}'"))),
        }
    }
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    topology: TopologyParams,
    /// String length
    #[arg(long)]
    n: u32,
    /// Epistasis degree
    #[arg(long)]
    k: u32,
    /// Landscape realization seed
    #[arg(long)]
    landscape_seed: u64,
    /// Imitation probability
    #[arg(long, default_value_t = 0.0)]
    p: f64,
    #[arg(long, default_value_t = 1_000)]
    replicas: u64,
    /// Failure cutoff in trials; default caps the rescaled cost at 10^7
    #[arg(long)]
    max_trials: Option<u64>,
    /// Seed of the whole ensemble
    #[arg(long)]
    master_seed: u64,
    /// Also append the report to a CSV file
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    /// TOML spec file
    #[arg(long)]
    spec: PathBuf,
    /// CSV destination; overrides the spec's `output`
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct BaselineArgs {
    /// String length
    #[arg(long)]
    n: usize,
    /// Group sizes to price out
    #[arg(long, value_delimiter = ',', default_values_t = vec![1u64])]
    l: Vec<u64>,
}

#[derive(Args)]
struct LandscapeArgs {
    /// String length
    #[arg(long)]
    n: u32,
    /// Epistasis degree
    #[arg(long)]
    k: u32,
    /// Landscape realization seed
    #[arg(long)]
    seed: u64,
    /// Count local maxima by exhaustive enumeration (n <= 20)
    #[arg(long)]
    maxima: bool,
    /// Estimate the neighbor-fitness correlation from this many sampled
    /// landscapes
    #[arg(long)]
    correlation_samples: Option<u64>,
    /// Write the contribution table to this file
    #[arg(long)]
    dump: Option<PathBuf>,
}

#[derive(Args)]
struct TopologyArgs {
    #[command(flatten)]
    params: TopologyParams,
    /// Seed for stochastic kinds
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Print the degree histogram
    #[arg(long)]
    stats: bool,
    /// Write the edge list to this file
    #[arg(long)]
    dump: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            let mut source = e.source();
            while let Some(s) = source {
                eprintln!("  caused by: {s}");
                source = s.source();
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Baseline(args) => cmd_baseline(args),
        Command::Landscape(args) => cmd_landscape(args),
        Command::Topology(args) => cmd_topology(args),
    }
}

fn print_report(r: &EnsembleReport) {
    fn opt(v: Option<f64>) -> String {
        v.map(|v| v.to_string()).unwrap_or_else(|| "-".into())
    }
    println!(
        "topology={} l={} p={} n={} k={} landscape_seed={}",
        r.topology, r.l, r.p, r.n, r.k, r.landscape_seed
    );
    println!(
        "replicas={} successes={} failure_rate={}",
        r.replicas, r.successes, r.failure_rate
    );
    println!(
        "mean_C={} se_C={} r_h={} wall_time={:.3}s",
        opt(r.mean_c),
        opt(r.se_c),
        opt(r.r_h),
        r.wall_time.as_secs_f64()
    );
}

fn cmd_run(args: RunArgs) -> Result<()> {
    let ls = Landscape64::generate(args.n, args.k, args.landscape_seed)?;
    let point = ExperimentPoint {
        topology: args.topology.spec()?,
        l: args.topology.l,
        p: args.p,
        replicas: args.replicas,
        max_trials: args
            .max_trials
            .unwrap_or_else(|| default_max_trials(args.n, args.topology.l)),
        point_index: 0,
    };
    let report = run_ensemble(&ls, &point, args.master_seed)?;
    print_report(&report);
    if let Some(path) = args.csv {
        write_csv(std::slice::from_ref(&report), &path)?;
        println!("csv written to {}", path.display());
    }
    Ok(())
}

fn cmd_sweep(args: SweepArgs) -> Result<()> {
    let spec = ExperimentSpec::load(&args.spec)?;
    let reports = sweep(&spec)?;
    let path = args
        .output
        .or_else(|| spec.output.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("sweep.csv"));
    write_csv(&reports, &path)?;
    print!("{}", csv_string(&reports));
    eprintln!("csv written to {}", path.display());
    Ok(())
}

fn cmd_baseline(args: BaselineArgs) -> Result<()> {
    let tm = build_matrix::<f64>(args.n)?;
    let lambda = second_largest_eigenvalue(&tm)?;
    println!("n={}", args.n);
    println!("lambda={lambda}");
    println!("expected_trials={}", 1.0 / (1.0 - lambda));
    for &l in &args.l {
        println!("l={l} cost={}", independent_cost::<f64>(args.n, l)?);
    }
    Ok(())
}

fn cmd_landscape(args: LandscapeArgs) -> Result<()> {
    let ls = Landscape64::generate(args.n, args.k, args.seed)?;
    println!(
        "n={} k={} seed={} optimum={} optimum_fitness={}",
        ls.n(),
        ls.k(),
        ls.seed(),
        ls.global_optimum(),
        ls.global_optimum_fitness()
    );
    if args.maxima {
        println!("local_maxima={}", ls.local_maxima_count()?);
    }
    if let Some(samples) = args.correlation_samples {
        let r = neighbor_fitness_correlation::<f64>(args.n, args.k, samples, args.seed)?;
        println!("neighbor_correlation={r} samples={samples}");
    }
    if let Some(path) = args.dump {
        ls.dump_to_path(&path)?;
        println!("table written to {}", path.display());
    }
    Ok(())
}

fn cmd_topology(args: TopologyArgs) -> Result<()> {
    let topo: Topology = args.params.spec()?.build(args.params.l, args.seed)?;
    let hub = topo.highest_degree_node();
    println!(
        "kind={} l={} edges={} highest_degree_node={} degree={}",
        topo.kind().label(),
        topo.l(),
        topo.edge_count(),
        hub,
        topo.degree(hub)
    );
    if args.stats {
        for (degree, count) in topo.degree_histogram() {
            println!("degree={degree} nodes={count}");
        }
    }
    if let Some(path) = args.dump {
        topo.dump_to_path(&path)?;
        println!("edge list written to {}", path.display());
    }
    Ok(())
}
