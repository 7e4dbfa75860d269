//! Ensemble experiments: replica batches, parameter sweeps, CSV output.
//!
//! A sweep is a cartesian product of axes (landscape seeds, group sizes,
//! connectivities, rewiring probabilities, imitation probabilities). Every
//! replica of every point derives its private RNG streams from the master
//! seed and its (point, replica) indices, so results are byte-reproducible
//! and independent of the number of worker threads.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Deserialize;

use crate::dynamics::{run_tracking_winner_degree, SearchConfig};
use crate::error::{Error, Result};
use crate::landscape::Landscape;
use crate::rng::{derive_seed, replica_seed, STREAM_DYNAMICS, STREAM_TOPOLOGY};
use crate::scalar::Scalar;
use crate::topology::{Topology, TopologyKind};

/// CSV schema; one row per sweep point. Cells that do not apply to a point
/// (m, beta) or are undefined (statistics without successes) stay empty.
pub const CSV_HEADER: &str =
    "topology,l,m,beta,p,n,k,landscape_seed,replicas,successes,mean_C,se_C,failure_rate,r_h";

/// Replica count for quick smoke runs.
pub const SMOKE_REPLICAS: u64 = 1_000;
/// Replica count matching the reference ensembles.
pub const FULL_REPLICAS: u64 = 100_000;

/// Default failure cutoff: a rescaled-cost ceiling of 10^7, i.e.
/// 10^7 * 2^n / l trials.
pub fn default_max_trials(n: u32, l: usize) -> u64 {
    ((10_000_000u64 << n) / l as u64).max(1)
}

/// Topology family plus its non-size parameters.
#[derive(Clone, Debug, PartialEq)]
pub enum TopologySpec {
    Ring { m: usize },
    Complete,
    Chain,
    Star,
    BarabasiAlbert,
    WattsStrogatz { m: usize, beta: f64 },
    Community { clusters: usize, p_in: f64, p_out: f64 },
}

impl TopologySpec {
    pub fn kind(&self) -> TopologyKind {
        match self {
            TopologySpec::Ring { .. } => TopologyKind::Ring,
            TopologySpec::Complete => TopologyKind::Complete,
            TopologySpec::Chain => TopologyKind::Chain,
            TopologySpec::Star => TopologyKind::Star,
            TopologySpec::BarabasiAlbert => TopologyKind::BarabasiAlbert,
            TopologySpec::WattsStrogatz { .. } => TopologyKind::WattsStrogatz,
            TopologySpec::Community { .. } => TopologyKind::Community,
        }
    }

    /// Whether construction consumes randomness; stochastic kinds are
    /// redrawn for every replica.
    pub fn is_stochastic(&self) -> bool {
        matches!(
            self,
            TopologySpec::BarabasiAlbert
                | TopologySpec::WattsStrogatz { .. }
                | TopologySpec::Community { .. }
        )
    }

    pub fn m(&self) -> Option<usize> {
        match self {
            TopologySpec::Ring { m } | TopologySpec::WattsStrogatz { m, .. } => Some(*m),
            _ => None,
        }
    }

    pub fn beta(&self) -> Option<f64> {
        match self {
            TopologySpec::WattsStrogatz { beta, .. } => Some(*beta),
            _ => None,
        }
    }

    pub fn build(&self, l: usize, seed: u64) -> Result<Topology> {
        match *self {
            TopologySpec::Ring { m } => Topology::ring(l, m),
            TopologySpec::Complete => Topology::complete(l),
            TopologySpec::Chain => Topology::chain(l),
            TopologySpec::Star => Topology::star(l),
            TopologySpec::BarabasiAlbert => Topology::barabasi_albert(l, seed),
            TopologySpec::WattsStrogatz { m, beta } => Topology::watts_strogatz(l, m, beta, seed),
            TopologySpec::Community { clusters, p_in, p_out } => {
                Topology::community(l, clusters, p_in, p_out, seed)
            }
        }
    }
}

/// One parameter point of a sweep.
#[derive(Clone, Debug)]
pub struct ExperimentPoint {
    pub topology: TopologySpec,
    pub l: usize,
    pub p: f64,
    pub replicas: u64,
    pub max_trials: u64,
    /// Position of this point within its sweep; part of seed derivation.
    pub point_index: u64,
}

/// Aggregate statistics of one point's replica ensemble.
#[derive(Clone, Debug)]
pub struct EnsembleReport {
    pub topology: String,
    pub l: usize,
    pub m: Option<usize>,
    pub beta: Option<f64>,
    pub p: f64,
    pub n: u32,
    pub k: u32,
    pub landscape_seed: u64,
    pub replicas: u64,
    pub successes: u64,
    /// Successful replicas whose winner was the highest-degree node.
    pub highest_degree_wins: u64,
    /// Mean rescaled cost over successful replicas.
    pub mean_c: Option<f64>,
    /// Standard error of the mean cost (needs at least two successes).
    pub se_c: Option<f64>,
    pub failure_rate: f64,
    /// l * P(highest-degree node wins); 1 means no degree advantage.
    pub r_h: Option<f64>,
    /// Excluded from CSV and from the determinism contract.
    pub wall_time: Duration,
}

impl EnsembleReport {
    pub fn csv_row(&self) -> String {
        fn opt<T: std::fmt::Display>(v: &Option<T>) -> String {
            v.as_ref().map(ToString::to_string).unwrap_or_default()
        }
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.topology,
            self.l,
            opt(&self.m),
            opt(&self.beta),
            self.p,
            self.n,
            self.k,
            self.landscape_seed,
            self.replicas,
            self.successes,
            opt(&self.mean_c),
            opt(&self.se_c),
            self.failure_rate,
            opt(&self.r_h),
        )
    }
}

/// Runs every replica of one point and aggregates. Deterministic in
/// (landscape, point, master_seed); replica outcomes are keyed by replica
/// index, so thread count and scheduling cannot change the report.
pub fn run_ensemble<S: Scalar>(
    ls: &Landscape<S>,
    point: &ExperimentPoint,
    master_seed: u64,
) -> Result<EnsembleReport> {
    if point.replicas < 1 {
        return Err(Error::Parameter("replicas must be at least 1".into()));
    }
    let started = Instant::now();
    let shared_topology = if point.topology.is_stochastic() {
        None
    } else {
        Some(point.topology.build(point.l, 0)?)
    };

    let outcomes = (0..point.replicas)
        .into_par_iter()
        .map(|r| {
            let seed = replica_seed(master_seed, point.point_index, r);
            let cfg = SearchConfig::new(point.p, point.max_trials, derive_seed(seed, STREAM_DYNAMICS))?;
            let outcome = match &shared_topology {
                Some(t) => run_tracking_winner_degree(ls, t, &cfg)?,
                None => {
                    let t = point.topology.build(point.l, derive_seed(seed, STREAM_TOPOLOGY))?;
                    run_tracking_winner_degree(ls, &t, &cfg)?
                }
            };
            Ok(outcome)
        })
        .collect::<Result<Vec<_>>>()
        .map_err(|e| with_point_context(e, point))?;

    let mut costs = Vec::with_capacity(outcomes.len());
    let mut hub_wins = 0u64;
    for o in &outcomes {
        if o.success {
            costs.push(o.rescaled_cost.expect("success carries a cost"));
            if o.winner_has_highest_degree == Some(true) {
                hub_wins += 1;
            }
        }
    }
    let successes = costs.len() as u64;
    let (mean_c, se_c) = mean_and_se(&costs);
    let r_h = (successes > 0)
        .then(|| point.l as f64 * hub_wins as f64 / successes as f64);

    Ok(EnsembleReport {
        topology: point.topology.kind().label().to_string(),
        l: point.l,
        m: point.topology.m(),
        beta: point.topology.beta(),
        p: point.p,
        n: ls.n(),
        k: ls.k(),
        landscape_seed: ls.seed(),
        replicas: point.replicas,
        successes,
        highest_degree_wins: hub_wins,
        mean_c,
        se_c,
        failure_rate: (point.replicas - successes) as f64 / point.replicas as f64,
        r_h,
        wall_time: started.elapsed(),
    })
}

fn with_point_context(e: Error, point: &ExperimentPoint) -> Error {
    let ctx = format!(
        "point {} ({} l={} p={})",
        point.point_index,
        point.topology.kind().label(),
        point.l,
        point.p
    );
    match e {
        Error::Parameter(m) => Error::Parameter(format!("{ctx}: {m}")),
        Error::Generation(m) => Error::Generation(format!("{ctx}: {m}")),
        Error::Numerical(m) => Error::Numerical(format!("{ctx}: {m}")),
        io @ Error::Io { .. } => io,
    }
}

/// Sample mean and standard error (unbiased variance); None without data,
/// SE None without at least two values.
fn mean_and_se(values: &[f64]) -> (Option<f64>, Option<f64>) {
    if values.is_empty() {
        return (None, None);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (Some(mean), None);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (Some(mean), Some((var / n).sqrt()))
}

/// Least-squares fit of ln(C) against ln(l / 2^n): returns (amplitude,
/// exponent) of C = amplitude * (l / 2^n)^exponent.
pub fn fit_power_law(n: u32, points: &[(f64, f64)]) -> Result<(f64, f64)> {
    if points.len() < 3 {
        return Err(Error::Parameter(format!(
            "power-law fit needs at least 3 points, got {}",
            points.len()
        )));
    }
    if points.iter().any(|&(l, c)| !(l > 0.0) || !(c > 0.0)) {
        return Err(Error::Parameter(
            "power-law fit needs strictly positive group sizes and costs".into(),
        ));
    }
    let scale = (n as f64).exp2();
    let logs: Vec<(f64, f64)> = points.iter().map(|&(l, c)| ((l / scale).ln(), c.ln())).collect();
    let m = logs.len() as f64;
    let mx = logs.iter().map(|&(x, _)| x).sum::<f64>() / m;
    let my = logs.iter().map(|&(_, y)| y).sum::<f64>() / m;
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for &(x, y) in &logs {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    if sxx == 0.0 {
        return Err(Error::Parameter(
            "power-law fit is degenerate: all points share one group size".into(),
        ));
    }
    let exponent = sxy / sxx;
    let amplitude = (my - exponent * mx).exp();
    Ok((amplitude, exponent))
}

fn default_p_axis() -> Vec<f64> {
    vec![0.0]
}

fn default_replicas() -> u64 {
    SMOKE_REPLICAS
}

/// Declarative sweep description, deserialized from a flat TOML file.
/// Axis keys accept either a scalar or a list. `master_seed` is required.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub n: u32,
    pub k: u32,
    /// One or several landscape realizations.
    #[serde(alias = "landscape_seed", deserialize_with = "one_or_many")]
    pub landscape_seeds: Vec<u64>,
    /// Topology kind label: ring | complete | chain | star |
    /// barabasi_albert | watts_strogatz | community.
    pub topology: String,
    #[serde(deserialize_with = "one_or_many")]
    pub l: Vec<usize>,
    /// Ring / small-world coordination numbers.
    #[serde(default, deserialize_with = "one_or_many_opt")]
    pub m: Option<Vec<usize>>,
    /// Small-world rewiring probabilities.
    #[serde(default, deserialize_with = "one_or_many_opt")]
    pub beta: Option<Vec<f64>>,
    /// Imitation probabilities; defaults to the independent-search case 0.
    #[serde(default = "default_p_axis", deserialize_with = "one_or_many")]
    pub p: Vec<f64>,
    pub clusters: Option<usize>,
    pub p_in: Option<f64>,
    pub p_out: Option<f64>,
    #[serde(default = "default_replicas")]
    pub replicas: u64,
    /// Trials before a replica counts as a failure; defaults per point to
    /// a rescaled-cost ceiling of 10^7.
    pub max_trials: Option<u64>,
    pub master_seed: u64,
    /// CSV destination; the CLI falls back to `sweep.csv`.
    pub output: Option<String>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

fn one_or_many<'de, D, T>(de: D) -> std::result::Result<Vec<T>, D::Error>
where
    D: serde::Deserializer<'de>,
    T: Deserialize<'de>,
{
    Ok(match OneOrMany::deserialize(de)? {
        OneOrMany::One(v) => vec![v],
        OneOrMany::Many(vs) => vs,
    })
}

fn one_or_many_opt<'de, D, T>(de: D) -> std::result::Result<Option<Vec<T>>, D::Error>
where
    D: serde::Deserializer<'de>,
    T: Deserialize<'de>,
{
    one_or_many(de).map(Some)
}

impl ExperimentSpec {
    pub fn parse(text: &str) -> Result<Self> {
        let spec: ExperimentSpec = toml::from_str(text)
            .map_err(|e| Error::Parameter(format!("spec file: {e}")))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let mut text = String::new();
        File::open(path)
            .and_then(|mut f| f.read_to_string(&mut text))
            .map_err(|e| Error::io(path.display().to_string(), e))?;
        Self::parse(&text)
    }

    fn validate(&self) -> Result<()> {
        if self.landscape_seeds.is_empty() {
            return Err(Error::Parameter("landscape_seeds must not be empty".into()));
        }
        if self.replicas < 1 {
            return Err(Error::Parameter("replicas must be at least 1".into()));
        }
        self.topology_axis()?;
        Ok(())
    }

    /// The topology variants this spec sweeps over (product of the m and
    /// beta axes where the kind uses them).
    fn topology_axis(&self) -> Result<Vec<TopologySpec>> {
        let need_m = || {
            self.m.clone().filter(|v| !v.is_empty()).ok_or_else(|| {
                Error::Parameter(format!("topology '{}' requires the m axis", self.topology))
            })
        };
        match self.topology.as_str() {
            "ring" => Ok(need_m()?.into_iter().map(|m| TopologySpec::Ring { m }).collect()),
            "complete" => Ok(vec![TopologySpec::Complete]),
            "chain" => Ok(vec![TopologySpec::Chain]),
            "star" => Ok(vec![TopologySpec::Star]),
            "barabasi_albert" => Ok(vec![TopologySpec::BarabasiAlbert]),
            "watts_strogatz" => {
                let betas = self.beta.clone().filter(|v| !v.is_empty()).ok_or_else(|| {
                    Error::Parameter("topology 'watts_strogatz' requires the beta axis".into())
                })?;
                let mut out = Vec::new();
                for m in need_m()? {
                    for &beta in &betas {
                        out.push(TopologySpec::WattsStrogatz { m, beta });
                    }
                }
                Ok(out)
            }
            "community" => {
                let (Some(clusters), Some(p_in), Some(p_out)) =
                    (self.clusters, self.p_in, self.p_out)
                else {
                    return Err(Error::Parameter(
                        "topology 'community' requires clusters, p_in and p_out".into(),
                    ));
                };
                Ok(vec![TopologySpec::Community { clusters, p_in, p_out }])
            }
            other => Err(Error::Parameter(format!("unknown topology kind '{other}'"))),
        }
    }

    /// Expands the axes into points. Order (and therefore point indices,
    /// which feed seed derivation): landscape seed, then l, then topology
    /// variant, then p.
    pub fn points(&self) -> Result<Vec<(u64, ExperimentPoint)>> {
        let variants = self.topology_axis()?;
        let mut out = Vec::new();
        let mut index = 0u64;
        for &landscape_seed in &self.landscape_seeds {
            for &l in &self.l {
                for variant in &variants {
                    for &p in &self.p {
                        out.push((
                            landscape_seed,
                            ExperimentPoint {
                                topology: variant.clone(),
                                l,
                                p,
                                replicas: self.replicas,
                                max_trials: self
                                    .max_trials
                                    .unwrap_or_else(|| default_max_trials(self.n, l)),
                                point_index: index,
                            },
                        ));
                        index += 1;
                    }
                }
            }
        }
        Ok(out)
    }
}

/// Runs the whole sweep. Landscapes are generated once per seed and shared
/// across that seed's points.
pub fn sweep(spec: &ExperimentSpec) -> Result<Vec<EnsembleReport>> {
    let points = spec.points()?;
    let mut reports = Vec::with_capacity(points.len());
    let mut current: Option<Landscape<f64>> = None;
    for (landscape_seed, point) in &points {
        let regenerate = current.as_ref().map(|ls| ls.seed() != *landscape_seed).unwrap_or(true);
        if regenerate {
            current = Some(Landscape::generate(spec.n, spec.k, *landscape_seed)?);
        }
        let ls = current.as_ref().expect("landscape generated above");
        reports.push(run_ensemble(ls, point, spec.master_seed)?);
    }
    Ok(reports)
}

/// Renders reports as the CSV document (header plus one row per point).
pub fn csv_string(reports: &[EnsembleReport]) -> String {
    let mut out = String::with_capacity(64 * (reports.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in reports {
        out.push_str(&r.csv_row());
        out.push('\n');
    }
    out
}

pub fn write_csv(reports: &[EnsembleReport], path: &Path) -> Result<()> {
    let mut file = File::create(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    file.write_all(csv_string(reports).as_bytes())
        .map_err(|e| Error::io(path.display().to_string(), e))
}
