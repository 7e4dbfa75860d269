//! Influence networks: undirected connected graphs over L agents.
//!
//! Every constructor returns a validated topology (no self-loops, no
//! duplicate edges, symmetric adjacency, connected, ids 0..l-1). Stochastic
//! kinds resample on a disconnected draw with a derived attempt seed, so
//! construction stays deterministic in (parameters, seed).

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use rand::Rng;

use crate::error::{Error, Result};
use crate::rng::{derive_seed, rng_from_seed};

/// Safety cap for small-world resampling; an unbounded loop would turn
/// pathological parameters into a hang instead of an error.
const MAX_WS_ATTEMPTS: u64 = 100_000;
/// Attempt cap for the community generator before reporting failure.
const MAX_COMMUNITY_ATTEMPTS: u64 = 1_000;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum TopologyKind {
    Ring,
    Complete,
    Chain,
    Star,
    BarabasiAlbert,
    WattsStrogatz,
    Community,
}

impl TopologyKind {
    pub fn label(&self) -> &'static str {
        match self {
            TopologyKind::Ring => "ring",
            TopologyKind::Complete => "complete",
            TopologyKind::Chain => "chain",
            TopologyKind::Star => "star",
            TopologyKind::BarabasiAlbert => "barabasi_albert",
            TopologyKind::WattsStrogatz => "watts_strogatz",
            TopologyKind::Community => "community",
        }
    }
}

/// Immutable undirected influence graph; concurrent reads are safe.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Topology {
    l: usize,
    kind: TopologyKind,
    seed: u64,
    /// Sorted neighbor ids per node.
    adjacency: Vec<Vec<u32>>,
}

impl Topology {
    /// Circulant lattice: each node adjacent to the m/2 nearest nodes on
    /// each side. m must be even and in [2, l-2], or m = l-1 for the fully
    /// connected case.
    pub fn ring(l: usize, m: usize) -> Result<Self> {
        check_l(l, 2, "ring")?;
        if m == l - 1 {
            return Ok(assemble(l, TopologyKind::Ring, 0, complete_adjacency(l)));
        }
        if m < 2 || m % 2 != 0 || m > l - 2 {
            return Err(Error::Parameter(format!(
                "ring coordination number must be even in [2, l-2] or equal l-1, got m={m} for l={l}"
            )));
        }
        let mut adj = vec![Vec::with_capacity(m); l];
        for i in 0..l {
            for d in 1..=m / 2 {
                let j = (i + d) % l;
                adj[i].push(j as u32);
                adj[j].push(i as u32);
            }
        }
        Ok(assemble(l, TopologyKind::Ring, 0, sort_all(adj)))
    }

    /// Fully connected graph. l = 1 is permitted as the trivial single-node
    /// network so a lone agent can be simulated.
    pub fn complete(l: usize) -> Result<Self> {
        check_l(l, 1, "complete")?;
        Ok(assemble(l, TopologyKind::Complete, 0, complete_adjacency(l)))
    }

    /// Path graph with free ends.
    pub fn chain(l: usize) -> Result<Self> {
        check_l(l, 2, "chain")?;
        let mut adj = vec![Vec::with_capacity(2); l];
        for i in 0..l - 1 {
            adj[i].push(i as u32 + 1);
            adj[i + 1].push(i as u32);
        }
        Ok(assemble(l, TopologyKind::Chain, 0, sort_all(adj)))
    }

    /// Node 0 is the hub; every other node connects only to it.
    pub fn star(l: usize) -> Result<Self> {
        check_l(l, 2, "star")?;
        let mut adj = vec![Vec::new(); l];
        adj[0] = (1..l as u32).collect();
        for i in 1..l {
            adj[i].push(0);
        }
        Ok(assemble(l, TopologyKind::Star, 0, adj))
    }

    /// Preferential-attachment tree: nodes arrive one at a time and attach
    /// a single edge to an existing node chosen proportionally to degree.
    /// The first edge (1, 0) is forced since degrees start at zero.
    pub fn barabasi_albert(l: usize, seed: u64) -> Result<Self> {
        check_l(l, 2, "barabasi_albert")?;
        let mut rng = rng_from_seed(seed);
        let mut adj: Vec<Vec<u32>> = vec![Vec::new(); l];
        // One entry per edge endpoint; uniform sampling from this list is
        // degree-proportional sampling.
        let mut endpoints: Vec<u32> = Vec::with_capacity(2 * (l - 1));
        adj[0].push(1);
        adj[1].push(0);
        endpoints.push(0);
        endpoints.push(1);
        for i in 2..l as u32 {
            let target = endpoints[rng.gen_range(0..endpoints.len())];
            adj[i as usize].push(target);
            adj[target as usize].push(i);
            endpoints.push(i);
            endpoints.push(target);
        }
        Ok(assemble(l, TopologyKind::BarabasiAlbert, seed, sort_all(adj)))
    }

    /// Small-world rewiring of ring(l, m): every lattice edge (i, i+d),
    /// d = 1..m/2, is rewired with probability beta to (i, r) with r drawn
    /// uniformly until it creates neither a self-loop nor a duplicate. The
    /// original edge is removed before drawing, so r may reproduce it; that
    /// keeps the edge count at l*m/2 and cannot deadlock. A disconnected
    /// draw is discarded and the whole network resampled with the next
    /// derived seed.
    pub fn watts_strogatz(l: usize, m: usize, beta: f64, seed: u64) -> Result<Self> {
        check_l(l, 4, "watts_strogatz")?;
        if m < 2 || m % 2 != 0 || m > l - 2 {
            return Err(Error::Parameter(format!(
                "small-world coordination number must be even in [2, l-2], got m={m} for l={l}"
            )));
        }
        if !(0.0..=1.0).contains(&beta) {
            return Err(Error::Parameter(format!(
                "rewiring probability must be in [0, 1], got {beta}"
            )));
        }
        for attempt in 0..MAX_WS_ATTEMPTS {
            let mut rng = rng_from_seed(derive_seed(seed, attempt));
            let mut adj: Vec<BTreeSet<u32>> = vec![BTreeSet::new(); l];
            for i in 0..l {
                for d in 1..=m / 2 {
                    let j = (i + d) % l;
                    adj[i].insert(j as u32);
                    adj[j].insert(i as u32);
                }
            }
            for i in 0..l {
                for d in 1..=m / 2 {
                    if rng.gen::<f64>() >= beta {
                        continue;
                    }
                    let old = ((i + d) % l) as u32;
                    adj[i].remove(&old);
                    adj[old as usize].remove(&(i as u32));
                    let r = loop {
                        let r = rng.gen_range(0..l as u32);
                        if r != i as u32 && !adj[i].contains(&r) {
                            break r;
                        }
                    };
                    adj[i].insert(r);
                    adj[r as usize].insert(i as u32);
                }
            }
            let adj: Vec<Vec<u32>> = adj.into_iter().map(|s| s.into_iter().collect()).collect();
            if is_connected(&adj) {
                return Ok(assemble(l, TopologyKind::WattsStrogatz, seed, adj));
            }
        }
        Err(Error::Generation(format!(
            "small-world network (l={l}, m={m}, beta={beta}) stayed disconnected after {MAX_WS_ATTEMPTS} attempts"
        )))
    }

    /// Stochastic block model with equal cluster sizes: intra-cluster pairs
    /// connect with probability p_in, inter-cluster pairs with p_out.
    /// Resamples until connected, failing after the attempt cap.
    pub fn community(
        l: usize,
        n_clusters: usize,
        p_in: f64,
        p_out: f64,
        seed: u64,
    ) -> Result<Self> {
        check_l(l, 2, "community")?;
        if n_clusters == 0 || l % n_clusters != 0 {
            return Err(Error::Parameter(format!(
                "cluster count must divide l, got {n_clusters} clusters for l={l}"
            )));
        }
        for (name, p) in [("p_in", p_in), ("p_out", p_out)] {
            if !(p > 0.0 && p <= 1.0) {
                return Err(Error::Parameter(format!(
                    "{name} must be in (0, 1], got {p}"
                )));
            }
        }
        let cluster_size = l / n_clusters;
        for attempt in 0..MAX_COMMUNITY_ATTEMPTS {
            let mut rng = rng_from_seed(derive_seed(seed, attempt));
            let mut adj: Vec<Vec<u32>> = vec![Vec::new(); l];
            // Pair order (i, then j > i) is part of the determinism contract.
            for i in 0..l {
                for j in i + 1..l {
                    let p = if i / cluster_size == j / cluster_size { p_in } else { p_out };
                    if rng.gen::<f64>() < p {
                        adj[i].push(j as u32);
                        adj[j].push(i as u32);
                    }
                }
            }
            let adj = sort_all(adj);
            if is_connected(&adj) {
                return Ok(assemble(l, TopologyKind::Community, seed, adj));
            }
        }
        Err(Error::Generation(format!(
            "community network (l={l}, clusters={n_clusters}, p_in={p_in}, p_out={p_out}) \
             stayed disconnected after {MAX_COMMUNITY_ATTEMPTS} attempts"
        )))
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn kind(&self) -> TopologyKind {
        self.kind
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Sorted neighbor ids of node i.
    pub fn neighbors(&self, i: u32) -> &[u32] {
        &self.adjacency[i as usize]
    }

    pub fn degree(&self, i: u32) -> usize {
        self.adjacency[i as usize].len()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Edges as (i, j) pairs with i < j, ascending.
    pub fn edges(&self) -> Vec<(u32, u32)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for (i, neigh) in self.adjacency.iter().enumerate() {
            for &j in neigh {
                if (i as u32) < j {
                    out.push((i as u32, j));
                }
            }
        }
        out
    }

    /// Every node has degree l-1 (imitation can then pick the group best
    /// in O(1) with an incremental tracker).
    pub fn is_complete(&self) -> bool {
        self.adjacency.iter().all(|n| n.len() == self.l - 1)
    }

    pub fn degree_histogram(&self) -> BTreeMap<usize, usize> {
        let mut hist = BTreeMap::new();
        for neigh in &self.adjacency {
            *hist.entry(neigh.len()).or_insert(0) += 1;
        }
        hist
    }

    /// Node with the largest degree; ties break to the lowest id.
    pub fn highest_degree_node(&self) -> u32 {
        let mut best = 0u32;
        let mut best_deg = self.adjacency[0].len();
        for i in 1..self.l {
            let d = self.adjacency[i].len();
            if d > best_deg {
                best_deg = d;
                best = i as u32;
            }
        }
        best
    }

    /// Rechecks every structural invariant. Constructors run this before
    /// returning; it is public so tests and tools can audit a value.
    pub fn validate(&self) -> Result<()> {
        if self.adjacency.len() != self.l {
            return Err(Error::Generation("adjacency length differs from l".into()));
        }
        for (i, neigh) in self.adjacency.iter().enumerate() {
            if !neigh.windows(2).all(|w| w[0] < w[1]) {
                return Err(Error::Generation(format!(
                    "node {i}: neighbor list not strictly sorted (duplicate edge?)"
                )));
            }
            for &j in neigh {
                if j as usize >= self.l {
                    return Err(Error::Generation(format!("node {i}: neighbor {j} out of range")));
                }
                if j as usize == i {
                    return Err(Error::Generation(format!("node {i}: self-loop")));
                }
                if self.adjacency[j as usize].binary_search(&(i as u32)).is_err() {
                    return Err(Error::Generation(format!(
                        "edge ({i}, {j}) missing its reverse direction"
                    )));
                }
            }
        }
        if !is_connected(&self.adjacency) {
            return Err(Error::Generation("graph is not connected".into()));
        }
        Ok(())
    }

    /// Writes the dump format: header `TOPOLOGY kind l seed`, then one line
    /// `i j` per edge with i < j, ascending.
    pub fn dump<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "TOPOLOGY {} {} {}", self.kind.label(), self.l, self.seed)?;
        for (i, j) in self.edges() {
            writeln!(w, "{i} {j}")?;
        }
        Ok(())
    }

    pub fn dump_to_path(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|e| Error::io(path.display().to_string(), e))?;
        let mut w = BufWriter::new(file);
        self.dump(&mut w)
            .and_then(|_| w.flush())
            .map_err(|e| Error::io(path.display().to_string(), e))
    }
}

fn check_l(l: usize, min: usize, kind: &str) -> Result<()> {
    if l < min || l > u32::MAX as usize {
        return Err(Error::Parameter(format!(
            "{kind} topology needs l >= {min}, got {l}"
        )));
    }
    Ok(())
}

fn complete_adjacency(l: usize) -> Vec<Vec<u32>> {
    (0..l as u32)
        .map(|i| (0..l as u32).filter(|&j| j != i).collect())
        .collect()
}

fn sort_all(mut adj: Vec<Vec<u32>>) -> Vec<Vec<u32>> {
    for neigh in &mut adj {
        neigh.sort_unstable();
    }
    adj
}

fn is_connected(adj: &[Vec<u32>]) -> bool {
    if adj.is_empty() {
        return false;
    }
    let mut seen = vec![false; adj.len()];
    let mut stack = vec![0u32];
    seen[0] = true;
    let mut reached = 1usize;
    while let Some(i) = stack.pop() {
        for &j in &adj[i as usize] {
            if !seen[j as usize] {
                seen[j as usize] = true;
                reached += 1;
                stack.push(j);
            }
        }
    }
    reached == adj.len()
}

/// Final assembly; structural invariants are construction bugs if violated,
/// so they are asserted.
fn assemble(l: usize, kind: TopologyKind, seed: u64, adjacency: Vec<Vec<u32>>) -> Topology {
    let t = Topology { l, kind, seed, adjacency };
    if let Err(e) = t.validate() {
        panic!("constructed {} topology violates invariants: {e}", kind.label());
    }
    t
}
