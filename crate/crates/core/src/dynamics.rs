//! Imitative-learning search by a group of agents.
//!
//! Per trial every agent updates once. An update is an elementary move
//! (flip one uniformly random bit) with probability 1-p, or an imitation
//! with probability p: the target copies one randomly chosen differing bit
//! from its model, the fittest string among its neighbors. A target whose
//! string already equals the model falls back to the elementary move. The
//! search halts as soon as any agent hits the landscape's global optimum.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::landscape::Landscape;
use crate::rng::rng_from_seed;
use crate::scalar::Scalar;
use crate::topology::Topology;

/// Within-trial visiting order.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub enum UpdateOrder {
    /// Fresh uniform permutation each trial; removes positional bias on
    /// asymmetric graphs (default).
    #[default]
    Shuffled,
    /// Fixed ascending id order.
    Sequential,
}

/// Which state the model ranking reads.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub enum ModelView {
    /// Live strings: updates earlier in the same trial are visible
    /// (default).
    #[default]
    Current,
    /// Strings frozen at the start of the trial.
    TrialStart,
}

/// Parameters of a single search replica.
#[derive(Clone, Copy, Debug)]
pub struct SearchConfig {
    /// Imitation probability in [0, 1].
    pub p: f64,
    /// Failure cutoff in trials (one trial = one update per agent).
    pub max_trials: u64,
    /// Seed of the replica's private RNG stream.
    pub seed: u64,
    pub update_order: UpdateOrder,
    pub model_view: ModelView,
}

impl SearchConfig {
    pub fn new(p: f64, max_trials: u64, seed: u64) -> Result<Self> {
        let cfg = SearchConfig {
            p,
            max_trials,
            seed,
            update_order: UpdateOrder::default(),
            model_view: ModelView::default(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_update_order(mut self, order: UpdateOrder) -> Self {
        self.update_order = order;
        self
    }

    pub fn with_model_view(mut self, view: ModelView) -> Self {
        self.model_view = view;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.p) {
            return Err(Error::Parameter(format!(
                "imitation probability must be in [0, 1], got {}",
                self.p
            )));
        }
        if self.max_trials < 1 {
            return Err(Error::Parameter("max_trials must be at least 1".into()));
        }
        Ok(())
    }
}

/// Result of one replica.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SearchOutcome {
    pub success: bool,
    /// 1-based trial index at which the optimum was found; the initial
    /// population counts as trial 1.
    pub t_star: Option<u64>,
    /// Agent that produced the optimum.
    pub winner: Option<u32>,
    /// l * t_star / 2^n, the group's trial budget rescaled by the size of
    /// the solution space.
    pub rescaled_cost: Option<f64>,
    /// Winner's degree; populated by `run_tracking_winner_degree` only.
    pub winner_degree: Option<usize>,
    /// Whether the winner is the network's highest-degree node (ties to the
    /// lowest id); populated by `run_tracking_winner_degree` only.
    pub winner_has_highest_degree: Option<bool>,
}

impl SearchOutcome {
    fn failure() -> Self {
        SearchOutcome {
            success: false,
            t_star: None,
            winner: None,
            rescaled_cost: None,
            winner_degree: None,
            winner_has_highest_degree: None,
        }
    }
}

/// Runs one search replica.
pub fn run<S: Scalar>(
    ls: &Landscape<S>,
    topo: &Topology,
    cfg: &SearchConfig,
) -> Result<SearchOutcome> {
    run_internal(ls, topo, cfg, false, false)
}

/// As `run`, additionally recording the winner's degree and whether the
/// winner is the highest-degree node.
pub fn run_tracking_winner_degree<S: Scalar>(
    ls: &Landscape<S>,
    topo: &Topology,
    cfg: &SearchConfig,
) -> Result<SearchOutcome> {
    run_internal(ls, topo, cfg, true, false)
}

/// Test hook: identical dynamics with the O(1) complete-graph model tracker
/// disabled, to prove tracker/scan equivalence.
#[cfg(test)]
pub(crate) fn run_forcing_scan<S: Scalar>(
    ls: &Landscape<S>,
    topo: &Topology,
    cfg: &SearchConfig,
) -> Result<SearchOutcome> {
    run_internal(ls, topo, cfg, false, true)
}

fn run_internal<S: Scalar>(
    ls: &Landscape<S>,
    topo: &Topology,
    cfg: &SearchConfig,
    track: bool,
    force_scan: bool,
) -> Result<SearchOutcome> {
    cfg.validate()?;
    let l = topo.l();
    let n = ls.n();
    let optimum = ls.global_optimum().packed();
    let mut rng = rng_from_seed(cfg.seed);

    let mut strings: Vec<u32> = Vec::with_capacity(l);
    for _ in 0..l {
        strings.push(rng.gen_range(0..1u32 << n));
    }
    let hub = track.then(|| topo.highest_degree_node());
    // Initial population check, ascending id: a lucky draw costs one trial.
    for (a, &s) in strings.iter().enumerate() {
        if s == optimum {
            return Ok(success(topo, l, n, 1, a as u32, hub));
        }
    }

    let mut fits: Vec<S> = strings.iter().map(|&s| ls.fitness_packed(s)).collect();
    // The O(1) tracker answers "fittest other agent" only when every agent
    // sees every other agent live.
    let mut finder = if topo.is_complete() && l >= 2 && cfg.model_view == ModelView::Current && !force_scan
    {
        ModelFinder::tracked(&fits)
    } else {
        ModelFinder::Scan
    };

    let mut order: Vec<u32> = (0..l as u32).collect();
    let mut snapshot_strings: Vec<u32> = Vec::new();
    let mut snapshot_fits: Vec<S> = Vec::new();

    for trial in 1..=cfg.max_trials {
        if cfg.update_order == UpdateOrder::Shuffled {
            order.shuffle(&mut rng);
        }
        if cfg.model_view == ModelView::TrialStart {
            snapshot_strings.clear();
            snapshot_strings.extend_from_slice(&strings);
            snapshot_fits.clear();
            snapshot_fits.extend_from_slice(&fits);
        }
        for &a in &order {
            let ai = a as usize;
            let imitate = rng.gen::<f64>() < cfg.p;
            let mut did_elementary = true;
            if imitate {
                let model = match cfg.model_view {
                    ModelView::Current => finder.model_for(topo, a, &fits),
                    ModelView::TrialStart => scan_model(topo, a, &snapshot_fits),
                };
                if let Some(model) = model {
                    let model_string = match cfg.model_view {
                        ModelView::Current => strings[model as usize],
                        ModelView::TrialStart => snapshot_strings[model as usize],
                    };
                    let diff = strings[ai] ^ model_string;
                    if diff != 0 {
                        // Copy one random differing bit from the model.
                        let pick = rng.gen_range(0..diff.count_ones());
                        strings[ai] ^= nth_set_bit(diff, pick);
                        did_elementary = false;
                    }
                }
                // No usable model or already identical: elementary move.
            }
            if did_elementary {
                let bit = rng.gen_range(0..n);
                strings[ai] ^= 1 << bit;
            }
            fits[ai] = ls.fitness_packed(strings[ai]);
            finder.refresh(a, &fits);
            if strings[ai] == optimum {
                return Ok(success(topo, l, n, trial, a, hub));
            }
        }
    }
    Ok(SearchOutcome::failure())
}

fn success(
    topo: &Topology,
    l: usize,
    n: u32,
    t_star: u64,
    winner: u32,
    hub: Option<u32>,
) -> SearchOutcome {
    let cost = l as f64 * t_star as f64 / (n as f64).exp2();
    SearchOutcome {
        success: true,
        t_star: Some(t_star),
        winner: Some(winner),
        rescaled_cost: Some(cost),
        winner_degree: hub.map(|_| topo.degree(winner)),
        winner_has_highest_degree: hub.map(|h| winner == h),
    }
}

/// Isolates the k-th (0-based) set bit of v.
#[inline]
fn nth_set_bit(mut v: u32, mut k: u32) -> u32 {
    while k > 0 {
        v &= v - 1;
        k -= 1;
    }
    v & v.wrapping_neg()
}

/// Fittest-neighbor lookup. `Scan` walks the target's sorted adjacency and
/// keeps the first strict maximum, so ties go to the lowest id. `Tracked`
/// maintains the two lowest-id fitness maxima of the whole group and serves
/// complete graphs with identical tie semantics in O(1) per query.
enum ModelFinder<S: Scalar> {
    Scan,
    Tracked {
        best1: u32,
        fit1: S,
        best2: u32,
        fit2: S,
    },
}

impl<S: Scalar> ModelFinder<S> {
    fn tracked(fits: &[S]) -> Self {
        let (best1, fit1, best2, fit2) = top_two(fits);
        ModelFinder::Tracked { best1, fit1, best2, fit2 }
    }

    fn model_for(&self, topo: &Topology, a: u32, fits: &[S]) -> Option<u32> {
        match self {
            ModelFinder::Scan => scan_model(topo, a, fits),
            ModelFinder::Tracked { best1, best2, .. } => {
                Some(if *best1 != a { *best1 } else { *best2 })
            }
        }
    }

    /// Restores the top-two invariant after agent a's fitness changed.
    fn refresh(&mut self, a: u32, fits: &[S]) {
        let ModelFinder::Tracked { best1, fit1, best2, fit2 } = self else {
            return;
        };
        if a == *best1 || a == *best2 {
            // The change may demote a leader; rebuild. Amortized O(1): the
            // leaders update once per trial like everyone else.
            let (b1, f1, b2, f2) = top_two(fits);
            (*best1, *fit1, *best2, *fit2) = (b1, f1, b2, f2);
            return;
        }
        let f = fits[a as usize];
        if f > *fit1 || (f == *fit1 && a < *best1) {
            (*best2, *fit2) = (*best1, *fit1);
            (*best1, *fit1) = (a, f);
        } else if f > *fit2 || (f == *fit2 && a < *best2) {
            (*best2, *fit2) = (a, f);
        }
    }
}

/// Lowest-id maximum and lowest-id maximum-of-the-rest, in one ascending
/// pass with strict comparisons.
fn top_two<S: Scalar>(fits: &[S]) -> (u32, S, u32, S) {
    debug_assert!(fits.len() >= 2);
    let mut b1 = 0u32;
    let mut f1 = fits[0];
    let mut b2 = u32::MAX;
    let mut f2 = S::neg_infinity();
    for (i, &f) in fits.iter().enumerate().skip(1) {
        if f > f1 {
            (b2, f2) = (b1, f1);
            (b1, f1) = (i as u32, f);
        } else if f > f2 {
            (b2, f2) = (i as u32, f);
        }
    }
    (b1, f1, b2, f2)
}

fn scan_model<S: Scalar>(topo: &Topology, a: u32, fits: &[S]) -> Option<u32> {
    let mut best: Option<(u32, S)> = None;
    for &j in topo.neighbors(a) {
        let f = fits[j as usize];
        match best {
            Some((_, bf)) if f <= bf => {}
            _ => best = Some((j, f)),
        }
    }
    best.map(|(j, _)| j)
}
