//! Monte Carlo estimation of the full-connectivity probability, plus an exact
//! small-N oracle and the connection-probability field.
//!
//! Every trial owns ChaCha8 stream number `trial` under the run seed, so results
//! do not depend on how trials are scheduled across threads.

mod exact;
mod field;
mod stats;
mod union_find;

pub use exact::{exact_connectivity_from_matrix, exact_connectivity_probability, EXACT_MAX_NODES};
pub use field::{connection_field, nearest_distance, Field, Lattice};
pub use stats::{spearman_decreasing_test, spearman_rho, wilson_interval, TrendTest, Z95, Z99};
pub use union_find::{components_bfs, connectivity_check, Connectivity, UnionFind};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::geometry::{distance, ConvexPolygon, Point2, Point3, RightPrism};
use crate::linkmodels::{ConnectionModel, LinkKind};

/// Pairs whose link probability is below this are never linked.
/// Per trial this changes the outcome with probability at most N²/2 × 1e-12.
pub const LINK_CUTOFF: f64 = 1e-12;

const LUT_SIZE: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PointProcess {
    /// Exactly `node_count` uniform points.
    #[default]
    Binomial,
    /// Poisson-distributed count with mean `node_count`.
    Poisson,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McConfig {
    pub trials: u64,
    pub node_count: usize,
    pub seed: u64,
    pub model: ConnectionModel,
    pub prism: RightPrism,
    #[serde(default)]
    pub process: PointProcess,
}

impl McConfig {
    pub fn new(
        trials: u64,
        node_count: usize,
        seed: u64,
        model: ConnectionModel,
        prism: RightPrism,
    ) -> Result<Self> {
        let cfg = Self { trials, node_count, seed, model, prism, process: PointProcess::Binomial };
        cfg.validate()?;
        Ok(cfg)
    }

    /// N = round(ρV).
    pub fn from_density(
        rho: f64,
        trials: u64,
        seed: u64,
        model: ConnectionModel,
        prism: RightPrism,
    ) -> Result<Self> {
        let n = node_count_for_density(rho, prism.volume())?;
        Self::new(trials, n, seed, model, prism)
    }

    pub fn with_process(mut self, process: PointProcess) -> Self {
        self.process = process;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return domain("trials must be at least 1");
        }
        if self.node_count == 0 {
            return domain("node count must be at least 1");
        }
        Ok(())
    }

    pub fn density(&self) -> f64 {
        self.node_count as f64 / self.prism.volume()
    }
}

/// round(ρ·measure), rejecting densities that give no nodes.
pub fn node_count_for_density(rho: f64, measure: f64) -> Result<usize> {
    if !(rho.is_finite() && rho > 0.0) {
        return domain(format!("density must be positive, got {rho}"));
    }
    let n = (rho * measure).round();
    if n < 1.0 {
        return domain(format!("density {rho} gives no nodes in a domain of measure {measure}"));
    }
    Ok(n as usize)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub p_fc_hat: f64,
    pub trials: u64,
    pub connected: u64,
    /// 95% Wilson interval.
    pub ci_low: f64,
    pub ci_high: f64,
    /// 99% Wilson interval.
    pub ci99_low: f64,
    pub ci99_high: f64,
    /// Mean number of degree-0 nodes per trial (0 for single-node graphs).
    pub mean_isolated: f64,
    /// Fraction of trials with at least one isolated node.
    pub p_isolated_hat: f64,
}

impl McEstimate {
    fn from_counts(trials: u64, connected: u64, isolated_total: u64, with_isolated: u64) -> Self {
        let (ci_low, ci_high) = wilson_interval(connected, trials, Z95);
        let (ci99_low, ci99_high) = wilson_interval(connected, trials, Z99);
        let t = trials as f64;
        Self {
            p_fc_hat: connected as f64 / t,
            trials,
            connected,
            ci_low,
            ci_high,
            ci99_low,
            ci99_high,
            mean_isolated: isolated_total as f64 / t,
            p_isolated_hat: with_isolated as f64 / t,
        }
    }

    pub fn p_out_hat(&self) -> f64 {
        1.0 - self.p_fc_hat
    }

    /// Binomial standard error of `p_fc_hat`.
    pub fn std_error(&self) -> f64 {
        (self.p_fc_hat * (1.0 - self.p_fc_hat) / self.trials as f64).sqrt()
    }
}

/// Exact link decisions `u < H(r)` with a monotone lookup table that settles
/// almost every pair without evaluating H.
#[derive(Debug, Clone)]
pub struct LinkSampler {
    model: ConnectionModel,
    cutoff: f64,
    step: f64,
    table: Vec<f64>,
}

impl LinkSampler {
    pub fn new(model: ConnectionModel) -> Result<Self> {
        let cutoff = link_cutoff_distance(&model)?;
        let step = cutoff / LUT_SIZE as f64;
        let table = (0..=LUT_SIZE)
            .map(|k| model.pair_connectedness(k as f64 * step))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { model, cutoff, step, table })
    }

    pub fn model(&self) -> &ConnectionModel {
        &self.model
    }

    /// Distance beyond which pairs are never linked.
    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    pub fn probability(&self, r: f64) -> f64 {
        if r >= self.cutoff {
            0.0
        } else {
            self.model.pair_connectedness(r).unwrap_or(0.0)
        }
    }

    pub fn links(&self, r: f64, u: f64) -> bool {
        if r >= self.cutoff {
            return false;
        }
        // H is non-increasing: table[k] >= H(r) >= table[k + 1].
        let k = ((r / self.step) as usize).min(LUT_SIZE - 1);
        if u < self.table[k + 1] {
            true
        } else if u >= self.table[k] {
            false
        } else {
            u < self.probability(r)
        }
    }
}

/// Smallest distance (to bisection precision) where H drops below [`LINK_CUTOFF`].
fn link_cutoff_distance(model: &ConnectionModel) -> Result<f64> {
    if let LinkKind::UnitDisk { radius, plateau } = model.kind() {
        // Keep r = radius inside the cutoff so the plateau value is honoured.
        return Ok(if plateau > 0.0 { radius * (1.0 + 1e-12) } else { radius });
    }
    let params = model.params();
    let mut hi = (1.0 / params.beta()).powf(1.0 / params.eta());
    while model.pair_connectedness(hi)? >= LINK_CUTOFF {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if model.pair_connectedness(mid)? >= LINK_CUTOFF {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi)
}

#[derive(Debug, Clone, Copy, Default)]
struct TrialCounts {
    trials: u64,
    connected: u64,
    isolated: u64,
    with_isolated: u64,
}

impl TrialCounts {
    fn merge(self, o: Self) -> Self {
        Self {
            trials: self.trials + o.trials,
            connected: self.connected + o.connected,
            isolated: self.isolated + o.isolated,
            with_isolated: self.with_isolated + o.with_isolated,
        }
    }

    fn into_estimate(self) -> McEstimate {
        McEstimate::from_counts(self.trials, self.connected, self.isolated, self.with_isolated)
    }
}

struct Scratch {
    uf: UnionFind,
    degree: Vec<u32>,
}

impl Scratch {
    fn new() -> Self {
        Self { uf: UnionFind::new(0), degree: Vec::new() }
    }
}

/// One random graph on fixed positions: returns (connected, isolated count).
fn realize<const D: usize>(
    points: &[[f64; D]],
    sampler: &LinkSampler,
    rng: &mut ChaCha8Rng,
    scratch: &mut Scratch,
) -> (bool, u64) {
    let n = points.len();
    scratch.uf.reset(n);
    scratch.degree.clear();
    scratch.degree.resize(n, 0);
    for i in 0..n {
        for j in i + 1..n {
            let u: f64 = rng.random();
            if sampler.links(distance(&points[i], &points[j]), u) {
                scratch.uf.union(i, j);
                scratch.degree[i] += 1;
                scratch.degree[j] += 1;
            }
        }
    }
    let isolated =
        if n < 2 { 0 } else { scratch.degree.iter().filter(|&&d| d == 0).count() as u64 };
    (scratch.uf.components() <= 1, isolated)
}

fn trial_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Estimate P_fc for nodes dropped uniformly in the prism.
pub fn run_trials(config: &McConfig) -> Result<McEstimate> {
    config.validate()?;
    let sampler = LinkSampler::new(config.model)?;
    let poisson = match config.process {
        PointProcess::Binomial => None,
        PointProcess::Poisson => Some(
            Poisson::new(config.node_count as f64)
                .map_err(|e| crate::Error::Domain(format!("Poisson mean: {e}")))?,
        ),
    };
    let counts = (0..config.trials)
        .into_par_iter()
        .map_init(Scratch::new, |scratch, trial| {
            let mut rng = trial_rng(config.seed, trial);
            let n = match &poisson {
                None => config.node_count,
                Some(p) => p.sample(&mut rng) as usize,
            };
            let points = config.prism.sample_uniform_with(n, &mut rng);
            let (connected, isolated) = realize(&points, &sampler, &mut rng, scratch);
            TrialCounts {
                trials: 1,
                connected: connected as u64,
                isolated,
                with_isolated: (isolated > 0) as u64,
            }
        })
        .reduce(TrialCounts::default, TrialCounts::merge);
    Ok(counts.into_estimate())
}

/// Connectivity frequency over `resamples` independent edge draws on fixed positions.
pub fn edge_resampling_estimate(
    points: &[Point3],
    model: &ConnectionModel,
    resamples: u64,
    seed: u64,
) -> Result<McEstimate> {
    if resamples == 0 {
        return domain("resamples must be at least 1");
    }
    let sampler = LinkSampler::new(*model)?;
    const CHUNK: u64 = 4096;
    let chunks = resamples.div_ceil(CHUNK);
    let counts = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = trial_rng(seed, c);
            let mut scratch = Scratch::new();
            let mut acc = TrialCounts::default();
            for _ in c * CHUNK..((c + 1) * CHUNK).min(resamples) {
                let (connected, isolated) = realize(points, &sampler, &mut rng, &mut scratch);
                acc = acc.merge(TrialCounts {
                    trials: 1,
                    connected: connected as u64,
                    isolated,
                    with_isolated: (isolated > 0) as u64,
                });
            }
            acc
        })
        .reduce(TrialCounts::default, TrialCounts::merge);
    Ok(counts.into_estimate())
}

/// `count` uniform points in a convex polygon, deterministic in `seed`.
pub fn sample_polygon(polygon: &ConvexPolygon, count: usize, seed: u64) -> Vec<Point2> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| polygon.sample_with(&mut rng)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{cube_prism, house_prism};
    use crate::linkmodels::PathLossParams;

    fn siso() -> ConnectionModel {
        ConnectionModel::siso(PathLossParams::new(1.0, 2.0, 3).unwrap())
    }

    #[test]
    fn single_node_is_connected() {
        let cfg = McConfig::new(50, 1, 3, siso(), house_prism(7.0).unwrap()).unwrap();
        let est = run_trials(&cfg).unwrap();
        assert_eq!(est.p_fc_hat, 1.0);
        assert_eq!(est.mean_isolated, 0.0);
    }

    #[test]
    fn unit_disk_covering_the_prism_always_connects() {
        let prism = cube_prism(2.0).unwrap();
        let params = PathLossParams::new(1.0, 2.0, 3).unwrap();
        let model = ConnectionModel::unit_disk(prism.diameter() + 0.1, params).unwrap();
        let est = run_trials(&McConfig::new(200, 2, 9, model, prism).unwrap()).unwrap();
        assert_eq!(est.p_fc_hat, 1.0);
    }

    #[test]
    fn config_validation() {
        let prism = house_prism(7.0).unwrap();
        assert!(McConfig::new(0, 5, 1, siso(), prism.clone()).is_err());
        assert!(McConfig::new(1, 0, 1, siso(), prism.clone()).is_err());
        assert!(McConfig::from_density(1e-4, 1, 1, siso(), prism.clone()).is_err());
        let cfg = McConfig::from_density(0.5, 1, 1, siso(), prism).unwrap();
        assert_eq!(cfg.node_count, 214); // round(0.5 × 428.75)
    }

    #[test]
    fn deterministic_across_thread_counts() {
        let cfg = McConfig::new(300, 30, 77, siso(), cube_prism(3.0).unwrap()).unwrap();
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = one.install(|| run_trials(&cfg)).unwrap();
        let b = four.install(|| run_trials(&cfg)).unwrap();
        assert_eq!(a, b);
        let c = run_trials(&McConfig { seed: 78, ..cfg }).unwrap();
        assert_ne!(a.connected, 0);
        assert!(a != c || a.p_fc_hat == 1.0);
    }

    #[test]
    fn lookup_decisions_match_direct_comparison() {
        let params = PathLossParams::new(1.0, 2.0, 3).unwrap();
        let mimo = ConnectionModel::mimo(2, 2, params).unwrap();
        let sampler = LinkSampler::new(mimo).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20_000 {
            let r = rng.random_range(0.0..4.0);
            let u: f64 = rng.random();
            let h = mimo.pair_connectedness(r).unwrap();
            let expected = if h < LINK_CUTOFF { false } else { u < h };
            assert_eq!(sampler.links(r, u), expected, "r={r} u={u} h={h}");
        }
        assert!(mimo.pair_connectedness(sampler.cutoff()).unwrap() < LINK_CUTOFF);
        assert!(mimo.pair_connectedness(sampler.cutoff() * 0.999).unwrap() >= LINK_CUTOFF);
    }

    #[test]
    fn unit_disk_plateau_is_used_at_the_radius() {
        let params = PathLossParams::new(1.0, 2.0, 3).unwrap();
        let model = ConnectionModel::new(LinkKind::UnitDisk { radius: 1.0, plateau: 0.5 }, params)
            .unwrap();
        let s = LinkSampler::new(model).unwrap();
        assert!(s.links(1.0, 0.4) && !s.links(1.0, 0.6));
        assert!(s.links(0.999, 0.999) && !s.links(1.001, 0.0));
    }

    #[test]
    fn poisson_process_runs_and_is_deterministic() {
        let cfg = McConfig::new(100, 20, 4, siso(), cube_prism(2.0).unwrap())
            .unwrap()
            .with_process(PointProcess::Poisson);
        assert_eq!(run_trials(&cfg).unwrap(), run_trials(&cfg).unwrap());
    }

    #[test]
    fn interval_brackets_estimate() {
        let cfg = McConfig::new(400, 12, 11, siso(), cube_prism(2.5).unwrap()).unwrap();
        let e = run_trials(&cfg).unwrap();
        assert!(e.ci_low <= e.p_fc_hat && e.p_fc_hat <= e.ci_high);
        assert!(e.ci99_low <= e.ci_low && e.ci_high <= e.ci99_high);
    }
}
