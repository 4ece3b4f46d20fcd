//! Monte Carlo ERBM: walk-on-spheres transport between boundary hits, collar
//! restarts drawn from the restart densities, and empirical estimators of
//! exit distributions, the component-hit chain and occupation times.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::bm_kernels::{BoundaryArc, BoundaryPoint};
use crate::erbm::{ErSystem, RestartDensity, Start};
use crate::error::{Error, Result};
use crate::geometry::{wrap_angle, Domain};

pub const DEFAULT_SEED: u64 = 20_240_917;
pub const DEFAULT_EPSILON: f64 = 1e-6;
pub const DEFAULT_MAX_EVENTS: usize = 100_000;
pub const DEFAULT_PATHS: usize = 100_000;
/// Sphere jumps allowed within a single boundary-to-boundary transit.
pub const MAX_WOS_STEPS: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub seed: u64,
    /// Boundary capture distance as a fraction of the domain diameter.
    pub epsilon: f64,
    /// Cap on component hits per path.
    pub max_events: usize,
    pub path_count: usize,
    pub worker_count: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            epsilon: DEFAULT_EPSILON,
            max_events: DEFAULT_MAX_EVENTS,
            path_count: DEFAULT_PATHS,
            worker_count: 1,
        }
    }
}

impl RunConfig {
    pub fn with_paths(mut self, paths: usize) -> Self {
        self.path_count = paths;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.worker_count = workers;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 1e-9 && self.epsilon < 1e-2) {
            return Err(Error::InvalidArgument(format!("epsilon must lie in (1e-9, 1e-2), got {}", self.epsilon)));
        }
        if self.path_count == 0 || self.worker_count == 0 || self.max_events == 0 {
            return Err(Error::InvalidArgument("path, worker and event counts must be positive".into()));
        }
        Ok(())
    }

    /// Generator for path `index`: the seeded ChaCha stream number `index`,
    /// independent of how paths are spread over workers.
    pub fn path_rng(&self, index: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index);
        rng
    }
}

/// Result of one walk-on-spheres transit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WosExit {
    /// Nearest-boundary projection of the captured position.
    pub point: BoundaryPoint,
    pub position: Complex64,
    pub steps: usize,
    /// `Σ R_k²/2`: unbiased (up to the capture shell) for the transit time.
    pub occupation: f64,
}

/// Brownian motion from `z` until it comes within `ε·diameter` of the boundary.
pub fn wos_exit(domain: &Domain, z: Complex64, config: &RunConfig, rng: &mut impl Rng) -> Result<WosExit> {
    if !domain.contains(z) {
        return Err(Error::OutsideDomain { x: z.re, y: z.im });
    }
    let eps = config.epsilon * domain.diameter();
    let mut z = z;
    let mut occupation = 0.0;
    for steps in 0..MAX_WOS_STEPS {
        let (c, t, d) = domain.nearest_boundary(z);
        if d < eps {
            let point = BoundaryPoint::new(c, wrap_angle(t));
            return Ok(WosExit { point, position: domain.boundary_point(c, point.t), steps, occupation });
        }
        occupation += 0.5 * d * d;
        z += Complex64::from_polar(d, TAU * rng.random::<f64>());
    }
    Err(Error::MaxStepsExceeded { steps: MAX_WOS_STEPS })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectorySummary {
    /// Components hit, in order (the start hole is not listed).
    pub trace: Vec<usize>,
    /// Outer-curve parameter of the exit point, if the path exited.
    pub exit: Option<f64>,
    pub events: usize,
    pub truncated: bool,
    /// Occupation-time estimate of the path: sphere terms plus the mean ring
    /// crossing time for every restart.
    pub occupation: f64,
}

/// Domain plus the restart densities of its holes.
#[derive(Debug, Clone)]
pub struct Sampler {
    domain: Domain,
    restarts: Vec<RestartDensity>,
}

impl Sampler {
    pub fn new(system: &ErSystem) -> Result<Self> {
        let restarts = if system.hole_count() == 0 { Vec::new() } else { system.restart_densities()?.to_vec() };
        Ok(Self { domain: system.domain().clone(), restarts })
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn restart(&self, i: usize) -> &RestartDensity {
        &self.restarts[i - 1]
    }

    fn restart_point(&self, i: usize, rng: &mut impl Rng) -> Complex64 {
        self.restart(i).sample(rng.random::<f64>())
    }

    fn check_start(&self, start: Start) -> Result<()> {
        match start {
            Start::Point(z) if !self.domain.contains(z) => Err(Error::OutsideDomain { x: z.re, y: z.im }),
            Start::Hole(i) if i == 0 || i > self.domain.hole_count() => {
                Err(Error::InvalidArgument(format!("hole index {i} out of range 1..={}", self.domain.hole_count())))
            }
            _ => Ok(()),
        }
    }

    /// One ERBM path until it hits the outer curve (or `max_events` hits).
    pub fn erbm_path(&self, start: Start, config: &RunConfig, rng: &mut impl Rng) -> Result<TrajectorySummary> {
        self.check_start(start)?;
        let mut trace = Vec::new();
        let mut occupation = 0.0;
        let mut from = start;
        loop {
            let z = match from {
                Start::Point(z) => z,
                Start::Hole(i) => {
                    occupation += self.restart(i).mean_crossing_time();
                    self.restart_point(i, rng)
                }
            };
            let hit = wos_exit(&self.domain, z, config, rng)?;
            occupation += hit.occupation;
            trace.push(hit.point.component);
            if hit.point.component == 0 {
                return Ok(TrajectorySummary { events: trace.len(), trace, exit: Some(hit.point.t), truncated: false, occupation });
            }
            if trace.len() >= config.max_events {
                return Ok(TrajectorySummary { events: trace.len(), trace, exit: None, truncated: true, occupation });
            }
            from = Start::Hole(hit.point.component);
        }
    }
}

pub fn erbm_path(sampler: &Sampler, start: Start, config: &RunConfig, rng: &mut impl Rng) -> Result<TrajectorySummary> {
    sampler.erbm_path(start, config, rng)
}

/// Streams of one estimator call start at `family · STREAM_FAMILY`.
const STREAM_FAMILY: u64 = 1 << 40;

/// Runs `f(rng)` for every path, spread over `worker_count` contiguous blocks
/// and merged in block order. Path `k` uses stream `family·2⁴⁰ + k`.
fn run_paths<T: Send>(config: &RunConfig, family: u64, f: impl Fn(&mut ChaCha8Rng) -> Result<T> + Sync) -> Result<Vec<T>> {
    config.validate()?;
    let workers = config.worker_count.min(config.path_count);
    let per = config.path_count.div_ceil(workers);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("worker pool: {e}")))?;
    let blocks: Vec<Result<Vec<T>>> = pool.install(|| {
        (0..workers)
            .into_par_iter()
            .map(|w| {
                let lo = w * per;
                let hi = ((w + 1) * per).min(config.path_count);
                (lo..hi)
                    .map(|k| {
                        let mut rng = config.path_rng(family * STREAM_FAMILY + k as u64);
                        f(&mut rng)
                    })
                    .collect()
            })
            .collect()
    });
    let mut out = Vec::with_capacity(config.path_count);
    for b in blocks {
        out.extend(b?);
    }
    Ok(out)
}

/// Histogram on equal parameter bins of the outer curve.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalDistribution {
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
    pub total: u64,
}

impl EmpiricalDistribution {
    pub fn new(bins: usize) -> Self {
        Self { edges: (0..=bins).map(|k| TAU * k as f64 / bins as f64).collect(), counts: vec![0; bins], total: 0 }
    }

    pub fn bins(&self) -> usize {
        self.counts.len()
    }

    pub fn add(&mut self, t: f64) {
        let b = self.bins();
        let k = ((wrap_angle(t) / TAU * b as f64) as usize).min(b - 1);
        self.counts[k] += 1;
        self.total += 1;
    }

    pub fn frequencies(&self) -> Vec<f64> {
        self.counts.iter().map(|&c| c as f64 / self.total.max(1) as f64).collect()
    }

    pub fn arcs(&self) -> Vec<BoundaryArc> {
        self.edges.windows(2).map(|e| BoundaryArc::new(0, e[0], e[1])).collect()
    }

    /// `½ Σ |p̂_k − p_k|`.
    pub fn total_variation(&self, masses: &[f64]) -> f64 {
        0.5 * self.frequencies().iter().zip(masses).map(|(a, b)| (a - b).abs()).sum::<f64>()
    }

    /// Pearson statistic against `masses`.
    pub fn chi_square(&self, masses: &[f64]) -> f64 {
        let n = self.total as f64;
        self.counts.iter().zip(masses).map(|(&c, &p)| (c as f64 - n * p).powi(2) / (n * p)).sum()
    }
}

#[derive(Debug, Clone)]
pub struct ExitEstimate {
    pub distribution: EmpiricalDistribution,
    /// `hm^ER(start, bin)` for every bin.
    pub reference: Vec<f64>,
    pub total_variation: f64,
    pub truncated: usize,
}

/// Exit distribution of ERBM from `start` on `bins` equal outer-curve bins,
/// compared with the deterministic ER harmonic measure of each bin.
pub fn estimate_exit_distribution(system: &ErSystem, start: Start, bins: usize, config: &RunConfig) -> Result<ExitEstimate> {
    if bins < 8 {
        return Err(Error::InvalidArgument(format!("at least 8 bins are needed, got {bins}")));
    }
    let sampler = Sampler::new(system)?;
    let paths = run_paths(config, 0, |rng| sampler.erbm_path(start, config, rng).map(|p| p.exit))?;
    let mut distribution = EmpiricalDistribution::new(bins);
    let mut truncated = 0;
    for exit in paths {
        match exit {
            Some(t) => distribution.add(t),
            None => truncated += 1,
        }
    }
    let reference = system.er_harmonic_measures(start, &distribution.arcs())?;
    let total_variation = distribution.total_variation(&reference);
    Ok(ExitEstimate { distribution, reference, total_variation, truncated })
}

/// Empirical component-hit chain. Row `i − 1` belongs to hole `i`; column 0
/// is the outer curve.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainEstimate {
    pub q: Vec<Vec<f64>>,
    pub q_error: Vec<Vec<f64>>,
    pub p_tilde: Vec<Vec<f64>>,
    pub p_tilde_error: Vec<Vec<f64>>,
    /// Excursion sequences per hole.
    pub samples: usize,
    /// Sequences that never left their hole within `max_events`.
    pub truncated: Vec<usize>,
}

/// For every hole, `path_count` sequences of excursions from the hole: the
/// first excursion's target samples `q`, the first component other than the
/// hole samples `p̃`.
pub fn estimate_chain(system: &ErSystem, config: &RunConfig) -> Result<ChainEstimate> {
    let n = system.hole_count();
    if n == 0 {
        return Err(Error::InvalidArgument("the chain needs at least one hole".into()));
    }
    let sampler = Sampler::new(system)?;
    let domain = sampler.domain();
    let mut est = ChainEstimate {
        q: Vec::new(),
        q_error: Vec::new(),
        p_tilde: Vec::new(),
        p_tilde_error: Vec::new(),
        samples: config.path_count,
        truncated: Vec::new(),
    };
    for i in 1..=n {
        let hits = run_paths(config, i as u64, |rng| {
            let mut first = None;
            for _ in 0..config.max_events {
                let z = sampler.restart_point(i, rng);
                let k = wos_exit(domain, z, config, rng)?.point.component;
                first.get_or_insert(k);
                if k != i {
                    return Ok((first.unwrap(), Some(k)));
                }
            }
            Ok((first.unwrap_or(i), None))
        })?;
        let mut q = vec![0u64; n + 1];
        let mut p = vec![0u64; n + 1];
        let mut truncated = 0;
        for (first, last) in hits {
            q[first] += 1;
            match last {
                Some(k) => p[k] += 1,
                None => truncated += 1,
            }
        }
        let freq = |counts: &[u64], total: u64| -> (Vec<f64>, Vec<f64>) {
            let total = total.max(1) as f64;
            let f: Vec<f64> = counts.iter().map(|&c| c as f64 / total).collect();
            let e = f.iter().map(|x| (x * (1.0 - x) / total).sqrt()).collect();
            (f, e)
        };
        let (qf, qe) = freq(&q, config.path_count as u64);
        let (pf, pe) = freq(&p, (config.path_count - truncated) as u64);
        est.q.push(qf);
        est.q_error.push(qe);
        est.p_tilde.push(pf);
        est.p_tilde_error.push(pe);
        est.truncated.push(truncated);
    }
    Ok(est)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OccupationEstimate {
    pub mean: f64,
    pub standard_error: f64,
    pub truncated: usize,
}

/// Expected time ERBM from `start` spends in `D` before exiting through the
/// outer curve (`∫ G^ER(start, ·) dA`). Bias is O(ε) from the capture shell.
pub fn estimate_occupation(system: &ErSystem, start: Start, config: &RunConfig) -> Result<OccupationEstimate> {
    let sampler = Sampler::new(system)?;
    let paths = run_paths(config, 0, |rng| sampler.erbm_path(start, config, rng))?;
    let kept: Vec<f64> = paths.iter().filter(|p| !p.truncated).map(|p| p.occupation).collect();
    let m = kept.len().max(1) as f64;
    let mean = kept.iter().sum::<f64>() / m;
    let var = kept.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m - 1.0).max(1.0);
    Ok(OccupationEstimate { mean, standard_error: (var / m).sqrt(), truncated: paths.len() - kept.len() })
}

/// Summaries of `path_count` independent ERBM paths from `start`.
pub fn sample_paths(system: &ErSystem, start: Start, config: &RunConfig) -> Result<Vec<TrajectorySummary>> {
    let sampler = Sampler::new(system)?;
    run_paths(config, 0, |rng| sampler.erbm_path(start, config, rng))
}
