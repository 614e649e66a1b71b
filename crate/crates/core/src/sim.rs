//! Seeded Monte Carlo check of coverage, interval length and bias.
//!
//! Replication `r` draws from its own ChaCha20 stream `(seed, r)`, so
//! results do not depend on how replications are scheduled across threads.

use rand::distr::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;

use crate::distributions::{LipParams, ParentDistribution};
use crate::error::{Error, Result};
use crate::lip::{indices, interval_table, ProportionInterval};

/// Identifies the pseudo-random stream in simulation output.
pub const GENERATOR: &str = "ChaCha20Rng(rand_chacha 0.9; stream = replication index)";
pub const MIN_REPLICATIONS: usize = 100;
pub const DEFAULT_REPLICATIONS: usize = 100_000;

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    pub distribution: ParentDistribution,
    pub params: LipParams,
    pub replications: usize,
    pub seed: u64,
}

impl SimulationConfig {
    pub fn new(distribution: ParentDistribution, params: LipParams, replications: usize, seed: u64) -> Result<Self> {
        validate_replications(replications)?;
        Ok(SimulationConfig {
            distribution,
            params,
            replications,
            seed,
        })
    }
}

fn validate_replications(replications: usize) -> Result<()> {
    if replications < MIN_REPLICATIONS {
        return Err(Error::Config(format!(
            "replications = {replications} is below the minimum of {MIN_REPLICATIONS}"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationResult {
    pub beta: f64,
    pub theta: f64,
    pub empirical_coverage: f64,
    pub coverage_se: f64,
    pub mean_length: f64,
    pub length_se: f64,
    pub mean_theta_hat: f64,
    pub theta_hat_se: f64,
    pub empirical_bias: f64,
    pub replications: usize,
    pub seed: u64,
}

pub fn run_simulation(cfg: &SimulationConfig) -> Result<SimulationResult> {
    let p = cfg.params;
    let mut out = run_simulation_grid(
        &cfg.distribution,
        p.n,
        p.alpha,
        &[p.beta],
        p.gamma,
        cfg.replications,
        cfg.seed,
    )?;
    Ok(out.remove(0))
}

struct Cell {
    beta: f64,
    rank: usize,
    theta: f64,
    intervals: Vec<ProportionInterval>,
}

#[derive(Clone, Copy)]
struct Outcome {
    covered: bool,
    length: f64,
    theta_hat: f64,
}

/// Runs several `beta` values on the same draws. Each entry equals what
/// [`run_simulation`] returns for that `beta` alone with the same seed.
pub fn run_simulation_grid(
    dist: &ParentDistribution,
    n: usize,
    alpha: f64,
    betas: &[f64],
    gamma: f64,
    replications: usize,
    seed: u64,
) -> Result<Vec<SimulationResult>> {
    validate_replications(replications)?;
    let cells = betas
        .iter()
        .map(|&beta| {
            LipParams::new(alpha, beta, gamma, n)?;
            let (rank, trials) = indices(n, beta)?;
            Ok(Cell {
                beta,
                rank,
                theta: dist.theta_true(alpha, beta)?,
                intervals: interval_table(trials, beta, gamma)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let outcomes: Vec<Vec<Outcome>> = (0..replications)
        .into_par_iter()
        .map_init(
            || Vec::with_capacity(n),
            |draws, rep| replicate(dist, n, alpha, &cells, seed, rep as u64, draws),
        )
        .collect::<Result<_>>()?;

    Ok(cells
        .iter()
        .enumerate()
        .map(|(j, cell)| summarize(cell, outcomes.iter().map(|o| o[j]), replications, seed))
        .collect())
}

fn replicate(
    dist: &ParentDistribution,
    n: usize,
    alpha: f64,
    cells: &[Cell],
    seed: u64,
    rep: u64,
    draws: &mut Vec<f64>,
) -> Result<Vec<Outcome>> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(rep);
    draws.clear();
    for _ in 0..n {
        let u: f64 = rng.sample(Open01);
        draws.push(dist.sample_inverse(u)?);
    }
    draws.sort_unstable_by(f64::total_cmp);
    cells
        .iter()
        .map(|cell| {
            let line = alpha * draws[cell.rank - 1];
            let eta = draws.partition_point(|&x| x <= line);
            let ci = cell.intervals.get(eta).ok_or_else(|| {
                crate::error::numerical("run_simulation", format!("eta = {eta} exceeds the trial count"))
            })?;
            Ok(Outcome {
                covered: ci.contains(cell.theta),
                length: ci.length(),
                theta_hat: eta as f64 / n as f64,
            })
        })
        .collect()
}

/// Neumaier-compensated sum, evaluated in replication order.
fn compensated_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

fn mean_and_se(values: impl Iterator<Item = f64> + Clone, count: usize) -> (f64, f64) {
    let r = count as f64;
    let mean = compensated_sum(values.clone()) / r;
    let ss = compensated_sum(values.map(|v| (v - mean) * (v - mean)));
    let var = if count > 1 { ss / (r - 1.0) } else { 0.0 };
    (mean, (var / r).sqrt())
}

fn summarize(
    cell: &Cell,
    outcomes: impl Iterator<Item = Outcome> + Clone,
    replications: usize,
    seed: u64,
) -> SimulationResult {
    let r = replications as f64;
    let hits = outcomes.clone().filter(|o| o.covered).count();
    let coverage = hits as f64 / r;
    let (mean_length, length_se) = mean_and_se(outcomes.clone().map(|o| o.length), replications);
    let (mean_theta_hat, theta_hat_se) = mean_and_se(outcomes.map(|o| o.theta_hat), replications);
    SimulationResult {
        beta: cell.beta,
        theta: cell.theta,
        empirical_coverage: coverage,
        coverage_se: (coverage * (1.0 - coverage) / r).sqrt(),
        mean_length,
        length_se,
        mean_theta_hat,
        theta_hat_se,
        empirical_bias: mean_theta_hat - cell.theta,
        replications,
        seed,
    }
}
