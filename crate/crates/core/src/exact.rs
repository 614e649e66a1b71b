//! Exact finite-sample law of `eta` and the coverage, length and bias it implies.
//!
//! Write `U = F(X_(m))`; it is Beta(m, n - m + 1). Given `U = u`, the other
//! `M = m - 1` incomes below `X_(m)` are iid from `F` truncated at
//! `F^{-1}(u)`, so `eta | U = u` is Binomial(M, g(u)) with
//! `g(u) = F(alpha F^{-1}(u)) / u`. Integrating over `U` gives the exact
//! pmf. For `F(x) = x^c`, `g` is the constant `alpha^c` and the mixture
//! collapses to a single binomial.

use std::fmt;

use crate::distributions::{open_unit, ParentDistribution};
use crate::error::{domain, numerical, Result};
use crate::lip::{indices, interval_table, ProportionInterval};
use crate::quadrature::GaussLegendre;
use crate::special::{inv_reg_inc_beta, log_beta, log_beta_pdf, log_binom_coeff, xlogy, LogWeight, Probability};

/// Default Gauss–Legendre node count for the mixture integral.
pub const DEFAULT_NODES: usize = 256;
/// Beta-tail mass dropped on each side of the integration window.
pub const WINDOW_TAIL: f64 = 1e-12;
/// Largest pre-normalization deviation of the total mass from one.
pub const MASS_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PmfModel {
    ExactMixture,
    BinomialApprox,
}

impl PmfModel {
    pub fn as_str(self) -> &'static str {
        match self {
            PmfModel::ExactMixture => "exact",
            PmfModel::BinomialApprox => "binomial",
        }
    }
}

impl fmt::Display for PmfModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Probability mass function of `eta` over `0..=M`.
#[derive(Debug, Clone, PartialEq)]
pub struct EtaPmf {
    pub trials: usize,
    pub mass: Vec<f64>,
    pub model: PmfModel,
    /// Total mass before renormalization.
    pub raw_total: f64,
}

impl EtaPmf {
    fn normalized(trials: usize, mut mass: Vec<f64>, model: PmfModel, op: &'static str) -> Result<Self> {
        let total: f64 = mass.iter().sum();
        if !((total - 1.0).abs() <= MASS_TOLERANCE) {
            return Err(numerical(
                op,
                format!("total mass {total} deviates from 1 by more than {MASS_TOLERANCE:e}"),
            ));
        }
        for m in &mut mass {
            *m /= total;
        }
        Ok(EtaPmf {
            trials,
            mass,
            model,
            raw_total: total,
        })
    }

    pub fn mean(&self) -> f64 {
        self.mass.iter().enumerate().map(|(k, p)| k as f64 * p).sum()
    }
}

/// Conditional success probability `F(alpha F^{-1}(u)) / u`.
pub fn g_ratio(dist: &ParentDistribution, alpha: f64, u: f64) -> Result<f64> {
    open_unit("g_ratio", "alpha", alpha)?;
    open_unit("g_ratio", "u", u)?;
    let q = dist.quantile(u)?;
    Ok((dist.cdf(alpha * q) / u).clamp(0.0, 1.0))
}

/// Log binomial pmf row `ln P(Bin(M, p) = k)` for all `k`, given `ln C(M, k)`.
fn log_binomial_row(log_coeffs: &[f64], p: f64) -> impl Iterator<Item = LogWeight> + '_ {
    let trials = (log_coeffs.len() - 1) as f64;
    let lp = p.ln();
    let lq = (-p).ln_1p();
    log_coeffs.iter().enumerate().map(move |(k, &lc)| {
        let k = k as f64;
        let v = lc + xlogy(k, lp) + xlogy(trials - k, lq);
        if v.is_nan() {
            LogWeight::ZERO
        } else {
            LogWeight(v)
        }
    })
}

fn log_coefficients(trials: usize) -> Result<Vec<f64>> {
    (0..=trials as u64).map(|k| log_binom_coeff(trials as u64, k)).collect()
}

/// Exact pmf of `eta` with the default node count.
pub fn eta_pmf_exact(dist: &ParentDistribution, alpha: f64, n: usize, beta: f64) -> Result<EtaPmf> {
    eta_pmf_exact_with_nodes(dist, alpha, n, beta, DEFAULT_NODES)
}

pub fn eta_pmf_exact_with_nodes(
    dist: &ParentDistribution,
    alpha: f64,
    n: usize,
    beta: f64,
    nodes: usize,
) -> Result<EtaPmf> {
    const OP: &str = "eta_pmf_exact";
    open_unit(OP, "alpha", alpha)?;
    let (rank, trials) = indices(n, beta)?;
    let (a, b) = (rank as f64, (n - rank + 1) as f64);
    let lo = inv_reg_inc_beta(WINDOW_TAIL, a, b)?;
    let hi = inv_reg_inc_beta(1.0 - WINDOW_TAIL, a, b)?;
    let lbeta = log_beta(a, b)?;
    let log_coeffs = log_coefficients(trials)?;
    let rule = GaussLegendre::new(nodes);
    let mut mass = vec![0.0; trials + 1];
    for (u, w) in rule.on_interval(lo, hi) {
        if !(u > 0.0 && u < 1.0) {
            continue;
        }
        let node_weight = LogWeight(w.ln() + log_beta_pdf(u, a, b, lbeta));
        let g = g_ratio(dist, alpha, u)?;
        for (slot, lw) in mass.iter_mut().zip(log_binomial_row(&log_coeffs, g)) {
            *slot += (node_weight + lw).exp();
        }
    }
    EtaPmf::normalized(trials, mass, PmfModel::ExactMixture, OP)
}

/// Binomial(M, p) pmf.
pub fn eta_pmf_binomial(trials: usize, p: f64) -> Result<EtaPmf> {
    if trials < 1 {
        return Err(domain("eta_pmf_binomial", "M must be at least 1"));
    }
    let p = Probability::new(p)?.value();
    let log_coeffs = log_coefficients(trials)?;
    let mass: Vec<f64> = log_binomial_row(&log_coeffs, p).map(LogWeight::exp).collect();
    EtaPmf::normalized(trials, mass, PmfModel::BinomialApprox, "eta_pmf_binomial")
}

/// Total-variation distance between two pmfs on the same support.
pub fn total_variation(a: &EtaPmf, b: &EtaPmf) -> Result<f64> {
    if a.trials != b.trials {
        return Err(domain("total_variation", "pmfs have different supports"));
    }
    Ok(0.5 * a.mass.iter().zip(&b.mass).map(|(x, y)| (x - y).abs()).sum::<f64>())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoverageSummary {
    pub coverage: f64,
    /// `E[U - L]`.
    pub expected_length: f64,
    /// `E[(U - L) 1{L <= theta <= U}]`, the length summary the published tables report.
    pub covered_length: f64,
}

/// Coverage and length of the scaled Clopper–Pearson interval under `pmf`.
pub fn coverage_and_length(pmf: &EtaPmf, beta: f64, gamma: f64, theta: f64) -> Result<CoverageSummary> {
    let table = interval_table(pmf.trials, beta, gamma)?;
    coverage_with_table(pmf, &table, beta, theta)
}

fn coverage_with_table(pmf: &EtaPmf, table: &[ProportionInterval], beta: f64, theta: f64) -> Result<CoverageSummary> {
    if !(theta > 0.0 && theta < beta) {
        return Err(domain(
            "coverage_and_length",
            format!("theta = {theta} is not in (0, beta = {beta})"),
        ));
    }
    let mut out = CoverageSummary {
        coverage: 0.0,
        expected_length: 0.0,
        covered_length: 0.0,
    };
    for (p, ci) in pmf.mass.iter().zip(table) {
        let len = ci.length();
        out.expected_length += p * len;
        if ci.contains(theta) {
            out.coverage += p;
            out.covered_length += p * len;
        }
    }
    out.coverage = out.coverage.clamp(0.0, 1.0);
    Ok(out)
}

/// Mean of `eta / n` and its bias against `theta`.
pub fn exact_bias(pmf: &EtaPmf, n: usize, theta: f64) -> (f64, f64) {
    let mean = pmf.mean() / n as f64;
    (mean, mean - theta)
}

/// One cell of a coverage table.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverageReport {
    pub distribution: ParentDistribution,
    pub n: usize,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub theta: f64,
    pub coverage: f64,
    pub expected_length: f64,
    pub covered_length: f64,
    pub mean_theta_hat: f64,
    pub bias: f64,
    pub model: PmfModel,
}

pub fn table_row(
    dist: &ParentDistribution,
    n: usize,
    alpha: f64,
    beta: f64,
    gamma: f64,
    model: PmfModel,
) -> Result<CoverageReport> {
    table_row_with_nodes(dist, n, alpha, beta, gamma, model, DEFAULT_NODES)
}

pub fn table_row_with_nodes(
    dist: &ParentDistribution,
    n: usize,
    alpha: f64,
    beta: f64,
    gamma: f64,
    model: PmfModel,
    nodes: usize,
) -> Result<CoverageReport> {
    open_unit("table_row", "gamma", gamma)?;
    let theta = dist.theta_true(alpha, beta)?;
    let pmf = match model {
        PmfModel::ExactMixture => eta_pmf_exact_with_nodes(dist, alpha, n, beta, nodes)?,
        PmfModel::BinomialApprox => eta_pmf_binomial(indices(n, beta)?.1, (theta / beta).min(1.0))?,
    };
    let summary = coverage_and_length(&pmf, beta, gamma, theta)?;
    let (mean_theta_hat, bias) = exact_bias(&pmf, n, theta);
    Ok(CoverageReport {
        distribution: *dist,
        n,
        alpha,
        beta,
        gamma,
        theta,
        coverage: summary.coverage,
        expected_length: summary.expected_length,
        covered_length: summary.covered_length,
        mean_theta_hat,
        bias,
        model,
    })
}
