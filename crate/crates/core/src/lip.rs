//! Point estimators of the low-income proportion and its confidence interval.
//!
//! With `m = floor(beta * n) + 1`, the poverty line is `alpha` times the
//! `m`-th order statistic, and `eta` counts incomes at or below that line.
//! Given the `m`-th order statistic, `eta` is binomial on `M = m - 1`
//! trials with success probability `theta / beta`, so the Clopper–Pearson
//! interval for that ratio, scaled by `beta`, brackets `theta`.

use crate::distributions::{open_unit, parse_decimal};
use crate::error::{domain, Error, Result};
use crate::special::{inv_reg_inc_beta, Probability};

/// Relative slack when flooring `beta * n`, so that decimal inputs such as
/// `0.29 * 100` land on the integer they denote.
const FLOOR_SLACK: f64 = 1e-9;

/// `floor(beta * n)`, robust to binary round-off of decimal `beta`.
pub fn floor_product(beta: f64, n: usize) -> usize {
    let t = beta * n as f64;
    let r = t.round();
    let v = if (t - r).abs() <= FLOOR_SLACK * t.abs().max(1.0) {
        r
    } else {
        t.floor()
    };
    if v <= 0.0 {
        0
    } else {
        v as usize
    }
}

/// Order-statistic rank `m` of the quantile estimator and the trial count `M = m - 1`.
pub fn indices(n: usize, beta: f64) -> Result<(usize, usize)> {
    open_unit("indices", "beta", beta)?;
    if n < 2 {
        return Err(domain("indices", format!("n = {n} must be at least 2")));
    }
    let trials = floor_product(beta, n);
    if trials < 1 {
        return Err(domain(
            "indices",
            format!("floor(beta * n) = 0 for beta = {beta}, n = {n}"),
        ));
    }
    let rank = trials + 1;
    if rank > n {
        return Err(domain("indices", format!("rank {rank} exceeds n = {n}")));
    }
    Ok((rank, trials))
}

/// A validated income sample, kept in nondecreasing order.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    values: Vec<f64>,
}

impl Sample {
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(domain(
                "Sample::new",
                format!("need at least 2 values, got {}", values.len()),
            ));
        }
        if let Some(bad) = values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(domain(
                "Sample::new",
                format!("income {bad} is not a finite nonnegative number"),
            ));
        }
        values.sort_by(f64::total_cmp);
        Ok(Sample { values })
    }

    /// Parses the plain-text income format: one nonnegative decimal per
    /// line, `#` comments and blank lines ignored, LF or CRLF endings.
    pub fn parse(text: &str) -> Result<Self> {
        let text = text.strip_prefix('\u{feff}').unwrap_or(text);
        let mut values = Vec::new();
        for (i, raw) in text.split('\n').enumerate() {
            let line = raw.strip_suffix('\r').unwrap_or(raw).trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let lineno = i + 1;
            let v = parse_decimal(line).ok_or_else(|| Error::Data {
                line: lineno,
                detail: format!("'{line}' is not a decimal number"),
            })?;
            if v < 0.0 {
                return Err(Error::Data {
                    line: lineno,
                    detail: format!("income {line} is negative"),
                });
            }
            values.push(v);
        }
        if values.len() < 2 {
            return Err(Error::Data {
                line: 0,
                detail: format!("need at least 2 incomes, found {}", values.len()),
            });
        }
        Sample::new(values)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Sorted values.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// The `k`-th smallest value, 1-based.
    pub fn order_statistic(&self, k: usize) -> f64 {
        self.values[k - 1]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimateResult {
    pub n: usize,
    /// Incomes at or below the poverty line.
    pub eta: usize,
    /// Binomial trial count `M = floor(beta * n)`.
    pub trials: usize,
    /// `eta / n`.
    pub theta_hat: f64,
    pub poverty_line: f64,
    pub quantile_hat: f64,
}

fn finish(n: usize, eta: usize, trials: usize, quantile_hat: f64, poverty_line: f64) -> Result<EstimateResult> {
    // eta can only pass M when the estimated quantile is zero and the line
    // collapses onto it.
    if eta > trials {
        return Err(domain(
            "estimate",
            format!("{eta} incomes lie at or below a zero poverty line, more than M = {trials}"),
        ));
    }
    Ok(EstimateResult {
        n,
        eta,
        trials,
        theta_hat: eta as f64 / n as f64,
        poverty_line,
        quantile_hat,
    })
}

/// The natural estimator: `max{j : X_(j) <= alpha * X_(m)} / n`.
pub fn estimate_w(sample: &Sample, alpha: f64, beta: f64) -> Result<EstimateResult> {
    open_unit("estimate_w", "alpha", alpha)?;
    let n = sample.len();
    let (rank, trials) = indices(n, beta)?;
    let quantile_hat = sample.order_statistic(rank);
    let line = alpha * quantile_hat;
    let eta = sample.values().partition_point(|&x| x <= line);
    finish(n, eta, trials, quantile_hat, line)
}

/// Step empirical CDF over distinct values with cumulative counts.
#[derive(Debug, Clone)]
pub struct EmpiricalCdf {
    n: usize,
    support: Vec<f64>,
    cum_counts: Vec<usize>,
}

impl EmpiricalCdf {
    pub fn new(sample: &Sample) -> Self {
        let mut support: Vec<f64> = Vec::new();
        let mut cum_counts: Vec<usize> = Vec::new();
        for (i, &x) in sample.values().iter().enumerate() {
            if support.last() == Some(&x) {
                *cum_counts.last_mut().expect("parallel vectors") = i + 1;
            } else {
                support.push(x);
                cum_counts.push(i + 1);
            }
        }
        EmpiricalCdf {
            n: sample.len(),
            support,
            cum_counts,
        }
    }

    /// `n * F_n(x)`.
    pub fn count_at(&self, x: f64) -> usize {
        match self.support.partition_point(|&s| s <= x) {
            0 => 0,
            j => self.cum_counts[j - 1],
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.count_at(x) as f64 / self.n as f64
    }

    /// `inf{x : n F_n(x) > floor(beta * n)}`, which is the order statistic
    /// of rank `floor(beta * n) + 1`.
    pub fn quantile(&self, beta: f64) -> f64 {
        let threshold = floor_product(beta, self.n);
        let j = self.cum_counts.partition_point(|&c| c <= threshold);
        self.support[j.min(self.support.len() - 1)]
    }
}

/// The plug-in estimator `F_n(alpha * F_n^{-1}(beta))`.
pub fn estimate_lq(sample: &Sample, alpha: f64, beta: f64) -> Result<EstimateResult> {
    open_unit("estimate_lq", "alpha", alpha)?;
    let n = sample.len();
    let (_, trials) = indices(n, beta)?;
    let ecdf = EmpiricalCdf::new(sample);
    let quantile_hat = ecdf.quantile(beta);
    let line = alpha * quantile_hat;
    let eta = ecdf.count_at(line);
    finish(n, eta, trials, quantile_hat, line)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntervalTarget {
    /// The binomial success probability `p = theta / beta`.
    RatioP,
    Theta,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProportionInterval {
    pub lower: Probability,
    pub upper: Probability,
    pub level: Probability,
    pub target: IntervalTarget,
}

impl ProportionInterval {
    pub fn length(&self) -> f64 {
        self.upper.value() - self.lower.value()
    }

    /// Closed-interval membership.
    pub fn contains(&self, v: f64) -> bool {
        self.lower.value() <= v && v <= self.upper.value()
    }
}

/// Clopper–Pearson interval for a binomial proportion from `eta` successes in `trials`.
pub fn cp_interval_p(eta: usize, trials: usize, gamma: f64) -> Result<ProportionInterval> {
    open_unit("cp_interval_p", "gamma", gamma)?;
    if trials < 1 {
        return Err(domain("cp_interval_p", "M must be at least 1"));
    }
    if eta > trials {
        return Err(domain("cp_interval_p", format!("eta = {eta} exceeds M = {trials}")));
    }
    let tail = 0.5 * (1.0 - gamma);
    let (k, m) = (eta as f64, trials as f64);
    let lower = if eta == 0 {
        0.0
    } else {
        inv_reg_inc_beta(tail, k, m - k + 1.0)?
    };
    let upper = if eta == trials {
        1.0
    } else {
        inv_reg_inc_beta(1.0 - tail, k + 1.0, m - k)?
    };
    Ok(ProportionInterval {
        lower: Probability::clamped(lower),
        upper: Probability::clamped(upper),
        level: Probability::clamped(gamma),
        target: IntervalTarget::RatioP,
    })
}

/// Interval for `theta`: the ratio interval scaled by `beta`.
pub fn ci_theta(eta: usize, trials: usize, beta: f64, gamma: f64) -> Result<ProportionInterval> {
    open_unit("ci_theta", "beta", beta)?;
    let p = cp_interval_p(eta, trials, gamma)?;
    Ok(ProportionInterval {
        lower: Probability::clamped(beta * p.lower.value()),
        upper: Probability::clamped(beta * p.upper.value()),
        level: p.level,
        target: IntervalTarget::Theta,
    })
}

/// `ci_theta` for every `eta` in `0..=trials`.
pub fn interval_table(trials: usize, beta: f64, gamma: f64) -> Result<Vec<ProportionInterval>> {
    (0..=trials).map(|k| ci_theta(k, trials, beta, gamma)).collect()
}
