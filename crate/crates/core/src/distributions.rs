//! Parent income distributions and the true low-income proportion.

use std::fmt;
use std::str::FromStr;

use crate::error::{domain, Error, Result};
use crate::lip::floor_product;
use crate::special::{
    inv_reg_inc_gamma, log_gamma, reg_inc_gamma_lower, std_normal_cdf, std_normal_pdf, std_normal_quantile,
};

/// An income distribution with CDF, quantile and density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ParentDistribution {
    /// Chi-square with `df` degrees of freedom (non-integer allowed).
    ChiSquare { df: f64 },
    /// `exp(N(mu, sigma^2))`.
    LogNormal { mu: f64, sigma: f64 },
    /// `F(x) = x^c` on `[0, 1]`.
    Power { c: f64 },
}

fn positive(what: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Config(format!("{what} must be positive and finite, got {v}")))
    }
}

impl ParentDistribution {
    pub fn chi_square(df: f64) -> Result<Self> {
        Ok(ParentDistribution::ChiSquare {
            df: positive("df", df)?,
        })
    }

    pub fn log_normal(mu: f64, sigma: f64) -> Result<Self> {
        if !mu.is_finite() {
            return Err(Error::Config(format!("mu must be finite, got {mu}")));
        }
        Ok(ParentDistribution::LogNormal {
            mu,
            sigma: positive("sigma", sigma)?,
        })
    }

    pub fn power(c: f64) -> Result<Self> {
        Ok(ParentDistribution::Power { c: positive("c", c)? })
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x.is_nan() {
            return f64::NAN;
        }
        if x <= 0.0 {
            return 0.0;
        }
        match *self {
            ParentDistribution::ChiSquare { df } => {
                // Shape and argument are validated, so this cannot fail.
                reg_inc_gamma_lower(0.5 * df, 0.5 * x).unwrap_or(f64::NAN)
            }
            ParentDistribution::LogNormal { mu, sigma } => std_normal_cdf((x.ln() - mu) / sigma),
            ParentDistribution::Power { c } => {
                if x >= 1.0 {
                    1.0
                } else {
                    x.powf(c).clamp(0.0, 1.0)
                }
            }
        }
    }

    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(domain("quantile", format!("p = {p} is not in (0, 1)")));
        }
        Ok(match *self {
            ParentDistribution::ChiSquare { df } => 2.0 * inv_reg_inc_gamma(p, 0.5 * df)?,
            ParentDistribution::LogNormal { mu, sigma } => (mu + sigma * std_normal_quantile(p)?).exp(),
            ParentDistribution::Power { c } => p.powf(1.0 / c),
        })
    }

    /// Density; zero off the support.
    pub fn pdf(&self, x: f64) -> f64 {
        if !(x > 0.0) {
            return 0.0;
        }
        match *self {
            ParentDistribution::ChiSquare { df } => {
                let k = 0.5 * df;
                let norm = k * std::f64::consts::LN_2 + log_gamma(k).unwrap_or(f64::NAN);
                ((k - 1.0) * x.ln() - 0.5 * x - norm).exp()
            }
            ParentDistribution::LogNormal { mu, sigma } => std_normal_pdf((x.ln() - mu) / sigma) / (sigma * x),
            ParentDistribution::Power { c } => {
                if x >= 1.0 {
                    0.0
                } else {
                    c * x.powf(c - 1.0)
                }
            }
        }
    }

    /// The low-income proportion `F(alpha * F^{-1}(beta))`.
    pub fn theta_true(&self, alpha: f64, beta: f64) -> Result<f64> {
        open_unit("theta_true", "alpha", alpha)?;
        open_unit("theta_true", "beta", beta)?;
        Ok(match *self {
            ParentDistribution::Power { c } => alpha.powf(c) * beta,
            ParentDistribution::LogNormal { sigma, .. } => {
                std_normal_cdf(std_normal_quantile(beta)? + alpha.ln() / sigma)
            }
            ParentDistribution::ChiSquare { .. } => self.cdf(alpha * self.quantile(beta)?),
        })
    }

    /// Inverse-transform draw from a uniform variate.
    pub fn sample_inverse(&self, u: f64) -> Result<f64> {
        self.quantile(u)
    }
}

impl fmt::Display for ParentDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            ParentDistribution::ChiSquare { df } => write!(f, "chisq:{df}"),
            ParentDistribution::LogNormal { mu, sigma } => write!(f, "lognormal:{mu}:{sigma}"),
            ParentDistribution::Power { c } => write!(f, "power:{c}"),
        }
    }
}

impl FromStr for ParentDistribution {
    type Err = Error;

    /// Parses `chisq:<df>`, `lognormal:<mu>:<sigma>` or `power:<c>`.
    fn from_str(s: &str) -> Result<Self> {
        let mut parts = s.split(':');
        let kind = parts.next().unwrap_or_default();
        let args: Vec<&str> = parts.collect();
        let nums = args
            .iter()
            .map(|a| parse_decimal(a).ok_or_else(|| Error::Config(format!("'{a}' is not a decimal literal in '{s}'"))))
            .collect::<Result<Vec<f64>>>()?;
        match (kind, nums.as_slice()) {
            ("chisq", [df]) => Self::chi_square(*df),
            ("lognormal", [mu, sigma]) => Self::log_normal(*mu, *sigma),
            ("power", [c]) => Self::power(*c),
            ("chisq" | "lognormal" | "power", _) => Err(Error::Config(format!(
                "wrong number of parameters in distribution spec '{s}'"
            ))),
            _ => Err(Error::Config(format!(
                "unknown distribution '{kind}' (expected chisq:<df>, lognormal:<mu>:<sigma> or power:<c>)"
            ))),
        }
    }
}

/// Parses a plain decimal literal: optional sign, digits, optional
/// fractional part. No exponents, no `inf`/`nan`, no surrounding space.
pub fn parse_decimal(s: &str) -> Option<f64> {
    let body = s.strip_prefix(['+', '-']).unwrap_or(s);
    let (int, frac) = match body.split_once('.') {
        Some((i, f)) => (i, Some(f)),
        None => (body, None),
    };
    let digits = |t: &str| t.bytes().all(|b| b.is_ascii_digit());
    let ok = digits(int) && frac.is_none_or(digits) && (!int.is_empty() || frac.is_some_and(|f| !f.is_empty()));
    if !ok {
        return None;
    }
    s.parse().ok().filter(|v: &f64| v.is_finite())
}

pub(crate) fn open_unit(op: &'static str, name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(domain(op, format!("{name} = {v} is not in (0, 1)")))
    }
}

/// The `(alpha, beta, gamma, n)` configuration of one inference problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LipParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub n: usize,
}

impl LipParams {
    pub fn new(alpha: f64, beta: f64, gamma: f64, n: usize) -> Result<Self> {
        open_unit("LipParams", "alpha", alpha)?;
        open_unit("LipParams", "beta", beta)?;
        open_unit("LipParams", "gamma", gamma)?;
        if n < 2 {
            return Err(domain("LipParams", format!("n = {n} must be at least 2")));
        }
        let trials = floor_product(beta, n);
        if trials < 1 || trials + 1 > n {
            return Err(domain(
                "LipParams",
                format!("floor(beta * n) = {trials} must lie in [1, n - 1]"),
            ));
        }
        Ok(LipParams { alpha, beta, gamma, n })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn chisq3() -> ParentDistribution {
        ParentDistribution::chi_square(3.0).unwrap()
    }

    fn lognorm() -> ParentDistribution {
        ParentDistribution::log_normal(0.0, 1.0).unwrap()
    }

    #[test]
    fn cdf_examples() {
        assert_eq!(lognorm().cdf(1.0), 0.5);
        assert!((ParentDistribution::power(1.0).unwrap().cdf(0.3) - 0.3).abs() < 1e-15);
        assert!((chisq3().cdf(1.18299) - 0.2429).abs() < 5e-5);
        assert_eq!(chisq3().cdf(-1.0), 0.0);
        assert_eq!(ParentDistribution::power(2.0).unwrap().cdf(3.0), 1.0);
    }

    #[test]
    fn quantile_examples() {
        assert_eq!(lognorm().quantile(0.5).unwrap(), 1.0);
        assert!((ParentDistribution::power(2.0).unwrap().quantile(0.25).unwrap() - 0.5).abs() < 1e-15);
        let want = std_normal_quantile(0.8).unwrap().exp();
        assert!((lognorm().quantile(0.8).unwrap() - want).abs() < 1e-15);
        assert!(lognorm().quantile(0.0).is_err());
        assert!(chisq3().quantile(1.0).is_err());
    }

    #[test]
    fn pdf_examples() {
        assert_eq!(ParentDistribution::power(1.0).unwrap().pdf(0.5), 1.0);
        let want = 1.0 / (2.0 * std::f64::consts::PI).sqrt();
        assert!((lognorm().pdf(1.0) - want).abs() < 1e-15);
        assert_eq!(chisq3().pdf(-2.0), 0.0);
    }

    #[test]
    fn pdf_matches_finite_differences() {
        let h = 1e-6;
        let dists = [
            chisq3(),
            ParentDistribution::chi_square(7.5).unwrap(),
            lognorm(),
            ParentDistribution::log_normal(1.0, 0.4).unwrap(),
            ParentDistribution::power(2.5).unwrap(),
        ];
        for d in dists {
            for p in [0.05, 0.2, 0.5, 0.8, 0.95] {
                let x = d.quantile(p).unwrap();
                let fd = (d.cdf(x + h) - d.cdf(x - h)) / (2.0 * h);
                let pdf = d.pdf(x);
                assert!(((pdf - fd) / pdf).abs() <= 1e-4, "{d} at {x}: {pdf} vs {fd}");
            }
        }
    }

    #[test]
    fn table_headers() {
        let t1 = [0.2429, 0.3115, 0.3921, 0.4915];
        let t2 = [0.2441, 0.3300, 0.4330, 0.5590];
        for (i, beta) in [0.5, 0.6, 0.7, 0.8].into_iter().enumerate() {
            let a = chisq3().theta_true(0.5, beta).unwrap();
            let b = lognorm().theta_true(0.5, beta).unwrap();
            assert_eq!(format!("{a:.4}"), format!("{:.4}", t1[i]));
            assert_eq!(format!("{b:.4}"), format!("{:.4}", t2[i]));
        }
    }

    #[test]
    fn theta_true_closed_forms_agree_with_general_path() {
        for d in [
            lognorm(),
            ParentDistribution::log_normal(-0.3, 1.7).unwrap(),
            ParentDistribution::power(1.7).unwrap(),
        ] {
            for (a, b) in [(0.5, 0.5), (0.6, 0.5), (0.3, 0.9)] {
                let general = d.cdf(a * d.quantile(b).unwrap());
                assert!((d.theta_true(a, b).unwrap() - general).abs() < 1e-12);
            }
        }
        let p = ParentDistribution::power(2.0).unwrap();
        assert_eq!(p.theta_true(0.5, 0.8).unwrap(), 0.25 * 0.8);
        assert!(p.theta_true(1.0, 0.5).is_err());
    }

    #[test]
    fn sample_inverse_examples() {
        assert_eq!(lognorm().sample_inverse(0.5).unwrap(), 1.0);
        assert!((ParentDistribution::power(1.0).unwrap().sample_inverse(0.42).unwrap() - 0.42).abs() < 1e-15);
        // Bisection oracle for the χ²₃ median.
        let (mut lo, mut hi) = (0.0, 20.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if chisq3().cdf(mid) < 0.5 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        assert!((chisq3().sample_inverse(0.5).unwrap() - lo).abs() < 1e-11);
        assert!(chisq3().sample_inverse(0.0).is_err());
    }

    #[test]
    fn spec_grammar() {
        assert_eq!("chisq:3".parse::<ParentDistribution>().unwrap(), chisq3());
        assert_eq!("lognormal:0:1".parse::<ParentDistribution>().unwrap(), lognorm());
        assert_eq!(
            "power:.5".parse::<ParentDistribution>().unwrap(),
            ParentDistribution::power(0.5).unwrap()
        );
        assert_eq!(
            "lognormal:-1.5:0.25".parse::<ParentDistribution>().unwrap().to_string(),
            "lognormal:-1.5:0.25"
        );
        for bad in [
            "",
            "chisq",
            "chisq:",
            "chisq:0",
            "chisq:-3",
            "chisq:1e3",
            "chisq:inf",
            "chisq:nan",
            "chisq:3:1",
            "lognormal:0",
            "lognormal:0:0",
            "power:x",
            "gamma:2",
            " chisq:3",
            "chisq:3 ",
            "power:.",
        ] {
            assert!(bad.parse::<ParentDistribution>().is_err(), "{bad:?} should be rejected");
        }
        assert!("power:1.".parse::<ParentDistribution>().is_ok());
    }

    #[test]
    fn lip_params_validation() {
        assert!(LipParams::new(0.6, 0.5, 0.95, 20).is_ok());
        assert!(LipParams::new(1.0, 0.5, 0.95, 20).is_err());
        assert!(LipParams::new(0.6, 0.0, 0.95, 20).is_err());
        assert!(LipParams::new(0.6, 0.5, 1.0, 20).is_err());
        assert!(LipParams::new(0.6, 0.5, 0.95, 1).is_err());
        // floor(0.3 * 3) = 0
        assert!(LipParams::new(0.6, 0.3, 0.95, 3).is_err());
    }

    fn any_dist() -> impl Strategy<Value = ParentDistribution> {
        prop_oneof![
            (0.5f64..20.0).prop_map(|df| ParentDistribution::chi_square(df).unwrap()),
            (-2.0f64..2.0, 0.2f64..2.0).prop_map(|(m, s)| ParentDistribution::log_normal(m, s).unwrap()),
            (0.2f64..5.0).prop_map(|c| ParentDistribution::power(c).unwrap()),
        ]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(300))]

        #[test]
        fn quantile_cdf_round_trip(d in any_dist(), p in 0.001f64..0.999) {
            let x = d.quantile(p).unwrap();
            prop_assert!((d.cdf(x) - p).abs() <= 1e-10);
        }

        #[test]
        fn theta_below_beta_and_increasing(d in any_dist(), a in 0.05f64..0.9, b in 0.05f64..0.9) {
            let t = d.theta_true(a, b).unwrap();
            prop_assert!(t < b);
            prop_assert!(d.theta_true(a + 0.05, b).unwrap() > t);
            prop_assert!(d.theta_true(a, b + 0.05).unwrap() > t);
        }
    }
}
