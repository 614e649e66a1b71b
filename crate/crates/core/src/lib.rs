//! Finite-sample inference for the low-income proportion (at-risk-of-poverty
//! rate) `theta = F(alpha * F^{-1}(beta))`: the order-statistic point
//! estimator, its Clopper–Pearson-type interval, exact coverage and length
//! under parametric income distributions, and a seeded Monte Carlo check.

pub mod cli;
pub mod distributions;
pub mod error;
pub mod exact;
pub mod lip;
pub mod quadrature;
pub mod sim;
pub mod special;

pub use distributions::{LipParams, ParentDistribution};
pub use error::{Error, Result};
pub use exact::{CoverageReport, EtaPmf, PmfModel};
pub use lip::{EstimateResult, ProportionInterval, Sample};
pub use sim::{SimulationConfig, SimulationResult};
pub use special::Probability;
