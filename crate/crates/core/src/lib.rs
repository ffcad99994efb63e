//! Scale-free tests of exponentiality built on the characterization that
//! max(X_1, .., X_k) and X_1 + X_2/2 + .. + X_k/k are equidistributed
//! exactly for exponential laws (Arnold–Villasenor).
//!
//! Two statistic families compare the V-empirical distribution functions of
//! the two sides: an integral statistic I_n (asymptotically normal, with
//! closed-form projection variances for every order k) and a Kolmogorov-type
//! statistic D_n (calibrated by simulation). The crate also carries the
//! asymptotic machinery around them: large-deviation coefficients, local
//! Bahadur efficiencies against Makeham, Weibull, gamma and EMNW
//! alternatives, construction of the most favorable alternatives for which
//! each test is locally optimal, and a reproducible Monte Carlo engine for
//! critical values and powers.

pub mod alternatives;
pub mod bahadur;
pub mod error;
pub mod kernels;
pub mod montecarlo;
pub mod quadrature;
pub mod reference;
pub mod rng;
pub mod sample;
pub mod search;
pub mod special;
pub mod tables;

pub use alternatives::{AlternativeFamily, AlternativeSpec};
pub use bahadur::{EfficiencyReport, LaoDensity};
pub use error::{Error, Result};
pub use kernels::NullAsymptotics;
pub use montecarlo::{
    CriticalValueTable, MonteCarloConfig, PValueMethod, PowerEstimate,
};
pub use sample::{
    PValueKind, Sample, StatisticKind, TestFamily, TestResult, TupleStrategy,
};
