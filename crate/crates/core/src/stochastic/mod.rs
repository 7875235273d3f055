//! Gaussian helpers, censored moments of a normal forward price, and the
//! Monte Carlo oracle that checks them.

pub mod censored;
pub mod mc;
pub mod normal;

pub use censored::{
    call_payoff_mean, censored_max_mean, censored_max_sd, censored_min_mean, censored_min_sd,
    put_payoff_mean, GaussianParams,
};
pub use mc::{mc_sample_stats, McEstimate, PayoffMode};
pub use normal::{std_normal_cdf, std_normal_pdf};
