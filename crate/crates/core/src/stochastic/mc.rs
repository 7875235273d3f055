//! Seeded Monte Carlo estimates of censored payoffs.
//!
//! Variates come from ChaCha12 (`rand_chacha`) mapped through the ziggurat
//! sampler of `rand_distr::StandardNormal`. The sample is cut into fixed
//! chunks of [`CHUNK_SIZE`] draws; chunk `i` uses the key derived from the
//! seed and ChaCha stream `i`. Chunks are summed in index order, so the
//! estimate does not depend on how many rayon workers ran the chunks.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::censored::GaussianParams;
use crate::error::{Error, Result};

/// Identifies the generator and stream layout. Bump when either changes.
pub const GENERATOR: &str = "chacha12-ziggurat/chunk65536/v1";

pub const CHUNK_SIZE: u64 = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PayoffMode {
    /// `min(K, X)`
    Min,
    /// `max(K, X)`
    Max,
    /// `max(K - X, 0)`
    PutPayoff,
}

impl PayoffMode {
    #[inline]
    fn apply(self, strike: f64, x: f64) -> f64 {
        match self {
            Self::Min => strike.min(x),
            Self::Max => strike.max(x),
            Self::PutPayoff => (strike - x).max(0.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub mean: f64,
    pub sd: f64,
    pub se_mean: f64,
    pub se_sd: f64,
    pub n_samples: u64,
    pub seed: u64,
    pub generator: String,
}

impl McEstimate {
    /// Distance of `value` from the sample mean in standard errors.
    pub fn mean_z(&self, value: f64) -> f64 {
        z_score(value - self.mean, self.se_mean)
    }

    pub fn sd_z(&self, value: f64) -> f64 {
        z_score(value - self.sd, self.se_sd)
    }
}

fn z_score(delta: f64, se: f64) -> f64 {
    if se == 0.0 {
        if delta == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        delta.abs() / se
    }
}

/// Power sums of `payoff - shift` up to the fourth order.
#[derive(Debug, Clone, Copy, Default)]
struct PowerSums([f64; 4]);

impl PowerSums {
    fn push(&mut self, y: f64) {
        let y2 = y * y;
        self.0[0] += y;
        self.0[1] += y2;
        self.0[2] += y2 * y;
        self.0[3] += y2 * y2;
    }

    fn merge(mut self, other: &Self) -> Self {
        for (a, b) in self.0.iter_mut().zip(other.0) {
            *a += b;
        }
        self
    }
}

/// Draws `n` normal forward prices and returns sample statistics of the
/// requested payoff.
pub fn mc_sample_stats(
    strike: f64,
    g: GaussianParams,
    n: u64,
    seed: u64,
    mode: PayoffMode,
) -> Result<McEstimate> {
    if n < 2 {
        return Err(Error::invalid("n", format!("need at least 2 samples, got {n}")));
    }
    if !strike.is_finite() {
        return Err(Error::invalid("strike", "must be finite"));
    }
    let g = GaussianParams::new(g.mean, g.sd)?;
    // Centering on the payoff at the mean keeps the power sums well scaled.
    let shift = mode.apply(strike, g.mean);
    let chunks = n.div_ceil(CHUNK_SIZE);

    let partials: Vec<PowerSums> = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let len = CHUNK_SIZE.min(n - chunk * CHUNK_SIZE);
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            rng.set_stream(chunk);
            let mut sums = PowerSums::default();
            for _ in 0..len {
                let z: f64 = StandardNormal.sample(&mut rng);
                sums.push(mode.apply(strike, g.mean + g.sd * z) - shift);
            }
            sums
        })
        .collect();
    let total = partials.iter().fold(PowerSums::default(), PowerSums::merge);

    let nf = n as f64;
    let [s1, s2, s3, s4] = total.0.map(|s| s / nf);
    let var_pop = (s2 - s1 * s1).max(0.0);
    let sd = (var_pop * nf / (nf - 1.0)).sqrt();
    let m4 = (s4 - 4.0 * s1 * s3 + 6.0 * s1 * s1 * s2 - 3.0 * s1.powi(4)).max(0.0);
    let se_sd = if sd > 0.0 {
        ((m4 - var_pop * var_pop).max(0.0) / nf).sqrt() / (2.0 * sd)
    } else {
        0.0
    };

    Ok(McEstimate {
        mean: shift + s1,
        sd,
        se_mean: sd / nf.sqrt(),
        se_sd,
        n_samples: n,
        seed,
        generator: GENERATOR.to_owned(),
    })
}
