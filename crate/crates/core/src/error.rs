use std::fmt;

use serde::{Deserialize, Serialize};

/// Liquidity conditions the dealer must respect to avoid outside financing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LiquidityCondition {
    /// Client cash covers the general-repo loan plus the auction fee.
    AuctionFunding,
    /// The notes are bought back no higher than they were sold.
    NoteRepurchase,
    /// Cash on hand covers the buy-back of the notes.
    RepurchaseFunding,
    /// Interest carry alone covers the special-repo interest and the fee.
    ClosingWithoutSpeculation,
    /// Carry plus the short-sale gain covers the closing payment.
    ClosingWithSpeculation,
}

impl fmt::Display for LiquidityCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Self::AuctionFunding => "auction funding",
            Self::NoteRepurchase => "note repurchase price",
            Self::RepurchaseFunding => "repurchase funding",
            Self::ClosingWithoutSpeculation => "closing without speculation",
            Self::ClosingWithSpeculation => "closing with speculation",
        };
        f.write_str(name)
    }
}

/// Coarse error classes, used for exit codes and FFI status codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Validation,
    Pricing,
    Liquidity,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid {field}: {reason}")]
    InvalidInput { field: &'static str, reason: String },

    #[error(
        "collateral volatility is zero: the variance ratio of the ergodic rate model is undefined"
    )]
    ZeroVolatility,

    #[error("haircut {haircut} is not positive: repurchase price is too high for an implicit call")]
    NonPositiveHaircut { haircut: f64 },

    #[error("Black-Scholes call value {call} is not below the spot price {spot}")]
    CallNotBelowSpot { call: f64, spot: f64 },

    #[error("haircuts and repo rates are inconsistent: (1+r_sR)(1-h_p) - (1+r_R)(1-h_c) = {residual:e}")]
    InconsistentRelations { residual: f64 },

    #[error("liquidity condition '{condition}' fails at step {step} (slack {slack})")]
    Liquidity {
        step: u8,
        condition: LiquidityCondition,
        slack: f64,
    },
}

impl Error {
    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        Self::InvalidInput {
            field,
            reason: reason.into(),
        }
    }

    pub fn kind(&self) -> ErrorKind {
        match self {
            Self::InvalidInput { .. } | Self::ZeroVolatility | Self::InconsistentRelations { .. } => {
                ErrorKind::Validation
            }
            Self::NonPositiveHaircut { .. } | Self::CallNotBelowSpot { .. } => ErrorKind::Pricing,
            Self::Liquidity { .. } => ErrorKind::Liquidity,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn ensure_finite(field: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::invalid(field, format!("must be finite, got {value}")))
    }
}
