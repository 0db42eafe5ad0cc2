//! Per-realization SNRs and achievable rates for conventional (C-NOMA) and
//! opportunistic (O-NOMA) cooperative NOMA with a decode-and-forward relay.
//!
//! Noise power is normalized to one, so the transmit power equals the
//! transmit SNR `ρ`. All rates are in bit/s/Hz.

use crate::channel::ChannelDraw;
use crate::error::{Error, Result};

/// NOMA power allocation; `a1` is always derived as `1 - a2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerSplit {
    a1: f64,
    a2: f64,
}

impl PowerSplit {
    pub fn new(a2: f64) -> Result<Self> {
        if !(a2 > 0.0 && a2 < 0.5) {
            return Err(Error::InvalidParameter(format!(
                "power coefficient a2 must lie in (0, 0.5), got {a2}"
            )));
        }
        Ok(Self { a1: 1.0 - a2, a2 })
    }

    pub fn a1(&self) -> f64 {
        self.a1
    }

    pub fn a2(&self) -> f64 {
        self.a2
    }
}

/// Transmit SNR `ρ = P_T/σ²` in linear units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnrConfig {
    rho: f64,
}

impl SnrConfig {
    pub fn new(rho: f64) -> Result<Self> {
        if !(rho > 0.0 && rho.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "transmit SNR must be finite and positive, got {rho}"
            )));
        }
        Ok(Self { rho })
    }

    pub fn from_db(db: f64) -> Result<Self> {
        Self::new(db_to_linear(db))
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Direct,
    Relayed,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateBreakdown {
    pub rate_s1: f64,
    pub rate_s2: f64,
    pub sum: f64,
    pub mode: Mode,
}

impl RateBreakdown {
    fn new(rate_s1: f64, rate_s2: f64, mode: Mode) -> Self {
        Self {
            rate_s1,
            rate_s2,
            sum: rate_s1 + rate_s2,
            mode,
        }
    }
}

/// `log₂(1+x)` without cancellation for small `x`.
#[inline]
pub fn capacity(x: f64) -> f64 {
    x.ln_1p() / std::f64::consts::LN_2
}

/// SNR of `s₁` at the relay, decoded with `s₂` as interference.
pub fn snr_relay_s1(draw: &ChannelDraw, split: &PowerSplit, snr: &SnrConfig) -> f64 {
    let p = snr.rho * draw.lambda_sr;
    split.a1 * p / (split.a2 * p + 1.0)
}

/// SNR of `s₂` at the relay after `s₁` has been cancelled.
pub fn snr_relay_s2(draw: &ChannelDraw, split: &PowerSplit, snr: &SnrConfig) -> f64 {
    split.a2 * snr.rho * draw.lambda_sr
}

/// SNR of `s₁` at the destination in the first slot.
pub fn snr_dest_s1(draw: &ChannelDraw, split: &PowerSplit, snr: &SnrConfig) -> f64 {
    let p = snr.rho * draw.lambda_sd;
    split.a1 * p / (split.a2 * p + 1.0)
}

/// SNR of the forwarded `s₂` at the destination in the second slot.
pub fn snr_rd_s2(draw: &ChannelDraw, snr: &SnrConfig) -> f64 {
    snr.rho * draw.lambda_rd
}

/// SNR of `s₁` sent alone on the direct link.
pub fn snr_direct(draw: &ChannelDraw, snr: &SnrConfig) -> f64 {
    snr.rho * draw.lambda_sd
}

/// Conventional cooperative NOMA: always two-slot relaying, each symbol
/// limited by its weakest hop.
pub fn rate_cnoma(draw: &ChannelDraw, split: &PowerSplit, snr: &SnrConfig) -> RateBreakdown {
    let s1 =
        0.5 * capacity(snr_dest_s1(draw, split, snr)).min(capacity(snr_relay_s1(draw, split, snr)));
    let s2 = 0.5 * capacity(snr_relay_s2(draw, split, snr)).min(capacity(snr_rd_s2(draw, snr)));
    RateBreakdown::new(s1, s2, Mode::Relayed)
}

/// Opportunistic NOMA: relayed NOMA when `λ_SD < λ_SR`, otherwise `s₁`
/// alone over the direct link at full rate. Ties go to the direct link.
pub fn rate_onoma(draw: &ChannelDraw, split: &PowerSplit, snr: &SnrConfig) -> RateBreakdown {
    if draw.lambda_sd < draw.lambda_sr {
        // Same expressions as C-NOMA so the two agree to the last bit when
        // the relay is not the bottleneck.
        let s1 = 0.5 * capacity(snr_dest_s1(draw, split, snr));
        let s2 = 0.5 * capacity(snr_relay_s2(draw, split, snr)).min(capacity(snr_rd_s2(draw, snr)));
        RateBreakdown::new(s1, s2, Mode::Relayed)
    } else {
        RateBreakdown::new(capacity(snr_direct(draw, snr)), 0.0, Mode::Direct)
    }
}

/// `½log₂(1+ρλ) − ½log₂(1+a₂ρλ)`, i.e. `½log₂(1+γ)` for the destination SNR
/// of `s₁`, written as a single log to stay nonnegative under rounding.
pub fn relayed_s1(lambda_sd: f64, split: &PowerSplit, rho: f64) -> f64 {
    let p = rho * lambda_sd;
    0.5 * capacity(split.a1 * p / (split.a2 * p + 1.0))
}

/// Per-draw integrands whose averages form the combined O-NOMA sum rate:
/// the relayed and direct `s₁` expressions added on the same `λ_SD`, plus
/// the relayed `s₂` expression.
pub fn combined_sum_terms(draw: &ChannelDraw, split: &PowerSplit, snr: &SnrConfig) -> (f64, f64) {
    let rho = snr.rho;
    let p = rho * draw.lambda_sd;
    let c_s1 = 1.5 * capacity(p) - 0.5 * capacity(split.a2 * p);
    let c_s2 = 0.5 * capacity(rho * (split.a2 * draw.lambda_sr).min(draw.lambda_rd));
    (c_s1, c_s2)
}
