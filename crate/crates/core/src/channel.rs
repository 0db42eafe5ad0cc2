//! Rician fading links: parameters, sampling of squared gains, and the exact
//! distribution functions of those gains.
//!
//! A link with Rician factor `K` and mean power `Ω` has squared gain
//! `λ = |h|²`, `h = (m + g₁) + i·g₂`, with line-of-sight amplitude
//! `m = √(KΩ/(K+1))` and `g₁, g₂ ~ N(0, Ω/(2(K+1)))`. Then `E[λ] = Ω` and
//!
//! ```text
//! P(λ ≤ x) = 1 − Q₁(√(2K), √(2(1+K)x/Ω))
//! f(x)     = ((1+K)/Ω) · e^(−K − (1+K)x/Ω) · I₀(2√(K(1+K)x/Ω))
//! ```

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::special::{bessel_i0e, marcum_q1_poisson};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RicianLink {
    rician_factor: f64,
    mean_power: f64,
}

impl RicianLink {
    pub fn new(rician_factor: f64, mean_power: f64) -> Result<Self> {
        if !(rician_factor >= 0.0 && rician_factor.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "Rician factor must be finite and nonnegative, got {rician_factor}"
            )));
        }
        if !(mean_power > 0.0 && mean_power.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "mean power must be finite and positive, got {mean_power}"
            )));
        }
        Ok(Self {
            rician_factor,
            mean_power,
        })
    }

    pub fn rician_factor(&self) -> f64 {
        self.rician_factor
    }

    pub fn mean_power(&self) -> f64 {
        self.mean_power
    }

    /// Rate parameter `(1+K)/Ω` of the scattered component.
    pub fn scale(&self) -> f64 {
        (1.0 + self.rician_factor) / self.mean_power
    }

    /// `Var[λ] = Ω²(2K+1)/(K+1)²`.
    pub fn variance(&self) -> f64 {
        let k = self.rician_factor;
        self.mean_power * self.mean_power * (2.0 * k + 1.0) / ((k + 1.0) * (k + 1.0))
    }

    /// Smallest `x` (to within bisection resolution) with `P(λ > x) ≤ tail`.
    pub fn upper_quantile(&self, tail: f64) -> f64 {
        let mut hi = self.mean_power.max(1e-300);
        while gain_sf(self, hi) > tail {
            hi *= 2.0;
        }
        let mut lo = 0.0;
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if gain_sf(self, mid) > tail {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        hi
    }
}

/// The source–destination, source–relay and relay–destination links.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Topology {
    pub sd: RicianLink,
    pub sr: RicianLink,
    pub rd: RicianLink,
}

impl Topology {
    pub fn new(sd: RicianLink, sr: RicianLink, rd: RicianLink) -> Self {
        Self { sd, sr, rd }
    }

    /// Non-fatal remarks about atypical configurations.
    pub fn advisories(&self) -> Vec<String> {
        let mut notes = Vec::new();
        if self.sd.mean_power() >= self.sr.mean_power() {
            notes.push(format!(
                "S-D mean power {} is not below S-R mean power {}; relaying rarely helps",
                self.sd.mean_power(),
                self.sr.mean_power()
            ));
        }
        notes
    }
}

/// One realization of the three squared channel gains.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelDraw {
    pub lambda_sd: f64,
    pub lambda_sr: f64,
    pub lambda_rd: f64,
}

impl ChannelDraw {
    pub fn new(lambda_sd: f64, lambda_sr: f64, lambda_rd: f64) -> Result<Self> {
        for (name, v) in [("sd", lambda_sd), ("sr", lambda_sr), ("rd", lambda_rd)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "squared gain lambda_{name} must be finite and nonnegative, got {v}"
                )));
            }
        }
        Ok(Self {
            lambda_sd,
            lambda_sr,
            lambda_rd,
        })
    }

    /// All three links with the same gain.
    pub fn uniform(lambda: f64) -> Result<Self> {
        Self::new(lambda, lambda, lambda)
    }
}

/// Identifies one reproducible random substream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RandomStream {
    pub seed: u64,
    pub stream_index: u64,
}

impl RandomStream {
    pub fn new(seed: u64, stream_index: u64) -> Self {
        Self { seed, stream_index }
    }

    /// Fresh generator positioned at the start of this substream.
    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_index);
        rng
    }
}

pub fn sample_gain<R: Rng + ?Sized>(link: &RicianLink, rng: &mut R) -> f64 {
    let k = link.rician_factor;
    let omega = link.mean_power;
    let los = (k * omega / (k + 1.0)).sqrt();
    let sigma = (omega / (2.0 * (k + 1.0))).sqrt();
    let g1: f64 = rng.sample(StandardNormal);
    let g2: f64 = rng.sample(StandardNormal);
    let re = los + sigma * g1;
    let im = sigma * g2;
    re * re + im * im
}

/// Draws the three links in the fixed order S-D, S-R, R-D.
pub fn sample_draw<R: Rng + ?Sized>(topology: &Topology, rng: &mut R) -> ChannelDraw {
    ChannelDraw {
        lambda_sd: sample_gain(&topology.sd, rng),
        lambda_sr: sample_gain(&topology.sr, rng),
        lambda_rd: sample_gain(&topology.rd, rng),
    }
}

/// `P(λ > x)`.
pub fn gain_sf(link: &RicianLink, x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    marcum_q1_poisson(link.rician_factor, link.scale() * x)
}

/// `P(λ ≤ x)`.
pub fn gain_cdf(link: &RicianLink, x: f64) -> f64 {
    1.0 - gain_sf(link, x)
}

pub fn gain_pdf(link: &RicianLink, x: f64) -> f64 {
    if x < 0.0 {
        return 0.0;
    }
    let k = link.rician_factor;
    let a = link.scale();
    let z = 2.0 * (k * a * x).sqrt();
    // e^{-K - ax} I₀(z) = e^{-K - ax + z} · (e^{-z} I₀(z))
    a * (-k - a * x + z).exp() * bessel_i0e(z)
}
