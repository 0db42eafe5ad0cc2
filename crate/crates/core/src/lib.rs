//! Achievable-rate analysis of cooperative NOMA relaying over Rician fading.
//!
//! The crate compares conventional cooperative NOMA (C-NOMA), where the
//! source always relays, with opportunistic NOMA (O-NOMA), where a source
//! that knows the instantaneous gains sends directly whenever the S-D link
//! beats the S-R link. Average rates come from two independent routes:
//! the series/quadrature expressions in [`analytic`] and seeded, parallel,
//! reproducible simulation in [`monte_carlo`].

pub mod analytic;
pub mod channel;
pub mod error;
pub mod monte_carlo;
pub mod quad;
pub mod rates;
pub mod runner;
pub mod special;

pub use error::{Error, Result};
