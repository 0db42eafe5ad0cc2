//! Closed-form statistical machinery for the average rates: Poisson-mixture
//! series coefficients of each Rician link, the survival-product CDFs of the
//! two minimum statistics, and the Gauss–Chebyshev series `H(ρ)` and `G(ρ)`.
//!
//! With `a = (1+K)/Ω`, `A = a·e^(−K)`, `B(n) = Kⁿ(1+K)ⁿ/(Ωⁿ(n!)²)` and
//! `B̃(n) = B(n)/a^(n+1)`, a link's survival function is
//!
//! ```text
//! P(λ > x) = A Σₙ B̃(n) n! e^(−ax) Σᵢ₌₀ⁿ (ax)ⁱ/i!
//! ```
//!
//! so `A·B̃(n)·n!` is the Poisson(K) mass at `n`. The CDFs below are one minus
//! the product of two such sums:
//!
//! * `cdf_gamma1` uses the S-D and S-R links, i.e. the CDF of `min(λ_SD, λ_SR)`;
//! * `cdf_gamma2` uses R-D and S-R with `a_y → a_y/a₂`, i.e. the CDF of
//!   `min(a₂λ_SR, λ_RD)`.
//!
//! `H(ρ)` and `G(ρ)` integrate `ρ(1−F(x))/(1+ρx)` against those survival
//! products term by term; each term reduces to `e^μ μ^(−m) E_{m+1}(μ)`
//! (`μ = (a_x+a_y)/ρ`, `m = i+j`), which is approximated by an `N_q`-point
//! Gauss–Chebyshev rule after the substitution `u = 2/(1+t) − 1`. Hence
//! `H(ρ) ≈ E[ln(1+ρ·min(λ_SD, λ_SR))]` and `G(ρ) ≈ E[ln(1+ρ·min(a₂λ_SR, λ_RD))]`.
//!
//! Double sums run over shells `n+k = s`. All factorials and powers are
//! combined in log space and exponentiated once per term, so Rician factors
//! in the thousands do not overflow.

use std::f64::consts::{LN_2, PI};

use crate::channel::RicianLink;
use crate::error::{Error, Result};
use crate::special::{ln_factorials, log_sum_exp};

/// Truncation and quadrature settings for the analytic series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesControl {
    /// Largest shell index `n + k` visited before giving up.
    pub max_terms: usize,
    /// A shell is negligible when it moves the partial sum by less than this
    /// fraction; two consecutive negligible shells past the Poisson mode
    /// terminate the series.
    pub rel_tol: f64,
    /// Number of Chebyshev nodes in the inner quadrature of `H` and `G`.
    pub quad_order: usize,
}

impl Default for SeriesControl {
    fn default() -> Self {
        Self {
            max_terms: 400,
            rel_tol: 1e-12,
            quad_order: 800,
        }
    }
}

impl SeriesControl {
    pub fn new(max_terms: usize, rel_tol: f64, quad_order: usize) -> Result<Self> {
        let ctrl = Self {
            max_terms,
            rel_tol,
            quad_order,
        };
        ctrl.validate()?;
        Ok(ctrl)
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_terms < 1 {
            return Err(Error::InvalidParameter(
                "max_terms must be at least 1".into(),
            ));
        }
        if !(self.rel_tol > 0.0 && self.rel_tol < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "rel_tol must lie in (0, 1), got {}",
                self.rel_tol
            )));
        }
        if self.quad_order < 2 {
            return Err(Error::InvalidParameter(
                "quad_order must be at least 2".into(),
            ));
        }
        Ok(())
    }

    /// Same tolerance with twice the series depth and quadrature order.
    pub fn doubled(&self) -> Self {
        Self {
            max_terms: self.max_terms * 2,
            rel_tol: self.rel_tol,
            quad_order: self.quad_order * 2,
        }
    }
}

/// Series coefficients of one link.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesCoeffs {
    /// `(1+K)/Ω`
    pub a: f64,
    /// `a·e^(−K)`
    pub big_a: f64,
    /// `B(n)`, `n = 0..terms`
    pub b: Vec<f64>,
    /// `B̃(n) = B(n)/a^(n+1)`
    pub b_tilde: Vec<f64>,
    rician_factor: f64,
    ln_big_a: f64,
    ln_b_tilde: Vec<f64>,
}

impl SeriesCoeffs {
    pub fn rician_factor(&self) -> f64 {
        self.rician_factor
    }

    /// `ln(A·B̃(n)·n!)`, the log Poisson(K) weight of index `n`.
    fn ln_weight(&self, n: usize, ln_fact: &[f64]) -> f64 {
        self.ln_big_a + self.ln_b_tilde[n] + ln_fact[n]
    }

    /// `A·Σₙ B̃(n)·n!` over the materialized terms; tends to one.
    pub fn normalization(&self) -> f64 {
        let lf = ln_factorials(self.b_tilde.len());
        (0..self.b_tilde.len())
            .map(|n| self.ln_weight(n, &lf).exp())
            .sum()
    }
}

/// Coefficients of `link` materialized for `n = 0..terms`.
pub fn make_coeffs(link: &RicianLink, terms: usize) -> SeriesCoeffs {
    let k = link.rician_factor();
    let a = link.scale();
    let ln_a = a.ln();
    let lf = ln_factorials(terms);
    let ln_kk = (k * (1.0 + k) / link.mean_power()).ln();

    let ln_b: Vec<f64> = (0..terms)
        .map(|n| {
            if n == 0 {
                0.0
            } else if k == 0.0 {
                f64::NEG_INFINITY
            } else {
                n as f64 * ln_kk - 2.0 * lf[n]
            }
        })
        .collect();
    let ln_b_tilde: Vec<f64> = ln_b
        .iter()
        .enumerate()
        .map(|(n, lb)| lb - (n as f64 + 1.0) * ln_a)
        .collect();

    SeriesCoeffs {
        a,
        big_a: a * (-k).exp(),
        b: ln_b.iter().map(|v| v.exp()).collect(),
        b_tilde: ln_b_tilde.iter().map(|v| v.exp()).collect(),
        rician_factor: k,
        ln_big_a: ln_a - k,
        ln_b_tilde,
    }
}

/// Sums `Σ_{n,k} W_x(n) W_y(k) · inner(n, k)` shell by shell. `inner` is
/// called exactly once per `(n, k)` in shell order, `n` ascending within a
/// shell.
fn sum_shells(
    wx: &SeriesCoeffs,
    wy: &SeriesCoeffs,
    ctrl: &SeriesControl,
    ln_fact: &[f64],
    what: &'static str,
    mut inner: impl FnMut(usize, usize) -> f64,
) -> Result<f64> {
    let mode = (wx.rician_factor + wy.rician_factor).ceil() as usize;
    let mut partial = 0.0;
    let mut quiet_shells = 0;
    for s in 0..=ctrl.max_terms {
        let mut shell = 0.0;
        for n in 0..=s {
            let k = s - n;
            let ln_w = wx.ln_weight(n, ln_fact) + wy.ln_weight(k, ln_fact);
            let value = inner(n, k);
            if ln_w > f64::NEG_INFINITY {
                shell += ln_w.exp() * value;
            }
        }
        partial += shell;
        if s >= mode && shell.abs() <= ctrl.rel_tol * partial.abs() {
            quiet_shells += 1;
            if quiet_shells >= 2 {
                return Ok(partial);
            }
        } else {
            quiet_shells = 0;
        }
    }
    Err(Error::NonConvergence {
        what,
        max_terms: ctrl.max_terms,
    })
}

fn check_a2(a2: f64) -> Result<()> {
    if !(a2 > 0.0 && a2 < 0.5) {
        return Err(Error::InvalidParameter(format!(
            "power coefficient a2 must lie in (0, 0.5), got {a2}"
        )));
    }
    Ok(())
}

fn check_rho(rho: f64) -> Result<()> {
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "transmit SNR must be finite and positive, got {rho}"
        )));
    }
    Ok(())
}

/// `e^(−rate·x) Σ_{i≤n} (rate·x)ⁱ/i!` for `n = 0..=n_max`.
fn poisson_prefix(rate_x: f64, n_max: usize, ln_fact: &[f64]) -> Vec<f64> {
    if rate_x == 0.0 {
        return vec![1.0; n_max + 1];
    }
    let ln_rx = rate_x.ln();
    let mut acc = 0.0;
    (0..=n_max)
        .map(|i| {
            acc += (-rate_x + i as f64 * ln_rx - ln_fact[i]).exp();
            acc.min(1.0)
        })
        .collect()
}

/// `1 − P(X > x)·P(Y' > x)` by the double series, unclamped. `y_scale`
/// multiplies the rate of `Y` (`1/a₂` turns `Y` into `a₂Y`).
fn survival_product_cdf(
    x: f64,
    link_x: &RicianLink,
    link_y: &RicianLink,
    y_scale: f64,
    ctrl: &SeriesControl,
    what: &'static str,
) -> Result<f64> {
    ctrl.validate()?;
    if x.is_nan() || x < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "CDF argument must be nonnegative, got {x}"
        )));
    }
    let n_max = ctrl.max_terms;
    let lf = ln_factorials(n_max + 1);
    let cx = make_coeffs(link_x, n_max + 1);
    let cy = make_coeffs(link_y, n_max + 1);
    let px = poisson_prefix(cx.a * x, n_max, &lf);
    let py = poisson_prefix(cy.a * y_scale * x, n_max, &lf);
    let survival = sum_shells(&cx, &cy, ctrl, &lf, what, |n, k| px[n] * py[k])?;
    Ok(1.0 - survival)
}

pub(crate) fn cdf_gamma1_unclamped(
    x: f64,
    sd: &RicianLink,
    sr: &RicianLink,
    ctrl: &SeriesControl,
) -> Result<f64> {
    survival_product_cdf(x, sd, sr, 1.0, ctrl, "gamma1 CDF")
}

pub(crate) fn cdf_gamma2_unclamped(
    x: f64,
    sr: &RicianLink,
    rd: &RicianLink,
    a2: f64,
    ctrl: &SeriesControl,
) -> Result<f64> {
    check_a2(a2)?;
    survival_product_cdf(x, rd, sr, 1.0 / a2, ctrl, "gamma2 CDF")
}

/// Series CDF built from the S-D and S-R coefficients. By construction this
/// is the distribution function of `min(λ_SD, λ_SR)`.
pub fn cdf_gamma1(x: f64, sd: &RicianLink, sr: &RicianLink, ctrl: &SeriesControl) -> Result<f64> {
    Ok(cdf_gamma1_unclamped(x, sd, sr, ctrl)?.clamp(0.0, 1.0))
}

/// Series CDF built from the R-D and (rescaled) S-R coefficients; the
/// distribution function of `min(a₂λ_SR, λ_RD)`.
pub fn cdf_gamma2(
    x: f64,
    sr: &RicianLink,
    rd: &RicianLink,
    a2: f64,
    ctrl: &SeriesControl,
) -> Result<f64> {
    Ok(cdf_gamma2_unclamped(x, sr, rd, a2, ctrl)?.clamp(0.0, 1.0))
}

/// Gauss–Chebyshev nodes prepared for a fixed `μ`.
struct ChebyshevRule {
    ln_one_plus_cos: Vec<f64>,
    decay: Vec<f64>,
    ln_abs_sin: Vec<f64>,
    ln_step: f64,
}

impl ChebyshevRule {
    fn new(order: usize, mu: f64) -> Self {
        let nq = order as f64;
        let mut ln_one_plus_cos = Vec::with_capacity(order);
        let mut decay = Vec::with_capacity(order);
        let mut ln_abs_sin = Vec::with_capacity(order);
        for t in 1..=order {
            let theta = (2.0 * t as f64 - 1.0) * PI / (2.0 * nq);
            // 1 + cos θ = 2cos²(θ/2), exact near θ = π.
            let one_plus_cos = 2.0 * (0.5 * theta).cos().powi(2);
            ln_one_plus_cos.push(one_plus_cos.ln());
            decay.push(2.0 * mu / one_plus_cos);
            ln_abs_sin.push(theta.sin().abs().ln());
        }
        Self {
            ln_one_plus_cos,
            decay,
            ln_abs_sin,
            ln_step: (PI / nq).ln(),
        }
    }

    /// `ln[(π/N) Σₜ (cos θₜ + 1)^(m−1) e^(−2μ/(cos θₜ + 1)) |sin θₜ|]`
    fn ln_sum(&self, m: usize) -> f64 {
        let p = m as f64 - 1.0;
        let terms = self
            .ln_one_plus_cos
            .iter()
            .zip(&self.decay)
            .zip(&self.ln_abs_sin)
            .map(|((lc, d), ls)| p * lc - d + ls);
        self.ln_step + log_sum_exp(terms)
    }
}

/// Shared evaluator for `H` and `G`: `x` contributes `(n, i)`, `y` with its
/// rate multiplied by `y_scale` contributes `(k, j)`.
fn chebyshev_rate_series(
    rho: f64,
    link_x: &RicianLink,
    link_y: &RicianLink,
    y_scale: f64,
    ctrl: &SeriesControl,
    what: &'static str,
) -> Result<f64> {
    ctrl.validate()?;
    check_rho(rho)?;
    let n_max = ctrl.max_terms;
    let lf = ln_factorials(n_max + 1);
    let cx = make_coeffs(link_x, n_max + 1);
    let cy = make_coeffs(link_y, n_max + 1);

    let ax = cx.a;
    let ay = cy.a * y_scale;
    let (ln_ax, ln_ay, ln_rho) = (ax.ln(), ay.ln(), rho.ln());
    let mu = (ax + ay) / rho;
    let ln_half_inv_mu = (1.0 / (2.0 * mu)).ln();
    let rule = ChebyshevRule::new(ctrl.quad_order, mu);

    // Per-m factor e^μ (1/(2μ))^m ρ^(−m) (π/N)Σₜ(...), filled lazily as
    // shells advance (shell s first needs m = s).
    let mut ln_kernel: Vec<f64> = Vec::with_capacity(n_max + 1);

    // Row partials R(n,k) = Σ_{j≤k} c(n,j) and prefix C(n,k) = Σ_{i≤n} R(i,k)
    // from the previous shell, indexed by n.
    let mut prev_row = vec![0.0; n_max + 2];
    let mut prev_cum = vec![0.0; n_max + 2];
    let mut cur_row = vec![0.0; n_max + 2];
    let mut cur_cum = vec![0.0; n_max + 2];
    let mut current_shell = usize::MAX;

    sum_shells(&cx, &cy, ctrl, &lf, what, |n, k| {
        let s = n + k;
        if s != current_shell {
            if current_shell != usize::MAX {
                std::mem::swap(&mut prev_row, &mut cur_row);
                std::mem::swap(&mut prev_cum, &mut cur_cum);
            }
            current_shell = s;
            let m = s;
            ln_kernel.push(mu + m as f64 * (ln_half_inv_mu - ln_rho) + rule.ln_sum(m));
        }
        let m = n + k;
        let ln_c = lf[m] - lf[n] - lf[k] + n as f64 * ln_ax + k as f64 * ln_ay + ln_kernel[m];
        let c = ln_c.exp();
        let row = if k == 0 { c } else { prev_row[n] + c };
        let cum = if n == 0 { row } else { prev_cum[n - 1] + row };
        cur_row[n] = row;
        cur_cum[n] = cum;
        cum
    })
}

/// `H(ρ)`, the Gauss–Chebyshev series over the S-D/S-R survival product.
pub fn h_function(rho: f64, sd: &RicianLink, sr: &RicianLink, ctrl: &SeriesControl) -> Result<f64> {
    chebyshev_rate_series(rho, sd, sr, 1.0, ctrl, "H series")
}

/// `G(ρ)`, the same series over R-D and S-R with the S-R rate scaled by `1/a₂`.
pub fn g_function(
    rho: f64,
    sr: &RicianLink,
    rd: &RicianLink,
    a2: f64,
    ctrl: &SeriesControl,
) -> Result<f64> {
    check_a2(a2)?;
    chebyshev_rate_series(rho, rd, sr, 1.0 / a2, ctrl, "G series")
}

/// Average rates of one scheme in bit/s/Hz.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticRates {
    pub s1: f64,
    pub s2: f64,
    pub sum: f64,
}

impl AnalyticRates {
    fn new(s1: f64, s2: f64) -> Self {
        Self {
            s1,
            s2,
            sum: s1 + s2,
        }
    }
}

/// `[3H(ρ) − H(ρa₂)] / (2 ln 2)`
pub fn avg_rate_s1_analytic(
    rho: f64,
    a2: f64,
    sd: &RicianLink,
    sr: &RicianLink,
    ctrl: &SeriesControl,
) -> Result<f64> {
    check_a2(a2)?;
    let h = h_function(rho, sd, sr, ctrl)?;
    let h_a2 = h_function(rho * a2, sd, sr, ctrl)?;
    Ok((3.0 * h - h_a2) / (2.0 * LN_2))
}

/// `G(ρ) / (2 ln 2)`
pub fn avg_rate_s2_analytic(
    rho: f64,
    a2: f64,
    sr: &RicianLink,
    rd: &RicianLink,
    ctrl: &SeriesControl,
) -> Result<f64> {
    Ok(g_function(rho, sr, rd, a2, ctrl)? / (2.0 * LN_2))
}

/// Both components of the combined O-NOMA average sum rate,
/// `[3H(ρ) − H(ρa₂) + G(ρ)] / (2 ln 2)`.
pub fn combined_rates_analytic(
    rho: f64,
    a2: f64,
    topology: &crate::channel::Topology,
    ctrl: &SeriesControl,
) -> Result<AnalyticRates> {
    let s1 = avg_rate_s1_analytic(rho, a2, &topology.sd, &topology.sr, ctrl)?;
    let s2 = avg_rate_s2_analytic(rho, a2, &topology.sr, &topology.rd, ctrl)?;
    Ok(AnalyticRates::new(s1, s2))
}

pub fn total_avg_rate_analytic(
    rho: f64,
    a2: f64,
    topology: &crate::channel::Topology,
    ctrl: &SeriesControl,
) -> Result<f64> {
    Ok(combined_rates_analytic(rho, a2, topology, ctrl)?.sum)
}

/// Average C-NOMA rates from the same series. The relayed `s₁` rate is
/// limited by `min(λ_SD, λ_SR)`, giving `[H(ρ) − H(ρa₂)]/(2 ln 2)`; the `s₂`
/// rate is the same `G(ρ)/(2 ln 2)` as in the combined expression.
pub fn cnoma_rates_analytic(
    rho: f64,
    a2: f64,
    topology: &crate::channel::Topology,
    ctrl: &SeriesControl,
) -> Result<AnalyticRates> {
    check_a2(a2)?;
    let h = h_function(rho, &topology.sd, &topology.sr, ctrl)?;
    let h_a2 = h_function(rho * a2, &topology.sd, &topology.sr, ctrl)?;
    let s2 = avg_rate_s2_analytic(rho, a2, &topology.sr, &topology.rd, ctrl)?;
    Ok(AnalyticRates::new((h - h_a2) / (2.0 * LN_2), s2))
}
