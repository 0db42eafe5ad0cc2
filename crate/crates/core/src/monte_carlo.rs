//! Seeded Monte Carlo estimation and numerical-integration oracles.
//!
//! Determinism: the `n_samples` draws are split into fixed-size chunks and
//! chunk `c` always consumes substream `c` of the configured seed. Chunks
//! run on the current rayon pool, their partial sums are collected in chunk
//! order and folded sequentially, so the result is bit-identical for any
//! number of worker threads.

use std::cell::RefCell;
use std::f64::consts::LN_2;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::channel::{
    gain_cdf, gain_pdf, gain_sf, sample_draw, ChannelDraw, RandomStream, RicianLink, Topology,
};
use crate::error::{Error, Result};
use crate::quad::{integrate, QuadOptions};
use crate::rates::{
    capacity, combined_sum_terms, rate_cnoma, rate_onoma, relayed_s1, Mode, PowerSplit, SnrConfig,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McConfig {
    pub n_samples: u64,
    pub seed: u64,
    /// Draws per substream chunk.
    pub chunk_size: u64,
}

impl Default for McConfig {
    fn default() -> Self {
        Self {
            n_samples: 1_000_000,
            seed: 1,
            chunk_size: 1 << 16,
        }
    }
}

impl McConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_samples == 0 {
            return Err(Error::InvalidParameter(
                "n_samples must be at least 1".into(),
            ));
        }
        if self.chunk_size == 0 {
            return Err(Error::InvalidParameter(
                "chunk_size must be at least 1".into(),
            ));
        }
        Ok(())
    }

    fn chunks(&self) -> impl IndexedParallelIterator<Item = (u64, u64)> + '_ {
        let n_chunks = self.n_samples.div_ceil(self.chunk_size) as usize;
        (0..n_chunks).into_par_iter().map(move |c| {
            let c = c as u64;
            let start = c * self.chunk_size;
            let len = self.chunk_size.min(self.n_samples - start);
            (c, len)
        })
    }
}

/// Sample mean with its standard error and a normal 95% interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub std_error: f64,
    pub ci95_low: f64,
    pub ci95_high: f64,
    pub n: u64,
}

impl Estimate {
    fn from_moments(sum: f64, sum_sq: f64, n: u64) -> Self {
        let nf = n as f64;
        let mean = sum / nf;
        let var = if n > 1 {
            ((sum_sq - sum * mean) / (nf - 1.0)).max(0.0)
        } else {
            0.0
        };
        let std_error = (var / nf).sqrt();
        Self {
            mean,
            std_error,
            ci95_low: mean - 1.96 * std_error,
            ci95_high: mean + 1.96 * std_error,
            n,
        }
    }
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    #[inline]
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn merge(&mut self, other: &Self) {
        self.add(other.sum);
        self.add(other.carry);
    }

    fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

#[derive(Debug, Clone, Copy)]
struct Moments<const N: usize> {
    sum: [CompensatedSum; N],
    sum_sq: [CompensatedSum; N],
    n: u64,
}

impl<const N: usize> Moments<N> {
    fn new() -> Self {
        Self {
            sum: [CompensatedSum::default(); N],
            sum_sq: [CompensatedSum::default(); N],
            n: 0,
        }
    }

    #[inline]
    fn push(&mut self, values: &[f64; N]) {
        for (i, &v) in values.iter().enumerate() {
            self.sum[i].add(v);
            self.sum_sq[i].add(v * v);
        }
        self.n += 1;
    }

    fn merge(&mut self, other: &Self) {
        for i in 0..N {
            self.sum[i].merge(&other.sum[i]);
            self.sum_sq[i].merge(&other.sum_sq[i]);
        }
        self.n += other.n;
    }

    fn estimates(&self) -> [Estimate; N] {
        std::array::from_fn(|i| {
            Estimate::from_moments(self.sum[i].value(), self.sum_sq[i].value(), self.n)
        })
    }
}

/// Averages the `N` per-draw quantities produced by `per_draw` over
/// `mc.n_samples` independent channel draws.
pub fn simulate<const N: usize, F>(
    topology: &Topology,
    mc: &McConfig,
    per_draw: F,
) -> Result<[Estimate; N]>
where
    F: Fn(&ChannelDraw) -> [f64; N] + Sync,
{
    mc.validate()?;
    let partials: Vec<Moments<N>> = mc
        .chunks()
        .map(|(chunk, len)| {
            let mut rng = RandomStream::new(mc.seed, chunk).rng();
            let mut acc = Moments::new();
            for _ in 0..len {
                let draw = sample_draw(topology, &mut rng);
                acc.push(&per_draw(&draw));
            }
            acc
        })
        .collect();
    let mut total = Moments::new();
    for p in &partials {
        total.merge(p);
    }
    Ok(total.estimates())
}

/// All `n_samples` draws, in substream order.
pub fn sample_draws(topology: &Topology, mc: &McConfig) -> Result<Vec<ChannelDraw>> {
    mc.validate()?;
    let chunks: Vec<Vec<ChannelDraw>> = mc
        .chunks()
        .map(|(chunk, len)| {
            let mut rng = RandomStream::new(mc.seed, chunk).rng();
            (0..len).map(|_| sample_draw(topology, &mut rng)).collect()
        })
        .collect();
    Ok(chunks.concat())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SchemeSelector {
    /// Opportunistic NOMA, averaged per draw with its mode switch.
    ONoma,
    /// Conventional cooperative NOMA.
    CNoma,
    /// O-NOMA combined sum: relayed and direct `s₁` terms added on every
    /// draw, plus the relayed `s₂` term.
    CombinedSum,
}

impl SchemeSelector {
    pub const ALL: [SchemeSelector; 3] = [Self::ONoma, Self::CNoma, Self::CombinedSum];

    pub fn label(&self) -> &'static str {
        match self {
            Self::ONoma => "onoma",
            Self::CNoma => "cnoma",
            Self::CombinedSum => "combined",
        }
    }
}

impl fmt::Display for SchemeSelector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for SchemeSelector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "onoma" => Ok(Self::ONoma),
            "cnoma" => Ok(Self::CNoma),
            "combined" => Ok(Self::CombinedSum),
            other => Err(Error::Parse(format!(
                "unknown scheme {other:?} (expected onoma, cnoma or combined)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateEstimate {
    pub s1: Estimate,
    pub s2: Estimate,
    pub sum: Estimate,
}

/// Estimates for every scheme from one shared set of draws.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointEstimates {
    pub onoma: RateEstimate,
    pub cnoma: RateEstimate,
    pub combined: RateEstimate,
    /// Fraction of draws on which O-NOMA picks the direct link.
    pub direct_fraction: Estimate,
}

impl PointEstimates {
    pub fn get(&self, scheme: SchemeSelector) -> &RateEstimate {
        match scheme {
            SchemeSelector::ONoma => &self.onoma,
            SchemeSelector::CNoma => &self.cnoma,
            SchemeSelector::CombinedSum => &self.combined,
        }
    }
}

pub fn estimate_point(
    topology: &Topology,
    split: &PowerSplit,
    snr: &SnrConfig,
    mc: &McConfig,
) -> Result<PointEstimates> {
    let est = simulate(topology, mc, |d| {
        let on = rate_onoma(d, split, snr);
        let cn = rate_cnoma(d, split, snr);
        let (c1, c2) = combined_sum_terms(d, split, snr);
        let direct = if on.mode == Mode::Direct { 1.0 } else { 0.0 };
        [
            on.rate_s1,
            on.rate_s2,
            on.sum,
            cn.rate_s1,
            cn.rate_s2,
            cn.sum,
            c1,
            c2,
            c1 + c2,
            direct,
        ]
    })?;
    let rate = |i: usize| RateEstimate {
        s1: est[i],
        s2: est[i + 1],
        sum: est[i + 2],
    };
    Ok(PointEstimates {
        onoma: rate(0),
        cnoma: rate(3),
        combined: rate(6),
        direct_fraction: est[9],
    })
}

pub fn estimate_rate(
    scheme: SchemeSelector,
    topology: &Topology,
    split: &PowerSplit,
    snr: &SnrConfig,
    mc: &McConfig,
) -> Result<RateEstimate> {
    Ok(*estimate_point(topology, split, snr, mc)?.get(scheme))
}

/// Fraction of `samples` at or below each grid point.
pub fn empirical_cdf(samples: &[f64], grid: &[f64]) -> Result<Vec<f64>> {
    if samples.is_empty() {
        return Err(Error::EmptySample);
    }
    if grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidParameter(
            "CDF grid must be sorted ascending".into(),
        ));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    Ok(grid
        .iter()
        .map(|&g| sorted.partition_point(|&v| v <= g) as f64 / n)
        .collect())
}

/// Kolmogorov–Smirnov distance between the empirical distribution of an
/// ascending-sorted sample and `cdf`, evaluated at every sample point.
pub fn ks_distance_sorted(sorted: &[f64], cdf: impl Fn(f64) -> f64) -> Result<f64> {
    if sorted.is_empty() {
        return Err(Error::EmptySample);
    }
    let n = sorted.len() as f64;
    Ok(sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max))
}

/// KS distance restricted to `grid_points` sample quantiles, for CDFs that
/// are too costly to evaluate at every sample. The restriction can miss at
/// most `1/grid_points` of the true supremum.
pub fn ks_distance_on_quantiles(
    sorted: &[f64],
    grid_points: usize,
    mut cdf: impl FnMut(f64) -> Result<f64>,
) -> Result<f64> {
    if sorted.is_empty() {
        return Err(Error::EmptySample);
    }
    let n = sorted.len();
    let mut worst: f64 = 0.0;
    for g in 0..grid_points {
        let idx = ((g as f64 + 0.5) / grid_points as f64 * n as f64) as usize;
        let idx = idx.min(n - 1);
        let x = sorted[idx];
        let below = sorted.partition_point(|&v| v < x) as f64 / n as f64;
        let at_or_below = sorted.partition_point(|&v| v <= x) as f64 / n as f64;
        let f = cdf(x)?;
        worst = worst.max((f - below).abs()).max((at_or_below - f).abs());
    }
    Ok(worst)
}

const ORACLE_TAIL: f64 = 1e-14;

fn oracle_opts() -> QuadOptions {
    QuadOptions {
        abs_tol: 1e-8,
        max_splits: 4000,
    }
}

fn breakpoints(mut pts: Vec<f64>, hi: f64) -> Vec<f64> {
    pts.push(0.0);
    pts.push(hi);
    pts.retain(|p| p.is_finite() && *p >= 0.0 && *p <= hi);
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

fn check_rho(rho: f64) -> Result<()> {
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "transmit SNR must be finite and positive, got {rho}"
        )));
    }
    Ok(())
}

/// `E[log₂(1+ρλ)]` by adaptive quadrature against the exact density.
pub fn oracle_expected_log(link: &RicianLink, rho: f64) -> Result<f64> {
    check_rho(rho)?;
    let hi = link.upper_quantile(ORACLE_TAIL);
    let pts = breakpoints(vec![1.0 / rho, 10.0 / rho, link.mean_power()], hi);
    integrate(
        |x| capacity(rho * x) * gain_pdf(link, x),
        &pts,
        oracle_opts(),
        "expected log rate",
    )
}

/// `½E[log₂(1+ρ·min(a₂λ_SR, λ_RD))]`, integrating `ρ/((1+ρx) ln 2)` against
/// the survival function of the minimum.
pub fn oracle_expected_min_log(sr: &RicianLink, rd: &RicianLink, a2: f64, rho: f64) -> Result<f64> {
    check_rho(rho)?;
    if !(a2 > 0.0 && a2 < 0.5) {
        return Err(Error::InvalidParameter(format!(
            "power coefficient a2 must lie in (0, 0.5), got {a2}"
        )));
    }
    let hi = (a2 * sr.upper_quantile(ORACLE_TAIL)).min(rd.upper_quantile(ORACLE_TAIL));
    let pts = breakpoints(vec![1.0 / rho, 10.0 / rho], hi);
    let v = integrate(
        |x| rho / ((1.0 + rho * x) * LN_2) * gain_sf(sr, x / a2) * gain_sf(rd, x),
        &pts,
        oracle_opts(),
        "expected min log rate",
    )?;
    Ok(0.5 * v)
}

/// `P(λ_SD ≥ λ_SR)`, the probability that O-NOMA uses the direct link.
pub fn oracle_direct_probability(sd: &RicianLink, sr: &RicianLink) -> Result<f64> {
    let hi = sd.upper_quantile(ORACLE_TAIL);
    let pts = breakpoints(vec![sd.mean_power(), sr.mean_power()], hi);
    integrate(
        |x| gain_pdf(sd, x) * gain_cdf(sr, x),
        &pts,
        oracle_opts(),
        "direct-mode probability",
    )
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleRates {
    pub s1: f64,
    pub s2: f64,
    pub sum: f64,
    pub direct_fraction: f64,
}

/// Average O-NOMA rates with the mode switch, by nested quadrature:
///
/// ```text
/// s₁ = ∫ f_SD(x) [P(λ_SR > x)·r₁(x) + P(λ_SR ≤ x)·log₂(1+ρx)] dx
/// s₂ = ∫ f_SR(y) P(λ_SD < y) φ(a₂y) dy,  φ(u) = ½∫₀ᵘ ρ P(λ_RD > t)/((1+ρt) ln 2) dt
/// ```
///
/// with `r₁` the relayed `s₁` rate.
pub fn oracle_onoma_rates(
    topology: &Topology,
    split: &PowerSplit,
    snr: &SnrConfig,
) -> Result<OracleRates> {
    let (sd, sr, rd) = (&topology.sd, &topology.sr, &topology.rd);
    let rho = snr.rho();
    let a2 = split.a2();

    let hi_sd = sd.upper_quantile(ORACLE_TAIL);
    let pts = breakpoints(
        vec![1.0 / rho, 10.0 / rho, sd.mean_power(), sr.mean_power()],
        hi_sd,
    );
    let s1 = integrate(
        |x| {
            let p_relay = gain_sf(sr, x);
            gain_pdf(sd, x)
                * (p_relay * relayed_s1(x, split, rho) + (1.0 - p_relay) * capacity(rho * x))
        },
        &pts,
        oracle_opts(),
        "O-NOMA s1 rate",
    )?;

    let hi_rd = rd.upper_quantile(ORACLE_TAIL);
    let inner_failure: RefCell<Option<Error>> = RefCell::new(None);
    let phi = |u: f64| -> f64 {
        let top = u.min(hi_rd);
        if top <= 0.0 {
            return 0.0;
        }
        let pts = breakpoints(vec![1.0 / rho], top);
        match integrate(
            |t| rho / ((1.0 + rho * t) * LN_2) * gain_sf(rd, t),
            &pts,
            QuadOptions {
                abs_tol: 1e-10,
                max_splits: 4000,
            },
            "O-NOMA s2 inner rate",
        ) {
            Ok(v) => 0.5 * v,
            Err(e) => {
                inner_failure.borrow_mut().get_or_insert(e);
                0.0
            }
        }
    };
    let hi_sr = sr.upper_quantile(ORACLE_TAIL);
    let pts = breakpoints(
        vec![sd.mean_power(), sr.mean_power(), 1.0 / (a2 * rho)],
        hi_sr,
    );
    let s2 = integrate(
        |y| gain_pdf(sr, y) * gain_cdf(sd, y) * phi(a2 * y),
        &pts,
        oracle_opts(),
        "O-NOMA s2 rate",
    )?;
    if let Some(e) = inner_failure.into_inner() {
        return Err(e);
    }

    Ok(OracleRates {
        s1,
        s2,
        sum: s1 + s2,
        direct_fraction: oracle_direct_probability(sd, sr)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::exp_e1;

    fn link(k: f64, omega: f64) -> RicianLink {
        RicianLink::new(k, omega).unwrap()
    }

    fn fig4() -> Topology {
        Topology::new(link(3.0, 3.0), link(4.0, 6.0), link(4.0, 6.0))
    }

    fn mc(n: u64, seed: u64) -> McConfig {
        McConfig {
            n_samples: n,
            seed,
            chunk_size: 10_000,
        }
    }

    #[test]
    fn empirical_cdf_direct_count() {
        let v = empirical_cdf(&[1.0, 2.0, 3.0], &[0.0, 2.0, 5.0]).unwrap();
        assert_eq!(v, vec![0.0, 2.0 / 3.0, 1.0]);
        assert!(matches!(
            empirical_cdf(&[], &[1.0]),
            Err(Error::EmptySample)
        ));
        assert!(empirical_cdf(&[1.0], &[2.0, 1.0]).is_err());
    }

    proptest::proptest! {
        #[test]
        fn empirical_cdf_is_a_distribution_function(
            samples in proptest::collection::vec(-10.0f64..10.0, 1..200),
            mut grid in proptest::collection::vec(-12.0f64..12.0, 0..50),
        ) {
            grid.sort_by(f64::total_cmp);
            let f = empirical_cdf(&samples, &grid).unwrap();
            proptest::prop_assert!(f.windows(2).all(|w| w[0] <= w[1]));
            proptest::prop_assert!(f.iter().all(|p| (0.0..=1.0).contains(p)));
        }
    }

    #[test]
    fn empirical_cdf_of_exponential() {
        let l = link(0.0, 1.0);
        let mut rng = RandomStream::new(5, 0).rng();
        let xs: Vec<f64> = (0..1_000_000)
            .map(|_| crate::channel::sample_gain(&l, &mut rng))
            .collect();
        let v = empirical_cdf(&xs, &[1.0]).unwrap()[0];
        assert!((v - (1.0 - (-1.0f64).exp())).abs() < 0.002);
    }

    #[test]
    fn estimate_interval_consistent() {
        let e = Estimate::from_moments(10.0, 30.0, 5);
        assert!((e.ci95_high - e.mean - 1.96 * e.std_error).abs() < 1e-15);
        assert!((e.mean - e.ci95_low - 1.96 * e.std_error).abs() < 1e-15);
    }

    #[test]
    fn zero_power_gives_zero_rates() {
        let est = estimate_point(
            &fig4(),
            &PowerSplit::new(0.1).unwrap(),
            &SnrConfig::new(1e-9).unwrap(),
            &mc(10_000, 1),
        )
        .unwrap();
        for s in SchemeSelector::ALL {
            let r = est.get(s);
            assert!(r.s1.mean < 1e-6 && r.s2.mean < 1e-6 && r.sum.mean < 1e-6);
        }
    }

    #[test]
    fn estimate_rate_matches_point_estimates() {
        let (t, sp, s, m) = (
            fig4(),
            PowerSplit::new(0.2).unwrap(),
            SnrConfig::from_db(10.0).unwrap(),
            mc(20_000, 9),
        );
        let all = estimate_point(&t, &sp, &s, &m).unwrap();
        for scheme in SchemeSelector::ALL {
            assert_eq!(
                estimate_rate(scheme, &t, &sp, &s, &m).unwrap(),
                *all.get(scheme)
            );
        }
    }

    #[test]
    fn results_independent_of_worker_count() {
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| {
                    estimate_point(
                        &fig4(),
                        &PowerSplit::new(0.1).unwrap(),
                        &SnrConfig::from_db(20.0).unwrap(),
                        &mc(95_000, 42),
                    )
                    .unwrap()
                })
        };
        assert_eq!(run(1), run(4));
    }

    #[test]
    fn std_error_halves_when_samples_quadruple() {
        let (t, sp, s) = (
            fig4(),
            PowerSplit::new(0.1).unwrap(),
            SnrConfig::from_db(20.0).unwrap(),
        );
        let small = estimate_point(&t, &sp, &s, &mc(250_000, 3)).unwrap();
        let big = estimate_point(&t, &sp, &s, &mc(1_000_000, 4)).unwrap();
        let ratio = small.combined.sum.std_error / big.combined.sum.std_error;
        assert!((ratio - 2.0).abs() < 0.4, "ratio {ratio}");
    }

    #[test]
    fn expected_log_zero_snr_limit() {
        assert!(oracle_expected_log(&link(3.0, 3.0), 1e-9).unwrap().abs() < 1e-6);
    }

    #[test]
    fn expected_log_rayleigh_closed_form() {
        for rho in [0.1, 1.0, 10.0, 1000.0] {
            let closed = exp_e1(1.0 / rho) / LN_2;
            let v = oracle_expected_log(&link(0.0, 1.0), rho).unwrap();
            assert!((v - closed).abs() < 1e-6, "rho={rho}: {v} vs {closed}");
        }
        // e·E₁(1)/ln 2 = 0.596347.../0.693147... = 0.860347...
        let unit = oracle_expected_log(&link(0.0, 1.0), 1.0).unwrap();
        assert!((unit - 0.860_347_382).abs() < 1e-6, "{unit}");
    }

    #[test]
    fn expected_min_log_limits_and_monotonicity() {
        let t = fig4();
        assert!(oracle_expected_min_log(&t.sr, &t.rd, 0.1, 1e-10).unwrap() < 1e-8);
        let v: Vec<f64> = [0.05, 0.1, 0.2, 0.4]
            .iter()
            .map(|&a2| oracle_expected_min_log(&t.sr, &t.rd, a2, 100.0).unwrap())
            .collect();
        assert!(v.windows(2).all(|w| w[0] < w[1]), "{v:?}");
    }

    #[test]
    fn direct_probability_symmetric_links() {
        // Identical links: P(X ≥ Y) = 1/2.
        let p = oracle_direct_probability(&link(4.0, 6.0), &link(4.0, 6.0)).unwrap();
        assert!((p - 0.5).abs() < 1e-8);
    }

    #[test]
    fn onoma_oracle_agrees_with_simulation() {
        let (t, sp, s) = (
            fig4(),
            PowerSplit::new(0.1).unwrap(),
            SnrConfig::from_db(20.0).unwrap(),
        );
        let o = oracle_onoma_rates(&t, &sp, &s).unwrap();
        let e = estimate_point(&t, &sp, &s, &mc(2_000_000, 17)).unwrap();
        for (oracle, est) in [
            (o.s1, e.onoma.s1),
            (o.s2, e.onoma.s2),
            (o.direct_fraction, e.direct_fraction),
        ] {
            assert!(
                (oracle - est.mean).abs() < 4.0 * est.std_error,
                "{oracle} vs {} ± {}",
                est.mean,
                est.std_error
            );
        }
    }

    #[test]
    fn ks_distance_small_for_matching_distribution() {
        let l = link(4.0, 6.0);
        let mut rng = RandomStream::new(8, 0).rng();
        let mut xs: Vec<f64> = (0..100_000)
            .map(|_| crate::channel::sample_gain(&l, &mut rng))
            .collect();
        xs.sort_by(f64::total_cmp);
        let exact = ks_distance_sorted(&xs, |x| gain_cdf(&l, x)).unwrap();
        assert!(exact < 0.006);
        let coarse = ks_distance_on_quantiles(&xs, 500, |x| Ok(gain_cdf(&l, x))).unwrap();
        assert!(coarse <= exact + 1e-12);
        let wrong = ks_distance_sorted(&xs, |x| gain_cdf(&link(4.0, 5.0), x)).unwrap();
        assert!(wrong > 0.05);
    }
}
