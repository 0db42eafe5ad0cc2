//! Sweep scenarios: TOML parsing, validation and the built-in figure presets.
//!
//! ```toml
//! [topology]
//! k_sd = 3.0
//! k_sr = 4.0
//! k_rd = 4.0
//! omega_sd = 3.0
//! omega_sr = 6.0
//! omega_rd = 6.0
//! omega_convention = "mean_power"   # or "amplitude_squared"
//!
//! [sweep]
//! a2_grid = [0.1, 0.2]
//! rho_db_grid = [20.0]
//! schemes = ["onoma", "cnoma", "combined"]
//!
//! [engine]                          # every key optional
//! engines = ["analytic", "mc"]
//! samples = 1000000
//! seed = 1
//! chunk_size = 65536
//! max_terms = 400
//! rel_tol = 1e-12
//! quad_order = 800
//!
//! [[reference]]                     # optional published values
//! a2 = 0.1
//! rho_db = 20.0
//! metric = "sum"                    # s1, s2, sum or gain
//! scheme = "combined"               # ignored for gain
//! value = 15.0
//! ```

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::Deserialize;

use crate::analytic::SeriesControl;
use crate::channel::{RicianLink, Topology};
use crate::error::{Error, Result};
use crate::monte_carlo::{McConfig, SchemeSelector};

/// How the configured `omega_*` values map to mean link power.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OmegaConvention {
    /// `Ω` is the mean squared gain `E[|h|²]`.
    #[default]
    MeanPower,
    /// `Ω` is an amplitude scale; the mean power is `Ω²`.
    AmplitudeSquared,
}

impl OmegaConvention {
    pub fn mean_power(&self, omega: f64) -> f64 {
        match self {
            Self::MeanPower => omega,
            Self::AmplitudeSquared => omega * omega,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Self::MeanPower => "mean_power",
            Self::AmplitudeSquared => "amplitude_squared",
        }
    }

    pub fn other(&self) -> Self {
        match self {
            Self::MeanPower => Self::AmplitudeSquared,
            Self::AmplitudeSquared => Self::MeanPower,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Engine {
    Analytic,
    MonteCarlo,
}

impl Engine {
    pub fn label(&self) -> &'static str {
        match self {
            Self::Analytic => "analytic",
            Self::MonteCarlo => "mc",
        }
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Engine {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "analytic" => Ok(Self::Analytic),
            "mc" => Ok(Self::MonteCarlo),
            other => Err(Error::Parse(format!(
                "unknown engine {other:?} (expected analytic or mc)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    S1,
    S2,
    Sum,
    /// Combined O-NOMA sum minus C-NOMA sum.
    Gain,
}

impl Metric {
    pub fn label(&self) -> &'static str {
        match self {
            Self::S1 => "s1",
            Self::S2 => "s2",
            Self::Sum => "sum",
            Self::Gain => "gain",
        }
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "s1" => Ok(Self::S1),
            "s2" => Ok(Self::S2),
            "sum" => Ok(Self::Sum),
            "gain" => Ok(Self::Gain),
            other => Err(Error::Parse(format!(
                "unknown metric {other:?} (expected s1, s2, sum or gain)"
            ))),
        }
    }
}

/// A published value the scenario is expected to reproduce.
#[derive(Debug, Clone, PartialEq)]
pub struct Reference {
    pub a2: f64,
    pub rho_db: f64,
    pub metric: Metric,
    pub scheme: SchemeSelector,
    pub value: f64,
}

impl fmt::Display for Reference {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.metric {
            Metric::Gain => write!(f, "gain at a2={}, {} dB", self.a2, self.rho_db),
            m => write!(
                f,
                "{} {} at a2={}, {} dB",
                self.scheme,
                m.label(),
                self.a2,
                self.rho_db
            ),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkParams {
    pub k_sd: f64,
    pub k_sr: f64,
    pub k_rd: f64,
    pub omega_sd: f64,
    pub omega_sr: f64,
    pub omega_rd: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub links: LinkParams,
    pub omega_convention: OmegaConvention,
    pub a2_grid: Vec<f64>,
    pub rho_db_grid: Vec<f64>,
    pub schemes: Vec<SchemeSelector>,
    pub engines: Vec<Engine>,
    pub series: SeriesControl,
    pub mc: McConfig,
    pub references: Vec<Reference>,
}

pub const PRESETS: [&str; 4] = ["fig4", "fig8", "fig9", "fig10"];

fn preset_text(name: &str) -> Option<&'static str> {
    match name {
        "fig4" => Some(include_str!("../../presets/fig4.toml")),
        "fig8" => Some(include_str!("../../presets/fig8.toml")),
        "fig9" => Some(include_str!("../../presets/fig9.toml")),
        "fig10" => Some(include_str!("../../presets/fig10.toml")),
        _ => None,
    }
}

impl Scenario {
    pub fn preset(name: &str) -> Result<Self> {
        let text = preset_text(name).ok_or_else(|| {
            Error::Validation(format!(
                "unknown preset {name:?} (available: {})",
                PRESETS.join(", ")
            ))
        })?;
        text.parse()
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
        text.parse()
    }

    /// Topology under the configured Ω convention.
    pub fn topology(&self) -> Result<Topology> {
        self.topology_with(self.omega_convention)
    }

    pub fn topology_with(&self, convention: OmegaConvention) -> Result<Topology> {
        let l = &self.links;
        let link = |k, omega| RicianLink::new(k, convention.mean_power(omega));
        Ok(Topology::new(
            link(l.k_sd, l.omega_sd)?,
            link(l.k_sr, l.omega_sr)?,
            link(l.k_rd, l.omega_rd)?,
        ))
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let raw: RawScenario = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        raw.into_scenario()
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    topology: RawTopology,
    sweep: RawSweep,
    #[serde(default)]
    engine: RawEngine,
    #[serde(default)]
    reference: Vec<RawReference>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTopology {
    k_sd: f64,
    k_sr: f64,
    k_rd: f64,
    omega_sd: f64,
    omega_sr: f64,
    omega_rd: f64,
    #[serde(default)]
    omega_convention: OmegaConvention,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    a2_grid: Vec<f64>,
    rho_db_grid: Vec<f64>,
    schemes: Option<Vec<String>>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawEngine {
    engines: Option<Vec<String>>,
    samples: Option<u64>,
    seed: Option<u64>,
    chunk_size: Option<u64>,
    max_terms: Option<usize>,
    rel_tol: Option<f64>,
    quad_order: Option<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawReference {
    a2: f64,
    rho_db: f64,
    metric: String,
    scheme: Option<String>,
    value: f64,
}

fn invalid(e: Error) -> Error {
    match e {
        Error::InvalidParameter(msg) => Error::Validation(msg),
        other => other,
    }
}

fn check_a2(a2: f64) -> Result<()> {
    if a2 > 0.0 && a2 < 0.5 {
        Ok(())
    } else {
        Err(Error::Validation(format!(
            "a2 must lie in (0, 0.5), got {a2}"
        )))
    }
}

fn check_rho_db(db: f64) -> Result<()> {
    if db.is_finite() {
        Ok(())
    } else {
        Err(Error::Validation(format!(
            "rho_db must be finite, got {db}"
        )))
    }
}

fn parse_unique<T: FromStr<Err = Error> + PartialEq>(
    items: &[String],
    what: &str,
) -> Result<Vec<T>> {
    if items.is_empty() {
        return Err(Error::Validation(format!("{what} list is empty")));
    }
    let mut out: Vec<T> = Vec::with_capacity(items.len());
    for s in items {
        let v = s.parse()?;
        if out.contains(&v) {
            return Err(Error::Validation(format!("{what} {s:?} listed twice")));
        }
        out.push(v);
    }
    Ok(out)
}

impl RawScenario {
    fn into_scenario(self) -> Result<Scenario> {
        let t = self.topology;
        let links = LinkParams {
            k_sd: t.k_sd,
            k_sr: t.k_sr,
            k_rd: t.k_rd,
            omega_sd: t.omega_sd,
            omega_sr: t.omega_sr,
            omega_rd: t.omega_rd,
        };

        let s = self.sweep;
        if s.a2_grid.is_empty() || s.rho_db_grid.is_empty() {
            return Err(Error::Validation(
                "a2_grid and rho_db_grid must be nonempty".into(),
            ));
        }
        s.a2_grid.iter().try_for_each(|&a| check_a2(a))?;
        s.rho_db_grid.iter().try_for_each(|&r| check_rho_db(r))?;
        let schemes = match s.schemes {
            Some(list) => parse_unique(&list, "scheme")?,
            None => SchemeSelector::ALL.to_vec(),
        };

        let e = self.engine;
        let engines = match e.engines {
            Some(list) => parse_unique(&list, "engine")?,
            None => vec![Engine::Analytic, Engine::MonteCarlo],
        };
        let defaults = SeriesControl::default();
        let series = SeriesControl::new(
            e.max_terms.unwrap_or(defaults.max_terms),
            e.rel_tol.unwrap_or(defaults.rel_tol),
            e.quad_order.unwrap_or(defaults.quad_order),
        )
        .map_err(invalid)?;
        let mc_defaults = McConfig::default();
        let mc = McConfig {
            n_samples: e.samples.unwrap_or(mc_defaults.n_samples),
            seed: e.seed.unwrap_or(mc_defaults.seed),
            chunk_size: e.chunk_size.unwrap_or(mc_defaults.chunk_size),
        };
        mc.validate().map_err(invalid)?;

        let references = self
            .reference
            .into_iter()
            .map(|r| {
                check_a2(r.a2)?;
                check_rho_db(r.rho_db)?;
                let metric: Metric = r.metric.parse()?;
                let scheme = match (&r.scheme, metric) {
                    (Some(s), _) => s.parse()?,
                    (None, Metric::Gain) => SchemeSelector::CombinedSum,
                    (None, _) => {
                        return Err(Error::Validation(format!(
                            "reference {} at a2={} needs a scheme",
                            r.metric, r.a2
                        )))
                    }
                };
                Ok(Reference {
                    a2: r.a2,
                    rho_db: r.rho_db,
                    metric,
                    scheme,
                    value: r.value,
                })
            })
            .collect::<Result<Vec<_>>>()?;

        let scenario = Scenario {
            links,
            omega_convention: t.omega_convention,
            a2_grid: s.a2_grid,
            rho_db_grid: s.rho_db_grid,
            schemes,
            engines,
            series,
            mc,
            references,
        };
        // Both conventions must give valid links so validation can try each.
        scenario
            .topology_with(OmegaConvention::MeanPower)
            .map_err(invalid)?;
        scenario
            .topology_with(OmegaConvention::AmplitudeSquared)
            .map_err(invalid)?;
        Ok(scenario)
    }
}
