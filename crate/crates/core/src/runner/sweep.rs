use std::f64::consts::LN_2;

use rayon::prelude::*;

use crate::analytic::{g_function, h_function, SeriesControl};
use crate::channel::Topology;
use crate::error::Result;
use crate::monte_carlo::{
    estimate_point, oracle_direct_probability, oracle_onoma_rates, McConfig, SchemeSelector,
};
use crate::rates::{PowerSplit, SnrConfig};
use crate::runner::scenario::{Engine, Scenario};

/// One (a₂, ρ, scheme, engine) cell of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub a2: f64,
    pub rho_db: f64,
    pub scheme: SchemeSelector,
    pub engine: Engine,
    pub rate_s1: f64,
    pub rate_s2: f64,
    pub rate_sum: f64,
    /// Monte Carlo rows only.
    pub std_error_sum: Option<f64>,
    /// Fraction of channel states on which the scheme transmits directly.
    pub direct_mode_fraction: f64,
    /// Why the row could not be computed; its rates are then NaN.
    pub error: Option<String>,
}

impl SweepRow {
    pub fn is_failed(&self) -> bool {
        self.error.is_some()
    }
}

#[derive(Debug, Clone, Copy)]
struct Cell {
    s1: f64,
    s2: f64,
    std_error_sum: Option<f64>,
    direct: f64,
}

/// Rates of every requested scheme at one grid point for one engine.
fn analytic_point(
    topology: &Topology,
    split: &PowerSplit,
    snr: &SnrConfig,
    schemes: &[SchemeSelector],
    ctrl: &SeriesControl,
) -> Result<Vec<Cell>> {
    let (rho, a2) = (snr.rho(), split.a2());
    let needs_series = schemes.iter().any(|s| *s != SchemeSelector::ONoma);
    let series = if needs_series {
        let h = h_function(rho, &topology.sd, &topology.sr, ctrl)?;
        let h_a2 = h_function(rho * a2, &topology.sd, &topology.sr, ctrl)?;
        let g = g_function(rho, &topology.sr, &topology.rd, a2, ctrl)?;
        Some((h, h_a2, g))
    } else {
        None
    };
    let direct = oracle_direct_probability(&topology.sd, &topology.sr)?;
    schemes
        .iter()
        .map(|scheme| {
            let k = 1.0 / (2.0 * LN_2);
            Ok(match (scheme, series) {
                (SchemeSelector::ONoma, _) => {
                    let o = oracle_onoma_rates(topology, split, snr)?;
                    Cell {
                        s1: o.s1,
                        s2: o.s2,
                        std_error_sum: None,
                        direct: o.direct_fraction,
                    }
                }
                (SchemeSelector::CNoma, Some((h, h_a2, g))) => Cell {
                    s1: k * (h - h_a2),
                    s2: k * g,
                    std_error_sum: None,
                    direct: 0.0,
                },
                (SchemeSelector::CombinedSum, Some((h, h_a2, g))) => Cell {
                    s1: k * (3.0 * h - h_a2),
                    s2: k * g,
                    std_error_sum: None,
                    direct,
                },
                _ => unreachable!("series computed whenever a series scheme is requested"),
            })
        })
        .collect()
}

fn mc_point(
    topology: &Topology,
    split: &PowerSplit,
    snr: &SnrConfig,
    schemes: &[SchemeSelector],
    mc: &McConfig,
) -> Result<Vec<Cell>> {
    let est = estimate_point(topology, split, snr, mc)?;
    Ok(schemes
        .iter()
        .map(|&scheme| {
            let r = est.get(scheme);
            let direct = match scheme {
                SchemeSelector::CNoma => 0.0,
                _ => est.direct_fraction.mean,
            };
            Cell {
                s1: r.s1.mean,
                s2: r.s2.mean,
                std_error_sum: Some(r.sum.std_error),
                direct,
            }
        })
        .collect())
}

/// Evaluates every grid point of `scenario`.
///
/// Rows are ordered by a₂, then ρ, then scheme and engine in the order the
/// scenario lists them. A point whose computation fails yields rows marked
/// with the error instead of aborting the sweep. Grid points run
/// concurrently; the output order and values do not depend on scheduling.
pub fn run_sweep(scenario: &Scenario) -> Result<Vec<SweepRow>> {
    let topology = scenario.topology()?;
    let points: Vec<(f64, f64)> = scenario
        .a2_grid
        .iter()
        .flat_map(|&a2| scenario.rho_db_grid.iter().map(move |&rho_db| (a2, rho_db)))
        .collect();

    let per_point: Vec<Vec<SweepRow>> = points
        .par_iter()
        .map(|&(a2, rho_db)| {
            let compute = |engine: Engine| -> Result<Vec<Cell>> {
                let split = PowerSplit::new(a2)?;
                let snr = SnrConfig::from_db(rho_db)?;
                match engine {
                    Engine::Analytic => {
                        analytic_point(&topology, &split, &snr, &scenario.schemes, &scenario.series)
                    }
                    Engine::MonteCarlo => {
                        mc_point(&topology, &split, &snr, &scenario.schemes, &scenario.mc)
                    }
                }
            };
            let by_engine: Vec<(Engine, Result<Vec<Cell>>)> =
                scenario.engines.iter().map(|&e| (e, compute(e))).collect();

            let mut rows = Vec::with_capacity(scenario.schemes.len() * scenario.engines.len());
            for (i, &scheme) in scenario.schemes.iter().enumerate() {
                for (engine, cells) in &by_engine {
                    let base = SweepRow {
                        a2,
                        rho_db,
                        scheme,
                        engine: *engine,
                        rate_s1: f64::NAN,
                        rate_s2: f64::NAN,
                        rate_sum: f64::NAN,
                        std_error_sum: None,
                        direct_mode_fraction: f64::NAN,
                        error: None,
                    };
                    rows.push(match cells {
                        Ok(cells) => {
                            let c = cells[i];
                            SweepRow {
                                rate_s1: c.s1,
                                rate_s2: c.s2,
                                rate_sum: c.s1 + c.s2,
                                std_error_sum: c.std_error_sum,
                                direct_mode_fraction: c.direct,
                                ..base
                            }
                        }
                        Err(e) => SweepRow {
                            error: Some(e.to_string()),
                            ..base
                        },
                    });
                }
            }
            rows
        })
        .collect();
    Ok(per_point.into_iter().flatten().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny(engines: &str, schemes: &str) -> Scenario {
        format!(
            "[topology]\nk_sd = 3.0\nk_sr = 4.0\nk_rd = 4.0\nomega_sd = 3.0\nomega_sr = 6.0\nomega_rd = 6.0\n\
             [sweep]\na2_grid = [0.1]\nrho_db_grid = [20.0]\nschemes = [{schemes}]\n\
             [engine]\nengines = [{engines}]\nsamples = 20000\nquad_order = 200\n"
        )
        .parse()
        .unwrap()
    }

    #[test]
    fn single_point_both_engines_gives_two_rows_per_scheme() {
        let s = tiny("\"analytic\", \"mc\"", "\"onoma\", \"cnoma\", \"combined\"");
        let rows = run_sweep(&s).unwrap();
        assert_eq!(rows.len(), 6);
        for r in &rows {
            assert!(!r.is_failed());
            assert!((r.rate_sum - (r.rate_s1 + r.rate_s2)).abs() < 1e-9);
            assert_eq!(r.std_error_sum.is_some(), r.engine == Engine::MonteCarlo);
        }
        assert_eq!(rows[0].scheme, SchemeSelector::ONoma);
        assert_eq!(rows[0].engine, Engine::Analytic);
        assert_eq!(rows[1].engine, Engine::MonteCarlo);
    }

    #[test]
    fn row_order_follows_grids() {
        let mut s = tiny("\"analytic\"", "\"cnoma\"");
        s.a2_grid = vec![0.3, 0.1];
        s.rho_db_grid = vec![10.0, 0.0];
        let rows = run_sweep(&s).unwrap();
        let keys: Vec<(f64, f64)> = rows.iter().map(|r| (r.a2, r.rho_db)).collect();
        assert_eq!(keys, vec![(0.3, 10.0), (0.3, 0.0), (0.1, 10.0), (0.1, 0.0)]);
    }

    #[test]
    fn numerical_failure_marks_rows() {
        let mut s = tiny("\"analytic\", \"mc\"", "\"cnoma\"");
        s.series.max_terms = 1;
        let rows = run_sweep(&s).unwrap();
        assert!(rows[0].is_failed() && rows[0].rate_sum.is_nan());
        assert!(!rows[1].is_failed());
    }
}
