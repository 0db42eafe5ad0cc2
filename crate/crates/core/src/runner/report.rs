//! Side-by-side comparison of sweep rows: scheme gains, engine agreement
//! and how often O-NOMA sends directly.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use crate::error::{Error, Result};
use crate::monte_carlo::SchemeSelector;
use crate::runner::scenario::Engine;
use crate::runner::sweep::SweepRow;

/// Grid points are keyed on the bit patterns of a₂ and ρ, which keeps
/// `f64` out of the map keys while preserving exact identity.
type PointKey = (u64, u64, Engine);

fn point_key(r: &SweepRow) -> PointKey {
    (r.a2.to_bits(), r.rho_db.to_bits(), r.engine)
}

fn sums(rows: &[SweepRow]) -> BTreeMap<PointKey, BTreeMap<SchemeSelector, f64>> {
    let mut map: BTreeMap<PointKey, BTreeMap<SchemeSelector, f64>> = BTreeMap::new();
    for r in rows {
        map.entry(point_key(r))
            .or_default()
            .insert(r.scheme, r.rate_sum);
    }
    map
}

/// `sum(a) − sum(b)` at every point and engine where both schemes appear,
/// in row order of first appearance.
pub fn sum_gain(
    rows: &[SweepRow],
    a: SchemeSelector,
    b: SchemeSelector,
) -> Vec<(f64, f64, Engine, f64)> {
    let table = sums(rows);
    let mut seen = std::collections::BTreeSet::new();
    rows.iter()
        .filter(|r| seen.insert(point_key(r)))
        .filter_map(|r| {
            let m = &table[&point_key(r)];
            Some((r.a2, r.rho_db, r.engine, m.get(&a)? - m.get(&b)?))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointSummary {
    pub a2: f64,
    pub rho_db: f64,
    pub engine: Engine,
    pub onoma_sum: Option<f64>,
    pub cnoma_sum: f64,
    pub combined_sum: Option<f64>,
    /// Combined O-NOMA sum minus C-NOMA sum.
    pub gain_combined: Option<f64>,
    /// Mode-switched O-NOMA sum minus C-NOMA sum.
    pub gain_onoma: Option<f64>,
    pub direct_fraction: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EngineDeviation {
    pub a2: f64,
    pub rho_db: f64,
    pub scheme: SchemeSelector,
    pub analytic: f64,
    pub monte_carlo: f64,
    /// `(analytic − mc) / mc`
    pub relative: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub points: Vec<PointSummary>,
    pub deviations: Vec<EngineDeviation>,
}

/// Builds the comparison. Every grid point needs a C-NOMA row and at least
/// one O-NOMA row (mode-switched or combined) for each engine present.
pub fn compare_report(rows: &[SweepRow]) -> Result<Report> {
    let table = sums(rows);
    let mut points = Vec::new();
    let mut seen = std::collections::BTreeSet::new();
    for r in rows {
        let key = point_key(r);
        if !seen.insert(key) {
            continue;
        }
        let m = &table[&key];
        let missing = |what: &str| Error::MissingPair {
            a2: r.a2,
            rho_db: r.rho_db,
            engine: r.engine.to_string(),
            missing: what.into(),
        };
        let cnoma = *m
            .get(&SchemeSelector::CNoma)
            .ok_or_else(|| missing("cnoma"))?;
        let onoma = m.get(&SchemeSelector::ONoma).copied();
        let combined = m.get(&SchemeSelector::CombinedSum).copied();
        if onoma.is_none() && combined.is_none() {
            return Err(missing("onoma or combined"));
        }
        let direct = rows
            .iter()
            .find(|x| point_key(x) == key && x.scheme != SchemeSelector::CNoma)
            .map(|x| x.direct_mode_fraction);
        points.push(PointSummary {
            a2: r.a2,
            rho_db: r.rho_db,
            engine: r.engine,
            onoma_sum: onoma,
            cnoma_sum: cnoma,
            combined_sum: combined,
            gain_combined: combined.map(|c| c - cnoma),
            gain_onoma: onoma.map(|o| o - cnoma),
            direct_fraction: direct,
        });
    }

    let mut deviations = Vec::new();
    for r in rows.iter().filter(|r| r.engine == Engine::Analytic) {
        let mc = rows.iter().find(|x| {
            x.engine == Engine::MonteCarlo
                && x.scheme == r.scheme
                && x.a2 == r.a2
                && x.rho_db == r.rho_db
        });
        if let Some(mc) = mc {
            deviations.push(EngineDeviation {
                a2: r.a2,
                rho_db: r.rho_db,
                scheme: r.scheme,
                analytic: r.rate_sum,
                monte_carlo: mc.rate_sum,
                relative: (r.rate_sum - mc.rate_sum) / mc.rate_sum,
            });
        }
    }
    Ok(Report { points, deviations })
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(|| "-".to_string(), |v| format!("{v:.4}"))
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{:>6} {:>7} {:>8} {:>9} {:>9} {:>9} {:>11} {:>11} {:>7}",
            "a2",
            "rho_db",
            "engine",
            "onoma",
            "cnoma",
            "combined",
            "gain_comb",
            "gain_onoma",
            "direct"
        )?;
        for p in &self.points {
            writeln!(
                f,
                "{:>6} {:>7} {:>8} {:>9} {:>9.4} {:>9} {:>11} {:>11} {:>7}",
                p.a2,
                p.rho_db,
                p.engine.label(),
                opt(p.onoma_sum),
                p.cnoma_sum,
                opt(p.combined_sum),
                opt(p.gain_combined),
                opt(p.gain_onoma),
                opt(p.direct_fraction),
            )?;
        }
        if !self.deviations.is_empty() {
            let mut out = String::new();
            writeln!(out, "\nanalytic vs Monte Carlo (sum rate)")?;
            writeln!(
                out,
                "{:>6} {:>7} {:>9} {:>10} {:>10} {:>9}",
                "a2", "rho_db", "scheme", "analytic", "mc", "rel_dev"
            )?;
            for d in &self.deviations {
                writeln!(
                    out,
                    "{:>6} {:>7} {:>9} {:>10.4} {:>10.4} {:>8.2}%",
                    d.a2,
                    d.rho_db,
                    d.scheme.label(),
                    d.analytic,
                    d.monte_carlo,
                    100.0 * d.relative
                )?;
            }
            f.write_str(&out)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(a2: f64, scheme: SchemeSelector, engine: Engine, sum: f64) -> SweepRow {
        SweepRow {
            a2,
            rho_db: 15.0,
            scheme,
            engine,
            rate_s1: sum / 2.0,
            rate_s2: sum / 2.0,
            rate_sum: sum,
            std_error_sum: None,
            direct_mode_fraction: 0.25,
            error: None,
        }
    }

    fn sample() -> Vec<SweepRow> {
        use Engine::*;
        use SchemeSelector::*;
        vec![
            row(0.1, ONoma, Analytic, 6.0),
            row(0.1, ONoma, MonteCarlo, 6.1),
            row(0.1, CNoma, Analytic, 4.0),
            row(0.1, CNoma, MonteCarlo, 4.1),
            row(0.1, CombinedSum, Analytic, 9.5),
            row(0.1, CombinedSum, MonteCarlo, 10.0),
        ]
    }

    #[test]
    fn gains_and_deviations() {
        let rep = compare_report(&sample()).unwrap();
        assert_eq!(rep.points.len(), 2);
        let p = &rep.points[0];
        assert_eq!(p.engine, Engine::Analytic);
        assert_eq!(p.gain_onoma, Some(2.0));
        assert_eq!(p.gain_combined, Some(5.5));
        assert_eq!(p.direct_fraction, Some(0.25));
        assert_eq!(rep.deviations.len(), 3);
        assert!((rep.deviations[2].relative + 0.05).abs() < 1e-12);
        let text = rep.to_string();
        assert!(text.contains("gain_comb") && text.contains("-5.00%"));
    }

    #[test]
    fn gains_antisymmetric_and_zero_against_self() {
        let rows = sample();
        let ab = sum_gain(&rows, SchemeSelector::ONoma, SchemeSelector::CNoma);
        let ba = sum_gain(&rows, SchemeSelector::CNoma, SchemeSelector::ONoma);
        assert_eq!(ab.len(), 2);
        for (x, y) in ab.iter().zip(&ba) {
            assert_eq!(x.3, -y.3);
        }
        for g in sum_gain(&rows, SchemeSelector::CNoma, SchemeSelector::CNoma) {
            assert_eq!(g.3, 0.0);
        }
    }

    #[test]
    fn missing_scheme_is_reported() {
        let mut rows = sample();
        rows.retain(|r| r.scheme != SchemeSelector::CNoma);
        assert!(matches!(
            compare_report(&rows),
            Err(Error::MissingPair { .. })
        ));
        let mut rows = sample();
        rows.retain(|r| r.scheme == SchemeSelector::CNoma);
        assert!(matches!(
            compare_report(&rows),
            Err(Error::MissingPair { .. })
        ));
    }
}
