//! gnuplot script that redraws a sweep from its CSV.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::Result;
use crate::runner::scenario::{Engine, Scenario};

/// Plots sum rate against a₂ when the split grid is the longer one,
/// otherwise against ρ in dB. Analytic rows are drawn as lines, Monte Carlo
/// rows as points.
pub fn plot_script(scenario: &Scenario, csv_path: &Path) -> String {
    let by_split = scenario.a2_grid.len() >= scenario.rho_db_grid.len();
    let (x_col, x_label) = if by_split {
        (1, "a_2")
    } else {
        (2, "transmit SNR {/Symbol r} (dB)")
    };
    let csv = csv_path.display().to_string().replace('\'', "''");

    let mut s = String::new();
    let _ = writeln!(s, "set datafile separator ','");
    let _ = writeln!(s, "set key outside right");
    let _ = writeln!(s, "set grid");
    let _ = writeln!(s, "set xlabel '{x_label}'");
    let _ = writeln!(s, "set ylabel 'achievable average sum rate (bit/s/Hz)'");
    let mut curves = Vec::new();
    for scheme in &scenario.schemes {
        for engine in &scenario.engines {
            let style = match engine {
                Engine::Analytic => "with lines lw 2",
                Engine::MonteCarlo => "with points pt 7",
            };
            curves.push(format!(
                "'{csv}' using (strcol(3) eq '{s}' && strcol(4) eq '{e}' ? ${x_col} : 1/0):7 skip 1 {style} title '{s} ({e})'",
                s = scheme.label(),
                e = engine.label(),
            ));
        }
    }
    let _ = writeln!(s, "plot \\\n    {}", curves.join(", \\\n    "));
    s
}

pub fn write_plot_script(scenario: &Scenario, csv_path: &Path, out: &Path) -> Result<()> {
    std::fs::write(out, plot_script(scenario, csv_path))?;
    Ok(())
}
