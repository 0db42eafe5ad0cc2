//! CSV emission and loading of sweep rows.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::runner::sweep::SweepRow;

pub const HEADER: [&str; 9] = [
    "a2",
    "rho_db",
    "scheme",
    "engine",
    "rate_s1",
    "rate_s2",
    "rate_sum",
    "stderr_sum",
    "direct_fraction",
];

/// Renders `x` with six significant digits, trailing zeros removed.
/// Magnitudes outside `[1e-5, 1e6)` use scientific notation.
pub fn format_sig(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..6).contains(&exp) {
        let decimals = (5 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

pub fn write_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(HEADER)?;
    for r in rows {
        w.write_record([
            format_sig(r.a2),
            format_sig(r.rho_db),
            r.scheme.label().to_string(),
            r.engine.label().to_string(),
            format_sig(r.rate_s1),
            format_sig(r.rate_s2),
            format_sig(r.rate_sum),
            r.std_error_sum.map(format_sig).unwrap_or_default(),
            format_sig(r.direct_mode_fraction),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn emit_csv(rows: &[SweepRow], path: impl AsRef<Path>) -> Result<()> {
    if rows.is_empty() {
        return Err(Error::InvalidParameter("no rows to write".into()));
    }
    write_csv(rows, File::create(path)?)
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<SweepRow>> {
    let mut r = csv::Reader::from_reader(input);
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header != HEADER {
        return Err(Error::Parse(format!(
            "unexpected CSV header {header:?}, expected {}",
            HEADER.join(",")
        )));
    }
    let num = |s: &str, line: u64| -> Result<f64> {
        s.parse()
            .map_err(|_| Error::Parse(format!("line {line}: {s:?} is not a number")))
    };
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        let rate_sum = num(&rec[6], line)?;
        rows.push(SweepRow {
            a2: num(&rec[0], line)?,
            rho_db: num(&rec[1], line)?,
            scheme: rec[2].parse()?,
            engine: rec[3].parse()?,
            rate_s1: num(&rec[4], line)?,
            rate_s2: num(&rec[5], line)?,
            rate_sum,
            std_error_sum: match &rec[7] {
                "" => None,
                s => Some(num(s, line)?),
            },
            direct_mode_fraction: num(&rec[8], line)?,
            error: rate_sum
                .is_nan()
                .then(|| "failed in the originating sweep".to_string()),
        });
    }
    Ok(rows)
}

pub fn load_csv(path: impl AsRef<Path>) -> Result<Vec<SweepRow>> {
    read_csv(File::open(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monte_carlo::SchemeSelector;
    use crate::runner::scenario::Engine;

    fn row(sum: f64) -> SweepRow {
        SweepRow {
            a2: 0.1,
            rho_db: 20.0,
            scheme: SchemeSelector::CombinedSum,
            engine: Engine::MonteCarlo,
            rate_s1: 11.0723456,
            rate_s2: sum - 11.0723456,
            rate_sum: sum,
            std_error_sum: Some(0.00123456789),
            direct_mode_fraction: 0.23,
            error: None,
        }
    }

    #[test]
    fn six_significant_digits() {
        assert_eq!(format_sig(15.152349), "15.1523");
        assert_eq!(format_sig(0.1), "0.1");
        assert_eq!(format_sig(20.0), "20");
        assert_eq!(format_sig(-4.123456789), "-4.12346");
        assert_eq!(format_sig(9.9999996), "10");
        assert_eq!(format_sig(0.000123456789), "0.000123457");
        assert_eq!(format_sig(1.234567e-7), "1.23457e-7");
        assert_eq!(format_sig(1234567.0), "1.23457e6");
        assert_eq!(format_sig(0.0), "0");
        assert_eq!(format_sig(f64::NAN), "NaN");
    }

    #[test]
    fn one_row_two_lines() {
        let mut buf = Vec::new();
        write_csv(&[row(15.15)], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "a2,rho_db,scheme,engine,rate_s1,rate_s2,rate_sum,stderr_sum,direct_fraction\n\
             0.1,20,combined,mc,11.0723,4.07765,15.15,0.00123457,0.23\n"
        );
    }

    #[test]
    fn round_trip_within_rendering_precision() {
        let mut analytic = row(15.15);
        analytic.engine = Engine::Analytic;
        analytic.std_error_sum = None;
        let mut failed = row(f64::NAN);
        failed.error = Some("boom".into());
        let rows = vec![row(15.1523456), analytic, failed];
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        let back = read_csv(buf.as_slice()).unwrap();
        assert_eq!(back.len(), 3);
        for (a, b) in rows.iter().zip(&back) {
            assert_eq!((a.scheme, a.engine), (b.scheme, b.engine));
            assert_eq!(a.std_error_sum.is_some(), b.std_error_sum.is_some());
            assert_eq!(a.is_failed(), b.is_failed());
            if !a.is_failed() {
                assert!((a.rate_sum - b.rate_sum).abs() <= 5e-6 * a.rate_sum.abs());
            }
        }
    }

    proptest::proptest! {
        #[test]
        fn rendering_keeps_six_digits(x in -1e9f64..1e9) {
            let back: f64 = format_sig(x).parse().unwrap();
            proptest::prop_assert!((back - x).abs() <= 5e-6 * x.abs());
        }
    }

    #[test]
    fn wrong_header_rejected() {
        assert!(matches!(
            read_csv("a,b\n1,2\n".as_bytes()),
            Err(Error::Parse(_))
        ));
    }
}
