//! CSV writers for time series and sweep summaries.
//!
//! Numbers are printed with nine significant digits in the shortest of fixed
//! or exponent notation, so reruns produce byte-identical files. A missing
//! value (no pairwise index with more than two servers) is an empty field.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use crate::experiment::{SummaryRow, SweepResult};
use crate::metrics::AggregateSeries;

const DIGITS: i32 = 9;

/// `%.9g`.
pub fn format_number(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("exponent");
    if exp < -4 || exp >= DIGITS {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (DIGITS - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(format_number).unwrap_or_default()
}

pub fn write_series<W: Write>(series: &AggregateSeries, mut w: W) -> io::Result<()> {
    let servers = series.flows.first().map_or(0, Vec::len);
    let mut header = vec!["time".to_string(), "xi_f".into(), "xi_b".into(), "sigma_f".into(), "sigma_b".into()];
    header.extend((0..servers).map(|k| format!("flows_{k}")));
    header.extend((0..servers).map(|k| format!("bytes_{k}")));
    writeln!(w, "{}", header.join(","))?;
    for i in 0..series.len() {
        let mut row = vec![
            format_number(series.times[i]),
            opt(series.xi_f[i]),
            opt(series.xi_b[i]),
            format_number(series.sigma_f[i]),
            format_number(series.sigma_b[i]),
        ];
        row.extend(series.flows[i].iter().map(|&v| format_number(v)));
        row.extend(series.bytes[i].iter().map(|&v| format_number(v)));
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}

pub fn write_summary<W: Write>(parameter: &str, rows: &[SummaryRow], mut w: W) -> io::Result<()> {
    writeln!(w, "{parameter},xi_f,xi_b,sigma_f,sigma_b,runs,sync_messages")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            format_number(r.value),
            opt(r.xi_f),
            opt(r.xi_b),
            format_number(r.sigma_f),
            format_number(r.sigma_b),
            r.runs,
            format_number(r.sync_messages)
        )?;
    }
    Ok(())
}

pub fn write_series_file(series: &AggregateSeries, path: &Path) -> io::Result<()> {
    let mut buf = Vec::new();
    write_series(series, &mut buf)?;
    fs::write(path, buf)
}

/// Writes `<name>_summary.csv` plus one series file per sweep point into
/// `dir`. Returns the paths written, summary first.
pub fn write_sweep(name: &str, result: &SweepResult, dir: &Path) -> io::Result<Vec<std::path::PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let summary = dir.join(format!("{name}_summary.csv"));
    let mut buf = Vec::new();
    write_summary(result.parameter.name(), &result.rows, &mut buf)?;
    fs::write(&summary, buf)?;
    written.push(summary);
    for p in &result.points {
        let mut file = format!("{name}_{}{}", result.parameter.name(), format_number(p.value));
        if let (Some(param), Some(v)) = (result.inner, p.inner) {
            file.push_str(&format!("_{}{}", param.name(), format_number(v)));
        }
        let path = dir.join(format!("{file}.csv"));
        write_series_file(p.result.output_series(), &path)?;
        written.push(path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format_matches_printf_g() {
        let cases = [
            (0.0, "0"),
            (1.0, "1"),
            (2.5, "2.5"),
            (-0.125, "-0.125"),
            (1.0 / 3.0, "0.333333333"),
            (123456789.0, "123456789"),
            (1234567890.0, "1.23456789e+09"),
            (0.0001, "0.0001"),
            (0.00001234, "1.234e-05"),
            (4096.0 * 34.0, "139264"),
            (2.0 / 3.0, "0.666666667"),
        ];
        for (x, want) in cases {
            assert_eq!(format_number(x), want, "{x}");
        }
    }

    #[test]
    fn empty_series_is_header_only() {
        let s = AggregateSeries {
            window: 2.0,
            runs: 1,
            times: vec![],
            xi_f: vec![],
            xi_b: vec![],
            sigma_f: vec![],
            sigma_b: vec![],
            flows: vec![],
            bytes: vec![],
        };
        let mut buf = Vec::new();
        write_series(&s, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "time,xi_f,xi_b,sigma_f,sigma_b\n");
    }

    #[test]
    fn series_rows() {
        let s = AggregateSeries {
            window: 2.0,
            runs: 1,
            times: vec![2.0],
            xi_f: vec![None],
            xi_b: vec![None],
            sigma_f: vec![0.5],
            sigma_b: vec![10.0],
            flows: vec![vec![1.0, 2.0, 3.0]],
            bytes: vec![vec![0.0, 4096.0, 8192.0]],
        };
        let mut buf = Vec::new();
        write_series(&s, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "time,xi_f,xi_b,sigma_f,sigma_b,flows_0,flows_1,flows_2,bytes_0,bytes_1,bytes_2"
        );
        assert_eq!(lines.next().unwrap(), "2,,,0.5,10,1,2,3,0,4096,8192");
    }
}
