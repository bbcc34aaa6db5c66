//! CSV and plot-script emission.
//!
//! CSV layout: `# key=value` metadata lines, one `# point=...` line per grid
//! point, the header `swept,metric,array,linear,db`, then data rows. Numbers
//! carry 17 significant digits; values below the dB floor print as `0` with
//! a `-inf` dB field and infeasible values print as `nan`.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::sweep::{Metric, SweepResult};
use crate::units::{to_db, DB_FLOOR};

pub const CSV_HEADER: &str = "swept,metric,array,linear,db";

fn number(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else if x.abs() < DB_FLOOR {
        "0".into()
    } else {
        format!("{x:.16e}")
    }
}

fn decibels(x: f64) -> String {
    if x.is_nan() || x < 0.0 {
        "nan".into()
    } else if x < DB_FLOOR {
        "-inf".into()
    } else {
        number(to_db(x))
    }
}

pub fn render_csv(result: &SweepResult) -> String {
    let mut out = String::new();
    for (k, v) in &result.metadata {
        let _ = writeln!(out, "# {k}={v}");
    }
    for p in &result.points {
        let _ = write!(out, "# point={} swept={}", p.index, number(p.swept));
        if let Some(g) = &p.geometry {
            let _ = write!(
                out,
                " M={} r0={} alpha={} L={} D={} actual_spacing={}",
                g.count,
                number(g.radius),
                number(g.central_angle),
                number(g.support),
                number(g.aperture),
                number(g.actual_spacing)
            );
        }
        if p.closed_form_fallback {
            out.push_str(" closed_form=direct_fallback");
        }
        let _ = writeln!(out, " status={}", p.status);
    }
    out.push_str(CSV_HEADER);
    out.push('\n');
    for row in &result.rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            number(row.swept),
            row.metric.as_str(),
            row.array.as_str(),
            number(row.linear),
            decibels(row.linear)
        );
    }
    out
}

pub fn write_csv(result: &SweepResult, path: &Path) -> Result<()> {
    std::fs::write(path, render_csv(result))?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct CsvRow {
    pub swept: f64,
    pub metric: String,
    pub array: String,
    pub linear: f64,
    pub db: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ParsedCsv {
    /// `# key=value` lines, in order; point lines are kept verbatim in
    /// `point_lines`.
    pub metadata: Vec<(String, String)>,
    pub point_lines: Vec<String>,
    pub rows: Vec<CsvRow>,
}

fn parse_number(field: &str) -> Result<f64> {
    field
        .parse::<f64>()
        .map_err(|_| Error::Io(format!("malformed number `{field}`")))
}

/// Reads back the format written by [`render_csv`].
pub fn parse_csv(text: &str) -> Result<ParsedCsv> {
    let mut parsed = ParsedCsv::default();
    let mut seen_header = false;
    for line in text.lines() {
        if let Some(comment) = line.strip_prefix("# ") {
            if comment.starts_with("point=") {
                parsed.point_lines.push(comment.to_string());
            } else if let Some((k, v)) = comment.split_once('=') {
                parsed.metadata.push((k.to_string(), v.to_string()));
            }
            continue;
        }
        if !seen_header {
            if line != CSV_HEADER {
                return Err(Error::Io(format!("expected CSV header, found `{line}`")));
            }
            seen_header = true;
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 5 {
            return Err(Error::Io(format!("expected 5 fields, found {}", fields.len())));
        }
        parsed.rows.push(CsvRow {
            swept: parse_number(fields[0])?,
            metric: fields[1].to_string(),
            array: fields[2].to_string(),
            linear: parse_number(fields[3])?,
            db: parse_number(fields[4])?,
        });
    }
    if !seen_header {
        return Err(Error::Io("missing CSV header".into()));
    }
    Ok(parsed)
}

/// Gnuplot commands drawing one PNG per metric family present in `result`.
pub fn render_plot_script(result: &SweepResult, csv_name: &str, stem: &str) -> String {
    let mut families: Vec<&'static str> = Vec::new();
    let mut series: Vec<(Metric, &'static str)> = Vec::new();
    for row in &result.rows {
        let family = row.metric.family();
        if !families.contains(&family) {
            families.push(family);
        }
        if !series.contains(&(row.metric, row.array.as_str())) {
            series.push((row.metric, row.array.as_str()));
        }
    }
    let swept = result.metadata_value("swept").unwrap_or("swept");
    let log_x = result.metadata_value("grid_spacing") == Some("log");
    let mut out = String::new();
    let _ = writeln!(out, "# gnuplot script; columns: 1 swept, 2 metric, 3 array, 4 linear, 5 dB");
    let _ = writeln!(out, "set datafile separator ','");
    let _ = writeln!(out, "set datafile commentschars '#'");
    let _ = writeln!(out, "set terminal pngcairo size 900,600");
    let _ = writeln!(out, "set grid");
    let _ = writeln!(out, "set key best");
    let _ = writeln!(out, "set xlabel '{swept}'");
    if log_x {
        let _ = writeln!(out, "set logscale x");
    }
    for family in families {
        // SNR in dB (column 5); distances and gaps on a log axis (column 4).
        let (column, ylabel, log_y) = match family {
            "snr" | "convergence" => (5, "SNR (dB)", false),
            "gap" => (4, "relative gap", true),
            _ => (4, "distance (m)", true),
        };
        let _ = writeln!(out);
        let _ = writeln!(out, "set output '{stem}_{family}.png'");
        let _ = writeln!(out, "set ylabel '{ylabel}'");
        let _ = writeln!(out, "{}", if log_y { "set logscale y" } else { "unset logscale y" });
        let entries: Vec<String> = series
            .iter()
            .filter(|(m, _)| m.family() == family)
            .map(|(m, a)| {
                format!(
                    "'{csv_name}' using 1:((strcol(2) eq '{m}' && strcol(3) eq '{a}') ? ${column} : NaN) with linespoints title '{a} {m}'",
                    m = m.as_str()
                )
            })
            .collect();
        let _ = writeln!(out, "plot {}", entries.join(", \\\n     "));
    }
    out
}

/// Writes the plot script to `path`, pointing at the CSV with the same stem.
pub fn emit_plot_script(result: &SweepResult, path: &Path) -> Result<()> {
    let stem = path
        .file_stem()
        .and_then(|s| s.to_str())
        .ok_or_else(|| Error::Io(format!("bad plot script path {}", path.display())))?;
    let csv_name = format!("{stem}.csv");
    std::fs::write(path, render_plot_script(result, &csv_name, stem))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sweep::{ArrayKind, SweepRow};

    fn two_rows() -> SweepResult {
        SweepResult {
            metadata: vec![("kind".into(), "angle_sweep".into()), ("swept".into(), "theta_deg".into())],
            points: vec![],
            rows: vec![
                SweepRow { swept: 1.0, metric: Metric::SnrDirect, array: ArrayKind::Uaa, linear: 0.1 + 0.2 },
                SweepRow { swept: 2.0, metric: Metric::SnrDirect, array: ArrayKind::Ula, linear: 1e-301 },
            ],
        }
    }

    #[test]
    fn two_rows_three_lines_plus_metadata() {
        let text = render_csv(&two_rows());
        let data: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(data.len(), 3);
        assert_eq!(data[0], CSV_HEADER);
        assert_eq!(data[2], "2.0000000000000000e0,snr_direct,ULA,0,-inf");
        assert!(!text.contains('\r'));
    }

    #[test]
    fn round_trip_is_exact() {
        let result = two_rows();
        let parsed = parse_csv(&render_csv(&result)).unwrap();
        assert_eq!(parsed.rows[0].linear, 0.1 + 0.2);
        assert_eq!(parsed.rows[0].db, to_db(0.1 + 0.2));
        assert_eq!(parsed.metadata[0], ("kind".into(), "angle_sweep".into()));
    }

    #[test]
    fn special_values() {
        assert_eq!(number(f64::NAN), "nan");
        assert_eq!(decibels(f64::NAN), "nan");
        assert_eq!(decibels(0.0), "-inf");
        assert_eq!(number(100.0), "1.0000000000000000e2");
    }

    #[test]
    fn plot_script_lists_families() {
        let script = render_plot_script(&two_rows(), "x.csv", "x");
        assert_eq!(script.matches("set output").count(), 1);
        assert!(script.contains("'x.csv' using 1:"));
        assert!(script.contains("ULA snr_direct"));
    }
}
