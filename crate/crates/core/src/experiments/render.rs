use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::report::{Aggregate, ExperimentReport};
use crate::error::Result;

/// `replica,parameter,metric,value`, one row per record.
pub fn to_csv(report: &ExperimentReport) -> String {
    let mut out = String::from("replica,parameter,metric,value\n");
    for r in &report.records {
        let _ = writeln!(out, "{},{},{},{}", r.replica, r.parameter, r.metric, r.value);
    }
    out
}

const PANEL_W: f64 = 420.0;
const PANEL_H: f64 = 260.0;
const MARGIN: f64 = 48.0;

/// One panel per metric plotting the median against the parameter.
pub fn to_svg(report: &ExperimentReport) -> String {
    let mut metrics: Vec<&str> = Vec::new();
    for a in &report.aggregates {
        if !metrics.contains(&a.metric.as_str()) {
            metrics.push(&a.metric);
        }
    }
    let checks_h = 18.0 * (report.checks.len() + 1) as f64;
    let width = PANEL_W;
    let height = PANEL_H * metrics.len() as f64 + checks_h + 30.0;
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(
        svg,
        r#"<text x="8" y="18" font-size="14">{}</text>"#,
        escape(&report.experiment)
    );
    for (k, metric) in metrics.iter().enumerate() {
        let points: Vec<&Aggregate> = report
            .aggregates
            .iter()
            .filter(|a| a.metric == *metric)
            .collect();
        panel(&mut svg, metric, &points, 30.0 + PANEL_H * k as f64);
    }
    let top = 30.0 + PANEL_H * metrics.len() as f64;
    for (i, c) in report.checks.iter().enumerate() {
        let colour = if c.passed { "#1a7f37" } else { "#cf222e" };
        let _ = writeln!(
            svg,
            r#"<text x="8" y="{}" fill="{colour}">{} {}: {}</text>"#,
            top + 18.0 * (i + 1) as f64,
            if c.passed { "PASS" } else { "FAIL" },
            escape(&c.name),
            fmt(c.observed)
        );
    }
    svg.push_str("</svg>\n");
    svg
}

fn panel(svg: &mut String, metric: &str, points: &[&Aggregate], top: f64) {
    let (x0, x1) = (MARGIN, PANEL_W - 16.0);
    let (y0, y1) = (top + PANEL_H - 36.0, top + 24.0);
    let _ = writeln!(svg, r#"<text x="{x0}" y="{}">{} (median)</text>"#, top + 14.0, escape(metric));
    let _ = writeln!(
        svg,
        r##"<rect x="{x0}" y="{y1}" width="{}" height="{}" fill="none" stroke="#999"/>"##,
        x1 - x0,
        y0 - y1
    );
    let finite: Vec<&&Aggregate> = points.iter().filter(|a| a.median.is_finite()).collect();
    if finite.is_empty() {
        return;
    }
    let (pmin, pmax) = bounds(finite.iter().map(|a| a.parameter));
    let (vmin, vmax) = bounds(finite.iter().map(|a| a.median));
    let sx = |p: f64| x0 + (p - pmin) / (pmax - pmin) * (x1 - x0);
    let sy = |v: f64| y0 - (v - vmin) / (vmax - vmin) * (y0 - y1);
    let path: Vec<String> = finite
        .iter()
        .map(|a| format!("{:.2},{:.2}", sx(a.parameter), sy(a.median)))
        .collect();
    let _ = writeln!(
        svg,
        r##"<polyline points="{}" fill="none" stroke="#0969da" stroke-width="1.5"/>"##,
        path.join(" ")
    );
    for a in &finite {
        let (x, y) = (sx(a.parameter), sy(a.median));
        let _ = writeln!(svg, r##"<circle cx="{x:.2}" cy="{y:.2}" r="3" fill="#0969da"/>"##);
        let _ = writeln!(svg, r#"<text x="{:.2}" y="{:.2}">{}</text>"#, x + 4.0, y - 4.0, fmt(a.median));
    }
    let _ = writeln!(svg, r#"<text x="{x0}" y="{}">{}</text>"#, y0 + 14.0, fmt(pmin));
    let _ = writeln!(
        svg,
        r#"<text x="{x1}" y="{}" text-anchor="end">{}</text>"#,
        y0 + 14.0,
        fmt(pmax)
    );
}

fn bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), v| (l.min(v), h.max(v)));
    if hi > lo {
        (lo, hi)
    } else {
        (lo - 0.5, hi + 0.5)
    }
}

fn fmt(v: f64) -> String {
    if v != 0.0 && (v.abs() < 1e-3 || v.abs() >= 1e5) {
        format!("{v:.3e}")
    } else {
        format!("{v:.4}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Writes `<name>.csv`, `<name>.json` and `<name>.svg` into `dir`.
pub fn write_report(report: &ExperimentReport, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let files = [
        ("csv", to_csv(report)),
        ("json", report.to_json()),
        ("svg", to_svg(report)),
    ];
    let mut paths = Vec::new();
    for (ext, body) in files {
        let path = dir.join(format!("{}.{ext}", report.experiment));
        std::fs::write(&path, body)?;
        paths.push(path);
    }
    Ok(paths)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::{ExperimentConfig, Record};

    fn report() -> ExperimentReport {
        let c = ExperimentConfig::from_json(r#"{"experiment":"demo","replicas":2,"seed":1}"#).unwrap();
        let records = vec![
            Record { replica: 0, parameter: 10.0, metric: "d".into(), value: 0.5 },
            Record { replica: 1, parameter: 10.0, metric: "d".into(), value: 0.25 },
            Record { replica: 0, parameter: 20.0, metric: "d".into(), value: 0.125 },
        ];
        ExperimentReport::new(&c, records, vec![])
    }

    #[test]
    fn csv_has_one_row_per_record() {
        let csv = to_csv(&report());
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(lines[0], "replica,parameter,metric,value");
        assert_eq!(lines[1], "0,10,d,0.5");
        assert_eq!(lines.len(), 4);
    }

    #[test]
    fn writes_all_three_files() {
        let dir = tempfile::tempdir().unwrap();
        let paths = write_report(&report(), dir.path()).unwrap();
        assert_eq!(paths.len(), 3);
        let svg = std::fs::read_to_string(&paths[2]).unwrap();
        assert!(svg.starts_with("<svg") && svg.contains("polyline"));
        let back = ExperimentReport::from_json(&std::fs::read_to_string(&paths[1]).unwrap()).unwrap();
        assert_eq!(back, report());
    }
}
