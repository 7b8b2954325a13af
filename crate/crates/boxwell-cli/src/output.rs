//! File writers: CSV tables, JSON reports, simple SVG line plots, and the
//! run manifest that sits beside every output.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

/// Floating-point cell with 16 significant digits.
pub fn cell(v: f64) -> String {
    format!("{v:.15e}")
}

pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> std::io::Result<()> {
    let mut out = String::new();
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    fs::write(path, out)
}

pub fn write_json(path: &Path, value: &Value) -> std::io::Result<()> {
    let mut text = serde_json::to_string_pretty(value).expect("serializable report");
    text.push('\n');
    fs::write(path, text)
}

/// Run manifest written next to each output file: the command, its full
/// parameter set, the tool version, and the produced files. Re-running the
/// same manifest parameters reproduces the outputs.
pub fn write_manifest(
    command: &str,
    parameters: Value,
    outputs: &[PathBuf],
) -> std::io::Result<()> {
    let manifest = json!({
        "command": command,
        "version": env!("CARGO_PKG_VERSION"),
        "parameters": parameters,
        "outputs": outputs.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
    });
    let primary = outputs.first().expect("at least one output");
    let path = primary.with_extension(format!(
        "{}manifest.json",
        primary
            .extension()
            .map(|e| format!("{}.", e.to_string_lossy()))
            .unwrap_or_default()
    ));
    write_json(&path, &manifest)
}

/// Minimal polyline SVG: one series per mode, log10 of the error against the
/// schedule index.
pub fn write_error_svg(
    path: &Path,
    series: &[(String, Vec<f64>)],
) -> std::io::Result<()> {
    let (w, h, margin) = (640.0, 420.0, 50.0);
    let max_len = series.iter().map(|s| s.1.len()).max().unwrap_or(0);
    let logs: Vec<Vec<f64>> = series
        .iter()
        .map(|s| s.1.iter().map(|&v| v.max(1e-300).log10()).collect())
        .collect();
    let lo = logs.iter().flatten().cloned().fold(f64::INFINITY, f64::min);
    let hi = logs.iter().flatten().cloned().fold(f64::NEG_INFINITY, f64::max);
    let span = (hi - lo).max(1e-9);

    let mut svg = String::new();
    svg.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n"
    ));
    svg.push_str(&format!(
        "  <rect x=\"0\" y=\"0\" width=\"{w}\" height=\"{h}\" fill=\"white\"/>\n"
    ));
    svg.push_str(&format!(
        "  <line x1=\"{margin}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n",
        h - margin,
        w - margin,
        h - margin
    ));
    svg.push_str(&format!(
        "  <line x1=\"{margin}\" y1=\"{margin}\" x2=\"{margin}\" y2=\"{}\" stroke=\"black\"/>\n",
        h - margin
    ));
    svg.push_str(&format!(
        "  <text x=\"{}\" y=\"{}\" font-size=\"12\">schedule step</text>\n",
        w / 2.0 - 40.0,
        h - margin / 3.0
    ));
    svg.push_str(&format!(
        "  <text x=\"12\" y=\"{}\" font-size=\"12\" transform=\"rotate(-90 12 {})\">log10 rel. energy error</text>\n",
        h / 2.0,
        h / 2.0
    ));
    let colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b", "#e377c2"];
    for (s, (name, _)) in series.iter().enumerate() {
        let pts: Vec<String> = logs[s]
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                let x = margin
                    + (w - 2.0 * margin) * i as f64 / (max_len.max(2) - 1) as f64;
                let y = h - margin - (h - 2.0 * margin) * (v - lo) / span;
                format!("{x:.1},{y:.1}")
            })
            .collect();
        let color = colors[s % colors.len()];
        svg.push_str(&format!(
            "  <polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>\n",
            pts.join(" ")
        ));
        svg.push_str(&format!(
            "  <text x=\"{}\" y=\"{}\" font-size=\"12\" fill=\"{color}\">{name}</text>\n",
            w - margin + 6.0,
            margin + 16.0 * s as f64
        ));
    }
    svg.push_str("</svg>\n");
    let mut file = fs::File::create(path)?;
    file.write_all(svg.as_bytes())
}
