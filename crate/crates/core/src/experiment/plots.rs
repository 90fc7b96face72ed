use super::ExperimentError;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN: f64 = 64.0;
const COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

#[derive(Clone, Debug)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scale {
    Linear,
    Log,
}

#[derive(Clone, Debug)]
pub struct LineChart {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub x_scale: Scale,
    pub y_scale: Scale,
    pub series: Vec<Series>,
}

fn transform(v: f64, scale: Scale) -> Option<f64> {
    match scale {
        Scale::Linear => v.is_finite().then_some(v),
        Scale::Log => (v > 0.0 && v.is_finite()).then(|| v.log10()),
    }
}

fn range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), v| {
        (l.min(v), h.max(v))
    });
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-300 {
        let pad = lo.abs().max(1.0) * 0.5;
        return (lo - pad, hi + pad);
    }
    let pad = 0.05 * (hi - lo);
    (lo - pad, hi + pad)
}

fn tick_label(v: f64, scale: Scale) -> String {
    let v = match scale {
        Scale::Linear => v,
        Scale::Log => 10f64.powf(v),
    };
    format!("{v:.3e}")
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

impl LineChart {
    pub fn to_svg(&self) -> String {
        let mapped: Vec<Vec<(f64, f64)>> = self
            .series
            .iter()
            .map(|s| {
                s.points
                    .iter()
                    .filter_map(|&(x, y)| {
                        Some((transform(x, self.x_scale)?, transform(y, self.y_scale)?))
                    })
                    .collect()
            })
            .collect();
        let (x0, x1) = range(mapped.iter().flatten().map(|p| p.0));
        let (y0, y1) = range(mapped.iter().flatten().map(|p| p.1));
        let px = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
        let py = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);

        let mut out = String::new();
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">"#
        );
        let _ = writeln!(
            out,
            r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="24" text-anchor="middle" font-size="14">{}</text>"#,
            WIDTH / 2.0,
            escape(&self.title)
        );
        let _ = writeln!(
            out,
            r#"<rect x="{MARGIN}" y="{MARGIN}" width="{:.1}" height="{:.1}" fill="none" stroke="black"/>"#,
            WIDTH - 2.0 * MARGIN,
            HEIGHT - 2.0 * MARGIN
        );
        for i in 0..=4 {
            let t = i as f64 / 4.0;
            let xv = x0 + t * (x1 - x0);
            let yv = y0 + t * (y1 - y0);
            let _ = writeln!(
                out,
                r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
                px(xv),
                HEIGHT - MARGIN + 16.0,
                tick_label(xv, self.x_scale)
            );
            let _ = writeln!(
                out,
                r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"#,
                MARGIN - 4.0,
                py(yv) + 4.0,
                tick_label(yv, self.y_scale)
            );
        }
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
            WIDTH / 2.0,
            HEIGHT - 16.0,
            escape(&self.x_label)
        );
        let _ = writeln!(
            out,
            r#"<text x="14" y="{:.1}" text-anchor="middle" transform="rotate(-90 14 {:.1})">{}</text>"#,
            HEIGHT / 2.0,
            HEIGHT / 2.0,
            escape(&self.y_label)
        );
        for (i, (s, pts)) in self.series.iter().zip(&mapped).enumerate() {
            let color = COLORS[i % COLORS.len()];
            let path: Vec<String> = pts
                .iter()
                .map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y)))
                .collect();
            let _ = writeln!(
                out,
                r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
                path.join(" ")
            );
            for &(x, y) in pts {
                let _ = writeln!(
                    out,
                    r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{color}"/>"#,
                    px(x),
                    py(y)
                );
            }
            let ly = MARGIN + 14.0 + 14.0 * i as f64;
            let _ = writeln!(
                out,
                r#"<text x="{:.1}" y="{ly:.1}" fill="{color}">{}</text>"#,
                MARGIN + 8.0,
                escape(&s.name)
            );
        }
        out.push_str("</svg>\n");
        out
    }

    pub fn point_count(&self) -> usize {
        self.series.iter().map(|s| s.points.len()).sum()
    }
}

/// Parses a CSV with a header row into `(header, rows)`.
pub fn read_csv(path: &Path) -> Result<(Vec<String>, Vec<Vec<f64>>), ExperimentError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ExperimentError::MissingData(format!("{}: {e}", path.display())))?;
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header: Vec<String> = lines
        .next()
        .ok_or_else(|| ExperimentError::MissingData(format!("{} is empty", path.display())))?
        .split(',')
        .map(str::to_owned)
        .collect();
    let rows = lines
        .map(|l| {
            l.split(',')
                .map(|v| v.trim().parse::<f64>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| ExperimentError::MissingData(format!("{}: {e}", path.display())))
        })
        .collect::<Result<Vec<_>, _>>()?;
    if rows.is_empty() {
        return Err(ExperimentError::MissingData(format!(
            "{} has no data rows",
            path.display()
        )));
    }
    Ok((header, rows))
}

fn column(header: &[String], name: &str) -> Option<usize> {
    header.iter().position(|h| h == name)
}

fn abscissa_chart(header: &[String], rows: &[Vec<f64>]) -> Option<LineChart> {
    let x = column(header, "xi_norm")?;
    let series = ["abscissa_restricted", "abscissa_full"]
        .iter()
        .filter_map(|&name| {
            let c = column(header, name)?;
            Some(Series {
                name: name.into(),
                points: rows.iter().map(|r| (r[x], r[c])).collect(),
            })
        })
        .collect();
    Some(LineChart {
        title: "Spectral abscissa".into(),
        x_label: "|xi|".into(),
        y_label: "max Re spectrum".into(),
        x_scale: Scale::Log,
        y_scale: Scale::Linear,
        series,
    })
}

fn energy_chart(header: &[String], rows: &[Vec<f64>]) -> Option<LineChart> {
    let t = column(header, "t")?;
    let e = column(header, "energy")?;
    let mut totals: Vec<(f64, f64)> = Vec::new();
    for r in rows {
        match totals.last_mut() {
            Some(last) if last.0 == r[t] => last.1 += r[e],
            _ => totals.push((r[t], r[e])),
        }
    }
    Some(LineChart {
        title: "Total energy".into(),
        x_label: "t".into(),
        y_label: "energy".into(),
        x_scale: Scale::Linear,
        y_scale: Scale::Linear,
        series: vec![Series {
            name: "energy".into(),
            points: totals,
        }],
    })
}

fn residual_chart(
    header: &[String],
    rows: &[Vec<f64>],
    x_name: &str,
    title: &str,
) -> Option<LineChart> {
    let x = column(header, x_name)?;
    let series = header
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != x)
        .map(|(i, name)| Series {
            name: name.clone(),
            points: rows.iter().map(|r| (r[x], r[i].abs())).collect(),
        })
        .collect();
    Some(LineChart {
        title: title.into(),
        x_label: x_name.into(),
        y_label: "value".into(),
        x_scale: Scale::Log,
        y_scale: Scale::Log,
        series,
    })
}

/// Known CSV outputs and the chart drawn from each.
const PLOTTED: [(&str, &str); 6] = [
    ("abscissa.csv", "abscissa.svg"),
    ("abscissa_no_geostrophic.csv", "abscissa_no_geostrophic.svg"),
    ("diagnostics.csv", "energy.svg"),
    ("eps_scaling.csv", "eps_scaling.svg"),
    ("band_scaling.csv", "band_scaling.svg"),
    ("gap_scaling.csv", "gap_scaling.svg"),
];

/// Writes one SVG per recognised CSV in `dir` and returns their paths.
pub fn emit_plots(dir: &Path) -> Result<Vec<PathBuf>, ExperimentError> {
    let present: Vec<_> = PLOTTED
        .iter()
        .filter(|(csv, _)| dir.join(csv).exists())
        .collect();
    if present.is_empty() {
        return Err(ExperimentError::MissingData(format!(
            "no plottable CSV in {}",
            dir.display()
        )));
    }
    let mut out = Vec::new();
    for &&(csv, svg) in &present {
        let (header, rows) = read_csv(&dir.join(csv))?;
        let chart = match csv {
            "diagnostics.csv" => energy_chart(&header, &rows),
            "eps_scaling.csv" => residual_chart(&header, &rows, "eps", "Scaling in eps"),
            "band_scaling.csv" => {
                residual_chart(&header, &rows, "n", "Band-projector derivative norm")
            }
            "gap_scaling.csv" => residual_chart(&header, &rows, "n", "High-mode gap"),
            _ => abscissa_chart(&header, &rows),
        }
        .ok_or_else(|| ExperimentError::MissingData(format!("{csv} lacks the expected columns")))?;
        let path = dir.join(svg);
        std::fs::write(&path, chart.to_svg())?;
        out.push(path);
    }
    Ok(out)
}
