//! Log-scale convergence charts rendered as standalone SVG.

use std::fmt::Write as _;

use arbk::experiments::{AggregateTable, EpochRecord};

/// Values below this are drawn at the floor so zero residuals stay plottable.
pub const LOG_FLOOR: f64 = 1e-16;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 20.0;
const BOTTOM: f64 = 50.0;

/// Line colors per method; anything else is drawn in black.
pub const METHOD_COLORS: [(&str, &str); 3] = [
    ("bk", "#1f77b4"),
    ("arbk", "#d62728"),
    ("acd-dual", "#2ca02c"),
];

pub fn color_for(label: &str) -> &'static str {
    METHOD_COLORS
        .iter()
        .find(|(m, _)| *m == label)
        .map_or("#000000", |(_, c)| c)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub points: Vec<(usize, f64)>,
}

/// One series per method holding the across-trial mean of `metric`.
pub fn series_from_table(table: &AggregateTable, metric: &str) -> Vec<Series> {
    let mut out: Vec<Series> = Vec::new();
    for row in table.rows.iter().filter(|r| r.metric == metric) {
        match out.last_mut() {
            Some(s) if s.label == row.method => s.points.push((row.epoch, row.stats.mean)),
            _ => out.push(Series {
                label: row.method.clone(),
                points: vec![(row.epoch, row.stats.mean)],
            }),
        }
    }
    out
}

pub fn series_from_log(records: &[EpochRecord], metric: &str, label: &str) -> Series {
    Series {
        label: label.to_string(),
        points: records
            .iter()
            .map(|r| (r.epoch, r.metrics.get(metric).unwrap_or(f64::NAN)))
            .collect(),
    }
}

fn log_value(v: f64) -> f64 {
    if v.is_finite() {
        v.max(LOG_FLOOR).log10()
    } else {
        LOG_FLOOR.log10()
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Renders a line chart with a log-scale y axis.
pub fn render(series: &[Series], y_label: &str) -> String {
    let max_epoch = series
        .iter()
        .flat_map(|s| s.points.iter().map(|p| p.0))
        .max()
        .unwrap_or(0)
        .max(1);
    let logs = series
        .iter()
        .flat_map(|s| s.points.iter().map(|p| log_value(p.1)));
    let (lo, hi) = logs.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        (lo.min(v), hi.max(v))
    });
    let (mut y_lo, mut y_hi) = if lo.is_finite() {
        (lo.floor(), hi.ceil())
    } else {
        (-1.0, 0.0)
    };
    if y_hi <= y_lo {
        y_hi = y_lo + 1.0;
    }
    y_lo = y_lo.max(LOG_FLOOR.log10());

    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let sx = |e: usize| LEFT + plot_w * e as f64 / max_epoch as f64;
    let sy = |v: f64| TOP + plot_h * (y_hi - log_value(v).max(y_lo)) / (y_hi - y_lo);

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(
        out,
        r##"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="#ffffff"/>"##
    );
    let _ = writeln!(
        out,
        r##"<rect x="{LEFT}" y="{TOP}" width="{plot_w}" height="{plot_h}" fill="none" stroke="#444444"/>"##
    );

    // y ticks at decades, thinned to at most ~10 labels.
    let decades = (y_hi - y_lo) as i64;
    let step = (decades / 10 + 1).max(1);
    let mut d = y_lo as i64;
    while d <= y_hi as i64 {
        let y = TOP + plot_h * (y_hi - d as f64) / (y_hi - y_lo);
        let _ = writeln!(
            out,
            r##"<line x1="{:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#dddddd"/>"##,
            LEFT,
            LEFT + plot_w
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">1e{d}</text>"#,
            LEFT - 6.0,
            y + 4.0
        );
        d += step;
    }

    // x ticks: about five evenly spaced epochs.
    let x_step = (max_epoch as f64 / 5.0).ceil().max(1.0) as usize;
    let mut e = 0;
    while e <= max_epoch {
        let x = sx(e);
        let _ = writeln!(
            out,
            r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{e}</text>"#,
            TOP + plot_h + 16.0
        );
        e += x_step;
    }

    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">epochs</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 10.0
    );
    let _ = writeln!(
        out,
        r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">{}</text>"#,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0,
        escape(y_label)
    );

    for s in series {
        let pts: Vec<String> = s
            .points
            .iter()
            .map(|&(e, v)| format!("{:.2},{:.2}", sx(e), sy(v)))
            .collect();
        let _ = writeln!(
            out,
            r#"<polyline fill="none" stroke="{}" stroke-width="1.5" points="{}"/>"#,
            color_for(&s.label),
            pts.join(" ")
        );
    }

    // Legend, top right inside the plot area.
    for (k, s) in series.iter().enumerate() {
        let y = TOP + 16.0 + 16.0 * k as f64;
        let x = LEFT + plot_w - 110.0;
        let _ = writeln!(
            out,
            r#"<line x1="{x:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="{}" stroke-width="2"/>"#,
            x + 20.0,
            color_for(&s.label)
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}">{}</text>"#,
            x + 26.0,
            y + 4.0,
            escape(&s.label)
        );
    }
    out.push_str("</svg>\n");
    out
}
