//! CSV and SVG writers.

use std::fmt::Write as _;

use qdecide_core::dynamics::{DecisionSeries, PlayerSeries, TimeGrid};
use qdecide_core::oracle::LtpResidual;

pub const SERIES_HEADER: &str = "t,n1,mu1,dmu1,nB1,n2,mu2,dmu2,nB2";
pub const LTP_HEADER: &str = "t,R1,R2";

/// 17 significant digits, enough to round-trip any `f64`.
fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn series_csv(series: &DecisionSeries) -> String {
    let mut out = String::with_capacity(series.len() * 9 * 24);
    out.push_str(SERIES_HEADER);
    out.push('\n');
    for k in 0..series.len() {
        let mut fields = vec![num(series.grid.time(k))];
        for p in &series.players {
            fields.extend([p.total[k], p.mu[k], p.dmu[k], p.bath[k]].map(num));
        }
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

pub fn ltp_csv(ltp: &LtpResidual) -> String {
    let mut out = String::new();
    out.push_str(LTP_HEADER);
    out.push('\n');
    for k in 0..ltp.grid.len {
        let _ = writeln!(out, "{},{},{}", num(ltp.grid.time(k)), num(ltp.residual[0][k]), num(ltp.residual[1][k]));
    }
    out
}

/// Parse a file written by [`series_csv`].
pub fn parse_series_csv(label: &str, text: &str) -> Result<DecisionSeries, String> {
    let mut lines = text.lines();
    match lines.next() {
        Some(SERIES_HEADER) => {}
        other => return Err(format!("unexpected header {other:?}")),
    }
    let mut times = Vec::new();
    let mut players: [PlayerSeries; 2] = Default::default();
    for (i, line) in lines.enumerate() {
        let values: Vec<f64> = line
            .split(',')
            .map(|f| f.parse::<f64>().map_err(|e| format!("line {}: {e}", i + 2)))
            .collect::<Result<_, _>>()?;
        if values.len() != 9 {
            return Err(format!("line {}: expected 9 fields, found {}", i + 2, values.len()));
        }
        times.push(values[0]);
        for (p, player) in players.iter_mut().enumerate() {
            let base = 1 + 4 * p;
            player.total.push(values[base]);
            player.mu.push(values[base + 1]);
            player.dmu.push(values[base + 2]);
            player.bath.push(values[base + 3]);
        }
    }
    if times.len() < 2 {
        return Err("need at least two rows".into());
    }
    let grid = TimeGrid::new(times[1] - times[0], times.len());
    Ok(DecisionSeries { label: label.to_string(), grid, players })
}

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 50.0;
const BOTTOM: f64 = 55.0;

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Minimal SVG 1.1 line chart of one series against time. The y range is
/// `[0, 1]`, widened if the data leaves it.
pub fn line_chart_svg(times: &[f64], values: &[f64], title: &str, y_label: &str) -> String {
    let t_end = times.last().copied().unwrap_or(1.0).max(f64::MIN_POSITIVE);
    let y_lo = values.iter().copied().fold(0.0, f64::min);
    let y_hi = values.iter().copied().fold(1.0, f64::max);
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let sx = |t: f64| LEFT + t / t_end * plot_w;
    let sy = |y: f64| TOP + (y_hi - y) / (y_hi - y_lo) * plot_h;

    let mut svg = String::new();
    let _ = writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="28" font-family="sans-serif" font-size="14" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
    let _ = writeln!(
        svg,
        r#"<rect x="{LEFT}" y="{TOP}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black" stroke-width="1"/>"#
    );

    for i in 0..=5 {
        let t = t_end * i as f64 / 5.0;
        let x = sx(t);
        let _ = writeln!(
            svg,
            r#"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/><text x="{x:.2}" y="{:.2}" font-family="sans-serif" font-size="11" text-anchor="middle">{t:.3}</text>"#,
            TOP + plot_h,
            TOP + plot_h + 5.0,
            TOP + plot_h + 18.0
        );
        let y = y_lo + (y_hi - y_lo) * i as f64 / 5.0;
        let py = sy(y);
        let _ = writeln!(
            svg,
            r##"<line x1="{:.2}" y1="{py:.2}" x2="{LEFT}" y2="{py:.2}" stroke="black"/><line x1="{LEFT}" y1="{py:.2}" x2="{:.2}" y2="{py:.2}" stroke="#dddddd"/><text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="11" text-anchor="end">{y:.2}</text>"##,
            LEFT - 5.0,
            LEFT + plot_w,
            LEFT - 8.0,
            py + 4.0
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="12" text-anchor="middle">t</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 12.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="18" y="{:.2}" font-family="sans-serif" font-size="12" text-anchor="middle" transform="rotate(-90 18 {:.2})">{}</text>"#,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0,
        escape(y_label)
    );

    let mut points = String::with_capacity(times.len() * 16);
    for (&t, &y) in times.iter().zip(values) {
        let _ = write!(points, "{:.2},{:.2} ", sx(t), sy(y));
    }
    let _ = writeln!(
        svg,
        r##"<polyline fill="none" stroke="#1f4e9c" stroke-width="1.2" points="{}"/>"##,
        points.trim_end()
    );
    svg.push_str("</svg>\n");
    svg
}
