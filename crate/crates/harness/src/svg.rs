//! Minimal deterministic SVG line plots.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{HarnessError, Result};
use crate::table::Table;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Scale {
    #[default]
    Linear,
    Log,
}

impl Scale {
    fn forward(self, v: f64) -> f64 {
        match self {
            Scale::Linear => v,
            Scale::Log => v.log10(),
        }
    }

    fn admits(self, v: f64) -> bool {
        v.is_finite() && (self == Scale::Linear || v > 0.0)
    }
}

#[derive(Debug, Clone, Default)]
pub struct PlotSpec {
    pub title: String,
    pub x_scale: Scale,
    pub y_scale: Scale,
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN: f64 = 60.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#7f7f7f"];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Renders one polyline per y column against the x column.
///
/// Points that are not finite, or not positive on a log axis, are dropped.
pub fn render_svg_lineplot(table: &Table, x: &str, ys: &[&str], spec: &PlotSpec) -> Result<String> {
    if ys.is_empty() {
        return Err(HarnessError::Config("plot needs at least one y column".into()));
    }
    if table.is_empty() {
        return Err(HarnessError::Config("plot needs a non-empty table".into()));
    }
    let column = |name: &str| {
        table
            .numeric_column(name)
            .ok_or_else(|| HarnessError::Config(format!("no column named {name:?}")))
    };
    let xs = column(x)?;
    let mut series = Vec::with_capacity(ys.len());
    for name in ys {
        let points: Vec<(f64, f64)> = xs
            .iter()
            .zip(column(name)?)
            .filter(|&(&a, b)| spec.x_scale.admits(a) && spec.y_scale.admits(b))
            .map(|(&a, b)| (spec.x_scale.forward(a), spec.y_scale.forward(b)))
            .collect();
        series.push((*name, points));
    }

    let all = series.iter().flat_map(|(_, p)| p.iter());
    let (mut x0, mut x1, mut y0, mut y1) =
        (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(a, b) in all {
        x0 = x0.min(a);
        x1 = x1.max(a);
        y0 = y0.min(b);
        y1 = y1.max(b);
    }
    if !x0.is_finite() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    if x1 == x0 {
        (x0, x1) = (x0 - 0.5, x1 + 0.5);
    }
    if y1 == y0 {
        (y0, y1) = (y0 - 0.5, y1 + 0.5);
    }
    let px = |a: f64| MARGIN + (a - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
    let py = |b: f64| HEIGHT - MARGIN - (b - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);
    let label = |v: f64, scale: Scale| match scale {
        Scale::Linear => format!("{v:.3}"),
        Scale::Log => format!("1e{v:.1}"),
    };

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="24" text-anchor="middle" font-family="sans-serif" font-size="14">{}</text>"#,
        WIDTH / 2.0,
        escape(&spec.title)
    );
    let (left, right, top, bottom) = (MARGIN, WIDTH - MARGIN, MARGIN, HEIGHT - MARGIN);
    let _ = writeln!(
        s,
        r#"<path d="M{left} {top} V{bottom} H{right}" fill="none" stroke="black" stroke-width="1"/>"#
    );
    for i in 0..=4 {
        let f = i as f64 / 4.0;
        let (xv, yv) = (x0 + f * (x1 - x0), y0 + f * (y1 - y0));
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-family="sans-serif" font-size="10">{}</text>"#,
            px(xv),
            bottom + 16.0,
            label(xv, spec.x_scale)
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end" font-family="sans-serif" font-size="10">{}</text>"#,
            left - 6.0,
            py(yv) + 3.0,
            label(yv, spec.y_scale)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle" font-family="sans-serif" font-size="12">{}</text>"#,
        WIDTH / 2.0,
        HEIGHT - 12.0,
        escape(x)
    );
    for (k, (name, points)) in series.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let coords: Vec<String> =
            points.iter().map(|&(a, b)| format!("{:.2},{:.2}", px(a), py(b))).collect();
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            coords.join(" ")
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="11" fill="{color}">{}</text>"#,
            right - 110.0,
            top + 14.0 * k as f64,
            escape(name)
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}

pub fn emit_svg_lineplot(
    table: &Table,
    x: &str,
    ys: &[&str],
    spec: &PlotSpec,
    path: &Path,
) -> Result<()> {
    let svg = render_svg_lineplot(table, x, ys, spec)?;
    fs::write(path, svg).map_err(|e| HarnessError::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_points() -> Table {
        let mut t = Table::new(["x", "y", "z"]);
        t.push(vec![1.0.into(), 2.0.into(), (-1.0).into()]);
        t.push(vec![10.0.into(), 4.0.into(), 3.0.into()]);
        t
    }

    #[test]
    fn one_polyline_two_points() {
        let svg = render_svg_lineplot(&two_points(), "x", &["y"], &PlotSpec::default()).unwrap();
        assert_eq!(svg.matches("<polyline").count(), 1);
        let points = svg.split("points=\"").nth(1).unwrap().split('"').next().unwrap();
        assert_eq!(points.split(' ').count(), 2);
        assert!(svg.starts_with("<svg") && svg.ends_with("</svg>\n"));
        assert!(!svg.contains("href"));
    }

    #[test]
    fn empty_y_list_rejected() {
        assert!(render_svg_lineplot(&two_points(), "x", &[], &PlotSpec::default()).is_err());
        assert!(render_svg_lineplot(&two_points(), "x", &["nope"], &PlotSpec::default()).is_err());
        assert!(render_svg_lineplot(&Table::new(["x", "y"]), "x", &["y"], &PlotSpec::default())
            .is_err());
    }

    #[test]
    fn deterministic_bytes() {
        let dir = tempfile::tempdir().unwrap();
        let (a, b) = (dir.path().join("a.svg"), dir.path().join("b.svg"));
        let spec = PlotSpec { title: "a < b".into(), x_scale: Scale::Log, y_scale: Scale::Linear };
        emit_svg_lineplot(&two_points(), "x", &["y", "z"], &spec, &a).unwrap();
        emit_svg_lineplot(&two_points(), "x", &["y", "z"], &spec, &b).unwrap();
        let bytes = fs::read(&a).unwrap();
        assert_eq!(bytes, fs::read(&b).unwrap());
        assert!(String::from_utf8(bytes).unwrap().contains("a &lt; b"));
    }

    #[test]
    fn log_axis_drops_non_positive() {
        let spec = PlotSpec { y_scale: Scale::Log, ..Default::default() };
        let svg = render_svg_lineplot(&two_points(), "x", &["z"], &spec).unwrap();
        let points = svg.split("points=\"").nth(1).unwrap().split('"').next().unwrap();
        assert_eq!(points.split(' ').count(), 1);
    }
}
