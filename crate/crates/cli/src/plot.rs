//! Minimal static SVG line charts.

use std::fmt::Write;

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum PlotError {
    #[error("series `{0}` has no finite points")]
    Empty(String),
}

pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

impl Series {
    pub fn new(name: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        Self {
            name: name.into(),
            points,
        }
    }
}

pub struct Chart {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
}

const WIDTH: f64 = 800.0;
const PANEL_H: f64 = 320.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 150.0;
const TOP: f64 = 36.0;
const BOTTOM: f64 = 46.0;
const MAX_POINTS: usize = 2000;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

fn nice_step(span: f64) -> f64 {
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let r = raw / mag;
    mag * if r <= 1.0 {
        1.0
    } else if r <= 2.0 {
        2.0
    } else if r <= 5.0 {
        5.0
    } else {
        10.0
    }
}

fn bounds(it: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = it.fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), v| (l.min(v), h.max(v)));
    if hi - lo < 1e-12 {
        let pad = lo.abs().max(1.0) * 0.5;
        (lo - pad, hi + pad)
    } else {
        (lo, hi)
    }
}

fn ticks(lo: f64, hi: f64) -> (f64, f64, Vec<f64>) {
    let step = nice_step(hi - lo);
    let start = (lo / step).floor() * step;
    let end = (hi / step).ceil() * step;
    let n = ((end - start) / step).round() as usize;
    let t = (0..=n).map(|i| start + i as f64 * step).collect();
    (start, end, t)
}

fn fmt_tick(v: f64) -> String {
    let r = (v * 1e6).round() / 1e6;
    if r == 0.0 {
        "0".into()
    } else {
        format!("{r}")
    }
}

fn thin(points: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let stride = points.len().div_ceil(MAX_POINTS).max(1);
    let mut out: Vec<_> = points.iter().step_by(stride).copied().collect();
    if let Some(&last) = points.last() {
        if out.last() != Some(&last) {
            out.push(last);
        }
    }
    out
}

fn panel(svg: &mut String, c: &Chart, y0: f64) -> Result<(), PlotError> {
    let mut clean = Vec::with_capacity(c.series.len());
    for s in &c.series {
        let pts: Vec<_> = s
            .points
            .iter()
            .copied()
            .filter(|(x, y)| x.is_finite() && y.is_finite())
            .collect();
        if pts.is_empty() {
            return Err(PlotError::Empty(s.name.clone()));
        }
        clean.push(thin(&pts));
    }
    let (xl, xh) = bounds(clean.iter().flatten().map(|p| p.0));
    let (yl, yh) = bounds(clean.iter().flatten().map(|p| p.1));
    let (xl, xh, xt) = ticks(xl, xh);
    let (yl, yh, yt) = ticks(yl, yh);
    let pw = WIDTH - LEFT - RIGHT;
    let ph = PANEL_H - TOP - BOTTOM;
    let px = |x: f64| LEFT + (x - xl) / (xh - xl) * pw;
    let py = |y: f64| y0 + TOP + (yh - y) / (yh - yl) * ph;

    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" font-size="15">{}</text>"#,
        LEFT + pw / 2.0,
        y0 + 22.0,
        c.title
    );
    let _ = writeln!(
        svg,
        r##"<rect x="{LEFT}" y="{:.1}" width="{pw}" height="{ph}" fill="none" stroke="#333"/>"##,
        y0 + TOP
    );
    for &t in &xt {
        let x = px(t);
        let _ = writeln!(
            svg,
            r##"<line x1="{x:.1}" y1="{:.1}" x2="{x:.1}" y2="{:.1}" stroke="#ddd"/><text x="{x:.1}" y="{:.1}" text-anchor="middle" font-size="11">{}</text>"##,
            y0 + TOP,
            y0 + TOP + ph,
            y0 + TOP + ph + 15.0,
            fmt_tick(t)
        );
    }
    for &t in &yt {
        let y = py(t);
        let _ = writeln!(
            svg,
            r##"<line x1="{LEFT}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="#ddd"/><text x="{:.1}" y="{:.1}" text-anchor="end" font-size="11">{}</text>"##,
            LEFT + pw,
            LEFT - 6.0,
            y + 4.0,
            fmt_tick(t)
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" font-size="12">{}</text>"#,
        LEFT + pw / 2.0,
        y0 + PANEL_H - 8.0,
        c.x_label
    );
    let _ = writeln!(
        svg,
        r#"<text transform="translate(16,{:.1}) rotate(-90)" text-anchor="middle" font-size="12">{}</text>"#,
        py((yl + yh) / 2.0),
        c.y_label
    );
    for (i, (s, pts)) in c.series.iter().zip(&clean).enumerate() {
        let color = COLORS[i % COLORS.len()];
        let mut d = String::new();
        for (k, &(x, y)) in pts.iter().enumerate() {
            let _ = write!(d, "{}{:.2},{:.2}", if k == 0 { "M" } else { " L" }, px(x), py(y));
        }
        let _ = writeln!(
            svg,
            r#"<path d="{d}" fill="none" stroke="{color}" stroke-width="1.4"/>"#
        );
        let ly = y0 + TOP + 14.0 + 18.0 * i as f64;
        let lx = LEFT + pw + 12.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{lx:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{color}" stroke-width="2"/><text x="{:.1}" y="{:.1}" font-size="12">{}</text>"#,
            lx + 20.0,
            lx + 26.0,
            ly + 4.0,
            s.name
        );
    }
    Ok(())
}

/// Renders the charts stacked vertically into one SVG document.
pub fn render(charts: &[Chart]) -> Result<String, PlotError> {
    let h = PANEL_H * charts.len() as f64;
    let mut svg = format!(
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{h}" viewBox="0 0 {WIDTH} {h}" font-family="sans-serif">
<rect width="100%" height="100%" fill="white"/>
"#
    );
    for (i, c) in charts.iter().enumerate() {
        panel(&mut svg, c, i as f64 * PANEL_H)?;
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chart(points: Vec<(f64, f64)>) -> Chart {
        Chart {
            title: "t".into(),
            x_label: "time [s]".into(),
            y_label: "angle [deg]".into(),
            series: vec![Series::new("roll", points)],
        }
    }

    #[test]
    fn renders_labels_and_path() {
        let svg = render(&[chart(vec![(0.0, 1.0), (1.0, -1.0), (2.0, 0.5)])]).unwrap();
        assert!(svg.starts_with("<svg"));
        assert!(svg.contains("time [s]") && svg.contains("angle [deg]"));
        assert_eq!(svg.matches("<path").count(), 1);
    }

    #[test]
    fn constant_series_gets_a_range() {
        assert!(render(&[chart(vec![(0.0, 0.0), (1.0, 0.0)])]).is_ok());
    }

    #[test]
    fn empty_series_is_an_error() {
        let e = render(&[chart(vec![(0.0, f64::NAN)])]).unwrap_err();
        assert_eq!(e, PlotError::Empty("roll".into()));
    }

    #[test]
    fn nice_steps() {
        assert_eq!(nice_step(10.0), 2.0);
        assert_eq!(nice_step(1.0), 0.2);
        assert_eq!(nice_step(300.0), 100.0);
    }

    #[test]
    fn long_series_thinned() {
        let pts: Vec<_> = (0..10_001).map(|i| (i as f64, 0.0)).collect();
        let t = thin(&pts);
        assert!(t.len() <= MAX_POINTS + 1);
        assert_eq!(t.last(), pts.last());
    }
}
