//! Static SVG figures: line plots and heat maps, laid out left to right.
//! Output depends only on the data, so identical inputs give identical bytes.

use std::fmt::Write;

use crate::Error;

const PANEL_W: f64 = 480.0;
const PANEL_H: f64 = 360.0;
const LEFT: f64 = 72.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 34.0;
const BOTTOM: f64 = 52.0;
const PALETTE: [&str; 6] = ["#1f4e9c", "#c0392b", "#2e8b57", "#8e44ad", "#d68910", "#17202a"];
/// Dark to light, so brightness grows with the value.
const RAMP: [(f64, f64, f64); 5] =
    [(68.0, 1.0, 84.0), (59.0, 82.0, 139.0), (33.0, 145.0, 140.0), (94.0, 201.0, 98.0), (253.0, 231.0, 37.0)];

#[derive(Debug, Clone, PartialEq)]
pub struct LineSeries {
    pub label: String,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Panel {
    Lines { title: String, x_label: String, y_label: String, series: Vec<LineSeries> },
    /// `values[j][i]` belongs to `(xs[i], ys[j])`.
    Heat { title: String, x_label: String, y_label: String, xs: Vec<f64>, ys: Vec<f64>, values: Vec<Vec<f64>> },
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Fixed-precision coordinate, with `-0.00` folded to `0.00`.
fn coord(v: f64) -> String {
    let s = format!("{v:.2}");
    if s == "-0.00" {
        "0.00".into()
    } else {
        s
    }
}

pub fn ramp_color(v: f64) -> String {
    let v = if v.is_finite() { v.clamp(0.0, 1.0) } else { 0.0 };
    let pos = v * (RAMP.len() - 1) as f64;
    let i = (pos.floor() as usize).min(RAMP.len() - 2);
    let f = pos - i as f64;
    let (a, b) = (RAMP[i], RAMP[i + 1]);
    let mix = |x: f64, y: f64| (x + (y - x) * f).round() as u8;
    format!("#{:02x}{:02x}{:02x}", mix(a.0, b.0), mix(a.1, b.1), mix(a.2, b.2))
}

/// About five round tick values covering `[lo, hi]`.
fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let span = hi - lo;
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0].iter().map(|m| m * mag).find(|s| *s >= raw).unwrap_or(10.0 * mag);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|i| i as f64 * step).collect()
}

fn tick_label(v: f64) -> String {
    let s = format!("{:.4}", v);
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

fn range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.filter(|v| v.is_finite()).fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-12 * (1.0 + lo.abs()) {
        return (lo - 1.0, hi + 1.0);
    }
    (lo, hi)
}

struct Frame {
    x0: f64,
    y0: f64,
    w: f64,
    h: f64,
    xr: (f64, f64),
    yr: (f64, f64),
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        self.x0 + (x - self.xr.0) / (self.xr.1 - self.xr.0) * self.w
    }

    fn py(&self, y: f64) -> f64 {
        self.y0 + self.h - (y - self.yr.0) / (self.yr.1 - self.yr.0) * self.h
    }
}

fn axes(out: &mut String, f: &Frame, title: &str, x_label: &str, y_label: &str) {
    let _ = writeln!(
        out,
        r##"<rect x="{}" y="{}" width="{}" height="{}" fill="none" stroke="#000" stroke-width="1"/>"##,
        coord(f.x0),
        coord(f.y0),
        coord(f.w),
        coord(f.h)
    );
    for t in ticks(f.xr.0, f.xr.1) {
        let x = coord(f.px(t));
        let yb = f.y0 + f.h;
        let _ = writeln!(out, r##"<line x1="{x}" y1="{}" x2="{x}" y2="{}" stroke="#000"/>"##, coord(yb), coord(yb + 5.0));
        let _ = writeln!(
            out,
            r#"<text x="{x}" y="{}" font-size="11" text-anchor="middle">{}</text>"#,
            coord(yb + 18.0),
            tick_label(t)
        );
    }
    for t in ticks(f.yr.0, f.yr.1) {
        let y = coord(f.py(t));
        let _ = writeln!(out, r##"<line x1="{}" y1="{y}" x2="{}" y2="{y}" stroke="#000"/>"##, coord(f.x0 - 5.0), coord(f.x0));
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{y}" font-size="11" text-anchor="end" dominant-baseline="middle">{}</text>"#,
            coord(f.x0 - 8.0),
            tick_label(t)
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" font-size="13" text-anchor="middle">{}</text>"#,
        coord(f.x0 + f.w / 2.0),
        coord(f.y0 + f.h + 42.0),
        escape(x_label)
    );
    let (lx, ly) = (coord(f.x0 - 52.0), coord(f.y0 + f.h / 2.0));
    let _ = writeln!(
        out,
        r#"<text x="{lx}" y="{ly}" font-size="13" text-anchor="middle" transform="rotate(-90 {lx} {ly})">{}</text>"#,
        escape(y_label)
    );
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" font-size="13" text-anchor="middle">{}</text>"#,
        coord(f.x0 + f.w / 2.0),
        coord(f.y0 - 12.0),
        escape(title)
    );
}

fn lines_panel(out: &mut String, ox: f64, title: &str, x_label: &str, y_label: &str, series: &[LineSeries]) {
    let xr = range(series.iter().flat_map(|s| s.x.iter().copied()));
    let (ylo, yhi) = range(series.iter().flat_map(|s| s.y.iter().copied()));
    let pad = 0.05 * (yhi - ylo);
    let frame = Frame {
        x0: ox + LEFT,
        y0: TOP,
        w: PANEL_W - LEFT - RIGHT,
        h: PANEL_H - TOP - BOTTOM,
        xr,
        yr: (ylo - pad, yhi + pad),
    };
    axes(out, &frame, title, x_label, y_label);
    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let points: Vec<String> = s
            .x
            .iter()
            .zip(&s.y)
            .filter(|(x, y)| x.is_finite() && y.is_finite())
            .map(|(x, y)| format!("{},{}", coord(frame.px(*x)), coord(frame.py(*y))))
            .collect();
        let _ = writeln!(
            out,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            points.join(" ")
        );
        let ly = frame.y0 + 14.0 + 16.0 * i as f64;
        let lx = frame.x0 + frame.w - 110.0;
        let _ = writeln!(
            out,
            r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="{color}" stroke-width="2"/>"#,
            coord(lx),
            coord(ly),
            coord(lx + 22.0),
            coord(ly)
        );
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" font-size="12" dominant-baseline="middle">{}</text>"#,
            coord(lx + 28.0),
            coord(ly),
            escape(&s.label)
        );
    }
}

fn heat_panel(
    out: &mut String,
    ox: f64,
    title: &str,
    x_label: &str,
    y_label: &str,
    xs: &[f64],
    ys: &[f64],
    values: &[Vec<f64>],
) {
    let half = |v: &[f64]| if v.len() > 1 { 0.5 * (v[1] - v[0]) } else { 0.5 };
    let (hx, hy) = (half(xs), half(ys));
    let frame = Frame {
        x0: ox + LEFT,
        y0: TOP,
        w: PANEL_W - LEFT - RIGHT,
        h: PANEL_H - TOP - BOTTOM,
        xr: (xs[0] - hx, xs[xs.len() - 1] + hx),
        yr: (ys[0] - hy, ys[ys.len() - 1] + hy),
    };
    let max = values.iter().flatten().copied().filter(|v| v.is_finite()).fold(0.0f64, f64::max);
    let norm = if max > 0.0 { max } else { 1.0 };
    for (j, row) in values.iter().enumerate() {
        for (i, v) in row.iter().enumerate() {
            let (x, y) = (frame.px(xs[i] - hx), frame.py(ys[j] + hy));
            let (w, h) = (frame.px(xs[i] + hx) - x, frame.py(ys[j] - hy) - y);
            let _ = writeln!(
                out,
                r#"<rect x="{}" y="{}" width="{}" height="{}" fill="{}"/>"#,
                coord(x),
                coord(y),
                coord(w),
                coord(h),
                ramp_color(v / norm)
            );
        }
    }
    axes(out, &frame, title, x_label, y_label);
}

/// Renders panels side by side into one SVG document.
pub fn emit_figure(panels: &[Panel]) -> Result<String, Error> {
    if panels.is_empty() {
        return Err(Error::Figure("no panels to draw".into()));
    }
    for p in panels {
        match p {
            Panel::Lines { series, .. } => {
                if series.is_empty() {
                    return Err(Error::Figure("line panel without series".into()));
                }
                for s in series {
                    if s.x.len() != s.y.len() {
                        return Err(Error::Figure(format!(
                            "series `{}` has {} x values and {} y values",
                            s.label,
                            s.x.len(),
                            s.y.len()
                        )));
                    }
                    if s.x.is_empty() {
                        return Err(Error::Figure(format!("series `{}` is empty", s.label)));
                    }
                }
            }
            Panel::Heat { xs, ys, values, .. } => {
                if xs.is_empty() || ys.is_empty() || values.len() != ys.len() || values.iter().any(|r| r.len() != xs.len())
                {
                    return Err(Error::Figure("heat map dimensions do not match its axes".into()));
                }
            }
        }
    }
    let width = PANEL_W * panels.len() as f64;
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif">"#,
        w = width,
        h = PANEL_H
    );
    let _ = writeln!(out, r##"<rect width="{width}" height="{PANEL_H}" fill="#fff"/>"##);
    for (i, p) in panels.iter().enumerate() {
        let ox = PANEL_W * i as f64;
        match p {
            Panel::Lines { title, x_label, y_label, series } => lines_panel(&mut out, ox, title, x_label, y_label, series),
            Panel::Heat { title, x_label, y_label, xs, ys, values } => {
                heat_panel(&mut out, ox, title, x_label, y_label, xs, ys, values)
            }
        }
    }
    out.push_str("</svg>\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(label: &str, n: usize) -> LineSeries {
        LineSeries { label: label.into(), x: (0..n).map(|i| i as f64).collect(), y: (0..n).map(|i| (i * i) as f64).collect() }
    }

    #[test]
    fn one_series_one_polyline() {
        let svg = emit_figure(&[Panel::Lines {
            title: String::new(),
            x_label: "kt".into(),
            y_label: "y".into(),
            series: vec![line("a", 2)],
        }])
        .unwrap();
        assert_eq!(svg.matches("<polyline").count(), 1);
        assert!(svg.contains(">kt<"));
    }

    #[test]
    fn mismatched_lengths_rejected() {
        let mut s = line("a", 3);
        s.y.pop();
        let r = emit_figure(&[Panel::Lines { title: String::new(), x_label: String::new(), y_label: String::new(), series: vec![s] }]);
        assert!(matches!(r, Err(Error::Figure(_))));
    }

    #[test]
    fn ramp_brightens_monotonically() {
        let lum = |c: &str| {
            let v = u32::from_str_radix(&c[1..], 16).unwrap();
            let (r, g, b) = ((v >> 16) as f64, ((v >> 8) & 255) as f64, (v & 255) as f64);
            0.2126 * r + 0.7152 * g + 0.0722 * b
        };
        let samples: Vec<f64> = (0..=100).map(|i| lum(&ramp_color(i as f64 / 100.0))).collect();
        assert!(samples.windows(2).all(|w| w[1] >= w[0] - 1.0));
        assert!(samples[100] > samples[0] + 100.0);
    }

    #[test]
    fn ticks_are_round() {
        assert_eq!(ticks(0.0, 10.0), vec![0.0, 2.0, 4.0, 6.0, 8.0, 10.0]);
        assert_eq!(tick_label(0.30000000000000004), "0.3");
    }
}
