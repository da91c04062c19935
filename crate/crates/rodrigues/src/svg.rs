//! Hand-written SVG: scatter, polyline, heat map and contour primitives.
//!
//! Every renderer here is a pure function of data that round-trips through the CSV/JSON
//! formats, so re-rendering a written file reproduces the same bytes.

use std::fmt::Write;

use rodrigues_core::trace::{SupportEstimate, Window};
use rodrigues_core::Complex64;

use crate::format::{FieldTable, PointKind};

const WIDTH: f64 = 800.0;
const PAD: f64 = 20.0;

pub struct Canvas {
    window: Window,
    width: f64,
    height: f64,
    body: String,
}

impl Canvas {
    pub fn new(window: Window) -> Self {
        let w = (window.re_max - window.re_min).max(f64::MIN_POSITIVE);
        let h = (window.im_max - window.im_min).max(f64::MIN_POSITIVE);
        let height = (WIDTH * h / w).clamp(100.0, 4.0 * WIDTH);
        Canvas { window, width: WIDTH, height, body: String::new() }
    }

    fn px(&self, z: Complex64) -> (f64, f64) {
        let w = &self.window;
        let sx = (self.width - 2.0 * PAD) / (w.re_max - w.re_min).max(f64::MIN_POSITIVE);
        let sy = (self.height - 2.0 * PAD) / (w.im_max - w.im_min).max(f64::MIN_POSITIVE);
        (PAD + (z.re - w.re_min) * sx, self.height - PAD - (z.im - w.im_min) * sy)
    }

    pub fn dot(&mut self, z: Complex64, r: f64, fill: &str) {
        let (x, y) = self.px(z);
        let _ = writeln!(self.body, r#"<circle cx="{:.2}" cy="{:.2}" r="{}" fill="{}"/>"#, x, y, r, fill);
    }

    pub fn square(&mut self, z: Complex64, half: f64, fill: &str) {
        let (x, y) = self.px(z);
        let _ = writeln!(
            self.body,
            r#"<rect x="{:.2}" y="{:.2}" width="{}" height="{}" fill="{}"/>"#,
            x - half,
            y - half,
            2.0 * half,
            2.0 * half,
            fill
        );
    }

    pub fn triangle(&mut self, z: Complex64, r: f64, fill: &str) {
        let (x, y) = self.px(z);
        let _ = writeln!(
            self.body,
            r#"<polygon points="{:.2},{:.2} {:.2},{:.2} {:.2},{:.2}" fill="{}"/>"#,
            x,
            y - r,
            x - 0.866 * r,
            y + 0.5 * r,
            x + 0.866 * r,
            y + 0.5 * r,
            fill
        );
    }

    pub fn polyline(&mut self, pts: &[Complex64], stroke: &str, width: f64) {
        if pts.len() < 2 {
            return;
        }
        let mut s = String::new();
        for (i, z) in pts.iter().enumerate() {
            let (x, y) = self.px(*z);
            let _ = write!(s, "{}{:.2},{:.2}", if i == 0 { "" } else { " " }, x, y);
        }
        let _ = writeln!(self.body, r#"<polyline points="{}" fill="none" stroke="{}" stroke-width="{}"/>"#, s, stroke, width);
    }

    fn cell(&mut self, z: Complex64, hx: f64, hy: f64, fill: &str) {
        let (x0, y0) = self.px(z - Complex64::new(hx / 2.0, -hy / 2.0));
        let (x1, y1) = self.px(z + Complex64::new(hx / 2.0, -hy / 2.0));
        let _ = writeln!(
            self.body,
            r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{}"/>"#,
            x0,
            y0,
            x1 - x0,
            y1 - y0,
            fill
        );
    }

    pub fn finish(self) -> String {
        let (a, b) = self.px(Complex64::new(self.window.re_min, self.window.im_max));
        let (c, d) = self.px(Complex64::new(self.window.re_max, self.window.im_min));
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h:.0}\" viewBox=\"0 0 {w} {h:.0}\">\n\
             <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n{body}\
             <rect x=\"{a:.2}\" y=\"{b:.2}\" width=\"{cw:.2}\" height=\"{ch:.2}\" fill=\"none\" stroke=\"#888\"/>\n</svg>\n",
            w = self.width,
            h = self.height,
            body = self.body,
            cw = c - a,
            ch = d - b,
        )
    }
}

/// Bounding box of the points with a 10% margin on each side.
pub fn fit_window(points: &[Complex64]) -> Window {
    let finite: Vec<_> = points.iter().filter(|z| z.re.is_finite() && z.im.is_finite()).collect();
    if finite.is_empty() {
        return Window::square(1.0);
    }
    let (mut a, mut b, mut c, mut d) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for z in finite {
        a = a.min(z.re);
        b = b.max(z.re);
        c = c.min(z.im);
        d = d.max(z.im);
    }
    let span = (b - a).max(d - c).max(1e-3);
    let mx = 0.1 * (b - a).max(0.1 * span);
    let my = 0.1 * (d - c).max(0.1 * span);
    Window::new(a - mx, b + mx, c - my, d + my)
}

/// Descendant roots as small dots, roots of `P` as larger dots, the centre of mass as a
/// triangle and branch points as squares.
pub fn render_points(points: &[(Complex64, PointKind)], window: Option<Window>) -> String {
    let window = window.unwrap_or_else(|| fit_window(&points.iter().map(|p| p.0).collect::<Vec<_>>()));
    let mut c = Canvas::new(window);
    for kind in [PointKind::Descendant, PointKind::Branch, PointKind::Root, PointKind::Center] {
        for (z, _) in points.iter().filter(|p| p.1 == kind) {
            match kind {
                PointKind::Descendant => c.dot(*z, 1.5, "black"),
                PointKind::Branch => c.square(*z, 3.0, "#1f77b4"),
                PointKind::Root => c.dot(*z, 5.0, "#d62728"),
                PointKind::Center => c.triangle(*z, 7.0, "#2ca02c"),
            }
        }
    }
    c.finish()
}

fn color(t: f64) -> String {
    // blue -> white -> red
    let t = t.clamp(0.0, 1.0);
    let (r, g, b) = if t < 0.5 {
        let s = t / 0.5;
        (40.0 + 215.0 * s, 70.0 + 185.0 * s, 200.0 + 55.0 * s)
    } else {
        let s = (t - 0.5) / 0.5;
        (255.0, 255.0 - 185.0 * s, 255.0 - 215.0 * s)
    };
    format!("#{:02x}{:02x}{:02x}", r as u8, g as u8, b as u8)
}

fn finite_range(v: &[f64]) -> Option<(f64, f64)> {
    let mut it = v.iter().copied().filter(|x| x.is_finite());
    let first = it.next()?;
    Some(it.fold((first, first), |(a, b), x| (a.min(x), b.max(x))))
}

/// Marching-squares segments of `values` at `level` on an `nx` by `ny` grid of nodes `z`.
pub fn contour_segments(z: &[Complex64], values: &[f64], nx: usize, ny: usize, level: f64) -> Vec<[Complex64; 2]> {
    let mut out = Vec::new();
    let cross = |a: usize, b: usize| -> Option<Complex64> {
        let (va, vb) = (values[a] - level, values[b] - level);
        if !(va.is_finite() && vb.is_finite()) || (va < 0.0) == (vb < 0.0) {
            return None;
        }
        let t = va / (va - vb);
        Some(z[a] + (z[b] - z[a]) * t)
    };
    for iy in 0..ny.saturating_sub(1) {
        for ix in 0..nx.saturating_sub(1) {
            let k = iy * nx + ix;
            let (k10, k01, k11) = (k + 1, k + nx, k + nx + 1);
            let edges = [cross(k, k10), cross(k10, k11), cross(k11, k01), cross(k01, k)];
            let pts: Vec<Complex64> = edges.iter().flatten().copied().collect();
            match pts.len() {
                2 => out.push([pts[0], pts[1]]),
                4 => {
                    out.push([pts[0], pts[1]]);
                    out.push([pts[2], pts[3]]);
                }
                _ => {}
            }
        }
    }
    out
}

/// Heat map of the potential with twelve contour levels; flagged nodes are grey.
pub fn render_field(t: &FieldTable) -> String {
    let window = t.window();
    let (hx, hy) = window.steps(t.nx, t.ny);
    let mut c = Canvas::new(window);
    let range = finite_range(&t.potential);
    for k in 0..t.z.len() {
        let v = t.potential[k];
        let fill = match range {
            Some((lo, hi)) if v.is_finite() && t.flag[k] == "ok" => color(if hi > lo { (v - lo) / (hi - lo) } else { 0.5 }),
            _ => "#bbbbbb".to_string(),
        };
        c.cell(t.z[k], hx, hy, &fill);
    }
    if let Some((lo, hi)) = range {
        for i in 1..=12 {
            let level = lo + (hi - lo) * i as f64 / 13.0;
            for s in contour_segments(&t.z, &t.potential, t.nx, t.ny, level) {
                c.polyline(&s, "#333333", 0.6);
            }
        }
    }
    c.finish()
}

/// Support polylines with atoms drawn as dots of area proportional to their mass.
pub fn render_support(s: &SupportEstimate, window: Window) -> String {
    let mut c = Canvas::new(window);
    for line in &s.polylines {
        c.polyline(line, "black", 1.5);
    }
    for (z, m) in &s.point_masses {
        c.dot(*z, (3.0 + 20.0 * m.max(0.0).sqrt()).round(), "#d62728");
    }
    c.finish()
}
