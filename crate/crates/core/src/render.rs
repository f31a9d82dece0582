//! SVG drawings of solved systems.
//!
//! The y-axis points up. Germs are dots, segments are strokes with classes
//! `segment`, plus `infinite`, `cycle` or `doublet` where they apply.
//! Infinite segments are always cut at the view rectangle.

use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::solver::Solution;
use crate::structure::StructureReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Highlight {
    Cycles,
    Doublets,
    #[default]
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RenderOptions {
    pub highlight: Highlight,
    /// Clip every stroke to the sampling window (when the realization has one).
    pub clip: bool,
    /// Pixels per length unit.
    pub scale: Option<f64>,
}

const STROKE: f64 = 0.08;
const DOT: f64 = 0.12;
const PAD: f64 = 1.0;

pub fn render_svg(solution: &Solution<f64>, structure: Option<&StructureReport>, opts: &RenderOptions) -> String {
    let pts = solution.set.points();
    let r = solution.radii.as_slice();
    let window = solution.set.window();

    let (x0, y0, x1, y1) = match (window, opts.clip) {
        (Some(w), true) => w.bbox(),
        _ => {
            let mut b = window.map(|w| w.bbox()).unwrap_or((
                f64::INFINITY,
                f64::INFINITY,
                f64::NEG_INFINITY,
                f64::NEG_INFINITY,
            ));
            for (p, &ri) in pts.iter().zip(r) {
                let reach = if ri.is_finite() { ri } else { 0.0 };
                let g = p.germ();
                let d = p.direction();
                for s in [-1.0, 1.0] {
                    let (x, y) = (g.x + s * reach * d.x, g.y + s * reach * d.y);
                    b = (b.0.min(x), b.1.min(y), b.2.max(x), b.3.max(y));
                }
            }
            if b.0 > b.2 {
                (0.0, 0.0, 1.0, 1.0)
            } else {
                (b.0 - PAD, b.1 - PAD, b.2 + PAD, b.3 + PAD)
            }
        }
    };
    let scale = opts.scale.unwrap_or(20.0);
    let (w, h) = (x1 - x0, y1 - y0);
    let flip = |y: f64| y0 + y1 - y;

    let mut on_cycle = vec![false; pts.len()];
    let mut in_doublet = vec![false; pts.len()];
    if let Some(s) = structure {
        for c in &s.cycles {
            for &i in c {
                on_cycle[i] = true;
            }
        }
        for &(a, b) in &s.doublets {
            in_doublet[a] = true;
            in_doublet[b] = true;
        }
    }

    let mut out = String::new();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{:.0}" height="{:.0}" viewBox="{} {} {} {}">"#,
        (w * scale).ceil(),
        (h * scale).ceil(),
        num(x0),
        num(y0),
        num(w),
        num(h)
    )
    .unwrap();
    writeln!(
        out,
        "<style>.segment{{stroke:#1f4e79;stroke-width:{STROKE};stroke-linecap:round}}.infinite{{stroke:#888;stroke-dasharray:0.3 0.2}}.cycle{{stroke:#c0392b}}.doublet{{stroke:#27ae60}}.germ{{fill:#000}}</style>"
    )
    .unwrap();
    writeln!(
        out,
        r##"<rect class="frame" x="{}" y="{}" width="{}" height="{}" fill="none" stroke="#ccc" stroke-width="{}"/>"##,
        num(x0),
        num(y0),
        num(w),
        num(h),
        STROKE / 2.0
    )
    .unwrap();
    if opts.clip && window.is_some() {
        writeln!(
            out,
            r#"<clipPath id="window"><rect x="{}" y="{}" width="{}" height="{}"/></clipPath>"#,
            num(x0),
            num(y0),
            num(w),
            num(h)
        )
        .unwrap();
        out.push_str("<g clip-path=\"url(#window)\">\n");
    } else {
        out.push_str("<g>\n");
    }

    for (i, (p, &ri)) in pts.iter().zip(r).enumerate() {
        let g = p.germ();
        let d = p.direction();
        let ends = if ri.is_finite() {
            Some(((g.x - ri * d.x, g.y - ri * d.y), (g.x + ri * d.x, g.y + ri * d.y)))
        } else {
            clip_line((g.x, g.y), (d.x, d.y), (x0, y0, x1, y1))
        };
        let Some(((ax, ay), (bx, by))) = ends else {
            continue;
        };
        let mut class = String::from("segment");
        if ri.is_infinite() {
            class.push_str(" infinite");
        }
        match opts.highlight {
            Highlight::Cycles if on_cycle[i] => class.push_str(" cycle"),
            Highlight::Doublets if in_doublet[i] => class.push_str(" doublet"),
            _ => {}
        }
        writeln!(
            out,
            r#"<line class="{class}" data-index="{i}" x1="{}" y1="{}" x2="{}" y2="{}"/>"#,
            num(ax),
            num(flip(ay)),
            num(bx),
            num(flip(by))
        )
        .unwrap();
    }
    out.push_str("</g>\n");
    for (i, p) in pts.iter().enumerate() {
        let g = p.germ();
        writeln!(
            out,
            r#"<circle class="germ" data-index="{i}" cx="{}" cy="{}" r="{DOT}"/>"#,
            num(g.x),
            num(flip(g.y))
        )
        .unwrap();
    }
    out.push_str("</svg>\n");
    out
}

fn num(v: f64) -> String {
    let s = format!("{v:.4}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

/// The part of the line `p + t·d` inside the rectangle, if any.
fn clip_line(p: (f64, f64), d: (f64, f64), rect: (f64, f64, f64, f64)) -> Option<((f64, f64), (f64, f64))> {
    let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
    for (pc, dc, min, max) in [(p.0, d.0, rect.0, rect.2), (p.1, d.1, rect.1, rect.3)] {
        if dc == 0.0 {
            if pc < min || pc > max {
                return None;
            }
        } else {
            let (a, b) = ((min - pc) / dc, (max - pc) / dc);
            lo = lo.max(a.min(b));
            hi = hi.min(a.max(b));
        }
    }
    (lo <= hi).then_some(((p.0 + lo * d.0, p.1 + lo * d.1), (p.0 + hi * d.0, p.1 + hi * d.1)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_clipping() {
        let (a, b) = clip_line((0.0, 0.0), (0.0, 1.0), (-1.0, -2.0, 1.0, 3.0)).unwrap();
        assert_eq!((a, b), ((0.0, -2.0), (0.0, 3.0)));
        assert!(clip_line((5.0, 0.0), (0.0, 1.0), (-1.0, -2.0, 1.0, 3.0)).is_none());
    }

    #[test]
    fn number_format() {
        assert_eq!(num(2.0), "2");
        assert_eq!(num(-0.00001), "0");
        assert_eq!(num(1.23456), "1.2346");
    }
}
