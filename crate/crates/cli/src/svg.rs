//! Two-person plots of a problem and its choice set.

use std::fmt::Write;

use relfair_core::rules::Solved;
use relfair_core::{Error, Point, Rat, Result};

/// Pixels per utility unit before the viewBox scales the drawing.
const UNIT: f64 = 100.0;
const BOX_FILL: &str = "#d0d0d0";
const BOX_STROKE: &str = "#808080";
const CHOICE: &str = "#d62728";
const KS: &str = "#1f77b4";

/// Fixed three-decimal formatting with trailing zeros dropped, so output
/// bytes depend only on the inputs.
fn num(v: f64) -> String {
    let s = format!("{:.3}", v);
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".into() } else { s.into() }
}

struct Frame {
    top: f64,
}

impl Frame {
    fn x(&self, v: &Rat) -> String {
        num(v.to_f64() * UNIT)
    }

    fn y(&self, v: &Rat) -> String {
        num((self.top - v.to_f64()) * UNIT)
    }
}

/// Renders generator boxes (gray), the ideal point, the choice-set pieces
/// and witnesses (red) and the KS point (blue).
pub fn render(s: &Solved<'_>) -> Result<String> {
    let n = s.problem.n();
    if n != 2 {
        return Err(Error::DimensionMismatch { expected: 2, got: n });
    }
    let b = &s.ideal;
    let (bx, by) = (b[0].to_f64(), b[1].to_f64());
    let f = Frame { top: by };
    let (w, h) = (bx * 1.2 * UNIT, by * 1.2 * UNIT);
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{} {} {} {}" width="{}" height="{}">"#,
        num(-bx * 0.1 * UNIT),
        num(-by * 0.1 * UNIT),
        num(w),
        num(h),
        num(w),
        num(h)
    );
    let _ = writeln!(out, "<title>{} on {}</title>", s.rule, s.problem);
    let stroke = num(by.max(bx) * 0.006 * UNIT);
    let radius = num(by.max(bx) * 0.02 * UNIT);
    let zero = Rat::zero();
    let _ = writeln!(out, r#"<g id="boxes" fill="{BOX_FILL}" fill-opacity="0.6" stroke="{BOX_STROKE}" stroke-width="{stroke}">"#);
    for g in s.problem.generators() {
        let _ = writeln!(
            out,
            r#"<rect x="0" y="{}" width="{}" height="{}"/>"#,
            f.y(&g[1]),
            f.x(&g[0]),
            num(g[1].to_f64() * UNIT)
        );
    }
    let _ = writeln!(out, "</g>");
    let _ = writeln!(
        out,
        r#"<g id="axes" stroke="black" stroke-width="{stroke}"><line x1="0" y1="{}" x2="{}" y2="{}"/><line x1="0" y1="{}" x2="0" y2="{}"/></g>"#,
        f.y(&zero),
        num(bx * 1.05 * UNIT),
        f.y(&zero),
        f.y(&zero),
        num(-by * 0.05 * UNIT)
    );
    let _ = writeln!(
        out,
        r#"<circle id="ideal" cx="{}" cy="{}" r="{radius}" fill="none" stroke="black" stroke-width="{stroke}"><title>b(X) = {}</title></circle>"#,
        f.x(&b[0]),
        f.y(&b[1]),
        b
    );
    let _ = writeln!(out, r#"<g id="choice" fill="{CHOICE}" stroke="{CHOICE}">"#);
    for vs in s.piece_vertices() {
        match vs.len() {
            0 => {}
            1 => {
                let _ = writeln!(out, r#"<circle cx="{}" cy="{}" r="{radius}"/>"#, f.x(&vs[0][0]), f.y(&vs[0][1]));
            }
            2 => {
                let _ = writeln!(
                    out,
                    r#"<line class="piece" x1="{}" y1="{}" x2="{}" y2="{}" stroke-width="{}" stroke-opacity="0.7" stroke-linecap="round"/>"#,
                    f.x(&vs[0][0]),
                    f.y(&vs[0][1]),
                    f.x(&vs[1][0]),
                    f.y(&vs[1][1]),
                    num(by.max(bx) * 0.025 * UNIT)
                );
            }
            _ => {
                let pts = polygon_order(vs).iter().map(|p| format!("{},{}", f.x(&p[0]), f.y(&p[1]))).collect::<Vec<_>>().join(" ");
                let _ = writeln!(out, r#"<polygon points="{pts}" fill-opacity="0.5" stroke-width="{stroke}"/>"#);
            }
        }
    }
    for p in &s.choice.witnesses {
        let _ = writeln!(out, r#"<circle cx="{}" cy="{}" r="{radius}"><title>witness {p}</title></circle>"#, f.x(&p[0]), f.y(&p[1]));
    }
    let _ = writeln!(out, "</g>");
    let k = s.ks_point();
    let _ = writeln!(
        out,
        r#"<circle id="ks" cx="{}" cy="{}" r="{}" fill="{KS}"><title>KS point {k}</title></circle>"#,
        f.x(&k[0]),
        f.y(&k[1]),
        num(by.max(bx) * 0.012 * UNIT)
    );
    out.push_str("</svg>\n");
    Ok(out)
}

/// Vertices of a convex polygon ordered by angle around their centroid.
fn polygon_order(vs: &[Point]) -> Vec<Point> {
    let c: (f64, f64) = vs.iter().fold((0.0, 0.0), |a, p| (a.0 + p[0].to_f64(), a.1 + p[1].to_f64()));
    let c = (c.0 / vs.len() as f64, c.1 / vs.len() as f64);
    let mut out = vs.to_vec();
    out.sort_by(|p, q| {
        let ap = (p[1].to_f64() - c.1).atan2(p[0].to_f64() - c.0);
        let aq = (q[1].to_f64() - c.1).atan2(q[0].to_f64() - c.0);
        ap.total_cmp(&aq)
    });
    out
}
