//! SVG rendering of point sets and arcs on the unit circle.

use std::f64::consts::PI;
use std::fmt::Write as _;

use cmv_core::{Arc, Complex64};

pub const PANEL: f64 = 600.0;
const CENTER: f64 = 300.0;
const RADIUS: f64 = 250.0;
const DOT: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mark {
    Filled,
    Hollow,
}

/// One panel: a label, marked points and highlighted arcs.
#[derive(Debug, Clone, Default)]
pub struct Panel {
    pub label: String,
    pub points: Vec<(Complex64, Mark)>,
    pub arcs: Vec<Arc>,
}

fn num(x: f64) -> String {
    let s = format!("{x:.4}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".into() } else { s.into() }
}

/// Screen coordinates of `z` inside a panel.
pub fn to_screen(z: Complex64) -> (f64, f64) {
    (CENTER + RADIUS * z.re, CENTER - RADIUS * z.im)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Renders panels on a near-square grid. Returns `None` for empty input.
pub fn render(panels: &[Panel]) -> Option<String> {
    if panels.is_empty() || panels.iter().all(|p| p.points.is_empty() && p.arcs.is_empty()) {
        return None;
    }
    let cols = (panels.len() as f64).sqrt().ceil() as usize;
    let rows = panels.len().div_ceil(cols);
    let (width, height) = (PANEL * cols as f64, PANEL * rows as f64);
    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{}" height="{}" viewBox="0 0 {} {}">"#,
        num(width),
        num(height),
        num(width),
        num(height)
    );
    for (k, p) in panels.iter().enumerate() {
        let (x0, y0) = (PANEL * (k % cols) as f64, PANEL * (k / cols) as f64);
        let _ = writeln!(s, r#"<g transform="translate({},{})">"#, num(x0), num(y0));
        let _ = writeln!(
            s,
            r#"<circle cx="{c}" cy="{c}" r="{r}" fill="none" stroke="black" stroke-width="1"/>"#,
            c = num(CENTER),
            r = num(RADIUS)
        );
        for a in &p.arcs {
            let _ = writeln!(s, "{}", arc_element(a));
        }
        for (z, mark) in &p.points {
            let (x, y) = to_screen(*z);
            let fill = match mark {
                Mark::Filled => r#"fill="black""#,
                Mark::Hollow => r#"fill="none" stroke="gray" stroke-width="0.8""#,
            };
            let _ = writeln!(s, r#"<circle cx="{}" cy="{}" r="{}" {fill}/>"#, num(x), num(y), num(DOT));
        }
        if !p.label.is_empty() {
            let _ = writeln!(s, r#"<text x="20" y="30" font-family="sans-serif" font-size="18">{}</text>"#, escape(&p.label));
        }
        s.push_str("</g>\n");
    }
    s.push_str("</svg>\n");
    Some(s)
}

fn arc_element(a: &Arc) -> String {
    const STYLE: &str = r#"fill="none" stroke="red" stroke-width="4" stroke-opacity="0.5""#;
    if a.is_full() {
        return format!(r#"<circle cx="{c}" cy="{c}" r="{r}" {STYLE}/>"#, c = num(CENTER), r = num(RADIUS));
    }
    let mid = a.center.arg();
    let (t0, t1) = (mid - a.half_width, mid + a.half_width);
    let (x0, y0) = to_screen(Complex64::from_polar(1.0, t0));
    let (x1, y1) = to_screen(Complex64::from_polar(1.0, t1));
    let large = u8::from(2.0 * a.half_width > PI);
    // Counterclockwise in the plane is sweep-flag 0 once the y axis points down.
    format!(
        r#"<path d="M {} {} A {r} {r} 0 {large} 0 {} {}" {STYLE}/>"#,
        num(x0),
        num(y0),
        num(x1),
        num(y1),
        r = num(RADIUS)
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one(z: Complex64) -> String {
        render(&[Panel { label: String::new(), points: vec![(z, Mark::Filled)], arcs: vec![] }]).unwrap()
    }

    #[test]
    fn coordinate_map() {
        assert!(one(Complex64::new(1.0, 0.0)).contains(r#"<circle cx="550" cy="300" r="2" fill="black"/>"#));
        assert!(one(Complex64::new(0.0, 1.0)).contains(r#"<circle cx="300" cy="50" r="2" fill="black"/>"#));
    }

    #[test]
    fn single_panel_canvas() {
        let s = one(Complex64::new(-1.0, 0.0));
        assert!(s.contains(r#"width="600" height="600""#));
        assert!(s.contains(r#"<circle cx="300" cy="300" r="250" fill="none" stroke="black""#));
    }

    #[test]
    fn grid_of_panels() {
        let p = Panel { label: "n = 5".into(), points: vec![(Complex64::new(1.0, 0.0), Mark::Hollow)], arcs: vec![] };
        let s = render(&vec![p; 5]).unwrap();
        assert!(s.contains(r#"width="1800" height="1200""#));
        assert_eq!(s.matches("<text").count(), 5);
    }

    #[test]
    fn empty_is_rejected() {
        assert!(render(&[]).is_none());
        assert!(render(&[Panel::default()]).is_none());
    }
}
