//! DOT output for quivers and SVG output for polygon triangulations.

use std::fmt::Write;

use crate::cluster::{Quiver, Seed};
use crate::polygon::Triangulation;

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Mutable vertices are circles, frozen ones boxes; multiple arrows carry a count.
pub fn quiver_dot(q: &Quiver, labels: &[String]) -> String {
    let mut out = String::from("digraph quiver {\n  rankdir=LR;\n");
    for v in 0..q.size() {
        let shape = if q.is_frozen(v) { "box" } else { "circle" };
        let label = labels.get(v).cloned().unwrap_or_else(|| (v + 1).to_string());
        writeln!(out, "  v{} [shape={shape}, label=\"{}\"];", v + 1, escape(&label)).unwrap();
    }
    for (i, j, m) in q.arrows() {
        if m == 1 {
            writeln!(out, "  v{} -> v{};", i + 1, j + 1).unwrap();
        } else {
            writeln!(out, "  v{} -> v{} [label=\"{m}\"];", i + 1, j + 1).unwrap();
        }
    }
    out.push_str("}\n");
    out
}

pub fn seed_dot(seed: &Seed) -> String {
    let labels: Vec<String> = seed.variables.iter().map(|v| v.to_string()).collect();
    quiver_dot(&seed.quiver, &labels)
}

/// A regular polygon with vertex 1 at the top, numbered clockwise. The side
/// (n−1, n) is drawn dashed when `frozen_side` is set.
pub fn triangulation_svg(t: &Triangulation, frozen_side: bool) -> String {
    let n = t.n();
    let (size, r) = (240.0_f64, 100.0_f64);
    let c = size / 2.0;
    let pt = |v: usize, rad: f64| {
        let a = std::f64::consts::TAU * (v as f64 - 1.0) / n as f64;
        (c + rad * a.sin(), c - rad * a.cos())
    };
    let mut out = String::new();
    writeln!(out, "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{size}\" height=\"{size}\" viewBox=\"0 0 {size} {size}\">").unwrap();
    let line = |out: &mut String, a: usize, b: usize, style: &str| {
        let ((x1, y1), (x2, y2)) = (pt(a, r), pt(b, r));
        writeln!(out, "  <line x1=\"{x1:.2}\" y1=\"{y1:.2}\" x2=\"{x2:.2}\" y2=\"{y2:.2}\" {style}/>").unwrap();
    };
    for v in 1..=n {
        let w = v % n + 1;
        let dashed = frozen_side && n >= 3 && ((v, w) == (n - 1, n));
        let style = if dashed { "stroke=\"black\" stroke-dasharray=\"4 3\"" } else { "stroke=\"black\"" };
        line(&mut out, v, w, style);
    }
    for (a, b) in t.diagonals() {
        line(&mut out, a, b, "stroke=\"steelblue\" stroke-width=\"2\"");
    }
    for v in 1..=n {
        let (x, y) = pt(v, r + 14.0);
        writeln!(out, "  <text x=\"{x:.2}\" y=\"{y:.2}\" font-size=\"12\" text-anchor=\"middle\" dominant-baseline=\"middle\">{v}</text>").unwrap();
    }
    out.push_str("</svg>\n");
    out
}
