// SPDX-License-Identifier: Apache-2.0
//! Deterministic SVG figures of paths, curves, rays and shaded regions.

use std::fmt::Write;

use crate::geometry::{Dir, GridPoint, PolyCurve, Region, Side, VRay, Window};
use crate::shield::{ShieldTrace, Workspace};
use crate::tam::{Tile, TileSystem};

/// Pixels per doubled-lattice unit.
const SCALE: i64 = 10;

#[derive(Debug, Clone, Default)]
pub struct Overlays {
    /// Curves with their CSS class.
    pub curves: Vec<(String, PolyCurve)>,
    pub rays: Vec<(String, VRay)>,
    /// Region bounded by a curve, shaded translucently.
    pub region: Option<(PolyCurve, Side)>,
}

impl Overlays {
    pub fn workspace(ws: &Workspace) -> Overlays {
        Overlays {
            curves: vec![("cut".into(), ws.cut.clone())],
            rays: Vec::new(),
            region: Some((ws.cut.clone(), ws.region.side)),
        }
    }

    /// Curves and rays recorded by the engine.
    pub fn trace(trace: &ShieldTrace) -> Overlays {
        let mut o = Overlays::default();
        let named = [("cut", &trace.cut), ("cm0", &trace.cm0), ("d", &trace.d)];
        for (name, c) in named {
            if let Some(c) = c {
                o.curves.push((name.into(), c.clone()));
            }
        }
        if !trace.r.is_empty() {
            o.curves.push(("r".into(), PolyCurve::finite(trace.r.iter().map(|p| p.center()).collect())));
        }
        for (name, r) in [("rho", &trace.rho), ("lm0", &trace.lm0)] {
            if let Some(r) = r {
                o.rays.push((name.into(), *r));
            }
        }
        o
    }
}

struct Canvas {
    w: Window,
}

impl Canvas {
    fn x(&self, x: i64) -> i64 {
        (x - self.w.xmin) * SCALE
    }

    fn y(&self, y: i64) -> i64 {
        (self.w.ymax - y) * SCALE
    }

    fn pt(&self, p: GridPoint) -> String {
        format!("{},{}", self.x(p.x), self.y(p.y))
    }

    /// Last point of the ray from `p` with step `d` inside the window.
    fn to_edge(&self, p: GridPoint, dx: i64, dy: i64) -> GridPoint {
        let mut q = p;
        if dx == 0 && dy == 0 {
            return q;
        }
        while self.w.contains(GridPoint::new(q.x + dx, q.y + dy)) {
            q = GridPoint::new(q.x + dx, q.y + dy);
        }
        q
    }

    fn curve_points(&self, c: &PolyCurve) -> Vec<GridPoint> {
        let mut pts = Vec::new();
        if let (true, Some(f)) = (c.south_ray, c.first()) {
            pts.push(self.to_edge(f, 0, -1));
        }
        pts.extend(c.vertices.iter().copied());
        if let (true, Some(l)) = (c.north_ray, c.last()) {
            pts.push(self.to_edge(l, 0, 1));
        }
        pts
    }
}

fn window_for(sys: &TileSystem, p: &[Tile], o: &Overlays) -> Window {
    let mut pts: Vec<GridPoint> = sys.seed().keys().chain(p.iter().map(|t| &t.pos)).map(|q| q.center()).collect();
    for (_, c) in &o.curves {
        pts.extend(c.vertices.iter().copied());
    }
    for (_, r) in &o.rays {
        pts.push(r.start);
    }
    Window::bounding(pts.iter()).unwrap_or(Window::new(0, 0, 0, 0)).grow(3)
}

fn shade(out: &mut String, cv: &Canvas, curve: &PolyCurve, side: Side) {
    let Ok(region) = Region::new(&curve.scaled(2), side) else {
        return;
    };
    let mut d = String::new();
    for y in cv.w.ymin..cv.w.ymax {
        let mut run: Option<i64> = None;
        for x in cv.w.xmin..=cv.w.xmax {
            let inside = x < cv.w.xmax && region.contains_strictly(GridPoint::new(2 * x + 1, 2 * y + 1));
            match (inside, run) {
                (true, None) => run = Some(x),
                (false, Some(x0)) => {
                    let _ = write!(d, "M{},{}h{}v{}h{}z", cv.x(x0), cv.y(y + 1), (x - x0) * SCALE, SCALE, -(x - x0) * SCALE);
                    run = None;
                }
                _ => {}
            }
        }
    }
    let _ = writeln!(out, r#"<path class="region" d="{d}"/>"#);
}

pub fn render_svg(sys: &TileSystem, p: &[Tile], overlays: &Overlays) -> String {
    let cv = Canvas { w: window_for(sys, p, overlays) };
    let (w, h) = (cv.w.width() * SCALE, cv.w.height() * SCALE);
    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    );
    let _ = writeln!(
        out,
        "<style>.tile{{stroke:#000;stroke-width:1}}.seed{{fill:#bbb}}.path{{fill:#fff;fill-opacity:0.7}}.glue{{stroke:#000;stroke-width:2}}\
         .trail{{fill:none;stroke:#36c;stroke-width:1.5}}.curve{{fill:none;stroke:#c33;stroke-width:1.5}}\
         .cm0{{stroke:#e80}}.d{{stroke:#84c}}.r{{stroke:#963;stroke-width:3;stroke-opacity:0.6}}\
         .ray{{stroke:#393;stroke-width:1.5;stroke-dasharray:4 2}}.lm0{{stroke:#36c}}.region{{fill:#c33;fill-opacity:0.2;stroke:none}}\
         text{{font:8px sans-serif;text-anchor:middle;dominant-baseline:central}}</style>"
    );
    if let Some((c, side)) = &overlays.region {
        shade(&mut out, &cv, c, *side);
    }
    let tiles = sys.seed().iter().map(|(&q, &ty)| (Tile::new(q, ty), "seed")).chain(p.iter().map(|&t| (t, "path")));
    for (t, class) in tiles {
        let c = t.pos.center();
        let _ = writeln!(
            out,
            r#"<rect class="tile {class}" x="{}" y="{}" width="{}" height="{}"/>"#,
            cv.x(c.x - 1),
            cv.y(c.y + 1),
            2 * SCALE,
            2 * SCALE
        );
        for d in Dir::ALL {
            if sys.tile(t.ty).glue(d).is_some() {
                let u = d.unit();
                let a = GridPoint::new(c.x * SCALE + u.dx * SCALE, c.y * SCALE + u.dy * SCALE);
                let b = GridPoint::new(a.x - u.dx * SCALE / 3, a.y - u.dy * SCALE / 3);
                let sx = |x: i64| x - cv.w.xmin * SCALE;
                let sy = |y: i64| cv.w.ymax * SCALE - y;
                let _ = writeln!(out, r#"<line class="glue" x1="{}" y1="{}" x2="{}" y2="{}"/>"#, sx(a.x), sy(a.y), sx(b.x), sy(b.y));
            }
        }
        let _ = writeln!(out, r#"<text x="{}" y="{}">{}</text>"#, cv.x(c.x), cv.y(c.y), escape(sys.name(t.ty)));
    }
    if p.len() > 1 {
        let pts: Vec<String> = p.iter().map(|t| cv.pt(t.pos.center())).collect();
        let _ = writeln!(out, r#"<polyline class="trail" points="{}"/>"#, pts.join(" "));
    }
    for (name, c) in &overlays.curves {
        let pts: Vec<String> = cv.curve_points(c).into_iter().map(|q| cv.pt(q)).collect();
        let _ = writeln!(out, r#"<polyline class="curve {}" points="{}"/>"#, escape(name), pts.join(" "));
    }
    for (name, r) in &overlays.rays {
        let s = r.step();
        let end = cv.to_edge(r.start, s.dx, s.dy);
        let _ = writeln!(
            out,
            r#"<line class="ray {}" x1="{}" y1="{}" x2="{}" y2="{}"/>"#,
            escape(name),
            cv.x(r.start.x),
            cv.y(r.start.y),
            cv.x(end.x),
            cv.y(end.y)
        );
    }
    out.push_str("</svg>\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}
