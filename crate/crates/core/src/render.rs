//! Static SVG rendering of a trace: one panel per configuration.

use std::fmt::Write;

use crate::gather2d::{gathering_point, phase_and_measure, target};
use crate::geometry::sec;
use crate::model::{spectrum_of, Configuration, Trace};
use crate::scalar::Scalar;

const PANEL: f64 = 240.0;
const MARGIN: f64 = 24.0;
const COLUMNS: usize = 4;

struct View {
    cx: f64,
    cy: f64,
    scale: f64,
}

impl View {
    /// Fits every robot and every SEC of the trace, with the y axis up.
    fn fit<S: Scalar>(confs: &[&Configuration<S>]) -> View {
        let (mut x0, mut y0, mut x1, mut y1) = (
            f64::INFINITY,
            f64::INFINITY,
            f64::NEG_INFINITY,
            f64::NEG_INFINITY,
        );
        for conf in confs {
            let support = spectrum_of(conf).support();
            let c = sec(&support);
            let r = c.radius_sq.to_f64().max(0.0).sqrt();
            let (cx, cy) = (c.center.x.to_f64(), c.center.y.to_f64());
            x0 = x0.min(cx - r);
            x1 = x1.max(cx + r);
            y0 = y0.min(cy - r);
            y1 = y1.max(cy + r);
        }
        let span = (x1 - x0).max(y1 - y0);
        let span = if span.is_finite() && span > 0.0 {
            span
        } else {
            2.0
        };
        View {
            cx: (x0 + x1) / 2.0,
            cy: (y0 + y1) / 2.0,
            scale: (PANEL - 2.0 * MARGIN) / span,
        }
    }

    fn map(&self, x: f64, y: f64) -> (f64, f64) {
        (
            PANEL / 2.0 + (x - self.cx) * self.scale,
            PANEL / 2.0 - (y - self.cy) * self.scale,
        )
    }
}

fn panel<S: Scalar>(
    out: &mut String,
    view: &View,
    conf: &Configuration<S>,
    round: usize,
    ox: f64,
    oy: f64,
) {
    let spectrum = spectrum_of(conf);
    let support = spectrum.support();
    let _ = writeln!(out, r#"<g transform="translate({ox},{oy})">"#);
    let _ = writeln!(
        out,
        r##"<rect width="{PANEL}" height="{PANEL}" fill="white" stroke="#bbb"/>"##
    );

    let circle = sec(&support);
    let (cx, cy) = view.map(circle.center.x.to_f64(), circle.center.y.to_f64());
    let r = circle.radius_sq.to_f64().max(0.0).sqrt() * view.scale;
    if r > 0.0 {
        let _ = writeln!(
            out,
            r##"<circle class="sec" cx="{cx:.2}" cy="{cy:.2}" r="{r:.2}" fill="none" stroke="#4a7ab5" stroke-dasharray="4 3"/>"##
        );
    }

    let label = match phase_and_measure(conf) {
        Ok((phase, m)) => format!("round {round}: {phase} {m}"),
        Err(e) => format!("round {round}: {e}"),
    };
    let _ = writeln!(
        out,
        r#"<text x="6" y="14" font-family="monospace" font-size="11">{label}</text>"#
    );

    if gathering_point(conf).is_none() {
        if let Ok(t) = target(&spectrum) {
            let (tx, ty) = view.map(t.x.to_f64(), t.y.to_f64());
            let _ = writeln!(
                out,
                r##"<path class="target" d="M{:.2} {:.2}L{:.2} {:.2}M{:.2} {:.2}L{:.2} {:.2}" stroke="#c0392b" stroke-width="2"/>"##,
                tx - 5.0,
                ty - 5.0,
                tx + 5.0,
                ty + 5.0,
                tx - 5.0,
                ty + 5.0,
                tx + 5.0,
                ty - 5.0
            );
        }
    }

    for (p, count) in spectrum.iter() {
        let (px, py) = view.map(p.x.to_f64(), p.y.to_f64());
        let _ = writeln!(
            out,
            r#"<circle class="robot" cx="{px:.2}" cy="{py:.2}" r="4" fill="black"/>"#
        );
        if count > 1 {
            let _ = writeln!(
                out,
                r#"<text class="mult" x="{:.2}" y="{:.2}" font-family="monospace" font-size="10">{count}</text>"#,
                px + 6.0,
                py - 6.0
            );
        }
    }
    out.push_str("</g>\n");
}

/// One SVG document holding a panel per configuration of `trace`, laid out
/// in rows of four: robots with tower heights, the SEC, the target marker
/// and the phase with its measure.
pub fn render_svg<S: Scalar>(trace: &Trace<S>) -> String {
    let confs: Vec<&Configuration<S>> = trace.configurations().collect();
    let view = View::fit(&confs);
    let cols = confs.len().clamp(1, COLUMNS);
    let rows = confs.len().div_ceil(COLUMNS).max(1);
    let (w, h) = (cols as f64 * PANEL, rows as f64 * PANEL);
    let mut out = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n"
    );
    for (i, conf) in confs.iter().enumerate() {
        let ox = (i % COLUMNS) as f64 * PANEL;
        let oy = (i / COLUMNS) as f64 * PANEL;
        panel(&mut out, &view, conf, i, ox, oy);
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point;
    use crate::scalar::Rational;

    fn single(points: &[(i64, i64)]) -> Trace<Rational> {
        let conf = Configuration::new(
            points
                .iter()
                .map(|&(x, y)| Point::from_ints(x, y))
                .collect(),
        )
        .unwrap();
        Trace {
            initial: conf,
            steps: Vec::new(),
            stopped_early: false,
        }
    }

    #[test]
    fn gathered_trace_is_one_labeled_point() {
        let svg = render_svg(&single(&[(2, 2), (2, 2), (2, 2)]));
        assert_eq!(svg.matches("<g ").count(), 1);
        assert_eq!(svg.matches(r#"class="robot""#).count(), 1);
        assert!(svg.contains(">3</text>"));
        assert!(!svg.contains(r#"class="target""#));
        assert!(svg.contains("Gathered"));
    }

    #[test]
    fn diameter_panel_has_centre_target() {
        let svg = render_svg(&single(&[(0, 0), (0, 0), (4, 0), (4, 0), (1, 1)]));
        assert!(svg.contains("Dd"));
        assert_eq!(svg.matches(r#"class="robot""#).count(), 3);
        assert_eq!(svg.matches(r#"class="sec""#).count(), 1);
        // Both towers sit on the horizontal diameter; the centre lies midway.
        assert!(svg.contains(r#"cx="24.00" cy="120.00""#));
        assert!(svg.contains(r#"cx="216.00" cy="120.00""#));
        assert!(svg.contains("M115.00 115.00L125.00 125.00"));
    }

    #[test]
    fn triangle_panel_draws_its_circumcircle() {
        let svg = render_svg(&single(&[(0, 0), (6, 0), (2, 5)]));
        assert!(svg.contains("Sc"));
        assert_eq!(svg.matches(r#"class="sec""#).count(), 1);
        assert!(svg.contains(r#"r="96.00""#));
    }
}
