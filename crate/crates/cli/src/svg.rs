//! Trajectory plots as standalone SVG 1.1.

use std::fmt::Write as _;

use stark_cap::cap::{ResonanceEstimate, Trajectory, Window};
use stark_cap::Complex64;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 600.0;
const MARGIN: f64 = 50.0;

struct Frame {
    re: (f64, f64),
    im: (f64, f64),
}

impl Frame {
    /// The window plus a tenth of its size on every side.
    fn around(w: &Window) -> Self {
        let dx = 0.1 * (w.re_max - w.re_min);
        let dy = 0.1 * (w.im_max - w.im_min);
        Self {
            re: (w.re_min - dx, w.re_max + dx),
            im: (w.im_min - dy, w.im_max + dy),
        }
    }

    fn x(&self, re: f64) -> f64 {
        MARGIN + (re - self.re.0) / (self.re.1 - self.re.0) * (WIDTH - 2.0 * MARGIN)
    }

    fn y(&self, im: f64) -> f64 {
        HEIGHT - MARGIN - (im - self.im.0) / (self.im.1 - self.im.0) * (HEIGHT - 2.0 * MARGIN)
    }

    fn point(&self, z: Complex64) -> (f64, f64) {
        (self.x(z.re), self.y(z.im))
    }
}

/// Evenly spread hues, fixed per id.
fn colour(id: usize) -> String {
    let hue = (id as f64 * 137.507_764) % 360.0;
    format!("hsl({hue:.1},70%,40%)")
}

pub fn trajectory_plot(
    window: &Window,
    trajectories: &[Trajectory],
    estimates: &[ResonanceEstimate],
    hash: &str,
) -> String {
    let f = Frame::around(window);
    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(s, "<!-- config_sha256={hash} -->");
    let _ = writeln!(
        s,
        "<title>eigenvalue trajectories, config {}</title>",
        &hash[..hash.len().min(12)]
    );
    let (x0, y0, x1, y1) = (f.x(f.re.0), f.y(f.im.1), f.x(f.re.1), f.y(f.im.0));
    let _ = writeln!(
        s,
        r#"<defs><clipPath id="plot"><rect x="{x0:.2}" y="{y0:.2}" width="{:.2}" height="{:.2}"/></clipPath></defs>"#,
        x1 - x0,
        y1 - y0
    );
    let _ = writeln!(
        s,
        r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );

    let _ = writeln!(
        s,
        r#"<g id="axes" stroke="gray" stroke-width="1" clip-path="url(#plot)">"#
    );
    if f.re.0 < 0.0 && f.re.1 > 0.0 {
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{y0:.2}" x2="{:.2}" y2="{y1:.2}"/>"#,
            f.x(0.0),
            f.x(0.0)
        );
    }
    if f.im.0 < 0.0 && f.im.1 > 0.0 {
        let _ = writeln!(
            s,
            r#"<line x1="{x0:.2}" y1="{:.2}" x2="{x1:.2}" y2="{:.2}"/>"#,
            f.y(0.0),
            f.y(0.0)
        );
    }
    // the ray arg z = -π/4 carries the absorbing model spectra
    let far = 2.0 * (f.re.1 - f.re.0).abs().max((f.im.1 - f.im.0).abs()) + f.re.1.abs() + f.im.0.abs();
    let _ = writeln!(
        s,
        r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke-dasharray="4 4"/>"#,
        f.x(0.0),
        f.y(0.0),
        f.x(far),
        f.y(-far)
    );
    let _ = writeln!(s, "</g>");

    let _ = writeln!(
        s,
        r#"<rect id="window" x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="black" stroke-width="1.5"/>"#,
        f.x(window.re_min),
        f.y(window.im_max),
        f.x(window.re_max) - f.x(window.re_min),
        f.y(window.im_min) - f.y(window.im_max)
    );
    let labels = [
        (
            f.x(window.re_min),
            HEIGHT - MARGIN + 20.0,
            format!("{}", window.re_min),
            "start",
        ),
        (
            f.x(window.re_max),
            HEIGHT - MARGIN + 20.0,
            format!("{}", window.re_max),
            "end",
        ),
        (MARGIN - 6.0, f.y(window.im_min), format!("{}i", window.im_min), "end"),
        (MARGIN - 6.0, f.y(window.im_max), format!("{}i", window.im_max), "end"),
    ];
    let _ = writeln!(s, r#"<g id="labels" font-family="sans-serif" font-size="12">"#);
    for (x, y, text, anchor) in labels {
        let _ = writeln!(s, r#"<text x="{x:.2}" y="{y:.2}" text-anchor="{anchor}">{text}</text>"#);
    }
    let _ = writeln!(s, "</g>");

    for t in trajectories {
        let c = colour(t.id);
        let _ = writeln!(
            s,
            r#"<g id="trajectory-{}" class="{:?}" stroke="{c}" fill="{c}" clip-path="url(#plot)">"#,
            t.id, t.status
        );
        let pts: Vec<String> = t
            .points
            .iter()
            .map(|p| {
                let (x, y) = f.point(p.lambda);
                format!("{x:.2},{y:.2}")
            })
            .collect();
        if pts.len() > 1 {
            let _ = writeln!(
                s,
                r#"<polyline points="{}" fill="none" stroke-width="1"/>"#,
                pts.join(" ")
            );
        }
        for p in &t.points {
            let (x, y) = f.point(p.lambda);
            let _ = writeln!(s, r#"<circle cx="{x:.2}" cy="{y:.2}" r="2"/>"#);
        }
        let _ = writeln!(s, "</g>");
    }

    let _ = writeln!(s, r#"<g id="estimates" stroke="black" stroke-width="2">"#);
    for e in estimates {
        let (x, y) = f.point(e.z);
        let _ = writeln!(
            s,
            r#"<path d="M {:.2} {:.2} L {:.2} {:.2} M {:.2} {:.2} L {:.2} {:.2}"/>"#,
            x - 6.0,
            y - 6.0,
            x + 6.0,
            y + 6.0,
            x - 6.0,
            y + 6.0,
            x + 6.0,
            y - 6.0
        );
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(s, "</svg>");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_plot_is_well_formed() {
        let w = Window::new(-2.0, 1.0, -0.5, 0.0).unwrap();
        let s = trajectory_plot(&w, &[], &[], "00ff");
        assert!(s.starts_with("<?xml"));
        assert!(s.trim_end().ends_with("</svg>"));
        assert_eq!(s.matches("<g ").count(), s.matches("</g>").count());
        assert!(s.contains("config_sha256=00ff"));
    }

    #[test]
    fn window_corners_map_inside_the_margins() {
        let w = Window::new(-2.0, 1.0, -0.5, 0.0).unwrap();
        let f = Frame::around(&w);
        for z in [Complex64::new(-2.0, -0.5), Complex64::new(1.0, 0.0)] {
            let (x, y) = f.point(z);
            assert!(x > MARGIN && x < WIDTH - MARGIN);
            assert!(y > MARGIN && y < HEIGHT - MARGIN);
        }
        assert!(f.y(0.0) < f.y(-0.5));
    }
}
