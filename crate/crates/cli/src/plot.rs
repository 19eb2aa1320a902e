//! SVG rendering of a body boundary with the unit circle for reference.

use std::f64::consts::TAU;
use std::fmt::Write;

use lpgauss_core::fmt::sig9;
use lpgauss_core::io::{parse_body, parse_field};
use lpgauss_core::smooth::field_to_polygon;
use lpgauss_core::{Result, SupportPolygon, Vec2};

/// Boundary samples in the polyline.
pub const SAMPLES: usize = 1024;

/// SVG for a body file, or for a field file when the input is not a body.
pub fn render(input: &str) -> Result<String> {
    let body = match parse_body(input) {
        Ok(k) => k,
        Err(body_err) => match parse_field(input) {
            Ok(field) => field_to_polygon(&field)?,
            Err(_) => return Err(body_err),
        },
    };
    Ok(svg(&body))
}

pub fn svg(body: &SupportPolygon) -> String {
    let mut points = String::new();
    for k in 0..SAMPLES {
        let u = Vec2::from_angle(TAU * k as f64 / SAMPLES as f64);
        let x = u * body.radial_hit(u).0;
        if k > 0 {
            points.push(' ');
        }
        let _ = write!(points, "{},{}", sig9(x.x), sig9(x.y));
    }
    format!(
        concat!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"-4 -4 8 8\" width=\"512\" height=\"512\">\n",
            "<g transform=\"scale(1,-1)\" fill=\"none\">\n",
            "<circle cx=\"0\" cy=\"0\" r=\"1\" stroke=\"#999999\" stroke-width=\"0.01\" stroke-dasharray=\"0.05 0.05\"/>\n",
            "<polyline points=\"{} {}\" stroke=\"#1f4e9a\" stroke-width=\"0.02\"/>\n",
            "</g>\n</svg>\n"
        ),
        points,
        // close the curve
        points.split(' ').next().unwrap_or_default()
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polyline_has_closed_sample_ring() {
        let k = SupportPolygon::rectangle(1.0, 2.0).unwrap();
        let s = svg(&k);
        assert!(s.contains("viewBox=\"-4 -4 8 8\""));
        assert!(s.contains("<circle"));
        let pts = s.split("points=\"").nth(1).unwrap().split('"').next().unwrap();
        let pts: Vec<&str> = pts.split(' ').collect();
        assert_eq!(pts.len(), SAMPLES + 1);
        assert_eq!(pts[0], pts[SAMPLES]);
        assert_eq!(pts[0], "1.00000000,0");
    }
}
