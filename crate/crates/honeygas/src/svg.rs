//! Minimal SVG emission for trajectories and line charts.
//!
//! Everything here is a pure function of its inputs, so identical data
//! produces byte-identical markup. No external renderer is assumed; the
//! output is plain shapes with a fixed palette.

use std::fmt::Write;

use crate::lattice::{embed, SiteCoord};

const PALETTE: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

fn bounding_box(points: impl Iterator<Item = (f64, f64)>) -> Option<(f64, f64, f64, f64)> {
    let mut bounds: Option<(f64, f64, f64, f64)> = None;
    for (x, y) in points {
        bounds = Some(match bounds {
            None => (x, y, x, y),
            Some((x0, y0, x1, y1)) => (x0.min(x), y0.min(y), x1.max(x), y1.max(y)),
        });
    }
    bounds
}

/// Draws the walk as one polyline in the plane embedding, with a diamond
/// marker on every reflector base. The viewBox fits the drawing with a
/// five percent margin.
pub fn trajectory_svg(positions: &[SiteCoord], reflector_bases: &[SiteCoord]) -> String {
    let flip = |site: &SiteCoord| {
        let (x, y) = embed(*site);
        (x, -y)
    };
    let all = positions.iter().chain(reflector_bases).map(flip);
    let (x0, y0, x1, y1) = bounding_box(all).unwrap_or((0.0, 0.0, 0.0, 0.0));
    let margin = 0.05 * (x1 - x0).max(y1 - y0).max(1.0);
    let (left, top) = (x0 - margin, y0 - margin);
    let (width, height) = (x1 - x0 + 2.0 * margin, y1 - y0 + 2.0 * margin);

    let mut out = String::new();
    let _ = write!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{left:.3} {top:.3} {width:.3} {height:.3}\" width=\"800\">\n"
    );
    let _ = write!(out, "<rect x=\"{left:.3}\" y=\"{top:.3}\" width=\"{width:.3}\" height=\"{height:.3}\" fill=\"#ffffff\"/>\n");
    if !positions.is_empty() {
        let mut points = String::new();
        for site in positions {
            let (x, y) = flip(site);
            let _ = write!(points, "{x:.3},{y:.3} ");
        }
        let _ = write!(
            out,
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"0.12\" stroke-linejoin=\"round\"/>\n",
            points.trim_end(),
            PALETTE[0]
        );
    }
    for site in reflector_bases {
        let (x, y) = flip(site);
        let r = 0.4;
        let _ = write!(
            out,
            "<path d=\"M {:.3} {:.3} L {:.3} {:.3} L {:.3} {:.3} L {:.3} {:.3} Z\" fill=\"{}\"/>\n",
            x,
            y - r,
            x + r,
            y,
            x,
            y + r,
            x - r,
            y,
            PALETTE[1]
        );
    }
    out.push_str("</svg>\n");
    out
}

/// One named curve of a chart.
#[derive(Clone, Debug, PartialEq)]
pub struct LineSeries {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

/// Draws the curves on a fixed 800 by 500 canvas with framed axes and
/// tick labels at the data extremes, plus a legend line per series.
pub fn line_chart_svg(x_label: &str, y_label: &str, series: &[LineSeries]) -> String {
    let (px0, py0, px1, py1) = (70.0, 30.0, 780.0, 450.0);
    let data = bounding_box(
        series
            .iter()
            .flat_map(|s| s.points.iter().copied())
            .filter(|(x, y)| x.is_finite() && y.is_finite()),
    );
    let (x0, y0, x1, y1) = data.unwrap_or((0.0, 0.0, 1.0, 1.0));
    let pad = |lo: f64, hi: f64| {
        let span = (hi - lo).max(1e-12);
        (lo - 0.05 * span, hi + 0.05 * span)
    };
    let (x0, x1) = pad(x0, x1);
    let (y0, y1) = pad(y0, y1);
    let sx = move |x: f64| px0 + (x - x0) / (x1 - x0) * (px1 - px0);
    let sy = move |y: f64| py1 - (y - y0) / (y1 - y0) * (py1 - py0);

    let mut out = String::new();
    let _ = write!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 800 500\" width=\"800\" height=\"500\">\n"
    );
    out.push_str("<rect x=\"0\" y=\"0\" width=\"800\" height=\"500\" fill=\"#ffffff\"/>\n");
    let _ = write!(
        out,
        "<rect x=\"{px0}\" y=\"{py0}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#333333\"/>\n",
        px1 - px0,
        py1 - py0
    );
    for (k, s) in series.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let mut points = String::new();
        for &(x, y) in s.points.iter().filter(|(x, y)| x.is_finite() && y.is_finite()) {
            let _ = write!(points, "{:.2},{:.2} ", sx(x), sy(y));
        }
        let _ = write!(
            out,
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>\n",
            points.trim_end()
        );
        let _ = write!(
            out,
            "<text x=\"{}\" y=\"{}\" font-size=\"13\" fill=\"{color}\">{}</text>\n",
            px1 - 180.0,
            py0 + 18.0 + 16.0 * k as f64,
            s.label
        );
    }
    let tick = |v: f64| format!("{v}");
    let _ = write!(
        out,
        "<text x=\"{px0}\" y=\"470\" font-size=\"12\" fill=\"#333333\">{}</text>\n",
        tick(x0)
    );
    let _ = write!(
        out,
        "<text x=\"{px1}\" y=\"470\" font-size=\"12\" fill=\"#333333\" text-anchor=\"end\">{}</text>\n",
        tick(x1)
    );
    let _ = write!(
        out,
        "<text x=\"{}\" y=\"{py1}\" font-size=\"12\" fill=\"#333333\" text-anchor=\"end\">{}</text>\n",
        px0 - 6.0,
        tick(y0)
    );
    let _ = write!(
        out,
        "<text x=\"{}\" y=\"{py0}\" font-size=\"12\" fill=\"#333333\" text-anchor=\"end\" dominant-baseline=\"hanging\">{}</text>\n",
        px0 - 6.0,
        tick(y1)
    );
    let _ = write!(
        out,
        "<text x=\"{}\" y=\"490\" font-size=\"13\" fill=\"#333333\" text-anchor=\"middle\">{x_label}</text>\n",
        (px0 + px1) / 2.0
    );
    let _ = write!(
        out,
        "<text x=\"16\" y=\"{}\" font-size=\"13\" fill=\"#333333\" transform=\"rotate(-90 16 {})\" text-anchor=\"middle\">{y_label}</text>\n",
        (py0 + py1) / 2.0,
        (py0 + py1) / 2.0
    );
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::SiteCoord;

    #[test]
    fn trajectory_markup_has_one_polyline_and_one_diamond_per_base() {
        let positions = [
            SiteCoord::ORIGIN,
            SiteCoord::new_b(0, 0),
            SiteCoord::new_a(1, 0),
            SiteCoord::new_b(1, -1),
        ];
        let bases = [SiteCoord::new_b(0, 0), SiteCoord::new_a(1, 0)];
        let svg = trajectory_svg(&positions, &bases);
        assert_eq!(svg.matches("<polyline").count(), 1);
        assert_eq!(svg.matches("<path").count(), 2);
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert!(!svg.contains("NaN"));
        assert_eq!(svg, trajectory_svg(&positions, &bases));
    }

    #[test]
    fn trajectory_viewbox_covers_the_drawing_with_margin() {
        let positions = [SiteCoord::ORIGIN, SiteCoord::new_a(4, -4)];
        let svg = trajectory_svg(&positions, &[]);
        let view = svg.split("viewBox=\"").nth(1).unwrap();
        let nums: Vec<f64> = view
            .split('"')
            .next()
            .unwrap()
            .split(' ')
            .map(|v| v.parse().unwrap())
            .collect();
        let (left, top, width, height) = (nums[0], nums[1], nums[2], nums[3]);
        for site in positions {
            let (x, y) = embed(site);
            assert!(x > left && x < left + width);
            assert!(-y > top && -y < top + height);
        }
        let (x0, _) = embed(positions[0]);
        let (x1, _) = embed(positions[1]);
        assert!(width > (x1 - x0).abs(), "no margin applied");
    }

    #[test]
    fn degenerate_drawings_stay_well_formed() {
        let single = trajectory_svg(&[SiteCoord::ORIGIN], &[]);
        assert!(!single.contains("NaN"));
        let empty = trajectory_svg(&[], &[]);
        assert!(empty.starts_with("<svg"));
        assert!(!empty.contains("polyline"));
    }

    #[test]
    fn charts_draw_each_series_once_and_are_deterministic() {
        let series = [
            LineSeries {
                label: "mean".into(),
                points: vec![(0.1, 10.0), (0.5, 4.0), (0.9, 12.0)],
            },
            LineSeries {
                label: "median".into(),
                points: vec![(0.1, 8.0), (0.5, 3.0), (0.9, 9.0)],
            },
        ];
        let svg = line_chart_svg("p", "period", &series);
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.contains(">mean</text>"));
        assert!(svg.contains(">median</text>"));
        assert!(svg.contains(">p</text>"));
        assert!(!svg.contains("NaN"));
        assert_eq!(svg, line_chart_svg("p", "period", &series));
    }
}
