//! Per-component geometry: area, bounding box, perimeter and the
//! equivalent-ellipse measures derived from second-order moments.

use crate::morphology::LabelMap;

#[derive(Debug, Clone, PartialEq)]
pub struct RegionProps {
    pub label: u32,
    pub area: usize,
    /// Length of the traced outer boundary, diagonal steps counting √2.
    pub perimeter: f64,
    /// `(x, y, w, h)`
    pub bbox: (usize, usize, usize, usize),
    pub centroid: (f64, f64),
    pub major_axis: f64,
    pub minor_axis: f64,
    pub eccentricity: f64,
    /// Major-axis angle in degrees, counter-clockwise from +x as displayed,
    /// in `(-90, 90]`.
    pub orientation: f64,
}

/// Length of a closed pixel polyline.
pub fn polyline_length(boundary: &[(usize, usize)]) -> f64 {
    if boundary.len() < 2 {
        return 0.0;
    }
    let step = |a: (usize, usize), b: (usize, usize)| {
        let dx = a.0.abs_diff(b.0);
        let dy = a.1.abs_diff(b.1);
        if dx == 1 && dy == 1 {
            std::f64::consts::SQRT_2
        } else {
            ((dx * dx + dy * dy) as f64).sqrt()
        }
    };
    let closing = step(boundary[boundary.len() - 1], boundary[0]);
    boundary.windows(2).map(|p| step(p[0], p[1])).sum::<f64>() + closing
}

/// Ellipse measures from the central second moments (sums, already including
/// the 1/12 per-pixel term). `mu11` is taken in the display frame, y down.
pub(crate) fn ellipse_from_moments(
    area: f64,
    mu20: f64,
    mu02: f64,
    mu11: f64,
) -> (f64, f64, f64, f64) {
    let half_diff = (mu20 - mu02) / 2.0;
    let common = (half_diff * half_diff + mu11 * mu11).sqrt();
    let mean = (mu20 + mu02) / 2.0;
    let l1 = mean + common;
    let l2 = (mean - common).max(0.0);
    let major = 4.0 * (l1 / area).sqrt();
    let minor = 4.0 * (l2 / area).sqrt();
    let ratio = if major > 0.0 { minor / major } else { 1.0 };
    let eccentricity = (1.0 - ratio * ratio).max(0.0).sqrt();
    // flip to y-up so that positive angles read counter-clockwise on screen
    let mut orientation = 0.5 * (-2.0 * mu11).atan2(mu20 - mu02).to_degrees();
    if orientation <= -90.0 {
        orientation += 180.0;
    }
    (major, minor, eccentricity, orientation)
}

#[derive(Clone, Copy, Default)]
struct Accum {
    n: usize,
    sx: f64,
    sy: f64,
    x0: usize,
    y0: usize,
    x1: usize,
    y1: usize,
    cxx: f64,
    cyy: f64,
    cxy: f64,
}

/// Measures every labelled component. `boundaries` must come from tracing the
/// same mask (index `i` holds label `i + 1`'s boundary); the output is in
/// label order.
pub fn region_props(labels: &LabelMap, boundaries: &[Vec<(usize, usize)>]) -> Vec<RegionProps> {
    let n = labels.count();
    let mut acc = vec![
        Accum {
            x0: usize::MAX,
            y0: usize::MAX,
            ..Accum::default()
        };
        n + 1
    ];
    let (w, h) = (labels.width(), labels.height());
    for y in 0..h {
        for x in 0..w {
            let l = labels.get(x, y) as usize;
            if l == 0 {
                continue;
            }
            let a = &mut acc[l];
            a.n += 1;
            a.sx += x as f64;
            a.sy += y as f64;
            a.x0 = a.x0.min(x);
            a.y0 = a.y0.min(y);
            a.x1 = a.x1.max(x);
            a.y1 = a.y1.max(y);
        }
    }
    let centroids: Vec<(f64, f64)> = acc
        .iter()
        .map(|a| {
            if a.n == 0 {
                (0.0, 0.0)
            } else {
                (a.sx / a.n as f64, a.sy / a.n as f64)
            }
        })
        .collect();
    for y in 0..h {
        for x in 0..w {
            let l = labels.get(x, y) as usize;
            if l == 0 {
                continue;
            }
            let dx = x as f64 - centroids[l].0;
            let dy = y as f64 - centroids[l].1;
            let a = &mut acc[l];
            a.cxx += dx * dx;
            a.cyy += dy * dy;
            a.cxy += dx * dy;
        }
    }

    let mut perimeters = vec![0.0; n + 1];
    for b in boundaries {
        if let Some(&(x, y)) = b.first() {
            perimeters[labels.get(x, y) as usize] = polyline_length(b);
        }
    }

    (1..=n)
        .map(|l| {
            let a = &acc[l];
            let area = a.n as f64;
            let mu20 = a.cxx + area / 12.0;
            let mu02 = a.cyy + area / 12.0;
            let (major_axis, minor_axis, eccentricity, orientation) =
                ellipse_from_moments(area, mu20, mu02, a.cxy);
            RegionProps {
                label: l as u32,
                area: a.n,
                perimeter: perimeters[l],
                bbox: (a.x0, a.y0, a.x1 - a.x0 + 1, a.y1 - a.y0 + 1),
                centroid: centroids[l],
                major_axis,
                minor_axis,
                eccentricity,
                orientation,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::image::BinaryImage;
    use crate::morphology::{label_components, trace_labeled, Connectivity};

    fn props(mask: &BinaryImage) -> Vec<RegionProps> {
        let labels = label_components(mask, Connectivity::Eight);
        region_props(&labels, &trace_labeled(&labels))
    }

    #[test]
    fn single_pixel() {
        let mut m = BinaryImage::new(3, 3, false);
        m.set(1, 1, true);
        let p = &props(&m)[0];
        assert_eq!(p.area, 1);
        assert_eq!(p.eccentricity, 0.0);
        assert_eq!(p.orientation, 0.0);
        assert_eq!(p.perimeter, 0.0);
        assert!((p.major_axis - 4.0 / 12f64.sqrt()).abs() < 1e-12);
        assert_eq!(p.centroid, (1.0, 1.0));
    }

    #[test]
    fn axis_aligned_rectangle() {
        let m = BinaryImage::from_fn(30, 20, |x, y| (3..23).contains(&x) && (4..14).contains(&y));
        let p = &props(&m)[0];
        assert_eq!(p.area, 200);
        assert_eq!(p.bbox, (3, 4, 20, 10));
        assert_eq!(p.orientation, 0.0);
        assert!(p.major_axis > p.minor_axis);
        assert_eq!(p.centroid, (12.5, 8.5));
        // 2 * (19 + 9) unit steps around the rim
        assert!((p.perimeter - 56.0).abs() < 1e-12);
    }

    #[test]
    fn tall_rectangle_is_plus_ninety() {
        let m = BinaryImage::from_fn(10, 20, |x, y| (2..6).contains(&x) && (2..18).contains(&y));
        assert_eq!(props(&m)[0].orientation, 90.0);
    }

    #[test]
    fn rising_diagonal_is_positive() {
        // pixels going up and to the right on screen
        let m = BinaryImage::from_fn(10, 10, |x, y| x + y == 9);
        let p = &props(&m)[0];
        assert!((p.orientation - 45.0).abs() < 1e-9, "{}", p.orientation);
        assert!((p.perimeter - 18.0 * std::f64::consts::SQRT_2).abs() < 1e-9);
    }

    #[test]
    fn polyline_closing_segment() {
        assert_eq!(polyline_length(&[(0, 0)]), 0.0);
        assert_eq!(polyline_length(&[(0, 0), (1, 0), (1, 1), (0, 1)]), 4.0);
    }
}
