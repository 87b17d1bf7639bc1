use super::{clamp_u8, GrayImage};

/// Bilinear sample at a real position, clamping to the edge pixels.
fn bilinear(img: &GrayImage, x: f64, y: f64) -> f64 {
    let max_x = (img.width() - 1) as f64;
    let max_y = (img.height() - 1) as f64;
    let x = x.clamp(0.0, max_x);
    let y = y.clamp(0.0, max_y);
    let x0 = x.floor() as usize;
    let y0 = y.floor() as usize;
    let x1 = (x0 + 1).min(img.width() - 1);
    let y1 = (y0 + 1).min(img.height() - 1);
    let fx = x - x0 as f64;
    let fy = y - y0 as f64;
    let top = img.get(x0, y0) as f64 * (1.0 - fx) + img.get(x1, y0) as f64 * fx;
    let bottom = img.get(x0, y1) as f64 * (1.0 - fx) + img.get(x1, y1) as f64 * fx;
    top * (1.0 - fy) + bottom * fy
}

/// Bilinear resize with pixel-center alignment.
///
/// Panics if a target dimension is zero.
pub fn resize(img: &GrayImage, new_width: usize, new_height: usize) -> GrayImage {
    assert!(new_width > 0 && new_height > 0, "resize target must be >= 1x1");
    if (new_width, new_height) == img.dimensions() {
        return img.clone();
    }
    let sx = img.width() as f64 / new_width as f64;
    let sy = img.height() as f64 / new_height as f64;
    GrayImage::from_fn(new_width, new_height, |x, y| {
        let src_x = (x as f64 + 0.5) * sx - 0.5;
        let src_y = (y as f64 + 0.5) * sy - 0.5;
        clamp_u8(bilinear(img, src_x, src_y))
    })
}

/// `(cos, sin)` with exact values at multiples of 90 degrees.
fn cos_sin_deg(angle: f64) -> (f64, f64) {
    let a = angle.rem_euclid(360.0);
    if a == 0.0 {
        (1.0, 0.0)
    } else if a == 90.0 {
        (0.0, 1.0)
    } else if a == 180.0 {
        (-1.0, 0.0)
    } else if a == 270.0 {
        (0.0, -1.0)
    } else {
        let r = a.to_radians();
        (r.cos(), r.sin())
    }
}

/// Output canvas size for rotating a `w` x `h` image.
pub(crate) fn rotated_size(w: usize, h: usize, angle: f64) -> (usize, usize) {
    let (c, s) = cos_sin_deg(angle);
    let (c, s) = (c.abs(), s.abs());
    let fit = |v: f64| ((v - 1e-9).ceil() as usize).max(1);
    (fit(w as f64 * c + h as f64 * s), fit(w as f64 * s + h as f64 * c))
}

/// Rotates counter-clockwise (as displayed) by `angle` degrees about the
/// image center. The canvas grows to contain the whole rotated input;
/// samples that fall outside the source take `fill`.
pub fn rotate(img: &GrayImage, angle: f64, fill: u8) -> GrayImage {
    let (c, s) = cos_sin_deg(angle);
    let (w, h) = img.dimensions();
    let (out_w, out_h) = rotated_size(w, h, angle);
    let src_cx = (w as f64 - 1.0) / 2.0;
    let src_cy = (h as f64 - 1.0) / 2.0;
    let dst_cx = (out_w as f64 - 1.0) / 2.0;
    let dst_cy = (out_h as f64 - 1.0) / 2.0;
    const EPS: f64 = 1e-9;
    let lo = -0.5 - EPS;
    let hi_x = w as f64 - 0.5 + EPS;
    let hi_y = h as f64 - 0.5 + EPS;
    GrayImage::from_fn(out_w, out_h, |x, y| {
        let dx = x as f64 - dst_cx;
        let dy = y as f64 - dst_cy;
        let sx = src_cx + dx * c - dy * s;
        let sy = src_cy + dx * s + dy * c;
        if sx < lo || sy < lo || sx > hi_x || sy > hi_y {
            fill
        } else {
            clamp_u8(bilinear(img, sx, sy))
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ramp(w: usize, h: usize) -> GrayImage {
        GrayImage::from_fn(w, h, |x, y| ((x * 37 + y * 11) % 256) as u8)
    }

    #[test]
    fn resize_identity() {
        let img = ramp(9, 5);
        assert_eq!(resize(&img, 9, 5), img);
    }

    #[test]
    fn resize_constant() {
        let img = GrayImage::new(7, 3, 141);
        for (w, h) in [(1, 1), (14, 6), (3, 11), (100, 2)] {
            let r = resize(&img, w, h);
            assert_eq!(r.dimensions(), (w, h));
            assert!(r.pixels().iter().all(|&v| v == 141));
        }
    }

    #[test]
    fn resize_midpoint() {
        let img = GrayImage::from_vec(2, 1, vec![0, 255]).unwrap();
        let r = resize(&img, 3, 1);
        assert!((r.get(1, 0) as i32 - 128).abs() <= 1);
        assert_eq!(r.get(0, 0), 0);
        assert_eq!(r.get(2, 0), 255);
    }

    #[test]
    fn rotate_zero_is_identity() {
        let img = ramp(8, 5);
        assert_eq!(rotate(&img, 0.0, 0), img);
        assert_eq!(rotate(&img, 360.0, 0), img);
    }

    #[test]
    fn rotate_right_angles_are_exact() {
        let img = ramp(6, 4);
        let r = rotate(&img, 90.0, 0);
        assert_eq!(r.dimensions(), (4, 6));
        for y in 0..6 {
            for x in 0..4 {
                // counter-clockwise: the top-right corner moves to the top-left
                assert_eq!(r.get(x, y), img.get(5 - y, x));
            }
        }
        let r180 = rotate(&img, 180.0, 0);
        assert_eq!(r180, img.rotate180());
        assert_eq!(rotate(&r, -90.0, 0), img);
    }

    #[test]
    fn rotate_constant_interior() {
        let img = GrayImage::new(20, 12, 99);
        let r = rotate(&img, 33.0, 0);
        let (w, h) = r.dimensions();
        assert_eq!((w, h), rotated_size(20, 12, 33.0));
        // the center neighbourhood is well inside the rotated support
        for y in h / 2 - 2..h / 2 + 2 {
            for x in w / 2 - 2..w / 2 + 2 {
                assert_eq!(r.get(x, y), 99);
            }
        }
        assert_eq!(r.get(0, 0), 0);
    }
}
