//! Normalized cross-correlation (rank/suit matching) and subtractive
//! comparison (card edge verification).
//!
//! The correlation surface follows the usual "full" convention: entry
//! `(u, v)` scores the template with its top-left corner at image position
//! `(u - tw + 1, v - th + 1)`, the image being zero-padded. A copy of the
//! template at `(x, y)` therefore peaks at `(x + tw - 1, y + th - 1)`.
//! Window sums come from integral images; only the cross term is summed
//! directly.

use crate::error::{Error, Result};
use crate::image::{FloatImage, GrayImage};

#[derive(Debug, Clone, PartialEq)]
pub struct CorrSurface {
    width: usize,
    height: usize,
    values: Vec<f64>,
}

impl CorrSurface {
    pub fn from_vec(width: usize, height: usize, values: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 || values.len() != width * height {
            return Err(Error::InvalidArgument(format!(
                "surface {width}x{height} does not match {} values",
                values.len()
            )));
        }
        Ok(CorrSurface {
            width,
            height,
            values,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.values[y * self.width + x]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// A window whose variance is at most this fraction of its energy is
/// treated as constant and scores 0.
pub(crate) const FLAT_WINDOW_EPS: f64 = 1e-9;

/// Summed-area table with a zero first row and column.
struct Integral {
    stride: usize,
    sum: Vec<f64>,
    sq: Vec<f64>,
}

impl Integral {
    fn new(img: &FloatImage) -> Self {
        let (w, h) = img.dimensions();
        let stride = w + 1;
        let mut sum = vec![0.0; stride * (h + 1)];
        let mut sq = vec![0.0; stride * (h + 1)];
        for y in 0..h {
            let mut row = 0.0;
            let mut row_sq = 0.0;
            for x in 0..w {
                let v = img.get(x, y);
                row += v;
                row_sq += v * v;
                sum[(y + 1) * stride + x + 1] = sum[y * stride + x + 1] + row;
                sq[(y + 1) * stride + x + 1] = sq[y * stride + x + 1] + row_sq;
            }
        }
        Integral { stride, sum, sq }
    }

    /// `(Σv, Σv²)` over `[x0, x1) x [y0, y1)`.
    fn window(&self, x0: usize, y0: usize, x1: usize, y1: usize) -> (f64, f64) {
        let s = self.stride;
        let at = |t: &[f64], x: usize, y: usize| t[y * s + x];
        let f = |t: &[f64]| at(t, x1, y1) - at(t, x0, y1) - at(t, x1, y0) + at(t, x0, y0);
        (f(&self.sum), f(&self.sq))
    }
}

struct Prepared {
    tw: usize,
    th: usize,
    centered: Vec<f64>,
    norm2: f64,
}

fn prepare(template: &FloatImage, image: &FloatImage) -> Result<Prepared> {
    let (tw, th) = template.dimensions();
    let (iw, ih) = image.dimensions();
    if tw >= iw || th >= ih {
        return Err(Error::TemplateTooLarge {
            template: (tw, th),
            image: (iw, ih),
        });
    }
    let first = template.pixels()[0];
    if template.pixels().iter().all(|&v| v == first) {
        return Err(Error::ConstantTemplate);
    }
    let n = (tw * th) as f64;
    let mean = template.pixels().iter().sum::<f64>() / n;
    let centered: Vec<f64> = template.pixels().iter().map(|&v| v - mean).collect();
    let norm2 = centered.iter().map(|v| v * v).sum();
    Ok(Prepared {
        tw,
        th,
        centered,
        norm2,
    })
}

/// Correlation at surface offset `(u, v)`; `padded` has `tw - 1` / `th - 1`
/// zero borders so the window starts at `(u, v)` in padded coordinates.
fn score_at(t: &Prepared, padded: &FloatImage, integral: &Integral, u: usize, v: usize) -> f64 {
    let n = (t.tw * t.th) as f64;
    let (s, s2) = integral.window(u, v, u + t.tw, v + t.th);
    let var = s2 - s * s / n;
    if var <= FLAT_WINDOW_EPS * s2.max(1.0) {
        return 0.0;
    }
    let mut cross = 0.0;
    for j in 0..t.th {
        let row = &padded.pixels()[(v + j) * padded.width() + u..][..t.tw];
        let trow = &t.centered[j * t.tw..][..t.tw];
        cross += row.iter().zip(trow).map(|(a, b)| a * b).sum::<f64>();
    }
    (cross / (var * t.norm2).sqrt()).clamp(-1.0, 1.0)
}

fn pad(image: &FloatImage, px: usize, py: usize) -> FloatImage {
    let (iw, ih) = image.dimensions();
    FloatImage::from_fn(iw + 2 * px, ih + 2 * py, |x, y| {
        if x < px || y < py || x >= px + iw || y >= py + ih {
            0.0
        } else {
            image.get(x - px, y - py)
        }
    })
}

/// Full normalized cross-correlation surface of size
/// `(iw + tw - 1) x (ih + th - 1)`. Flat windows score 0.
pub fn normxcorr(template: &FloatImage, image: &FloatImage) -> Result<CorrSurface> {
    let t = prepare(template, image)?;
    let padded = pad(image, t.tw - 1, t.th - 1);
    let integral = Integral::new(&padded);
    let (iw, ih) = image.dimensions();
    let (sw, sh) = (iw + t.tw - 1, ih + t.th - 1);
    let mut values = Vec::with_capacity(sw * sh);
    for v in 0..sh {
        for u in 0..sw {
            values.push(score_at(&t, &padded, &integral, u, v));
        }
    }
    CorrSurface::from_vec(sw, sh, values)
}

/// Peak of the correlation surface restricted to offsets where the template
/// lies entirely inside the image. Returns the value and the template's
/// top-left position in image coordinates. Same values as the matching
/// entries of [`normxcorr`].
pub fn normxcorr_valid_peak(template: &FloatImage, image: &FloatImage) -> Result<(f64, (usize, usize))> {
    let t = prepare(template, image)?;
    let integral = Integral::new(image);
    let (iw, ih) = image.dimensions();
    let mut best = (f64::NEG_INFINITY, (0, 0));
    for y in 0..=ih - t.th {
        for x in 0..=iw - t.tw {
            let s = score_at(&t, image, &integral, x, y);
            if s > best.0 {
                best = (s, (x, y));
            }
        }
    }
    Ok(best)
}

/// Maximum value and its raster-first location.
pub fn best_match(surface: &CorrSurface) -> (f64, (usize, usize)) {
    let mut best = (surface.values[0], (0, 0));
    for y in 0..surface.height {
        for x in 0..surface.width {
            let v = surface.get(x, y);
            if v > best.0 {
                best = (v, (x, y));
            }
        }
    }
    best
}

/// Mean absolute difference scaled to `[0, 1]`; 0 means identical.
pub fn subtractive_score(a: &GrayImage, b: &GrayImage) -> Result<f64> {
    if a.dimensions() != b.dimensions() {
        return Err(Error::DimensionMismatch {
            left: a.dimensions(),
            right: b.dimensions(),
        });
    }
    let total: u64 = a
        .pixels()
        .iter()
        .zip(b.pixels())
        .map(|(&p, &q)| p.abs_diff(q) as u64)
        .sum();
    Ok(total as f64 / (a.pixels().len() as f64 * 255.0))
}
