//! Linear and nonlinear preprocessing: convolution, Gaussian smoothing,
//! median filtering and histogram equalization.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::{clamp_u8, FloatImage, GrayImage};

/// Odd-sized convolution kernel, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "KernelRepr", into = "KernelRepr")]
pub struct Kernel {
    width: usize,
    height: usize,
    weights: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct KernelRepr {
    width: usize,
    height: usize,
    weights: Vec<f64>,
}

impl TryFrom<KernelRepr> for Kernel {
    type Error = Error;

    fn try_from(r: KernelRepr) -> Result<Self> {
        Kernel::new(r.width, r.height, r.weights)
    }
}

impl From<Kernel> for KernelRepr {
    fn from(k: Kernel) -> Self {
        KernelRepr {
            width: k.width,
            height: k.height,
            weights: k.weights,
        }
    }
}

impl Kernel {
    pub fn new(width: usize, height: usize, weights: Vec<f64>) -> Result<Self> {
        if width.is_multiple_of(2) || height.is_multiple_of(2) {
            return Err(Error::InvalidArgument(format!(
                "kernel dimensions must be odd, got {width}x{height}"
            )));
        }
        if weights.len() != width * height {
            return Err(Error::InvalidArgument(format!(
                "{width}x{height} kernel needs {} weights, got {}",
                width * height,
                weights.len()
            )));
        }
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::InvalidArgument("kernel weights must be finite".into()));
        }
        Ok(Kernel {
            width,
            height,
            weights,
        })
    }

    /// `size` x `size` box filter with weights summing to 1.
    pub fn mean(size: usize) -> Result<Self> {
        let n = size * size;
        Kernel::new(size, size, vec![1.0 / n as f64; n])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.weights[y * self.width + x]
    }
}

/// Full convolution (kernel flipped) cropped to the input size, with samples
/// outside the image taken as zero.
pub fn conv2_same(img: &FloatImage, k: &Kernel) -> FloatImage {
    let (w, h) = img.dimensions();
    let cx = (k.width / 2) as isize;
    let cy = (k.height / 2) as isize;
    FloatImage::from_fn(w, h, |x, y| {
        let mut acc = 0.0;
        for j in 0..k.height {
            let sy = y as isize + cy - j as isize;
            if sy < 0 || sy >= h as isize {
                continue;
            }
            for i in 0..k.width {
                let sx = x as isize + cx - i as isize;
                if sx < 0 || sx >= w as isize {
                    continue;
                }
                acc += k.get(i, j) * img.get(sx as usize, sy as usize);
            }
        }
        acc
    })
}

/// Normalized `size` x `size` Gaussian, `w(x, y) ∝ exp(-(x² + y²) / 2σ²)`.
pub fn gaussian_kernel(sigma: f64, size: usize) -> Result<Kernel> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::InvalidArgument(format!("sigma must be > 0, got {sigma}")));
    }
    if size.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!("kernel size must be odd, got {size}")));
    }
    let r = (size / 2) as f64;
    let mut weights = Vec::with_capacity(size * size);
    for y in 0..size {
        for x in 0..size {
            let dx = x as f64 - r;
            let dy = y as f64 - r;
            weights.push((-(dx * dx + dy * dy) / (2.0 * sigma * sigma)).exp());
        }
    }
    let sum: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= sum);
    Kernel::new(size, size, weights)
}

/// Support used by [`gaussian_blur`]: `2·ceil(3σ) + 1`.
pub fn gaussian_support(sigma: f64) -> usize {
    2 * (3.0 * sigma).ceil() as usize + 1
}

/// Gaussian smoothing with edge replication at the borders.
pub fn gaussian_blur(img: &GrayImage, sigma: f64) -> Result<GrayImage> {
    let k = gaussian_kernel(sigma, gaussian_support(sigma))?;
    let (w, h) = img.dimensions();
    let c = (k.width / 2) as isize;
    let clamp = |v: isize, n: usize| v.clamp(0, n as isize - 1) as usize;
    Ok(GrayImage::from_fn(w, h, |x, y| {
        let mut acc = 0.0;
        for j in 0..k.height {
            let sy = clamp(y as isize + c - j as isize, h);
            for i in 0..k.width {
                let sx = clamp(x as isize + c - i as isize, w);
                acc += k.get(i, j) * img.get(sx, sy) as f64;
            }
        }
        clamp_u8(acc)
    }))
}

/// Median over an `m`-row by `n`-column window; pixels outside are zero.
pub fn median_filter(img: &GrayImage, m: usize, n: usize) -> Result<GrayImage> {
    if m.is_multiple_of(2) || n.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!(
            "median window must be odd, got {m}x{n}"
        )));
    }
    let (w, h) = img.dimensions();
    let ry = (m / 2) as isize;
    let rx = (n / 2) as isize;
    let mut window = Vec::with_capacity(m * n);
    Ok(GrayImage::from_fn(w, h, |x, y| {
        window.clear();
        for dy in -ry..=ry {
            for dx in -rx..=rx {
                let sx = x as isize + dx;
                let sy = y as isize + dy;
                let inside = sx >= 0 && sy >= 0 && (sx as usize) < w && (sy as usize) < h;
                window.push(if inside { img.get(sx as usize, sy as usize) } else { 0 });
            }
        }
        let mid = window.len() / 2;
        *window.select_nth_unstable(mid).1
    }))
}

/// The equalization lookup table `v -> round(255 · cdf(v))`.
pub fn equalization_map(img: &GrayImage) -> [u8; 256] {
    let mut hist = [0u64; 256];
    for &v in img.pixels() {
        hist[v as usize] += 1;
    }
    let total = img.pixels().len() as f64;
    let mut map = [0u8; 256];
    let mut cum = 0u64;
    for (v, &count) in hist.iter().enumerate() {
        cum += count;
        map[v] = clamp_u8(255.0 * cum as f64 / total);
    }
    map
}

pub fn hist_equalize(img: &GrayImage) -> GrayImage {
    let map = equalization_map(img);
    GrayImage::from_fn(img.width(), img.height(), |x, y| map[img.get(x, y) as usize])
}

/// Equalization table from a histogram whose bins are capped at
/// `clip · N / 256`, the excess spread evenly over all 256 bins.
/// Limits how far a dominant flat background stretches its neighbours.
pub fn clipped_equalization_map(img: &GrayImage, clip: f64) -> Result<[u8; 256]> {
    if !(clip >= 1.0) || !clip.is_finite() {
        return Err(Error::InvalidArgument(format!("clip limit must be >= 1, got {clip}")));
    }
    let mut hist = [0f64; 256];
    for &v in img.pixels() {
        hist[v as usize] += 1.0;
    }
    let total = img.pixels().len() as f64;
    let limit = clip * total / 256.0;
    let excess: f64 = hist.iter().map(|&h| (h - limit).max(0.0)).sum();
    let mut map = [0u8; 256];
    let mut cum = 0.0;
    for (v, &h) in hist.iter().enumerate() {
        cum += h.min(limit) + excess / 256.0;
        map[v] = clamp_u8(255.0 * cum / total);
    }
    Ok(map)
}

pub fn hist_equalize_clipped(img: &GrayImage, clip: f64) -> Result<GrayImage> {
    let map = clipped_equalization_map(img, clip)?;
    Ok(GrayImage::from_fn(img.width(), img.height(), |x, y| map[img.get(x, y) as usize]))
}
