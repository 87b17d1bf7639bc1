//! Synthetic cards and table scenes with exact ground truth.
//!
//! Everything is rendered analytically: each output pixel averages a 4x4
//! grid of point samples of the scene geometry, so rotated objects get
//! antialiased edges without resampling an intermediate raster.
//!
//! Angles are degrees, counter-clockwise as displayed.

mod card;
mod font;
mod spec;

pub use card::{face_color, face_ink, CARD_HEIGHT, CARD_WIDTH};
pub use font::{glyph_ink, suit_ink};
pub use spec::{format_truth, parse_truth};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Uniform};

use crate::cards::{Rank, Suit};
use crate::error::{Error, Result};
use crate::image::{to_grayscale, GrayImage, RgbImage};

const SUPERSAMPLE: usize = 4;

pub const FELT: [u8; 3] = [20, 90, 40];

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Shape {
    Card { rank: Rank, suit: Suit },
    /// Plain rectangle of `width x height` at scale 1.
    Rect { width: f64, height: f64, color: [u8; 3] },
    Disk { radius: f64, color: [u8; 3] },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SceneObject {
    pub shape: Shape,
    pub cx: f64,
    pub cy: f64,
    pub angle: f64,
    pub scale: f64,
}

/// Photometric disturbance: a global gain drawn from `[1 - gain, 1 + gain]`
/// and per-sample Gaussian noise of standard deviation `noise`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jitter {
    pub seed: u64,
    pub gain: f64,
    pub noise: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SceneSpec {
    pub width: usize,
    pub height: usize,
    pub background: [u8; 3],
    pub jitter: Option<Jitter>,
    pub objects: Vec<SceneObject>,
}

impl SceneSpec {
    pub fn new(width: usize, height: usize) -> Self {
        SceneSpec {
            width,
            height,
            background: FELT,
            jitter: None,
            objects: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TruthClass {
    Card,
    Rect,
    Disk,
}

impl TruthClass {
    pub fn name(self) -> &'static str {
        match self {
            TruthClass::Card => "card",
            TruthClass::Rect => "rect",
            TruthClass::Disk => "disk",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TruthEntry {
    pub index: usize,
    pub class: TruthClass,
    /// Tight `(x, y, w, h)` of every pixel the object touches.
    pub bbox: (usize, usize, usize, usize),
    pub cx: f64,
    pub cy: f64,
    pub angle: f64,
    pub scale: f64,
    pub label: Option<(Rank, Suit)>,
}

impl SceneObject {
    fn half_extent(&self) -> (f64, f64) {
        let s = self.scale;
        match self.shape {
            Shape::Card { .. } => (CARD_WIDTH * s / 2.0, CARD_HEIGHT * s / 2.0),
            Shape::Rect { width, height, .. } => (width * s / 2.0, height * s / 2.0),
            Shape::Disk { radius, .. } => (radius * s, radius * s),
        }
    }

    /// Axis-aligned extent `(x0, y0, x1, y1)` of the rotated shape.
    fn extent(&self) -> (f64, f64, f64, f64) {
        let (hw, hh) = self.half_extent();
        let (hx, hy) = match self.shape {
            Shape::Disk { .. } => (hw, hh),
            _ => {
                let (s, c) = self.angle.to_radians().sin_cos();
                (hw * c.abs() + hh * s.abs(), hw * s.abs() + hh * c.abs())
            }
        };
        (self.cx - hx, self.cy - hy, self.cx + hx, self.cy + hy)
    }

    /// Colour at scene point `(x, y)`, or `None` outside the object.
    fn sample(&self, x: f64, y: f64, cos: f64, sin: f64) -> Option<[f64; 3]> {
        let (dx, dy) = (x - self.cx, y - self.cy);
        let lx = (dx * cos - dy * sin) / self.scale;
        let ly = (dx * sin + dy * cos) / self.scale;
        let rgb = |c: [u8; 3]| [c[0] as f64, c[1] as f64, c[2] as f64];
        match self.shape {
            Shape::Card { rank, suit } => face_color(rank, suit, lx + CARD_WIDTH / 2.0, ly + CARD_HEIGHT / 2.0),
            Shape::Rect { width, height, color } => {
                (lx.abs() < width / 2.0 && ly.abs() < height / 2.0).then(|| rgb(color))
            }
            Shape::Disk { radius, color } => (lx * lx + ly * ly < radius * radius).then(|| rgb(color)),
        }
    }
}

/// Paints `obj` over `canvas` (stored as f64 RGB) and returns the tight bbox
/// of touched pixels.
fn paint(canvas: &mut [[f64; 3]], width: usize, height: usize, obj: &SceneObject) -> Option<(usize, usize, usize, usize)> {
    let (x0, y0, x1, y1) = obj.extent();
    let px0 = x0.floor().max(0.0) as usize;
    let py0 = y0.floor().max(0.0) as usize;
    let px1 = (x1.ceil().max(0.0) as usize).min(width);
    let py1 = (y1.ceil().max(0.0) as usize).min(height);
    let (sin, cos) = obj.angle.to_radians().sin_cos();
    let n = (SUPERSAMPLE * SUPERSAMPLE) as f64;
    let mut bbox: Option<(usize, usize, usize, usize)> = None;
    for py in py0..py1 {
        for px in px0..px1 {
            let mut acc = [0.0; 3];
            let mut hits = 0usize;
            for j in 0..SUPERSAMPLE {
                for i in 0..SUPERSAMPLE {
                    let x = px as f64 + (i as f64 + 0.5) / SUPERSAMPLE as f64;
                    let y = py as f64 + (j as f64 + 0.5) / SUPERSAMPLE as f64;
                    if let Some(c) = obj.sample(x, y, cos, sin) {
                        hits += 1;
                        for k in 0..3 {
                            acc[k] += c[k];
                        }
                    }
                }
            }
            if hits == 0 {
                continue;
            }
            let cover = hits as f64 / n;
            let dst = &mut canvas[py * width + px];
            for k in 0..3 {
                dst[k] = dst[k] * (1.0 - cover) + acc[k] / n;
            }
            bbox = Some(match bbox {
                None => (px, py, px, py),
                Some((a, b, c, d)) => (a.min(px), b.min(py), c.max(px), d.max(py)),
            });
        }
    }
    bbox.map(|(a, b, c, d)| (a, b, c - a + 1, d - b + 1))
}

fn jitter_values(values: &mut [f64], jitter: &Jitter) -> Result<()> {
    if !(0.0..1.0).contains(&jitter.gain) || !(jitter.noise >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "jitter needs gain in [0, 1) and noise >= 0, got {} and {}",
            jitter.gain, jitter.noise
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(jitter.seed);
    let gain = if jitter.gain > 0.0 {
        Uniform::new_inclusive(1.0 - jitter.gain, 1.0 + jitter.gain)
            .expect("valid range")
            .sample(&mut rng)
    } else {
        1.0
    };
    let noise = Normal::new(0.0, jitter.noise).expect("finite sigma");
    for v in values {
        *v = *v * gain + if jitter.noise > 0.0 { noise.sample(&mut rng) } else { 0.0 };
    }
    Ok(())
}

fn to_u8(v: f64) -> u8 {
    v.round().clamp(0.0, 255.0) as u8
}

/// Renders the scene and its ground truth. Objects are painted in order,
/// later ones on top; truth bboxes are those of the painted footprint.
pub fn render_scene(spec: &SceneSpec) -> Result<(RgbImage, Vec<TruthEntry>)> {
    let (w, h) = (spec.width, spec.height);
    if w == 0 || h == 0 {
        return Err(Error::InvalidArgument("canvas must be at least 1x1".into()));
    }
    let bg = spec.background.map(|c| c as f64);
    let mut canvas = vec![bg; w * h];
    let mut truth = Vec::with_capacity(spec.objects.len());
    for (index, obj) in spec.objects.iter().enumerate() {
        if !(obj.scale > 0.0 && obj.scale <= 1.5) {
            return Err(Error::InvalidArgument(format!(
                "object {index}: scale {} outside (0, 1.5]",
                obj.scale
            )));
        }
        let (x0, y0, x1, y1) = obj.extent();
        if x0 < 0.0 || y0 < 0.0 || x1 > w as f64 || y1 > h as f64 {
            return Err(Error::ObjectOutOfCanvas {
                index,
                width: w,
                height: h,
            });
        }
        let bbox = paint(&mut canvas, w, h, obj).ok_or(Error::ObjectOutOfCanvas {
            index,
            width: w,
            height: h,
        })?;
        let (class, label) = match obj.shape {
            Shape::Card { rank, suit } => (TruthClass::Card, Some((rank, suit))),
            Shape::Rect { .. } => (TruthClass::Rect, None),
            Shape::Disk { .. } => (TruthClass::Disk, None),
        };
        truth.push(TruthEntry {
            index,
            class,
            bbox,
            cx: obj.cx,
            cy: obj.cy,
            angle: obj.angle,
            scale: obj.scale,
            label,
        });
    }
    let mut flat: Vec<f64> = canvas.iter().flatten().copied().collect();
    if let Some(j) = &spec.jitter {
        jitter_values(&mut flat, j)?;
    }
    let pixels = flat.chunks_exact(3).map(|c| [to_u8(c[0]), to_u8(c[1]), to_u8(c[2])]).collect();
    Ok((RgbImage::from_vec(w, h, pixels)?, truth))
}

/// Upright card of `round(140·scale) x round(200·scale)` pixels, colour.
pub fn render_card_rgb(rank: Rank, suit: Suit, scale: f64) -> RgbImage {
    assert!(scale > 0.0 && scale.is_finite(), "scale must be positive");
    let w = ((CARD_WIDTH * scale).round() as usize).max(1);
    let h = ((CARD_HEIGHT * scale).round() as usize).max(1);
    let (sx, sy) = (CARD_WIDTH / w as f64, CARD_HEIGHT / h as f64);
    let n = (SUPERSAMPLE * SUPERSAMPLE) as f64;
    RgbImage::from_fn(w, h, |px, py| {
        let mut acc = [0.0; 3];
        for j in 0..SUPERSAMPLE {
            for i in 0..SUPERSAMPLE {
                let u = (px as f64 + (i as f64 + 0.5) / SUPERSAMPLE as f64) * sx;
                let v = (py as f64 + (j as f64 + 0.5) / SUPERSAMPLE as f64) * sy;
                let c = face_color(rank, suit, u, v).expect("sample inside card");
                for k in 0..3 {
                    acc[k] += c[k];
                }
            }
        }
        acc.map(|a| to_u8(a / n))
    })
}

/// Upright grayscale card of `round(140·scale) x round(200·scale)` pixels.
pub fn render_card(rank: Rank, suit: Suit, scale: f64) -> GrayImage {
    to_grayscale(&render_card_rgb(rank, suit, scale))
}

/// Applies seeded gain and noise to a grayscale image.
pub fn jitter_gray(img: &GrayImage, jitter: &Jitter) -> Result<GrayImage> {
    let mut values: Vec<f64> = img.pixels().iter().map(|&p| p as f64).collect();
    jitter_values(&mut values, jitter)?;
    GrayImage::from_vec(img.width(), img.height(), values.into_iter().map(to_u8).collect())
}
