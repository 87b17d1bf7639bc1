//! Binary-image operators: Sobel edges, dilation, closing, hole filling,
//! small-area removal, connected components and boundary tracing.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::{BinaryImage, GrayImage};

/// Shape probe for dilation and closing. Cell `origin` sits on the pixel
/// being computed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructuringElement {
    width: usize,
    height: usize,
    mask: Vec<bool>,
    origin: (usize, usize),
}

impl StructuringElement {
    pub fn new(width: usize, height: usize, mask: Vec<bool>, origin: (usize, usize)) -> Result<Self> {
        if width == 0 || height == 0 || mask.len() != width * height {
            return Err(Error::InvalidArgument(format!(
                "structuring element mask does not match {width}x{height}"
            )));
        }
        if origin.0 >= width || origin.1 >= height {
            return Err(Error::InvalidArgument(format!(
                "origin {origin:?} outside {width}x{height} structuring element"
            )));
        }
        if !mask.iter().any(|&m| m) {
            return Err(Error::InvalidArgument("structuring element is empty".into()));
        }
        Ok(StructuringElement {
            width,
            height,
            mask,
            origin,
        })
    }

    /// Solid `w` x `h` rectangle with a centered origin.
    pub fn rect(w: usize, h: usize) -> Result<Self> {
        Self::new(w, h, vec![true; w * h], (w / 2, h / 2))
    }

    pub fn square(size: usize) -> Result<Self> {
        Self::rect(size, size)
    }

    /// Horizontal line `len` x 1.
    pub fn horizontal_line(len: usize) -> Result<Self> {
        Self::rect(len, 1)
    }

    /// Vertical line 1 x `len`.
    pub fn vertical_line(len: usize) -> Result<Self> {
        Self::rect(1, len)
    }

    /// The point reflection through the origin.
    pub fn reflected(&self) -> Self {
        let mut mask = self.mask.clone();
        mask.reverse();
        StructuringElement {
            width: self.width,
            height: self.height,
            mask,
            origin: (self.width - 1 - self.origin.0, self.height - 1 - self.origin.1),
        }
    }

    /// Offsets of the set cells relative to the origin.
    fn offsets(&self) -> Vec<(isize, isize)> {
        let mut out = Vec::new();
        for y in 0..self.height {
            for x in 0..self.width {
                if self.mask[y * self.width + x] {
                    out.push((
                        x as isize - self.origin.0 as isize,
                        y as isize - self.origin.1 as isize,
                    ));
                }
            }
        }
        out
    }
}

/// Sobel edge threshold configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EdgeConfig {
    /// Multiplier on the automatic threshold.
    pub fudge_factor: f64,
}

impl Default for EdgeConfig {
    fn default() -> Self {
        EdgeConfig { fudge_factor: 0.5 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Connectivity {
    Four,
    Eight,
}

impl Connectivity {
    fn neighbors(self) -> &'static [(isize, isize)] {
        const FOUR: [(isize, isize); 4] = [(0, -1), (-1, 0), (1, 0), (0, 1)];
        const EIGHT: [(isize, isize); 8] = [
            (-1, -1),
            (0, -1),
            (1, -1),
            (-1, 0),
            (1, 0),
            (-1, 1),
            (0, 1),
            (1, 1),
        ];
        match self {
            Connectivity::Four => &FOUR,
            Connectivity::Eight => &EIGHT,
        }
    }
}

/// Component labels, 0 = background.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelMap {
    width: usize,
    height: usize,
    labels: Vec<u32>,
    count: usize,
}

impl LabelMap {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn count(&self) -> usize {
        self.count
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u32 {
        self.labels[y * self.width + x]
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    /// Mask of the pixels carrying `label`.
    pub fn mask(&self, label: u32) -> BinaryImage {
        BinaryImage::from_fn(self.width, self.height, |x, y| self.get(x, y) == label)
    }

    /// Pixel count per label, index 0 = background.
    pub fn areas(&self) -> Vec<usize> {
        let mut areas = vec![0usize; self.count + 1];
        for &l in &self.labels {
            areas[l as usize] += 1;
        }
        areas
    }
}

#[inline]
fn offset(x: usize, y: usize, dx: isize, dy: isize, w: usize, h: usize) -> Option<(usize, usize)> {
    let nx = x as isize + dx;
    let ny = y as isize + dy;
    (nx >= 0 && ny >= 0 && (nx as usize) < w && (ny as usize) < h).then_some((nx as usize, ny as usize))
}

/// Sobel edges with an automatic threshold.
///
/// With `m² = gx² + gy²` and `T = 4 · mean(m²)`, a pixel is an edge iff
/// `m² > T · fudge²`. The outermost pixel ring is never an edge.
pub fn sobel_edges(img: &GrayImage, cfg: &EdgeConfig) -> Result<BinaryImage> {
    let (w, h) = img.dimensions();
    if w < 3 || h < 3 {
        return Err(Error::ImageTooSmall {
            width: w,
            height: h,
            min_width: 3,
            min_height: 3,
        });
    }
    if !(cfg.fudge_factor > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "fudge factor must be > 0, got {}",
            cfg.fudge_factor
        )));
    }
    let p = |x: usize, y: usize| img.get(x, y) as i64;
    let mut mag2 = vec![0i64; w * h];
    for y in 1..h - 1 {
        for x in 1..w - 1 {
            let gx = (p(x + 1, y - 1) + 2 * p(x + 1, y) + p(x + 1, y + 1))
                - (p(x - 1, y - 1) + 2 * p(x - 1, y) + p(x - 1, y + 1));
            let gy = (p(x - 1, y + 1) + 2 * p(x, y + 1) + p(x + 1, y + 1))
                - (p(x - 1, y - 1) + 2 * p(x, y - 1) + p(x + 1, y - 1));
            mag2[y * w + x] = gx * gx + gy * gy;
        }
    }
    let mean = mag2.iter().map(|&m| m as f64).sum::<f64>() / (w * h) as f64;
    let cutoff = 4.0 * mean * cfg.fudge_factor * cfg.fudge_factor;
    let data = mag2.iter().map(|&m| m as f64 > cutoff).collect();
    BinaryImage::from_vec(w, h, data)
}

/// Output pixel is set iff some set SE cell, with the origin placed on the
/// pixel, covers a set input pixel.
pub fn dilate(img: &BinaryImage, se: &StructuringElement) -> BinaryImage {
    let (w, h) = img.dimensions();
    let offsets = se.offsets();
    BinaryImage::from_fn(w, h, |x, y| {
        offsets
            .iter()
            .any(|&(dx, dy)| offset(x, y, dx, dy, w, h).is_some_and(|(sx, sy)| img.get(sx, sy)))
    })
}

/// Erosion; pixels outside the image count as foreground.
fn erode(img: &BinaryImage, se: &StructuringElement) -> BinaryImage {
    let (w, h) = img.dimensions();
    let offsets = se.offsets();
    BinaryImage::from_fn(w, h, |x, y| {
        offsets
            .iter()
            .all(|&(dx, dy)| offset(x, y, dx, dy, w, h).is_none_or(|(sx, sy)| img.get(sx, sy)))
    })
}

/// Morphological closing: dilation followed by erosion with the reflected SE.
pub fn close(img: &BinaryImage, se: &StructuringElement) -> BinaryImage {
    erode(&dilate(img, se), &se.reflected())
}

/// Background pixels that are 4-connected to the image border.
fn border_background(img: &BinaryImage) -> Vec<bool> {
    let (w, h) = img.dimensions();
    let mut reached = vec![false; w * h];
    let mut stack = Vec::new();
    for y in 0..h {
        for x in 0..w {
            if (x == 0 || y == 0 || x == w - 1 || y == h - 1) && !img.get(x, y) {
                reached[y * w + x] = true;
                stack.push((x, y));
            }
        }
    }
    while let Some((x, y)) = stack.pop() {
        for &(dx, dy) in Connectivity::Four.neighbors() {
            if let Some((nx, ny)) = offset(x, y, dx, dy, w, h) {
                let i = ny * w + nx;
                if !reached[i] && !img.get(nx, ny) {
                    reached[i] = true;
                    stack.push((nx, ny));
                }
            }
        }
    }
    reached
}

/// Fills background regions that cannot reach the image border.
pub fn fill_holes(img: &BinaryImage) -> BinaryImage {
    let outside = border_background(img);
    let (w, h) = img.dimensions();
    BinaryImage::from_fn(w, h, |x, y| img.get(x, y) || !outside[y * w + x])
}

/// Removes 8-connected components smaller than `min_area` pixels.
pub fn area_open(img: &BinaryImage, min_area: usize) -> BinaryImage {
    if min_area == 0 {
        return img.clone();
    }
    let labels = label_components(img, Connectivity::Eight);
    let areas = labels.areas();
    BinaryImage::from_fn(img.width(), img.height(), |x, y| {
        let l = labels.get(x, y) as usize;
        l != 0 && areas[l] >= min_area
    })
}

/// Removes 8-connected components with a pixel within `margin` of the image edge.
pub fn clear_border(img: &BinaryImage, margin: usize) -> BinaryImage {
    let labels = label_components(img, Connectivity::Eight);
    let (w, h) = img.dimensions();
    let mut touching = vec![false; labels.count() + 1];
    for y in 0..h {
        for x in 0..w {
            let near = x < margin || y < margin || x + margin >= w || y + margin >= h;
            if near {
                touching[labels.get(x, y) as usize] = true;
            }
        }
    }
    BinaryImage::from_fn(w, h, |x, y| {
        let l = labels.get(x, y) as usize;
        l != 0 && !touching[l]
    })
}

/// Labels foreground components 1..=count in raster order of first encounter.
pub fn label_components(img: &BinaryImage, connectivity: Connectivity) -> LabelMap {
    let (w, h) = img.dimensions();
    let mut labels = vec![0u32; w * h];
    let mut count = 0u32;
    let mut stack = Vec::new();
    for y in 0..h {
        for x in 0..w {
            if !img.get(x, y) || labels[y * w + x] != 0 {
                continue;
            }
            count += 1;
            labels[y * w + x] = count;
            stack.push((x, y));
            while let Some((cx, cy)) = stack.pop() {
                for &(dx, dy) in connectivity.neighbors() {
                    if let Some((nx, ny)) = offset(cx, cy, dx, dy, w, h) {
                        let i = ny * w + nx;
                        if img.get(nx, ny) && labels[i] == 0 {
                            labels[i] = count;
                            stack.push((nx, ny));
                        }
                    }
                }
            }
        }
    }
    LabelMap {
        width: w,
        height: h,
        labels,
        count: count as usize,
    }
}

/// Clockwise (as displayed) Moore neighbourhood, starting west.
const MOORE: [(isize, isize); 8] = [
    (-1, 0),
    (-1, -1),
    (0, -1),
    (1, -1),
    (1, 0),
    (1, 1),
    (0, 1),
    (-1, 1),
];

fn moore_index(dx: isize, dy: isize) -> usize {
    MOORE
        .iter()
        .position(|&d| d == (dx, dy))
        .expect("backtrack is always a Moore neighbour")
}

type Point = (isize, isize);

/// Moore-neighbour trace of the outer boundary of the component containing
/// `start`, which must be its raster-first pixel. The trace stops when the
/// first transition out of `start` repeats.
fn trace_one(labels: &LabelMap, label: u32, start: (usize, usize)) -> Vec<(usize, usize)> {
    let (w, h) = (labels.width(), labels.height());
    let inside = |(x, y): Point| {
        x >= 0 && y >= 0 && (x as usize) < w && (y as usize) < h && labels.get(x as usize, y as usize) == label
    };
    // next boundary pixel and its backtrack, scanning clockwise from `back`
    let step = |p: Point, back: Point| -> Option<(Point, Point)> {
        let d = moore_index(back.0 - p.0, back.1 - p.1);
        (1..=8).find_map(|k| {
            let (dx, dy) = MOORE[(d + k) % 8];
            let c = (p.0 + dx, p.1 + dy);
            inside(c).then(|| {
                let (bx, by) = MOORE[(d + k - 1) % 8];
                (c, (p.0 + bx, p.1 + by))
            })
        })
    };

    let start_i = (start.0 as isize, start.1 as isize);
    // the raster-first pixel always has background to its west
    let Some(first) = step(start_i, (start_i.0 - 1, start_i.1)) else {
        return vec![start];
    };
    let mut boundary = vec![start];
    let (mut p, mut back) = first;
    // every (pixel, backtrack) state occurs at most once per cycle
    for _ in 0..8 * w * h {
        boundary.push((p.0 as usize, p.1 as usize));
        let next = step(p, back).expect("pixel has a neighbour on the boundary");
        if p == start_i && next == first {
            boundary.pop();
            break;
        }
        (p, back) = next;
    }
    boundary
}

/// One closed, clockwise outer boundary per 8-connected component, in label
/// order; each starts at the component's raster-first pixel. Holes are not
/// traced.
pub fn trace_boundaries(img: &BinaryImage) -> Vec<Vec<(usize, usize)>> {
    trace_labeled(&label_components(img, Connectivity::Eight))
}

/// [`trace_boundaries`] over an existing 8-connectivity label map.
pub fn trace_labeled(labels: &LabelMap) -> Vec<Vec<(usize, usize)>> {
    let mut starts = vec![None; labels.count() + 1];
    for y in 0..labels.height() {
        for x in 0..labels.width() {
            let l = labels.get(x, y) as usize;
            if l != 0 && starts[l].is_none() {
                starts[l] = Some((x, y));
            }
        }
    }
    starts
        .iter()
        .enumerate()
        .skip(1)
        .map(|(l, s)| trace_one(labels, l as u32, s.expect("every label occurs")))
        .collect()
}
