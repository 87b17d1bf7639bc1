//! Pass 1: find objects in a scene, separate rectangles from other shapes,
//! confirm cards against the stored edge templates and paint the result.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::{otsu_level, resize, rotate, to_grayscale, BinaryImage, GrayImage, RgbImage};
use crate::matching::subtractive_score;
use crate::morphology::{
    area_open, dilate, fill_holes, label_components, sobel_edges, trace_labeled, Connectivity, EdgeConfig,
    LabelMap, StructuringElement,
};
use crate::regions::{region_props, RegionProps};
use crate::semantics::{read_card, CardLabel, SemanticsConfig};
use crate::templates::{edge_strips, TemplateSet};

/// Reference scene size for scaling the default area floor.
const REFERENCE_PIXELS: f64 = 640.0 * 480.0;
const DEFAULT_MIN_AREA: f64 = 300.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DetectorConfig {
    pub edge: EdgeConfig,
    /// Smallest component kept. `None` scales 300 px by the scene area
    /// relative to 640x480.
    pub min_area: Option<usize>,
    pub rect_fill_ratio_min: f64,
    /// Accepted short/long side ratio of a card.
    pub card_aspect: (f64, f64),
    pub edge_strip_width: usize,
    pub canonical_card: (usize, usize),
    /// Largest mean strip difference (in `[0, 1]`) still accepted as a card.
    pub tau_edge: f64,
    /// Pixels trimmed from each side of a de-rotated crop after its
    /// background border has been stripped.
    pub crop_inset: usize,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        DetectorConfig {
            edge: EdgeConfig::default(),
            min_area: None,
            rect_fill_ratio_min: 0.85,
            card_aspect: (0.62, 0.80),
            edge_strip_width: 20,
            canonical_card: (140, 200),
            tau_edge: 0.12,
            crop_inset: 1,
        }
    }
}

impl DetectorConfig {
    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.card_aspect;
        if !(0.0 < lo && lo < hi && hi < 1.0) {
            return Err(Error::InvalidArgument(format!("card_aspect {:?} needs 0 < lo < hi < 1", self.card_aspect)));
        }
        let unit = |v: f64| v > 0.0 && v < 1.0;
        if !unit(self.rect_fill_ratio_min) || !unit(self.tau_edge) {
            return Err(Error::InvalidArgument("rect_fill_ratio_min and tau_edge must lie in (0, 1)".into()));
        }
        let (cw, ch) = self.canonical_card;
        if self.edge_strip_width == 0 || cw < self.edge_strip_width || ch < self.edge_strip_width {
            return Err(Error::InvalidArgument(format!(
                "canonical card {cw}x{ch} must be at least the strip width {}",
                self.edge_strip_width
            )));
        }
        if !(self.edge.fudge_factor > 0.0) {
            return Err(Error::InvalidArgument("fudge factor must be > 0".into()));
        }
        Ok(())
    }

    /// Area floor for a `width` x `height` scene.
    pub fn min_area_for(&self, width: usize, height: usize) -> usize {
        self.min_area
            .unwrap_or_else(|| (DEFAULT_MIN_AREA * (width * height) as f64 / REFERENCE_PIXELS).round() as usize)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ObjectClass {
    Card,
    Rect,
    Other,
}

impl ObjectClass {
    pub fn name(self) -> &'static str {
        match self {
            ObjectClass::Card => "CARD",
            ObjectClass::Rect => "RECT",
            ObjectClass::Other => "OTHER",
        }
    }

    pub fn color(self) -> [u8; 3] {
        match self {
            ObjectClass::Card => [0, 255, 0],
            ObjectClass::Rect => [0, 0, 255],
            ObjectClass::Other => [255, 0, 0],
        }
    }
}

impl std::fmt::Display for ObjectClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Detection {
    pub class: ObjectClass,
    pub boundary: Vec<(usize, usize)>,
    pub props: RegionProps,
    /// De-rotated grayscale crop, present for CARD and RECT.
    pub upright_crop: Option<GrayImage>,
    pub edge_score: Option<f64>,
    pub label: Option<CardLabel>,
}

/// Output of the segmentation chain. `boundaries[i]` and `props[i]` belong
/// to label `i + 1`.
#[derive(Debug, Clone)]
pub struct Segmentation {
    pub mask: BinaryImage,
    pub labels: LabelMap,
    pub props: Vec<RegionProps>,
    pub boundaries: Vec<Vec<(usize, usize)>>,
}

pub fn segment_scene(img: &RgbImage, cfg: &DetectorConfig) -> Result<Segmentation> {
    segment_gray(&to_grayscale(img), cfg)
}

fn segment_gray(gray: &GrayImage, cfg: &DetectorConfig) -> Result<Segmentation> {
    let (w, h) = gray.dimensions();
    if w < 3 || h < 3 {
        return Err(Error::InvalidArgument(format!("scene must be at least 3x3, got {w}x{h}")));
    }
    let edges = sobel_edges(gray, &cfg.edge)?;
    let grown = dilate(
        &dilate(&edges, &StructuringElement::horizontal_line(3)?),
        &StructuringElement::vertical_line(3)?,
    );
    let mask = area_open(&fill_holes(&grown), cfg.min_area_for(w, h));
    let labels = label_components(&mask, Connectivity::Eight);
    let boundaries = trace_labeled(&labels);
    let props = region_props(&labels, &boundaries);
    Ok(Segmentation {
        mask,
        labels,
        props,
        boundaries,
    })
}

/// Square window centred on a component's centroid, large enough that any
/// rotation about the centre keeps the component inside.
#[derive(Debug, Clone, Copy)]
struct Window {
    x0: isize,
    y0: isize,
    side: usize,
}

impl Window {
    fn around(props: &RegionProps) -> Self {
        let (cx, cy) = (props.centroid.0.round(), props.centroid.1.round());
        let (bx, by, bw, bh) = props.bbox;
        let mut r: f64 = 0.0;
        for (x, y) in [(bx, by), (bx + bw, by), (bx, by + bh), (bx + bw, by + bh)] {
            r = r.max((x as f64 - cx).hypot(y as f64 - cy));
        }
        let half = r.ceil() as isize + 2;
        Window {
            x0: cx as isize - half,
            y0: cy as isize - half,
            side: (2 * half + 1) as usize,
        }
    }

    fn cut(&self, f: impl Fn(usize, usize) -> u8, width: usize, height: usize) -> GrayImage {
        GrayImage::from_fn(self.side, self.side, |x, y| {
            let (sx, sy) = (self.x0 + x as isize, self.y0 + y as isize);
            if sx < 0 || sy < 0 || sx as usize >= width || sy as usize >= height {
                0
            } else {
                f(sx as usize, sy as usize)
            }
        })
    }
}

/// Outcome of the rectangle test.
#[derive(Debug, Clone, PartialEq)]
pub struct ShapeFit {
    /// `Rect` or `Other`.
    pub class: ObjectClass,
    pub fill_ratio: f64,
    /// Component mask turned so its major axis is horizontal, cropped to its
    /// tight box.
    pub upright_mask: BinaryImage,
    /// Tight box of `upright_mask` inside the rotated window.
    upright_box: (usize, usize, usize, usize),
}

fn rotate_mask(mask: &GrayImage, angle: f64) -> BinaryImage {
    let r = rotate(mask, angle, 0);
    BinaryImage::from_fn(r.width(), r.height(), |x, y| r.get(x, y) >= 128)
}

/// Turns the component mask by minus its orientation and compares its area
/// with the tight box of the result.
pub fn classify_shape(props: &RegionProps, mask: &BinaryImage, cfg: &DetectorConfig) -> Result<ShapeFit> {
    let win = Window::around(props);
    let window = win.cut(|x, y| if mask.get(x, y) { 255 } else { 0 }, mask.width(), mask.height());
    let turned = rotate_mask(&window, -props.orientation);
    let upright_box = turned
        .bounding_box()
        .ok_or_else(|| Error::InvalidArgument(format!("component {} is empty", props.label)))?;
    let (bx, by, bw, bh) = upright_box;
    let fill_ratio = props.area as f64 / (bw * bh) as f64;
    let class = if fill_ratio >= cfg.rect_fill_ratio_min {
        ObjectClass::Rect
    } else {
        ObjectClass::Other
    };
    Ok(ShapeFit {
        class,
        fill_ratio,
        upright_mask: turned.crop(bx, by, bw, bh)?,
        upright_box,
    })
}

/// Shrinks `(x, y, w, h)` while an outer row or column is mostly darker than
/// the Otsu level of the box: the edge mask overshoots the object by a few
/// pixels, and those lines are background.
fn strip_background(img: &GrayImage, (mut x, mut y, mut w, mut h): (usize, usize, usize, usize)) -> Result<(usize, usize, usize, usize)> {
    let level = otsu_level(&img.crop(x, y, w, h)?);
    let dark = |pixels: &mut dyn Iterator<Item = u8>, n: usize| pixels.filter(|&v| v > level).count() * 2 < n;
    loop {
        if w < 3 || h < 3 {
            break;
        }
        if dark(&mut (x..x + w).map(|i| img.get(i, y)), w) {
            y += 1;
            h -= 1;
        } else if dark(&mut (x..x + w).map(|i| img.get(i, y + h - 1)), w) {
            h -= 1;
        } else if dark(&mut (y..y + h).map(|j| img.get(x, j)), h) {
            x += 1;
            w -= 1;
        } else if dark(&mut (y..y + h).map(|j| img.get(x + w - 1, j)), h) {
            w -= 1;
        } else {
            break;
        }
    }
    Ok((x, y, w, h))
}

/// De-rotated grayscale crop of a component, portrait, with its background
/// border removed and `crop_inset` trimmed.
fn upright_crop(gray: &GrayImage, props: &RegionProps, fit: &ShapeFit, cfg: &DetectorConfig) -> Result<GrayImage> {
    let win = Window::around(props);
    let window = win.cut(|x, y| gray.get(x, y), gray.width(), gray.height());
    let turned = rotate(&window, -props.orientation, 0);
    let (bx, by, bw, bh) = strip_background(&turned, fit.upright_box)?;
    let inset = cfg.crop_inset.min((bw.min(bh).saturating_sub(1)) / 2);
    let crop = turned.crop(bx + inset, by + inset, bw - 2 * inset, bh - 2 * inset)?;
    Ok(if crop.width() > crop.height() { rotate(&crop, 90.0, 0) } else { crop })
}

fn strip_score(card: &GrayImage, templates: &TemplateSet, cfg: &DetectorConfig) -> Result<f64> {
    let (left, right) = edge_strips(card, cfg.edge_strip_width)?;
    Ok((subtractive_score(&left, templates.left_edge())? + subtractive_score(&right, templates.right_edge())?) / 2.0)
}

/// Aspect gate, then mean subtractive difference of the outer strips against
/// the edge templates. Both upright orientations are scored; the lower wins.
pub fn verify_card(upright: &GrayImage, templates: &TemplateSet, cfg: &DetectorConfig) -> Result<(bool, f64)> {
    let (w, h) = upright.dimensions();
    if w == 0 || h == 0 {
        return Ok((false, 1.0));
    }
    let aspect = w.min(h) as f64 / w.max(h) as f64;
    if aspect < cfg.card_aspect.0 || aspect > cfg.card_aspect.1 {
        return Ok((false, 1.0));
    }
    let portrait = if w > h { rotate(upright, 90.0, 0) } else { upright.clone() };
    let (cw, ch) = cfg.canonical_card;
    let canon = resize(&portrait, cw, ch);
    let score = strip_score(&canon, templates, cfg)?.min(strip_score(&canon.rotate180(), templates, cfg)?);
    Ok((score <= cfg.tau_edge, score))
}

/// Runs Pass 1 over a scene. Detections follow the raster order of their
/// boundary start pixels.
pub fn detect(img: &RgbImage, templates: &TemplateSet, cfg: &DetectorConfig) -> Result<Vec<Detection>> {
    cfg.validate()?;
    let gray = to_grayscale(img);
    let seg = segment_gray(&gray, cfg)?;
    let mut out = Vec::with_capacity(seg.props.len());
    for (props, boundary) in seg.props.into_iter().zip(seg.boundaries) {
        let mask = seg.labels.mask(props.label);
        let fit = classify_shape(&props, &mask, cfg)?;
        let mut det = Detection {
            class: fit.class,
            boundary,
            props,
            upright_crop: None,
            edge_score: None,
            label: None,
        };
        if fit.class == ObjectClass::Rect {
            let crop = upright_crop(&gray, &det.props, &fit, cfg)?;
            let (is_card, score) = verify_card(&crop, templates, cfg)?;
            if is_card {
                det.class = ObjectClass::Card;
            }
            det.edge_score = Some(score);
            det.upright_crop = Some(crop);
        }
        out.push(det);
    }
    Ok(out)
}

/// Reads rank and suit of every CARD detection. Cards that cannot be read
/// keep `label = None`.
pub fn read_labels(detections: &mut [Detection], templates: &TemplateSet, cfg: &SemanticsConfig) {
    for det in detections.iter_mut().filter(|d| d.class == ObjectClass::Card) {
        if let Some(crop) = &det.upright_crop {
            det.label = read_card(crop, templates, cfg).ok();
        }
    }
}

/// Paints each detection's boundary in its class colour.
pub fn annotate(img: &RgbImage, detections: &[Detection]) -> RgbImage {
    let mut out = img.clone();
    for det in detections {
        let color = det.class.color();
        for &(x, y) in &det.boundary {
            if x < out.width() && y < out.height() {
                out.set(x, y, color);
            }
        }
    }
    out
}

pub const REPORT_HEADER: &str =
    "index\tclass\tx\ty\tw\th\torientation_deg\tedge_score\trank\tsuit\trank_score\tsuit_score";

/// Tab-separated detections report; absent values are `-`.
pub fn format_report(detections: &[Detection]) -> String {
    let mut out = String::from(REPORT_HEADER);
    out.push('\n');
    for (i, d) in detections.iter().enumerate() {
        let (x, y, w, h) = d.props.bbox;
        let edge = d.edge_score.map_or("-".to_string(), |s| format!("{s:.4}"));
        let mut angle = format!("{:.2}", d.props.orientation);
        if angle == "-0.00" {
            angle.remove(0);
        }
        let (rank, suit, rs, ss) = match &d.label {
            Some(l) => (
                l.rank.label().to_string(),
                l.suit.name().to_string(),
                format!("{:.4}", l.rank_score),
                format!("{:.4}", l.suit_score),
            ),
            None => ("-".into(), "-".into(), "-".into(), "-".into()),
        };
        let _ = writeln!(
            out,
            "{i}\t{}\t{x}\t{y}\t{w}\t{h}\t{angle}\t{edge}\t{rank}\t{suit}\t{rs}\t{ss}",
            d.class
        );
    }
    out
}
