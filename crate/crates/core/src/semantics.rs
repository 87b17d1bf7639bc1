//! Pass 2: read rank and suit from the top-left index of an upright card.

use serde::{Deserialize, Serialize};

use crate::cards::{Rank, Suit};
use crate::error::{Error, Result};
use crate::filters::{conv2_same, gaussian_blur, hist_equalize, hist_equalize_clipped, Kernel};
use crate::image::{resize, BinaryImage, FloatImage, GrayImage};
use crate::matching::normxcorr_valid_peak;
use crate::morphology::{
    area_open, clear_border, close, fill_holes, sobel_edges, EdgeConfig, StructuringElement,
};
use crate::templates::TemplateSet;

/// Upright card raster every crop is resampled to before reading.
pub const CANONICAL_CARD: (usize, usize) = (140, 200);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SemanticsConfig {
    /// Index crop as fractions of the canonical width and height.
    pub corner_frac: (f64, f64),
    pub min_confidence: f64,
    pub conv_kernel: Kernel,
    pub blur_sigma: f64,
    /// Histogram clip limit for equalization, in multiples of the mean bin
    /// count; `None` equalizes the raw histogram.
    pub equalize_clip: Option<f64>,
    pub edge: EdgeConfig,
    /// Side of the square closing element.
    pub close_size: usize,
    /// Components smaller than this are dropped after closing.
    pub min_blob_area: usize,
    /// Components touching this many pixels of the corner border are
    /// dropped as card-edge residue.
    pub border_margin: usize,
    /// Fallback rank/suit split, as a fraction of the mask height.
    pub split_frac: f64,
    /// Glyph raster `(w, h)`.
    pub glyph_size: (usize, usize),
    /// Zero border added around a glyph before correlating, so the
    /// template can shift by up to this many pixels.
    pub match_margin: usize,
    /// Pixels of edge replication added around the corner before
    /// preprocessing, so the border rules of closing and hole filling never
    /// touch the glyphs.
    pub corner_pad: usize,
}

impl Default for SemanticsConfig {
    fn default() -> Self {
        SemanticsConfig {
            corner_frac: (0.18, 0.28),
            min_confidence: 0.40,
            conv_kernel: Kernel::mean(3).expect("odd kernel"),
            blur_sigma: 1.0,
            equalize_clip: Some(1.0),
            edge: EdgeConfig::default(),
            close_size: 3,
            min_blob_area: 8,
            border_margin: 0,
            split_frac: 0.55,
            glyph_size: (24, 32),
            match_margin: 2,
            corner_pad: 4,
        }
    }
}

impl SemanticsConfig {
    pub fn validate(&self) -> Result<()> {
        let (fw, fh) = self.corner_frac;
        let in_unit = |v: f64| v > 0.0 && v <= 1.0;
        if !in_unit(fw) || !in_unit(fh) {
            return Err(Error::InvalidArgument(format!("corner_frac {:?} must lie in (0, 1]", self.corner_frac)));
        }
        if !(self.min_confidence > 0.0 && self.min_confidence < 1.0) {
            return Err(Error::InvalidArgument("min_confidence must lie in (0, 1)".into()));
        }
        if !(self.split_frac > 0.0 && self.split_frac < 1.0) {
            return Err(Error::InvalidArgument("split_frac must lie in (0, 1)".into()));
        }
        if self.glyph_size.0 < 3 || self.glyph_size.1 < 3 || self.close_size == 0 {
            return Err(Error::InvalidArgument("glyph size must be at least 3x3 and close_size >= 1".into()));
        }
        if !(self.blur_sigma > 0.0) || !(self.edge.fudge_factor > 0.0) {
            return Err(Error::InvalidArgument("blur_sigma and fudge factor must be > 0".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CardLabel {
    pub rank: Rank,
    pub suit: Suit,
    pub rank_score: f64,
    pub suit_score: f64,
}

/// Resamples to the canonical card raster unless already there.
pub fn to_canonical(card: &GrayImage) -> GrayImage {
    let (w, h) = CANONICAL_CARD;
    if card.dimensions() == (w, h) {
        card.clone()
    } else {
        resize(card, w, h)
    }
}

/// Top-left index crop of a canonical card.
pub fn extract_corner(card: &GrayImage, cfg: &SemanticsConfig) -> Result<GrayImage> {
    if card.dimensions() != CANONICAL_CARD {
        return Err(Error::DimensionMismatch {
            left: card.dimensions(),
            right: CANONICAL_CARD,
        });
    }
    let w = ((CANONICAL_CARD.0 as f64 * cfg.corner_frac.0).round() as usize).clamp(1, CANONICAL_CARD.0);
    let h = ((CANONICAL_CARD.1 as f64 * cfg.corner_frac.1).round() as usize).clamp(1, CANONICAL_CARD.1);
    card.crop(0, 0, w, h)
}

/// Edge-based glyph segmentation of an index crop. Returns the solid glyph
/// mask cropped to its tight bounding box.
pub fn preprocess_corner(corner: &GrayImage, cfg: &SemanticsConfig) -> Result<BinaryImage> {
    let blurred = gaussian_blur(&pad_replicate(corner, cfg.corner_pad), cfg.blur_sigma)?;
    let equalized = match cfg.equalize_clip {
        Some(clip) => hist_equalize_clipped(&blurred, clip)?,
        None => hist_equalize(&blurred),
    };
    let edges = sobel_edges(&equalized, &cfg.edge)?;
    let smeared = conv2_same(&to_float(&edges), &cfg.conv_kernel);
    let thick = BinaryImage::from_fn(edges.width(), edges.height(), |x, y| smeared.get(x, y) > 0.0);
    let closed = close(&thick, &StructuringElement::square(cfg.close_size)?);
    let mut kept = area_open(&closed, cfg.min_blob_area);
    if cfg.border_margin > 0 {
        kept = clear_border(&kept, cfg.border_margin);
    }
    let (x, y, w, h) = kept.bounding_box().ok_or(Error::EmptyCorner)?;
    Ok(fill_holes(&kept.crop(x, y, w, h)?))
}

fn pad_replicate(img: &GrayImage, pad: usize) -> GrayImage {
    let (w, h) = img.dimensions();
    GrayImage::from_fn(w + 2 * pad, h + 2 * pad, |x, y| {
        img.get(x.saturating_sub(pad).min(w - 1), y.saturating_sub(pad).min(h - 1))
    })
}

fn to_float(mask: &BinaryImage) -> FloatImage {
    FloatImage::from_fn(mask.width(), mask.height(), |x, y| if mask.get(x, y) { 1.0 } else { 0.0 })
}

fn tight(mask: &BinaryImage) -> Option<BinaryImage> {
    let (x, y, w, h) = mask.bounding_box()?;
    mask.crop(x, y, w, h).ok()
}

/// Splits a corner mask into rank (top) and suit (bottom) masks, each cropped
/// to its own bounding box. Prefers an empty row band between components;
/// otherwise cuts at `split_frac` of the height.
pub fn split_glyphs(mask: &BinaryImage, cfg: &SemanticsConfig) -> Result<(BinaryImage, BinaryImage)> {
    let (w, h) = mask.dimensions();
    let filled: Vec<bool> = (0..h).map(|y| (0..w).any(|x| mask.get(x, y))).collect();
    let target = h as f64 * cfg.split_frac;
    // empty runs strictly inside the mask; choose the one nearest the target
    let mut best: Option<(f64, usize)> = None;
    let mut y = 0;
    while y < h {
        if filled[y] {
            y += 1;
            continue;
        }
        let start = y;
        while y < h && !filled[y] {
            y += 1;
        }
        if start > 0 && y < h {
            let mid = (start + y) as f64 / 2.0;
            let d = (mid - target).abs();
            if best.is_none_or(|(bd, _)| d < bd) {
                best = Some((d, start));
            }
        }
    }
    let cut = match best {
        Some((_, start)) => start,
        None => (target.round() as usize).clamp(1, h.saturating_sub(1).max(1)),
    };
    if h < 2 || cut >= h {
        return Err(Error::EmptyCorner);
    }
    let top = mask.crop(0, 0, w, cut)?;
    let bottom = mask.crop(0, cut, w, h - cut)?;
    match (tight(&top), tight(&bottom)) {
        (Some(t), Some(b)) => Ok((t, b)),
        _ => Err(Error::EmptyCorner),
    }
}

/// Scales a glyph mask uniformly to fit `size` and centres it (bilinear on
/// 0/255, then >= 128), so a glyph's aspect ratio survives.
pub fn normalize_glyph(mask: &BinaryImage, size: (usize, usize)) -> BinaryImage {
    let (w, h) = mask.dimensions();
    let s = (size.0 as f64 / w as f64).min(size.1 as f64 / h as f64);
    let nw = ((w as f64 * s).round() as usize).clamp(1, size.0);
    let nh = ((h as f64 * s).round() as usize).clamp(1, size.1);
    let gray = resize(&mask.to_gray(), nw, nh);
    let (ox, oy) = ((size.0 - nw) / 2, (size.1 - nh) / 2);
    BinaryImage::from_fn(size.0, size.1, |x, y| {
        x >= ox && y >= oy && x < ox + nw && y < oy + nh && gray.get(x - ox, y - oy) >= 128
    })
}

fn lift(mask: &BinaryImage, margin: usize) -> FloatImage {
    let (w, h) = mask.dimensions();
    FloatImage::from_fn(w + 2 * margin, h + 2 * margin, |x, y| {
        let inside = x >= margin && y >= margin && x < w + margin && y < h + margin;
        if inside && mask.get(x - margin, y - margin) {
            255.0
        } else {
            0.0
        }
    })
}

/// Correlation peak of `template` over `glyph`, allowing shifts of up to
/// `margin` pixels.
pub fn glyph_similarity(glyph: &BinaryImage, template: &BinaryImage, margin: usize) -> Result<f64> {
    let (score, _) = normxcorr_valid_peak(&lift(template, 0), &lift(glyph, margin.max(1)))?;
    Ok(score)
}

/// Best template by correlation peak; ties keep the earlier template.
fn best_of<K: Copy>(glyph: &BinaryImage, templates: &[(K, &BinaryImage)], margin: usize) -> Result<(K, f64)> {
    let mut best: Option<(K, f64)> = None;
    for &(key, t) in templates {
        let score = glyph_similarity(glyph, t, margin)?;
        if best.is_none_or(|(_, b)| score > b) {
            best = Some((key, score));
        }
    }
    best.ok_or_else(|| Error::Templates("empty template family".into()))
}

/// Rank and suit glyphs of a corner mask at `size`.
pub fn mask_glyphs(mask: &BinaryImage, size: (usize, usize), cfg: &SemanticsConfig) -> Result<(BinaryImage, BinaryImage)> {
    let (rank_mask, suit_mask) = split_glyphs(mask, cfg)?;
    let rank_glyph = normalize_glyph(&rank_mask, size);
    let suit_glyph = normalize_glyph(&suit_mask, size);
    if rank_glyph.is_empty() || suit_glyph.is_empty() {
        return Err(Error::EmptyCorner);
    }
    Ok((rank_glyph, suit_glyph))
}

/// Rank and suit glyphs read from an upright card crop of any size.
pub fn card_glyphs(card: &GrayImage, cfg: &SemanticsConfig) -> Result<(BinaryImage, BinaryImage)> {
    let corner = extract_corner(&to_canonical(card), cfg)?;
    mask_glyphs(&preprocess_corner(&corner, cfg)?, cfg.glyph_size, cfg)
}

fn score_mask(mask: &BinaryImage, templates: &TemplateSet, cfg: &SemanticsConfig) -> Result<CardLabel> {
    let (rank_glyph, suit_glyph) = mask_glyphs(mask, templates.glyph_size(), cfg)?;
    let ranks: Vec<(Rank, &BinaryImage)> = Rank::ALL.iter().map(|&r| (r, templates.rank(r))).collect();
    let suits: Vec<(Suit, &BinaryImage)> = Suit::ALL.iter().map(|&s| (s, templates.suit(s))).collect();
    // the zero glyph's template is keyed by Rank::Ten, so "10" falls out here
    let (rank, rank_score) = best_of(&rank_glyph, &ranks, cfg.match_margin)?;
    let (suit, suit_score) = best_of(&suit_glyph, &suits, cfg.match_margin)?;
    Ok(CardLabel {
        rank,
        suit,
        rank_score,
        suit_score,
    })
}

/// Labels a preprocessed corner mask.
pub fn classify(mask: &BinaryImage, templates: &TemplateSet, cfg: &SemanticsConfig) -> Result<CardLabel> {
    let label = score_mask(mask, templates, cfg)?;
    if label.rank_score < cfg.min_confidence || label.suit_score < cfg.min_confidence {
        return Err(Error::LowConfidence {
            rank_score: label.rank_score,
            suit_score: label.suit_score,
        });
    }
    Ok(label)
}

fn read_upright(card: &GrayImage, templates: &TemplateSet, cfg: &SemanticsConfig) -> Result<CardLabel> {
    let corner = extract_corner(card, cfg)?;
    classify(&preprocess_corner(&corner, cfg)?, templates, cfg)
}

/// Reads a card crop in both upright orientations and keeps the one with the
/// higher combined score.
pub fn read_card(card: &GrayImage, templates: &TemplateSet, cfg: &SemanticsConfig) -> Result<CardLabel> {
    let canonical = to_canonical(card);
    let first = read_upright(&canonical, templates, cfg);
    let second = read_upright(&canonical.rotate180(), templates, cfg);
    let total = |l: &CardLabel| l.rank_score + l.suit_score;
    match (first, second) {
        (Ok(a), Ok(b)) => Ok(if total(&b) > total(&a) { b } else { a }),
        (Ok(a), Err(_)) | (Err(_), Ok(a)) => Ok(a),
        (Err(a), Err(b)) => Err(match (a, b) {
            (
                Error::LowConfidence {
                    rank_score: r1,
                    suit_score: s1,
                },
                Error::LowConfidence {
                    rank_score: r2,
                    suit_score: s2,
                },
            ) => {
                if r2 + s2 > r1 + s1 {
                    Error::LowConfidence {
                        rank_score: r2,
                        suit_score: s2,
                    }
                } else {
                    Error::LowConfidence {
                        rank_score: r1,
                        suit_score: s1,
                    }
                }
            }
            (e @ Error::LowConfidence { .. }, _) | (_, e @ Error::LowConfidence { .. }) => e,
            (a, _) => a,
        }),
    }
}
