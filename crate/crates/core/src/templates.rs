//! Edge and glyph templates: building them from reference cards and
//! keeping them on disk.
//!
//! A template directory holds `manifest.tsv`, one line per image:
//! `kind<TAB>key<TAB>filename<TAB>width<TAB>height` with kind `edge`
//! (keys `left`, `right`), `rank` (keys `A`, `2`..`9`, `0`, `J`, `Q`, `K`)
//! or `suit` (keys `spade`, `heart`, `club`, `diamond`). Images are binary
//! PGM; glyph masks use the values 0 and 255.

use std::fs;
use std::path::Path;

use crate::cards::{Rank, Suit};
use crate::error::{Error, Result};
use crate::image::{read_gray, resize, write_gray, BinaryImage, GrayImage};
use crate::semantics::{card_glyphs, glyph_similarity, to_canonical, SemanticsConfig, CANONICAL_CARD};

pub const MANIFEST: &str = "manifest.tsv";

#[derive(Debug, Clone, PartialEq)]
pub struct TemplateSet {
    left_edge: GrayImage,
    right_edge: GrayImage,
    /// In `Rank::ALL` order.
    ranks: Vec<BinaryImage>,
    /// In `Suit::ALL` order.
    suits: Vec<BinaryImage>,
}

fn is_constant(mask: &BinaryImage) -> bool {
    let n = mask.count();
    n == 0 || n == mask.pixels().len()
}

impl TemplateSet {
    /// `ranks` and `suits` follow `Rank::ALL` and `Suit::ALL`.
    pub fn new(
        left_edge: GrayImage,
        right_edge: GrayImage,
        ranks: Vec<BinaryImage>,
        suits: Vec<BinaryImage>,
    ) -> Result<Self> {
        if left_edge.dimensions() != right_edge.dimensions() {
            return Err(Error::DimensionMismatch {
                left: left_edge.dimensions(),
                right: right_edge.dimensions(),
            });
        }
        if ranks.len() != Rank::ALL.len() || suits.len() != Suit::ALL.len() {
            return Err(Error::Templates(format!(
                "need 13 rank and 4 suit glyphs, got {} and {}",
                ranks.len(),
                suits.len()
            )));
        }
        let size = ranks[0].dimensions();
        for (i, g) in ranks.iter().enumerate() {
            let name = format!("rank {}", Rank::ALL[i].glyph());
            check_glyph(g, size, &name)?;
        }
        for (i, g) in suits.iter().enumerate() {
            check_glyph(g, size, &format!("suit {}", Suit::ALL[i]))?;
        }
        Ok(TemplateSet {
            left_edge,
            right_edge,
            ranks,
            suits,
        })
    }

    pub fn left_edge(&self) -> &GrayImage {
        &self.left_edge
    }

    pub fn right_edge(&self) -> &GrayImage {
        &self.right_edge
    }

    pub fn rank(&self, rank: Rank) -> &BinaryImage {
        &self.ranks[rank as usize]
    }

    pub fn suit(&self, suit: Suit) -> &BinaryImage {
        &self.suits[suit as usize]
    }

    pub fn glyph_size(&self) -> (usize, usize) {
        self.ranks[0].dimensions()
    }

    fn entries(&self) -> Vec<(&'static str, String, GrayImage)> {
        let mut out = vec![
            ("edge", "left".to_string(), self.left_edge.clone()),
            ("edge", "right".to_string(), self.right_edge.clone()),
        ];
        for r in Rank::ALL {
            out.push(("rank", r.glyph().to_string(), self.rank(r).to_gray()));
        }
        for s in Suit::ALL {
            out.push(("suit", s.name().to_string(), self.suit(s).to_gray()));
        }
        out
    }

    /// Writes the images and manifest into `dir`, creating it if needed.
    pub fn save(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let mut manifest = String::new();
        for (kind, key, img) in self.entries() {
            let file = format!("{kind}_{key}.pgm");
            write_gray(dir.join(&file), &img)?;
            manifest.push_str(&format!("{kind}\t{key}\t{file}\t{}\t{}\n", img.width(), img.height()));
        }
        let path = dir.join(MANIFEST);
        fs::write(&path, manifest).map_err(|e| Error::io(path, e))
    }

    pub fn load(dir: impl AsRef<Path>) -> Result<Self> {
        let dir = dir.as_ref();
        let path = dir.join(MANIFEST);
        if !dir.is_dir() {
            return Err(Error::MissingFile(dir.to_path_buf()));
        }
        let text = fs::read_to_string(&path).map_err(|e| match e.kind() {
            std::io::ErrorKind::NotFound => Error::MissingFile(path.clone()),
            _ => Error::io(&path, e),
        })?;
        let mut edges: [Option<GrayImage>; 2] = [None, None];
        let mut ranks: Vec<Option<BinaryImage>> = vec![None; Rank::ALL.len()];
        let mut suits: Vec<Option<BinaryImage>> = vec![None; Suit::ALL.len()];
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let bad = |msg: String| Error::Manifest {
                path: path.clone(),
                line: i + 1,
                msg,
            };
            let cols: Vec<&str> = line.split('\t').collect();
            let [kind, key, file, w, h] = cols[..] else {
                return Err(bad(format!("expected 5 tab-separated fields, got {}", cols.len())));
            };
            let (Ok(w), Ok(h)) = (w.parse::<usize>(), h.parse::<usize>()) else {
                return Err(bad("width and height must be integers".into()));
            };
            if file.contains(['/', '\\']) {
                return Err(bad(format!("file name {file:?} must be local to the directory")));
            }
            let img = read_gray(dir.join(file))?;
            if img.dimensions() != (w, h) {
                return Err(bad(format!(
                    "{file} is {}x{}, manifest says {w}x{h}",
                    img.width(),
                    img.height()
                )));
            }
            let slot_taken = || bad(format!("duplicate {kind} {key}"));
            match kind {
                "edge" => {
                    let idx = match key {
                        "left" => 0,
                        "right" => 1,
                        _ => return Err(bad(format!("unknown edge key {key:?}"))),
                    };
                    if edges[idx].replace(img).is_some() {
                        return Err(slot_taken());
                    }
                }
                "rank" | "suit" => {
                    let mask = glyph_from_gray(&img).ok_or_else(|| bad(format!("{file} is not a 0/255 mask")))?;
                    let slot = if kind == "rank" {
                        let r = key
                            .chars()
                            .next()
                            .filter(|_| key.chars().count() == 1)
                            .and_then(Rank::from_glyph)
                            .ok_or_else(|| bad(format!("unknown rank key {key:?}")))?;
                        &mut ranks[r as usize]
                    } else {
                        let s: Suit = key.parse().map_err(|_| bad(format!("unknown suit key {key:?}")))?;
                        &mut suits[s as usize]
                    };
                    if slot.replace(mask).is_some() {
                        return Err(slot_taken());
                    }
                }
                _ => return Err(bad(format!("unknown kind {kind:?}"))),
            }
        }
        let missing = |what: String| Error::Templates(format!("{} lacks {what}", path.display()));
        let [left, right] = edges;
        let left = left.ok_or_else(|| missing("the left edge".into()))?;
        let right = right.ok_or_else(|| missing("the right edge".into()))?;
        let ranks = ranks
            .into_iter()
            .zip(Rank::ALL)
            .map(|(g, r)| g.ok_or_else(|| missing(format!("rank {}", r.glyph()))))
            .collect::<Result<Vec<_>>>()?;
        let suits = suits
            .into_iter()
            .zip(Suit::ALL)
            .map(|(g, s)| g.ok_or_else(|| missing(format!("suit {s}"))))
            .collect::<Result<Vec<_>>>()?;
        TemplateSet::new(left, right, ranks, suits)
    }
}

fn check_glyph(g: &BinaryImage, size: (usize, usize), name: &str) -> Result<()> {
    if g.dimensions() != size {
        return Err(Error::DimensionMismatch {
            left: g.dimensions(),
            right: size,
        });
    }
    if is_constant(g) {
        return Err(Error::DegenerateGlyph(name.to_string()));
    }
    Ok(())
}

fn glyph_from_gray(img: &GrayImage) -> Option<BinaryImage> {
    if img.pixels().iter().any(|&p| p != 0 && p != 255) {
        return None;
    }
    Some(BinaryImage::from_fn(img.width(), img.height(), |x, y| img.get(x, y) == 255))
}

/// A reference card photo or render, upright, with its label.
#[derive(Debug, Clone)]
pub struct LabeledCard {
    pub rank: Rank,
    pub suit: Suit,
    pub image: GrayImage,
}

/// Builds a template set. Edge templates average the outer `strip_width`
/// columns of every card. Each glyph is taken from one exemplar: the card
/// of that rank (or suit) whose glyph correlates best with its worst-matching
/// peer, earliest card on ties.
pub fn build_templates(cards: &[LabeledCard], strip_width: usize, cfg: &SemanticsConfig) -> Result<TemplateSet> {
    let (cw, ch) = CANONICAL_CARD;
    if strip_width == 0 || strip_width > cw {
        return Err(Error::InvalidArgument(format!(
            "strip width {strip_width} must be in 1..={cw}"
        )));
    }
    for r in Rank::ALL {
        if !cards.iter().any(|c| c.rank == r) {
            return Err(Error::MissingCoverage(format!("rank {r}")));
        }
    }
    for s in Suit::ALL {
        if !cards.iter().any(|c| c.suit == s) {
            return Err(Error::MissingCoverage(format!("suit {s}")));
        }
    }

    let mut left = vec![0u64; strip_width * ch];
    let mut right = vec![0u64; strip_width * ch];
    for card in cards {
        let canon = to_canonical(&card.image);
        for y in 0..ch {
            for x in 0..strip_width {
                left[y * strip_width + x] += canon.get(x, y) as u64;
                right[y * strip_width + x] += canon.get(cw - strip_width + x, y) as u64;
            }
        }
    }
    let n = cards.len() as u64;
    // rounded integer mean
    let mean = |sums: Vec<u64>| GrayImage::from_vec(strip_width, ch, sums.into_iter().map(|s| ((2 * s + n) / (2 * n)) as u8).collect());
    let left_edge = mean(left)?;
    let right_edge = mean(right)?;

    let glyphs = cards
        .iter()
        .map(|card| match card_glyphs(&card.image, cfg) {
            Err(Error::EmptyCorner) => Err(Error::DegenerateGlyph(format!("{} of {}", card.rank, card.suit))),
            other => other,
        })
        .collect::<Result<Vec<_>>>()?;
    let mut ranks = Vec::with_capacity(13);
    for r in Rank::ALL {
        let group: Vec<&BinaryImage> = cards.iter().zip(&glyphs).filter(|(c, _)| c.rank == r).map(|(_, g)| &g.0).collect();
        ranks.push(medoid(&group, cfg)?.clone());
    }
    let mut suits = Vec::with_capacity(4);
    for s in Suit::ALL {
        let group: Vec<&BinaryImage> = cards.iter().zip(&glyphs).filter(|(c, _)| c.suit == s).map(|(_, g)| &g.1).collect();
        suits.push(medoid(&group, cfg)?.clone());
    }
    TemplateSet::new(left_edge, right_edge, ranks, suits)
}

/// The member with the highest minimum correlation against the others.
fn medoid<'a>(group: &[&'a BinaryImage], cfg: &SemanticsConfig) -> Result<&'a BinaryImage> {
    let mut best: Option<(f64, &BinaryImage)> = None;
    for (i, &g) in group.iter().enumerate() {
        if is_constant(g) {
            continue;
        }
        let mut worst = f64::INFINITY;
        for (j, &other) in group.iter().enumerate() {
            if i != j {
                worst = worst.min(glyph_similarity(other, g, cfg.match_margin)?);
            }
        }
        if best.is_none_or(|(b, _)| worst > b) {
            best = Some((worst, g));
        }
    }
    match best {
        Some((_, g)) => Ok(g),
        None => Err(Error::DegenerateGlyph("every candidate glyph is constant".into())),
    }
}

/// Edge template of a single canonical card, for callers that need strips
/// of arbitrary images.
pub fn edge_strips(card: &GrayImage, strip_width: usize) -> Result<(GrayImage, GrayImage)> {
    let canon = if card.dimensions() == CANONICAL_CARD {
        card.clone()
    } else {
        resize(card, CANONICAL_CARD.0, CANONICAL_CARD.1)
    };
    let (cw, ch) = CANONICAL_CARD;
    Ok((canon.crop(0, 0, strip_width, ch)?, canon.crop(cw - strip_width, 0, strip_width, ch)?))
}
