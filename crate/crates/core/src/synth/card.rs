//! Card face layout in canonical 140x200 coordinates.

use super::font::{glyph_ink, suit_ink};
use crate::cards::{Rank, Suit};

pub const CARD_WIDTH: f64 = 140.0;
pub const CARD_HEIGHT: f64 = 200.0;

pub const PAPER: [f64; 3] = [245.0, 245.0, 242.0];
pub const BLACK_INK: [f64; 3] = [20.0, 20.0, 25.0];
pub const RED_INK: [f64; 3] = [180.0, 20.0, 30.0];

/// Index rank box `(x0, y0, x1, y1)`.
pub const RANK_BOX: (f64, f64, f64, f64) = (5.0, 5.0, 20.0, 24.0);
/// Index suit centre and half extent.
const SUIT_CENTER: (f64, f64) = (12.5, 41.0);
const SUIT_HALF: f64 = 8.0;

// The diamond covers the least of its box; drawing it larger keeps the
// index edge content close to the other suits.
fn suit_half(suit: Suit) -> f64 {
    match suit {
        Suit::Diamond => DIAMOND_HALF,
        _ => SUIT_HALF,
    }
}
const DIAMOND_HALF: f64 = 9.0;

const PIP_HALF: f64 = 11.0;
const ACE_HALF: f64 = 28.0;
const COLS: [f64; 3] = [47.0, 70.0, 93.0];

fn pip_positions(n: usize) -> Vec<(f64, f64)> {
    let [l, c, r] = COLS;
    let (top, mid, bot) = (45.0, 100.0, 155.0);
    let four = [45.0, 82.0, 118.0, 155.0];
    let pair = |ys: &[f64]| -> Vec<(f64, f64)> { ys.iter().flat_map(|&y| [(l, y), (r, y)]).collect() };
    let mut p = match n {
        2 => vec![(c, top), (c, bot)],
        3 => vec![(c, top), (c, mid), (c, bot)],
        4 => pair(&[top, bot]),
        5 => {
            let mut v = pair(&[top, bot]);
            v.push((c, mid));
            v
        }
        6..=8 => pair(&[top, mid, bot]),
        9 => {
            let mut v = pair(&four);
            v.push((c, mid));
            v
        }
        10 => pair(&four),
        _ => Vec::new(),
    };
    match n {
        7 => p.push((c, 72.0)),
        8 => p.extend([(c, 72.0), (c, 128.0)]),
        10 => p.extend([(c, 64.0), (c, 136.0)]),
        _ => {}
    }
    p
}

/// Whether the face of `(rank, suit)` has ink at canonical `(u, v)`.
pub fn face_ink(rank: Rank, suit: Suit, u: f64, v: f64) -> bool {
    // both indices: the second is the first turned through 180 degrees
    for (pu, pv) in [(u, v), (CARD_WIDTH - u, CARD_HEIGHT - v)] {
        let (x0, y0, x1, y1) = RANK_BOX;
        if pu < 30.0 && pv < 60.0 {
            if glyph_ink(rank.glyph(), (pu - x0) / (x1 - x0), (pv - y0) / (y1 - y0)) {
                return true;
            }
            let half = suit_half(suit);
            let sx = (pu - SUIT_CENTER.0) / half;
            let sy = (pv - SUIT_CENTER.1) / half;
            if sx.abs() <= 1.0 && sy.abs() <= 1.0 && suit_ink(suit, sx, sy) {
                return true;
            }
        }
    }
    match rank.pips() {
        Some(1) => {
            let (x, y) = ((u - 70.0) / ACE_HALF, (v - 100.0) / ACE_HALF);
            x.abs() <= 1.0 && y.abs() <= 1.0 && suit_ink(suit, x, y)
        }
        Some(n) => pip_positions(n).into_iter().any(|(cx, cy)| {
            let (mut x, mut y) = ((u - cx) / PIP_HALF, (v - cy) / PIP_HALF);
            if x.abs() > 1.0 || y.abs() > 1.0 {
                return false;
            }
            if cy > 100.0 {
                x = -x;
                y = -y;
            }
            suit_ink(suit, x, y)
        }),
        None => court_ink(rank, suit, u, v),
    }
}

fn court_ink(rank: Rank, suit: Suit, u: f64, v: f64) -> bool {
    let (x0, y0, x1, y1) = (34.0, 30.0, 106.0, 170.0);
    let inside = |m: f64| u >= x0 + m && u < x1 - m && v >= y0 + m && v < y1 - m;
    if inside(0.0) && !inside(2.0) {
        return true;
    }
    if glyph_ink(rank.glyph(), (u - 55.0) / 30.0, (v - 78.0) / 44.0) {
        return true;
    }
    let (x, y) = ((u - 70.0) / 10.0, (v - 145.0) / 10.0);
    x.abs() <= 1.0 && y.abs() <= 1.0 && suit_ink(suit, x, y)
}

/// Colour at canonical `(u, v)`, or `None` off the card.
pub fn face_color(rank: Rank, suit: Suit, u: f64, v: f64) -> Option<[f64; 3]> {
    if !(0.0..CARD_WIDTH).contains(&u) || !(0.0..CARD_HEIGHT).contains(&v) {
        return None;
    }
    Some(if face_ink(rank, suit, u, v) {
        if suit.is_red() {
            RED_INK
        } else {
            BLACK_INK
        }
    } else {
        PAPER
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pip_counts_match_rank() {
        for r in Rank::ALL {
            if let Some(n) = r.pips() {
                if n > 1 {
                    assert_eq!(pip_positions(n).len(), n, "{r}");
                }
            }
        }
    }

    #[test]
    fn index_is_point_symmetric() {
        for (u, v) in [(6.0, 6.0), (12.0, 40.0), (15.0, 20.0)] {
            let a = face_ink(Rank::Seven, Suit::Club, u, v);
            let b = face_ink(Rank::Seven, Suit::Club, 140.0 - u, 200.0 - v);
            assert_eq!(a, b);
        }
    }

    #[test]
    fn off_card_is_none() {
        assert!(face_color(Rank::Ace, Suit::Spade, -0.1, 5.0).is_none());
        assert!(face_color(Rank::Ace, Suit::Spade, 5.0, 200.0).is_none());
        assert_eq!(face_color(Rank::Ace, Suit::Spade, 2.0, 2.0), Some(PAPER));
    }
}
