//! Built-in glyphs: a 5x7 block font for rank indices and court letters,
//! and implicit shapes for the four suits.

use crate::cards::Suit;

pub const GLYPH_COLS: usize = 5;
pub const GLYPH_ROWS: usize = 7;

// Shapes are chosen so that the silhouettes stay distinct once enclosed
// counters are filled in.
fn bitmap(c: char) -> Option<[&'static str; GLYPH_ROWS]> {
    Some(match c {
        'A' => [
            "..#..", //
            ".###.", //
            ".#.#.", //
            "##.##", //
            "#####", //
            "#...#", //
            "#...#", //
        ],
        '2' => [
            ".###.", //
            "#...#", //
            "....#", //
            "...#.", //
            "..#..", //
            ".#...", //
            "#####", //
        ],
        '3' => [
            "####.", //
            "....#", //
            "....#", //
            ".###.", //
            "....#", //
            "....#", //
            "####.", //
        ],
        '4' => [
            "...#.", //
            "..##.", //
            ".#.#.", //
            "#..#.", //
            "#####", //
            "...#.", //
            "...#.", //
        ],
        '5' => [
            "#####", //
            "#....", //
            "####.", //
            "....#", //
            "....#", //
            "....#", //
            "####.", //
        ],
        '6' => [
            "..##.", //
            ".#...", //
            "#....", //
            "####.", //
            "#...#", //
            "#...#", //
            ".###.", //
        ],
        '7' => [
            "#####", //
            "....#", //
            "...#.", //
            "..#..", //
            ".#...", //
            ".#...", //
            ".#...", //
        ],
        '8' => [
            ".###.", //
            ".#.#.", //
            ".###.", //
            "#...#", //
            "#...#", //
            "#...#", //
            ".###.", //
        ],
        '9' => [
            ".###.", //
            "#...#", //
            "#...#", //
            ".####", //
            "....#", //
            "...#.", //
            ".##..", //
        ],
        '0' => [
            ".###.", //
            "#...#", //
            "#...#", //
            "#...#", //
            "#...#", //
            "#...#", //
            ".###.", //
        ],
        'J' => [
            "..###", //
            "...#.", //
            "...#.", //
            "...#.", //
            "...#.", //
            "#..#.", //
            ".##..", //
        ],
        'Q' => [
            ".###.", //
            "#...#", //
            "#...#", //
            "#...#", //
            ".###.", //
            "...#.", //
            "....#", //
        ],
        'K' => [
            "#...#", //
            "#..#.", //
            "#.#..", //
            "###..", //
            "#.#..", //
            "#..#.", //
            "#...#", //
        ],
        _ => return None,
    })
}

/// Whether the glyph for `c` has ink at normalized position `(u, v)` in
/// `[0, 1)²` of its box. Unknown characters draw nothing.
pub fn glyph_ink(c: char, u: f64, v: f64) -> bool {
    if !(0.0..1.0).contains(&u) || !(0.0..1.0).contains(&v) {
        return false;
    }
    let Some(rows) = bitmap(c) else {
        return false;
    };
    let col = (u * GLYPH_COLS as f64) as usize;
    let row = (v * GLYPH_ROWS as f64) as usize;
    rows[row].as_bytes()[col] == b'#'
}

fn in_circle(x: f64, y: f64, cx: f64, cy: f64, r: f64) -> bool {
    (x - cx).powi(2) + (y - cy).powi(2) <= r * r
}

/// Point-in-triangle by edge signs.
fn in_triangle(p: (f64, f64), a: (f64, f64), b: (f64, f64), c: (f64, f64)) -> bool {
    let cross = |o: (f64, f64), s: (f64, f64), t: (f64, f64)| (s.0 - o.0) * (t.1 - o.1) - (s.1 - o.1) * (t.0 - o.0);
    let d1 = cross(a, b, p);
    let d2 = cross(b, c, p);
    let d3 = cross(c, a, p);
    let neg = d1 < 0.0 || d2 < 0.0 || d3 < 0.0;
    let pos = d1 > 0.0 || d2 > 0.0 || d3 > 0.0;
    !(neg && pos)
}

/// Heart with lobes up, occupying roughly `[-1, 1]²`.
fn heart(x: f64, y: f64) -> bool {
    in_circle(x, y, -0.47, -0.42, 0.52)
        || in_circle(x, y, 0.47, -0.42, 0.52)
        || in_triangle((x, y), (-0.97, -0.25), (0.97, -0.25), (0.0, 1.0))
}

/// Suit silhouette at `(x, y)` in `[-1, 1]²`, y pointing down.
pub fn suit_ink(suit: Suit, x: f64, y: f64) -> bool {
    match suit {
        Suit::Diamond => x.abs() / 0.7 + y.abs() <= 1.0,
        Suit::Heart => heart(x, y),
        Suit::Spade => {
            // inverted heart, widest low down, on a short stem
            let body = heart(x, -(y + 0.124) / 0.876);
            body || in_triangle((x, y), (0.0, 0.5), (-0.35, 1.0), (0.35, 1.0))
        }
        Suit::Club => {
            in_circle(x, y, 0.0, -0.52, 0.42)
                || in_circle(x, y, -0.52, 0.1, 0.42)
                || in_circle(x, y, 0.52, 0.1, 0.42)
                || in_circle(x, y, 0.0, -0.02, 0.3)
                || in_triangle((x, y), (0.0, 0.0), (-0.45, 1.0), (0.45, 1.0))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cards::Rank;

    #[test]
    fn every_rank_and_letter_has_a_glyph() {
        for r in Rank::ALL {
            let rows = bitmap(r.glyph()).expect("rank glyph");
            assert!(rows.iter().all(|row| row.len() == GLYPH_COLS));
        }
        assert!(bitmap('x').is_none());
        assert!(!glyph_ink('x', 0.5, 0.5));
    }

    #[test]
    fn glyph_ink_samples_cells() {
        assert!(glyph_ink('7', 0.05, 0.05));
        assert!(!glyph_ink('7', 0.05, 0.95));
        assert!(!glyph_ink('7', 1.0, 0.5));
    }

    #[test]
    fn suit_centers_and_corners() {
        for s in Suit::ALL {
            assert!(suit_ink(s, 0.0, 0.0) || suit_ink(s, 0.0, 0.3), "{s}");
            assert!(!suit_ink(s, -0.99, 0.99), "{s}");
        }
        // heart points down, spade points up
        assert!(suit_ink(Suit::Heart, 0.0, 0.95));
        assert!(!suit_ink(Suit::Heart, 0.0, -0.98));
        assert!(suit_ink(Suit::Spade, 0.0, -0.98));
    }
}
