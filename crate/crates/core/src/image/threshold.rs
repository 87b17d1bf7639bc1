use super::{BinaryImage, GrayImage};

/// Foreground iff intensity is strictly greater than `level`.
pub fn binarize(img: &GrayImage, level: u8) -> BinaryImage {
    let data = img.pixels().iter().map(|&v| v > level).collect();
    BinaryImage::from_vec(img.width(), img.height(), data).expect("same dimensions")
}

/// Between-class variance score at one split, kept as the exact fraction
/// `diff^2 / (n0 * n1)`; the common `1/N^2` factor is dropped.
#[derive(Clone, Copy)]
struct Score {
    diff: u128,
    weight: u128,
}

impl Score {
    const ZERO: Score = Score { diff: 0, weight: 1 };

    fn greater_than(self, other: Score) -> bool {
        let lhs = self
            .diff
            .checked_mul(self.diff)
            .and_then(|d| d.checked_mul(other.weight));
        let rhs = other
            .diff
            .checked_mul(other.diff)
            .and_then(|d| d.checked_mul(self.weight));
        match (lhs, rhs) {
            (Some(l), Some(r)) => l > r,
            _ => {
                let l = (self.diff as f64).powi(2) / self.weight as f64;
                let r = (other.diff as f64).powi(2) / other.weight as f64;
                l > r
            }
        }
    }
}

/// Otsu's threshold: the level `t` maximizing the between-class variance of
/// the split `{v <= t}` / `{v > t}`. Ties resolve to the lowest level, so a
/// constant image yields 0.
pub fn otsu_level(img: &GrayImage) -> u8 {
    let mut hist = [0u64; 256];
    for &v in img.pixels() {
        hist[v as usize] += 1;
    }
    let total: u64 = hist.iter().sum();
    let total_sum: u64 = hist.iter().enumerate().map(|(v, &c)| v as u64 * c).sum();

    let mut best_level = 0u8;
    let mut best = Score::ZERO;
    let mut n0 = 0u64;
    let mut s0 = 0u64;
    for t in 0..256usize {
        n0 += hist[t];
        s0 += t as u64 * hist[t];
        let n1 = total - n0;
        if n0 == 0 || n1 == 0 {
            continue;
        }
        let s1 = total_sum - s0;
        // n1*s0 - n0*s1, in absolute value
        let a = n1 as u128 * s0 as u128;
        let b = n0 as u128 * s1 as u128;
        let score = Score {
            diff: a.abs_diff(b),
            weight: n0 as u128 * n1 as u128,
        };
        if score.greater_than(best) {
            best = score;
            best_level = t as u8;
        }
    }
    best_level
}
