//! Direct-definition reference implementations and shared fixtures.

#![allow(dead_code)]

use cardvision::cards::deck;
use cardvision::detector::DetectorConfig;
use cardvision::filters::{conv2_same, Kernel};
use cardvision::image::{otsu_level, BinaryImage, FloatImage, GrayImage};
use cardvision::matching::normxcorr;
use cardvision::morphology::{label_components, trace_labeled, Connectivity, LabelMap};
use cardvision::regions::region_props;
use cardvision::semantics::SemanticsConfig;
use cardvision::synth::render_card;
use cardvision::templates::{build_templates, LabeledCard, TemplateSet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const ORACLE_CASES: usize = 50;
pub const ORACLE_TOL: f64 = 1e-9;

pub fn deck_templates() -> TemplateSet {
    let cards: Vec<LabeledCard> = deck()
        .map(|(rank, suit)| LabeledCard {
            rank,
            suit,
            image: render_card(rank, suit, 1.0),
        })
        .collect();
    let strip = DetectorConfig::default().edge_strip_width;
    build_templates(&cards, strip, &SemanticsConfig::default()).expect("deck templates")
}

fn random_float(rng: &mut ChaCha8Rng, w: usize, h: usize) -> FloatImage {
    FloatImage::from_fn(w, h, |_, _| rng.random_range(0.0..255.0))
}

/// Full NCC by definition: zero padding, window mean and deviations summed
/// pixel by pixel, flat windows scoring 0.
pub fn naive_normxcorr(t: &FloatImage, img: &FloatImage) -> Vec<f64> {
    let (tw, th) = t.dimensions();
    let (iw, ih) = img.dimensions();
    let n = (tw * th) as f64;
    let tmean = t.pixels().iter().sum::<f64>() / n;
    let tss: f64 = t.pixels().iter().map(|v| (v - tmean).powi(2)).sum();
    let at = |x: isize, y: isize| {
        if x < 0 || y < 0 || x >= iw as isize || y >= ih as isize {
            0.0
        } else {
            img.get(x as usize, y as usize)
        }
    };
    let mut out = Vec::new();
    for v in 0..ih + th - 1 {
        for u in 0..iw + tw - 1 {
            let ox = u as isize - (tw as isize - 1);
            let oy = v as isize - (th as isize - 1);
            let mut window = Vec::with_capacity(tw * th);
            for j in 0..th {
                for i in 0..tw {
                    window.push(at(ox + i as isize, oy + j as isize));
                }
            }
            let fmean = window.iter().sum::<f64>() / n;
            let fss: f64 = window.iter().map(|f| (f - fmean).powi(2)).sum();
            if fss == 0.0 {
                out.push(0.0);
                continue;
            }
            let cross: f64 = window
                .iter()
                .zip(t.pixels())
                .map(|(f, tv)| (f - fmean) * (tv - tmean))
                .sum();
            out.push(cross / (fss * tss).sqrt());
        }
    }
    out
}

/// Full convolution by definition, then the centred input-sized window.
pub fn naive_conv2_same(img: &FloatImage, k: &Kernel) -> FloatImage {
    let (w, h) = img.dimensions();
    let (kw, kh) = (k.width(), k.height());
    let (fw, fh) = (w + kw - 1, h + kh - 1);
    let mut full = vec![0.0; fw * fh];
    for y in 0..h {
        for x in 0..w {
            for j in 0..kh {
                for i in 0..kw {
                    full[(y + j) * fw + x + i] += img.get(x, y) * k.get(i, j);
                }
            }
        }
    }
    let (ox, oy) = (kw / 2, kh / 2);
    FloatImage::from_fn(w, h, |x, y| full[(y + oy) * fw + x + ox])
}

/// Otsu by exhaustive search over levels, minimizing the within-class sum of
/// squares computed straight from the pixels. Returns the level and its cost.
pub fn exhaustive_otsu(img: &GrayImage) -> (u8, Vec<f64>) {
    let px: Vec<f64> = img.pixels().iter().map(|&v| v as f64).collect();
    let mut costs = vec![f64::INFINITY; 256];
    for t in 0..=255u8 {
        let (lo, hi): (Vec<f64>, Vec<f64>) = px.iter().partition(|&&v| v <= t as f64);
        if lo.is_empty() || hi.is_empty() {
            continue;
        }
        let ss = |s: &[f64]| {
            let m = s.iter().sum::<f64>() / s.len() as f64;
            s.iter().map(|v| (v - m).powi(2)).sum::<f64>()
        };
        costs[t as usize] = ss(&lo) + ss(&hi);
    }
    let mut best = 0u8;
    for t in 0..256 {
        if costs[t] < costs[best as usize] {
            best = t as u8;
        }
    }
    (best, costs)
}

/// Region measures straight from the pixel list of one label.
#[derive(Debug)]
pub struct BruteProps {
    pub area: usize,
    pub bbox: (usize, usize, usize, usize),
    pub centroid: (f64, f64),
    pub major: f64,
    pub minor: f64,
    pub eccentricity: f64,
    /// `None` when the two axes coincide.
    pub orientation: Option<f64>,
}

pub fn brute_props(labels: &LabelMap, label: u32) -> BruteProps {
    let mut pts = Vec::new();
    for y in 0..labels.height() {
        for x in 0..labels.width() {
            if labels.get(x, y) == label {
                pts.push((x as f64, y as f64));
            }
        }
    }
    let n = pts.len() as f64;
    let cx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let cy = pts.iter().map(|p| p.1).sum::<f64>() / n;
    // covariance of a union of unit squares
    let sxx = pts.iter().map(|p| (p.0 - cx).powi(2)).sum::<f64>() / n + 1.0 / 12.0;
    let syy = pts.iter().map(|p| (p.1 - cy).powi(2)).sum::<f64>() / n + 1.0 / 12.0;
    let sxy = pts.iter().map(|p| (p.0 - cx) * (p.1 - cy)).sum::<f64>() / n;
    // eigenvalues of [[sxx, sxy], [sxy, syy]]
    let tr = sxx + syy;
    let det = sxx * syy - sxy * sxy;
    let disc = (tr * tr / 4.0 - det).max(0.0).sqrt();
    let l1 = tr / 2.0 + disc;
    let l2 = (tr / 2.0 - disc).max(0.0);
    let major = 4.0 * l1.sqrt();
    let minor = 4.0 * l2.sqrt();
    let orientation = if disc < 1e-9 {
        None
    } else {
        // eigenvector of l1 in display coordinates, then y flipped to point up
        let (vx, vy) = if sxy.abs() > 0.0 {
            (l1 - syy, sxy)
        } else if sxx >= syy {
            (1.0, 0.0)
        } else {
            (0.0, 1.0)
        };
        let mut a = (-vy).atan2(vx).to_degrees();
        while a <= -90.0 {
            a += 180.0;
        }
        while a > 90.0 {
            a -= 180.0;
        }
        Some(a)
    };
    let xs = pts.iter().map(|p| p.0 as usize);
    let ys = pts.iter().map(|p| p.1 as usize);
    let (x0, x1) = (xs.clone().min().unwrap(), xs.max().unwrap());
    let (y0, y1) = (ys.clone().min().unwrap(), ys.max().unwrap());
    BruteProps {
        area: pts.len(),
        bbox: (x0, y0, x1 - x0 + 1, y1 - y0 + 1),
        centroid: (cx, cy),
        major,
        minor,
        eccentricity: (1.0 - (minor / major).powi(2)).max(0.0).sqrt(),
        orientation,
    }
}

fn angle_diff(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(180.0);
    d.min(180.0 - d)
}

/// Random blobby mask: a few filled ellipses and rectangles plus speckle.
fn random_mask(rng: &mut ChaCha8Rng) -> BinaryImage {
    let w = rng.random_range(8..=32);
    let h = rng.random_range(8..=32);
    let shapes: Vec<(f64, f64, f64, f64, f64)> = (0..rng.random_range(1..5))
        .map(|_| {
            (
                rng.random_range(0.0..w as f64),
                rng.random_range(0.0..h as f64),
                rng.random_range(1.0..12.0),
                rng.random_range(1.0..12.0),
                rng.random_range(0.0..std::f64::consts::PI),
            )
        })
        .collect();
    let speckle = rng.random_range(0.0..0.05);
    let noise: Vec<bool> = (0..w * h).map(|_| rng.random_bool(speckle)).collect();
    BinaryImage::from_fn(w, h, |x, y| {
        noise[y * w + x]
            || shapes.iter().any(|&(cx, cy, a, b, t)| {
                let (dx, dy) = (x as f64 - cx, y as f64 - cy);
                let u = dx * t.cos() + dy * t.sin();
                let v = -dx * t.sin() + dy * t.cos();
                (u / a).powi(2) + (v / b).powi(2) <= 1.0
            })
    })
}

/// Worst NCC deviation over `ORACLE_CASES` random template/image pairs.
pub fn normxcorr_oracle(seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..ORACLE_CASES {
        let (iw, ih) = (rng.random_range(6..28), rng.random_range(6..28));
        let (tw, th) = (rng.random_range(2..iw), rng.random_range(2..ih));
        let img = random_float(&mut rng, iw, ih);
        let t = random_float(&mut rng, tw, th);
        let fast = normxcorr(&t, &img).expect("valid sizes");
        let slow = naive_normxcorr(&t, &img);
        assert_eq!(fast.values().len(), slow.len());
        for (a, b) in fast.values().iter().zip(&slow) {
            worst = worst.max((a - b).abs());
        }
    }
    worst
}

pub fn conv2_oracle(seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..ORACLE_CASES {
        let (w, h) = (rng.random_range(1..30), rng.random_range(1..30));
        let (kw, kh) = (2 * rng.random_range(0..4) + 1, 2 * rng.random_range(0..4) + 1);
        let img = random_float(&mut rng, w, h);
        let weights = (0..kw * kh).map(|_| rng.random_range(-2.0..2.0)).collect();
        let k = Kernel::new(kw, kh, weights).expect("kernel");
        let fast = conv2_same(&img, &k);
        let slow = naive_conv2_same(&img, &k);
        for (a, b) in fast.pixels().iter().zip(slow.pixels()) {
            worst = worst.max((a - b).abs());
        }
    }
    worst
}

/// Worst deviation of any region measure; orientation compared in degrees.
pub fn moments_oracle(seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..ORACLE_CASES {
        let mask = random_mask(&mut rng);
        let labels = label_components(&mask, Connectivity::Eight);
        let props = region_props(&labels, &trace_labeled(&labels));
        assert_eq!(props.len(), labels.count());
        for p in &props {
            let b = brute_props(&labels, p.label);
            assert_eq!(p.area, b.area);
            assert_eq!(p.bbox, b.bbox);
            let mut errs = vec![
                (p.centroid.0 - b.centroid.0).abs(),
                (p.centroid.1 - b.centroid.1).abs(),
                (p.major_axis - b.major).abs(),
                (p.minor_axis - b.minor).abs(),
            ];
            // eccentricity and orientation are ill-conditioned for near-round blobs
            if b.major - b.minor > 1e-3 {
                errs.push((p.eccentricity - b.eccentricity).abs());
            }
            if let Some(o) = b.orientation.filter(|_| b.major - b.minor > 1e-3) {
                errs.push(angle_diff(p.orientation, o));
                assert!(p.orientation > -90.0 && p.orientation <= 90.0);
            }
            worst = errs.into_iter().fold(worst, f64::max);
        }
    }
    worst
}

/// Number of random images whose Otsu level differs from the exhaustive
/// scan other than by an exact cost tie.
pub fn otsu_oracle(seed: u64) -> usize {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut mismatches = 0;
    for case in 0..ORACLE_CASES {
        let (w, h) = (rng.random_range(1..40), rng.random_range(1..40));
        let img = match case % 3 {
            0 => GrayImage::from_fn(w, h, |_, _| rng.random()),
            // bimodal
            1 => {
                let (a, b) = (rng.random_range(0..128u8), rng.random_range(128..=255u8));
                GrayImage::from_fn(w, h, |_, _| {
                    let base = if rng.random_bool(0.4) { a } else { b };
                    base.saturating_add(rng.random_range(0..20))
                })
            }
            // few distinct levels
            _ => {
                let levels: Vec<u8> = (0..rng.random_range(1..4)).map(|_| rng.random()).collect();
                GrayImage::from_fn(w, h, |_, _| levels[rng.random_range(0..levels.len())])
            }
        };
        let got = otsu_level(&img);
        let (want, costs) = exhaustive_otsu(&img);
        let tie = costs[got as usize].is_finite()
            && (costs[got as usize] - costs[want as usize]).abs() <= 1e-9 * costs[want as usize].max(1.0);
        let constant = costs.iter().all(|c| c.is_infinite());
        if got != want && !tie && !(constant && got == 0) {
            mismatches += 1;
        }
    }
    mismatches
}
