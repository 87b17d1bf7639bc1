//! Evaluation harness: detection scoring against scene ground truth,
//! per-suit recognition under photometric jitter and the rank-by-scale
//! sweep.

use std::fmt::Write as _;

use crate::cards::{deck, Rank, Suit};
use crate::detector::{Detection, ObjectClass};
use crate::error::Result;
use crate::semantics::{read_card, SemanticsConfig};
use crate::synth::{jitter_gray, render_card, Jitter, SceneObject, SceneSpec, Shape, TruthClass, TruthEntry};
use crate::templates::TemplateSet;

/// Render scales of the sweep, largest first.
pub const SWEEP_RATIOS: [f64; 8] = [1.0, 0.9, 0.8, 0.7, 0.6, 0.5, 0.4, 0.3];
/// Renders per card in the suit-rate run.
pub const RENDERS_PER_CARD: usize = 10;

/// Intersection over union of two `(x, y, w, h)` boxes.
pub fn iou(a: (usize, usize, usize, usize), b: (usize, usize, usize, usize)) -> f64 {
    let ix = (a.0 + a.2).min(b.0 + b.2).saturating_sub(a.0.max(b.0));
    let iy = (a.1 + a.3).min(b.1 + b.3).saturating_sub(a.1.max(b.1));
    let inter = (ix * iy) as f64;
    let union = (a.2 * a.3 + b.2 * b.3) as f64 - inter;
    if union > 0.0 {
        inter / union
    } else {
        0.0
    }
}

fn boxes_touch(a: (usize, usize, usize, usize), b: (usize, usize, usize, usize)) -> bool {
    a.0 < b.0 + b.2 && b.0 < a.0 + a.2 && a.1 < b.1 + b.3 && b.1 < a.1 + a.3
}

/// Groups truth entries whose boxes intersect, directly or through a chain.
/// Each group of two or more is one overlap instance. Groups are listed by
/// their first member.
pub fn overlap_groups(truth: &[TruthEntry]) -> Vec<Vec<usize>> {
    let n = truth.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn root(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            if boxes_touch(truth[i].bbox, truth[j].bbox) {
                let (a, b) = (root(&mut parent, i), root(&mut parent, j));
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; n];
    for i in 0..n {
        let r = root(&mut parent, i);
        if slot[r] == usize::MAX {
            slot[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot[r]].push(i);
    }
    groups
}

fn expected_class(class: TruthClass) -> ObjectClass {
    match class {
        TruthClass::Card => ObjectClass::Card,
        TruthClass::Rect => ObjectClass::Rect,
        TruthClass::Disk => ObjectClass::Other,
    }
}

/// Detection outcome for one scene.
#[derive(Debug, Clone, PartialEq)]
pub struct SceneScore {
    pub name: String,
    /// Truth objects, an overlap instance counting once.
    pub objects: usize,
    pub correct: usize,
    /// Objects outside overlap instances, and how many of them are correct.
    pub clean_objects: usize,
    pub clean_correct: usize,
    pub true_cards: usize,
    /// Card truths matched by a CARD detection.
    pub detected_cards: usize,
    /// CARD detections not matching any card truth.
    pub false_greens: usize,
    /// Disk truths matched by a CARD detection.
    pub disks_as_cards: usize,
}

const MATCH_IOU: f64 = 0.5;

/// Scores detections against ground truth. A truth object is correct when
/// exactly one detection overlaps it with IoU >= 0.5 and that detection has
/// the expected class (card -> CARD, rect -> RECT, disk -> OTHER). An
/// overlap instance is correct only if each member is.
pub fn score_scene(name: &str, truth: &[TruthEntry], detections: &[Detection]) -> SceneScore {
    let matches: Vec<Vec<usize>> = truth
        .iter()
        .map(|t| {
            (0..detections.len())
                .filter(|&d| iou(t.bbox, detections[d].props.bbox) >= MATCH_IOU)
                .collect()
        })
        .collect();
    let member_ok = |i: usize| match matches[i][..] {
        [d] => detections[d].class == expected_class(truth[i].class),
        _ => false,
    };
    let groups = overlap_groups(truth);
    let mut score = SceneScore {
        name: name.to_string(),
        objects: groups.len(),
        correct: 0,
        clean_objects: 0,
        clean_correct: 0,
        true_cards: truth.iter().filter(|t| t.class == TruthClass::Card).count(),
        detected_cards: 0,
        false_greens: 0,
        disks_as_cards: 0,
    };
    for g in &groups {
        let ok = g.iter().all(|&i| member_ok(i));
        score.correct += ok as usize;
        if g.len() == 1 {
            score.clean_objects += 1;
            score.clean_correct += ok as usize;
        }
    }
    for (i, t) in truth.iter().enumerate() {
        let as_card = matches[i].iter().any(|&d| detections[d].class == ObjectClass::Card);
        match t.class {
            TruthClass::Card if as_card => score.detected_cards += 1,
            TruthClass::Disk if as_card => score.disks_as_cards += 1,
            _ => {}
        }
    }
    score.false_greens = detections
        .iter()
        .filter(|d| d.class == ObjectClass::Card)
        .filter(|d| {
            !truth
                .iter()
                .any(|t| t.class == TruthClass::Card && iou(t.bbox, d.props.bbox) >= MATCH_IOU)
        })
        .count();
    score
}

fn card(x: f64, y: f64, angle: f64, scale: f64, rank: Rank, suit: Suit) -> SceneObject {
    SceneObject {
        shape: Shape::Card { rank, suit },
        cx: x,
        cy: y,
        angle,
        scale,
    }
}

fn rect(x: f64, y: f64, angle: f64, width: f64, height: f64, color: [u8; 3]) -> SceneObject {
    SceneObject {
        shape: Shape::Rect { width, height, color },
        cx: x,
        cy: y,
        angle,
        scale: 1.0,
    }
}

fn disk(x: f64, y: f64, radius: f64, color: [u8; 3]) -> SceneObject {
    SceneObject {
        shape: Shape::Disk { radius, color },
        cx: x,
        cy: y,
        angle: 0.0,
        scale: 1.0,
    }
}

/// Four 640x480 scenes holding 18 objects: 16 separate ones (8 cards,
/// 4 plain rectangles, 4 disks) and 2 pairs of overlapping cards.
pub fn detection_suite() -> Vec<(String, SceneSpec)> {
    use Rank::*;
    use Suit::*;
    let scene = |objects: Vec<SceneObject>, jitter: Option<Jitter>| SceneSpec {
        jitter,
        objects,
        ..SceneSpec::new(640, 480)
    };
    vec![
        (
            "table-a".into(),
            scene(
                vec![
                    card(110.0, 140.0, 0.0, 1.0, King, Heart),
                    card(320.0, 150.0, 25.0, 0.9, Ten, Diamond),
                    card(530.0, 140.0, -60.0, 0.8, Seven, Club),
                    rect(150.0, 370.0, 10.0, 150.0, 110.0, [150, 180, 240]),
                    disk(470.0, 360.0, 60.0, [230, 200, 40]),
                ],
                None,
            ),
        ),
        (
            "table-b".into(),
            scene(
                vec![
                    card(120.0, 250.0, 80.0, 0.85, Ace, Spade),
                    card(330.0, 120.0, -15.0, 0.75, Queen, Diamond),
                    card(520.0, 330.0, 45.0, 0.8, Four, Heart),
                    rect(320.0, 370.0, -30.0, 140.0, 100.0, [200, 200, 210]),
                    disk(520.0, 90.0, 50.0, [240, 240, 235]),
                ],
                Some(Jitter {
                    seed: 11,
                    gain: 0.05,
                    noise: 2.0,
                }),
            ),
        ),
        (
            "table-c".into(),
            scene(
                vec![
                    card(100.0, 130.0, 5.0, 0.7, Nine, Club),
                    card(530.0, 360.0, -40.0, 0.7, Two, Spade),
                    rect(300.0, 110.0, 0.0, 200.0, 60.0, [120, 60, 160]),
                    rect(110.0, 360.0, 60.0, 90.0, 130.0, [210, 180, 140]),
                    disk(330.0, 300.0, 70.0, [200, 60, 60]),
                    disk(540.0, 120.0, 45.0, [90, 140, 220]),
                ],
                Some(Jitter {
                    seed: 12,
                    gain: 0.05,
                    noise: 2.0,
                }),
            ),
        ),
        (
            "table-overlap".into(),
            scene(
                vec![
                    card(150.0, 220.0, 10.0, 0.9, Jack, Heart),
                    card(230.0, 260.0, -20.0, 0.9, Five, Club),
                    card(450.0, 210.0, 35.0, 0.85, Eight, Diamond),
                    card(500.0, 290.0, 70.0, 0.85, Six, Spade),
                ],
                None,
            ),
        ),
    ]
}

/// Recognition counts per suit over jittered renders of the full deck.
/// Render `k` of the card at deck position `i` uses seed
/// `seed + 100 * i + k`.
pub fn suit_rates(
    templates: &TemplateSet,
    cfg: &SemanticsConfig,
    seed: u64,
    gain: f64,
    noise: f64,
) -> Result<[(usize, usize); 4]> {
    let mut counts = [(0usize, 0usize); 4];
    for (i, (rank, suit)) in deck().enumerate() {
        let clean = render_card(rank, suit, 1.0);
        for k in 0..RENDERS_PER_CARD {
            let jitter = Jitter {
                seed: seed + 100 * i as u64 + k as u64,
                gain,
                noise,
            };
            let img = jitter_gray(&clean, &jitter)?;
            let ok = matches!(read_card(&img, templates, cfg), Ok(l) if l.rank == rank && l.suit == suit);
            let c = &mut counts[suit as usize];
            c.0 += ok as usize;
            c.1 += 1;
        }
    }
    Ok(counts)
}

/// `table[r][k]`: whether `Rank::ALL[r]` of `suit` rendered at
/// `SWEEP_RATIOS[k]` reads back with the right rank and suit.
pub fn scale_sweep(templates: &TemplateSet, cfg: &SemanticsConfig, suit: Suit) -> Vec<[bool; 8]> {
    Rank::ALL
        .iter()
        .map(|&rank| {
            let mut row = [false; 8];
            for (cell, &ratio) in row.iter_mut().zip(&SWEEP_RATIOS) {
                let img = render_card(rank, suit, ratio);
                *cell = matches!(read_card(&img, templates, cfg), Ok(l) if l.rank == rank && l.suit == suit);
            }
            row
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub scenes: Vec<SceneScore>,
    /// `(correct, total)` in `Suit::ALL` order.
    pub suit_counts: [(usize, usize); 4],
    /// Rows in `Rank::ALL` order, columns in `SWEEP_RATIOS` order.
    pub sweep: Vec<[bool; 8]>,
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        1.0
    } else {
        num as f64 / den as f64
    }
}

impl EvalReport {
    pub fn suit_rate(&self, suit: Suit) -> f64 {
        let (ok, n) = self.suit_counts[suit as usize];
        ratio(ok, n)
    }

    pub fn overall_rate(&self) -> f64 {
        let ok = self.suit_counts.iter().map(|c| c.0).sum();
        let n = self.suit_counts.iter().map(|c| c.1).sum();
        ratio(ok, n)
    }

    pub fn recall(&self) -> f64 {
        ratio(
            self.scenes.iter().map(|s| s.detected_cards).sum(),
            self.scenes.iter().map(|s| s.true_cards).sum(),
        )
    }

    pub fn precision(&self) -> f64 {
        let hits: usize = self.scenes.iter().map(|s| s.detected_cards).sum();
        ratio(hits, hits + self.scenes.iter().map(|s| s.false_greens).sum::<usize>())
    }

    /// Plain-text report: scene counts, suit rates and the Yes/No sweep.
    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str("scene\tobjects\tcorrect\ttrue_cards\tdetected_cards\tfalse_greens\n");
        for s in &self.scenes {
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}",
                s.name, s.objects, s.correct, s.true_cards, s.detected_cards, s.false_greens
            );
        }
        let objects: usize = self.scenes.iter().map(|s| s.objects).sum();
        let correct: usize = self.scenes.iter().map(|s| s.correct).sum();
        let _ = writeln!(out, "objects correct: {correct}/{objects}");
        let _ = writeln!(out, "detection recall: {:.4}", self.recall());
        let _ = writeln!(out, "detection precision: {:.4}", self.precision());
        out.push('\n');
        for s in Suit::ALL {
            let (ok, n) = self.suit_counts[s as usize];
            let _ = writeln!(out, "{:<8} {:.4} ({ok}/{n})", s.name(), self.suit_rate(s));
        }
        let _ = writeln!(out, "{:<8} {:.4}", "overall", self.overall_rate());
        out.push('\n');
        out.push_str("rank");
        for r in SWEEP_RATIOS {
            let _ = write!(out, "\t{:.0}%", r * 100.0);
        }
        out.push('\n');
        for (rank, row) in Rank::ALL.iter().zip(&self.sweep) {
            out.push_str(rank.label());
            for &ok in row {
                out.push_str(if ok { "\tYes" } else { "\tNo" });
            }
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn iou_cases() {
        assert_eq!(iou((0, 0, 10, 10), (0, 0, 10, 10)), 1.0);
        assert_eq!(iou((0, 0, 10, 10), (10, 0, 10, 10)), 0.0);
        assert!((iou((0, 0, 10, 10), (5, 0, 10, 10)) - 50.0 / 150.0).abs() < 1e-12);
    }

    #[test]
    fn suite_has_sixteen_clean_objects_and_two_overlaps() {
        let mut clean = 0;
        let mut overlaps = 0;
        for (_, spec) in detection_suite() {
            let (_, truth) = crate::synth::render_scene(&spec).unwrap();
            for g in overlap_groups(&truth) {
                if g.len() == 1 {
                    clean += 1;
                } else {
                    assert_eq!(g.len(), 2);
                    overlaps += 1;
                }
            }
        }
        assert_eq!((clean, overlaps), (16, 2));
    }
}
