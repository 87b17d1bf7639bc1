//! Text forms of scene specs and ground truth.
//!
//! A scene spec is one record per line; `#` starts a comment.
//!
//! ```text
//! canvas 640 480
//! background 20 90 40
//! jitter seed=7 gain=0.2 noise=4
//! card x=120 y=140 angle=30 scale=1 rank=K suit=heart
//! rect x=400 y=120 angle=0 scale=1 w=120 h=120 color=150,180,240
//! disk x=520 y=360 scale=1 r=50 color=230,200,40
//! ```
//!
//! `canvas` is required; `angle` and `scale` default to 0 and 1.
//! Ground truth is tab-separated with a header row.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use super::{Jitter, SceneObject, SceneSpec, Shape, TruthClass, TruthEntry, FELT};
use crate::error::{Error, Result};

fn err(line: usize, msg: impl Into<String>) -> Error {
    Error::SceneSpec {
        line,
        msg: msg.into(),
    }
}

struct Fields<'a> {
    line: usize,
    map: HashMap<&'a str, &'a str>,
}

impl<'a> Fields<'a> {
    fn parse(line: usize, tokens: &[&'a str]) -> Result<Self> {
        let mut map = HashMap::new();
        for t in tokens {
            let (k, v) = t
                .split_once('=')
                .ok_or_else(|| err(line, format!("expected key=value, got {t:?}")))?;
            if map.insert(k, v).is_some() {
                return Err(err(line, format!("duplicate key {k:?}")));
            }
        }
        Ok(Fields { line, map })
    }

    fn take<T: FromStr>(&mut self, key: &str, default: Option<T>) -> Result<T> {
        match self.map.remove(key) {
            Some(v) => v
                .parse()
                .map_err(|_| err(self.line, format!("bad value {v:?} for {key}"))),
            None => default.ok_or_else(|| err(self.line, format!("missing {key}"))),
        }
    }

    fn color(&mut self) -> Result<[u8; 3]> {
        let v = self.map.remove("color").ok_or_else(|| err(self.line, "missing color"))?;
        parse_rgb(self.line, &v.split(',').collect::<Vec<_>>())
    }

    fn finish(self) -> Result<()> {
        match self.map.keys().min() {
            Some(k) => Err(err(self.line, format!("unknown key {k:?}"))),
            None => Ok(()),
        }
    }
}

fn parse_rgb(line: usize, parts: &[&str]) -> Result<[u8; 3]> {
    if parts.len() != 3 {
        return Err(err(line, "colour needs three components"));
    }
    let mut c = [0u8; 3];
    for (dst, p) in c.iter_mut().zip(parts) {
        *dst = p
            .trim()
            .parse()
            .map_err(|_| err(line, format!("bad colour component {p:?}")))?;
    }
    Ok(c)
}

fn positive(line: usize, name: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(err(line, format!("{name} must be positive")))
    }
}

impl FromStr for SceneSpec {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut canvas = None;
        let mut background = FELT;
        let mut jitter = None;
        let mut objects = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            let tokens: Vec<&str> = content.split_whitespace().collect();
            let Some((&head, rest)) = tokens.split_first() else {
                continue;
            };
            match head {
                "canvas" => {
                    let [w, h] = rest else {
                        return Err(err(line, "canvas needs width and height"));
                    };
                    let parse = |s: &str| s.parse::<usize>().ok().filter(|&v| v > 0);
                    match (parse(w), parse(h)) {
                        (Some(w), Some(h)) => canvas = Some((w, h)),
                        _ => return Err(err(line, "canvas dimensions must be positive integers")),
                    }
                }
                "background" => background = parse_rgb(line, rest)?,
                "jitter" => {
                    let mut f = Fields::parse(line, rest)?;
                    let j = Jitter {
                        seed: f.take("seed", None)?,
                        gain: f.take("gain", Some(0.0))?,
                        noise: f.take("noise", Some(0.0))?,
                    };
                    f.finish()?;
                    if !(0.0..1.0).contains(&j.gain) || !(j.noise >= 0.0) {
                        return Err(err(line, "gain must be in [0, 1) and noise >= 0"));
                    }
                    jitter = Some(j);
                }
                "card" | "rect" | "disk" => {
                    let mut f = Fields::parse(line, rest)?;
                    let cx = f.take("x", None)?;
                    let cy = f.take("y", None)?;
                    let angle: f64 = f.take("angle", Some(0.0))?;
                    let scale = f.take("scale", Some(1.0))?;
                    if !(scale > 0.0 && scale <= 1.5) {
                        return Err(err(line, "scale must be in (0, 1.5]"));
                    }
                    let shape = match head {
                        "card" => Shape::Card {
                            rank: f.take("rank", None)?,
                            suit: f.take("suit", None)?,
                        },
                        "rect" => Shape::Rect {
                            width: positive(line, "w", f.take("w", None)?)?,
                            height: positive(line, "h", f.take("h", None)?)?,
                            color: f.color()?,
                        },
                        _ => Shape::Disk {
                            radius: positive(line, "r", f.take("r", None)?)?,
                            color: f.color()?,
                        },
                    };
                    f.finish()?;
                    if !angle.is_finite() {
                        return Err(err(line, "angle must be finite"));
                    }
                    objects.push(SceneObject {
                        shape,
                        cx,
                        cy,
                        angle,
                        scale,
                    });
                }
                other => return Err(err(line, format!("unknown record {other:?}"))),
            }
        }
        let (width, height) = canvas.ok_or_else(|| err(0, "missing canvas record"))?;
        Ok(SceneSpec {
            width,
            height,
            background,
            jitter,
            objects,
        })
    }
}

impl fmt::Display for SceneSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "canvas {} {}", self.width, self.height)?;
        let [r, g, b] = self.background;
        writeln!(f, "background {r} {g} {b}")?;
        if let Some(j) = &self.jitter {
            writeln!(f, "jitter seed={} gain={} noise={}", j.seed, j.gain, j.noise)?;
        }
        for o in &self.objects {
            let pose = format!("x={} y={} angle={} scale={}", o.cx, o.cy, o.angle, o.scale);
            match o.shape {
                Shape::Card { rank, suit } => writeln!(f, "card {pose} rank={rank} suit={suit}")?,
                Shape::Rect { width, height, color: [r, g, b] } => {
                    writeln!(f, "rect {pose} w={width} h={height} color={r},{g},{b}")?
                }
                Shape::Disk { radius, color: [r, g, b] } => {
                    writeln!(f, "disk {pose} r={radius} color={r},{g},{b}")?
                }
            }
        }
        Ok(())
    }
}

const TRUTH_HEADER: &str = "index\tclass\tx\ty\tw\th\tcx\tcy\tangle\tscale\trank\tsuit";

/// Ground truth as TSV; cards carry rank and suit, other rows `-`.
pub fn format_truth(truth: &[TruthEntry]) -> String {
    let mut out = String::from(TRUTH_HEADER);
    out.push('\n');
    for t in truth {
        let (x, y, w, h) = t.bbox;
        let (rank, suit) = match t.label {
            Some((r, s)) => (r.label().to_string(), s.name().to_string()),
            None => ("-".into(), "-".into()),
        };
        out.push_str(&format!(
            "{}\t{}\t{x}\t{y}\t{w}\t{h}\t{}\t{}\t{}\t{}\t{rank}\t{suit}\n",
            t.index,
            t.class.name(),
            t.cx,
            t.cy,
            t.angle,
            t.scale
        ));
    }
    out
}

pub fn parse_truth(text: &str) -> Result<Vec<TruthEntry>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim_end() == TRUTH_HEADER => {}
        _ => return Err(Error::Format("truth file lacks its header row".into())),
    }
    let mut out = Vec::new();
    for (i, raw) in lines {
        if raw.trim().is_empty() {
            continue;
        }
        let bad = |what: &str| Error::Format(format!("truth line {}: bad {what}", i + 1));
        let cols: Vec<&str> = raw.split('\t').collect();
        if cols.len() != 12 {
            return Err(bad("column count"));
        }
        let num = |k: usize, what: &str| cols[k].parse::<f64>().map_err(|_| bad(what));
        let int = |k: usize, what: &str| cols[k].parse::<usize>().map_err(|_| bad(what));
        let class = match cols[1] {
            "card" => TruthClass::Card,
            "rect" => TruthClass::Rect,
            "disk" => TruthClass::Disk,
            _ => return Err(bad("class")),
        };
        let label = if class == TruthClass::Card {
            Some((
                cols[10].parse().map_err(|_| bad("rank"))?,
                cols[11].parse().map_err(|_| bad("suit"))?,
            ))
        } else {
            None
        };
        out.push(TruthEntry {
            index: int(0, "index")?,
            class,
            bbox: (int(2, "x")?, int(3, "y")?, int(4, "w")?, int(5, "h")?),
            cx: num(6, "cx")?,
            cy: num(7, "cy")?,
            angle: num(8, "angle")?,
            scale: num(9, "scale")?,
            label,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cards::{Rank, Suit};
    use crate::synth::render_scene;

    const SAMPLE: &str = "\
# three objects
canvas 320 240
background 10 80 30
jitter seed=3 gain=0.1 noise=2
card x=80 y=120 angle=15 scale=0.8 rank=10 suit=diamond
rect x=200 y=70 w=60 h=50 color=150,180,240   # trailing comment
disk x=240 y=170 r=30 color=230,200,40
";

    #[test]
    fn parses_and_round_trips() {
        let spec: SceneSpec = SAMPLE.parse().unwrap();
        assert_eq!((spec.width, spec.height), (320, 240));
        assert_eq!(spec.background, [10, 80, 30]);
        assert_eq!(spec.objects.len(), 3);
        assert_eq!(
            spec.objects[0].shape,
            Shape::Card {
                rank: Rank::Ten,
                suit: Suit::Diamond
            }
        );
        assert_eq!(spec.objects[1].angle, 0.0);
        let again: SceneSpec = spec.to_string().parse().unwrap();
        assert_eq!(again, spec);
    }

    #[test]
    fn reports_bad_lines() {
        let cases = [
            ("card x=1 y=2 rank=K suit=heart", 0),
            ("canvas 10 10\nblob x=1", 2),
            ("canvas 10 10\ncard x=1 y=2 rank=Z suit=heart", 2),
            ("canvas 10 10\n\ndisk x=1 y=2 r=3", 3),
            ("canvas 10 10\nrect x=1 y=2 w=3 h=4 color=1,2,3 tilt=4", 2),
            ("canvas 10 10\ndisk x=1 y=2 r=3 scale=2 color=1,1,1", 2),
        ];
        for (text, want) in cases {
            match text.parse::<SceneSpec>() {
                Err(Error::SceneSpec { line, .. }) => assert_eq!(line, want, "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
    }

    #[test]
    fn truth_round_trips() {
        let spec: SceneSpec = SAMPLE.parse().unwrap();
        let (_, truth) = render_scene(&spec).unwrap();
        let text = format_truth(&truth);
        assert!(text.starts_with("index\tclass"));
        assert_eq!(parse_truth(&text).unwrap(), truth);
        assert!(parse_truth("nonsense").is_err());
    }
}
