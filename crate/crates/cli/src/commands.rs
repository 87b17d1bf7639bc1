use std::fs;
use std::path::{Path, PathBuf};

use cardvision::cards::{deck, Rank, Suit};
use cardvision::detector::{annotate, detect, format_report, read_labels};
use cardvision::eval::{detection_suite, scale_sweep, score_scene, suit_rates, EvalReport};
use cardvision::image::{read_rgb, to_grayscale, write_gray, write_rgb, GrayImage};
use cardvision::semantics::read_card;
use cardvision::synth::{format_truth, parse_truth, render_card, render_scene, SceneSpec};
use cardvision::templates::{build_templates, LabeledCard, TemplateSet};

use crate::config::Config;
use crate::error::{io_err, CliError, CliResult};

/// Card list read by `templates build`: `file<TAB>rank<TAB>suit` per line,
/// file names relative to the cards directory.
pub const CARDS_MANIFEST: &str = "cards.tsv";

/// Scene and truth pair extensions used by `synth --suite` and `eval`.
pub const SCENE_EXT: &str = "ppm";
pub const TRUTH_EXT: &str = "tsv";

fn write_text(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|e| io_err(path, e))
}

fn create_dir(path: &Path) -> CliResult<()> {
    fs::create_dir_all(path).map_err(|e| io_err(path, e))
}

/// Any PNM as gray, through the same luma weights as the detector.
fn read_any_gray(path: &Path) -> CliResult<GrayImage> {
    Ok(to_grayscale(&read_rgb(path)?))
}

fn load_templates(dir: &Path) -> CliResult<TemplateSet> {
    Ok(TemplateSet::load(dir)?)
}

/// Prints to `path`, or stdout when absent.
fn emit(text: &str, path: Option<&Path>) -> CliResult<()> {
    match path {
        Some(p) => write_text(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn detect_cmd(
    image: &Path,
    templates: &Path,
    out: Option<&Path>,
    report: Option<&Path>,
    cfg: &Config,
) -> CliResult<()> {
    let img = read_rgb(image)?;
    let templates = load_templates(templates)?;
    let mut dets = detect(&img, &templates, &cfg.detector)?;
    read_labels(&mut dets, &templates, &cfg.semantics);
    if let Some(out) = out {
        write_rgb(out, &annotate(&img, &dets))?;
    }
    emit(&format_report(&dets), report)
}

pub fn read_cmd(image: &Path, templates: &Path, cfg: &Config) -> CliResult<String> {
    let card = read_any_gray(image)?;
    let templates = load_templates(templates)?;
    let l = read_card(&card, &templates, &cfg.semantics)?;
    Ok(format!(
        "rank={} suit={} rank_score={:.4} suit_score={:.4}",
        l.rank.label(),
        l.suit.name(),
        l.rank_score,
        l.suit_score
    ))
}

fn parse_cards_manifest(dir: &Path) -> CliResult<Vec<LabeledCard>> {
    let path = dir.join(CARDS_MANIFEST);
    let text = fs::read_to_string(&path).map_err(|e| io_err(&path, e))?;
    let mut cards = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim_end();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = |msg: String| CliError::Io(format!("{}:{}: {msg}", path.display(), i + 1));
        let cols: Vec<&str> = line.split('\t').collect();
        let [file, rank, suit] = cols[..] else {
            return Err(bad(format!("expected file, rank and suit, got {} fields", cols.len())));
        };
        let rank: Rank = rank.parse().map_err(|e: cardvision::Error| bad(e.to_string()))?;
        let suit: Suit = suit.parse().map_err(|e: cardvision::Error| bad(e.to_string()))?;
        let image = read_any_gray(&dir.join(file))?;
        cards.push(LabeledCard { rank, suit, image });
    }
    Ok(cards)
}

pub fn templates_build_cmd(cards_dir: &Path, out: &Path, cfg: &Config) -> CliResult<()> {
    let cards = parse_cards_manifest(cards_dir)?;
    let set = build_templates(&cards, cfg.detector.edge_strip_width, &cfg.semantics)?;
    set.save(out)?;
    Ok(())
}

pub fn synth_scene_cmd(spec: &Path, out: &Path, truth: Option<&Path>, seed: Option<u64>) -> CliResult<()> {
    let text = fs::read_to_string(spec).map_err(|e| io_err(spec, e))?;
    let mut spec: SceneSpec = text
        .parse()
        .map_err(|e: cardvision::Error| CliError::Usage(format!("{}: {e}", spec.display())))?;
    if let (Some(seed), Some(j)) = (seed, spec.jitter.as_mut()) {
        j.seed = seed;
    }
    let (img, entries) = render_scene(&spec)?;
    write_rgb(out, &img)?;
    if let Some(truth) = truth {
        write_text(truth, &format_truth(&entries))?;
    }
    Ok(())
}

/// Writes every card of the deck as a PGM plus the cards manifest.
pub fn synth_deck_cmd(out: &Path, scale: f64) -> CliResult<()> {
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(CliError::Usage(format!("scale must be > 0, got {scale}")));
    }
    create_dir(out)?;
    let mut manifest = String::new();
    for (rank, suit) in deck() {
        let file = format!("{}_{}.pgm", rank.label(), suit.name());
        write_gray(out.join(&file), &render_card(rank, suit, scale))?;
        manifest.push_str(&format!("{file}\t{}\t{}\n", rank.label(), suit.name()));
    }
    write_text(&out.join(CARDS_MANIFEST), &manifest)
}

/// Writes the built-in detection suite: spec, scene and truth per scene.
pub fn synth_suite_cmd(out: &Path) -> CliResult<()> {
    create_dir(out)?;
    for (name, spec) in detection_suite() {
        let (img, truth) = render_scene(&spec)?;
        write_text(&out.join(format!("{name}.scene")), &spec.to_string())?;
        write_rgb(out.join(format!("{name}.{SCENE_EXT}")), &img)?;
        write_text(&out.join(format!("{name}.{TRUTH_EXT}")), &format_truth(&truth))?;
    }
    Ok(())
}

/// `(name, scene, truth)` for every scene image in `dir`, sorted by name.
fn scene_pairs(dir: &Path) -> CliResult<Vec<(String, PathBuf, PathBuf)>> {
    let entries = fs::read_dir(dir).map_err(|e| io_err(dir, e))?;
    let mut pairs = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| io_err(dir, e))?.path();
        if path.extension().and_then(|e| e.to_str()) != Some(SCENE_EXT) {
            continue;
        }
        let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or_default().to_string();
        let truth = path.with_extension(TRUTH_EXT);
        if !truth.is_file() {
            return Err(CliError::Io(format!("missing truth file {}", truth.display())));
        }
        pairs.push((name, path, truth));
    }
    pairs.sort();
    Ok(pairs)
}

pub struct EvalOptions {
    pub seed: u64,
    pub gain: f64,
    pub noise: f64,
    pub sweep_suit: Suit,
}

pub fn eval_cmd(scenes: &Path, templates: &Path, opts: &EvalOptions, cfg: &Config) -> CliResult<EvalReport> {
    let templates = load_templates(templates)?;
    let mut scores = Vec::new();
    for (name, scene, truth_path) in scene_pairs(scenes)? {
        let text = fs::read_to_string(&truth_path).map_err(|e| io_err(&truth_path, e))?;
        let truth = parse_truth(&text).map_err(|e| CliError::Io(format!("{}: {e}", truth_path.display())))?;
        let img = read_rgb(&scene)?;
        let dets = detect(&img, &templates, &cfg.detector)?;
        scores.push(score_scene(&name, &truth, &dets));
    }
    let suit_counts = suit_rates(&templates, &cfg.semantics, opts.seed, opts.gain, opts.noise)?;
    let sweep = scale_sweep(&templates, &cfg.semantics, opts.sweep_suit);
    Ok(EvalReport {
        scenes: scores,
        suit_counts,
        sweep,
    })
}
