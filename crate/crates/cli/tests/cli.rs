use std::fs;
use std::path::Path;
use std::process::{Command, Output};
use std::sync::OnceLock;

use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cardvision"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Deck, templates and suite rendered once for all tests.
fn workspace() -> &'static TempDir {
    static DIR: OnceLock<TempDir> = OnceLock::new();
    DIR.get_or_init(|| {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path();
        ok(&["synth", "--deck", "--out", s(&p.join("deck"))]);
        ok(&["templates", "build", s(&p.join("deck")), "--out", s(&p.join("tpl"))]);
        ok(&["synth", "--suite", "--out", s(&p.join("suite"))]);
        dir
    })
}

fn tpl() -> String {
    s(&workspace().path().join("tpl")).to_string()
}

#[test]
fn deck_manifest_lists_every_card() {
    let text = fs::read_to_string(workspace().path().join("deck/cards.tsv")).unwrap();
    assert_eq!(text.lines().count(), 52);
    assert!(text.contains("10_diamond.pgm\t10\tdiamond"));
}

#[test]
fn read_prints_label_line() {
    let card = workspace().path().join("deck/10_heart.pgm");
    let line = ok(&["read", s(&card), "--templates", &tpl()]);
    assert!(line.starts_with("rank=10 suit=heart rank_score="), "{line}");
    let fields: Vec<&str> = line.split_whitespace().collect();
    assert_eq!(fields.len(), 4);
    let score: f64 = fields[2].trim_start_matches("rank_score=").parse().unwrap();
    assert!(score >= 0.95);
}

#[test]
fn read_blank_card_is_a_pipeline_error() {
    let dir = tempfile::tempdir().unwrap();
    let blank = dir.path().join("blank.pgm");
    let mut bytes = b"P5\n140 200\n255\n".to_vec();
    bytes.extend(std::iter::repeat_n(245u8, 140 * 200));
    fs::write(&blank, bytes).unwrap();
    let out = run(&["read", s(&blank), "--templates", &tpl()]);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("empty corner"));
}

#[test]
fn detect_three_card_scene() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("three.scene");
    fs::write(
        &spec,
        "canvas 640 480\n\
         card x=120 y=150 angle=10 scale=0.8 rank=A suit=spade\n\
         card x=320 y=240 angle=-35 scale=0.8 rank=Q suit=heart\n\
         card x=520 y=330 angle=60 scale=0.8 rank=6 suit=club\n",
    )
    .unwrap();
    let scene = dir.path().join("three.ppm");
    let truth = dir.path().join("three.tsv");
    ok(&["synth", s(&spec), "--out", s(&scene), "--truth", s(&truth)]);
    assert_eq!(fs::read_to_string(&truth).unwrap().lines().count(), 4);

    let annotated = dir.path().join("out.ppm");
    let report = dir.path().join("report.tsv");
    let stdout = ok(&[
        "detect",
        s(&scene),
        "--templates",
        &tpl(),
        "--out",
        s(&annotated),
        "--report",
        s(&report),
    ]);
    assert!(stdout.is_empty());
    let text = fs::read_to_string(&report).unwrap();
    let rows: Vec<Vec<&str>> = text.lines().skip(1).map(|l| l.split('\t').collect()).collect();
    let labels: Vec<(&str, &str, &str)> = rows.iter().map(|r| (r[1], r[8], r[9])).collect();
    assert_eq!(
        labels,
        vec![("CARD", "A", "spade"), ("CARD", "Q", "heart"), ("CARD", "6", "club")]
    );
    assert!(fs::read(&annotated).unwrap().starts_with(b"P6"));

    // byte-stable across runs
    let again = ok(&["detect", s(&scene), "--templates", &tpl()]);
    assert_eq!(again, text);
}

#[test]
fn detect_blank_scene_reports_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("blank.scene");
    fs::write(&spec, "canvas 320 240\n").unwrap();
    let scene = dir.path().join("blank.ppm");
    ok(&["synth", s(&spec), "--out", s(&scene)]);
    let report = ok(&["detect", s(&scene), "--templates", &tpl()]);
    assert_eq!(report.lines().count(), 1);
    assert!(report.starts_with("index\tclass"));
}

#[test]
fn flags_and_config_reach_the_detector() {
    let scene = workspace().path().join("suite/table-a.ppm");
    // a huge minimum area removes every object
    let report = ok(&["detect", s(&scene), "--templates", &tpl(), "--min-area", "1000000"]);
    assert_eq!(report.lines().count(), 1);

    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("strict.toml");
    fs::write(&cfg, "[detector]\ntau_edge = 0.001\n").unwrap();
    let report = ok(&["detect", s(&scene), "--templates", &tpl(), "--config", s(&cfg)]);
    assert!(!report.contains("CARD"));
    assert!(report.contains("RECT"));

    let out = run(&["detect", s(&scene), "--templates", &tpl(), "--fudge", "-1"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn synth_is_deterministic_and_seedable() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("j.scene");
    fs::write(&spec, "canvas 200 150\njitter seed=3 gain=0.2 noise=4\ndisk x=100 y=75 r=30 color=200,200,40\n").unwrap();
    let render = |name: &str, extra: &[&str]| {
        let out = dir.path().join(name);
        let mut args = vec!["synth", s(&spec), "--out", s(&out)];
        args.extend_from_slice(extra);
        ok(&args);
        fs::read(out).unwrap()
    };
    let a = render("a.ppm", &[]);
    assert_eq!(a, render("b.ppm", &[]));
    assert_ne!(a, render("c.ppm", &["--seed", "4"]));
}

#[test]
fn eval_reports_table() {
    let p = workspace().path();
    let text = ok(&["eval", s(&p.join("suite")), "--templates", &tpl(), "--gain", "0", "--noise", "0"]);
    assert!(text.contains("objects correct: 16/18"), "{text}");
    assert!(text.contains("detection precision: 1.0000"));
    assert!(text.contains("overall  1.0000"));
    let sweep: Vec<&str> = text.lines().skip_while(|l| !l.starts_with("rank\t100%")).collect();
    assert_eq!(sweep.len(), 14);
    for row in &sweep[1..] {
        let cells: Vec<&str> = row.split('\t').collect();
        assert_eq!(cells.len(), 9);
        assert!(cells[1..7].iter().all(|&c| c == "Yes"), "{row}");
    }
}

#[test]
fn error_exit_codes() {
    let out = run(&[]);
    assert_eq!(code(&out), 1);
    let out = run(&["detect", "x.ppm"]);
    assert_eq!(code(&out), 1);
    let out = run(&["synth", "--deck", "--suite", "--out", "x"]);
    assert_eq!(code(&out), 1);
    assert_eq!(code(&run(&["--help"])), 0);

    let card = workspace().path().join("deck/A_spade.pgm");
    let out = run(&["read", s(&card), "--templates", "/nonexistent/tpl"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("/nonexistent/tpl"));

    let out = run(&["read", "/nonexistent/card.pgm", "--templates", &tpl()]);
    assert_eq!(code(&out), 2);

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.scene");
    fs::write(&bad, "canvas 100 100\ncard x=10 rank=A suit=spade\n").unwrap();
    let out = run(&["synth", s(&bad), "--out", s(&dir.path().join("o.ppm"))]);
    assert_eq!(code(&out), 1);

    // a scene without its truth file
    fs::copy(workspace().path().join("suite/table-a.ppm"), dir.path().join("lonely.ppm")).unwrap();
    let out = run(&["eval", s(dir.path()), "--templates", &tpl()]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("lonely.tsv"));
}

#[test]
fn templates_build_needs_every_suit() {
    let p = workspace().path();
    let dir = tempfile::tempdir().unwrap();
    let cards = dir.path();
    let manifest: String = fs::read_to_string(p.join("deck/cards.tsv"))
        .unwrap()
        .lines()
        .filter(|l| !l.ends_with("club"))
        .map(|l| format!("{l}\n"))
        .collect();
    for line in manifest.lines() {
        let file = line.split('\t').next().unwrap();
        fs::copy(p.join("deck").join(file), cards.join(file)).unwrap();
    }
    fs::write(cards.join("cards.tsv"), manifest).unwrap();
    let out = run(&["templates", "build", s(cards), "--out", s(&cards.join("t"))]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("club"));
}
