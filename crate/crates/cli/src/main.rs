mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use cardvision::cards::Suit;
use clap::{Parser, Subcommand};

use commands::EvalOptions;
use config::Config;
use error::{CliError, CliResult};

/// Playing-card detection and rank/suit recognition.
#[derive(Debug, Parser)]
#[command(name = "cardvision", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Pipeline knobs shared by every command that runs the pipeline.
#[derive(Debug, clap::Args)]
struct Knobs {
    /// TOML file overriding detector and semantics settings
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Sobel threshold multiplier for scene segmentation
    #[arg(long, value_name = "F")]
    fudge: Option<f64>,
    /// Smallest component kept, in pixels (default: 300 scaled to the scene)
    #[arg(long, value_name = "N")]
    min_area: Option<usize>,
}

impl Knobs {
    /// File settings first, then explicit flags.
    fn resolve(&self) -> CliResult<Config> {
        let mut cfg = Config::load(self.config.as_deref())?;
        if let Some(f) = self.fudge {
            cfg.detector.edge.fudge_factor = f;
        }
        if let Some(n) = self.min_area {
            cfg.detector.min_area = Some(n);
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Detect and classify objects in a scene, reading every card found
    Detect {
        image: PathBuf,
        #[arg(long, value_name = "DIR")]
        templates: PathBuf,
        /// Annotated scene (PPM)
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
        /// Detections report (default: stdout)
        #[arg(long, value_name = "PATH")]
        report: Option<PathBuf>,
        #[command(flatten)]
        knobs: Knobs,
    },
    /// Read the rank and suit of one upright card image
    Read {
        image: PathBuf,
        #[arg(long, value_name = "DIR")]
        templates: PathBuf,
        #[command(flatten)]
        knobs: Knobs,
    },
    /// Template set management
    Templates {
        #[command(subcommand)]
        action: TemplatesAction,
    },
    /// Render synthetic scenes or cards
    Synth {
        /// Scene spec to render into --out
        #[arg(required_unless_present_any = ["deck", "suite"], conflicts_with_all = ["deck", "suite"])]
        spec: Option<PathBuf>,
        /// Write the 52-card deck and its cards manifest into --out
        #[arg(long, conflicts_with = "suite")]
        deck: bool,
        /// Write the built-in detection suite into --out
        #[arg(long)]
        suite: bool,
        /// Scene image, or the output directory for --deck and --suite
        #[arg(long, value_name = "PATH")]
        out: PathBuf,
        /// Ground truth TSV for a single scene
        #[arg(long, value_name = "PATH", requires = "spec")]
        truth: Option<PathBuf>,
        /// Replace the jitter seed of the scene spec
        #[arg(long, value_name = "N", requires = "spec")]
        seed: Option<u64>,
        /// Card scale for --deck
        #[arg(long, default_value_t = 1.0, requires = "deck")]
        scale: f64,
    },
    /// Score detection on a scene corpus and recognition on jittered renders
    Eval {
        /// Directory of <name>.ppm scenes with <name>.tsv ground truth
        scenes: PathBuf,
        #[arg(long, value_name = "DIR")]
        templates: PathBuf,
        /// Report file (default: stdout)
        #[arg(long, value_name = "PATH")]
        report: Option<PathBuf>,
        /// Base seed for the jittered renders
        #[arg(long, value_name = "N", default_value_t = 0)]
        seed: u64,
        /// Gain jitter half-width
        #[arg(long, default_value_t = 0.2)]
        gain: f64,
        /// Noise standard deviation
        #[arg(long, default_value_t = 4.0)]
        noise: f64,
        /// Suit of the scale sweep
        #[arg(long, default_value = "diamond", value_parser = parse_suit)]
        sweep_suit: Suit,
        #[command(flatten)]
        knobs: Knobs,
    },
}

#[derive(Debug, Subcommand)]
enum TemplatesAction {
    /// Build a template set from a directory of labelled cards (cards.tsv)
    Build {
        cards: PathBuf,
        #[arg(long, value_name = "DIR")]
        out: PathBuf,
        #[command(flatten)]
        knobs: Knobs,
    },
}

fn parse_suit(s: &str) -> Result<Suit, String> {
    s.parse().map_err(|e: cardvision::Error| e.to_string())
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Detect {
            image,
            templates,
            out,
            report,
            knobs,
        } => commands::detect_cmd(&image, &templates, out.as_deref(), report.as_deref(), &knobs.resolve()?),
        Command::Read { image, templates, knobs } => {
            println!("{}", commands::read_cmd(&image, &templates, &knobs.resolve()?)?);
            Ok(())
        }
        Command::Templates {
            action: TemplatesAction::Build { cards, out, knobs },
        } => commands::templates_build_cmd(&cards, &out, &knobs.resolve()?),
        Command::Synth {
            spec,
            deck,
            suite,
            out,
            truth,
            seed,
            scale,
        } => match spec {
            Some(spec) => commands::synth_scene_cmd(&spec, &out, truth.as_deref(), seed),
            None if deck => commands::synth_deck_cmd(&out, scale),
            None if suite => commands::synth_suite_cmd(&out),
            None => Err(CliError::Usage("synth needs a spec, --deck or --suite".into())),
        },
        Command::Eval {
            scenes,
            templates,
            report,
            seed,
            gain,
            noise,
            sweep_suit,
            knobs,
        } => {
            let opts = EvalOptions {
                seed,
                gain,
                noise,
                sweep_suit,
            };
            let result = commands::eval_cmd(&scenes, &templates, &opts, &knobs.resolve()?)?;
            let text = result.render();
            match report {
                Some(path) => std::fs::write(&path, &text).map_err(|e| error::io_err(&path, e)),
                None => {
                    print!("{text}");
                    Ok(())
                }
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
