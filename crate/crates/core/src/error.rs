use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("image is {width}x{height}, need at least {min_width}x{min_height}")]
    ImageTooSmall {
        width: usize,
        height: usize,
        min_width: usize,
        min_height: usize,
    },

    #[error("dimension mismatch: {left:?} vs {right:?}")]
    DimensionMismatch {
        left: (usize, usize),
        right: (usize, usize),
    },

    #[error("template is constant; normalized correlation is undefined")]
    ConstantTemplate,

    #[error("template {template:?} must be strictly smaller than image {image:?}")]
    TemplateTooLarge {
        template: (usize, usize),
        image: (usize, usize),
    },

    /// No glyph foreground survived corner preprocessing.
    #[error("empty corner: no rank/suit foreground found")]
    EmptyCorner,

    #[error("low confidence: rank score {rank_score:.4}, suit score {suit_score:.4}")]
    LowConfidence { rank_score: f64, suit_score: f64 },

    #[error("missing coverage: no card for {0}")]
    MissingCoverage(String),

    #[error("degenerate glyph for {0}: extracted mask is constant")]
    DegenerateGlyph(String),

    #[error("template set: {0}")]
    Templates(String),

    #[error("missing file {}", .0.display())]
    MissingFile(PathBuf),

    #[error("manifest {}:{line}: {msg}", path.display())]
    Manifest {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("scene spec line {line}: {msg}")]
    SceneSpec { line: usize, msg: String },

    #[error("object {index} does not fit inside the {width}x{height} canvas")]
    ObjectOutOfCanvas {
        index: usize,
        width: usize,
        height: usize,
    },

    #[error("image format: {0}")]
    Format(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for failures of the recognition pipeline itself (as opposed to
    /// bad input or I/O).
    pub fn is_pipeline_failure(&self) -> bool {
        matches!(self, Error::EmptyCorner | Error::LowConfidence { .. })
    }
}
