//! Narrative elaboration of rule-derived trace skeletons.
//!
//! Synthesis first derives the *facts* of a trace (moves, coordinates,
//! probes, frames) and only then asks an elaborator to phrase them. Every
//! fact carries a machine-readable marker that must survive elaboration
//! verbatim — direction tokens like `<<east>>`, coordinate tokens like
//! `[30, 30]` — so consistency re-extraction stays grammar-based and no
//! dataset correctness ever depends on how well a remote model writes.
//!
//! [`TemplateElaborator`] is the committed deterministic fallback; the HTTP
//! client in the companion crate implements the same trait.

use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::cot::{CoTFormat, FailureKind};
use crate::maze::{Cell, Direction};
use crate::render::PixelPoint;

/// Current wording of the committed template set. Bump when template text
/// changes so dataset determinism stays traceable.
pub const TEMPLATE_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ElaborateError {
    #[error("elaboration unavailable: {0}")]
    Unavailable(String),
    #[error("elaboration rejected: {0}")]
    Rejected(String),
}

/// One rule-derived fact of a reasoning trace.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "fact", rename_all = "snake_case")]
pub enum StepFact {
    /// First step of a coordinate-grounded trace.
    Start { cell: Cell, center: PixelPoint },
    /// A directional move (language traces).
    Head {
        from: Cell,
        to: Cell,
        dir: Direction,
    },
    /// A grounded move onto a truth-path cell.
    Visit { cell: Cell, center: PixelPoint },
    /// A wrong-branch excursion step; `outcome` is set on the step where
    /// the excursion fails.
    Probe {
        to: Cell,
        center: PixelPoint,
        outcome: Option<FailureKind>,
    },
    /// Correction step returning to the divergence cell.
    Backtrack { to: Cell, center: PixelPoint },
    /// A line-drawing step of a visual trace; `from` is absent on the
    /// initial start mark.
    Draw {
        from: Option<PixelPoint>,
        to: PixelPoint,
        cell: Cell,
        frame: String,
    },
}

impl StepFact {
    /// The marker token that elaborated text for this fact must contain.
    pub fn required_marker(&self) -> String {
        match self {
            StepFact::Head { dir, .. } => dir_marker(*dir),
            StepFact::Start { center, .. }
            | StepFact::Visit { center, .. }
            | StepFact::Probe { center, .. }
            | StepFact::Backtrack { to: _, center } => coord_marker(*center),
            StepFact::Draw { to, .. } => coord_marker(*to),
        }
    }
}

/// The facts of one trace, in step order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceSkeleton {
    pub format: CoTFormat,
    pub steps: Vec<StepFact>,
}

/// Direction marker embedded in language-trace text, e.g. `<<east>>`.
pub fn dir_marker(dir: Direction) -> String {
    alloc::format!("<<{}>>", dir.as_str())
}

/// Coordinate marker embedded in grounded-trace text, e.g. `[30, 30]`.
pub fn coord_marker(p: PixelPoint) -> String {
    alloc::format!("[{}, {}]", p.x, p.y)
}

/// All direction markers in `text`, in order of appearance.
pub fn extract_dir_markers(text: &str) -> Vec<Direction> {
    let mut out = Vec::new();
    let mut rest = text;
    while let Some(open) = rest.find("<<") {
        let after = &rest[open + 2..];
        let Some(close) = after.find(">>") else { break };
        if let Ok(dir) = after[..close].parse::<Direction>() {
            out.push(dir);
        }
        rest = &after[close + 2..];
    }
    out
}

/// Turns a skeleton into one narrative text per step.
pub trait Elaborate {
    fn elaborate(&self, skeleton: &TraceSkeleton) -> Result<Vec<String>, ElaborateError>;
}

/// The committed template set: a fixed sentence per fact, with light
/// variation keyed on the step index. Pure and deterministic.
#[derive(Debug, Clone, Default)]
pub struct TemplateElaborator;

impl TemplateElaborator {
    /// Render a single fact. Exposed so coordinate-grounded synthesis
    /// (which takes no elaborator) can share the same wording.
    pub fn render_fact(fact: &StepFact, index: usize) -> String {
        match fact {
            StepFact::Start { cell, center } => alloc::format!(
                "I start at cell ({}, {}), marked at {}.",
                cell.row,
                cell.col,
                coord_marker(*center)
            ),
            StepFact::Head { from, to, dir } => {
                let marker = dir_marker(*dir);
                match index % 3 {
                    0 => alloc::format!(
                        "From ({}, {}) I head {marker} to ({}, {}).",
                        from.row, from.col, to.row, to.col
                    ),
                    1 => alloc::format!(
                        "Next I move {marker}, arriving at ({}, {}).",
                        to.row, to.col
                    ),
                    _ => alloc::format!(
                        "The open corridor continues {marker} into ({}, {}).",
                        to.row, to.col
                    ),
                }
            }
            StepFact::Visit { cell, center } => alloc::format!(
                "I step to cell ({}, {}) at {}.",
                cell.row,
                cell.col,
                coord_marker(*center)
            ),
            StepFact::Probe { center, outcome, .. } => match outcome {
                None => alloc::format!("I explore toward {}.", coord_marker(*center)),
                Some(FailureKind::WallHit) => alloc::format!(
                    "I try {}, but a wall blocks that move.",
                    coord_marker(*center)
                ),
                Some(FailureKind::DeadEnd) => alloc::format!(
                    "I reach {}, a dead end with no way forward.",
                    coord_marker(*center)
                ),
            },
            StepFact::Backtrack { center, .. } => alloc::format!(
                "That route fails, so I backtrack to {} and continue.",
                coord_marker(*center)
            ),
            StepFact::Draw { from, to, cell, .. } => match from {
                None => alloc::format!(
                    "I mark the start at {} on the image.",
                    coord_marker(*to)
                ),
                Some(from) => alloc::format!(
                    "I draw a line from {} to {} onto cell ({}, {}) and look at the updated maze.",
                    coord_marker(*from),
                    coord_marker(*to),
                    cell.row,
                    cell.col
                ),
            },
        }
    }
}

impl Elaborate for TemplateElaborator {
    fn elaborate(&self, skeleton: &TraceSkeleton) -> Result<Vec<String>, ElaborateError> {
        Ok(skeleton
            .steps
            .iter()
            .enumerate()
            .map(|(i, fact)| Self::render_fact(fact, i))
            .collect())
    }
}
