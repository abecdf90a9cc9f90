//! Chain-of-thought trace synthesis in four formats.
//!
//! - **L-CoT**: language-only steps narrating the direction sequence.
//! - **G-CoT**: steps grounded at the pixel center of every visited cell,
//!   optionally with injected wrong-branch reflections and corrections.
//! - **G-CoT-least**: no steps at all — the bare path answer carries the
//!   reasoning.
//! - **V-CoT**: interleaved text, line groundings, and per-step image
//!   frames produced by the overlay operator.
//!
//! Every synthesized trace is self-verified: the final answer parses back
//! to the ground-truth path, and elaborated narratives must re-extract to
//! the rule-derived facts or the sample is rejected.

use alloc::string::String;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::{Message, Role, Segment, SftSample, TaskKind};
use crate::elaborate::{
    extract_dir_markers, Elaborate, ElaborateError, StepFact, TemplateElaborator, TraceSkeleton,
};
use crate::maze::{path_to_directions, Cell, Maze, MazeError, Path, TaskInstance};
use crate::render::{cell_center, PixelPoint, RenderError, RenderSpec};
use crate::verify::{canonical_cells, canonical_coords};

/// The four supported trace formats.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CoTFormat {
    #[serde(rename = "lcot")]
    LCot,
    #[serde(rename = "gcot")]
    GCot,
    #[serde(rename = "gcot-least")]
    GCotLeast,
    #[serde(rename = "vcot")]
    VCot,
}

impl CoTFormat {
    pub const ALL: [CoTFormat; 4] = [
        CoTFormat::LCot,
        CoTFormat::GCot,
        CoTFormat::GCotLeast,
        CoTFormat::VCot,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CoTFormat::LCot => "lcot",
            CoTFormat::GCot => "gcot",
            CoTFormat::GCotLeast => "gcot-least",
            CoTFormat::VCot => "vcot",
        }
    }

    /// Whether assistant output for this format carries a think block.
    pub fn uses_think_block(self) -> bool {
        !matches!(self, CoTFormat::GCotLeast)
    }
}

impl core::str::FromStr for CoTFormat {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "lcot" | "l-cot" => Ok(CoTFormat::LCot),
            "gcot" | "g-cot" => Ok(CoTFormat::GCot),
            "gcot-least" | "g-cot-least" | "gcot_least" => Ok(CoTFormat::GCotLeast),
            "vcot" | "v-cot" => Ok(CoTFormat::VCot),
            _ => Err(()),
        }
    }
}

impl core::fmt::Display for CoTFormat {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SynthError {
    #[error("synthesis rejected: {0}")]
    Rejected(String),
    #[error("no wrong branch available at path index {at}")]
    NoBranch { at: usize },
    #[error("divergence index {at} out of range for a path of {path_len} cells")]
    InvalidIndex { at: usize, path_len: usize },
    #[error("grounding descriptor needs {expected} coordinates for its kind, got {got}")]
    BadArity { expected: &'static str, got: usize },
    #[error(transparent)]
    Maze(#[from] MazeError),
    #[error(transparent)]
    Render(#[from] RenderError),
    #[error(transparent)]
    Elaborate(#[from] ElaborateError),
}

/// Spatial reference type of a grounded step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GroundingKind {
    Point,
    Line,
    Region,
}

/// A typed spatial reference: one point, a two-point line, or an n ≥ 3
/// point region. Arity is enforced at construction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroundingDescriptor {
    pub kind: GroundingKind,
    pub coords: Vec<PixelPoint>,
}

impl GroundingDescriptor {
    pub fn point(p: PixelPoint) -> Self {
        Self {
            kind: GroundingKind::Point,
            coords: alloc::vec![p],
        }
    }

    pub fn line(a: PixelPoint, b: PixelPoint) -> Self {
        Self {
            kind: GroundingKind::Line,
            coords: alloc::vec![a, b],
        }
    }

    pub fn region(points: Vec<PixelPoint>) -> Result<Self, SynthError> {
        if points.len() < 3 {
            return Err(SynthError::BadArity {
                expected: "at least 3 (region)",
                got: points.len(),
            });
        }
        Ok(Self {
            kind: GroundingKind::Region,
            coords: points,
        })
    }

    /// Arity matches the kind: point = 1, line = 2, region >= 3.
    pub fn arity_ok(&self) -> bool {
        match self.kind {
            GroundingKind::Point => self.coords.len() == 1,
            GroundingKind::Line => self.coords.len() == 2,
            GroundingKind::Region => self.coords.len() >= 3,
        }
    }

    pub fn in_bounds(&self, width: u32, height: u32) -> bool {
        self.coords.iter().all(|p| p.x < width && p.y < height)
    }
}

/// One reasoning step. Field presence is format-dependent and checked by
/// [`CoTTrace::check_shape`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoTStep {
    pub text: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grounding: Option<GroundingDescriptor>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub image_ref: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoTTrace {
    pub format: CoTFormat,
    pub steps: Vec<CoTStep>,
    pub final_answer: String,
}

impl CoTTrace {
    /// Enforce the per-format step shape: language steps carry neither
    /// grounding nor image, grounded steps carry a grounding only, visual
    /// steps carry both, and the least format has zero steps.
    pub fn check_shape(&self) -> Result<(), SynthError> {
        let bad = |i: usize, why: &str| {
            Err(SynthError::Rejected(alloc::format!(
                "step {i} violates the {} shape: {why}",
                self.format
            )))
        };
        if self.format == CoTFormat::GCotLeast && !self.steps.is_empty() {
            return Err(SynthError::Rejected(
                "gcot-least traces carry no steps".into(),
            ));
        }
        for (i, step) in self.steps.iter().enumerate() {
            match self.format {
                CoTFormat::LCot => {
                    if step.grounding.is_some() || step.image_ref.is_some() {
                        return bad(i, "language steps carry neither grounding nor image");
                    }
                }
                CoTFormat::GCot => {
                    if step.grounding.is_none() || step.image_ref.is_some() {
                        return bad(i, "grounded steps carry a grounding and no image");
                    }
                }
                CoTFormat::VCot => {
                    if step.grounding.is_none() || step.image_ref.is_none() {
                        return bad(i, "visual steps carry a grounding and an image");
                    }
                }
                CoTFormat::GCotLeast => unreachable!("no steps"),
            }
            if let Some(g) = &step.grounding {
                if !g.arity_ok() {
                    return bad(i, "grounding arity does not match its kind");
                }
            }
        }
        Ok(())
    }
}

/// How an injected excursion fails.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureKind {
    WallHit,
    DeadEnd,
}

/// A deliberately wrong excursion off the truth path.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WrongBranch {
    /// Index into the truth path where the excursion starts.
    pub divergence_index: usize,
    /// Cells entered (or attempted, for a wall hit), in order.
    pub wrong_cells: Vec<Cell>,
    pub failure_kind: FailureKind,
}

/// Build a wrong branch starting at truth-path index `at`: either an
/// attempted move through a present wall, or a legal walk that ends in a
/// dead-end cell whose only exit is backward. Deterministic per seed.
pub fn inject_wrong_branch(
    maze: &Maze,
    path: &Path,
    at: usize,
    seed: u64,
) -> Result<WrongBranch, SynthError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    inject_with_rng(maze, path.cells(), at, &mut rng)
}

fn inject_with_rng(
    maze: &Maze,
    cells: &[Cell],
    at: usize,
    rng: &mut ChaCha8Rng,
) -> Result<WrongBranch, SynthError> {
    if at + 1 >= cells.len() {
        return Err(SynthError::InvalidIndex {
            at,
            path_len: cells.len(),
        });
    }
    let div = cells[at];
    let next = cells[at + 1];
    let prev = at.checked_sub(1).map(|i| cells[i]);

    let mut options: Vec<(FailureKind, Cell)> = Vec::new();
    for dir in crate::maze::Direction::ALL {
        let (dr, dc) = dir.delta();
        let row = div.row as i64 + dr;
        let col = div.col as i64 + dc;
        if !(1..=maze.n() as i64).contains(&row) || !(1..=maze.n() as i64).contains(&col) {
            continue;
        }
        let nb = Cell::new(row as u32, col as u32);
        if maze.wall_between(div, nb).expect("in grid") {
            options.push((FailureKind::WallHit, nb));
        } else if nb != next && Some(nb) != prev {
            options.push((FailureKind::DeadEnd, nb));
        }
    }
    let Some(&(kind, entry)) = options.choose(rng) else {
        return Err(SynthError::NoBranch { at });
    };
    let wrong_cells = match kind {
        FailureKind::WallHit => alloc::vec![entry],
        FailureKind::DeadEnd => {
            // Walk into the off-path subtree until a leaf; on a perfect maze
            // the walk cannot rejoin the truth path.
            let mut walked = alloc::vec![entry];
            let mut came = div;
            let mut here = entry;
            loop {
                let forward: Vec<Cell> = maze
                    .open_neighbors(here)
                    .into_iter()
                    .filter(|&c| c != came)
                    .collect();
                match forward.choose(rng) {
                    None => break,
                    Some(&chosen) => {
                        walked.push(chosen);
                        came = here;
                        here = chosen;
                    }
                }
            }
            walked
        }
    };
    Ok(WrongBranch {
        divergence_index: at,
        wrong_cells,
        failure_kind: kind,
    })
}

/// Narrate the truth path as a direction sequence. The elaborated text must
/// re-extract to exactly the rule-derived directions or the sample is
/// rejected; the final answer is the canonical cell sequence.
pub fn synth_lcot(
    instance: &TaskInstance,
    elaborator: &dyn Elaborate,
) -> Result<CoTTrace, SynthError> {
    let cells = instance.truth.cells();
    let dirs = path_to_directions(cells)?;
    let steps: Vec<StepFact> = cells
        .windows(2)
        .zip(&dirs)
        .map(|(w, &dir)| StepFact::Head {
            from: w[0],
            to: w[1],
            dir,
        })
        .collect();
    let skeleton = TraceSkeleton {
        format: CoTFormat::LCot,
        steps,
    };
    let texts = elaborator.elaborate(&skeleton)?;
    if texts.len() != skeleton.steps.len() {
        return Err(SynthError::Rejected(alloc::format!(
            "elaborator returned {} texts for {} steps",
            texts.len(),
            skeleton.steps.len()
        )));
    }
    let joined = texts.join(" ");
    if extract_dir_markers(&joined) != dirs {
        return Err(SynthError::Rejected(
            "direction markers do not re-extract to the truth sequence".into(),
        ));
    }
    let trace = CoTTrace {
        format: CoTFormat::LCot,
        steps: texts
            .into_iter()
            .map(|text| CoTStep {
                text,
                grounding: None,
                image_ref: None,
            })
            .collect(),
        final_answer: canonical_cells(cells),
    };
    trace.check_shape()?;
    Ok(trace)
}

/// A grounded trace plus how many of the requested reflections could
/// actually be placed (corridor-like instances may offer fewer).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GcotSynthesis {
    pub trace: CoTTrace,
    pub reflections_requested: u32,
    pub reflections_emitted: u32,
}

/// Ground every visited cell at its pixel center and optionally weave in
/// wrong-branch reflections, each followed by a correction step returning
/// to the divergence cell. The final answer is the coordinate sequence of
/// the truth path only.
pub fn synth_gcot(
    instance: &TaskInstance,
    spec: &RenderSpec,
    seed: u64,
    reflections: u32,
) -> Result<GcotSynthesis, SynthError> {
    let n = instance.maze.n();
    let cells = instance.truth.cells();
    let centers: Vec<PixelPoint> = cells
        .iter()
        .map(|&c| cell_center(spec, n, c))
        .collect::<Result<_, _>>()?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let divergence_candidates: Vec<usize> = (0..cells.len().saturating_sub(1)).collect();
    let mut chosen: Vec<usize> = divergence_candidates
        .choose_multiple(&mut rng, (reflections as usize).min(divergence_candidates.len()))
        .copied()
        .collect();
    chosen.sort_unstable();

    let mut facts: Vec<StepFact> = Vec::new();
    let mut emitted = 0u32;
    for (k, (&cell, &center)) in cells.iter().zip(&centers).enumerate() {
        facts.push(if k == 0 {
            StepFact::Start { cell, center }
        } else {
            StepFact::Visit { cell, center }
        });
        if !chosen.contains(&k) {
            continue;
        }
        match inject_with_rng(&instance.maze, cells, k, &mut rng) {
            Err(SynthError::NoBranch { .. }) => {} // shortfall, recorded below
            Err(other) => return Err(other),
            Ok(branch) => {
                let last = branch.wrong_cells.len() - 1;
                for (i, &wrong) in branch.wrong_cells.iter().enumerate() {
                    facts.push(StepFact::Probe {
                        to: wrong,
                        center: cell_center(spec, n, wrong)?,
                        outcome: (i == last).then_some(branch.failure_kind),
                    });
                }
                facts.push(StepFact::Backtrack {
                    to: cell,
                    center,
                });
                emitted += 1;
            }
        }
    }

    let steps = facts
        .iter()
        .enumerate()
        .map(|(i, fact)| {
            let center = match fact {
                StepFact::Start { center, .. }
                | StepFact::Visit { center, .. }
                | StepFact::Probe { center, .. }
                | StepFact::Backtrack { center, .. } => *center,
                _ => unreachable!("gcot facts are grounded"),
            };
            CoTStep {
                text: TemplateElaborator::render_fact(fact, i),
                grounding: Some(GroundingDescriptor::point(center)),
                image_ref: None,
            }
        })
        .collect();

    let trace = CoTTrace {
        format: CoTFormat::GCot,
        steps,
        final_answer: canonical_coords(&centers),
    };
    trace.check_shape()?;
    Ok(GcotSynthesis {
        trace,
        reflections_requested: reflections,
        reflections_emitted: emitted,
    })
}

/// Committed default for how many reflections a grounded trace carries:
/// 1 or 2, drawn per instance from a salted stream of its seed.
pub fn default_reflection_count(instance_seed: u64) -> u32 {
    use rand::Rng;
    ChaCha8Rng::seed_from_u64(instance_seed ^ 0x5bd1_e995_85eb_ca6b).gen_range(1..=2)
}

/// The least format: zero steps, the canonical cell-sequence answer is the
/// whole trace.
pub fn synth_gcot_least(instance: &TaskInstance) -> CoTTrace {
    CoTTrace {
        format: CoTFormat::GCotLeast,
        steps: Vec::new(),
        final_answer: canonical_cells(instance.truth.cells()),
    }
}

/// Interleave text, a line grounding for the newest segment, and a frame
/// reference per step. Frame refs follow the `{id}_step{t}.png` naming next
/// to the instance's base image; actual pixels come from
/// [`crate::render::render_trajectory_frames`].
pub fn synth_vcot(
    instance: &TaskInstance,
    spec: &RenderSpec,
    elaborator: &dyn Elaborate,
) -> Result<CoTTrace, SynthError> {
    let n = instance.maze.n();
    let cells = instance.truth.cells();
    let centers: Vec<PixelPoint> = cells
        .iter()
        .map(|&c| cell_center(spec, n, c))
        .collect::<Result<_, _>>()?;

    let facts: Vec<StepFact> = cells
        .iter()
        .enumerate()
        .map(|(t, &cell)| StepFact::Draw {
            from: (t > 0).then(|| centers[t - 1]),
            to: centers[t],
            cell,
            frame: frame_ref(&instance.image_ref, &instance.id, t + 1),
        })
        .collect();
    let skeleton = TraceSkeleton {
        format: CoTFormat::VCot,
        steps: facts,
    };
    let texts = elaborator.elaborate(&skeleton)?;
    if texts.len() != skeleton.steps.len() {
        return Err(SynthError::Rejected(alloc::format!(
            "elaborator returned {} texts for {} steps",
            texts.len(),
            skeleton.steps.len()
        )));
    }
    for (text, fact) in texts.iter().zip(&skeleton.steps) {
        if !text.contains(&fact.required_marker()) {
            return Err(SynthError::Rejected(alloc::format!(
                "step text lost its coordinate marker {}",
                fact.required_marker()
            )));
        }
    }

    let steps = texts
        .into_iter()
        .zip(&skeleton.steps)
        .map(|(text, fact)| {
            let StepFact::Draw { from, to, frame, .. } = fact else {
                unreachable!("vcot skeleton is draw facts")
            };
            CoTStep {
                text,
                grounding: Some(match from {
                    None => GroundingDescriptor::point(*to),
                    Some(from) => GroundingDescriptor::line(*from, *to),
                }),
                image_ref: Some(frame.clone()),
            }
        })
        .collect();

    let trace = CoTTrace {
        format: CoTFormat::VCot,
        steps,
        final_answer: canonical_cells(cells),
    };
    trace.check_shape()?;
    Ok(trace)
}

/// Frame path beside the instance's base image: `{dir}/{id}_step{t}.png`.
pub fn frame_ref(image_ref: &str, id: &str, t: usize) -> String {
    match image_ref.rfind('/') {
        Some(i) => alloc::format!("{}/{id}_step{t}.png", &image_ref[..i]),
        None => alloc::format!("{id}_step{t}.png"),
    }
}

/// Answer-format instruction appended to the base question for each trace
/// format; the grammar the scorer expects.
pub fn answer_instruction(format: CoTFormat) -> &'static str {
    match format {
        CoTFormat::LCot | CoTFormat::VCot => {
            " First reason inside <think></think>, then give the final answer inside \\boxed{}: \
             the full path as a list of cells [(row, col), ...]."
        }
        CoTFormat::GCot => {
            " First reason inside <think></think>, then give the final answer inside \\boxed{}: \
             the path as pixel coordinates [[x, y], ...] of each visited cell center."
        }
        CoTFormat::GCotLeast => {
            " Give only the final answer inside \\boxed{}: the full path as a list of cells \
             [(row, col), ...]."
        }
    }
}

/// Assemble the message-structured training record for a synthesized trace.
///
/// The user turn carries the base image and the question; the assistant
/// turn wraps the steps in `<think></think>` followed by the boxed answer.
/// Visual traces interleave image placeholders (loss-masked out) with step
/// text; the least format emits the boxed answer with no think block.
pub fn format_sft_sample(trace: &CoTTrace, instance: &TaskInstance) -> SftSample {
    let question = alloc::format!(
        "{}{}",
        instance.question,
        answer_instruction(trace.format)
    );
    let boxed = alloc::format!("\\boxed{{{}}}", trace.final_answer);

    let user = Message {
        role: Role::User,
        content: alloc::vec![
            Segment::image(instance.image_ref.clone()),
            Segment::text(question.clone(), false),
        ],
    };

    let mut images = alloc::vec![instance.image_ref.clone()];
    let assistant_content = match trace.format {
        CoTFormat::GCotLeast => alloc::vec![Segment::text(boxed, true)],
        CoTFormat::LCot | CoTFormat::GCot => {
            let mut think = String::from("<think>\n");
            for step in &trace.steps {
                think.push_str(&step.text);
                think.push('\n');
            }
            think.push_str("</think>\n");
            think.push_str(&boxed);
            alloc::vec![Segment::text(think, true)]
        }
        CoTFormat::VCot => {
            let mut content = Vec::with_capacity(trace.steps.len() * 2 + 1);
            for (t, step) in trace.steps.iter().enumerate() {
                let mut text = String::new();
                if t == 0 {
                    text.push_str("<think>\n");
                }
                text.push_str(&step.text);
                text.push('\n');
                content.push(Segment::text(text, true));
                let frame = step.image_ref.clone().expect("vcot steps carry frames");
                images.push(frame.clone());
                content.push(Segment::image(frame));
            }
            content.push(Segment::text(
                alloc::format!("</think>\n{boxed}"),
                true,
            ));
            content
        }
    };

    SftSample {
        id: instance.id.clone(),
        task: TaskKind::Maze,
        size: instance.maze.n(),
        seed: instance.maze.seed(),
        question,
        images,
        messages: alloc::vec![
            user,
            Message {
                role: Role::Assistant,
                content: assistant_content,
            }
        ],
        answer: trace.final_answer.clone(),
        format: trace.format,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verify::{parse_answer, Answer, AnswerKind};
    use alloc::vec;

    fn instance(n: u32, seed: u64) -> TaskInstance {
        let maze = Maze::generate(n, seed).unwrap();
        let (s, e) = maze.sample_endpoints(seed ^ 0x5eed, n as usize).unwrap();
        let truth = maze.solve(s, e).unwrap();
        TaskInstance::new(
            alloc::format!("maze_{n}x{n}_{seed:08}"),
            maze,
            s,
            e,
            "Find the path.".into(),
            alloc::format!("images/maze_{n}x{n}_{seed:08}_step0.png"),
            truth,
        )
        .unwrap()
    }

    #[test]
    fn lcot_markers_match_directions() {
        let inst = instance(4, 9);
        let trace = synth_lcot(&inst, &TemplateElaborator).unwrap();
        let dirs = path_to_directions(inst.truth.cells()).unwrap();
        assert_eq!(trace.steps.len(), dirs.len());
        let joined: String = trace
            .steps
            .iter()
            .map(|s| s.text.clone())
            .collect::<Vec<_>>()
            .join(" ");
        assert_eq!(extract_dir_markers(&joined), dirs);
        assert!(trace.check_shape().is_ok());
    }

    #[test]
    fn lcot_is_deterministic_in_template_mode() {
        let inst = instance(5, 12);
        let a = synth_lcot(&inst, &TemplateElaborator).unwrap();
        let b = synth_lcot(&inst, &TemplateElaborator).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn lcot_rejects_marker_tampering() {
        struct Scrambler;
        impl Elaborate for Scrambler {
            fn elaborate(
                &self,
                skeleton: &TraceSkeleton,
            ) -> Result<Vec<String>, ElaborateError> {
                Ok(skeleton.steps.iter().map(|_| "onward!".into()).collect())
            }
        }
        let inst = instance(4, 2);
        assert!(matches!(
            synth_lcot(&inst, &Scrambler),
            Err(SynthError::Rejected(_))
        ));
    }

    #[test]
    fn gcot_zero_reflections_grounds_every_truth_cell() {
        let inst = instance(5, 21);
        let spec = RenderSpec::default();
        let out = synth_gcot(&inst, &spec, 7, 0).unwrap();
        assert_eq!(out.reflections_emitted, 0);
        let centers: Vec<PixelPoint> = inst
            .truth
            .cells()
            .iter()
            .map(|&c| cell_center(&spec, 5, c).unwrap())
            .collect();
        let grounded: Vec<PixelPoint> = out
            .trace
            .steps
            .iter()
            .map(|s| s.grounding.as_ref().unwrap().coords[0])
            .collect();
        assert_eq!(grounded, centers);
        assert_eq!(out.trace.final_answer, canonical_coords(&centers));
    }

    #[test]
    fn gcot_reflections_keep_the_answer_on_truth() {
        let inst = instance(6, 42);
        let spec = RenderSpec::default();
        let out = synth_gcot(&inst, &spec, 3, 2).unwrap();
        assert!(out.reflections_emitted <= 2);
        // Detours never leak into the final answer.
        let parsed = parse_answer(&out.trace.final_answer, AnswerKind::PixelCoords).unwrap();
        let Answer::PixelCoords(points) = parsed else {
            panic!("coords expected")
        };
        let recovered: Vec<Cell> = points
            .iter()
            .map(|&p| crate::render::pixel_to_cell(&spec, 6, p).unwrap())
            .collect();
        assert_eq!(recovered, inst.truth.cells());
    }

    #[test]
    fn gcot_determinism_per_seed() {
        let inst = instance(6, 8);
        let spec = RenderSpec::default();
        let a = synth_gcot(&inst, &spec, 5, 2).unwrap();
        let b = synth_gcot(&inst, &spec, 5, 2).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn wrong_branches_satisfy_their_failure_kind() {
        let maze = Maze::generate(6, 42).unwrap();
        let s = Cell::new(1, 1);
        let e = Cell::new(6, 6);
        let path = maze.solve(s, e).unwrap();
        let mut found = 0;
        for at in 0..path.len() - 1 {
            for seed in 0..8 {
                let Ok(branch) = inject_wrong_branch(&maze, &path, at, seed) else {
                    continue;
                };
                found += 1;
                assert_eq!(branch.divergence_index, at);
                assert!(!branch.wrong_cells.is_empty());
                let div = path.cells()[at];
                match branch.failure_kind {
                    FailureKind::WallHit => {
                        assert_eq!(branch.wrong_cells.len(), 1);
                        assert!(maze.wall_between(div, branch.wrong_cells[0]).unwrap());
                    }
                    FailureKind::DeadEnd => {
                        // Every hop is legal and the last cell is a leaf.
                        let mut prev = div;
                        for &c in &branch.wrong_cells {
                            assert!(!maze.wall_between(prev, c).unwrap());
                            prev = c;
                        }
                        let leaf = *branch.wrong_cells.last().unwrap();
                        assert_eq!(maze.open_neighbors(leaf).len(), 1);
                    }
                }
            }
        }
        assert!(found > 0);
    }

    #[test]
    fn inject_rejects_bad_indices() {
        let maze = Maze::generate(4, 0).unwrap();
        let path = maze.solve(Cell::new(1, 1), Cell::new(4, 4)).unwrap();
        assert!(matches!(
            inject_wrong_branch(&maze, &path, path.len() - 1, 0),
            Err(SynthError::InvalidIndex { .. })
        ));
    }

    #[test]
    fn least_trace_is_bare() {
        let inst = instance(4, 33);
        let trace = synth_gcot_least(&inst);
        assert!(trace.steps.is_empty());
        let parsed = parse_answer(&trace.final_answer, AnswerKind::Cells).unwrap();
        assert_eq!(parsed, Answer::Cells(inst.truth.cells().to_vec()));
    }

    #[test]
    fn vcot_steps_match_frames() {
        let inst = instance(4, 17);
        let spec = RenderSpec::default();
        let trace = synth_vcot(&inst, &spec, &TemplateElaborator).unwrap();
        assert_eq!(trace.steps.len(), inst.truth.len());
        for (t, step) in trace.steps.iter().enumerate() {
            let expected = frame_ref(&inst.image_ref, &inst.id, t + 1);
            assert_eq!(step.image_ref.as_deref(), Some(expected.as_str()));
            let g = step.grounding.as_ref().unwrap();
            assert_eq!(
                g.kind,
                if t == 0 {
                    GroundingKind::Point
                } else {
                    GroundingKind::Line
                }
            );
        }
    }

    #[test]
    fn sample_shapes_per_format() {
        let inst = instance(4, 50);
        let spec = RenderSpec::default();

        let least = format_sft_sample(&synth_gcot_least(&inst), &inst);
        let least_text = least.messages[1].text_content();
        assert!(least_text.contains("\\boxed{"));
        assert!(!least_text.contains("<think>"));

        let lcot = format_sft_sample(&synth_lcot(&inst, &TemplateElaborator).unwrap(), &inst);
        let lcot_text = lcot.messages[1].text_content();
        assert_eq!(lcot_text.matches("<think>").count(), 1);
        assert_eq!(lcot_text.matches("\\boxed{").count(), 1);
        assert!(lcot_text.find("<think>").unwrap() < lcot_text.find("\\boxed{").unwrap());

        let vcot_trace = synth_vcot(&inst, &spec, &TemplateElaborator).unwrap();
        let vcot = format_sft_sample(&vcot_trace, &inst);
        let placeholders = vcot.messages[1]
            .content
            .iter()
            .filter(|seg| seg.is_image())
            .count();
        assert_eq!(placeholders, vcot_trace.steps.len());
        // Image segments are excluded from the loss; text segments are not.
        for seg in &vcot.messages[1].content {
            assert_eq!(seg.loss_mask, !seg.is_image());
        }
        assert_eq!(vcot.images.len(), 1 + vcot_trace.steps.len());
    }

    #[test]
    fn grounding_arity_is_enforced() {
        assert!(GroundingDescriptor::region(vec![
            PixelPoint::new(0, 0),
            PixelPoint::new(1, 0)
        ])
        .is_err());
        let g = GroundingDescriptor::region(vec![
            PixelPoint::new(0, 0),
            PixelPoint::new(1, 0),
            PixelPoint::new(1, 1),
        ])
        .unwrap();
        assert!(g.arity_ok());
        assert!(g.in_bounds(2, 2));
        assert!(!g.in_bounds(1, 1));
    }
}
