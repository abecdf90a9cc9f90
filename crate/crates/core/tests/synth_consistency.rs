//! Trace synthesis audited end to end: every synthesized trace must parse
//! back to the ground truth, wrong branches must violate exactly their
//! declared failure kind under independent wall checks, and scoring a
//! sample's own assistant turn must earn full reward.

use cotforge_core::cot::{
    format_sft_sample, inject_wrong_branch, synth_gcot, synth_gcot_least, synth_lcot, synth_vcot,
    CoTFormat, FailureKind,
};
use cotforge_core::elaborate::TemplateElaborator;
use cotforge_core::eval::instance_id;
use cotforge_core::dataset::TaskKind;
use cotforge_core::maze::{Cell, Maze, TaskInstance};
use cotforge_core::render::{
    cell_center, draw_path_overlay, pixel_to_cell, render_maze, render_trajectory_frames,
    RenderSpec,
};
use cotforge_core::verify::{
    canonical_cells, extract_blocks, maze_reward_acc, parse_answer, reward_format, Answer,
    AnswerKind, GrammarMode,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn build_instance(n: u32, seed: u64) -> TaskInstance {
    let maze = Maze::generate(n, seed).unwrap();
    let (s, e) = maze
        .sample_endpoints(seed.wrapping_add(0x9e37_79b9), n as usize)
        .unwrap();
    let truth = maze.solve(s, e).unwrap();
    let id = instance_id(TaskKind::Maze, n, seed);
    TaskInstance::new(
        id.clone(),
        maze,
        s,
        e,
        format!(
            "This is a {n}x{n} maze. Reach cell ({}, {}) from cell ({}, {}).",
            e.row, e.col, s.row, s.col
        ),
        format!("images/{id}_step0.png"),
        truth,
    )
    .unwrap()
}

#[test]
fn hundred_lcot_traces_reextract_their_directions() {
    for seed in 0..100 {
        let inst = build_instance(4, seed);
        let trace = synth_lcot(&inst, &TemplateElaborator).unwrap();
        // Re-extraction happened inside synth; independently parse the
        // answer back to the truth path as well.
        let answer = parse_answer(&trace.final_answer, AnswerKind::Cells).unwrap();
        assert_eq!(answer, Answer::Cells(inst.truth.cells().to_vec()));
    }
}

#[test]
fn gcot_answers_parse_back_to_truth_despite_detours() {
    let spec = RenderSpec::default();
    for seed in 0..100 {
        let inst = build_instance(6, seed);
        let out = synth_gcot(&inst, &spec, seed ^ 0xabcd, 2).unwrap();
        let Answer::PixelCoords(points) =
            parse_answer(&out.trace.final_answer, AnswerKind::PixelCoords).unwrap()
        else {
            panic!("expected coords");
        };
        let cells: Vec<Cell> = points
            .iter()
            .map(|&p| pixel_to_cell(&spec, inst.maze.n(), p).unwrap())
            .collect();
        assert_eq!(cells, inst.truth.cells());
    }
}

#[test]
fn five_hundred_injections_pass_an_independent_wall_audit() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut audited = 0;
    while audited < 500 {
        let n = rng.gen_range(4..=8);
        let maze = Maze::generate(n, rng.gen()).unwrap();
        let (s, e) = maze.sample_endpoints(rng.gen(), n as usize).unwrap();
        let path = maze.solve(s, e).unwrap();
        let at = rng.gen_range(0..path.len() - 1);
        let Ok(branch) = inject_wrong_branch(&maze, &path, at, rng.gen()) else {
            continue;
        };
        let div = path.cells()[at];
        match branch.failure_kind {
            FailureKind::WallHit => {
                assert_eq!(branch.wrong_cells.len(), 1);
                assert!(maze.wall_between(div, branch.wrong_cells[0]).unwrap());
            }
            FailureKind::DeadEnd => {
                let mut prev = div;
                for &c in &branch.wrong_cells {
                    assert!(!maze.wall_between(prev, c).unwrap());
                    prev = c;
                }
                let leaf = *branch.wrong_cells.last().unwrap();
                // Only exit is backward.
                assert_eq!(maze.open_neighbors(leaf).len(), 1);
                // The excursion never touches the truth path.
                for c in &branch.wrong_cells {
                    assert!(!path.cells().contains(c));
                }
            }
        }
        audited += 1;
    }
}

#[test]
fn least_answers_are_shorter_than_gcot_over_a_thousand_samples() {
    let spec = RenderSpec::default();
    let mut checked = 0;
    for seed in 0..1000u64 {
        let inst = build_instance(4 + (seed % 3) as u32, seed);
        let least = synth_gcot_least(&inst);
        let gcot = synth_gcot(&inst, &spec, seed, 1).unwrap().trace;

        let least_len: usize = least.final_answer.len();
        let gcot_len: usize =
            gcot.final_answer.len() + gcot.steps.iter().map(|s| s.text.len()).sum::<usize>();
        assert!(least_len < gcot_len);

        let least_tokens = least.final_answer.split_whitespace().count();
        let gcot_tokens = gcot.final_answer.split_whitespace().count()
            + gcot
                .steps
                .iter()
                .map(|s| s.text.split_whitespace().count())
                .sum::<usize>();
        assert!(least_tokens < gcot_tokens);
        checked += 1;
    }
    assert_eq!(checked, 1000);
}

#[test]
fn vcot_final_frame_equals_full_path_overlay() {
    let spec = RenderSpec::default();
    for seed in 0..20 {
        let inst = build_instance(5, seed);
        let trace = synth_vcot(&inst, &spec, &TemplateElaborator).unwrap();
        let frames =
            render_trajectory_frames(&inst.maze, inst.start, inst.end, &spec, &inst.truth)
                .unwrap();
        assert_eq!(frames.len(), trace.steps.len());
        let base = render_maze(&inst.maze, inst.start, inst.end, &spec).unwrap();
        let full =
            draw_path_overlay(&base, &spec, inst.maze.n(), inst.truth.cells()).unwrap();
        assert_eq!(frames.last().unwrap(), &full);
    }
}

#[test]
fn scoring_a_samples_own_turn_earns_full_reward() {
    let spec = RenderSpec::default();
    for seed in 0..50 {
        let inst = build_instance(4 + (seed % 3) as u32, seed);
        for format in CoTFormat::ALL {
            let trace = match format {
                CoTFormat::LCot => synth_lcot(&inst, &TemplateElaborator).unwrap(),
                CoTFormat::GCot => synth_gcot(&inst, &spec, seed, 2).unwrap().trace,
                CoTFormat::GCotLeast => synth_gcot_least(&inst),
                CoTFormat::VCot => synth_vcot(&inst, &spec, &TemplateElaborator).unwrap(),
            };
            let sample = format_sft_sample(&trace, &inst);
            let completion = sample.messages[1].text_content();
            let mode = if format.uses_think_block() {
                GrammarMode::ThinkRequired
            } else {
                GrammarMode::AnswerOnly
            };
            let parsed = extract_blocks(&completion, mode);
            assert_eq!(reward_format(&parsed), 1, "{format} sample lost format");
            let kind = if format == CoTFormat::GCot {
                AnswerKind::PixelCoords
            } else {
                AnswerKind::Cells
            };
            let answer = parse_answer(parsed.boxed_text.as_deref().unwrap(), kind).unwrap();
            let verdict = maze_reward_acc(&inst, &spec, &answer);
            assert!(verdict.correct, "{format} sample lost accuracy");
        }
    }
}

#[test]
fn grounded_steps_sit_at_cell_centers_and_in_bounds() {
    let spec = RenderSpec::default();
    let inst = build_instance(6, 77);
    let out = synth_gcot(&inst, &spec, 5, 2).unwrap();
    let side = spec.image_side(6);
    for step in &out.trace.steps {
        let g = step.grounding.as_ref().unwrap();
        assert!(g.in_bounds(side, side));
        let p = g.coords[0];
        let cell = pixel_to_cell(&spec, 6, p).unwrap();
        assert_eq!(cell_center(&spec, 6, cell).unwrap(), p);
    }
}

#[test]
fn answer_consistency_holds_for_every_format() {
    // The canonical-cells answer of each trace equals the truth path.
    let spec = RenderSpec::default();
    for seed in 100..120 {
        let inst = build_instance(5, seed);
        let expected = canonical_cells(inst.truth.cells());
        assert_eq!(synth_gcot_least(&inst).final_answer, expected);
        assert_eq!(
            synth_lcot(&inst, &TemplateElaborator).unwrap().final_answer,
            expected
        );
        assert_eq!(
            synth_vcot(&inst, &spec, &TemplateElaborator)
                .unwrap()
                .final_answer,
            expected
        );
    }
}
