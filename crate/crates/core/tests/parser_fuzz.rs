//! Parser totality: no input may crash the extraction/parsing stack, and
//! canonical forms must survive a parse round-trip exactly.

use cotforge_core::envs::lake::LakeAction;
use cotforge_core::maze::{Cell, Direction};
use cotforge_core::render::PixelPoint;
use cotforge_core::verify::{
    canonical_actions, canonical_cells, canonical_coords, canonical_directions,
    canonical_permutation, composite_reward, extract_blocks, parse_answer, Answer, AnswerKind,
    GrammarMode, RewardConfig,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const KINDS: [AnswerKind; 5] = [
    AnswerKind::Cells,
    AnswerKind::PixelCoords,
    AnswerKind::Directions,
    AnswerKind::Actions,
    AnswerKind::Permutation,
];

#[test]
fn ten_thousand_random_byte_strings_never_crash() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xf022);
    for _ in 0..10_000 {
        let len = rng.gen_range(0..200);
        let bytes: Vec<u8> = (0..len).map(|_| rng.gen()).collect();
        let text = String::from_utf8_lossy(&bytes);
        for mode in [GrammarMode::ThinkRequired, GrammarMode::AnswerOnly] {
            let parsed = extract_blocks(&text, mode);
            // format_ok only with a genuine boxed block present.
            if parsed.format_ok {
                assert!(text.contains("\\boxed{"));
            }
        }
        for kind in KINDS {
            let _ = parse_answer(&text, kind);
        }
    }
}

#[test]
fn structured_noise_with_markers_never_crashes() {
    // Byte noise rarely contains the markers; interleave them explicitly.
    let mut rng = ChaCha8Rng::seed_from_u64(0xf055);
    let atoms = [
        "<think>", "</think>", "\\boxed{", "}", "{", "(1,1)", "[", "]", ",", "east", "\"Left\"",
        "-5", "7", " ", "\u{1F600}", "\\boxed{x}",
    ];
    for _ in 0..10_000 {
        let n = rng.gen_range(0..24);
        let text: String = (0..n)
            .map(|_| atoms[rng.gen_range(0..atoms.len())])
            .collect();
        for mode in [GrammarMode::ThinkRequired, GrammarMode::AnswerOnly] {
            let _ = extract_blocks(&text, mode);
        }
        for kind in KINDS {
            let _ = parse_answer(&text, kind);
        }
    }
}

proptest! {
    #[test]
    fn extraction_is_total(raw in ".*") {
        let _ = extract_blocks(&raw, GrammarMode::ThinkRequired);
        let _ = extract_blocks(&raw, GrammarMode::AnswerOnly);
    }

    #[test]
    fn parsing_is_total(raw in ".*") {
        for kind in KINDS {
            let _ = parse_answer(&raw, kind);
        }
    }

    #[test]
    fn cells_round_trip(cells in prop::collection::vec((1u32..64, 1u32..64), 1..24)) {
        let cells: Vec<Cell> = cells.into_iter().map(|(r, c)| Cell::new(r, c)).collect();
        let parsed = parse_answer(&canonical_cells(&cells), AnswerKind::Cells).unwrap();
        prop_assert_eq!(parsed, Answer::Cells(cells));
    }

    #[test]
    fn coords_round_trip(pts in prop::collection::vec((0u32..4096, 0u32..4096), 1..24)) {
        let pts: Vec<PixelPoint> = pts.into_iter().map(|(x, y)| PixelPoint::new(x, y)).collect();
        let parsed = parse_answer(&canonical_coords(&pts), AnswerKind::PixelCoords).unwrap();
        prop_assert_eq!(parsed, Answer::PixelCoords(pts));
    }

    #[test]
    fn words_round_trip(picks in prop::collection::vec(0usize..4, 1..16)) {
        let actions: Vec<LakeAction> = picks.iter().map(|&i| LakeAction::ALL[i]).collect();
        let parsed = parse_answer(&canonical_actions(&actions), AnswerKind::Actions).unwrap();
        prop_assert_eq!(parsed, Answer::Actions(actions));

        let dirs: Vec<Direction> = picks.iter().map(|&i| Direction::ALL[i]).collect();
        let parsed = parse_answer(&canonical_directions(&dirs), AnswerKind::Directions).unwrap();
        prop_assert_eq!(parsed, Answer::Directions(dirs));
    }

    #[test]
    fn permutations_round_trip(perm in prop::collection::vec(0u32..1000, 1..32)) {
        let parsed = parse_answer(&canonical_permutation(&perm), AnswerKind::Permutation).unwrap();
        prop_assert_eq!(parsed, Answer::Permutation(perm));
    }

    #[test]
    fn reward_total_is_bounded_and_monotone(
        alpha in 0.0f64..=1.0,
        acc in 0u8..=1,
        fmt in 0u8..=1,
    ) {
        let cfg = RewardConfig::new(alpha).unwrap();
        let r = composite_reward(acc, fmt, &cfg);
        prop_assert!((0.0..=1.0).contains(&r.total));
        // Monotone non-decreasing in each component.
        let more_acc = composite_reward(1, fmt, &cfg);
        let more_fmt = composite_reward(acc, 1, &cfg);
        prop_assert!(more_acc.total >= r.total);
        prop_assert!(more_fmt.total >= r.total);
    }
}
