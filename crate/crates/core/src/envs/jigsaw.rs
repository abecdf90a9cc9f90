//! 3×3 jigsaw: slice an image into nine tiles, shuffle them with a seeded
//! permutation, and verify reassembly answers.
//!
//! Answer semantics: `answer[p]` is the 1-based index of the *shuffled* tile
//! that belongs at board position `p`, with positions enumerated in
//! raster-scan order (left to right, top to bottom). The opposite reading
//! ("where did tile p go") is its inverse; see [`invert_permutation`].

use alloc::string::String;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::render::Image;

pub const JIGSAW_GRID: u32 = 3;
pub const JIGSAW_TILES: usize = 9;

/// Minimum tile side after cropping.
const MIN_TILE_PX: u32 = 3;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum JigsawError {
    #[error("source image {width}x{height} is too small: tiles need at least {MIN_TILE_PX}px per side")]
    ImageTooSmall { width: u32, height: u32 },
    #[error("expected {JIGSAW_TILES} tiles, got {0}")]
    WrongTileCount(usize),
    #[error("tiles have mismatched dimensions")]
    MismatchedTiles,
    #[error("{0:?} is not a permutation of 1..=9")]
    NotAPermutation(Vec<u32>),
}

/// A shuffled jigsaw task. Tiles are stored as refs (filenames) so the
/// record can travel in JSONL; the pixel data lives in [`JigsawPieces`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JigsawInstance {
    pub source_image_ref: String,
    pub shuffled_tiles: Vec<String>,
    pub truth_permutation: Vec<u32>,
}

/// A generated jigsaw with its pixel data: the shuffled tile images in ref
/// order and the cropped source they reassemble to.
#[derive(Debug, Clone)]
pub struct JigsawPieces {
    pub instance: JigsawInstance,
    pub tiles: Vec<Image>,
    pub cropped_source: Image,
}

/// Slice a source image into nine equal tiles in raster order.
///
/// Crop rule: the source is cropped top-left-anchored to the largest
/// dimensions divisible by 3 before slicing; the cropped source is returned
/// alongside the tiles. Images with tiles under 3px per side are rejected.
pub fn slice_tiles(source: &Image) -> Result<(Vec<Image>, Image), JigsawError> {
    let too_small = JigsawError::ImageTooSmall {
        width: source.width(),
        height: source.height(),
    };
    let tile_w = source.width() / JIGSAW_GRID;
    let tile_h = source.height() / JIGSAW_GRID;
    if tile_w < MIN_TILE_PX || tile_h < MIN_TILE_PX {
        return Err(too_small);
    }
    let cropped = source
        .crop(0, 0, tile_w * JIGSAW_GRID, tile_h * JIGSAW_GRID)
        .expect("crop within bounds");
    let mut tiles = Vec::with_capacity(JIGSAW_TILES);
    for row in 0..JIGSAW_GRID {
        for col in 0..JIGSAW_GRID {
            tiles.push(
                cropped
                    .crop(col * tile_w, row * tile_h, tile_w, tile_h)
                    .expect("tile within bounds"),
            );
        }
    }
    Ok((tiles, cropped))
}

/// Generate a jigsaw with a seeded shuffle. Deterministic per seed; tile
/// refs are `{id}_tile{k}.png` for k = 1..=9 in shuffled order.
pub fn gen_jigsaw(
    source: &Image,
    source_ref: &str,
    id: &str,
    seed: u64,
) -> Result<JigsawPieces, JigsawError> {
    let mut order: Vec<usize> = (0..JIGSAW_TILES).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);
    gen_jigsaw_with_order(source, source_ref, id, &order)
}

/// As [`gen_jigsaw`] but with an explicit shuffle order: shuffled slot `j`
/// receives original tile `order[j]` (0-based).
pub fn gen_jigsaw_with_order(
    source: &Image,
    source_ref: &str,
    id: &str,
    order: &[usize],
) -> Result<JigsawPieces, JigsawError> {
    if order.len() != JIGSAW_TILES {
        return Err(JigsawError::WrongTileCount(order.len()));
    }
    let (tiles, cropped_source) = slice_tiles(source)?;
    let shuffled: Vec<Image> = order.iter().map(|&i| tiles[i].clone()).collect();

    // truth[p] = 1-based shuffled index of the tile belonging at position p.
    let mut truth = alloc::vec![0u32; JIGSAW_TILES];
    for (slot, &original) in order.iter().enumerate() {
        truth[original] = slot as u32 + 1;
    }

    let refs = (1..=JIGSAW_TILES)
        .map(|k| alloc::format!("{id}_tile{k}.png"))
        .collect();
    Ok(JigsawPieces {
        instance: JigsawInstance {
            source_image_ref: String::from(source_ref),
            shuffled_tiles: refs,
            truth_permutation: truth,
        },
        tiles: shuffled,
        cropped_source,
    })
}

/// True when `answer` is a permutation of 1..=9.
pub fn is_valid_permutation(answer: &[u32]) -> bool {
    if answer.len() != JIGSAW_TILES {
        return false;
    }
    let mut seen = [false; JIGSAW_TILES];
    for &v in answer {
        if !(1..=JIGSAW_TILES as u32).contains(&v) || seen[(v - 1) as usize] {
            return false;
        }
        seen[(v - 1) as usize] = true;
    }
    true
}

/// Rebuild the board: position p gets `tiles[truth[p] − 1]`.
pub fn reassemble(tiles: &[Image], truth: &[u32]) -> Result<Image, JigsawError> {
    if tiles.len() != JIGSAW_TILES {
        return Err(JigsawError::WrongTileCount(tiles.len()));
    }
    if !is_valid_permutation(truth) {
        return Err(JigsawError::NotAPermutation(truth.to_vec()));
    }
    let (tw, th) = (tiles[0].width(), tiles[0].height());
    if tiles.iter().any(|t| t.width() != tw || t.height() != th) {
        return Err(JigsawError::MismatchedTiles);
    }
    let mut board = Image::new(tw * JIGSAW_GRID, th * JIGSAW_GRID, [0, 0, 0, 255]);
    for (pos, &slot) in truth.iter().enumerate() {
        let row = pos as u32 / JIGSAW_GRID;
        let col = pos as u32 % JIGSAW_GRID;
        board.blit(col * tw, row * th, &tiles[(slot - 1) as usize]);
    }
    Ok(board)
}

/// 1 iff `answer` is a permutation of 1..=9 equal to the instance truth.
pub fn verify_jigsaw(instance: &JigsawInstance, answer: &[u32]) -> u8 {
    (is_valid_permutation(answer) && answer == instance.truth_permutation.as_slice()) as u8
}

/// Convert between the two index readings ("tile at position" vs "position
/// of tile"); a permutation's inverse.
pub fn invert_permutation(perm: &[u32]) -> Result<Vec<u32>, JigsawError> {
    if !is_valid_permutation(perm) {
        return Err(JigsawError::NotAPermutation(perm.to_vec()));
    }
    let mut inverse = alloc::vec![0u32; perm.len()];
    for (pos, &v) in perm.iter().enumerate() {
        inverse[(v - 1) as usize] = pos as u32 + 1;
    }
    Ok(inverse)
}

/// Seeded noise image for dataset-free runs and tests. Every pixel comes
/// from the seeded stream, so distinct tiles are near-certain.
pub fn synthetic_source(width: u32, height: u32, seed: u64) -> Image {
    use rand::RngCore;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pixels = alloc::vec![0u8; (width * height * 4) as usize];
    rng.fill_bytes(&mut pixels);
    // Force opaque alpha so encoders cannot premultiply anything away.
    for px in pixels.chunks_exact_mut(4) {
        px[3] = 255;
    }
    Image::from_rgba8(width, height, pixels).expect("sized buffer")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_order_keeps_tiles_and_truth() {
        let src = synthetic_source(96, 96, 5);
        let order: Vec<usize> = (0..9).collect();
        let pieces = gen_jigsaw_with_order(&src, "src.png", "jig", &order).unwrap();
        assert_eq!(pieces.instance.truth_permutation, alloc::vec![1, 2, 3, 4, 5, 6, 7, 8, 9]);
        let (tiles, _) = slice_tiles(&src).unwrap();
        assert_eq!(pieces.tiles, tiles);
    }

    #[test]
    fn reassembly_is_pixel_exact() {
        for seed in 0..20 {
            let src = synthetic_source(99, 66, seed);
            let pieces = gen_jigsaw(&src, "src.png", "jig", seed).unwrap();
            let board = reassemble(&pieces.tiles, &pieces.instance.truth_permutation).unwrap();
            assert_eq!(board, pieces.cropped_source);
        }
    }

    #[test]
    fn crop_rule_trims_to_multiples_of_three() {
        let src = synthetic_source(100, 67, 0);
        let (tiles, cropped) = slice_tiles(&src).unwrap();
        assert_eq!(cropped.width(), 99);
        assert_eq!(cropped.height(), 66);
        assert_eq!(tiles.len(), 9);
        assert_eq!(tiles[0].width(), 33);
        assert_eq!(tiles[0].height(), 22);
    }

    #[test]
    fn degenerate_images_are_rejected() {
        let src = synthetic_source(8, 90, 0);
        assert!(matches!(
            slice_tiles(&src),
            Err(JigsawError::ImageTooSmall { .. })
        ));
    }

    #[test]
    fn verification_requires_exact_truth() {
        let src = synthetic_source(96, 96, 3);
        let pieces = gen_jigsaw(&src, "src.png", "jig", 3).unwrap();
        let truth = pieces.instance.truth_permutation.clone();
        assert_eq!(verify_jigsaw(&pieces.instance, &truth), 1);

        let mut wrong = truth.clone();
        wrong.swap(0, 1);
        assert_eq!(verify_jigsaw(&pieces.instance, &wrong), 0);

        // Repeated index: not a permutation.
        let mut repeated = truth.clone();
        repeated[0] = repeated[1];
        assert_eq!(verify_jigsaw(&pieces.instance, &repeated), 0);
    }

    #[test]
    fn inverse_round_trips() {
        let perm = alloc::vec![7, 5, 1, 6, 8, 3, 9, 2, 4];
        let inv = invert_permutation(&perm).unwrap();
        assert_eq!(invert_permutation(&inv).unwrap(), perm);
        assert!(invert_permutation(&[1, 1, 3, 4, 5, 6, 7, 8, 9]).is_err());
    }

    #[test]
    fn shuffle_is_deterministic_per_seed() {
        let src = synthetic_source(96, 96, 11);
        let a = gen_jigsaw(&src, "s", "j", 11).unwrap();
        let b = gen_jigsaw(&src, "s", "j", 11).unwrap();
        assert_eq!(a.instance, b.instance);
        assert_eq!(a.tiles, b.tiles);
    }
}
