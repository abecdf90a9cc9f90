//! Companion task environments sharing the reward interface: a deterministic
//! FrozenLake grid and a 3×3 jigsaw over tiled images.

pub mod jigsaw;
pub mod lake;

pub use jigsaw::{
    gen_jigsaw, invert_permutation, is_valid_permutation, reassemble, slice_tiles,
    synthetic_source, verify_jigsaw, JigsawError, JigsawInstance, JigsawPieces, JIGSAW_GRID,
    JIGSAW_TILES,
};
pub use lake::{
    gen_frozenlake, simulate_action_tokens, simulate_actions, LakeAction, LakeError, LakeFailure,
    LakeMap, Outcome,
};
