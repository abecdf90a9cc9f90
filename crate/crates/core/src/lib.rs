//! Generator–verifier toolkit for grid-based visual-reasoning benchmarks.
//!
//! This crate builds the full data side of a maze-navigation benchmark plus
//! two companion tasks (FrozenLake, 3x3 jigsaw):
//!
//! - [`maze`]: perfect-maze generation, solving, and path validation
//! - [`render`]: deterministic RGBA rasterization and the line-drawing image
//!   update used by visual reasoning traces
//! - [`cot`]: synthesis of four chain-of-thought trace formats
//!   (L-CoT, G-CoT, G-CoT-least, V-CoT) with rule-checked consistency
//! - [`verify`]: total parsers for model output and the composite
//!   accuracy/format reward
//! - [`envs`]: FrozenLake and jigsaw generation and verification
//! - [`eval`]: dataset split manifests, pass@k, and per-size accuracy
//!
//! Everything here is pure and deterministic: identical inputs (including
//! seeds) produce identical values, byte-identical serializations, and
//! identical image content hashes. The crate is `no_std` + `alloc`; file IO,
//! PNG encoding, and the optional remote elaboration client live in the
//! companion `cotforge` crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod cot;
pub mod dataset;
pub mod elaborate;
pub mod envs;
pub mod eval;
pub mod hash;
pub mod maze;
pub mod render;
pub mod verify;
