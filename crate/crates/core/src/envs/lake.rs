//! Deterministic FrozenLake: reach the gift from the start without stepping
//! into a hole. Slipping is identically zero — every action moves exactly
//! one cell, and moves off the grid keep the current position.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::maze::Cell;

/// Resampling attempts before lake generation gives up.
pub const LAKE_RETRY_BUDGET: usize = 1000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LakeError {
    #[error("lake side length must be at least 2, got {0}")]
    InvalidSize(u32),
    #[error("{holes} holes cannot fit on a {n}x{n} lake (max {max})")]
    TooManyHoles { n: u32, holes: usize, max: usize },
    #[error("no solvable lake found after {0} attempts")]
    Exhausted(usize),
    #[error("start or gift placed on a hole")]
    EndpointOnHole,
    #[error("malformed lake text: {0}")]
    Parse(String),
}

/// The four moves, in the conventional action order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LakeAction {
    Left,
    Down,
    Right,
    Up,
}

impl LakeAction {
    pub const ALL: [LakeAction; 4] = [
        LakeAction::Left,
        LakeAction::Down,
        LakeAction::Right,
        LakeAction::Up,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            LakeAction::Left => "Left",
            LakeAction::Down => "Down",
            LakeAction::Right => "Right",
            LakeAction::Up => "Up",
        }
    }

    /// Case-insensitive parse of an action word.
    pub fn parse(token: &str) -> Option<LakeAction> {
        match token.to_ascii_lowercase().as_str() {
            "left" => Some(LakeAction::Left),
            "down" => Some(LakeAction::Down),
            "right" => Some(LakeAction::Right),
            "up" => Some(LakeAction::Up),
            _ => None,
        }
    }

    fn delta(self) -> (i64, i64) {
        match self {
            LakeAction::Left => (0, -1),
            LakeAction::Down => (1, 0),
            LakeAction::Right => (0, 1),
            LakeAction::Up => (-1, 0),
        }
    }
}

impl core::fmt::Display for LakeAction {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// An n×n lake. Cells are 1-based `(row, col)` like the maze grid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LakeMap {
    n: u32,
    start: Cell,
    gift: Cell,
    holes: BTreeSet<Cell>,
    seed: u64,
}

impl LakeMap {
    /// Construct and validate: endpoints in grid and not on holes, holes in
    /// grid. Solvability is not required here (tests build unsolvable maps);
    /// the generator only emits solvable ones.
    pub fn new(
        n: u32,
        start: Cell,
        gift: Cell,
        holes: BTreeSet<Cell>,
        seed: u64,
    ) -> Result<Self, LakeError> {
        if n < 2 {
            return Err(LakeError::InvalidSize(n));
        }
        let in_grid =
            |c: Cell| (1..=n).contains(&c.row) && (1..=n).contains(&c.col);
        if !in_grid(start) || !in_grid(gift) || !holes.iter().all(|&h| in_grid(h)) {
            return Err(LakeError::Parse("cell outside the grid".into()));
        }
        if holes.contains(&start) || holes.contains(&gift) {
            return Err(LakeError::EndpointOnHole);
        }
        Ok(Self {
            n,
            start,
            gift,
            holes,
            seed,
        })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn start(&self) -> Cell {
        self.start
    }

    pub fn gift(&self) -> Cell {
        self.gift
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn is_hole(&self, cell: Cell) -> bool {
        self.holes.contains(&cell)
    }

    pub fn holes(&self) -> impl Iterator<Item = Cell> + '_ {
        self.holes.iter().copied()
    }

    /// Breadth-first search over non-hole cells; `Some(actions)` is the
    /// shortest action list from start to gift (expansion order
    /// Left, Down, Right, Up).
    pub fn solve(&self) -> Option<Vec<LakeAction>> {
        if self.start == self.gift {
            return Some(Vec::new());
        }
        let mut parent: BTreeMap<Cell, (Cell, LakeAction)> = BTreeMap::new();
        let mut seen = BTreeSet::new();
        let mut queue = VecDeque::new();
        seen.insert(self.start);
        queue.push_back(self.start);
        while let Some(here) = queue.pop_front() {
            for action in LakeAction::ALL {
                let next = self.step(here, action);
                if next == here || self.holes.contains(&next) || !seen.insert(next) {
                    continue;
                }
                parent.insert(next, (here, action));
                if next == self.gift {
                    let mut actions = Vec::new();
                    let mut cursor = next;
                    while cursor != self.start {
                        let (prev, action) = parent[&cursor];
                        actions.push(action);
                        cursor = prev;
                    }
                    actions.reverse();
                    return Some(actions);
                }
                queue.push_back(next);
            }
        }
        None
    }

    /// One deterministic step; moving off the grid keeps the position.
    fn step(&self, from: Cell, action: LakeAction) -> Cell {
        let (dr, dc) = action.delta();
        let row = (from.row as i64 + dr).clamp(1, self.n as i64) as u32;
        let col = (from.col as i64 + dc).clamp(1, self.n as i64) as u32;
        Cell::new(row, col)
    }

    /// `n` lines of `{S, F, H, G}` characters in row order.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for row in 1..=self.n {
            for col in 1..=self.n {
                let cell = Cell::new(row, col);
                out.push(if cell == self.start {
                    'S'
                } else if cell == self.gift {
                    'G'
                } else if self.holes.contains(&cell) {
                    'H'
                } else {
                    'F'
                });
            }
            out.push('\n');
        }
        out
    }

    /// Parse the text form; requires a square grid with exactly one `S` and
    /// one `G`. The seed of a parsed lake is 0.
    pub fn from_text(text: &str) -> Result<Self, LakeError> {
        let rows: Vec<&str> = text.lines().filter(|l| !l.trim().is_empty()).collect();
        let n = rows.len() as u32;
        if n < 2 {
            return Err(LakeError::InvalidSize(n));
        }
        let mut start = None;
        let mut gift = None;
        let mut holes = BTreeSet::new();
        for (r, line) in rows.iter().enumerate() {
            let line = line.trim();
            if line.chars().count() != n as usize {
                return Err(LakeError::Parse(alloc::format!(
                    "row {} has {} cells, expected {n}",
                    r + 1,
                    line.chars().count()
                )));
            }
            for (c, ch) in line.chars().enumerate() {
                let cell = Cell::new(r as u32 + 1, c as u32 + 1);
                match ch {
                    'S' if start.is_none() => start = Some(cell),
                    'G' if gift.is_none() => gift = Some(cell),
                    'F' => {}
                    'H' => {
                        holes.insert(cell);
                    }
                    _ => {
                        return Err(LakeError::Parse(alloc::format!(
                            "unexpected character `{ch}`"
                        )))
                    }
                }
            }
        }
        let start = start.ok_or_else(|| LakeError::Parse("missing S".into()))?;
        let gift = gift.ok_or_else(|| LakeError::Parse("missing G".into()))?;
        Self::new(n, start, gift, holes, 0)
    }
}

/// Generate a solvable lake: start fixed at (1,1), gift at (n,n), `holes`
/// holes sampled uniformly from the remaining cells, resampled until a
/// hole-avoiding path exists. Deterministic per seed.
pub fn gen_frozenlake(n: u32, holes: usize, seed: u64) -> Result<LakeMap, LakeError> {
    if n < 2 {
        return Err(LakeError::InvalidSize(n));
    }
    let max = (n * n - 2) as usize;
    if holes > max {
        return Err(LakeError::TooManyHoles { n, holes, max });
    }
    let start = Cell::new(1, 1);
    let gift = Cell::new(n, n);
    let candidates: Vec<Cell> = (1..=n)
        .flat_map(|row| (1..=n).map(move |col| Cell::new(row, col)))
        .filter(|&c| c != start && c != gift)
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..LAKE_RETRY_BUDGET {
        let picked: BTreeSet<Cell> = candidates
            .choose_multiple(&mut rng, holes)
            .copied()
            .collect();
        let lake = LakeMap::new(n, start, gift, picked, seed)?;
        if lake.solve().is_some() {
            return Ok(lake);
        }
    }
    Err(LakeError::Exhausted(LAKE_RETRY_BUDGET))
}

/// Why an episode failed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum LakeFailure {
    /// Stepped into a hole (step index is where it happened).
    Hole,
    /// Exhausted the action list without standing on the gift.
    NotAtGift,
    /// An action token could not be parsed.
    UnknownAction(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Outcome {
    /// Reached the gift after consuming `steps` actions.
    Success { steps: usize },
    Failure { step: usize, reason: LakeFailure },
}

impl Outcome {
    pub fn is_success(&self) -> bool {
        matches!(self, Outcome::Success { .. })
    }
}

/// Deterministically replay an action list from the start cell.
///
/// Stepping stops at the first hole (failure) and at the gift (success;
/// trailing actions are ignored, matching terminal-state semantics). With
/// the whole list consumed, the episode succeeds iff the final cell is the
/// gift. Total: never panics.
pub fn simulate_actions(lake: &LakeMap, actions: &[LakeAction]) -> Outcome {
    let mut here = lake.start();
    if here == lake.gift() {
        return Outcome::Success { steps: 0 };
    }
    for (i, &action) in actions.iter().enumerate() {
        here = lake.step(here, action);
        if lake.is_hole(here) {
            return Outcome::Failure {
                step: i + 1,
                reason: LakeFailure::Hole,
            };
        }
        if here == lake.gift() {
            return Outcome::Success { steps: i + 1 };
        }
    }
    Outcome::Failure {
        step: actions.len(),
        reason: LakeFailure::NotAtGift,
    }
}

/// As [`simulate_actions`] but over raw tokens; an unknown token fails the
/// episode at its index.
pub fn simulate_action_tokens<S: AsRef<str>>(lake: &LakeMap, tokens: &[S]) -> Outcome {
    let mut actions = Vec::with_capacity(tokens.len());
    for (i, token) in tokens.iter().enumerate() {
        match LakeAction::parse(token.as_ref()) {
            Some(a) => actions.push(a),
            None => {
                return Outcome::Failure {
                    step: i + 1,
                    reason: LakeFailure::UnknownAction(token.as_ref().to_string()),
                }
            }
        }
    }
    simulate_actions(lake, &actions)
}
