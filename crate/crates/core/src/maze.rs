//! N×N mazes with walls between adjacent cells.
//!
//! A generated maze is *perfect*: its open (absent) walls form a spanning
//! tree over the n² cells, so every cell is reachable from every other and
//! the simple path between any two cells is unique. Generation uses an
//! iterative recursive-backtracker (randomized DFS) seeded with ChaCha8, so
//! identical `(n, seed)` inputs reproduce the wall set exactly.
//!
//! Coordinates are 1-based `(row, col)` with row 1 at the top of the
//! rendered image and column 1 on the left.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Attempts before `sample_endpoints` gives up.
pub const ENDPOINT_RETRY_BUDGET: usize = 1000;

/// A 1-based grid coordinate.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(from = "(u32, u32)", into = "(u32, u32)")]
pub struct Cell {
    pub row: u32,
    pub col: u32,
}

impl Cell {
    pub const fn new(row: u32, col: u32) -> Self {
        Self { row, col }
    }

    /// True when the cells share an edge (orthogonal neighbors).
    pub fn is_adjacent(self, other: Cell) -> bool {
        let dr = self.row.abs_diff(other.row);
        let dc = self.col.abs_diff(other.col);
        dr + dc == 1
    }
}

impl From<(u32, u32)> for Cell {
    fn from((row, col): (u32, u32)) -> Self {
        Cell { row, col }
    }
}

impl From<Cell> for (u32, u32) {
    fn from(c: Cell) -> Self {
        (c.row, c.col)
    }
}

impl core::fmt::Display for Cell {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "({}, {})", self.row, self.col)
    }
}

/// A compass move between adjacent cells. Row 1 is the top row, so `North`
/// decreases the row index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    North,
    East,
    South,
    West,
}

impl Direction {
    pub const ALL: [Direction; 4] = [
        Direction::North,
        Direction::East,
        Direction::South,
        Direction::West,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Direction::North => "north",
            Direction::East => "east",
            Direction::South => "south",
            Direction::West => "west",
        }
    }

    /// Row/col delta of one step in this direction.
    pub fn delta(self) -> (i64, i64) {
        match self {
            Direction::North => (-1, 0),
            Direction::East => (0, 1),
            Direction::South => (1, 0),
            Direction::West => (0, -1),
        }
    }

    /// The direction of the move `from -> to`, if the cells are adjacent.
    pub fn between(from: Cell, to: Cell) -> Option<Direction> {
        let dr = to.row as i64 - from.row as i64;
        let dc = to.col as i64 - from.col as i64;
        match (dr, dc) {
            (-1, 0) => Some(Direction::North),
            (0, 1) => Some(Direction::East),
            (1, 0) => Some(Direction::South),
            (0, -1) => Some(Direction::West),
            _ => None,
        }
    }
}

impl core::str::FromStr for Direction {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "north" => Ok(Direction::North),
            "east" => Ok(Direction::East),
            "south" => Ok(Direction::South),
            "west" => Ok(Direction::West),
            _ => Err(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MazeError {
    #[error("maze side length must be at least 2, got {0}")]
    InvalidSize(u32),
    #[error("cell {cell} is outside the {n}x{n} grid")]
    InvalidCell { cell: Cell, n: u32 },
    #[error("no path from {0} to {1}")]
    NoPath(Cell, Cell),
    #[error("cells {0} and {1} are not adjacent")]
    NotAdjacent(Cell, Cell),
    #[error("path is empty")]
    EmptyPath,
    #[error("path revisits cell {0}")]
    RepeatedCell(Cell),
    #[error("no endpoint pair with path length >= {min_path_len} after {attempts} attempts")]
    SamplingExhausted {
        min_path_len: usize,
        attempts: usize,
    },
    #[error("malformed maze text: {0}")]
    Parse(String),
}

/// Normalized unordered pair key for a wall between two adjacent cells.
fn wall_key(a: Cell, b: Cell) -> (Cell, Cell) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// An N×N maze. `open` holds the *absent* walls (passages) as normalized
/// adjacent-cell pairs; every other adjacent pair is walled, and the outer
/// border is always walled.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Maze {
    n: u32,
    open: BTreeSet<(Cell, Cell)>,
    seed: u64,
}

impl Maze {
    /// Generate a perfect maze with the recursive-backtracker algorithm.
    ///
    /// Deterministic for fixed `(n, seed)`. The open-wall set always forms a
    /// spanning tree: exactly `n² − 1` passages, all cells mutually
    /// reachable, unique simple path between any two cells.
    pub fn generate(n: u32, seed: u64) -> Result<Self, MazeError> {
        if n < 2 {
            return Err(MazeError::InvalidSize(n));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut open = BTreeSet::new();
        let mut visited = BTreeSet::new();
        let mut stack = Vec::new();

        let start = Cell::new(1, 1);
        visited.insert(start);
        stack.push(start);

        while let Some(&current) = stack.last() {
            let candidates: Vec<Cell> = Direction::ALL
                .iter()
                .filter_map(|d| step_in(n, current, *d))
                .filter(|c| !visited.contains(c))
                .collect();
            if candidates.is_empty() {
                stack.pop();
            } else {
                let next = *candidates.choose(&mut rng).expect("non-empty");
                open.insert(wall_key(current, next));
                visited.insert(next);
                stack.push(next);
            }
        }

        Ok(Maze { n, open, seed })
    }

    /// Build a maze from an explicit open-wall set. Pairs must be adjacent
    /// and in-grid; the structure is otherwise unchecked (it need not be a
    /// spanning tree), which is useful for tests and parsed input.
    pub fn from_open_walls<I>(n: u32, open_walls: I, seed: u64) -> Result<Self, MazeError>
    where
        I: IntoIterator<Item = (Cell, Cell)>,
    {
        if n < 2 {
            return Err(MazeError::InvalidSize(n));
        }
        let mut open = BTreeSet::new();
        for (a, b) in open_walls {
            check_in_grid(n, a)?;
            check_in_grid(n, b)?;
            if !a.is_adjacent(b) {
                return Err(MazeError::NotAdjacent(a, b));
            }
            open.insert(wall_key(a, b));
        }
        Ok(Maze { n, open, seed })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Normalized pairs of adjacent cells with no wall between them.
    pub fn open_walls(&self) -> impl Iterator<Item = (Cell, Cell)> + '_ {
        self.open.iter().copied()
    }

    pub fn open_wall_count(&self) -> usize {
        self.open.len()
    }

    pub fn in_grid(&self, cell: Cell) -> bool {
        (1..=self.n).contains(&cell.row) && (1..=self.n).contains(&cell.col)
    }

    /// Whether movement between `a` and `b` is blocked.
    ///
    /// Returns `true` for any non-adjacent pair (including `a == b`): such a
    /// move is impassable by definition, which lets path validation treat
    /// teleporting candidates uniformly as invalid moves. Out-of-grid cells
    /// are an error.
    pub fn wall_between(&self, a: Cell, b: Cell) -> Result<bool, MazeError> {
        check_in_grid(self.n, a)?;
        check_in_grid(self.n, b)?;
        if !a.is_adjacent(b) {
            return Ok(true);
        }
        Ok(!self.open.contains(&wall_key(a, b)))
    }

    /// In-grid neighbors reachable through open walls, in fixed
    /// north, east, south, west order.
    pub fn open_neighbors(&self, cell: Cell) -> Vec<Cell> {
        Direction::ALL
            .iter()
            .filter_map(|d| step_in(self.n, cell, *d))
            .filter(|c| self.open.contains(&wall_key(cell, *c)))
            .collect()
    }

    /// Breadth-first search from `s` to `e` with neighbor expansion fixed to
    /// north, east, south, west. On a perfect maze this returns the unique
    /// simple path; `s == e` yields the single-cell path `[s]`.
    pub fn solve(&self, s: Cell, e: Cell) -> Result<Path, MazeError> {
        check_in_grid(self.n, s)?;
        check_in_grid(self.n, e)?;
        if s == e {
            return Path::new(alloc::vec![s]);
        }
        let mut parent: BTreeMap<Cell, Cell> = BTreeMap::new();
        let mut queue = VecDeque::new();
        parent.insert(s, s);
        queue.push_back(s);
        while let Some(current) = queue.pop_front() {
            if current == e {
                break;
            }
            for next in self.open_neighbors(current) {
                if !parent.contains_key(&next) {
                    parent.insert(next, current);
                    queue.push_back(next);
                }
            }
        }
        if !parent.contains_key(&e) {
            return Err(MazeError::NoPath(s, e));
        }
        let mut cells = alloc::vec![e];
        let mut cursor = e;
        while cursor != s {
            cursor = parent[&cursor];
            cells.push(cursor);
        }
        cells.reverse();
        Path::new(cells)
    }

    /// Check an arbitrary candidate cell sequence against the maze.
    ///
    /// Total: malformed input yields `valid = false` with the first
    /// violation, never an error. Candidates may revisit cells; a valid
    /// candidate starts at `s`, ends at `e`, and every consecutive pair is
    /// adjacent with no wall between.
    pub fn validate_path(&self, s: Cell, e: Cell, candidate: &[Cell]) -> ValidityReport {
        let fail = |index, reason| ValidityReport {
            valid: false,
            violation: Some(Violation { index, reason }),
        };
        let Some(&first) = candidate.first() else {
            return fail(0, ViolationReason::EmptyCandidate);
        };
        if !self.in_grid(first) {
            return fail(0, ViolationReason::OutOfGrid);
        }
        if first != s {
            return fail(0, ViolationReason::WrongStart);
        }
        for (i, window) in candidate.windows(2).enumerate() {
            let (prev, here) = (window[0], window[1]);
            let index = i + 1;
            if !self.in_grid(here) {
                return fail(index, ViolationReason::OutOfGrid);
            }
            if !prev.is_adjacent(here) {
                return fail(index, ViolationReason::NotAdjacent);
            }
            if !self.open.contains(&wall_key(prev, here)) {
                return fail(index, ViolationReason::WallCrossed);
            }
        }
        if *candidate.last().expect("non-empty") != e {
            return fail(candidate.len() - 1, ViolationReason::WrongEnd);
        }
        ValidityReport {
            valid: true,
            violation: None,
        }
    }

    /// Sample a distinct endpoint pair whose unique path has at least
    /// `min_path_len` cells. Uniform over qualifying pairs (rejection
    /// sampling), deterministic per seed.
    pub fn sample_endpoints(
        &self,
        seed: u64,
        min_path_len: usize,
    ) -> Result<(Cell, Cell), MazeError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = self.n as u64;
        for _ in 0..ENDPOINT_RETRY_BUDGET {
            let a = rng.gen_range(0..n * n);
            let b = rng.gen_range(0..n * n);
            if a == b {
                continue;
            }
            let s = Cell::new((a / n) as u32 + 1, (a % n) as u32 + 1);
            let e = Cell::new((b / n) as u32 + 1, (b % n) as u32 + 1);
            let path = self.solve(s, e)?;
            if path.len() >= min_path_len {
                return Ok((s, e));
            }
        }
        Err(MazeError::SamplingExhausted {
            min_path_len,
            attempts: ENDPOINT_RETRY_BUDGET,
        })
    }

    /// Canonical text form: first line `n`, then one line per open wall as
    /// `r1,c1-r2,c2` in lexicographic order. Byte-stable for a given wall
    /// set; used in golden tests and JSONL records.
    pub fn to_text(&self) -> String {
        let mut out = self.n.to_string();
        out.push('\n');
        for (a, b) in &self.open {
            out.push_str(&alloc::format!(
                "{},{}-{},{}\n",
                a.row,
                a.col,
                b.row,
                b.col
            ));
        }
        out
    }

    /// Parse the canonical text form. The seed of a parsed maze is 0: the
    /// text format carries layout only.
    pub fn from_text(text: &str) -> Result<Self, MazeError> {
        let mut lines = text.lines();
        let n: u32 = lines
            .next()
            .ok_or_else(|| MazeError::Parse("missing size line".into()))?
            .trim()
            .parse()
            .map_err(|_| MazeError::Parse("size line is not an integer".into()))?;
        let mut open_walls = Vec::new();
        for (lineno, line) in lines.enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let cells = parse_wall_line(line)
                .ok_or_else(|| MazeError::Parse(alloc::format!("bad wall on line {}", lineno + 2)))?;
            open_walls.push(cells);
        }
        Self::from_open_walls(n, open_walls, 0)
    }
}

fn parse_wall_line(line: &str) -> Option<(Cell, Cell)> {
    let (left, right) = line.split_once('-')?;
    let parse_cell = |s: &str| -> Option<Cell> {
        let (r, c) = s.split_once(',')?;
        Some(Cell::new(r.trim().parse().ok()?, c.trim().parse().ok()?))
    };
    Some((parse_cell(left)?, parse_cell(right)?))
}

fn check_in_grid(n: u32, cell: Cell) -> Result<(), MazeError> {
    if (1..=n).contains(&cell.row) && (1..=n).contains(&cell.col) {
        Ok(())
    } else {
        Err(MazeError::InvalidCell { cell, n })
    }
}

/// One step in `dir` from `cell`, or `None` if it would leave the grid.
fn step_in(n: u32, cell: Cell, dir: Direction) -> Option<Cell> {
    let (dr, dc) = dir.delta();
    let row = cell.row as i64 + dr;
    let col = cell.col as i64 + dc;
    if (1..=n as i64).contains(&row) && (1..=n as i64).contains(&col) {
        Some(Cell::new(row as u32, col as u32))
    } else {
        None
    }
}

/// An ordered, simple (no repeats), step-adjacent cell sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Path {
    cells: Vec<Cell>,
}

impl Path {
    /// Validate the ground-truth path invariants: non-empty, consecutive
    /// cells adjacent, no cell repeated.
    pub fn new(cells: Vec<Cell>) -> Result<Self, MazeError> {
        if cells.is_empty() {
            return Err(MazeError::EmptyPath);
        }
        for window in cells.windows(2) {
            if !window[0].is_adjacent(window[1]) {
                return Err(MazeError::NotAdjacent(window[0], window[1]));
            }
        }
        let mut seen = BTreeSet::new();
        for &cell in &cells {
            if !seen.insert(cell) {
                return Err(MazeError::RepeatedCell(cell));
            }
        }
        Ok(Path { cells })
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    /// Number of cells (a path between distinct endpoints has length >= 2).
    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn start(&self) -> Cell {
        self.cells[0]
    }

    pub fn end(&self) -> Cell {
        *self.cells.last().expect("path is non-empty")
    }
}

/// Direction of each step along a cell sequence. Errors if any consecutive
/// pair is not orthogonally adjacent.
pub fn path_to_directions(cells: &[Cell]) -> Result<Vec<Direction>, MazeError> {
    cells
        .windows(2)
        .map(|w| Direction::between(w[0], w[1]).ok_or(MazeError::NotAdjacent(w[0], w[1])))
        .collect()
}

/// Replay a direction list from `start`, returning the visited cells
/// (including `start`). Errors if any step leaves the `n`×`n` grid.
pub fn replay_directions(n: u32, start: Cell, dirs: &[Direction]) -> Result<Vec<Cell>, MazeError> {
    check_in_grid(n, start)?;
    let mut cells = alloc::vec![start];
    let mut here = start;
    for &dir in dirs {
        here = step_in(n, here, dir).ok_or(MazeError::InvalidCell {
            cell: Cell::new(
                (here.row as i64 + dir.delta().0).max(0) as u32,
                (here.col as i64 + dir.delta().1).max(0) as u32,
            ),
            n,
        })?;
        cells.push(here);
    }
    Ok(cells)
}

/// Why a candidate path failed validation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationReason {
    EmptyCandidate,
    WrongStart,
    WrongEnd,
    OutOfGrid,
    NotAdjacent,
    WallCrossed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    /// Index into the candidate list of the offending cell.
    pub index: usize,
    pub reason: ViolationReason,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidityReport {
    pub valid: bool,
    pub violation: Option<Violation>,
}

/// A maze task: find the path from `start` to `end`.
#[derive(Debug, Clone)]
pub struct TaskInstance {
    pub id: String,
    pub maze: Maze,
    pub start: Cell,
    pub end: Cell,
    pub question: String,
    pub image_ref: String,
    pub truth: Path,
}

impl TaskInstance {
    /// Construct and validate: endpoints distinct, truth path valid for the
    /// maze and endpoints.
    pub fn new(
        id: String,
        maze: Maze,
        start: Cell,
        end: Cell,
        question: String,
        image_ref: String,
        truth: Path,
    ) -> Result<Self, MazeError> {
        if start == end {
            return Err(MazeError::NoPath(start, end));
        }
        let report = maze.validate_path(start, end, truth.cells());
        if !report.valid {
            return Err(MazeError::NoPath(start, end));
        }
        Ok(Self {
            id,
            maze,
            start,
            end,
            question,
            image_ref,
            truth,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn two_by_two() -> Maze {
        // Spanning tree {(1,1)-(1,2), (1,2)-(2,2), (2,2)-(2,1)}.
        Maze::from_open_walls(
            2,
            [
                (Cell::new(1, 1), Cell::new(1, 2)),
                (Cell::new(1, 2), Cell::new(2, 2)),
                (Cell::new(2, 2), Cell::new(2, 1)),
            ],
            0,
        )
        .unwrap()
    }

    #[test]
    fn rejects_undersized_grid() {
        assert_eq!(Maze::generate(1, 0), Err(MazeError::InvalidSize(1)));
        assert_eq!(Maze::generate(0, 9), Err(MazeError::InvalidSize(0)));
    }

    #[test]
    fn two_by_two_has_three_open_walls() {
        for seed in 0..32 {
            let m = Maze::generate(2, seed).unwrap();
            assert_eq!(m.open_wall_count(), 3);
        }
    }

    #[test]
    fn flood_fill_reaches_all_cells() {
        let m = Maze::generate(6, 42).unwrap();
        let mut seen = BTreeSet::new();
        let mut queue = vec![Cell::new(1, 1)];
        seen.insert(Cell::new(1, 1));
        while let Some(c) = queue.pop() {
            for nb in m.open_neighbors(c) {
                if seen.insert(nb) {
                    queue.push(nb);
                }
            }
        }
        assert_eq!(seen.len(), 36);
    }

    #[test]
    fn generation_is_deterministic() {
        let a = Maze::generate(8, 1234).unwrap();
        let b = Maze::generate(8, 1234).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_text(), b.to_text());
        let c = Maze::generate(8, 1235).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn wall_between_cases() {
        let m = two_by_two();
        // Open passage on the truth path.
        assert_eq!(
            m.wall_between(Cell::new(1, 1), Cell::new(1, 2)),
            Ok(false)
        );
        // The closed interior wall.
        assert_eq!(m.wall_between(Cell::new(1, 1), Cell::new(2, 1)), Ok(true));
        // Same cell: not adjacent, impassable.
        assert_eq!(m.wall_between(Cell::new(1, 1), Cell::new(1, 1)), Ok(true));
        // Out of grid is an error.
        assert!(matches!(
            m.wall_between(Cell::new(1, 1), Cell::new(3, 1)),
            Err(MazeError::InvalidCell { .. })
        ));
    }

    #[test]
    fn non_adjacent_in_grid_pair_is_impassable() {
        let m = Maze::generate(4, 5).unwrap();
        assert_eq!(m.wall_between(Cell::new(1, 1), Cell::new(3, 1)), Ok(true));
        assert_eq!(m.wall_between(Cell::new(1, 1), Cell::new(2, 2)), Ok(true));
    }

    #[test]
    fn solve_single_cell() {
        let m = two_by_two();
        let p = m.solve(Cell::new(2, 1), Cell::new(2, 1)).unwrap();
        assert_eq!(p.cells(), &[Cell::new(2, 1)]);
    }

    #[test]
    fn solve_two_by_two_tree() {
        let m = two_by_two();
        let p = m.solve(Cell::new(1, 1), Cell::new(2, 1)).unwrap();
        assert_eq!(
            p.cells(),
            &[
                Cell::new(1, 1),
                Cell::new(1, 2),
                Cell::new(2, 2),
                Cell::new(2, 1)
            ]
        );
    }

    #[test]
    fn validate_accepts_truth_and_flags_wall_crossing() {
        let m = two_by_two();
        let s = Cell::new(1, 1);
        let e = Cell::new(2, 1);
        let truth = m.solve(s, e).unwrap();
        assert!(m.validate_path(s, e, truth.cells()).valid);

        // Second step crosses the closed (1,1)-(2,1) wall.
        let bad = [Cell::new(1, 1), Cell::new(2, 1)];
        let report = m.validate_path(s, e, &bad);
        assert!(!report.valid);
        let v = report.violation.unwrap();
        assert_eq!(v.index, 1);
        assert_eq!(v.reason, ViolationReason::WallCrossed);
    }

    #[test]
    fn validate_reports_each_malformation() {
        let m = two_by_two();
        let s = Cell::new(1, 1);
        let e = Cell::new(2, 1);
        let cases: [(&[Cell], usize, ViolationReason); 5] = [
            (&[], 0, ViolationReason::EmptyCandidate),
            (&[Cell::new(1, 2)], 0, ViolationReason::WrongStart),
            (&[Cell::new(1, 1)], 0, ViolationReason::WrongEnd),
            (
                &[Cell::new(1, 1), Cell::new(2, 2)],
                1,
                ViolationReason::NotAdjacent,
            ),
            (
                &[Cell::new(1, 1), Cell::new(1, 3)],
                1,
                ViolationReason::OutOfGrid,
            ),
        ];
        for (candidate, index, reason) in cases {
            let report = m.validate_path(s, e, candidate);
            assert!(!report.valid);
            let v = report.violation.unwrap();
            assert_eq!((v.index, v.reason), (index, reason), "{candidate:?}");
        }
    }

    #[test]
    fn candidates_may_revisit_cells() {
        let m = two_by_two();
        let s = Cell::new(1, 1);
        let e = Cell::new(2, 1);
        // Bounce back and forth before finishing.
        let wobble = [
            Cell::new(1, 1),
            Cell::new(1, 2),
            Cell::new(1, 1),
            Cell::new(1, 2),
            Cell::new(2, 2),
            Cell::new(2, 1),
        ];
        assert!(m.validate_path(s, e, &wobble).valid);
    }

    #[test]
    fn endpoint_sampling_is_deterministic_and_respects_min_len() {
        let m = Maze::generate(6, 42).unwrap();
        let (s1, e1) = m.sample_endpoints(7, 6).unwrap();
        let (s2, e2) = m.sample_endpoints(7, 6).unwrap();
        assert_eq!((s1, e1), (s2, e2));
        assert_ne!(s1, e1);
        assert!(m.solve(s1, e1).unwrap().len() >= 6);
    }

    #[test]
    fn endpoint_sampling_min_one_accepts_any_distinct_pair() {
        let m = Maze::generate(4, 3).unwrap();
        let (s, e) = m.sample_endpoints(0, 1).unwrap();
        assert_ne!(s, e);
    }

    #[test]
    fn endpoint_sampling_exhausts_on_impossible_bound() {
        let m = Maze::generate(3, 0).unwrap();
        // 3x3 has at most 9 cells on a path; 100 is unreachable.
        assert!(matches!(
            m.sample_endpoints(0, 100),
            Err(MazeError::SamplingExhausted { .. })
        ));
    }

    #[test]
    fn directions_from_cells() {
        assert_eq!(
            path_to_directions(&[Cell::new(1, 1), Cell::new(1, 2)]).unwrap(),
            vec![Direction::East]
        );
        assert_eq!(
            path_to_directions(&[Cell::new(3, 2), Cell::new(2, 2), Cell::new(2, 1)]).unwrap(),
            vec![Direction::North, Direction::West]
        );
        assert!(matches!(
            path_to_directions(&[Cell::new(1, 1), Cell::new(2, 2)]),
            Err(MazeError::NotAdjacent(_, _))
        ));
    }

    #[test]
    fn text_round_trip() {
        let m = Maze::generate(5, 77).unwrap();
        let text = m.to_text();
        let parsed = Maze::from_text(&text).unwrap();
        assert_eq!(parsed.to_text(), text);
        assert_eq!(parsed.n(), 5);
        assert_eq!(parsed.open_wall_count(), m.open_wall_count());
    }

    #[test]
    fn text_rejects_garbage() {
        assert!(Maze::from_text("").is_err());
        assert!(Maze::from_text("x").is_err());
        assert!(Maze::from_text("3\n1,1-9,9").is_err());
        assert!(Maze::from_text("3\n1,1-1,3").is_err()); // not adjacent
    }

    #[test]
    fn path_invariants() {
        assert!(matches!(Path::new(vec![]), Err(MazeError::EmptyPath)));
        assert!(matches!(
            Path::new(vec![Cell::new(1, 1), Cell::new(3, 1)]),
            Err(MazeError::NotAdjacent(_, _))
        ));
        assert!(matches!(
            Path::new(vec![Cell::new(1, 1), Cell::new(1, 2), Cell::new(1, 1)]),
            Err(MazeError::RepeatedCell(_))
        ));
    }
}
