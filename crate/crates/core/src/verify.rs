//! Total parsing of model output and the verifiable reward.
//!
//! Nothing in this module can panic on untrusted input: block extraction is
//! a total function, the answer tokenizer returns structured errors, and a
//! parse failure simply scores r_acc = 0 downstream.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::envs::jigsaw::is_valid_permutation;
use crate::envs::lake::{simulate_actions, LakeAction, LakeMap};
use crate::maze::{replay_directions, Cell, Direction, TaskInstance};
use crate::render::{pixel_to_cell, PixelPoint, RenderSpec};

const THINK_OPEN: &str = "<think>";
const THINK_CLOSE: &str = "</think>";
const BOXED_OPEN: &str = "\\boxed{";

/// Which output grammar the format reward expects.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GrammarMode {
    /// Exactly one well-nested `<think>…</think>` followed by exactly one
    /// `\boxed{…}`.
    ThinkRequired,
    /// Exactly one `\boxed{…}`; no think block is required (the answer-only
    /// grammar used for bare path answers).
    AnswerOnly,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedOutput {
    pub think_text: Option<String>,
    pub boxed_text: Option<String>,
    pub format_ok: bool,
}

/// Byte offsets of every non-overlapping occurrence of `needle`.
fn find_all(haystack: &str, needle: &str) -> Vec<usize> {
    let mut out = Vec::new();
    let mut from = 0;
    while let Some(i) = haystack[from..].find(needle) {
        out.push(from + i);
        from += i + needle.len();
    }
    out
}

/// Balanced `\boxed{…}` occurrences as `(start_of_marker, content)`.
fn find_boxed(raw: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    for start in find_all(raw, BOXED_OPEN) {
        let content_start = start + BOXED_OPEN.len();
        let mut depth = 1usize;
        for (i, ch) in raw[content_start..].char_indices() {
            match ch {
                '{' => depth += 1,
                '}' => {
                    depth -= 1;
                    if depth == 0 {
                        out.push((start, &raw[content_start..content_start + i]));
                        break;
                    }
                }
                _ => {}
            }
        }
        // An unterminated `\boxed{` is ignored: it is not a block.
    }
    out
}

/// Split raw model output into think and boxed blocks. Total function.
///
/// `boxed_text` is the innermost balanced content of the *last* `\boxed{…}`
/// (so nested boxes resolve to the inner content). When several boxed
/// blocks appear, extraction still succeeds but `format_ok` is false.
pub fn extract_blocks(raw: &str, mode: GrammarMode) -> ParsedOutput {
    let opens = find_all(raw, THINK_OPEN);
    let closes = find_all(raw, THINK_CLOSE);
    let boxed = find_boxed(raw);

    let think_text = match (opens.as_slice(), closes.as_slice()) {
        ([open], [close]) if open < close => {
            Some(raw[open + THINK_OPEN.len()..*close].to_string())
        }
        _ => None,
    };
    let boxed_text = boxed.last().map(|(_, content)| content.to_string());

    let format_ok = match mode {
        GrammarMode::AnswerOnly => boxed.len() == 1,
        GrammarMode::ThinkRequired => {
            think_text.is_some()
                && boxed.len() == 1
                && boxed[0].0 > closes[0] // one think block implies one close
        }
    };
    ParsedOutput {
        think_text,
        boxed_text,
        format_ok,
    }
}

/// The answer grammars a boxed payload can be parsed as.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AnswerKind {
    Cells,
    PixelCoords,
    Directions,
    Actions,
    Permutation,
}

/// A parsed final answer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Answer {
    Cells(Vec<Cell>),
    PixelCoords(Vec<PixelPoint>),
    Directions(Vec<Direction>),
    Actions(Vec<LakeAction>),
    Permutation(Vec<u32>),
}

impl Answer {
    pub fn kind(&self) -> AnswerKind {
        match self {
            Answer::Cells(_) => AnswerKind::Cells,
            Answer::PixelCoords(_) => AnswerKind::PixelCoords,
            Answer::Directions(_) => AnswerKind::Directions,
            Answer::Actions(_) => AnswerKind::Actions,
            Answer::Permutation(_) => AnswerKind::Permutation,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("empty answer")]
    Empty,
    #[error("unexpected content at byte {0}")]
    Unexpected(usize),
    #[error("unknown word `{0}`")]
    UnknownWord(String),
    #[error("number {0} out of range")]
    OutOfRange(i64),
    #[error("truncated answer")]
    Truncated,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Int(i64),
    Open,
    Close,
    Comma,
    Word(String),
}

/// Lenient tokenizer: brackets and parentheses are interchangeable, quote
/// characters are ignored, whitespace separates. Anything else is an error.
fn tokenize(s: &str) -> Result<Vec<Token>, ParseError> {
    let mut tokens = Vec::new();
    let mut chars = s.char_indices().peekable();
    while let Some(&(i, ch)) = chars.peek() {
        match ch {
            c if c.is_whitespace() => {
                chars.next();
            }
            '(' | '[' => {
                tokens.push(Token::Open);
                chars.next();
            }
            ')' | ']' => {
                tokens.push(Token::Close);
                chars.next();
            }
            ',' => {
                tokens.push(Token::Comma);
                chars.next();
            }
            '"' | '\'' | '`' | '\u{201c}' | '\u{201d}' | '\u{2018}' | '\u{2019}' => {
                chars.next();
            }
            '-' | '0'..='9' => {
                let negative = ch == '-';
                if negative {
                    chars.next();
                }
                let mut value: i64 = 0;
                let mut digits = 0;
                while let Some(&(_, d)) = chars.peek() {
                    if let Some(v) = d.to_digit(10) {
                        value = value
                            .saturating_mul(10)
                            .saturating_add(v as i64);
                        digits += 1;
                        chars.next();
                    } else {
                        break;
                    }
                }
                if digits == 0 {
                    return Err(ParseError::Unexpected(i));
                }
                tokens.push(Token::Int(if negative { -value } else { value }));
            }
            c if c.is_alphabetic() => {
                let mut word = String::new();
                while let Some(&(_, d)) = chars.peek() {
                    if d.is_alphabetic() {
                        word.push(d);
                        chars.next();
                    } else {
                        break;
                    }
                }
                tokens.push(Token::Word(word));
            }
            _ => return Err(ParseError::Unexpected(i)),
        }
    }
    Ok(tokens)
}

struct Cursor {
    tokens: Vec<Token>,
    pos: usize,
}

impl Cursor {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, token: &Token) -> bool {
        if self.peek() == Some(token) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_int(&mut self) -> Result<i64, ParseError> {
        match self.bump() {
            Some(Token::Int(v)) => Ok(v),
            Some(_) => Err(ParseError::Unexpected(self.pos - 1)),
            None => Err(ParseError::Truncated),
        }
    }

    fn done(&self) -> bool {
        self.pos == self.tokens.len()
    }
}

fn to_u32(v: i64) -> Result<u32, ParseError> {
    u32::try_from(v).map_err(|_| ParseError::OutOfRange(v))
}

/// `(a, b)` / `[a, b]` pairs, optionally wrapped in one outer bracket and
/// separated by optional commas.
fn parse_pairs(text: &str) -> Result<Vec<(u32, u32)>, ParseError> {
    let tokens = tokenize(text)?;
    if tokens.is_empty() {
        return Err(ParseError::Empty);
    }
    let mut cur = Cursor { tokens, pos: 0 };
    // An opening bracket directly followed by another is the list wrapper.
    let outer = matches!(
        (cur.tokens.first(), cur.tokens.get(1)),
        (Some(Token::Open), Some(Token::Open))
    );
    if outer {
        cur.pos = 1;
    }
    let mut pairs = Vec::new();
    loop {
        if !cur.eat(&Token::Open) {
            return match cur.bump() {
                None => Err(ParseError::Truncated),
                Some(_) => Err(ParseError::Unexpected(cur.pos - 1)),
            };
        }
        let a = cur.expect_int()?;
        if !cur.eat(&Token::Comma) {
            return Err(ParseError::Unexpected(cur.pos));
        }
        let b = cur.expect_int()?;
        if !cur.eat(&Token::Close) {
            return Err(ParseError::Unexpected(cur.pos));
        }
        pairs.push((to_u32(a)?, to_u32(b)?));
        let more = cur.eat(&Token::Comma);
        match cur.peek() {
            Some(Token::Open) => continue,
            _ if more => return Err(ParseError::Unexpected(cur.pos)),
            _ => break,
        }
    }
    if outer && !cur.eat(&Token::Close) {
        return Err(ParseError::Unexpected(cur.pos));
    }
    if !cur.done() {
        return Err(ParseError::Unexpected(cur.pos));
    }
    if pairs.is_empty() {
        return Err(ParseError::Empty);
    }
    Ok(pairs)
}

/// Comma-separated words, optionally bracketed and quoted.
fn parse_words(text: &str) -> Result<Vec<String>, ParseError> {
    let tokens = tokenize(text)?;
    if tokens.is_empty() {
        return Err(ParseError::Empty);
    }
    let mut cur = Cursor { tokens, pos: 0 };
    let outer = cur.eat(&Token::Open);
    let mut words = Vec::new();
    loop {
        match cur.bump() {
            Some(Token::Word(w)) => words.push(w),
            Some(Token::Close) if outer && !words.is_empty() => {
                cur.pos -= 1;
                break;
            }
            Some(_) => return Err(ParseError::Unexpected(cur.pos - 1)),
            None => break,
        }
        if !cur.eat(&Token::Comma) && !matches!(cur.peek(), Some(Token::Word(_))) {
            break;
        }
    }
    if outer && !cur.eat(&Token::Close) {
        return Err(ParseError::Truncated);
    }
    if !cur.done() {
        return Err(ParseError::Unexpected(cur.pos));
    }
    if words.is_empty() {
        return Err(ParseError::Empty);
    }
    Ok(words)
}

/// Comma-separated integers, optionally bracketed.
fn parse_ints(text: &str) -> Result<Vec<u32>, ParseError> {
    let tokens = tokenize(text)?;
    if tokens.is_empty() {
        return Err(ParseError::Empty);
    }
    let mut cur = Cursor { tokens, pos: 0 };
    let outer = cur.eat(&Token::Open);
    let mut ints = Vec::new();
    loop {
        match cur.peek() {
            Some(Token::Int(_)) => {
                let v = cur.expect_int()?;
                ints.push(to_u32(v)?);
                cur.eat(&Token::Comma);
            }
            _ => break,
        }
    }
    if outer && !cur.eat(&Token::Close) {
        return Err(ParseError::Truncated);
    }
    if !cur.done() {
        return Err(ParseError::Unexpected(cur.pos));
    }
    if ints.is_empty() {
        return Err(ParseError::Empty);
    }
    Ok(ints)
}

/// Parse a boxed payload as the requested answer kind. Whitespace
/// insensitive; returns a structured error rather than guessing.
pub fn parse_answer(boxed_text: &str, kind: AnswerKind) -> Result<Answer, ParseError> {
    match kind {
        AnswerKind::Cells => Ok(Answer::Cells(
            parse_pairs(boxed_text)?
                .into_iter()
                .map(|(r, c)| Cell::new(r, c))
                .collect(),
        )),
        AnswerKind::PixelCoords => Ok(Answer::PixelCoords(
            parse_pairs(boxed_text)?
                .into_iter()
                .map(|(x, y)| PixelPoint::new(x, y))
                .collect(),
        )),
        AnswerKind::Directions => {
            let mut dirs = Vec::new();
            for w in parse_words(boxed_text)? {
                dirs.push(
                    w.parse::<Direction>()
                        .map_err(|_| ParseError::UnknownWord(w))?,
                );
            }
            Ok(Answer::Directions(dirs))
        }
        AnswerKind::Actions => {
            let mut actions = Vec::new();
            for w in parse_words(boxed_text)? {
                actions.push(LakeAction::parse(&w).ok_or(ParseError::UnknownWord(w))?);
            }
            Ok(Answer::Actions(actions))
        }
        AnswerKind::Permutation => Ok(Answer::Permutation(parse_ints(boxed_text)?)),
    }
}

// ---------------------------------------------------------------------------
// Canonical answer text. `parse_answer` inverts each of these exactly.
// ---------------------------------------------------------------------------

pub fn canonical_cells(cells: &[Cell]) -> String {
    let items: Vec<String> = cells
        .iter()
        .map(|c| alloc::format!("({}, {})", c.row, c.col))
        .collect();
    alloc::format!("[{}]", items.join(", "))
}

pub fn canonical_coords(points: &[PixelPoint]) -> String {
    let items: Vec<String> = points
        .iter()
        .map(|p| alloc::format!("[{}, {}]", p.x, p.y))
        .collect();
    alloc::format!("[{}]", items.join(", "))
}

pub fn canonical_directions(dirs: &[Direction]) -> String {
    let items: Vec<String> = dirs
        .iter()
        .map(|d| alloc::format!("\"{}\"", d.as_str()))
        .collect();
    alloc::format!("[{}]", items.join(", "))
}

pub fn canonical_actions(actions: &[LakeAction]) -> String {
    let items: Vec<String> = actions
        .iter()
        .map(|a| alloc::format!("\"{}\"", a.as_str()))
        .collect();
    alloc::format!("[{}]", items.join(", "))
}

pub fn canonical_permutation(perm: &[u32]) -> String {
    let items: Vec<String> = perm.iter().map(|v| v.to_string()).collect();
    alloc::format!("[{}]", items.join(", "))
}

// ---------------------------------------------------------------------------
// Rewards
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum RewardError {
    #[error("alpha must be in [0, 1], got {0}")]
    InvalidAlpha(f64),
}

/// Mixing weight between accuracy and format rewards.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RewardConfig {
    pub alpha: f64,
}

impl RewardConfig {
    pub const DEFAULT_ALPHA: f64 = 0.1;

    pub fn new(alpha: f64) -> Result<Self, RewardError> {
        if !(0.0..=1.0).contains(&alpha) || alpha.is_nan() {
            return Err(RewardError::InvalidAlpha(alpha));
        }
        Ok(Self { alpha })
    }
}

impl Default for RewardConfig {
    fn default() -> Self {
        Self {
            alpha: Self::DEFAULT_ALPHA,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RewardBreakdown {
    pub r_acc: u8,
    pub r_format: u8,
    pub total: f64,
}

/// 1 iff the output matched the expected grammar.
pub fn reward_format(parsed: &ParsedOutput) -> u8 {
    parsed.format_ok as u8
}

/// `total = alpha * r_acc + (1 - alpha) * r_format`. Nonzero inputs count
/// as 1 so the function stays total.
pub fn composite_reward(r_acc: u8, r_format: u8, cfg: &RewardConfig) -> RewardBreakdown {
    let r_acc = (r_acc != 0) as u8;
    let r_format = (r_format != 0) as u8;
    let total = cfg.alpha * f64::from(r_acc) + (1.0 - cfg.alpha) * f64::from(r_format);
    RewardBreakdown {
        r_acc,
        r_format,
        total,
    }
}

/// Accuracy verdict with an explanation on failure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AccVerdict {
    pub correct: bool,
    pub reason: Option<String>,
}

impl AccVerdict {
    fn ok() -> Self {
        Self {
            correct: true,
            reason: None,
        }
    }

    fn no(reason: impl Into<String>) -> Self {
        Self {
            correct: false,
            reason: Some(reason.into()),
        }
    }

    pub fn r_acc(&self) -> u8 {
        self.correct as u8
    }
}

/// Maze accuracy: the answer must trace a wall-free path from start to end.
/// Pixel-coordinate answers are mapped to cells through [`pixel_to_cell`]
/// first; direction answers are replayed from the start cell.
pub fn maze_reward_acc(
    instance: &TaskInstance,
    spec: &RenderSpec,
    answer: &Answer,
) -> AccVerdict {
    let cells: Vec<Cell> = match answer {
        Answer::Cells(cells) => cells.clone(),
        Answer::PixelCoords(points) => {
            let mut cells = Vec::with_capacity(points.len());
            for &p in points {
                match pixel_to_cell(spec, instance.maze.n(), p) {
                    Ok(cell) => cells.push(cell),
                    Err(e) => return AccVerdict::no(e.to_string()),
                }
            }
            cells
        }
        Answer::Directions(dirs) => {
            match replay_directions(instance.maze.n(), instance.start, dirs) {
                Ok(cells) => cells,
                Err(e) => return AccVerdict::no(e.to_string()),
            }
        }
        other => {
            return AccVerdict::no(alloc::format!(
                "answer kind {:?} is incompatible with the maze task",
                other.kind()
            ))
        }
    };
    let report = instance
        .maze
        .validate_path(instance.start, instance.end, &cells);
    if report.valid {
        AccVerdict::ok()
    } else {
        AccVerdict::no(alloc::format!("{:?}", report.violation))
    }
}

/// FrozenLake accuracy: replaying the actions must reach the gift.
pub fn lake_reward_acc(lake: &LakeMap, answer: &Answer) -> AccVerdict {
    match answer {
        Answer::Actions(actions) => {
            if simulate_actions(lake, actions).is_success() {
                AccVerdict::ok()
            } else {
                AccVerdict::no("actions do not reach the gift")
            }
        }
        other => AccVerdict::no(alloc::format!(
            "answer kind {:?} is incompatible with the lake task",
            other.kind()
        )),
    }
}

/// Jigsaw accuracy: the answer must equal the ground-truth permutation.
pub fn jigsaw_reward_acc(truth: &[u32], answer: &Answer) -> AccVerdict {
    match answer {
        Answer::Permutation(perm) => {
            if is_valid_permutation(perm) && perm.as_slice() == truth {
                AccVerdict::ok()
            } else {
                AccVerdict::no("not the ground-truth permutation")
            }
        }
        other => AccVerdict::no(alloc::format!(
            "answer kind {:?} is incompatible with the jigsaw task",
            other.kind()
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maze::{Maze, Path};
    use alloc::vec;

    #[test]
    fn extracts_think_and_boxed() {
        let parsed = extract_blocks(
            "<think>go east</think>\\boxed{[(1,1),(1,2)]}",
            GrammarMode::ThinkRequired,
        );
        assert!(parsed.format_ok);
        assert_eq!(parsed.think_text.as_deref(), Some("go east"));
        assert_eq!(parsed.boxed_text.as_deref(), Some("[(1,1),(1,2)]"));
    }

    #[test]
    fn missing_think_still_extracts_boxed() {
        let parsed = extract_blocks("\\boxed{42}", GrammarMode::ThinkRequired);
        assert!(!parsed.format_ok);
        assert_eq!(parsed.boxed_text.as_deref(), Some("42"));

        let answer_only = extract_blocks("\\boxed{42}", GrammarMode::AnswerOnly);
        assert!(answer_only.format_ok);
    }

    #[test]
    fn last_boxed_wins_but_format_fails() {
        let parsed = extract_blocks(
            "<think>t</think>\\boxed{a}\\boxed{b}",
            GrammarMode::ThinkRequired,
        );
        assert_eq!(parsed.boxed_text.as_deref(), Some("b"));
        assert!(!parsed.format_ok);
    }

    #[test]
    fn nested_braces_stay_balanced() {
        let parsed = extract_blocks("\\boxed{a{b{c}}d}", GrammarMode::AnswerOnly);
        assert_eq!(parsed.boxed_text.as_deref(), Some("a{b{c}}d"));
        assert!(parsed.format_ok);
    }

    #[test]
    fn boxed_before_think_close_is_malformed() {
        let parsed = extract_blocks(
            "<think>\\boxed{a}</think> done",
            GrammarMode::ThinkRequired,
        );
        assert!(!parsed.format_ok);
        assert_eq!(parsed.boxed_text.as_deref(), Some("a"));
    }

    #[test]
    fn unterminated_boxed_is_not_a_block() {
        let parsed = extract_blocks("\\boxed{oops", GrammarMode::AnswerOnly);
        assert!(!parsed.format_ok);
        assert_eq!(parsed.boxed_text, None);
    }

    #[test]
    fn parses_cell_lists() {
        let a = parse_answer("[(1,1), (1,2), (2,2)]", AnswerKind::Cells).unwrap();
        assert_eq!(
            a,
            Answer::Cells(vec![Cell::new(1, 1), Cell::new(1, 2), Cell::new(2, 2)])
        );
        // Bracketed coordinate pairs and no outer wrapper also parse.
        let b = parse_answer("[30,30], [70,  30]", AnswerKind::PixelCoords).unwrap();
        assert_eq!(
            b,
            Answer::PixelCoords(vec![PixelPoint::new(30, 30), PixelPoint::new(70, 30)])
        );
        let c = parse_answer("[[1, 2], [2, 2]]", AnswerKind::Cells).unwrap();
        assert_eq!(c, Answer::Cells(vec![Cell::new(1, 2), Cell::new(2, 2)]));
    }

    #[test]
    fn parses_actions_and_permutations() {
        let a = parse_answer("[\"Left\", \"Up\"]", AnswerKind::Actions).unwrap();
        assert_eq!(a, Answer::Actions(vec![LakeAction::Left, LakeAction::Up]));
        let b = parse_answer("[7, 5, 1, 6, 8, 3, 9, 2, 4]", AnswerKind::Permutation).unwrap();
        assert_eq!(b, Answer::Permutation(vec![7, 5, 1, 6, 8, 3, 9, 2, 4]));
        let c = parse_answer("[\"east\", 'north']", AnswerKind::Directions).unwrap();
        assert_eq!(
            c,
            Answer::Directions(vec![Direction::East, Direction::North])
        );
    }

    #[test]
    fn rejects_garbage_without_panicking() {
        assert!(parse_answer("", AnswerKind::Cells).is_err());
        assert!(parse_answer("[(1,1) extra", AnswerKind::Cells).is_err());
        assert!(parse_answer("[(-1, 2)]", AnswerKind::Cells).is_err());
        assert!(parse_answer("[\"Sideways\"]", AnswerKind::Actions).is_err());
        assert!(parse_answer("{1,2}", AnswerKind::Permutation).is_err());
        assert!(parse_answer("[]", AnswerKind::Cells).is_err());
    }

    #[test]
    fn canonical_forms_round_trip() {
        let cells = vec![Cell::new(1, 1), Cell::new(1, 2)];
        assert_eq!(
            parse_answer(&canonical_cells(&cells), AnswerKind::Cells).unwrap(),
            Answer::Cells(cells)
        );
        let pts = vec![PixelPoint::new(30, 30), PixelPoint::new(110, 70)];
        assert_eq!(
            parse_answer(&canonical_coords(&pts), AnswerKind::PixelCoords).unwrap(),
            Answer::PixelCoords(pts)
        );
        let acts = vec![LakeAction::Left, LakeAction::Down];
        assert_eq!(
            parse_answer(&canonical_actions(&acts), AnswerKind::Actions).unwrap(),
            Answer::Actions(acts)
        );
        let dirs = vec![Direction::East, Direction::South];
        assert_eq!(
            parse_answer(&canonical_directions(&dirs), AnswerKind::Directions).unwrap(),
            Answer::Directions(dirs)
        );
        let perm = vec![7, 5, 1, 6, 8, 3, 9, 2, 4];
        assert_eq!(
            parse_answer(&canonical_permutation(&perm), AnswerKind::Permutation).unwrap(),
            Answer::Permutation(perm)
        );
    }

    #[test]
    fn reward_arithmetic_matches_the_mixing_rule() {
        let cfg = RewardConfig::default();
        assert_eq!(composite_reward(1, 1, &cfg).total, 1.0);
        assert_eq!(composite_reward(0, 1, &cfg).total, 0.9);
        assert_eq!(composite_reward(1, 0, &cfg).total, 0.1);
        assert_eq!(composite_reward(0, 0, &cfg).total, 0.0);
    }

    #[test]
    fn alpha_bounds_are_enforced() {
        assert!(RewardConfig::new(0.0).is_ok());
        assert!(RewardConfig::new(1.0).is_ok());
        assert!(RewardConfig::new(-0.01).is_err());
        assert!(RewardConfig::new(1.01).is_err());
        assert!(RewardConfig::new(f64::NAN).is_err());
    }

    fn demo_instance() -> (TaskInstance, RenderSpec) {
        let maze = Maze::generate(4, 11).unwrap();
        let s = Cell::new(1, 1);
        let e = Cell::new(4, 4);
        let truth = maze.solve(s, e).unwrap();
        let instance = TaskInstance::new(
            "t".into(),
            maze,
            s,
            e,
            "q".into(),
            "img.png".into(),
            truth,
        )
        .unwrap();
        (instance, RenderSpec::default())
    }

    #[test]
    fn maze_accuracy_paths() {
        let (instance, spec) = demo_instance();
        let truth_cells = instance.truth.cells().to_vec();
        let ok = maze_reward_acc(&instance, &spec, &Answer::Cells(truth_cells.clone()));
        assert!(ok.correct);

        // Coordinate form of the same path.
        let coords: Vec<PixelPoint> = truth_cells
            .iter()
            .map(|&c| crate::render::cell_center(&spec, 4, c).unwrap())
            .collect();
        assert!(maze_reward_acc(&instance, &spec, &Answer::PixelCoords(coords)).correct);

        // Direction form of the same path.
        let dirs = crate::maze::path_to_directions(&truth_cells).unwrap();
        assert!(maze_reward_acc(&instance, &spec, &Answer::Directions(dirs)).correct);

        // Wrong kind.
        let bad = maze_reward_acc(&instance, &spec, &Answer::Permutation(vec![1]));
        assert!(!bad.correct);
        assert!(bad.reason.is_some());
    }

    #[test]
    fn maze_accuracy_rejects_wall_crossings() {
        let maze = Maze::from_open_walls(
            2,
            [
                (Cell::new(1, 1), Cell::new(1, 2)),
                (Cell::new(1, 2), Cell::new(2, 2)),
                (Cell::new(2, 2), Cell::new(2, 1)),
            ],
            0,
        )
        .unwrap();
        let s = Cell::new(1, 1);
        let e = Cell::new(2, 1);
        let truth = maze.solve(s, e).unwrap();
        let instance =
            TaskInstance::new("t".into(), maze, s, e, "q".into(), "i".into(), truth).unwrap();
        let crossing = Answer::Cells(vec![Cell::new(1, 1), Cell::new(2, 1)]);
        assert!(!maze_reward_acc(&instance, &RenderSpec::default(), &crossing).correct);
    }

    #[test]
    fn path_type_is_constructible_for_rewards() {
        // Guard: Path::new and validate_path agree on simple paths.
        let maze = Maze::generate(3, 2).unwrap();
        let truth = maze.solve(Cell::new(1, 1), Cell::new(3, 3)).unwrap();
        assert!(Path::new(truth.cells().to_vec()).is_ok());
    }
}
