//! JSONL record schemas shared by generation, synthesis, scoring, and
//! evaluation. Field order is fixed by struct declaration order, so
//! serialization is byte-stable and export/import round-trips exactly.

use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::cot::CoTFormat;
use crate::envs::lake::LakeAction;
use crate::maze::Cell;

/// Version of the record schemas below; recorded in dataset manifests.
pub const DATASET_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TaskKind {
    Maze,
    Frozenlake,
    Jigsaw,
}

impl TaskKind {
    pub fn as_str(self) -> &'static str {
        match self {
            TaskKind::Maze => "maze",
            TaskKind::Frozenlake => "frozenlake",
            TaskKind::Jigsaw => "jigsaw",
        }
    }
}

impl core::fmt::Display for TaskKind {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl core::str::FromStr for TaskKind {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "maze" => Ok(TaskKind::Maze),
            "frozenlake" | "lake" => Ok(TaskKind::Frozenlake),
            "jigsaw" => Ok(TaskKind::Jigsaw),
            _ => Err(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    User,
    Assistant,
}

/// A text or image piece of a message.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum SegmentPayload {
    Text { text: String },
    Image { image: String },
}

/// One content segment with its training-loss flag: image segments are
/// excluded from the loss, text segments in assistant turns are not.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segment {
    #[serde(flatten)]
    pub payload: SegmentPayload,
    pub loss_mask: bool,
}

impl Segment {
    pub fn text(text: impl Into<String>, loss_mask: bool) -> Self {
        Self {
            payload: SegmentPayload::Text { text: text.into() },
            loss_mask,
        }
    }

    pub fn image(image: impl Into<String>) -> Self {
        Self {
            payload: SegmentPayload::Image {
                image: image.into(),
            },
            loss_mask: false,
        }
    }

    pub fn is_image(&self) -> bool {
        matches!(self.payload, SegmentPayload::Image { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Message {
    pub role: Role,
    pub content: Vec<Segment>,
}

impl Message {
    /// Concatenated text segments; how a recorded assistant turn becomes a
    /// scoreable completion string.
    pub fn text_content(&self) -> String {
        let mut out = String::new();
        for seg in &self.content {
            if let SegmentPayload::Text { text } = &seg.payload {
                out.push_str(text);
            }
        }
        out
    }
}

/// One training sample: user turn (image + question), assistant turn
/// (think block and boxed answer, with frames interleaved for visual
/// traces).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SftSample {
    pub id: String,
    pub task: TaskKind,
    pub size: u32,
    pub seed: u64,
    pub question: String,
    pub images: Vec<String>,
    pub messages: Vec<Message>,
    pub answer: String,
    pub format: CoTFormat,
}

/// One generated task instance, self-contained for scoring: ground truth
/// travels in the record.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "task", rename_all = "lowercase")]
pub enum InstanceRecord {
    Maze {
        id: String,
        size: u32,
        seed: u64,
        question: String,
        image: String,
        maze: String,
        start: Cell,
        end: Cell,
        truth: Vec<Cell>,
    },
    Frozenlake {
        id: String,
        size: u32,
        seed: u64,
        question: String,
        map: String,
        truth: Vec<LakeAction>,
    },
    Jigsaw {
        id: String,
        size: u32,
        seed: u64,
        question: String,
        source: String,
        tiles: Vec<String>,
        truth: Vec<u32>,
    },
}

impl InstanceRecord {
    pub fn id(&self) -> &str {
        match self {
            InstanceRecord::Maze { id, .. }
            | InstanceRecord::Frozenlake { id, .. }
            | InstanceRecord::Jigsaw { id, .. } => id,
        }
    }

    pub fn size(&self) -> u32 {
        match self {
            InstanceRecord::Maze { size, .. }
            | InstanceRecord::Frozenlake { size, .. }
            | InstanceRecord::Jigsaw { size, .. } => *size,
        }
    }

    pub fn task(&self) -> TaskKind {
        match self {
            InstanceRecord::Maze { .. } => TaskKind::Maze,
            InstanceRecord::Frozenlake { .. } => TaskKind::Frozenlake,
            InstanceRecord::Jigsaw { .. } => TaskKind::Jigsaw,
        }
    }
}

/// Input to batch scoring: one model completion for an instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompletionRecord {
    pub instance_id: String,
    pub completion: String,
}

/// Output of batch scoring.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreRecord {
    pub instance_id: String,
    pub r_acc: u8,
    pub r_format: u8,
    pub total: f64,
}
