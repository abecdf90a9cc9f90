//! Dataset split designs, reproducible manifests, and evaluation metrics.
//!
//! A manifest pins everything needed to regenerate a dataset bit-for-bit:
//! task, render spec, and per-split size buckets with disjoint seed ranges.
//! Instance seeds are consecutive within a bucket, so the full id set is
//! derivable from the manifest alone.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::cot::CoTFormat;
use crate::dataset::{TaskKind, DATASET_SCHEMA_VERSION};
use crate::render::RenderSpec;
use crate::verify::RewardBreakdown;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("size list for split `{0}` is empty")]
    EmptySizes(String),
    #[error("seed ranges of splits `{a}` and `{b}` overlap")]
    OverlappingSeeds { a: String, b: String },
    #[error("pass@k needs k >= 1")]
    InvalidK,
    #[error("instance `{id}` has {have} completions, pass@{k} needs {k}")]
    InsufficientCompletions { id: String, have: usize, k: usize },
    #[error("unknown instance id `{0}`")]
    UnknownInstance(String),
}

/// Instances per split (totals across sizes).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitCounts {
    pub sft: usize,
    pub rl: usize,
    pub test: usize,
}

impl Default for SplitCounts {
    fn default() -> Self {
        // 8K supervised traces per format, a 20K RL pool, 1K held-out test.
        Self {
            sft: 8000,
            rl: 20000,
            test: 1000,
        }
    }
}

/// The three built-in experiment designs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// Train on 4x4–6x6, test on unseen 7x7.
    InDomain,
    /// Train on 6x6 only, test on 7x7.
    SingleScale,
    /// SFT on 4x4–6x6, RL on 7x7–9x9, test on unseen 10x10.
    CrossScale,
}

impl core::str::FromStr for Preset {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "in-domain" | "in_domain" | "indomain" => Ok(Preset::InDomain),
            "single-scale" | "single_scale" | "singlescale" => Ok(Preset::SingleScale),
            "cross-scale" | "cross_scale" | "crossscale" => Ok(Preset::CrossScale),
            _ => Err(()),
        }
    }
}

/// Everything `make_splits` needs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitDesign {
    pub sft_sizes: Vec<u32>,
    pub rl_sizes: Vec<u32>,
    pub test_sizes: Vec<u32>,
    pub counts: SplitCounts,
    pub base_seed: u64,
}

impl SplitDesign {
    pub fn preset(preset: Preset, base_seed: u64) -> Self {
        let (sft, rl, test) = match preset {
            Preset::InDomain => (alloc::vec![4, 5, 6], alloc::vec![4, 5, 6], alloc::vec![7]),
            Preset::SingleScale => (alloc::vec![6], alloc::vec![6], alloc::vec![7]),
            Preset::CrossScale => (
                alloc::vec![4, 5, 6],
                alloc::vec![7, 8, 9],
                alloc::vec![10],
            ),
        };
        Self {
            sft_sizes: sft,
            rl_sizes: rl,
            test_sizes: test,
            counts: SplitCounts::default(),
            base_seed,
        }
    }
}

/// Spread `total` uniformly across sizes; the remainder goes to the
/// smaller (earlier-listed) sizes.
fn per_size_counts(sizes: &[u32], total: usize) -> Vec<usize> {
    let per = total / sizes.len();
    let rem = total % sizes.len();
    (0..sizes.len())
        .map(|i| per + usize::from(i < rem))
        .collect()
}

/// Instances of one size within a split: seeds are the consecutive range
/// `seed_start .. seed_start + count`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SizeBucket {
    pub size: u32,
    pub count: usize,
    pub seed_start: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitManifest {
    pub name: String,
    pub sizes: Vec<SizeBucket>,
    pub instances_file: String,
    pub images_dir: String,
}

impl SplitManifest {
    pub fn instance_count(&self) -> usize {
        self.sizes.iter().map(|b| b.count).sum()
    }

    fn seed_range(&self) -> Option<(u64, u64)> {
        let lo = self.sizes.iter().map(|b| b.seed_start).min()?;
        let hi = self
            .sizes
            .iter()
            .map(|b| b.seed_start + b.count as u64)
            .max()?;
        Some((lo, hi))
    }

    /// `(id, size, seed)` for every instance in the split, in file order.
    pub fn instances(&self, task: TaskKind) -> Vec<(String, u32, u64)> {
        let mut out = Vec::with_capacity(self.instance_count());
        for bucket in &self.sizes {
            for i in 0..bucket.count as u64 {
                let seed = bucket.seed_start + i;
                out.push((instance_id(task, bucket.size, seed), bucket.size, seed));
            }
        }
        out
    }
}

/// The reproducibility contract for a dataset directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub schema_version: u32,
    pub task: TaskKind,
    pub base_seed: u64,
    pub cot_format: Option<CoTFormat>,
    pub render_spec: RenderSpec,
    pub splits: Vec<SplitManifest>,
}

impl DatasetManifest {
    /// Disjointness of split seed ranges.
    pub fn validate(&self) -> Result<(), EvalError> {
        for (i, a) in self.splits.iter().enumerate() {
            for b in &self.splits[i + 1..] {
                if let (Some((a_lo, a_hi)), Some((b_lo, b_hi))) =
                    (a.seed_range(), b.seed_range())
                {
                    if a_lo < b_hi && b_lo < a_hi {
                        return Err(EvalError::OverlappingSeeds {
                            a: a.name.clone(),
                            b: b.name.clone(),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn split(&self, name: &str) -> Option<&SplitManifest> {
        self.splits.iter().find(|s| s.name == name)
    }

    /// id → size over every split.
    pub fn instance_sizes(&self) -> Vec<(String, u32)> {
        self.splits
            .iter()
            .flat_map(|s| {
                s.instances(self.task)
                    .into_iter()
                    .map(|(id, size, _)| (id, size))
            })
            .collect()
    }
}

/// Canonical instance id, e.g. `maze_6x6_00000123`.
pub fn instance_id(task: TaskKind, size: u32, seed: u64) -> String {
    alloc::format!("{}_{size}x{size}_{seed:08}", task.as_str())
}

/// Build the sft/rl/test manifests for a design: uniform per-size counts
/// and consecutive, mutually disjoint seed ranges starting at `base_seed`.
pub fn make_splits(design: &SplitDesign) -> Result<DatasetManifest, EvalError> {
    let splits_in = [
        ("sft", &design.sft_sizes, design.counts.sft),
        ("rl", &design.rl_sizes, design.counts.rl),
        ("test", &design.test_sizes, design.counts.test),
    ];
    let mut cursor = design.base_seed;
    let mut splits = Vec::new();
    for (name, sizes, total) in splits_in {
        if sizes.is_empty() {
            return Err(EvalError::EmptySizes(name.to_string()));
        }
        let counts = per_size_counts(sizes, total);
        let mut buckets = Vec::with_capacity(sizes.len());
        for (&size, &count) in sizes.iter().zip(&counts) {
            buckets.push(SizeBucket {
                size,
                count,
                seed_start: cursor,
            });
            cursor += count as u64;
        }
        splits.push(SplitManifest {
            name: name.to_string(),
            sizes: buckets,
            instances_file: alloc::format!("{name}_instances.jsonl"),
            images_dir: alloc::format!("images/{name}"),
        });
    }
    let manifest = DatasetManifest {
        schema_version: DATASET_SCHEMA_VERSION,
        task: TaskKind::Maze,
        base_seed: design.base_seed,
        cot_format: None,
        render_spec: RenderSpec::default(),
        splits,
    };
    manifest.validate()?;
    Ok(manifest)
}

/// All completions scored for one instance, in sampling order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub instance_id: String,
    pub completions: Vec<RewardBreakdown>,
}

/// Fraction of instances where any of the first `k` completions is
/// accurate. Empirical any-of-first-k, not the combinatorial estimator.
pub fn pass_at_k(results: &[RunResult], k: usize) -> Result<f64, EvalError> {
    if k == 0 {
        return Err(EvalError::InvalidK);
    }
    if results.is_empty() {
        return Ok(0.0);
    }
    let mut hits = 0usize;
    for r in results {
        if r.completions.len() < k {
            return Err(EvalError::InsufficientCompletions {
                id: r.instance_id.clone(),
                have: r.completions.len(),
                k,
            });
        }
        if r.completions[..k].iter().any(|c| c.r_acc == 1) {
            hits += 1;
        }
    }
    Ok(hits as f64 / results.len() as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SizeAccuracy {
    pub size: u32,
    pub count: usize,
    /// Plain accuracy: first completion accurate (= pass@1).
    pub accuracy: f64,
    pub pass_at_k: f64,
}

/// Per-size table plus warnings for manifest sizes with no scored results.
#[derive(Debug, Clone, PartialEq)]
pub struct SizeTable {
    pub k: usize,
    pub rows: Vec<SizeAccuracy>,
    pub warnings: Vec<String>,
}

/// Group results by maze size via the manifest's derivable id set. Unknown
/// instance ids are an error; manifest sizes without results are omitted
/// with a warning.
pub fn accuracy_by_size(
    results: &[RunResult],
    manifest: &DatasetManifest,
    k: usize,
) -> Result<SizeTable, EvalError> {
    if k == 0 {
        return Err(EvalError::InvalidK);
    }
    let known: alloc::collections::BTreeMap<String, u32> =
        manifest.instance_sizes().into_iter().collect();
    let mut by_size: alloc::collections::BTreeMap<u32, Vec<&RunResult>> =
        alloc::collections::BTreeMap::new();
    for r in results {
        let size = known
            .get(&r.instance_id)
            .ok_or_else(|| EvalError::UnknownInstance(r.instance_id.clone()))?;
        by_size.entry(*size).or_default().push(r);
    }
    let mut rows = Vec::new();
    for (&size, bucket) in &by_size {
        let owned: Vec<RunResult> = bucket.iter().map(|r| (*r).clone()).collect();
        rows.push(SizeAccuracy {
            size,
            count: owned.len(),
            accuracy: pass_at_k(&owned, 1)?,
            pass_at_k: pass_at_k(&owned, k)?,
        });
    }
    let mut warnings = Vec::new();
    let mut manifest_sizes: Vec<u32> = manifest
        .splits
        .iter()
        .flat_map(|s| s.sizes.iter().map(|b| b.size))
        .collect();
    manifest_sizes.sort_unstable();
    manifest_sizes.dedup();
    for size in manifest_sizes {
        if !by_size.contains_key(&size) {
            warnings.push(alloc::format!(
                "size {size} has no scored results; row omitted"
            ));
        }
    }
    Ok(SizeTable { k, rows, warnings })
}

/// Render the table as CSV with a fixed header and 6-decimal rates.
pub fn size_table_csv(table: &SizeTable) -> String {
    let mut out = String::from("size,count,accuracy,pass_at_k\n");
    for row in &table.rows {
        out.push_str(&alloc::format!(
            "{},{},{:.6},{:.6}\n",
            row.size,
            row.count,
            row.accuracy,
            row.pass_at_k
        ));
    }
    out
}
