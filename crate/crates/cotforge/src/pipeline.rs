//! The dataset pipeline behind each CLI subcommand. Every stage is a pure
//! function of its inputs plus seeds: workers run in parallel but results
//! are collected in instance order before any file is written, so repeated
//! runs produce byte-identical trees.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, AtomicUsize, Ordering};

use cotforge_core::cot::{
    default_reflection_count, format_sft_sample, synth_gcot, synth_gcot_least, synth_lcot,
    synth_vcot, CoTFormat, SynthError,
};
use cotforge_core::dataset::{
    CompletionRecord, InstanceRecord, ScoreRecord, SftSample, TaskKind,
};
use cotforge_core::elaborate::{Elaborate, ElaborateError, TemplateElaborator, TraceSkeleton};
use cotforge_core::envs::jigsaw::{gen_jigsaw, synthetic_source};
use cotforge_core::envs::lake::{gen_frozenlake, LakeMap};
use cotforge_core::eval::{
    accuracy_by_size, instance_id, make_splits, pass_at_k, size_table_csv, DatasetManifest,
    EvalError, Preset, RunResult, SizeAccuracy, SizeBucket, SizeTable, SplitCounts, SplitDesign,
    SplitManifest,
};
use cotforge_core::maze::{Cell, Maze, Path as MazePath, TaskInstance};
use cotforge_core::render::{render_maze, render_trajectory_frames, RenderSpec};
use cotforge_core::verify::{
    composite_reward, extract_blocks, jigsaw_reward_acc, lake_reward_acc, maze_reward_acc,
    parse_answer, AnswerKind, GrammarMode, RewardConfig,
};
use cotforge_core::dataset::DATASET_SCHEMA_VERSION;
use rayon::prelude::*;

use crate::config::{ElaboratorMode, RunConfig};
use crate::remote::RemoteElaborator;
use crate::{jsonl, png, PipelineError, Result};

/// Decorrelates endpoint sampling from wall generation for one seed.
const ENDPOINT_SEED_SALT: u64 = 0x9e37_79b9_7f4a_7c15;

fn thread_pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| PipelineError::config(format!("thread pool: {e}")))
}

fn maze_question(n: u32, s: Cell, e: Cell) -> String {
    format!(
        "This is a {n}x{n} maze. Walls sit between adjacent cells and the outer border is \
         walled. Rows and columns are numbered from 1 starting at the top-left corner; cells \
         are written (row, col). Find a path from the green start marker in cell ({}, {}) to \
         the red end marker in cell ({}, {}), moving only between adjacent cells with no wall \
         between them.",
        s.row, s.col, e.row, e.col
    )
}

fn lake_question(lake: &LakeMap) -> String {
    format!(
        "This is a {0}x{0} frozen lake, one row per line: S is the start, G the gift, H a \
         hole, F safe ice.\n{1}Reach the gift from the start without stepping into any hole; \
         moves off the grid keep your position. Give only the final answer inside \\boxed{{}}: \
         the list of moves, each one of [\"Left\", \"Right\", \"Up\", \"Down\"].",
        lake.n(),
        lake.to_text()
    )
}

fn jigsaw_question() -> String {
    "The source image was cut into a 3x3 grid of nine tiles and the tiles were shuffled; \
     tile k is the k-th shuffled tile. For each board position in raster-scan order (left to \
     right, top to bottom), give the 1-based index of the shuffled tile that belongs there. \
     Give only the final answer inside \\boxed{}: a list of nine integers."
        .to_string()
}

// ---------------------------------------------------------------------------
// generate
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct GenerateOptions {
    pub preset: Option<Preset>,
    pub sizes: Vec<u32>,
    /// Instances per size (explicit mode) or per size per split (presets).
    pub count: usize,
    pub min_path_len: Option<usize>,
    pub out: PathBuf,
}

/// Build the manifest, then every split's instances and base images.
pub fn cmd_generate(opts: &GenerateOptions, cfg: &RunConfig) -> Result<DatasetManifest> {
    let manifest = plan_manifest(opts, cfg.seed)?;
    let pool = thread_pool(cfg.workers)?;
    for split in &manifest.splits {
        let work = split.instances(manifest.task);
        let rows: Vec<(InstanceRecord, Vec<u8>)> = pool.install(|| {
            work.par_iter()
                .map(|(id, size, seed)| {
                    build_maze_instance(
                        id,
                        *size,
                        *seed,
                        opts.min_path_len,
                        &manifest.render_spec,
                        &split.images_dir,
                    )
                })
                .collect::<Result<Vec<_>>>()
        })?;
        let mut records = Vec::with_capacity(rows.len());
        for (record, png_bytes) in rows {
            let InstanceRecord::Maze { image, .. } = &record else {
                unreachable!("generate emits maze records")
            };
            let path = opts.out.join(image);
            if let Some(parent) = path.parent() {
                std::fs::create_dir_all(parent)
                    .map_err(|e| PipelineError::data(format!("{}: {e}", parent.display())))?;
            }
            std::fs::write(&path, &png_bytes)
                .map_err(|e| PipelineError::data(format!("{}: {e}", path.display())))?;
            records.push(record);
        }
        jsonl::write_jsonl(&opts.out.join(&split.instances_file), &records)?;
    }
    write_manifest(&manifest, &opts.out.join("manifest.json"))?;
    cfg.echo(&opts.out)?;
    Ok(manifest)
}

fn plan_manifest(opts: &GenerateOptions, base_seed: u64) -> Result<DatasetManifest> {
    if opts.count == 0 {
        return Err(PipelineError::config("--count must be at least 1"));
    }
    let manifest = match opts.preset {
        Some(preset) => {
            let mut design = SplitDesign::preset(preset, base_seed);
            design.counts = SplitCounts {
                sft: opts.count * design.sft_sizes.len(),
                rl: opts.count * design.rl_sizes.len(),
                test: opts.count * design.test_sizes.len(),
            };
            make_splits(&design).map_err(PipelineError::config)?
        }
        None => {
            if opts.sizes.is_empty() {
                return Err(PipelineError::config(
                    "either --preset or a non-empty --sizes list is required",
                ));
            }
            let mut cursor = base_seed;
            let mut buckets = Vec::new();
            for &size in &opts.sizes {
                if size < 2 {
                    return Err(PipelineError::config(format!(
                        "maze sizes must be >= 2, got {size}"
                    )));
                }
                buckets.push(SizeBucket {
                    size,
                    count: opts.count,
                    seed_start: cursor,
                });
                cursor += opts.count as u64;
            }
            let manifest = DatasetManifest {
                schema_version: DATASET_SCHEMA_VERSION,
                task: TaskKind::Maze,
                base_seed,
                cot_format: None,
                render_spec: RenderSpec::default(),
                splits: vec![SplitManifest {
                    name: "main".into(),
                    sizes: buckets,
                    instances_file: "main_instances.jsonl".into(),
                    images_dir: "images/main".into(),
                }],
            };
            manifest.validate().map_err(PipelineError::config)?;
            manifest
        }
    };
    Ok(manifest)
}

fn build_maze_instance(
    id: &str,
    size: u32,
    seed: u64,
    min_path_len: Option<usize>,
    spec: &RenderSpec,
    images_dir: &str,
) -> Result<(InstanceRecord, Vec<u8>)> {
    let fail = |e: &dyn std::fmt::Display| PipelineError::data(format!("{id}: {e}"));
    let maze = Maze::generate(size, seed).map_err(|e| fail(&e))?;
    let min_len = min_path_len.unwrap_or(size as usize);
    let (s, e) = maze
        .sample_endpoints(seed ^ ENDPOINT_SEED_SALT, min_len)
        .map_err(|e| fail(&e))?;
    let truth = maze.solve(s, e).map_err(|e| fail(&e))?;
    let image = format!("{images_dir}/{id}_step0.png");
    let img = render_maze(&maze, s, e, spec).map_err(|e| fail(&e))?;
    let record = InstanceRecord::Maze {
        id: id.to_string(),
        size,
        seed,
        question: maze_question(size, s, e),
        image,
        maze: maze.to_text(),
        start: s,
        end: e,
        truth: truth.cells().to_vec(),
    };
    Ok((record, encode_png(&img)?))
}

/// Encode in the worker so the parallel section stays write-free.
fn encode_png(img: &cotforge_core::render::Image) -> Result<Vec<u8>> {
    let mut bytes = Vec::new();
    let encoder = image::codecs::png::PngEncoder::new(&mut bytes);
    image::ImageEncoder::write_image(
        encoder,
        img.pixels(),
        img.width(),
        img.height(),
        image::ExtendedColorType::Rgba8,
    )
    .map_err(|e| PipelineError::data(format!("png encode: {e}")))?;
    Ok(bytes)
}

fn write_manifest(manifest: &DatasetManifest, path: &Path) -> Result<()> {
    let text = serde_json::to_string_pretty(manifest)
        .map_err(|e| PipelineError::data(format!("manifest: {e}")))?;
    jsonl::write_string(path, &format!("{text}\n"))
}

pub fn read_manifest(path: &Path) -> Result<DatasetManifest> {
    let text = jsonl::read_string(path)?;
    let manifest: DatasetManifest = serde_json::from_str(&text)
        .map_err(|e| PipelineError::data(format!("{}: {e}", path.display())))?;
    manifest.validate().map_err(PipelineError::data)?;
    Ok(manifest)
}

// ---------------------------------------------------------------------------
// synth
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct SynthOptions {
    pub manifest: PathBuf,
    pub split: String,
    pub format: CoTFormat,
    /// Defaults to the manifest's directory so image refs stay valid.
    pub out: Option<PathBuf>,
    /// Fixed reflection count for grounded traces; default samples 1..=2
    /// per instance.
    pub reflections: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SynthReport {
    pub written: usize,
    pub rejected: usize,
    pub reflection_shortfall: u64,
    pub samples_file: PathBuf,
    pub manifest_file: PathBuf,
}

/// Elaborator that falls back to templates when the endpoint stays down.
struct FallbackElaborator {
    remote: RemoteElaborator,
    fallback: bool,
}

impl Elaborate for FallbackElaborator {
    fn elaborate(&self, skeleton: &TraceSkeleton) -> std::result::Result<Vec<String>, ElaborateError> {
        match self.remote.elaborate(skeleton) {
            Err(ElaborateError::Unavailable(_)) if self.fallback => {
                TemplateElaborator.elaborate(skeleton)
            }
            other => other,
        }
    }
}

fn build_elaborator(cfg: &RunConfig) -> Result<Box<dyn Elaborate + Send + Sync>> {
    cfg.elaborator.validate()?;
    match cfg.elaborator.mode {
        ElaboratorMode::Template => Ok(Box::new(TemplateElaborator)),
        ElaboratorMode::Remote => {
            let remote = RemoteElaborator::new(
                cfg.elaborator.endpoint.clone().expect("validated"),
                cfg.elaborator.model.clone().unwrap_or_default(),
                cfg.elaborator.template_id.clone(),
                cfg.elaborator.cache_dir.clone(),
                cfg.elaborator.retry.clone(),
                cfg.elaborator.max_in_flight,
            );
            Ok(Box::new(FallbackElaborator {
                remote,
                fallback: cfg.elaborator.fallback_to_template,
            }))
        }
    }
}

/// Synthesize one trace format over a split: SFT JSONL plus, for visual
/// traces, the per-step frame images.
pub fn cmd_synth(opts: &SynthOptions, cfg: &RunConfig) -> Result<SynthReport> {
    let manifest = read_manifest(&opts.manifest)?;
    let dataset_root = opts
        .manifest
        .parent()
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from("."));
    let out = opts.out.clone().unwrap_or_else(|| dataset_root.clone());
    let split = manifest
        .split(&opts.split)
        .ok_or_else(|| {
            PipelineError::config(format!("manifest has no split named `{}`", opts.split))
        })?
        .clone();
    let records: Vec<InstanceRecord> =
        jsonl::read_jsonl(&dataset_root.join(&split.instances_file))?;
    let elaborator = build_elaborator(cfg)?;
    let spec = manifest.render_spec.clone();
    let format = opts.format;

    let rejected = AtomicUsize::new(0);
    let shortfall = AtomicU64::new(0);
    let pool = thread_pool(cfg.workers)?;
    let samples: Vec<Option<SftSample>> = pool.install(|| {
        records
            .par_iter()
            .map(|record| {
                synth_one(
                    record,
                    format,
                    &spec,
                    elaborator.as_ref(),
                    opts.reflections,
                    &out,
                    &rejected,
                    &shortfall,
                )
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let samples: Vec<SftSample> = samples.into_iter().flatten().collect();

    let samples_file = out.join(format!("{}_{}.jsonl", opts.split, format.as_str()));
    jsonl::write_jsonl(&samples_file, &samples)?;
    let mut synth_manifest = manifest.clone();
    synth_manifest.cot_format = Some(format);
    let manifest_file = out.join(format!("manifest_{}.json", format.as_str()));
    write_manifest(&synth_manifest, &manifest_file)?;
    cfg.echo(&out)?;
    Ok(SynthReport {
        written: samples.len(),
        rejected: rejected.load(Ordering::Relaxed),
        reflection_shortfall: shortfall.load(Ordering::Relaxed),
        samples_file,
        manifest_file,
    })
}

#[allow(clippy::too_many_arguments)]
fn synth_one(
    record: &InstanceRecord,
    format: CoTFormat,
    spec: &RenderSpec,
    elaborator: &(dyn Elaborate + Send + Sync),
    reflections: Option<u32>,
    out: &Path,
    rejected: &AtomicUsize,
    shortfall: &AtomicU64,
) -> Result<Option<SftSample>> {
    let InstanceRecord::Maze {
        id,
        seed,
        question,
        image,
        maze,
        start,
        end,
        truth,
        ..
    } = record
    else {
        return Err(PipelineError::config(
            "trace synthesis expects a maze manifest",
        ));
    };
    let fail = |e: &dyn std::fmt::Display| PipelineError::data(format!("{id}: {e}"));
    let maze = Maze::from_text(maze).map_err(|e| fail(&e))?;
    let truth = MazePath::new(truth.clone()).map_err(|e| fail(&e))?;
    let instance = TaskInstance::new(
        id.clone(),
        maze,
        *start,
        *end,
        question.clone(),
        image.clone(),
        truth,
    )
    .map_err(|e| fail(&e))?;

    let outcome = match format {
        CoTFormat::LCot => synth_lcot(&instance, elaborator),
        CoTFormat::GCotLeast => Ok(synth_gcot_least(&instance)),
        CoTFormat::GCot => {
            let requested = reflections.unwrap_or_else(|| default_reflection_count(*seed));
            synth_gcot(&instance, spec, *seed, requested).map(|g| {
                shortfall.fetch_add(
                    u64::from(g.reflections_requested - g.reflections_emitted),
                    Ordering::Relaxed,
                );
                g.trace
            })
        }
        CoTFormat::VCot => synth_vcot(&instance, spec, elaborator).and_then(|trace| {
            let frames = render_trajectory_frames(
                &instance.maze,
                instance.start,
                instance.end,
                spec,
                &instance.truth,
            )?;
            for (frame, step) in frames.iter().zip(&trace.steps) {
                let rel = step.image_ref.as_deref().expect("vcot steps carry frames");
                png::write_png(frame, &out.join(rel))
                    .map_err(|e| SynthError::Rejected(e.to_string()))?;
            }
            Ok(trace)
        }),
    };
    match outcome {
        Ok(trace) => Ok(Some(format_sft_sample(&trace, &instance))),
        Err(SynthError::Rejected(_)) => {
            rejected.fetch_add(1, Ordering::Relaxed);
            Ok(None)
        }
        Err(SynthError::Elaborate(ElaborateError::Rejected(_))) => {
            rejected.fetch_add(1, Ordering::Relaxed);
            Ok(None)
        }
        Err(SynthError::Elaborate(ElaborateError::Unavailable(msg))) => {
            Err(PipelineError::Elaboration(msg))
        }
        Err(e) => Err(fail(&e)),
    }
}

// ---------------------------------------------------------------------------
// score
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct ScoreOptions {
    pub instances: PathBuf,
    pub completions: PathBuf,
    pub mode: GrammarMode,
    pub out: PathBuf,
}

enum PreparedTruth {
    Maze(Box<TaskInstance>),
    Lake(LakeMap),
    Jigsaw(Vec<u32>),
}

fn prepare_truth(record: &InstanceRecord) -> Result<PreparedTruth> {
    let fail = |e: &dyn std::fmt::Display| {
        PipelineError::data(format!("{}: {e}", record.id()))
    };
    match record {
        InstanceRecord::Maze {
            id,
            question,
            image,
            maze,
            start,
            end,
            truth,
            ..
        } => {
            let maze = Maze::from_text(maze).map_err(|e| fail(&e))?;
            let truth = MazePath::new(truth.clone()).map_err(|e| fail(&e))?;
            Ok(PreparedTruth::Maze(Box::new(
                TaskInstance::new(
                    id.clone(),
                    maze,
                    *start,
                    *end,
                    question.clone(),
                    image.clone(),
                    truth,
                )
                .map_err(|e| fail(&e))?,
            )))
        }
        InstanceRecord::Frozenlake { map, .. } => {
            Ok(PreparedTruth::Lake(LakeMap::from_text(map).map_err(|e| fail(&e))?))
        }
        InstanceRecord::Jigsaw { truth, .. } => Ok(PreparedTruth::Jigsaw(truth.clone())),
    }
}

fn score_completion(
    truth: &PreparedTruth,
    spec: &RenderSpec,
    completion: &str,
    mode: GrammarMode,
    reward: &RewardConfig,
) -> (u8, u8, f64) {
    let parsed = extract_blocks(completion, mode);
    let r_format = cotforge_core::verify::reward_format(&parsed);
    // The answer-only grammar accepts bare (unboxed) answers for accuracy.
    let trimmed = completion.trim().to_string();
    let answer_text = parsed.boxed_text.clone().or_else(|| {
        matches!(mode, GrammarMode::AnswerOnly).then_some(trimmed)
    });
    let r_acc = match answer_text {
        None => 0,
        Some(text) => match truth {
            PreparedTruth::Maze(instance) => {
                let as_cells = parse_answer(&text, AnswerKind::Cells)
                    .map(|a| maze_reward_acc(instance, spec, &a).r_acc())
                    .unwrap_or(0);
                if as_cells == 1 {
                    1
                } else {
                    parse_answer(&text, AnswerKind::PixelCoords)
                        .map(|a| maze_reward_acc(instance, spec, &a).r_acc())
                        .unwrap_or(0)
                }
            }
            PreparedTruth::Lake(lake) => parse_answer(&text, AnswerKind::Actions)
                .map(|a| lake_reward_acc(lake, &a).r_acc())
                .unwrap_or(0),
            PreparedTruth::Jigsaw(truth) => parse_answer(&text, AnswerKind::Permutation)
                .map(|a| jigsaw_reward_acc(truth, &a).r_acc())
                .unwrap_or(0),
        },
    };
    let breakdown = composite_reward(r_acc, r_format, reward);
    (breakdown.r_acc, breakdown.r_format, breakdown.total)
}

/// Score a completions file against its instances file.
pub fn cmd_score(opts: &ScoreOptions, cfg: &RunConfig) -> Result<Vec<ScoreRecord>> {
    let reward = RewardConfig::new(cfg.alpha)
        .map_err(|e| PipelineError::config(e.to_string()))?;
    let records: Vec<InstanceRecord> = jsonl::read_jsonl(&opts.instances)?;
    let mut truths: HashMap<String, PreparedTruth> = HashMap::with_capacity(records.len());
    for record in &records {
        truths.insert(record.id().to_string(), prepare_truth(record)?);
    }
    let completions: Vec<CompletionRecord> = jsonl::read_jsonl(&opts.completions)?;
    let spec = RenderSpec::default();

    let pool = thread_pool(cfg.workers)?;
    let scores: Vec<ScoreRecord> = pool.install(|| {
        completions
            .par_iter()
            .map(|c| {
                let truth = truths.get(&c.instance_id).ok_or_else(|| {
                    PipelineError::data(format!(
                        "completion references unknown instance `{}`",
                        c.instance_id
                    ))
                })?;
                let (r_acc, r_format, total) =
                    score_completion(truth, &spec, &c.completion, opts.mode, &reward);
                Ok(ScoreRecord {
                    instance_id: c.instance_id.clone(),
                    r_acc,
                    r_format,
                    total,
                })
            })
            .collect::<Result<Vec<_>>>()
    })?;
    jsonl::write_jsonl(&opts.out, &scores)?;
    Ok(scores)
}

// ---------------------------------------------------------------------------
// eval
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct EvalOptions {
    pub scores: PathBuf,
    pub manifest: PathBuf,
    pub k: usize,
    pub out: PathBuf,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub rows: Vec<SizeAccuracy>,
    pub warnings: Vec<String>,
    pub overall_pass_at_k: f64,
    pub k: usize,
}

fn eval_error(e: EvalError) -> PipelineError {
    match e {
        EvalError::InvalidK | EvalError::InsufficientCompletions { .. } => {
            PipelineError::config(e.to_string())
        }
        other => PipelineError::data(other.to_string()),
    }
}

/// Group score rows into per-instance runs (preserving row order within an
/// instance) and emit the per-size CSV.
pub fn cmd_eval(opts: &EvalOptions) -> Result<EvalReport> {
    let manifest = read_manifest(&opts.manifest)?;
    let scores: Vec<ScoreRecord> = jsonl::read_jsonl(&opts.scores)?;
    let mut order: Vec<String> = Vec::new();
    let mut grouped: HashMap<String, RunResult> = HashMap::new();
    for row in scores {
        let entry = grouped
            .entry(row.instance_id.clone())
            .or_insert_with(|| {
                order.push(row.instance_id.clone());
                RunResult {
                    instance_id: row.instance_id.clone(),
                    completions: Vec::new(),
                }
            });
        entry.completions.push(cotforge_core::verify::RewardBreakdown {
            r_acc: row.r_acc,
            r_format: row.r_format,
            total: row.total,
        });
    }
    let results: Vec<RunResult> = order
        .into_iter()
        .map(|id| grouped.remove(&id).expect("grouped by construction"))
        .collect();

    let table: SizeTable = accuracy_by_size(&results, &manifest, opts.k).map_err(eval_error)?;
    let overall = pass_at_k(&results, opts.k).map_err(eval_error)?;
    jsonl::write_string(&opts.out, &size_table_csv(&table))?;
    Ok(EvalReport {
        rows: table.rows,
        warnings: table.warnings,
        overall_pass_at_k: overall,
        k: opts.k,
    })
}

// ---------------------------------------------------------------------------
// env frozenlake / jigsaw
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct LakeGenOptions {
    pub n: u32,
    pub holes: usize,
    pub count: usize,
    pub out: PathBuf,
}

pub fn cmd_lake_generate(opts: &LakeGenOptions, cfg: &RunConfig) -> Result<DatasetManifest> {
    if opts.count == 0 {
        return Err(PipelineError::config("--count must be at least 1"));
    }
    let pool = thread_pool(cfg.workers)?;
    let seeds: Vec<u64> = (0..opts.count as u64).map(|i| cfg.seed + i).collect();
    let records: Vec<InstanceRecord> = pool.install(|| {
        seeds
            .par_iter()
            .map(|&seed| {
                let lake = gen_frozenlake(opts.n, opts.holes, seed)
                    .map_err(|e| PipelineError::data(format!("seed {seed}: {e}")))?;
                let truth = lake.solve().expect("generator guarantees solvability");
                Ok(InstanceRecord::Frozenlake {
                    id: instance_id(TaskKind::Frozenlake, opts.n, seed),
                    size: opts.n,
                    seed,
                    question: lake_question(&lake),
                    map: lake.to_text(),
                    truth,
                })
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let manifest = DatasetManifest {
        schema_version: DATASET_SCHEMA_VERSION,
        task: TaskKind::Frozenlake,
        base_seed: cfg.seed,
        cot_format: None,
        render_spec: RenderSpec::default(),
        splits: vec![SplitManifest {
            name: "main".into(),
            sizes: vec![SizeBucket {
                size: opts.n,
                count: opts.count,
                seed_start: cfg.seed,
            }],
            instances_file: "main_instances.jsonl".into(),
            images_dir: "images/main".into(),
        }],
    };
    jsonl::write_jsonl(&opts.out.join("main_instances.jsonl"), &records)?;
    write_manifest(&manifest, &opts.out.join("manifest.json"))?;
    cfg.echo(&opts.out)?;
    Ok(manifest)
}

#[derive(Debug, Clone)]
pub struct JigsawGenOptions {
    pub count: usize,
    /// Source images to slice; cycled when fewer than `count`. Synthetic
    /// noise sources are generated when empty.
    pub sources: Vec<PathBuf>,
    /// Side length of synthetic sources.
    pub source_px: u32,
    pub out: PathBuf,
}

pub fn cmd_jigsaw_generate(opts: &JigsawGenOptions, cfg: &RunConfig) -> Result<DatasetManifest> {
    if opts.count == 0 {
        return Err(PipelineError::config("--count must be at least 1"));
    }
    if opts.source_px < 9 {
        return Err(PipelineError::config("--source-px must be at least 9"));
    }
    let mut loaded: Vec<cotforge_core::render::Image> = Vec::new();
    for path in &opts.sources {
        loaded.push(png::read_png(path)?);
    }
    let images_dir = "images/main";
    let mut records = Vec::with_capacity(opts.count);
    for i in 0..opts.count as u64 {
        let seed = cfg.seed + i;
        let id = instance_id(TaskKind::Jigsaw, 3, seed);
        let source = if loaded.is_empty() {
            synthetic_source(opts.source_px, opts.source_px, seed)
        } else {
            loaded[(i as usize) % loaded.len()].clone()
        };
        let source_ref = format!("{images_dir}/{id}_source.png");
        let pieces = gen_jigsaw(&source, &source_ref, &id, seed)
            .map_err(|e| PipelineError::data(format!("{id}: {e}")))?;
        png::write_png(&pieces.cropped_source, &opts.out.join(&source_ref))?;
        let mut tile_refs = Vec::with_capacity(pieces.tiles.len());
        for (tile, rel) in pieces.tiles.iter().zip(&pieces.instance.shuffled_tiles) {
            let rel = format!("{images_dir}/{rel}");
            png::write_png(tile, &opts.out.join(&rel))?;
            tile_refs.push(rel);
        }
        records.push(InstanceRecord::Jigsaw {
            id,
            size: 3,
            seed,
            question: jigsaw_question(),
            source: source_ref,
            tiles: tile_refs,
            truth: pieces.instance.truth_permutation,
        });
    }
    let manifest = DatasetManifest {
        schema_version: DATASET_SCHEMA_VERSION,
        task: TaskKind::Jigsaw,
        base_seed: cfg.seed,
        cot_format: None,
        render_spec: RenderSpec::default(),
        splits: vec![SplitManifest {
            name: "main".into(),
            sizes: vec![SizeBucket {
                size: 3,
                count: opts.count,
                seed_start: cfg.seed,
            }],
            instances_file: "main_instances.jsonl".into(),
            images_dir: images_dir.into(),
        }],
    };
    jsonl::write_jsonl(&opts.out.join("main_instances.jsonl"), &records)?;
    write_manifest(&manifest, &opts.out.join("manifest.json"))?;
    cfg.echo(&opts.out)?;
    Ok(manifest)
}
