//! `cotforge` — batch pipeline for grid-puzzle reasoning datasets.
//!
//! Subcommand-per-stage with file handoffs: generate → synth → score →
//! eval, plus `env` for the FrozenLake and jigsaw tasks. Exit codes:
//! 0 ok, 2 config error, 3 data error, 4 elaboration unavailable.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use cotforge::config::{ElaboratorMode, RunConfig};
use cotforge::pipeline::{
    self, EvalOptions, GenerateOptions, JigsawGenOptions, LakeGenOptions, ScoreOptions,
    SynthOptions,
};
use cotforge::PipelineError;
use cotforge_core::cot::CoTFormat;
use cotforge_core::eval::Preset;
use cotforge_core::verify::GrammarMode;

#[derive(Parser)]
#[command(name = "cotforge", version, about = "Grid-puzzle benchmark dataset pipeline")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Optional TOML config file; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Global seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (0 = one per core).
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Generate maze instances, images, and a manifest.
    Generate {
        #[command(flatten)]
        common: CommonArgs,
        /// Comma-separated maze sizes, e.g. 4,5,6 (ignored with --preset).
        #[arg(long, value_delimiter = ',')]
        sizes: Vec<u32>,
        /// Instances per size (per split when --preset is given).
        #[arg(long, default_value_t = 10)]
        count: usize,
        /// Built-in split design: in-domain, single-scale, or cross-scale.
        #[arg(long)]
        preset: Option<String>,
        /// Minimum truth-path length in cells (default: the maze size).
        #[arg(long)]
        min_path_len: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Synthesize SFT traces for one split of a generated dataset.
    Synth {
        #[command(flatten)]
        common: CommonArgs,
        /// Path to the dataset manifest.json.
        #[arg(long)]
        manifest: PathBuf,
        /// Split name within the manifest.
        #[arg(long, default_value = "sft")]
        split: String,
        /// Trace format: lcot, gcot, gcot-least, or vcot.
        #[arg(long)]
        format: String,
        /// Output directory (default: the manifest's directory).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Fixed reflections per grounded trace (default: 1-2 per instance).
        #[arg(long)]
        reflections: Option<u32>,
        /// Narrative source: template or remote.
        #[arg(long)]
        elaborator: Option<String>,
        /// Chat-completion endpoint for remote elaboration.
        #[arg(long)]
        endpoint: Option<String>,
        /// Model name for remote elaboration.
        #[arg(long)]
        model: Option<String>,
        /// Response cache directory for remote elaboration.
        #[arg(long)]
        cache_dir: Option<PathBuf>,
        /// Fail instead of falling back to templates when the endpoint is
        /// unavailable.
        #[arg(long)]
        no_fallback: bool,
    },
    /// Score completions against instances and write reward JSONL.
    Score {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        instances: PathBuf,
        #[arg(long)]
        completions: PathBuf,
        /// Accuracy/format mixing weight.
        #[arg(long)]
        alpha: Option<f64>,
        /// Output grammar: think (think block + boxed) or answer-only.
        #[arg(long, default_value = "think")]
        mode: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Aggregate scores into per-size accuracy and pass@k CSV.
    Eval {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        scores: PathBuf,
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long, default_value_t = 8)]
        k: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// FrozenLake and jigsaw environments.
    #[command(subcommand)]
    Env(EnvCommand),
}

#[derive(Subcommand)]
enum EnvCommand {
    #[command(subcommand)]
    Frozenlake(EnvAction),
    #[command(subcommand)]
    Jigsaw(EnvAction),
}

#[derive(Subcommand)]
enum EnvAction {
    Generate {
        #[command(flatten)]
        common: CommonArgs,
        /// Grid side length (frozenlake only).
        #[arg(long, default_value_t = 4)]
        n: u32,
        /// Hole count (frozenlake only).
        #[arg(long, default_value_t = 4)]
        holes: usize,
        #[arg(long, default_value_t = 100)]
        count: usize,
        /// Source images to slice (jigsaw only); synthetic when omitted.
        #[arg(long)]
        image: Vec<PathBuf>,
        /// Synthetic source side length in pixels (jigsaw only).
        #[arg(long, default_value_t = 96)]
        source_px: u32,
        #[arg(long)]
        out: PathBuf,
    },
    Score {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        instances: PathBuf,
        #[arg(long)]
        completions: PathBuf,
        #[arg(long)]
        alpha: Option<f64>,
        /// Output grammar mode; these tasks default to answer-only.
        #[arg(long, default_value = "answer-only")]
        mode: String,
        #[arg(long)]
        out: PathBuf,
    },
}

fn parse_mode(s: &str) -> Result<GrammarMode, PipelineError> {
    match s.to_ascii_lowercase().as_str() {
        "think" | "think-required" => Ok(GrammarMode::ThinkRequired),
        "answer-only" | "answer_only" | "answeronly" => Ok(GrammarMode::AnswerOnly),
        other => Err(PipelineError::Config(format!(
            "unknown grammar mode `{other}` (expected think or answer-only)"
        ))),
    }
}

fn run() -> Result<(), PipelineError> {
    match Cli::parse().command {
        Command::Generate {
            common,
            sizes,
            count,
            preset,
            min_path_len,
            out,
        } => {
            let cfg = RunConfig::resolve(
                common.config.as_deref(),
                common.seed,
                common.workers,
                None,
            )?;
            let preset = preset
                .map(|p| {
                    p.parse::<Preset>().map_err(|_| {
                        PipelineError::Config(format!(
                            "unknown preset `{p}` (expected in-domain, single-scale, or cross-scale)"
                        ))
                    })
                })
                .transpose()?;
            let manifest = pipeline::cmd_generate(
                &GenerateOptions {
                    preset,
                    sizes,
                    count,
                    min_path_len,
                    out: out.clone(),
                },
                &cfg,
            )?;
            let total: usize = manifest.splits.iter().map(|s| s.instance_count()).sum();
            println!(
                "generated {total} instances across {} split(s) into {}",
                manifest.splits.len(),
                out.display()
            );
            Ok(())
        }
        Command::Synth {
            common,
            manifest,
            split,
            format,
            out,
            reflections,
            elaborator,
            endpoint,
            model,
            cache_dir,
            no_fallback,
        } => {
            let mut cfg = RunConfig::resolve(
                common.config.as_deref(),
                common.seed,
                common.workers,
                None,
            )?;
            if let Some(mode) = elaborator {
                cfg.elaborator.mode = mode.parse::<ElaboratorMode>().map_err(|_| {
                    PipelineError::Config(format!(
                        "unknown elaborator `{mode}` (expected template or remote)"
                    ))
                })?;
            }
            if endpoint.is_some() {
                cfg.elaborator.endpoint = endpoint;
            }
            if model.is_some() {
                cfg.elaborator.model = model;
            }
            if cache_dir.is_some() {
                cfg.elaborator.cache_dir = cache_dir;
            }
            if no_fallback {
                cfg.elaborator.fallback_to_template = false;
            }
            let format = format.parse::<CoTFormat>().map_err(|_| {
                PipelineError::Config(format!(
                    "unknown format `{format}` (expected lcot, gcot, gcot-least, or vcot)"
                ))
            })?;
            let report = pipeline::cmd_synth(
                &SynthOptions {
                    manifest,
                    split,
                    format,
                    out,
                    reflections,
                },
                &cfg,
            )?;
            println!(
                "wrote {} samples to {} ({} rejected, reflection shortfall {})",
                report.written,
                report.samples_file.display(),
                report.rejected,
                report.reflection_shortfall
            );
            Ok(())
        }
        Command::Score {
            common,
            instances,
            completions,
            alpha,
            mode,
            out,
        } => {
            let cfg = RunConfig::resolve(
                common.config.as_deref(),
                common.seed,
                common.workers,
                alpha,
            )?;
            let scores = pipeline::cmd_score(
                &ScoreOptions {
                    instances,
                    completions,
                    mode: parse_mode(&mode)?,
                    out: out.clone(),
                },
                &cfg,
            )?;
            println!("scored {} completions into {}", scores.len(), out.display());
            Ok(())
        }
        Command::Eval {
            common: _,
            scores,
            manifest,
            k,
            out,
        } => {
            let report = pipeline::cmd_eval(&EvalOptions {
                scores,
                manifest,
                k,
                out: out.clone(),
            })?;
            for warning in &report.warnings {
                eprintln!("warning: {warning}");
            }
            println!(
                "pass@{} = {:.6} over {} size row(s); table written to {}",
                report.k,
                report.overall_pass_at_k,
                report.rows.len(),
                out.display()
            );
            Ok(())
        }
        Command::Env(env) => {
            let (is_lake, action) = match env {
                EnvCommand::Frozenlake(a) => (true, a),
                EnvCommand::Jigsaw(a) => (false, a),
            };
            match action {
                EnvAction::Generate {
                    common,
                    n,
                    holes,
                    count,
                    image,
                    source_px,
                    out,
                } => {
                    let cfg = RunConfig::resolve(
                        common.config.as_deref(),
                        common.seed,
                        common.workers,
                        None,
                    )?;
                    if is_lake {
                        pipeline::cmd_lake_generate(
                            &LakeGenOptions {
                                n,
                                holes,
                                count,
                                out: out.clone(),
                            },
                            &cfg,
                        )?;
                    } else {
                        pipeline::cmd_jigsaw_generate(
                            &JigsawGenOptions {
                                count,
                                sources: image,
                                source_px,
                                out: out.clone(),
                            },
                            &cfg,
                        )?;
                    }
                    println!("generated {count} instances into {}", out.display());
                    Ok(())
                }
                EnvAction::Score {
                    common,
                    instances,
                    completions,
                    alpha,
                    mode,
                    out,
                } => {
                    let cfg = RunConfig::resolve(
                        common.config.as_deref(),
                        common.seed,
                        common.workers,
                        alpha,
                    )?;
                    let scores = pipeline::cmd_score(
                        &ScoreOptions {
                            instances,
                            completions,
                            mode: parse_mode(&mode)?,
                            out: out.clone(),
                        },
                        &cfg,
                    )?;
                    println!("scored {} completions into {}", scores.len(), out.display());
                    Ok(())
                }
            }
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
