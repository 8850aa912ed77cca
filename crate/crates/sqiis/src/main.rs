use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use sqiis::config::{read, EngineConfig, OutputFormat};
use sqiis::parallel::run_evaluation_parallel;
use sqiis::{format, reference, render};
use sqiis_core::tagger::DEFAULT_CANDIDATE_CAP;
use sqiis_core::{
    compile_handcrafted, enumerate_combinations, generate_rulebase, is_valid_combination, run_evaluation,
    tokenize_and_tag, Error as CoreError,
};

const EXIT_CONFIG: u8 = 1;
const EXIT_BAD_QUERY: u8 = 2;
const EXIT_NO_DOMAIN: u8 = 3;

/// Rule-based short query intent identification.
#[derive(Debug, Parser)]
#[command(name = "sqiis", version)]
struct Cli {
    /// Write the reference configuration into DIR (and use it as the config root).
    #[arg(long, value_name = "DIR")]
    seed_config: Option<PathBuf>,

    #[command(flatten)]
    paths: PathArgs,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Debug, Args)]
struct PathArgs {
    /// Directory holding registry.tsv, lexicons.tsv, rulebase.tsv and weights.tsv.
    #[arg(long, global = true, env = "SQIIS_CONFIG_DIR", default_value = ".")]
    config_dir: PathBuf,
    #[arg(long, global = true)]
    registry: Option<PathBuf>,
    #[arg(long, global = true)]
    lexicons: Option<PathBuf>,
    #[arg(long, global = true)]
    rulebase: Option<PathBuf>,
    #[arg(long, global = true)]
    weights: Option<PathBuf>,
    /// Exclusion pairs; none are applied unless this is given.
    #[arg(long, global = true)]
    exclusions: Option<PathBuf>,
    /// Maximum number of candidate tag combinations per query.
    #[arg(long, global = true, default_value_t = DEFAULT_CANDIDATE_CAP)]
    cap: usize,
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Table)]
    format: OutputFormat,
    /// Write the main output here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Show the tokens of a query and the tags attached to each.
    Tag { query: String },
    /// Select the domain of a query.
    Classify {
        query: String,
        /// Also print tokens and every candidate combination.
        #[arg(short, long)]
        verbose: bool,
    },
    /// Build a rule base or a label sheet.
    GenRules {
        #[arg(long, value_enum)]
        mode: GenMode,
        /// Filled label sheet (compile mode).
        #[arg(long)]
        labels: Option<PathBuf>,
    },
    /// List every non-empty tag combination of the registry.
    Enumerate {
        /// Drop combinations that contain an excluded pair.
        #[arg(long)]
        valid_only: bool,
    },
    /// Single-tag substitution robustness evaluation of the rule base.
    Evaluate {
        /// Combination sizes to perturb, `MIN..MAX` inclusive (default 1..tags-1).
        #[arg(long, value_parser = parse_sizes)]
        sizes: Option<(usize, usize)>,
        /// Distance thresholds for the cumulative counts.
        #[arg(long, value_delimiter = ',', default_value = "0.6")]
        tau: Vec<f64>,
        /// Write plot-ready columns (class, cumulative cases, distance) here.
        #[arg(long)]
        plot: Option<PathBuf>,
        /// Evaluate on one thread.
        #[arg(long)]
        serial: bool,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum GenMode {
    /// Rule base from the weight matrix and exclusions.
    SystemGenerated,
    /// Blank label sheet for hand-crafting.
    Scaffold,
    /// Hand-crafted rule base from a filled label sheet.
    Compile,
}

fn parse_sizes(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once("..").ok_or("expected MIN..MAX")?;
    let a = a.trim().parse().map_err(|_| format!("bad minimum `{a}`"))?;
    let b = b.trim().parse().map_err(|_| format!("bad maximum `{b}`"))?;
    Ok((a, b))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            let bad_query = err
                .chain()
                .any(|e| e.downcast_ref::<CoreError>() == Some(&CoreError::EmptyQuery));
            ExitCode::from(if bad_query { EXIT_BAD_QUERY } else { EXIT_CONFIG })
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    let p = cli.paths;
    let mut config = EngineConfig {
        root: p.config_dir,
        registry: p.registry,
        lexicons: p.lexicons,
        rulebase: p.rulebase,
        weights: p.weights,
        exclusions: p.exclusions,
        candidate_cap: p.cap,
        format: p.format,
    };
    if config.candidate_cap == 0 {
        bail!("--cap must be at least 1");
    }

    if let Some(dir) = &cli.seed_config {
        let written = reference::seed(dir)?;
        if cli.command.is_none() {
            for path in written {
                println!("{}", path.display());
            }
            return Ok(ExitCode::SUCCESS);
        }
        config.root = dir.clone();
    }

    let Some(command) = cli.command else {
        Cli::command().print_help()?;
        return Ok(ExitCode::from(EXIT_CONFIG));
    };
    let out = p.out.as_deref();

    match command {
        Command::Tag { query } => {
            let (tags, _) = config.registries()?;
            let lexicon = config.lexicon(&tags)?;
            let tagged = tokenize_and_tag(&query, &lexicon)?;
            let text = match config.format {
                OutputFormat::Table => render::tagged_table(&tags, &tagged),
                OutputFormat::Structured => render::tagged_structured(&tags, &tagged),
            };
            emit(out, &text)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Classify { query, verbose } => {
            let engine = config.engine()?;
            let result = engine.classify(&query)?;
            let text = match config.format {
                OutputFormat::Table => render::classification_table(&engine.tags, &engine.domains, &result, verbose),
                OutputFormat::Structured => render::classification_structured(&engine.tags, &engine.domains, &result),
            };
            emit(out, &text)?;
            Ok(match result.domain() {
                Some(_) => ExitCode::SUCCESS,
                None => ExitCode::from(EXIT_NO_DOMAIN),
            })
        }
        Command::GenRules { mode, labels } => {
            let (tags, domains) = config.registries()?;
            let text = match mode {
                GenMode::SystemGenerated => {
                    let weights = config.weights(&tags, &domains)?;
                    let exclusions = config.exclusions(&tags)?;
                    let rb = generate_rulebase(&weights, &exclusions)?;
                    format::write_rulebase(&tags, &domains, &rb)
                }
                GenMode::Scaffold => {
                    let exclusions = config.exclusions(&tags)?;
                    format::scaffold_labelsheet(&tags, &domains, &exclusions)?
                }
                GenMode::Compile => {
                    let Some(path) = labels else {
                        bail!("--labels is required with --mode compile");
                    };
                    let sheet = format::load_labelsheet(&tags, &domains, &read(&path)?)
                        .with_context(|| path.display().to_string())?;
                    let rb = compile_handcrafted(&sheet).with_context(|| path.display().to_string())?;
                    format::write_rulebase(&tags, &domains, &rb)
                }
            };
            emit(out, &text)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Enumerate { valid_only } => {
            let (tags, _) = config.registries()?;
            let exclusions = config.exclusions(&tags)?;
            let mut text = String::new();
            for q in enumerate_combinations(tags.len())? {
                if !valid_only || is_valid_combination(q, &exclusions) {
                    text.push_str(&q.render(&tags));
                    text.push('\n');
                }
            }
            emit(out, &text)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Evaluate {
            sizes,
            tau,
            plot,
            serial,
        } => {
            if let Some(bad) = tau.iter().find(|t| t.is_nan() || **t < 0.0) {
                bail!("threshold {bad} must be non-negative");
            }
            let (tags, domains) = config.registries()?;
            let rb = config.rulebase(&tags, &domains)?;
            let (min, max) = sizes.unwrap_or((1, tags.len().saturating_sub(1).max(1)));
            let report = if serial {
                run_evaluation(&rb, min, max)?
            } else {
                run_evaluation_parallel(&rb, min, max)?
            };
            let text = match config.format {
                OutputFormat::Table => render::report_table(&report, &tau),
                OutputFormat::Structured => render::report_structured(&tags, &report, &tau),
            };
            if let Some(path) = plot {
                write_atomic(&path, &render::plot_data(&report))?;
            }
            emit(out, &text)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn emit(out: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(path) => write_atomic(path, text),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}

/// Writes through a sibling temporary file so a failure never leaves a partial file.
fn write_atomic(path: &Path, text: &str) -> anyhow::Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".partial");
    let tmp = PathBuf::from(tmp);
    let result = fs::write(&tmp, text).and_then(|()| fs::rename(&tmp, path));
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result.with_context(|| format!("writing {}", path.display()))
}
