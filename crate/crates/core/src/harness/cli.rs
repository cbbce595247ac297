//! The `multimatch` command line.

use std::ffi::OsString;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use super::{
    contrast_csv, desire_growth_csv, experiment_csv, read_spec_file, run_color_contrast, run_desire_growth,
    run_experiment, run_table1, run_verify, sample_configuration, table1_aggregate_csv, table1_reps_csv,
    verify::verify_configuration, Engine, ExperimentSpec, GeometryRecipe,
};
use crate::error::{Error, Result};
use crate::graph::{components, components_csv, desire_count, desire_csv, roles_csv, PointRole, Target};
use crate::matcher::{matching_json, parse_edge_list, write_edge_list, Matching};
use crate::pointgen::{read_configuration, write_configuration, Color, ColorMode, Configuration, DegreeLaw};
use crate::rng::{stream, Stream};
use crate::validators::DEFAULT_THRESHOLD;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "multimatch", version, about = "Stable multi-matchings of colored random points")]
pub struct Cli {
    /// Master seed for all random streams.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Replicates run at once (0 = one per core).
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    /// Component size from which surrogate checks count as failures.
    #[arg(long, global = true, default_value_t = DEFAULT_THRESHOLD)]
    threshold: usize,
    /// More log output; repeat for more.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sample one configuration.
    Sample(SampleArgs),
    /// Compute the stable matching of a configuration file.
    Match(MatchArgs),
    /// Components, roles or desire counts of a matched configuration.
    Analyze(AnalyzeArgs),
    /// Run the validators on random instances or on given files.
    Verify(VerifyArgs),
    /// Largest-component fractions for the eight reference degree laws.
    Table1(Table1Args),
    /// Blue points desiring the origin as the window grows.
    DesireGrowth(DesireArgs),
    /// Degree-two largest components, one color against two.
    Contrast(ContrastArgs),
    /// Run an experiment described by a key=value file.
    Run(RunArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GeometryKind {
    Cycle,
    Line,
    LineUniform,
}

#[derive(Debug, Args)]
struct SampleArgs {
    #[arg(long, value_enum, default_value_t = GeometryKind::Cycle)]
    geometry: GeometryKind,
    /// Points per color for fixed-count geometries.
    #[arg(long, default_value_t = 100)]
    n: usize,
    /// Line window halfwidth; defaults to half the expected count.
    #[arg(long)]
    halfwidth: Option<f64>,
    /// Cycle circumference; defaults to the number of points.
    #[arg(long)]
    circumference: Option<f64>,
    /// Per-color intensity for Poisson line sampling.
    #[arg(long, default_value_t = 1.0)]
    intensity: f64,
    #[arg(long, default_value = "two")]
    mode: ColorMode,
    /// Degree law for both colors: `K`, `const:K`, `two:A:B:P` or `poisson:L:S`.
    #[arg(long, default_value = "const:2")]
    law: DegreeLaw,
    #[arg(long)]
    red_law: Option<DegreeLaw>,
    #[arg(long)]
    blue_law: Option<DegreeLaw>,
    #[arg(long, default_value_t = 0)]
    replicate: usize,
}

#[derive(Debug, Args)]
struct MatchArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = Engine::Greedy)]
    engine: Engine,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Report {
    Components,
    Roles,
    Desire,
}

#[derive(Debug, Args)]
struct AnalyzeArgs {
    #[arg(long)]
    input: PathBuf,
    /// Edge list to analyze; the greedy matching is computed when absent.
    #[arg(long)]
    matching: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Report::Components)]
    report: Report,
    /// Desire target position.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    target: f64,
    /// Comma-separated window halfwidths for the desire report.
    #[arg(long, value_delimiter = ',', default_value = "10,100")]
    windows: Vec<f64>,
    /// Only count points of this color in the desire report.
    #[arg(long)]
    color: Option<Color>,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Largest number of points per color in random instances.
    #[arg(long, default_value_t = 200)]
    n: usize,
    #[arg(long, default_value_t = 50)]
    instances: usize,
    /// Verify this configuration instead of random ones.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Degree law used for the monotonicity trial on `--input`.
    #[arg(long, default_value = "const:2")]
    law: DegreeLaw,
}

#[derive(Debug, Args)]
struct Table1Args {
    #[arg(long, value_delimiter = ',', default_value = "5000")]
    sizes: Vec<usize>,
    #[arg(long, default_value_t = 10)]
    replicates: usize,
    /// Also write per-replicate rows here.
    #[arg(long)]
    reps_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct DesireArgs {
    #[arg(long, value_delimiter = ',', default_value = "100,1000,10000")]
    windows: Vec<f64>,
    #[arg(long, default_value_t = 30)]
    seeds: usize,
    #[arg(long, default_value = "const:2")]
    law: DegreeLaw,
    #[arg(long)]
    red_law: Option<DegreeLaw>,
    #[arg(long)]
    blue_law: Option<DegreeLaw>,
}

#[derive(Debug, Args)]
struct ContrastArgs {
    #[arg(long, value_delimiter = ',', default_value = "5000")]
    sizes: Vec<usize>,
    #[arg(long, default_value_t = 10)]
    replicates: usize,
}

#[derive(Debug, Args)]
struct RunArgs {
    #[arg(long)]
    spec: PathBuf,
}

/// Parses `args` (including the program name), runs the command and
/// returns the process exit code: 0 on success, 1 on a failing exact check
/// or a runtime error, 2 on a usage error.
pub fn cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    let _ = env_logger::Builder::new().filter_level(level).parse_default_env().try_init();
    match execute(&cli) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| Error::io(path, e)),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Error::io("<stdout>", e)),
    }
}

fn json<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

fn load_matching(config: &Configuration, path: Option<&Path>) -> Result<Matching> {
    match path {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| Error::io(p, e))?;
            parse_edge_list(config, &text)
        }
        None => Ok(Engine::Greedy.run(config)),
    }
}

/// Returns whether every exact check passed.
fn execute(cli: &Cli) -> Result<bool> {
    let out = cli.out.as_deref();
    match &cli.command {
        Command::Sample(a) => {
            let geometry = match a.geometry {
                GeometryKind::Cycle => GeometryRecipe::Cycle {
                    red: a.n,
                    blue: a.n,
                    circumference: a.circumference,
                },
                GeometryKind::Line => GeometryRecipe::Line {
                    halfwidth: a.halfwidth.unwrap_or(a.n as f64 / (2.0 * a.intensity)),
                    red_intensity: a.intensity,
                    blue_intensity: a.intensity,
                },
                GeometryKind::LineUniform => GeometryRecipe::LineUniform {
                    halfwidth: a.halfwidth.unwrap_or(a.n as f64 / 2.0),
                    red: a.n,
                    blue: a.n,
                },
            };
            let geometry = match (a.mode, geometry) {
                (ColorMode::OneColor, GeometryRecipe::Cycle { red, circumference, .. }) => GeometryRecipe::Cycle {
                    red,
                    blue: 0,
                    circumference,
                },
                (ColorMode::OneColor, GeometryRecipe::LineUniform { halfwidth, red, .. }) => {
                    GeometryRecipe::LineUniform { halfwidth, red, blue: 0 }
                }
                (_, g) => g,
            };
            let spec = ExperimentSpec {
                name: "sample".into(),
                geometry,
                mode: a.mode,
                red_law: a.red_law.unwrap_or(a.law),
                blue_law: (a.mode == ColorMode::TwoColor).then(|| a.blue_law.unwrap_or(a.law)),
                ..ExperimentSpec::cycle("sample", 1, a.law, 1, cli.seed)
            };
            spec.validate()?;
            let config = sample_configuration(&spec, a.replicate)?;
            let text = match cli.format {
                Format::Csv => write_configuration(&config),
                Format::Json => json(&config)?,
            };
            emit(out, &text)?;
            Ok(true)
        }
        Command::Match(a) => {
            let config = read_configuration(&a.input)?;
            let matching = a.engine.run(&config);
            if matching.tie_flagged() {
                log::warn!("{} distance ties resolved by id order", matching.tie_count());
            }
            let text = match cli.format {
                Format::Csv => write_edge_list(&config, &matching),
                Format::Json => json(&matching_json(&matching))?,
            };
            emit(out, &text)?;
            Ok(true)
        }
        Command::Analyze(a) => {
            let config = read_configuration(&a.input)?;
            let matching = load_matching(&config, a.matching.as_deref())?;
            let text = match (a.report, cli.format) {
                (Report::Components, Format::Csv) => components_csv(&components(&matching, &config)),
                (Report::Components, Format::Json) => json(&components(&matching, &config))?,
                (Report::Roles, Format::Csv) => roles_csv(&matching, &config),
                (Report::Roles, Format::Json) => {
                    let mut counts = std::collections::BTreeMap::new();
                    for role in PointRole::ALL {
                        counts.insert(role.as_str(), 0usize);
                    }
                    for id in 0..config.len() {
                        *counts.entry(crate::graph::classify(id, &matching, &config).as_str()).or_default() += 1;
                    }
                    json(&counts)?
                }
                (Report::Desire, format) => {
                    let rows: Vec<_> = a
                        .windows
                        .iter()
                        .map(|&w| desire_count(&matching, &config, Target::Point(a.target), a.color, w))
                        .collect();
                    match format {
                        Format::Csv => desire_csv(&rows),
                        Format::Json => json(&rows)?,
                    }
                }
            };
            emit(out, &text)?;
            Ok(true)
        }
        Command::Verify(a) => {
            if let Some(input) = &a.input {
                let config = read_configuration(input)?;
                let mut rng = stream(cli.seed, 0, Stream::Auxiliary);
                let reports = verify_configuration(&config, a.law, cli.threshold, &mut rng);
                let failed = reports.iter().any(|r| r.is_hard_failure());
                let text = match cli.format {
                    Format::Json => json(&reports)?,
                    Format::Csv => {
                        let mut s = String::from("check,pass,vacuous,excluded,witnesses\n");
                        for r in &reports {
                            s.push_str(&format!(
                                "{},{},{},{},{}\n",
                                r.check,
                                r.pass,
                                r.vacuous,
                                r.excluded,
                                r.witnesses.len()
                            ));
                        }
                        s
                    }
                };
                emit(out, &text)?;
                return Ok(!failed);
            }
            let outcome = run_verify(a.n, a.instances, cli.seed, cli.threshold, cli.jobs)?;
            let text = match cli.format {
                Format::Json => json(&outcome)?,
                Format::Csv => outcome.summary(),
            };
            emit(out, &text)?;
            Ok(outcome.passed())
        }
        Command::Table1(a) => {
            let cells = run_table1(&a.sizes, a.replicates, cli.seed, cli.jobs)?;
            if let Some(path) = &a.reps_out {
                emit(Some(path), &table1_reps_csv(&cells))?;
            }
            let text = match cli.format {
                Format::Csv => table1_aggregate_csv(&cells),
                Format::Json => json(&cells)?,
            };
            emit(out, &text)?;
            Ok(true)
        }
        Command::DesireGrowth(a) => {
            let rows = run_desire_growth(
                &a.windows,
                a.seeds,
                cli.seed,
                a.red_law.unwrap_or(a.law),
                a.blue_law.unwrap_or(a.law),
                cli.jobs,
            )?;
            let text = match cli.format {
                Format::Csv => desire_growth_csv(&rows),
                Format::Json => json(&rows)?,
            };
            emit(out, &text)?;
            Ok(true)
        }
        Command::Contrast(a) => {
            let rows = run_color_contrast(&a.sizes, a.replicates, cli.seed, cli.jobs)?;
            let text = match cli.format {
                Format::Csv => contrast_csv(&rows),
                Format::Json => json(&rows)?,
            };
            emit(out, &text)?;
            Ok(true)
        }
        Command::Run(a) => {
            let spec = read_spec_file(&a.spec)?;
            let result = run_experiment(&spec)?;
            for f in &result.failures {
                log::error!("replicate {} failed: {}", f.replicate, f.message);
            }
            let text = match cli.format {
                Format::Csv => experiment_csv(&result),
                Format::Json => json(&result)?,
            };
            emit(out.or(spec.out.as_deref()), &text)?;
            let hard = result.rows.iter().any(|r| r.hard_failures.is_some_and(|n| n > 0));
            Ok(result.failures.is_empty() && !hard)
        }
    }
}
