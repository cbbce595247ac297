//! Seeded, replicated experiments on top of the sampler, the matching
//! engines and the analyses, plus the command-line front end.

pub mod cli;
mod experiments;
mod spec_file;
mod table1;
mod verify;

pub use cli::cli;
pub use experiments::{
    contrast_csv, desire_growth_csv, run_color_contrast, run_desire_growth, ContrastRow, DesireGrowthRow,
};
pub use spec_file::{parse_spec_file, read_spec_file};
pub use table1::{
    acceptance_band, run_table1, table1_aggregate_csv, table1_reps_csv, Table1Cell, Table1Row, TABLE1_ROWS,
    TABLE1_SIZES,
};
pub use verify::{run_verify, verify_configuration, InstanceRecipe, InstanceReport, VerifyOutcome, VERIFY_LAWS};

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{classify, components, PointRole};
use crate::matcher::{stable_match_greedy, stable_match_rounds, Matching};
use crate::pointgen::{
    assign_marks, build_configuration, sample_poisson_line, sample_uniform_cycle, Color, ColorMode, Configuration,
    DegreeLaw, Geometry, MarkedPoint, Sampling,
};
use crate::rng::{stream, Stream};
use crate::stats;
use crate::validators::{check_crossing_component, check_lemma_samba};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    #[default]
    Greedy,
    Rounds,
}

impl Engine {
    pub fn run(&self, config: &Configuration) -> Matching {
        match self {
            Engine::Greedy => stable_match_greedy(config),
            Engine::Rounds => stable_match_rounds(config),
        }
    }
}

impl FromStr for Engine {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "greedy" => Ok(Engine::Greedy),
            "rounds" => Ok(Engine::Rounds),
            other => Err(Error::Spec(format!("unknown engine `{other}`"))),
        }
    }
}

/// How each replicate's points are laid out.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GeometryRecipe {
    /// Fixed counts, uniform on a cycle. Circumference defaults to the total
    /// number of points (unit total intensity).
    Cycle {
        red: usize,
        blue: usize,
        circumference: Option<f64>,
    },
    /// Independent Poisson processes on `[-halfwidth, halfwidth]`.
    Line {
        halfwidth: f64,
        red_intensity: f64,
        blue_intensity: f64,
    },
    /// Fixed counts, uniform on `[-halfwidth, halfwidth]`.
    LineUniform { halfwidth: f64, red: usize, blue: usize },
}

impl GeometryRecipe {
    pub fn geometry(&self) -> Result<Geometry> {
        match *self {
            GeometryRecipe::Cycle {
                red,
                blue,
                circumference,
            } => Geometry::cycle(circumference.unwrap_or((red + blue) as f64)),
            GeometryRecipe::Line { halfwidth, .. } | GeometryRecipe::LineUniform { halfwidth, .. } => {
                Geometry::line(halfwidth)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Analysis {
    Components,
    Roles,
    /// Exact structural checks that scale to large runs (crossings and, for
    /// degree two, nested points).
    Checks,
}

impl FromStr for Analysis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "components" => Ok(Analysis::Components),
            "roles" => Ok(Analysis::Roles),
            "checks" => Ok(Analysis::Checks),
            other => Err(Error::Spec(format!("unknown analysis `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub name: String,
    pub geometry: GeometryRecipe,
    pub mode: ColorMode,
    pub red_law: DegreeLaw,
    /// Required in two-color mode.
    pub blue_law: Option<DegreeLaw>,
    pub replicates: usize,
    pub seed: u64,
    pub engine: Engine,
    pub analyses: Vec<Analysis>,
    /// Replicates run at once; 0 means one per available core.
    pub jobs: usize,
    pub threshold: usize,
    pub out: Option<PathBuf>,
}

impl ExperimentSpec {
    /// Two-color cycle run with `n` points per color and the same law for
    /// both colors.
    pub fn cycle(name: impl Into<String>, n: usize, law: DegreeLaw, replicates: usize, seed: u64) -> Self {
        ExperimentSpec {
            name: name.into(),
            geometry: GeometryRecipe::Cycle {
                red: n,
                blue: n,
                circumference: None,
            },
            mode: ColorMode::TwoColor,
            red_law: law,
            blue_law: Some(law),
            replicates,
            seed,
            engine: Engine::Greedy,
            analyses: vec![Analysis::Components],
            jobs: 1,
            threshold: crate::validators::DEFAULT_THRESHOLD,
            out: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.replicates == 0 {
            return Err(Error::Spec("replicates must be at least 1".into()));
        }
        self.red_law.validate()?;
        self.geometry.geometry()?;
        match (self.mode, self.blue_law) {
            (ColorMode::TwoColor, None) => return Err(Error::Spec("two-color runs need a blue degree law".into())),
            (ColorMode::TwoColor, Some(law)) => law.validate()?,
            (ColorMode::OneColor, _) => {}
        }
        match (self.mode, self.geometry) {
            (ColorMode::OneColor, GeometryRecipe::Cycle { blue, .. } | GeometryRecipe::LineUniform { blue, .. })
                if blue > 0 =>
            {
                return Err(Error::Spec("one-color runs cannot have blue points".into()))
            }
            (_, GeometryRecipe::Line {
                red_intensity,
                blue_intensity,
                ..
            }) if !(red_intensity > 0.0 && (blue_intensity > 0.0 || self.mode == ColorMode::OneColor)) => {
                return Err(Error::Spec("line intensities must be positive".into()))
            }
            (ColorMode::TwoColor, GeometryRecipe::Cycle { red, blue, .. }) if red == 0 || blue == 0 => {
                return Err(Error::Spec("cycle runs need at least one point of each color".into()))
            }
            _ => {}
        }
        if let (ColorMode::TwoColor, Some(blue_law)) = (self.mode, self.blue_law) {
            let (red_rate, blue_rate) = self.intensities();
            let red_mass = red_rate * self.red_law.mean();
            let blue_mass = blue_rate * blue_law.mean();
            if (red_mass - blue_mass).abs() > 1e-9 * red_mass.max(blue_mass) {
                log::warn!(
                    "{}: expected stub intensities differ (red {red_mass}, blue {blue_mass}); matchings will be partial",
                    self.name
                );
            }
        }
        Ok(())
    }

    fn intensities(&self) -> (f64, f64) {
        match self.geometry {
            GeometryRecipe::Line {
                red_intensity,
                blue_intensity,
                ..
            } => (red_intensity, blue_intensity),
            GeometryRecipe::Cycle { red, blue, .. } | GeometryRecipe::LineUniform { red, blue, .. } => {
                (red as f64, blue as f64)
            }
        }
    }
}

fn uniform_line<R: rand::Rng>(n: usize, halfwidth: f64, color: Color, rng: &mut R) -> Vec<MarkedPoint> {
    let mut positions: Vec<f64> = (0..n).map(|_| rng.random_range(-halfwidth..=halfwidth)).collect();
    positions.sort_by(f64::total_cmp);
    positions
        .into_iter()
        .enumerate()
        .map(|(id, position)| MarkedPoint {
            id,
            position,
            color,
            stubs: 0,
        })
        .collect()
}

/// Samples replicate `replicate` of `spec`. Positions and marks of each
/// color come from their own named stream of `(spec.seed, replicate)`.
pub fn sample_configuration(spec: &ExperimentSpec, replicate: usize) -> Result<Configuration> {
    let geometry = spec.geometry.geometry()?;
    let rep = replicate as u64;
    let two = spec.mode == ColorMode::TwoColor;
    let (mut red, mut blue) = match spec.geometry {
        GeometryRecipe::Cycle { red, blue, .. } => {
            let r = if red > 0 {
                sample_uniform_cycle(red, geometry, Color::Red, &mut stream(spec.seed, rep, Stream::PositionsRed))?
            } else {
                Vec::new()
            };
            let b = if two && blue > 0 {
                sample_uniform_cycle(blue, geometry, Color::Blue, &mut stream(spec.seed, rep, Stream::PositionsBlue))?
            } else {
                Vec::new()
            };
            (r, b)
        }
        GeometryRecipe::Line {
            red_intensity,
            blue_intensity,
            ..
        } => {
            let r = sample_poisson_line(red_intensity, geometry, Color::Red, &mut stream(spec.seed, rep, Stream::PositionsRed))?;
            let b = if two {
                sample_poisson_line(blue_intensity, geometry, Color::Blue, &mut stream(spec.seed, rep, Stream::PositionsBlue))?
            } else {
                Vec::new()
            };
            (r, b)
        }
        GeometryRecipe::LineUniform { halfwidth, red, blue } => {
            let r = uniform_line(red, halfwidth, Color::Red, &mut stream(spec.seed, rep, Stream::PositionsRed));
            let b = if two {
                uniform_line(blue, halfwidth, Color::Blue, &mut stream(spec.seed, rep, Stream::PositionsBlue))
            } else {
                Vec::new()
            };
            (r, b)
        }
    };
    assign_marks(&mut red, &spec.red_law, &mut stream(spec.seed, rep, Stream::MarksRed));
    if let Some(law) = spec.blue_law.filter(|_| two) {
        assign_marks(&mut blue, &law, &mut stream(spec.seed, rep, Stream::MarksBlue));
    }
    let (nr, nb) = (red.len(), blue.len());
    let mut config = build_configuration(red, blue, geometry, spec.mode)?;
    config.sampling = Some(match spec.geometry {
        GeometryRecipe::Line {
            red_intensity,
            blue_intensity,
            ..
        } => Sampling::Intensities {
            red: red_intensity,
            blue: blue_intensity,
        },
        _ => Sampling::Counts { red: nr, blue: nb },
    });
    Ok(config)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicateRow {
    pub replicate: usize,
    pub points: usize,
    pub largest_fraction: f64,
    pub components: usize,
    pub unmatched_stubs: u64,
    pub ties: usize,
    pub runtime_secs: f64,
    /// Counts of bird, left-beak, right-beak, other.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub roles: Option<[usize; 4]>,
    /// Failing exact checks, when checks were requested.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hard_failures: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicateFailure {
    pub replicate: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub name: String,
    /// Successful replicates in replicate order.
    pub rows: Vec<ReplicateRow>,
    pub failures: Vec<ReplicateFailure>,
    pub mean_largest_fraction: f64,
    /// Sample standard deviation (`n - 1` denominator).
    pub std_largest_fraction: f64,
}

impl ExperimentResult {
    fn from_rows(name: &str, rows: Vec<ReplicateRow>, failures: Vec<ReplicateFailure>) -> Self {
        let fractions: Vec<f64> = rows.iter().map(|r| r.largest_fraction).collect();
        ExperimentResult {
            name: name.to_string(),
            mean_largest_fraction: stats::mean(&fractions),
            std_largest_fraction: stats::sample_std(&fractions),
            rows,
            failures,
        }
    }

    pub fn first_failure(&self) -> Option<Error> {
        self.failures.first().map(|f| Error::Replicate {
            replicate: f.replicate,
            source: Box::new(Error::Spec(f.message.clone())),
        })
    }
}

fn run_replicate(spec: &ExperimentSpec, replicate: usize) -> Result<ReplicateRow> {
    let started = Instant::now();
    let config = sample_configuration(spec, replicate)?;
    let matching = spec.engine.run(&config);
    let summary = components(&matching, &config);
    let roles = spec.analyses.contains(&Analysis::Roles).then(|| {
        let mut counts = [0usize; 4];
        for id in 0..config.len() {
            let role = classify(id, &matching, &config);
            counts[PointRole::ALL.iter().position(|r| *r == role).unwrap_or(3)] += 1;
        }
        counts
    });
    let hard_failures = spec.analyses.contains(&Analysis::Checks).then(|| {
        [check_crossing_component(&config, &matching), check_lemma_samba(&config, &matching)]
            .iter()
            .filter(|r| r.is_hard_failure())
            .count()
    });
    Ok(ReplicateRow {
        replicate,
        points: config.len(),
        largest_fraction: summary.largest_fraction,
        components: summary.count(),
        unmatched_stubs: matching.total_unmatched(),
        ties: matching.tie_count(),
        runtime_secs: started.elapsed().as_secs_f64(),
        roles,
        hard_failures,
    })
}

pub(crate) fn with_jobs<T: Send>(jobs: usize, work: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Spec(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(work))
}

/// Runs every replicate of `spec`, `spec.jobs` at a time. Results are
/// ordered by replicate index regardless of scheduling; a failing replicate
/// is reported in `failures` and the others are kept.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentResult> {
    spec.validate()?;
    let outcomes: Vec<Result<ReplicateRow>> = with_jobs(spec.jobs, || {
        (0..spec.replicates)
            .into_par_iter()
            .map(|i| run_replicate(spec, i))
            .collect()
    })?;
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for (i, outcome) in outcomes.into_iter().enumerate() {
        match outcome {
            Ok(row) => rows.push(row),
            Err(e) => failures.push(ReplicateFailure {
                replicate: i,
                message: e.to_string(),
            }),
        }
    }
    Ok(ExperimentResult::from_rows(&spec.name, rows, failures))
}

/// `replicate,points,largest_fraction,components,unmatched_stubs` rows with
/// full-precision fractions, so the aggregate can be recomputed.
pub fn experiment_csv(result: &ExperimentResult) -> String {
    use std::fmt::Write as _;
    let mut out = String::from("name,replicate,points,largest_fraction,components,unmatched_stubs\n");
    for r in &result.rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            result.name, r.replicate, r.points, r.largest_fraction, r.components, r.unmatched_stubs
        );
    }
    let _ = writeln!(
        out,
        "# mean={:.4} std={:.4}",
        result.mean_largest_fraction, result.std_largest_fraction
    );
    out
}

impl fmt::Display for ExperimentResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {:.4} ± {:.4} over {} replicates",
            self.name,
            self.mean_largest_fraction,
            self.std_largest_fraction,
            self.rows.len()
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_pair_is_one_component() {
        let spec = ExperimentSpec::cycle("pair", 1, DegreeLaw::Constant { k: 1 }, 1, 5);
        let result = run_experiment(&spec).unwrap();
        assert_eq!(result.rows.len(), 1);
        assert_eq!(result.rows[0].largest_fraction, 1.0);
        assert_eq!(result.rows[0].unmatched_stubs, 0);
        assert_eq!(result.std_largest_fraction, 0.0);
    }

    #[test]
    fn replicates_are_independent_of_count_and_jobs() {
        let law = DegreeLaw::TwoPoint { a: 2, b: 3, p: 0.5 };
        let mut spec = ExperimentSpec::cycle("mix", 300, law, 6, 17);
        spec.jobs = 1;
        let serial = run_experiment(&spec).unwrap();
        spec.jobs = 4;
        let parallel = run_experiment(&spec).unwrap();
        spec.replicates = 3;
        let fewer = run_experiment(&spec).unwrap();
        for (a, b) in serial.rows.iter().zip(&parallel.rows) {
            assert_eq!(a.largest_fraction, b.largest_fraction);
            assert_eq!(a.components, b.components);
        }
        for (a, b) in serial.rows.iter().zip(&fewer.rows) {
            assert_eq!(a.largest_fraction, b.largest_fraction);
        }
        assert_eq!(serial.mean_largest_fraction, parallel.mean_largest_fraction);
    }

    #[test]
    fn aggregate_recomputes_from_rows() {
        let spec = ExperimentSpec::cycle("agg", 200, DegreeLaw::Constant { k: 3 }, 5, 3);
        let result = run_experiment(&spec).unwrap();
        let fr: Vec<f64> = result.rows.iter().map(|r| r.largest_fraction).collect();
        assert_eq!(stats::mean(&fr), result.mean_largest_fraction);
        assert_eq!(stats::sample_std(&fr), result.std_largest_fraction);
    }

    #[test]
    fn spec_validation() {
        let mut spec = ExperimentSpec::cycle("bad", 10, DegreeLaw::Constant { k: 2 }, 0, 1);
        assert!(run_experiment(&spec).is_err());
        spec.replicates = 1;
        spec.blue_law = None;
        assert!(spec.validate().is_err());
        spec.mode = ColorMode::OneColor;
        assert!(spec.validate().is_err());
        spec.geometry = GeometryRecipe::Cycle {
            red: 10,
            blue: 0,
            circumference: None,
        };
        assert!(spec.validate().is_ok());
    }

    #[test]
    fn line_sampling_records_intensities() {
        let spec = ExperimentSpec {
            geometry: GeometryRecipe::Line {
                halfwidth: 50.0,
                red_intensity: 1.0,
                blue_intensity: 1.0,
            },
            ..ExperimentSpec::cycle("line", 1, DegreeLaw::Constant { k: 1 }, 1, 9)
        };
        let c = sample_configuration(&spec, 0).unwrap();
        assert_eq!(
            c.sampling,
            Some(Sampling::Intensities {
                red: 1.0,
                blue: 1.0
            })
        );
        assert!(!c.geometry.is_cycle());
        assert_eq!(c, sample_configuration(&spec, 0).unwrap());
        assert_ne!(c, sample_configuration(&spec, 1).unwrap());
    }

    #[test]
    fn roles_and_checks_analyses() {
        let mut spec = ExperimentSpec::cycle("deg2", 400, DegreeLaw::Constant { k: 2 }, 2, 4);
        spec.analyses = vec![Analysis::Components, Analysis::Roles, Analysis::Checks];
        let result = run_experiment(&spec).unwrap();
        for row in &result.rows {
            let roles = row.roles.unwrap();
            assert_eq!(roles.iter().sum::<usize>(), row.points);
            assert_eq!(row.hard_failures, Some(0));
        }
    }
}
