use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{sample_configuration, with_jobs, ExperimentSpec, GeometryRecipe};
use crate::error::{Error, Result};
use crate::matcher::{stable_match_greedy, stable_match_rounds};
use crate::pointgen::{ColorMode, Configuration, DegreeLaw};
use crate::rng::{stream, Stream};
use crate::validators::{
    check_comp_spacing, check_crossing_component, check_lemma_mia, check_lemma_samba, check_monotonicity,
    check_oracle_equivalence, check_stability, ViolationReport,
};

/// Degree laws drawn by the random verification suite.
pub const VERIFY_LAWS: [DegreeLaw; 7] = [
    DegreeLaw::Constant { k: 1 },
    DegreeLaw::Constant { k: 2 },
    DegreeLaw::Constant { k: 3 },
    DegreeLaw::Constant { k: 4 },
    DegreeLaw::Constant { k: 5 },
    DegreeLaw::TwoPoint { a: 2, b: 3, p: 0.5 },
    DegreeLaw::PoissonShift { lambda: 2.0, shift: 1 },
];

/// Shape of one random test instance: `n` points per color (all red in
/// one-color mode) at unit density per color.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InstanceRecipe {
    pub law: DegreeLaw,
    pub cycle: bool,
    pub mode: ColorMode,
    pub n: usize,
}

impl InstanceRecipe {
    /// Draws a recipe for instance `index` from the auxiliary stream.
    pub fn draw(seed: u64, index: usize, n_max: usize) -> Self {
        let mut rng = stream(seed, index as u64, Stream::Auxiliary);
        InstanceRecipe {
            law: VERIFY_LAWS[rng.random_range(0..VERIFY_LAWS.len())],
            cycle: rng.random_bool(0.5),
            mode: if rng.random_bool(0.25) {
                ColorMode::OneColor
            } else {
                ColorMode::TwoColor
            },
            n: rng.random_range(1..=n_max.max(1)),
        }
    }

    pub fn spec(&self, seed: u64) -> ExperimentSpec {
        let blue = if self.mode == ColorMode::TwoColor { self.n } else { 0 };
        let geometry = if self.cycle {
            GeometryRecipe::Cycle {
                red: self.n,
                blue,
                circumference: None,
            }
        } else {
            GeometryRecipe::LineUniform {
                halfwidth: (self.n as f64 / 2.0).max(0.5),
                red: self.n,
                blue,
            }
        };
        ExperimentSpec {
            name: "verify".into(),
            geometry,
            mode: self.mode,
            blue_law: (self.mode == ColorMode::TwoColor).then_some(self.law),
            ..ExperimentSpec::cycle("verify", self.n, self.law, 1, seed)
        }
    }

    pub fn sample(&self, seed: u64, index: usize) -> Result<Configuration> {
        sample_configuration(&self.spec(seed), index)
    }
}

/// Runs every validator that applies to `config`: stability of both
/// engines, engine equivalence, crossings, the degree-two structure checks,
/// and, in two-color mode, one add-a-red-point monotonicity trial.
pub fn verify_configuration<R: Rng + ?Sized>(
    config: &Configuration,
    law: DegreeLaw,
    threshold: usize,
    rng: &mut R,
) -> Vec<ViolationReport> {
    let greedy = stable_match_greedy(config);
    let rounds = stable_match_rounds(config);
    let mut reports = Vec::new();
    let mut stability = check_stability(config, &greedy);
    stability.check.push_str("[greedy]");
    reports.push(stability);
    let mut stability = check_stability(config, &rounds);
    stability.check.push_str("[rounds]");
    reports.push(stability);
    reports.push(check_oracle_equivalence(config));
    reports.push(check_crossing_component(config, &greedy));
    reports.push(check_lemma_samba(config, &greedy));
    reports.push(check_lemma_mia(config, &greedy, threshold));
    reports.push(check_comp_spacing(config, &greedy, threshold));
    if config.mode == ColorMode::TwoColor {
        let (lo, hi) = match config.geometry {
            crate::pointgen::Geometry::LineWindow { halfwidth } => (-halfwidth, halfwidth),
            crate::pointgen::Geometry::Cycle { circumference } => (0.0, circumference),
        };
        let position = rng.random_range(lo..hi);
        let stubs = law.sample(rng);
        match check_monotonicity(config, position, stubs) {
            Ok(r) => reports.push(r),
            Err(Error::Collision(_)) => {}
            Err(e) => log::warn!("monotonicity trial not run: {e}"),
        }
    }
    reports
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceReport {
    pub index: usize,
    pub recipe: InstanceRecipe,
    pub points: usize,
    pub reports: Vec<ViolationReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyOutcome {
    pub instances: Vec<InstanceReport>,
    /// Failing exact checks over all instances.
    pub hard_failures: usize,
}

impl VerifyOutcome {
    pub fn passed(&self) -> bool {
        self.hard_failures == 0
    }

    pub fn summary(&self) -> String {
        use std::collections::BTreeMap;
        use std::fmt::Write as _;
        let mut by_check: BTreeMap<&str, (usize, usize, usize)> = BTreeMap::new();
        for r in self.instances.iter().flat_map(|i| &i.reports) {
            let e = by_check.entry(&r.check).or_default();
            e.0 += 1;
            if !r.pass {
                e.1 += 1;
            }
            if r.vacuous {
                e.2 += 1;
            }
        }
        let mut out = String::from("check,runs,failing,vacuous\n");
        for (check, (runs, failing, vacuous)) in by_check {
            let _ = writeln!(out, "{check},{runs},{failing},{vacuous}");
        }
        out
    }
}

/// Runs [`verify_configuration`] on `instances` random instances with at
/// most `n_max` points per color.
pub fn run_verify(n_max: usize, instances: usize, seed: u64, threshold: usize, jobs: usize) -> Result<VerifyOutcome> {
    let results: Vec<Result<InstanceReport>> = with_jobs(jobs, || {
        (0..instances)
            .into_par_iter()
            .map(|i| {
                let recipe = InstanceRecipe::draw(seed, i, n_max);
                let config = recipe.sample(seed, i)?;
                let mut rng = stream(seed ^ 0x5eed, i as u64, Stream::Auxiliary);
                Ok(InstanceReport {
                    index: i,
                    recipe,
                    points: config.len(),
                    reports: verify_configuration(&config, recipe.law, threshold, &mut rng),
                })
            })
            .collect()
    })?;
    let instances = results.into_iter().collect::<Result<Vec<_>>>()?;
    let hard_failures = instances
        .iter()
        .flat_map(|i| &i.reports)
        .filter(|r| r.is_hard_failure())
        .count();
    Ok(VerifyOutcome {
        instances,
        hard_failures,
    })
}
