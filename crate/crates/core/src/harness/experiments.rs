use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{run_experiment, sample_configuration, with_jobs, ExperimentSpec, GeometryRecipe};
use crate::error::{Error, Result};
use crate::graph::{desire_count, Target};
use crate::matcher::stable_match_greedy;
use crate::pointgen::{Color, ColorMode, DegreeLaw};
use crate::stats;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesireGrowthRow {
    pub window: f64,
    pub median: f64,
    pub q1: f64,
    pub q3: f64,
    /// One count per seed, in seed order.
    pub counts: Vec<usize>,
}

/// Counts blue points desiring the origin within each window halfwidth,
/// over `seeds` independent two-color line configurations.
///
/// Each configuration has unit density per color on a window twice as wide
/// as the largest requested one, with fixed equal counts so that stubs
/// balance whenever both laws are constant.
pub fn run_desire_growth(
    windows: &[f64],
    seeds: usize,
    master_seed: u64,
    red_law: DegreeLaw,
    blue_law: DegreeLaw,
    jobs: usize,
) -> Result<Vec<DesireGrowthRow>> {
    let bad = |w: f64| w.is_nan() || w <= 0.0;
    if windows.is_empty() || windows.iter().any(|&w| bad(w)) || windows.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Spec("desire windows must be positive and increasing".into()));
    }
    let halfwidth = 2.0 * windows[windows.len() - 1];
    let per_color = (2.0 * halfwidth).round() as usize;
    let spec = ExperimentSpec {
        name: "desire-growth".into(),
        geometry: GeometryRecipe::LineUniform {
            halfwidth,
            red: per_color,
            blue: per_color,
        },
        mode: ColorMode::TwoColor,
        red_law,
        blue_law: Some(blue_law),
        replicates: seeds.max(1),
        seed: master_seed,
        ..ExperimentSpec::cycle("", 1, red_law, 1, master_seed)
    };
    spec.validate()?;
    let per_seed: Vec<Result<Vec<usize>>> = with_jobs(jobs, || {
        (0..seeds)
            .into_par_iter()
            .map(|s| {
                let config = sample_configuration(&spec, s)?;
                let matching = stable_match_greedy(&config);
                Ok(windows
                    .iter()
                    .map(|&w| desire_count(&matching, &config, Target::Point(0.0), Some(Color::Blue), w).count)
                    .collect())
            })
            .collect()
    })?;
    let mut table = Vec::with_capacity(seeds);
    for (s, r) in per_seed.into_iter().enumerate() {
        table.push(r.map_err(|e| Error::Replicate {
            replicate: s,
            source: Box::new(e),
        })?);
    }
    Ok(windows
        .iter()
        .enumerate()
        .map(|(i, &window)| {
            let counts: Vec<usize> = table.iter().map(|c| c[i]).collect();
            let values: Vec<f64> = counts.iter().map(|&c| c as f64).collect();
            DesireGrowthRow {
                window,
                median: stats::median(&values),
                q1: stats::quantile(&values, 0.25),
                q3: stats::quantile(&values, 0.75),
                counts,
            }
        })
        .collect())
}

pub fn desire_growth_csv(rows: &[DesireGrowthRow]) -> String {
    let mut out = String::from("window,median,q1,q3\n");
    for r in rows {
        let _ = writeln!(out, "{},{:.4},{:.4},{:.4}", r.window, r.median, r.q1, r.q3);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContrastRow {
    pub n: usize,
    pub one_color_mean: f64,
    pub one_color_std: f64,
    pub two_color_mean: f64,
    pub two_color_std: f64,
}

impl ContrastRow {
    pub fn ratio(&self) -> f64 {
        self.one_color_mean / self.two_color_mean
    }
}

/// Degree-two largest-component fractions: `2n` points of one color against
/// `n` points of each color, both on a cycle of circumference `2n`.
pub fn run_color_contrast(sizes: &[usize], replicates: usize, seed: u64, jobs: usize) -> Result<Vec<ContrastRow>> {
    let law = DegreeLaw::Constant { k: 2 };
    let mut rows = Vec::new();
    for &n in sizes {
        let mut two = ExperimentSpec::cycle(format!("two-color @ {n}"), n, law, replicates, seed);
        two.jobs = jobs;
        let one = ExperimentSpec {
            name: format!("one-color @ {n}"),
            geometry: GeometryRecipe::Cycle {
                red: 2 * n,
                blue: 0,
                circumference: None,
            },
            mode: ColorMode::OneColor,
            blue_law: None,
            ..two.clone()
        };
        let one = run_experiment(&one)?;
        let two = run_experiment(&two)?;
        for r in [&one, &two] {
            if let Some(e) = r.first_failure() {
                return Err(e);
            }
        }
        rows.push(ContrastRow {
            n,
            one_color_mean: one.mean_largest_fraction,
            one_color_std: one.std_largest_fraction,
            two_color_mean: two.mean_largest_fraction,
            two_color_std: two.std_largest_fraction,
        });
    }
    Ok(rows)
}

pub fn contrast_csv(rows: &[ContrastRow]) -> String {
    let mut out = String::from("n,one_color_mean,one_color_std,two_color_mean,two_color_std,ratio\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{:.4},{:.4},{:.4},{:.4},{:.4}",
            r.n,
            r.one_color_mean,
            r.one_color_std,
            r.two_color_mean,
            r.two_color_std,
            r.ratio()
        );
    }
    out
}
