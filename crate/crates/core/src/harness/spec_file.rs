//! Flat `key = value` experiment files. Keys mirror the CLI flags with
//! dashes written as underscores; `#` starts a comment.
//!
//! ```text
//! name = deg3
//! geometry = cycle        # cycle | line | line-uniform
//! n = 5000                # per color; or n_red / n_blue
//! law = const:3           # or red_law / blue_law
//! replicates = 10
//! seed = 42
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use super::{Analysis, Engine, ExperimentSpec, GeometryRecipe};
use crate::error::{Error, Result};
use crate::pointgen::{parse_f64, ColorMode, DegreeLaw};
use crate::validators::DEFAULT_THRESHOLD;

const KEYS: &[&str] = &[
    "name",
    "geometry",
    "n",
    "n_red",
    "n_blue",
    "circumference",
    "halfwidth",
    "intensity",
    "intensity_red",
    "intensity_blue",
    "mode",
    "law",
    "red_law",
    "blue_law",
    "replicates",
    "seed",
    "engine",
    "analyses",
    "jobs",
    "threshold",
    "out",
];

pub fn read_spec_file(path: impl AsRef<Path>) -> Result<ExperimentSpec> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_spec_file(&text)
}

pub fn parse_spec_file(text: &str) -> Result<ExperimentSpec> {
    let mut map: BTreeMap<String, (usize, String)> = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::parse(idx + 1, format!("expected `key = value`, got `{line}`")))?;
        let key = key.trim().replace('-', "_");
        if !KEYS.contains(&key.as_str()) {
            return Err(Error::parse(idx + 1, format!("unknown key `{key}`")));
        }
        if map.insert(key.clone(), (idx + 1, value.trim().to_string())).is_some() {
            return Err(Error::parse(idx + 1, format!("duplicate key `{key}`")));
        }
    }
    let get = |k: &str| map.get(k).map(|(line, v)| (*line, v.as_str()));
    fn parsed<T: std::str::FromStr>(entry: Option<(usize, &str)>, what: &str) -> Result<Option<T>> {
        match entry {
            None => Ok(None),
            Some((line, v)) => v
                .parse()
                .map(Some)
                .map_err(|_| Error::parse(line, format!("bad {what} `{v}`"))),
        }
    }
    let float = |k: &str| -> Result<Option<f64>> {
        match get(k) {
            None => Ok(None),
            Some((line, v)) => parse_f64(v)
                .map(Some)
                .ok_or_else(|| Error::parse(line, format!("bad number `{v}` for {k}"))),
        }
    };

    let mode: ColorMode = parsed(get("mode"), "mode")?.unwrap_or(ColorMode::TwoColor);
    let law: Option<DegreeLaw> = parsed(get("law"), "degree law")?;
    let red_law = parsed(get("red_law"), "degree law")?
        .or(law)
        .ok_or_else(|| Error::Spec("missing `law` or `red_law`".into()))?;
    let blue_law = match mode {
        ColorMode::TwoColor => Some(parsed(get("blue_law"), "degree law")?.or(law).unwrap_or(red_law)),
        ColorMode::OneColor => None,
    };
    let n: Option<usize> = parsed(get("n"), "count")?;
    let n_red = parsed(get("n_red"), "count")?.or(n);
    let n_blue = match mode {
        ColorMode::TwoColor => parsed(get("n_blue"), "count")?.or(n),
        ColorMode::OneColor => Some(0),
    };
    let intensity = float("intensity")?.unwrap_or(1.0);
    let kind = get("geometry").map_or("cycle", |(_, v)| v);
    let geometry = match kind {
        "cycle" => GeometryRecipe::Cycle {
            red: n_red.ok_or_else(|| Error::Spec("cycle runs need `n` or `n_red`".into()))?,
            blue: n_blue.ok_or_else(|| Error::Spec("cycle runs need `n` or `n_blue`".into()))?,
            circumference: float("circumference")?,
        },
        "line" => GeometryRecipe::Line {
            halfwidth: float("halfwidth")?.ok_or_else(|| Error::Spec("line runs need `halfwidth`".into()))?,
            red_intensity: float("intensity_red")?.unwrap_or(intensity),
            blue_intensity: float("intensity_blue")?.unwrap_or(intensity),
        },
        "line-uniform" | "line_uniform" => GeometryRecipe::LineUniform {
            halfwidth: float("halfwidth")?.ok_or_else(|| Error::Spec("line runs need `halfwidth`".into()))?,
            red: n_red.ok_or_else(|| Error::Spec("line-uniform runs need `n` or `n_red`".into()))?,
            blue: n_blue.ok_or_else(|| Error::Spec("line-uniform runs need `n` or `n_blue`".into()))?,
        },
        other => return Err(Error::Spec(format!("unknown geometry `{other}`"))),
    };
    let analyses = match get("analyses") {
        None => vec![Analysis::Components],
        Some((_, v)) => v
            .split(',')
            .map(|a| a.trim().parse())
            .collect::<Result<Vec<Analysis>>>()?,
    };
    let spec = ExperimentSpec {
        name: get("name").map_or("experiment", |(_, v)| v).to_string(),
        geometry,
        mode,
        red_law,
        blue_law,
        replicates: parsed(get("replicates"), "replicate count")?.unwrap_or(1),
        seed: parsed(get("seed"), "seed")?.unwrap_or(0),
        engine: parsed::<Engine>(get("engine"), "engine")?.unwrap_or_default(),
        analyses,
        jobs: parsed(get("jobs"), "job count")?.unwrap_or(1),
        threshold: parsed(get("threshold"), "threshold")?.unwrap_or(DEFAULT_THRESHOLD),
        out: get("out").map(|(_, v)| PathBuf::from(v)),
    };
    spec.validate()?;
    Ok(spec)
}
