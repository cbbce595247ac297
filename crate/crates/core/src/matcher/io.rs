//! Matching dumps: an edge-list text format (`id_a id_b round_or_dash
//! distance`) and a JSON document for downstream tools.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::Matching;
use crate::error::{Error, Result};
use crate::pointgen::{parse_f64, Configuration};

pub fn write_edge_list(config: &Configuration, matching: &Matching) -> String {
    let mut out = String::new();
    let rounds = matching.round_of_edge();
    for (i, e) in matching.edges().iter().enumerate() {
        let round = rounds.map_or_else(|| "-".to_string(), |r| r[i].to_string());
        let _ = writeln!(out, "{} {} {} {:?}", e.a, e.b, round, config.distance(e.a, e.b));
    }
    out
}

/// Reads an edge list back into a matching over `config`. The round and
/// distance columns are informational and ignored.
pub fn parse_edge_list(config: &Configuration, text: &str) -> Result<Matching> {
    let mut edges = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if !(2..=4).contains(&fields.len()) {
            return Err(Error::parse(idx + 1, format!("expected `id_a id_b [round] [distance]`, got `{line}`")));
        }
        let a: usize = fields[0].parse().map_err(|_| Error::parse(idx + 1, "bad id"))?;
        let b: usize = fields[1].parse().map_err(|_| Error::parse(idx + 1, "bad id"))?;
        if let Some(d) = fields.get(3) {
            parse_f64(d).ok_or_else(|| Error::parse(idx + 1, "bad distance"))?;
        }
        edges.push((a, b));
    }
    Matching::from_edges(config, &edges)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchingJson {
    pub edges: Vec<[usize; 2]>,
    /// Points with free stubs left, keyed by id.
    pub unmatched: BTreeMap<usize, u32>,
}

pub fn matching_json(matching: &Matching) -> MatchingJson {
    MatchingJson {
        edges: matching.edges().iter().map(|e| [e.a, e.b]).collect(),
        unmatched: (0..matching.point_count())
            .filter(|&i| matching.unmatched_stubs(i) > 0)
            .map(|i| (i, matching.unmatched_stubs(i)))
            .collect(),
    }
}
