use std::fmt::Write as _;

use super::{classify, ComponentSummary, DesireStats, PointRole};
use crate::matcher::Matching;
use crate::pointgen::Configuration;

/// `component_id,size,red,blue`, largest component first.
pub fn components_csv(summary: &ComponentSummary) -> String {
    let mut out = String::from("component_id,size,red,blue\n");
    for c in &summary.components {
        let _ = writeln!(out, "{},{},{},{}", c.id, c.size, c.red, c.blue);
    }
    out
}

/// `role,count` over every point.
pub fn roles_csv(matching: &Matching, config: &Configuration) -> String {
    let mut counts = [0usize; 4];
    for id in 0..config.len() {
        let role = classify(id, matching, config);
        counts[PointRole::ALL.iter().position(|r| *r == role).unwrap_or(3)] += 1;
    }
    let mut out = String::from("role,count\n");
    for (role, count) in PointRole::ALL.iter().zip(counts) {
        let _ = writeln!(out, "{role},{count}");
    }
    out
}

/// `window,count` rows.
pub fn desire_csv(rows: &[DesireStats]) -> String {
    let mut out = String::from("window,count\n");
    for r in rows {
        let _ = writeln!(out, "{},{}", r.window, r.count);
    }
    out
}
