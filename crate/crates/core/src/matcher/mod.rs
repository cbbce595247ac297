//! Stable multi-matching of a [`Configuration`].
//!
//! Two engines produce the matching:
//!
//! * [`stable_match_rounds`] follows the round procedure literally: in each
//!   round every active point finds its closest compatible active point, and
//!   all mutually closest pairs are linked at once.
//! * [`stable_match_greedy`] repeatedly links the globally closest compatible
//!   active pair, using per-color active lists and a lazy candidate heap.
//!
//! On inputs without distance ties both yield the same edge set. Ties that
//! the engines run into are resolved by the global rule "smaller
//! `(min id, max id)` first" and counted in [`Matching::tie_count`].

mod greedy;
mod io;
mod rounds;

pub use greedy::{stable_match_greedy, MatcherState, Nearest};
pub use io::{matching_json, parse_edge_list, write_edge_list, MatchingJson};
pub use rounds::stable_match_rounds;

use std::cmp::Ordering;
use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pointgen::{ColorMode, Configuration, Geometry, MarkedPoint};

/// Undirected edge with `a < b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
}

impl Edge {
    pub fn new(x: usize, y: usize) -> Self {
        Edge {
            a: x.min(y),
            b: x.max(y),
        }
    }

    pub fn other(&self, id: usize) -> usize {
        if id == self.a {
            self.b
        } else {
            self.a
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Matching {
    edges: Vec<Edge>,
    partners: Vec<Vec<usize>>,
    stubs: Vec<u32>,
    round_of_edge: Option<Vec<u32>>,
    ties: usize,
}

impl Matching {
    pub fn empty(config: &Configuration) -> Self {
        Matching {
            edges: Vec::new(),
            partners: vec![Vec::new(); config.len()],
            stubs: config.points.iter().map(|p| p.stubs).collect(),
            round_of_edge: None,
            ties: 0,
        }
    }

    /// Builds a matching from an explicit edge list, checking that it is a
    /// simple graph within the stub budgets and, in two-color mode,
    /// bipartite. The edges need not form a stable matching.
    pub fn from_edges(config: &Configuration, edges: &[(usize, usize)]) -> Result<Self> {
        let mut m = Matching::empty(config);
        for &(x, y) in edges {
            if x >= config.len() || y >= config.len() {
                return Err(Error::Configuration(format!("edge ({x},{y}) references a missing point")));
            }
            if x == y {
                return Err(Error::Configuration(format!("self-loop at {x}")));
            }
            if m.is_linked(x, y) {
                return Err(Error::Configuration(format!("duplicate edge ({x},{y})")));
            }
            if config.mode == ColorMode::TwoColor && config.color(x) == config.color(y) {
                return Err(Error::Configuration(format!("edge ({x},{y}) joins two {} points", config.color(x))));
            }
            if m.unmatched_stubs(x) == 0 || m.unmatched_stubs(y) == 0 {
                return Err(Error::Configuration(format!("edge ({x},{y}) exceeds a stub budget")));
            }
            m.link(x, y);
        }
        Ok(m)
    }

    pub(crate) fn link(&mut self, x: usize, y: usize) {
        debug_assert!(x != y && !self.is_linked(x, y));
        debug_assert!(self.unmatched_stubs(x) > 0 && self.unmatched_stubs(y) > 0);
        self.edges.push(Edge::new(x, y));
        self.partners[x].push(y);
        self.partners[y].push(x);
    }

    pub(crate) fn link_in_round(&mut self, x: usize, y: usize, round: u32) {
        self.link(x, y);
        self.round_of_edge.get_or_insert_with(Vec::new).push(round);
    }

    pub(crate) fn add_ties(&mut self, n: usize) {
        self.ties += n;
    }

    /// Edges in creation order.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn sorted_edges(&self) -> Vec<Edge> {
        let mut e = self.edges.clone();
        e.sort_unstable();
        e
    }

    pub fn edge_set(&self) -> BTreeSet<Edge> {
        self.edges.iter().copied().collect()
    }

    /// Round index of each edge (same order as [`Matching::edges`]); only
    /// the round engine records it.
    pub fn round_of_edge(&self) -> Option<&[u32]> {
        self.round_of_edge.as_deref()
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn point_count(&self) -> usize {
        self.partners.len()
    }

    pub fn partners(&self, id: usize) -> &[usize] {
        &self.partners[id]
    }

    pub fn matched_degree(&self, id: usize) -> u32 {
        self.partners[id].len() as u32
    }

    pub fn stubs(&self, id: usize) -> u32 {
        self.stubs[id]
    }

    pub fn unmatched_stubs(&self, id: usize) -> u32 {
        self.stubs[id] - self.matched_degree(id)
    }

    pub fn total_unmatched(&self) -> u64 {
        (0..self.point_count()).map(|i| self.unmatched_stubs(i) as u64).sum()
    }

    pub fn is_linked(&self, x: usize, y: usize) -> bool {
        let (short, other) = if self.partners[x].len() <= self.partners[y].len() {
            (x, y)
        } else {
            (y, x)
        };
        self.partners[short].contains(&other)
    }

    /// Number of distance ties between candidate pairs sharing a point that
    /// the engine had to break.
    pub fn tie_count(&self) -> usize {
        self.ties
    }

    pub fn tie_flagged(&self) -> bool {
        self.ties > 0
    }
}

/// Line distance, or the shorter arc on the cycle.
pub fn distance(x: f64, y: f64, geometry: &Geometry) -> f64 {
    geometry.distance(x, y)
}

/// Whether two distinct points may be linked given the edges created so far.
pub fn compatible(x: &MarkedPoint, y: &MarkedPoint, so_far: &Matching, mode: ColorMode) -> bool {
    if x.id == y.id || so_far.is_linked(x.id, y.id) {
        return false;
    }
    match mode {
        ColorMode::TwoColor => x.color != y.color,
        ColorMode::OneColor => true,
    }
}

/// Order on candidate pairs: distance, then `(min id, max id)`.
pub(crate) fn pair_order(d1: f64, x1: usize, y1: usize, d2: f64, x2: usize, y2: usize) -> Ordering {
    d1.total_cmp(&d2)
        .then_with(|| (x1.min(y1), x1.max(y1)).cmp(&(x2.min(y2), x2.max(y2))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pointgen::{build_configuration, Color, Geometry};

    pub(crate) fn config(red: &[(f64, u32)], blue: &[(f64, u32)], geometry: Geometry) -> Configuration {
        let mk = |list: &[(f64, u32)], color| {
            list.iter()
                .enumerate()
                .map(|(id, &(position, stubs))| MarkedPoint {
                    id,
                    position,
                    color,
                    stubs,
                })
                .collect()
        };
        build_configuration(mk(red, Color::Red), mk(blue, Color::Blue), geometry, ColorMode::TwoColor).unwrap()
    }

    #[test]
    fn distance_examples() {
        let line = Geometry::line(10.0).unwrap();
        let cycle = Geometry::cycle(10.0).unwrap();
        assert_eq!(distance(0.0, 3.0, &line), 3.0);
        assert_eq!(distance(1.0, 9.0, &cycle), 2.0);
        assert_eq!(distance(1.0, 6.0, &cycle), 5.0);
    }

    #[test]
    fn compatibility_rules() {
        let c = config(&[(0.0, 2), (5.0, 1)], &[(1.0, 2)], Geometry::line(10.0).unwrap());
        let (r0, b1, r2) = (&c.points[0], &c.points[1], &c.points[2]);
        let mut m = Matching::empty(&c);
        assert!(compatible(r0, b1, &m, ColorMode::TwoColor));
        assert!(!compatible(r0, r2, &m, ColorMode::TwoColor));
        assert!(compatible(r0, r2, &m, ColorMode::OneColor));
        assert!(!compatible(r0, r0, &m, ColorMode::OneColor));
        m.link(0, 1);
        assert!(!compatible(r0, b1, &m, ColorMode::TwoColor));
    }

    #[test]
    fn from_edges_validates() {
        let c = config(&[(0.0, 1), (3.0, 1)], &[(1.0, 1), (2.0, 1)], Geometry::line(10.0).unwrap());
        // ids: 0=r0, 1=b1, 2=b2, 3=r3
        assert!(Matching::from_edges(&c, &[(0, 2), (3, 1)]).is_ok());
        assert!(Matching::from_edges(&c, &[(0, 3)]).is_err());
        assert!(Matching::from_edges(&c, &[(0, 1), (0, 2)]).is_err());
        assert!(Matching::from_edges(&c, &[(1, 1)]).is_err());
        assert!(Matching::from_edges(&c, &[(0, 9)]).is_err());
        let m = Matching::from_edges(&c, &[(0, 1)]).unwrap();
        assert_eq!(m.matched_degree(0), 1);
        assert_eq!(m.unmatched_stubs(2), 1);
        assert_eq!(m.total_unmatched(), 2);
    }
}
