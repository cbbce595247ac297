//! Read-only analyses of a matching: connected components, point roles,
//! crossing edges, edge lengths and the desire relation.

mod csv;
mod union_find;

pub use csv::{components_csv, desire_csv, roles_csv};
pub use union_find::UnionFind;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::matcher::{Edge, Matching};
use crate::pointgen::{Color, Configuration, Geometry};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Component {
    /// Smallest member id.
    pub id: usize,
    pub size: usize,
    pub red: usize,
    pub blue: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentSummary {
    /// Component id (smallest member id) of every point.
    pub component_of: Vec<usize>,
    /// Components sorted by size, largest first; ties by id.
    pub components: Vec<Component>,
    /// Largest component size over the number of points of both colors.
    pub largest_fraction: f64,
}

impl ComponentSummary {
    pub fn sizes(&self) -> Vec<usize> {
        self.components.iter().map(|c| c.size).collect()
    }

    pub fn count(&self) -> usize {
        self.components.len()
    }

    pub fn largest(&self) -> usize {
        self.components.first().map_or(0, |c| c.size)
    }

    /// Size of the component containing `id`.
    pub fn size_of(&self, id: usize) -> usize {
        let root = self.component_of[id];
        self.components
            .iter()
            .find(|c| c.id == root)
            .map_or(0, |c| c.size)
    }

    /// Component size indexed by point id.
    pub fn size_by_point(&self) -> Vec<usize> {
        let mut by_root = vec![0; self.component_of.len()];
        for c in &self.components {
            by_root[c.id] = c.size;
        }
        self.component_of.iter().map(|&r| by_root[r]).collect()
    }

    /// Member ids of every component with at least `min_size` points, in
    /// position order.
    pub fn members_of_large(&self, min_size: usize) -> Vec<Vec<usize>> {
        let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
        let sizes = self.size_by_point();
        for (id, &root) in self.component_of.iter().enumerate() {
            if sizes[id] >= min_size {
                groups.entry(root).or_default().push(id);
            }
        }
        groups.into_values().collect()
    }
}

/// Connected components of the matched graph. Isolated points are
/// components of size one.
pub fn components(matching: &Matching, config: &Configuration) -> ComponentSummary {
    let n = config.len();
    let mut uf = UnionFind::new(n);
    for e in matching.edges() {
        uf.union(e.a, e.b);
    }
    let mut smallest = vec![usize::MAX; n];
    for id in 0..n {
        let r = uf.find(id);
        smallest[r] = smallest[r].min(id);
    }
    let component_of: Vec<usize> = (0..n).map(|id| smallest[uf.find(id)]).collect();

    let mut tally: Vec<Option<Component>> = vec![None; n];
    for (id, &root) in component_of.iter().enumerate() {
        let c = tally[root].get_or_insert(Component {
            id: root,
            size: 0,
            red: 0,
            blue: 0,
        });
        c.size += 1;
        match config.color(id) {
            Color::Red => c.red += 1,
            Color::Blue => c.blue += 1,
        }
    }
    let mut components: Vec<Component> = tally.into_iter().flatten().collect();
    components.sort_by(|x, y| y.size.cmp(&x.size).then(x.id.cmp(&y.id)));
    let largest_fraction = match components.first() {
        Some(c) => c.size as f64 / n as f64,
        None => 0.0,
    };
    ComponentSummary {
        component_of,
        components,
        largest_fraction,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PointRole {
    /// One partner on each side.
    Bird,
    /// Both partners to the left.
    LeftBeak,
    /// Both partners to the right.
    RightBeak,
    /// Degree other than two, or a partner exactly antipodal on the cycle.
    Other,
}

impl PointRole {
    pub const ALL: [PointRole; 4] = [PointRole::Bird, PointRole::LeftBeak, PointRole::RightBeak, PointRole::Other];

    pub fn as_str(&self) -> &'static str {
        match self {
            PointRole::Bird => "bird",
            PointRole::LeftBeak => "left-beak",
            PointRole::RightBeak => "right-beak",
            PointRole::Other => "other",
        }
    }
}

impl fmt::Display for PointRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Role of a degree-two point by the side of each partner. On the cycle the
/// side is that of the shorter arc.
pub fn classify(point: usize, matching: &Matching, config: &Configuration) -> PointRole {
    let partners = matching.partners(point);
    if partners.len() != 2 {
        return PointRole::Other;
    }
    let here = config.position(point);
    let g = &config.geometry;
    if partners.iter().any(|&p| g.is_antipodal(here, config.position(p))) {
        return PointRole::Other;
    }
    let left = partners
        .iter()
        .filter(|&&p| g.displacement(here, config.position(p)) < 0.0)
        .count();
    match left {
        0 => PointRole::RightBeak,
        1 => PointRole::Bird,
        _ => PointRole::LeftBeak,
    }
}

/// Edges as position intervals. On the cycle an edge is kept only when its
/// shorter arc does not pass through the cut at 0; the second value counts
/// the dropped edges (wrapping or exactly antipodal).
pub fn linear_edges(matching: &Matching, config: &Configuration) -> (Vec<Edge>, usize) {
    match config.geometry {
        Geometry::LineWindow { .. } => (matching.sorted_edges(), 0),
        Geometry::Cycle { circumference } => {
            let (kept, dropped): (Vec<Edge>, Vec<Edge>) = matching
                .sorted_edges()
                .into_iter()
                .partition(|e| (config.position(e.b) - config.position(e.a)) * 2.0 < circumference);
            (kept, dropped.len())
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Crossing {
    /// `(a, b)` with `a < c < b < d` against `second = (c, d)`.
    pub first: Edge,
    pub second: Edge,
    pub first_component: usize,
    pub second_component: usize,
}

/// All pairs of edges `(a,b)`, `(c,d)` with `a < c < b < d` in position
/// order, among the edges returned by [`linear_edges`].
pub fn crossings(matching: &Matching, config: &Configuration) -> Vec<Crossing> {
    let summary = components(matching, config);
    crossings_with(matching, config, &summary)
}

pub fn crossings_with(matching: &Matching, config: &Configuration, summary: &ComponentSummary) -> Vec<Crossing> {
    let (edges, _) = linear_edges(matching, config);
    let mut out = Vec::new();
    // sorted by left endpoint; every later edge starting before `b` overlaps
    for (i, first) in edges.iter().enumerate() {
        for second in &edges[i + 1..] {
            if second.a >= first.b {
                break;
            }
            if second.a > first.a && second.b > first.b {
                out.push(Crossing {
                    first: *first,
                    second: *second,
                    first_component: summary.component_of[first.a],
                    second_component: summary.component_of[second.a],
                });
            }
        }
    }
    out
}

/// Length of the longest incident edge of a point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Reach {
    /// Zero for an isolated point.
    pub longest: f64,
    /// The point still has free stubs, so it desires every location.
    pub insatiable: bool,
}

pub fn longest_incident_edge(point: usize, matching: &Matching, config: &Configuration) -> Reach {
    let longest = matching
        .partners(point)
        .iter()
        .map(|&p| config.distance(point, p))
        .fold(0.0, f64::max);
    Reach {
        longest,
        insatiable: matching.unmatched_stubs(point) > 0,
    }
}

/// Whether point `x` desires `location`: it lies strictly closer than `x`'s
/// longest edge, or `x` still has free stubs.
pub fn desires(x: usize, location: f64, matching: &Matching, config: &Configuration) -> bool {
    let reach = longest_incident_edge(x, matching, config);
    reach.insatiable || config.geometry.distance(config.position(x), location) < reach.longest
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Target {
    Point(f64),
    /// The open interval `(lo, hi)`.
    Interval(f64, f64),
}

impl Target {
    fn center(&self, g: &Geometry) -> f64 {
        match (*self, *g) {
            (Target::Point(p), _) => p,
            (Target::Interval(lo, hi), Geometry::LineWindow { .. }) => (lo + hi) / 2.0,
            (Target::Interval(lo, hi), Geometry::Cycle { circumference }) => {
                (lo + (hi - lo).rem_euclid(circumference) / 2.0).rem_euclid(circumference)
            }
        }
    }

    fn distance_from(&self, x: f64, g: &Geometry) -> f64 {
        match *self {
            Target::Point(p) => g.distance(x, p),
            Target::Interval(lo, hi) => {
                let inside = match *g {
                    Geometry::LineWindow { .. } => lo < x && x < hi,
                    Geometry::Cycle { circumference } => {
                        let span = (hi - lo).rem_euclid(circumference);
                        let offset = (x - lo).rem_euclid(circumference);
                        offset > 0.0 && offset < span
                    }
                };
                if inside {
                    0.0
                } else {
                    g.distance(x, lo).min(g.distance(x, hi))
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DesireStats {
    pub target: Target,
    pub color: Option<Color>,
    /// Points within this distance of the target's center were scanned.
    pub window: f64,
    pub count: usize,
}

/// Counts points (optionally of one color) within `window` of the target's
/// center that desire the target: for an interval, some point of it.
pub fn desire_count(
    matching: &Matching,
    config: &Configuration,
    target: Target,
    color: Option<Color>,
    window: f64,
) -> DesireStats {
    let g = &config.geometry;
    let center = target.center(g);
    let count = config
        .points
        .iter()
        .filter(|p| color.is_none_or(|c| p.color == c))
        .filter(|p| g.distance(p.position, center) <= window)
        .filter(|p| {
            let reach = longest_incident_edge(p.id, matching, config);
            reach.insatiable || target.distance_from(p.position, g) < reach.longest
        })
        .count();
    DesireStats {
        target,
        color,
        window,
        count,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pointgen::{build_configuration, ColorMode, MarkedPoint};

    /// Alternating colors starting with red at the given positions.
    fn alternating(positions: &[f64], stubs: u32) -> Configuration {
        let mut red = Vec::new();
        let mut blue = Vec::new();
        for (i, &position) in positions.iter().enumerate() {
            let color = if i % 2 == 0 { Color::Red } else { Color::Blue };
            let p = MarkedPoint {
                id: i,
                position,
                color,
                stubs,
            };
            if color == Color::Red {
                red.push(p)
            } else {
                blue.push(p)
            }
        }
        build_configuration(red, blue, Geometry::line(100.0).unwrap(), ColorMode::TwoColor).unwrap()
    }

    fn one_color(positions: &[f64], stubs: u32) -> Configuration {
        let red = positions
            .iter()
            .enumerate()
            .map(|(id, &position)| MarkedPoint {
                id,
                position,
                color: Color::Red,
                stubs,
            })
            .collect();
        build_configuration(red, vec![], Geometry::line(100.0).unwrap(), ColorMode::OneColor).unwrap()
    }

    #[test]
    fn path_components() {
        let c = alternating(&[0.0, 1.0, 2.0, 3.0], 2);
        let m = Matching::from_edges(&c, &[(0, 1), (1, 2)]).unwrap();
        let s = components(&m, &c);
        assert_eq!(s.sizes(), vec![3, 1]);
        assert_eq!(s.largest_fraction, 0.75);
        assert_eq!(s.component_of, vec![0, 0, 0, 3]);
        assert_eq!(s.components[0].red, 2);
        assert_eq!(s.components[0].blue, 1);
        assert_eq!(s.size_of(2), 3);
    }

    #[test]
    fn singletons() {
        let c = alternating(&[0.0, 1.0, 2.0, 3.0, 4.0], 1);
        let s = components(&Matching::empty(&c), &c);
        assert_eq!(s.count(), 5);
        assert_eq!(s.largest_fraction, 0.2);
    }

    #[test]
    fn roles() {
        let c = one_color(&[-3.0, -1.0, 0.0, 2.0], 3);
        let bird = Matching::from_edges(&c, &[(2, 1), (2, 3)]).unwrap();
        assert_eq!(classify(2, &bird, &c), PointRole::Bird);
        let left = Matching::from_edges(&c, &[(2, 1), (2, 0)]).unwrap();
        assert_eq!(classify(2, &left, &c), PointRole::LeftBeak);
        assert_eq!(classify(0, &left, &c), PointRole::Other);
        let three = Matching::from_edges(&c, &[(2, 1), (2, 0), (2, 3)]).unwrap();
        assert_eq!(classify(2, &three, &c), PointRole::Other);
        assert_eq!(classify(0, &three, &c), PointRole::Other);
        let right = Matching::from_edges(&c, &[(0, 1), (0, 3)]).unwrap();
        assert_eq!(classify(0, &right, &c), PointRole::RightBeak);
    }

    #[test]
    fn role_sides_on_cycle() {
        let red = [(0.5, 2)]
            .iter()
            .map(|&(position, stubs)| MarkedPoint {
                id: 0,
                position,
                color: Color::Red,
                stubs,
            })
            .collect();
        let blue = [1.5, 9.0]
            .iter()
            .enumerate()
            .map(|(id, &position)| MarkedPoint {
                id,
                position,
                color: Color::Blue,
                stubs: 1,
            })
            .collect();
        let c = build_configuration(red, blue, Geometry::cycle(10.0).unwrap(), ColorMode::TwoColor).unwrap();
        let m = Matching::from_edges(&c, &[(0, 1), (0, 2)]).unwrap();
        // blue 9.0 sits 1.5 to the left across the cut
        assert_eq!(classify(0, &m, &c), PointRole::Bird);
        let (kept, dropped) = linear_edges(&m, &c);
        assert_eq!(kept, vec![Edge::new(0, 1)]);
        assert_eq!(dropped, 1);
    }

    #[test]
    fn crossing_cases() {
        let c = one_color(&[0.0, 1.0, 2.0, 3.0], 1);
        let cross = Matching::from_edges(&c, &[(0, 2), (1, 3)]).unwrap();
        let found = crossings(&cross, &c);
        assert_eq!(found.len(), 1);
        assert_eq!(found[0].first, Edge::new(0, 2));
        assert_eq!(found[0].second, Edge::new(1, 3));
        assert_ne!(found[0].first_component, found[0].second_component);
        let disjoint = Matching::from_edges(&c, &[(0, 1), (2, 3)]).unwrap();
        assert!(crossings(&disjoint, &c).is_empty());
        let nested = Matching::from_edges(&c, &[(0, 3), (1, 2)]).unwrap();
        assert!(crossings(&nested, &c).is_empty());
    }

    #[test]
    fn reach_and_desire() {
        let c = one_color(&[0.0, 1.0, 4.0, 10.0, 20.0], 2);
        let m = Matching::from_edges(&c, &[(0, 1), (0, 2)]).unwrap();
        let r = longest_incident_edge(0, &m, &c);
        assert_eq!(r.longest, 4.0);
        assert!(!r.insatiable);
        assert!(desires(0, 2.0, &m, &c));
        assert!(!desires(0, 4.0, &m, &c));
        assert!(!desires(0, -4.0, &m, &c));
        let lone = longest_incident_edge(4, &m, &c);
        assert_eq!(lone.longest, 0.0);
        assert!(lone.insatiable);
        assert!(desires(4, -50.0, &m, &c));

        let c = one_color(&[0.0, 2.5], 1);
        let m = Matching::from_edges(&c, &[(0, 1)]).unwrap();
        let r = longest_incident_edge(1, &m, &c);
        assert_eq!(r.longest, 2.5);
        assert!(!r.insatiable);
    }

    #[test]
    fn desire_counting() {
        let c = alternating(&[-6.0, 5.0, 11.0], 1);
        // ids: 0 red -6, 1 blue 5, 2 red 11; blue 5 reaches 11 (M = 6)
        let m = Matching::from_edges(&c, &[(1, 2)]).unwrap();
        let one = desire_count(&m, &c, Target::Point(0.0), Some(Color::Blue), 10.0);
        assert_eq!(one.count, 1);
        let none = desire_count(&m, &c, Target::Point(0.0), Some(Color::Blue), 4.0);
        assert_eq!(none.count, 0);
        // red -6 is insatiable
        let red = desire_count(&m, &c, Target::Point(0.0), Some(Color::Red), 10.0);
        assert_eq!(red.count, 1);
        let interval = desire_count(&m, &c, Target::Interval(-1.0, 1.0), Some(Color::Blue), 10.0);
        assert_eq!(interval.count, 1);

        let only_red = one_color(&[0.0, 1.0], 1);
        let m = Matching::empty(&only_red);
        assert_eq!(desire_count(&m, &only_red, Target::Point(0.0), Some(Color::Blue), 50.0).count, 0);
    }

    #[test]
    fn interval_distance_on_cycle() {
        let g = Geometry::cycle(10.0).unwrap();
        let t = Target::Interval(9.0, 1.0);
        assert_eq!(t.distance_from(0.0, &g), 0.0);
        assert_eq!(t.distance_from(2.0, &g), 1.0);
        assert_eq!(t.distance_from(5.0, &g), 4.0);
    }
}
