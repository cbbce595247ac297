//! Executable checks on matchings.
//!
//! Exact checks hold for every finite stable matching: stability itself,
//! agreement of the two engines, crossing edges sharing a component, the
//! constraint on points nested under an edge (degree two), and
//! monotonicity under adding a red point. Surrogate checks restate
//! structural facts about an infinite component on large finite
//! components (size at least a threshold); their witnesses are labeled with
//! the component size so callers can weigh them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{components, crossings_with, linear_edges, longest_incident_edge};
use crate::matcher::{stable_match_greedy, stable_match_rounds, Edge, Matching};
use crate::pointgen::{build_configuration, Color, ColorMode, Configuration, MarkedPoint};

pub const DEFAULT_THRESHOLD: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub ids: Vec<usize>,
    pub distances: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub component_size: Option<usize>,
    pub note: String,
}

impl Witness {
    fn new(ids: Vec<usize>, distances: Vec<f64>, note: impl Into<String>) -> Self {
        Witness {
            ids,
            distances,
            component_size: None,
            note: note.into(),
        }
    }

    fn in_component(mut self, size: usize) -> Self {
        self.component_size = Some(size);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViolationReport {
    pub check: String,
    /// True exactly when `witnesses` is empty.
    pub pass: bool,
    /// Nothing was there to check.
    pub vacuous: bool,
    /// Part or all of the input was skipped (ties, collisions, edges across
    /// the cycle cut, unmet preconditions).
    pub excluded: bool,
    /// The check is a large-component surrogate rather than an exact fact.
    pub surrogate: bool,
    pub witnesses: Vec<Witness>,
    /// Violations in components below the size threshold; never failing.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub observations: Vec<Witness>,
}

impl ViolationReport {
    fn new(check: &str) -> Self {
        ViolationReport {
            check: check.to_string(),
            pass: true,
            vacuous: false,
            excluded: false,
            surrogate: false,
            witnesses: Vec::new(),
            observations: Vec::new(),
        }
    }

    fn skipped(check: &str, note: &str) -> Self {
        let mut r = ViolationReport::new(check);
        r.vacuous = true;
        r.excluded = true;
        r.observations.push(Witness::new(vec![], vec![], note));
        r
    }

    fn push(&mut self, w: Witness) {
        self.witnesses.push(w);
        self.pass = false;
    }

    /// A failing exact check.
    pub fn is_hard_failure(&self) -> bool {
        !self.pass && !self.surrogate
    }

    /// Largest component size among the witnesses, for surrogate reports.
    pub fn largest_witness_component(&self) -> Option<usize> {
        self.witnesses.iter().filter_map(|w| w.component_size).max()
    }
}

fn constant_degree_two(config: &Configuration) -> bool {
    config.mode == ColorMode::TwoColor && config.points.iter().all(|p| p.stubs == 2)
}

fn can_link(config: &Configuration, x: usize, y: usize) -> bool {
    x != y && (config.mode == ColorMode::OneColor || config.color(x) != config.color(y))
}

/// Brute force over all pairs: a compatible, unlinked pair where each point
/// desires the other (or has free stubs) violates stability.
pub fn check_stability(config: &Configuration, matching: &Matching) -> ViolationReport {
    let mut report = ViolationReport::new("stability");
    let reach: Vec<_> = (0..config.len())
        .map(|i| longest_incident_edge(i, matching, config))
        .collect();
    let wants = |x: usize, d: f64| reach[x].insatiable || d < reach[x].longest;
    let mut pairs = 0usize;
    for x in 0..config.len() {
        for y in x + 1..config.len() {
            if !can_link(config, x, y) {
                continue;
            }
            pairs += 1;
            if matching.is_linked(x, y) {
                continue;
            }
            let d = config.distance(x, y);
            if wants(x, d) && wants(y, d) {
                report.push(Witness::new(
                    vec![x, y],
                    vec![d, reach[x].longest, reach[y].longest],
                    "compatible pair desiring each other is not linked",
                ));
            }
        }
    }
    report.vacuous = pairs == 0;
    report.excluded = config.collision || matching.tie_flagged();
    report
}

/// Crossing edges must lie in one component.
pub fn check_crossing_component(config: &Configuration, matching: &Matching) -> ViolationReport {
    let mut report = ViolationReport::new("crossing-component");
    let summary = components(matching, config);
    let crossings = crossings_with(matching, config, &summary);
    report.vacuous = crossings.is_empty();
    report.excluded = linear_edges(matching, config).1 > 0;
    for c in crossings {
        if c.first_component != c.second_component {
            report.push(Witness::new(
                vec![c.first.a, c.second.a, c.first.b, c.second.b],
                vec![],
                "crossing edges in different components",
            ));
        }
    }
    report
}

/// For crossing edges `(a,b)`, `(c,d)` with `a < c < b < d` inside a
/// component of at least `threshold` points, `(c,b)` must be an edge.
/// Requires two-color mode with two stubs on every point.
pub fn check_lemma_mia(config: &Configuration, matching: &Matching, threshold: usize) -> ViolationReport {
    const CHECK: &str = "lemma-inner-crossing";
    if !constant_degree_two(config) {
        return ViolationReport::skipped(CHECK, "needs two-color mode with every point of degree two");
    }
    let mut report = ViolationReport::new(CHECK);
    report.surrogate = true;
    let summary = components(matching, config);
    let sizes = summary.size_by_point();
    report.vacuous = summary.largest() < threshold;
    report.excluded = linear_edges(matching, config).1 > 0;
    for c in crossings_with(matching, config, &summary) {
        let (a, b, cc, d) = (c.first.a, c.first.b, c.second.a, c.second.b);
        if matching.is_linked(cc, b) && config.color(cc) != config.color(b) {
            continue;
        }
        let size = sizes[a];
        let w = Witness::new(
            vec![a, cc, b, d],
            vec![config.distance(a, b), config.distance(cc, d)],
            "crossing (a,b),(c,d) without edge (c,b)",
        )
        .in_component(size);
        if size >= threshold && c.first_component == c.second_component {
            report.push(w);
        } else {
            report.observations.push(w);
        }
    }
    report
}

/// Points nested under an edge. For an edge `(a,b)` and a point `c` strictly
/// between them with the color of `b` and not linked to `a`: a partner `d`
/// of `c` beyond `b` forces the edge `(b,d)`, `c` has at most one partner
/// beyond `b`, and none beyond `a`. Checked in both orientations and for
/// both color assignments. Requires two stubs on every point.
pub fn check_lemma_samba(config: &Configuration, matching: &Matching) -> ViolationReport {
    const CHECK: &str = "lemma-nested-point";
    if !constant_degree_two(config) {
        return ViolationReport::skipped(CHECK, "needs two-color mode with every point of degree two");
    }
    let mut report = ViolationReport::new(CHECK);
    let (edges, dropped) = linear_edges(matching, config);
    report.excluded = dropped > 0;
    let mut partners = vec![Vec::new(); config.len()];
    for e in &edges {
        partners[e.a].push(e.b);
        partners[e.b].push(e.a);
    }
    let mut premises = 0usize;
    for e in &edges {
        for (a, b) in [(e.a, e.b), (e.b, e.a)] {
            let lo = a.min(b);
            let hi = a.max(b);
            let beyond_b = |p: usize| if b > a { p > b } else { p < b };
            let beyond_a = |p: usize| if b > a { p < a } else { p > a };
            for c in lo + 1..hi {
                if config.color(c) != config.color(b) || matching.is_linked(a, c) {
                    continue;
                }
                premises += 1;
                let far: Vec<usize> = partners[c].iter().copied().filter(|&p| beyond_b(p)).collect();
                for &d in &far {
                    if !matching.is_linked(b, d) {
                        report.push(Witness::new(
                            vec![a, b, c, d],
                            vec![config.distance(a, b), config.distance(c, d)],
                            "partner d of c beyond b without edge (b,d)",
                        ));
                    }
                }
                if far.len() > 1 {
                    let mut ids = vec![a, b, c];
                    ids.extend(&far);
                    report.push(Witness::new(ids, vec![], "c has more than one partner beyond b"));
                }
                for &f in partners[c].iter().filter(|&&p| beyond_a(p)) {
                    report.push(Witness::new(
                        vec![a, b, c, f],
                        vec![config.distance(c, f)],
                        "c has a partner beyond a",
                    ));
                }
            }
        }
    }
    report.vacuous = premises == 0;
    report
}

/// Spacing inside components of at least `threshold` points: (ii) at most
/// three red members between consecutive blue members; (i) each red
/// member's edge in either direction ends no further than the second
/// nearest blue member on that side. The leftmost and rightmost red member
/// of each component are exempt from (i). On the cycle, components with an
/// edge across the cut are skipped. Requires two stubs on every point.
pub fn check_comp_spacing(config: &Configuration, matching: &Matching, threshold: usize) -> ViolationReport {
    const CHECK: &str = "component-spacing";
    if !constant_degree_two(config) {
        return ViolationReport::skipped(CHECK, "needs two-color mode with every point of degree two");
    }
    let mut report = ViolationReport::new(CHECK);
    report.surrogate = true;
    let summary = components(matching, config);
    let (edges, dropped) = linear_edges(matching, config);
    report.excluded = dropped > 0;
    let mut cut = vec![false; config.len()];
    if dropped > 0 {
        let kept: std::collections::HashSet<Edge> = edges.into_iter().collect();
        for e in matching.edges().iter().filter(|e| !kept.contains(e)) {
            cut[summary.component_of[e.a]] = true;
        }
    }
    let mut checked = 0usize;
    for members in summary.members_of_large(threshold) {
        let size = members.len();
        if cut[summary.component_of[members[0]]] {
            continue;
        }
        checked += 1;
        let blues: Vec<usize> = members.iter().copied().filter(|&i| config.color(i) == Color::Blue).collect();
        let reds: Vec<usize> = members.iter().copied().filter(|&i| config.color(i) == Color::Red).collect();

        for pair in blues.windows(2) {
            let between: Vec<usize> = reds.iter().copied().filter(|&r| r > pair[0] && r < pair[1]).collect();
            if between.len() > 3 {
                let mut ids = vec![pair[0], pair[1]];
                ids.extend(&between);
                report.push(
                    Witness::new(ids, vec![], "more than three red members between consecutive blue members")
                        .in_component(size),
                );
            }
        }

        let interior = reds.len().saturating_sub(1);
        for &r in reds.iter().take(interior).skip(1) {
            let split = blues.partition_point(|&b| b < r);
            for &p in matching.partners(r) {
                let second = if p > r {
                    blues.get(split + 1).copied()
                } else {
                    split.checked_sub(2).map(|i| blues[i])
                };
                let Some(second) = second else { continue };
                let too_far = if p > r { p > second } else { p < second };
                if too_far {
                    report.push(
                        Witness::new(
                            vec![r, p, second],
                            vec![config.distance(r, p), config.distance(r, second)],
                            "red member linked past its second nearest blue member",
                        )
                        .in_component(size),
                    );
                }
            }
        }
    }
    report.vacuous = checked == 0;
    report
}

/// Adds a red point at `position` with `stubs` stubs to a two-color
/// configuration and checks that no blue point's k-th nearest partner moves
/// further away (a missing k-th partner counts as infinitely far).
pub fn check_monotonicity(base: &Configuration, position: f64, stubs: u32) -> Result<ViolationReport> {
    const CHECK: &str = "monotonicity";
    if base.mode != ColorMode::TwoColor {
        return Err(Error::Configuration("monotonicity needs a two-color configuration".into()));
    }
    if base.points.iter().any(|p| p.position == position) {
        return Err(Error::Collision(position));
    }
    let red: Vec<MarkedPoint> = base
        .points
        .iter()
        .filter(|p| p.color == Color::Red)
        .copied()
        .chain(std::iter::once(MarkedPoint {
            id: usize::MAX,
            position,
            color: Color::Red,
            stubs,
        }))
        .collect();
    let blue: Vec<MarkedPoint> = base.points.iter().filter(|p| p.color == Color::Blue).copied().collect();
    let extended = build_configuration(red, blue, base.geometry, ColorMode::TwoColor)?;
    let inserted = base.points.partition_point(|p| p.position < position);
    let shifted = |id: usize| if id >= inserted { id + 1 } else { id };

    let before = stable_match_greedy(base);
    let after = stable_match_greedy(&extended);
    let mut report = ViolationReport::new(CHECK);
    if base.collision || before.tie_flagged() || after.tie_flagged() {
        return Ok(ViolationReport::skipped(CHECK, "distance ties or coinciding positions"));
    }
    let sorted_lengths = |m: &Matching, c: &Configuration, id: usize| {
        let mut d: Vec<f64> = m.partners(id).iter().map(|&p| c.distance(id, p)).collect();
        d.sort_by(f64::total_cmp);
        d
    };
    let mut blues = 0;
    for v in (0..base.len()).filter(|&i| base.color(i) == Color::Blue) {
        blues += 1;
        let old = sorted_lengths(&before, base, v);
        let new = sorted_lengths(&after, &extended, shifted(v));
        for k in 0..old.len().max(new.len()) {
            let was = old.get(k).copied().unwrap_or(f64::INFINITY);
            let now = new.get(k).copied().unwrap_or(f64::INFINITY);
            if now > was {
                report.push(Witness::new(
                    vec![v, k + 1],
                    vec![now, was],
                    "k-th partner of a blue point moved further away",
                ));
            }
        }
    }
    report.vacuous = blues == 0;
    Ok(report)
}

/// Greedy and round engines must produce the same edge set. Inputs with
/// coinciding positions or distance ties are skipped.
pub fn check_oracle_equivalence(config: &Configuration) -> ViolationReport {
    const CHECK: &str = "oracle-equivalence";
    if config.collision {
        return ViolationReport::skipped(CHECK, "coinciding positions");
    }
    let greedy = stable_match_greedy(config);
    let rounds = stable_match_rounds(config);
    if greedy.tie_flagged() || rounds.tie_flagged() {
        return ViolationReport::skipped(CHECK, "distance ties");
    }
    let mut report = ViolationReport::new(CHECK);
    let g = greedy.edge_set();
    let r = rounds.edge_set();
    for e in g.difference(&r) {
        report.push(Witness::new(vec![e.a, e.b], vec![config.distance(e.a, e.b)], "greedy only"));
    }
    for e in r.difference(&g) {
        report.push(Witness::new(vec![e.a, e.b], vec![config.distance(e.a, e.b)], "rounds only"));
    }
    report.vacuous = g.is_empty() && r.is_empty();
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pointgen::Geometry;

    fn two_color(red: &[(f64, u32)], blue: &[(f64, u32)]) -> Configuration {
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
        build_configuration(
            mk(red, Color::Red),
            mk(blue, Color::Blue),
            Geometry::line(100.0).unwrap(),
            ColorMode::TwoColor,
        )
        .unwrap()
    }

    #[test]
    fn stability_detects_swapped_pairing() {
        let c = two_color(&[(0.0, 1), (3.0, 1)], &[(1.0, 1), (2.0, 1)]);
        // ids: 0=r0, 1=b1, 2=b2, 3=r3; pairing {(0,2),(3,1)}
        let bad = Matching::from_edges(&c, &[(0, 2), (3, 1)]).unwrap();
        let r = check_stability(&c, &bad);
        assert!(!r.pass);
        assert!(r.is_hard_failure());
        assert!(r.witnesses.iter().any(|w| w.ids == vec![0, 1]));
        let good = stable_match_rounds(&c);
        assert!(check_stability(&c, &good).pass);
    }

    #[test]
    fn stability_flags_unlinked_insatiable_points() {
        let c = two_color(&[(0.0, 1)], &[(5.0, 1)]);
        let r = check_stability(&c, &Matching::empty(&c));
        assert!(!r.pass);
        assert_eq!(r.witnesses[0].ids, vec![0, 1]);
    }

    #[test]
    fn crossing_detector() {
        let c = two_color(&[(0.0, 1), (1.0, 1)], &[(2.0, 1), (3.0, 1)]);
        let bad = Matching::from_edges(&c, &[(0, 2), (1, 3)]).unwrap();
        let r = check_crossing_component(&c, &bad);
        assert!(!r.pass);
        assert_eq!(r.witnesses[0].ids, vec![0, 1, 2, 3]);
        let none = Matching::from_edges(&c, &[(0, 3), (1, 2)]).unwrap();
        let r = check_crossing_component(&c, &none);
        assert!(r.pass && r.vacuous);
    }

    /// Reds and blues alternate along `0, 1, 2, ...`, degree two, with the
    /// given edges.
    fn degree_two_chain(n: usize) -> Configuration {
        let red: Vec<(f64, u32)> = (0..n).step_by(2).map(|i| (i as f64, 2)).collect();
        let blue: Vec<(f64, u32)> = (1..n).step_by(2).map(|i| (i as f64, 2)).collect();
        two_color(&red, &blue)
    }

    #[test]
    fn mia_detector_and_vacuity() {
        let c = degree_two_chain(4);
        let m = Matching::from_edges(&c, &[(0, 3), (1, 2)]).unwrap();
        let r = check_lemma_mia(&c, &m, 2);
        assert!(r.pass && !r.vacuous);

        // (0,3) and (2,5) cross inside the component {0,2,3,5}; (2,3) is missing
        let c = degree_two_chain(6);
        let m = Matching::from_edges(&c, &[(0, 3), (2, 5), (0, 5)]).unwrap();
        let r = check_lemma_mia(&c, &m, 4);
        assert!(!r.pass);
        assert!(r.surrogate);
        assert!(!r.is_hard_failure());
        assert_eq!(r.witnesses[0].ids, vec![0, 2, 3, 5]);
        assert_eq!(r.witnesses[0].component_size, Some(4));

        // same violation below the threshold is only observed
        let r = check_lemma_mia(&c, &m, 10);
        assert!(r.pass && r.vacuous);
        assert_eq!(r.observations.len(), 1);
    }

    #[test]
    fn structure_checks_need_degree_two() {
        let c = two_color(&[(0.0, 1)], &[(1.0, 2)]);
        let m = stable_match_rounds(&c);
        for r in [check_lemma_mia(&c, &m, 20), check_lemma_samba(&c, &m), check_comp_spacing(&c, &m, 20)] {
            assert!(r.pass && r.vacuous && r.excluded);
        }
    }

    #[test]
    fn samba_detector() {
        // red a=0, blue c=5, blue b=10, red f=-1
        let c = two_color(&[(0.0, 2), (-1.0, 2)], &[(5.0, 2), (10.0, 2)]);
        // ids: 0=f(-1), 1=a(0), 2=c(5), 3=b(10)
        let bad = Matching::from_edges(&c, &[(1, 3), (2, 0)]).unwrap();
        let r = check_lemma_samba(&c, &bad);
        assert!(!r.pass);
        assert!(r.witnesses.iter().any(|w| w.note.contains("beyond a") && w.ids == vec![1, 3, 2, 0]));

        let fine = Matching::from_edges(&c, &[(1, 3)]).unwrap();
        let r = check_lemma_samba(&c, &fine);
        assert!(r.pass && !r.vacuous);
    }

    #[test]
    fn samba_partner_beyond_b_needs_edge() {
        // red a=0, blue c=5, blue b=10, red d=12
        let c = two_color(&[(0.0, 2), (12.0, 2)], &[(5.0, 2), (10.0, 2)]);
        // ids: 0=a, 1=c, 2=b, 3=d
        let bad = Matching::from_edges(&c, &[(0, 2), (1, 3)]).unwrap();
        let r = check_lemma_samba(&c, &bad);
        assert!(r.witnesses.iter().any(|w| w.ids == vec![0, 2, 1, 3]));
        let good = Matching::from_edges(&c, &[(0, 2), (1, 3), (2, 3)]).unwrap();
        assert!(check_lemma_samba(&c, &good).pass);
    }

    #[test]
    fn spacing_detects_four_reds() {
        // B R R R R B as one component: a cycle through all six points is
        // impossible with these stubs, so use a path-like component.
        let c = two_color(
            &[(1.0, 2), (2.0, 2), (3.0, 2), (4.0, 2)],
            &[(0.0, 2), (5.0, 2), (6.0, 2), (7.0, 2)],
        );
        // ids 0=B0, 1..=4 reds, 5=B5, 6=B6, 7=B7
        let m = Matching::from_edges(&c, &[(0, 1), (1, 5), (5, 2), (2, 6), (6, 3), (3, 7), (7, 4)]).unwrap();
        let r = check_comp_spacing(&c, &m, 4);
        assert!(!r.pass);
        assert!(r.witnesses.iter().any(|w| w.ids[..2] == [0, 5]));
        let r = check_comp_spacing(&c, &m, 100);
        assert!(r.pass && r.vacuous);
    }

    #[test]
    fn spacing_detects_long_red_edge() {
        // the interior red R1 reaches B4, past B2 and B3
        let c = two_color(
            &[(0.0, 2), (1.0, 2), (10.0, 2)],
            &[(2.0, 2), (3.0, 2), (4.0, 2), (11.0, 2)],
        );
        // ids: 0=R0, 1=R1, 2=B2, 3=B3, 4=B4, 5=R10, 6=B11
        let m = Matching::from_edges(&c, &[(0, 2), (0, 6), (1, 3), (1, 4), (3, 5), (5, 6)]).unwrap();
        let r = check_comp_spacing(&c, &m, 3);
        assert!(r.witnesses.iter().any(|w| w.ids == vec![1, 4, 3]));
    }

    #[test]
    fn monotonicity_conventions() {
        // blue v has no partner before and one after adding a red point
        let c = two_color(&[], &[(1.0, 1)]);
        let r = check_monotonicity(&c, 0.0, 1).unwrap();
        assert!(r.pass && !r.vacuous);
        assert!(matches!(check_monotonicity(&c, 1.0, 1), Err(Error::Collision(_))));

        let c = two_color(&[(0.0, 1), (3.0, 2)], &[(1.0, 2), (2.5, 1)]);
        let r = check_monotonicity(&c, 1.8, 1).unwrap();
        assert!(r.pass);
    }

    #[test]
    fn oracle_fixtures_and_skips() {
        let fixtures = [
            two_color(&[(0.0, 2)], &[(-1.0, 1), (2.0, 1)]),
            two_color(&[(0.0, 1), (10.0, 1)], &[(1.0, 1), (4.0, 1)]),
            two_color(&[(0.0, 1), (3.0, 1)], &[(1.0, 1), (2.0, 1)]),
        ];
        for c in &fixtures {
            let r = check_oracle_equivalence(c);
            assert!(r.pass && !r.excluded);
        }
        let tied = two_color(&[(0.0, 1)], &[(-1.0, 1), (1.0, 1)]);
        let r = check_oracle_equivalence(&tied);
        assert!(r.pass && r.excluded);
    }

    #[test]
    fn report_json_shape() {
        let c = two_color(&[(0.0, 1)], &[(5.0, 1)]);
        let r = check_stability(&c, &Matching::empty(&c));
        let v = serde_json::to_value(&r).unwrap();
        for key in ["check", "pass", "vacuous", "excluded", "witnesses"] {
            assert!(v.get(key).is_some(), "missing {key}");
        }
    }
}
