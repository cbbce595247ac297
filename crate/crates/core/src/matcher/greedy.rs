use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use super::{pair_order, Matching};
use crate::pointgen::{Color, ColorMode, Configuration, Geometry};

/// Links the globally closest compatible active pair until none is left.
///
/// Every point keeps one pending candidate per direction: the first active,
/// compatible point of the opposite color class in that direction. Pending
/// candidates sit in a min-heap keyed by (distance, min id, max id) and are
/// revalidated lazily when popped, so the cost is dominated by
/// O(m log m) heap operations for m stubs.
pub fn stable_match_greedy(config: &Configuration) -> Matching {
    let mut state = MatcherState::new(config);
    state.run();
    state.into_matching()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Dir {
    Left,
    Right,
}

impl Dir {
    fn flip(self) -> Self {
        match self {
            Dir::Left => Dir::Right,
            Dir::Right => Dir::Left,
        }
    }
}

/// Sorted members of one color class with "next alive" and "previous alive"
/// skip links (union-find with path compression).
#[derive(Debug, Clone)]
struct ActiveList {
    ids: Vec<usize>,
    /// `next[i]`: a hint towards the smallest alive slot `>= i`; `next[len]`
    /// is the sentinel.
    next: Vec<usize>,
    /// `prev[i]`: a hint towards the largest alive slot `< i`, stored shifted
    /// by one so `prev[0]` is the sentinel.
    prev: Vec<usize>,
    alive: usize,
}

impl ActiveList {
    fn new(ids: Vec<usize>) -> Self {
        let len = ids.len();
        ActiveList {
            ids,
            next: (0..=len).collect(),
            prev: (0..=len).collect(),
            alive: len,
        }
    }

    fn len(&self) -> usize {
        self.ids.len()
    }

    /// Smallest alive slot `>= from`, if any.
    fn next_alive(&mut self, from: usize) -> Option<usize> {
        let root = find(&mut self.next, from);
        (root < self.len()).then_some(root)
    }

    /// Largest alive slot `< below`, if any.
    fn prev_alive(&mut self, below: usize) -> Option<usize> {
        let root = find(&mut self.prev, below);
        (root > 0).then(|| root - 1)
    }

    fn remove(&mut self, slot: usize) {
        self.next[slot] = slot + 1;
        self.prev[slot + 1] = slot;
        self.alive -= 1;
    }
}

fn find(links: &mut [usize], start: usize) -> usize {
    let mut root = start;
    while links[root] != root {
        root = links[root];
    }
    let mut cur = start;
    while links[cur] != root {
        let up = links[cur];
        links[cur] = root;
        cur = up;
    }
    root
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    distance: f64,
    owner: usize,
    partner: usize,
    dir: Dir,
    slot: usize,
}

impl Candidate {
    fn cmp_key(&self, other: &Self) -> Ordering {
        pair_order(self.distance, self.owner, self.partner, other.distance, other.owner, other.partner)
            .then(self.owner.cmp(&other.owner))
            .then(self.dir.cmp(&other.dir))
    }
}

impl PartialEq for Candidate {
    fn eq(&self, other: &Self) -> bool {
        self.cmp_key(other) == Ordering::Equal
    }
}

impl Eq for Candidate {}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.cmp_key(other)
    }
}

/// Closest compatible active point of a query point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Nearest {
    pub id: usize,
    pub distance: f64,
    /// Another candidate lies at exactly the same distance.
    pub tie: bool,
}

/// Working state of the greedy engine: the active points of each color
/// class in position order, the partial matching, and the candidate heap.
/// A point leaves its active list exactly when its last stub is used.
#[derive(Debug)]
pub struct MatcherState<'a> {
    config: &'a Configuration,
    matching: Matching,
    classes: Vec<ActiveList>,
    class_of: Vec<usize>,
    slot_of: Vec<usize>,
    /// Number of members of the target class with a smaller id.
    split: Vec<usize>,
    heap: BinaryHeap<Reverse<Candidate>>,
}

impl<'a> MatcherState<'a> {
    pub fn new(config: &'a Configuration) -> Self {
        let n = config.len();
        let class_count = match config.mode {
            ColorMode::OneColor => 1,
            ColorMode::TwoColor => 2,
        };
        let class_index = |c: Color| match (config.mode, c) {
            (ColorMode::OneColor, _) | (_, Color::Red) => 0,
            (_, Color::Blue) => 1,
        };
        let mut members = vec![Vec::new(); class_count];
        let mut class_of = vec![0; n];
        let mut slot_of = vec![0; n];
        let mut split = vec![0; n];
        for p in &config.points {
            let c = class_index(p.color);
            let target = class_count - 1 - c;
            split[p.id] = members[target].len();
            class_of[p.id] = c;
            slot_of[p.id] = members[c].len();
            members[c].push(p.id);
        }
        let classes = members.into_iter().map(ActiveList::new).collect();
        MatcherState {
            config,
            matching: Matching::empty(config),
            classes,
            class_of,
            slot_of,
            split,
            heap: BinaryHeap::new(),
        }
    }

    pub fn is_active(&self, id: usize) -> bool {
        self.matching.unmatched_stubs(id) > 0
    }

    pub fn matching(&self) -> &Matching {
        &self.matching
    }

    pub fn into_matching(self) -> Matching {
        self.matching
    }

    fn target(&self, id: usize) -> usize {
        self.classes.len() - 1 - self.class_of[id]
    }

    fn one_color(&self) -> bool {
        self.classes.len() == 1
    }

    /// First slot to inspect when scanning from `id` in `dir` for the first
    /// time: for `Right` the smallest candidate slot, for `Left` the
    /// exclusive upper bound.
    fn initial_bound(&self, id: usize, dir: Dir) -> usize {
        match dir {
            Dir::Right if self.one_color() => self.split[id] + 1,
            _ => self.split[id],
        }
    }

    /// First active compatible point of the target class in `dir`, starting
    /// at `bound` (inclusive lower bound when scanning right, exclusive
    /// upper bound when scanning left). On the cycle the scan wraps once and
    /// gives up past half the circumference, where the other direction is
    /// shorter.
    fn scan(&mut self, id: usize, dir: Dir, mut bound: usize) -> Option<Candidate> {
        let t = self.target(id);
        let cycle = match self.config.geometry {
            Geometry::Cycle { circumference } => Some(circumference),
            Geometry::LineWindow { .. } => None,
        };
        let origin = self.config.position(id);
        let mut budget = self.classes[t].alive;
        let mut wrapped = false;
        while budget > 0 {
            let list = &mut self.classes[t];
            let found = match dir {
                Dir::Right => list.next_alive(bound),
                Dir::Left => list.prev_alive(bound),
            };
            let slot = match (found, cycle) {
                (Some(s), _) => s,
                (None, None) => return None,
                (None, Some(_)) => {
                    if wrapped {
                        return None;
                    }
                    wrapped = true;
                    bound = match dir {
                        Dir::Right => 0,
                        Dir::Left => list.len(),
                    };
                    continue;
                }
            };
            budget -= 1;
            let partner = list.ids[slot];
            if partner == id {
                return None;
            }
            if let Some(c) = cycle {
                let arc = match dir {
                    Dir::Right => (self.config.position(partner) - origin).rem_euclid(c),
                    Dir::Left => (origin - self.config.position(partner)).rem_euclid(c),
                };
                if arc > c / 2.0 {
                    return None;
                }
            }
            if self.matching.is_linked(id, partner) {
                bound = match dir {
                    Dir::Right => slot + 1,
                    Dir::Left => slot,
                };
                continue;
            }
            return Some(Candidate {
                distance: self.config.distance(id, partner),
                owner: id,
                partner,
                dir,
                slot,
            });
        }
        None
    }

    fn resume_bound(dir: Dir, slot: usize) -> usize {
        match dir {
            Dir::Right => slot + 1,
            Dir::Left => slot,
        }
    }

    /// The active compatible point closest to `id`, if any. Equal distances
    /// are resolved by the global pair order and reported as a tie.
    pub fn nearest_compatible(&mut self, id: usize) -> Option<Nearest> {
        if !self.is_active(id) {
            return None;
        }
        let left = self.scan(id, Dir::Left, self.initial_bound(id, Dir::Left));
        let right = self.scan(id, Dir::Right, self.initial_bound(id, Dir::Right));
        match (left, right) {
            (Some(l), Some(r)) if l.partner != r.partner => {
                let tie = l.distance == r.distance;
                let best = if l.cmp_key(&r) == Ordering::Greater { r } else { l };
                Some(Nearest {
                    id: best.partner,
                    distance: best.distance,
                    tie,
                })
            }
            (Some(c), _) | (None, Some(c)) => Some(Nearest {
                id: c.partner,
                distance: c.distance,
                tie: false,
            }),
            (None, None) => None,
        }
    }

    fn seed(&mut self) {
        for id in 0..self.config.len() {
            if !self.is_active(id) {
                continue;
            }
            for dir in [Dir::Left, Dir::Right] {
                if let Some(c) = self.scan(id, dir, self.initial_bound(id, dir)) {
                    self.heap.push(Reverse(c));
                }
            }
        }
    }

    /// Whether another compatible pair through `x` or `y` has exactly the
    /// length of the pair about to be linked.
    fn competing_tie(&mut self, c: &Candidate) -> bool {
        let (x, y, dir) = (c.owner, c.partner, c.dir);
        let away_x = self.scan(x, dir.flip(), self.initial_bound(x, dir.flip()));
        let away_y = self.scan(y, dir, self.initial_bound(y, dir));
        [away_x, away_y]
            .iter()
            .flatten()
            .any(|o| o.distance == c.distance && o.partner != x && o.partner != y)
    }

    fn deactivate(&mut self, id: usize) {
        let c = self.class_of[id];
        let slot = self.slot_of[id];
        self.classes[c].remove(slot);
    }

    /// Runs the engine to exhaustion.
    pub fn run(&mut self) {
        self.seed();
        let mut ties = 0;
        while let Some(Reverse(c)) = self.heap.pop() {
            let (x, y) = (c.owner, c.partner);
            if !self.is_active(x) {
                continue;
            }
            if !self.is_active(y) || self.matching.is_linked(x, y) {
                if let Some(next) = self.scan(x, c.dir, Self::resume_bound(c.dir, c.slot)) {
                    self.heap.push(Reverse(next));
                }
                continue;
            }
            if self.competing_tie(&c) {
                ties += 1;
            }
            self.matching.link(x, y);
            if !self.is_active(x) {
                self.deactivate(x);
            }
            if !self.is_active(y) {
                self.deactivate(y);
            }
            if self.is_active(x) {
                if let Some(next) = self.scan(x, c.dir, Self::resume_bound(c.dir, c.slot)) {
                    self.heap.push(Reverse(next));
                }
            }
        }
        self.matching.add_ties(ties);
    }
}
