use std::cmp::Ordering;

use super::{compatible, pair_order, Matching};
use crate::pointgen::{Configuration, Geometry};

/// Round-based reference construction.
///
/// Each round freezes the set of points with free stubs, finds every such
/// point's closest compatible partner by an outward scan in position order,
/// and links all mutually closest pairs. Rounds repeat until one creates no
/// edge. Costs O(n) per point per round, so it is meant for modest inputs.
pub fn stable_match_rounds(config: &Configuration) -> Matching {
    let n = config.len();
    let mut matching = Matching::empty(config);
    let mut round = 0u32;
    loop {
        round += 1;
        let active: Vec<bool> = (0..n).map(|i| matching.unmatched_stubs(i) > 0).collect();
        let mut ties = 0;
        let nearest: Vec<Option<usize>> = (0..n)
            .map(|x| {
                if !active[x] {
                    return None;
                }
                let (best, tie) = closest_compatible(config, &matching, &active, x);
                ties += tie as usize;
                best
            })
            .collect();
        matching.add_ties(ties);

        let pairs: Vec<(usize, usize)> = (0..n)
            .filter_map(|x| match nearest[x] {
                Some(y) if x < y && nearest[y] == Some(x) => Some((x, y)),
                _ => None,
            })
            .collect();
        if pairs.is_empty() {
            break;
        }
        for (x, y) in pairs {
            matching.link_in_round(x, y, round);
        }
    }
    matching
}

/// First compatible active point on each side of `x`, then the closer of the
/// two under the global pair order. The flag reports an exact distance tie
/// between two different candidates.
fn closest_compatible(
    config: &Configuration,
    matching: &Matching,
    active: &[bool],
    x: usize,
) -> (Option<usize>, bool) {
    let n = config.len();
    let cycle = matches!(config.geometry, Geometry::Cycle { .. });
    let usable = |y: usize| active[y] && compatible(&config.points[x], &config.points[y], matching, config.mode);

    let mut right = None;
    let mut i = x;
    loop {
        i += 1;
        if i == n {
            if !cycle {
                break;
            }
            i = 0;
        }
        if i == x {
            break;
        }
        if usable(i) {
            right = Some(i);
            break;
        }
    }

    let mut left = None;
    let mut i = x;
    loop {
        if i == 0 {
            if !cycle {
                break;
            }
            i = n;
        }
        i -= 1;
        if i == x {
            break;
        }
        if usable(i) {
            left = Some(i);
            break;
        }
    }

    match (left, right) {
        (Some(l), Some(r)) if l != r => {
            let dl = config.distance(x, l);
            let dr = config.distance(x, r);
            let tie = dl == dr;
            match pair_order(dl, x, l, dr, x, r) {
                Ordering::Greater => (Some(r), tie),
                _ => (Some(l), tie),
            }
        }
        (Some(l), _) => (Some(l), false),
        (None, r) => (r, false),
    }
}
