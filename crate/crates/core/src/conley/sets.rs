//! Invariance operations on cell sets: A⁺(X), Inv X, combinatorial boundary,
//! isolation and minimal positively invariant closures P(S, X).

use std::collections::VecDeque;

use super::dynamics::CubicalDynamics;
use super::grid::CellSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Backward,
}

/// Greatest A ⊆ X such that every cell of A has an image (or preimage, for
/// `Backward`) cell in A.
pub fn invariant_part_directed(x: &CellSet, dynamics: &CubicalDynamics, dir: Direction) -> CellSet {
    let n = dynamics.grid().len();
    let mut inside = x.mask(n);
    let succ = |c: usize| match dir {
        Direction::Forward => dynamics.image(c),
        Direction::Backward => dynamics.preimage(c),
    };
    let pred = |c: usize| match dir {
        Direction::Forward => dynamics.preimage(c),
        Direction::Backward => dynamics.image(c),
    };
    let mut count = vec![0usize; n];
    let mut queue = VecDeque::new();
    for c in x.iter() {
        count[c] = succ(c).iter().filter(|&&d| inside[d]).count();
        if count[c] == 0 {
            queue.push_back(c);
        }
    }
    while let Some(c) = queue.pop_front() {
        if !inside[c] {
            continue;
        }
        inside[c] = false;
        for &p in pred(c) {
            if inside[p] {
                count[p] -= 1;
                if count[p] == 0 {
                    queue.push_back(p);
                }
            }
        }
    }
    x.iter().filter(|&c| inside[c]).collect()
}

/// A⁺(X): cells of X admitting a forward path that stays in X.
pub fn positive_invariant_part(x: &CellSet, dynamics: &CubicalDynamics) -> CellSet {
    invariant_part_directed(x, dynamics, Direction::Forward)
}

/// Inv X = A⁺(X) ∩ A⁻(X): cells on a bi-infinite path inside X.
pub fn invariant_part(x: &CellSet, dynamics: &CubicalDynamics) -> CellSet {
    let fwd = invariant_part_directed(x, dynamics, Direction::Forward);
    let bwd = invariant_part_directed(x, dynamics, Direction::Backward);
    fwd.intersection(&bwd)
}

/// Cells of X sharing a corner with a cell outside X or with the grid edge.
pub fn combinatorial_boundary(x: &CellSet, dynamics: &CubicalDynamics) -> CellSet {
    let grid = dynamics.grid();
    let mask = x.mask(grid.len());
    x.iter()
        .filter(|&c| {
            let (nb, edge) = grid.neighbors(c);
            edge || nb.iter().any(|&d| !mask[d])
        })
        .collect()
}

/// Cells of `x` together with all their corner-neighbours.
pub fn neighbourhood(x: &CellSet, dynamics: &CubicalDynamics) -> CellSet {
    let grid = dynamics.grid();
    x.iter().flat_map(|c| std::iter::once(c).chain(grid.neighbors(c).0)).collect()
}

/// Inv X misses the combinatorial boundary of X.
pub fn is_isolating(x: &CellSet, dynamics: &CubicalDynamics) -> bool {
    isolation_witnesses(x, dynamics).is_empty()
}

/// Cells of Inv X on the combinatorial boundary of X.
pub fn isolation_witnesses(x: &CellSet, dynamics: &CubicalDynamics) -> CellSet {
    invariant_part(x, dynamics).intersection(&combinatorial_boundary(x, dynamics))
}

/// P(S, X): forward reachability closure of S ∩ X through cells of X.
pub fn min_pos_invariant(s: &CellSet, x: &CellSet, dynamics: &CubicalDynamics) -> CellSet {
    let n = dynamics.grid().len();
    let in_x = x.mask(n);
    let mut seen = vec![false; n];
    let mut queue: VecDeque<usize> = VecDeque::new();
    for c in s.iter().filter(|&c| in_x[c]) {
        seen[c] = true;
        queue.push_back(c);
    }
    while let Some(c) = queue.pop_front() {
        for &d in dynamics.image(c) {
            if in_x[d] && !seen[d] {
                seen[d] = true;
                queue.push_back(d);
            }
        }
    }
    (0..n).filter(|&c| seen[c]).collect()
}

/// Cells reachable from `start` through cells of `within` (including `start ∩ within`).
pub fn reachable_within(start: &CellSet, within: &CellSet, dynamics: &CubicalDynamics) -> CellSet {
    min_pos_invariant(start, within, dynamics)
}
