//! Index pairs (N, L): construction from seed sets, one-step validation and
//! the intersection of two pairs through their bridge pairs.

use serde::Serialize;

use super::dynamics::CubicalDynamics;
use super::grid::CellSet;
use super::homology::relative_homology;
use super::sets::{
    combinatorial_boundary, invariant_part, min_pos_invariant, neighbourhood, positive_invariant_part,
    reachable_within,
};
use super::ConleyError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IndexPair {
    pub n: CellSet,
    pub l: CellSet,
    pub validated: bool,
    pub homology: Vec<usize>,
}

impl IndexPair {
    /// Unvalidated pair with its relative homology.
    pub fn new(n: CellSet, l: CellSet, dynamics: &CubicalDynamics) -> Self {
        let homology = relative_homology(dynamics.grid(), &n, &l);
        IndexPair { n, l, validated: false, homology }
    }

    /// Degrees with nonzero rank.
    pub fn support(&self) -> Vec<usize> {
        (0..self.homology.len()).filter(|&k| self.homology[k] > 0).collect()
    }

    pub fn total_rank(&self) -> usize {
        self.homology.iter().sum()
    }
}

/// Witness cells for each validation condition; empty lists mean the
/// condition holds.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    /// Cells violating L ⊆ N ⊆ X.
    pub nesting: Vec<usize>,
    /// Inv X not inside N ∖ L, or Inv(N ∖ L) meeting the boundary of X.
    pub isolation: Vec<usize>,
    /// Cells of L whose image meets N ∖ L.
    pub positive_invariance: Vec<usize>,
    /// Cells of N ∖ L whose image leaves N.
    pub exit: Vec<usize>,
}

impl ValidationReport {
    pub fn condition(&self, k: u8) -> bool {
        match k {
            1 => self.isolation.is_empty(),
            2 => self.positive_invariance.is_empty(),
            3 => self.exit.is_empty(),
            _ => self.nesting.is_empty(),
        }
    }

    pub fn passed(&self) -> bool {
        (0..=3).all(|k| self.condition(k))
    }

    fn summary(&self) -> String {
        format!(
            "nesting {}, isolation {}, positive invariance {}, exit {}",
            self.nesting.len(),
            self.isolation.len(),
            self.positive_invariance.len(),
            self.exit.len()
        )
    }
}

pub fn validate_index_pair(pair: &IndexPair, x: &CellSet, dynamics: &CubicalDynamics) -> ValidationReport {
    let n_mask = pair.n.mask(dynamics.grid().len());
    let l_mask = pair.l.mask(dynamics.grid().len());
    let nesting = pair.l.difference(&pair.n).union(&pair.n.difference(x)).as_slice().to_vec();

    let core = pair.n.difference(&pair.l);
    let inv_x = invariant_part(x, dynamics);
    let inv_core = invariant_part(&core, dynamics);
    let isolation = inv_x
        .difference(&core)
        .union(&inv_core.intersection(&combinatorial_boundary(x, dynamics)))
        .as_slice()
        .to_vec();

    let positive_invariance = pair
        .l
        .iter()
        .filter(|&c| dynamics.image(c).iter().any(|&d| n_mask[d] && !l_mask[d]))
        .collect();
    let exit = core
        .iter()
        .filter(|&c| dynamics.exits(c) || dynamics.image(c).iter().any(|&d| !n_mask[d]))
        .collect();
    ValidationReport { nesting, isolation, positive_invariance, exit }
}

/// Checks the two seed hypotheses and returns (A⁺(X), core) where core is the
/// set of cells reachable inside A⁺(X) from A⁺(X) ∩ (A ∪ K), K being the
/// neighbourhood of Inv X in X.
pub fn check_hypotheses(
    a: &CellSet,
    b: &CellSet,
    x: &CellSet,
    dynamics: &CubicalDynamics,
) -> Result<(CellSet, CellSet), ConleyError> {
    let outside = a.union(b).difference(x);
    if !outside.is_empty() {
        return Err(ConleyError::HypothesisViolated { hypothesis: 1, witnesses: outside.as_slice().to_vec() });
    }
    let a_plus = positive_invariant_part(x, dynamics);
    let k = neighbourhood(&invariant_part(x, dynamics), dynamics).intersection(x);
    let core = reachable_within(&a_plus.intersection(&a.union(&k)), &a_plus, dynamics);
    let x_mask = x.mask(dynamics.grid().len());
    let boundary = combinatorial_boundary(x, dynamics);
    let witnesses: Vec<usize> = core
        .iter()
        .filter(|&c| {
            boundary.contains(c) || dynamics.exits(c) || dynamics.image(c).iter().any(|&d| !x_mask[d])
        })
        .collect();
    if !witnesses.is_empty() {
        return Err(ConleyError::HypothesisViolated { hypothesis: 1, witnesses });
    }
    let clash = b.intersection(&a_plus);
    if !clash.is_empty() {
        return Err(ConleyError::HypothesisViolated { hypothesis: 2, witnesses: clash.as_slice().to_vec() });
    }
    Ok((a_plus, core))
}

/// Index pair (N, L) with A ⊆ N ⊆ X and B ⊆ L: N is the forward closure in X of
/// A, B and a neighbourhood of Inv X; L is the part of N outside A⁺(X).
pub fn build_index_pair(
    a: &CellSet,
    b: &CellSet,
    x: &CellSet,
    dynamics: &CubicalDynamics,
) -> Result<IndexPair, ConleyError> {
    let (a_plus, _) = check_hypotheses(a, b, x, dynamics)?;
    let k = neighbourhood(&invariant_part(x, dynamics), dynamics).intersection(x);
    let n = min_pos_invariant(&a.union(b).union(&k), x, dynamics);
    let l = n.difference(&a_plus);
    let mut pair = IndexPair::new(n, l, dynamics);
    let report = validate_index_pair(&pair, x, dynamics);
    if !report.passed() {
        return Err(ConleyError::ValidationFailed(report.summary()));
    }
    pair.validated = true;
    Ok(pair)
}

/// (N ∪ P(L, X), P(L, X)).
pub fn bridge_pair(pair: &IndexPair, x: &CellSet, dynamics: &CubicalDynamics) -> IndexPair {
    let l = min_pos_invariant(&pair.l, x, dynamics);
    let n = pair.n.union(&l);
    IndexPair::new(n, l, dynamics)
}

/// Componentwise intersection of the bridge pairs of two index pairs.
pub fn intersect_index_pairs(
    p1: &IndexPair,
    p2: &IndexPair,
    x: &CellSet,
    dynamics: &CubicalDynamics,
) -> Result<IndexPair, ConleyError> {
    let mut bridges = Vec::with_capacity(2);
    for p in [p1, p2] {
        let bridge = bridge_pair(p, x, dynamics);
        let report = validate_index_pair(&bridge, x, dynamics);
        if !report.passed() {
            return Err(ConleyError::BridgeValidationFailed(report.summary()));
        }
        bridges.push(bridge);
    }
    let n = bridges[0].n.intersection(&bridges[1].n);
    let l = bridges[0].l.intersection(&bridges[1].l);
    let mut pair = IndexPair::new(n, l, dynamics);
    let report = validate_index_pair(&pair, x, dynamics);
    if !report.passed() {
        return Err(ConleyError::ValidationFailed(report.summary()));
    }
    pair.validated = true;
    Ok(pair)
}
