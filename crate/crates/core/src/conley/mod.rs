//! Isolating neighbourhoods, index pairs and relative-homology Conley indices
//! for multivalued maps on cubical grids.

pub mod dynamics;
pub mod fields;
pub mod grid;
pub mod homology;
pub mod index_pair;
pub mod induced;
pub mod sets;
pub mod svg;

use thiserror::Error;

pub use dynamics::{flow_map, outer_approximation, CubicalDynamics, SoundnessReport, VectorField};
pub use grid::{CellSet, Grid};
pub use homology::{relative_homology, PairHomology, RelativeComplex};
pub use index_pair::{
    bridge_pair, build_index_pair, check_hypotheses, intersect_index_pairs, validate_index_pair, IndexPair,
    ValidationReport,
};
pub use induced::{induced_map_check, CellMap, InducedMapReport};
pub use sets::{invariant_part, is_isolating, min_pos_invariant, positive_invariant_part};

#[derive(Debug, Error)]
pub enum ConleyError {
    #[error("invalid grid: {0}")]
    BadGrid(String),
    #[error("cell {0} has an empty image")]
    EmptyImage(usize),
    #[error("padding {padding} is too large for a box of extent {extent}")]
    ResolutionTooCoarse { padding: f64, extent: f64 },
    #[error("hypothesis ({hypothesis}) violated at {} cell(s)", witnesses.len())]
    HypothesisViolated { hypothesis: u8, witnesses: Vec<usize> },
    #[error("index pair validation failed: {0}")]
    ValidationFailed(String),
    #[error("bridge validation failed: {0}")]
    BridgeValidationFailed(String),
    #[error("chain is not a relative cycle")]
    NotACycle,
    #[error("cell map leaves the target pair at {} cube(s)", .0)]
    MapOutsidePair(usize),
    #[error("unknown field `{0}`")]
    UnknownField(String),
}
