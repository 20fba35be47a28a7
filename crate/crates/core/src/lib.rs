//! Discrete double Coulomb decomposition, finite-dimensional index calculus and
//! combinatorial Conley index machinery.

pub mod acceptance;
pub mod aps;
pub mod conley;
pub mod dec;
pub mod doublecoulomb;
pub mod exact;
pub mod fda;
pub mod linalg;
pub mod mesh;
pub mod spectral;
