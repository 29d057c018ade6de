//! Exact finite-field laboratory: invariant forms, classical groups,
//! symmetric-function varieties in positive characteristic, and a
//! forward-chaining engine for resolvent-degree upper bounds.

pub mod cli;
pub mod gf;
pub mod grouplab;
pub mod linalg;
pub mod mvpoly;
pub mod paperchecks;
pub mod projgeom;
pub mod rdengine;
