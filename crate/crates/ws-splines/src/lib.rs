//! C^2 cubic splines on the Wang-Shi refinement of arbitrary triangulations.
//!
//! The crate builds the WS_3 line arrangement of a macro-triangle, the
//! 28-member simplex spline basis of the local C^2 cubic space on it, the
//! cross-edge smoothness machinery, and global spline spaces over whole
//! triangulations driven by minimal determining sets.

pub mod geom;
mod exact;
pub mod local;
pub mod simplex;
pub mod tables;

pub use geom::{
    brute_force_key, crosscut_dimension, ws_dimension, Bary, CellId, CrossCutStats, GeomError,
    LineEq, Point, Triangle, WsSplit,
};
pub use local::{
    build_local_basis, convert, conversion_norms, BasisError, BasisTag, ControlNet, Hessian,
    LocalBasis, LocalCoeffs,
};
pub use simplex::{KnotMultiset, OnLinePolicy, SimplexError};
