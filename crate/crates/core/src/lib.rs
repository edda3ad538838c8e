//! Implicit MAC finite-volume scheme for incompressible Navier–Stokes with
//! variable density and viscosity on non-uniform Cartesian grids.
//!
//! Layout follows the data flow of one time step:
//! [`mesh`] → [`fields`] → [`operators`] → [`solver`], with [`verification`]
//! re-deriving every structural identity from fields alone.

#![allow(clippy::needless_range_loop)]

pub mod error;
pub mod fields;
pub mod mesh;
pub mod operators;
pub mod quadrature;
pub mod solver;
pub mod sparse;
pub mod verification;

pub use error::{FieldError, MeshError, OperatorError, SolverError};
pub use fields::{CellScalarField, DualGridField, VelocityField};
pub use mesh::{AxisPartition, FaceId, MacMesh, MeshMetrics};
