//! Stabilized cut finite element solver for the three-field Stokes problem.
//!
//! The stress, velocity and pressure are approximated with continuous
//! piecewise linear elements on a structured background triangulation that
//! does not fit the domain boundary. Boundary conditions are imposed weakly by
//! Nitsche's method, and continuous interior penalty terms on the faces of
//! the active mesh stabilize both the equal-order pairing and small cut
//! elements.
//!
//! Everything numerical is generic over [`Real`] (`f32` or `f64`); the
//! aliases below fix double precision, which the study drivers use.

pub mod assembly;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod manufactured;
pub mod mesh;
pub mod postprocess;
pub mod quadrature;
pub mod scalar;
pub mod solver;
pub mod spaces;
pub mod sparse;

pub use error::{Error, Result};
pub use scalar::{Real, Vec2};

pub type Mesh = mesh::BackgroundMesh<f64>;
pub type Domain = geometry::LevelSetDomain<f64>;
pub type Cut = geometry::CutMesh<f64>;
pub type Disc = spaces::Discretization<f64>;
pub type Params = assembly::Params<f64>;
pub type System = assembly::LinearSystem<f64>;
pub type Matrix = sparse::CsrMatrix<f64>;
pub type Solution = spaces::FieldCoefficients<f64>;
pub type Errors = postprocess::ErrorReport<f64>;
pub type Manufactured = manufactured::ManufacturedSolution<f64>;
