//! Steady-state Fokker-Planck solver for confinement vector fields on a disk.
//!
//! The drift fields handled here blow up like the inverse boundary distance,
//! so no boundary condition is imposed anywhere: well-posedness comes from
//! prescribing the mean value of the solution. The crate provides
//!
//! - concentric-ring disk meshes and quadrature ([`geometry`]),
//! - confinement potentials, their Maxwellians and admissibility
//!   auditors ([`potential`]),
//! - P1 finite-element assembly of the Maxwellian-weighted forms and the
//!   constrained (saddle-point or penalized) solver ([`fem`]),
//! - solve orchestration, manufactured solutions and convergence
//!   studies ([`solver`]),
//! - numerical verification of the weighted Hardy/Poincaré inequalities and
//!   of the operator kernel ([`analysis`]),
//! - an independent Euler-Maruyama Monte Carlo oracle for the FENE
//!   application ([`sde`]).

pub mod analysis;
pub mod error;
pub mod fem;
pub mod geometry;
pub mod potential;
pub mod sde;
pub mod solver;
pub mod sparse;

pub use error::{Error, Result};
pub use fem::{assemble, solve_constrained, AssembledSystem, ConstrainedSolve, LoadSpec, Method};
pub use geometry::{build_disk_mesh, distance_to_boundary, integrate, QuadratureRule, TriMesh};
pub use potential::{
    check_hypotheses, ConfinementModel, DriftKind, HypothesisReport, PotentialKind,
};
pub use sde::{Histogram2D, SdeConfig};
pub use solver::{solve_fokker_planck, Solution};
pub use sparse::SparseMatrix;
