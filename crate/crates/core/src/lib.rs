//! Point-charge simulation of quantum-dot cellular automata (QCA) layouts.
//!
//! Cells hold two electrons on one diagonal of a square of four dots; the two
//! diagonals encode logic 1 (`+1`) and logic 0 (`-1`). Electrons of different
//! cells interact through `E = A / r`. On top of that model the crate offers
//! per-output energy breakdowns, exact and relaxation ground-state solvers,
//! truth-table verification, layout metrics and a line-oriented file format.
//!
//! ```
//! use qca_core::designs::{build, DesignId};
//! use qca_core::solver::{truth_table, SolverConfig};
//!
//! let mv3 = build(DesignId::Mv3);
//! let table = truth_table(&mv3, &SolverConfig::default()).unwrap();
//! assert!(table.realizes("Y", |i| (i[0] as u8 + i[1] as u8 + i[2] as u8) >= 2));
//! ```

pub mod cli;
pub mod designs;
pub mod electrostatics;
pub mod format;
pub mod geometry;
pub mod layout;
pub mod metrics;
pub mod solver;

pub use geometry::{GeometryConfig, Point, Polarization};
pub use layout::{Cell, Layout};
