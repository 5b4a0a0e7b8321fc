//! Dynamics of closed relations, time-discretized semiflows and hybrid
//! systems, computed on finite grids of closed boxes.

pub mod cellset;
pub mod chain;
pub mod conley;
pub mod error;
pub mod graph;
pub mod hybrid;
pub mod grid;
pub mod lyapunov;
pub mod morse;
pub mod perturbation;
pub mod relation;
pub mod semiflow;
pub mod systems;
pub mod viability;

pub use cellset::CellSet;
pub use error::{Error, Result};
pub use grid::{Eps, GridSpace, Space};
pub use relation::{compose, Relation};
