//! Geometric measure of multiparticle entanglement for GHZ-symmetric qubit states.
//!
//! The crate evaluates `E_G^(k)` in closed or one-dimensional form ([`measure`]) and
//! ships brute-force oracles ([`oracle`]) that check those formulas: see-saw
//! searches for the closest k-separable pure state and random convex-roof
//! decompositions. [`decomposition`] builds the optimal ensemble on the lower
//! cathetus of the three-qubit triangle.

pub mod decomposition;
pub mod error;
pub mod ghz;
pub mod measure;
pub mod oracle;
pub mod quantum;
pub mod sampling;
pub mod scalar;

pub use error::{Error, Result};
pub use ghz::{GhzParams, SeparabilityClass};
pub use measure::{eval_measure, LegendrePoint, MeasureResult, Method, Optimizer};
pub use quantum::{Decomposition, DensityMatrix, PureState};
