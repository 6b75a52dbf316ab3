//! Numerical phase-space calculus for operators on `L²(R)`.
//!
//! Operators are stored as kernel matrices on a periodic position grid and
//! symbols as samples on the matching phase-space grid. On top of the exact
//! discrete Weyl/Wigner pair the crate builds semiclassical translations and
//! convolutions, quantum gradients, fractional Laplacians, Littlewood–Paley
//! blocks and the scaled Schatten, Sobolev and Besov norms, together with a
//! harness that evaluates the corresponding functional inequalities.

pub mod calculus;
pub mod constants;
mod error;
pub mod grid;
pub mod harness;
pub mod linalg;
pub mod norms;
pub mod operator;
pub mod quantization;
mod quadrature;
mod spectral;

pub use calculus::{GradientPair, PhasePoint};
pub use error::{Error, Result};
pub use grid::{PhaseGrid, SymbolField};
pub use norms::{NormParams, OperatorTuple};
pub use operator::KernelOperator;
pub use quantization::CoherentState;

pub use num_complex::Complex64;
