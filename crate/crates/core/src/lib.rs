//! Exact p-adic arithmetic over the rationals, ultrametric gauges on the
//! matrix, unipotent, Heisenberg and affine groups over `Q_p`, the tree of
//! cells, and finite-quotient checkers for all of them.

pub mod affine;
pub mod cells;
pub mod cli;
pub mod error;
pub mod finite;
pub mod gauge;
pub mod heisenberg;
pub mod matrix;
pub mod padic;
pub mod sample;
pub mod triangular;
pub mod value;
pub mod verify;

pub use error::{Error, Result};
pub use padic::{PNorm, PRational, Prime, Valuation};
pub use value::Value;
