//! Limiting densities of Fibonacci residues modulo prime powers.
//!
//! * [`modfib`]: Fibonacci and Lucas numbers modulo m, periods, ε.
//! * [`padic`]: fixed-precision arithmetic in Z_p and Z_p[φ], with log, exp,
//!   Teichmüller lifts and the interpolating functions F_i.
//! * [`density`]: Lucas zeros, the Wall exponent and the exact density.
//! * [`tree`]: the attained residues modulo p^λ, by enumeration and by the
//!   branching rule, plus DOT/JSON export.
//! * [`scan`]: checkpointed scans over prime ranges.

pub mod density;
pub mod error;
pub mod fraction;
pub mod modfib;
pub mod padic;
pub mod scan;
pub mod tree;

pub use error::{Error, Result};
