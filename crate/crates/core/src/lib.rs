//! Exact arithmetic for generalized Fishburn numbers: coefficients of the
//! Kontsevich-Zagier series and its torus-knot companions expanded around
//! roots of unity, together with the residue sets, coefficient formulas, and
//! congruence checks that govern them.
//!
//! Everything is exact: cyclotomic numbers are rational coordinate vectors
//! over a power basis, series are dense coefficient windows with explicit
//! precision, and every theorem-shaped statement is a checkable function
//! rather than a trusted fact.

pub mod arith;
pub mod error;
pub mod exactnum;
mod poly;
pub mod qseries;
pub mod strange;
pub mod verify;

pub use error::{Error, Result};
pub use exactnum::{cyc_divisible, CycNum};
pub use qseries::{base_substitution, dissect, QSeries};
pub use strange::{f_partial, ft_partial, torus_constants, xi_series, Family, StrangeSpec, XiTable};
