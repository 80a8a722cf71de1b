//! Numerical stability criteria for line bundles on smooth toric varieties
//! and the Landau-Ginzburg periods mirror to them: dHYM Nakai-Moishezon
//! positivity, Bridgeland stability on toric surfaces, minimal angles and
//! Gamma-class period identities.

// Index loops read better in the elimination code; !(x > 0.0) also rejects NaN.
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod bridgeland;
pub mod charges;
pub mod chow;
pub mod error;
pub mod exact;
pub mod fan;
pub mod lg;
pub mod minangle;
pub mod par;

pub use chow::{CohClass, DivisorClass};
pub use error::{Error, Result};
pub use exact::{Surd, SurdComplex, Q};
pub use fan::{preset_fan, Fan, Stratum};
