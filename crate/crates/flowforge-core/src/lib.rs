//! Symbolic side of the flowforge toolkit: multi-index coordinates, the
//! Polchinski flow hierarchy, counterterm catalog and cumulant relevance.

pub mod cumulant;
pub mod error;
pub mod exec;
pub mod flowgen;
pub mod multiindex;
pub mod params;
pub mod renorm;

pub use error::{Error, Result};
pub use exec::Exec;
pub use params::{derive_params, fmt_rational, parse_rational, ModelParams, Rational};
