//! Equivariant characteristic forms, their transgressions, and the equivariant
//! eta invariant of four-dimensional SKR metrics.

pub mod app;
pub mod charforms;
pub mod error;
pub mod exterior;
pub mod germ;
pub mod matforms;
pub mod oracle;
pub mod par;
pub mod quadrature;
pub mod skr;

pub use error::{Error, Result};
pub use exterior::{linear_combine, ExteriorForm, MultiIndex};
pub use germ::AnalyticGerm;
pub use matforms::{FormMatrix, Truncated};
pub use quadrature::QuadratureSpec;
