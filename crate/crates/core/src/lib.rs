//! Lower bounds for the `L^p` operator norms of centered maximal operators
//! associated to finite radial measures on `ℝⁿ`.
//!
//! Measures are handled in log space throughout ([`LogNonNegative`]), so the
//! same code runs in dimension 2 and dimension 10⁶. The modules build on each
//! other in this order:
//!
//! - [`radial_measure`]: densities, sphere areas, centered balls and annuli.
//! - [`geometry`]: off-center balls, caps, cones and the angle `β₀`.
//! - [`optimize`]: bisection, golden section and the critical-exponent searches.
//! - [`bounds`]: `T_{μ,p}(R, r)` and the explicit constructions.
//! - [`oracle`]: brute-force maximal functions and Monte Carlo checks in low dimension.

pub mod bounds;
pub mod error;
pub mod geometry;
pub mod logspace;
pub mod optimize;
pub mod oracle;
pub mod quadrature;
pub mod radial_measure;
pub mod special;

pub use bounds::{BoundReport, ExactPolicy, MassConcentration, RemarkReport, UnitBallCase};
pub use error::{Error, Result};
pub use geometry::{Angle, CapCut, GeometrySpec};
pub use logspace::LogNonNegative;
pub use optimize::{Exponent, SupremumResult};
pub use oracle::{RadialProfile, TestFunctionSpec};
pub use radial_measure::{DensityKind, Dimension, RadialDensity, TabulatedDensity};
