//! Pyramid-slice distances between finite extended metric spaces.
//!
//! The core math is generic over the floating point [`Scalar`]; the
//! aliases at the crate root fix it to `f64`.

pub mod error;
pub mod experiments;
pub mod ext;
pub mod gh;
pub mod grid;
pub mod interval;
pub mod io;
pub mod lipschitz;
pub mod metric;
pub mod oracle;
pub mod order;
pub mod pointed;
pub mod pyramid;
pub mod scalar;
mod search;
pub mod verify;
pub mod zoo;

pub use error::{Error, Result, Violation};
pub use ext::ExtReal;
pub use interval::Interval;
pub use metric::{validate, FiniteSpace, PointedSpace};
pub use gh::{gh_bounds, gh_exact, gh_pointed, GhResult};
pub use order::{equivalent, precsim, widening_defect};
pub use pointed::{rho0, rho_pointed, QuadratureScheme};
pub use pyramid::{rho, rho_n, slice_net, PointedHandle, PyramidHandle, RhoEstimate, RhoParams};
pub use scalar::Scalar;

pub type Space = FiniteSpace<f64>;
pub type Pointed = PointedSpace<f64>;
pub type Ext = ExtReal<f64>;
pub type Iv = Interval<f64>;
