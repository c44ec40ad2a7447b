//! Takagi-Sugeno submodel family: operating-point grid, Jacobian linearization
//! and triangular membership functions over the filtered wind speed.

mod grid;
mod jacobian;
mod submodel;

pub use grid::{build_grid, MembershipGrid, OperatingPoint};
pub use jacobian::jacobian;
pub use submodel::{build_submodels, ModelKind, PerUnitModel, TsSubmodel};
pub(crate) use submodel::ensure_controllable;
