use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("surface calibration did not converge (residual {residual:.3e})")]
    Calibration { residual: f64 },
    #[error("no steady-state pitch in [0, 45] deg at v = {v} m/s")]
    NoPitchRoot { v: f64 },
    #[error("non-finite function value when perturbing coordinate {coordinate}")]
    NonFinite { coordinate: usize },
    #[error("submodel {index} is not controllable")]
    Uncontrollable { index: usize },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("block {block} is not symmetric")]
    NotSymmetric { block: usize },
    #[error("non-finite matrix entry")]
    NonFiniteMatrix,
    #[error("LMI set for {spec} is {status}; first violated family: {family}")]
    Infeasible { status: String, family: String, spec: String },
    #[error("active pair set is empty")]
    EmptyPairs,
    #[error("gain schedules are defined on different grids")]
    GridMismatch,
    #[error("closed loop of vertex {0} is not Hurwitz")]
    UnstableVertex(usize),
    #[error("simulation state became non-finite at t = {t} s")]
    NonFiniteState { t: f64 },
}
