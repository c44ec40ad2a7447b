//! Small dense semidefinite programs: LMI assembly helpers and a primal-dual
//! interior-point solver.

mod eig;
mod ipm;
mod problem;

pub use eig::{eig_margin, EigenExtremes};
pub use ipm::{solve, SolveOptions};
pub use problem::{
    AffineMatrix, BlockMargin, LmiBlock, MatrixVariable, Sense, SdpProblem, SdpSolution, SolveStatus,
};
