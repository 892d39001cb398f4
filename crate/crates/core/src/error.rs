use thiserror::Error;

use crate::index::{Box3, Component};

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Everything the solver refuses to do.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid split {split:?} for a {cells:?} cell grid")]
    InvalidSplit { split: [usize; 3], cells: [usize; 3] },

    #[error("cannot parse split `{0}` (expected SXxSYxSZ or `auto`)")]
    SplitSyntax(String),

    #[error("time step {dt:e} s exceeds the stability limit {limit:e} s")]
    Unstable { dt: f64, limit: f64 },

    #[error("{component:?} range {range:?} is outside the array extents {extent:?}")]
    OutOfBounds {
        component: Component,
        range: Box3,
        extent: [usize; 3],
    },

    #[error("field extents {found:?} do not match the expected {expected:?}")]
    ExtentMismatch { expected: [usize; 3], found: [usize; 3] },

    #[error("invalid source: {0}")]
    InvalidSource(String),

    #[error("invalid probe: {0}")]
    InvalidProbe(String),

    #[error("invalid machine model: {0}")]
    InvalidMachine(String),

    #[error("invalid execution config: {0}")]
    InvalidConfig(String),

    #[error("plan violates the update dependencies: {0}")]
    PlanViolation(String),
}
