//! Cache-reusing 3D Yee FDTD solver.
//!
//! The crate stores the six staggered field components of a Cartesian Yee
//! mesh in global contiguous arrays and offers five update schedulers that
//! differ only in the order in which degrees of freedom are visited:
//!
//! * [`Variant::Standard`]: one triple loop per component over the whole domain.
//! * [`Variant::Tiled`]: the domain is split into box tiles, volumes first, interfaces after.
//! * [`Variant::Interleaved`]: Ampere and Faraday solved in a row inside each tile.
//! * [`Variant::Planewise`]: the interleaved tile update pipelined plane by plane along z.
//! * [`Variant::TwoStep`]: two time steps gathered per tile sweep (temporal blocking).
//!
//! All per-DoF arithmetic lives in [`kernels`]; every scheduler only decides
//! *where* and *when* the kernels run, so all variants produce bitwise
//! identical fields and probe records.
//!
//! [`perf`] holds the analytical bandwidth/compute model used to reason about
//! the expected speedups.

pub mod error;
pub mod fields;
pub mod grid;
pub mod index;
pub mod kernels;
pub mod parallel;
pub mod perf;
pub mod real;
pub mod schedulers;
pub mod source;
pub mod tiling;
pub mod validate;

pub use error::{Error, Result};
pub use fields::{FieldSet, MagneticSnapshot};
pub use grid::{stable_dt, Coefficients, GridSpec, Precision, VACUUM_LIGHT_SPEED};
pub use index::{Box3, Component, Dims};
pub use parallel::{assign_tiles, parallel_run, Assignment, Distribution, ExecConfig};
pub use perf::{MachineModel, VariantCost};
pub use real::Real;
pub use schedulers::{run_simulation, Plan, RunReport, Scenario, Variant};
pub use source::{ProbeRecord, ProbeSpec, SourceSpec, Waveform};
pub use tiling::{auto_split, make_layout, SplitSpec, Sweep, Tile, TileLayout};
