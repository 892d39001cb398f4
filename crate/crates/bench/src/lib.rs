//! Benchmark harness for the `yeecache` schedulers: builds the cube cavity,
//! times every (precision, variant, threads) combination, cross-checks
//! results bit for bit, tracks energy drift and prints the model bounds.

pub mod case;
pub mod config;
pub mod error;
pub mod run;
pub mod table;

pub use case::{checksum, cube_case, Case};
pub use config::{BenchConfig, Mode, PrecisionArg, Preset};
pub use error::{BenchError, Result};
pub use run::{
    energy_report, predict, run_bench, run_case, verify_equivalence, verify_with_corruption, BenchRecord, EnergyReport,
    PairResult, Prediction, VerifyReport,
};
pub use table::{emit_tables, to_csv, to_markdown};
