//! Command-line configuration.

use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use yeecache::{MachineModel, Precision, SplitSpec, Variant};

use crate::error::{BenchError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    /// Time every (precision, variant, threads) combination.
    Measure,
    /// Cross-check checksums and probe output of every combination.
    Verify,
    /// Print the analytical bounds for the machine model.
    Predict,
    /// Energy drift of the cavity after the source switches off.
    Energy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CaseKind {
    /// PEC cube cavity with a point source and six probes.
    Cube,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PrecisionArg {
    Single,
    Double,
    Both,
}

impl PrecisionArg {
    pub fn list(self) -> Vec<Precision> {
        match self {
            PrecisionArg::Single => vec![Precision::Single],
            PrecisionArg::Double => vec![Precision::Double],
            PrecisionArg::Both => vec![Precision::Single, Precision::Double],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    /// 128³ cells, 300 steps.
    Desk,
    /// 402³ cells, 1300 steps, split 6x16x16.
    Large,
}

#[derive(Debug, Clone, Parser)]
#[command(name = "fdtd-bench", version, about = "Benchmark and verify the Yee FDTD schedulers")]
pub struct BenchConfig {
    #[arg(long, value_enum, default_value = "cube")]
    pub case: CaseKind,
    /// Cells per axis.
    #[arg(long, default_value_t = 128)]
    pub size: usize,
    #[arg(long, default_value_t = 300)]
    pub steps: u64,
    /// `SXxSYxSZ` or `auto`.
    #[arg(long, default_value = "auto")]
    pub split: SplitSpec,
    /// Comma-separated list.
    #[arg(long = "variant", value_delimiter = ',', default_value = "standard,tiled,interleaved,planewise,twostep")]
    pub variants: Vec<Variant>,
    /// Comma-separated list of worker counts.
    #[arg(long, value_delimiter = ',', default_value = "1")]
    pub threads: Vec<usize>,
    #[arg(long, value_enum, default_value = "single")]
    pub precision: PrecisionArg,
    /// TOML machine model; defaults to one core, 2 MB cache, DDR2-800.
    #[arg(long)]
    pub machine: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "measure")]
    pub mode: Mode,
    /// CSV output; a Markdown copy is written next to it.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Steps during which the source injects; defaults to a quarter of the run.
    #[arg(long)]
    pub source_steps: Option<u64>,
    #[arg(long, default_value_t = 20)]
    pub probe_stride: u64,
    /// Skip volume work on tiles that are still exactly zero.
    #[arg(long)]
    pub skip_quiescent: bool,
    /// Pin worker w to CPU w.
    #[arg(long)]
    pub pin: bool,
    /// Start from random fields with this seed instead of zero.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Overrides --size, --steps and --split.
    #[arg(long, value_enum)]
    pub preset: Option<Preset>,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self::parse_from(["fdtd-bench"])
    }
}

impl BenchConfig {
    /// Applies the preset, if any.
    pub fn resolved(mut self) -> Self {
        match self.preset {
            Some(Preset::Desk) => {
                self.size = 128;
                self.steps = 300;
            }
            Some(Preset::Large) => {
                self.size = 402;
                self.steps = 1300;
                self.split = SplitSpec::Fixed([6, 16, 16]);
            }
            None => {}
        }
        self
    }

    pub fn source_duration(&self) -> u64 {
        self.source_steps.unwrap_or((self.steps / 4).max(1))
    }

    pub fn precisions(&self) -> Vec<Precision> {
        self.precision.list()
    }

    pub fn machine_model(&self) -> Result<MachineModel> {
        match &self.machine {
            Some(p) => Ok(MachineModel::load(p)?),
            None => Ok(MachineModel::ddr2_800()),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(BenchError::Config(m));
        if self.steps == 0 {
            return bad("--steps must be at least 1".into());
        }
        if self.size < 4 {
            return bad(format!("--size {} is too small for a source and probes", self.size));
        }
        if self.mode == Mode::Verify && self.size < 8 {
            return bad("verify mode needs --size 8 or more".into());
        }
        if self.mode == Mode::Verify && self.variants.len() + self.threads.len() < 3 {
            return bad("verify mode needs two variants or two thread counts to compare".into());
        }
        if self.mode == Mode::Energy && self.source_duration() >= self.steps {
            return bad("energy mode needs the source to switch off before the last step".into());
        }
        if self.variants.is_empty() || self.threads.is_empty() {
            return bad("empty --variant or --threads list".into());
        }
        if self.threads.contains(&0) {
            return bad("thread counts must be at least 1".into());
        }
        if self.probe_stride == 0 {
            return bad("--probe-stride must be at least 1".into());
        }
        Ok(())
    }
}
