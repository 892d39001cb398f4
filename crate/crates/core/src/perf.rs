//! Analytical throughput bounds in million cells per second (MC/s).
//!
//! Units: bandwidths are decimal (1 MB/s = 10⁶ B/s), cache sizes are binary
//! bytes (2 MB of cache = 2·1024² B). Mixing them is deliberate and matches
//! how the hardware is usually quoted; the helpers below never convert one
//! into the other.
//!
//! One cell update touches six field values and costs 36 flops: each field
//! update is two differences, two products and two sums.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::schedulers::Variant;

/// Flops per field update.
pub const FLOPS_PER_FIELD: u32 = 6;
/// Fields per cell.
pub const FIELDS_PER_CELL: u32 = 6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MachineModel {
    /// Sustained memory bandwidth, MB/s (decimal).
    pub mem_bandwidth_mbps: f64,
    /// Cache available to the cores below, bytes.
    pub cache_bytes: u64,
    pub mflops_per_core: f64,
    pub cores: u32,
    /// 4 (single) or 8 (double).
    pub precision_bytes: u32,
}

impl MachineModel {
    /// One core with a 2 MB cache and DDR2-800 memory (6400 MB/s, 12800 MFlops).
    pub fn ddr2_800() -> Self {
        Self { mem_bandwidth_mbps: 6400.0, cache_bytes: 2 << 20, mflops_per_core: 12800.0, cores: 1, precision_bytes: 4 }
    }

    /// 2.4 GHz quad core, two 4 MB caches, DDR2-1066 (6400·1066/800 MB/s).
    pub fn quad_core_ddr2_1066() -> Self {
        Self {
            mem_bandwidth_mbps: 6400.0 * 1066.0 / 800.0,
            cache_bytes: 8 << 20,
            mflops_per_core: 2400.0,
            cores: 4,
            precision_bytes: 4,
        }
    }

    pub fn with_precision(mut self, bytes: u32) -> Self {
        self.precision_bytes = bytes;
        self
    }

    pub fn with_cores(mut self, cores: u32) -> Self {
        self.cores = cores;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidMachine(what.to_string()));
        if !(self.mem_bandwidth_mbps.is_finite() && self.mem_bandwidth_mbps > 0.0) {
            return bad("mem_bandwidth_mbps must be positive");
        }
        if !(self.mflops_per_core.is_finite() && self.mflops_per_core > 0.0) {
            return bad("mflops_per_core must be positive");
        }
        if self.cache_bytes == 0 {
            return bad("cache_bytes must be positive");
        }
        if self.cores == 0 {
            return bad("cores must be positive");
        }
        if self.precision_bytes != 4 && self.precision_bytes != 8 {
            return bad("precision_bytes must be 4 or 8");
        }
        Ok(())
    }

    pub fn from_toml_str(s: &str) -> Result<Self> {
        let m: Self = toml::from_str(s).map_err(|e| Error::InvalidMachine(e.to_string()))?;
        m.validate()?;
        Ok(m)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidMachine(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("plain struct serialises")
    }
}

/// Memory traffic and cache footprint of one variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VariantCost {
    /// Main memory accesses per field update.
    pub accesses_per_field: u32,
    /// Plane arrays that must stay in cache, for the plane-based variants.
    pub working_set_fields_per_plane: Option<u32>,
    pub flops_per_field: u32,
}

impl VariantCost {
    pub fn of(variant: Variant) -> Self {
        let (accesses, planes) = match variant {
            Variant::Standard => (6, None),
            Variant::Tiled => (3, None),
            Variant::Interleaved => (2, None),
            // Three planes of the four arrays touched per sweep step.
            Variant::Planewise => (2, Some(12)),
            // Three planes of all six fields.
            Variant::TwoStep => (1, Some(18)),
        };
        Self { accesses_per_field: accesses, working_set_fields_per_plane: planes, flops_per_field: FLOPS_PER_FIELD }
    }
}

/// Bytes moved per cell update divided into the memory bandwidth.
pub fn bandwidth_bound_mcs(m: &MachineModel, variant: Variant) -> f64 {
    let acc = VariantCost::of(variant).accesses_per_field;
    m.mem_bandwidth_mbps / (m.precision_bytes * FIELDS_PER_CELL * acc) as f64
}

/// All cores at full speed, 36 flops per cell; half that when the
/// add-then-multiply pattern cannot use fused multiply-add units.
pub fn compute_bound_mcs(m: &MachineModel, fused_multiply_add_usable: bool) -> f64 {
    let full = m.cores as f64 * m.mflops_per_core / (FIELDS_PER_CELL * FLOPS_PER_FIELD) as f64;
    if fused_multiply_add_usable {
        full
    } else {
        full / 2.0
    }
}

fn floor_root(x: f64, root: u32) -> u64 {
    let mut n = x.powf(1.0 / root as f64).floor() as u64;
    // powf may land a hair off an exact power; settle on the integer answer.
    while ((n + 1) as f64).powi(root as i32) <= x {
        n += 1;
    }
    while n > 0 && (n as f64).powi(root as i32) > x {
        n -= 1;
    }
    n
}

/// Largest tile side whose working set fits in the cache of one core.
///
/// Volumetric variants keep the six arrays of a cube; plane-based ones keep
/// a few planes of a square cross-section.
pub fn cache_fit_side(m: &MachineModel, variant: Variant) -> u64 {
    let per_core = m.cache_bytes as f64 / m.cores as f64;
    let p = m.precision_bytes as f64;
    match VariantCost::of(variant).working_set_fields_per_plane {
        None => floor_root(per_core / (p * FIELDS_PER_CELL as f64), 3),
        Some(planes) => floor_root(per_core / (p * planes as f64), 2),
    }
}

/// Compute bound if a tile of `problem_cells` fits in cache, otherwise the
/// smaller of the two bounds.
pub fn predicted_mcs(m: &MachineModel, variant: Variant, problem_cells: u64) -> f64 {
    let compute = compute_bound_mcs(m, true);
    let side = cache_fit_side(m, variant);
    if problem_cells <= side.saturating_pow(3) {
        compute
    } else {
        compute.min(bandwidth_bound_mcs(m, variant))
    }
}

/// Milliseconds per time step at `mcs`.
pub fn step_time_ms(cells: u64, mcs: f64) -> f64 {
    cells as f64 / mcs * 1e-3
}

/// Bandwidth the standard variant would need to reach `measured_mcs`, GB/s
/// (decimal).
pub fn apparent_bandwidth_gbs(measured_mcs: f64, m: &MachineModel) -> f64 {
    let standard = VariantCost::of(Variant::Standard).accesses_per_field;
    measured_mcs * (m.precision_bytes * FIELDS_PER_CELL * standard) as f64 / 1000.0
}

/// Ratio form: `measured / reference · reference bandwidth`, reported in
/// binary GB/s (MB/s divided by 1024).
pub fn apparent_bandwidth_ratio_gbs(measured_mcs: f64, reference_mcs: f64, reference_bandwidth_mbps: f64) -> f64 {
    measured_mcs / reference_mcs * reference_bandwidth_mbps / 1024.0
}
