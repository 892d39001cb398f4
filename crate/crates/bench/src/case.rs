//! The cube cavity test case.

use sha2::{Digest, Sha256};
use yeecache::{Component, Dims, FieldSet, GridSpec, ProbeSpec, Real, Scenario, SourceSpec, Waveform};

use crate::error::Result;

/// Cell size of the cavity, metres.
pub const CELL: f64 = 1e-3;

#[derive(Debug, Clone)]
pub struct Case {
    pub label: String,
    pub grid: GridSpec,
    pub scenario: Scenario,
    pub steps: u64,
}

/// `n³` PEC cavity. An Ez source at `(n/3, n/2, n/2)` fires a differentiated
/// Gaussian centred in its `source_steps` window, then switches off.
pub fn cube_case(n: usize, steps: u64, source_steps: u64, probe_stride: u64, skip_quiescent: bool) -> Result<Case> {
    let grid = GridSpec::cube(n, CELL)?;
    let dims = grid.dims();
    let dt = grid.dt();
    let source = SourceSpec {
        position: [n / 3, n / 2, n / 2],
        component: Component::Ez,
        waveform: Waveform::DifferentiatedGaussian {
            amplitude: 1.0 / dt,
            sigma: (source_steps.max(1) as f64) * dt / 8.0,
        },
        duration: Some(source_steps),
    };
    let scenario = Scenario { sources: vec![source], probes: probes(dims, probe_stride), skip_quiescent };
    scenario.validate(dims)?;
    Ok(Case { label: format!("cube{n}"), grid, scenario, steps })
}

/// Six probes at fixed fractions of the box, one per component.
pub fn probes(dims: Dims, stride: u64) -> Vec<ProbeSpec> {
    let at = |f: [f64; 3], c: Component| {
        let e = c.extent(dims);
        ProbeSpec {
            position: std::array::from_fn(|a| ((f[a] * dims.cells()[a] as f64) as usize).min(e[a] - 1)),
            component: c,
            stride,
        }
    };
    vec![
        at([0.25, 0.25, 0.25], Component::Ex),
        at([0.75, 0.25, 0.25], Component::Ey),
        at([0.25, 0.75, 0.25], Component::Ez),
        at([0.25, 0.25, 0.75], Component::Hx),
        at([0.5, 0.5, 0.5], Component::Hy),
        at([0.75, 0.75, 0.75], Component::Hz),
    ]
}

/// SHA-256 of the six arrays in canonical order, little endian, hex encoded.
pub fn checksum<T: Real>(fields: &FieldSet<T>) -> String {
    hex::encode(Sha256::digest(fields.to_le_bytes()))
}
