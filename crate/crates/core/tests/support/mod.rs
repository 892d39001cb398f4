#![allow(dead_code)]

pub mod naive;

use yeecache::{
    parallel_run, stable_dt, Coefficients, Component, Dims, ExecConfig, FieldSet, GridSpec, ProbeRecord, ProbeSpec,
    Real, Scenario, SourceSpec, TileLayout, Variant, Waveform, VACUUM_LIGHT_SPEED,
};

/// Cavity of `dims` cells, uniform 1 mm spacing or a mildly graded mesh.
pub fn grid(dims: Dims, graded: bool) -> GridSpec {
    let axis = |n: usize, seed: usize| -> Vec<f64> {
        (0..n)
            .map(|i| if graded { 1e-3 * (1.0 + 0.25 * (((i * 7 + seed * 3) % 5) as f64) / 4.0) } else { 1e-3 })
            .collect()
    };
    let g = GridSpec::new(axis(dims.nx, 0), axis(dims.ny, 1), axis(dims.nz, 2), 1.0, VACUUM_LIGHT_SPEED).unwrap();
    let dt = stable_dt(&g, 0.99);
    g.with_dt(dt).unwrap()
}

pub fn source(dims: Dims, dt: f64, duration: Option<u64>) -> SourceSpec {
    SourceSpec {
        position: [dims.nx / 3, dims.ny / 2, dims.nz / 2],
        component: Component::Ez,
        waveform: Waveform::DifferentiatedGaussian { amplitude: 1.0 / dt, sigma: 2.0 * dt },
        duration,
    }
}

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

pub struct Outcome<T> {
    pub fields: FieldSet<T>,
    pub records: Vec<ProbeRecord<T>>,
    pub skipped: u64,
    pub gathered: u64,
}

#[allow(clippy::too_many_arguments)]
pub fn run<T: Real>(
    grid: &GridSpec,
    variant: Variant,
    split: [usize; 3],
    workers: usize,
    steps: u64,
    scenario: &Scenario,
    seed: Option<u64>,
) -> Outcome<T> {
    let dims = grid.dims();
    let mut f = FieldSet::<T>::zeros(dims);
    if let Some(s) = seed {
        f.randomize(s);
        f.apply_pec_boundary();
    }
    let co = Coefficients::<T>::new(grid);
    let layout = TileLayout::new(dims, split).unwrap();
    let r = parallel_run(&mut f, &co, variant, &layout, steps, scenario, &ExecConfig::with_workers(workers), None)
        .unwrap();
    Outcome { fields: f, records: r.records, skipped: r.skipped_volume_tasks, gathered: r.gathered_windows }
}

pub fn same_records<T: Real>(a: &[ProbeRecord<T>], b: &[ProbeRecord<T>]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.line() == y.line())
}
