mod support;

use yeecache::{run_simulation, Coefficients, Dims, FieldSet, Scenario, TileLayout, Variant};

/// Max relative drift of the leapfrog invariant over `steps`, sampled every step.
fn drift(dims: Dims, graded: bool, variant: Variant, split: [usize; 3], steps: u64) -> f64 {
    let g = support::grid(dims, graded);
    let co = Coefficients::<f64>::new(&g);
    let mut f = FieldSet::<f64>::zeros(dims);
    f.randomize(5);
    f.apply_pec_boundary();
    let layout = TileLayout::new(dims, split).unwrap();
    let mut prev = f.snapshot_h();
    let mut energies = Vec::new();
    for _ in 0..steps {
        run_simulation(&mut f, &co, variant, &layout, 1, &Scenario::default(), None).unwrap();
        energies.push(f.total_energy(&prev, &g).unwrap());
        prev = f.snapshot_h();
    }
    let e0 = energies[0];
    energies.iter().map(|e| ((e - e0) / e0).abs()).fold(0.0, f64::max)
}

#[test]
fn energy_is_conserved_in_a_pec_cavity() {
    let d = drift(Dims::cube(12), false, Variant::Standard, [1, 1, 1], 100);
    assert!(d < 1e-12, "drift {d:e}");
}

#[test]
fn energy_is_conserved_on_a_graded_mesh() {
    let d = drift(Dims::new(10, 13, 9), true, Variant::Interleaved, [2, 2, 2], 100);
    assert!(d < 1e-12, "drift {d:e}");
}

#[test]
fn energy_of_a_pulse_after_switch_off() {
    let dims = Dims::cube(32);
    let g = support::grid(dims, false);
    let co = Coefficients::<f64>::new(&g);
    let scenario = Scenario { sources: vec![support::source(dims, g.dt(), Some(30))], ..Scenario::default() };
    let layout = TileLayout::new(dims, [1, 1, 1]).unwrap();
    let mut f = FieldSet::<f64>::zeros(dims);
    run_simulation(&mut f, &co, Variant::Standard, &layout, 30, &scenario, None).unwrap();
    let mut prev = f.snapshot_h();
    let mut e = Vec::new();
    for _ in 0..200 {
        run_simulation(&mut f, &co, Variant::Standard, &layout, 1, &scenario, None).unwrap();
        e.push(f.total_energy(&prev, &g).unwrap());
        prev = f.snapshot_h();
    }
    assert!(e[0] > 0.0);
    let d = e.iter().map(|x| ((x - e[0]) / e[0]).abs()).fold(0.0, f64::max);
    assert!(d < 1e-12, "drift {d:e}");
}

#[test]
fn unstable_time_step_is_refused() {
    let dims = Dims::cube(6);
    let g = support::grid(dims, false);
    let g = g.clone().with_dt(g.dt() * 1.02).unwrap();
    let co = Coefficients::<f64>::new(&g);
    let mut f = FieldSet::<f64>::zeros(dims);
    let layout = TileLayout::new(dims, [1, 1, 1]).unwrap();
    let r = run_simulation(&mut f, &co, Variant::Standard, &layout, 1, &Scenario::default(), None);
    assert!(matches!(r, Err(yeecache::Error::Unstable { .. })));
}
