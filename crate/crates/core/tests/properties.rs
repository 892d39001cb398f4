mod support;

use proptest::prelude::*;
use yeecache::{Component, Dims, FieldSet, Scenario, Variant, Waveform};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    /// Doubling initial fields and source amplitude doubles every output bit for bit.
    #[test]
    fn doubling_inputs_doubles_outputs(seed in 0u64..1000, vi in 0usize..5, n in 6usize..12) {
        let dims = Dims::cube(n);
        let g = support::grid(dims, false);
        let v = Variant::ALL[vi];
        let src = support::source(dims, g.dt(), Some(4));
        let mut twice = src;
        twice.waveform = match src.waveform {
            Waveform::DifferentiatedGaussian { amplitude, sigma } => Waveform::DifferentiatedGaussian { amplitude: 2.0 * amplitude, sigma },
            w => w,
        };
        let probes = support::probes(dims, 2);
        let base = Scenario { sources: vec![src], probes: probes.clone(), skip_quiescent: false };
        let scaled = Scenario { sources: vec![twice], probes, skip_quiescent: false };

        let a = support::run::<f64>(&g, v, [2, 2, 1], 1, 7, &base, Some(seed));
        let mut init = FieldSet::<f64>::zeros(dims);
        init.randomize(seed);
        init.apply_pec_boundary();
        for c in Component::ALL {
            for x in init.component_mut(c) {
                *x *= 2.0;
            }
        }
        let co = yeecache::Coefficients::<f64>::new(&g);
        let layout = yeecache::TileLayout::new(dims, [2, 2, 1]).unwrap();
        let r = yeecache::run_simulation(&mut init, &co, v, &layout, 7, &scaled, None).unwrap();
        for c in Component::ALL {
            for (x, y) in a.fields.component(c).iter().zip(init.component(c)) {
                prop_assert_eq!((2.0 * x).to_bits(), y.to_bits());
            }
        }
        for (x, y) in a.records.iter().zip(&r.records) {
            prop_assert_eq!((2.0 * x.value).to_bits(), y.value.to_bits());
        }
    }
}
