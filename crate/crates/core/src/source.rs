//! Point current sources and field probes.

use std::fmt::Write as _;
use std::io;
use std::path::Path;

use crate::error::{Error, Result};
use crate::fields::FieldSet;
use crate::index::{Component, Dims};
use crate::kernels::inject;
use crate::real::Real;

/// Current pulse shape `J(t)`. Both pulses are centred at `t0 = 4σ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Waveform {
    /// `A·(t−t0)/σ·exp(−(t−t0)²/2σ²)`: zero mean, so the source leaves no
    /// static charge behind.
    DifferentiatedGaussian { amplitude: f64, sigma: f64 },
    /// `A·exp(−(t−t0)²/2σ²)`.
    Gaussian { amplitude: f64, sigma: f64 },
}

impl Waveform {
    pub fn amplitude(&self) -> f64 {
        match *self {
            Waveform::DifferentiatedGaussian { amplitude, .. } | Waveform::Gaussian { amplitude, .. } => amplitude,
        }
    }

    pub fn sigma(&self) -> f64 {
        match *self {
            Waveform::DifferentiatedGaussian { sigma, .. } | Waveform::Gaussian { sigma, .. } => sigma,
        }
    }

    pub fn center(&self) -> f64 {
        4.0 * self.sigma()
    }

    pub fn value(&self, t: f64) -> f64 {
        let s = self.sigma();
        let u = (t - self.center()) / s;
        let envelope = (-0.5 * u * u).exp();
        match *self {
            Waveform::DifferentiatedGaussian { amplitude, .. } => amplitude * u * envelope,
            Waveform::Gaussian { amplitude, .. } => amplitude * envelope,
        }
    }
}

/// Soft current source on one electric DoF.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourceSpec {
    pub position: [usize; 3],
    pub component: Component,
    pub waveform: Waveform,
    /// Number of steps during which the source injects; `None` means forever.
    pub duration: Option<u64>,
}

impl SourceSpec {
    /// The DoF must be electric, inside the grid and not on a PEC wall.
    pub fn validate(&self, dims: Dims) -> Result<()> {
        let c = self.component;
        let [i, j, k] = self.position;
        if !c.is_electric() {
            return Err(Error::InvalidSource(format!("{c} is not an electric component")));
        }
        if !c.valid_box(dims).contains(self.position) || c.is_pec(dims, i, j, k) {
            return Err(Error::InvalidSource(format!(
                "{c} at {:?} is not strictly inside a {:?} grid",
                self.position,
                dims.cells()
            )));
        }
        let (a, s) = (self.waveform.amplitude(), self.waveform.sigma());
        if !a.is_finite() || !(s.is_finite() && s > 0.0) {
            return Err(Error::InvalidSource(format!("bad waveform parameters A={a}, sigma={s}")));
        }
        Ok(())
    }

    pub fn injects_at(&self, step: u64) -> bool {
        self.duration.is_none_or(|d| step < d)
    }

    /// Increment `−dt·J(step·dt)` added during step `step`, if the source is
    /// still on.
    pub fn increment<T: Real>(&self, step: u64, dt: f64) -> Option<T> {
        self.injects_at(step)
            .then(|| T::from_f64(-dt * self.waveform.value(step as f64 * dt)))
    }
}

/// Adds the source increment of step `step` to its E DoF.
pub fn inject_current<T: Real>(fields: &mut FieldSet<T>, source: &SourceSpec, step: u64, dt: f64) {
    if let Some(inc) = source.increment::<T>(step, dt) {
        let v = fields.get(source.component, source.position);
        fields.set(source.component, source.position, inject(v, inc));
    }
}

/// Point probe sampled every `stride` completed steps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProbeSpec {
    pub position: [usize; 3],
    pub component: Component,
    pub stride: u64,
}

impl ProbeSpec {
    pub fn validate(&self, dims: Dims) -> Result<()> {
        if self.stride == 0 {
            return Err(Error::InvalidProbe("stride must be at least 1".into()));
        }
        if !self.component.valid_box(dims).contains(self.position) {
            return Err(Error::InvalidProbe(format!(
                "{} at {:?} is outside a {:?} grid",
                self.component,
                self.position,
                dims.cells()
            )));
        }
        Ok(())
    }

    pub fn fires(&self, step: u64) -> bool {
        step.is_multiple_of(self.stride)
    }
}

/// One probe sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeRecord<T> {
    pub step: u64,
    pub time: f64,
    pub probe: usize,
    pub value: T,
}

impl<T: Real> ProbeRecord<T> {
    /// `step<TAB>time<TAB>probe<TAB>value`; `Display` prints the shortest
    /// representation that parses back to the same bits.
    pub fn line(&self) -> String {
        format!("{}\t{}\t{}\t{}", self.step, self.time, self.probe, self.value)
    }
}

/// Values of the probes that fire at `step`, as `(probe index, value)`.
pub fn sample_probes<T: Real>(fields: &FieldSet<T>, probes: &[ProbeSpec], step: u64) -> Vec<(usize, T)> {
    probes
        .iter()
        .enumerate()
        .filter(|(_, p)| p.fires(step))
        .map(|(id, p)| (id, fields.get(p.component, p.position)))
        .collect()
}

pub fn probe_text<T: Real>(records: &[ProbeRecord<T>]) -> String {
    let mut out = String::new();
    for r in records {
        let _ = writeln!(out, "{}", r.line());
    }
    out
}

pub fn write_probe_file<T: Real>(path: &Path, records: &[ProbeRecord<T>]) -> io::Result<()> {
    std::fs::write(path, probe_text(records))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn source(amplitude: f64) -> SourceSpec {
        SourceSpec {
            position: [2, 2, 2],
            component: Component::Ez,
            waveform: Waveform::Gaussian { amplitude, sigma: 1.0 },
            duration: None,
        }
    }

    #[test]
    fn zero_amplitude_changes_nothing() {
        let mut f = FieldSet::<f64>::zeros(Dims::cube(4));
        inject_current(&mut f, &source(0.0), 3, 0.5);
        assert!(f.is_zero());
    }

    #[test]
    fn unit_current_gives_minus_dt() {
        let mut f = FieldSet::<f64>::zeros(Dims::cube(4));
        // Peak at t0 = 4σ = 4 = step 8 with dt = 0.5.
        inject_current(&mut f, &source(1.0), 8, 0.5);
        assert_eq!(f.get(Component::Ez, [2, 2, 2]), -0.5);
    }

    #[test]
    fn gaussian_peak_is_amplitude() {
        let s = source(3.0);
        assert_eq!(s.waveform.value(s.waveform.center()), 3.0);
        assert_eq!(s.increment::<f64>(8, 0.5), Some(-1.5));
    }

    #[test]
    fn differentiated_gaussian_is_odd_about_center() {
        let w = Waveform::DifferentiatedGaussian { amplitude: 2.0, sigma: 0.5 };
        assert_eq!(w.value(w.center()), 0.0);
        assert!((w.value(w.center() + 0.3) + w.value(w.center() - 0.3)).abs() < 1e-12);
    }

    #[test]
    fn duration_switches_off() {
        let mut s = source(1.0);
        s.duration = Some(10);
        assert!(s.injects_at(9));
        assert!(s.increment::<f32>(10, 0.5).is_none());
    }

    #[test]
    fn source_on_wall_is_rejected() {
        let d = Dims::cube(4);
        assert!(source(1.0).validate(d).is_ok());
        let mut s = source(1.0);
        s.position = [0, 2, 2];
        assert!(s.validate(d).is_err());
        s.component = Component::Hz;
        s.position = [2, 2, 2];
        assert!(s.validate(d).is_err());
    }

    #[test]
    fn probe_stride() {
        let f = FieldSet::<f64>::zeros(Dims::cube(4));
        let p = [ProbeSpec { position: [1, 1, 1], component: Component::Hx, stride: 20 }];
        assert!(sample_probes(&f, &p, 7).is_empty());
        assert_eq!(sample_probes(&f, &p, 40), vec![(0, 0.0)]);
    }

    #[test]
    fn probe_sees_injected_value() {
        let mut f = FieldSet::<f32>::zeros(Dims::cube(4));
        let s = source(1.0);
        inject_current(&mut f, &s, 8, 0.5);
        let p = [ProbeSpec { position: s.position, component: s.component, stride: 1 }];
        assert_eq!(sample_probes(&f, &p, 8), vec![(0, -0.5f32)]);
    }

    #[test]
    fn record_line_round_trips() {
        let r = ProbeRecord { step: 20, time: 1.0e-12 / 3.0, probe: 4, value: 0.1f64 + 0.2 };
        let line = r.line();
        let fields: Vec<&str> = line.split('\t').collect();
        assert_eq!(fields[0], "20");
        assert_eq!(fields[3].parse::<f64>().unwrap().to_bits(), r.value.to_bits());
        assert_eq!(fields[1].parse::<f64>().unwrap().to_bits(), r.time.to_bits());
    }

    #[test]
    fn zero_stride_rejected() {
        let p = ProbeSpec { position: [1, 1, 1], component: Component::Hx, stride: 0 };
        assert!(p.validate(Dims::cube(4)).is_err());
    }
}
