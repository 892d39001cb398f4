//! Measure, verify, energy and predict modes.

use std::fmt;

use yeecache::perf::{
    bandwidth_bound_mcs, cache_fit_side, compute_bound_mcs, predicted_mcs, step_time_ms,
};
use yeecache::{
    parallel_run, Coefficients, Component, ExecConfig, FieldSet, MachineModel, Precision, ProbeRecord, Real,
    RunReport, TileLayout, Variant, VariantCost,
};

use crate::case::{checksum, cube_case, Case};
use crate::config::BenchConfig;
use crate::error::Result;

fn precision_of<T: Real>() -> Precision {
    if T::BYTES == 4 {
        Precision::Single
    } else {
        Precision::Double
    }
}

/// One timed run.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRecord {
    pub case: String,
    /// `SXxSYxSZ`, or `mono` for the standard loop.
    pub split: String,
    pub cores: usize,
    pub precision: Precision,
    pub variant: Variant,
    pub mcs: f64,
    pub total_s: f64,
    pub vol_s: f64,
    pub vol_pct: f64,
    pub checksum: String,
}

pub struct RunOutput<T> {
    pub fields: FieldSet<T>,
    pub report: RunReport<T>,
    pub split: [usize; 3],
}

pub fn build_case(cfg: &BenchConfig) -> Result<Case> {
    cube_case(cfg.size, cfg.steps, cfg.source_duration(), cfg.probe_stride, cfg.skip_quiescent)
}

fn split_for(cfg: &BenchConfig, case: &Case, machine: &MachineModel, precision: Precision, threads: usize) -> [usize; 3] {
    cfg.split.resolve(case.grid.dims(), machine.cache_bytes, precision.bytes(), threads)
}

/// Runs `case` once from zero fields, or from random fields when `seed` is set.
pub fn run_case<T: Real>(
    case: &Case,
    variant: Variant,
    split: [usize; 3],
    threads: usize,
    pin: bool,
    seed: Option<u64>,
) -> Result<RunOutput<T>> {
    let dims = case.grid.dims();
    let mut fields = FieldSet::<T>::zeros(dims);
    if let Some(s) = seed {
        fields.randomize(s);
        fields.apply_pec_boundary();
    }
    let coeffs = Coefficients::<T>::new(&case.grid);
    let layout = TileLayout::new(dims, split)?;
    let mut exec = ExecConfig::with_workers(threads);
    if pin {
        exec.pinning = Some((0..threads).collect());
    }
    let report = parallel_run(&mut fields, &coeffs, variant, &layout, case.steps, &case.scenario, &exec, None)?;
    Ok(RunOutput { fields, report, split })
}

fn record<T: Real>(case: &Case, out: &RunOutput<T>, threads: usize, variant: Variant) -> BenchRecord {
    let cells = case.grid.dims().cell_count() as f64;
    let total = out.report.total_seconds;
    let split = if variant == Variant::Standard {
        "mono".to_string()
    } else {
        let [a, b, c] = out.split;
        format!("{a}x{b}x{c}")
    };
    BenchRecord {
        case: format!("{}x{}", case.label, case.steps),
        split,
        cores: threads,
        precision: precision_of::<T>(),
        variant,
        mcs: cells * case.steps as f64 / total / 1e6,
        total_s: total,
        vol_s: out.report.volume_seconds,
        vol_pct: if total > 0.0 { 100.0 * out.report.volume_seconds / total } else { 0.0 },
        checksum: checksum(&out.fields),
    }
}

/// One record per (precision, variant, threads), run sequentially.
pub fn run_bench(cfg: &BenchConfig) -> Result<Vec<BenchRecord>> {
    cfg.validate()?;
    let machine = cfg.machine_model()?;
    let case = build_case(cfg)?;
    let mut out = Vec::new();
    for p in cfg.precisions() {
        for &v in &cfg.variants {
            for &t in &cfg.threads {
                let split = split_for(cfg, &case, &machine, p, t);
                let r = match p {
                    Precision::Single => record(&case, &run_case::<f32>(&case, v, split, t, cfg.pin, cfg.seed)?, t, v),
                    Precision::Double => record(&case, &run_case::<f64>(&case, v, split, t, cfg.pin, cfg.seed)?, t, v),
                };
                out.push(r);
            }
        }
    }
    Ok(out)
}

/// One comparison against the reference run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairResult {
    pub precision: Precision,
    pub reference: String,
    pub candidate: String,
    pub fields_equal: bool,
    pub probes_equal: bool,
}

impl PairResult {
    pub fn pass(&self) -> bool {
        self.fields_equal && self.probes_equal
    }
}

impl fmt::Display for PairResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {} vs {}", if self.pass() { "PASS" } else { "FAIL" }, self.precision, self.reference, self.candidate)?;
        if !self.fields_equal {
            write!(f, " (final fields differ)")?;
        }
        if !self.probes_equal {
            write!(f, " (probe output differs)")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default)]
pub struct VerifyReport {
    pub pairs: Vec<PairResult>,
}

impl VerifyReport {
    pub fn pass(&self) -> bool {
        self.pairs.iter().all(PairResult::pass)
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.pairs {
            writeln!(f, "{p}")?;
        }
        let failed = self.pairs.iter().filter(|p| !p.pass()).count();
        writeln!(f, "{} pairs, {failed} failed", self.pairs.len())
    }
}

/// Compares every (variant, threads) run with the first one, per precision.
pub fn verify_equivalence(cfg: &BenchConfig) -> Result<VerifyReport> {
    verify_with_corruption(cfg, None)
}

/// As [`verify_equivalence`], but adds one to a field value
/// after every run of `corrupt`. Negative control for the comparison itself.
pub fn verify_with_corruption(cfg: &BenchConfig, corrupt: Option<Variant>) -> Result<VerifyReport> {
    cfg.validate()?;
    let machine = cfg.machine_model()?;
    let case = build_case(cfg)?;
    let mut report = VerifyReport::default();
    for p in cfg.precisions() {
        match p {
            Precision::Single => verify_precision::<f32>(cfg, &case, &machine, corrupt, &mut report)?,
            Precision::Double => verify_precision::<f64>(cfg, &case, &machine, corrupt, &mut report)?,
        }
    }
    Ok(report)
}

fn verify_precision<T: Real>(
    cfg: &BenchConfig,
    case: &Case,
    machine: &MachineModel,
    corrupt: Option<Variant>,
    report: &mut VerifyReport,
) -> Result<()> {
    let precision = precision_of::<T>();
    let mut reference: Option<(String, String, Vec<ProbeRecord<T>>)> = None;
    for &v in &cfg.variants {
        for &t in &cfg.threads {
            let split = split_for(cfg, case, machine, precision, t);
            let mut out = run_case::<T>(case, v, split, t, cfg.pin, cfg.seed)?;
            if corrupt == Some(v) {
                let d = case.grid.dims();
                let at = [d.nx / 2, d.ny / 2, d.nz / 2];
                let x = out.fields.get(Component::Ez, at);
                out.fields.set(Component::Ez, at, T::from_f64(x.to_f64() + 1.0));
            }
            let [a, b, c] = split;
            let label = format!("{v}/{a}x{b}x{c}/{t}t");
            let sum = checksum(&out.fields);
            match &reference {
                None => reference = Some((label, sum, out.report.records)),
                Some((rl, rs, rr)) => report.pairs.push(PairResult {
                    precision,
                    reference: rl.clone(),
                    candidate: label,
                    fields_equal: *rs == sum,
                    probes_equal: yeecache::source::probe_text(rr) == yeecache::source::probe_text(&out.report.records),
                }),
            }
        }
    }
    Ok(())
}

/// Energy drift after the source switches off.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyReport {
    pub precision: Precision,
    pub switch_off: u64,
    pub steps: u64,
    /// Invariant at the first step after switch-off.
    pub reference: f64,
    /// Largest `|E(n) − E_ref| / |E_ref|` seen afterwards.
    pub max_drift: f64,
}

impl fmt::Display for EnergyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: source off after step {}, {} steps, energy {:.6e}, max relative drift {:.3e}",
            self.precision, self.switch_off, self.steps, self.reference, self.max_drift
        )
    }
}

pub fn energy_report(cfg: &BenchConfig) -> Result<Vec<EnergyReport>> {
    cfg.validate()?;
    let case = build_case(cfg)?;
    let mut out = Vec::new();
    for p in cfg.precisions() {
        out.push(match p {
            Precision::Single => energy_of::<f32>(&case, cfg.source_duration())?,
            Precision::Double => energy_of::<f64>(&case, cfg.source_duration())?,
        });
    }
    Ok(out)
}

/// Runs the standard loop and tracks the discrete invariant every step.
pub fn energy_of<T: Real>(case: &Case, switch_off: u64) -> Result<EnergyReport> {
    let dims = case.grid.dims();
    let mut fields = FieldSet::<T>::zeros(dims);
    let coeffs = Coefficients::<T>::new(&case.grid);
    let layout = TileLayout::new(dims, [1, 1, 1])?;
    let mut prev = fields.snapshot_h();
    let mut reference: Option<f64> = None;
    let mut max_drift = 0.0f64;
    let mut err = None;
    let mut hook = |done: u64, f: &FieldSet<T>| {
        // `f` holds E at `done` and H at `done + 1/2`; `prev` holds H at `done − 1/2`.
        if done > switch_off && err.is_none() {
            match f.total_energy(&prev, &case.grid) {
                Ok(e) => match reference {
                    None => reference = Some(e),
                    Some(r) if r != 0.0 => max_drift = max_drift.max(((e - r) / r).abs()),
                    Some(_) => max_drift = max_drift.max(e.abs()),
                },
                Err(e) => err = Some(e),
            }
        }
        prev = f.snapshot_h();
    };
    let exec = ExecConfig::default();
    parallel_run(&mut fields, &coeffs, Variant::Standard, &layout, case.steps, &case.scenario, &exec, Some(&mut hook))?;
    if let Some(e) = err {
        return Err(e.into());
    }
    Ok(EnergyReport {
        precision: precision_of::<T>(),
        switch_off,
        steps: case.steps,
        reference: reference.unwrap_or(0.0),
        max_drift,
    })
}

/// Model bounds for one variant.
#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub variant: Variant,
    pub precision: Precision,
    pub accesses_per_field: u32,
    pub bandwidth_mcs: f64,
    pub compute_mcs: f64,
    pub compute_no_fma_mcs: f64,
    pub cache_side: u64,
    pub predicted_mcs: f64,
    pub step_ms: f64,
}

pub fn predict(cfg: &BenchConfig) -> Result<Vec<Prediction>> {
    let machine = cfg.machine_model()?;
    let cells = (cfg.size as u64).pow(3);
    let mut out = Vec::new();
    for p in cfg.precisions() {
        let m = machine.clone().with_precision(p.bytes() as u32);
        for &v in &cfg.variants {
            let pred = predicted_mcs(&m, v, cells);
            out.push(Prediction {
                variant: v,
                precision: p,
                accesses_per_field: VariantCost::of(v).accesses_per_field,
                bandwidth_mcs: bandwidth_bound_mcs(&m, v),
                compute_mcs: compute_bound_mcs(&m, true),
                compute_no_fma_mcs: compute_bound_mcs(&m, false),
                cache_side: cache_fit_side(&m, v),
                predicted_mcs: pred,
                step_ms: step_time_ms(cells, pred),
            });
        }
    }
    Ok(out)
}
