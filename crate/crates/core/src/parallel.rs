//! Barrier-synchronised execution of plans on a fixed set of workers.

use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::Barrier;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::fields::{FieldPtrs, FieldSet};
use crate::grid::Coefficients;
use crate::index::{Box3, Component};
use crate::kernels::{inject, update_box};
use crate::real::Real;
use crate::schedulers::{Hook, Plan, Role, RunReport, Scenario, Units, Variant};
use crate::source::ProbeRecord;
use crate::tiling::TileLayout;

/// How tiles are handed out to workers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Distribution {
    /// One compact block of the tile grid per worker, see [`assign_tiles`].
    #[default]
    Blocks,
    /// Runs of `n` consecutive tile ids dealt round-robin.
    Chunked(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExecConfig {
    pub workers: usize,
    /// Core for each worker, applied with `sched_setaffinity` on Linux.
    pub pinning: Option<Vec<usize>>,
    pub distribution: Distribution,
}

impl Default for ExecConfig {
    fn default() -> Self {
        Self { workers: 1, pinning: None, distribution: Distribution::Blocks }
    }
}

impl ExecConfig {
    pub fn with_workers(workers: usize) -> Self {
        Self { workers, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.workers == 0 {
            return Err(Error::InvalidConfig("at least one worker is required".into()));
        }
        if let Distribution::Chunked(0) = self.distribution {
            return Err(Error::InvalidConfig("chunk size must be at least 1".into()));
        }
        if let Some(p) = &self.pinning {
            if p.len() < self.workers {
                return Err(Error::InvalidConfig(format!("{} cores pinned for {} workers", p.len(), self.workers)));
            }
        }
        Ok(())
    }
}

/// Tile to worker map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment {
    pub workers: usize,
    /// Worker of each tile id.
    pub owner: Vec<usize>,
    /// Worker blocks per axis of the tile grid, if a block factorisation was used.
    pub blocks: Option<[usize; 3]>,
}

impl Assignment {
    pub fn tiles_of(&self, worker: usize) -> Vec<usize> {
        (0..self.owner.len()).filter(|&t| self.owner[t] == worker).collect()
    }
}

fn range_of(n: usize, parts: usize, idx: usize) -> usize {
    // Block index of position idx when n items are cut into `parts` near-equal runs.
    (0..parts).rev().find(|&p| p * n / parts <= idx).unwrap_or(0)
}

/// Cuts the tile grid into `workers` boxes of tile counts differing by at
/// most one, picking the factorisation `wx·wy·wz = workers` with the least
/// cut area (fewer x cuts on ties). Falls back to contiguous runs of tile ids
/// if no factorisation balances.
pub fn assign_tiles(layout: &TileLayout, workers: usize) -> Assignment {
    let workers = workers.max(1);
    let s = layout.split();
    let n = layout.len();
    let mut best: Option<(u64, [usize; 3])> = None;
    for wx in 1..=workers {
        if !workers.is_multiple_of(wx) || wx > s[0] {
            continue;
        }
        for wy in 1..=workers / wx {
            if !(workers / wx).is_multiple_of(wy) || wy > s[1] {
                continue;
            }
            let wz = workers / wx / wy;
            if wz > s[2] {
                continue;
            }
            let w = [wx, wy, wz];
            let sizes = |a: usize| (0..w[a]).map(move |b| (b + 1) * s[a] / w[a] - b * s[a] / w[a]);
            let (mn, mx) = [0, 1, 2].iter().fold((1usize, 1usize), |(mn, mx), &a| {
                (mn * sizes(a).min().unwrap(), mx * sizes(a).max().unwrap())
            });
            if mx - mn > 1 {
                continue;
            }
            let cells = layout.dims().cells();
            let cut = (0..3)
                .map(|a| (w[a] as u64 - 1) * (cells[(a + 1) % 3] * cells[(a + 2) % 3]) as u64)
                .sum::<u64>();
            if best.is_none_or(|(c, b)| cut < c || (cut == c && wx < b[0])) {
                best = Some((cut, w));
            }
        }
    }
    match best {
        Some((_, w)) => {
            let owner = layout
                .tiles()
                .iter()
                .map(|t| {
                    let b: [usize; 3] = std::array::from_fn(|a| range_of(s[a], w[a], t.coords[a]));
                    b[0] + w[0] * (b[1] + w[1] * b[2])
                })
                .collect();
            Assignment { workers, owner, blocks: Some(w) }
        }
        None => Assignment { workers, owner: (0..n).map(|t| range_of(n, workers, t)).collect(), blocks: None },
    }
}

fn chunked(n: usize, workers: usize, chunk: usize) -> Assignment {
    Assignment { workers, owner: (0..n).map(|t| (t / chunk) % workers).collect(), blocks: None }
}

struct Window<'p> {
    base: u64,
    plan: &'p Plan,
    /// Worker 0 samples probes or calls the hook afterwards.
    sync: bool,
}

/// Per plan: for every phase, the task indices of each worker.
fn task_lists(plan: &Plan, owner: &[usize], workers: usize) -> Vec<Vec<Vec<usize>>> {
    plan.phases
        .iter()
        .map(|ph| {
            let mut lists = vec![Vec::new(); workers];
            for (i, task) in ph.tasks.iter().enumerate() {
                let w = match plan.units {
                    Units::Tiles(_) => owner[task.unit],
                    Units::Slabs(_) => task.unit % workers,
                };
                lists[w].push(i);
            }
            lists
        })
        .collect()
}

/// Source component, position, array index and increments at levels 0 and 1.
type Injection<T> = (Component, [usize; 3], usize, [Option<T>; 2]);

struct Shared<'a, T> {
    ptrs: FieldPtrs<T>,
    coeffs: &'a Coefficients<T>,
    barrier: Barrier,
    windows: Vec<Window<'a>>,
    lists: Vec<Vec<Vec<Vec<usize>>>>,
    plan_index: Vec<usize>,
    injections: Vec<Vec<Injection<T>>>,
    quiet: Option<Vec<AtomicBool>>,
    shells: Vec<Vec<(Component, Box3)>>,
    skipped: AtomicU64,
}

fn pin_to(core: usize) {
    #[cfg(target_os = "linux")]
    // SAFETY: plain libc calls on a zeroed cpu_set_t owned by this frame.
    unsafe {
        let mut set: libc::cpu_set_t = std::mem::zeroed();
        libc::CPU_SET(core, &mut set);
        libc::sched_setaffinity(0, std::mem::size_of::<libc::cpu_set_t>(), &set);
    }
    #[cfg(not(target_os = "linux"))]
    let _ = core;
}

impl<T: Real> Shared<'_, T> {
    fn shell_is_zero(&self, tile: usize) -> bool {
        let d = self.ptrs.dims;
        self.shells[tile].iter().all(|(c, b)| {
            b.iter()
                // SAFETY: the shell lies in the tile's own DoFs, which only its owner touches in a volume phase.
                .all(|[i, j, k]| unsafe { self.ptrs.read(*c, d.index(i, j, k)) }.is_positive_zero())
        })
    }

    /// Runs windows on worker `w`; returns the volume phase time seen by worker 0.
    fn work(&self, w: usize, on_sync: &mut dyn FnMut(usize)) -> f64 {
        let mut volume = 0.0;
        for (wi, win) in self.windows.iter().enumerate() {
            let lists = &self.lists[self.plan_index[wi]];
            for (pi, phase) in win.plan.phases.iter().enumerate() {
                let t0 = Instant::now();
                for &ti in &lists[pi][w] {
                    let task = &phase.tasks[ti];
                    if phase.role == Role::Volume && matches!(win.plan.units, Units::Tiles(_)) {
                        if let Some(quiet) = &self.quiet {
                            let flag = &quiet[task.unit];
                            if flag.load(Ordering::Relaxed) {
                                if self.shell_is_zero(task.unit) {
                                    self.skipped.fetch_add(1, Ordering::Relaxed);
                                    continue;
                                }
                                flag.store(false, Ordering::Relaxed);
                            }
                        }
                    }
                    for op in &task.ops {
                        // SAFETY: plans are checked against the dependency and disjointness rules.
                        unsafe { update_box(&self.ptrs, self.coeffs, op.component, &op.region) };
                        if op.component.is_electric() {
                            self.inject_after(wi, op.component, op.level, &op.region);
                        }
                    }
                }
                self.barrier.wait();
                if w == 0 && phase.role == Role::Volume {
                    volume += t0.elapsed().as_secs_f64();
                }
            }
            if win.sync {
                on_sync(wi);
                self.barrier.wait();
            }
        }
        volume
    }

    fn inject_after(&self, wi: usize, c: Component, level: u8, region: &Box3) {
        for &(sc, pos, idx, inc) in &self.injections[wi] {
            if sc == c && region.contains(pos) {
                if let Some(v) = inc[level as usize] {
                    // SAFETY: the DoF lies in the region this task just wrote.
                    unsafe { self.ptrs.write(c, idx, inject(self.ptrs.read(c, idx), v)) };
                }
            }
        }
    }
}

/// Advances `state` by `n_steps` with `config.workers` workers.
///
/// Windows of one or two steps run back to back; two-step windows are only
/// formed when no source injects during either step and no probe fires at
/// the intermediate step, so probe records match every other variant.
/// Probes are sampled after each completed step count divisible by their
/// stride. Results are bitwise independent of the worker count.
#[allow(clippy::too_many_arguments)]
pub fn parallel_run<T: Real>(
    state: &mut FieldSet<T>,
    coeffs: &Coefficients<T>,
    variant: Variant,
    layout: &TileLayout,
    n_steps: u64,
    scenario: &Scenario,
    config: &ExecConfig,
    mut hook: Option<Hook<'_, T>>,
) -> Result<RunReport<T>> {
    let dims = state.dims();
    if layout.dims() != dims {
        return Err(Error::ExtentMismatch { expected: dims.cells(), found: layout.dims().cells() });
    }
    if coeffs.dims != dims {
        return Err(Error::ExtentMismatch { expected: dims.cells(), found: coeffs.dims.cells() });
    }
    coeffs.check_stable()?;
    scenario.validate(dims)?;
    config.validate()?;
    let started = Instant::now();
    let workers = config.workers;

    let main = Plan::new(variant, layout, &scenario.sources, workers);
    let single = (variant == Variant::TwoStep).then(|| Plan::new(Variant::Planewise, layout, &scenario.sources, workers));
    let plans: Vec<&Plan> = std::iter::once(&main).chain(single.as_ref()).collect();

    let start = state.step_index;
    let end = start + n_steps;
    let mut windows = Vec::new();
    let mut plan_index = Vec::new();
    let mut s = start;
    while s < end {
        let gather = variant == Variant::TwoStep
            && end - s >= 2
            && !scenario.probe_fires(s + 1)
            && !scenario.source_injects(s)
            && !scenario.source_injects(s + 1);
        let (pi, len) = match (variant, gather) {
            (Variant::TwoStep, false) => (1, 1),
            _ => (0, main.steps as u64),
        };
        s += len;
        windows.push(Window { base: s - len, plan: plans[pi], sync: hook.is_some() || scenario.probe_fires(s) });
        plan_index.push(pi);
    }

    let assignment = match config.distribution {
        Distribution::Blocks => assign_tiles(layout, workers),
        Distribution::Chunked(c) => chunked(layout.len(), workers, c),
    };
    let lists = plans.iter().map(|p| task_lists(p, &assignment.owner, workers)).collect();

    let dt = coeffs.dt;
    let injections = windows
        .iter()
        .map(|w| {
            scenario
                .sources
                .iter()
                .map(|src| {
                    let [i, j, k] = src.position;
                    let inc = [src.increment::<T>(w.base, dt), src.increment::<T>(w.base + 1, dt)];
                    (src.component, src.position, dims.index(i, j, k), inc)
                })
                .collect()
        })
        .collect();

    let source_tiles: Vec<usize> = scenario.sources.iter().map(|s| layout.tile_of(s.position)).collect();
    let quiet = scenario.skip_quiescent.then(|| {
        (0..layout.len())
            .map(|t| AtomicBool::new(!source_tiles.contains(&t) && crate::schedulers::skip_quiescent(layout, t, state)))
            .collect()
    });
    let shells = if scenario.skip_quiescent {
        (0..layout.len())
            .map(|t| {
                let mut out = Vec::new();
                for c in Component::ALL {
                    let core = main.core.get(t).map_or(Box3::EMPTY, |cb| cb[c.slot()]);
                    for b in layout.owned_box(t, c).difference(&core) {
                        out.push((c, b));
                    }
                }
                out
            })
            .collect()
    } else {
        Vec::new()
    };

    let sp: *mut FieldSet<T> = state;
    // SAFETY: `sp` comes from a live exclusive borrow held for this whole call.
    let ptrs = unsafe { (*sp).ptrs() };
    let shared = Shared {
        ptrs,
        coeffs,
        barrier: Barrier::new(workers),
        windows,
        lists,
        plan_index,
        injections,
        quiet,
        shells,
        skipped: AtomicU64::new(0),
    };

    let mut records = Vec::new();
    let mut volume = 0.0;
    std::thread::scope(|scope| {
        for w in 1..workers {
            let shared = &shared;
            let core = config.pinning.as_ref().map(|p| p[w]);
            scope.spawn(move || {
                if let Some(c) = core {
                    pin_to(c);
                }
                shared.work(w, &mut |_| {});
            });
        }
        if let Some(p) = &config.pinning {
            pin_to(p[0]);
        }
        volume = shared.work(0, &mut |wi| {
            let win = &shared.windows[wi];
            let done = win.base + win.plan.steps as u64;
            // SAFETY: every other worker is parked on the barrier that follows.
            let view = unsafe {
                (*sp).step_index = done;
                &*sp
            };
            for (id, p) in scenario.probes.iter().enumerate() {
                if p.fires(done) {
                    let value = view.get(p.component, p.position);
                    records.push(ProbeRecord { step: done, time: done as f64 * dt, probe: id, value });
                }
            }
            if let Some(h) = hook.as_mut() {
                h(done, view);
            }
        });
    });
    state.step_index = end;

    let gathered = shared.windows.iter().filter(|w| w.plan.steps == 2).count() as u64;
    Ok(RunReport {
        records,
        steps: n_steps,
        gathered_windows: gathered,
        single_windows: shared.windows.len() as u64 - gathered,
        fallback_tiles: main.fallback_tiles.clone(),
        skipped_volume_tasks: shared.skipped.load(Ordering::Relaxed),
        total_seconds: started.elapsed().as_secs_f64(),
        volume_seconds: volume,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::index::Dims;

    fn layout(split: [usize; 3]) -> TileLayout {
        TileLayout::new(Dims::new(split[0] * 2, split[1] * 2, split[2] * 2), split).unwrap()
    }

    #[test]
    fn one_worker_takes_everything() {
        let a = assign_tiles(&layout([2, 2, 2]), 1);
        assert!(a.owner.iter().all(|&w| w == 0));
    }

    #[test]
    fn one_tile_each() {
        let a = assign_tiles(&layout([2, 2, 2]), 8);
        let mut seen = a.owner.clone();
        seen.sort_unstable();
        assert_eq!(seen, (0..8).collect::<Vec<_>>());
    }

    #[test]
    fn four_workers_on_cubic_tile_grid_cut_once_per_two_axes() {
        let a = assign_tiles(&layout([4, 4, 4]), 4);
        // (1,2,2) and (2,2,1) style splits have the least cut area; x stays whole.
        assert_eq!(a.blocks.unwrap()[0], 1);
        for w in 0..4 {
            assert_eq!(a.tiles_of(w).len(), 16);
        }
    }

    #[test]
    fn unbalanced_factorisations_fall_back_to_runs() {
        let a = assign_tiles(&layout([1, 1, 5]), 3);
        let counts: Vec<usize> = (0..3).map(|w| a.tiles_of(w).len()).collect();
        assert!(counts.iter().max().unwrap() - counts.iter().min().unwrap() <= 1);
    }

    #[test]
    fn zero_workers_rejected() {
        assert!(ExecConfig::with_workers(0).validate().is_err());
    }
}
