//! The five update orderings.
//!
//! A scheduler is compiled into a [`Plan`]: a list of phases separated by
//! barriers, each phase a list of independent per-tile tasks, each task an
//! ordered list of kernel calls on boxes. Every variant visits exactly the
//! same multiset of `(DoF, time level)` updates; only the order differs,
//! and [`crate::validate::check_plan`] proves the order respects every
//! read-after-write dependency.

use std::fmt;
use std::str::FromStr;

use crate::error::Result;
use crate::fields::FieldSet;
use crate::grid::Coefficients;
use crate::index::{Box3, Component, Dims};
use crate::parallel::{parallel_run, ExecConfig};
use crate::real::Real;
use crate::source::{ProbeRecord, ProbeSpec, SourceSpec};
use crate::tiling::{Sweep, TileLayout};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Variant {
    Standard,
    Tiled,
    Interleaved,
    Planewise,
    TwoStep,
}

impl Variant {
    pub const ALL: [Variant; 5] = [
        Variant::Standard,
        Variant::Tiled,
        Variant::Interleaved,
        Variant::Planewise,
        Variant::TwoStep,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Variant::Standard => "standard",
            Variant::Tiled => "tiled",
            Variant::Interleaved => "interleaved",
            Variant::Planewise => "planewise",
            Variant::TwoStep => "twostep",
        }
    }

    /// Time steps advanced by one sweep of the plan.
    pub fn steps_per_sweep(self) -> u64 {
        if self == Variant::TwoStep {
            2
        } else {
            1
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim().to_ascii_lowercase();
        Variant::ALL
            .into_iter()
            .find(|v| v.name() == s || (s == "two-step" && *v == Variant::TwoStep))
            .ok_or_else(|| format!("unknown variant `{s}`"))
    }
}

/// One kernel call: advance `component` over `region` from time level
/// `level` to `level + 1` within the plan's window.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Op {
    pub component: Component,
    pub level: u8,
    pub region: Box3,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Task {
    /// Tile id, or slab index for [`Units::Slabs`].
    pub unit: usize,
    pub ops: Vec<Op>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    /// Tile interiors; the only role that may be skipped for quiescent tiles.
    Volume,
    Interface,
    /// The one-cell layer between the two sweeps of a gathered pair.
    Layer,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Phase {
    pub role: Role,
    pub tasks: Vec<Task>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Units {
    Tiles(usize),
    /// Whole-domain z slabs, one per worker.
    Slabs(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Plan {
    pub variant: Variant,
    pub steps: u8,
    pub units: Units,
    pub phases: Vec<Phase>,
    /// Tiles that could not take the plane sweep and use interleaved order.
    pub fallback_tiles: Vec<usize>,
    /// Per tile, the boxes written only by its volume task.
    pub core: Vec<[Box3; 6]>,
}

fn e_ops(level: u8, f: impl Fn(Component) -> Box3) -> impl Iterator<Item = Op> {
    Component::ELECTRIC.into_iter().map(move |c| Op { component: c, level, region: f(c) })
}

fn h_ops(level: u8, f: impl Fn(Component) -> Box3) -> impl Iterator<Item = Op> {
    Component::MAGNETIC.into_iter().map(move |c| Op { component: c, level, region: f(c) })
}

fn push_nonempty(ops: &mut Vec<Op>, it: impl Iterator<Item = Op>) {
    ops.extend(it.filter(|o| !o.region.is_empty()));
}

fn plane_or_empty(b: Box3, k: Option<usize>) -> Box3 {
    k.map_or(Box3::EMPTY, |k| b.plane(k))
}

/// z range touched by any owned box of the tile.
fn z_span(layout: &TileLayout, t: usize) -> (usize, usize) {
    let owned = Component::ALL.map(|c| layout.owned_box(t, c));
    let lo = owned.iter().filter(|b| !b.is_empty()).map(|b| b.lo[2]).min().unwrap_or(0);
    let hi = owned.iter().map(|b| b.hi[2]).max().unwrap_or(0);
    (lo, hi)
}

impl Plan {
    /// Builds the plan of one sweep of `variant`.
    ///
    /// `workers` only shapes [`Variant::Standard`], which splits the domain in
    /// z slabs instead of using the tiles. Tiles owning a source DoF are not
    /// vacuum and fall back to interleaved order in the plane-based variants.
    pub fn new(variant: Variant, layout: &TileLayout, sources: &[SourceSpec], workers: usize) -> Plan {
        let d = layout.dims();
        let n = layout.len();
        let mut fallback: Vec<usize> = if matches!(variant, Variant::Planewise | Variant::TwoStep) {
            sources.iter().map(|s| layout.tile_of(s.position)).collect()
        } else {
            Vec::new()
        };
        fallback.sort_unstable();
        fallback.dedup();
        let is_fallback = |t: usize| fallback.binary_search(&t).is_ok();

        let first = |t: usize, c: Component| layout.interior_dof_box(t, variant, c, Sweep::First);
        let second = |t: usize, c: Component| {
            if is_fallback(t) {
                Box3::EMPTY
            } else {
                layout.interior_dof_box(t, variant, c, Sweep::Second)
            }
        };
        let per_tile = |role: Role, f: &dyn Fn(usize, &mut Vec<Op>)| Phase {
            role,
            tasks: (0..n)
                .map(|t| {
                    let mut ops = Vec::new();
                    f(t, &mut ops);
                    Task { unit: t, ops }
                })
                .collect(),
        };
        let interface = |comps: [Component; 3], level: u8, sweep: Sweep| {
            per_tile(Role::Interface, &|t, ops| {
                for c in comps {
                    for b in layout.interface_boxes(t, variant, c, sweep) {
                        ops.push(Op { component: c, level, region: b });
                    }
                }
            })
        };
        let interleaved_ops = |t: usize, level: u8, ops: &mut Vec<Op>| {
            push_nonempty(ops, e_ops(level, |c| first(t, c)));
            push_nonempty(ops, h_ops(level, |c| first(t, c)));
        };

        let (units, phases) = match variant {
            Variant::Standard => {
                let planes = d.nz + 1;
                let slabs = workers.clamp(1, planes);
                let bounds: Vec<usize> = (0..=slabs).map(|s| s * planes / slabs).collect();
                let slab = |s: usize, c: Component| {
                    c.valid_box(d).intersect(&Box3::new([0, 0, bounds[s]], [d.nx + 1, d.ny + 1, bounds[s + 1]]))
                };
                let pass = |comps: [Component; 3]| Phase {
                    role: Role::Volume,
                    tasks: (0..slabs)
                        .map(|s| {
                            let mut ops = Vec::new();
                            push_nonempty(&mut ops, comps.into_iter().map(|c| Op { component: c, level: 0, region: slab(s, c) }));
                            Task { unit: s, ops }
                        })
                        .collect(),
                };
                (Units::Slabs(slabs), vec![pass(Component::ELECTRIC), pass(Component::MAGNETIC)])
            }
            Variant::Tiled => (
                Units::Tiles(n),
                vec![
                    per_tile(Role::Volume, &|t, ops| push_nonempty(ops, e_ops(0, |c| first(t, c)))),
                    interface(Component::ELECTRIC, 0, Sweep::First),
                    per_tile(Role::Volume, &|t, ops| push_nonempty(ops, h_ops(0, |c| first(t, c)))),
                    interface(Component::MAGNETIC, 0, Sweep::First),
                ],
            ),
            Variant::Interleaved => (
                Units::Tiles(n),
                vec![
                    per_tile(Role::Volume, &|t, ops| interleaved_ops(t, 0, ops)),
                    interface(Component::ELECTRIC, 0, Sweep::First),
                    interface(Component::MAGNETIC, 0, Sweep::First),
                ],
            ),
            Variant::Planewise => (
                Units::Tiles(n),
                vec![
                    per_tile(Role::Volume, &|t, ops| {
                        if is_fallback(t) {
                            return interleaved_ops(t, 0, ops);
                        }
                        let (z0, z1) = z_span(layout, t);
                        for k in z0..=z1 {
                            push_nonempty(ops, e_ops(0, |c| first(t, c).plane(k)));
                            push_nonempty(ops, h_ops(0, |c| plane_or_empty(first(t, c), k.checked_sub(1))));
                        }
                    }),
                    interface(Component::ELECTRIC, 0, Sweep::First),
                    interface(Component::MAGNETIC, 0, Sweep::First),
                ],
            ),
            Variant::TwoStep => (
                Units::Tiles(n),
                vec![
                    per_tile(Role::Volume, &|t, ops| {
                        if is_fallback(t) {
                            return interleaved_ops(t, 0, ops);
                        }
                        let (z0, z1) = z_span(layout, t);
                        for k in z0..=z1 + 1 {
                            let km1 = k.checked_sub(1);
                            let km2 = k.checked_sub(2);
                            push_nonempty(ops, e_ops(0, |c| first(t, c).plane(k)));
                            push_nonempty(ops, h_ops(0, |c| plane_or_empty(first(t, c), km1)));
                            push_nonempty(ops, e_ops(1, |c| plane_or_empty(second(t, c), km1)));
                            push_nonempty(ops, h_ops(1, |c| plane_or_empty(second(t, c), km2)));
                        }
                    }),
                    interface(Component::ELECTRIC, 0, Sweep::First),
                    interface(Component::MAGNETIC, 0, Sweep::First),
                    per_tile(Role::Layer, &|t, ops| {
                        for comps in [Component::ELECTRIC, Component::MAGNETIC] {
                            for c in comps {
                                for b in first(t, c).difference(&second(t, c)) {
                                    ops.push(Op { component: c, level: 1, region: b });
                                }
                            }
                        }
                    }),
                    interface(Component::ELECTRIC, 1, Sweep::First),
                    interface(Component::MAGNETIC, 1, Sweep::First),
                ],
            ),
        };

        let core = match (variant, units) {
            (_, Units::Slabs(_)) => Vec::new(),
            (Variant::TwoStep, _) => (0..n).map(|t| Component::ALL.map(|c| second(t, c))).collect(),
            _ => (0..n).map(|t| Component::ALL.map(|c| first(t, c))).collect(),
        };

        Plan {
            variant,
            steps: variant.steps_per_sweep() as u8,
            units,
            phases,
            fallback_tiles: fallback,
            core,
        }
    }

    pub fn unit_count(&self) -> usize {
        match self.units {
            Units::Tiles(n) | Units::Slabs(n) => n,
        }
    }

    /// Number of DoF updates performed by one sweep.
    pub fn update_count(&self) -> usize {
        self.phases
            .iter()
            .flat_map(|p| &p.tasks)
            .flat_map(|t| &t.ops)
            .map(|o| o.region.count())
            .sum()
    }
}

/// Sources, probes and options of one run.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Scenario {
    pub sources: Vec<SourceSpec>,
    pub probes: Vec<ProbeSpec>,
    /// Skip the volume work of tiles whose fields are all `+0`.
    pub skip_quiescent: bool,
}

impl Scenario {
    pub fn validate(&self, dims: Dims) -> Result<()> {
        for s in &self.sources {
            s.validate(dims)?;
        }
        for p in &self.probes {
            p.validate(dims)?;
        }
        Ok(())
    }

    pub fn source_injects(&self, step: u64) -> bool {
        self.sources.iter().any(|s| s.injects_at(step))
    }

    pub fn probe_fires(&self, step: u64) -> bool {
        self.probes.iter().any(|p| p.fires(step))
    }
}

/// Outcome of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunReport<T> {
    pub records: Vec<ProbeRecord<T>>,
    pub steps: u64,
    /// Windows that advanced two steps at once.
    pub gathered_windows: u64,
    pub single_windows: u64,
    pub fallback_tiles: Vec<usize>,
    pub skipped_volume_tasks: u64,
    pub total_seconds: f64,
    /// Wall time of the volume phases, as seen by worker 0.
    pub volume_seconds: f64,
}

/// Callback run after every window with the completed step count.
pub type Hook<'a, T> = &'a mut dyn FnMut(u64, &FieldSet<T>);

/// Advances `state` by `n_steps` on one worker. See [`parallel_run`].
pub fn run_simulation<T: Real>(
    state: &mut FieldSet<T>,
    coeffs: &Coefficients<T>,
    variant: Variant,
    layout: &TileLayout,
    n_steps: u64,
    scenario: &Scenario,
    hook: Option<Hook<'_, T>>,
) -> Result<RunReport<T>> {
    parallel_run(state, coeffs, variant, layout, n_steps, scenario, &ExecConfig::default(), hook)
}

fn bare_step<T: Real>(
    state: &mut FieldSet<T>,
    coeffs: &Coefficients<T>,
    variant: Variant,
    layout: &TileLayout,
) -> Result<()> {
    let n = variant.steps_per_sweep();
    run_simulation(state, coeffs, variant, layout, n, &Scenario::default(), None).map(|_| ())
}

/// One whole-domain Ampere pass then one Faraday pass.
pub fn step_standard<T: Real>(state: &mut FieldSet<T>, coeffs: &Coefficients<T>) -> Result<()> {
    let layout = TileLayout::new(state.dims(), [1, 1, 1])?;
    bare_step(state, coeffs, Variant::Standard, &layout)
}

pub fn step_tiled<T: Real>(state: &mut FieldSet<T>, coeffs: &Coefficients<T>, layout: &TileLayout) -> Result<()> {
    bare_step(state, coeffs, Variant::Tiled, layout)
}

pub fn step_interleaved<T: Real>(state: &mut FieldSet<T>, coeffs: &Coefficients<T>, layout: &TileLayout) -> Result<()> {
    bare_step(state, coeffs, Variant::Interleaved, layout)
}

pub fn step_planewise<T: Real>(state: &mut FieldSet<T>, coeffs: &Coefficients<T>, layout: &TileLayout) -> Result<()> {
    bare_step(state, coeffs, Variant::Planewise, layout)
}

/// Advances two steps in one gathered sweep.
pub fn step_twostep<T: Real>(state: &mut FieldSet<T>, coeffs: &Coefficients<T>, layout: &TileLayout) -> Result<()> {
    bare_step(state, coeffs, Variant::TwoStep, layout)
}

/// True iff every DoF owned by `tile` is exactly `+0`.
///
/// Volume passes only read DoFs of their own tile, so such a tile's volume
/// work reproduces the zeros it already holds and may be skipped.
pub fn skip_quiescent<T: Real>(layout: &TileLayout, tile: usize, state: &FieldSet<T>) -> bool {
    let d = state.dims();
    Component::ALL.into_iter().all(|c| {
        let a = state.component(c);
        layout.owned_box(tile, c).iter().all(|[i, j, k]| a[d.index(i, j, k)].is_positive_zero())
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn variant_names_round_trip() {
        for v in Variant::ALL {
            assert_eq!(v.name().parse::<Variant>().unwrap(), v);
        }
        assert!("fast".parse::<Variant>().is_err());
    }

    #[test]
    fn every_plan_updates_each_dof_once_per_step() {
        let d = Dims::new(9, 7, 8);
        let l = TileLayout::new(d, [2, 3, 2]).unwrap();
        let per_step: usize = Component::ALL.iter().map(|c| c.dof_count(d)).sum();
        for v in Variant::ALL {
            let p = Plan::new(v, &l, &[], 3);
            assert_eq!(p.update_count(), per_step * p.steps as usize, "{v}");
        }
    }

    #[test]
    fn interleaved_has_one_volume_phase() {
        let l = TileLayout::new(Dims::cube(8), [2, 2, 2]).unwrap();
        let p = Plan::new(Variant::Interleaved, &l, &[], 1);
        let vol = p.phases.iter().filter(|ph| ph.role == Role::Volume).count();
        assert_eq!(vol, 1);
    }

    #[test]
    fn fresh_state_is_quiescent() {
        let d = Dims::cube(8);
        let l = TileLayout::new(d, [2, 2, 2]).unwrap();
        let mut f = FieldSet::<f32>::zeros(d);
        assert!((0..l.len()).all(|t| skip_quiescent(&l, t, &f)));
        f.set(Component::Ez, [2, 2, 2], -1.0);
        assert!(!skip_quiescent(&l, l.tile_of([2, 2, 2]), &f));
        assert!(skip_quiescent(&l, l.tile_of([6, 6, 6]), &f));
    }
}
