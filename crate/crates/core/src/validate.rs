//! Dependency checker for plans.
//!
//! Two things must hold for a plan to be race free and bitwise equivalent to
//! the standard loop:
//!
//! 1. within a phase, tasks write disjoint DoFs and never read a DoF another
//!    task of the same phase writes;
//! 2. replayed sequentially with a time level stamped on every DoF, each
//!    update finds its own DoF and every DoF it reads at the expected level,
//!    and the sweep ends with every DoF advanced exactly `steps` times.
//!
//! Reads falling outside a component's extent are ignored; PEC edges count
//! their formal stencil reads even though the kernel never performs them.

use crate::error::{Error, Result};
use crate::index::{Component, Dims};
use crate::schedulers::Plan;

const NOBODY: u32 = u32::MAX;

fn reads(d: Dims, c: Component, p: [usize; 3]) -> impl Iterator<Item = (Component, usize)> {
    c.stencil().iter().filter_map(move |&(r, off)| {
        let q: [i64; 3] = std::array::from_fn(|a| p[a] as i64 + off[a]);
        let ext = r.extent(d);
        if (0..3).all(|a| q[a] >= 0 && (q[a] as usize) < ext[a]) {
            Some((r, d.index(q[0] as usize, q[1] as usize, q[2] as usize)))
        } else {
            None
        }
    })
}

fn violation(msg: String) -> Error {
    Error::PlanViolation(msg)
}

/// Checks `plan` against the rules above for a grid of `dims`.
pub fn check_plan(plan: &Plan, dims: Dims) -> Result<()> {
    let len = dims.array_len();
    let mut level: Vec<Vec<u8>> = vec![vec![0; len]; 6];
    let mut writer: Vec<Vec<u32>> = vec![vec![NOBODY; len]; 6];

    for (pi, phase) in plan.phases.iter().enumerate() {
        // Ownership of this phase's writes.
        for (ti, task) in phase.tasks.iter().enumerate() {
            for op in &task.ops {
                let c = op.component;
                if !c.valid_box(dims).covers(&op.region) {
                    return Err(violation(format!("phase {pi} task {ti}: {c} box {:?} leaves the extent", op.region)));
                }
                for [i, j, k] in op.region.iter() {
                    let idx = dims.index(i, j, k);
                    let w = &mut writer[c.slot()][idx];
                    if *w != NOBODY && *w != ti as u32 {
                        return Err(violation(format!("phase {pi}: tasks {w} and {ti} both write {c} {:?}", [i, j, k])));
                    }
                    *w = ti as u32;
                }
            }
        }
        for (ti, task) in phase.tasks.iter().enumerate() {
            for op in &task.ops {
                for p in op.region.iter() {
                    for (r, idx) in reads(dims, op.component, p) {
                        let w = writer[r.slot()][idx];
                        if w != NOBODY && w != ti as u32 {
                            return Err(violation(format!(
                                "phase {pi}: task {ti} updating {} {p:?} reads {r} written by task {w}",
                                op.component
                            )));
                        }
                    }
                }
            }
        }
        // Sequential replay with level stamps.
        for (ti, task) in phase.tasks.iter().enumerate() {
            for op in &task.ops {
                let c = op.component;
                let need = if c.is_electric() { op.level } else { op.level + 1 };
                for p in op.region.iter() {
                    let idx = dims.index(p[0], p[1], p[2]);
                    let own = level[c.slot()][idx];
                    if own != op.level {
                        return Err(violation(format!(
                            "phase {pi} task {ti}: {c} {p:?} is at level {own}, update expects {}",
                            op.level
                        )));
                    }
                    for (r, ridx) in reads(dims, c, p) {
                        let got = level[r.slot()][ridx];
                        if got != need {
                            return Err(violation(format!(
                                "phase {pi} task {ti}: {c} {p:?} at level {} reads {r} at level {got}, needs {need}",
                                op.level
                            )));
                        }
                    }
                    level[c.slot()][idx] = op.level + 1;
                }
            }
        }
        for w in writer.iter_mut() {
            w.fill(NOBODY);
        }
    }

    for c in Component::ALL {
        for p in c.valid_box(dims).iter() {
            let l = level[c.slot()][dims.index(p[0], p[1], p[2])];
            if l != plan.steps {
                return Err(violation(format!("{c} {p:?} ends at level {l}, expected {}", plan.steps)));
            }
        }
    }
    Ok(())
}
