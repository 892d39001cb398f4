use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::index::{Component, Dims};
use crate::real::Real;

/// The six scaled field components `Ẽ = ε₀E` and `H̃ = H/c`.
///
/// With this scaling both curl equations share the same `c·dt/Δ` factors:
/// `∂t Ẽ = c ∇×H̃` and `∂t H̃ = −c ∇×Ẽ`. Physical fields are recovered by
/// dividing `Ẽ` by `ε₀` and multiplying `H̃` by `c`.
///
/// Arrays use the padded layout described in [`crate::index`].
#[derive(Debug, Clone, PartialEq)]
pub struct FieldSet<T> {
    dims: Dims,
    arrays: [Vec<T>; 6],
    /// Completed full time steps.
    pub step_index: u64,
}

impl<T: Real> FieldSet<T> {
    pub fn zeros(dims: Dims) -> Self {
        let n = dims.array_len();
        Self {
            dims,
            arrays: std::array::from_fn(|_| vec![T::ZERO; n]),
            step_index: 0,
        }
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn component(&self, c: Component) -> &[T] {
        &self.arrays[c.slot()]
    }

    pub fn component_mut(&mut self, c: Component) -> &mut [T] {
        &mut self.arrays[c.slot()]
    }

    pub fn get(&self, c: Component, [i, j, k]: [usize; 3]) -> T {
        self.arrays[c.slot()][self.dims.index(i, j, k)]
    }

    pub fn set(&mut self, c: Component, [i, j, k]: [usize; 3], v: T) {
        let idx = self.dims.index(i, j, k);
        self.arrays[c.slot()][idx] = v;
    }

    /// Fills every valid DoF with a uniform value in `[-1, 1)` drawn from a
    /// seeded generator; padding stays zero.
    pub fn randomize(&mut self, seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dims = self.dims;
        for c in Component::ALL {
            for p in c.valid_box(dims).iter() {
                let v: f64 = rng.gen_range(-1.0..1.0);
                self.set(c, p, T::from_f64(v));
            }
        }
    }

    /// Forces every tangential electric DoF on the outer boundary to zero.
    pub fn apply_pec_boundary(&mut self) {
        let d = self.dims;
        for c in Component::ELECTRIC {
            for p in c.valid_box(d).iter() {
                if c.is_pec(d, p[0], p[1], p[2]) {
                    self.set(c, p, T::ZERO);
                }
            }
        }
    }

    pub fn snapshot_h(&self) -> MagneticSnapshot<T> {
        MagneticSnapshot {
            dims: self.dims,
            arrays: std::array::from_fn(|a| self.arrays[3 + a].clone()),
        }
    }

    /// True if every valid DoF is exactly `+0`.
    pub fn is_zero(&self) -> bool {
        self.arrays.iter().all(|a| a.iter().all(|v| v.is_positive_zero()))
    }

    /// Canonical little-endian byte image: `ex, ey, ez, hx, hy, hz`, each in
    /// storage order including padding.
    pub fn to_le_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(6 * self.dims.array_len() * T::BYTES);
        for a in &self.arrays {
            for v in a {
                v.extend_le_bytes(&mut out);
            }
        }
        out
    }

    /// Discrete leapfrog invariant
    /// `Σ w_E Ẽ·Ẽ + Σ w_H H̃^{n−1/2}·H̃^{n+1/2}`, accumulated in `f64`.
    ///
    /// `self` holds E at level n and H at n+1/2, `prev_h` holds H at n−1/2.
    /// Edge weights are the primal length along the edge times the dual
    /// lengths across it; face weights are dual along the normal times
    /// primal across. These weights make the scheme exactly antisymmetric.
    pub fn total_energy(&self, prev_h: &MagneticSnapshot<T>, grid: &GridSpec) -> Result<f64> {
        let d = self.dims;
        if prev_h.dims != d {
            return Err(Error::ExtentMismatch { expected: d.cells(), found: prev_h.dims.cells() });
        }
        if grid.dims() != d {
            return Err(Error::ExtentMismatch { expected: d.cells(), found: grid.dims().cells() });
        }
        let primal = [grid.dx(), grid.dy(), grid.dz()];
        let dual = [grid.dual_spacing(0), grid.dual_spacing(1), grid.dual_spacing(2)];
        let mut total = 0.0;
        for c in Component::ALL {
            let now = self.component(c);
            let before = if c.is_electric() { now } else { prev_h.component(c) };
            let axis = c.axis();
            for [i, j, k] in c.valid_box(d).iter() {
                let p = [i, j, k];
                let mut w = 1.0;
                for a in 0..3 {
                    let along = (a == axis) == c.is_electric();
                    w *= if along { primal[a][p[a]] } else { dual[a][p[a]] };
                }
                let idx = d.index(i, j, k);
                total += w * now[idx].to_f64() * before[idx].to_f64();
            }
        }
        Ok(total)
    }

    pub(crate) fn ptrs(&mut self) -> FieldPtrs<T> {
        FieldPtrs {
            dims: self.dims,
            data: std::array::from_fn(|a| self.arrays[a].as_mut_ptr()),
        }
    }
}

/// Copy of the three magnetic arrays at an earlier half step.
#[derive(Debug, Clone, PartialEq)]
pub struct MagneticSnapshot<T> {
    dims: Dims,
    arrays: [Vec<T>; 3],
}

impl<T: Real> MagneticSnapshot<T> {
    pub fn component(&self, c: Component) -> &[T] {
        assert!(!c.is_electric(), "snapshot only holds magnetic components");
        &self.arrays[c.slot() - 3]
    }
}

/// Raw view of the six arrays shared by the workers of one run.
///
/// Workers only ever write disjoint DoF sets within a phase and only read
/// DoFs that no other worker writes in that phase; the plan validator checks
/// both rules, which is what makes the shared mutable access sound.
#[derive(Clone, Copy)]
pub(crate) struct FieldPtrs<T> {
    pub dims: Dims,
    data: [*mut T; 6],
}

unsafe impl<T: Send> Send for FieldPtrs<T> {}
unsafe impl<T: Sync> Sync for FieldPtrs<T> {}

impl<T: Real> FieldPtrs<T> {
    /// # Safety
    /// `start..start + len` must be in bounds and not accessed by any other
    /// worker while the slice lives.
    #[inline]
    pub unsafe fn row_mut<'a>(&self, c: Component, start: usize, len: usize) -> &'a mut [T] {
        std::slice::from_raw_parts_mut(self.data[c.slot()].add(start), len)
    }

    /// # Safety
    /// `start..start + len` must be in bounds and not written by any other
    /// worker while the slice lives.
    #[inline]
    pub unsafe fn row<'a>(&self, c: Component, start: usize, len: usize) -> &'a [T] {
        std::slice::from_raw_parts(self.data[c.slot()].add(start), len)
    }

    /// # Safety
    /// Same rules as [`FieldPtrs::row`].
    #[inline]
    pub unsafe fn read(&self, c: Component, idx: usize) -> T {
        *self.data[c.slot()].add(idx)
    }

    /// # Safety
    /// Same rules as [`FieldPtrs::row_mut`].
    #[inline]
    pub unsafe fn write(&self, c: Component, idx: usize, v: T) {
        *self.data[c.slot()].add(idx) = v;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_grid(n: usize) -> GridSpec {
        GridSpec::uniform(Dims::cube(n), 1.0, 0.5, 1.0).unwrap()
    }

    #[test]
    fn zero_energy() {
        let f = FieldSet::<f64>::zeros(Dims::cube(4));
        assert_eq!(f.total_energy(&f.snapshot_h(), &unit_grid(4)).unwrap(), 0.0);
    }

    #[test]
    fn single_edge_energy() {
        let mut f = FieldSet::<f64>::zeros(Dims::cube(4));
        f.set(Component::Ey, [2, 1, 2], 2.0);
        assert_eq!(f.total_energy(&f.snapshot_h(), &unit_grid(4)).unwrap(), 4.0);
    }

    #[test]
    fn energy_rejects_mismatched_snapshot() {
        let f = FieldSet::<f64>::zeros(Dims::cube(4));
        let other = FieldSet::<f64>::zeros(Dims::cube(5)).snapshot_h();
        assert!(matches!(
            f.total_energy(&other, &unit_grid(4)),
            Err(Error::ExtentMismatch { .. })
        ));
    }

    #[test]
    fn pec_on_zero_is_noop() {
        let mut f = FieldSet::<f32>::zeros(Dims::cube(3));
        f.apply_pec_boundary();
        assert!(f.is_zero());
    }

    #[test]
    fn pec_masks_only_boundary_tangential_e() {
        let d = Dims::cube(4);
        let mut f = FieldSet::<f64>::zeros(d);
        for c in Component::ALL {
            for p in c.valid_box(d).iter() {
                f.set(c, p, 1.0);
            }
        }
        f.apply_pec_boundary();
        for c in Component::ALL {
            for p in c.valid_box(d).iter() {
                let expect = if c.is_pec(d, p[0], p[1], p[2]) { 0.0 } else { 1.0 };
                assert_eq!(f.get(c, p), expect, "{c} {p:?}");
            }
        }
    }

    #[test]
    fn pec_does_not_increase_energy() {
        let g = unit_grid(5);
        let mut f = FieldSet::<f64>::zeros(g.dims());
        f.randomize(7);
        let h = f.snapshot_h();
        let before = f.total_energy(&h, &g).unwrap();
        f.apply_pec_boundary();
        let after = f.total_energy(&h, &g).unwrap();
        assert!(after <= before);
    }

    #[test]
    fn randomize_is_seeded_and_leaves_padding() {
        let d = Dims::new(3, 4, 2);
        let mut a = FieldSet::<f32>::zeros(d);
        let mut b = FieldSet::<f32>::zeros(d);
        a.randomize(11);
        b.randomize(11);
        assert_eq!(a, b);
        // Ex has no DoF at i = nx.
        assert_eq!(a.get(Component::Ex, [3, 0, 0]), 0.0);
    }
}
