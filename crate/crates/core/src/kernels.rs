//! Per-DoF update arithmetic.
//!
//! [`leapfrog`] is the only expression that advances a field value, and
//! [`inject`] the only one that adds a source term. The row loops below
//! merely feed them; schedulers decide which boxes to feed and in which order.

use crate::error::{Error, Result};
use crate::fields::{FieldPtrs, FieldSet};
use crate::grid::Coefficients;
use crate::index::{Box3, Component};
use crate::real::Real;

/// `u + a·(p1 − p0) − b·(q1 − q0)`, evaluated in exactly this order.
///
/// Every Yee update has this shape. With `(a, p, b, q)` set to
/// `(cdz[k], Ey, cdy[j], Ez)` it is the Hx update
/// `hx += cdz·(ey(k+1) − ey(k)) − cdy·(ez(j+1) − ez(j))`.
#[inline(always)]
pub fn leapfrog<T: Real>(u: T, a: T, p1: T, p0: T, b: T, q1: T, q0: T) -> T {
    u + a * (p1 - p0) - b * (q1 - q0)
}

/// Soft source: adds an already scaled increment `−dt·J` to an E value.
#[inline(always)]
pub fn inject<T: Real>(e: T, increment: T) -> T {
    e + increment
}

#[inline(always)]
fn row_const<T: Real>(out: &mut [T], a: T, p1: &[T], p0: &[T], b: T, q1: &[T], q0: &[T]) {
    let n = out.len();
    let (p1, p0, q1, q0) = (&p1[..n], &p0[..n], &q1[..n], &q0[..n]);
    for i in 0..n {
        out[i] = leapfrog(out[i], a, p1[i], p0[i], b, q1[i], q0[i]);
    }
}

#[inline(always)]
fn row_vary_a<T: Real>(out: &mut [T], a: &[T], p1: &[T], p0: &[T], b: T, q1: &[T], q0: &[T]) {
    let n = out.len();
    let (a, p1, p0, q1, q0) = (&a[..n], &p1[..n], &p0[..n], &q1[..n], &q0[..n]);
    for i in 0..n {
        out[i] = leapfrog(out[i], a[i], p1[i], p0[i], b, q1[i], q0[i]);
    }
}

#[inline(always)]
fn row_vary_b<T: Real>(out: &mut [T], a: T, p1: &[T], p0: &[T], b: &[T], q1: &[T], q0: &[T]) {
    let n = out.len();
    let (b, p1, p0, q1, q0) = (&b[..n], &p1[..n], &p0[..n], &q1[..n], &q0[..n]);
    for i in 0..n {
        out[i] = leapfrog(out[i], a, p1[i], p0[i], b[i], q1[i], q0[i]);
    }
}

/// Updates every DoF of `c` inside `b`.
///
/// # Safety
/// `b` must lie inside `c`'s valid extent, and the caller must uphold the
/// phase rules of [`FieldPtrs`]: no other worker writes what this box reads
/// or touches what it writes.
pub(crate) unsafe fn update_box<T: Real>(f: &FieldPtrs<T>, co: &Coefficients<T>, c: Component, b: &Box3) {
    if b.is_empty() {
        return;
    }
    use Component::*;
    let d = f.dims;
    let (sy, sz) = (d.stride_y(), d.stride_z());
    let [i0, j0, k0] = b.lo;
    let [i1, j1, k1] = b.hi;
    let len = i1 - i0;
    // E rows along x lose their end points to the PEC walls at i = 0 and i = nx.
    let ia = i0.max(1);
    let ib = i1.min(d.nx);
    for k in k0..k1 {
        for j in j0..j1 {
            let base = d.index(i0, j, k);
            match c {
                Ex => {
                    let out = f.row_mut(Ex, base, len);
                    if j == 0 || j == d.ny || k == 0 || k == d.nz {
                        out.fill(T::ZERO);
                        continue;
                    }
                    row_const(
                        out,
                        co.dual_cdy[j],
                        f.row(Hz, base, len),
                        f.row(Hz, base - sy, len),
                        co.dual_cdz[k],
                        f.row(Hy, base, len),
                        f.row(Hy, base - sz, len),
                    );
                }
                Ey | Ez => {
                    let out = f.row_mut(c, base, len);
                    let wall = if c == Ey { k == 0 || k == d.nz } else { j == 0 || j == d.ny };
                    if wall {
                        out.fill(T::ZERO);
                        continue;
                    }
                    if i0 == 0 {
                        out[0] = T::ZERO;
                    }
                    if i1 == d.nx + 1 {
                        out[len - 1] = T::ZERO;
                    }
                    if ia >= ib {
                        continue;
                    }
                    let n = ib - ia;
                    let at = d.index(ia, j, k);
                    let out = &mut out[ia - i0..ib - i0];
                    if c == Ey {
                        row_vary_b(
                            out,
                            co.dual_cdz[k],
                            f.row(Hx, at, n),
                            f.row(Hx, at - sz, n),
                            &co.dual_cdx[ia..ib],
                            f.row(Hz, at, n),
                            f.row(Hz, at - 1, n),
                        );
                    } else {
                        row_vary_a(
                            out,
                            &co.dual_cdx[ia..ib],
                            f.row(Hy, at, n),
                            f.row(Hy, at - 1, n),
                            co.dual_cdy[j],
                            f.row(Hx, at, n),
                            f.row(Hx, at - sy, n),
                        );
                    }
                }
                Hx => row_const(
                    f.row_mut(Hx, base, len),
                    co.cdz[k],
                    f.row(Ey, base + sz, len),
                    f.row(Ey, base, len),
                    co.cdy[j],
                    f.row(Ez, base + sy, len),
                    f.row(Ez, base, len),
                ),
                Hy => row_vary_a(
                    f.row_mut(Hy, base, len),
                    &co.cdx[i0..i1],
                    f.row(Ez, base + 1, len),
                    f.row(Ez, base, len),
                    co.cdz[k],
                    f.row(Ex, base + sz, len),
                    f.row(Ex, base, len),
                ),
                Hz => row_vary_b(
                    f.row_mut(Hz, base, len),
                    co.cdy[j],
                    f.row(Ex, base + sy, len),
                    f.row(Ex, base, len),
                    &co.cdx[i0..i1],
                    f.row(Ey, base + 1, len),
                    f.row(Ey, base, len),
                ),
            }
        }
    }
}

fn check_dims<T: Real>(fields: &FieldSet<T>, co: &Coefficients<T>) -> Result<()> {
    if fields.dims() != co.dims {
        return Err(Error::ExtentMismatch { expected: co.dims.cells(), found: fields.dims().cells() });
    }
    Ok(())
}

/// Updates the DoFs of one component inside `range`, which must lie within
/// the component's valid extent.
pub fn update_component_range<T: Real>(
    fields: &mut FieldSet<T>,
    co: &Coefficients<T>,
    c: Component,
    range: &Box3,
) -> Result<()> {
    check_dims(fields, co)?;
    let valid = c.valid_box(fields.dims());
    if !valid.covers(range) {
        return Err(Error::OutOfBounds { component: c, range: *range, extent: valid.hi });
    }
    let ptrs = fields.ptrs();
    // SAFETY: single owner, box checked against the extent.
    unsafe { update_box(&ptrs, co, c, range) };
    Ok(())
}

fn apply_range<T: Real>(
    fields: &mut FieldSet<T>,
    co: &Coefficients<T>,
    comps: [Component; 3],
    range: &Box3,
) -> Result<()> {
    check_dims(fields, co)?;
    let padded = Box3::new([0; 3], fields.dims().padded());
    if !padded.covers(range) {
        return Err(Error::OutOfBounds { component: comps[0], range: *range, extent: padded.hi });
    }
    let ptrs = fields.ptrs();
    for c in comps {
        let clipped = range.intersect(&c.valid_box(fields.dims()));
        // SAFETY: single owner, box clipped to the extent.
        unsafe { update_box(&ptrs, co, c, &clipped) };
    }
    Ok(())
}

/// Ampere update (E from curl H) of every electric DoF in `range`.
///
/// The range is expressed in the common padded index space and clipped per
/// component. PEC edges inside the range are set to zero.
pub fn apply_ampere_range<T: Real>(fields: &mut FieldSet<T>, co: &Coefficients<T>, range: &Box3) -> Result<()> {
    apply_range(fields, co, Component::ELECTRIC, range)
}

/// Faraday update (H from curl E) of every magnetic DoF in `range`.
pub fn apply_faraday_range<T: Real>(fields: &mut FieldSet<T>, co: &Coefficients<T>, range: &Box3) -> Result<()> {
    apply_range(fields, co, Component::MAGNETIC, range)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;
    use crate::index::Dims;

    fn setup(n: usize) -> (FieldSet<f64>, Coefficients<f64>, Box3) {
        let g = GridSpec::uniform(Dims::cube(n), 1.0, 0.5, 1.0).unwrap();
        let f = FieldSet::zeros(g.dims());
        let all = Box3::new([0; 3], g.dims().padded());
        (f, Coefficients::new(&g), all)
    }

    #[test]
    fn zero_is_fixed_point() {
        let (mut f, co, all) = setup(4);
        apply_ampere_range(&mut f, &co, &all).unwrap();
        apply_faraday_range(&mut f, &co, &all).unwrap();
        assert!(f.is_zero());
    }

    #[test]
    fn uniform_h_has_no_curl() {
        let (mut f, co, all) = setup(4);
        for c in Component::MAGNETIC {
            for p in c.valid_box(f.dims()).iter() {
                f.set(c, p, 0.25);
            }
        }
        apply_ampere_range(&mut f, &co, &all).unwrap();
        for c in Component::ELECTRIC {
            assert!(f.component(c).iter().all(|v| *v == 0.0));
        }
    }

    #[test]
    fn single_hz_face_drives_four_edges() {
        let (mut f, co, all) = setup(4);
        f.set(Component::Hz, [1, 1, 2], 1.0);
        apply_ampere_range(&mut f, &co, &all).unwrap();
        let mut nonzero = Vec::new();
        for c in Component::ELECTRIC {
            for p in c.valid_box(f.dims()).iter() {
                let v = f.get(c, p);
                if v != 0.0 {
                    nonzero.push((c, p, v));
                }
            }
        }
        nonzero.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(&b.1)));
        assert_eq!(
            nonzero,
            vec![
                (Component::Ex, [1, 1, 2], 0.5),
                (Component::Ex, [1, 2, 2], -0.5),
                (Component::Ey, [1, 1, 2], -0.5),
                (Component::Ey, [2, 1, 2], 0.5),
            ]
        );
    }

    #[test]
    fn hx_from_ey_above() {
        let (mut f, co, all) = setup(4);
        f.set(Component::Ey, [1, 1, 2], 1.0);
        apply_faraday_range(&mut f, &co, &all).unwrap();
        assert_eq!(f.get(Component::Hx, [1, 1, 1]), 0.5);
    }

    #[test]
    fn hx_from_ez_beside() {
        let (mut f, co, all) = setup(4);
        f.set(Component::Ez, [1, 2, 1], 1.0);
        apply_faraday_range(&mut f, &co, &all).unwrap();
        assert_eq!(f.get(Component::Hx, [1, 1, 1]), -0.5);
    }

    #[test]
    fn range_limits_the_update() {
        let (mut f, co, _) = setup(4);
        f.set(Component::Hz, [1, 1, 2], 1.0);
        apply_ampere_range(&mut f, &co, &Box3::new([0, 0, 0], [5, 2, 5])).unwrap();
        assert_eq!(f.get(Component::Ex, [1, 1, 2]), 0.5);
        assert_eq!(f.get(Component::Ex, [1, 2, 2]), 0.0);
    }

    #[test]
    fn out_of_bounds_is_rejected() {
        let (mut f, co, _) = setup(4);
        let too_big = Box3::new([0; 3], [6, 5, 5]);
        assert!(matches!(apply_ampere_range(&mut f, &co, &too_big), Err(Error::OutOfBounds { .. })));
        let past_hx = Box3::new([0; 3], [5, 5, 5]);
        assert!(update_component_range(&mut f, &co, Component::Hx, &past_hx).is_err());
    }

    #[test]
    fn pec_edges_are_forced_to_zero() {
        let (mut f, co, all) = setup(3);
        for c in Component::ELECTRIC {
            for p in c.valid_box(f.dims()).iter() {
                f.set(c, p, 1.0);
            }
        }
        apply_ampere_range(&mut f, &co, &all).unwrap();
        let d = f.dims();
        for c in Component::ELECTRIC {
            for p in c.valid_box(d).iter() {
                let expect = if c.is_pec(d, p[0], p[1], p[2]) { 0.0 } else { 1.0 };
                assert_eq!(f.get(c, p), expect);
            }
        }
    }
}
