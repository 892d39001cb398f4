//! Staggered index geometry.
//!
//! Every component is stored in an array of `(nx+1)·(ny+1)·(nz+1)` entries
//! with unit stride along x, so that all six arrays share the same strides and
//! a stencil offset is the same pointer delta for every component. Only a
//! sub-box of each array holds degrees of freedom; the rest is padding that
//! stays zero forever.
//!
//! With nodes at integer positions `(i, j, k)` the DoF `(i, j, k)` of each
//! component sits at, and has valid index extents:
//!
//! | component | position                  | extents              |
//! |-----------|---------------------------|----------------------|
//! | `Ex`      | `(i+½, j,   k  )` edge    | `nx × (ny+1) × (nz+1)` |
//! | `Ey`      | `(i,   j+½, k  )` edge    | `(nx+1) × ny × (nz+1)` |
//! | `Ez`      | `(i,   j,   k+½)` edge    | `(nx+1) × (ny+1) × nz` |
//! | `Hx`      | `(i,   j+½, k+½)` face    | `(nx+1) × ny × nz`     |
//! | `Hy`      | `(i+½, j,   k+½)` face    | `nx × (ny+1) × nz`     |
//! | `Hz`      | `(i+½, j+½, k  )` face    | `nx × ny × (nz+1)`     |
//!
//! Electric DoFs lying on the outer faces of the domain are the tangential PEC
//! edges; their "update" is forcing them to zero.

use std::fmt;
use std::str::FromStr;

/// Cell counts of the global grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Dims {
    pub nx: usize,
    pub ny: usize,
    pub nz: usize,
}

impl Dims {
    pub fn new(nx: usize, ny: usize, nz: usize) -> Self {
        Self { nx, ny, nz }
    }

    pub fn cube(n: usize) -> Self {
        Self::new(n, n, n)
    }

    pub fn cells(&self) -> [usize; 3] {
        [self.nx, self.ny, self.nz]
    }

    pub fn cell_count(&self) -> usize {
        self.nx * self.ny * self.nz
    }

    #[inline]
    pub fn stride_y(&self) -> usize {
        self.nx + 1
    }

    #[inline]
    pub fn stride_z(&self) -> usize {
        (self.nx + 1) * (self.ny + 1)
    }

    /// Length of each padded component array.
    pub fn array_len(&self) -> usize {
        (self.nx + 1) * (self.ny + 1) * (self.nz + 1)
    }

    /// Padded array shape, which bounds every component box.
    pub fn padded(&self) -> [usize; 3] {
        [self.nx + 1, self.ny + 1, self.nz + 1]
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        i + self.stride_y() * j + self.stride_z() * k
    }
}

/// One of the six scalar field components.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Component {
    Ex,
    Ey,
    Ez,
    Hx,
    Hy,
    Hz,
}

type Stencil = [(Component, [i64; 3]); 4];

impl Component {
    pub const ALL: [Component; 6] = [
        Component::Ex,
        Component::Ey,
        Component::Ez,
        Component::Hx,
        Component::Hy,
        Component::Hz,
    ];
    pub const ELECTRIC: [Component; 3] = [Component::Ex, Component::Ey, Component::Ez];
    pub const MAGNETIC: [Component; 3] = [Component::Hx, Component::Hy, Component::Hz];

    #[inline]
    pub fn slot(self) -> usize {
        self as usize
    }

    pub fn is_electric(self) -> bool {
        self.slot() < 3
    }

    /// Axis the component points along.
    pub fn axis(self) -> usize {
        self.slot() % 3
    }

    pub fn name(self) -> &'static str {
        match self {
            Component::Ex => "ex",
            Component::Ey => "ey",
            Component::Ez => "ez",
            Component::Hx => "hx",
            Component::Hy => "hy",
            Component::Hz => "hz",
        }
    }

    /// Number of valid indices per axis.
    pub fn extent(self, d: Dims) -> [usize; 3] {
        let [nx, ny, nz] = d.cells();
        match self {
            Component::Ex => [nx, ny + 1, nz + 1],
            Component::Ey => [nx + 1, ny, nz + 1],
            Component::Ez => [nx + 1, ny + 1, nz],
            Component::Hx => [nx + 1, ny, nz],
            Component::Hy => [nx, ny + 1, nz],
            Component::Hz => [nx, ny, nz + 1],
        }
    }

    pub fn valid_box(self, d: Dims) -> Box3 {
        Box3::new([0; 3], self.extent(d))
    }

    pub fn dof_count(self, d: Dims) -> usize {
        self.extent(d).iter().product()
    }

    /// True for tangential electric DoFs on the outer boundary (PEC edges).
    pub fn is_pec(self, d: Dims, i: usize, j: usize, k: usize) -> bool {
        match self {
            Component::Ex => j == 0 || j == d.ny || k == 0 || k == d.nz,
            Component::Ey => i == 0 || i == d.nx || k == 0 || k == d.nz,
            Component::Ez => i == 0 || i == d.nx || j == 0 || j == d.ny,
            _ => false,
        }
    }

    /// The four DoFs the curl update of this component reads, as
    /// `(component, offset)` pairs. Faces read their four bounding edges and
    /// edges read the four faces around them, so the relation is symmetric:
    /// `a` reads `b` iff `b` reads `a`.
    pub fn stencil(self) -> &'static Stencil {
        use Component::*;
        const EX: Stencil = [(Hz, [0, 0, 0]), (Hz, [0, -1, 0]), (Hy, [0, 0, 0]), (Hy, [0, 0, -1])];
        const EY: Stencil = [(Hx, [0, 0, 0]), (Hx, [0, 0, -1]), (Hz, [0, 0, 0]), (Hz, [-1, 0, 0])];
        const EZ: Stencil = [(Hy, [0, 0, 0]), (Hy, [-1, 0, 0]), (Hx, [0, 0, 0]), (Hx, [0, -1, 0])];
        const HX: Stencil = [(Ey, [0, 0, 1]), (Ey, [0, 0, 0]), (Ez, [0, 1, 0]), (Ez, [0, 0, 0])];
        const HY: Stencil = [(Ez, [1, 0, 0]), (Ez, [0, 0, 0]), (Ex, [0, 0, 1]), (Ex, [0, 0, 0])];
        const HZ: Stencil = [(Ex, [0, 1, 0]), (Ex, [0, 0, 0]), (Ey, [1, 0, 0]), (Ey, [0, 0, 0])];
        match self {
            Ex => &EX,
            Ey => &EY,
            Ez => &EZ,
            Hx => &HX,
            Hy => &HY,
            Hz => &HZ,
        }
    }
}

impl fmt::Display for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Component {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Component::ALL
            .into_iter()
            .find(|c| c.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown component `{s}`"))
    }
}

/// Half-open box of indices `[lo, hi)` per axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Box3 {
    pub lo: [usize; 3],
    pub hi: [usize; 3],
}

impl Box3 {
    pub const EMPTY: Box3 = Box3 { lo: [0; 3], hi: [0; 3] };

    pub fn new(lo: [usize; 3], hi: [usize; 3]) -> Self {
        Self { lo, hi }
    }

    pub fn is_empty(&self) -> bool {
        (0..3).any(|a| self.lo[a] >= self.hi[a])
    }

    pub fn count(&self) -> usize {
        if self.is_empty() {
            0
        } else {
            (0..3).map(|a| self.hi[a] - self.lo[a]).product()
        }
    }

    pub fn contains(&self, p: [usize; 3]) -> bool {
        (0..3).all(|a| self.lo[a] <= p[a] && p[a] < self.hi[a])
    }

    /// True if `other` lies inside `self` (empty boxes lie everywhere).
    pub fn covers(&self, other: &Box3) -> bool {
        other.is_empty() || (0..3).all(|a| self.lo[a] <= other.lo[a] && other.hi[a] <= self.hi[a])
    }

    pub fn intersect(&self, other: &Box3) -> Box3 {
        let mut out = *self;
        for a in 0..3 {
            out.lo[a] = self.lo[a].max(other.lo[a]);
            out.hi[a] = self.hi[a].min(other.hi[a]);
        }
        if out.is_empty() {
            Box3::EMPTY
        } else {
            out
        }
    }

    /// Restriction to a single z plane.
    pub fn plane(&self, k: usize) -> Box3 {
        let mut out = *self;
        out.lo[2] = k;
        out.hi[2] = k + 1;
        self.intersect(&out)
    }

    /// `self \ other` as at most six disjoint boxes (x slabs, then y, then z).
    pub fn difference(&self, other: &Box3) -> Vec<Box3> {
        let cut = self.intersect(other);
        if cut.is_empty() {
            return if self.is_empty() { Vec::new() } else { vec![*self] };
        }
        let mut out = Vec::with_capacity(6);
        let mut rest = *self;
        for a in 0..3 {
            if rest.lo[a] < cut.lo[a] {
                let mut slab = rest;
                slab.hi[a] = cut.lo[a];
                out.push(slab);
            }
            if cut.hi[a] < rest.hi[a] {
                let mut slab = rest;
                slab.lo[a] = cut.hi[a];
                out.push(slab);
            }
            rest.lo[a] = cut.lo[a];
            rest.hi[a] = cut.hi[a];
        }
        out
    }

    /// Iterates the indices in storage order (x fastest).
    pub fn iter(&self) -> impl Iterator<Item = [usize; 3]> + '_ {
        let b = if self.is_empty() { Box3::EMPTY } else { *self };
        (b.lo[2]..b.hi[2]).flat_map(move |k| {
            (b.lo[1]..b.hi[1]).flat_map(move |j| (b.lo[0]..b.hi[0]).map(move |i| [i, j, k]))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn extents_match_dof_counts() {
        let d = Dims::new(3, 4, 5);
        assert_eq!(Component::Ex.dof_count(d), 3 * 5 * 6);
        assert_eq!(Component::Hz.dof_count(d), 3 * 4 * 6);
        for c in Component::ALL {
            let e = c.extent(d);
            assert!(e.iter().zip(d.padded()).all(|(a, b)| *a <= b));
        }
    }

    #[test]
    fn stencil_is_symmetric() {
        for a in Component::ALL {
            for &(b, off) in a.stencil() {
                let back = b.stencil().iter().any(|&(c, o)| c == a && o.iter().zip(off).all(|(x, y)| *x == -y));
                assert!(back, "{a} reads {b} at {off:?} but not vice versa");
            }
        }
    }

    #[test]
    fn difference_partitions() {
        let outer = Box3::new([0, 0, 0], [5, 6, 7]);
        let inner = Box3::new([1, 2, 0], [4, 6, 3]);
        let parts = outer.difference(&inner);
        let total: usize = parts.iter().map(Box3::count).sum();
        assert_eq!(total + inner.count(), outer.count());
        for p in outer.iter() {
            let hits = parts.iter().filter(|b| b.contains(p)).count() + inner.contains(p) as usize;
            assert_eq!(hits, 1);
        }
    }

    #[test]
    fn difference_of_disjoint_is_self() {
        let a = Box3::new([0, 0, 0], [2, 2, 2]);
        let b = Box3::new([5, 5, 5], [6, 6, 6]);
        assert_eq!(a.difference(&b), vec![a]);
        assert!(Box3::EMPTY.difference(&b).is_empty());
    }

    #[test]
    fn pec_edges() {
        let d = Dims::cube(4);
        assert!(Component::Ex.is_pec(d, 1, 0, 2));
        assert!(!Component::Ex.is_pec(d, 0, 1, 1));
        assert!(Component::Ey.is_pec(d, 4, 1, 1));
        assert!(!Component::Hx.is_pec(d, 0, 0, 0));
    }
}
