//! Box tiles over the global index space and their interior/interface DoF sets.
//!
//! Tiles are index ranges into the global arrays; no field data is copied.
//! Along each axis tile `t` owns the DoF indices `[b_t, b_{t+1})`, with the
//! last tile also owning index `n` (the extra node layer). Ownership is the
//! same for all six components, which makes every per-tile set a single box.
//!
//! The interior sets follow from the stencil alone. Writing `pre(S, c)` for
//! the DoFs of `c` whose reads all fall in `S`:
//!
//! * `A1 = own ∩ pre(own)` (E), `F1 = own ∩ pre(A1)` (H): a tile can run
//!   Ampere then Faraday on these without any neighbour being up to date.
//! * `A2 = own ∩ pre(F1)`, `F2 = own ∩ pre(A2)`: the second step of a gathered
//!   pair, one more cell inwards wherever the tile has a neighbour.
//! * the tiled variant uses `own ∩ pre(own)` for both fields.
//!
//! Reads that leave the grid never constrain anything, so global PEC walls
//! do not shrink a tile. The interface set of a tile is `own − interior`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::index::{Box3, Component, Dims};
use crate::schedulers::Variant;

/// Which step of a gathered pair a set refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sweep {
    First,
    Second,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tile {
    pub id: usize,
    /// Position in the tile grid.
    pub coords: [usize; 3],
    /// Cells covered by the tile.
    pub cells: Box3,
    /// Neighbour ids across the `-x, +x, -y, +y, -z, +z` faces.
    pub neighbors: [Option<usize>; 6],
}

/// Split on the command line: `SXxSYxSZ` or `auto`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SplitSpec {
    Auto,
    Fixed([usize; 3]),
}

impl SplitSpec {
    pub fn resolve(&self, dims: Dims, cache_bytes: u64, precision_bytes: usize, cores: usize) -> [usize; 3] {
        match *self {
            SplitSpec::Fixed(s) => s,
            SplitSpec::Auto => auto_split(dims, cache_bytes, precision_bytes, cores),
        }
    }
}

impl FromStr for SplitSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("auto") {
            return Ok(SplitSpec::Auto);
        }
        let parts: Vec<_> = s.split(['x', 'X']).map(|p| p.parse::<usize>()).collect();
        match parts.as_slice() {
            [Ok(a), Ok(b), Ok(c)] => Ok(SplitSpec::Fixed([*a, *b, *c])),
            _ => Err(Error::SplitSyntax(s.to_string())),
        }
    }
}

impl fmt::Display for SplitSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SplitSpec::Auto => f.write_str("auto"),
            SplitSpec::Fixed([a, b, c]) => write!(f, "{a}x{b}x{c}"),
        }
    }
}

const INF: i64 = 1 << 40;

/// Box with unbounded sides on the global boundary.
#[derive(Debug, Clone, Copy)]
struct IBox {
    lo: [i64; 3],
    hi: [i64; 3],
}

impl IBox {
    fn meet(self, o: IBox) -> IBox {
        IBox {
            lo: std::array::from_fn(|a| self.lo[a].max(o.lo[a])),
            hi: std::array::from_fn(|a| self.hi[a].min(o.hi[a])),
        }
    }

    fn shift(self, off: [i64; 3]) -> IBox {
        IBox {
            lo: std::array::from_fn(|a| self.lo[a] - off[a]),
            hi: std::array::from_fn(|a| self.hi[a] - off[a]),
        }
    }

    fn clip(self, extent: [usize; 3]) -> Box3 {
        let b = Box3::new(
            std::array::from_fn(|a| self.lo[a].clamp(0, extent[a] as i64) as usize),
            std::array::from_fn(|a| self.hi[a].clamp(0, extent[a] as i64) as usize),
        );
        if b.is_empty() {
            Box3::EMPTY
        } else {
            b
        }
    }
}

/// `own ∩ pre(S, c)` for every component.
fn shrink(own: IBox, s: &[IBox; 6]) -> [IBox; 6] {
    std::array::from_fn(|slot| {
        Component::ALL[slot]
            .stencil()
            .iter()
            .fold(own, |acc, &(r, off)| acc.meet(s[r.slot()].shift(off)))
    })
}

#[derive(Debug, Clone)]
struct Classes {
    owned: [Box3; 6],
    tiled: [Box3; 6],
    first: [Box3; 6],
    second: [Box3; 6],
}

/// Tiles of one split plus their classified DoF sets.
#[derive(Debug, Clone)]
pub struct TileLayout {
    dims: Dims,
    split: [usize; 3],
    bounds: [Vec<usize>; 3],
    tiles: Vec<Tile>,
    classes: Vec<Classes>,
}

/// Splits `grid` into `split` tiles; leading tiles take one extra cell when
/// an axis does not divide evenly.
pub fn make_layout(grid: &GridSpec, split: [usize; 3]) -> Result<TileLayout> {
    TileLayout::new(grid.dims(), split)
}

fn partition(n: usize, s: usize) -> Vec<usize> {
    let (base, rem) = (n / s, n % s);
    let mut b = Vec::with_capacity(s + 1);
    b.push(0);
    for t in 0..s {
        b.push(b[t] + base + usize::from(t < rem));
    }
    b
}

impl TileLayout {
    pub fn new(dims: Dims, split: [usize; 3]) -> Result<Self> {
        let cells = dims.cells();
        if (0..3).any(|a| split[a] == 0 || split[a] > cells[a]) {
            return Err(Error::InvalidSplit { split, cells });
        }
        let bounds: [Vec<usize>; 3] = std::array::from_fn(|a| partition(cells[a], split[a]));
        let [sx, sy, sz] = split;
        let id = |c: [usize; 3]| c[0] + sx * (c[1] + sy * c[2]);
        let mut tiles = Vec::with_capacity(sx * sy * sz);
        let mut classes = Vec::with_capacity(sx * sy * sz);
        for cz in 0..sz {
            for cy in 0..sy {
                for cx in 0..sx {
                    let coords = [cx, cy, cz];
                    let mut neighbors = [None; 6];
                    for a in 0..3 {
                        if coords[a] > 0 {
                            let mut n = coords;
                            n[a] -= 1;
                            neighbors[2 * a] = Some(id(n));
                        }
                        if coords[a] + 1 < split[a] {
                            let mut n = coords;
                            n[a] += 1;
                            neighbors[2 * a + 1] = Some(id(n));
                        }
                    }
                    let cells = Box3::new(
                        std::array::from_fn(|a| bounds[a][coords[a]]),
                        std::array::from_fn(|a| bounds[a][coords[a] + 1]),
                    );
                    let own = IBox {
                        lo: std::array::from_fn(|a| if coords[a] == 0 { -INF } else { cells.lo[a] as i64 }),
                        hi: std::array::from_fn(|a| if coords[a] + 1 == split[a] { INF } else { cells.hi[a] as i64 }),
                    };
                    classes.push(classify(dims, own));
                    tiles.push(Tile { id: id(coords), coords, cells, neighbors });
                }
            }
        }
        Ok(Self { dims, split, bounds, tiles, classes })
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn split(&self) -> [usize; 3] {
        self.split
    }

    pub fn tiles(&self) -> &[Tile] {
        &self.tiles
    }

    pub fn tile(&self, id: usize) -> &Tile {
        &self.tiles[id]
    }

    pub fn len(&self) -> usize {
        self.tiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tiles.is_empty()
    }

    /// Tile boundaries along `axis`, `split[axis] + 1` entries.
    pub fn bounds(&self, axis: usize) -> &[usize] {
        &self.bounds[axis]
    }

    /// Tile owning DoF index `pos` (of any component).
    pub fn tile_of(&self, pos: [usize; 3]) -> usize {
        let c: [usize; 3] = std::array::from_fn(|a| {
            let b = &self.bounds[a];
            // partition_point gives the first boundary above pos; index n maps to the last tile.
            b[1..].partition_point(|&x| x <= pos[a]).min(self.split[a] - 1)
        });
        c[0] + self.split[0] * (c[1] + self.split[1] * c[2])
    }

    /// All DoFs of `c` owned by `tile`.
    pub fn owned_box(&self, tile: usize, c: Component) -> Box3 {
        self.classes[tile].owned[c.slot()]
    }

    /// The DoFs of `c` a volume pass of `tile` may update for `variant`
    /// without reading anything a neighbour has not finished.
    ///
    /// `sweep` only matters for [`Variant::TwoStep`]; single-step variants
    /// always use the first sweep.
    pub fn interior_dof_box(&self, tile: usize, variant: Variant, c: Component, sweep: Sweep) -> Box3 {
        let cl = &self.classes[tile];
        let set = match (variant, sweep) {
            (Variant::Standard, _) => &cl.owned,
            (Variant::Tiled, _) => &cl.tiled,
            (Variant::TwoStep, Sweep::Second) => &cl.second,
            _ => &cl.first,
        };
        set[c.slot()]
    }

    /// Owned DoFs of `c` outside the interior box, as disjoint boxes.
    pub fn interface_boxes(&self, tile: usize, variant: Variant, c: Component, sweep: Sweep) -> Vec<Box3> {
        self.owned_box(tile, c)
            .difference(&self.interior_dof_box(tile, variant, c, sweep))
    }

    /// Interface E work of all tiles as `(tile, component, box)`.
    pub fn interface_ampere(&self, variant: Variant, sweep: Sweep) -> Vec<(usize, Component, Box3)> {
        self.interface_of(variant, sweep, Component::ELECTRIC)
    }

    /// Interface H work of all tiles as `(tile, component, box)`.
    pub fn interface_faraday(&self, variant: Variant, sweep: Sweep) -> Vec<(usize, Component, Box3)> {
        self.interface_of(variant, sweep, Component::MAGNETIC)
    }

    fn interface_of(&self, variant: Variant, sweep: Sweep, comps: [Component; 3]) -> Vec<(usize, Component, Box3)> {
        let mut out = Vec::new();
        for t in 0..self.len() {
            for c in comps {
                for b in self.interface_boxes(t, variant, c, sweep) {
                    out.push((t, c, b));
                }
            }
        }
        out
    }

    /// Number of interface DoFs of `c` summed over all tiles.
    pub fn interface_count(&self, variant: Variant, c: Component, sweep: Sweep) -> usize {
        (0..self.len())
            .map(|t| self.interface_boxes(t, variant, c, sweep).iter().map(Box3::count).sum::<usize>())
            .sum()
    }
}

fn classify(dims: Dims, own: IBox) -> Classes {
    let owned = [own; 6];
    let tiled = shrink(own, &owned);
    let mut first = tiled;
    let f1 = shrink(own, &first);
    first[3..].copy_from_slice(&f1[3..]);
    let a2 = shrink(own, &first);
    let mut second = a2;
    let f2 = shrink(own, &a2);
    second[3..].copy_from_slice(&f2[3..]);
    let clip = |s: [IBox; 6]| std::array::from_fn(|slot| s[slot].clip(Component::ALL[slot].extent(dims)));
    Classes { owned: clip(owned), tiled: clip(tiled), first: clip(first), second: clip(second) }
}

fn ceil_div(a: usize, b: usize) -> usize {
    a.div_ceil(b)
}

/// Largest tile footprint of a split: six arrays over the biggest tile.
pub fn tile_footprint(dims: Dims, split: [usize; 3], precision_bytes: usize) -> u64 {
    let [nx, ny, nz] = dims.cells();
    6 * precision_bytes as u64
        * (ceil_div(nx, split[0]) * ceil_div(ny, split[1]) * ceil_div(nz, split[2])) as u64
}

/// Picks a split whose largest tile keeps its six arrays within
/// `cache_bytes / cores`.
///
/// Among the fitting splits the one with the least cut area wins, cuts across
/// x counting double: they chop the unit-stride rows, so tiles come out
/// elongated along x. If nothing fits the finest split is returned.
pub fn auto_split(dims: Dims, cache_bytes: u64, precision_bytes: usize, cores: usize) -> [usize; 3] {
    let budget = cache_bytes / cores.max(1) as u64;
    if tile_footprint(dims, [1, 1, 1], precision_bytes) <= budget {
        return [1, 1, 1];
    }
    let [nx, ny, nz] = dims.cells();
    let (nx64, ny64, nz64) = (nx as u64, ny as u64, nz as u64);
    let per_cell = 6 * precision_bytes as u64;
    let mut best: Option<(u64, [usize; 3])> = None;
    for sx in 1..=nx {
        let cx = ceil_div(nx, sx) as u64;
        for sy in 1..=ny {
            let cy = ceil_div(ny, sy) as u64;
            let side = budget / (per_cell * cx * cy);
            if side == 0 {
                continue;
            }
            let sz = ceil_div(nz, side.min(nz64) as usize);
            let cost = 2 * (sx as u64 - 1) * ny64 * nz64 + (sy as u64 - 1) * nx64 * nz64 + (sz as u64 - 1) * nx64 * ny64;
            if best.is_none_or(|(c, _)| cost < c) {
                best = Some((cost, [sx, sy, sz]));
            }
        }
    }
    best.map_or([nx, ny, nz], |(_, s)| s)
}
