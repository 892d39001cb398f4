use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::index::Dims;
use crate::real::Real;

/// Speed of light in vacuum, m/s.
pub const VACUUM_LIGHT_SPEED: f64 = 299_792_458.0;

/// Default CFL safety factor.
pub const DEFAULT_SAFETY: f64 = 0.99;

/// Field storage precision, for configuration and reporting.
///
/// The solver itself is generic over [`Real`]; this enum only names the two
/// instantiations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Precision {
    Single,
    Double,
}

impl Precision {
    pub fn bytes(self) -> usize {
        match self {
            Precision::Single => 4,
            Precision::Double => 8,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Precision::Single => "single",
            Precision::Double => "double",
        }
    }
}

impl fmt::Display for Precision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Precision {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "single" | "f32" | "32" => Ok(Precision::Single),
            "double" | "f64" | "64" => Ok(Precision::Double),
            _ => Err(format!("unknown precision `{s}`")),
        }
    }
}

/// Cartesian staggered mesh: per-axis cell sizes, time step and wave speed.
///
/// Spacings are one-dimensional arrays so that the update coefficients fit in
/// cache (or registers) regardless of the grid size.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    dx: Vec<f64>,
    dy: Vec<f64>,
    dz: Vec<f64>,
    dt: f64,
    c: f64,
}

impl GridSpec {
    pub fn new(dx: Vec<f64>, dy: Vec<f64>, dz: Vec<f64>, dt: f64, c: f64) -> Result<Self> {
        for (name, d) in [("dx", &dx), ("dy", &dy), ("dz", &dz)] {
            if d.is_empty() {
                return Err(Error::InvalidGrid(format!("{name} is empty")));
            }
            if let Some(bad) = d.iter().find(|h| !(h.is_finite() && **h > 0.0)) {
                return Err(Error::InvalidGrid(format!("{name} contains non-positive spacing {bad}")));
            }
        }
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::InvalidGrid(format!("time step must be positive, got {dt}")));
        }
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::InvalidGrid(format!("wave speed must be positive, got {c}")));
        }
        Ok(Self { dx, dy, dz, dt, c })
    }

    /// Uniform spacing `h` on an `nx × ny × nz` grid.
    pub fn uniform(dims: Dims, h: f64, dt: f64, c: f64) -> Result<Self> {
        Self::new(vec![h; dims.nx], vec![h; dims.ny], vec![h; dims.nz], dt, c)
    }

    /// Vacuum cube of `n³` cells of side `h`, with `dt` at the default CFL safety.
    pub fn cube(n: usize, h: f64) -> Result<Self> {
        let grid = Self::uniform(Dims::cube(n), h, 1.0, VACUUM_LIGHT_SPEED)?;
        let dt = stable_dt(&grid, DEFAULT_SAFETY);
        grid.with_dt(dt)
    }

    pub fn with_dt(mut self, dt: f64) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::InvalidGrid(format!("time step must be positive, got {dt}")));
        }
        self.dt = dt;
        Ok(self)
    }

    pub fn dims(&self) -> Dims {
        Dims::new(self.dx.len(), self.dy.len(), self.dz.len())
    }

    pub fn dx(&self) -> &[f64] {
        &self.dx
    }

    pub fn dy(&self) -> &[f64] {
        &self.dy
    }

    pub fn dz(&self) -> &[f64] {
        &self.dz
    }

    pub fn spacing(&self, axis: usize) -> &[f64] {
        match axis {
            0 => &self.dx,
            1 => &self.dy,
            _ => &self.dz,
        }
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    /// Dual (node-centred) spacing along `axis`: half-sums of the adjacent
    /// cells, half a cell on the boundary nodes. Length `n + 1`.
    pub fn dual_spacing(&self, axis: usize) -> Vec<f64> {
        let d = self.spacing(axis);
        let n = d.len();
        (0..=n)
            .map(|i| match (i, i == n) {
                (0, _) => 0.5 * d[0],
                (_, true) => 0.5 * d[n - 1],
                _ => 0.5 * (d[i - 1] + d[i]),
            })
            .collect()
    }

    pub fn check_stable(&self) -> Result<()> {
        let limit = stable_dt(self, 1.0);
        if self.dt > limit {
            Err(Error::Unstable { dt: self.dt, limit })
        } else {
            Ok(())
        }
    }
}

/// Largest stable leapfrog time step for this mesh, scaled by `safety`:
/// `safety / (c·sqrt(1/min(dx)² + 1/min(dy)² + 1/min(dz)²))`.
pub fn stable_dt(grid: &GridSpec, safety: f64) -> f64 {
    let min = |d: &[f64]| d.iter().copied().fold(f64::INFINITY, f64::min);
    let inv2 = |h: f64| 1.0 / (h * h);
    let s = inv2(min(grid.dx())) + inv2(min(grid.dy())) + inv2(min(grid.dz()));
    safety / (grid.c() * s.sqrt())
}

/// Update factors `c·dt/Δ` as one-dimensional arrays.
///
/// `cdx`, `cdy`, `cdz` use the primal cell sizes and drive the Faraday (H)
/// update; the `dual_*` arrays use node-centred spacings and drive the Ampere
/// (E) update. On a uniform grid both coincide away from the boundary. The
/// arrays are always positive; the kernels apply the curl signs.
#[derive(Debug, Clone, PartialEq)]
pub struct Coefficients<T> {
    pub dims: Dims,
    pub dt: f64,
    pub c: f64,
    pub cdx: Vec<T>,
    pub cdy: Vec<T>,
    pub cdz: Vec<T>,
    pub dual_cdx: Vec<T>,
    pub dual_cdy: Vec<T>,
    pub dual_cdz: Vec<T>,
    stable_limit: f64,
}

impl<T: Real> Coefficients<T> {
    pub fn new(grid: &GridSpec) -> Self {
        let cdt = grid.c() * grid.dt();
        let ratio = |d: &[f64]| d.iter().map(|h| T::from_f64(cdt / h)).collect::<Vec<_>>();
        Self {
            dims: grid.dims(),
            dt: grid.dt(),
            c: grid.c(),
            cdx: ratio(grid.dx()),
            cdy: ratio(grid.dy()),
            cdz: ratio(grid.dz()),
            dual_cdx: ratio(&grid.dual_spacing(0)),
            dual_cdy: ratio(&grid.dual_spacing(1)),
            dual_cdz: ratio(&grid.dual_spacing(2)),
            stable_limit: stable_dt(grid, 1.0),
        }
    }

    /// Stability limit (`safety = 1`) of the grid these were built from.
    pub fn stable_limit(&self) -> f64 {
        self.stable_limit
    }

    pub fn check_stable(&self) -> Result<()> {
        if self.dt > self.stable_limit {
            Err(Error::Unstable { dt: self.dt, limit: self.stable_limit })
        } else {
            Ok(())
        }
    }
}

/// Builds the coefficient arrays for `grid`.
pub fn build_coefficients<T: Real>(grid: &GridSpec) -> Coefficients<T> {
    Coefficients::new(grid)
}
