//! Direct evaluation of the Yee update equations, one DoF at a time.
//!
//! Deliberately shares nothing with the solver beyond the numeric trait and
//! the input types: own storage (x slowest, exact staggered shapes), own
//! coefficient arrays, own boundary handling. The arithmetic per DoF is
//! `u + a·(p1 − p0) − b·(q1 − q0)` in that order, so agreement is bitwise.

#![allow(dead_code)]

use yeecache::{Component, FieldSet, GridSpec, ProbeRecord, ProbeSpec, Real, SourceSpec};

pub struct Arr<T> {
    n: [usize; 3],
    v: Vec<T>,
}

impl<T: Real> Arr<T> {
    fn new(n: [usize; 3]) -> Self {
        Self { n, v: vec![T::ZERO; n[0] * n[1] * n[2]] }
    }

    fn at(&self, i: usize, j: usize, k: usize) -> usize {
        assert!(i < self.n[0] && j < self.n[1] && k < self.n[2], "({i},{j},{k}) outside {:?}", self.n);
        (i * self.n[1] + j) * self.n[2] + k
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> T {
        self.v[self.at(i, j, k)]
    }

    fn set(&mut self, i: usize, j: usize, k: usize, x: T) {
        let p = self.at(i, j, k);
        self.v[p] = x;
    }
}

pub struct Naive<T> {
    pub nx: usize,
    pub ny: usize,
    pub nz: usize,
    pub ex: Arr<T>,
    pub ey: Arr<T>,
    pub ez: Arr<T>,
    pub hx: Arr<T>,
    pub hy: Arr<T>,
    pub hz: Arr<T>,
    // c·dt over primal (cell) and dual (node) spacings.
    px: Vec<T>,
    py: Vec<T>,
    pz: Vec<T>,
    qx: Vec<T>,
    qy: Vec<T>,
    qz: Vec<T>,
    dt: f64,
    pub step: u64,
}

fn ratios<T: Real>(cdt: f64, h: &[f64]) -> (Vec<T>, Vec<T>) {
    let n = h.len();
    let primal = h.iter().map(|x| T::from_f64(cdt / x)).collect();
    let mut dual = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let w = if i == 0 {
            0.5 * h[0]
        } else if i == n {
            0.5 * h[n - 1]
        } else {
            0.5 * (h[i - 1] + h[i])
        };
        dual.push(T::from_f64(cdt / w));
    }
    (primal, dual)
}

#[inline(never)]
fn upd<T: Real>(u: T, a: T, p1: T, p0: T, b: T, q1: T, q0: T) -> T {
    u + a * (p1 - p0) - b * (q1 - q0)
}

impl<T: Real> Naive<T> {
    pub fn new(grid: &GridSpec) -> Self {
        let (nx, ny, nz) = (grid.dx().len(), grid.dy().len(), grid.dz().len());
        let cdt = grid.c() * grid.dt();
        let (px, qx) = ratios(cdt, grid.dx());
        let (py, qy) = ratios(cdt, grid.dy());
        let (pz, qz) = ratios(cdt, grid.dz());
        Self {
            nx,
            ny,
            nz,
            ex: Arr::new([nx, ny + 1, nz + 1]),
            ey: Arr::new([nx + 1, ny, nz + 1]),
            ez: Arr::new([nx + 1, ny + 1, nz]),
            hx: Arr::new([nx + 1, ny, nz]),
            hy: Arr::new([nx, ny + 1, nz]),
            hz: Arr::new([nx, ny, nz + 1]),
            px,
            py,
            pz,
            qx,
            qy,
            qz,
            dt: grid.dt(),
            step: 0,
        }
    }

    fn arr(&self, c: Component) -> &Arr<T> {
        match c {
            Component::Ex => &self.ex,
            Component::Ey => &self.ey,
            Component::Ez => &self.ez,
            Component::Hx => &self.hx,
            Component::Hy => &self.hy,
            Component::Hz => &self.hz,
        }
    }

    fn arr_mut(&mut self, c: Component) -> &mut Arr<T> {
        match c {
            Component::Ex => &mut self.ex,
            Component::Ey => &mut self.ey,
            Component::Ez => &mut self.ez,
            Component::Hx => &mut self.hx,
            Component::Hy => &mut self.hy,
            Component::Hz => &mut self.hz,
        }
    }

    /// Copies every DoF from a solver state.
    pub fn load(&mut self, f: &FieldSet<T>) {
        for c in Component::ALL {
            let n = self.arr(c).n;
            for i in 0..n[0] {
                for j in 0..n[1] {
                    for k in 0..n[2] {
                        let v = f.get(c, [i, j, k]);
                        self.arr_mut(c).set(i, j, k, v);
                    }
                }
            }
        }
        self.step = f.step_index;
    }

    /// First differing DoF, comparing bit patterns.
    pub fn diff(&self, f: &FieldSet<T>) -> Option<String> {
        for c in Component::ALL {
            let a = self.arr(c);
            for i in 0..a.n[0] {
                for j in 0..a.n[1] {
                    for k in 0..a.n[2] {
                        let (x, y) = (a.get(i, j, k), f.get(c, [i, j, k]));
                        if x.to_f64().to_bits() != y.to_f64().to_bits() {
                            return Some(format!("{c} ({i},{j},{k}): oracle {x} vs solver {y}"));
                        }
                    }
                }
            }
        }
        None
    }

    pub fn step_once(&mut self, sources: &[SourceSpec]) {
        let (nx, ny, nz) = (self.nx, self.ny, self.nz);
        let z = T::ZERO;
        for i in 0..nx {
            for j in 0..=ny {
                for k in 0..=nz {
                    let v = if j == 0 || j == ny || k == 0 || k == nz {
                        z
                    } else {
                        upd(
                            self.ex.get(i, j, k),
                            self.qy[j],
                            self.hz.get(i, j, k),
                            self.hz.get(i, j - 1, k),
                            self.qz[k],
                            self.hy.get(i, j, k),
                            self.hy.get(i, j, k - 1),
                        )
                    };
                    self.ex.set(i, j, k, v);
                }
            }
        }
        for i in 0..=nx {
            for j in 0..ny {
                for k in 0..=nz {
                    let v = if i == 0 || i == nx || k == 0 || k == nz {
                        z
                    } else {
                        upd(
                            self.ey.get(i, j, k),
                            self.qz[k],
                            self.hx.get(i, j, k),
                            self.hx.get(i, j, k - 1),
                            self.qx[i],
                            self.hz.get(i, j, k),
                            self.hz.get(i - 1, j, k),
                        )
                    };
                    self.ey.set(i, j, k, v);
                }
            }
        }
        for i in 0..=nx {
            for j in 0..=ny {
                for k in 0..nz {
                    let v = if i == 0 || i == nx || j == 0 || j == ny {
                        z
                    } else {
                        upd(
                            self.ez.get(i, j, k),
                            self.qx[i],
                            self.hy.get(i, j, k),
                            self.hy.get(i - 1, j, k),
                            self.qy[j],
                            self.hx.get(i, j, k),
                            self.hx.get(i, j - 1, k),
                        )
                    };
                    self.ez.set(i, j, k, v);
                }
            }
        }
        for s in sources {
            if s.duration.is_none_or(|d| self.step < d) {
                let inc = T::from_f64(-self.dt * s.waveform.value(self.step as f64 * self.dt));
                let [i, j, k] = s.position;
                let a = self.arr_mut(s.component);
                let v = a.get(i, j, k) + inc;
                a.set(i, j, k, v);
            }
        }
        for i in 0..=nx {
            for j in 0..ny {
                for k in 0..nz {
                    let v = upd(
                        self.hx.get(i, j, k),
                        self.pz[k],
                        self.ey.get(i, j, k + 1),
                        self.ey.get(i, j, k),
                        self.py[j],
                        self.ez.get(i, j + 1, k),
                        self.ez.get(i, j, k),
                    );
                    self.hx.set(i, j, k, v);
                }
            }
        }
        for i in 0..nx {
            for j in 0..=ny {
                for k in 0..nz {
                    let v = upd(
                        self.hy.get(i, j, k),
                        self.px[i],
                        self.ez.get(i + 1, j, k),
                        self.ez.get(i, j, k),
                        self.pz[k],
                        self.ex.get(i, j, k + 1),
                        self.ex.get(i, j, k),
                    );
                    self.hy.set(i, j, k, v);
                }
            }
        }
        for i in 0..nx {
            for j in 0..ny {
                for k in 0..=nz {
                    let v = upd(
                        self.hz.get(i, j, k),
                        self.py[j],
                        self.ex.get(i, j + 1, k),
                        self.ex.get(i, j, k),
                        self.px[i],
                        self.ey.get(i + 1, j, k),
                        self.ey.get(i, j, k),
                    );
                    self.hz.set(i, j, k, v);
                }
            }
        }
        self.step += 1;
    }

    /// Runs `n` steps, sampling probes after each completed step.
    pub fn run(&mut self, n: u64, sources: &[SourceSpec], probes: &[ProbeSpec]) -> Vec<ProbeRecord<T>> {
        let mut out = Vec::new();
        for _ in 0..n {
            self.step_once(sources);
            for (id, p) in probes.iter().enumerate() {
                if self.step.is_multiple_of(p.stride) {
                    let [i, j, k] = p.position;
                    out.push(ProbeRecord {
                        step: self.step,
                        time: self.step as f64 * self.dt,
                        probe: id,
                        value: self.arr(p.component).get(i, j, k),
                    });
                }
            }
        }
        out
    }
}
