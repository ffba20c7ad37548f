use serde::{Deserialize, Serialize};

use super::source::SourceModel;
use super::CanonicalFieldState;
use crate::error::FieldError;
use crate::grid::ops::Neighbors;
use crate::grid::{check_periodic, Grid3, ScalarField, VectorField};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    #[default]
    Rk4,
    /// Drift `(A, χ)` half a step, kick `(Y, W)`, drift again.
    Verlet,
}

/// Time derivatives of the four canonical fields.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldRates {
    pub a: VectorField,
    pub y: VectorField,
    pub w: ScalarField,
    pub chi: ScalarField,
}

// Flat layout: A (3 blocks), Y (3 blocks), W, χ.
const BLOCKS: usize = 8;
const A0: usize = 0;
const Y0: usize = 3;
const W: usize = 6;
const CHI: usize = 7;

/// Distance between blocks in the flat layout. The padding keeps blocks of
/// power-of-two grids from mapping onto the same cache sets.
fn stride(len: usize) -> usize {
    len + 64
}

struct Kernel {
    nb: Neighbors,
    stride: usize,
    s: [f64; 3],
    /// scratch: `Y - ∇W`, `B = curl A`, and one row per output
    ka: Vec<f64>,
    b: Vec<f64>,
    rows: Vec<f64>,
}

/// Row offsets `(row, y+, y-, z+, z-)` for every `(j, k)` line of nodes.
#[inline(always)]
fn for_rows(nb: &Neighbors, mut f: impl FnMut(usize, usize, usize, usize, usize)) {
    let [nx, ny, nz] = nb.n;
    for k in 0..nz {
        let (kp, km) = (nb.plus[2][k], nb.minus[2][k]);
        for j in 0..ny {
            let (jp, jm) = (nb.plus[1][j], nb.minus[1][j]);
            f(nx * (j + ny * k), nx * (jp + ny * k), nx * (jm + ny * k), nx * (j + ny * kp), nx * (j + ny * km));
        }
    }
}

#[inline(always)]
fn seg(f: &[f64], start: usize, nx: usize) -> &[f64] {
    &f[start..start + nx]
}

/// Periodic centered x-difference of a row, combined into `out` by `op`.
#[inline(always)]
fn xdiff(out: &mut [f64], f: &[f64], s: f64, op: impl Fn(&mut f64, f64)) {
    let nx = f.len();
    op(&mut out[0], (f[1] - f[nx - 1]) * s);
    for ((o, p), m) in out[1..nx - 1].iter_mut().zip(&f[2..]).zip(&f[..nx - 2]) {
        op(o, (p - m) * s);
    }
    op(&mut out[nx - 1], (f[0] - f[nx - 2]) * s);
}

impl Kernel {
    fn new(grid: &Grid3) -> Self {
        let h = grid.h();
        Kernel {
            nb: Neighbors::new(grid),
            stride: stride(grid.len()),
            s: [0.5 / h[0], 0.5 / h[1], 0.5 / h[2]],
            ka: vec![0.0; 3 * stride(grid.len())],
            b: vec![0.0; 3 * stride(grid.len())],
            rows: vec![0.0; 7 * grid.n()[0]],
        }
    }

    /// Right-hand side at time `t`. Rows of the result are handed to
    /// `emit(block, row_start, values)` as soon as they are complete; the
    /// drift rates `Y - ∇W` are also kept in `self.ka`.
    fn rhs_with(&mut self, source: &SourceModel, st: &[f64], t: f64, mut emit: impl FnMut(usize, usize, &[f64])) {
        let n = self.stride;
        let [sx, sy, sz] = self.s;
        let nx = self.nb.n[0];
        let Kernel { nb, ka, b, rows, .. } = self;
        let (ax, ay, az) = (&st[0..n], &st[n..2 * n], &st[2 * n..3 * n]);
        let (yx, yy, yz) = (&st[3 * n..4 * n], &st[4 * n..5 * n], &st[5 * n..6 * n]);
        let w = &st[W * n..(W + 1) * n];
        let chi = &st[CHI * n..(CHI + 1) * n];

        {
            let (ox, rest) = ka.split_at_mut(n);
            let (oy, oz) = rest.split_at_mut(n);
            let (bx, rest) = b.split_at_mut(n);
            let (by, bz) = rest.split_at_mut(n);
            for_rows(nb, |r, ryp, rym, rzp, rzm| {
                let (wyp, wym, wzp, wzm) = (seg(w, ryp, nx), seg(w, rym, nx), seg(w, rzp, nx), seg(w, rzm, nx));
                let (axyp, axym, axzp, axzm) = (seg(ax, ryp, nx), seg(ax, rym, nx), seg(ax, rzp, nx), seg(ax, rzm, nx));
                let (ayzp, ayzm) = (seg(ay, rzp, nx), seg(ay, rzm, nx));
                let (azyp, azym) = (seg(az, ryp, nx), seg(az, rym, nx));
                let (yx0, yy0, yz0) = (seg(yx, r, nx), seg(yy, r, nx), seg(yz, r, nx));
                let ox = &mut ox[r..r + nx];
                let oy = &mut oy[r..r + nx];
                let oz = &mut oz[r..r + nx];
                let bx = &mut bx[r..r + nx];
                let by = &mut by[r..r + nx];
                let bz = &mut bz[r..r + nx];
                for i in 0..nx {
                    ox[i] = yx0[i];
                    oy[i] = yy0[i] - (wyp[i] - wym[i]) * sy;
                    oz[i] = yz0[i] - (wzp[i] - wzm[i]) * sz;
                    bx[i] = (azyp[i] - azym[i]) * sy - (ayzp[i] - ayzm[i]) * sz;
                    by[i] = (axzp[i] - axzm[i]) * sz;
                    bz[i] = -((axyp[i] - axym[i]) * sy);
                }
                xdiff(ox, seg(w, r, nx), sx, |o, d| *o -= d);
                xdiff(by, seg(az, r, nx), sx, |o, d| *o -= d);
                xdiff(bz, seg(ay, r, nx), sx, |o, d| *o += d);
                emit(A0, r, ox);
                emit(A0 + 1, r, oy);
                emit(A0 + 2, r, oz);
            });
        }

        let (bx, by, bz) = (&b[0..n], &b[n..2 * n], &b[2 * n..3 * n]);
        let (kx, ky, kz) = (&ka[0..n], &ka[n..2 * n], &ka[2 * n..3 * n]);
        let (jx, rest) = rows.split_at_mut(nx);
        let (jy, rest) = rest.split_at_mut(nx);
        let (jz, rest) = rest.split_at_mut(nx);
        let (ochi, rest) = rest.split_at_mut(nx);
        let (ow, rest) = rest.split_at_mut(nx);
        let (t_y, t_z) = rest.split_at_mut(nx);
        for_rows(nb, |r, ryp, rym, rzp, rzm| {
            let (bxyp, bxym, bxzp, bxzm) = (seg(bx, ryp, nx), seg(bx, rym, nx), seg(bx, rzp, nx), seg(bx, rzm, nx));
            let (byzp, byzm) = (seg(by, rzp, nx), seg(by, rzm, nx));
            let (bzyp, bzym) = (seg(bz, ryp, nx), seg(bz, rym, nx));
            let (kyyp, kyym, kzzp, kzzm) = (seg(ky, ryp, nx), seg(ky, rym, nx), seg(kz, rzp, nx), seg(kz, rzm, nx));
            let chi0 = seg(chi, r, nx);
            source.fill_row(t, 0, r, jx);
            source.fill_row(t, 1, r, jy);
            source.fill_row(t, 2, r, jz);
            // x-differences first, then the y/z terms in the same order as
            // the generic curl and divergence operators
            xdiff(ochi, seg(kx, r, nx), sx, |o, d| *o = d);
            xdiff(t_y, seg(bz, r, nx), sx, |o, d| *o = d);
            xdiff(t_z, seg(by, r, nx), sx, |o, d| *o = d);
            for i in 0..nx {
                jx[i] -= (bzyp[i] - bzym[i]) * sy - (byzp[i] - byzm[i]) * sz;
                jy[i] -= (bxzp[i] - bxzm[i]) * sz - t_y[i];
                jz[i] -= t_z[i] - (bxyp[i] - bxym[i]) * sy;
                ochi[i] = ochi[i] + (kyyp[i] - kyym[i]) * sy + (kzzp[i] - kzzm[i]) * sz;
                ow[i] = -chi0[i];
            }
            emit(Y0, r, jx);
            emit(Y0 + 1, r, jy);
            emit(Y0 + 2, r, jz);
            emit(W, r, ow);
            emit(CHI, r, ochi);
        });
    }

    /// Full right-hand side of the canonical system at time `t`.
    fn rhs(&mut self, source: &SourceModel, st: &[f64], t: f64, out: &mut [f64]) {
        let n = self.stride;
        self.rhs_with(source, st, t, |b, r, v| out[b * n + r..b * n + r + v.len()].copy_from_slice(v));
    }
}

fn block(flat: &[f64], b: usize, len: usize) -> &[f64] {
    let s = stride(len);
    &flat[b * s..b * s + len]
}

fn block_mut(flat: &mut [f64], b: usize, len: usize) -> &mut [f64] {
    let s = stride(len);
    &mut flat[b * s..b * s + len]
}

fn flat_len(grid: &Grid3) -> usize {
    BLOCKS * stride(grid.len())
}

fn flatten(state: &CanonicalFieldState, out: &mut [f64]) {
    let n = state.grid().len();
    for c in 0..3 {
        block_mut(out, A0 + c, n).copy_from_slice(state.a.component(c));
        block_mut(out, Y0 + c, n).copy_from_slice(state.y.component(c));
    }
    block_mut(out, W, n).copy_from_slice(state.w.values());
    block_mut(out, CHI, n).copy_from_slice(state.chi.values());
}

fn unflatten(flat: &[f64], state: &mut CanonicalFieldState) {
    let n = state.grid().len();
    for c in 0..3 {
        state.a.component_mut(c).copy_from_slice(block(flat, A0 + c, n));
        state.y.component_mut(c).copy_from_slice(block(flat, Y0 + c, n));
    }
    state.w.values_mut().copy_from_slice(block(flat, W, n));
    state.chi.values_mut().copy_from_slice(block(flat, CHI, n));
}

fn prepare(state: &CanonicalFieldState, source: &SourceModel) -> Result<(), FieldError> {
    check_periodic(state.grid())?;
    source.check_grid(state.grid())?;
    Ok(())
}

pub fn field_rhs(state: &CanonicalFieldState, source: &SourceModel) -> Result<FieldRates, FieldError> {
    prepare(state, source)?;
    let grid = state.grid();
    let n = grid.len();
    let mut flat = vec![0.0; flat_len(grid)];
    flatten(state, &mut flat);
    let mut out = vec![0.0; flat_len(grid)];
    Kernel::new(grid).rhs(source, &flat, state.time, &mut out);
    let block = |b: usize| block(&out, b, n).to_vec();
    Ok(FieldRates {
        a: VectorField::new(grid.clone(), [block(A0), block(A0 + 1), block(A0 + 2)])?,
        y: VectorField::new(grid.clone(), [block(Y0), block(Y0 + 1), block(Y0 + 2)])?,
        w: ScalarField::new(grid.clone(), block(W))?,
        chi: ScalarField::new(grid.clone(), block(CHI))?,
    })
}

/// `½[(Y-∇W, Y-∇W) + (∇×A, ∇×A) + (χ, χ)] - (j, A)`
pub fn field_hamiltonian(state: &CanonicalFieldState, source: &SourceModel) -> Result<f64, FieldError> {
    prepare(state, source)?;
    let grid = state.grid();
    let n = grid.len();
    let mut flat = vec![0.0; flat_len(grid)];
    flatten(state, &mut flat);
    let mut kernel = Kernel::new(grid);
    kernel.rhs_with(source, &flat, state.time, |_, _, _| {});
    let sq = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>();
    let mut j = vec![0.0; n];
    let mut coupling = 0.0;
    for c in 0..3 {
        source.fill(state.time, &mut j, c);
        coupling += crate::grid::ops::dot(&j, state.a.component(c));
    }
    let quad = sq(&kernel.ka) + sq(&kernel.b) + sq(state.chi.values());
    Ok(grid.cell_volume() * (0.5 * quad - coupling))
}

/// Reusable stepper owning its scratch buffers; a run of many steps
/// performs no allocation.
pub struct FieldEvolver {
    grid: Grid3,
    source: SourceModel,
    scheme: Scheme,
    dt: f64,
    kernel: Kernel,
    state: Vec<f64>,
    time: f64,
    k: [Vec<f64>; 2],
    tmp: Vec<f64>,
}

/// Largest admissible `|dt|` for grid spacing `h_min` (c = 1).
pub fn max_stable_dt(grid: &Grid3) -> f64 {
    grid.h_min() / 3f64.sqrt()
}

fn check_dt(grid: &Grid3, dt: f64) -> Result<(), FieldError> {
    let max_dt = max_stable_dt(grid);
    if !(dt.abs() <= max_dt) {
        return Err(FieldError::Cfl { dt, max_dt });
    }
    Ok(())
}

impl FieldEvolver {
    pub fn new(state: &CanonicalFieldState, source: SourceModel, dt: f64, scheme: Scheme) -> Result<Self, FieldError> {
        prepare(state, &source)?;
        let grid = state.grid().clone();
        check_dt(&grid, dt)?;
        let fl = flat_len(&grid);
        let mut flat = vec![0.0; fl];
        flatten(state, &mut flat);
        let zeros = || vec![0.0; fl];
        Ok(FieldEvolver {
            kernel: Kernel::new(&grid),
            grid,
            source,
            scheme,
            dt,
            state: flat,
            time: state.time,
            k: [zeros(), zeros()],
            tmp: zeros(),
        })
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn source(&self) -> &SourceModel {
        &self.source
    }

    pub fn state(&self) -> CanonicalFieldState {
        let mut s = CanonicalFieldState {
            a: VectorField::zeros(&self.grid),
            y: VectorField::zeros(&self.grid),
            w: ScalarField::zeros(&self.grid),
            chi: ScalarField::zeros(&self.grid),
            time: self.time,
        };
        unflatten(&self.state, &mut s);
        s
    }

    /// Copies the current fields into `out`, which must live on the same grid.
    pub fn write_state(&self, out: &mut CanonicalFieldState) -> Result<(), FieldError> {
        crate::grid::check_same(&self.grid, out.grid())?;
        unflatten(&self.state, out);
        out.time = self.time;
        Ok(())
    }

    pub fn advance(&mut self, steps: usize) {
        for _ in 0..steps {
            self.step_once();
        }
    }

    fn step_once(&mut self) {
        if self.dt == 0.0 {
            return;
        }
        match self.scheme {
            Scheme::Rk4 => self.rk4(),
            Scheme::Verlet => self.verlet(),
        }
    }

    fn rk4(&mut self) {
        let (dt, t) = (self.dt, self.time);
        let half = 0.5 * dt;
        let n = stride(self.grid.len());
        let [t1, t2] = &mut self.k;
        let (y, acc, kern, src) = (&mut self.state, &mut self.tmp, &mut self.kernel, &self.source);
        kern.rhs_with(src, y, t, |b, r, k| {
            let o = b * n + r;
            for (i, &ki) in k.iter().enumerate() {
                acc[o + i] = y[o + i] + dt / 6.0 * ki;
                t1[o + i] = y[o + i] + half * ki;
            }
        });
        kern.rhs_with(src, t1, t + half, |b, r, k| {
            let o = b * n + r;
            for (i, &ki) in k.iter().enumerate() {
                acc[o + i] += dt / 3.0 * ki;
                t2[o + i] = y[o + i] + half * ki;
            }
        });
        kern.rhs_with(src, t2, t + half, |b, r, k| {
            let o = b * n + r;
            for (i, &ki) in k.iter().enumerate() {
                acc[o + i] += dt / 3.0 * ki;
                t1[o + i] = y[o + i] + dt * ki;
            }
        });
        kern.rhs_with(src, t1, t + dt, |b, r, k| {
            let o = b * n + r;
            for (i, &ki) in k.iter().enumerate() {
                y[o + i] = acc[o + i] + dt / 6.0 * ki;
            }
        });
        self.time = t + dt;
    }

    fn verlet(&mut self) {
        let (dt, t) = (self.dt, self.time);
        let n = stride(self.grid.len());
        let half = 0.5 * dt;
        let k = &mut self.k[0];
        let (y, kern, src) = (&mut self.state, &mut self.kernel, &self.source);
        // drift: A and χ move with rates that depend only on (Y, W)
        let drift = |y: &mut Vec<f64>, k: &mut Vec<f64>, kern: &mut Kernel| {
            kern.rhs(src, y, t, k);
            for i in 0..3 * n {
                y[i] += half * k[i];
            }
            for i in CHI * n..(CHI + 1) * n {
                y[i] += half * k[i];
            }
        };
        drift(y, k, kern);
        kern.rhs(src, y, t + half, k);
        for i in Y0 * n..(W + 1) * n {
            y[i] += dt * k[i];
        }
        drift(y, k, kern);
        self.time = t + dt;
    }
}

/// One time step. `dt = 0` returns the state unchanged.
pub fn step(
    state: &CanonicalFieldState,
    source: &SourceModel,
    dt: f64,
    scheme: Scheme,
) -> Result<CanonicalFieldState, FieldError> {
    prepare(state, source)?;
    check_dt(state.grid(), dt)?;
    if dt == 0.0 {
        return Ok(state.clone());
    }
    let mut ev = FieldEvolver::new(state, source.clone(), dt, scheme)?;
    ev.advance(1);
    Ok(ev.state())
}
