use num_complex::Complex64;

use super::spectral::{fft3, symbol};
use super::{Grid3, ScalarField, VectorField};
use crate::error::GridError;

pub(crate) fn check_periodic(grid: &Grid3) -> Result<(), GridError> {
    if grid.is_periodic() {
        Ok(())
    } else {
        Err(GridError::UnsupportedBoundary)
    }
}

pub(crate) fn check_same(a: &Grid3, b: &Grid3) -> Result<(), GridError> {
    if a == b {
        Ok(())
    } else {
        Err(GridError::GridMismatch)
    }
}

/// Periodic neighbour tables, one pair per axis.
pub(crate) struct Neighbors {
    pub n: [usize; 3],
    pub plus: [Vec<usize>; 3],
    pub minus: [Vec<usize>; 3],
}

impl Neighbors {
    pub fn new(grid: &Grid3) -> Self {
        let n = grid.n();
        let tab = |m: usize, d: usize| -> Vec<usize> { (0..m).map(|i| (i + d) % m).collect() };
        Neighbors {
            n,
            plus: [tab(n[0], 1), tab(n[1], 1), tab(n[2], 1)],
            minus: [tab(n[0], n[0] - 1), tab(n[1], n[1] - 1), tab(n[2], n[2] - 1)],
        }
    }
}

/// Centered first difference of `f` along `axis`, written into `out`.
pub(crate) fn diff_into(grid: &Grid3, nb: &Neighbors, f: &[f64], axis: usize, out: &mut [f64]) {
    let [nx, ny, nz] = nb.n;
    let s = 0.5 / grid.h()[axis];
    for k in 0..nz {
        for j in 0..ny {
            let row = nx * (j + ny * k);
            match axis {
                0 => {
                    for i in 0..nx {
                        out[row + i] = (f[row + nb.plus[0][i]] - f[row + nb.minus[0][i]]) * s;
                    }
                }
                1 => {
                    let rp = nx * (nb.plus[1][j] + ny * k);
                    let rm = nx * (nb.minus[1][j] + ny * k);
                    for i in 0..nx {
                        out[row + i] = (f[rp + i] - f[rm + i]) * s;
                    }
                }
                _ => {
                    let rp = nx * (j + ny * nb.plus[2][k]);
                    let rm = nx * (j + ny * nb.minus[2][k]);
                    for i in 0..nx {
                        out[row + i] = (f[rp + i] - f[rm + i]) * s;
                    }
                }
            }
        }
    }
}

pub fn gradient(f: &ScalarField) -> Result<VectorField, GridError> {
    let grid = f.grid();
    check_periodic(grid)?;
    let nb = Neighbors::new(grid);
    let mut out = VectorField::zeros(grid);
    for axis in 0..3 {
        diff_into(grid, &nb, f.values(), axis, out.component_mut(axis));
    }
    Ok(out)
}

pub fn divergence(v: &VectorField) -> Result<ScalarField, GridError> {
    let grid = v.grid();
    check_periodic(grid)?;
    let nb = Neighbors::new(grid);
    let mut out = vec![0.0; grid.len()];
    let mut tmp = vec![0.0; grid.len()];
    for axis in 0..3 {
        diff_into(grid, &nb, v.component(axis), axis, &mut tmp);
        for (o, t) in out.iter_mut().zip(&tmp) {
            *o += t;
        }
    }
    ScalarField::new(grid.clone(), out)
}

pub fn curl(v: &VectorField) -> Result<VectorField, GridError> {
    let grid = v.grid();
    check_periodic(grid)?;
    let nb = Neighbors::new(grid);
    let len = grid.len();
    let mut out = VectorField::zeros(grid);
    let mut a = vec![0.0; len];
    let mut b = vec![0.0; len];
    // (curl v)_c = d_{c+1} v_{c+2} - d_{c+2} v_{c+1}
    for c in 0..3 {
        let p = (c + 1) % 3;
        let q = (c + 2) % 3;
        diff_into(grid, &nb, v.component(q), p, &mut a);
        diff_into(grid, &nb, v.component(p), q, &mut b);
        for ((o, x), y) in out.component_mut(c).iter_mut().zip(&a).zip(&b) {
            *o = x - y;
        }
    }
    Ok(out)
}

pub fn laplacian(f: &ScalarField) -> Result<ScalarField, GridError> {
    let grid = f.grid();
    check_periodic(grid)?;
    let nb = Neighbors::new(grid);
    let mut out = vec![0.0; grid.len()];
    laplacian_into(grid, &nb, f.values(), &mut out);
    ScalarField::new(grid.clone(), out)
}

pub(crate) fn laplacian_into(grid: &Grid3, nb: &Neighbors, f: &[f64], out: &mut [f64]) {
    let [nx, ny, nz] = nb.n;
    let h = grid.h();
    let w = [1.0 / (h[0] * h[0]), 1.0 / (h[1] * h[1]), 1.0 / (h[2] * h[2])];
    for k in 0..nz {
        for j in 0..ny {
            let row = nx * (j + ny * k);
            let yp = nx * (nb.plus[1][j] + ny * k);
            let ym = nx * (nb.minus[1][j] + ny * k);
            let zp = nx * (j + ny * nb.plus[2][k]);
            let zm = nx * (j + ny * nb.minus[2][k]);
            for i in 0..nx {
                let c = f[row + i];
                let dx = f[row + nb.plus[0][i]] - 2.0 * c + f[row + nb.minus[0][i]];
                let dy = f[yp + i] - 2.0 * c + f[ym + i];
                let dz = f[zp + i] - 2.0 * c + f[zm + i];
                out[row + i] = dx * w[0] + dy * w[1] + dz * w[2];
            }
        }
    }
}

/// `Σ f g ΔV` over all nodes.
pub fn inner(f: &ScalarField, g: &ScalarField) -> Result<f64, GridError> {
    check_same(f.grid(), g.grid())?;
    Ok(dot(f.values(), g.values()) * f.grid().cell_volume())
}

pub fn inner_vector(f: &VectorField, g: &VectorField) -> Result<f64, GridError> {
    check_same(f.grid(), g.grid())?;
    let s: f64 = (0..3).map(|c| dot(f.component(c), g.component(c))).sum();
    Ok(s * f.grid().cell_volume())
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Divergence-free `A` with `curl A = B`, built in Fourier space with the
/// symbol of the centered difference so the round trip is exact on the grid.
/// Modes on which that symbol vanishes cannot be inverted and must be absent
/// from `B`.
pub fn inverse_curl(b: &VectorField) -> Result<VectorField, GridError> {
    let grid = b.grid();
    check_periodic(grid)?;
    let n = grid.n();
    let scale = b.max_abs();
    if scale == 0.0 {
        return Ok(VectorField::zeros(grid));
    }

    let div = super::divergence(b)?;
    let tol = 1e-9 * scale / grid.h_min();
    let r = div.max_abs();
    if !(r <= tol) {
        return Err(GridError::ConstraintViolation { what: "divergence", residual: r, tolerance: tol });
    }

    let mut spec: Vec<Vec<Complex64>> =
        (0..3).map(|c| b.component(c).iter().map(|&x| Complex64::new(x, 0.0)).collect()).collect();
    for s in spec.iter_mut() {
        fft3(s, n, false);
    }

    let kx = symbol(n[0], grid.h()[0]);
    let ky = symbol(n[1], grid.h()[1]);
    let kz = symbol(n[2], grid.h()[2]);
    let total = grid.len() as f64;
    let h2 = grid.h_min() * grid.h_min();
    let mut lost = 0.0_f64;
    let mut out: Vec<Vec<Complex64>> = vec![vec![Complex64::new(0.0, 0.0); grid.len()]; 3];
    let i_unit = Complex64::new(0.0, 1.0);
    for k in 0..n[2] {
        for j in 0..n[1] {
            for i in 0..n[0] {
                let idx = grid.index(i, j, k);
                let kv = [kx[i], ky[j], kz[k]];
                let k2 = kv[0] * kv[0] + kv[1] * kv[1] + kv[2] * kv[2];
                let bh = [spec[0][idx], spec[1][idx], spec[2][idx]];
                if k2 * h2 < 1e-20 {
                    for x in bh {
                        lost = lost.max(x.norm() / total);
                    }
                    continue;
                }
                // A = i κ × B / |κ|²
                let cr = [bh[2] * kv[1] - bh[1] * kv[2], bh[0] * kv[2] - bh[2] * kv[0], bh[1] * kv[0] - bh[0] * kv[1]];
                for c in 0..3 {
                    out[c][idx] = i_unit * cr[c] / k2;
                }
            }
        }
    }
    let ltol = 1e-10 * scale;
    if !(lost <= ltol) {
        return Err(GridError::ConstraintViolation { what: "null-space mode", residual: lost, tolerance: ltol });
    }

    let mut comps: [Vec<f64>; 3] = Default::default();
    for (c, mut s) in out.into_iter().enumerate() {
        fft3(&mut s, n, true);
        comps[c] = s.iter().map(|z| z.re).collect();
    }
    VectorField::new(grid.clone(), comps)
}
