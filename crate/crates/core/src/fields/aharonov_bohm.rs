use serde::{Deserialize, Serialize};

use crate::error::FieldError;
use crate::grid::{Grid3, VectorField};

/// Rectangle on the grid plane `x[normal] = offset`, spanning `lo..hi` in
/// the two tangential axes `(normal+1, normal+2) mod 3`. `orientation` is
/// `+1` or `-1` relative to the positive normal axis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurfacePatch {
    pub normal: usize,
    pub offset: f64,
    pub lo: [f64; 2],
    pub hi: [f64; 2],
    pub orientation: f64,
}

fn node_index(grid: &Grid3, axis: usize, x: f64) -> Result<i64, FieldError> {
    let s = (x - grid.origin()[axis]) / grid.h()[axis];
    let r = s.round();
    if !((s - r).abs() <= 1e-9) || !r.is_finite() || r.abs() > 1e12 {
        return Err(FieldError::OffGrid(format!("coordinate {x} on axis {axis} is not a grid plane")));
    }
    Ok(r as i64)
}

fn patch_flux(b: &VectorField, p: &SurfacePatch) -> Result<f64, FieldError> {
    let grid = b.grid();
    if p.normal > 2 || !(p.orientation == 1.0 || p.orientation == -1.0) {
        return Err(FieldError::InvalidParameter("patch needs normal in 0..3 and orientation ±1".into()));
    }
    let n = grid.n();
    let (ta, tb) = ((p.normal + 1) % 3, (p.normal + 2) % 3);
    let plane = node_index(grid, p.normal, p.offset)?;
    let (a0, a1) = (node_index(grid, ta, p.lo[0])?, node_index(grid, ta, p.hi[0])?);
    let (b0, b1) = (node_index(grid, tb, p.lo[1])?, node_index(grid, tb, p.hi[1])?);
    if a1 < a0 || b1 < b0 || (a1 - a0) as usize > n[ta] || (b1 - b0) as usize > n[tb] {
        return Err(FieldError::OffGrid("patch bounds are reversed or wider than the grid".into()));
    }
    let wrap = |i: i64, m: usize| i.rem_euclid(m as i64) as usize;
    let comp = b.component(p.normal);
    let weight = |i: i64, lo: i64, hi: i64| {
        if lo == hi {
            0.0
        } else if i == lo || i == hi {
            0.5
        } else {
            1.0
        }
    };
    let mut sum = 0.0;
    for ib in b0..=b1 {
        for ia in a0..=a1 {
            let mut idx = [0usize; 3];
            idx[p.normal] = wrap(plane, n[p.normal]);
            idx[ta] = wrap(ia, n[ta]);
            idx[tb] = wrap(ib, n[tb]);
            let w = weight(ia, a0, a1) * weight(ib, b0, b1);
            sum += w * comp[grid.index(idx[0], idx[1], idx[2])];
        }
    }
    Ok(p.orientation * sum * grid.h()[ta] * grid.h()[tb])
}

/// Trapezoidal flux of `b` through a surface made of grid-aligned patches.
pub fn flux(b: &VectorField, surface: &[SurfacePatch]) -> Result<f64, FieldError> {
    surface.iter().map(|p| patch_flux(b, p)).sum()
}

/// `λ(B) = -∫ ⟨B, dS⟩`
pub fn aharonov_bohm_phase(b: &VectorField, surface: &[SurfacePatch]) -> Result<f64, FieldError> {
    Ok(-flux(b, surface)?)
}
