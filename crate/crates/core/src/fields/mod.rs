//! Maxwell fields in the canonical variables `(A, Y, W, χ)` with `Y = -E`
//! and `χ = -∂W/∂t`, evolved as a linear Hamiltonian system in units `c = 1`.
//!
//! The Lorenz functional `-χ + ∇·A` and the Gauss functional `-∇·Y - ρ` are
//! conserved exactly by the discrete right-hand side, so they stay at
//! round-off level when the initial data satisfy them.

mod advect;
mod aharonov_bohm;
mod diagnostics;
mod evolve;
mod lienard_wiechert;
mod snapshot;
mod source;

pub use advect::{advected_integral, gauss_legendre, BoxDomain, NodeCloud, VelocityField};
pub use aharonov_bohm::{aharonov_bohm_phase, flux, SurfacePatch};
pub use diagnostics::{derive_eb, maxwell_diagnostics, wave_residuals, DiagnosticsReport, WaveResiduals};
pub use evolve::{field_hamiltonian, field_rhs, max_stable_dt, step, FieldEvolver, FieldRates, Scheme};
pub use lienard_wiechert::{
    boosted_coulomb, lienard_wiechert, retarded_time, CircularOrbit, SourceTrajectory, UniformMotion,
};
pub use snapshot::{decode_snapshot, encode_snapshot, write_snapshot, SnapshotHeader};
pub use source::SourceModel;

use num_complex::Complex64;

use crate::error::FieldError;
use crate::grid::spectral::{fft3, symbol};
use crate::grid::{check_periodic, check_same, divergence, gradient, Grid3, ScalarField, VectorField};

#[derive(Clone, Debug, PartialEq)]
pub struct CanonicalFieldState {
    pub a: VectorField,
    pub y: VectorField,
    pub w: ScalarField,
    pub chi: ScalarField,
    pub time: f64,
}

impl CanonicalFieldState {
    pub fn new(
        a: VectorField,
        y: VectorField,
        w: ScalarField,
        chi: ScalarField,
        time: f64,
    ) -> Result<Self, FieldError> {
        check_periodic(a.grid())?;
        check_same(a.grid(), y.grid())?;
        check_same(a.grid(), w.grid())?;
        check_same(a.grid(), chi.grid())?;
        Ok(CanonicalFieldState { a, y, w, chi, time })
    }

    pub fn zeros(grid: &Grid3) -> Result<Self, FieldError> {
        check_periodic(grid)?;
        Ok(CanonicalFieldState {
            a: VectorField::zeros(grid),
            y: VectorField::zeros(grid),
            w: ScalarField::zeros(grid),
            chi: ScalarField::zeros(grid),
            time: 0.0,
        })
    }

    /// Data satisfying both constraints: `W` solves the discrete Poisson
    /// problem for `rho`, `Y = ∇W`, `A = a_seed` and `χ = ∇·A`.
    pub fn admissible(rho: &ScalarField, a_seed: VectorField, time: f64) -> Result<Self, FieldError> {
        check_same(rho.grid(), a_seed.grid())?;
        let w = solve_poisson(rho)?;
        let y = gradient(&w)?;
        let chi = divergence(&a_seed)?;
        Self::new(a_seed, y, w, chi, time)
    }

    pub fn grid(&self) -> &Grid3 {
        self.a.grid()
    }

    /// `-χ + ∇·A`
    pub fn lorenz_functional(&self) -> Result<ScalarField, FieldError> {
        let mut d = divergence(&self.a)?;
        for (x, c) in d.values_mut().iter_mut().zip(self.chi.values()) {
            *x -= c;
        }
        Ok(d)
    }

    /// `-∇·Y - ρ`
    pub fn gauss_functional(&self, rho: &ScalarField) -> Result<ScalarField, FieldError> {
        check_same(self.grid(), rho.grid())?;
        let mut d = divergence(&self.y)?;
        for (x, r) in d.values_mut().iter_mut().zip(rho.values()) {
            *x = -*x - r;
        }
        Ok(d)
    }
}

/// Solves `div(grad W) = -ρ` with the centered-difference operators, so the
/// Gauss functional of `(Y = ∇W, ρ)` vanishes to round-off.
pub fn solve_poisson(rho: &ScalarField) -> Result<ScalarField, FieldError> {
    let grid = rho.grid();
    check_periodic(grid)?;
    let n = grid.n();
    let total = grid.len() as f64;
    let scale = rho.max_abs().max(f64::MIN_POSITIVE);
    let net = rho.values().iter().sum::<f64>() / total;
    if net.abs() > 1e-12 * scale {
        return Err(FieldError::NetCharge { total: net * grid.volume() });
    }

    let mut spec: Vec<Complex64> = rho.values().iter().map(|&x| Complex64::new(x, 0.0)).collect();
    fft3(&mut spec, n, false);
    let h = grid.h();
    let kx = symbol(n[0], h[0]);
    let ky = symbol(n[1], h[1]);
    let kz = symbol(n[2], h[2]);
    let h2 = grid.h_min() * grid.h_min();
    let mut lost = 0.0_f64;
    for k in 0..n[2] {
        for j in 0..n[1] {
            for i in 0..n[0] {
                let idx = grid.index(i, j, k);
                let k2 = kx[i] * kx[i] + ky[j] * ky[j] + kz[k] * kz[k];
                if k2 * h2 < 1e-20 {
                    if idx != 0 {
                        lost = lost.max(spec[idx].norm() / total);
                    }
                    spec[idx] = Complex64::new(0.0, 0.0);
                } else {
                    spec[idx] /= k2;
                }
            }
        }
    }
    if lost > 1e-10 * scale {
        return Err(FieldError::UnresolvedCharge { amplitude: lost });
    }
    fft3(&mut spec, n, true);
    Ok(ScalarField::new(grid.clone(), spec.iter().map(|z| z.re).collect())?)
}
