use crate::error::{FieldError, GridError};
use crate::grid::{check_same, divergence, max_abs, Grid3, ScalarField, VectorField};

#[derive(Clone, Debug, PartialEq)]
enum Kind {
    Vacuum,
    Static {
        rho: ScalarField,
        j: VectorField,
    },
    /// `ρ = ρ₀ + ρ₁ cos ωt`, `j = j₁ sin ωt`
    Harmonic {
        rho0: ScalarField,
        rho1: ScalarField,
        j1: VectorField,
        omega: f64,
    },
}

/// Prescribed charge and current densities. Constructors check discrete
/// continuity `∂ρ/∂t + ∇·j = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct SourceModel {
    kind: Kind,
}

const CONTINUITY_TOL: f64 = 1e-10;

impl SourceModel {
    pub fn vacuum() -> Self {
        SourceModel { kind: Kind::Vacuum }
    }

    /// Time-independent density with a divergence-free current.
    pub fn stationary(rho: ScalarField, j: VectorField) -> Result<Self, FieldError> {
        check_same(rho.grid(), j.grid())?;
        let res = max_abs(divergence(&j)?.values());
        let tol = CONTINUITY_TOL * (1.0 + j.max_abs() / j.grid().h_min());
        if !(res <= tol) {
            return Err(FieldError::Continuity { residual: res, t: 0.0 });
        }
        Ok(SourceModel { kind: Kind::Static { rho, j } })
    }

    pub fn harmonic(rho0: ScalarField, rho1: ScalarField, j1: VectorField, omega: f64) -> Result<Self, FieldError> {
        check_same(rho0.grid(), rho1.grid())?;
        check_same(rho0.grid(), j1.grid())?;
        if !omega.is_finite() {
            return Err(FieldError::InvalidParameter(format!("frequency {omega}")));
        }
        let div = divergence(&j1)?;
        let res = div
            .values()
            .iter()
            .zip(rho1.values())
            .fold(0.0_f64, |m, (d, r)| crate::grid::nan_max(m, (d - omega * r).abs()));
        let tol = CONTINUITY_TOL * (1.0 + j1.max_abs() / j1.grid().h_min() + omega.abs() * rho1.max_abs());
        if !(res <= tol) {
            return Err(FieldError::Continuity { residual: res, t: std::f64::consts::FRAC_PI_2 / omega });
        }
        Ok(SourceModel { kind: Kind::Harmonic { rho0, rho1, j1, omega } })
    }

    pub fn is_vacuum(&self) -> bool {
        matches!(self.kind, Kind::Vacuum)
    }

    pub fn grid(&self) -> Option<&Grid3> {
        match &self.kind {
            Kind::Vacuum => None,
            Kind::Static { rho, .. } => Some(rho.grid()),
            Kind::Harmonic { rho0, .. } => Some(rho0.grid()),
        }
    }

    pub(crate) fn check_grid(&self, grid: &Grid3) -> Result<(), GridError> {
        match self.grid() {
            Some(g) => check_same(g, grid),
            None => Ok(()),
        }
    }

    pub fn rho(&self, grid: &Grid3, t: f64) -> Result<ScalarField, GridError> {
        self.check_grid(grid)?;
        Ok(match &self.kind {
            Kind::Vacuum => ScalarField::zeros(grid),
            Kind::Static { rho, .. } => rho.clone(),
            Kind::Harmonic { rho0, rho1, omega, .. } => {
                let c = (omega * t).cos();
                let v = rho0.values().iter().zip(rho1.values()).map(|(a, b)| a + b * c).collect();
                ScalarField::new(grid.clone(), v)?
            }
        })
    }

    pub fn current(&self, grid: &Grid3, t: f64) -> Result<VectorField, GridError> {
        self.check_grid(grid)?;
        let mut out = VectorField::zeros(grid);
        self.current_into(t, out.components_mut());
        Ok(out)
    }

    /// Writes `j(t)` into three component buffers.
    pub(crate) fn current_into(&self, t: f64, out: &mut [Vec<f64>; 3]) {
        for (c, o) in out.iter_mut().enumerate() {
            self.fill(t, o, c);
        }
    }

    /// Writes component `c` of `j(t)` into `out`.
    pub(crate) fn fill(&self, t: f64, out: &mut [f64], c: usize) {
        match &self.kind {
            Kind::Vacuum => out.iter_mut().for_each(|x| *x = 0.0),
            Kind::Static { j, .. } => out.copy_from_slice(j.component(c)),
            Kind::Harmonic { j1, omega, .. } => {
                let s = (omega * t).sin();
                for (o, v) in out.iter_mut().zip(j1.component(c)) {
                    *o = v * s;
                }
            }
        }
    }

    /// Component `c` of `j(t)` at nodes `start..start + out.len()`.
    #[inline]
    pub(crate) fn fill_row(&self, t: f64, c: usize, start: usize, out: &mut [f64]) {
        let end = start + out.len();
        match &self.kind {
            Kind::Vacuum => out.iter_mut().for_each(|x| *x = 0.0),
            Kind::Static { j, .. } => out.copy_from_slice(&j.component(c)[start..end]),
            Kind::Harmonic { j1, omega, .. } => {
                let s = (omega * t).sin();
                for (o, v) in out.iter_mut().zip(&j1.component(c)[start..end]) {
                    *o = v * s;
                }
            }
        }
    }

    /// `max |∂ρ/∂t + ∇·j|` at time `t`.
    pub fn continuity_residual(&self, t: f64) -> Result<f64, GridError> {
        Ok(match &self.kind {
            Kind::Vacuum => 0.0,
            Kind::Static { j, .. } => max_abs(divergence(j)?.values()),
            Kind::Harmonic { rho1, j1, omega, .. } => {
                let s = (omega * t).sin();
                let div = divergence(j1)?;
                div.values()
                    .iter()
                    .zip(rho1.values())
                    .fold(0.0, |m, (d, r)| crate::grid::nan_max(m, (d * s - omega * r * s).abs()))
            }
        })
    }
}
