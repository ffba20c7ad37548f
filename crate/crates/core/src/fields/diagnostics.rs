use serde::Serialize;

use super::evolve::{field_hamiltonian, field_rhs};
use super::source::SourceModel;
use super::CanonicalFieldState;
use crate::error::FieldError;
use crate::grid::{check_same, curl, divergence, laplacian, max_abs, nan_max, VectorField};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DiagnosticsReport {
    pub time: f64,
    pub lorenz_residual: f64,
    pub gauss_residual: f64,
    pub div_b_residual: f64,
    pub faraday_residual: f64,
    pub ampere_residual: f64,
    pub energy: f64,
}

/// `E = -Y`, `B = ∇×A`.
pub fn derive_eb(state: &CanonicalFieldState) -> Result<(VectorField, VectorField), FieldError> {
    let mut e = state.y.clone();
    for c in 0..3 {
        e.component_mut(c).iter_mut().for_each(|x| *x = -*x);
    }
    Ok((e, curl(&state.a)?))
}

fn max_diff(a: &VectorField, b: &VectorField, sign: f64, extra: Option<&VectorField>) -> f64 {
    let mut m = 0.0_f64;
    for c in 0..3 {
        for i in 0..a.grid().len() {
            let mut r = a.component(c)[i] + sign * b.component(c)[i];
            if let Some(x) = extra {
                r -= x.component(c)[i];
            }
            m = nan_max(m, r.abs());
        }
    }
    m
}

/// Max-norm residuals of the Maxwell system, with time derivatives taken
/// from one evaluation of the canonical right-hand side.
pub fn maxwell_diagnostics(state: &CanonicalFieldState, source: &SourceModel) -> Result<DiagnosticsReport, FieldError> {
    let grid = state.grid();
    let rates = field_rhs(state, source)?;
    let (_, b) = derive_eb(state)?;
    let rho = source.rho(grid, state.time)?;
    let j = source.current(grid, state.time)?;

    let lorenz = max_abs(state.lorenz_functional()?.values());
    let gauss = max_abs(state.gauss_functional(&rho)?.values());
    let div_b = max_abs(divergence(&b)?.values());
    // curl(∂A/∂t) + curl E, with curl E = -curl Y
    let faraday = max_diff(&curl(&rates.a)?, &curl(&state.y)?, -1.0, None);
    // curl B - ∂E/∂t - j, with ∂E/∂t = -∂Y/∂t
    let ampere = max_diff(&curl(&b)?, &rates.y, 1.0, Some(&j));
    Ok(DiagnosticsReport {
        time: state.time,
        lorenz_residual: lorenz,
        gauss_residual: gauss,
        div_b_residual: div_b,
        faraday_residual: faraday,
        ampere_residual: ampere,
        energy: field_hamiltonian(state, source)?,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WaveResiduals {
    /// `max |∂²W/∂t² - ΔW - ρ|`
    pub scalar: f64,
    /// `max |∂²A/∂t² - ΔA - j|` over components
    pub vector: f64,
}

/// Wave-equation residuals at the time of `cur`, with second time
/// derivatives from the three-level stencil over `prev`, `cur`, `next`.
pub fn wave_residuals(
    prev: &CanonicalFieldState,
    cur: &CanonicalFieldState,
    next: &CanonicalFieldState,
    source: &SourceModel,
) -> Result<WaveResiduals, FieldError> {
    let grid = cur.grid();
    check_same(grid, prev.grid())?;
    check_same(grid, next.grid())?;
    let dt = next.time - cur.time;
    let dt_back = cur.time - prev.time;
    if !(dt > 0.0) || (dt - dt_back).abs() > 1e-9 * dt {
        return Err(FieldError::InvalidParameter("wave stencil needs three equally spaced time levels".into()));
    }
    let inv = 1.0 / (dt * dt);
    let stencil = |p: &[f64], c: &[f64], n: &[f64], lap: &[f64], src: &[f64]| {
        let mut m = 0.0_f64;
        for i in 0..c.len() {
            let r = (n[i] - 2.0 * c[i] + p[i]) * inv - lap[i] - src[i];
            m = nan_max(m, r.abs());
        }
        m
    };
    let rho = source.rho(grid, cur.time)?;
    let lap_w = laplacian(&cur.w)?;
    let scalar = stencil(prev.w.values(), cur.w.values(), next.w.values(), lap_w.values(), rho.values());
    let j = source.current(grid, cur.time)?;
    let mut vector = 0.0_f64;
    for c in 0..3 {
        let comp = crate::grid::ScalarField::new(grid.clone(), cur.a.component(c).to_vec())?;
        let lap = laplacian(&comp)?;
        vector = nan_max(
            vector,
            stencil(prev.a.component(c), cur.a.component(c), next.a.component(c), lap.values(), j.component(c)),
        );
    }
    Ok(WaveResiduals { scalar, vector })
}
