use super::source::{PotentialSample, PotentialSource};
use super::{check_speed, ParticleParams, ParticleState, Vec3};
use crate::error::ParticleError;

/// `m₀ / √(1 - |u/c|²)`
pub fn classical_mass(u: &Vec3, m0: f64, c: f64) -> Result<f64, ParticleError> {
    let g = check_speed(u, c)?;
    Ok(m0 * g)
}

pub fn classical_momentum(state: &ParticleState, params: &ParticleParams) -> Result<Vec3, ParticleError> {
    let m = classical_mass(&state.u, params.m0, params.units.c)?;
    Ok(state.u * m)
}

/// `ξE + ξ(u/c)×B` for given fields.
pub fn lorentz_force_from_fields(xi: f64, u: &Vec3, e: &Vec3, b: &Vec3, c: f64) -> Vec3 {
    (e + u.cross(b) / c) * xi
}

fn sample_for(
    state: &ParticleState,
    source: &PotentialSource,
    params: &ParticleParams,
) -> Result<PotentialSample, ParticleError> {
    check_speed(&state.u, params.units.c)?;
    source.check_charge(params.xi)?;
    source.sample(state.t, &state.r)
}

/// Classical force from a potential sample. `ξE = -(ξ/c)∂A/∂t - ∇W̄` since
/// `W̄ = ξφ` up to a constant.
pub(crate) fn classical_from_sample(s: &PotentialSample, u: &Vec3, xi: f64, c: f64) -> Vec3 {
    let xi_e = -s.da_dt * (xi / c) - s.grad_w_bar;
    xi_e + u.cross(&s.b()) * (xi / c)
}

/// `-(ξ/c)∇⟨A, u - u_f⟩` with `u`, `u_f` frozen.
pub(crate) fn gradient_correction(s: &PotentialSample, u: &Vec3, xi: f64, c: f64) -> Vec3 {
    s.jac_a.transpose() * (u - s.u_f) * (-xi / c)
}

pub fn lorentz_force_classical(
    state: &ParticleState,
    source: &PotentialSource,
    params: &ParticleParams,
) -> Result<Vec3, ParticleError> {
    let s = sample_for(state, source, params)?;
    Ok(classical_from_sample(&s, &state.u, params.xi, params.units.c))
}

pub fn lorentz_force_modified(
    state: &ParticleState,
    source: &PotentialSource,
    params: &ParticleParams,
) -> Result<Vec3, ParticleError> {
    let s = sample_for(state, source, params)?;
    let c = params.units.c;
    Ok(classical_from_sample(&s, &state.u, params.xi, c) + gradient_correction(&s, &state.u, params.xi, c))
}

/// The gradient term alone, i.e. modified minus classical.
pub fn force_correction(
    state: &ParticleState,
    source: &PotentialSource,
    params: &ParticleParams,
) -> Result<Vec3, ParticleError> {
    let s = sample_for(state, source, params)?;
    Ok(gradient_correction(&s, &state.u, params.xi, params.units.c))
}

/// `-∇W̄ (1 - |u_f/c|²)`
pub fn total_force_suppressed(
    state: &ParticleState,
    source: &PotentialSource,
    params: &ParticleParams,
) -> Result<Vec3, ParticleError> {
    let s = sample_for(state, source, params)?;
    let c = params.units.c;
    let uf2 = s.u_f.norm_squared() / (c * c);
    if uf2 >= 1.0 {
        return Err(ParticleError::Superluminal { speed: s.u_f.norm(), c });
    }
    Ok(-s.grad_w_bar * (1.0 - uf2))
}

/// Lab-time acceleration of the free vacuum-field model, from
/// `d(-W̄u/c²)/dt = -∇W̄`.
pub fn free_vacuum_rhs(state: &ParticleState, source: &PotentialSource, c: f64) -> Result<Vec3, ParticleError> {
    if !source.is_stationary() {
        return Err(ParticleError::NonStationary);
    }
    check_speed(&state.u, c)?;
    let s = source.sample(state.t, &state.r)?;
    free_vacuum_accel(&s, &state.u, c)
}

pub(crate) fn free_vacuum_accel(s: &PotentialSample, u: &Vec3, c: f64) -> Result<Vec3, ParticleError> {
    if s.w_bar.abs() < 1e-12 {
        return Err(ParticleError::DegenerateMass { w_bar: s.w_bar });
    }
    let g = s.grad_w_bar;
    Ok((g * (c * c) - u * g.dot(u)) / s.w_bar)
}

/// `W̄ √(1 - |u/c|²)`, conserved along free vacuum trajectories.
pub fn vacuum_energy(state: &ParticleState, source: &PotentialSource, c: f64) -> Result<f64, ParticleError> {
    let g = check_speed(&state.u, c)?;
    let s = source.sample(state.t, &state.r)?;
    Ok(s.w_bar / g)
}
