//! Charged point particles: classical relativistic dynamics and the
//! vacuum-field models (free, interacting, dual) in Lagrangian and
//! Hamiltonian form.
//!
//! The vacuum potential is `W̄ = ξφ`; the particle's inertial mass is `-W̄`
//! (in units of `c²`), so physical configurations have `W̄ < 0`.

mod flow;
mod force;
mod hamiltonian;
mod source;

pub use flow::{
    hamiltonian_flow, hamiltonian_flow_from, initial_canonical_momentum, integrate_free_vacuum, integrate_lorentz,
    FlowResult, FlowSample, ForceLaw, HamiltonianModel, Integrator, LorentzSample,
};
pub use force::{
    classical_mass, classical_momentum, force_correction, free_vacuum_rhs, lorentz_force_classical,
    lorentz_force_from_fields, lorentz_force_modified, total_force_suppressed, vacuum_energy,
};
pub use hamiltonian::{
    hamiltonian_dual, hamiltonian_free, hamiltonian_interaction, interaction_energy, rest_mass_from_energy, MassBranch,
    MassBranches,
};
pub use source::{PotentialSample, PotentialSource, SourceKind};

use crate::error::ParticleError;
use crate::units::Units;

pub type Vec3 = nalgebra::Vector3<f64>;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ParticleState {
    pub r: Vec3,
    pub u: Vec3,
    pub t: f64,
    pub tau: f64,
}

impl ParticleState {
    pub fn new(r: Vec3, u: Vec3) -> Self {
        ParticleState { r, u, t: 0.0, tau: 0.0 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ParticleParams {
    pub xi: f64,
    pub m0: f64,
    pub units: Units,
}

impl ParticleParams {
    pub fn new(xi: f64, m0: f64) -> Self {
        ParticleParams { xi, m0, units: Units::default() }
    }
}

/// Lorentz factor, or an error when `|u| ≥ c`.
pub(crate) fn check_speed(u: &Vec3, c: f64) -> Result<f64, ParticleError> {
    let b2 = u.norm_squared() / (c * c);
    if !(b2 < 1.0) {
        return Err(ParticleError::Superluminal { speed: u.norm(), c });
    }
    Ok(1.0 / (1.0 - b2).sqrt())
}
