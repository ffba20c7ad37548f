use super::Vec3;
use crate::error::ParticleError;

fn radical(w_bar: f64, k: &Vec3, strict: bool) -> Result<f64, ParticleError> {
    let gap = w_bar * w_bar - k.norm_squared();
    if gap < 0.0 || (strict && gap == 0.0) || gap.is_nan() {
        return Err(ParticleError::OutsideDomain { gap });
    }
    Ok(gap.sqrt())
}

/// `-(W̄² - |p|²)^{1/2}`
pub fn hamiltonian_free(p: &Vec3, w_bar: f64) -> Result<f64, ParticleError> {
    Ok(-radical(w_bar, p, false)?)
}

/// `-S - ξ⟨A,P⟩/S` with `S = (W̄² - |P|²)^{1/2}`.
pub fn hamiltonian_interaction(p: &Vec3, w_bar: f64, a: &Vec3, xi: f64) -> Result<f64, ParticleError> {
    let s = radical(w_bar, p, true)?;
    Ok(-s - xi * a.dot(p) / s)
}

/// `-(W̄² - |P - ξA|²)^{1/2}`
pub fn hamiltonian_dual(p: &Vec3, w_bar: f64, a: &Vec3, xi: f64) -> Result<f64, ParticleError> {
    Ok(-radical(w_bar, &(p - a * xi), false)?)
}

/// Energy companion of the interaction Hamiltonian,
/// `R + ⟨ξA,P⟩/R` with `R = (W̄² - |ξA|² - |P|²)^{1/2}`.
pub fn interaction_energy(p: &Vec3, w_bar: f64, a: &Vec3, xi: f64) -> Result<f64, ParticleError> {
    let xa = a * xi;
    let gap = w_bar * w_bar - xa.norm_squared() - p.norm_squared();
    if !(gap > 0.0) {
        return Err(ParticleError::OutsideDomain { gap });
    }
    let r = gap.sqrt();
    Ok(r + xa.dot(p) / r)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MassBranch {
    pub m0: f64,
    /// `|ξA₀/m₀|²`; the energy relation is singular at 1/2.
    pub ratio: f64,
    pub near_singular: bool,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MassBranches {
    pub physical: MassBranch,
    pub unphysical: MassBranch,
}

const SINGULAR_MARGIN: f64 = 0.05;

/// Both rest masses compatible with energy `e0` at vector potential
/// magnitude `xi_a0 = |ξA₀|`.
pub fn rest_mass_from_energy(e0: f64, xi_a0: f64) -> Result<MassBranches, ParticleError> {
    if !(e0 != 0.0 && e0.is_finite()) {
        return Err(ParticleError::InvalidParameter(format!("energy {e0}")));
    }
    let a2 = xi_a0 * xi_a0;
    let x = a2 / (e0 * e0);
    let disc = 1.0 - 4.0 * x;
    if disc < 0.0 {
        return Err(ParticleError::NoRealBranch { discriminant: disc });
    }
    let plus = 0.5 + x + 0.5 * disc.sqrt();
    // the two radicands multiply to 2x + x², which avoids cancellation
    let minus = (2.0 * x + x * x) / plus;
    let branch = |inner: f64| {
        let m0 = e0 * inner.sqrt();
        let ratio = if m0 != 0.0 { a2 / (m0 * m0) } else { f64::NAN };
        MassBranch { m0, ratio, near_singular: !(ratio <= 0.5 - SINGULAR_MARGIN) }
    };
    Ok(MassBranches { physical: branch(plus), unphysical: branch(minus) })
}
