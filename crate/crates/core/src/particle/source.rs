use nalgebra::Matrix3;

use super::Vec3;
use crate::error::ParticleError;

#[derive(Clone, Debug, PartialEq)]
pub enum SourceKind {
    /// Constant vacuum potential `w0`.
    Uniform { w0: f64 },
    /// `w0 + grad · r`
    Ramp { w0: f64, grad: Vec3 },
    /// Charge `xi_f` at rest at `r_f` on top of a constant background `w0`.
    StaticCoulomb { xi_f: f64, r_f: Vec3, w0: f64 },
    /// Charge `xi_f` moving as `r_f0 + u_f t`, potentials in boosted-static form.
    MovingCoulomb { xi_f: f64, r_f0: Vec3, u_f: Vec3 },
}

/// Analytic vacuum potential `W̄ = ξφ` and vector potential `A` seen by a
/// particle of charge `xi`. Any constant `a_offset` is added to `A`.
#[derive(Clone, Debug, PartialEq)]
pub struct PotentialSource {
    kind: SourceKind,
    xi: Option<f64>,
    c: f64,
    a_offset: Vec3,
}

/// Everything a force or Hamiltonian needs at one space-time point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PotentialSample {
    pub w_bar: f64,
    pub grad_w_bar: Vec3,
    pub dw_dt: f64,
    pub a: Vec3,
    pub da_dt: Vec3,
    /// `jac_a[(i, k)] = ∂A_i/∂r_k`
    pub jac_a: Matrix3<f64>,
    pub u_f: Vec3,
}

impl PotentialSample {
    pub fn b(&self) -> Vec3 {
        let j = &self.jac_a;
        Vec3::new(j[(2, 1)] - j[(1, 2)], j[(0, 2)] - j[(2, 0)], j[(1, 0)] - j[(0, 1)])
    }
}

impl PotentialSource {
    pub fn uniform(w0: f64) -> Self {
        PotentialSource { kind: SourceKind::Uniform { w0 }, xi: None, c: 1.0, a_offset: Vec3::zeros() }
    }

    pub fn ramp(w0: f64, grad: Vec3) -> Self {
        PotentialSource { kind: SourceKind::Ramp { w0, grad }, xi: None, c: 1.0, a_offset: Vec3::zeros() }
    }

    pub fn static_coulomb(xi_f: f64, r_f: Vec3, xi: f64, w0: f64) -> Self {
        PotentialSource {
            kind: SourceKind::StaticCoulomb { xi_f, r_f, w0 },
            xi: Some(xi),
            c: 1.0,
            a_offset: Vec3::zeros(),
        }
    }

    pub fn moving_coulomb(xi_f: f64, r_f0: Vec3, u_f: Vec3, xi: f64, c: f64) -> Result<Self, ParticleError> {
        if !(c > 0.0) {
            return Err(ParticleError::InvalidParameter(format!("light speed {c}")));
        }
        if u_f.norm() >= c {
            return Err(ParticleError::Superluminal { speed: u_f.norm(), c });
        }
        Ok(PotentialSource {
            kind: SourceKind::MovingCoulomb { xi_f, r_f0, u_f },
            xi: Some(xi),
            c,
            a_offset: Vec3::zeros(),
        })
    }

    pub fn with_vector_offset(mut self, a: Vec3) -> Self {
        self.a_offset = a;
        self
    }

    pub fn kind(&self) -> &SourceKind {
        &self.kind
    }

    pub fn coupling(&self) -> Option<f64> {
        self.xi
    }

    pub fn a_offset(&self) -> Vec3 {
        self.a_offset
    }

    pub fn is_stationary(&self) -> bool {
        match self.kind {
            SourceKind::MovingCoulomb { u_f, .. } => u_f == Vec3::zeros(),
            _ => true,
        }
    }

    pub fn source_position(&self, t: f64) -> Option<Vec3> {
        match self.kind {
            SourceKind::Uniform { .. } | SourceKind::Ramp { .. } => None,
            SourceKind::StaticCoulomb { r_f, .. } => Some(r_f),
            SourceKind::MovingCoulomb { r_f0, u_f, .. } => Some(r_f0 + u_f * t),
        }
    }

    pub fn source_velocity(&self) -> Vec3 {
        match self.kind {
            SourceKind::MovingCoulomb { u_f, .. } => u_f,
            _ => Vec3::zeros(),
        }
    }

    /// Rejects a particle whose charge differs from the coupling the source
    /// was built with.
    pub fn check_charge(&self, xi: f64) -> Result<(), ParticleError> {
        match self.xi {
            Some(s) if (s - xi).abs() > 1e-14 * s.abs().max(xi.abs()) => {
                Err(ParticleError::ChargeMismatch { source_xi: s, particle_xi: xi })
            }
            _ => Ok(()),
        }
    }

    pub fn sample(&self, t: f64, r: &Vec3) -> Result<PotentialSample, ParticleError> {
        let mut s = match &self.kind {
            SourceKind::Uniform { w0 } => PotentialSample {
                w_bar: *w0,
                grad_w_bar: Vec3::zeros(),
                dw_dt: 0.0,
                a: Vec3::zeros(),
                da_dt: Vec3::zeros(),
                jac_a: Matrix3::zeros(),
                u_f: Vec3::zeros(),
            },
            SourceKind::Ramp { w0, grad } => PotentialSample {
                w_bar: w0 + grad.dot(r),
                grad_w_bar: *grad,
                dw_dt: 0.0,
                a: Vec3::zeros(),
                da_dt: Vec3::zeros(),
                jac_a: Matrix3::zeros(),
                u_f: Vec3::zeros(),
            },
            SourceKind::StaticCoulomb { xi_f, r_f, w0 } => {
                let k = xi_f * self.xi.unwrap_or(0.0);
                let d = r - r_f;
                let rn = d.norm();
                if rn == 0.0 {
                    return Err(ParticleError::CoincidentSource);
                }
                PotentialSample {
                    w_bar: w0 + k / rn,
                    grad_w_bar: d * (-k / (rn * rn * rn)),
                    dw_dt: 0.0,
                    a: Vec3::zeros(),
                    da_dt: Vec3::zeros(),
                    jac_a: Matrix3::zeros(),
                    u_f: Vec3::zeros(),
                }
            }
            SourceKind::MovingCoulomb { xi_f, r_f0, u_f } => {
                let xi = self.xi.unwrap_or(0.0);
                let d = r - (r_f0 + u_f * t);
                let beta2 = u_f.norm_squared() / (self.c * self.c);
                let gamma = 1.0 / (1.0 - beta2).sqrt();
                // M stretches the component along u_f by γ
                let m = if beta2 > 0.0 {
                    let n = u_f / u_f.norm();
                    Matrix3::identity() + (n * n.transpose()) * (gamma - 1.0)
                } else {
                    Matrix3::identity()
                };
                let dp = m * d;
                let rn = dp.norm();
                if rn == 0.0 {
                    return Err(ParticleError::CoincidentSource);
                }
                let phi = xi_f * gamma / rn;
                let grad_phi = (m * dp) * (-xi_f * gamma / (rn * rn * rn));
                let dphi_dt = -grad_phi.dot(u_f);
                let uc = u_f / self.c;
                PotentialSample {
                    w_bar: xi * phi,
                    grad_w_bar: grad_phi * xi,
                    dw_dt: xi * dphi_dt,
                    a: uc * phi,
                    da_dt: uc * dphi_dt,
                    jac_a: uc * grad_phi.transpose(),
                    u_f: *u_f,
                }
            }
        };
        s.a += self.a_offset;
        Ok(s)
    }
}
