use serde::Serialize;

use super::{ChargeDistribution, DistanceMoments};
use crate::error::RadiationError;
use crate::particle::Vec3;

/// Largest accepted `|u| / c`.
pub const SLOW_LIMIT: f64 = 0.1;

/// Velocity history of a rigid distribution with analytic derivatives.
pub trait RigidTrajectory {
    /// `d^k u / dt^k` at `t`, or `None` beyond [`Self::max_order`].
    fn velocity_derivative(&self, t: f64, k: usize) -> Option<Vec3>;

    fn max_order(&self) -> usize {
        usize::MAX
    }
}

/// `u(t) = Σ_k coefficients[k] t^k`
#[derive(Clone, Debug, PartialEq)]
pub struct PolynomialVelocity {
    pub coefficients: Vec<Vec3>,
}

impl RigidTrajectory for PolynomialVelocity {
    fn velocity_derivative(&self, t: f64, k: usize) -> Option<Vec3> {
        let mut sum = Vec3::zeros();
        // Horner on the k-th derivative
        for (j, c) in self.coefficients.iter().enumerate().skip(k).rev() {
            let falling: f64 = ((j - k + 1)..=j).map(|i| i as f64).product();
            sum = sum * t + c * falling;
        }
        Some(sum)
    }
}

/// `u(t) = drift + amplitude · sin(ω t + phase)`
#[derive(Clone, Debug, PartialEq)]
pub struct SinusoidalVelocity {
    pub drift: Vec3,
    pub amplitude: Vec3,
    pub omega: f64,
    pub phase: f64,
}

impl RigidTrajectory for SinusoidalVelocity {
    fn velocity_derivative(&self, t: f64, k: usize) -> Option<Vec3> {
        let arg = self.omega * t + self.phase + 0.5 * std::f64::consts::PI * (k % 4) as f64;
        let osc = self.amplitude * (self.omega.powi(k as i32) * arg.sin());
        Some(if k == 0 { self.drift + osc } else { osc })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SeriesTerm {
    pub m: usize,
    /// `(2/3)(-1)^(m+1) I_m / (m! c^(m+2))`
    pub coefficient: f64,
    pub moment: f64,
    pub force: [f64; 3],
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SelfForce {
    pub total: [f64; 3],
    pub terms: Vec<SeriesTerm>,
}

impl SelfForce {
    pub fn total(&self) -> Vec3 {
        Vec3::from(self.total)
    }

    /// The `m = 0` term, `-(4 E_es / 3c²) du/dt`.
    pub fn em_mass_term(&self) -> Vec3 {
        Vec3::from(self.terms[0].force)
    }

    /// The `m = 1` term, `(2ξ²/3c³) d²u/dt²`.
    pub fn radiation_term(&self) -> Option<Vec3> {
        self.terms.get(1).map(|t| Vec3::from(t.force))
    }
}

/// Truncated self-force series with cached moments.
#[derive(Clone, Debug, PartialEq)]
pub struct SelfForceSeries {
    c: f64,
    coefficients: Vec<(f64, f64)>,
}

fn check_c(c: f64) -> Result<(), RadiationError> {
    if c > 0.0 && c.is_finite() {
        Ok(())
    } else {
        Err(RadiationError::InvalidParameter(format!("c must be positive, got {c}")))
    }
}

fn check_slow(u: &Vec3, c: f64) -> Result<(), RadiationError> {
    let speed = u.norm();
    if speed > SLOW_LIMIT * c || !speed.is_finite() {
        return Err(RadiationError::NotSlow { speed, limit: SLOW_LIMIT * c });
    }
    Ok(())
}

fn derivative(traj: &dyn RigidTrajectory, t: f64, k: usize) -> Result<Vec3, RadiationError> {
    let available = traj.max_order();
    if k > available {
        return Err(RadiationError::DerivativeUnavailable { requested: k, available });
    }
    traj.velocity_derivative(t, k).ok_or(RadiationError::DerivativeUnavailable { requested: k, available })
}

impl SelfForceSeries {
    /// Keeps the terms `m = 0..=order`; `moments` must reach `I_order`.
    pub fn new(moments: &DistanceMoments, order: usize, c: f64) -> Result<Self, RadiationError> {
        check_c(c)?;
        if moments.values.len() <= order {
            return Err(RadiationError::InvalidParameter(format!(
                "moments reach m = {}, series needs m = {order}",
                moments.values.len() as isize - 1
            )));
        }
        let mut fact = 1.0;
        let coefficients = (0..=order)
            .map(|m| {
                if m > 0 {
                    fact *= m as f64;
                }
                let sign = if m % 2 == 0 { -1.0 } else { 1.0 };
                let im = moments.values[m].value;
                (2.0 / 3.0 * sign * im / (fact * c.powi(m as i32 + 2)), im)
            })
            .collect();
        Ok(SelfForceSeries { c, coefficients })
    }

    pub fn order(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn evaluate(&self, traj: &dyn RigidTrajectory, t: f64) -> Result<SelfForce, RadiationError> {
        check_slow(&derivative(traj, t, 0)?, self.c)?;
        let mut total = Vec3::zeros();
        let mut terms = Vec::with_capacity(self.coefficients.len());
        for (m, &(coefficient, moment)) in self.coefficients.iter().enumerate() {
            let d = derivative(traj, t, m + 1)?;
            // a vanishing derivative contributes nothing even when I_m is infinite
            let f = if d == Vec3::zeros() { Vec3::zeros() } else { d * coefficient };
            total += f;
            terms.push(SeriesTerm { m, coefficient, moment, force: f.into() });
        }
        Ok(SelfForce { total: total.into(), terms })
    }
}

pub fn self_force_series(
    dist: &ChargeDistribution,
    traj: &dyn RigidTrajectory,
    t: f64,
    order: usize,
    c: f64,
) -> Result<SelfForce, RadiationError> {
    SelfForceSeries::new(&dist.moments(order)?, order, c)?.evaluate(traj, t)
}

/// `-d/dt((4/3) m_es u) + (2ξ²/3c³) d²u/dt²` with the velocity-dependent
/// inertial mass differentiated exactly.
pub fn leading_order_force(
    moments: &DistanceMoments,
    traj: &dyn RigidTrajectory,
    t: f64,
    c: f64,
) -> Result<Vec3, RadiationError> {
    check_c(c)?;
    let u = derivative(traj, t, 0)?;
    check_slow(&u, c)?;
    let du = derivative(traj, t, 1)?;
    let ddu = derivative(traj, t, 2)?;
    let m0 = moments.self_energy() / (c * c);
    let g2 = 1.0 / (1.0 - u.norm_squared() / (c * c));
    let g = g2.sqrt();
    let d_gamma_u = du * g + u * (g * g2 * u.dot(&du) / (c * c));
    Ok(d_gamma_u * (-4.0 / 3.0 * m0) + ddu * (2.0 * moments.xi * moments.xi / (3.0 * c.powi(3))))
}

/// Electromagnetic rest and inertial masses `(E_es/c², γ E_es/c²)`.
pub fn em_masses(self_energy: f64, u: &Vec3, c: f64) -> Result<(f64, f64), RadiationError> {
    check_c(c)?;
    let speed = u.norm();
    if !(speed < c) {
        return Err(RadiationError::Superluminal { speed, c });
    }
    let m0 = self_energy / (c * c);
    Ok((m0, m0 / (1.0 - (speed / c).powi(2)).sqrt()))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ObservedMass {
    pub m_ph: f64,
    pub m_es: f64,
    /// Set in the point limit, where the self-energy is infinite.
    pub divergent: bool,
}

/// `m_ph = m_g + (4/3) m_es`
pub fn observed_mass(m_g: f64, self_energy: f64, u: &Vec3, c: f64) -> Result<ObservedMass, RadiationError> {
    let (_, m_es) = em_masses(self_energy, u, c)?;
    let m_ph = m_g + 4.0 / 3.0 * m_es;
    Ok(ObservedMass { m_ph, m_es, divergent: !m_es.is_finite() })
}
