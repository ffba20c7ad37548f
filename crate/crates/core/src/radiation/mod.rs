//! Self-force of a rigid, spherically symmetric charge.
//!
//! The retarded self-field of a slowly moving distribution expands into
//! the distance moments `I_m = ∬ ρ(r) ρ(r') |r - r'|^(m-1)` of its density.
//! [`ChargeDistribution::moments`] estimates them, and
//! [`SelfForceSeries`] combines them with time derivatives of the velocity.

mod quadrature;
mod series;

use serde::{Deserialize, Serialize};

pub use quadrature::Estimate;
pub use series::{
    em_masses, leading_order_force, observed_mass, self_force_series, ObservedMass, PolynomialVelocity,
    RigidTrajectory, SelfForce, SelfForceSeries, SeriesTerm, SinusoidalVelocity, SLOW_LIMIT,
};

use crate::error::RadiationError;
use crate::particle::Vec3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Shape {
    Shell,
    Ball,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "method")]
pub enum Quadrature {
    /// Independent uniform pairs, split over `partitions` ChaCha streams.
    MonteCarlo { pairs: u64, seed: u64, partitions: u32 },
    /// Gauss–Legendre product rule; the error estimate compares `order`
    /// against `2 * order`.
    Gauss { order: usize },
}

impl Default for Quadrature {
    fn default() -> Self {
        Quadrature::MonteCarlo { pairs: 1_000_000, seed: 0, partitions: 8 }
    }
}

/// Charge `xi` spread uniformly over a sphere or ball of radius `radius`.
/// A zero radius is the point limit, whose singular moments are infinite.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChargeDistribution {
    pub shape: Shape,
    pub radius: f64,
    pub xi: f64,
    pub quadrature: Quadrature,
    /// Largest accepted relative error of any moment.
    pub tolerance: f64,
}

/// `values[m]` estimates `I_m`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DistanceMoments {
    pub xi: f64,
    pub radius: f64,
    pub values: Vec<Estimate>,
}

impl DistanceMoments {
    pub fn get(&self, m: usize) -> Option<f64> {
        self.values.get(m).map(|e| e.value)
    }

    /// `E_es = I_0 / 2`
    pub fn self_energy(&self) -> f64 {
        0.5 * self.values[0].value
    }
}

impl ChargeDistribution {
    pub fn new(shape: Shape, radius: f64, xi: f64, quadrature: Quadrature) -> Result<Self, RadiationError> {
        let d = ChargeDistribution { shape, radius, xi, quadrature, tolerance: 1e-2 };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<(), RadiationError> {
        let bad = |s: String| Err(RadiationError::Distribution(s));
        if !(self.radius >= 0.0 && self.radius.is_finite()) {
            return bad(format!("radius must be finite and non-negative, got {}", self.radius));
        }
        if !self.xi.is_finite() {
            return bad(format!("charge must be finite, got {}", self.xi));
        }
        if !(self.tolerance > 0.0) {
            return bad(format!("tolerance must be positive, got {}", self.tolerance));
        }
        match self.quadrature {
            Quadrature::MonteCarlo { pairs, partitions, .. } => {
                if pairs < 2 || partitions == 0 || u64::from(partitions) > pairs {
                    return bad(format!("need at least 2 pairs and 1..=pairs partitions, got {pairs}/{partitions}"));
                }
            }
            Quadrature::Gauss { order } => {
                if !(1..=4096).contains(&order) {
                    return bad(format!("Gauss order must lie in 1..=4096, got {order}"));
                }
            }
        }
        Ok(())
    }

    /// Estimates `I_0 ..= I_max_m`.
    pub fn moments(&self, max_m: usize) -> Result<DistanceMoments, RadiationError> {
        self.validate()?;
        let xi2 = self.xi * self.xi;
        let values = if self.radius == 0.0 {
            (0..=max_m)
                .map(|m| Estimate {
                    value: match m {
                        0 if xi2 > 0.0 => f64::INFINITY,
                        1 => xi2,
                        _ => 0.0,
                    },
                    error: 0.0,
                })
                .collect()
        } else {
            let unit = match self.quadrature {
                Quadrature::MonteCarlo { pairs, seed, partitions } => {
                    quadrature::monte_carlo(self.shape, max_m, pairs, seed, partitions)
                }
                Quadrature::Gauss { order } => quadrature::gauss(self.shape, max_m, order),
            };
            // unit-radius moments scale as a^(m-1)
            let values: Vec<Estimate> = unit
                .into_iter()
                .enumerate()
                .map(|(m, e)| {
                    let s = xi2 * self.radius.powi(m as i32 - 1);
                    Estimate { value: e.value * s, error: e.error * s.abs() }
                })
                .collect();
            for e in &values {
                if e.value != 0.0 && e.relative_error() > self.tolerance {
                    return Err(RadiationError::Quadrature { relative: e.relative_error(), tolerance: self.tolerance });
                }
            }
            values
        };
        Ok(DistanceMoments { xi: self.xi, radius: self.radius, values })
    }

    pub fn self_energy(&self) -> Result<Estimate, RadiationError> {
        let m = self.moments(0)?;
        let e = m.values[0];
        Ok(Estimate { value: 0.5 * e.value, error: 0.5 * e.error })
    }

    /// Pair average of `cos²` between `r - r'` and `dir`; `1/3` for any
    /// spherically symmetric density.
    pub fn direction_average(&self, dir: &Vec3) -> Result<Estimate, RadiationError> {
        self.validate()?;
        let n = dir.norm();
        if !(n > 0.0 && n.is_finite()) {
            return Err(RadiationError::InvalidParameter("direction must be a finite non-zero vector".into()));
        }
        let dir = dir / n;
        Ok(match self.quadrature {
            Quadrature::MonteCarlo { pairs, seed, partitions } => {
                quadrature::mc_direction(self.shape, &dir, pairs, seed, partitions)
            }
            Quadrature::Gauss { order } => quadrature::gauss_direction(order),
        })
    }
}
