use std::sync::Arc;

use nalgebra::{DMatrix, Matrix3};

use super::bracket::{Canonical, PoissonStructure};
use super::diff5;
use crate::error::ReductionError;
use crate::particle::Vec3;

type VecFn = Arc<dyn Fn(&Vec3) -> Vec3 + Send + Sync>;
type MatFn = Arc<dyn Fn(&Vec3) -> Matrix3<f64> + Send + Sync>;

/// Potential `A(q)` with charge `xi`; `jacobian(q)[(i, j)] = ∂A_j/∂q^i`.
#[derive(Clone)]
pub struct AbelianGaugeField {
    pub xi: f64,
    potential: VecFn,
    jacobian: Option<MatFn>,
}

impl std::fmt::Debug for AbelianGaugeField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("AbelianGaugeField").field("xi", &self.xi).finish_non_exhaustive()
    }
}

pub(crate) fn fd_jacobian(q: &Vec3, f: impl Fn(&Vec3) -> Vec3) -> Matrix3<f64> {
    let mut j = Matrix3::zeros();
    for i in 0..3 {
        let h = 1e-3 * q[i].abs().max(1.0);
        let d = diff5(h, |e| {
            let mut x = *q;
            x[i] += e;
            f(&x)
        });
        for k in 0..3 {
            j[(i, k)] = d[k];
        }
    }
    j
}

impl AbelianGaugeField {
    /// Jacobian by 5-point differences.
    pub fn new(xi: f64, potential: impl Fn(&Vec3) -> Vec3 + Send + Sync + 'static) -> Self {
        AbelianGaugeField { xi, potential: Arc::new(potential), jacobian: None }
    }

    pub fn with_jacobian(
        xi: f64,
        potential: impl Fn(&Vec3) -> Vec3 + Send + Sync + 'static,
        jacobian: impl Fn(&Vec3) -> Matrix3<f64> + Send + Sync + 'static,
    ) -> Self {
        AbelianGaugeField { xi, potential: Arc::new(potential), jacobian: Some(Arc::new(jacobian)) }
    }

    pub fn potential(&self, q: &Vec3) -> Vec3 {
        (self.potential)(q)
    }

    pub fn jacobian(&self, q: &Vec3) -> Matrix3<f64> {
        match &self.jacobian {
            Some(j) => j(q),
            None => fd_jacobian(q, |x| (self.potential)(x)),
        }
    }

    /// `F_ij = ∂_i A_j - ∂_j A_i`
    pub fn curvature(&self, q: &Vec3) -> Matrix3<f64> {
        let j = self.jacobian(q);
        j - j.transpose()
    }

    /// Relative max-norm gap between the analytic and differenced Jacobian.
    pub fn jacobian_deviation(&self, q: &Vec3) -> f64 {
        let a = self.jacobian(q);
        let fd = fd_jacobian(q, |x| (self.potential)(x));
        (a - fd).amax() / a.amax().max(1.0)
    }
}

/// `(q, p)` with `{p_i, p_j} = ξ F_ji(q)`.
#[derive(Clone)]
pub struct MagneticStructure {
    pub xi: f64,
    curvature: MatFn,
}

impl std::fmt::Debug for MagneticStructure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MagneticStructure").field("xi", &self.xi).finish_non_exhaustive()
    }
}

impl MagneticStructure {
    pub fn from_gauge(gauge: &AbelianGaugeField) -> Self {
        let g = gauge.clone();
        MagneticStructure { xi: gauge.xi, curvature: Arc::new(move |q| g.curvature(q)) }
    }

    /// `F_ij = ε_ijk B_k` for a field that need not be divergence free.
    pub fn from_field(xi: f64, b: impl Fn(&Vec3) -> Vec3 + Send + Sync + 'static) -> Self {
        MagneticStructure {
            xi,
            curvature: Arc::new(move |q| {
                let b = b(q);
                Matrix3::new(0.0, b.z, -b.y, -b.z, 0.0, b.x, b.y, -b.x, 0.0)
            }),
        }
    }

    pub fn curvature(&self, q: &Vec3) -> Matrix3<f64> {
        (self.curvature)(q)
    }
}

impl PoissonStructure for MagneticStructure {
    fn dim(&self) -> usize {
        6
    }

    fn matrix(&self, z: &[f64]) -> DMatrix<f64> {
        let mut m = Canonical { n: 3 }.matrix(z);
        let f = self.curvature(&Vec3::new(z[0], z[1], z[2]));
        for i in 0..3 {
            for j in 0..3 {
                m[(3 + i, 3 + j)] = self.xi * f[(j, i)];
            }
        }
        m
    }
}

fn split(z: &[f64]) -> Result<(Vec3, Vec3), ReductionError> {
    if z.len() != 6 {
        return Err(ReductionError::Dimension { expected: 6, found: z.len() });
    }
    Ok((Vec3::new(z[0], z[1], z[2]), Vec3::new(z[3], z[4], z[5])))
}

/// `(q, p) ↦ (q, p + ξA(q))`
pub fn minimal_shift(gauge: &AbelianGaugeField, z: &[f64]) -> Result<Vec<f64>, ReductionError> {
    let (q, p) = split(z)?;
    let pt = p + gauge.potential(&q) * gauge.xi;
    Ok(vec![q.x, q.y, q.z, pt.x, pt.y, pt.z])
}

pub fn minimal_unshift(gauge: &AbelianGaugeField, z: &[f64]) -> Result<Vec<f64>, ReductionError> {
    let (q, pt) = split(z)?;
    let p = pt - gauge.potential(&q) * gauge.xi;
    Ok(vec![q.x, q.y, q.z, p.x, p.y, p.z])
}

/// The magnetic bracket expressed in the shifted coordinates `(q, p̃)`.
#[derive(Clone, Debug)]
pub struct ShiftedMagnetic {
    pub gauge: AbelianGaugeField,
}

impl PoissonStructure for ShiftedMagnetic {
    fn dim(&self) -> usize {
        6
    }

    fn matrix(&self, zt: &[f64]) -> DMatrix<f64> {
        let z = minimal_unshift(&self.gauge, zt).expect("six coordinates");
        let q = Vec3::new(z[0], z[1], z[2]);
        let pi = MagneticStructure::from_gauge(&self.gauge).matrix(&z);
        let jac = self.gauge.jacobian(&q);
        let mut t = DMatrix::identity(6, 6);
        for i in 0..3 {
            for k in 0..3 {
                t[(3 + i, k)] = self.gauge.xi * jac[(k, i)];
            }
        }
        &t * pi * t.transpose()
    }
}
