use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::basis::{coherent_embed, FockBasis, TruncatedFockVector};
use super::operator::{liouvillian_build, PolynomialSystem, SparseMatrix};
use crate::error::FockError;

use std::sync::Arc;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "scheme")]
pub enum Scheme {
    /// Classical RK4 with the smallest number of equal steps not exceeding `max_dt`.
    Rk4 { max_dt: f64 },
    /// Scaled-and-squared Taylor exponential of the dense operator.
    #[default]
    Exponential,
}

fn check_time(t: f64) -> Result<(), FockError> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(FockError::NegativeTime(t));
    }
    Ok(())
}

fn finite(v: &[Complex64], what: &str) -> Result<(), FockError> {
    if v.iter().any(|c| !c.is_finite()) {
        return Err(FockError::Overflow(what.into()));
    }
    Ok(())
}

/// `exp(t K)` by scaling to unit-half norm, a Taylor series, and squaring.
pub fn expm(k: &SparseMatrix, t: f64) -> Result<DMatrix<Complex64>, FockError> {
    check_time(t)?;
    let n = k.dim();
    let norm = k.norm1() * t;
    if !norm.is_finite() {
        return Err(FockError::Overflow("operator norm".into()));
    }
    let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as u32 } else { 0 };
    if squarings > 1000 {
        return Err(FockError::Overflow(format!("{squarings} squarings needed")));
    }
    let a = k.to_dense() * Complex64::new(t / 2f64.powi(squarings as i32), 0.0);
    let mut sum = DMatrix::<Complex64>::identity(n, n);
    let mut term = sum.clone();
    for j in 1..=60 {
        term = &term * &a * Complex64::new(1.0 / j as f64, 0.0);
        sum += &term;
        let tn = term.iter().fold(0.0f64, |m, x| m.max(x.norm()));
        let sn = sum.iter().fold(0.0f64, |m, x| m.max(x.norm()));
        if tn <= 1e-18 * sn {
            break;
        }
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    if sum.iter().any(|x| !x.is_finite()) {
        return Err(FockError::Overflow("matrix exponential".into()));
    }
    Ok(sum)
}

fn rk4_step(k: &SparseMatrix, x: &mut [Complex64], dt: f64) {
    let axpy = |u: &[Complex64], d: &[Complex64], a: f64| -> Vec<Complex64> {
        u.iter().zip(d).map(|(x, y)| x + y * a).collect()
    };
    let k1 = k.matvec(x);
    let k2 = k.matvec(&axpy(x, &k1, 0.5 * dt));
    let k3 = k.matvec(&axpy(x, &k2, 0.5 * dt));
    let k4 = k.matvec(&axpy(x, &k3, dt));
    for i in 0..x.len() {
        x[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (dt / 6.0);
    }
}

/// Fixed-interval propagator for a time-independent operator.
#[derive(Clone, Debug)]
pub struct Propagator {
    operator: SparseMatrix,
    dt: f64,
    kind: Stepper,
}

#[derive(Clone, Debug)]
enum Stepper {
    Rk4 { substeps: usize },
    Dense(DMatrix<Complex64>),
}

impl Propagator {
    pub fn new(operator: &SparseMatrix, dt: f64, scheme: Scheme) -> Result<Self, FockError> {
        check_time(dt)?;
        let kind = match scheme {
            Scheme::Rk4 { max_dt } => {
                if !(max_dt > 0.0) {
                    return Err(FockError::InvalidParameter(format!("max_dt must be positive, got {max_dt}")));
                }
                Stepper::Rk4 { substeps: (dt / max_dt).ceil().max(1.0) as usize }
            }
            Scheme::Exponential => Stepper::Dense(expm(operator, dt)?),
        };
        Ok(Propagator { operator: operator.clone(), dt, kind })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn step(&self, state: &TruncatedFockVector) -> Result<TruncatedFockVector, FockError> {
        if state.basis != self.operator.basis {
            return Err(FockError::BasisMismatch);
        }
        let coeffs = match &self.kind {
            Stepper::Rk4 { substeps } => {
                let mut x = state.coeffs.clone();
                let h = self.dt / *substeps as f64;
                if self.dt > 0.0 {
                    for _ in 0..*substeps {
                        rk4_step(&self.operator, &mut x, h);
                    }
                }
                x
            }
            Stepper::Dense(e) => {
                let n = e.nrows();
                (0..n)
                    .map(|r| (0..n).fold(Complex64::new(0.0, 0.0), |acc, c| acc + e[(r, c)] * state.coeffs[c]))
                    .collect()
            }
        };
        finite(&coeffs, "state coefficients")?;
        Ok(TruncatedFockVector { basis: state.basis.clone(), coeffs })
    }
}

/// `exp(t K̂)|state⟩`
pub fn evolve(
    state: &TruncatedFockVector,
    operator: &SparseMatrix,
    t: f64,
    scheme: Scheme,
) -> Result<TruncatedFockVector, FockError> {
    Propagator::new(operator, t, scheme)?.step(state)
}

/// States at `k · t / steps` for `k = 0 ..= steps`.
pub fn evolve_series(
    state: &TruncatedFockVector,
    operator: &SparseMatrix,
    t: f64,
    steps: usize,
    scheme: Scheme,
) -> Result<Vec<TruncatedFockVector>, FockError> {
    let steps = steps.max(1);
    let p = Propagator::new(operator, t / steps as f64, scheme)?;
    let mut out = Vec::with_capacity(steps + 1);
    out.push(state.clone());
    for _ in 0..steps {
        let next = p.step(out.last().unwrap())?;
        out.push(next);
    }
    Ok(out)
}

/// `u_j = ⟨Ω|a_j|ψ⟩ / ⟨Ω|ψ⟩`
pub fn extract(state: &TruncatedFockVector) -> Result<Vec<Complex64>, FockError> {
    let b = &state.basis;
    if b.max_occupation() == 0 {
        return Err(FockError::InvalidParameter("basis has no one-particle shell".into()));
    }
    let vac = state.vacuum_amplitude();
    if vac == Complex64::new(0.0, 0.0) || !vac.is_finite() {
        return Err(FockError::VanishingVacuum);
    }
    Ok((0..b.modes()).map(|j| state.coeffs[1 + j] / vac).collect())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairSample {
    pub t: f64,
    pub pairing: Complex64,
}

/// `⟨u(t)|γ(t)⟩` with `|u⟩` the evolved coherent embedding of `u0` and
/// `γ` evolved by `∂γ/∂t = -K̂⁺γ` on the same basis.
pub fn conservation_pair(
    system: &PolynomialSystem,
    u0: &[Complex64],
    gamma0: &TruncatedFockVector,
    basis: &Arc<FockBasis>,
    t: f64,
    steps: usize,
    scheme: Scheme,
) -> Result<Vec<PairSample>, FockError> {
    if gamma0.basis != *basis {
        return Err(FockError::BasisMismatch);
    }
    let k = liouvillian_build(system, basis)?;
    let back = k.adjoint().scale(Complex64::new(-1.0, 0.0));
    let steps = steps.max(1);
    let dt = t / steps as f64;
    let pu = Propagator::new(&k, dt, scheme)?;
    let pg = Propagator::new(&back, dt, scheme)?;
    let mut u = coherent_embed(u0, basis)?;
    let mut g = gamma0.clone();
    let mut out = Vec::with_capacity(steps + 1);
    out.push(PairSample { t: 0.0, pairing: u.inner(&g)? });
    for i in 1..=steps {
        u = pu.step(&u)?;
        g = pg.step(&g)?;
        out.push(PairSample { t: i as f64 * dt, pairing: u.inner(&g)? });
    }
    Ok(out)
}
