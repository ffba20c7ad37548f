//! Proper-time Schrödinger evolution on a periodic line.
//!
//! Three Hamiltonians share one tridiagonal representation: the free one,
//! the minimally coupled `|(ℏ/i)∂ - ξA|²/2m + W̄`, and the modified one,
//! which drops the `ξ²A²` term and adds `(ℏ²ξ²/2m³) A ∂²(A ·)`.
//! The bands are assembled so that `H[i+1][i] = conj(H[i][i+1])` holds
//! bitwise, which makes the Crank–Nicolson step unitary up to the solver.

mod solver;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use solver::{crank_nicolson_step, evolve, CrankNicolson, SOLVE_TOLERANCE};

use crate::error::QuantumError;
use crate::units::Units;

/// `n` points `origin + i·h` on a circle of circumference `length`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid1 {
    pub n: usize,
    pub length: f64,
    pub origin: f64,
}

impl Grid1 {
    pub fn new(n: usize, length: f64, origin: f64) -> Result<Self, QuantumError> {
        if n < 3 {
            return Err(QuantumError::InvalidParameter(format!("need at least 3 points, got {n}")));
        }
        if !(length > 0.0 && length.is_finite()) || !origin.is_finite() {
            return Err(QuantumError::InvalidParameter(format!("bad extent {length} at {origin}")));
        }
        Ok(Grid1 { n, length, origin })
    }

    pub fn spacing(&self) -> f64 {
        self.length / self.n as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        self.origin + i as f64 * self.spacing()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.x(i)).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WaveFunction1D {
    pub grid: Grid1,
    pub psi: Vec<Complex64>,
}

impl WaveFunction1D {
    pub fn new(grid: Grid1, psi: Vec<Complex64>) -> Result<Self, QuantumError> {
        if psi.len() != grid.n {
            return Err(QuantumError::GridMismatch { expected: grid.n, found: psi.len() });
        }
        if psi.iter().any(|z| !z.is_finite()) {
            return Err(QuantumError::NonFinite("wave function".into()));
        }
        Ok(WaveFunction1D { grid, psi })
    }

    /// Normalized packet `exp(-(x - x0)²/4σ² + i k0 x)`, so `⟨(x - x0)²⟩ = σ²`.
    pub fn gaussian(grid: Grid1, x0: f64, sigma: f64, k0: f64) -> Result<Self, QuantumError> {
        if !(sigma > 0.0) {
            return Err(QuantumError::InvalidParameter(format!("width must be positive, got {sigma}")));
        }
        let psi = grid
            .points()
            .into_iter()
            .map(|x| Complex64::from_polar((-(x - x0).powi(2) / (4.0 * sigma * sigma)).exp(), k0 * x))
            .collect();
        let mut wf = WaveFunction1D::new(grid, psi)?;
        wf.normalize()?;
        Ok(wf)
    }

    pub fn plane_wave(grid: Grid1, k: f64) -> Self {
        let psi = grid.points().into_iter().map(|x| Complex64::from_polar(1.0, k * x)).collect();
        WaveFunction1D { grid, psi }
    }

    /// `Σ |ψ|² h`
    pub fn norm_squared(&self) -> f64 {
        self.psi.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.grid.spacing()
    }

    pub fn normalize(&mut self) -> Result<(), QuantumError> {
        let n = self.norm_squared().sqrt();
        if !(n > 0.0 && n.is_finite()) {
            return Err(QuantumError::NonFinite("norm".into()));
        }
        self.psi.iter_mut().for_each(|z| *z /= n);
        Ok(())
    }

    /// `Σ conj(self) · other · h`
    pub fn inner(&self, other: &WaveFunction1D) -> Result<Complex64, QuantumError> {
        if self.grid != other.grid {
            return Err(QuantumError::GridMismatch { expected: self.grid.n, found: other.grid.n });
        }
        Ok(self.psi.iter().zip(&other.psi).map(|(a, b)| a.conj() * b).sum::<Complex64>() * self.grid.spacing())
    }

    /// `(⟨x⟩, ⟨(x - ⟨x⟩)²⟩)` with `x` measured from the grid origin,
    /// without unwrapping; meaningful while the packet stays off the seam.
    pub fn position_moments(&self) -> (f64, f64) {
        let w: Vec<f64> = self.psi.iter().map(|z| z.norm_sqr()).collect();
        let total: f64 = w.iter().sum();
        let xs = self.grid.points();
        let mean = xs.iter().zip(&w).map(|(x, p)| x * p).sum::<f64>() / total;
        let var = xs.iter().zip(&w).map(|(x, p)| (x - mean).powi(2) * p).sum::<f64>() / total;
        (mean, var)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Free,
    Minimal,
    Modified,
}

/// Constant mass, sampled potential `W̄(x)` and vector potential `A(x)`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantumModel {
    pub variant: Variant,
    pub grid: Grid1,
    pub mass: f64,
    pub potential: Vec<f64>,
    pub vector_potential: Vec<f64>,
    pub xi: f64,
    pub hbar: f64,
}

/// `H` as `diag[i] = H[i][i]` and `upper[i] = H[i][i+1 mod n]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Bands {
    pub diag: Vec<f64>,
    pub upper: Vec<Complex64>,
}

impl Bands {
    pub fn apply(&self, psi: &[Complex64]) -> Vec<Complex64> {
        let n = psi.len();
        (0..n)
            .map(|i| {
                let (l, r) = ((i + n - 1) % n, (i + 1) % n);
                psi[i] * self.diag[i] + self.upper[i] * psi[r] + self.upper[l].conj() * psi[l]
            })
            .collect()
    }
}

impl QuantumModel {
    pub fn new(
        variant: Variant,
        grid: Grid1,
        mass: f64,
        potential: Vec<f64>,
        vector_potential: Vec<f64>,
        xi: f64,
        units: Units,
    ) -> Result<Self, QuantumError> {
        units.validate().map_err(|e| QuantumError::InvalidParameter(e.to_string()))?;
        let m = QuantumModel { variant, grid, mass, potential, vector_potential, xi, hbar: units.hbar };
        m.validate()?;
        Ok(m)
    }

    /// Uniform `W̄ = w` and `A = 0`.
    pub fn uniform(variant: Variant, grid: Grid1, mass: f64, w: f64, units: Units) -> Result<Self, QuantumError> {
        QuantumModel::new(variant, grid, mass, vec![w; grid.n], vec![0.0; grid.n], 1.0, units)
    }

    pub fn validate(&self) -> Result<(), QuantumError> {
        if !(self.mass > 0.0 && self.mass.is_finite()) {
            return Err(QuantumError::InvalidParameter(format!("mass must be positive, got {}", self.mass)));
        }
        for v in [&self.potential, &self.vector_potential] {
            if v.len() != self.grid.n {
                return Err(QuantumError::GridMismatch { expected: self.grid.n, found: v.len() });
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(QuantumError::NonFinite("potential samples".into()));
            }
        }
        if !self.xi.is_finite() || !(self.hbar > 0.0) {
            return Err(QuantumError::InvalidParameter("charge must be finite and hbar positive".into()));
        }
        Ok(())
    }

    /// Lab-time form of the free and minimal models, where `mass` is the
    /// moving mass `m(u)` and `m0` the rest mass: the kinetic prefactor
    /// becomes `m0 / 2m²` and the potential the constant `-m0`.
    pub fn lab_frame(&self, m0: f64) -> Result<QuantumModel, QuantumError> {
        if self.variant == Variant::Modified {
            return Err(QuantumError::InvalidParameter("the modified model has no lab-time form".into()));
        }
        if !(m0 > 0.0) {
            return Err(QuantumError::InvalidParameter(format!("rest mass must be positive, got {m0}")));
        }
        let mut lab = self.clone();
        lab.mass = self.mass * self.mass / m0;
        lab.potential = vec![-m0; self.grid.n];
        Ok(lab)
    }

    pub fn bands(&self) -> Bands {
        let n = self.grid.n;
        let h = self.grid.spacing();
        let (m, hb, xi) = (self.mass, self.hbar, self.xi);
        let a = &self.vector_potential;
        let kin = hb * hb / (2.0 * m * h * h);
        let mut diag: Vec<f64> = self.potential.iter().map(|w| 2.0 * kin + w).collect();
        let mut upper = vec![Complex64::new(-kin, 0.0); n];
        if self.variant != Variant::Free {
            for i in 0..n {
                let r = (i + 1) % n;
                // iℏξ (∂(A·) + A∂) / 2m with centered differences
                upper[i] += Complex64::new(0.0, hb * xi * (a[i] + a[r]) / (4.0 * m * h));
            }
        }
        match self.variant {
            Variant::Free => {}
            Variant::Minimal => {
                for i in 0..n {
                    diag[i] += xi * xi * a[i] * a[i] / (2.0 * m);
                }
            }
            Variant::Modified => {
                let s = hb * hb * xi * xi / (2.0 * m * m * m * h * h);
                for i in 0..n {
                    let r = (i + 1) % n;
                    diag[i] -= 2.0 * s * a[i] * a[i];
                    upper[i] += s * a[i] * a[r];
                }
            }
        }
        Bands { diag, upper }
    }

    fn check(&self, wf: &WaveFunction1D) -> Result<(), QuantumError> {
        if wf.grid != self.grid {
            return Err(QuantumError::GridMismatch { expected: self.grid.n, found: wf.grid.n });
        }
        Ok(())
    }
}

pub fn apply_hamiltonian(model: &QuantumModel, wf: &WaveFunction1D) -> Result<Vec<Complex64>, QuantumError> {
    model.check(wf)?;
    Ok(model.bands().apply(&wf.psi))
}

/// `⟨ψ, Hψ⟩ / ⟨ψ, ψ⟩`
pub fn energy(model: &QuantumModel, wf: &WaveFunction1D) -> Result<f64, QuantumError> {
    let hpsi = apply_hamiltonian(model, wf)?;
    let num: Complex64 = wf.psi.iter().zip(&hpsi).map(|(a, b)| a.conj() * b).sum();
    let den: f64 = wf.psi.iter().map(|z| z.norm_sqr()).sum();
    Ok(num.re / den)
}

/// One row of the observables table.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Observables {
    pub tau: f64,
    pub norm: f64,
    pub energy: f64,
    pub mean_x: f64,
    pub variance: f64,
}

pub fn observables(model: &QuantumModel, wf: &WaveFunction1D, tau: f64) -> Result<Observables, QuantumError> {
    let (mean_x, variance) = wf.position_moments();
    Ok(Observables { tau, norm: wf.norm_squared(), energy: energy(model, wf)?, mean_x, variance })
}
