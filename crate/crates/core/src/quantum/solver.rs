use num_complex::Complex64;

use super::{observables, Bands, Observables, QuantumModel, WaveFunction1D};
use crate::error::QuantumError;

/// Relative residual every Crank–Nicolson solve is driven below.
pub const SOLVE_TOLERANCE: f64 = 1e-12;

const MAX_REFINEMENTS: usize = 8;

/// Factored Cayley step `(1 + iΔH/2ℏ)ψ' = (1 - iΔH/2ℏ)ψ`.
///
/// The periodic tridiagonal system is reduced by Sherman–Morrison to an
/// open one, eliminated once, and each solve is refined until its
/// residual meets [`SOLVE_TOLERANCE`].
#[derive(Clone, Debug)]
pub struct CrankNicolson {
    model: QuantumModel,
    bands: Bands,
    dtau: f64,
    alpha: f64,
    sub: Vec<Complex64>,
    cp: Vec<Complex64>,
    denom: Vec<Complex64>,
    z: Vec<Complex64>,
    gamma: Complex64,
    beta: Complex64,
    z_fact: Complex64,
}

impl CrankNicolson {
    pub fn new(model: &QuantumModel, dtau: f64) -> Result<Self, QuantumError> {
        model.validate()?;
        if !(dtau >= 0.0 && dtau.is_finite()) {
            return Err(QuantumError::InvalidParameter(format!("step must be finite and non-negative, got {dtau}")));
        }
        let bands = model.bands();
        let n = model.grid.n;
        let alpha = dtau / (2.0 * model.hbar);
        let ia = Complex64::new(0.0, alpha);
        let b: Vec<Complex64> = bands.diag.iter().map(|d| Complex64::new(1.0, alpha * d)).collect();
        let sup: Vec<Complex64> = bands.upper.iter().map(|u| ia * u).collect();
        let sub: Vec<Complex64> = (0..n).map(|i| ia * bands.upper[(i + n - 1) % n].conj()).collect();
        // corners: M[n-1][0] = sup[n-1], M[0][n-1] = sub[0]
        let (corner_lo, beta) = (sup[n - 1], sub[0]);
        let gamma = -b[0];
        let mut bb = b;
        bb[0] -= gamma;
        bb[n - 1] -= corner_lo * beta / gamma;
        let mut cp = vec![Complex64::new(0.0, 0.0); n];
        let mut denom = vec![Complex64::new(0.0, 0.0); n];
        denom[0] = bb[0];
        cp[0] = sup[0] / denom[0];
        for i in 1..n {
            denom[i] = bb[i] - sub[i] * cp[i - 1];
            cp[i] = if i + 1 < n { sup[i] / denom[i] } else { Complex64::new(0.0, 0.0) };
        }
        let mut cn = CrankNicolson {
            model: model.clone(),
            bands,
            dtau,
            alpha,
            sub,
            cp,
            denom,
            z: Vec::new(),
            gamma,
            beta,
            z_fact: Complex64::new(0.0, 0.0),
        };
        let mut w = vec![Complex64::new(0.0, 0.0); n];
        w[0] = gamma;
        w[n - 1] = corner_lo;
        let z = cn.open_solve(&w);
        cn.z_fact = Complex64::new(1.0, 0.0) + z[0] + beta * z[n - 1] / gamma;
        cn.z = z;
        if cn.denom.iter().any(|d| !d.is_finite() || d.norm() == 0.0) || !cn.z_fact.is_finite() {
            return Err(QuantumError::NonFinite("tridiagonal factorization".into()));
        }
        Ok(cn)
    }

    pub fn dtau(&self) -> f64 {
        self.dtau
    }

    pub fn model(&self) -> &QuantumModel {
        &self.model
    }

    fn open_solve(&self, r: &[Complex64]) -> Vec<Complex64> {
        let n = r.len();
        let mut x = vec![Complex64::new(0.0, 0.0); n];
        x[0] = r[0] / self.denom[0];
        for i in 1..n {
            x[i] = (r[i] - self.sub[i] * x[i - 1]) / self.denom[i];
        }
        for i in (0..n - 1).rev() {
            let next = x[i + 1];
            x[i] -= self.cp[i] * next;
        }
        x
    }

    fn cyclic_solve(&self, r: &[Complex64]) -> Vec<Complex64> {
        let n = r.len();
        let mut x = self.open_solve(r);
        let f = (x[0] + self.beta * x[n - 1] / self.gamma) / self.z_fact;
        for (xi, zi) in x.iter_mut().zip(&self.z) {
            *xi -= f * zi;
        }
        x
    }

    /// `(1 + iαH) x`
    fn lhs(&self, x: &[Complex64]) -> Vec<Complex64> {
        let hx = self.bands.apply(x);
        x.iter().zip(hx).map(|(a, b)| a + Complex64::new(0.0, self.alpha) * b).collect()
    }

    pub fn step(&self, wf: &WaveFunction1D) -> Result<WaveFunction1D, QuantumError> {
        self.model.check(wf)?;
        if self.dtau == 0.0 {
            return Ok(wf.clone());
        }
        let hpsi = self.bands.apply(&wf.psi);
        let rhs: Vec<Complex64> =
            wf.psi.iter().zip(hpsi).map(|(a, b)| a - Complex64::new(0.0, self.alpha) * b).collect();
        let scale = rhs.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let mut x = self.cyclic_solve(&rhs);
        let mut residual = f64::INFINITY;
        for _ in 0..=MAX_REFINEMENTS {
            let r: Vec<Complex64> = rhs.iter().zip(self.lhs(&x)).map(|(a, b)| a - b).collect();
            residual = r.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt() / scale.max(f64::MIN_POSITIVE);
            if !residual.is_finite() {
                return Err(QuantumError::NonFinite("Crank–Nicolson solve".into()));
            }
            if residual <= SOLVE_TOLERANCE {
                return Ok(WaveFunction1D { grid: wf.grid, psi: x });
            }
            let d = self.cyclic_solve(&r);
            x.iter_mut().zip(d).for_each(|(a, b)| *a += b);
        }
        Err(QuantumError::NonConvergence { residual, tolerance: SOLVE_TOLERANCE })
    }
}

pub fn crank_nicolson_step(
    model: &QuantumModel,
    wf: &WaveFunction1D,
    dtau: f64,
) -> Result<WaveFunction1D, QuantumError> {
    CrankNicolson::new(model, dtau)?.step(wf)
}

/// `steps` Crank–Nicolson steps, recording observables every `every` steps
/// (and at both ends).
pub fn evolve(
    model: &QuantumModel,
    wf: &WaveFunction1D,
    dtau: f64,
    steps: usize,
    every: usize,
) -> Result<(WaveFunction1D, Vec<Observables>), QuantumError> {
    let cn = CrankNicolson::new(model, dtau)?;
    let every = every.max(1);
    let mut psi = wf.clone();
    let mut table = vec![observables(model, &psi, 0.0)?];
    for k in 1..=steps {
        psi = cn.step(&psi)?;
        if k % every == 0 || k == steps {
            table.push(observables(model, &psi, k as f64 * dtau)?);
        }
    }
    Ok((psi, table))
}
